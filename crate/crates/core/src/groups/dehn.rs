//! Dehn's algorithm for C'(1/6) presentations, plus a canonical normal form.
//!
//! Dehn reduction decides the word problem but does not canonicalise. The
//! stored normal form is the shortlex-least word among all words equal to the
//! input that are reachable from its Dehn reduction by single relator
//! substitutions without exceeding `|dehn(w)| + 2 * max_piece` letters. In a
//! C'(1/6) group any two such words are joined by a ladder of relator cells,
//! and sweeping the ladder one cell at a time never exceeds that bound, so
//! the closure contains every geodesic word and the result is the
//! shortlex-least geodesic.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::RwLock;

use serde::Serialize;

use super::word::{cyclic_reduce, free_reduce, invert_word, shortlex, Letter};
use crate::error::{Error, Result};

const CLOSURE_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Piece {
    pub word: String,
    pub len: usize,
    /// Largest `len / |r|` over the relators sharing this piece.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PresentationReport {
    pub skipped: bool,
    pub relator_lengths: Vec<usize>,
    pub pieces: Vec<Piece>,
    /// Maximal piece-to-relator ratio as `(piece length, relator length)`.
    pub max_ratio: Option<(usize, usize)>,
    pub passes: bool,
}

impl PresentationReport {
    pub fn max_ratio_f64(&self) -> f64 {
        self.max_ratio.map_or(0.0, |(p, r)| p as f64 / r as f64)
    }
}

/// All cyclic conjugates of every relator and its inverse, deduplicated.
pub(crate) fn symmetrize(relators: &[Vec<Letter>]) -> Vec<Vec<Letter>> {
    let mut out: Vec<Vec<Letter>> = Vec::new();
    for r in relators {
        for base in [r.clone(), invert_word(r)] {
            for shift in 0..base.len() {
                let mut c = base[shift..].to_vec();
                c.extend_from_slice(&base[..shift]);
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out
}

fn common_prefix(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

pub(crate) fn analyze_pieces(
    relators: &[Vec<Letter>],
    format: impl Fn(&[Letter]) -> String,
) -> PresentationReport {
    let sym = symmetrize(relators);
    let mut pieces: HashMap<Vec<Letter>, (usize, usize)> = HashMap::new();
    for i in 0..sym.len() {
        for j in (i + 1)..sym.len() {
            let c = common_prefix(&sym[i], &sym[j]);
            if c == 0 {
                continue;
            }
            let shortest = sym[i].len().min(sym[j].len());
            for len in 1..=c {
                let entry = pieces.entry(sym[i][..len].to_vec()).or_insert((len, shortest));
                if shortest < entry.1 {
                    entry.1 = shortest;
                }
            }
        }
    }
    let mut list: Vec<(Vec<Letter>, usize, usize)> =
        pieces.into_iter().map(|(w, (l, r))| (w, l, r)).collect();
    list.sort_by(|a, b| {
        (b.1 * a.2)
            .cmp(&(a.1 * b.2))
            .then_with(|| shortlex(&a.0, &b.0))
    });
    let max_ratio = list.first().map(|(_, l, r)| (*l, *r));
    let passes = max_ratio.map_or(true, |(l, r)| 6 * l < r);
    PresentationReport {
        skipped: false,
        relator_lengths: relators.iter().map(|r| r.len()).collect(),
        pieces: list
            .into_iter()
            .map(|(w, l, r)| Piece {
                word: format(&w),
                len: l,
                ratio: l as f64 / r as f64,
            })
            .collect(),
        max_ratio,
        passes,
    }
}

#[derive(Debug)]
pub(crate) struct DehnGroup {
    symmetrized: Vec<Vec<Letter>>,
    slack: usize,
    cache: RwLock<HashMap<Vec<Letter>, Vec<Letter>>>,
}

impl Clone for DehnGroup {
    fn clone(&self) -> Self {
        DehnGroup {
            symmetrized: self.symmetrized.clone(),
            slack: self.slack,
            cache: RwLock::new(self.cache.read().unwrap().clone()),
        }
    }
}

impl DehnGroup {
    pub(crate) fn new(
        relators: Vec<Vec<Letter>>,
        format: impl Fn(&[Letter]) -> String,
    ) -> Result<Self> {
        let relators: Vec<Vec<Letter>> = relators
            .iter()
            .map(|r| cyclic_reduce(r))
            .filter(|r| !r.is_empty())
            .collect();
        let report = analyze_pieces(&relators, &format);
        if !report.passes {
            let piece = report.pieces.first().map(|p| p.word.clone()).unwrap_or_default();
            return Err(Error::NotSmallCancellation {
                ratio: report.max_ratio_f64(),
                piece,
            });
        }
        let max_piece = report.pieces.iter().map(|p| p.len).max().unwrap_or(0);
        Ok(DehnGroup {
            symmetrized: symmetrize(&relators),
            slack: 2 * max_piece,
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// Repeatedly replace the leftmost-longest subword that is more than half
    /// of a relator by the inverse of the complementary part.
    pub(crate) fn dehn_reduce(&self, word: &[Letter]) -> Vec<Letter> {
        let mut w = free_reduce(word);
        'outer: loop {
            for i in 0..w.len() {
                let mut best: Option<(usize, usize)> = None;
                for (ri, r) in self.symmetrized.iter().enumerate() {
                    let c = common_prefix(&w[i..], r);
                    if 2 * c > r.len() && best.is_none_or(|(_, bc)| c > bc) {
                        best = Some((ri, c));
                    }
                }
                if let Some((ri, c)) = best {
                    let r = &self.symmetrized[ri];
                    let mut next = w[..i].to_vec();
                    next.extend(invert_word(&r[c..]));
                    next.extend_from_slice(&w[i + c..]);
                    w = free_reduce(&next);
                    continue 'outer;
                }
            }
            return w;
        }
    }

    pub(crate) fn is_trivial(&self, word: &[Letter]) -> bool {
        self.dehn_reduce(word).is_empty()
    }

    pub(crate) fn normalize(&self, word: &[Letter]) -> Vec<Letter> {
        let reduced = self.dehn_reduce(word);
        if reduced.len() <= 1 {
            return reduced;
        }
        if let Some(hit) = self.cache.read().unwrap().get(&reduced) {
            return hit.clone();
        }
        let nf = self.closure_minimum(&reduced);
        self.cache.write().unwrap().insert(reduced, nf.clone());
        nf
    }

    fn closure_minimum(&self, start: &[Letter]) -> Vec<Letter> {
        let bound = start.len() + self.slack;
        let mut seen: HashSet<Vec<Letter>> = HashSet::from([start.to_vec()]);
        let mut queue = VecDeque::from([start.to_vec()]);
        let mut best = start.to_vec();
        while let Some(w) = queue.pop_front() {
            if shortlex(&w, &best).is_lt() {
                best = w.clone();
            }
            for i in 0..w.len() {
                for r in &self.symmetrized {
                    let c = common_prefix(&w[i..], r);
                    for k in 1..=c.min(r.len() - 1) {
                        let mut next = w[..i].to_vec();
                        next.extend(invert_word(&r[k..]));
                        next.extend_from_slice(&w[i + k..]);
                        let next = free_reduce(&next);
                        if next.len() <= bound && !seen.contains(&next) {
                            assert!(
                                seen.len() < CLOSURE_LIMIT,
                                "small-cancellation normal form search exceeded {CLOSURE_LIMIT} words"
                            );
                            seen.insert(next.clone());
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
        best
    }
}
