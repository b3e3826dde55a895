use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

/// A signed primitive generator, packed as `gen << 1 | inverse`.
///
/// The derived order puts `a` before `a'` before `b`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Letter(u16);

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        debug_assert!(gen < (1 << 15));
        Letter(((gen as u16) << 1) | inverse as u16)
    }

    pub fn gen(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    /// Shift the generator index, keeping the sign.
    pub(crate) fn offset(self, by: usize) -> Letter {
        Letter::new(self.gen() + by, self.is_inverse())
    }
}

impl std::fmt::Debug for Letter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "x{}{}", self.gen(), if self.is_inverse() { "'" } else { "" })
    }
}

/// A group element stored as its canonical normal-form word.
///
/// Elements are only meaningful together with the [`Group`](super::Group)
/// that produced them. Ordering is shortlex on the normal form.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    word: Vec<Letter>,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement { word: Vec::new() }
    }

    /// Wraps a word that is already in normal form.
    pub(crate) fn from_normal_form(word: Vec<Letter>) -> Self {
        GroupElement { word }
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.word
    }

    /// Length of the normal-form word (not a word metric).
    pub fn word_len(&self) -> usize {
        self.word.len()
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        shortlex(&self.word, &other.word)
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.word)
    }
}

pub fn shortlex(a: &[Letter], b: &[Letter]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

pub fn free_reduce(word: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &l in word {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn invert_word(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|l| l.inverse()).collect()
}

/// Cyclically reduce an already freely reduced word.
pub fn cyclic_reduce(word: &[Letter]) -> Vec<Letter> {
    let mut w = free_reduce(word);
    while w.len() >= 2 && w[0] == w[w.len() - 1].inverse() {
        w.pop();
        w.remove(0);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(spec: &[(usize, bool)]) -> Vec<Letter> {
        spec.iter().map(|&(g, i)| Letter::new(g, i)).collect()
    }

    #[test]
    fn letter_packing_round_trips() {
        let l = Letter::new(7, true);
        assert_eq!(l.gen(), 7);
        assert!(l.is_inverse());
        assert_eq!(l.inverse(), Letter::new(7, false));
        assert!(Letter::new(0, false) < Letter::new(0, true));
        assert!(Letter::new(0, true) < Letter::new(1, false));
    }

    #[test]
    fn free_reduction_cancels_adjacent_pairs() {
        // a b b' a -> a a
        let word = w(&[(0, false), (1, false), (1, true), (0, false)]);
        assert_eq!(free_reduce(&word), w(&[(0, false), (0, false)]));
        // a b b' a' -> e
        let word = w(&[(0, false), (1, false), (1, true), (0, true)]);
        assert!(free_reduce(&word).is_empty());
    }

    #[test]
    fn cyclic_reduction_strips_conjugating_letters() {
        let word = w(&[(0, false), (1, false), (2, false), (0, true)]);
        assert_eq!(cyclic_reduce(&word), w(&[(1, false), (2, false)]));
    }

    #[test]
    fn shortlex_orders_by_length_first() {
        let short = GroupElement::from_normal_form(w(&[(1, true)]));
        let long = GroupElement::from_normal_form(w(&[(0, false), (0, false)]));
        assert!(short < long);
        assert!(GroupElement::identity() < short);
    }
}
