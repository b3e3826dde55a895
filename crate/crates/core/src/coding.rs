//! Binary coding of edge labels, restricted labels with their nested order,
//! and the minimal-label machinery `s_n`, `T_n`, `g_n`, `H_n`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::bundles::{geo1_trunc, BundleParams, Geo1Trunc};
use crate::error::{Error, Result};
use crate::geodesics::{cgr_bundle_trunc, geodesic_dag, DirectionSpec};
use crate::groups::GroupElement;
use crate::relgraph::{EdgeLabel, Metric, RelGraph};

/// Default number of continuations enumerated per vertex.
pub const CONTINUATION_CAP: usize = 256;

/// Bijection from the alphabet, in canonical label order, onto binary
/// strings in length-then-lexicographic order: `"", 0, 1, 00, 01, ...`.
#[derive(Clone, Debug)]
pub struct LabelCodec {
    alphabet: Vec<EdgeLabel>,
    pub approximate: bool,
}

/// The `k`-th binary string (0-based) in length-lex order.
pub fn binary_string(k: usize) -> Vec<bool> {
    let m = k + 1;
    let len = usize::BITS as usize - 1 - m.leading_zeros() as usize;
    (0..len).rev().map(|i| (m >> i) & 1 == 1).collect()
}

impl LabelCodec {
    pub fn new(graph: &RelGraph) -> Self {
        LabelCodec {
            alphabet: graph.alphabet(Metric::Relative).into_iter().map(|(l, _)| l).collect(),
            approximate: graph.is_approximate(),
        }
    }

    pub fn alphabet(&self) -> &[EdgeLabel] {
        &self.alphabet
    }

    pub fn code(&self, label: &EdgeLabel) -> Result<Vec<bool>> {
        let k = self
            .alphabet
            .binary_search(label)
            .map_err(|_| Error::LabelOutsideAlphabet(format!("{label:?}")))?;
        Ok(binary_string(k))
    }

    pub fn code_string(&self, label: &EdgeLabel) -> Result<String> {
        Ok(self.code(label)?.iter().map(|&b| if b { '1' } else { '0' }).collect())
    }
}

/// An `n × n` bit matrix: row `j` is the code of the `j`-th label cut or
/// zero-padded to `n` bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RestrictedLabel {
    n: usize,
    bits: Vec<bool>,
}

impl RestrictedLabel {
    pub fn from_rows(rows: &[Vec<bool>], n: usize) -> Result<Self> {
        if rows.len() < n {
            return Err(Error::PathTooShort { len: rows.len(), n });
        }
        let mut bits = Vec::with_capacity(n * n);
        for row in &rows[..n] {
            for i in 0..n {
                bits.push(row.get(i).copied().unwrap_or(false));
            }
        }
        Ok(RestrictedLabel { n, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bit(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.n + col]
    }

    /// Top-left `m × m` submatrix.
    pub fn restrict(&self, m: usize) -> RestrictedLabel {
        assert!(m <= self.n, "cannot restrict a {}-label to {m}", self.n);
        let mut bits = Vec::with_capacity(m * m);
        for r in 0..m {
            bits.extend_from_slice(&self.bits[r * self.n..r * self.n + m]);
        }
        RestrictedLabel { n: m, bits }
    }

    /// Every `n × n` matrix, for exhaustive checks at small `n`.
    pub fn all(n: usize) -> Vec<RestrictedLabel> {
        assert!(n * n < 24);
        (0u32..1 << (n * n))
            .map(|x| RestrictedLabel {
                n,
                bits: (0..n * n).rev().map(|i| (x >> i) & 1 == 1).collect(),
            })
            .collect()
    }

    pub fn from_bits(n: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != n * n {
            return Err(Error::SizeMismatch(bits.len(), n * n));
        }
        Ok(RestrictedLabel { n, bits })
    }

    pub fn rows(&self) -> Vec<String> {
        self.bits
            .chunks(self.n.max(1))
            .take(self.n)
            .map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect()
    }
}

impl fmt::Debug for RestrictedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rows().join("|"))
    }
}

impl fmt::Display for RestrictedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rows().join("|"))
    }
}

impl Serialize for RestrictedLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

/// Restricted label of a path from its per-edge labels.
pub fn restrict_label(codec: &LabelCodec, labels: &[EdgeLabel], n: usize) -> Result<RestrictedLabel> {
    if labels.len() < n {
        return Err(Error::PathTooShort { len: labels.len(), n });
    }
    let rows = labels[..n].iter().map(|l| codec.code(l)).collect::<Result<Vec<_>>>()?;
    RestrictedLabel::from_rows(&rows, n)
}

/// The order `<_n`: compare `w|_1`, then `w|_2`, up to `w|_n`, each read row
/// by row. A strict difference at stage `k` decides every later `n`.
pub fn compare_n(u: &RestrictedLabel, v: &RestrictedLabel) -> Result<Ordering> {
    if u.n != v.n {
        return Err(Error::SizeMismatch(u.n, v.n));
    }
    for k in 1..=u.n {
        for r in 0..k {
            for c in 0..k {
                match u.bit(r, c).cmp(&v.bit(r, c)) {
                    Ordering::Equal => {}
                    o => return Ok(o),
                }
            }
        }
    }
    Ok(Ordering::Equal)
}

impl PartialOrd for RestrictedLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        compare_n(self, other).ok()
    }
}

/// Per-edge least labels of a path given by its vertices.
pub fn path_labels(graph: &RelGraph, vertices: &[GroupElement]) -> Result<Vec<EdgeLabel>> {
    vertices
        .windows(2)
        .map(|w| {
            graph
                .edge_labels(&w[0], &w[1], Metric::Relative)
                .into_iter()
                .next()
                .ok_or_else(|| Error::InvalidTriangle("consecutive vertices are not adjacent".into()))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CEntry {
    #[serde(skip)]
    pub g: GroupElement,
    pub vertex: String,
    /// Layer of `g` in the bundle from `e`.
    pub depth: usize,
    pub label: RestrictedLabel,
}

/// Finite part of `C^η`: pairs `(g, lab(γ)|_n)` for `g ∈ Geo₁(e, η)` up to a
/// depth and `γ` running over geodesic continuations from `g`.
#[derive(Clone, Debug, Serialize)]
pub struct CEtaWindow {
    pub direction: String,
    pub depth: usize,
    pub n: usize,
    /// Entries come from vertices with layer at most this.
    pub max_entry_depth: usize,
    pub entries: Vec<CEntry>,
    /// Set when some vertex had more continuations than the cap.
    pub capped: bool,
}

pub fn c_eta_window(
    graph: &RelGraph,
    codec: &LabelCodec,
    direction: &DirectionSpec,
    depth: usize,
    n: usize,
    params: &BundleParams,
    cap: usize,
) -> Result<CEtaWindow> {
    let geo = geo1_trunc(graph, &GroupElement::identity(), direction, depth, params)?;
    c_eta_window_from(graph, codec, &geo, direction, n, params, cap)
}

/// As [`c_eta_window`], reusing an already computed `Geo₁(e, η)`.
pub fn c_eta_window_from(
    graph: &RelGraph,
    codec: &LabelCodec,
    geo: &Geo1Trunc,
    direction: &DirectionSpec,
    n: usize,
    params: &BundleParams,
    cap: usize,
) -> Result<CEtaWindow> {
    let depth = geo.depth;
    if n == 0 || depth < n + params.margin {
        return Err(Error::DepthTooSmall { n, depth });
    }
    let max_entry_depth = depth - n - params.margin;
    let mut entries = Vec::new();
    let mut capped = false;
    for (g, k) in &geo.vertices {
        if *k > max_entry_depth {
            continue;
        }
        let bundle = cgr_bundle_trunc(graph, g, direction, n, params.margin)?;
        let list = bundle.dag.enumerate(cap);
        capped |= list.truncated;
        let labels: BTreeSet<Vec<bool>> = list
            .paths
            .iter()
            .map(|p| restrict_label(codec, &p.labels, n).map(|r| r.bits))
            .collect::<Result<_>>()?;
        for bits in labels {
            entries.push(CEntry {
                g: g.clone(),
                vertex: graph.group().format(g),
                depth: *k,
                label: RestrictedLabel { n, bits },
            });
        }
    }
    Ok(CEtaWindow {
        direction: direction.name.clone(),
        depth,
        n,
        max_entry_depth,
        entries,
        capped,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalLabel {
    pub s_n: RestrictedLabel,
    pub threshold: usize,
    /// Some label is carried by at least two distinct vertices beyond the
    /// threshold.
    pub pigeonhole: bool,
}

/// The `<_n`-least label among entries deeper than `threshold`.
pub fn s_n_eta(window: &CEtaWindow, threshold: usize) -> Result<MinimalLabel> {
    let beyond: Vec<&CEntry> = window.entries.iter().filter(|e| e.depth > threshold).collect();
    let s_n = beyond
        .iter()
        .map(|e| &e.label)
        .min_by(|a, b| compare_n(a, b).unwrap())
        .ok_or(Error::EmptyBeyondThreshold { threshold })?
        .clone();
    let mut carriers: BTreeMap<&[bool], BTreeSet<&GroupElement>> = BTreeMap::new();
    for e in &beyond {
        carriers.entry(&e.label.bits).or_default().insert(&e.g);
    }
    Ok(MinimalLabel {
        s_n,
        threshold,
        pigeonhole: carriers.values().any(|s| s.len() >= 2),
    })
}

/// Sort key realising the order on `G`: word length, then the
/// lexicographically least geodesic label word.
pub fn group_order_key(graph: &RelGraph, g: &GroupElement) -> Result<(usize, Vec<EdgeLabel>)> {
    let dag = geodesic_dag(graph, &GroupElement::identity(), g, Metric::Relative)?;
    let word = dag.enumerate(1).paths.remove(0).labels;
    Ok((dag.length, word))
}

#[derive(Clone, Debug, Serialize)]
pub struct TnGn {
    #[serde(skip)]
    pub t_n: Vec<GroupElement>,
    #[serde(skip)]
    pub g_n: GroupElement,
    pub t_words: Vec<String>,
    pub g_word: String,
    /// `k_n = d(e, g_n)`.
    pub k_n: usize,
}

/// `T_n` (vertices of the window carrying `s_n`) and its least element.
pub fn t_n_and_g_n(graph: &RelGraph, window: &CEtaWindow, s_n: &RestrictedLabel) -> Result<TnGn> {
    let mut t_n: Vec<GroupElement> = window
        .entries
        .iter()
        .filter(|e| &e.label == s_n)
        .map(|e| e.g.clone())
        .collect();
    t_n.sort();
    t_n.dedup();
    let mut keyed = t_n
        .iter()
        .map(|g| Ok((group_order_key(graph, g)?, g)))
        .collect::<Result<Vec<_>>>()?;
    keyed.sort();
    let ((k_n, _), g_n) = keyed
        .first()
        .map(|(k, g)| (k.clone(), (*g).clone()))
        .ok_or(Error::EmptyBeyondThreshold { threshold: 0 })?;
    let fmt = |g: &GroupElement| graph.group().format(g);
    Ok(TnGn {
        t_words: t_n.iter().map(fmt).collect(),
        g_word: fmt(&g_n),
        t_n,
        g_n,
        k_n,
    })
}

/// `H_n = g_n^{-1} T_n` together with the radius around `e` on which it is
/// complete: `max_entry_depth - k_n`.
#[derive(Clone, Debug, Serialize)]
pub struct HnWindow {
    pub n: usize,
    #[serde(skip)]
    pub g_n: GroupElement,
    #[serde(skip)]
    pub set: Vec<GroupElement>,
    pub words: Vec<String>,
    pub reliable_radius: usize,
}

pub fn h_n_window(graph: &RelGraph, window: &CEtaWindow, tg: &TnGn) -> HnWindow {
    let g = graph.group();
    let inv = g.inverse(&tg.g_n);
    let mut set: Vec<GroupElement> = tg.t_n.iter().map(|t| g.multiply(&inv, t)).collect();
    set.sort();
    HnWindow {
        n: window.n,
        g_n: tg.g_n.clone(),
        words: set.iter().map(|h| g.format(h)).collect(),
        set,
        reliable_radius: window.max_entry_depth.saturating_sub(tg.k_n),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Translator {
    pub g: String,
    pub length: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslatorReport {
    pub n: usize,
    /// Radius of the ball around `e` on which `A` and `g·B` are compared.
    pub radius: usize,
    pub candidates: usize,
    /// Candidates too long for `g·B` to be known on the comparison ball.
    pub undecided: usize,
    pub matches: Vec<Translator>,
    pub distance_bound: usize,
    pub count_bound: usize,
    pub distance_ok: bool,
    pub count_ok: bool,
}

impl TranslatorReport {
    pub fn passed(&self) -> bool {
        self.distance_ok && self.count_ok
    }
}

/// Look for `g` with `A = g·B`, trying the candidates `g = a b^{-1}`.
///
/// Both sets are compared on the ball of radius `min(ρ_A, ρ_B) / 2` around
/// `e`, where `ρ` is the reliable radius of each window. A candidate is
/// decided only when `|g|` plus that radius stays within `ρ_B`.
pub fn check_translators(
    graph: &RelGraph,
    a: &HnWindow,
    b: &HnWindow,
    nu: usize,
    count_bound: usize,
) -> Result<TranslatorReport> {
    if a.n != b.n {
        return Err(Error::SizeMismatch(a.n, b.n));
    }
    let radius = a.reliable_radius.min(b.reliable_radius) / 2;
    if radius == 0 {
        return Err(Error::DepthTooSmall {
            n: a.n,
            depth: a.reliable_radius.min(b.reliable_radius),
        });
    }
    let grp = graph.group();
    let mut candidates: BTreeSet<GroupElement> = BTreeSet::new();
    for x in &a.set {
        for y in &b.set {
            candidates.insert(grp.quotient(&grp.inverse(x), &grp.inverse(y)));
        }
    }
    let within = |vs: &mut dyn Iterator<Item = GroupElement>| -> Result<Vec<GroupElement>> {
        let mut out = Vec::new();
        for v in vs {
            if graph.length_within(&v, radius, Metric::Relative)?.is_some() {
                out.push(v);
            }
        }
        out.sort();
        Ok(out)
    };
    let left = within(&mut a.set.iter().cloned())?;
    let mut matches = Vec::new();
    let mut undecided = 0;
    for g in &candidates {
        let Some(len) = graph.length_within(g, b.reliable_radius - radius, Metric::Relative)? else {
            undecided += 1;
            continue;
        };
        if within(&mut b.set.iter().map(|y| grp.multiply(g, y)))? == left {
            matches.push(Translator {
                g: grp.format(g),
                length: len,
            });
        }
    }
    let distance_bound = 8 * nu;
    Ok(TranslatorReport {
        n: a.n,
        radius,
        candidates: candidates.len(),
        undecided,
        distance_ok: matches.iter().all(|m| m.length <= distance_bound),
        count_ok: matches.len() <= count_bound,
        matches,
        distance_bound,
        count_bound,
    })
}

/// Everything computed for one direction and one `n`.
#[derive(Clone, Debug, Serialize)]
pub struct CodingRun {
    pub direction: String,
    pub n: usize,
    pub depth: usize,
    pub threshold: usize,
    pub entries: usize,
    pub capped: bool,
    pub s_n: RestrictedLabel,
    /// `s_n` with the threshold raised from half to two thirds of the
    /// entry window.
    pub s_n_late: RestrictedLabel,
    pub threshold_stable: bool,
    pub pigeonhole: bool,
    pub t_n_size: usize,
    pub g_n: String,
    pub k_n: usize,
    pub h_n: HnWindow,
}

pub fn coding_run(
    graph: &RelGraph,
    codec: &LabelCodec,
    direction: &DirectionSpec,
    depth: usize,
    n: usize,
    params: &BundleParams,
) -> Result<CodingRun> {
    let geo = geo1_trunc(graph, &GroupElement::identity(), direction, depth, params)?;
    coding_run_from(graph, codec, &geo, direction, n, params)
}

/// Runs for several `n` sharing one `Geo₁(e, η)`. The outer error is from
/// `Geo₁`; each `n` then succeeds or fails on its own.
pub fn coding_runs(
    graph: &RelGraph,
    codec: &LabelCodec,
    direction: &DirectionSpec,
    depth: usize,
    ns: &[usize],
    params: &BundleParams,
) -> Result<Vec<Result<CodingRun>>> {
    let geo = geo1_trunc(graph, &GroupElement::identity(), direction, depth, params)?;
    Ok(ns
        .iter()
        .map(|&n| coding_run_from(graph, codec, &geo, direction, n, params))
        .collect())
}

fn coding_run_from(
    graph: &RelGraph,
    codec: &LabelCodec,
    geo: &Geo1Trunc,
    direction: &DirectionSpec,
    n: usize,
    params: &BundleParams,
) -> Result<CodingRun> {
    let depth = geo.depth;
    let window = c_eta_window_from(graph, codec, geo, direction, n, params, CONTINUATION_CAP)?;
    let threshold = window.max_entry_depth / 2;
    let s = s_n_eta(&window, threshold)?;
    let late = s_n_eta(&window, 2 * window.max_entry_depth / 3)?;
    let tg = t_n_and_g_n(graph, &window, &s.s_n)?;
    let h_n = h_n_window(graph, &window, &tg);
    Ok(CodingRun {
        direction: direction.name.clone(),
        n,
        depth,
        threshold,
        entries: window.entries.len(),
        capped: window.capped,
        threshold_stable: s.s_n == late.s_n,
        s_n_late: late.s_n,
        s_n: s.s_n,
        pigeonhole: s.pigeonhole,
        t_n_size: tg.t_n.len(),
        g_n: tg.g_word.clone(),
        k_n: tg.k_n,
        h_n,
    })
}
