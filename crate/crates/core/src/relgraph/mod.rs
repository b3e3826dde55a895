//! The relative Cayley graph over `X ∪ ℋ` and the absolute Cayley graph over
//! `X`, explored lazily.
//!
//! Word lengths come from a BFS ball around the identity (the core) that is
//! grown on demand. A vertex outside the core is measured by searching
//! outward from it until the core boundary is first hit.

mod ball;

use std::collections::VecDeque;
use std::fmt;
use std::sync::{Arc, RwLock};

use indexmap::IndexMap;
use rustc_hash::{FxBuildHasher, FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

pub use ball::{ball_to_dot, BallCache, BallTable};

use crate::error::{Error, Result};
use crate::groups::{Group, GroupElement, ParabolicMode};

pub(crate) type FxIndexMap<K, V> = IndexMap<K, V, FxBuildHasher>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// Word metric over `X ∪ ℋ`.
    Relative,
    /// Word metric over `X` alone.
    Absolute,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Relative => "relative",
            Metric::Absolute => "absolute",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A letter of the symmetrised alphabet `(X ∪ ℋ)^±`.
///
/// The derived order is the canonical label order: absolute generators by
/// index with `+` before `-`, then parabolic letters by subgroup index and
/// shortlex element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum EdgeLabel {
    Absolute { index: usize, inverse: bool },
    Parabolic { parabolic: usize, element: GroupElement },
}

impl EdgeLabel {
    pub fn is_absolute(&self) -> bool {
        matches!(self, EdgeLabel::Absolute { .. })
    }
}

/// One collapsed edge type: right multiplication by `element`, which every
/// label in `labels` spells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub element: GroupElement,
    /// Sorted; the first entry labels paths through this edge.
    pub labels: Vec<EdgeLabel>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    /// Hard cap on vertices materialised by one ball or search.
    pub vertex_cap: usize,
    /// The identity ball is grown automatically only while it stays below
    /// this many vertices. Explicit requests may go up to `vertex_cap`.
    pub core_budget: usize,
    pub parabolic_mode: ParabolicMode,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            vertex_cap: 5_000_000,
            core_budget: 1_500_000,
            parabolic_mode: ParabolicMode::Exact,
        }
    }
}

/// BFS ball around the identity, stored in BFS order.
#[derive(Default)]
struct Core {
    dist: FxIndexMap<GroupElement, u32>,
    /// `sphere_start[r]` is the index of the first vertex at distance `r`.
    sphere_start: Vec<usize>,
}

impl Core {
    fn radius(&self) -> usize {
        self.sphere_start.len() - 1
    }

    fn sphere(&self, r: usize) -> std::ops::Range<usize> {
        let end = self.sphere_start.get(r + 1).copied().unwrap_or(self.dist.len());
        self.sphere_start[r]..end
    }
}

pub struct RelGraph {
    group: Arc<Group>,
    config: GraphConfig,
    approximate: bool,
    relative_steps: Vec<Step>,
    absolute_steps: Vec<Step>,
    /// Index into `cores` for each metric; equal when no parabolic adds edges.
    core_slot: [usize; 2],
    cores: Vec<RwLock<Core>>,
    /// Parabolic factors coned off in the relative metric, when lengths can
    /// be read off normal forms.
    formula: Option<Vec<usize>>,
    /// Lengths found outside the core, per core slot.
    far: Vec<RwLock<FxHashMap<GroupElement, u32>>>,
}

impl fmt::Debug for RelGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RelGraph")
            .field("spec_hash", &self.group.spec_hash())
            .field("relative_steps", &self.relative_steps.len())
            .field("absolute_steps", &self.absolute_steps.len())
            .finish()
    }
}

fn collapse(mut flat: Vec<(EdgeLabel, GroupElement)>) -> Vec<Step> {
    flat.sort();
    let mut steps: Vec<Step> = Vec::new();
    for (label, element) in flat {
        if element.is_identity() {
            continue;
        }
        match steps.iter_mut().find(|s| s.element == element) {
            Some(s) => s.labels.push(label),
            None => steps.push(Step {
                element,
                labels: vec![label],
            }),
        }
    }
    steps
}

impl RelGraph {
    pub fn new(group: Group, config: GraphConfig) -> Result<Self> {
        Self::from_arc(Arc::new(group), config)
    }

    pub fn from_arc(group: Arc<Group>, config: GraphConfig) -> Result<Self> {
        let mut absolute = Vec::new();
        for (index, g) in group.absolute_generators().iter().enumerate() {
            absolute.push((EdgeLabel::Absolute { index, inverse: false }, g.element.clone()));
            absolute.push((EdgeLabel::Absolute { index, inverse: true }, group.inverse(&g.element)));
        }
        let mut relative = absolute.clone();
        let mut approximate = false;
        for i in 0..group.parabolic_count() {
            if !group.parabolic_is_finite(i)? {
                approximate = true;
            }
            for h in group.parabolic_elements(i, config.parabolic_mode)? {
                relative.push((EdgeLabel::Parabolic { parabolic: i, element: h.clone() }, h));
            }
        }
        let relative_steps = collapse(relative);
        let absolute_steps = collapse(absolute);
        let same: bool = {
            let mut a: Vec<_> = relative_steps.iter().map(|s| &s.element).collect();
            let mut b: Vec<_> = absolute_steps.iter().map(|s| &s.element).collect();
            a.sort();
            b.sort();
            a == b
        };
        let core_slot = if same { [0, 0] } else { [0, 1] };
        let new_core = || {
            let mut dist = FxIndexMap::default();
            dist.insert(GroupElement::identity(), 0);
            RwLock::new(Core {
                dist,
                sphere_start: vec![0],
            })
        };
        let formula = (!approximate
            && group.absolute_generators().len() == group.generator_names().len()
            && group.normal_form_length(&GroupElement::identity(), &[]).is_some())
        .then(|| group.spec().parabolics.clone());
        let slots = if same { 1 } else { 2 };
        let cores = (0..slots).map(|_| new_core()).collect();
        let far = (0..slots).map(|_| RwLock::default()).collect();
        Ok(RelGraph {
            group,
            config,
            approximate,
            relative_steps,
            absolute_steps,
            core_slot,
            cores,
            formula,
            far,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn group_arc(&self) -> Arc<Group> {
        self.group.clone()
    }

    pub fn config(&self) -> &GraphConfig {
        &self.config
    }

    /// True when some parabolic subgroup was truncated.
    pub fn is_approximate(&self) -> bool {
        self.approximate
    }

    pub fn steps(&self, metric: Metric) -> &[Step] {
        match metric {
            Metric::Relative => &self.relative_steps,
            Metric::Absolute => &self.absolute_steps,
        }
    }

    /// The full alphabet as (label, element) pairs in canonical label order.
    pub fn alphabet(&self, metric: Metric) -> Vec<(EdgeLabel, GroupElement)> {
        let mut out: Vec<_> = self
            .steps(metric)
            .iter()
            .flat_map(|s| s.labels.iter().map(move |l| (l.clone(), s.element.clone())))
            .collect();
        out.sort();
        out
    }

    pub fn label_element(&self, label: &EdgeLabel) -> Result<GroupElement> {
        self.relative_steps
            .iter()
            .find(|s| s.labels.contains(label))
            .map(|s| s.element.clone())
            .ok_or_else(|| Error::LabelOutsideAlphabet(self.format_label(label)))
    }

    /// Neighbours of `v` in the relative graph, one entry per label, in
    /// canonical label order. A vertex reachable by several labels appears
    /// once per label.
    pub fn neighbors(&self, v: &GroupElement) -> Vec<(EdgeLabel, GroupElement)> {
        self.neighbors_in(v, Metric::Relative)
    }

    pub fn neighbors_in(&self, v: &GroupElement, metric: Metric) -> Vec<(EdgeLabel, GroupElement)> {
        let mut out: Vec<_> = self
            .steps(metric)
            .iter()
            .flat_map(|s| {
                let w = self.group.multiply(v, &s.element);
                s.labels.iter().map(move |l| (l.clone(), w.clone()))
            })
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Distinct neighbours of `v` with all labels on the collapsed edge.
    pub fn adjacent<'a>(
        &'a self,
        v: &GroupElement,
        metric: Metric,
    ) -> impl Iterator<Item = (GroupElement, &'a [EdgeLabel])> + 'a {
        let v = v.clone();
        self.steps(metric)
            .iter()
            .map(move |s| (self.group.multiply(&v, &s.element), s.labels.as_slice()))
    }

    /// Labels on the edge from `u` to `v`, empty if they are not adjacent.
    pub fn edge_labels(&self, u: &GroupElement, v: &GroupElement, metric: Metric) -> Vec<EdgeLabel> {
        let d = self.group.quotient(u, v);
        self.steps(metric)
            .iter()
            .find(|s| s.element == d)
            .map(|s| s.labels.clone())
            .unwrap_or_default()
    }

    pub fn format_label(&self, label: &EdgeLabel) -> String {
        match label {
            EdgeLabel::Absolute { index, inverse } => {
                let name = self
                    .group
                    .absolute_generators()
                    .get(*index)
                    .map_or_else(|| format!("x{index}"), |g| g.name.clone());
                if *inverse {
                    format!("{name}'")
                } else {
                    name
                }
            }
            EdgeLabel::Parabolic { parabolic, element } => {
                format!("{{{parabolic}:{}}}", self.group.format(element))
            }
        }
    }

    pub fn format_label_word(&self, word: &[EdgeLabel]) -> String {
        if word.is_empty() {
            return "e".into();
        }
        word.iter().map(|l| self.format_label(l)).collect::<Vec<_>>().join(" ")
    }

    /// Parse whitespace separated labels: absolute generator names with an
    /// optional `'` or `^-1`, or parabolic letters written `{i:word}`.
    pub fn parse_label_word(&self, text: &str) -> Result<Vec<EdgeLabel>> {
        let mut out = Vec::new();
        let mut rest = text.trim();
        let names: Vec<String> = self
            .group
            .absolute_generators()
            .iter()
            .map(|g| g.name.clone())
            .collect();
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix('{') {
                let close = r
                    .find('}')
                    .ok_or_else(|| Error::MalformedDirection(text.to_string()))?;
                let inner = &r[..close];
                let (idx, word) = inner
                    .split_once(':')
                    .ok_or_else(|| Error::MalformedDirection(text.to_string()))?;
                let parabolic: usize = idx
                    .trim()
                    .parse()
                    .map_err(|_| Error::MalformedDirection(text.to_string()))?;
                let element = self.group.reduce(word)?;
                let label = EdgeLabel::Parabolic { parabolic, element };
                self.label_element(&label)?;
                out.push(label);
                rest = r[close + 1..].trim_start();
                continue;
            }
            let end = rest.find(|c: char| c.is_whitespace() || c == '{').unwrap_or(rest.len());
            let token = &rest[..end];
            rest = rest[end..].trim_start();
            for (index, power) in crate::groups::tokenize(token, &names)? {
                let inverse = power < 0;
                for _ in 0..power.unsigned_abs() {
                    out.push(EdgeLabel::Absolute { index, inverse });
                }
            }
        }
        Ok(out)
    }

    /// Element spelled by a label word.
    pub fn evaluate_labels(&self, word: &[EdgeLabel]) -> Result<GroupElement> {
        let mut g = GroupElement::identity();
        for l in word {
            g = self.group.multiply(&g, &self.label_element(l)?);
        }
        Ok(g)
    }

    fn core(&self, metric: Metric) -> &RwLock<Core> {
        &self.cores[self.core_slot[metric as usize]]
    }

    pub fn core_radius(&self, metric: Metric) -> usize {
        self.core(metric).read().unwrap().radius()
    }

    pub fn core_size(&self, metric: Metric) -> usize {
        self.core(metric).read().unwrap().dist.len()
    }

    fn grow_core(&self, metric: Metric, cap: usize) -> Result<()> {
        let mut core = self.core(metric).write().unwrap();
        let r = core.radius();
        let range = core.sphere(r);
        let start = core.dist.len();
        let steps = self.steps(metric);
        let mut next: Vec<GroupElement> = Vec::new();
        for i in range {
            let v = core.dist.get_index(i).unwrap().0.clone();
            for s in steps {
                let w = self.group.multiply(&v, &s.element);
                if !core.dist.contains_key(&w) {
                    core.dist.insert(w.clone(), (r + 1) as u32);
                    next.push(w);
                    if core.dist.len() > cap {
                        core.dist.truncate(start);
                        return Err(Error::ResourceCap {
                            what: format!("{metric} ball of radius {}", r + 1),
                            limit: cap,
                        });
                    }
                }
            }
        }
        core.sphere_start.push(start);
        Ok(())
    }

    /// Make the identity ball complete up to `radius`.
    pub fn ensure_core(&self, metric: Metric, radius: usize) -> Result<()> {
        while self.core_radius(metric) < radius {
            self.grow_core(metric, self.config.vertex_cap)?;
        }
        Ok(())
    }

    fn try_auto_grow(&self, metric: Metric) -> bool {
        let (total, est) = {
            let core = self.core(metric).read().unwrap();
            let r = core.radius();
            let last = core.sphere(r).len();
            let prev = if r == 0 { 1 } else { core.sphere(r - 1).len().max(1) };
            (core.dist.len(), last * last.div_ceil(prev).max(1) + self.steps(metric).len())
        };
        if total + est > self.config.core_budget {
            return false;
        }
        self.grow_core(metric, self.config.core_budget).is_ok()
    }

    /// Vertices at distance exactly `r` from the identity, in BFS order.
    pub fn sphere(&self, metric: Metric, r: usize) -> Result<Vec<GroupElement>> {
        self.ensure_core(metric, r)?;
        let core = self.core(metric).read().unwrap();
        Ok(core.sphere(r).map(|i| core.dist.get_index(i).unwrap().0.clone()).collect())
    }

    /// Word length of `h` when `h` lies in the current core.
    pub fn core_length(&self, h: &GroupElement, metric: Metric) -> Option<usize> {
        self.core(metric).read().unwrap().dist.get(h).map(|&d| d as usize)
    }

    /// `|h|` when it is at most `bound`, otherwise `None`. Never searches
    /// outside the identity ball of radius `bound`.
    pub fn length_within(&self, h: &GroupElement, bound: usize, metric: Metric) -> Result<Option<usize>> {
        self.ensure_core(metric, bound)?;
        Ok(self.core_length(h, metric).filter(|&d| d <= bound))
    }

    /// Exact word length `|h|` in the given metric.
    pub fn length(&self, h: &GroupElement, metric: Metric) -> Result<usize> {
        if let Some(coned) = &self.formula {
            let coned: &[usize] = if metric == Metric::Relative { coned } else { &[] };
            if let Some(d) = self.group.normal_form_length(h, coned) {
                return Ok(d);
            }
        }
        loop {
            if let Some(d) = self.core_length(h, metric) {
                return Ok(d);
            }
            if !self.try_auto_grow(metric) {
                break;
            }
        }
        let far = &self.far[self.core_slot[metric as usize]];
        if let Some(&d) = far.read().unwrap().get(h) {
            return Ok(d as usize);
        }
        let d = self.length_outside_core(h, metric)?;
        let mut memo = far.write().unwrap();
        if memo.len() < self.config.core_budget {
            memo.insert(h.clone(), d as u32);
        }
        Ok(d)
    }

    // Outside the complete ball of radius H: the first BFS level from h that
    // meets the ball sits at distance |h| - H.
    fn length_outside_core(&self, h: &GroupElement, metric: Metric) -> Result<usize> {
        let core = self.core(metric).read().unwrap();
        let radius = core.radius();
        let steps = self.steps(metric);
        let mut seen: FxHashSet<GroupElement> = FxHashSet::default();
        seen.insert(h.clone());
        let mut frontier = vec![h.clone()];
        let mut level = 0;
        loop {
            level += 1;
            let mut next = Vec::new();
            for v in &frontier {
                for s in steps {
                    let w = self.group.multiply(v, &s.element);
                    if core.dist.contains_key(&w) {
                        return Ok(level + radius);
                    }
                    if seen.insert(w.clone()) {
                        next.push(w);
                    }
                }
            }
            if seen.len() > self.config.vertex_cap {
                return Err(Error::ResourceCap {
                    what: format!("{metric} distance search"),
                    limit: self.config.vertex_cap,
                });
            }
            frontier = next;
        }
    }

    pub fn distance(&self, u: &GroupElement, v: &GroupElement, metric: Metric) -> Result<usize> {
        if u == v {
            return Ok(0);
        }
        self.length(&self.group.quotient(u, v), metric)
    }

    /// BFS ball around `center`, computed as a translate of the core.
    pub fn ball(&self, center: &GroupElement, radius: usize, metric: Metric) -> Result<BallTable> {
        self.ensure_core(metric, radius)?;
        let core = self.core(metric).read().unwrap();
        let end = core.sphere_start.get(radius + 1).copied().unwrap_or(core.dist.len());
        let mut entries: Vec<(GroupElement, u32)> = (0..end)
            .map(|i| {
                let (g, &d) = core.dist.get_index(i).unwrap();
                (self.group.multiply(center, g), d)
            })
            .collect();
        entries.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        Ok(BallTable::new(
            center.clone(),
            radius,
            metric,
            self.approximate && metric == Metric::Relative,
            entries,
        ))
    }

    /// Plain BFS from `center`, independent of the core. Used as a check.
    pub fn bfs_ball(
        &self,
        center: &GroupElement,
        radius: usize,
        metric: Metric,
    ) -> Result<Vec<(GroupElement, u32)>> {
        let mut dist: FxIndexMap<GroupElement, u32> = FxIndexMap::default();
        dist.insert(center.clone(), 0);
        let mut queue = VecDeque::from([center.clone()]);
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            if d as usize == radius {
                continue;
            }
            for s in self.steps(metric) {
                let w = self.group.multiply(&v, &s.element);
                if !dist.contains_key(&w) {
                    dist.insert(w.clone(), d + 1);
                    queue.push_back(w);
                    if dist.len() > self.config.vertex_cap {
                        return Err(Error::ResourceCap {
                            what: format!("{metric} ball of radius {radius}"),
                            limit: self.config.vertex_cap,
                        });
                    }
                }
            }
        }
        Ok(dist.into_iter().collect())
    }
}
