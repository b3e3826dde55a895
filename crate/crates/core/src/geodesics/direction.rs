use serde::{Deserialize, Serialize};

use super::{geodesic_dag, GeodesicDag};
use crate::error::{Error, Result};
use crate::groups::GroupElement;
use crate::relgraph::{EdgeLabel, Metric, RelGraph};

/// An eventually periodic label word `prefix period period ...` read from
/// `anchor`, standing in for a boundary point.
///
/// Text form: `[anchor] prefix (period)^inf`, where the anchor part is
/// optional and `^∞` is accepted for `^inf`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionSpec {
    pub name: String,
    pub anchor: GroupElement,
    pub prefix: Vec<EdgeLabel>,
    pub period: Vec<EdgeLabel>,
}

impl DirectionSpec {
    pub fn new(name: &str, prefix: Vec<EdgeLabel>, period: Vec<EdgeLabel>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::MalformedDirection(format!("{name}: empty period")));
        }
        Ok(DirectionSpec {
            name: name.to_string(),
            anchor: GroupElement::identity(),
            prefix,
            period,
        })
    }

    pub fn parse(graph: &RelGraph, text: &str) -> Result<Self> {
        let bad = || Error::MalformedDirection(text.to_string());
        let mut rest = text.trim();
        let mut anchor = GroupElement::identity();
        if let Some(r) = rest.strip_prefix('[') {
            let close = r.find(']').ok_or_else(bad)?;
            anchor = graph.group().reduce(&r[..close])?;
            rest = r[close + 1..].trim_start();
        }
        let body = rest
            .strip_suffix("^inf")
            .or_else(|| rest.strip_suffix("^∞"))
            .ok_or_else(bad)?
            .trim_end();
        let body = body.strip_suffix(')').ok_or_else(bad)?;
        let open = body.rfind('(').ok_or_else(bad)?;
        let prefix = graph.parse_label_word(&body[..open])?;
        let period = graph.parse_label_word(&body[open + 1..])?;
        for l in prefix.iter().chain(&period) {
            graph.label_element(l)?;
        }
        let mut d = DirectionSpec::new(text.trim(), prefix, period)?;
        d.anchor = anchor;
        Ok(d)
    }

    pub fn format(&self, graph: &RelGraph) -> String {
        let mut s = String::new();
        if !self.anchor.is_identity() {
            s.push_str(&format!("[{}] ", graph.group().format(&self.anchor)));
        }
        if !self.prefix.is_empty() {
            s.push_str(&graph.format_label_word(&self.prefix));
            s.push(' ');
        }
        s.push_str(&format!("({})^inf", graph.format_label_word(&self.period)));
        s
    }

    /// The `k`-th label (0-based).
    pub fn label(&self, k: usize) -> &EdgeLabel {
        if k < self.prefix.len() {
            &self.prefix[k]
        } else {
            &self.period[(k - self.prefix.len()) % self.period.len()]
        }
    }

    /// The first `k` labels.
    pub fn word(&self, k: usize) -> Vec<EdgeLabel> {
        (0..k).map(|i| self.label(i).clone()).collect()
    }

    /// Vertices `anchor · w_k` for `k = 0..=depth`.
    pub fn endpoints(&self, graph: &RelGraph, depth: usize) -> Result<Vec<GroupElement>> {
        let mut out = Vec::with_capacity(depth + 1);
        let mut g = self.anchor.clone();
        out.push(g.clone());
        for k in 0..depth {
            g = graph.group().multiply(&g, &graph.label_element(self.label(k))?);
            out.push(g.clone());
        }
        Ok(out)
    }

    pub fn endpoint(&self, graph: &RelGraph, depth: usize) -> Result<GroupElement> {
        Ok(self.endpoints(graph, depth)?.pop().unwrap())
    }

    /// Check that every prefix up to `depth` labels a geodesic. Prefixes of
    /// a geodesic are geodesic, so one length query settles the common case
    /// and a binary search finds the first failing prefix otherwise.
    pub fn validate(&self, graph: &RelGraph, depth: usize) -> Result<()> {
        let g = graph.group();
        let ends = self.endpoints(graph, depth)?;
        let geodesic = |k: usize| -> Result<bool> {
            Ok(graph.length(&g.quotient(&self.anchor, &ends[k]), Metric::Relative)? == k)
        };
        if geodesic(depth)? {
            return Ok(());
        }
        let (mut lo, mut hi) = (0, depth);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if geodesic(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::NonGeodesicDirection {
            name: self.name.clone(),
            k: hi,
        })
    }

    /// The same word read from `g · anchor`.
    pub fn translate(&self, graph: &RelGraph, g: &GroupElement) -> DirectionSpec {
        let mut d = self.clone();
        d.anchor = graph.group().multiply(g, &self.anchor);
        d.name = format!("{}·{}", graph.group().format(g), self.name);
        d
    }
}

/// Truncated bundle of geodesic rays from `base` toward a direction: the
/// geodesic DAG from `base` to a far point of the direction, cut at `depth`.
#[derive(Clone, Debug)]
pub struct CgrBundle {
    pub base: GroupElement,
    pub direction: DirectionSpec,
    pub depth: usize,
    pub margin: usize,
    /// Number of direction labels used to place the target.
    pub target_index: usize,
    pub target: GroupElement,
    pub dag: GeodesicDag,
}

impl CgrBundle {
    pub fn layer(&self, k: usize) -> &[GroupElement] {
        &self.dag.layers[k]
    }

    pub fn contains(&self, v: &GroupElement) -> bool {
        self.dag.contains(v)
    }
}

/// Bundle from `base` toward `direction`, retained to `depth`. The target
/// sits `depth + margin + d(base, anchor)` labels along the direction.
pub fn cgr_bundle_trunc(
    graph: &RelGraph,
    base: &GroupElement,
    direction: &DirectionSpec,
    depth: usize,
    margin: usize,
) -> Result<CgrBundle> {
    let offset = graph.distance(base, &direction.anchor, Metric::Relative)?;
    let target_index = depth + margin + offset;
    direction.validate(graph, target_index)?;
    let target = direction.endpoint(graph, target_index)?;
    let mut dag = geodesic_dag(graph, base, &target, Metric::Relative)?;
    dag.truncate(depth);
    Ok(CgrBundle {
        base: base.clone(),
        direction: direction.clone(),
        depth,
        margin,
        target_index,
        target,
        dag,
    })
}

/// True when raising the margin by one leaves layers `0..=depth` unchanged.
pub fn bundle_is_stable(
    graph: &RelGraph,
    base: &GroupElement,
    direction: &DirectionSpec,
    depth: usize,
    margin: usize,
) -> Result<bool> {
    let a = cgr_bundle_trunc(graph, base, direction, depth, margin)?;
    let b = cgr_bundle_trunc(graph, base, direction, depth, margin + 1)?;
    Ok(a.dag.layers == b.dag.layers)
}

/// Layer sizes `|{γ(i)}|` for `i = 0..=depth`.
pub fn layer_profile(bundle: &CgrBundle) -> Vec<usize> {
    bundle.dag.layers.iter().map(Vec::len).collect()
}
