//! Layered geodesic DAGs, geodesic enumeration and truncated ray bundles.

mod direction;

use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use serde::Serialize;

pub use direction::{bundle_is_stable, cgr_bundle_trunc, layer_profile, CgrBundle, DirectionSpec};

use crate::error::Result;
use crate::groups::GroupElement;
use crate::relgraph::{EdgeLabel, Metric, RelGraph};

/// An edge from layer `k` to layer `k + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DagEdge {
    /// Index of the head in layer `k + 1`.
    pub to: usize,
    /// All labels of the collapsed edge, sorted.
    pub labels: Vec<EdgeLabel>,
}

/// Union of all geodesics from `source` to `target`, arranged by distance
/// from `source`. A truncated DAG keeps only layers `0..=depth` and every
/// kept vertex still lies on a full geodesic to `target`.
#[derive(Clone, Debug)]
pub struct GeodesicDag {
    pub source: GroupElement,
    pub target: GroupElement,
    pub metric: Metric,
    /// `d(source, target)`.
    pub length: usize,
    /// Layer `k` in shortlex order.
    pub layers: Vec<Vec<GroupElement>>,
    /// `out[k][i]`: edges leaving vertex `i` of layer `k`, by least label.
    pub out: Vec<Vec<Vec<DagEdge>>>,
    /// `inn[k][j]`: indices in layer `k - 1` of the predecessors of vertex `j`.
    pub inn: Vec<Vec<Vec<usize>>>,
    index: FxHashMap<GroupElement, (usize, usize)>,
}

/// A geodesic read off a DAG; `labels[i]` is the least label of edge `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LabeledPath {
    pub vertices: Vec<GroupElement>,
    pub labels: Vec<EdgeLabel>,
}

#[derive(Clone, Debug)]
pub struct GeodesicList {
    pub paths: Vec<LabeledPath>,
    /// Set when more than the requested number of geodesics exist.
    pub truncated: bool,
}

impl GeodesicDag {
    fn from_layers(
        graph: &RelGraph,
        source: GroupElement,
        target: GroupElement,
        length: usize,
        layers: Vec<Vec<GroupElement>>,
        metric: Metric,
    ) -> Self {
        let mut index = FxHashMap::default();
        for (k, layer) in layers.iter().enumerate() {
            for (i, v) in layer.iter().enumerate() {
                index.insert(v.clone(), (k, i));
            }
        }
        let mut out: Vec<Vec<Vec<DagEdge>>> = Vec::with_capacity(layers.len());
        let mut inn: Vec<Vec<Vec<usize>>> = layers.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        for k in 0..layers.len() {
            let mut lk = Vec::with_capacity(layers[k].len());
            for (i, v) in layers[k].iter().enumerate() {
                let mut edges = Vec::new();
                if k + 1 < layers.len() {
                    for (w, labels) in graph.adjacent(v, metric) {
                        if let Some(&(kk, j)) = index.get(&w) {
                            if kk == k + 1 {
                                edges.push(DagEdge {
                                    to: j,
                                    labels: labels.to_vec(),
                                });
                                inn[k + 1][j].push(i);
                            }
                        }
                    }
                }
                edges.sort_by(|a, b| a.labels[0].cmp(&b.labels[0]));
                lk.push(edges);
            }
            out.push(lk);
        }
        GeodesicDag {
            source,
            target,
            metric,
            length,
            layers,
            out,
            inn,
            index,
        }
    }

    /// Number of retained layers minus one.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().flatten().map(Vec::len).sum()
    }

    /// `(layer, index)` of a vertex.
    pub fn position(&self, v: &GroupElement) -> Option<(usize, usize)> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &GroupElement) -> bool {
        self.index.contains_key(v)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &GroupElement> {
        self.layers.iter().flatten()
    }

    /// Keep layers `0..=depth`.
    pub fn truncate(&mut self, depth: usize) {
        if depth >= self.depth() {
            return;
        }
        for layer in self.layers.drain(depth + 1..) {
            for v in layer {
                self.index.remove(&v);
            }
        }
        self.out.truncate(depth + 1);
        self.inn.truncate(depth + 1);
        for edges in &mut self.out[depth] {
            edges.clear();
        }
    }

    /// Geodesics from the source to the last retained layer in lexicographic
    /// order of their label words, at most `max_count` of them.
    pub fn enumerate(&self, max_count: usize) -> GeodesicList {
        let mut paths = Vec::new();
        let mut truncated = false;
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        let mut labels: Vec<EdgeLabel> = Vec::new();
        // Depth-first with an explicit cursor per level.
        let mut cursor: Vec<usize> = vec![0];
        let last = self.depth();
        loop {
            let Some(&(k, i)) = stack.last() else { break };
            if k == last {
                if paths.len() == max_count {
                    truncated = true;
                    break;
                }
                paths.push(LabeledPath {
                    vertices: stack.iter().map(|&(k, i)| self.layers[k][i].clone()).collect(),
                    labels: labels.clone(),
                });
                stack.pop();
                cursor.pop();
                labels.pop();
                continue;
            }
            let c = cursor.last_mut().unwrap();
            if let Some(e) = self.out[k][i].get(*c) {
                *c += 1;
                stack.push((k + 1, e.to));
                cursor.push(0);
                labels.push(e.labels[0].clone());
            } else {
                stack.pop();
                cursor.pop();
                labels.pop();
            }
        }
        GeodesicList { paths, truncated }
    }

    /// Number of source-to-last-layer geodesics, saturating.
    pub fn count_paths(&self) -> u128 {
        let mut counts: Vec<u128> = vec![1];
        for k in 0..self.depth() {
            let mut next = vec![0u128; self.layers[k + 1].len()];
            for (i, edges) in self.out[k].iter().enumerate() {
                for e in edges {
                    next[e.to] = next[e.to].saturating_add(counts[i]);
                }
            }
            counts = next;
        }
        counts.iter().fold(0u128, |a, &b| a.saturating_add(b))
    }

    pub fn to_json(&self, graph: &RelGraph) -> serde_json::Value {
        let g = graph.group();
        let layers: Vec<Vec<String>> = self
            .layers
            .iter()
            .map(|l| l.iter().map(|v| g.format(v)).collect())
            .collect();
        let mut edges = Vec::new();
        for (k, lk) in self.out.iter().enumerate() {
            for (i, es) in lk.iter().enumerate() {
                for e in es {
                    edges.push(serde_json::json!({
                        "layer": k,
                        "from": g.format(&self.layers[k][i]),
                        "to": g.format(&self.layers[k + 1][e.to]),
                        "labels": e.labels.iter().map(|l| graph.format_label(l)).collect::<Vec<_>>(),
                    }));
                }
            }
        }
        serde_json::json!({
            "source": g.format(&self.source),
            "target": g.format(&self.target),
            "length": self.length,
            "metric": self.metric,
            "layers": layers,
            "edges": edges,
        })
    }

    /// DOT rendering with one rank per layer.
    pub fn to_dot(&self, graph: &RelGraph) -> String {
        let g = graph.group();
        let mut s = String::from("digraph geodesics {\n  rankdir=LR;\n  node [shape=ellipse];\n");
        for (k, layer) in self.layers.iter().enumerate() {
            let _ = write!(s, "  {{ rank=same;");
            for (i, v) in layer.iter().enumerate() {
                let _ = write!(s, " n{k}_{i} [label=\"{}\"];", g.format(v));
            }
            s.push_str(" }\n");
        }
        for (k, lk) in self.out.iter().enumerate() {
            for (i, es) in lk.iter().enumerate() {
                for e in es {
                    let text: Vec<String> = e.labels.iter().map(|l| graph.format_label(l)).collect();
                    let _ = writeln!(s, "  n{k}_{i} -> n{}_{} [label=\"{}\"];", k + 1, e.to, text.join(","));
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Layers of the geodesic DAG from the identity to `w`, where `|w| = len`.
///
/// With `H` the radius of the complete identity ball, the layer at
/// `a = len - H` is found by filtering the sphere of radius `a`; from there
/// layers toward the identity only need `|y| <= H` and layers toward `w`
/// only need `|y^{-1} w| <= H`.
fn layers_from_identity(
    graph: &RelGraph,
    w: &GroupElement,
    len: usize,
    metric: Metric,
) -> Result<Vec<Vec<GroupElement>>> {
    let g = graph.group();
    if 2 * graph.core_radius(metric) < len {
        graph.ensure_core(metric, len.div_ceil(2))?;
    }
    let h = graph.core_radius(metric);
    let a = len.saturating_sub(h);
    let steps = graph.steps(metric);
    let to_target = |y: &GroupElement| graph.core_length(&g.quotient(y, w), metric);

    let mut layers: Vec<Vec<GroupElement>> = vec![Vec::new(); len + 1];
    layers[a] = if a == 0 {
        vec![GroupElement::identity()]
    } else {
        graph
            .sphere(metric, a)?
            .into_iter()
            .filter(|y| to_target(y) == Some(len - a))
            .collect()
    };
    for k in (0..a).rev() {
        let mut next: Vec<GroupElement> = Vec::new();
        for z in &layers[k + 1] {
            for s in steps {
                let y = g.multiply(z, &s.element);
                if graph.core_length(&y, metric) == Some(k) {
                    next.push(y);
                }
            }
        }
        next.sort();
        next.dedup();
        layers[k] = next;
    }
    for k in a..len {
        let mut next: Vec<GroupElement> = Vec::new();
        for y in &layers[k] {
            for s in steps {
                let z = g.multiply(y, &s.element);
                if to_target(&z) == Some(len - k - 1) {
                    next.push(z);
                }
            }
        }
        next.sort();
        next.dedup();
        layers[k + 1] = next;
    }
    for layer in &mut layers {
        layer.sort();
    }
    Ok(layers)
}

/// The DAG of all geodesics from `u` to `v`.
pub fn geodesic_dag(
    graph: &RelGraph,
    u: &GroupElement,
    v: &GroupElement,
    metric: Metric,
) -> Result<GeodesicDag> {
    let g = graph.group();
    let w = g.quotient(u, v);
    let len = graph.length(&w, metric)?;
    let mut layers = layers_from_identity(graph, &w, len, metric)?;
    if !u.is_identity() {
        for layer in &mut layers {
            for x in layer.iter_mut() {
                *x = g.multiply(u, x);
            }
            layer.sort();
        }
    }
    Ok(GeodesicDag::from_layers(graph, u.clone(), v.clone(), len, layers, metric))
}

/// Every geodesic from `u` to `v` by exhaustive walk search, without the
/// distance oracle. Exponential; intended as a check.
pub fn naive_geodesics(
    graph: &RelGraph,
    u: &GroupElement,
    v: &GroupElement,
    metric: Metric,
    max_len: usize,
) -> Option<Vec<LabeledPath>> {
    fn walk(
        graph: &RelGraph,
        metric: Metric,
        target: &GroupElement,
        remaining: usize,
        path: &mut LabeledPath,
        found: &mut Vec<LabeledPath>,
    ) {
        let here = path.vertices.last().unwrap().clone();
        if remaining == 0 {
            if &here == target {
                found.push(path.clone());
            }
            return;
        }
        for (w, labels) in graph.adjacent(&here, metric) {
            path.vertices.push(w);
            path.labels.push(labels[0].clone());
            walk(graph, metric, target, remaining - 1, path, found);
            path.vertices.pop();
            path.labels.pop();
        }
    }
    for len in 0..=max_len {
        let mut found = Vec::new();
        let mut path = LabeledPath {
            vertices: vec![u.clone()],
            labels: Vec::new(),
        };
        walk(graph, metric, v, len, &mut path, &mut found);
        if !found.is_empty() {
            found.sort_by(|a, b| a.labels.cmp(&b.labels));
            return Some(found);
        }
    }
    None
}
