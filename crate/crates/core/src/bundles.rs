//! Horofunction classes, combinatorial sectors, special vertices and the
//! modified bundles `Geo₁`, all truncated at a finite depth.
//!
//! Everything for a base `x` is computed inside one bundle DAG from `x`.
//! Descendants of `v` in that DAG are exactly the geodesics from `v` toward
//! the bundle target, so the sector of `v` for a class is the set of
//! descendants of `v` that are ancestors of the class representatives.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesics::{cgr_bundle_trunc, CgrBundle, DirectionSpec};
use crate::groups::GroupElement;
use crate::relgraph::{Metric, RelGraph};

/// Window vertices are capped at this many.
pub const MAX_WINDOW: usize = 64;

/// Depth-related constants derived from the slimness estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleParams {
    pub nu: usize,
    /// Bundle targets sit this far beyond the retained depth.
    pub margin: usize,
    pub window_radius: usize,
    /// Extra internal depth used to decide whether a vertex is special.
    pub special_slack: usize,
}

impl BundleParams {
    /// Margin `3ν + 1`, window radius `3ν + 2` (lowered until the window has
    /// at most [`MAX_WINDOW`] vertices) and special slack `2ν + 2`.
    pub fn from_nu(graph: &RelGraph, nu: usize) -> Result<Self> {
        let mut window_radius = 3 * nu + 2;
        let e = GroupElement::identity();
        while window_radius > 0 && graph.ball(&e, window_radius, Metric::Relative)?.len() > MAX_WINDOW {
            window_radius -= 1;
        }
        Ok(BundleParams {
            nu,
            margin: 3 * nu + 1,
            window_radius,
            special_slack: 2 * nu + 2,
        })
    }
}

/// `f_z(g) = d(g, z) - d(center, z)` on the window `center · B(e, radius)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorofunctionTable {
    pub anchor: GroupElement,
    pub center: GroupElement,
    pub radius: usize,
    /// In the order of the identity ball, translated by `center`.
    pub window: Vec<GroupElement>,
    pub values: Vec<i64>,
}

impl HorofunctionTable {
    pub fn get(&self, g: &GroupElement) -> Option<i64> {
        self.window.iter().position(|w| w == g).map(|i| self.values[i])
    }
}

fn window(graph: &RelGraph, center: &GroupElement, radius: usize) -> Result<Vec<GroupElement>> {
    let mut ball: Vec<(GroupElement, u32)> =
        graph.ball(&GroupElement::identity(), radius, Metric::Relative)?.entries().to_vec();
    ball.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(ball
        .into_iter()
        .map(|(g, _)| graph.group().multiply(center, &g))
        .collect())
}

fn signature(graph: &RelGraph, window: &[GroupElement], center: &GroupElement, z: &GroupElement) -> Result<Vec<i64>> {
    let base = graph.distance(center, z, Metric::Relative)? as i64;
    window
        .iter()
        .map(|g| Ok(graph.distance(g, z, Metric::Relative)? as i64 - base))
        .collect()
}

pub fn horofunction_table(
    graph: &RelGraph,
    z: &GroupElement,
    center: &GroupElement,
    radius: usize,
) -> Result<HorofunctionTable> {
    let window = window(graph, center, radius)?;
    let values = signature(graph, &window, center, z)?;
    Ok(HorofunctionTable {
        anchor: z.clone(),
        center: center.clone(),
        radius,
        window,
        values,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XiClass {
    pub id: usize,
    /// Horofunction values on the window around the bundle base.
    pub signature: Vec<i64>,
    /// Last-layer bundle vertices whose rays carry this signature.
    pub representatives: Vec<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XiClasses {
    pub depth: usize,
    pub window_radius: usize,
    pub classes: Vec<XiClass>,
    /// Last-layer vertices whose signature did not settle over three layers.
    pub unstabilized: Vec<GroupElement>,
}

/// Partition the last layer of `bundle` by horofunction signature. A vertex
/// `t` is kept when some ray `p2, p1, t` into it has the same signature at
/// all three vertices; classes are ordered by signature.
pub fn xi_classes(graph: &RelGraph, bundle: &CgrBundle, window_radius: usize) -> Result<XiClasses> {
    let depth = bundle.depth;
    if depth < 2 {
        return Err(Error::DepthTooSmall { n: 2, depth });
    }
    let dag = &bundle.dag;
    let win = window(graph, &bundle.base, window_radius)?;
    let sig_layer = |k: usize| -> Result<Vec<Vec<i64>>> {
        dag.layers[k]
            .iter()
            .map(|v| signature(graph, &win, &bundle.base, v))
            .collect()
    };
    let s0 = sig_layer(depth - 2)?;
    let s1 = sig_layer(depth - 1)?;
    let s2 = sig_layer(depth)?;
    let mut by_sig: BTreeMap<Vec<i64>, Vec<GroupElement>> = BTreeMap::new();
    let mut unstabilized = Vec::new();
    for (j, t) in dag.layers[depth].iter().enumerate() {
        let sig = &s2[j];
        let stable = dag.inn[depth][j].iter().any(|&p1| {
            &s1[p1] == sig && dag.inn[depth - 1][p1].iter().any(|&p2| &s0[p2] == sig)
        });
        if stable {
            by_sig.entry(sig.clone()).or_default().push(t.clone());
        } else {
            unstabilized.push(t.clone());
        }
    }
    if by_sig.is_empty() {
        return Err(Error::NoStableRay(depth));
    }
    let classes = by_sig
        .into_iter()
        .enumerate()
        .map(|(id, (signature, representatives))| XiClass {
            id,
            signature,
            representatives,
        })
        .collect();
    Ok(XiClasses {
        depth,
        window_radius,
        classes,
        unstabilized,
    })
}

/// Flat vertex ids for a bundle DAG and reachability sets over them.
struct Flat<'a> {
    bundle: &'a CgrBundle,
    offsets: Vec<usize>,
    n: usize,
}

impl<'a> Flat<'a> {
    fn new(bundle: &'a CgrBundle) -> Self {
        let mut offsets = Vec::new();
        let mut n = 0;
        for l in &bundle.dag.layers {
            offsets.push(n);
            n += l.len();
        }
        Flat { bundle, offsets, n }
    }

    fn id(&self, k: usize, i: usize) -> usize {
        self.offsets[k] + i
    }

    fn layer_mask(&self, max_layer: usize) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.n);
        let end = self.offsets.get(max_layer + 1).copied().unwrap_or(self.n);
        m.insert_range(0..end);
        m
    }

    fn descendants(&self, k0: usize, i0: usize) -> FixedBitSet {
        let dag = &self.bundle.dag;
        let mut set = FixedBitSet::with_capacity(self.n);
        set.insert(self.id(k0, i0));
        let mut frontier = vec![i0];
        for k in k0..dag.depth() {
            let mut next: Vec<usize> = Vec::new();
            for &i in &frontier {
                for e in &dag.out[k][i] {
                    let id = self.id(k + 1, e.to);
                    if !set.put(id) {
                        next.push(e.to);
                    }
                }
            }
            frontier = next;
        }
        set
    }

    fn ancestors(&self, targets: &[GroupElement]) -> FixedBitSet {
        let dag = &self.bundle.dag;
        let mut set = FixedBitSet::with_capacity(self.n);
        let mut by_layer: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for t in targets {
            if let Some((k, i)) = dag.position(t) {
                by_layer.entry(k).or_default().push(i);
            }
        }
        for k in (0..dag.layers.len()).rev() {
            let mut here = by_layer.remove(&k).unwrap_or_default();
            here.retain(|&i| !set.put(self.id(k, i)));
            if k > 0 {
                let preds = by_layer.entry(k - 1).or_default();
                for &j in &here {
                    preds.extend(dag.inn[k][j].iter().copied());
                }
            }
        }
        set
    }

    fn elements(&self, set: &FixedBitSet) -> Vec<(GroupElement, usize)> {
        let dag = &self.bundle.dag;
        set.ones()
            .map(|id| {
                let k = self.offsets.partition_point(|&o| o <= id) - 1;
                (dag.layers[k][id - self.offsets[k]].clone(), k)
            })
            .collect()
    }
}

/// A sector `Q(v, ξ)` cut at a depth, as (vertex, layer in the base bundle).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectorTrunc {
    pub vertex: GroupElement,
    pub class: usize,
    pub depth: usize,
    pub vertices: Vec<(GroupElement, usize)>,
}

/// Sector of bundle vertex `v` for a class, restricted to layers `..=depth`.
/// Empty when the class is not reachable from `v`.
pub fn sector_trunc(bundle: &CgrBundle, class: &XiClass, v: &GroupElement, depth: usize) -> SectorTrunc {
    let flat = Flat::new(bundle);
    let mut set = match bundle.dag.position(v) {
        Some((k, i)) => {
            let mut s = flat.descendants(k, i);
            s.intersect_with(&flat.ancestors(&class.representatives));
            s
        }
        None => FixedBitSet::with_capacity(flat.n),
    };
    set.intersect_with(&flat.layer_mask(depth));
    SectorTrunc {
        vertex: v.clone(),
        class: class.id,
        depth,
        vertices: flat.elements(&set),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialVertex {
    pub vertex: GroupElement,
    pub layer: usize,
    /// The class whose sector equals the intersection of all sectors; `None`
    /// when no class or more than one class qualifies.
    pub class: Option<usize>,
}

struct SpecialScan {
    specials: Vec<SpecialVertex>,
    /// Sector bitsets for every special vertex with a unique class.
    sectors: Vec<FixedBitSet>,
}

fn scan_specials(bundle: &CgrBundle, classes: &XiClasses, depth: usize) -> SpecialScan {
    let flat = Flat::new(bundle);
    let dag = &bundle.dag;
    let mask = flat.layer_mask(depth);
    let anc: Vec<FixedBitSet> = classes
        .classes
        .iter()
        .map(|c| flat.ancestors(&c.representatives))
        .collect();
    let mut specials = Vec::new();
    let mut sectors = Vec::new();
    for k in 0..=depth.min(dag.depth()) {
        for i in 0..dag.layers[k].len() {
            let desc = flat.descendants(k, i);
            let secs: Vec<FixedBitSet> = anc
                .iter()
                .map(|a| {
                    let mut s = desc.clone();
                    s.intersect_with(a);
                    s.intersect_with(&mask);
                    s
                })
                .collect();
            let mut inter = secs[0].clone();
            for s in &secs[1..] {
                inter.intersect_with(s);
            }
            if !reaches_layer(&flat, &inter, k, i, depth) {
                continue;
            }
            let matching: Vec<usize> = (0..secs.len()).filter(|&c| secs[c] == inter).collect();
            let class = if matching.len() == 1 { Some(matching[0]) } else { None };
            if class.is_some() {
                sectors.push(inter);
            }
            specials.push(SpecialVertex {
                vertex: dag.layers[k][i].clone(),
                layer: k,
                class,
            });
        }
    }
    SpecialScan { specials, sectors }
}

/// Whether `set` holds a path from vertex `(k0, i0)` to layer `depth`.
fn reaches_layer(flat: &Flat, set: &FixedBitSet, k0: usize, i0: usize, depth: usize) -> bool {
    if !set.contains(flat.id(k0, i0)) {
        return false;
    }
    let dag = &flat.bundle.dag;
    let mut frontier = vec![i0];
    for k in k0..depth {
        let mut next = Vec::new();
        for &i in &frontier {
            for e in &dag.out[k][i] {
                if set.contains(flat.id(k + 1, e.to)) {
                    next.push(e.to);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        if next.is_empty() {
            return false;
        }
        frontier = next;
    }
    true
}

/// Special vertices of a bundle whose sectors are cut at `depth`. The
/// bundle should extend some layers beyond `depth` so that distinct classes
/// can share vertices up to `depth`.
pub fn special_vertices(bundle: &CgrBundle, classes: &XiClasses, depth: usize) -> Vec<SpecialVertex> {
    scan_specials(bundle, classes, depth).specials
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct YSet {
    pub class: usize,
    pub layer: usize,
    pub vertices: Vec<GroupElement>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Geo1Trunc {
    pub base: GroupElement,
    pub direction: String,
    pub depth: usize,
    pub internal_depth: usize,
    pub class_count: usize,
    pub y_sets: Vec<YSet>,
    /// Vertices with their layer in the bundle from `base`, by layer then
    /// shortlex.
    pub vertices: Vec<(GroupElement, usize)>,
    /// Vertices passing the special test whose class is ambiguous.
    pub ambiguous: Vec<GroupElement>,
    /// Classes with no special vertex.
    pub skipped_classes: Vec<usize>,
    pub unstabilized: usize,
    #[serde(skip)]
    index: BTreeMap<GroupElement, usize>,
}

impl Geo1Trunc {
    pub fn layer_of(&self, v: &GroupElement) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &GroupElement) -> bool {
        self.index.contains_key(v)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// `Geo₁(x, η)` cut at depth `depth`.
pub fn geo1_trunc(
    graph: &RelGraph,
    x: &GroupElement,
    direction: &DirectionSpec,
    depth: usize,
    params: &BundleParams,
) -> Result<Geo1Trunc> {
    let internal_depth = depth + params.special_slack;
    let bundle = cgr_bundle_trunc(graph, x, direction, internal_depth, params.margin)?;
    let classes = xi_classes(graph, &bundle, params.window_radius)?;
    let scan = scan_specials(&bundle, &classes, depth);
    let flat = Flat::new(&bundle);

    let mut y_sets = Vec::new();
    let mut skipped = Vec::new();
    let mut union = FixedBitSet::with_capacity(flat.n);
    for c in &classes.classes {
        let with_class: Vec<&SpecialVertex> =
            scan.specials.iter().filter(|s| s.class == Some(c.id)).collect();
        let Some(min_layer) = with_class.iter().map(|s| s.layer).min() else {
            skipped.push(c.id);
            continue;
        };
        let ys: Vec<GroupElement> = with_class
            .iter()
            .filter(|s| s.layer == min_layer)
            .map(|s| s.vertex.clone())
            .collect();
        // Sector bitsets are stored in the order of uniquely classed specials.
        for (pos, s) in scan.specials.iter().filter(|s| s.class.is_some()).enumerate() {
            if s.class == Some(c.id) && s.layer == min_layer {
                union.union_with(&scan.sectors[pos]);
            }
        }
        y_sets.push(YSet {
            class: c.id,
            layer: min_layer,
            vertices: ys,
        });
    }
    let vertices = flat.elements(&union);
    let index = vertices.iter().cloned().collect();
    Ok(Geo1Trunc {
        base: x.clone(),
        direction: direction.name.clone(),
        depth,
        internal_depth,
        class_count: classes.classes.len(),
        y_sets,
        vertices,
        ambiguous: scan
            .specials
            .iter()
            .filter(|s| s.class.is_none())
            .map(|s| s.vertex.clone())
            .collect(),
        skipped_classes: skipped,
        unstabilized: classes.unstabilized.len(),
        index,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymdiffRow {
    pub depth: usize,
    pub size: usize,
    pub only_x: usize,
    pub only_y: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymdiffScan {
    pub x: String,
    pub y: String,
    pub direction: String,
    pub rows: Vec<SymdiffRow>,
    pub stabilized: bool,
}

impl SymdiffScan {
    pub fn verdict(&self) -> &'static str {
        if self.stabilized {
            "stabilized"
        } else {
            "not-stabilized"
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,direction,R,size,only_x,only_y\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.x, self.y, self.direction, r.depth, r.size, r.only_x, r.only_y
            ));
        }
        s
    }
}

/// Size of the symmetric difference of `Geo₁(x)` and `Geo₁(y)` per depth,
/// counting only vertices whose layer in their own bundle is at most
/// `R - d(x, y)`, where both truncations are reliable.
pub fn symdiff_scan(
    graph: &RelGraph,
    x: &GroupElement,
    y: &GroupElement,
    direction: &DirectionSpec,
    depths: &[usize],
    params: &BundleParams,
) -> Result<SymdiffScan> {
    let dxy = graph.distance(x, y, Metric::Relative)?;
    let mut rows = Vec::new();
    for &r in depths {
        let gx = geo1_trunc(graph, x, direction, r, params)?;
        let gy = geo1_trunc(graph, y, direction, r, params)?;
        let limit = r.saturating_sub(dxy);
        let only = |a: &Geo1Trunc, b: &Geo1Trunc| {
            a.vertices
                .iter()
                .filter(|(v, k)| *k <= limit && !b.contains(v))
                .count()
        };
        let (ox, oy) = (only(&gx, &gy), only(&gy, &gx));
        rows.push(SymdiffRow {
            depth: r,
            size: ox + oy,
            only_x: ox,
            only_y: oy,
        });
    }
    let stabilized = rows.len() >= 3 && {
        let t = &rows[rows.len() - 3..];
        t[0].size == t[1].size && t[1].size == t[2].size
    };
    let g = graph.group();
    Ok(SymdiffScan {
        x: g.format(x),
        y: g.format(y),
        direction: direction.name.clone(),
        rows,
        stabilized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{Group, GroupSpec};
    use crate::relgraph::GraphConfig;

    fn f2() -> RelGraph {
        RelGraph::new(Group::new(GroupSpec::free(&["a", "b"])).unwrap(), GraphConfig::default())
            .unwrap()
    }

    #[test]
    fn horofunction_on_the_axis() {
        let g = f2();
        let e = GroupElement::identity();
        let a5 = g.group().reduce("a^5").unwrap();
        let t = horofunction_table(&g, &a5, &e, 2).unwrap();
        assert_eq!(t.get(&e), Some(0));
        assert_eq!(t.get(&g.group().reduce("a").unwrap()), Some(-1));
        assert_eq!(t.get(&g.group().reduce("a'").unwrap()), Some(1));
        let a9 = g.group().reduce("a^9").unwrap();
        assert_eq!(horofunction_table(&g, &a9, &e, 2).unwrap().values, t.values);

        let te = horofunction_table(&g, &e, &e, 2).unwrap();
        for (w, v) in te.window.iter().zip(&te.values) {
            assert_eq!(*v as usize, w.word_len());
        }
    }

    #[test]
    fn tree_geo1_is_the_ray() {
        let g = f2();
        let params = BundleParams::from_nu(&g, 0).unwrap();
        let d = DirectionSpec::parse(&g, "(a)^inf").unwrap();
        let e = GroupElement::identity();
        let geo = geo1_trunc(&g, &e, &d, 4, &params).unwrap();
        assert_eq!(geo.class_count, 1);
        assert_eq!(geo.y_sets[0].vertices, vec![e.clone()]);
        let names: Vec<String> = geo.vertices.iter().map(|(v, _)| g.group().format(v)).collect();
        assert_eq!(names, ["e", "a", "a a", "a a a", "a a a a"]);
    }

    #[test]
    fn tree_symdiff_is_one() {
        let g = f2();
        let params = BundleParams::from_nu(&g, 0).unwrap();
        let d = DirectionSpec::parse(&g, "(a)^inf").unwrap();
        let e = GroupElement::identity();
        let b = g.group().reduce("b").unwrap();
        let scan = symdiff_scan(&g, &e, &b, &d, &[2, 3, 4, 5], &params).unwrap();
        assert!(scan.rows.iter().all(|r| r.size == 1 && r.only_y == 1));
        assert!(scan.stabilized);
        let same = symdiff_scan(&g, &b, &b, &d, &[2, 3, 4], &params).unwrap();
        assert!(same.rows.iter().all(|r| r.size == 0));
    }

    #[test]
    fn tree_every_bundle_vertex_is_special() {
        let g = f2();
        let d = DirectionSpec::parse(&g, "b (a)^inf").unwrap();
        let x = g.group().reduce("a'").unwrap();
        let bundle = cgr_bundle_trunc(&g, &x, &d, 6, 1).unwrap();
        let classes = xi_classes(&g, &bundle, 2).unwrap();
        assert_eq!(classes.classes.len(), 1);
        let sp = special_vertices(&bundle, &classes, 4);
        assert_eq!(sp.len(), 5);
        assert!(sp.iter().all(|s| s.class == Some(0)));
        let sector = sector_trunc(&bundle, &classes.classes[0], &x, 4);
        assert_eq!(sector.vertices.len(), 5);
    }
}
