//! Slimness of geodesic triangles in the relative graph, measured in both
//! the relative metric and the absolute metric, and the constants derived
//! from it.
//!
//! For a triangle with corners `x, y, z` the defect is maximised over every
//! choice of geodesic sides at once. With sides `p, q, r` picked
//! independently,
//! `max_{p,q,r} max_{u∈p} min(d(u,q), d(u,r)) = max_{u∈P} min(far(u,Q), far(u,R))`
//! where `P, Q, R` are the geodesic DAGs and `far(u, Q)` is the largest
//! distance from `u` to a single geodesic through `Q`. `far` is a max-min
//! path problem on the DAG and is solved layer by layer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesics::{geodesic_dag, GeodesicDag};
use crate::groups::GroupElement;
use crate::relgraph::{Metric, RelGraph};

/// Defect of one triangle with explicit sides `p: x→y`, `q: y→z`, `r: z→x`,
/// each given by its vertex sequence, measured in `metric`.
pub fn triangle_defect(
    graph: &RelGraph,
    p: &[GroupElement],
    q: &[GroupElement],
    r: &[GroupElement],
    metric: Metric,
) -> Result<usize> {
    let sides = [p, q, r];
    for (i, s) in sides.iter().enumerate() {
        let next = sides[(i + 1) % 3];
        if s.is_empty() || next.is_empty() || s.last() != next.first() {
            return Err(Error::InvalidTriangle(format!("side {i} does not meet side {}", (i + 1) % 3)));
        }
        let d = graph.distance(&s[0], s.last().unwrap(), Metric::Relative)?;
        let adjacent = s
            .windows(2)
            .all(|w| !graph.edge_labels(&w[0], &w[1], Metric::Relative).is_empty());
        if d + 1 != s.len() || !adjacent {
            return Err(Error::InvalidTriangle(format!("side {i} is not a geodesic")));
        }
    }
    let mut worst = 0;
    for i in 0..3 {
        let (a, b, c) = (sides[i], sides[(i + 1) % 3], sides[(i + 2) % 3]);
        for u in a {
            let mut best = usize::MAX;
            for v in b.iter().chain(c.iter()) {
                best = best.min(graph.distance(u, v, metric)?);
            }
            worst = worst.max(best);
        }
    }
    Ok(worst)
}

/// Largest over geodesics in `dag` of the distance from `u` to that geodesic.
fn far(graph: &RelGraph, u: &GroupElement, dag: &GeodesicDag, metric: Metric) -> Result<usize> {
    let mut best: Vec<usize> = vec![graph.distance(u, &dag.layers[0][0], metric)?];
    for k in 1..dag.layers.len() {
        let mut next = Vec::with_capacity(dag.layers[k].len());
        for (j, v) in dag.layers[k].iter().enumerate() {
            let via = dag.inn[k][j].iter().map(|&i| best[i]).max().unwrap_or(0);
            next.push(via.min(graph.distance(u, v, metric)?));
        }
        best = next;
    }
    Ok(best.into_iter().max().unwrap_or(0))
}

/// Worst defect of the triangle `x, y, z` over all geodesic side choices,
/// with the witnessing vertex.
pub fn triangle_defect_all(
    graph: &RelGraph,
    corners: [&GroupElement; 3],
    metric: Metric,
) -> Result<(usize, GroupElement)> {
    let dags = [
        geodesic_dag(graph, corners[0], corners[1], Metric::Relative)?,
        geodesic_dag(graph, corners[1], corners[2], Metric::Relative)?,
        geodesic_dag(graph, corners[2], corners[0], Metric::Relative)?,
    ];
    let mut worst = (0, corners[0].clone());
    for i in 0..3 {
        let (p, q, r) = (&dags[i], &dags[(i + 1) % 3], &dags[(i + 2) % 3]);
        for u in p.vertices() {
            let fq = far(graph, u, q, metric)?;
            if fq <= worst.0 {
                continue;
            }
            let d = fq.min(far(graph, u, r, metric)?);
            if d > worst.0 {
                worst = (d, u.clone());
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TriangleRecord {
    pub corners: [String; 3],
    pub defect_relative: usize,
    pub defect_absolute: usize,
    /// Vertex attaining the absolute defect.
    pub witness: String,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SlimnessReport {
    pub exhaustive_radius: usize,
    pub ball_radius: usize,
    pub triangle_budget: usize,
    pub seed: u64,
    pub triangles: usize,
    /// Largest defect measured with the relative metric.
    pub nu_relative: usize,
    /// Largest defect measured with the absolute metric.
    pub nu_absolute: usize,
    pub approximate: bool,
    pub records: Vec<TriangleRecord>,
}

impl SlimnessReport {
    /// The working constant: both slimness in `d_X` and hyperbolicity of the
    /// relative graph are used with the same constant.
    pub fn nu_hat(&self) -> usize {
        self.nu_relative.max(self.nu_absolute)
    }

    /// Triangles attaining the maximal absolute defect.
    pub fn worst(&self) -> Vec<&TriangleRecord> {
        self.records
            .iter()
            .filter(|r| r.defect_absolute == self.nu_absolute || r.defect_relative == self.nu_relative)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,z,defect_relative,defect_absolute,witness,exhaustive\n");
        for r in &self.records {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.corners[0], r.corners[1], r.corners[2], r.defect_relative, r.defect_absolute, r.witness, r.exhaustive
            ));
        }
        s
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlimnessConfig {
    /// Every triangle `e, y, z` with `y, z` in this relative ball is checked.
    pub exhaustive_radius: usize,
    /// Random triangles are drawn from this relative ball.
    pub ball_radius: usize,
    pub triangle_budget: usize,
    pub seed: u64,
}

impl Default for SlimnessConfig {
    fn default() -> Self {
        SlimnessConfig {
            exhaustive_radius: 3,
            ball_radius: 6,
            triangle_budget: 10_000,
            seed: 0,
        }
    }
}

/// Estimate the slimness constant from an exhaustive sweep of small
/// triangles plus seeded random ones. By left invariance one corner is `e`.
/// Runs on the current rayon pool; the result does not depend on its size.
pub fn estimate_nu(graph: &RelGraph, cfg: &SlimnessConfig) -> Result<SlimnessReport> {
    let e = GroupElement::identity();
    let small = graph.ball(&e, cfg.exhaustive_radius, Metric::Relative)?;
    let mut work: Vec<(GroupElement, GroupElement, bool)> = Vec::new();
    let verts: Vec<&GroupElement> = small.entries().iter().map(|(v, _)| v).collect();
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            work.push((verts[i].clone(), verts[j].clone(), true));
        }
    }
    if cfg.triangle_budget > 0 {
        let big = graph.ball(&e, cfg.ball_radius, Metric::Relative)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.triangle_budget {
            let y = big.entries()[rng.gen_range(0..big.len())].0.clone();
            let z = big.entries()[rng.gen_range(0..big.len())].0.clone();
            work.push((y, z, false));
        }
    }
    let records: Vec<TriangleRecord> = work
        .par_iter()
        .map(|(y, z, exhaustive)| {
            let (dr, _) = triangle_defect_all(graph, [&e, y, z], Metric::Relative)?;
            let (dx, w) = triangle_defect_all(graph, [&e, y, z], Metric::Absolute)?;
            let g = graph.group();
            Ok(TriangleRecord {
                corners: [g.format(&e), g.format(y), g.format(z)],
                defect_relative: dr,
                defect_absolute: dx,
                witness: g.format(&w),
                exhaustive: *exhaustive,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SlimnessReport {
        exhaustive_radius: cfg.exhaustive_radius,
        ball_radius: cfg.ball_radius,
        triangle_budget: cfg.triangle_budget,
        seed: cfg.seed,
        triangles: records.len(),
        nu_relative: records.iter().map(|r| r.defect_relative).max().unwrap_or(0),
        nu_absolute: records.iter().map(|r| r.defect_absolute).max().unwrap_or(0),
        approximate: graph.is_approximate(),
        records,
    })
}

/// `(6ν + 1) |B_X^ν(e)|`.
pub fn bound_b(graph: &RelGraph, nu: usize) -> Result<usize> {
    let ball = graph.ball(&GroupElement::identity(), nu, Metric::Absolute)?;
    Ok((6 * nu + 1) * ball.len())
}

/// `(20ν + 1) B`.
pub fn bound_k(nu: usize, b: usize) -> usize {
    (20 * nu + 1) * b
}
