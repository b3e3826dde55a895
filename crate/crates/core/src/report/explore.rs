use serde_json::json;

use super::config::Format;
use super::verify::csv_field;
use crate::bundles::{geo1_trunc, BundleParams};
use crate::error::Result;
use crate::geodesics::{cgr_bundle_trunc, geodesic_dag, layer_profile, DirectionSpec};
use crate::groups::GroupElement;
use crate::relgraph::{ball_to_dot, BallCache, BallTable, Metric, RelGraph};

/// A named object rendered in whichever formats it supports.
#[derive(Clone, Debug, Default)]
pub struct Artifact {
    pub stem: String,
    pub json: Option<String>,
    pub csv: Option<String>,
    pub dot: Option<String>,
}

impl Artifact {
    pub fn render(&self, format: Format) -> Option<&str> {
        match format {
            Format::Json => self.json.as_deref(),
            Format::Csv => self.csv.as_deref(),
            Format::Dot => self.dot.as_deref(),
        }
    }

    pub fn file_name(&self, format: Format) -> String {
        let ext = match format {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Dot => "dot",
        };
        format!("{}.{ext}", self.stem)
    }
}

fn pretty(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json value");
    s.push('\n');
    s
}

fn layer_csv(graph: &RelGraph, layers: &[(GroupElement, usize)]) -> String {
    let mut s = String::from("vertex,layer\n");
    for (v, k) in layers {
        s.push_str(&format!("{},{k}\n", csv_field(&graph.group().format(v))));
    }
    s
}

pub fn explore_ball(
    graph: &RelGraph,
    center: &GroupElement,
    radius: usize,
    metric: Metric,
    cache: Option<&BallCache>,
) -> Result<Artifact> {
    let ball: BallTable = match cache {
        Some(c) => c.get_or_compute(graph, center, radius, metric)?,
        None => graph.ball(center, radius, metric)?,
    };
    let g = graph.group();
    let vertices: Vec<(GroupElement, usize)> =
        ball.entries().iter().map(|(v, d)| (v.clone(), *d as usize)).collect();
    Ok(Artifact {
        stem: "ball".into(),
        json: Some(pretty(json!({
            "center": g.format(center),
            "radius": radius,
            "metric": metric.as_str(),
            "approximate": ball.approximate,
            "size": ball.len(),
            "sphere_sizes": ball.sphere_sizes(),
            "vertices": vertices.iter().map(|(v, d)| json!([g.format(v), d])).collect::<Vec<_>>(),
        }))),
        csv: Some(layer_csv(graph, &vertices)),
        dot: Some(ball_to_dot(graph, &ball)),
    })
}

pub fn explore_dag(graph: &RelGraph, u: &GroupElement, v: &GroupElement, metric: Metric) -> Result<Artifact> {
    let dag = geodesic_dag(graph, u, v, metric)?;
    let vertices: Vec<(GroupElement, usize)> = dag
        .layers
        .iter()
        .enumerate()
        .flat_map(|(k, l)| l.iter().map(move |x| (x.clone(), k)))
        .collect();
    Ok(Artifact {
        stem: "dag".into(),
        json: Some(pretty(dag.to_json(graph))),
        csv: Some(layer_csv(graph, &vertices)),
        dot: Some(dag.to_dot(graph)),
    })
}

pub fn explore_bundle(
    graph: &RelGraph,
    base: &GroupElement,
    direction: &DirectionSpec,
    depth: usize,
    params: &BundleParams,
) -> Result<Artifact> {
    let bundle = cgr_bundle_trunc(graph, base, direction, depth, params.margin)?;
    let g = graph.group();
    let vertices: Vec<(GroupElement, usize)> = bundle
        .dag
        .layers
        .iter()
        .enumerate()
        .flat_map(|(k, l)| l.iter().map(move |x| (x.clone(), k)))
        .collect();
    Ok(Artifact {
        stem: "bundle".into(),
        json: Some(pretty(json!({
            "base": g.format(base),
            "direction": direction.format(graph),
            "depth": depth,
            "margin": params.margin,
            "target_index": bundle.target_index,
            "target": g.format(&bundle.target),
            "layer_profile": layer_profile(&bundle),
            "dag": bundle.dag.to_json(graph),
        }))),
        csv: Some(layer_csv(graph, &vertices)),
        dot: Some(bundle.dag.to_dot(graph)),
    })
}

pub fn explore_geo1(
    graph: &RelGraph,
    base: &GroupElement,
    direction: &DirectionSpec,
    depth: usize,
    params: &BundleParams,
) -> Result<Artifact> {
    let geo = geo1_trunc(graph, base, direction, depth, params)?;
    let g = graph.group();
    let words = |vs: &[GroupElement]| vs.iter().map(|v| g.format(v)).collect::<Vec<_>>();
    Ok(Artifact {
        stem: "geo1".into(),
        json: Some(pretty(json!({
            "base": g.format(base),
            "direction": direction.format(graph),
            "depth": depth,
            "internal_depth": geo.internal_depth,
            "class_count": geo.class_count,
            "y_sets": geo.y_sets.iter().map(|y| json!({
                "class": y.class,
                "layer": y.layer,
                "vertices": words(&y.vertices),
            })).collect::<Vec<_>>(),
            "ambiguous": words(&geo.ambiguous),
            "skipped_classes": geo.skipped_classes,
            "unstabilized": geo.unstabilized,
            "vertices": geo.vertices.iter().map(|(v, k)| json!([g.format(v), k])).collect::<Vec<_>>(),
        }))),
        csv: Some(layer_csv(graph, &geo.vertices)),
        dot: None,
    })
}
