//! All geodesics between two vertices as a layered DAG, checked against a
//! walk search, plus DOT output.

use relhyp::geodesics::{geodesic_dag, naive_geodesics};
use relhyp::groups::{Group, GroupElement, GroupSpec};
use relhyp::relgraph::{GraphConfig, Metric, RelGraph};

fn main() -> relhyp::Result<()> {
    let graph = RelGraph::new(
        Group::new(GroupSpec::free(&["a", "b"]).with_redundant(&["a b"]))?,
        GraphConfig::default(),
    )?;
    let g = graph.group();
    let e = GroupElement::identity();
    for w in ["a b a b", "a b' a", "b a"] {
        let v = g.reduce(w)?;
        let dag = geodesic_dag(&graph, &e, &v, Metric::Relative)?;
        let list = dag.enumerate(16);
        let naive = naive_geodesics(&graph, &e, &v, Metric::Relative, 6).unwrap_or_default();
        println!(
            "e -> {w}: length {}, {} geodesics, walk search agrees: {}",
            dag.length,
            dag.count_paths(),
            list.paths == naive
        );
        for p in &list.paths {
            println!("    {}", graph.format_label_word(&p.labels));
        }
    }
    let dag = geodesic_dag(&graph, &e, &g.reduce("a b a b")?, Metric::Absolute)?;
    print!("{}", dag.to_dot(&graph));
    Ok(())
}
