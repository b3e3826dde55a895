//! Truncated ray bundles, horofunction classes, Geo1 and the symmetric
//! difference between bases in Z3*Z2.

use relhyp::bundles::{geo1_trunc, symdiff_scan, xi_classes, BundleParams};
use relhyp::geodesics::{cgr_bundle_trunc, layer_profile, DirectionSpec};
use relhyp::groups::{Group, GroupElement, GroupSpec};
use relhyp::relgraph::{GraphConfig, RelGraph};

fn main() -> relhyp::Result<()> {
    let graph = RelGraph::new(
        Group::new(GroupSpec::free_product(
            vec![GroupSpec::cyclic("a", 3), GroupSpec::cyclic("b", 2)],
            vec![0, 1],
        ))?,
        GraphConfig::default(),
    )?;
    let g = graph.group();
    let params = BundleParams::from_nu(&graph, 0)?;
    let e = GroupElement::identity();
    let dir = DirectionSpec::parse(&graph, "(a b a' b)^inf")?;

    let bundle = cgr_bundle_trunc(&graph, &g.reduce("b")?, &dir, 8, params.margin)?;
    println!("layer profile from b: {:?}", layer_profile(&bundle));
    let classes = xi_classes(&graph, &bundle, params.window_radius)?;
    println!("horofunction classes: {}", classes.classes.len());

    let geo = geo1_trunc(&graph, &e, &dir, 8, &params)?;
    let words: Vec<String> = geo.vertices.iter().map(|(v, _)| g.format(v)).collect();
    println!("Geo1(e) to depth 8: {}", words.join(", "));

    for y in ["a", "b", "a b"] {
        let scan = symdiff_scan(&graph, &e, &g.reduce(y)?, &dir, &[6, 8, 10, 12], &params)?;
        let sizes: Vec<usize> = scan.rows.iter().map(|r| r.size).collect();
        println!("symdiff(e, {y}): {sizes:?} {}", scan.verdict());
    }
    Ok(())
}
