//! Binary label codes, restricted labels and the minimal labels s_n along a
//! direction in F2.

use relhyp::bundles::BundleParams;
use relhyp::coding::{coding_runs, LabelCodec};
use relhyp::geodesics::DirectionSpec;
use relhyp::groups::{Group, GroupSpec};
use relhyp::relgraph::{GraphConfig, RelGraph};

fn main() -> relhyp::Result<()> {
    let graph = RelGraph::new(Group::new(GroupSpec::free(&["a", "b"]))?, GraphConfig::default())?;
    let codec = LabelCodec::new(&graph);
    for l in codec.alphabet() {
        println!("{:>3} -> {:?}", graph.format_label(l), codec.code_string(l)?);
    }
    let params = BundleParams::from_nu(&graph, 0)?;
    let dir = DirectionSpec::parse(&graph, "(a b')^inf")?;
    for run in coding_runs(&graph, &codec, &dir, 14, &[1, 2, 3, 4], &params)? {
        let run = run?;
        println!(
            "n = {}: s_n = {}, |T_n| = {}, g_n = {}, H_n starts {:?}",
            run.n,
            run.s_n,
            run.t_n_size,
            run.g_n,
            &run.h_n.words[..3]
        );
    }
    Ok(())
}
