//! Estimate the slimness constant for a few groups and print the derived
//! layer bound.

use relhyp::groups::{Group, GroupSpec};
use relhyp::hyperbolicity::{bound_b, bound_k, estimate_nu, SlimnessConfig};
use relhyp::relgraph::{GraphConfig, RelGraph};

fn main() -> relhyp::Result<()> {
    let groups = [
        ("F2 over {a,b}", GroupSpec::free(&["a", "b"])),
        ("F2 over {a,b,ab}", GroupSpec::free(&["a", "b"]).with_redundant(&["a b"])),
        (
            "Z3*Z2 relative to its factors",
            GroupSpec::free_product(
                vec![GroupSpec::cyclic("a", 3), GroupSpec::cyclic("b", 2)],
                vec![0, 1],
            ),
        ),
    ];
    let cfg = SlimnessConfig {
        triangle_budget: 2_000,
        ..SlimnessConfig::default()
    };
    for (name, spec) in groups {
        let graph = RelGraph::new(Group::new(spec)?, GraphConfig::default())?;
        let t = std::time::Instant::now();
        let report = estimate_nu(&graph, &cfg)?;
        let nu = report.nu_hat();
        let b = bound_b(&graph, nu)?;
        println!(
            "{name}: {} triangles, defect d = {}, defect d_X = {}, B = {b}, K = {} ({:.1?})",
            report.triangles,
            report.nu_relative,
            report.nu_absolute,
            bound_k(nu, b),
            t.elapsed()
        );
    }
    Ok(())
}
