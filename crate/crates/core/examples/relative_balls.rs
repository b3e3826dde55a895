//! Sphere sizes in the relative and absolute metrics, and a cached ball.

use relhyp::groups::{Group, GroupElement, GroupSpec, ParabolicMode};
use relhyp::relgraph::{BallCache, GraphConfig, Metric, RelGraph};

fn main() -> relhyp::Result<()> {
    let z_z2 = GroupSpec::free_product(
        vec![GroupSpec::free(&["a"]), GroupSpec::cyclic("b", 2)],
        vec![0],
    );
    let graph = RelGraph::new(
        Group::new(z_z2)?,
        GraphConfig {
            parabolic_mode: ParabolicMode::Truncated(3),
            ..GraphConfig::default()
        },
    )?;
    let e = GroupElement::identity();
    for metric in [Metric::Relative, Metric::Absolute] {
        let ball = graph.ball(&e, 4, metric)?;
        println!(
            "Z*Z2 {metric:>8}: spheres {:?} (approximate: {})",
            ball.sphere_sizes(),
            ball.approximate
        );
    }

    let f2 = RelGraph::new(Group::new(GroupSpec::free(&["a", "b"]))?, GraphConfig::default())?;
    let dir = std::env::temp_dir().join("relhyp-example-cache");
    let cache = BallCache::new(&dir);
    let ball = cache.get_or_compute(&f2, &e, 3, Metric::Relative)?;
    let again = cache.load(&f2, &e, 3, Metric::Relative)?;
    println!(
        "F2 ball of radius 3: {} vertices, cached copy matches: {}",
        ball.len(),
        ball.entries() == again.entries()
    );
    Ok(())
}
