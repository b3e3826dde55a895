#![allow(dead_code)]

use std::sync::OnceLock;

use relhyp::groups::{Group, GroupSpec, ParabolicMode};
use relhyp::relgraph::{GraphConfig, RelGraph};

pub fn spec_path(name: &str) -> String {
    format!("{}/specs/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

pub fn config_path(name: &str) -> String {
    format!("{}/configs/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

pub fn load(name: &str) -> RelGraph {
    let mode = if name == "z_star_z2" {
        ParabolicMode::Truncated(3)
    } else {
        ParabolicMode::Exact
    };
    let spec = GroupSpec::load(spec_path(name)).unwrap();
    RelGraph::new(
        Group::new(spec).unwrap(),
        GraphConfig {
            parabolic_mode: mode,
            ..GraphConfig::default()
        },
    )
    .unwrap()
}

/// One graph per supported family, built once per test binary.
pub fn all_families() -> &'static [(&'static str, RelGraph)] {
    static FAMILIES: OnceLock<Vec<(&'static str, RelGraph)>> = OnceLock::new();
    FAMILIES.get_or_init(|| {
        ["f2", "f2_redundant", "s3", "z3_star_z2", "z_star_z2", "surface_genus2"]
            .into_iter()
            .map(|n| (n, load(n)))
            .collect()
    })
}

/// Every word over `letters` of length at most `max`.
pub fn all_words(letters: &[&str], max: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &frontier {
            for l in letters {
                let mut v = w.clone();
                v.push(l.to_string());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
