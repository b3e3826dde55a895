use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Metric, RelGraph};
use crate::error::{Error, Result};
use crate::groups::{GroupElement, ParabolicMode};

pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Exact distances from `center` to every vertex within `radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallTable {
    pub center: GroupElement,
    pub radius: usize,
    pub metric: Metric,
    pub approximate: bool,
    /// Sorted by distance, then shortlex.
    entries: Vec<(GroupElement, u32)>,
    /// `sphere_start[r]` indexes the first entry at distance `r`.
    sphere_start: Vec<usize>,
    index: FxHashMap<GroupElement, u32>,
}

impl BallTable {
    pub(crate) fn new(
        center: GroupElement,
        radius: usize,
        metric: Metric,
        approximate: bool,
        entries: Vec<(GroupElement, u32)>,
    ) -> Self {
        let mut sphere_start = Vec::with_capacity(radius + 1);
        for r in 0..=radius {
            sphere_start.push(entries.partition_point(|e| (e.1 as usize) < r));
        }
        let index = entries.iter().cloned().collect();
        BallTable {
            center,
            radius,
            metric,
            approximate,
            entries,
            sphere_start,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(GroupElement, u32)] {
        &self.entries
    }

    pub fn distance(&self, v: &GroupElement) -> Option<usize> {
        self.index.get(v).map(|&d| d as usize)
    }

    pub fn contains(&self, v: &GroupElement) -> bool {
        self.index.contains_key(v)
    }

    pub fn sphere(&self, r: usize) -> &[(GroupElement, u32)] {
        if r > self.radius {
            return &[];
        }
        let end = self.sphere_start.get(r + 1).copied().unwrap_or(self.entries.len());
        &self.entries[self.sphere_start[r]..end]
    }

    /// Number of vertices at each distance `0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        (0..=self.radius).map(|r| self.sphere(r).len()).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct CacheHeader {
    format_version: u32,
    spec_hash: String,
    center: String,
    radius: usize,
    metric: Metric,
    parabolic_mode: ParabolicMode,
    approximate: bool,
    checksum: String,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    header: CacheHeader,
    entries: Vec<(GroupElement, u32)>,
}

fn checksum(entries: &[(GroupElement, u32)]) -> String {
    let body = serde_json::to_vec(entries).expect("entries serialise");
    hex::encode(Sha256::digest(&body))
}

/// On-disk ball cache. One JSON file per key; writes go through a temporary
/// file and a rename so concurrent readers never see partial files.
#[derive(Clone, Debug)]
pub struct BallCache {
    dir: PathBuf,
}

impl BallCache {
    pub const ENV_VAR: &'static str = "RELHYP_CACHE_DIR";

    pub fn new(dir: impl Into<PathBuf>) -> Self {
        BallCache { dir: dir.into() }
    }

    /// Directory from `RELHYP_CACHE_DIR`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(Self::ENV_VAR).map(BallCache::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(
        graph: &RelGraph,
        center: &GroupElement,
        radius: usize,
        metric: Metric,
    ) -> String {
        let text = format!(
            "{}|{}|{}|{}|{:?}",
            graph.group().spec_hash(),
            graph.group().format(center),
            radius,
            metric,
            graph.config().parabolic_mode
        );
        hex::encode(Sha256::digest(text.as_bytes()))[..32].to_string()
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("ball-{key}.json"))
    }

    pub fn store(&self, graph: &RelGraph, ball: &BallTable) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.dir)?;
        let key = Self::key(graph, &ball.center, ball.radius, ball.metric);
        let file = CacheFile {
            header: CacheHeader {
                format_version: CACHE_FORMAT_VERSION,
                spec_hash: graph.group().spec_hash().to_string(),
                center: graph.group().format(&ball.center),
                radius: ball.radius,
                metric: ball.metric,
                parabolic_mode: graph.config().parabolic_mode,
                approximate: ball.approximate,
                checksum: checksum(&ball.entries),
            },
            entries: ball.entries.clone(),
        };
        let path = self.path(&key);
        let tmp = self.dir.join(format!(".ball-{key}.{}.tmp", std::process::id()));
        std::fs::write(&tmp, serde_json::to_vec(&file)?)?;
        std::fs::rename(&tmp, &path)?;
        Ok(path)
    }

    pub fn load(
        &self,
        graph: &RelGraph,
        center: &GroupElement,
        radius: usize,
        metric: Metric,
    ) -> Result<BallTable> {
        let key = Self::key(graph, center, radius, metric);
        let path = self.path(&key);
        if !path.exists() {
            return Err(Error::CacheMiss(key));
        }
        let bytes = std::fs::read(&path)?;
        let file: CacheFile = serde_json::from_slice(&bytes)
            .map_err(|_| Error::CacheChecksum(path.display().to_string()))?;
        let h = &file.header;
        if h.format_version != CACHE_FORMAT_VERSION
            || h.spec_hash != graph.group().spec_hash()
            || h.radius != radius
            || h.metric != metric
        {
            return Err(Error::CacheMiss(key));
        }
        if checksum(&file.entries) != h.checksum {
            return Err(Error::CacheChecksum(path.display().to_string()));
        }
        Ok(BallTable::new(
            center.clone(),
            radius,
            metric,
            h.approximate,
            file.entries,
        ))
    }

    /// Load from the cache, recomputing and storing on a miss or a corrupt file.
    pub fn get_or_compute(
        &self,
        graph: &RelGraph,
        center: &GroupElement,
        radius: usize,
        metric: Metric,
    ) -> Result<BallTable> {
        match self.load(graph, center, radius, metric) {
            Ok(b) => Ok(b),
            Err(Error::CacheMiss(_)) | Err(Error::CacheChecksum(_)) => {
                let b = graph.ball(center, radius, metric)?;
                self.store(graph, &b)?;
                Ok(b)
            }
            Err(e) => Err(e),
        }
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT rendering of a ball: vertices labelled by normal form, one edge per
/// adjacent pair with all of its labels.
pub fn ball_to_dot(graph: &RelGraph, ball: &BallTable) -> String {
    let g = graph.group();
    let mut out = String::from("graph ball {\n  node [shape=ellipse];\n");
    let id: FxHashMap<&GroupElement, usize> =
        ball.entries().iter().enumerate().map(|(i, (v, _))| (v, i)).collect();
    for (i, (v, d)) in ball.entries().iter().enumerate() {
        let _ = writeln!(out, "  v{i} [label=\"{}\" rank={d}];", dot_escape(&g.format(v)));
    }
    for (i, (v, _)) in ball.entries().iter().enumerate() {
        for (w, labels) in graph.adjacent(v, ball.metric) {
            if let Some(&j) = id.get(&w) {
                if i < j {
                    let text: Vec<String> = labels.iter().map(|l| graph.format_label(l)).collect();
                    let _ = writeln!(
                        out,
                        "  v{i} -- v{j} [label=\"{}\"];",
                        dot_escape(&text.join(","))
                    );
                }
            }
        }
    }
    out.push_str("}\n");
    out
}
