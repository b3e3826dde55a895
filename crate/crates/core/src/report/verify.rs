use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{RunConfig, Suite};
use crate::bundles::{symdiff_scan, BundleParams, SymdiffScan};
use crate::coding::{check_translators, coding_runs, path_labels, CodingRun, TranslatorReport, LabelCodec};
use crate::error::{Error, Result};
use crate::geodesics::{cgr_bundle_trunc, geodesic_dag, layer_profile, DirectionSpec};
use crate::groups::GroupElement;
use crate::hyperbolicity::{bound_b, bound_k, estimate_nu};
use crate::relgraph::{BallCache, Metric, RelGraph};

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Flagged,
    Approximate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub operation: String,
    pub inputs: String,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub nu_relative: usize,
    pub nu_absolute: usize,
    pub nu_hat: usize,
    pub b_hat: usize,
    pub k_hat: usize,
    pub triangles: usize,
    pub exhaustive_radius: usize,
    pub margin: usize,
    pub window_radius: usize,
    pub special_slack: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerRow {
    pub base: String,
    pub direction: String,
    pub profile: Vec<usize>,
    pub max: usize,
    pub bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub flagged: usize,
    pub approximate: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub format_version: u32,
    pub toolkit_version: String,
    pub name: String,
    pub spec_name: String,
    pub spec_hash: String,
    pub config_hash: String,
    pub seed: u64,
    pub approximate: bool,
    pub constants: Constants,
    pub counts: Counts,
    pub checks: Vec<Check>,
    pub layers: Vec<LayerRow>,
    pub stabilization: Vec<SymdiffScan>,
    pub coding: Vec<CodingRun>,
    pub translator_pairs: Vec<PairComparison>,
    #[serde(skip)]
    pub triangles_csv: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairComparison {
    pub eta: String,
    pub theta: String,
    #[serde(flatten)]
    pub report: TranslatorReport,
}

impl SuiteReport {
    /// 0 when everything passed, 1 on any failure, 2 when only flagged or
    /// approximate findings remain.
    pub fn exit_code(&self) -> i32 {
        if self.counts.fail > 0 {
            1
        } else if self.counts.flagged + self.counts.approximate > 0 {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn checks_csv(&self) -> String {
        let mut s = String::from("id,verdict,operation,inputs,detail\n");
        for c in &self.checks {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_field(&c.id),
                serde_json::to_value(c.verdict).unwrap().as_str().unwrap(),
                csv_field(&c.operation),
                csv_field(&c.inputs),
                csv_field(&c.detail)
            ));
        }
        s
    }

    pub fn layers_csv(&self) -> String {
        let mut s = String::from("base,direction,depth,size,bound\n");
        for r in &self.layers {
            for (k, n) in r.profile.iter().enumerate() {
                s.push_str(&format!("{},{},{k},{n},{}\n", csv_field(&r.base), csv_field(&r.direction), r.bound));
            }
        }
        s
    }

    /// One row per scanned depth: the data behind a size-vs-R plot.
    pub fn symdiff_csv(&self) -> String {
        let mut s = String::from("x,y,direction,depth,size,only_x,only_y\n");
        for scan in &self.stabilization {
            for r in &scan.rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    csv_field(&scan.x),
                    csv_field(&scan.y),
                    csv_field(&scan.direction),
                    r.depth,
                    r.size,
                    r.only_x,
                    r.only_y
                ));
            }
        }
        s
    }

    pub fn coding_csv(&self) -> String {
        let mut s = String::from("direction,n,depth,s_n,t_n_size,g_n,k_n,threshold_stable,pigeonhole,capped\n");
        for c in &self.coding {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                csv_field(&c.direction),
                c.n,
                c.depth,
                c.s_n,
                c.t_n_size,
                csv_field(&c.g_n),
                c.k_n,
                c.threshold_stable,
                c.pigeonhole,
                c.capped
            ));
        }
        s
    }

    pub fn translators_csv(&self) -> String {
        let mut s = String::from(
            "eta,theta,n,radius,candidates,undecided,matches,max_translator_length,distance_bound,count_bound\n",
        );
        for p in &self.translator_pairs {
            let r = &p.report;
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                csv_field(&p.eta),
                csv_field(&p.theta),
                r.n,
                r.radius,
                r.candidates,
                r.undecided,
                r.matches.len(),
                r.matches.iter().map(|m| m.length).max().unwrap_or(0),
                r.distance_bound,
                r.count_bound
            ));
        }
        s
    }

    /// `(file name, contents)` for every artifact of the requested kinds.
    pub fn artifacts(&self, json: bool, csv: bool) -> Vec<(String, String)> {
        let mut out = Vec::new();
        if json {
            out.push(("report.json".into(), self.to_json()));
        }
        if csv {
            out.push(("checks.csv".into(), self.checks_csv()));
            out.push(("layers.csv".into(), self.layers_csv()));
            out.push(("symdiff.csv".into(), self.symdiff_csv()));
            out.push(("coding.csv".into(), self.coding_csv()));
            out.push(("translators.csv".into(), self.translators_csv()));
            out.push(("triangles.csv".into(), self.triangles_csv.clone()));
        }
        out
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn error_verdict(e: &Error) -> Verdict {
    match e {
        Error::ResourceCap { .. } | Error::NoStableRay(_) | Error::EmptyBeyondThreshold { .. } => Verdict::Flagged,
        _ => Verdict::Fail,
    }
}

fn check(id: String, operation: &str, inputs: String, verdict: Verdict, detail: String) -> Check {
    Check {
        id,
        operation: operation.into(),
        inputs,
        verdict,
        detail,
    }
}

fn failed(id: String, operation: &str, inputs: String, e: &Error) -> Check {
    check(id, operation, inputs, error_verdict(e), e.to_string())
}

/// Run the configured suites on a thread pool of `jobs` workers. The result
/// does not depend on `jobs`.
pub fn cmd_verify(cfg: &RunConfig, jobs: usize) -> Result<SuiteReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| run_suites(cfg))
}

fn run_suites(cfg: &RunConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let graph = cfg.graph()?;
    let grp = graph.group();
    let approximate = graph.is_approximate();
    let mut checks = Vec::new();

    let slim = estimate_nu(&graph, &cfg.slimness_config())?;
    let nu = slim.nu_hat();
    if let Some(dir) = cfg.cache_dir.clone().or_else(|| BallCache::from_env().map(|c| c.dir().to_path_buf())) {
        BallCache::new(dir).get_or_compute(&graph, &GroupElement::identity(), nu, Metric::Absolute)?;
    }
    let b_hat = bound_b(&graph, nu)?;
    let k_hat = bound_k(nu, b_hat);
    let mut params = BundleParams::from_nu(&graph, nu)?;
    if let Some(w) = cfg.window {
        params.window_radius = w;
    }
    if let Some(m) = cfg.margin {
        params.margin = m;
    }
    checks.push(check(
        "nu".into(),
        "estimate_nu",
        format!(
            "exhaustive radius {}, ball radius {}, {} sampled, seed {}",
            slim.exhaustive_radius, slim.ball_radius, slim.triangle_budget, slim.seed
        ),
        if approximate { Verdict::Approximate } else { Verdict::Pass },
        format!(
            "nu_relative {} nu_absolute {} over {} triangles; B {} K {}",
            slim.nu_relative, slim.nu_absolute, slim.triangles, b_hat, k_hat
        ),
    ));
    let ok_or_approx = |good: bool| match (good, approximate) {
        (false, _) => Verdict::Fail,
        (true, true) => Verdict::Approximate,
        (true, false) => Verdict::Pass,
    };

    let mut directions: BTreeMap<String, DirectionSpec> = BTreeMap::new();
    for text in cfg.directions.iter().chain(&cfg.coding.directions) {
        match DirectionSpec::parse(&graph, text) {
            Ok(d) => {
                directions.insert(text.clone(), d);
            }
            Err(e) => checks.push(failed(format!("direction/{text}"), "DirectionSpec::parse", text.clone(), &e)),
        }
    }
    let element = |w: &str| grp.reduce(w);
    let suites = &cfg.suites;

    let mut layers = Vec::new();
    if suites.contains(&Suite::Layers) {
        let items: Vec<(&String, &String)> = cfg
            .bases
            .iter()
            .flat_map(|b| cfg.directions.iter().map(move |d| (b, d)))
            .filter(|(_, d)| directions.contains_key(*d))
            .collect();
        let results: Vec<Result<LayerRow>> = items
            .par_iter()
            .map(|(b, d)| {
                let bundle = cgr_bundle_trunc(&graph, &element(b)?, &directions[*d], cfg.radius, params.margin)?;
                let profile = layer_profile(&bundle);
                Ok(LayerRow {
                    base: b.to_string(),
                    direction: d.to_string(),
                    max: profile.iter().copied().max().unwrap_or(0),
                    profile,
                    bound: b_hat,
                })
            })
            .collect();
        for ((b, d), r) in items.iter().zip(results) {
            let id = format!("layers/{b}/{d}");
            let inputs = format!("base {b}, direction {d}, R {}, margin {}", cfg.radius, params.margin);
            match r {
                Ok(row) => {
                    checks.push(check(
                        id,
                        "cgr_bundle_trunc + layer_profile",
                        inputs,
                        ok_or_approx(row.max <= b_hat),
                        format!("max layer {} vs bound {}", row.max, b_hat),
                    ));
                    layers.push(row);
                }
                Err(e) => checks.push(failed(id, "cgr_bundle_trunc", inputs, &e)),
            }
        }
    }

    let mut stabilization = Vec::new();
    if suites.contains(&Suite::Stabilization) {
        let items: Vec<([String; 2], &String)> = cfg
            .symdiff_pairs()
            .into_iter()
            .flat_map(|p| cfg.directions.iter().map(move |d| (p.clone(), d)))
            .filter(|(_, d)| directions.contains_key(*d))
            .collect();
        let results: Vec<Result<SymdiffScan>> = items
            .par_iter()
            .map(|([x, y], d)| {
                symdiff_scan(
                    &graph,
                    &element(x)?,
                    &element(y)?,
                    &directions[*d],
                    &cfg.stabilization_radii,
                    &params,
                )
            })
            .collect();
        for (([x, y], d), r) in items.iter().zip(results) {
            let id = format!("symdiff/{x}/{y}/{d}");
            let inputs = format!("x {x}, y {y}, direction {d}, R {:?}", cfg.stabilization_radii);
            match r {
                Ok(scan) => {
                    let sizes: Vec<usize> = scan.rows.iter().map(|r| r.size).collect();
                    let verdict = match (scan.stabilized, approximate) {
                        (false, _) => Verdict::Flagged,
                        (true, true) => Verdict::Approximate,
                        (true, false) => Verdict::Pass,
                    };
                    checks.push(check(
                        id,
                        "symdiff_scan",
                        inputs,
                        verdict,
                        format!("{} sizes {sizes:?}", scan.verdict()),
                    ));
                    stabilization.push(scan);
                }
                Err(e) => checks.push(failed(id, "symdiff_scan", inputs, &e)),
            }
        }
    }

    let mut coding = Vec::new();
    let mut translator_pairs = Vec::new();
    let want_coding = suites.contains(&Suite::Coding);
    let want_translators = suites.contains(&Suite::Translators);
    if want_coding || want_translators {
        let codec = LabelCodec::new(&graph);
        let eta_texts: Vec<String> = cfg
            .coding_directions()
            .into_iter()
            .filter(|d| directions.contains_key(d))
            .collect();
        let mut pairs: Vec<(String, DirectionSpec)> = Vec::new();
        let mut runs_wanted: Vec<(DirectionSpec, usize)> = Vec::new();
        for t in &eta_texts {
            let eta = directions[t].clone();
            if want_coding {
                for n in 1..=cfg.coding.max_n {
                    runs_wanted.push((eta.clone(), n));
                }
            } else {
                for n in 1..=cfg.coding.translator_max_n {
                    runs_wanted.push((eta.clone(), n));
                }
            }
            if want_translators {
                for tr in cfg.translators() {
                    let theta = eta.translate(&graph, &element(&tr)?);
                    for n in 1..=cfg.coding.translator_max_n {
                        runs_wanted.push((theta.clone(), n));
                    }
                    pairs.push((t.clone(), theta));
                }
            }
        }
        let key = |d: &DirectionSpec, n: usize| (d.format(&graph), n);
        let mut grouped: BTreeMap<String, (DirectionSpec, Vec<usize>)> = BTreeMap::new();
        for (d, n) in runs_wanted {
            grouped.entry(d.format(&graph)).or_insert_with(|| (d.clone(), Vec::new())).1.push(n);
        }
        let grouped: Vec<(DirectionSpec, Vec<usize>)> = grouped
            .into_values()
            .map(|(d, mut ns)| {
                ns.sort();
                ns.dedup();
                (d, ns)
            })
            .collect();
        let results: Vec<Result<Vec<Result<CodingRun>>>> = grouped
            .par_iter()
            .map(|(d, ns)| coding_runs(&graph, &codec, d, cfg.coding.depth, ns, &params))
            .collect();
        let mut by_key: BTreeMap<(String, usize), CodingRun> = BTreeMap::new();
        for ((d, ns), r) in grouped.iter().zip(results) {
            let f = d.format(&graph);
            let per_n: Vec<(usize, Result<CodingRun>)> = match r {
                Ok(v) => ns.iter().copied().zip(v).collect(),
                Err(e) => {
                    checks.push(failed(
                        format!("coding/{f}/geo1"),
                        "geo1_trunc",
                        format!("direction {f}, R {}", cfg.coding.depth),
                        &e,
                    ));
                    continue;
                }
            };
            for (n, r) in per_n {
                match r {
                    Ok(run) => {
                        by_key.insert(key(d, n), run);
                    }
                    Err(e) => checks.push(failed(
                        format!("coding/{f}/{n}"),
                        "coding_run",
                        format!("direction {f}, R {}, n {n}", cfg.coding.depth),
                        &e,
                    )),
                }
            }
        }

        if want_coding {
            for t in &eta_texts {
                let f = directions[t].format(&graph);
                for n in 1..=cfg.coding.max_n {
                    let Some(run) = by_key.get(&(f.clone(), n)) else { continue };
                    let inputs = format!("direction {t}, R {}, n {n}", cfg.coding.depth);
                    let thr = if !run.threshold_stable || run.capped {
                        Verdict::Flagged
                    } else {
                        ok_or_approx(true)
                    };
                    checks.push(check(
                        format!("coding/{t}/{n}/threshold"),
                        "s_n_eta at thresholds 1/2 and 2/3 of the window",
                        inputs.clone(),
                        thr,
                        format!("s_n {} late {} capped {}", run.s_n, run.s_n_late, run.capped),
                    ));
                    if let Some(next) = by_key.get(&(f.clone(), n + 1)) {
                        let restricted = next.s_n.restrict(n);
                        checks.push(check(
                            format!("coding/{t}/{n}/coherence"),
                            "s_n_eta",
                            inputs,
                            ok_or_approx(restricted == run.s_n),
                            format!("s_(n+1)|_n {} vs s_n {}", restricted, run.s_n),
                        ));
                    }
                }
            }
            coding = by_key
                .iter()
                .filter(|((f, _), _)| eta_texts.iter().any(|t| &directions[t].format(&graph) == f))
                .map(|(_, r)| r.clone())
                .collect();
        }

        if want_translators {
            for (t, theta) in &pairs {
                let f_eta = directions[t].format(&graph);
                let f_theta = theta.format(&graph);
                for n in 1..=cfg.coding.translator_max_n {
                    let (Some(a), Some(b)) = (by_key.get(&(f_eta.clone(), n)), by_key.get(&(f_theta.clone(), n))) else {
                        continue;
                    };
                    let id = format!("translator_pairs/{f_eta}/{f_theta}/{n}");
                    let inputs = format!("eta {f_eta}, theta {f_theta}, n {n}, R {}", cfg.coding.depth);
                    match check_translators(&graph, &a.h_n, &b.h_n, nu, k_hat) {
                        Ok(rep) => {
                            checks.push(check(
                                id,
                                "check_translators",
                                inputs,
                                ok_or_approx(rep.passed()),
                                format!(
                                    "radius {}: {} matches (bound {}), {} undecided, translators {:?} (length bound {})",
                                    rep.radius,
                                    rep.matches.len(),
                                    rep.count_bound,
                                    rep.undecided,
                                    rep.matches.iter().map(|m| m.g.as_str()).collect::<Vec<_>>(),
                                    rep.distance_bound
                                ),
                            ));
                            translator_pairs.push(PairComparison {
                                eta: f_eta.clone(),
                                theta: f_theta.clone(),
                                report: rep,
                            });
                        }
                        Err(e) => checks.push(failed(id, "check_translators", inputs, &e)),
                    }
                }
            }
        }
    }

    if suites.contains(&Suite::Equivariance) {
        let inputs = format!(
            "{} samples in the ball of radius {}, seed {}",
            cfg.coding.equivariance_samples, cfg.coding.equivariance_radius, cfg.seed
        );
        match label_equivariance(&graph, cfg.coding.equivariance_samples, cfg.coding.equivariance_radius, cfg.seed) {
            Ok(bad) => checks.push(check(
                "equivariance".into(),
                "path_labels",
                inputs,
                ok_or_approx(bad == 0),
                format!("{bad} mismatches"),
            )),
            Err(e) => checks.push(failed("equivariance".into(), "path_labels", inputs, &e)),
        }
    }

    checks.sort_by(|a, b| a.id.cmp(&b.id));
    let count = |v: Verdict| checks.iter().filter(|c| c.verdict == v).count();
    let counts = Counts {
        pass: count(Verdict::Pass),
        fail: count(Verdict::Fail),
        flagged: count(Verdict::Flagged),
        approximate: count(Verdict::Approximate),
    };
    Ok(SuiteReport {
        format_version: REPORT_FORMAT_VERSION,
        toolkit_version: env!("CARGO_PKG_VERSION").into(),
        name: cfg.name.clone(),
        spec_name: cfg
            .spec_path()
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        spec_hash: grp.spec_hash().to_string(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        approximate,
        constants: Constants {
            nu_relative: slim.nu_relative,
            nu_absolute: slim.nu_absolute,
            nu_hat: nu,
            b_hat,
            k_hat,
            triangles: slim.triangles,
            exhaustive_radius: slim.exhaustive_radius,
            margin: params.margin,
            window_radius: params.window_radius,
            special_slack: params.special_slack,
        },
        counts,
        checks,
        layers,
        stabilization,
        coding,
        translator_pairs,
        triangles_csv: slim.to_csv(),
    })
}

/// Sample `(g, γ)` with `γ` a geodesic inside the ball of radius `radius`
/// and count the pairs where `g·γ` carries a different label than `γ`.
pub fn label_equivariance(graph: &RelGraph, samples: usize, radius: usize, seed: u64) -> Result<usize> {
    let e = GroupElement::identity();
    let ball: Vec<GroupElement> = graph
        .ball(&e, radius, Metric::Relative)?
        .entries()
        .iter()
        .map(|(v, _)| v.clone())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c61_6265_6c73);
    let mut bad = 0;
    for _ in 0..samples {
        let g = &ball[rng.gen_range(0..ball.len())];
        let u = &ball[rng.gen_range(0..ball.len())];
        let v = &ball[rng.gen_range(0..ball.len())];
        let list = geodesic_dag(graph, u, v, Metric::Relative)?.enumerate(64);
        let path = &list.paths[rng.gen_range(0..list.paths.len())];
        let moved: Vec<GroupElement> = path.vertices.iter().map(|p| graph.group().multiply(g, p)).collect();
        if path_labels(graph, &moved)? != path.labels {
            bad += 1;
        }
    }
    Ok(bad)
}
