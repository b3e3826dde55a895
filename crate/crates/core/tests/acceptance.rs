//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use relhyp::bundles::{symdiff_scan, BundleParams};
use relhyp::coding::{coding_runs, compare_n, LabelCodec, RestrictedLabel};
use relhyp::geodesics::{cgr_bundle_trunc, geodesic_dag, layer_profile, naive_geodesics, DirectionSpec};
use relhyp::groups::GroupElement;
use relhyp::hyperbolicity::{bound_b, estimate_nu, SlimnessConfig};
use relhyp::relgraph::{Metric, RelGraph};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e() -> GroupElement {
    GroupElement::identity()
}

// ---------------------------------------------------------------------------
// Words in F(a, b) as token lists, reduced by hand.

fn inv_token(t: &str) -> String {
    match t.strip_suffix('\'') {
        Some(s) => s.to_string(),
        None => format!("{t}'"),
    }
}

fn free_reduce(tokens: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for t in tokens {
        if out.last().is_some_and(|l| *l == inv_token(t)) {
            out.pop();
        } else {
            out.push(t.clone());
        }
    }
    out
}

fn show(tokens: &[String]) -> String {
    if tokens.is_empty() {
        "e".into()
    } else {
        tokens.join(" ")
    }
}

// ---------------------------------------------------------------------------
// Independent model of restricted labels and their order.

/// Row `code` cut or zero-padded to `n` bits.
fn row(code: &str, n: usize) -> Vec<bool> {
    let mut r: Vec<bool> = code.chars().take(n).map(|c| c == '1').collect();
    r.resize(n, false);
    r
}

/// Comparison key: the stages `w|_1, ..., w|_n` concatenated row by row.
fn stage_key(rows: &[Vec<bool>], n: usize) -> Vec<bool> {
    let mut key = Vec::new();
    for m in 1..=n {
        for r in &rows[..m] {
            key.extend_from_slice(&r[..m]);
        }
    }
    key
}

fn label_rows(l: &RestrictedLabel) -> Vec<Vec<bool>> {
    let n = l.n();
    (0..n).map(|r| (0..n).map(|c| l.bit(r, c)).collect()).collect()
}

fn rows_to_label(rows: &[Vec<bool>]) -> RestrictedLabel {
    let n = rows.len();
    RestrictedLabel::from_bits(n, rows.concat()).unwrap()
}

fn restrict_rows(rows: &[Vec<bool>], m: usize) -> Vec<Vec<bool>> {
    rows[..m].iter().map(|r| r[..m].to_vec()).collect()
}

fn random_rows(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<bool>> {
    (0..n).map(|_| (0..n).map(|_| rng.gen()).collect()).collect()
}

// ---------------------------------------------------------------------------
// C1: the free group on a, b, where everything has a closed form.

struct TreeDirection {
    text: &'static str,
    prefix: &'static [&'static str],
    period: &'static [&'static str],
}

const TREE_DIRECTIONS: &[TreeDirection] = &[
    TreeDirection { text: "(a)^inf", prefix: &[], period: &["a"] },
    TreeDirection { text: "(b)^inf", prefix: &[], period: &["b"] },
    TreeDirection { text: "(a')^inf", prefix: &[], period: &["a'"] },
    TreeDirection { text: "(a b)^inf", prefix: &[], period: &["a", "b"] },
    TreeDirection { text: "(a b a' b')^inf", prefix: &[], period: &["a", "b", "a'", "b'"] },
    TreeDirection { text: "b (a)^inf", prefix: &["b"], period: &["a"] },
];

impl TreeDirection {
    fn letter(&self, k: usize) -> &'static str {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.period[(k - self.prefix.len()) % self.period.len()]
        }
    }

    fn word(&self, k: usize) -> Vec<String> {
        (0..k).map(|i| self.letter(i).to_string()).collect()
    }

    /// Rows of the coded label read from position `k`.
    fn label_at(&self, k: usize, n: usize) -> Vec<Vec<bool>> {
        // Absolute generators in the order a, a', b, b' get the first four
        // binary strings in length-lex order.
        let code = |l: &str| match l {
            "a" => "",
            "a'" => "0",
            "b" => "1",
            "b'" => "00",
            other => panic!("unexpected letter {other}"),
        };
        (k..k + n).map(|i| row(code(self.letter(i)), n)).collect()
    }
}

fn criterion_tree() -> Outcome {
    let graph = common::load("f2");
    let radius = 8;
    let nu = estimate_nu(&graph, &SlimnessConfig::default()).map_err(|e| e.to_string())?;
    ensure(nu.nu_hat() == 0, || format!("nu_hat = {}", nu.nu_hat()))?;
    let b = bound_b(&graph, 0).map_err(|e| e.to_string())?;
    ensure(b == 1, || format!("bound_b(0) = {b}"))?;
    let params = BundleParams::from_nu(&graph, 0).map_err(|e| e.to_string())?;
    let g = graph.group();

    let bases = ["e", "b", "a", "a' b"];
    let mut profiles = 0;
    for base in bases {
        let x = g.reduce(base).unwrap();
        for d in TREE_DIRECTIONS {
            let dir = DirectionSpec::parse(&graph, d.text).map_err(|e| e.to_string())?;
            let bundle = cgr_bundle_trunc(&graph, &x, &dir, radius, params.margin).map_err(|e| e.to_string())?;
            let prof = layer_profile(&bundle);
            ensure(prof.iter().all(|&s| s == 1), || format!("profile {prof:?} at {base}, {}", d.text))?;
            profiles += 1;
        }
    }

    let a_ray = DirectionSpec::parse(&graph, "(a)^inf").unwrap();
    let depths: Vec<usize> = (2..=radius).collect();
    let scan = symdiff_scan(&graph, &e(), &g.reduce("b").unwrap(), &a_ray, &depths, &params)
        .map_err(|err| err.to_string())?;
    ensure(scan.rows.iter().all(|r| r.size == 1), || format!("symdiff(e, b, a^inf) rows {:?}", scan.rows))?;

    // Coding on the tree: s_n is the least periodic phase, T_n the ray
    // vertices carrying it, g_n the shortest of those.
    let depth = 18;
    let codec = LabelCodec::new(&graph);
    let ns = [1, 2, 3, 4];
    let mut coded = 0;
    for d in TREE_DIRECTIONS {
        let dir = DirectionSpec::parse(&graph, d.text).unwrap();
        let runs = coding_runs(&graph, &codec, &dir, depth, &ns, &params).map_err(|e| e.to_string())?;
        for (run, &n) in runs.into_iter().zip(&ns) {
            let run = run.map_err(|e| format!("{} n={n}: {e}", d.text))?;
            let max_entry = depth - n - params.margin;
            let s_rows = (d.prefix.len()..d.prefix.len() + d.period.len())
                .map(|k| d.label_at(k, n))
                .min_by(|x, y| stage_key(x, n).cmp(&stage_key(y, n)))
                .unwrap();
            ensure(label_rows(&run.s_n) == s_rows, || {
                format!("{} n={n}: s_n {} expected {}", d.text, run.s_n, rows_to_label(&s_rows))
            })?;
            let t: Vec<usize> = (0..=max_entry).filter(|&k| d.label_at(k, n) == s_rows).collect();
            let g_n = d.word(t[0]);
            ensure(run.g_n == show(&g_n), || format!("{} n={n}: g_n {} expected {}", d.text, run.g_n, show(&g_n)))?;
            ensure(run.t_n_size == t.len(), || format!("{} n={n}: |T_n| {} expected {}", d.text, run.t_n_size, t.len()))?;
            let g_inv: Vec<String> = g_n.iter().rev().map(|l| inv_token(l)).collect();
            let expected: BTreeSet<String> = t
                .iter()
                .map(|&k| show(&free_reduce(&[g_inv.clone(), d.word(k)].concat())))
                .collect();
            let got: BTreeSet<String> = run.h_n.words.iter().cloned().collect();
            ensure(got == expected, || format!("{} n={n}: H_n {got:?} expected {expected:?}", d.text))?;
            coded += 1;
        }
    }
    Ok(format!(
        "nu 0, B 1, {profiles} profiles all 1, symdiff 1 for R 2..{radius}, {coded} coding runs match the tree"
    ))
}

// ---------------------------------------------------------------------------
// C2 to C5 and C8: the verification suite run through the binary.

struct SuiteRun {
    name: &'static str,
    report: Value,
    bytes: Vec<u8>,
    elapsed: Duration,
}

fn run_verify(config: &str, out: &Path, jobs: usize) -> Result<(Vec<u8>, Duration), String> {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_relhyp"))
        .args(["--config", &common::config_path(config), "--jobs", &jobs.to_string(), "--out"])
        .arg(out)
        .arg("verify")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !status.status.success() {
        return Err(format!(
            "{config} --jobs {jobs} exited {:?}: {}",
            status.status.code(),
            String::from_utf8_lossy(&status.stderr).trim()
        ));
    }
    let bytes = std::fs::read(out.join("report.json")).map_err(|e| e.to_string())?;
    Ok((bytes, elapsed))
}

fn suite_runs(dir: &Path) -> Result<Vec<SuiteRun>, String> {
    let mut runs = Vec::new();
    for name in ["z3z2", "f2ab"] {
        let (bytes, elapsed) = run_verify(name, &dir.join(format!("{name}-j1")), 1)?;
        let report: Value = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
        runs.push(SuiteRun { name, report, bytes, elapsed });
    }
    Ok(runs)
}

fn spec_of(run: &SuiteRun) -> &'static str {
    match run.name {
        "z3z2" => "z3_star_z2",
        _ => "f2_redundant",
    }
}

fn count(v: &Value) -> usize {
    v.as_u64().expect("count") as usize
}

fn criterion_layers(runs: &[SuiteRun]) -> Outcome {
    let mut rows = 0;
    let mut notes = Vec::new();
    for run in runs {
        let r = &run.report;
        let c = &r["constants"];
        let nu = count(&c["nu_hat"]);
        let graph = common::load(spec_of(run));
        let small = graph.bfs_ball(&e(), count(&c["exhaustive_radius"]), Metric::Relative).unwrap().len();
        let sampled = count(&c["triangles"]) - small * (small - 1) / 2;
        ensure(count(&c["exhaustive_radius"]) >= 3, || format!("{}: exhaustive radius below 3", run.name))?;
        ensure(sampled >= 10_000, || format!("{}: only {sampled} sampled triangles", run.name))?;
        let bound = (6 * nu + 1) * graph.bfs_ball(&e(), nu, Metric::Absolute).unwrap().len();
        let layers = r["layers"].as_array().unwrap();
        let bases: BTreeSet<&str> = layers.iter().map(|l| l["base"].as_str().unwrap()).collect();
        let dirs: BTreeSet<&str> = layers.iter().map(|l| l["direction"].as_str().unwrap()).collect();
        ensure(bases.len() >= 3 && dirs.len() >= 10, || {
            format!("{}: {} bases, {} directions", run.name, bases.len(), dirs.len())
        })?;
        for l in layers {
            let profile: Vec<usize> = l["profile"].as_array().unwrap().iter().map(count).collect();
            ensure(profile.len() == 11, || format!("{}: profile length {}", run.name, profile.len()))?;
            let max = *profile.iter().max().unwrap();
            ensure(max <= bound, || {
                format!("{}: layer {max} > {bound} at {} {}", run.name, l["base"], l["direction"])
            })?;
            rows += 1;
        }
        ensure(run.elapsed < Duration::from_secs(600), || format!("{} took {:?}", run.name, run.elapsed))?;
        notes.push(format!("{} nu {nu} bound {bound}", run.name));
    }
    Ok(format!("{rows} profiles at R 10, zero violations ({})", notes.join(", ")))
}

fn criterion_stabilization(runs: &[SuiteRun]) -> Outcome {
    let mut scans = 0;
    for run in runs {
        for s in run.report["stabilization"].as_array().unwrap() {
            let rows = s["rows"].as_array().unwrap();
            let last = rows.last().map(|r| count(&r["depth"]));
            ensure(last == Some(12), || format!("{}: scan ends at {last:?}", run.name))?;
            let sizes: Vec<usize> = rows.iter().map(|r| count(&r["size"])).collect();
            let tail = &sizes[sizes.len() - 3..];
            ensure(tail[0] == tail[1] && tail[1] == tail[2] && s["stabilized"] == true, || {
                format!("{}: {} {} {} sizes {sizes:?}", run.name, s["x"], s["y"], s["direction"])
            })?;
            scans += 1;
        }
        let layers = run.report["layers"].as_array().unwrap().len();
        let bases = run.report["layers"]
            .as_array()
            .unwrap()
            .iter()
            .map(|l| l["base"].as_str().unwrap())
            .collect::<BTreeSet<_>>()
            .len();
        let expected = (bases - 1) * layers / bases;
        ensure(run.report["stabilization"].as_array().unwrap().len() == expected, || {
            format!("{}: {expected} scans expected", run.name)
        })?;
        ensure(run.elapsed < Duration::from_secs(900), || format!("{} took {:?}", run.name, run.elapsed))?;
    }
    Ok(format!("{scans} scans stabilized by R 12"))
}

fn criterion_translators(runs: &[SuiteRun]) -> Outcome {
    let mut pairs = 0;
    for run in runs {
        let c = &run.report["constants"];
        let nu = count(&c["nu_hat"]);
        let b_hat = count(&c["b_hat"]);
        let graph = common::load(spec_of(run));
        let independent_b = (6 * nu + 1) * graph.bfs_ball(&e(), nu, Metric::Absolute).unwrap().len();
        ensure(b_hat == independent_b, || format!("{}: B {b_hat} vs {independent_b}", run.name))?;
        let rows: Vec<&Value> = run.report["translator_pairs"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|r| count(&r["n"]) <= 4)
            .collect();
        ensure(rows.len() >= 20, || format!("{}: {} comparisons", run.name, rows.len()))?;
        for r in &rows {
            let matches = r["matches"].as_array().unwrap();
            for m in matches {
                let len = count(&m["length"]);
                let word = m["g"].as_str().unwrap();
                let g = graph.group().reduce(word).unwrap();
                let measured = graph.distance(&e(), &g, Metric::Relative).unwrap();
                ensure(len == measured && len <= 8 * nu, || {
                    format!("{}: translator {word} length {len} ({measured}) > {}", run.name, 8 * nu)
                })?;
            }
            ensure(matches.len() <= (20 * nu + 1) * b_hat, || {
                format!("{}: {} matches for {} / {}", run.name, matches.len(), r["eta"], r["theta"])
            })?;
        }
        pairs += rows.len();
    }
    Ok(format!("{pairs} paired comparisons within 8 nu and (20 nu + 1) B"))
}

fn parse_rows(v: &Value) -> Vec<Vec<bool>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_str().unwrap().chars().map(|c| c == '1').collect())
        .collect()
}

/// `lab(gγ) = lab(γ)` with labels recomputed from the alphabet.
fn equivariance_oracle(graph: &RelGraph, samples: usize, seed: u64) -> usize {
    let group = graph.group();
    let alphabet = graph.alphabet(Metric::Relative);
    let label = |p: &GroupElement, q: &GroupElement| -> BTreeSet<String> {
        let step = group.quotient(p, q);
        alphabet
            .iter()
            .filter(|(_, x)| *x == step)
            .map(|(l, _)| graph.format_label(l))
            .collect()
    };
    let ball: Vec<GroupElement> = graph.bfs_ball(&e(), 4, Metric::Relative).unwrap().into_iter().map(|(v, _)| v).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..samples {
        let g = &ball[rng.gen_range(0..ball.len())];
        let u = &ball[rng.gen_range(0..ball.len())];
        let v = &ball[rng.gen_range(0..ball.len())];
        let paths = geodesic_dag(graph, u, v, Metric::Relative).unwrap().enumerate(16).paths;
        let path = &paths[rng.gen_range(0..paths.len())];
        for w in path.vertices.windows(2) {
            let before = label(&w[0], &w[1]);
            let after = label(&group.multiply(g, &w[0]), &group.multiply(g, &w[1]));
            if before.is_empty() || before != after {
                bad += 1;
                break;
            }
        }
    }
    bad
}

fn criterion_coding(runs: &[SuiteRun]) -> Outcome {
    let mut coherent = 0;
    let mut equivariant = 0;
    for run in runs {
        let mut by_dir: BTreeMap<&str, BTreeMap<usize, &Value>> = BTreeMap::new();
        for c in run.report["coding"].as_array().unwrap() {
            by_dir.entry(c["direction"].as_str().unwrap()).or_default().insert(count(&c["n"]), c);
        }
        for (dir, rows) in &by_dir {
            for n in 1..=4 {
                let (small, big) = (rows.get(&n), rows.get(&(n + 1)));
                let (Some(small), Some(big)) = (small, big) else {
                    return Err(format!("{}: {dir} missing n {n} or {}", run.name, n + 1));
                };
                let s = parse_rows(&small["s_n"]);
                ensure(restrict_rows(&parse_rows(&big["s_n"]), n) == s, || {
                    format!("{}: {dir} s_{} does not restrict to s_{n}", run.name, n + 1)
                })?;
                coherent += 1;
            }
            for c in rows.values() {
                ensure(c["s_n"] == c["s_n_late"] && c["threshold_stable"] == true, || {
                    format!("{}: {dir} n {} moves with the threshold", run.name, c["n"])
                })?;
            }
        }
        let graph = common::load(spec_of(run));
        let bad = equivariance_oracle(&graph, 1000, count(&run.report["seed"]) as u64);
        ensure(bad == 0, || format!("{}: {bad} label mismatches", run.name))?;
        let check = run.report["checks"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["id"] == "equivariance")
            .ok_or_else(|| format!("{}: no equivariance check", run.name))?;
        ensure(check["verdict"] == "pass", || format!("{}: {}", run.name, check["detail"]))?;
        equivariant += 1000;
    }
    Ok(format!(
        "{coherent} restrictions coherent, thresholds agree, {equivariant} translated geodesics keep labels"
    ))
}

fn criterion_determinism(dir: &Path, runs: &[SuiteRun]) -> Outcome {
    for run in runs {
        let (bytes, _) = run_verify(run.name, &dir.join(format!("{}-j4", run.name)), 4)?;
        ensure(bytes == run.bytes, || format!("{}: report differs between --jobs 1 and --jobs 4", run.name))?;
    }
    Ok("report.json identical for --jobs 1 and --jobs 4".into())
}

// ---------------------------------------------------------------------------
// C6: the order on restricted labels.

fn criterion_order() -> Outcome {
    let mut checked = 0;
    let mut check = |w: &[Vec<bool>], v: &[Vec<bool>], n: usize| -> Result<(), String> {
        let (lw, lv) = (rows_to_label(w), rows_to_label(v));
        let lib = compare_n(&lw, &lv).map_err(|e| e.to_string())?;
        ensure(lib == stage_key(w, n + 1).cmp(&stage_key(v, n + 1)), || format!("compare_{} disagrees on {lw} {lv}", n + 1))?;
        let lower = compare_n(&lw.restrict(n), &lv.restrict(n)).map_err(|e| e.to_string())?;
        if lower == Ordering::Less {
            ensure(lib == Ordering::Less, || format!("{lw} vs {lv}: less at {n} but {lib:?} at {}", n + 1))?;
        }
        checked += 1;
        Ok(())
    };
    let all: Vec<Vec<Vec<bool>>> = RestrictedLabel::all(2).iter().map(label_rows).collect();
    for w in &all {
        for v in &all {
            check(w, v, 1)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in [2, 3] {
        for _ in 0..10_000 {
            let w = random_rows(&mut rng, n + 1);
            // Share a prefix of stages often enough to exercise ties.
            let v = if rng.gen_bool(0.5) {
                let mut v = w.clone();
                let (r, c) = (rng.gen_range(0..=n), rng.gen_range(0..=n));
                v[r][c] = !v[r][c];
                v
            } else {
                random_rows(&mut rng, n + 1)
            };
            check(&w, &v, n)?;
        }
    }
    Ok(format!("{checked} pairs, zero violations"))
}

// ---------------------------------------------------------------------------
// C7: geodesic DAGs against naive search, arithmetic against brute force.

fn dag_matches_naive(name: &str, graph: &RelGraph, pairs: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let group = graph.group();
    let start: Vec<GroupElement> = graph.bfs_ball(&e(), 3, Metric::Relative).unwrap().into_iter().map(|(v, _)| v).collect();
    let spheres: Vec<Vec<GroupElement>> = (0..=5).map(|r| graph.sphere(Metric::Relative, r).unwrap()).collect();
    for _ in 0..pairs {
        let u = &start[rng.gen_range(0..start.len())];
        let radii: Vec<usize> = (0..=5).filter(|&r| !spheres[r].is_empty()).collect();
        let r = radii[rng.gen_range(0..radii.len())];
        let w = &spheres[r][rng.gen_range(0..spheres[r].len())];
        let v = group.multiply(u, w);
        let dag = geodesic_dag(graph, u, &v, Metric::Relative).map_err(|e| e.to_string())?;
        let list = dag.enumerate(1 << 20);
        let naive = naive_geodesics(graph, u, &v, Metric::Relative, 5).ok_or("naive search found nothing")?;
        let a: BTreeSet<_> = list.paths.into_iter().collect();
        let b: BTreeSet<_> = naive.into_iter().collect();
        ensure(dag.length == r && a == b, || {
            format!("{name}: {} -> {}: dag {} paths, naive {}", group.format(u), group.format(&v), a.len(), b.len())
        })?;
    }
    Ok(())
}

type Mat = [[i64; 2]; 2];

fn mat_mul(x: &Mat, y: &Mat) -> Mat {
    let mut z = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            z[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    z
}

fn mat_inv(x: &Mat) -> Mat {
    // Determinant one.
    [[x[1][1], -x[0][1]], [-x[1][0], x[0][0]]]
}

fn perm_mul(x: &[usize; 3], y: &[usize; 3]) -> [usize; 3] {
    [y[x[0]], y[x[1]], y[x[2]]]
}

fn perm_inv(x: &[usize; 3]) -> [usize; 3] {
    let mut z = [0; 3];
    for i in 0..3 {
        z[x[i]] = i;
    }
    z
}

/// Every word of length at most 6 is evaluated both by the group and by
/// a faithful model; equal elements must coincide with equal images.
fn brute_force<T: Ord + Clone>(
    spec: &str,
    generators: &[(&str, T)],
    identity: T,
    mul: impl Fn(&T, &T) -> T,
    inv: impl Fn(&T) -> T,
    normalise: impl Fn(T) -> T,
) -> Result<usize, String> {
    let graph = common::load(spec);
    let group = graph.group();
    let mut letters: Vec<(String, T)> = Vec::new();
    for (n, x) in generators {
        letters.push((n.to_string(), x.clone()));
        letters.push((format!("{n}'"), inv(x)));
    }
    let names: Vec<&str> = letters.iter().map(|(n, _)| n.as_str()).collect();
    let words = common::all_words(&names, 6);
    let mut by_element: BTreeMap<GroupElement, T> = BTreeMap::new();
    let mut by_image: BTreeMap<T, GroupElement> = BTreeMap::new();
    for w in &words {
        let element = group.reduce(&w.join(" ")).map_err(|e| e.to_string())?;
        let mut image = identity.clone();
        for l in w {
            let x = &letters.iter().find(|(n, _)| n == l).unwrap().1;
            image = mul(&image, x);
        }
        let image = normalise(image);
        if let Some(old) = by_element.insert(element.clone(), image.clone()) {
            ensure(old == image, || format!("{spec}: {} has two images", w.join(" ")))?;
        }
        if let Some(old) = by_image.insert(image, element.clone()) {
            ensure(old == element, || format!("{spec}: {} and {} collide", group.format(&old), w.join(" ")))?;
        }
    }
    // Multiplication and inversion of normal forms agree with the model.
    let elems: Vec<(&GroupElement, &T)> = by_element.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..2000 {
        let (x, mx) = elems[rng.gen_range(0..elems.len())];
        let (y, my) = elems[rng.gen_range(0..elems.len())];
        let xy = group.multiply(x, y);
        let want = normalise(mul(mx, my));
        if let Some(got) = by_element.get(&xy) {
            ensure(*got == want, || format!("{spec}: product of {} and {}", group.format(x), group.format(y)))?;
        }
        ensure(by_element.get(&group.inverse(x)).is_none_or(|i| *i == normalise(inv(mx))), || {
            format!("{spec}: inverse of {}", group.format(x))
        })?;
    }
    Ok(words.len())
}

fn criterion_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let families = common::all_families();
    for (name, graph) in families {
        dag_matches_naive(name, graph, 1000, &mut rng)?;
    }
    let sign = |m: Mat| if m[0][0] < 0 || (m[0][0] == 0 && m[0][1] < 0) { m.map(|r| r.map(|x| -x)) } else { m };
    let free = brute_force("f2", &[("a", [[1, 2], [0, 1]]), ("b", [[1, 0], [2, 1]])], [[1, 0], [0, 1]], mat_mul, mat_inv, |m| m)?;
    let s3 = brute_force("s3", &[("s", [1, 0, 2]), ("r", [1, 2, 0])], [0, 1, 2], perm_mul, perm_inv, |p| p)?;
    let modular = brute_force(
        "z3_star_z2",
        &[("a", [[0, -1], [1, 1]]), ("b", [[0, -1], [1, 0]])],
        [[1, 0], [0, 1]],
        mat_mul,
        mat_inv,
        sign,
    )?;
    Ok(format!(
        "{} families x 1000 DAG pairs match naive search; {free} free, {s3} table, {modular} free-product words match their models",
        families.len()
    ))
}

// ---------------------------------------------------------------------------

fn main() {
    let mut failed = 0;
    let mut report = |id: &str, title: &str, budget: Duration, started: Instant, outcome: Outcome| {
        let took = started.elapsed();
        let outcome = outcome.and_then(|d| {
            if took <= budget {
                Ok(d)
            } else {
                Err(format!("took {took:.1?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(d) => println!("PASS {id} {title} ({took:.1?}): {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {id} {title} ({took:.1?}): {d}");
            }
        }
    };

    let t = Instant::now();
    report("C1", "tree suite", Duration::from_secs(60), t, criterion_tree());

    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    match suite_runs(dir.path()) {
        Ok(runs) => {
            let total: Duration = runs.iter().map(|r| r.elapsed).sum();
            let suite = |label: &str| format!("{label}, suite runs {total:.1?}");
            let t2 = Instant::now();
            report("C2", &suite("layer bound"), Duration::from_secs(600), t, criterion_layers(&runs));
            report("C3", &suite("stabilization"), Duration::from_secs(900), t, criterion_stabilization(&runs));
            report("C4", "translator comparisons", Duration::from_secs(900), t, criterion_translators(&runs));
            report("C5", "coding coherence", Duration::from_secs(900), t2, criterion_coding(&runs));
            let t = Instant::now();
            report("C8", "determinism", Duration::from_secs(900), t, criterion_determinism(dir.path(), &runs));
        }
        Err(err) => {
            for (id, title) in [
                ("C2", "layer bound"),
                ("C3", "stabilization"),
                ("C4", "translator comparisons"),
                ("C5", "coding coherence"),
                ("C8", "determinism"),
            ] {
                report(id, title, Duration::MAX, t, Err(err.clone()));
            }
        }
    }

    let t = Instant::now();
    report("C6", "order property", Duration::from_secs(600), t, criterion_order());
    let t = Instant::now();
    report("C7", "oracle equivalence", Duration::from_secs(1200), t, criterion_oracles());

    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
