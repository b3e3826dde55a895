use std::path::{Path, PathBuf};

use serde_json::Value;

use super::verify::csv_field;
use crate::error::{Error, Result};

/// `report.json` in `dir` itself, else one per immediate subdirectory.
pub fn find_reports(dir: &Path) -> Result<Vec<PathBuf>> {
    let direct = dir.join("report.json");
    if direct.is_file() {
        return Ok(vec![direct]);
    }
    if !dir.is_dir() {
        return Err(Error::MissingArtifact(dir.display().to_string()));
    }
    let mut found = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let p = entry?.path().join("report.json");
        if p.is_file() {
            found.push(p);
        }
    }
    if found.is_empty() {
        return Err(Error::MissingArtifact(direct.display().to_string()));
    }
    found.sort();
    Ok(found)
}

fn s(v: &Value) -> String {
    match v {
        Value::String(x) => x.clone(),
        other => other.to_string(),
    }
}

/// Aggregate the reports under `dir` into `summary.md` and the size-vs-R
/// table `symdiff_vs_r.csv`. Output depends only on report contents.
pub fn cmd_report(dir: &Path) -> Result<Vec<(String, String)>> {
    let mut reports = Vec::new();
    for p in find_reports(dir)? {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&p)?)?;
        reports.push(v);
    }
    reports.sort_by_key(|r| (s(&r["name"]), s(&r["config_hash"])));

    let mut md = String::from("# Verification summary\n");
    let mut csv = String::from("run,x,y,direction,depth,size\n");
    for r in &reports {
        let c = &r["constants"];
        let n = &r["counts"];
        md.push_str(&format!(
            "\n## {}\n\nGroup `{}` (spec {}, config {}, seed {}, toolkit {}).\n\n",
            s(&r["name"]),
            s(&r["spec_name"]),
            s(&r["spec_hash"]),
            s(&r["config_hash"]),
            s(&r["seed"]),
            s(&r["toolkit_version"]),
        ));
        md.push_str("| constant | value | source |\n|---|---|---|\n");
        for (k, src) in [
            ("nu_relative", "estimate_nu"),
            ("nu_absolute", "estimate_nu"),
            ("nu_hat", "estimate_nu"),
            ("b_hat", "bound_b(nu_hat)"),
            ("k_hat", "bound_k(nu_hat, b_hat)"),
            ("triangles", "estimate_nu"),
        ] {
            md.push_str(&format!("| {k} | {} | {src} |\n", s(&c[k])));
        }
        md.push_str(&format!(
            "\nChecks: {} pass, {} fail, {} flagged, {} approximate.\n",
            s(&n["pass"]),
            s(&n["fail"]),
            s(&n["flagged"]),
            s(&n["approximate"])
        ));
        let notable: Vec<&Value> = r["checks"]
            .as_array()
            .into_iter()
            .flatten()
            .filter(|c| c["verdict"] != "pass")
            .collect();
        if !notable.is_empty() {
            md.push_str("\n| check | verdict | detail |\n|---|---|---|\n");
            for c in notable {
                md.push_str(&format!("| {} | {} | {} |\n", s(&c["id"]), s(&c["verdict"]), s(&c["detail"])));
            }
        }
        for scan in r["stabilization"].as_array().into_iter().flatten() {
            for row in scan["rows"].as_array().into_iter().flatten() {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    csv_field(&s(&r["name"])),
                    csv_field(&s(&scan["x"])),
                    csv_field(&s(&scan["y"])),
                    csv_field(&s(&scan["direction"])),
                    s(&row["depth"]),
                    s(&row["size"])
                ));
            }
        }
    }
    Ok(vec![("summary.md".into(), md), ("symdiff_vs_r.csv".into(), csv)])
}
