//! Run the Z3*Z2 verification suite from its config and print the verdicts
//! that are not a plain pass.

use relhyp::report::{cmd_verify, RunConfig, Verdict};

fn main() -> relhyp::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/z3z2.json");
    let cfg = RunConfig::load(path)?;
    let report = cmd_verify(&cfg, 4)?;
    let c = &report.constants;
    println!("nu = {}, B = {}, K = {}", c.nu_hat, c.b_hat, c.k_hat);
    println!(
        "{} pass, {} fail, {} flagged, {} approximate (exit code {})",
        report.counts.pass,
        report.counts.fail,
        report.counts.flagged,
        report.counts.approximate,
        report.exit_code()
    );
    for check in report.checks.iter().filter(|c| c.verdict != Verdict::Pass) {
        println!("{:?} {}: {}", check.verdict, check.id, check.detail);
    }
    Ok(())
}
