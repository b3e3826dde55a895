//! Run configuration, verification suites, exploration exports and
//! run-directory summaries behind the command-line tool.

mod config;
mod explore;
mod summary;
mod verify;

use std::path::Path;

pub use config::{Caps, CodingSettings, Format, RunConfig, SlimnessSettings, Suite, CONFIG_FORMAT_VERSION};
pub use explore::{explore_ball, explore_bundle, explore_dag, explore_geo1, Artifact};
pub use summary::{cmd_report, find_reports};
pub use verify::{
    cmd_verify, label_equivariance, Check, Constants, Counts, LayerRow, PairComparison, SuiteReport, Verdict,
    REPORT_FORMAT_VERSION,
};

use crate::error::Result;

/// Write `(name, contents)` pairs into `dir`, creating it.
pub fn write_artifacts(dir: &Path, files: &[(String, String)]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, body) in files {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}
