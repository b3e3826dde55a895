use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use relhyp::bundles::BundleParams;
use relhyp::geodesics::DirectionSpec;
use relhyp::groups::{validate_presentation, Group, GroupSpec};
use relhyp::hyperbolicity::estimate_nu;
use relhyp::relgraph::{BallCache, Metric, RelGraph};
use relhyp::report::{self, Format, RunConfig};
use relhyp::{Error, Result};

#[derive(Parser)]
#[command(name = "relhyp", version, about = "Geodesic ray bundles in relative Cayley graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Group spec (JSON); overrides the one named in the config.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Truncation depth R.
    #[arg(long, global = true)]
    radius: Option<usize>,
    /// Horofunction window radius.
    #[arg(long, global = true)]
    window: Option<usize>,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[arg(long, global = true, env = "RELHYP_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Output directory; explore prints to stdout without it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    format: Vec<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured verification suites.
    Verify,
    /// Export a single object as DOT, JSON or CSV.
    Explore {
        #[command(subcommand)]
        what: Explore,
    },
    /// Summarise the reports in a run directory.
    Report { run_dir: PathBuf },
    /// Check a group spec and print its presentation report.
    ValidateSpec,
}

#[derive(Subcommand)]
enum Explore {
    Ball {
        center: String,
        radius: usize,
        #[arg(long)]
        absolute: bool,
    },
    Dag {
        from: String,
        to: String,
        #[arg(long)]
        absolute: bool,
    },
    Bundle { base: String, direction: String },
    Geo1 { base: String, direction: String },
}

fn load_config(opts: &Opts) -> Result<RunConfig> {
    let mut cfg = match &opts.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = &opts.spec {
        cfg.spec = std::path::absolute(s)?;
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(r) = opts.radius {
        cfg.radius = r;
    }
    if opts.window.is_some() {
        cfg.window = opts.window;
    }
    if opts.cache_dir.is_some() {
        cfg.cache_dir = opts.cache_dir.clone();
    }
    if opts.out.is_some() {
        cfg.out = opts.out.clone();
    }
    if !opts.format.is_empty() {
        cfg.formats = opts.format.clone();
    }
    if cfg.spec.as_os_str().is_empty() {
        return Err(Error::Config("no spec given (use --spec or --config)".into()));
    }
    Ok(cfg)
}

fn params(graph: &RelGraph, cfg: &RunConfig) -> Result<BundleParams> {
    let nu = estimate_nu(graph, &cfg.slimness_config())?.nu_hat();
    let mut p = BundleParams::from_nu(graph, nu)?;
    if let Some(w) = cfg.window {
        p.window_radius = w;
    }
    if let Some(m) = cfg.margin {
        p.margin = m;
    }
    Ok(p)
}

fn run(cli: Cli) -> Result<u8> {
    let opts = &cli.opts;
    match cli.command {
        Command::Verify => {
            let cfg = load_config(opts)?;
            let rep = report::cmd_verify(&cfg, opts.jobs)?;
            let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
            let files = rep.artifacts(cfg.formats.contains(&Format::Json), cfg.formats.contains(&Format::Csv));
            report::write_artifacts(&out, &files)?;
            eprintln!(
                "{}: nu {} B {} K {}; {} pass, {} fail, {} flagged, {} approximate -> {}",
                rep.name,
                rep.constants.nu_hat,
                rep.constants.b_hat,
                rep.constants.k_hat,
                rep.counts.pass,
                rep.counts.fail,
                rep.counts.flagged,
                rep.counts.approximate,
                out.display()
            );
            Ok(rep.exit_code() as u8)
        }
        Command::Explore { what } => {
            let cfg = load_config(opts)?;
            let graph = cfg.graph()?;
            let g = graph.group();
            let metric = |abs: bool| if abs { Metric::Absolute } else { Metric::Relative };
            let artifact = match what {
                Explore::Ball { center, radius, absolute } => {
                    let cache = cfg.cache_dir.as_ref().map(BallCache::new);
                    report::explore_ball(&graph, &g.reduce(&center)?, radius, metric(absolute), cache.as_ref())?
                }
                Explore::Dag { from, to, absolute } => {
                    report::explore_dag(&graph, &g.reduce(&from)?, &g.reduce(&to)?, metric(absolute))?
                }
                Explore::Bundle { base, direction } => report::explore_bundle(
                    &graph,
                    &g.reduce(&base)?,
                    &DirectionSpec::parse(&graph, &direction)?,
                    cfg.radius,
                    &params(&graph, &cfg)?,
                )?,
                Explore::Geo1 { base, direction } => report::explore_geo1(
                    &graph,
                    &g.reduce(&base)?,
                    &DirectionSpec::parse(&graph, &direction)?,
                    cfg.radius,
                    &params(&graph, &cfg)?,
                )?,
            };
            let formats = if opts.format.is_empty() { vec![Format::Json] } else { opts.format.clone() };
            let mut files = Vec::new();
            for f in formats {
                let body = artifact
                    .render(f)
                    .ok_or_else(|| Error::Config(format!("{} has no {f:?} form", artifact.stem)))?;
                files.push((artifact.file_name(f), body.to_string()));
            }
            match &opts.out {
                Some(dir) => report::write_artifacts(dir, &files)?,
                None => files.iter().for_each(|(_, b)| print!("{b}")),
            }
            Ok(0)
        }
        Command::Report { run_dir } => {
            let files = report::cmd_report(&run_dir)?;
            let out = opts.out.clone().unwrap_or(run_dir);
            report::write_artifacts(&out, &files)?;
            eprintln!("wrote summary.md to {}", out.display());
            Ok(0)
        }
        Command::ValidateSpec => {
            let path = match (&opts.spec, &opts.config) {
                (Some(p), _) => p.clone(),
                (None, Some(_)) => load_config(opts)?.spec_path(),
                (None, None) => return Err(Error::Config("--spec is required".into())),
            };
            let spec = GroupSpec::load(&path)?;
            let rep = validate_presentation(&spec)?;
            let group = Group::new(spec)?;
            for i in 0..group.parabolic_count() {
                if !group.parabolic_is_finite(i)? {
                    eprintln!("note: parabolic {i} is infinite; graphs need truncated mode");
                }
            }
            println!("{}", serde_json::to_string_pretty(&rep)?);
            Ok(if rep.passes || rep.skipped { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
