//! `pbt`: command-line front end for pool generation, runs, delta metrics and
//! sweeps.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use pbt_core::catalog::{generate_pool, save_pool};
use pbt_core::engine::{delta_from_rows, read_run_csv, write_delta_csv, write_run_csv};
use pbt_core::experiments::{self, write_sensitivity_csv, write_sweep_csv};
use pbt_core::{Error, PolicyConfig, PoolSpec, RunConfig, SweepAxis, SweepSpec};

#[derive(Parser, Debug)]
#[command(name = "pbt", version, about = "Prompt bundle trading simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic product pool CSV.
    GeneratePool(PoolArgs),
    /// Run one policy and write its per-iteration CSV and JSON summary.
    Run(RunArgs),
    /// Cumulative profit gaps of an algorithm run against an optimal run.
    Delta(DeltaArgs),
    /// T, N or K sweep over all policies.
    Sweep(SweepArgs),
    /// Strategy or parameter sensitivity at a frozen iteration.
    Sensitivity(SweepArgs),
}

#[derive(Args, Debug)]
struct PoolArgs {
    /// Pool spec JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of categories.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Output CSV path.
    #[arg(long, default_value = "pool.csv")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RunOverrides {
    /// Config JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// One of greedy, random, eps_first, cucb, optimal.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long = "T")]
    t: Option<u64>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long = "M")]
    m: Option<usize>,
}

impl RunOverrides {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), Error> {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(name) = &self.policy {
            cfg.policy = PolicyConfig::from_name(name)?;
        }
        if let Some(t) = self.t {
            cfg.horizon = t;
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(m) = self.m {
            cfg.m = m;
        }
        Ok(())
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    overrides: RunOverrides,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DeltaArgs {
    /// Run CSV of the algorithm.
    #[arg(long)]
    alg: PathBuf,
    /// Run CSV of the optimal policy with the same seed.
    #[arg(long)]
    optimal: PathBuf,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    overrides: RunOverrides,
    /// T, N, K, SoC, SoP, SoS_i, gamma or a_i.
    #[arg(long)]
    axis: Option<String>,
    /// Comma-separated, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    fixed_iteration: Option<u64>,
    /// Target category of SoS_i and a_i sweeps.
    #[arg(long)]
    category: Option<usize>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_config(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))
}

fn load_run_config(overrides: &RunOverrides) -> Result<RunConfig, Error> {
    let mut cfg = match &overrides.config {
        Some(path) => serde_json::from_str(&read_config(path)?)?,
        None => RunConfig::default(),
    };
    overrides.apply(&mut cfg)?;
    cfg.validate()?;
    Ok(cfg)
}

fn load_sweep_spec(args: &SweepArgs) -> Result<SweepSpec, Error> {
    let axis_override = args
        .axis
        .as_deref()
        .map(|a| serde_json::from_value::<SweepAxis>(serde_json::Value::String(a.into())))
        .transpose()
        .map_err(|e| Error::Config(format!("bad --axis: {e}")))?;
    let mut spec = match (&args.overrides.config, axis_override) {
        (Some(path), _) => serde_json::from_str::<SweepSpec>(&read_config(path)?)?,
        (None, Some(axis)) => SweepSpec::new(axis, Vec::new(), RunConfig::default()),
        (None, None) => return Err(Error::Config("need --config or --axis".into())),
    };
    if let Some(axis) = axis_override {
        spec.axis = axis;
    }
    if let Some(values) = &args.values {
        spec.values = values.clone();
    }
    if let Some(seeds) = &args.seeds {
        spec.seeds = seeds.clone();
    }
    if let Some(it) = args.fixed_iteration {
        spec.fixed_iteration = it;
    }
    if let Some(id) = args.category {
        spec.category = Some(pbt_core::CategoryId(id));
    }
    args.overrides.apply(&mut spec.base)?;
    spec.validate()?;
    Ok(spec)
}

fn open_out(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_generate_pool(args: &PoolArgs) -> anyhow::Result<()> {
    let mut spec = match &args.config {
        Some(path) => serde_json::from_str(&read_config(path)?).map_err(Error::from)?,
        None => PoolSpec::default(),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(n) = args.n {
        spec.n_categories = n;
    }
    let pool = generate_pool(&spec)?;
    save_pool(&pool, &args.out)?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_run(args: &RunArgs) -> anyhow::Result<()> {
    let cfg = load_run_config(&args.overrides)?;
    let record = pbt_core::run(&cfg)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let name = cfg.policy.name();
    let csv_path = args.out.join(format!("{name}.csv"));
    write_run_csv(&record, BufWriter::new(File::create(&csv_path)?))?;
    let summary_path = args.out.join(format!("{name}.summary.json"));
    fs::write(
        &summary_path,
        serde_json::to_string_pretty(&record.summary())? + "\n",
    )?;
    if record.totals.infeasible_iterations > 0 {
        eprintln!(
            "warning: {} infeasible iterations",
            record.totals.infeasible_iterations
        );
    }
    eprintln!(
        "wrote {} and {}",
        csv_path.display(),
        summary_path.display()
    );
    Ok(())
}

fn cmd_delta(args: &DeltaArgs) -> anyhow::Result<()> {
    let read = |p: &Path| -> anyhow::Result<_> {
        let file = File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
        Ok(read_run_csv(BufReader::new(file))?)
    };
    let delta = delta_from_rows(&read(&args.alg)?, &read(&args.optimal)?)?;
    write_delta_csv(&delta, open_out(args.out.as_deref())?)?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<()> {
    let spec = load_sweep_spec(args)?;
    let rows = experiments::sweep(&spec)?;
    let failed = rows.iter().filter(|r| r.status != "ok").count();
    write_sweep_csv(&rows, open_out(args.out.as_deref())?)?;
    eprintln!("{} rows, {failed} failed", rows.len());
    Ok(())
}

fn cmd_sensitivity(args: &SweepArgs) -> anyhow::Result<()> {
    let spec = load_sweep_spec(args)?;
    let reports = experiments::sensitivity(&spec)?;
    write_sensitivity_csv(&reports, open_out(args.out.as_deref())?)?;
    let points: usize = reports.iter().map(|r| r.points.len()).sum();
    eprintln!("{points} points over {} seeds", reports.len());
    Ok(())
}

/// 1 for bad input, 2 for failures while executing.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::Config(_)
            | Error::Json(_)
            | Error::Domain(_)
            | Error::KeyMismatch(_)
            | Error::UnknownCategory(_)
            | Error::PoolNotFound(_),
        ) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::GeneratePool(a) => cmd_generate_pool(a),
        Command::Run(a) => cmd_run(a),
        Command::Delta(a) => cmd_delta(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Sensitivity(a) => cmd_sensitivity(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
