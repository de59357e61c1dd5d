//! lfsmlab command line: synthesize paths, extract bursts, fit tails, check
//! the kinetic equation, and run full (alpha, H) sweeps.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lfsmlab::bursts::{find_bursts, MIN_BURSTS};
use lfsmlab::harness::{self, SweepConfig};
use lfsmlab::kinetics::{kinetic_residual, PdfSpec, XGrid};
use lfsmlab::pathio;
use lfsmlab::synth::{synthesize_lfsm, LfsmSpec, SynthesisGrid};
use lfsmlab::tailfit;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "lfsmlab", version, about = "linear fractional stable motion laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a sample path and write it to a CSV or binary file
    Generate(GenerateArgs),
    /// Extract threshold bursts from a path file into a CSV table
    Bursts(BurstsArgs),
    /// Fit a power-law tail to a one-column sample file (JSON to stdout)
    Fit(FitArgs),
    /// Verify the kinetic equation numerically (JSON report to stdout)
    KineticsCheck(KineticsArgs),
    /// Run an (alpha, H) burst-scaling sweep
    Sweep(SweepArgs),
    /// Emit the data table behind one of the survey figures
    Figure(FigureArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    hurst: f64,
    /// number of increments (path has n+1 samples)
    #[arg(long, default_value_t = 65536)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// causal kernel coefficient
    #[arg(long, default_value_t = 1.0)]
    b1: f64,
    /// anticausal kernel coefficient
    #[arg(long, default_value_t = 0.0)]
    b2: f64,
    /// mesh: sub-steps per unit step
    #[arg(long, default_value_t = 64)]
    mesh: usize,
    /// kernel truncation in unit steps
    #[arg(long, default_value_t = 512)]
    trunc: usize,
    #[arg(long)]
    seed: u64,
    /// output file; .bin selects the binary format, anything else CSV
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BurstsArgs {
    /// path file written by `generate` (.bin or .csv)
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    threshold: f64,
    /// warn when fewer bursts than this are found
    #[arg(long, default_value_t = MIN_BURSTS)]
    min_bursts: usize,
    /// output CSV (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// one sample per line
    #[arg(long)]
    input: PathBuf,
    /// fixed lower cutoff; selected by KS minimization when omitted
    #[arg(long)]
    xmin: Option<f64>,
    /// tail-size floor for the cutoff scan
    #[arg(long, default_value_t = tailfit::DEFAULT_MIN_TAIL)]
    min_tail: usize,
}

#[derive(Args)]
struct KineticsArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    hurst: f64,
    /// width parameter sigma-bar of the characteristic function
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 20.0)]
    xmax: f64,
    #[arg(long, default_value_t = 1024)]
    nx: usize,
    /// central finite-difference step for the time derivative
    #[arg(long, default_value_t = 1e-4)]
    dtfd: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML config file with the SweepConfig schema (all keys optional)
    #[arg(long)]
    config: Option<PathBuf>,
    /// comma-separated alpha grid override
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// comma-separated hurst grid override
    #[arg(long, value_delimiter = ',')]
    hursts: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    /// path length (increments per trial)
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mesh: Option<usize>,
    /// output directory for sweep.csv, aggregates.csv, manifest.json
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct FigureArgs {
    /// directory holding a completed sweep
    #[arg(long)]
    dir: PathBuf,
    /// figure id, 1-11
    #[arg(long)]
    figure: u32,
    /// output CSV (default figureN.csv inside the sweep directory)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(a) => generate(a),
        Command::Bursts(a) => bursts(a),
        Command::Fit(a) => fit(a),
        Command::KineticsCheck(a) => kinetics_check(a),
        Command::Sweep(a) => sweep(a),
        Command::Figure(a) => figure(a),
    }
}

fn generate(a: GenerateArgs) -> Result<()> {
    let spec = LfsmSpec::with_kernel(a.hurst, a.alpha, a.b1, a.b2, a.scale)?;
    let grid = SynthesisGrid {
        n: a.n,
        mesh: a.mesh,
        truncation: a.trunc,
        dt: a.dt,
        seed: a.seed,
    };
    let path = synthesize_lfsm(&spec, &grid)?;
    pathio::write_path_file(&path, &a.out)
        .with_context(|| format!("writing {}", a.out.display()))?;
    eprintln!(
        "wrote {} samples (H={}, alpha={}, seed={}) to {}",
        path.values.len(),
        a.hurst,
        a.alpha,
        a.seed,
        a.out.display()
    );
    Ok(())
}

fn bursts(a: BurstsArgs) -> Result<()> {
    let path = pathio::read_path_file(&a.input)
        .with_context(|| format!("reading {}", a.input.display()))?;
    let ens = find_bursts(&path, a.threshold);
    if ens.len() < a.min_bursts {
        eprintln!(
            "warning: only {} bursts (threshold {}), below the floor of {}; \
             tail fits on this ensemble are low-confidence",
            ens.len(),
            a.threshold,
            a.min_bursts
        );
    }
    let mut w: csv::Writer<Box<dyn std::io::Write>> = match &a.out {
        Some(p) => csv::Writer::from_writer(Box::new(std::fs::File::create(p)?)),
        None => csv::Writer::from_writer(Box::new(std::io::stdout())),
    };
    w.write_record(["burst_id", "up_index", "down_index", "duration", "size"])?;
    for (i, b) in ens.bursts.iter().enumerate() {
        w.write_record([
            i.to_string(),
            b.up_index.to_string(),
            b.down_index.to_string(),
            b.duration.to_string(),
            b.size.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn fit(a: FitArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.input)
        .with_context(|| format!("reading {}", a.input.display()))?;
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .with_context(|| format!("line {} is not a number: {line:?}", i + 1))?;
        samples.push(v);
    }
    if samples.is_empty() {
        bail!("no samples in {}", a.input.display());
    }
    let fit = tailfit::fit_tail(&samples, a.xmin, a.min_tail)?;
    println!("{}", serde_json::to_string_pretty(&fit)?);
    Ok(())
}

fn kinetics_check(a: KineticsArgs) -> Result<()> {
    let spec = PdfSpec::new(a.alpha, a.hurst, a.sigma)?;
    let grid = XGrid::new(a.xmax, a.nx)?;
    let report = kinetic_residual(&spec, a.t, &grid, a.dtfd * a.t)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    let mut cfg: SweepConfig = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => SweepConfig::default(),
    };
    if let Some(v) = a.alphas {
        cfg.alphas = v;
    }
    if let Some(v) = a.hursts {
        cfg.hursts = v;
    }
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    if let Some(v) = a.n {
        cfg.path_length = v;
    }
    if let Some(v) = a.threshold {
        cfg.threshold = v;
    }
    if let Some(v) = a.seed {
        cfg.base_seed = v;
    }
    if let Some(v) = a.mesh {
        cfg.mesh = v;
    }
    let cells = cfg.alphas.len() * cfg.hursts.len() * cfg.trials;
    eprintln!(
        "sweep: {} alphas x {} hursts x {} trials = {cells} cells, n = {}",
        cfg.alphas.len(),
        cfg.hursts.len(),
        cfg.trials,
        cfg.path_length
    );
    let result = harness::run_sweep(&cfg)?;
    harness::write_outputs(&result, &a.out_dir)?;
    eprintln!("results in {}", a.out_dir.display());
    Ok(())
}

fn figure(a: FigureArgs) -> Result<()> {
    let result = harness::read_outputs(&a.dir)
        .with_context(|| format!("loading sweep from {}", a.dir.display()))?;
    let table = harness::figure_data(&result, a.figure)?;
    let out = a
        .out
        .unwrap_or_else(|| a.dir.join(format!("figure{}.csv", a.figure)));
    harness::write_figure_csv(&table, &out)?;
    eprintln!("figure {} data in {}", a.figure, out.display());
    Ok(())
}
