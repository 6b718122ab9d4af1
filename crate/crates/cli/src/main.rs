use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hajlasz_cli::output::{render, write_atomic, Format};
use hajlasz_cli::run::{run_all, Command, Settings, DEFAULT_SEED, DEFAULT_TOL};
use hajlasz_cli::scenario::{load_scenarios, Loaded};
use hajlasz_cli::spacefile::space_to_string;
use hajlasz_core::generators::GeneratorSpec;

/// Variable-exponent Hajłasz–Sobolev computations on finite metric measure spaces.
///
/// Exit status: 0 when every applicable check passes, 1 when some check
/// fails, 2 on malformed input or any other error.
#[derive(Parser, Debug)]
#[command(name = "hajlasz", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate a space file.
    SpaceGen(SpaceGen),
    /// Luxemburg norm of the scenario function.
    Norm(Batch),
    /// Minimal Hajłasz gradient of the scenario function.
    Gradient(Batch),
    /// Embedding theorem checks.
    Verify(Batch),
    /// Necessity experiments.
    Necessity(Batch),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Grid1d,
    Grid2d,
    BallGridWithAtom,
    Cantor,
    TwoZoneGlued,
}

#[derive(Args, Debug)]
struct SpaceGen {
    kind: Kind,
    /// grid1d: number of points.
    #[arg(long)]
    n: Option<usize>,
    /// grid1d, grid2d: cell width.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    /// ball_grid_with_atom: dimension (1 to 3).
    #[arg(long)]
    dim: Option<usize>,
    /// ball_grid_with_atom: cells per unit length; two_zone_glued: grid side.
    #[arg(long)]
    m: Option<usize>,
    /// ball_grid_with_atom: mass of the atom at the origin.
    #[arg(long, default_value_t = 1.0)]
    atom: f64,
    /// cantor: construction level.
    #[arg(long)]
    level: Option<u32>,
    /// cantor: contraction ratio.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    ratio: f64,
    /// two_zone_glued: refinement of the glued zone.
    #[arg(long)]
    k: Option<usize>,
    /// Output file; defaults to DIR/space.json with --out, else stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Batch {
    /// Scenario files, each holding one scenario or an array of them.
    #[arg(required = true)]
    scenarios: Vec<PathBuf>,
    /// Solver tolerance, used when a scenario sets none.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed for random functions that carry no seed.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Ball enlargement factor of the local theorems, used when a scenario sets none [default: 2].
    #[arg(long)]
    sigma: Option<f64>,
    /// Resolution of the uniform perfectness check [default: twice the minimal distance].
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Write the report to DIR/<command>.<format> instead of stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

fn need<T>(v: Option<T>, flag: &str, kind: &str) -> Result<T> {
    match v {
        Some(v) => Ok(v),
        None => bail!("{kind} needs --{flag}"),
    }
}

fn space_gen(a: &SpaceGen) -> Result<()> {
    let spec = match a.kind {
        Kind::Grid1d => GeneratorSpec::Grid1d { n: need(a.n, "n", "grid1d")?, h: need(a.h, "h", "grid1d")? },
        Kind::Grid2d => GeneratorSpec::Grid2d {
            nx: need(a.nx, "nx", "grid2d")?,
            ny: need(a.ny, "ny", "grid2d")?,
            h: need(a.h, "h", "grid2d")?,
        },
        Kind::BallGridWithAtom => GeneratorSpec::BallGridWithAtom {
            dim: need(a.dim, "dim", "ball_grid_with_atom")?,
            m: need(a.m, "m", "ball_grid_with_atom")?,
            atom: a.atom,
        },
        Kind::Cantor => GeneratorSpec::Cantor { level: need(a.level, "level", "cantor")?, ratio: a.ratio },
        Kind::TwoZoneGlued => GeneratorSpec::TwoZoneGlued { m: need(a.m, "m", "two_zone_glued")?, k: need(a.k, "k", "two_zone_glued")? },
    };
    let text = space_to_string(&spec.build()?)?;
    match (&a.output, &a.out) {
        (Some(path), _) => write_atomic(path, &text),
        (None, Some(dir)) => write_atomic(&dir.join("space.json"), &text),
        (None, None) => {
            print!("{text}");
            Ok(())
        }
    }
}

fn batch(cmd: Command, a: &Batch) -> Result<bool> {
    let mut scenarios: Vec<Loaded> = Vec::new();
    for path in &a.scenarios {
        scenarios.extend(load_scenarios(path)?);
    }
    let settings = Settings { tol: Some(a.tol), seed: Some(a.seed), sigma: a.sigma, epsilon: a.epsilon };
    let items = run_all(cmd, &scenarios, settings, a.jobs)?;
    let (format, ext) = match a.format {
        FormatArg::Json => (Format::Json, "json"),
        FormatArg::Csv => (Format::Csv, "csv"),
    };
    let text = render(&items, format)?;
    match &a.out {
        Some(dir) => write_atomic(&dir.join(format!("{}.{ext}", cmd.name())), &text)?,
        None => print!("{text}"),
    }
    Ok(items.iter().all(|i| i.ok()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Cmd::SpaceGen(a) => space_gen(a).map(|_| true),
        Cmd::Norm(a) => batch(Command::Norm, a),
        Cmd::Gradient(a) => batch(Command::Gradient, a),
        Cmd::Verify(a) => batch(Command::Verify, a),
        Cmd::Necessity(a) => batch(Command::Necessity, a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
