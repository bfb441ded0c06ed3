mod commands;
mod curvefile;
mod failure;
mod plot;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use polycurve::variation::HessianMode;
use polycurve::TensionPath;

use commands::{CircleSpec, FlowArgs};
use failure::{CmdResult, Failure};

#[derive(Parser)]
#[command(name = "polycurve", version, about = "Discrete k-harmonic curves in space forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    General,
    Spaceform,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Jacobi,
    Fd,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the k-tension of a curve file.
    Residual {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "general")]
        path: PathArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a uniformly sampled latitude circle.
    Circle {
        /// Sectional curvature K of the target sphere.
        #[arg(long, default_value_t = 1.0)]
        curvature: f64,
        #[arg(long, conflicts_with = "family", required_unless_present = "family")]
        kappa: Option<f64>,
        /// Use the k-harmonic circle of this order.
        #[arg(long)]
        family: Option<usize>,
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the steepest-descent flow of E_k.
    Flow {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eta0: Option<f64>,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 200_000)]
        max_iters: usize,
        /// Final curve file.
        #[arg(long)]
        out: PathBuf,
        /// Trace CSV; defaults to the output path with a .csv extension.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Hessian spectrum with index and nullity.
    Spectrum {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "jacobi")]
        mode: ModeArg,
        /// Absolute zero tolerance; defaults to 1e-6 times the largest |eigenvalue|.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run self-check suites (or `all`).
    Verify {
        #[arg(required = true)]
        suites: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Render a curve file or flow trace as SVG.
    Plot {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> CmdResult<()> {
    match cli.command {
        Command::Residual { file, k, path, out } => {
            let path = match path {
                PathArg::General => TensionPath::General,
                PathArg::Spaceform => TensionPath::SpaceForm,
            };
            commands::residual(&file, k, path, out.as_deref())
        }
        Command::Circle { curvature, kappa, family, n, out } => {
            let spec = match (kappa, family) {
                (Some(x), None) => CircleSpec::Kappa(x),
                (None, Some(k)) => CircleSpec::Family(k),
                _ => return Err(Failure::usage("give exactly one of --kappa or --family")),
            };
            commands::circle(curvature, spec, n, out.as_deref())
        }
        Command::Flow { file, k, eta0, tol, max_iters, out, trace } => {
            commands::flow(FlowArgs { file: &file, k, eta0, tol, max_iters, out: &out, trace })
        }
        Command::Spectrum { file, k, mode, epsilon, out } => {
            let mode = match mode {
                ModeArg::Jacobi => HessianMode::Jacobi,
                ModeArg::Fd => HessianMode::Fd,
            };
            commands::spectrum(&file, k, mode, epsilon, out.as_deref())
        }
        Command::Verify { suites, seed } => {
            let rows = verify::run(&suites, seed)?;
            print!("{}", verify::render(&rows));
            if rows.iter().any(verify::Row::failed) {
                return Err(Failure::Numerical("one or more suites failed".into()));
            }
            Ok(())
        }
        Command::Plot { file, out } => plot::plot(&file, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
