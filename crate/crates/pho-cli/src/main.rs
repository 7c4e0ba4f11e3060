//! Command-line front end: verification suites, convergence tables, and
//! counterexample search for eigenvalue-sum bounds of the perturbed
//! harmonic oscillator.
//!
//! Exit status is 0 only when every emitted verdict passes; hypothesis
//! violations appear as `skipped` rows rather than silent omissions.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use config::{Format, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pho",
    version,
    about = "Eigenvalue-sum bound verification for the perturbed harmonic oscillator"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the bound sequences omega, chi, epsilon, tau
    Sequences(CommonArgs),
    /// Check every applicable eigenvalue-sum inequality for a potential
    Verify(CommonArgs),
    /// Track the regularized eigenvalue sum against its limiting value
    Trace(CommonArgs),
    /// Find a spike potential driving the regularized sum below -N
    Counterexample(CounterArgs),
    /// Run the polynomial identity and moment suite, print max residuals
    HermiteCheck(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Perturbation, e.g. "gauss(a=1,s=0.5)", "box(k=1,d=0.1)",
    /// "sech2(a=-0.2,s=1)", "meanzero(a=0.3)"
    #[arg(long)]
    potential: Option<String>,
    /// Largest index n in tables and checks
    #[arg(long = "n-max", default_value_t = 10)]
    n_max: usize,
    /// Comma-separated powers for the negative-power bounds
    #[arg(long = "s", default_value = "0.5,1,2", value_name = "LIST")]
    s_list: String,
    /// Galerkin basis-size override (disables adaptive doubling)
    #[arg(long = "basis-size")]
    basis_size: Option<usize>,
    /// Quadrature node-count override
    #[arg(long = "quad-nodes")]
    quad_nodes: Option<usize>,
    /// Verdict tolerance floor
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CounterArgs {
    /// Eigenvalue-sum index n
    #[arg(long)]
    n: usize,
    /// Severity: the regularized sum must reach -N
    #[arg(long = "N")]
    severity: f64,
    #[command(flatten)]
    common: CommonArgs,
}

fn parse_s_list(raw: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for piece in raw.split(',') {
        let trimmed = piece.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v: f64 = trimmed
            .parse()
            .map_err(|_| format!("bad power '{trimmed}' in --s list"))?;
        if !(v > 0.0) {
            return Err(format!("powers must be positive, got {v}"));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err("--s list is empty".to_string());
    }
    Ok(out)
}

fn build_config(command: &str, args: &CommonArgs) -> Result<RunConfig, String> {
    if !(args.tol > 0.0) {
        return Err(format!("--tol must be positive, got {}", args.tol));
    }
    let mut cfg = RunConfig::new(command);
    cfg.potential = args.potential.clone();
    cfg.n_max = args.n_max;
    cfg.s_values = parse_s_list(&args.s_list)?;
    cfg.basis_size = args.basis_size;
    cfg.quad_nodes = args.quad_nodes;
    cfg.tol = args.tol;
    cfg.format = args.format;
    Ok(cfg)
}

fn emit(args: &CommonArgs, text: &str) -> std::io::Result<()> {
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common): (&str, &CommonArgs) = match &cli.command {
        Cmd::Sequences(a) => ("sequences", a),
        Cmd::Verify(a) => ("verify", a),
        Cmd::Trace(a) => ("trace", a),
        Cmd::Counterexample(a) => ("counterexample", &a.common),
        Cmd::HermiteCheck(a) => ("hermite-check", a),
    };
    let cfg = match build_config(name, common) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Cmd::Sequences(_) => commands::sequences(&cfg),
        Cmd::Verify(_) => commands::verify(&cfg),
        Cmd::Trace(_) => commands::trace(&cfg),
        Cmd::Counterexample(a) => commands::counterexample(&cfg, a.n, a.severity),
        Cmd::HermiteCheck(_) => commands::hermite_check(&cfg),
    };
    match result {
        Ok(rendered) => {
            if let Err(e) = emit(common, &rendered.text) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if rendered.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(pho::Error::Parse(msg)) | Err(pho::Error::InvalidPotential(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
