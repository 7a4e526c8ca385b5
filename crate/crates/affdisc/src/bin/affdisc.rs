use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use affdisc::experiment::{self, ExperimentConfig, ExperimentError, Gate};

/// Convex-body Fourier decay, semi-chord limits and affine quadratic discrepancy scans.
///
/// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
/// 4 acceptance-gate failure (with --assert).
#[derive(Parser)]
#[command(name = "affdisc", version)]
struct Cli {
    /// TOML file with flat `key = value` settings; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Check the result against --expect/--tolerance and exit with 4 on failure
    #[arg(long = "assert", global = true)]
    assert_gate: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// JSON report: perimeter, area, L, S, angular points, trace components, psi
    BodyInfo(Args),
    /// Point set as CSV (`# structure=…` header, then x,y)
    Points(Args),
    /// CSV columns: rho, value, error, wall_time, failure; slope fits in JSON mode
    FourierDecay(Args),
    /// CSV columns: lambda, average, target, gap
    Semichord(Args),
    /// CSV columns: param, n, d2, tail, r, frequencies, mc_value, mc_stderr, wall_time, failure
    DiscrepancyScan(Args),
    /// Log-log fit of two columns of a CSV file
    ExponentFit(Args),
}

#[derive(clap::Args)]
struct Args {
    #[command(flatten)]
    cfg: ExperimentConfig,
}

fn emit(cfg: &ExperimentConfig, text: &str) -> Result<(), ExperimentError> {
    match &cfg.output {
        Some(p) => std::fs::write(p, text).map_err(|e| ExperimentError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| ExperimentError::Io(e.to_string())),
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn run(cli: Cli) -> Result<(Option<Gate>, usize), ExperimentError> {
    let (kind, args) = match cli.cmd {
        Cmd::BodyInfo(a) => ("body-info", a),
        Cmd::Points(a) => ("points", a),
        Cmd::FourierDecay(a) => ("fourier-decay", a),
        Cmd::Semichord(a) => ("semichord", a),
        Cmd::DiscrepancyScan(a) => ("discrepancy-scan", a),
        Cmd::ExponentFit(a) => ("exponent-fit", a),
    };
    let base = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let cfg = base.merged(args.cfg);
    let as_json = cfg.wants_json()?;
    let gate = cli.assert_gate;
    match kind {
        "body-info" => {
            emit(&cfg, &json(&experiment::body_info(&cfg.body()?)))?;
            Ok((None, 0))
        }
        "points" => {
            emit(&cfg, &experiment::make_points(&cfg)?.to_csv())?;
            Ok((None, 0))
        }
        "fourier-decay" => {
            let r = experiment::fourier_decay(&cfg, gate)?;
            emit(&cfg, &if as_json { json(&r) } else { r.to_csv() })?;
            if !as_json {
                report_fit(&r.fit);
            }
            Ok((r.gate, r.failed_rows()))
        }
        "semichord" => {
            let r = experiment::semichord(&cfg, gate)?;
            emit(&cfg, &if as_json { json(&r) } else { r.to_csv() })?;
            eprintln!("final relative gap {:.3e}", r.final_gap);
            Ok((r.gate, 0))
        }
        "discrepancy-scan" => {
            let r = experiment::discrepancy_scan(&cfg, gate)?;
            emit(&cfg, &if as_json { json(&r) } else { r.to_csv() })?;
            if !as_json {
                report_fit(&r.fit);
            }
            Ok((r.gate, r.failed_rows()))
        }
        _ => {
            let r = experiment::exponent_fit(&cfg, gate)?;
            emit(&cfg, &json(&r))?;
            Ok((r.gate, 0))
        }
    }
}

fn report_fit(f: &experiment::FitReport) {
    for (name, fit) in [("upper half", f.upper), ("full range", f.full)] {
        if let Some(fit) = fit {
            eprintln!("{name}: slope {:.4} ± {:.4} over {} points", fit.slope, fit.stderr, fit.points);
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok((gate, failed)) => {
            if let Some(g) = gate {
                eprintln!(
                    "gate: measured {:.4}, expected {:.4} ± {:.4}: {}",
                    g.measured,
                    g.expect,
                    g.tolerance,
                    if g.pass { "pass" } else { "FAIL" }
                );
                if !g.pass {
                    return ExitCode::from(4);
                }
            }
            if failed > 0 {
                eprintln!("{failed} row(s) failed");
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
