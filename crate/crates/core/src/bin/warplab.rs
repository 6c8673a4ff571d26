//! Command-line front end: runs scenario files and writes JSON reports and CSV tables.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use warplab::report::VerificationReport;
use warplab::runner::{convergence_table, run, RunOptions};
use warplab::scenario::{Scenario, Suite};
use warplab::LabError;

#[derive(Parser)]
#[command(name = "warplab", version, about = "Verify warped-product curvature, intersection and spectral identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Write the JSON report here; CSV tables go next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "tolerance-scale", default_value_t = 1.0)]
    tolerance_scale: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check the scenario declares.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        refine: Option<usize>,
    },
    /// Print the convergence table of every refined check.
    Refine {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        refine: usize,
    },
    /// Both sides of the horizontal Ricci integral identity.
    #[command(name = "verify-theorem1")]
    VerifyTheorem1 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        refine: Option<usize>,
    },
    /// Intersection checks on a rotation hypersurface; prints `t0,phi,slice_form_norm`.
    Intersections {
        #[command(flatten)]
        common: Common,
    },
    /// Discrete slice spectra and the first-eigenvalue bound.
    Spectral {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        refine: Option<usize>,
    },
    /// Reilly ledger and eigenvalue bounds on a rotational domain.
    Reilly {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        refine: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Lab(LabError),
    Io(String),
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        Failure::Lab(e)
    }
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "report".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.{suffix}"))
}

/// Where the primary output of a subcommand goes when there is no `--out`.
enum Stdout {
    Json,
    Intersections,
    Convergence,
}

fn execute(common: &Common, opts: RunOptions, stdout: Stdout) -> Result<VerificationReport, Failure> {
    let text = fs::read_to_string(&common.scenario)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", common.scenario.display())))?;
    let scenario = Scenario::parse(&text)?;
    let report = run(&scenario, &text, &opts)?;

    let table = {
        let mut s = String::from("check,resolution,value,order\n");
        for (id, res, val, order) in convergence_table(&report) {
            s.push_str(&format!("{id},{res},{val},{}\n", order.map_or(String::new(), |o| o.to_string())));
        }
        s
    };
    match &common.out {
        Some(out) => {
            write(out, &report.to_json())?;
            write(&sibling(out, "refinement.csv"), &report.refinement_csv())?;
            write(&sibling(out, "summary.csv"), &report.summary_csv())?;
            if !report.intersection_rows.is_empty() {
                write(&sibling(out, "intersections.csv"), &report.intersection_csv())?;
            }
            if matches!(stdout, Stdout::Convergence) {
                write(&sibling(out, "convergence.csv"), &table)?;
            }
        }
        None => match stdout {
            Stdout::Json => print!("{}", report.to_json()),
            Stdout::Intersections => print!("{}", report.intersection_csv()),
            Stdout::Convergence => print!("{table}"),
        },
    }
    for c in report.failed() {
        eprintln!("FAIL {}: residual {:e} > tolerance {:e}", c.id, c.residual, c.tolerance);
    }
    Ok(report)
}

fn options(common: &Common, refine: Option<usize>, suite: Option<Suite>) -> RunOptions {
    RunOptions { seed: common.seed, refine, tolerance_scale: common.tolerance_scale, nodes: None, suite }
}

fn dispatch(cli: Cli) -> Result<VerificationReport, Failure> {
    match cli.command {
        Command::Run { common, refine } => execute(&common, options(&common, refine, None), Stdout::Json),
        Command::Refine { common, refine } => {
            if refine < 2 {
                return Err(Failure::Usage(format!("--refine must be at least 2, got {refine}")));
            }
            execute(&common, options(&common, Some(refine), None), Stdout::Convergence)
        }
        Command::VerifyTheorem1 { common, nodes, refine } => {
            let mut opts = options(&common, refine, Some(Suite::Theorem1));
            opts.nodes = nodes;
            execute(&common, opts, Stdout::Json)
        }
        Command::Intersections { common } => {
            execute(&common, options(&common, None, Some(Suite::Intersections)), Stdout::Intersections)
        }
        Command::Spectral { common, refine } => {
            execute(&common, options(&common, refine, Some(Suite::Spectral)), Stdout::Json)
        }
        Command::Reilly { common, refine } => execute(&common, options(&common, refine, Some(Suite::Reilly)), Stdout::Json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(report) if report.pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Lab(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
