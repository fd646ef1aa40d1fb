use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand};

use speclab::harness::library::load;
use speclab::harness::suites::Context;
use speclab::harness::{describe, run_suite, sweep, write_csv, Functional, Options, Suite};
use speclab::moduli::{Coord, FD_EPS};

#[derive(Parser)]
#[command(name = "speclab", version, about = "Periods, kernels and variational formulas on spectral covers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print derived counts, branch points and the genericity report.
    Describe {
        /// Built-in label or path to an instance file.
        #[arg(long)]
        instance: String,
    },
    /// Run a verification suite and write a JSON report.
    Verify {
        #[arg(long)]
        instance: String,
        /// surface, dm-cubic, kernels, prime-form, tau, hessian, hierarchy, scaling or all.
        #[arg(long)]
        suite: String,
        /// Tolerance replacing that of every gating check.
        #[arg(long)]
        tol: Option<f64>,
        /// Relative finite-difference step.
        #[arg(long)]
        eps: Option<f64>,
        /// Report destination; stdout if absent.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Tabulate central differences against the residue formula over a list of steps.
    Sweep {
        #[arg(long)]
        instance: String,
        /// omega, omega:<α>:<β>, valpha:<α> or bidiff.
        #[arg(long)]
        functional: String,
        /// Coordinate name, e.g. A1 or C2.1.3.
        #[arg(long)]
        coord: String,
        /// Comma-separated absolute steps.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        eps_list: Vec<f64>,
        /// CSV destination; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Describe { instance } => {
            let spec = load(&instance)?;
            print!("{}", describe(&spec)?);
            Ok(true)
        }
        Cmd::Verify { instance, suite, tol, eps, report } => {
            let suite: Suite = suite.parse()?;
            let rep = run_suite(&instance, suite, Options { tol, eps })?;
            let json = rep.to_json();
            match report {
                Some(p) => std::fs::write(&p, json + "\n").with_context(|| format!("writing {}", p.display()))?,
                None => println!("{json}"),
            }
            let total = rep.checks.iter().filter(|c| c.gating).count();
            let failed = rep.failures().count();
            eprintln!("{} {}: {}/{} gating checks passed", rep.instance, rep.suite, total - failed, total);
            for c in rep.failures() {
                eprintln!("  FAIL {} (rel {:e}, tol {:e}){}", c.name, c.rel_err, c.tol, c.error.as_deref().map(|e| format!(": {e}")).unwrap_or_default());
            }
            Ok(rep.pass)
        }
        Cmd::Sweep { instance, functional, coord, eps_list, out } => {
            if eps_list.is_empty() {
                bail!("empty ε list");
            }
            let functional: Functional = functional.parse()?;
            let coord: Coord = coord.parse()?;
            let ctx = Context::new(load(&instance)?, FD_EPS)?;
            let rows = sweep(&ctx, functional, coord, &eps_list)?;
            match out {
                Some(p) => {
                    let f = std::fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
                    write_csv(&rows, f)?;
                }
                None => write_csv(&rows, std::io::stdout())?,
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
