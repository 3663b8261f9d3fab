use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use mimo_cc_lab::dof::{dof_at, dof_max, dof_quick, DofSolution};
use mimo_cc_lab::harness::{rate_curve_with, ConfigFile, Execution};
use mimo_cc_lab::scheme::{build_placement, build_schedule, verify_decodability, SystemParams};

#[derive(Parser)]
#[command(name = "mimo-cc-lab", version, about = "Cache-aided MIMO coded caching toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Degrees-of-freedom table over the served-user count.
    Dof {
        #[arg(long = "L")]
        l: usize,
        #[arg(long = "G")]
        g: usize,
        #[arg(long)]
        t: usize,
        /// Pin the served-user count instead of searching.
        #[arg(long)]
        omega: Option<usize>,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Build a delivery schedule and check that every user decodes its file.
    VerifyScheme {
        #[arg(long = "K")]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        omega: usize,
        /// Transmit multiplexing gain; defaults to omega - t, the smallest admissible.
        #[arg(long = "L")]
        l: Option<usize>,
        /// Comma-separated file index per user; defaults to all-distinct demands.
        #[arg(long, value_delimiter = ',')]
        demand: Option<Vec<usize>>,
        /// Write the schedule as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Monte Carlo symmetric-rate curve over an SNR grid, written as CSV.
    RateCurve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run trials on the calling thread only.
        #[arg(long)]
        sequential: bool,
    },
}

fn print_dof(sol: &DofSolution, quick: usize) {
    println!("{:>6} {:>10} {:>6}", "omega", "beta_bound", "dof");
    for r in &sol.beta_bound_trace {
        println!("{:>6} {:>10} {:>6}", r.omega, r.beta_bound, r.dof);
    }
    println!("optimum: omega = {}, beta = {}, DoF = {}", sol.omega_star, sol.beta_star, sol.dof);
    println!("quick metric (beta = G): {quick}");
}

fn run(cli: Cli) -> mimo_cc_lab::Result<bool> {
    match cli.command {
        Command::Dof { l, g, t, omega, json } => {
            let sol = match omega {
                Some(o) => dof_at(l, g, t, o)?,
                None => dof_max(l, g, t)?,
            };
            let quick = dof_quick(l, g, t)?;
            if json {
                let v = json!({"L": l, "G": g, "t": t, "solution": sol, "dof_quick": quick});
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                print_dof(&sol, quick);
            }
            Ok(true)
        }
        Command::VerifyScheme { k, t, omega, l, demand, json } => {
            let l = l.unwrap_or(omega.saturating_sub(t).max(1));
            let params = SystemParams::new(k, l, 1, t, 1.0, 1.0)?;
            let schedule = build_schedule(&params, omega)?;
            let placement = build_placement(k, t)?;
            let demand = demand.unwrap_or_else(|| (0..k).collect());
            let report = verify_decodability(&schedule, &placement, &demand);
            println!(
                "K = {k}, t = {t}, omega = {omega}: theta = {}, {} transmissions x {} codewords",
                schedule.theta,
                schedule.transmissions.len(),
                schedule.transmissions.first().map_or(0, |tx| tx.codewords.len())
            );
            for (u, rec) in report.recovered.iter().enumerate() {
                println!("user {u}: {} subpackets recovered", rec.len());
            }
            match &report.failure {
                None => println!("PASS"),
                Some(f) => println!("FAIL: {f}"),
            }
            if let Some(path) = json {
                std::fs::write(&path, serde_json::to_string_pretty(&schedule.to_json())?)?;
            }
            Ok(report.passed)
        }
        Command::RateCurve { config, out, sequential } => {
            let cfg = ConfigFile::load(&config)?.into_experiment()?;
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let curve = rate_curve_with(&cfg, exec)?;
            std::fs::write(&out, curve.to_csv())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
