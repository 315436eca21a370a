use std::path::{Path, PathBuf};
use std::process::ExitCode;

use circrisk_cli::bench::bench;
use circrisk_cli::{
    init_threads, run_scenario, validate, CliError, CliResult, Run, Scenario, CASES,
};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "circrisk",
    version,
    about = "Severity-weighted collision risk between two vehicles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate risk and collision probability over a scenario's time span.
    Estimate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare estimates with Monte Carlo references at shifted times.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            default_value = "0"
        )]
        times: Vec<f64>,
    },
    /// Time initialization and per-call estimation.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        circles: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        init_trials: usize,
        #[arg(long, default_value_t = 10_000)]
        est_trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the five built-in cases and write one CSV each.
    Cases {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn report(name: &str, run: &Run, out: &Path) {
    match run.series.peak() {
        Some(p) => println!(
            "{name}: peak risk {:.4e} at t = {:.2} s (poc {:.4}), init {:.1} ms, wrote {}",
            p.risk,
            p.t,
            p.poc,
            run.init_time.as_secs_f64() * 1e3,
            out.display()
        ),
        None => println!("{name}: empty time series"),
    }
    if run.contact.is_none() {
        println!("{name}: mean footprints never touch, times are unshifted");
    }
}

fn execute(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Estimate { scenario, out } => {
            let s = Scenario::load(&scenario)?;
            let run = run_scenario(&s)?;
            run.series.write_csv(&out)?;
            report(&s.name, &run, &out);
        }
        Command::Validate {
            scenario,
            samples,
            seed,
            times,
        } => {
            let s = Scenario::load(&scenario)?;
            let checks = validate(&s, samples, seed, &times)?;
            println!(
                "{:>8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}  over  agree",
                "t", "poc", "circ_poc", "se", "rect_poc", "se", "risk", "circ_risk", "se",
                "rect_risk", "se"
            );
            for c in &checks {
                println!(
                    "{:>8.3} {:>12.5e} {:>12.5e} {:>12.2e} {:>12.5e} {:>12.2e} {:>12.5e} {:>12.5e} {:>12.2e} {:>12.5e} {:>12.2e}  {:<4}  {}",
                    c.t, c.poc, c.circ_poc.mean, c.circ_poc.std_error, c.rect_poc.mean,
                    c.rect_poc.std_error, c.risk, c.circ_risk.mean, c.circ_risk.std_error,
                    c.rect_risk.mean, c.rect_risk.std_error,
                    if c.over_ok() { "PASS" } else { "FAIL" },
                    if c.agree_ok() { "PASS" } else { "FAIL" },
                );
            }
            let failed = checks
                .iter()
                .filter(|c| !(c.over_ok() && c.agree_ok()))
                .count();
            if failed > 0 {
                return Err(CliError::Validation(format!(
                    "{failed} of {} time points failed",
                    checks.len()
                )));
            }
        }
        Command::Bench {
            circles,
            init_trials,
            est_trials,
            seed,
        } => {
            println!("n_circles,init_ms,risk_ms,poc_ms,poc_minus_risk_ms");
            for r in bench(&circles, init_trials, est_trials, seed)? {
                println!(
                    "{},{:.3},{:.5},{:.5},{:.5}",
                    r.n_circles, r.init_ms, r.risk_ms, r.poc_ms, r.poc_minus_risk_ms
                );
            }
        }
        Command::Cases { out_dir } => {
            std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
            for (name, text) in CASES {
                let s = Scenario::parse(text)?;
                let run = run_scenario(&s)?;
                let out = out_dir.join(format!("{name}.csv"));
                run.series.write_csv(&out)?;
                report(name, &run, &out);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| execute(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
