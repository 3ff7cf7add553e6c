use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use warpcurv_cli::{describe, load_scenario, output, run, CliError, RunOptions};

#[derive(Parser)]
#[command(name = "warpcurv", version, about = "Distributional curvature of glued FRW scale factors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the outputs listed in the scenario.
    Run {
        scenario: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also write a gnuplot script (plot.gp) for the CSVs.
        #[arg(long)]
        emit_plot_script: bool,
    },
    /// Run the oracle checks and print one line per check.
    Verify { scenario: PathBuf },
    /// Print derived constants and glue classes.
    Describe { scenario: PathBuf },
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run {
            scenario,
            out,
            emit_plot_script,
        } => {
            let s = load_scenario(&scenario).with_context(|| format!("loading {}", scenario.display()))?;
            let summary = run(
                &s,
                &RunOptions {
                    out_dir: out,
                    emit_plot_script,
                },
            )?;
            for path in summary.written {
                println!("wrote {}", path.display());
            }
        }
        Command::Verify { scenario } => {
            let s = load_scenario(&scenario).with_context(|| format!("loading {}", scenario.display()))?;
            let report = output::verification(&s)?;
            for c in &report.checks {
                println!(
                    "{} {} measured={} threshold={}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    output::fmt_f(c.measured),
                    output::fmt_f(c.threshold)
                );
            }
            output::check_report(&report)?;
        }
        Command::Describe { scenario } => {
            let s = load_scenario(&scenario).with_context(|| format!("loading {}", scenario.display()))?;
            print!("{}", describe(&s));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<CliError>().map_or(2, CliError::exit_code);
            ExitCode::from(code)
        }
    }
}
