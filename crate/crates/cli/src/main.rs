use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use vasslyze::oracle::{DEFAULT_MEMO_CAP, DEFAULT_STEP_CAP};
use vasslyze_cli::{
    analyze_source, exit_code_for, generate, growth_line, read_file, render_text, simulate_source,
    verify_files, EXIT_ERROR,
};

/// Asymptotic termination time of vector addition systems with states.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a VASS: exit 0 if terminating, 2 if not, 1 on error.
    Analyze {
        path: PathBuf,
        /// Print the JSON report (default).
        #[arg(long, conflicts_with = "text")]
        json: bool,
        /// Print a human-readable summary.
        #[arg(long)]
        text: bool,
        /// Include the per-SCC breakdown in the text summary.
        #[arg(long)]
        scc: bool,
        /// Number of threads analyzing SCCs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Compute L(n) by exhaustive search for n = 1..=n-max.
    Simulate {
        path: PathBuf,
        #[arg(long, default_value_t = 20)]
        n_max: u64,
        /// Longest run explored before a point is reported as capped.
        #[arg(long, env = "VASSLYZE_CAP", default_value_t = DEFAULT_STEP_CAP)]
        cap: u64,
        /// Most configurations memoized per invocation.
        #[arg(long, default_value_t = DEFAULT_MEMO_CAP)]
        memo_cap: usize,
        /// Write the curve here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Re-check every witness in a report: exit 0 if all hold, 3 if one fails, 1 on error.
    Verify { report: PathBuf, vass: PathBuf },
    /// Print a random strongly connected VASS.
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        dim: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        states: u64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(i64).range(1..))]
        max_update: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze {
            path,
            json: _,
            text,
            scc,
            jobs,
        } => {
            let source = read_file(&path)?;
            let (v, report, json) = analyze_source(&source, jobs)?;
            if text {
                print!("{}", render_text(&v, &report, scc));
            } else {
                println!("{}", serde_json::to_string_pretty(&json)?);
            }
            Ok(exit_code_for(&report))
        }
        Command::Simulate {
            path,
            n_max,
            cap,
            memo_cap,
            csv,
        } => {
            let curve = simulate_source(&read_file(&path)?, n_max, cap, memo_cap)?;
            match csv {
                Some(out) => std::fs::write(&out, curve.to_csv())?,
                None => print!("{}", curve.to_csv()),
            }
            eprintln!("{}", growth_line(&curve));
            Ok(0)
        }
        Command::Verify { report, vass } => {
            let (code, messages) = verify_files(&read_file(&report)?, &read_file(&vass)?);
            for m in messages {
                if code == 0 {
                    println!("{m}");
                } else {
                    eprintln!("{m}");
                }
            }
            Ok(code)
        }
        Command::Gen {
            dim,
            states,
            max_update,
            seed,
        } => {
            print!(
                "{}",
                generate(dim as usize, states as usize, max_update, seed)
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        EXIT_ERROR
    });
    ExitCode::from(code as u8)
}
