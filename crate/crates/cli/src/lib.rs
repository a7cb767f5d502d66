//! Command implementations behind the `vasslyze` binary.

pub mod check;
pub mod report;

use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use vasslyze::decompose::{classify_general_with, Verdict};
use vasslyze::generate::{random_vass, GenParams};
use vasslyze::oracle::{growth_estimate, termination_curve, Curve};
use vasslyze::rational::format_rational;
use vasslyze::{parse_vass, LinearResult, Report, Vass};

use report::{report_json, ReportJson, TimingsJson};

/// Exit code of `analyze` for a terminating input, and of `verify` on success.
pub const EXIT_OK: i32 = 0;
/// Usage, I/O, parse and schema errors.
pub const EXIT_ERROR: i32 = 1;
/// `analyze` found a non-terminating SCC.
pub const EXIT_NON_TERMINATING: i32 = 2;
/// `verify` found a witness that does not check out.
pub const EXIT_WITNESS_FAILURE: i32 = 3;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Parses `source`, classifies each SCC (on up to `jobs` threads) and builds the report.
pub fn analyze_source(source: &str, jobs: usize) -> Result<(Vass, Report, ReportJson)> {
    let v = parse_vass(source)?;
    let start = Instant::now();
    let report = classify_general_with(&v, jobs);
    let timings = TimingsJson {
        total_us: start.elapsed().as_micros() as u64,
    };
    let json = report_json(sha256_hex(source.as_bytes()), &report, Some(timings));
    Ok((v, report, json))
}

pub fn exit_code_for(report: &Report) -> i32 {
    if report.is_terminating() {
        EXIT_OK
    } else {
        EXIT_NON_TERMINATING
    }
}

fn degree(k: u32) -> String {
    match k {
        0 => "1".to_string(),
        1 => "n".to_string(),
        k => format!("n^{k}"),
    }
}

/// Human-readable summary; `per_scc` adds one block per SCC.
pub fn render_text(v: &Vass, r: &Report, per_scc: bool) -> String {
    let mut out = String::new();
    match (r.k(), r.tight()) {
        (Some(k), true) => writeln!(out, "terminating: L(n) in Theta({})", degree(k)),
        (Some(k), false) => writeln!(out, "terminating: L(n) in Omega({})", degree(k)),
        (None, _) => writeln!(out, "non-terminating"),
    }
    .unwrap();
    if !r.is_terminating() {
        let labels: Vec<String> = r
            .witness()
            .cycles()
            .map(|(c, k)| format!("{k} x ({})", cycle_labels(v, c)))
            .collect();
        writeln!(out, "witness: {}", labels.join(", ")).unwrap();
    }
    if !per_scc {
        return out;
    }
    for (i, c) in r.components.iter().enumerate() {
        writeln!(out, "\nSCC {i}: states {}", c.component.states().join(" ")).unwrap();
        match &c.verdict {
            Verdict::Terminating { k, tight } => {
                let kind = if *tight { "Theta" } else { "Omega" };
                writeln!(out, "  {kind}({})", degree(*k)).unwrap();
            }
            Verdict::NonTerminating { witness, .. } => {
                let labels: Vec<String> = witness
                    .cycles()
                    .map(|(cy, k)| format!("{k} x ({})", cycle_labels(v, cy)))
                    .collect();
                writeln!(out, "  non-terminating, witness {}", labels.join(", ")).unwrap();
            }
        }
        if let LinearResult::Bounded { constant, .. } = &c.linear {
            writeln!(out, "  L(n)/n -> {}", format_rational(constant)).unwrap();
        }
        writeln!(out, "  recursion depth {}", c.recursion_depth).unwrap();
    }
    out
}

fn cycle_labels(v: &Vass, cycle: &[usize]) -> String {
    cycle
        .iter()
        .map(|&id| {
            v.transition_by_id(id)
                .map_or_else(|| id.to_string(), |t| t.label.clone())
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Brute-force curve of `L(n)` for `n = 1..=n_max`.
pub fn simulate_source(source: &str, n_max: u64, step_cap: u64, memo_cap: usize) -> Result<Curve> {
    let v = parse_vass(source)?;
    Ok(termination_curve(&v, n_max, step_cap, memo_cap)?)
}

/// One-line diagnostic with the estimated degree, if the curve has enough points.
pub fn growth_line(c: &Curve) -> String {
    match growth_estimate(c) {
        Ok(k) => format!("estimated degree (float, least squares): {k:.3}"),
        Err(e) => format!("estimated degree unavailable: {e}"),
    }
}

/// Canonical text of a random strongly connected VASS.
pub fn generate(dim: usize, states: usize, max_update: i64, seed: u64) -> String {
    random_vass(
        GenParams {
            dim,
            states,
            max_update,
        },
        seed,
    )
    .to_string()
}

/// Re-checks a report; returns the exit code and the messages to print.
pub fn verify_files(report: &str, source: &str) -> (i32, Vec<String>) {
    match check::check_report(report, source) {
        Err(e) => (EXIT_ERROR, vec![format!("error: {e:#}")]),
        Ok(f) if f.is_empty() => (EXIT_OK, vec!["all witnesses verified".to_string()]),
        Ok(f) => (EXIT_WITNESS_FAILURE, f),
    }
}

pub fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}
