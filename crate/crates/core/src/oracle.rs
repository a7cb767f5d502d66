//! Brute-force termination time on small instances.
//!
//! `L(n)` is the length of the longest computation from any configuration whose
//! counters are all at most `n`. Taking a transition from a larger configuration is
//! never harder, so the maximum is attained at some `p·(n, …, n)`, and only those
//! starts are searched.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::model::{Config, Vass};

pub const DEFAULT_STEP_CAP: u64 = 1_000_000;
pub const DEFAULT_MEMO_CAP: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("need at least 4 uncapped points with positive length, found {0}")]
    TooFewPoints(usize),
    #[error("configuration has {found} counters, expected {expected}")]
    ConfigDimension { expected: usize, found: usize },
    #[error("updates do not fit in 64-bit integers")]
    UpdatesTooLarge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunLength {
    Finite(u64),
    /// Some run exceeded the step cap, the configuration graph has a cycle, or the
    /// memo table overflowed.
    CapHit,
}

impl RunLength {
    pub fn finite(self) -> Option<u64> {
        match self {
            RunLength::Finite(l) => Some(l),
            RunLength::CapHit => None,
        }
    }
}

type Key = (usize, Box<[u64]>);

/// Longest-run search sharing one memo table across calls.
pub struct Oracle<'a> {
    v: &'a Vass,
    updates: Vec<Vec<i64>>,
    step_cap: u64,
    memo_cap: usize,
    memo: HashMap<Key, u64>,
}

struct Frame {
    key: Key,
    next: usize,
    best: u64,
}

impl<'a> Oracle<'a> {
    pub fn new(v: &'a Vass, step_cap: u64, memo_cap: usize) -> Result<Self, OracleError> {
        Ok(Oracle {
            v,
            updates: v.small_updates().ok_or(OracleError::UpdatesTooLarge)?,
            step_cap,
            memo_cap,
            memo: HashMap::new(),
        })
    }

    fn successor(&self, key: &Key, t: usize) -> Option<Key> {
        let tr = &self.v.transitions()[t];
        if tr.source != key.0 {
            return None;
        }
        let counters = key
            .1
            .iter()
            .zip(&self.updates[t])
            .map(|(&x, &u)| x.checked_add_signed(u))
            .collect::<Option<Box<[u64]>>>()?;
        Some((tr.target, counters))
    }

    pub fn longest_run(&mut self, start: &Config) -> Result<RunLength, OracleError> {
        if start.counters.len() != self.v.dim() {
            return Err(OracleError::ConfigDimension {
                expected: self.v.dim(),
                found: start.counters.len(),
            });
        }
        let root: Key = (start.state, start.counters.clone().into_boxed_slice());
        if let Some(&l) = self.memo.get(&root) {
            return Ok(RunLength::Finite(l));
        }
        let mut on_stack: HashSet<Key> = HashSet::new();
        on_stack.insert(root.clone());
        let mut stack = vec![Frame {
            key: root,
            next: 0,
            best: 0,
        }];
        while let Some(top) = stack.last_mut() {
            if top.next == self.v.num_transitions() {
                let done = stack.pop().expect("non-empty");
                if self.memo.len() >= self.memo_cap {
                    return Ok(RunLength::CapHit);
                }
                on_stack.remove(&done.key);
                self.memo.insert(done.key, done.best);
                match stack.last_mut() {
                    Some(parent) => parent.best = parent.best.max(done.best + 1),
                    None => return Ok(RunLength::Finite(done.best)),
                }
                continue;
            }
            let t = top.next;
            top.next += 1;
            let Some(child) = self.successor(&top.key, t) else {
                continue;
            };
            if let Some(&l) = self.memo.get(&child) {
                let top = stack.last_mut().expect("non-empty");
                top.best = top.best.max(l + 1);
                if top.best > self.step_cap {
                    return Ok(RunLength::CapHit);
                }
                continue;
            }
            if on_stack.contains(&child) || stack.len() as u64 >= self.step_cap {
                return Ok(RunLength::CapHit);
            }
            on_stack.insert(child.clone());
            stack.push(Frame {
                key: child,
                next: 0,
                best: 0,
            });
        }
        unreachable!("the root frame returns")
    }

    /// `L(n)`: the maximum of [`Oracle::longest_run`] over all `p·(n, …, n)`.
    /// These starts suffice: a run from `p(x)` with `x ≤ n·1` stays executable from
    /// `p(n·1)`, since adding a non-negative vector keeps every counter non-negative.
    pub fn termination_time(&mut self, n: u64) -> Result<RunLength, OracleError> {
        let mut best = 0;
        for p in 0..self.v.num_states() {
            match self.longest_run(&Config::uniform(p, self.v.dim(), n))? {
                RunLength::Finite(l) => best = best.max(l),
                RunLength::CapHit => return Ok(RunLength::CapHit),
            }
        }
        Ok(RunLength::Finite(best))
    }
}

/// Longest computation from `start`, with a fresh memo table.
pub fn longest_run(v: &Vass, start: &Config, step_cap: u64) -> Result<RunLength, OracleError> {
    Oracle::new(v, step_cap, DEFAULT_MEMO_CAP)?.longest_run(start)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvePoint {
    pub n: u64,
    pub length: RunLength,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    pub points: Vec<CurvePoint>,
    pub step_cap: u64,
    pub memo_cap: usize,
}

impl Curve {
    pub fn any_capped(&self) -> bool {
        self.points.iter().any(|p| p.length == RunLength::CapHit)
    }

    pub fn get(&self, n: u64) -> Option<u64> {
        self.points
            .iter()
            .find(|p| p.n == n)
            .and_then(|p| p.length.finite())
    }

    /// CSV with header `n,L,capped`; `L` is empty for capped points.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "L", "capped"])
            .expect("in-memory write");
        for p in &self.points {
            let length = p.length.finite().map(|l| l.to_string()).unwrap_or_default();
            let capped = (p.length == RunLength::CapHit).to_string();
            w.write_record([p.n.to_string(), length, capped])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
    }
}

/// `L(n)` for `n = 1, …, n_max`. Once a point hits the cap, every larger `n` does too
/// (`L` is monotone), so those points are recorded as capped without searching.
pub fn termination_curve(
    v: &Vass,
    n_max: u64,
    step_cap: u64,
    memo_cap: usize,
) -> Result<Curve, OracleError> {
    let mut oracle = Oracle::new(v, step_cap, memo_cap)?;
    let mut points = Vec::new();
    let mut capped = false;
    for n in 1..=n_max {
        let length = if capped {
            RunLength::CapHit
        } else {
            oracle.termination_time(n)?
        };
        capped = length == RunLength::CapHit;
        points.push(CurvePoint { n, length });
    }
    Ok(Curve {
        points,
        step_cap,
        memo_cap,
    })
}

/// Estimated polynomial degree: the least-squares slope of `log L(n)` against `log n`
/// over the upper half of the uncapped points.
pub fn growth_estimate(c: &Curve) -> Result<f64, OracleError> {
    let pts: Vec<(f64, f64)> = c
        .points
        .iter()
        .filter_map(|p| match p.length {
            RunLength::Finite(l) if l > 0 && p.n > 0 => Some(((p.n as f64).ln(), (l as f64).ln())),
            _ => None,
        })
        .collect();
    if pts.len() < 4 {
        return Err(OracleError::TooFewPoints(pts.len()));
    }
    let upper = &pts[pts.len() / 2..];
    let m = upper.len() as f64;
    let mx = upper.iter().map(|p| p.0).sum::<f64>() / m;
    let my = upper.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = upper.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = upper.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn synthetic(f: impl Fn(u64) -> u64) -> Curve {
        Curve {
            points: (1..=20)
                .map(|n| CurvePoint {
                    n,
                    length: RunLength::Finite(f(n)),
                })
                .collect(),
            step_cap: DEFAULT_STEP_CAP,
            memo_cap: DEFAULT_MEMO_CAP,
        }
    }

    #[test]
    fn longest_run_examples() {
        let v = samples::counter_program();
        let q1 = Config {
            state: 0,
            counters: vec![1, 1],
        };
        let q2 = Config {
            state: 1,
            counters: vec![1, 1],
        };
        assert_eq!(longest_run(&v, &q1, 10_000), Ok(RunLength::Finite(4)));
        assert_eq!(longest_run(&v, &q2, 10_000), Ok(RunLength::Finite(5)));

        let v = samples::single_loop(&[0]);
        let q = Config {
            state: 0,
            counters: vec![0],
        };
        assert_eq!(longest_run(&v, &q, 10_000), Ok(RunLength::CapHit));
    }

    #[test]
    fn step_cap_applies_to_long_acyclic_runs() {
        let v = samples::single_loop(&[-1]);
        let start = Config::uniform(0, 1, 50);
        assert_eq!(longest_run(&v, &start, 100), Ok(RunLength::Finite(50)));
        assert_eq!(longest_run(&v, &start, 10), Ok(RunLength::CapHit));
    }

    #[test]
    fn memo_cap_reports_cap_hit() {
        let v = samples::counter_program();
        let mut o = Oracle::new(&v, DEFAULT_STEP_CAP, 5).unwrap();
        assert_eq!(
            o.longest_run(&Config::uniform(0, 2, 10)),
            Ok(RunLength::CapHit)
        );
    }

    #[test]
    fn counter_program_curve() {
        let v = samples::counter_program();
        let c = termination_curve(&v, 24, DEFAULT_STEP_CAP, DEFAULT_MEMO_CAP).unwrap();
        assert_eq!(c.get(1), Some(5));
        assert!(!c.any_capped());
        for n in 8..=24 {
            let ratio = c.get(n).unwrap() as f64 / n as f64;
            assert!((3.2..=4.5).contains(&ratio), "n={n}: {ratio}");
        }
        let lengths: Vec<u64> = c
            .points
            .iter()
            .map(|p| p.length.finite().unwrap())
            .collect();
        assert!(lengths.windows(2).all(|w| w[0] <= w[1]));
        let k = growth_estimate(&c).unwrap();
        assert!((k - 1.0).abs() <= 0.5, "{k}");
    }

    #[test]
    fn shared_flag_curve() {
        let v = samples::shared_flag_system();
        let c = termination_curve(&v, 24, DEFAULT_STEP_CAP, DEFAULT_MEMO_CAP).unwrap();
        for n in 6..=12 {
            let ratio = c.get(2 * n).unwrap() as f64 / c.get(n).unwrap() as f64;
            assert!((3.0..=5.0).contains(&ratio), "n={n}: {ratio}");
        }
        let upto12 = Curve {
            points: c.points[..12].to_vec(),
            ..c.clone()
        };
        let k = growth_estimate(&upto12).unwrap();
        assert!((1.6..=2.4).contains(&k), "{k}");
    }

    #[test]
    fn non_terminating_curve_is_capped() {
        let v = samples::single_loop(&[1]);
        let c = termination_curve(&v, 3, 1000, DEFAULT_MEMO_CAP).unwrap();
        assert!(c.points.iter().all(|p| p.length == RunLength::CapHit));
        assert_eq!(c.to_csv(), "n,L,capped\n1,,true\n2,,true\n3,,true\n");
    }

    #[test]
    fn csv_format() {
        let v = samples::counter_program();
        let c = termination_curve(&v, 2, DEFAULT_STEP_CAP, DEFAULT_MEMO_CAP).unwrap();
        assert!(c.to_csv().starts_with("n,L,capped\n1,5,false\n2,"));
    }

    #[test]
    fn growth_of_synthetic_curves() {
        let k = growth_estimate(&synthetic(|n| 4 * n)).unwrap();
        assert!((k - 1.0).abs() <= 0.05, "{k}");
        let k = growth_estimate(&synthetic(|n| n * n)).unwrap();
        assert!((k - 2.0).abs() <= 0.05, "{k}");
        let mut short = synthetic(|n| n);
        short.points.truncate(3);
        assert_eq!(growth_estimate(&short), Err(OracleError::TooFewPoints(3)));
    }
}
