//! Re-validation of every witness embedded in a report against the input VASS.

use anyhow::{bail, Context, Result};
use vasslyze::farkas::nonneg_multicycle_through;
use vasslyze::graph::sccs;
use vasslyze::linear::{is_nonneg_cycle_ray, linear_lp};
use vasslyze::verify::{check_linmap, check_multicycle};
use vasslyze::{parse_vass, Vass};

use crate::report::{
    linmap_from_json, multicycle_from_json, multicycle_json, parse_rat, parse_rats, DegreeJson,
    ReportJson, SccJson, TraceJson, NON_TERMINATING, TERMINATING, TOOL,
};
use crate::sha256_hex;

/// Checks `report` (JSON text) against the VASS source it claims to describe.
/// `Err` means the report cannot be checked at all (unreadable, wrong tool, wrong
/// input); otherwise the returned list holds one message per failed check.
pub fn check_report(report: &str, vass_source: &str) -> Result<Vec<String>> {
    let r: ReportJson = serde_json::from_str(report).context("malformed report")?;
    if r.tool != TOOL {
        bail!("report was produced by `{}`, not `{TOOL}`", r.tool);
    }
    let hash = sha256_hex(vass_source.as_bytes());
    if r.input_sha256 != hash {
        bail!(
            "input hash mismatch: report has {}, file has {hash}",
            r.input_sha256
        );
    }
    let v = parse_vass(vass_source).context("input does not parse")?;
    let mut c = Checker::default();
    c.report(&v, &r);
    Ok(c.failures)
}

#[derive(Default)]
struct Checker {
    failures: Vec<String>,
}

fn same_shape(v: &Vass, states: &[String], transitions: &[usize]) -> bool {
    v.states() == states && v.transition_ids() == transitions
}

impl Checker {
    fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }

    fn ensure(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.fail(msg());
        }
    }

    fn report(&mut self, v: &Vass, r: &ReportJson) {
        let comps = sccs(v, None);
        if comps.len() != r.sccs.len() {
            self.fail(format!(
                "report lists {} SCCs, the input has {}",
                r.sccs.len(),
                comps.len()
            ));
            return;
        }
        for (i, (comp, s)) in comps.iter().zip(&r.sccs).enumerate() {
            if !same_shape(comp, &s.states, &s.transitions) {
                self.fail(format!("SCC {i} does not match the input"));
                continue;
            }
            self.scc(i, comp, s);
        }

        let terminating = r.sccs.iter().all(|s| s.verdict == TERMINATING);
        let expected = if terminating {
            TERMINATING
        } else {
            NON_TERMINATING
        };
        self.ensure(r.verdict == expected, || {
            format!("verdict `{}` does not match the SCCs", r.verdict)
        });
        let k = if terminating {
            r.sccs.iter().filter_map(|s| s.k).max()
        } else {
            None
        };
        self.ensure(r.k == k, || format!("k = {:?}, SCCs give {k:?}", r.k));
        let bound = terminating.then(|| {
            if r.sccs.iter().all(|s| s.tight) {
                "theta"
            } else {
                "omega"
            }
        });
        self.ensure(r.bound_kind.as_deref() == bound, || {
            format!("bound kind {:?}, SCCs give {bound:?}", r.bound_kind)
        });

        let union = multicycle_from_json(&r.witnesses.multicycle);
        let mut expected_union = vasslyze::MultiCycle::new();
        for s in &r.sccs {
            if let Some(m) = &s.multicycle {
                expected_union.merge(&multicycle_from_json(m));
            }
        }
        self.ensure(
            multicycle_json(&union) == multicycle_json(&expected_union),
            || "witness union differs from the per-SCC multi-cycles".to_string(),
        );
        let res = check_multicycle(v, &union, true);
        self.ensure(res.ok, || {
            format!("witness union: {}", res.failures.join("; "))
        });
        self.ensure(terminating || !union.is_empty(), || {
            "non-terminating report without a witness".to_string()
        });
    }

    fn scc(&mut self, i: usize, v: &Vass, s: &SccJson) {
        let depth = self.trace(i, v, &s.trace);
        self.ensure(depth == Some(s.recursion_depth), || {
            format!("SCC {i}: recursion depth {} not matched", s.recursion_depth)
        });

        match s.verdict.as_str() {
            TERMINATING => {
                let Some(k) = s.k else {
                    return self.fail(format!("SCC {i}: terminating without k"));
                };
                self.ensure(s.trace.result == DegreeJson::Finite(k), || {
                    format!("SCC {i}: k = {k} differs from the decomposition")
                });
                self.ensure(k as usize <= v.dim(), || {
                    format!("SCC {i}: k = {k} exceeds the dimension")
                });
                self.ensure(s.linear.bounded == (k == 1), || {
                    format!("SCC {i}: linear LP boundedness contradicts k = {k}")
                });
                self.ensure(s.tight == s.positive_qrf.is_some(), || {
                    format!("SCC {i}: tight flag without matching positive QRF")
                });
                self.ensure(s.multicycle.is_none(), || {
                    format!("SCC {i}: terminating with a non-termination witness")
                });
            }
            NON_TERMINATING => {
                self.ensure(s.k.is_none() && !s.tight, || {
                    format!("SCC {i}: non-terminating with a degree")
                });
                self.non_terminating(i, v, s);
            }
            other => self.fail(format!("SCC {i}: unknown verdict `{other}`")),
        }

        if let Some(f) = &s.positive_qrf {
            match linmap_from_json(v, f).map(|f| check_linmap(v, &f)) {
                Ok(Ok(r)) if r.role.is_positive() => {}
                Ok(Ok(r)) => self.fail(format!(
                    "SCC {i}: positive QRF fails ({}): {}",
                    r.role.name(),
                    r.failures.join("; ")
                )),
                Ok(Err(e)) => self.fail(format!("SCC {i}: positive QRF: {e}")),
                Err(e) => self.fail(format!("SCC {i}: positive QRF: {e:#}")),
            }
        }
        self.linear(i, v, s);
    }

    fn linear(&mut self, i: usize, v: &Vass, s: &SccJson) {
        let l = &s.linear;
        if l.bounded {
            let (Some(constant), Some(rf), Some(flow)) =
                (&l.constant, &l.ranking_function, &l.flow)
            else {
                return self.fail(format!("SCC {i}: bounded linear LP without certificate"));
            };
            let parsed = (|| -> Result<_> {
                Ok((
                    parse_rat(constant)?,
                    linmap_from_json(v, rf)?,
                    parse_rats(flow)?,
                ))
            })();
            let (constant, rf, flow) = match parsed {
                Ok(x) => x,
                Err(e) => return self.fail(format!("SCC {i}: linear certificate: {e:#}")),
            };
            match check_linmap(v, &rf) {
                Ok(r) if r.role.is_ranking() => {}
                Ok(r) => self.fail(format!(
                    "SCC {i}: ranking function fails: {}",
                    r.failures.join("; ")
                )),
                Err(e) => return self.fail(format!("SCC {i}: ranking function: {e}")),
            }
            let lp = linear_lp(v).expect("SCCs are strongly connected");
            self.ensure(lp.is_feasible(&flow), || {
                format!("SCC {i}: flow is not feasible for the linear LP")
            });
            let primal: vasslyze::Rational = flow.iter().sum();
            let dual: vasslyze::Rational = rf.normal.iter().sum();
            self.ensure(primal == constant && dual == constant, || {
                format!(
                    "SCC {i}: constant {constant} is not certified by flow and ranking function"
                )
            });
        } else {
            let Some(ray) = &l.ray else {
                return self.fail(format!("SCC {i}: unbounded linear LP without ray"));
            };
            match parse_rats(ray) {
                Ok(ray) => self.ensure(is_nonneg_cycle_ray(v, &ray), || {
                    format!("SCC {i}: ray is not a non-negative circulation")
                }),
                Err(e) => self.fail(format!("SCC {i}: ray: {e:#}")),
            }
        }
    }

    fn non_terminating(&mut self, i: usize, v: &Vass, s: &SccJson) {
        self.ensure(
            s.trace.result == DegreeJson::Infinite(crate::report::InfiniteTag::Infinite),
            || format!("SCC {i}: non-terminating but the decomposition is finite"),
        );
        let (Some(m), Some(off)) = (&s.multicycle, &s.offending) else {
            return self.fail(format!("SCC {i}: non-terminating without witness"));
        };
        let m = multicycle_from_json(m);
        let res = check_multicycle(v, &m, true);
        self.ensure(res.ok, || {
            format!("SCC {i}: witness: {}", res.failures.join("; "))
        });
        self.ensure(!m.is_empty(), || format!("SCC {i}: empty witness"));
        let inside = m
            .cycles()
            .all(|(c, _)| c.iter().all(|t| off.transitions.contains(t)));
        self.ensure(inside, || {
            format!("SCC {i}: witness leaves the offending sub-VASS")
        });
    }

    /// Checks a decomposition node for `v`; returns its depth if it is consistent.
    fn trace(&mut self, i: usize, v: &Vass, t: &TraceJson) -> Option<usize> {
        if !same_shape(v, &t.states, &t.transitions) {
            self.fail(format!("SCC {i}: trace node does not match its sub-VASS"));
            return None;
        }
        let f = match linmap_from_json(v, &t.qrf) {
            Ok(f) => f,
            Err(e) => {
                self.fail(format!("SCC {i}: trace QRF: {e:#}"));
                return None;
            }
        };
        let r = match check_linmap(v, &f) {
            Ok(r) => r,
            Err(e) => {
                self.fail(format!("SCC {i}: trace QRF: {e}"));
                return None;
            }
        };
        if !r.role.is_quasi_ranking() || r.ranked != t.ranked || r.neutral != t.neutral {
            self.fail(format!(
                "SCC {i}: trace QRF does not rank exactly {:?}",
                t.ranked
            ));
            return None;
        }
        // no QRF ranks a transition that lies on a non-negative multi-cycle
        for &n in &t.neutral {
            if nonneg_multicycle_through(v, n).ok().flatten().is_none() {
                self.fail(format!(
                    "SCC {i}: transition {n} is rankable, the trace QRF is not maximal"
                ));
                return None;
            }
        }
        let infinite = DegreeJson::Infinite(crate::report::InfiniteTag::Infinite);
        if t.neutral.is_empty() || t.ranked.is_empty() {
            let expected = if t.neutral.is_empty() {
                DegreeJson::Finite(1)
            } else {
                infinite
            };
            self.ensure(t.result == expected && t.children.is_empty(), || {
                format!("SCC {i}: leaf of the decomposition has wrong result")
            });
            return Some(0);
        }
        let comps = sccs(v, Some(&t.neutral));
        let mut deepest = 0;
        let mut max_k = 0;
        let mut saw_infinite = false;
        for (j, comp) in comps.iter().enumerate() {
            let Some(child) = t.children.get(j) else {
                break;
            };
            let d = self.trace(i, comp, child)?;
            deepest = deepest.max(d + 1);
            match child.result {
                DegreeJson::Finite(k) => max_k = max_k.max(k),
                DegreeJson::Infinite(_) => {
                    saw_infinite = true;
                    break;
                }
            }
        }
        let complete = t.children.len() == comps.len();
        let expected = if saw_infinite {
            infinite
        } else {
            DegreeJson::Finite(1 + max_k)
        };
        if t.result != expected || !(complete || saw_infinite) {
            self.fail(format!("SCC {i}: decomposition result does not follow"));
            return None;
        }
        Some(deepest)
    }
}
