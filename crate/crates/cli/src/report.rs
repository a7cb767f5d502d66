//! JSON form of an analysis report. Rationals are `"p/q"` strings; transitions are
//! referred to by their id (declaration order in the input, starting at 0).

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use vasslyze::decompose::{Degree, Report, SccReport, TraceNode, Verdict};
use vasslyze::rational::{format_rational, parse_rational};
use vasslyze::{LinMap, LinearResult, MultiCycle, Rational, Vass};

pub const TOOL: &str = "vasslyze";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub tool: String,
    pub version: String,
    pub input_sha256: String,
    /// `"terminating"` or `"non-terminating"`.
    pub verdict: String,
    pub k: Option<u32>,
    /// `"theta"`, `"omega"`, or absent for non-terminating inputs.
    pub bound_kind: Option<String>,
    pub sccs: Vec<SccJson>,
    pub witnesses: WitnessesJson,
    pub timings: Option<TimingsJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SccJson {
    pub states: Vec<String>,
    pub transitions: Vec<usize>,
    pub verdict: String,
    pub k: Option<u32>,
    pub tight: bool,
    pub linear: LinearJson,
    pub positive_qrf: Option<LinMapJson>,
    pub trace: TraceJson,
    pub multicycle: Option<Vec<CycleJson>>,
    pub offending: Option<SubVassJson>,
    pub recursion_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearJson {
    pub bounded: bool,
    /// `lim L(n)/n`, present when bounded.
    pub constant: Option<String>,
    pub ranking_function: Option<LinMapJson>,
    /// Optimal point of the linear-time LP, one entry per transition of the SCC.
    pub flow: Option<Vec<String>>,
    /// Unbounded direction of the linear-time LP, one entry per transition of the SCC.
    pub ray: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinMapJson {
    pub normal: Vec<String>,
    pub weights: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleJson {
    pub cycle: Vec<usize>,
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubVassJson {
    pub states: Vec<String>,
    pub transitions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    pub states: Vec<String>,
    pub transitions: Vec<usize>,
    pub qrf: LinMapJson,
    pub ranked: Vec<usize>,
    pub neutral: Vec<usize>,
    pub result: DegreeJson,
    pub children: Vec<TraceJson>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DegreeJson {
    Finite(u32),
    Infinite(InfiniteTag),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfiniteTag {
    #[serde(rename = "infinite")]
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessesJson {
    /// Union of the non-termination witnesses of all SCCs.
    pub multicycle: Vec<CycleJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingsJson {
    pub total_us: u64,
}

pub const TERMINATING: &str = "terminating";
pub const NON_TERMINATING: &str = "non-terminating";

fn rats(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(format_rational).collect()
}

pub fn linmap_json(v: &Vass, f: &LinMap) -> LinMapJson {
    LinMapJson {
        normal: rats(&f.normal),
        weights: v.states().iter().cloned().zip(rats(&f.weights)).collect(),
    }
}

pub fn multicycle_json(m: &MultiCycle) -> Vec<CycleJson> {
    m.cycles()
        .map(|(c, k)| CycleJson {
            cycle: c.clone(),
            multiplicity: k,
        })
        .collect()
}

fn degree_json(d: Degree) -> DegreeJson {
    match d {
        Degree::Finite(k) => DegreeJson::Finite(k),
        Degree::Infinite => DegreeJson::Infinite(InfiniteTag::Infinite),
    }
}

fn trace_json(t: &TraceNode) -> TraceJson {
    TraceJson {
        states: t.vass.states().to_vec(),
        transitions: t.vass.transition_ids(),
        qrf: linmap_json(&t.vass, &t.qrf),
        ranked: t.ranked.clone(),
        neutral: t.neutral.clone(),
        result: degree_json(t.result),
        children: t.children.iter().map(trace_json).collect(),
    }
}

fn linear_json(v: &Vass, l: &LinearResult) -> LinearJson {
    match l {
        LinearResult::Bounded { constant, rf, flow } => LinearJson {
            bounded: true,
            constant: Some(format_rational(constant)),
            ranking_function: Some(linmap_json(v, rf)),
            flow: Some(rats(flow)),
            ray: None,
        },
        LinearResult::Unbounded { ray } => LinearJson {
            bounded: false,
            constant: None,
            ranking_function: None,
            flow: None,
            ray: Some(rats(ray)),
        },
    }
}

pub fn scc_json(r: &SccReport) -> SccJson {
    let v = &r.component;
    let (multicycle, offending) = match &r.verdict {
        Verdict::NonTerminating { witness, offending } => (
            Some(multicycle_json(witness)),
            Some(SubVassJson {
                states: offending.states().to_vec(),
                transitions: offending.transition_ids(),
            }),
        ),
        Verdict::Terminating { .. } => (None, None),
    };
    SccJson {
        states: v.states().to_vec(),
        transitions: v.transition_ids(),
        verdict: verdict_name(r.verdict.is_terminating()).to_string(),
        k: r.k(),
        tight: r.tight(),
        linear: linear_json(v, &r.linear),
        positive_qrf: r.positive_qrf.as_ref().map(|f| linmap_json(v, f)),
        trace: trace_json(&r.trace),
        multicycle,
        offending,
        recursion_depth: r.recursion_depth,
    }
}

pub fn verdict_name(terminating: bool) -> &'static str {
    if terminating {
        TERMINATING
    } else {
        NON_TERMINATING
    }
}

pub fn report_json(input_sha256: String, r: &Report, timings: Option<TimingsJson>) -> ReportJson {
    ReportJson {
        tool: TOOL.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        input_sha256,
        verdict: verdict_name(r.is_terminating()).to_string(),
        k: r.k(),
        bound_kind: r.bound_kind().map(|b| {
            match b {
                vasslyze::BoundKind::Theta => "theta",
                vasslyze::BoundKind::Omega => "omega",
            }
            .to_string()
        }),
        sccs: r.components.iter().map(scc_json).collect(),
        witnesses: WitnessesJson {
            multicycle: multicycle_json(&r.witness()),
        },
        timings,
    }
}

pub fn parse_rat(s: &str) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| anyhow!("invalid rational `{s}`"))
}

pub fn parse_rats(xs: &[String]) -> Result<Vec<Rational>> {
    xs.iter().map(|s| parse_rat(s)).collect()
}

/// The linear map described by `j` over the states of `v`.
pub fn linmap_from_json(v: &Vass, j: &LinMapJson) -> Result<LinMap> {
    if j.normal.len() != v.dim() {
        bail!(
            "normal has {} entries, expected {}",
            j.normal.len(),
            v.dim()
        );
    }
    if j.weights.len() != v.num_states() {
        bail!(
            "weights have {} entries, expected {}",
            j.weights.len(),
            v.num_states()
        );
    }
    let weights = v
        .states()
        .iter()
        .map(|s| {
            j.weights
                .get(s)
                .with_context(|| format!("no weight for state `{s}`"))
                .and_then(|x| parse_rat(x))
        })
        .collect::<Result<_>>()?;
    Ok(LinMap {
        normal: parse_rats(&j.normal)?,
        weights,
    })
}

pub fn multicycle_from_json(cs: &[CycleJson]) -> MultiCycle {
    let mut m = MultiCycle::new();
    for c in cs {
        m.add(c.cycle.clone(), c.multiplicity);
    }
    m
}
