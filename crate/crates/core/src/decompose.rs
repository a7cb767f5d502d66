//! Maximal quasi-ranking functions and the recursive decomposition that yields the
//! polynomial degree `k` of the termination time.
//!
//! For a strongly connected VASS, a maximal QRF `f` ranks as many transitions as
//! possible. If it ranks all of them the time is linear; if it ranks none there is a
//! non-negative multi-cycle using every transition and the VASS does not terminate.
//! Otherwise the degree is `1 + max` over the SCCs of the `f`-neutral transitions.
//! The bound is tight (`Θ(n^k)`) when a QRF with a strictly positive normal exists,
//! and a lower bound `Ω(n^k)` otherwise.

use num::{One, Signed, Zero};

use crate::farkas::{column_rows, normalize_ranked, split_linmap, union_nonneg_multicycle};
use crate::graph::{self, MultiCycle};
use crate::linear::{analyze_linear, LinMap, LinearResult};
use crate::model::Vass;
use crate::rational::Rational;
use crate::ratlp::{solve_lp, LpOutcome, LpProblem};
use crate::verify::check_linmap;

/// Solves the LP maximizing the number of ranked transitions:
///
/// ```text
/// max 1ᵀb   s.t.  c ≥ 0,  w free,  0 ≤ b ≤ 1,  cᵀU - wᵀF + bᵀ ≤ 0
/// ```
///
/// At any optimum `b ∈ {0,1}` and columns with `b = 0` are exactly zero, so `(c, w)`
/// is a QRF whose ranked set contains that of every other QRF. Returns the map and
/// its ranked transition ids.
pub fn max_qrf(v: &Vass) -> (LinMap, Vec<usize>) {
    let d = v.dim();
    let q = v.num_states();
    let n = v.num_transitions();
    let mut lp = LpProblem::new(d + q + n);
    for p in 0..q {
        lp.free(d + p);
    }
    let mut objective = vec![Rational::zero(); d + q + n];
    for x in &mut objective[d + q..] {
        *x = Rational::one();
    }
    lp.maximize(objective);
    for (j, mut row) in column_rows(v).into_iter().enumerate() {
        row.resize(d + q + n, Rational::zero());
        row[d + q + j] = Rational::one();
        lp.add_le(row, Rational::zero());
        let mut cap = vec![Rational::zero(); d + q + n];
        cap[d + q + j] = Rational::one();
        lp.add_le(cap, Rational::one());
    }
    let point = match solve_lp(&lp) {
        LpOutcome::Optimal { point, .. } => point,
        other => unreachable!("the ranking LP is feasible and bounded: {other:?}"),
    };
    let f = split_linmap(v, &point);
    let check = check_linmap(v, &f).expect("dimensions match");
    assert!(
        check.role.is_quasi_ranking(),
        "optimum of the ranking LP is not a QRF: {:?}",
        check.failures
    );
    (f, check.ranked)
}

/// A QRF with strictly positive normal, if one exists: maximizes `ε` subject to
/// `cᵀU - wᵀF ≤ 0`, `c ≥ ε·1`, `ε ≤ 1`, then rescales so that every non-neutral
/// column is `≤ -1`.
pub fn has_positive_qrf(v: &Vass) -> Option<LinMap> {
    let d = v.dim();
    let q = v.num_states();
    let eps = d + q;
    let mut lp = LpProblem::new(d + q + 1);
    for p in 0..q {
        lp.free(d + p);
    }
    let mut objective = vec![Rational::zero(); d + q + 1];
    objective[eps] = Rational::one();
    lp.maximize(objective);
    for mut row in column_rows(v) {
        row.push(Rational::zero());
        lp.add_le(row, Rational::zero());
    }
    for i in 0..d {
        let mut row = vec![Rational::zero(); d + q + 1];
        row[i] = Rational::one();
        row[eps] = -Rational::one();
        lp.add_ge(row, Rational::zero());
    }
    let mut cap = vec![Rational::zero(); d + q + 1];
    cap[eps] = Rational::one();
    lp.add_le(cap, Rational::one());
    match solve_lp(&lp) {
        LpOutcome::Optimal { point, .. } if point[eps].is_positive() => {
            let f = normalize_ranked(v, split_linmap(v, &point));
            debug_assert!(check_linmap(v, &f).is_ok_and(|r| r.role.is_positive()));
            Some(f)
        }
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    Finite(u32),
    Infinite,
}

/// One call of the decomposition: the sub-VASS, its maximal QRF and what it returned.
#[derive(Clone, Debug)]
pub struct TraceNode {
    pub vass: Vass,
    pub qrf: LinMap,
    pub ranked: Vec<usize>,
    pub neutral: Vec<usize>,
    pub result: Degree,
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    /// Number of nested calls below this one.
    pub fn depth(&self) -> usize {
        self.children
            .iter()
            .map(|c| 1 + c.depth())
            .max()
            .unwrap_or(0)
    }

    /// The first sub-VASS whose transitions are all neutral.
    pub fn offending(&self) -> Option<&Vass> {
        if self.result != Degree::Infinite {
            return None;
        }
        if self.ranked.is_empty() {
            return Some(&self.vass);
        }
        self.children.iter().find_map(TraceNode::offending)
    }
}

/// The recursive decomposition of a strongly connected VASS. Stops at the first
/// sub-VASS without ranked transitions.
pub fn decompose(v: &Vass) -> TraceNode {
    let (qrf, ranked) = max_qrf(v);
    let neutral: Vec<usize> = v
        .transition_ids()
        .into_iter()
        .filter(|t| !ranked.contains(t))
        .collect();
    let mut node = TraceNode {
        vass: v.clone(),
        qrf,
        ranked,
        neutral,
        result: Degree::Finite(1),
        children: Vec::new(),
    };
    if node.neutral.is_empty() {
        return node;
    }
    if node.ranked.is_empty() {
        node.result = Degree::Infinite;
        return node;
    }
    let mut deepest = 0;
    for component in graph::sccs(v, Some(&node.neutral)) {
        let child = decompose(&component);
        let result = child.result;
        node.children.push(child);
        match result {
            Degree::Infinite => {
                node.result = Degree::Infinite;
                return node;
            }
            Degree::Finite(k) => deepest = deepest.max(k),
        }
    }
    node.result = Degree::Finite(1 + deepest);
    node
}

#[derive(Clone, Debug)]
pub enum Verdict {
    /// `L(n) ∈ Ω(n^k)`, and `O(n^k)` as well when `tight`.
    Terminating { k: u32, tight: bool },
    /// `witness` is a multi-cycle with non-negative effect in `offending`.
    NonTerminating {
        witness: MultiCycle,
        offending: Vass,
    },
}

impl Verdict {
    pub fn is_terminating(&self) -> bool {
        matches!(self, Verdict::Terminating { .. })
    }
}

/// Analysis of one strongly connected component.
#[derive(Clone, Debug)]
pub struct SccReport {
    pub component: Vass,
    pub verdict: Verdict,
    pub linear: LinearResult,
    pub positive_qrf: Option<LinMap>,
    pub trace: TraceNode,
    pub recursion_depth: usize,
}

impl SccReport {
    pub fn k(&self) -> Option<u32> {
        match self.verdict {
            Verdict::Terminating { k, .. } => Some(k),
            Verdict::NonTerminating { .. } => None,
        }
    }

    pub fn tight(&self) -> bool {
        matches!(self.verdict, Verdict::Terminating { tight: true, .. })
    }
}

/// Classifies a strongly connected VASS.
///
/// # Panics
///
/// If the decomposition reports a degree above the dimension, which would mean a
/// solver bug.
pub fn classify(v: &Vass) -> SccReport {
    let trace = decompose(v);
    let recursion_depth = trace.depth();
    let linear = analyze_linear(v).expect("classify expects a strongly connected VASS");
    let (verdict, positive_qrf) = match trace.result {
        Degree::Finite(k) => {
            assert!(
                k as usize <= v.dim(),
                "degree {k} exceeds dimension {} for\n{v}",
                v.dim()
            );
            let positive = has_positive_qrf(v);
            let tight = positive.is_some();
            (Verdict::Terminating { k, tight }, positive)
        }
        Degree::Infinite => {
            let offending = trace.offending().expect("infinite trace").clone();
            let witness = union_nonneg_multicycle(&offending);
            (Verdict::NonTerminating { witness, offending }, None)
        }
    };
    SccReport {
        component: v.clone(),
        verdict,
        linear,
        positive_qrf,
        trace,
        recursion_depth,
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Theta,
    Omega,
}

/// Analysis of an arbitrary VASS, one report per SCC in order of smallest state.
#[derive(Clone, Debug)]
pub struct Report {
    pub components: Vec<SccReport>,
}

impl Report {
    pub fn is_terminating(&self) -> bool {
        self.components.iter().all(|c| c.verdict.is_terminating())
    }

    /// Maximal degree over the components, `None` if some component does not terminate.
    pub fn k(&self) -> Option<u32> {
        self.components
            .iter()
            .map(SccReport::k)
            .try_fold(0, |acc, k| k.map(|k| acc.max(k)))
    }

    pub fn tight(&self) -> bool {
        self.components.iter().all(SccReport::tight)
    }

    pub fn bound_kind(&self) -> Option<BoundKind> {
        self.is_terminating().then(|| {
            if self.tight() {
                BoundKind::Theta
            } else {
                BoundKind::Omega
            }
        })
    }

    /// Union of the non-termination witnesses of all components.
    pub fn witness(&self) -> MultiCycle {
        let mut m = MultiCycle::new();
        for c in &self.components {
            if let Verdict::NonTerminating { witness, .. } = &c.verdict {
                m.merge(witness);
            }
        }
        m
    }
}

/// Classifies every SCC of `v`, using up to `jobs` threads.
pub fn classify_general_with(v: &Vass, jobs: usize) -> Report {
    let comps = graph::sccs(v, None);
    let jobs = jobs.clamp(1, comps.len().max(1));
    let components = if jobs == 1 {
        comps.iter().map(classify).collect()
    } else {
        let chunk = comps.len().div_ceil(jobs);
        std::thread::scope(|s| {
            let handles: Vec<_> = comps
                .chunks(chunk)
                .map(|part| s.spawn(move || part.iter().map(classify).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("analysis thread panicked"))
                .collect()
        })
    };
    Report { components }
}

pub fn classify_general(v: &Vass) -> Report {
    classify_general_with(v, 1)
}
