//! Linear termination time.
//!
//! For a strongly connected VASS, the LP
//!
//! ```text
//! max 1ᵀρ   s.t.  ρ ≥ 0,  U·ρ ≥ -1,  F·ρ = 0
//! ```
//!
//! is bounded with optimum `c` exactly when the termination time is linear, and
//! then `L(n)/n → c`. Its dual variables `(y_U, y_F)` form a ranking function
//! `f(p·v) = y_U·v + y_F(p)`. An unbounded LP comes with a ray `ρ ≥ 0`, `U·ρ ≥ 0`,
//! `F·ρ = 0`, i.e. arbitrarily long non-negative multi-cycles, and the termination
//! time is then at least quadratic.

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{self, covering_cycle, extract_multicycle, GraphError, Path};
use crate::model::{Config, Vass};
use crate::rational::{dot, RatVec, Rational};
use crate::ratlp::{scale_to_integer, solve_lp, LpOutcome, LpProblem};
use crate::verify::{check_linmap, Role};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinearError {
    #[error("VASS is not strongly connected")]
    NotStronglyConnected,
    #[error("dual vector does not yield a ranking function")]
    DualInfeasible,
    #[error("dual vector has {found} entries, expected {expected}")]
    DualLength { expected: usize, found: usize },
    #[error("linear map is not a ranking function")]
    NotRanking,
    #[error("flow vector is not a feasible point of the linear-time LP")]
    InvalidFlow,
    #[error("n = {n} is below the construction threshold (repetitions = {repetitions})")]
    BelowThreshold { n: u64, repetitions: i64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("constructed schedule is not executable at step {0}")]
    NotExecutable(usize),
}

/// `f(p·v) = normal·v + weights(p)`; the weights are indexed like the states of the
/// VASS the map was built for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinMap {
    pub normal: RatVec,
    pub weights: RatVec,
}

impl LinMap {
    pub fn zero(v: &Vass) -> Self {
        LinMap {
            normal: vec![Rational::zero(); v.dim()],
            weights: vec![Rational::zero(); v.num_states()],
        }
    }

    pub fn eval(&self, c: &Config) -> Rational {
        let counters: RatVec = c
            .counters
            .iter()
            .map(|&x| Rational::from_integer(x.into()))
            .collect();
        dot(&self.normal, &counters) + &self.weights[c.state]
    }

    /// `normal·u + w(target) - w(source)` per transition, i.e. the columns of
    /// `cᵀU - wᵀF`. Ranked: `≤ -1`; neutral: `= 0`.
    pub fn column_values(&self, v: &Vass) -> RatVec {
        v.transitions()
            .iter()
            .map(|t| {
                let u: RatVec = t
                    .update
                    .iter()
                    .map(|x| Rational::from_integer(x.clone()))
                    .collect();
                dot(&self.normal, &u) + &self.weights[t.target] - &self.weights[t.source]
            })
            .collect()
    }

    pub fn scaled(&self, k: &Rational) -> LinMap {
        LinMap {
            normal: self.normal.iter().map(|x| x * k).collect(),
            weights: self.weights.iter().map(|x| x * k).collect(),
        }
    }

    pub fn is_dimension_compatible(&self, v: &Vass) -> bool {
        self.normal.len() == v.dim() && self.weights.len() == v.num_states()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearResult {
    /// `L(n)/n → constant`; `flow` is an optimal LP point, `rf` a ranking function.
    Bounded {
        constant: Rational,
        rf: LinMap,
        flow: RatVec,
    },
    /// The LP is unbounded along `ray` (indexed by transition position).
    Unbounded { ray: RatVec },
}

impl LinearResult {
    pub fn is_bounded(&self) -> bool {
        matches!(self, LinearResult::Bounded { .. })
    }
}

/// The linear-time LP over `|T|` variables with `d` inequality rows (`-U·ρ ≤ 1`) and
/// `|Q|` equality rows (`F·ρ = 0`).
pub fn linear_lp(v: &Vass) -> Result<LpProblem, LinearError> {
    if !graph::is_strongly_connected(v) {
        return Err(LinearError::NotStronglyConnected);
    }
    Ok(linear_lp_unchecked(v))
}

fn linear_lp_unchecked(v: &Vass) -> LpProblem {
    let u = v.update_matrix();
    let f = v.incidence_matrix();
    let mut lp = LpProblem::new(v.num_transitions());
    lp.maximize(vec![Rational::one(); v.num_transitions()]);
    for i in 0..v.dim() {
        lp.add_le(u.row(i).iter().map(|x| -x).collect(), Rational::one());
    }
    for p in 0..v.num_states() {
        lp.add_eq(f.row(p).to_vec(), Rational::zero());
    }
    lp
}

/// Checks the recession-cone conditions of an unbounded ray:
/// `ρ ≥ 0`, `U·ρ ≥ 0`, `F·ρ = 0`, `1ᵀρ > 0`.
pub fn is_nonneg_cycle_ray(v: &Vass, ray: &[Rational]) -> bool {
    ray.len() == v.num_transitions()
        && ray.iter().all(|x| !x.is_negative())
        && v.update_matrix()
            .mul_vec(ray)
            .iter()
            .all(|x| !x.is_negative())
        && v.incidence_matrix().mul_vec(ray).iter().all(Zero::is_zero)
        && ray.iter().any(|x| x.is_positive())
}

pub fn analyze_linear(v: &Vass) -> Result<LinearResult, LinearError> {
    let lp = linear_lp(v)?;
    match solve_lp(&lp) {
        LpOutcome::Optimal { point, value, dual } => Ok(LinearResult::Bounded {
            constant: value,
            rf: ranking_from_dual(v, &dual)?,
            flow: point,
        }),
        LpOutcome::Unbounded { ray } => {
            debug_assert!(is_nonneg_cycle_ray(v, &ray));
            Ok(LinearResult::Unbounded { ray })
        }
        LpOutcome::Infeasible => unreachable!("ρ = 0 is always feasible"),
    }
}

/// Reads a ranking function off a dual solution `(y_U, y_F)` of the linear-time LP.
pub fn ranking_from_dual(v: &Vass, dual: &[Rational]) -> Result<LinMap, LinearError> {
    let expected = v.dim() + v.num_states();
    if dual.len() != expected {
        return Err(LinearError::DualLength {
            expected,
            found: dual.len(),
        });
    }
    let f = LinMap {
        normal: dual[..v.dim()].to_vec(),
        weights: dual[v.dim()..].to_vec(),
    };
    match check_linmap(v, &f).map(|r| r.role) {
        Ok(Role::Rf | Role::PositiveRf) => Ok(f),
        _ => Err(LinearError::DualInfeasible),
    }
}

/// `ε = 1 / (d·(maxup + 1))`, small enough that `ε·(u_1 + … + u_d) ≤ 1` for every update.
pub fn positivity_epsilon(v: &Vass) -> Rational {
    let denom = BigInt::from(v.dim()) * (v.max_update() + 1);
    Rational::new(BigInt::one(), denom)
}

/// Turns a ranking function into one with a strictly positive normal:
/// `c' = 2c + ε·1`, `w' = 2w`.
pub fn make_positive(v: &Vass, rf: &LinMap) -> Result<LinMap, LinearError> {
    match check_linmap(v, rf).map(|r| r.role) {
        Ok(Role::Rf | Role::PositiveRf) => {}
        _ => return Err(LinearError::NotRanking),
    }
    let eps = positivity_epsilon(v);
    let two = Rational::from_integer(2.into());
    let g = LinMap {
        normal: rf.normal.iter().map(|c| &two * c + &eps).collect(),
        weights: rf.weights.iter().map(|w| &two * w).collect(),
    };
    debug_assert_eq!(check_linmap(v, &g).map(|r| r.role), Ok(Role::PositiveRf));
    Ok(g)
}

#[derive(Clone, Debug)]
pub struct ComponentLinear {
    pub component: Vass,
    pub result: LinearResult,
}

#[derive(Clone, Debug)]
pub struct GeneralLinear {
    /// True iff every SCC has linear termination time.
    pub linear: bool,
    pub components: Vec<ComponentLinear>,
}

/// Linearity of an arbitrary VASS, decided SCC by SCC.
pub fn analyze_linear_general(v: &Vass) -> GeneralLinear {
    let components: Vec<ComponentLinear> = graph::sccs(v, None)
        .into_iter()
        .map(|component| {
            let result = analyze_linear(&component).expect("SCCs are strongly connected");
            ComponentLinear { component, result }
        })
        .collect();
    GeneralLinear {
        linear: components.iter().all(|c| c.result.is_bounded()),
        components,
    }
}

/// A computation: the start configuration, the transitions taken (by id) and every
/// configuration visited (`transitions.len() + 1` entries).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Computation {
    pub start: Config,
    pub transitions: Vec<usize>,
    pub configs: Vec<Config>,
}

impl Computation {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    /// Re-executes the transitions from `start`; `None` if some step is disabled.
    pub fn replay(&self, v: &Vass) -> Option<Config> {
        let mut c = self.start.clone();
        for &id in &self.transitions {
            c = v.fire(&c, v.transition_by_id(id)?)?;
        }
        Some(c)
    }
}

/// Builds a long computation from `p·(n,…,n)` out of an optimal point `flow` of the
/// linear-time LP: the integer multi-cycle `M` of `m·flow` (`m` = lcm of denominators)
/// is spliced `⌊√n⌋` times into a covering cycle `C`, each simple cycle of `M`
/// inserted where its start state is first visited. The resulting cycle `C'` is run
///
/// ```text
/// n' = ⌊(n - (l + ⌊√n⌋·c·m)·maxup) / (maxup·l + m·⌊√n⌋)⌋
/// ```
///
/// times, where `l = |C|`. The length `n'·|C'|` approaches `c·n`.
pub fn build_linear_witness(
    v: &Vass,
    flow: &[Rational],
    n: u64,
) -> Result<Computation, LinearError> {
    if !graph::is_strongly_connected(v) {
        return Err(LinearError::NotStronglyConnected);
    }
    let lp = linear_lp_unchecked(v);
    if !lp.is_feasible(flow) || !flow.iter().any(|x| x.is_positive()) {
        return Err(LinearError::InvalidFlow);
    }
    let (mu, m) = scale_to_integer(flow);
    let multicycle = extract_multicycle(v, &mu)?;
    let cover = covering_cycle(v)?;
    let l = BigInt::from(cover.len());
    let sqrt_n = n.isqrt();
    let s = BigInt::from(sqrt_n);
    let cm: BigInt = mu.iter().sum();
    let maxup = v.max_update();

    let numerator = BigInt::from(n) - (&l + &s * &cm) * &maxup;
    let denominator = &maxup * &l + &m * &s;
    let repetitions = if denominator.is_positive() {
        numerator.div_floor(&denominator)
    } else {
        BigInt::zero()
    };
    let repetitions = repetitions.to_i64().unwrap_or(i64::MAX);
    if repetitions < 1 {
        return Err(LinearError::BelowThreshold { n, repetitions });
    }

    let round = splice(v, &cover, &multicycle, sqrt_n)?;
    let mut transitions = Vec::with_capacity(round.len() * repetitions as usize);
    for _ in 0..repetitions {
        transitions.extend_from_slice(&round);
    }
    let start = Config::uniform(cover.start, v.dim(), n);
    let mut configs = Vec::with_capacity(transitions.len() + 1);
    configs.push(start.clone());
    for (step, &id) in transitions.iter().enumerate() {
        let t = v.transition_by_id(id).expect("own transition");
        let next = v
            .fire(configs.last().expect("non-empty"), t)
            .ok_or(LinearError::NotExecutable(step))?;
        configs.push(next);
    }
    Ok(Computation {
        start,
        transitions,
        configs,
    })
}

/// `copies` copies of every cycle of `m` inserted into `cover` at the first visit of
/// the cycle's start state.
fn splice(
    v: &Vass,
    cover: &Path,
    m: &graph::MultiCycle,
    copies: u64,
) -> Result<Vec<usize>, LinearError> {
    let states = cover.states(v)?;
    let mut pending: Vec<(usize, &Vec<usize>, u64)> = m
        .cycles()
        .map(|(c, k)| {
            let start = v.transition_by_id(c[0]).expect("own transition").source;
            (start, c, k * copies)
        })
        .collect();
    let mut out = Vec::new();
    for (i, &here) in states[..cover.len()].iter().enumerate() {
        pending.retain(|(start, cycle, count)| {
            if *start != here {
                return true;
            }
            for _ in 0..*count {
                out.extend_from_slice(cycle);
            }
            false
        });
        out.push(cover.transitions[i]);
    }
    debug_assert!(pending.is_empty(), "covering cycle visits every state");
    Ok(out)
}
