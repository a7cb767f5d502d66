//! The per-transition alternative: either a non-negative multi-cycle through `t`
//! (system A_t) or a quasi-ranking function that ranks `t` (system B_t), never both.
//!
//! ```text
//! A_t:  μ ≥ 0,  U·μ ≥ 0,  F·μ = 0,  μ(t) ≥ 1
//! B_t:  c ≥ 0,  w free,  cᵀU - wᵀF ≤ 0  with column t ≤ -1
//! ```

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::{extract_multicycle, MultiCycle};
use crate::linear::LinMap;
use crate::model::Vass;
use crate::rational::Rational;
use crate::ratlp::{scale_to_integer, solve_lp, LpOutcome, LpProblem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FarkasError {
    #[error("unknown transition id {0}")]
    UnknownTransition(usize),
    #[error("transition {0} has both or neither witness")]
    Inconsistent(usize),
}

/// The witness found for one transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FarkasVerdict {
    /// A multi-cycle with non-negative effect that uses the transition.
    Multicycle(MultiCycle),
    /// A quasi-ranking function under which the transition is ranked.
    Ranking(LinMap),
}

fn position(v: &Vass, t: usize) -> Result<usize, FarkasError> {
    v.position_of(t).ok_or(FarkasError::UnknownTransition(t))
}

/// System A_t over `|T|` variables; the objective minimizes `1ᵀμ` so that the
/// extracted multi-cycle is small.
pub fn system_a(v: &Vass, t: usize) -> Result<LpProblem, FarkasError> {
    let pos = position(v, t)?;
    let u = v.update_matrix();
    let f = v.incidence_matrix();
    let n = v.num_transitions();
    let mut lp = LpProblem::new(n);
    lp.maximize(vec![-Rational::one(); n]);
    for i in 0..v.dim() {
        lp.add_ge(u.row(i).to_vec(), Rational::zero());
    }
    for p in 0..v.num_states() {
        lp.add_eq(f.row(p).to_vec(), Rational::zero());
    }
    let mut e = vec![Rational::zero(); n];
    e[pos] = Rational::one();
    lp.add_ge(e, Rational::one());
    Ok(lp)
}

/// System B_t over `d + |Q|` variables `(c, w)`, `w` free, objective zero.
pub fn system_b(v: &Vass, t: usize) -> Result<LpProblem, FarkasError> {
    let pos = position(v, t)?;
    let mut lp = column_system(v);
    for (j, row) in column_rows(v).into_iter().enumerate() {
        let rhs = if j == pos {
            -Rational::one()
        } else {
            Rational::zero()
        };
        lp.add_le(row, rhs);
    }
    Ok(lp)
}

/// An LP over `(c, w)` with `c ≥ 0` and `w` free, no rows yet.
pub(crate) fn column_system(v: &Vass) -> LpProblem {
    let mut lp = LpProblem::new(v.dim() + v.num_states());
    for p in 0..v.num_states() {
        lp.free(v.dim() + p);
    }
    lp
}

/// Per transition, the coefficients of `(c, w)` in `c·u + w(target) - w(source)`.
pub(crate) fn column_rows(v: &Vass) -> Vec<Vec<Rational>> {
    let d = v.dim();
    v.transitions()
        .iter()
        .map(|t| {
            let mut row = vec![Rational::zero(); d + v.num_states()];
            for (x, u) in row.iter_mut().zip(&t.update) {
                *x = Rational::from_integer(u.clone());
            }
            row[d + t.target] += Rational::one();
            row[d + t.source] -= Rational::one();
            row
        })
        .collect()
}

pub(crate) fn split_linmap(v: &Vass, x: &[Rational]) -> LinMap {
    LinMap {
        normal: x[..v.dim()].to_vec(),
        weights: x[v.dim()..v.dim() + v.num_states()].to_vec(),
    }
}

/// Scales `f` by `1/|k|`, `k` being the negative column value closest to zero, when
/// `k > -1`; afterwards every non-neutral column is `≤ -1`.
pub(crate) fn normalize_ranked(v: &Vass, f: LinMap) -> LinMap {
    let k = f
        .column_values(v)
        .into_iter()
        .filter(|x| x.is_negative())
        .max();
    match k {
        Some(k) if k > -Rational::one() => f.scaled(&(-k).recip()),
        _ => f,
    }
}

/// A multi-cycle with `eff ≥ 0` in which `t` occurs, if A_t is feasible.
pub fn nonneg_multicycle_through(v: &Vass, t: usize) -> Result<Option<MultiCycle>, FarkasError> {
    let lp = system_a(v, t)?;
    Ok(match solve_lp(&lp) {
        LpOutcome::Optimal { point, .. } => {
            let (mu, _) = scale_to_integer(&point);
            Some(extract_multicycle(v, &mu).expect("A_t solutions are circulations"))
        }
        _ => None,
    })
}

/// A quasi-ranking function ranking `t`, if B_t is feasible.
pub fn qrf_ranking_t(v: &Vass, t: usize) -> Result<Option<LinMap>, FarkasError> {
    let lp = system_b(v, t)?;
    Ok(match solve_lp(&lp) {
        LpOutcome::Optimal { point, .. } => Some(normalize_ranked(v, split_linmap(v, &point))),
        _ => None,
    })
}

/// Solves both systems for `t` and returns the one witness that exists.
pub fn farkas_verdict(v: &Vass, t: usize) -> Result<FarkasVerdict, FarkasError> {
    match (nonneg_multicycle_through(v, t)?, qrf_ranking_t(v, t)?) {
        (Some(m), None) => Ok(FarkasVerdict::Multicycle(m)),
        (None, Some(f)) => Ok(FarkasVerdict::Ranking(f)),
        _ => Err(FarkasError::Inconsistent(t)),
    }
}

/// Union of the non-negative multi-cycles through every transition that has one.
pub fn union_nonneg_multicycle(v: &Vass) -> MultiCycle {
    let mut union = MultiCycle::new();
    for t in v.transition_ids() {
        if let Some(m) = nonneg_multicycle_through(v, t).expect("own transition") {
            union.merge(&m);
        }
    }
    union
}
