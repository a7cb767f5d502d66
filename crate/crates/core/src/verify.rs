//! Independent checkers for analysis witnesses, plus small-scale validators for
//! the cycle-effect set `Inc`, the half-space alternative and cycle compensation.

use std::collections::BTreeSet;

use num::{BigInt, One, Signed, Zero};
use thiserror::Error;

use crate::graph::{is_simple_cycle, MultiCycle};
use crate::linear::LinMap;
use crate::model::Vass;
use crate::rational::{dot, RatVec, Rational};
use crate::ratlp::{scale_to_integer, solve_lp, LpOutcome, LpProblem};

/// Default bound on the number of simple cycles enumerated by [`inc_set`].
pub const INC_CAP: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("linear map has dimension ({normal}, {weights}), expected ({dim}, {states})")]
    DimensionMismatch {
        normal: usize,
        weights: usize,
        dim: usize,
        states: usize,
    },
    #[error("vector has length {found}, expected {expected}")]
    VectorLength { expected: usize, found: usize },
    #[error("linear map is not a quasi-ranking function")]
    NotQuasiRanking,
    #[error("cycle effect is not orthogonal to the normal of the linear map")]
    NotNeutral,
    #[error("more than {0} simple cycles")]
    TooManyCycles(usize),
    #[error("half-space test returned both or neither alternative")]
    Inconsistent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Rf,
    Qrf,
    PositiveQrf,
    PositiveRf,
    None,
}

impl Role {
    pub fn is_ranking(self) -> bool {
        matches!(self, Role::Rf | Role::PositiveRf)
    }

    pub fn is_quasi_ranking(self) -> bool {
        self != Role::None
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Role::PositiveQrf | Role::PositiveRf)
    }

    pub fn name(self) -> &'static str {
        match self {
            Role::Rf => "RF",
            Role::Qrf => "QRF",
            Role::PositiveQrf => "PositiveQRF",
            Role::PositiveRf => "PositiveRF",
            Role::None => "None",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyResult {
    pub ok: bool,
    pub role: Role,
    /// Column value per transition position (empty for multi-cycle checks).
    pub columns: RatVec,
    /// Transition ids with column `≤ -1`.
    pub ranked: Vec<usize>,
    /// Transition ids with column `= 0`.
    pub neutral: Vec<usize>,
    /// Effect of the checked multi-cycle.
    pub effect: Option<Vec<BigInt>>,
    pub failures: Vec<String>,
}

/// Classifies `f` by its column values: ranked (`≤ -1`), neutral (`= 0`) or
/// neither, and by the sign of its normal.
pub fn check_linmap(v: &Vass, f: &LinMap) -> Result<VerifyResult, VerifyError> {
    if !f.is_dimension_compatible(v) {
        return Err(VerifyError::DimensionMismatch {
            normal: f.normal.len(),
            weights: f.weights.len(),
            dim: v.dim(),
            states: v.num_states(),
        });
    }
    let columns = f.column_values(v);
    let minus_one = -Rational::one();
    let mut ranked = Vec::new();
    let mut neutral = Vec::new();
    let mut failures = Vec::new();
    for (t, x) in v.transitions().iter().zip(&columns) {
        if *x <= minus_one {
            ranked.push(t.id);
        } else if x.is_zero() {
            neutral.push(t.id);
        } else {
            failures.push(format!("transition `{}` has column value {}", t.label, x));
        }
    }
    for (i, c) in f.normal.iter().enumerate() {
        if c.is_negative() {
            failures.push(format!("normal entry {i} is negative"));
        }
    }
    let role = if !failures.is_empty() {
        Role::None
    } else {
        let positive = f.normal.iter().all(|c| c.is_positive());
        match (neutral.is_empty(), positive) {
            (true, true) => Role::PositiveRf,
            (true, false) => Role::Rf,
            (false, true) => Role::PositiveQrf,
            (false, false) => Role::Qrf,
        }
    };
    Ok(VerifyResult {
        ok: role != Role::None,
        role,
        columns,
        ranked,
        neutral,
        effect: None,
        failures,
    })
}

/// Checks that every member of `m` is a simple cycle of `v` and, if requested,
/// that the total effect is non-negative.
pub fn check_multicycle(v: &Vass, m: &MultiCycle, require_nonneg: bool) -> VerifyResult {
    let mut failures = Vec::new();
    for (cycle, _) in m.cycles() {
        if !is_simple_cycle(v, cycle) {
            failures.push(format!("{cycle:?} is not a simple cycle"));
        }
    }
    let effect = if failures.is_empty() {
        let e = m.effect(v);
        if require_nonneg && e.iter().any(Signed::is_negative) {
            failures.push(format!("effect {e:?} has a negative entry"));
        }
        Some(e)
    } else {
        None
    };
    VerifyResult {
        ok: failures.is_empty(),
        role: Role::None,
        columns: Vec::new(),
        ranked: Vec::new(),
        neutral: Vec::new(),
        effect,
        failures,
    }
}

/// All simple cycles of `v` (as transition ids, starting at their smallest state),
/// failing once more than `cap` have been found.
pub fn simple_cycles(v: &Vass, cap: usize) -> Result<Vec<Vec<usize>>, VerifyError> {
    simple_cycles_within(v, &v.transition_ids(), cap)
}

/// [`simple_cycles`] using only the transitions with ids in `keep`.
pub fn simple_cycles_within(
    v: &Vass,
    keep: &[usize],
    cap: usize,
) -> Result<Vec<Vec<usize>>, VerifyError> {
    let search = Search { v, keep, cap };
    let mut found = Vec::new();
    let mut on_path = vec![false; v.num_states()];
    let mut path = Vec::new();
    for root in 0..v.num_states() {
        on_path[root] = true;
        search.extend(root, root, &mut on_path, &mut path, &mut found)?;
        on_path[root] = false;
    }
    Ok(found)
}

struct Search<'a> {
    v: &'a Vass,
    keep: &'a [usize],
    cap: usize,
}

impl Search<'_> {
    fn extend(
        &self,
        root: usize,
        here: usize,
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
    ) -> Result<(), VerifyError> {
        for t in self.v.outgoing(here).filter(|t| self.keep.contains(&t.id)) {
            if t.target == root {
                if found.len() == self.cap {
                    return Err(VerifyError::TooManyCycles(self.cap));
                }
                let mut cycle = path.clone();
                cycle.push(t.id);
                found.push(cycle);
            } else if t.target > root && !on_path[t.target] {
                on_path[t.target] = true;
                path.push(t.id);
                let r = self.extend(root, t.target, on_path, path, found);
                path.pop();
                on_path[t.target] = false;
                r?;
            }
        }
        Ok(())
    }
}

/// `Inc`: the set of effects of simple cycles of `v`.
pub fn inc_set(v: &Vass) -> Result<BTreeSet<Vec<BigInt>>, VerifyError> {
    inc_set_capped(v, INC_CAP)
}

pub fn inc_set_capped(v: &Vass, cap: usize) -> Result<BTreeSet<Vec<BigInt>>, VerifyError> {
    inc_set_within(v, &v.transition_ids(), cap)
}

/// `Inc` of the sub-graph with transitions `keep`.
pub fn inc_set_within(
    v: &Vass,
    keep: &[usize],
    cap: usize,
) -> Result<BTreeSet<Vec<BigInt>>, VerifyError> {
    Ok(simple_cycles_within(v, keep, cap)?
        .into_iter()
        .map(|c| {
            let mut e = vec![BigInt::zero(); v.dim()];
            for id in c {
                let t = v.transition_by_id(id).expect("own transition");
                for (x, u) in e.iter_mut().zip(&t.update) {
                    *x += u;
                }
            }
            e
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Halfspace {
    /// `n ≥ 1` componentwise with `x·n ≤ -1` for every `x`.
    Normal(Vec<BigInt>),
    /// Non-negative integers `b`, not all zero, with `Σ b_i x_i ≥ 0`.
    Witness(Vec<BigInt>),
}

fn to_rat(x: &[BigInt]) -> RatVec {
    x.iter()
        .map(|a| Rational::from_integer(a.clone()))
        .collect()
}

/// Either a strictly positive normal whose open negative half-space contains all of
/// `xs`, or a non-trivial non-negative combination of `xs` that is `≥ 0`. Exactly one
/// of the two exists; both are searched for and a mismatch is reported.
pub fn halfspace_or_witness(xs: &[Vec<BigInt>], d: usize) -> Result<Halfspace, VerifyError> {
    for x in xs {
        if x.len() != d {
            return Err(VerifyError::VectorLength {
                expected: d,
                found: x.len(),
            });
        }
    }
    let rows: Vec<RatVec> = xs.iter().map(|x| to_rat(x)).collect();

    let normal = if d == 0 {
        xs.is_empty().then(Vec::new)
    } else {
        let mut lp = LpProblem::new(d);
        lp.maximize(vec![-Rational::one(); d]);
        for i in 0..d {
            let mut e = vec![Rational::zero(); d];
            e[i] = Rational::one();
            lp.add_ge(e, Rational::one());
        }
        for x in &rows {
            lp.add_le(x.clone(), -Rational::one());
        }
        match solve_lp(&lp) {
            LpOutcome::Optimal { point, .. } => Some(scale_to_integer(&point).0),
            _ => None,
        }
    };

    let witness = if xs.is_empty() {
        None
    } else {
        let k = xs.len();
        let mut lp = LpProblem::new(k);
        lp.maximize(vec![-Rational::one(); k]);
        for j in 0..d {
            lp.add_ge(
                rows.iter().map(|x| x[j].clone()).collect(),
                Rational::zero(),
            );
        }
        lp.add_ge(vec![Rational::one(); k], Rational::one());
        match solve_lp(&lp) {
            LpOutcome::Optimal { point, .. } => Some(scale_to_integer(&point).0),
            _ => None,
        }
    };

    match (normal, witness) {
        (Some(n), None) => Ok(Halfspace::Normal(n)),
        (None, Some(b)) => Ok(Halfspace::Witness(b)),
        _ => Err(VerifyError::Inconsistent),
    }
}

/// Cycle effects from `Inc` with their coefficients.
pub type Compensation = Vec<(Vec<BigInt>, Rational)>;

/// For a quasi-ranking `f` and a cycle effect `effect` with `c·effect = 0`, looks for
/// non-negative coefficients `a` over `Inc` with `effect + Σ a_i·inc_i ≥ 0`. Returns the
/// terms with non-zero coefficient, or `None` if no such combination exists.
pub fn compensation_exists(
    v: &Vass,
    f: &LinMap,
    effect: &[BigInt],
) -> Result<Option<Compensation>, VerifyError> {
    if effect.len() != v.dim() {
        return Err(VerifyError::VectorLength {
            expected: v.dim(),
            found: effect.len(),
        });
    }
    if !check_linmap(v, f)?.role.is_quasi_ranking() {
        return Err(VerifyError::NotQuasiRanking);
    }
    let e = to_rat(effect);
    if !dot(&f.normal, &e).is_zero() {
        return Err(VerifyError::NotNeutral);
    }
    if effect.iter().all(|x| !x.is_negative()) {
        return Ok(Some(Vec::new()));
    }
    let inc: Vec<Vec<BigInt>> = inc_set(v)?.into_iter().collect();
    if inc.is_empty() {
        return Ok(None);
    }
    let mut lp = LpProblem::new(inc.len());
    lp.maximize(vec![-Rational::one(); inc.len()]);
    for j in 0..v.dim() {
        let coeffs = inc
            .iter()
            .map(|x| Rational::from_integer(x[j].clone()))
            .collect();
        lp.add_ge(coeffs, -e[j].clone());
    }
    Ok(match solve_lp(&lp) {
        LpOutcome::Optimal { point, .. } => Some(
            inc.into_iter()
                .zip(point)
                .filter(|(_, a)| !a.is_zero())
                .collect(),
        ),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_vass;
    use crate::rational::{rat, rat_vec};
    use crate::samples;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn lin(c: &[i64], w: &[i64]) -> LinMap {
        LinMap {
            normal: rat_vec(c),
            weights: rat_vec(w),
        }
    }

    #[test]
    fn linmap_roles() {
        let v = samples::counter_program();
        let r = check_linmap(&v, &lin(&[3, 1], &[0, 1])).unwrap();
        assert_eq!(r.role, Role::PositiveRf);
        assert_eq!(r.columns, rat_vec(&[-1, -1, -1]));

        let r = check_linmap(&v, &lin(&[1, 1], &[0, 0])).unwrap();
        assert_eq!(r.role, Role::PositiveQrf);
        assert_eq!(r.ranked, vec![2]);
        assert_eq!(r.neutral, vec![0, 1]);

        let r = check_linmap(&v, &lin(&[1, 0], &[0, 0])).unwrap();
        assert_eq!(r.role, Role::Qrf);

        let v = samples::shared_flag_system();
        let r = check_linmap(&v, &lin(&[3, 3, 1], &[1, 0])).unwrap();
        assert_eq!(r.role, Role::PositiveQrf);
        assert_eq!(r.ranked, vec![0, 2]);
        assert_eq!(r.neutral, vec![1, 3]);
    }

    #[test]
    fn linmap_rejections() {
        let v = samples::single_loop(&[-1]);
        let half = LinMap {
            normal: vec![Rational::new(1.into(), 2.into())],
            weights: rat_vec(&[0]),
        };
        let r = check_linmap(&v, &half).unwrap();
        assert_eq!(r.role, Role::None);
        assert!(!r.ok);

        let v = samples::single_loop(&[1]);
        let r = check_linmap(&v, &lin(&[-1], &[0])).unwrap();
        assert_eq!(r.role, Role::None);

        assert!(matches!(
            check_linmap(&v, &lin(&[1, 1], &[0])),
            Err(VerifyError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn multicycles() {
        let v = samples::shared_flag_system();
        let m: MultiCycle = [(vec![1], 1), (vec![3], 1)].into_iter().collect();
        let r = check_multicycle(&v, &m, true);
        assert!(r.ok);
        assert_eq!(r.effect, Some(ints(&[0, 0, 0])));

        let v = samples::counter_program();
        let m: MultiCycle = [(vec![0, 1], 1)].into_iter().collect();
        let r = check_multicycle(&v, &m, true);
        assert!(!r.ok);
        assert_eq!(r.effect, Some(ints(&[-1, 1])));
        assert!(check_multicycle(&v, &m, false).ok);

        let r = check_multicycle(&v, &MultiCycle::new(), true);
        assert!(r.ok);
        assert_eq!(r.effect, Some(ints(&[0, 0])));

        let bogus: MultiCycle = [(vec![0], 1)].into_iter().collect();
        assert!(!check_multicycle(&v, &bogus, false).ok);
    }

    #[test]
    fn inc_examples() {
        let inc = inc_set(&samples::counter_program()).unwrap();
        assert_eq!(inc, [ints(&[-1, 1]), ints(&[0, -1])].into_iter().collect());

        let inc = inc_set(&samples::shared_flag_system()).unwrap();
        let expected = [ints(&[-1, 1, 0]), ints(&[1, -1, 0]), ints(&[-2, 1, 1])];
        assert_eq!(inc, expected.into_iter().collect());

        let v = parse_vass("vass dim 1\nstate a b\ntrans t: a -> b [1]\ntrans u: b -> a [0]\n")
            .unwrap();
        assert!(inc_set_within(&v, &[0], INC_CAP).unwrap().is_empty());
    }

    #[test]
    fn inc_cap() {
        // complete digraph on 6 states has far more than 10 simple cycles
        let mut text = String::from("vass dim 1\nstate a b c d e f\n");
        let names = ["a", "b", "c", "d", "e", "f"];
        for p in names {
            for q in names {
                if p != q {
                    text.push_str(&format!("trans {p}{q}: {p} -> {q} [0]\n"));
                }
            }
        }
        let v = parse_vass(&text).unwrap();
        assert_eq!(inc_set_capped(&v, 10), Err(VerifyError::TooManyCycles(10)));
        // 6 states: Σ_k C(6,k)·(k-1)! = 15 + 40 + 90 + 144 + 120 = 409
        assert_eq!(simple_cycles(&v, INC_CAP).unwrap().len(), 409);
    }

    #[test]
    fn halfspace_examples() {
        assert_eq!(
            halfspace_or_witness(&[ints(&[-2, 1]), ints(&[1, -2])], 2),
            Ok(Halfspace::Normal(ints(&[1, 1])))
        );
        assert_eq!(
            halfspace_or_witness(&[ints(&[-1, 1]), ints(&[1, -1])], 2),
            Ok(Halfspace::Witness(ints(&[1, 1])))
        );
        assert_eq!(
            halfspace_or_witness(&[ints(&[-1, -1])], 2),
            Ok(Halfspace::Normal(ints(&[1, 1])))
        );
        assert!(matches!(
            halfspace_or_witness(&[ints(&[0, 0])], 2),
            Ok(Halfspace::Witness(_))
        ));
        assert_eq!(
            halfspace_or_witness(&[], 2),
            Ok(Halfspace::Normal(ints(&[1, 1])))
        );
    }

    #[test]
    fn compensation_examples() {
        let v = samples::shared_flag_system();
        let f = lin(&[3, 3, 1], &[1, 0]);
        let c = compensation_exists(&v, &f, &ints(&[-1, 1, 0]))
            .unwrap()
            .unwrap();
        assert_eq!(c, vec![(ints(&[1, -1, 0]), rat(1))]);
        let c = compensation_exists(&v, &f, &ints(&[1, -1, 0]))
            .unwrap()
            .unwrap();
        assert_eq!(c, vec![(ints(&[-1, 1, 0]), rat(1))]);
        assert_eq!(
            compensation_exists(&v, &f, &ints(&[0, 0, 0])),
            Ok(Some(Vec::new()))
        );
        assert_eq!(
            compensation_exists(&v, &f, &ints(&[-2, 1, 1])),
            Err(VerifyError::NotNeutral)
        );
        assert_eq!(
            compensation_exists(&v, &lin(&[0, 0, 1], &[0, 0]), &ints(&[0, 0, 0])),
            Err(VerifyError::NotQuasiRanking)
        );
    }
}
