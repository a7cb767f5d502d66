//! Exact rational linear programming.
//!
//! Problems are `max cᵀx` subject to `A·x ≤ b`, `C·x = d` and per-variable sign
//! constraints (`x_j ≥ 0` or free). [`solve_lp`] runs a dense two-phase simplex
//! with Bland's rule over [`BigRational`](num::BigRational), so outcomes are exact
//! and deterministic.
//!
//! Dual convention: [`LpOutcome::Optimal::dual`] lists one value per inequality
//! row (in insertion order, `≥ 0`) followed by one value per equality row (free).
//! A dual vector `(y, z)` is feasible when `Aᵀy + Cᵀz ≥ c` on non-negative
//! variables and `= c` on free ones; its objective is `bᵀy + dᵀz`.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::rational::{dot, RatVec, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub coeffs: RatVec,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpProblem {
    objective: RatVec,
    inequalities: Vec<Row>,
    equalities: Vec<Row>,
    bounds: Vec<VarBound>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded {
        ray: RatVec,
    },
    Optimal {
        point: RatVec,
        value: Rational,
        dual: RatVec,
    },
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }

    pub fn point(&self) -> Option<&RatVec> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

impl LpProblem {
    /// A problem over `vars` non-negative variables with zero objective and no rows.
    pub fn new(vars: usize) -> Self {
        LpProblem {
            objective: vec![Rational::zero(); vars],
            inequalities: Vec::new(),
            equalities: Vec::new(),
            bounds: vec![VarBound::NonNegative; vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.bounds.len()
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn inequalities(&self) -> &[Row] {
        &self.inequalities
    }

    pub fn equalities(&self) -> &[Row] {
        &self.equalities
    }

    pub fn bounds(&self) -> &[VarBound] {
        &self.bounds
    }

    pub fn maximize(&mut self, objective: RatVec) -> &mut Self {
        assert_eq!(objective.len(), self.num_vars(), "objective length");
        self.objective = objective;
        self
    }

    pub fn set_objective(&mut self, var: usize, coeff: Rational) -> &mut Self {
        self.objective[var] = coeff;
        self
    }

    pub fn free(&mut self, var: usize) -> &mut Self {
        self.bounds[var] = VarBound::Free;
        self
    }

    /// Adds `coeffs·x ≤ rhs`; returns the row's index among inequalities.
    pub fn add_le(&mut self, coeffs: RatVec, rhs: Rational) -> usize {
        assert_eq!(coeffs.len(), self.num_vars(), "row length");
        self.inequalities.push(Row { coeffs, rhs });
        self.inequalities.len() - 1
    }

    /// Adds `coeffs·x ≥ rhs`, stored as `-coeffs·x ≤ -rhs`.
    pub fn add_ge(&mut self, coeffs: RatVec, rhs: Rational) -> usize {
        self.add_le(coeffs.into_iter().map(|x| -x).collect(), -rhs)
    }

    /// Adds `coeffs·x = rhs`; returns the row's index among equalities.
    pub fn add_eq(&mut self, coeffs: RatVec, rhs: Rational) -> usize {
        assert_eq!(coeffs.len(), self.num_vars(), "row length");
        self.equalities.push(Row { coeffs, rhs });
        self.equalities.len() - 1
    }

    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.sign_ok(x)
            && self.inequalities.iter().all(|r| dot(&r.coeffs, x) <= r.rhs)
            && self.equalities.iter().all(|r| dot(&r.coeffs, x) == r.rhs)
    }

    fn sign_ok(&self, x: &[Rational]) -> bool {
        x.iter()
            .zip(&self.bounds)
            .all(|(v, b)| *b == VarBound::Free || !v.is_negative())
    }

    /// `A·r ≤ 0`, `C·r = 0`, sign constraints and `cᵀr > 0`.
    pub fn is_improving_ray(&self, r: &[Rational]) -> bool {
        r.len() == self.num_vars()
            && self.sign_ok(r)
            && self
                .inequalities
                .iter()
                .all(|row| !dot(&row.coeffs, r).is_positive())
            && self
                .equalities
                .iter()
                .all(|row| dot(&row.coeffs, r).is_zero())
            && dot(&self.objective, r).is_positive()
    }

    pub fn dual_objective(&self, dual: &[Rational]) -> Rational {
        self.inequalities
            .iter()
            .chain(&self.equalities)
            .zip(dual)
            .fold(Rational::zero(), |acc, (row, y)| acc + &row.rhs * y)
    }

    pub fn is_dual_feasible(&self, dual: &[Rational]) -> bool {
        let m = self.inequalities.len();
        if dual.len() != m + self.equalities.len() || dual[..m].iter().any(|y| y.is_negative()) {
            return false;
        }
        (0..self.num_vars()).all(|j| {
            let lhs = self
                .inequalities
                .iter()
                .chain(&self.equalities)
                .zip(dual)
                .fold(Rational::zero(), |acc, (row, y)| acc + &row.coeffs[j] * y);
            match self.bounds[j] {
                VarBound::NonNegative => lhs >= self.objective[j],
                VarBound::Free => lhs == self.objective[j],
            }
        })
    }
}

/// Dense simplex tableau in standard form. Columns: structural (free variables split
/// into `+`/`-` parts), one slack per inequality, one artificial per row.
struct Tableau {
    rows: Vec<RatVec>,
    cost: RatVec,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for x in self.rows[r].iter_mut() {
                *x /= &p;
            }
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut RatVec| {
            let f = row[c].clone();
            if !f.is_zero() {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.basis[r] = c;
    }

    /// Installs `costs` (length `width`) as the objective and prices out the basis.
    fn set_costs(&mut self, costs: RatVec) {
        self.cost = costs;
        self.cost.push(Rational::zero());
        for i in 0..self.rows.len() {
            let f = self.cost[self.basis[i]].clone();
            if !f.is_zero() {
                for (x, y) in self.cost.iter_mut().zip(&self.rows[i]) {
                    *x -= &f * y;
                }
            }
        }
    }

    /// Bland's rule: lowest-index improving column enters; ties in the ratio test go to
    /// the lowest-index basic variable. Returns the entering column on unboundedness.
    fn run(&mut self, allowed: impl Fn(usize) -> bool) -> Result<(), usize> {
        loop {
            let Some(enter) = (0..self.width).find(|&j| allowed(j) && self.cost[j].is_positive())
            else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if a.is_positive() {
                    let ratio = self.rhs(i) / a;
                    let better = match &leave {
                        None => true,
                        Some((l, best)) => {
                            ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return Err(enter),
            }
        }
    }

    fn value_of(&self, col: usize) -> Rational {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map_or_else(Rational::zero, |i| self.rhs(i).clone())
    }
}

/// Solves `p` exactly.
pub fn solve_lp(p: &LpProblem) -> LpOutcome {
    let n = p.num_vars();
    // structural columns: (original var, sign)
    let mut structural: Vec<(usize, bool)> = Vec::new();
    for (j, b) in p.bounds.iter().enumerate() {
        structural.push((j, true));
        if *b == VarBound::Free {
            structural.push((j, false));
        }
    }
    let ns = structural.len();
    let m_le = p.inequalities.len();
    let m = m_le + p.equalities.len();
    let slack0 = ns;
    let art0 = ns + m_le;
    let width = art0 + m;

    let mut signs = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    for (i, row) in p.inequalities.iter().chain(&p.equalities).enumerate() {
        let mut r = vec![Rational::zero(); width + 1];
        for (c, &(j, plus)) in structural.iter().enumerate() {
            r[c] = if plus {
                row.coeffs[j].clone()
            } else {
                -row.coeffs[j].clone()
            };
        }
        if i < m_le {
            r[slack0 + i] = Rational::one();
        }
        r[width] = row.rhs.clone();
        let flip = row.rhs.is_negative();
        if flip {
            for x in r.iter_mut() {
                *x = -x.clone();
            }
        }
        r[art0 + i] = Rational::one();
        signs.push(if flip {
            -Rational::one()
        } else {
            Rational::one()
        });
        rows.push(r);
    }

    let mut t = Tableau {
        rows,
        cost: Vec::new(),
        basis: (art0..width).collect(),
        width,
    };

    // phase 1: maximize minus the sum of artificials
    let mut phase1 = vec![Rational::zero(); width];
    for c in phase1.iter_mut().skip(art0) {
        *c = -Rational::one();
    }
    t.set_costs(phase1);
    t.run(|_| true).expect("phase 1 is bounded");
    if !t.cost[width].is_zero() {
        return LpOutcome::Infeasible;
    }
    for i in 0..m {
        if t.basis[i] >= art0 {
            if let Some(c) = (0..art0).find(|&c| !t.rows[i][c].is_zero()) {
                t.pivot(i, c);
            }
            // otherwise the row is redundant and stays inert
        }
    }

    // phase 2
    let mut costs = vec![Rational::zero(); width];
    for (c, &(j, plus)) in structural.iter().enumerate() {
        costs[c] = if plus {
            p.objective[j].clone()
        } else {
            -p.objective[j].clone()
        };
    }
    t.set_costs(costs);
    let to_original = |vals: &dyn Fn(usize) -> Rational| -> RatVec {
        let mut x = vec![Rational::zero(); n];
        for (c, &(j, plus)) in structural.iter().enumerate() {
            let v = vals(c);
            if plus {
                x[j] += v;
            } else {
                x[j] -= v;
            }
        }
        x
    };
    match t.run(|c| c < art0) {
        Err(enter) => {
            let ray = to_original(&|c| {
                if c == enter {
                    Rational::one()
                } else {
                    t.basis
                        .iter()
                        .position(|&b| b == c)
                        .map_or_else(Rational::zero, |i| -t.rows[i][enter].clone())
                }
            });
            LpOutcome::Unbounded { ray }
        }
        Ok(()) => {
            let point = to_original(&|c| t.value_of(c));
            let value = -t.cost[width].clone();
            let dual = (0..m)
                .map(|i| -t.cost[art0 + i].clone() * &signs[i])
                .collect();
            LpOutcome::Optimal { point, value, dual }
        }
    }
}

/// Scales a rational vector by the lcm `m` of its denominators; returns `(m·v, m)`.
pub fn scale_to_integer(v: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let m = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints = v
        .iter()
        .map(|x| (x * Rational::from_integer(m.clone())).to_integer())
        .collect();
    (ints, m)
}
