//! Exact rational scalars, vectors and labelled matrices.
//!
//! Everything is backed by [`num::BigRational`], which keeps values in
//! lowest terms with a positive denominator after every operation.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

pub type Rational = BigRational;
pub type RatVec = Vec<Rational>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_vec(xs: &[i64]) -> RatVec {
    xs.iter().map(|&x| rat(x)).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_integral(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_integer())
}

/// Parses `p/q` or `p` into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Canonical `p/q` rendering (the denominator is always printed).
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Dense matrix over the rationals with row and column labels.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
}

impl RatMatrix {
    pub fn zeros(row_labels: Vec<String>, col_labels: Vec<String>) -> Self {
        let rows = row_labels.len();
        let cols = col_labels.len();
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
            row_labels,
            col_labels,
        }
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = RatMatrix::zeros(
            (0..rows.len()).map(|i| i.to_string()).collect(),
            (0..cols).map(|j| j.to_string()).collect(),
        );
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Rational) {
        self.data[i * self.cols + j] = x;
    }

    /// Looks an entry up by its row and column labels.
    pub fn at(&self, row: &str, col: &str) -> Option<&Rational> {
        let i = self.row_labels.iter().position(|l| l == row)?;
        let j = self.col_labels.iter().position(|l| l == col)?;
        Some(self.get(i, j))
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> RatVec {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul_vec(&self, x: &[Rational]) -> RatVec {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `yᵀ·M`
    pub fn vec_mul(&self, y: &[Rational]) -> RatVec {
        assert_eq!(y.len(), self.rows);
        (0..self.cols)
            .map(|j| (0..self.rows).fold(Rational::zero(), |acc, i| acc + &y[i] * self.get(i, j)))
            .collect()
    }

    pub fn to_rows(&self) -> Vec<RatVec> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  {}: [{}]", self.row_labels[i], row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Rank of a set of rational vectors (all of the same length).
pub fn rank(vectors: &[RatVec]) -> usize {
    let mut rows: Vec<RatVec> = vectors.to_vec();
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        let p = &pivot_row[col];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = &row[col] / p;
                for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= &factor * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn is_nonneg(v: &[Rational]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

pub fn one() -> Rational {
    Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("-4"), Some(rat(-4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(format_rational(&rat(3)), "3/1");
        assert_eq!(format_rational(&ratio(-2, 4)), "-1/2");
    }

    #[test]
    fn rank_of_dependent_rows() {
        let vs = vec![
            rat_vec(&[1, 2, 3]),
            rat_vec(&[2, 4, 6]),
            rat_vec(&[0, 1, 0]),
        ];
        assert_eq!(rank(&vs), 2);
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[rat_vec(&[0, 0])]), 0);
    }

    #[test]
    fn labelled_lookup() {
        let mut m = RatMatrix::zeros(vec!["a".into()], vec!["x".into(), "y".into()]);
        m.set(0, 1, rat(5));
        assert_eq!(m.at("a", "y"), Some(&rat(5)));
        assert_eq!(m.at("b", "y"), None);
        assert_eq!(m.vec_mul(&[rat(2)]), rat_vec(&[0, 10]));
    }
}
