use std::fmt;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::verdict::Verdict;

/// A square matrix of expressions, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExprMatrix {
    n: usize,
    data: Vec<Expr>,
}

impl ExprMatrix {
    pub fn zero(n: usize) -> Self {
        ExprMatrix {
            n,
            data: vec![Expr::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, Expr::one());
        }
        m
    }

    /// The 1×1 matrix `[e]`.
    pub fn scalar(e: Expr) -> Self {
        ExprMatrix {
            n: 1,
            data: vec![e],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Expr>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!(
                "matrix must be square and nonempty, got {} rows of lengths {:?}",
                n,
                rows.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        Ok(ExprMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &Expr {
        &self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: Expr) {
        self.data[r * self.n + c] = e;
    }

    pub fn entries(&self) -> impl Iterator<Item = &Expr> {
        self.data.iter()
    }

    pub fn rows(&self) -> Vec<Vec<Expr>> {
        self.data.chunks(self.n).map(<[Expr]>::to_vec).collect()
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        ExprMatrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&Expr, &Expr) -> Expr) -> Self {
        assert_eq!(self.n, other.n, "matrix size mismatch");
        ExprMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, f: &Expr) -> Self {
        self.map(|e| e * f)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix size mismatch");
        let n = self.n;
        let mut out = Self::zero(n);
        for r in 0..n {
            for c in 0..n {
                let e: Expr = (0..n)
                    .filter(|&k| {
                        !self.get(r, k).is_exact_zero() && !other.get(k, c).is_exact_zero()
                    })
                    .map(|k| self.get(r, k) * other.get(k, c))
                    .sum();
                out.set(r, c, e);
            }
        }
        out
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn mul_vec(&self, v: &[Expr]) -> Vec<Expr> {
        assert_eq!(self.n, v.len(), "matrix-vector size mismatch");
        (0..self.n)
            .map(|r| {
                (0..self.n)
                    .filter(|&c| !self.get(r, c).is_exact_zero())
                    .map(|c| self.get(r, c) * &v[c])
                    .sum()
            })
            .collect()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.data.iter().all(Expr::is_exact_zero)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn vanishes(&self) -> Verdict {
        Verdict::all_vanish(&self.data)
    }

    /// Upper or lower triangular with unit diagonal.
    pub fn is_unipotent(&self) -> bool {
        let n = self.n;
        let diag = (0..n).all(|i| self.get(i, i).is_one());
        let upper = (0..n).all(|r| (0..r).all(|c| self.get(r, c).is_exact_zero()));
        let lower = (0..n).all(|r| (r + 1..n).all(|c| self.get(r, c).is_exact_zero()));
        diag && (upper || lower)
    }

    /// Inverse of a unipotent matrix `I + N` as the finite series `Σ (−N)^k`.
    pub fn unipotent_inverse(&self) -> Option<Self> {
        if !self.is_unipotent() {
            return None;
        }
        let id = Self::identity(self.n);
        let minus_n = id.sub(self);
        let mut term = id.clone();
        let mut acc = id;
        for _ in 1..self.n {
            term = term.mul(&minus_n);
            acc = acc.add(&term);
        }
        Some(acc)
    }
}

impl fmt::Display for ExprMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (r, row) in self.data.chunks(self.n).enumerate() {
            if r > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (c, e) in row.iter().enumerate() {
                if c > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}
