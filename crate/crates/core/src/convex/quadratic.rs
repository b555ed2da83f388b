//! Convex quadratics and coordinate boxes in ℝᵈ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot, Scalar};

/// `½ xᵀQx + bᵀx + c` with `Q` symmetric positive semidefinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadratic<T> {
    pub q: Matrix<T>,
    pub b: Vec<T>,
    pub c: T,
}

impl<T: Scalar> Quadratic<T> {
    pub fn new(q: Matrix<T>, b: Vec<T>, c: T) -> Result<Self> {
        let d = b.len();
        if d == 0 || q.rows() != d || q.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "quadratic: Q is {}x{}, b has length {d}",
                q.rows(),
                q.cols()
            )));
        }
        if q.data_iter().chain(b.iter()).chain(std::iter::once(&c)).any(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction("quadratic coefficients must be finite".into()));
        }
        let tol = T::lit(1e-9);
        if !q.is_symmetric(tol) {
            return Err(Error::InvalidFunction("Q is not symmetric".into()));
        }
        if !q.psd_rank(tol).0 {
            return Err(Error::InvalidFunction("Q is not positive semidefinite".into()));
        }
        Ok(Self { q, b, c })
    }

    /// `½ a x² + b x + c` on ℝ.
    pub fn scalar(a: T, b: T, c: T) -> Result<Self> {
        Self::new(Matrix::scalar(a), vec![b], c)
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.q.quad_form(x) / T::lit(2.0) + dot(&self.b, x) + self.c
    }

    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        self.q.mul_vec(x).iter().zip(&self.b).map(|(&u, &v)| u + v).collect()
    }

    /// Conjugate for positive definite `Q`:
    /// `(Q⁻¹, −Q⁻¹b, ½bᵀQ⁻¹b − c)`.
    pub fn conjugate(&self) -> Result<Self> {
        let (_, rank) = self.q.psd_rank(T::lit(1e-12));
        let inv = if rank == self.dim() { self.q.inverse() } else { None };
        match inv {
            Some(inv) => {
                let ib = inv.mul_vec(&self.b);
                let c = dot(&self.b, &ib) / T::lit(2.0) - self.c;
                Ok(Self {
                    q: inv,
                    b: ib.into_iter().map(|v| -v).collect(),
                    c,
                })
            }
            None => {
                let in_range = self.q.solve_consistent(&self.b).is_some();
                Err(Error::DegenerateQuadratic(format!(
                    "Q has rank {rank} < {}; b {} range(Q); the conjugate is a quadratic \
                     restricted to an affine subspace, which has no exact representation",
                    self.dim(),
                    if in_range { "lies in" } else { "lies outside" }
                )))
            }
        }
    }

    /// Infimum and a minimizer when attained.
    pub fn minimize(&self) -> (T, Option<Vec<T>>) {
        let neg: Vec<T> = self.b.iter().map(|&v| -v).collect();
        match self.q.solve_consistent(&neg) {
            Some(x) => (self.eval(&x), Some(x)),
            None => (T::neg_infinity(), None),
        }
    }
}

/// Product of closed intervals `[loᵢ, hiᵢ]`, bounds possibly infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSet<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Scalar> BoxSet<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::DimensionMismatch(format!(
                "box bounds of lengths {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        for (i, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if l.is_nan() || h.is_nan() || l > h || l == T::infinity() || h == T::neg_infinity() {
                return Err(Error::Infeasible(format!("empty box in coordinate {i}")));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn interval(lo: T, hi: T) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn point(p: Vec<T>) -> Self {
        Self { lo: p.clone(), hi: p }
    }

    pub fn whole(d: usize) -> Self {
        Self {
            lo: vec![T::neg_infinity(); d],
            hi: vec![T::infinity(); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&v, (&l, &h))| l <= v && v <= h)
    }

    /// Euclidean projection.
    pub fn project(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(&v, (&l, &h))| v.max(l).min(h))
            .collect()
    }

    /// `sup_{x ∈ B} ⟨x, y⟩`.
    pub fn support(&self, y: &[T]) -> T {
        y.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .fold(T::zero(), |acc, (&v, (&l, &h))| {
                let term = if v > T::zero() {
                    h * v
                } else if v < T::zero() {
                    l * v
                } else {
                    T::zero()
                };
                crate::scalar::ext_add(acc, term)
            })
    }

    /// Maximizers of `⟨·, y⟩` over the box, coordinatewise.
    pub fn face(&self, y: &[T]) -> Vec<(T, T)> {
        y.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(&v, (&l, &h))| {
                if v > T::zero() {
                    (h, h)
                } else if v < T::zero() {
                    (l, l)
                } else {
                    (l, h)
                }
            })
            .collect()
    }

    /// Normal cone at `x ∈ B`, coordinatewise intervals.
    pub fn normal_cone(&self, x: &[T]) -> Vec<(T, T)> {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(&v, (&l, &h))| {
                let lo = if v == l { T::neg_infinity() } else { T::zero() };
                let hi = if v == h { T::infinity() } else { T::zero() };
                (lo, hi)
            })
            .collect()
    }
}
