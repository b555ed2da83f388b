//! Risk measures on payoff vectors and their conjugates.
//!
//! Payoffs `x ∈ ℝᴺ` are indexed by atoms with probabilities `p`. Both risk
//! measures decrease in `x`. Their conjugates live on `y = −q` where `q` is
//! a probability vector absolutely continuous w.r.t. `p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskFn<T> {
    pub probs: Vec<T>,
    /// CVaR level `α ∈ (0, 1]` or entropic aversion `γ > 0`.
    pub param: T,
}

fn feas_tol<T: Scalar>(n: usize) -> T {
    T::epsilon() * T::lit(64.0) * T::lit(n as f64 + 1.0)
}

impl<T: Scalar> RiskFn<T> {
    fn checked(probs: Vec<T>, param: T) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidSpace("risk measure over zero atoms".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < T::zero()) {
            return Err(Error::InvalidSpace("probabilities must be finite and nonnegative".into()));
        }
        let total = probs.iter().fold(T::zero(), |a, &b| a + b);
        if (total - T::one()).abs() > T::lit(1e-9) {
            return Err(Error::InvalidSpace(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { probs, param })
    }

    pub fn cvar(probs: Vec<T>, alpha: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha <= T::one()) {
            return Err(Error::InvalidFunction(format!("CVaR level {alpha} outside (0, 1]")));
        }
        Self::checked(probs, alpha)
    }

    pub fn entropic(probs: Vec<T>, gamma: T) -> Result<Self> {
        if !(gamma > T::zero() && gamma.is_finite()) {
            return Err(Error::InvalidFunction(format!("entropic parameter {gamma} must be positive")));
        }
        Self::checked(probs, gamma)
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    /// Density weights `q` attaining `CVaR_α(−x) = Σ qⱼ(−xⱼ)`.
    pub fn cvar_weights(&self, x: &[T]) -> Vec<T> {
        let mut order: Vec<usize> = (0..x.len()).filter(|&j| self.probs[j] > T::zero()).collect();
        // largest loss first; ties by index for determinism
        order.sort_by(|&i, &j| x[i].partial_cmp(&x[j]).unwrap().then(i.cmp(&j)));
        let mut q = vec![T::zero(); x.len()];
        let mut left = T::one();
        for j in order {
            if left <= T::zero() {
                break;
            }
            let take = (self.probs[j] / self.param).min(left);
            q[j] = take;
            left = left - take;
        }
        q
    }

    pub fn cvar_eval(&self, x: &[T]) -> T {
        self.cvar_weights(x)
            .iter()
            .zip(x)
            .fold(T::zero(), |acc, (&q, &v)| acc - q * v)
    }

    /// Indicator of `{−q : 0 ≤ qⱼ ≤ pⱼ/α, Σ q = 1}`.
    pub fn envelope_eval(&self, y: &[T]) -> T {
        let tol = feas_tol::<T>(y.len());
        let mut total = T::zero();
        for (&v, &p) in y.iter().zip(&self.probs) {
            let q = -v;
            let cap = p / self.param;
            if q < -tol || q > cap + tol * T::one().max(cap) {
                return T::infinity();
            }
            total = total + q;
        }
        if (total - T::one()).abs() > tol {
            return T::infinity();
        }
        T::zero()
    }

    /// Gibbs weights `qⱼ ∝ pⱼ e^{−γxⱼ}`.
    pub fn gibbs_weights(&self, x: &[T]) -> Vec<T> {
        let g = self.param;
        let m = x
            .iter()
            .zip(&self.probs)
            .filter(|(_, p)| **p > T::zero())
            .fold(T::neg_infinity(), |m, (&v, _)| m.max(-g * v));
        let w: Vec<T> = x
            .iter()
            .zip(&self.probs)
            .map(|(&v, &p)| if p > T::zero() { p * (-g * v - m).exp() } else { T::zero() })
            .collect();
        let s = w.iter().fold(T::zero(), |a, &b| a + b);
        w.into_iter().map(|v| v / s).collect()
    }

    pub fn entropic_eval(&self, x: &[T]) -> T {
        let g = self.param;
        let m = x
            .iter()
            .zip(&self.probs)
            .filter(|(_, p)| **p > T::zero())
            .fold(T::neg_infinity(), |m, (&v, _)| m.max(-g * v));
        let s = x
            .iter()
            .zip(&self.probs)
            .filter(|(_, p)| **p > T::zero())
            .fold(T::zero(), |a, (&v, &p)| a + p * (-g * v - m).exp());
        (m + s.ln()) / g
    }

    /// `(1/γ) Σ qⱼ log(qⱼ/pⱼ)` at `q = −y`, `+∞` off the simplex.
    pub fn relative_entropy_eval(&self, y: &[T]) -> T {
        let tol = feas_tol::<T>(y.len());
        let mut total = T::zero();
        let mut acc = T::zero();
        for (&v, &p) in y.iter().zip(&self.probs) {
            let q = -v;
            if q < -tol || (p == T::zero() && q > tol) {
                return T::infinity();
            }
            if q > T::zero() && p > T::zero() {
                acc = acc + q * (q / p).ln();
            }
            total = total + q;
        }
        if (total - T::one()).abs() > tol {
            return T::infinity();
        }
        acc / self.param
    }
}
