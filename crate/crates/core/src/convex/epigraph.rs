//! Epigraphs of closed convex functions on ℝ as finite halfplane systems.

use serde::{Deserialize, Serialize};

use super::func::ConvexFn;
use super::pwl::Pwl;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `{(x, t) : alpha·t ≥ a·x + c}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Halfplane<T> {
    pub alpha: T,
    pub a: T,
    pub c: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Epigraph1D<T> {
    pub halfplanes: Vec<Halfplane<T>>,
}

impl<T: Scalar> Epigraph1D<T> {
    /// The epigraph of a closed piecewise-linear function.
    pub fn of(f: &Pwl<T>) -> Self {
        let b = f.breakpoints();
        let s = f.slopes();
        let vals = f.breakpoint_values();
        let mut halfplanes = Vec::new();
        if b.is_empty() {
            let (_, v0) = f.reference_point();
            halfplanes.push(Halfplane { alpha: T::one(), a: s[0], c: v0 });
        }
        for (j, &sj) in s.iter().enumerate() {
            if !sj.is_finite() {
                // domain wall at the adjacent breakpoint
                let w = if j == 0 { b[0] } else { b[j - 1] };
                let (a, c) = if j == 0 { (-T::one(), w) } else { (T::one(), -w) };
                halfplanes.push(Halfplane { alpha: T::zero(), a, c });
                continue;
            }
            if b.is_empty() {
                continue;
            }
            let k = if j == 0 { 0 } else { j - 1 };
            halfplanes.push(Halfplane {
                alpha: T::one(),
                a: sj,
                c: vals[k] - sj * b[k],
            });
        }
        if halfplanes.iter().all(|h| h.alpha == T::zero()) {
            halfplanes.push(Halfplane { alpha: T::one(), a: T::zero(), c: vals[0] });
        }
        Self { halfplanes }
    }

    pub fn contains(&self, x: T, t: T) -> bool {
        self.halfplanes.iter().all(|h| h.alpha * t >= h.a * x + h.c)
    }
}

/// The function whose epigraph is `H`: `F(x) = inf {t : (x, t) ∈ H}`.
pub fn from_epigraph<T: Scalar>(h: &Epigraph1D<T>) -> Result<ConvexFn<T>> {
    let (mut lo, mut hi) = (T::neg_infinity(), T::infinity());
    let mut lines: Vec<(T, T)> = Vec::new();
    for (i, p) in h.halfplanes.iter().enumerate() {
        if !(p.alpha.is_finite() && p.a.is_finite() && p.c.is_finite()) {
            return Err(Error::InvalidEpigraph(format!("halfplane {i} has non-finite data")));
        }
        if p.alpha < T::zero() {
            return Err(Error::InvalidEpigraph(format!(
                "halfplane {i} bounds t from above; the set is not upward-stable"
            )));
        }
        if p.alpha > T::zero() {
            lines.push((p.a / p.alpha, p.c / p.alpha));
        } else if p.a > T::zero() {
            hi = hi.min(-p.c / p.a);
        } else if p.a < T::zero() {
            lo = lo.max(-p.c / p.a);
        } else if p.c > T::zero() {
            return Err(Error::InvalidEpigraph(format!("halfplane {i} is empty")));
        }
    }
    if lo > hi {
        return Err(Error::InvalidEpigraph("empty set".into()));
    }
    if lines.is_empty() {
        return Err(Error::Improper("no lower bound on t; the function is −∞".into()));
    }
    // max of lines = conjugate of the hull of (slope, −intercept)
    lines.sort_by(|u, v| u.0.partial_cmp(&v.0).unwrap().then(v.1.partial_cmp(&u.1).unwrap()));
    lines.dedup_by(|later, kept| later.0 == kept.0);
    let xs: Vec<T> = lines.iter().map(|l| l.0).collect();
    let vs: Vec<T> = lines.iter().map(|l| -l.1).collect();
    let max_lines = Pwl::lower_hull(&xs, &vs)?.conjugate();
    let f = if lo.is_finite() || hi.is_finite() {
        max_lines
            .add(&Pwl::indicator(lo, hi)?)
            .map_err(|_| Error::InvalidEpigraph("empty set".into()))?
    } else {
        max_lines
    };
    Ok(ConvexFn::Pwl(f))
}
