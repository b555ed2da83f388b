//! Closed proper convex piecewise-linear functions on ℝ.
//!
//! A function is stored by its breakpoints `b₀ < … < b_{k−1}`, the slopes
//! `s₀ ≤ … ≤ s_k` of the `k + 1` linear pieces, and a single anchor. An
//! infinite end slope (`s₀ = −∞` or `s_k = +∞`) encodes a domain wall at the
//! adjacent breakpoint.
//!
//! The anchor is a point `(x, y)` on the graph of the subdifferential
//! together with `h = f(x) − x·y/2`. Since `f*(y) = x·y − f(x) = x·y/2 − h`,
//! conjugation swaps breakpoints with slopes, swaps the anchor coordinates
//! and negates `h`. Nothing is recomputed, so `f** = f` holds bit for bit.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor<T> {
    pub x: T,
    pub y: T,
    pub h: T,
}

#[derive(Debug, Clone)]
pub struct Pwl<T> {
    breakpoints: Vec<T>,
    slopes: Vec<T>,
    anchor: Anchor<T>,
    // f at each breakpoint, derived from the anchor
    values: Vec<T>,
}

impl<T: PartialEq> PartialEq for Pwl<T> {
    fn eq(&self, other: &Self) -> bool {
        self.breakpoints == other.breakpoints
            && self.slopes == other.slopes
            && self.anchor == other.anchor
    }
}

/// Outcome of an exact one-dimensional minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Argmin1<T> {
    pub value: T,
    /// Closed argmin interval, `None` when the infimum is not attained.
    pub interval: Option<(T, T)>,
}

impl<T: Scalar> Pwl<T> {
    /// Builds and normalizes a function from breakpoints, slopes and one
    /// point `(x0, f(x0))` of its effective domain.
    pub fn new(breakpoints: Vec<T>, slopes: Vec<T>, x0: T, v0: T) -> Result<Self> {
        validate(&breakpoints, &slopes)?;
        if !x0.is_finite() || !v0.is_finite() {
            return Err(Error::Improper("anchor must be a finite point".into()));
        }
        let (lo, hi) = domain_of(&breakpoints, &slopes);
        if x0 < lo || x0 > hi {
            return Err(Error::InvalidFunction(format!(
                "anchor {x0} outside the domain [{lo}, {hi}]"
            )));
        }
        let (bps, sl) = merge_equal_slopes(breakpoints, slopes);
        let values = breakpoint_values(&bps, &sl, x0, v0);
        let (xc, yc) = canonical_corner(&bps, &sl);
        let vc = if bps.is_empty() {
            v0 + sl[0] * (xc - x0)
        } else {
            let j = bps.iter().position(|&b| b == xc).expect("corner on a breakpoint");
            values[j]
        };
        let h = vc - xc * yc / T::lit(2.0);
        Ok(Self {
            breakpoints: bps,
            slopes: sl,
            anchor: Anchor { x: xc, y: yc, h },
            values,
        })
    }

    fn from_parts(breakpoints: Vec<T>, slopes: Vec<T>, anchor: Anchor<T>) -> Self {
        let v_anchor = anchor.x * anchor.y / T::lit(2.0) + anchor.h;
        let values = breakpoint_values(&breakpoints, &slopes, anchor.x, v_anchor);
        Self {
            breakpoints,
            slopes,
            anchor,
            values,
        }
    }

    pub fn affine(slope: T, intercept: T) -> Result<Self> {
        Self::new(vec![], vec![slope], T::zero(), intercept)
    }

    /// `|x − c|`.
    pub fn abs_shifted(c: T) -> Self {
        Self::new(vec![c], vec![-T::one(), T::one()], c, T::zero()).unwrap()
    }

    pub fn abs() -> Self {
        Self::abs_shifted(T::zero())
    }

    /// Indicator of the closed interval `[lo, hi]`, bounds possibly infinite.
    pub fn indicator(lo: T, hi: T) -> Result<Self> {
        if lo > hi || lo == T::infinity() || hi == T::neg_infinity() {
            return Err(Error::Improper(format!("empty interval [{lo}, {hi}]")));
        }
        let inf = T::infinity();
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) if lo == hi => Self::new(vec![lo], vec![-inf, inf], lo, T::zero()),
            (true, true) => Self::new(vec![lo, hi], vec![-inf, T::zero(), inf], lo, T::zero()),
            (true, false) => Self::new(vec![lo], vec![-inf, T::zero()], lo, T::zero()),
            (false, true) => Self::new(vec![hi], vec![T::zero(), inf], hi, T::zero()),
            (false, false) => Self::affine(T::zero(), T::zero()),
        }
    }

    /// Support function of `[lo, hi]`: `y ↦ max(lo·y, hi·y)`.
    pub fn support_of_interval(lo: T, hi: T) -> Result<Self> {
        Ok(Self::indicator(lo, hi)?.conjugate())
    }

    /// Closed convex hull of finitely many points `(xᵢ, vᵢ)` with `+∞` outside
    /// `[min xᵢ, max xᵢ]`; infinite values are ignored.
    pub fn lower_hull(xs: &[T], vs: &[T]) -> Result<Self> {
        let pts: Vec<(T, T)> = xs
            .iter()
            .zip(vs)
            .filter(|(_, v)| v.is_finite())
            .map(|(&x, &v)| (x, v))
            .collect();
        if pts.is_empty() {
            return Err(Error::Improper("no finite sample".into()));
        }
        let hull = lower_hull_points(&pts);
        let inf = T::infinity();
        let bps: Vec<T> = hull.iter().map(|p| p.0).collect();
        let mut slopes = vec![-inf];
        for w in hull.windows(2) {
            slopes.push((w[1].1 - w[0].1) / (w[1].0 - w[0].0));
        }
        slopes.push(inf);
        // rounding can make consecutive chord slopes decrease by an ulp
        for i in 1..slopes.len() {
            if slopes[i] < slopes[i - 1] {
                slopes[i] = slopes[i - 1];
            }
        }
        Self::new(bps, slopes, hull[0].0, hull[0].1)
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[T] {
        &self.slopes
    }

    pub fn anchor(&self) -> Anchor<T> {
        self.anchor
    }

    pub fn breakpoint_values(&self) -> &[T] {
        &self.values
    }

    /// Closed effective domain `[lo, hi]`.
    pub fn domain(&self) -> (T, T) {
        domain_of(&self.breakpoints, &self.slopes)
    }

    pub fn eval(&self, x: T) -> T {
        let k = self.breakpoints.len();
        if x.is_nan() {
            return T::nan();
        }
        if k == 0 {
            return affine_value(self.anchor.h, self.slopes[0], x);
        }
        let b = &self.breakpoints;
        let s = &self.slopes;
        if x < b[0] {
            return if s[0] == T::neg_infinity() {
                T::infinity()
            } else {
                self.values[0] + s[0] * (x - b[0])
            };
        }
        if x > b[k - 1] {
            return if s[k] == T::infinity() {
                T::infinity()
            } else {
                self.values[k - 1] + s[k] * (x - b[k - 1])
            };
        }
        // b[j] ≤ x ≤ b[j+1]
        let j = b.partition_point(|&bp| bp <= x) - 1;
        if b[j] == x {
            return self.values[j];
        }
        self.values[j] + s[j + 1] * (x - b[j])
    }

    /// Slope of the piece containing `x` in its interior, or the slope
    /// interval at a breakpoint.
    pub fn subdifferential(&self, x: T) -> Option<(T, T)> {
        if !self.eval(x).is_finite() {
            return None;
        }
        let b = &self.breakpoints;
        let s = &self.slopes;
        if b.is_empty() {
            return Some((s[0], s[0]));
        }
        let j = b.partition_point(|&bp| bp < x);
        if j < b.len() && b[j] == x {
            Some((s[j], s[j + 1]))
        } else {
            Some((s[j], s[j]))
        }
    }

    pub fn conjugate(&self) -> Self {
        let s = &self.slopes;
        let k = self.breakpoints.len();
        let inf = T::infinity();
        let new_bps: Vec<T> = s.iter().copied().filter(|v| v.is_finite()).collect();
        let mut new_slopes = Vec::with_capacity(k + 2);
        if s[0].is_finite() {
            new_slopes.push(-inf);
        }
        new_slopes.extend_from_slice(&self.breakpoints);
        if s[k].is_finite() {
            new_slopes.push(inf);
        }
        let a = self.anchor;
        Self::from_parts(
            new_bps,
            new_slopes,
            Anchor {
                x: a.y,
                y: a.x,
                h: -a.h,
            },
        )
    }

    /// `f + g`; fails when the domains do not meet.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let (l1, h1) = self.domain();
        let (l2, h2) = other.domain();
        let lo = l1.max(l2);
        let hi = h1.min(h2);
        if lo > hi {
            return Err(Error::Improper(format!(
                "sum has empty domain ([{l1}, {h1}] ∩ [{l2}, {h2}])"
            )));
        }
        let mut pts: Vec<T> = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .copied()
            .filter(|&b| b >= lo && b <= hi)
            .collect();
        if lo.is_finite() {
            pts.push(lo);
        }
        if hi.is_finite() {
            pts.push(hi);
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        if pts.is_empty() {
            let s = self.slopes[0] + other.slopes[0];
            let c = self.eval(T::zero()) + other.eval(T::zero());
            return Self::affine(s, c);
        }
        let inf = T::infinity();
        let mut slopes = Vec::with_capacity(pts.len() + 1);
        slopes.push(if lo.is_finite() {
            -inf
        } else {
            self.slopes[0] + other.slopes[0]
        });
        for w in pts.windows(2) {
            let mid = (w[0] + w[1]) / T::lit(2.0);
            slopes.push(self.slope_inside(mid) + other.slope_inside(mid));
        }
        slopes.push(if hi.is_finite() {
            inf
        } else {
            *self.slopes.last().unwrap() + *other.slopes.last().unwrap()
        });
        let x0 = pts[0];
        let v0 = self.eval(x0) + other.eval(x0);
        Self::new(pts, slopes, x0, v0)
    }

    fn slope_inside(&self, x: T) -> T {
        let j = self.breakpoints.partition_point(|&bp| bp < x);
        self.slopes[j]
    }

    /// `f + c·x + d`.
    pub fn add_affine(&self, c: T, d: T) -> Self {
        let slopes = self.slopes.iter().map(|&s| s + c).collect();
        let (x0, v0) = self.reference_point();
        Self::new(self.breakpoints.clone(), slopes, x0, v0 + c * x0 + d).unwrap()
    }

    /// `λ·f` for `λ > 0`.
    pub fn scale(&self, lambda: T) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::InvalidFunction(format!("scale {lambda} must be positive")));
        }
        let slopes = self.slopes.iter().map(|&s| lambda * s).collect();
        let (x0, v0) = self.reference_point();
        Self::new(self.breakpoints.clone(), slopes, x0, lambda * v0)
    }

    /// `x ↦ f(a·x + t)`.
    pub fn compose_affine(&self, a: T, t: T) -> Result<Self> {
        if a == T::zero() {
            let v = self.eval(t);
            if !v.is_finite() {
                return Err(Error::Improper(format!("f({t}) is not finite")));
            }
            return Self::affine(T::zero(), v);
        }
        let (x0, v0) = self.reference_point();
        let mut bps: Vec<T> = self.breakpoints.iter().map(|&b| (b - t) / a).collect();
        let mut slopes: Vec<T> = self.slopes.iter().map(|&s| a * s).collect();
        if a < T::zero() {
            bps.reverse();
            slopes.reverse();
        }
        Self::new(bps, slopes, (x0 - t) / a, v0)
    }

    /// Some point of the domain with its finite value.
    pub fn reference_point(&self) -> (T, T) {
        match self.breakpoints.first() {
            Some(&b) => (b, self.values[0]),
            None => (T::zero(), self.anchor.h),
        }
    }

    pub fn minimize(&self) -> Argmin1<T> {
        let s = &self.slopes;
        let b = &self.breakpoints;
        let k = b.len();
        let ninf = T::neg_infinity();
        let inf = T::infinity();
        if k == 0 {
            return if s[0] == T::zero() {
                Argmin1 {
                    value: self.anchor.h,
                    interval: Some((ninf, inf)),
                }
            } else {
                Argmin1 {
                    value: ninf,
                    interval: None,
                }
            };
        }
        if (s[0].is_finite() && s[0] > T::zero()) || (s[k].is_finite() && s[k] < T::zero()) {
            return Argmin1 {
                value: ninf,
                interval: None,
            };
        }
        let j = s.iter().position(|&v| v >= T::zero()).expect("last slope nonnegative");
        let left = if j == 0 { ninf } else { b[j - 1] };
        let value = self.values[if j == 0 { 0 } else { j - 1 }];
        let interval = if s[j] == T::zero() {
            let right = if j == k { inf } else { b[j] };
            (left, right)
        } else {
            (left, left)
        };
        Argmin1 {
            value,
            interval: Some(interval),
        }
    }
}

fn affine_value<T: Scalar>(c: T, s: T, x: T) -> T {
    if x == T::zero() {
        c
    } else {
        c + s * x
    }
}

fn validate<T: Scalar>(b: &[T], s: &[T]) -> Result<()> {
    if s.len() != b.len() + 1 {
        return Err(Error::InvalidFunction(format!(
            "{} slopes for {} breakpoints",
            s.len(),
            b.len()
        )));
    }
    if b.iter().any(|v| !v.is_finite()) || s.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidFunction("non-finite breakpoint".into()));
    }
    if let Some(i) = b.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::InvalidFunction(format!(
            "breakpoints not strictly increasing at {}",
            i + 1
        )));
    }
    let k = b.len();
    for (i, &v) in s.iter().enumerate() {
        let ok = v.is_finite()
            || (i == 0 && v == T::neg_infinity() && k > 0)
            || (i == k && v == T::infinity() && k > 0);
        if !ok {
            return Err(Error::InvalidFunction(format!(
                "slope {i} is {v}; only the end slopes may be infinite (as domain walls)"
            )));
        }
    }
    if let Some(i) = s.windows(2).position(|w| w[0] > w[1]) {
        return Err(Error::ConvexityViolated(i));
    }
    Ok(())
}

fn domain_of<T: Scalar>(b: &[T], s: &[T]) -> (T, T) {
    let k = b.len();
    let lo = if k > 0 && s[0] == T::neg_infinity() {
        b[0]
    } else {
        T::neg_infinity()
    };
    let hi = if k > 0 && s[k] == T::infinity() {
        b[k - 1]
    } else {
        T::infinity()
    };
    (lo, hi)
}

fn merge_equal_slopes<T: Scalar>(b: Vec<T>, s: Vec<T>) -> (Vec<T>, Vec<T>) {
    let mut nb = Vec::with_capacity(b.len());
    let mut ns = vec![s[0]];
    for (j, &bp) in b.iter().enumerate() {
        if s[j + 1] != *ns.last().unwrap() {
            nb.push(bp);
            ns.push(s[j + 1]);
        }
    }
    (nb, ns)
}

fn breakpoint_values<T: Scalar>(b: &[T], s: &[T], x0: T, v0: T) -> Vec<T> {
    let k = b.len();
    if k == 0 {
        return vec![];
    }
    let mut v = vec![T::zero(); k];
    let j = b.partition_point(|&bp| bp < x0);
    let start = if j < k {
        v[j] = if b[j] == x0 { v0 } else { v0 + s[j] * (b[j] - x0) };
        j
    } else {
        v[k - 1] = v0 - s[k] * (x0 - b[k - 1]);
        k - 1
    };
    for i in start + 1..k {
        v[i] = v[i - 1] + s[i] * (b[i] - b[i - 1]);
    }
    for i in (0..start).rev() {
        v[i] = v[i + 1] - s[i + 1] * (b[i + 1] - b[i]);
    }
    v
}

/// First point with both coordinates finite on the staircase graph of the
/// subdifferential; the staircase of `f*` is the transpose, visited in the
/// same order, so the choice commutes with conjugation.
fn canonical_corner<T: Scalar>(b: &[T], s: &[T]) -> (T, T) {
    if b.is_empty() {
        return (T::zero(), s[0]);
    }
    for (j, &bp) in b.iter().enumerate() {
        if s[j].is_finite() {
            return (bp, s[j]);
        }
        if s[j + 1].is_finite() {
            return (bp, s[j + 1]);
        }
    }
    // single point indicator
    (b[0], T::zero())
}

/// Lower convex hull (Andrew's monotone chain), input in any order with
/// distinct abscissae; collinear interior points are dropped.
pub(crate) fn lower_hull_points<T: Scalar>(pts: &[(T, T)]) -> Vec<(T, T)> {
    let mut p = pts.to_vec();
    p.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
    p.dedup_by(|a, b| a.0 == b.0);
    let mut hull: Vec<(T, T)> = Vec::with_capacity(p.len());
    for &q in &p {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // remove b unless it lies strictly below the chord a-q
            let cross = (b.0 - a.0) * (q.1 - a.1) - (b.1 - a.1) * (q.0 - a.0);
            if cross <= T::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(q);
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn abs_conjugate_is_interval_indicator() {
        let f = Pwl::<f64>::abs();
        let g = f.conjugate();
        assert_eq!(g, Pwl::indicator(-1.0, 1.0).unwrap());
        assert_eq!(g.eval(0.3), 0.0);
        assert_eq!(g.eval(1.0), 0.0);
        assert_eq!(g.eval(1.5), INF);
        assert_eq!(g.conjugate(), f);
    }

    #[test]
    fn affine_and_point_indicator_swap() {
        let f = Pwl::affine(2.0, 3.0).unwrap();
        let g = f.conjugate();
        assert_eq!(g.breakpoints(), &[2.0]);
        assert_eq!(g.eval(2.0), -3.0);
        assert_eq!(g.eval(2.1), INF);
        assert_eq!(g.conjugate(), f);
    }

    #[test]
    fn eval_and_walls() {
        let f = Pwl::new(vec![0.0, 1.0], vec![-INF, 1.0, INF], 0.5, 7.0).unwrap();
        assert_eq!(f.eval(0.0), 6.5);
        assert_eq!(f.eval(1.0), 7.5);
        assert_eq!(f.eval(-0.1), INF);
        assert_eq!(f.domain(), (0.0, 1.0));
    }

    #[test]
    fn validation_messages() {
        let e = Pwl::new(vec![0.0, 1.0], vec![1.0, 0.0, 2.0], 0.0, 0.0).unwrap_err();
        assert_eq!(e, Error::ConvexityViolated(0));
        assert_eq!(e.to_string(), "convexity violated at breakpoint 0");
        assert!(Pwl::new(vec![1.0, 0.0], vec![0.0, 1.0, 2.0], 0.0, 0.0).is_err());
        assert!(Pwl::new(vec![0.0], vec![INF, INF], 0.0, 0.0).is_err());
        assert!(Pwl::new(vec![0.0], vec![-INF, 0.0], -1.0, 0.0).is_err());
    }

    #[test]
    fn normalization_merges_equal_slopes() {
        let f = Pwl::new(vec![0.0, 1.0], vec![1.0, 1.0, 2.0], 0.0, 0.0).unwrap();
        assert_eq!(f.breakpoints(), &[1.0]);
        assert_eq!(f.eval(-1.0), -1.0);
        assert_eq!(f.eval(2.0), 3.0);
    }

    #[test]
    fn minimize_cases() {
        let f = Pwl::<f64>::abs();
        assert_eq!(f.minimize().value, 0.0);
        assert_eq!(f.minimize().interval, Some((0.0, 0.0)));
        let g = Pwl::abs().add(&Pwl::indicator(2.0, 3.0).unwrap()).unwrap();
        let m = g.minimize();
        assert_eq!((m.value, m.interval), (2.0, Some((2.0, 2.0))));
        let flat = Pwl::new(vec![0.0, 1.0], vec![-1.0, 0.0, 1.0], 0.0, 0.0).unwrap();
        assert_eq!(flat.minimize().interval, Some((0.0, 1.0)));
        let down = Pwl::affine(-1.0, 0.0).unwrap();
        assert_eq!(down.minimize().value, f64::NEG_INFINITY);
        let ramp = Pwl::new(vec![0.0], vec![0.0, 1.0], 0.0, 0.0).unwrap();
        assert_eq!(ramp.minimize().interval, Some((f64::NEG_INFINITY, 0.0)));
    }

    #[test]
    fn subdifferential_cases() {
        let f = Pwl::<f64>::abs();
        assert_eq!(f.subdifferential(0.0), Some((-1.0, 1.0)));
        assert_eq!(f.subdifferential(2.0), Some((1.0, 1.0)));
        let box01 = Pwl::indicator(0.0, 1.0).unwrap();
        assert_eq!(box01.subdifferential(1.0), Some((0.0, INF)));
        assert_eq!(box01.subdifferential(2.0), None);
    }

    #[test]
    fn compose_and_scale() {
        let f = Pwl::<f64>::abs_shifted(1.0);
        let g = f.compose_affine(-2.0, 0.0).unwrap(); // |−2x − 1|
        assert_eq!(g.eval(0.0), 1.0);
        assert_eq!(g.eval(-0.5), 0.0);
        assert_eq!(g.eval(1.0), 3.0);
        let h = f.scale(3.0).unwrap();
        assert_eq!(h.eval(3.0), 6.0);
    }

    #[test]
    fn lower_hull_restores_chord() {
        let f = Pwl::lower_hull(&[-1.0, 0.0, 1.0], &[1.0, 5.0, 1.0]).unwrap();
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(1.5), INF);
    }

    #[test]
    fn f32_roundtrip() {
        let f = Pwl::<f32>::new(vec![-1.0, 2.0], vec![-3.0, 0.5, 4.0], 0.0, 1.0).unwrap();
        assert_eq!(f.conjugate().conjugate(), f);
    }
}
