//! Exact minimization of sums of one-dimensional convex pieces.
//!
//! A [`LineFn`] is `t ↦ Σₖ pieceₖ(aₖ·t + cₖ) + λ·t + μ` where each piece is a
//! closed piecewise-linear function or a strictly convex parabola. Between
//! consecutive breakpoints the sum is a quadratic, so the minimum is found
//! by one pass over the regions.

use super::pwl::Pwl;
use crate::scalar::{ext_add, Scalar};

#[derive(Debug, Clone)]
pub enum Piece<T> {
    Pwl(Pwl<T>),
    /// `a·u²/2 + b·u + c` with `a > 0`.
    Parabola { a: T, b: T, c: T },
}

impl<T: PartialEq> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Piece::Pwl(a), Piece::Pwl(b)) => a == b,
            (Piece::Parabola { a, b, c }, Piece::Parabola { a: x, b: y, c: z }) => {
                a == x && b == y && c == z
            }
            _ => false,
        }
    }
}

impl<T: Scalar> Piece<T> {
    pub fn eval(&self, u: T) -> T {
        match self {
            Piece::Pwl(p) => p.eval(u),
            Piece::Parabola { a, b, c } => *a * u * u / T::lit(2.0) + *b * u + *c,
        }
    }

    pub fn conjugate(&self) -> Self {
        match self {
            Piece::Pwl(p) => Piece::Pwl(p.conjugate()),
            Piece::Parabola { a, b, c } => Piece::Parabola {
                a: T::one() / *a,
                b: -*b / *a,
                c: *b * *b / (T::lit(2.0) * *a) - *c,
            },
        }
    }

    fn domain(&self) -> (T, T) {
        match self {
            Piece::Pwl(p) => p.domain(),
            Piece::Parabola { .. } => (T::neg_infinity(), T::infinity()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Term<T> {
    pub piece: Piece<T>,
    pub scale: T,
    pub shift: T,
    /// Left and right domain walls of the piece that are only grid ends of
    /// sampled data.
    pub sampled: (bool, bool),
}

impl<T: Scalar> Term<T> {
    pub fn new(piece: Piece<T>) -> Self {
        Self {
            piece,
            scale: T::one(),
            shift: T::zero(),
            sampled: (false, false),
        }
    }

    pub fn with_map(mut self, scale: T, shift: T) -> Self {
        // compose: piece(s0·(scale·t + shift) + c0)
        self.shift = self.scale * shift + self.shift;
        self.scale = self.scale * scale;
        self
    }

    pub fn sampled(mut self, left: bool, right: bool) -> Self {
        self.sampled = (left, right);
        self
    }

    fn eval(&self, t: T) -> T {
        let u = self.scale * t + self.shift;
        // endpoints mapped back through the affine map may miss a wall by
        // a few ulps
        let (lo, hi) = self.piece.domain();
        let slack = T::epsilon() * T::lit(64.0) * T::one().max(u.abs()).max(self.shift.abs());
        let u = if u < lo && u >= lo - slack {
            lo
        } else if u > hi && u <= hi + slack {
            hi
        } else {
            u
        };
        self.piece.eval(u)
    }

    /// Domain in `t`.
    fn domain(&self) -> (T, T) {
        let (lo, hi) = self.piece.domain();
        if self.scale == T::zero() {
            return if lo <= self.shift && self.shift <= hi {
                (T::neg_infinity(), T::infinity())
            } else {
                (T::infinity(), T::neg_infinity())
            };
        }
        let a = (lo - self.shift) / self.scale;
        let b = (hi - self.shift) / self.scale;
        if self.scale > T::zero() {
            (a, b)
        } else {
            (b, a)
        }
    }

    fn breakpoints(&self) -> Vec<T> {
        match &self.piece {
            Piece::Pwl(p) if self.scale != T::zero() => p
                .breakpoints()
                .iter()
                .map(|&b| (b - self.shift) / self.scale)
                .collect(),
            _ => vec![],
        }
    }

    /// Derivative on the open region containing `t`, as `(A, B)` with
    /// derivative `A·t + B`.
    fn derivative_at(&self, t: T) -> (T, T) {
        let s = self.scale;
        if s == T::zero() {
            return (T::zero(), T::zero());
        }
        match &self.piece {
            Piece::Pwl(p) => {
                let u = s * t + self.shift;
                let j = p.breakpoints().partition_point(|&b| b < u);
                (T::zero(), p.slopes()[j] * s)
            }
            Piece::Parabola { a, b, .. } => (*a * s * s, s * (*a * self.shift + *b)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LineFn<T> {
    pub terms: Vec<Term<T>>,
    pub linear: T,
    pub constant: T,
}

/// Result of [`LineFn::minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineMin<T> {
    pub value: T,
    /// Closed argmin interval (endpoints may be infinite); `None` when the
    /// infimum is `±∞`.
    pub interval: Option<(T, T)>,
    /// The argmin touches a domain wall that is only the edge of a sampling
    /// grid: the true minimizer may lie beyond it.
    pub at_sampled_edge: bool,
}

impl<T: Scalar> LineFn<T> {
    pub fn new(terms: Vec<Term<T>>) -> Self {
        Self {
            terms,
            linear: T::zero(),
            constant: T::zero(),
        }
    }

    pub fn plus_affine(mut self, linear: T, constant: T) -> Self {
        self.linear = self.linear + linear;
        self.constant = self.constant + constant;
        self
    }

    pub fn eval(&self, t: T) -> T {
        let base = if self.linear == T::zero() {
            self.constant
        } else {
            self.constant + self.linear * t
        };
        self.terms.iter().fold(base, |acc, term| ext_add(acc, term.eval(t)))
    }

    pub fn domain(&self) -> (T, T) {
        self.terms.iter().fold((T::neg_infinity(), T::infinity()), |(lo, hi), t| {
            let (a, b) = t.domain();
            (lo.max(a), hi.min(b))
        })
    }

    fn sampled_walls(&self) -> (Option<T>, Option<T>) {
        let mut left = None;
        let mut right = None;
        for t in &self.terms {
            let (a, b) = t.domain();
            // a negative scale swaps the piece's ends
            let (fa, fb) = if t.scale < T::zero() {
                (t.sampled.1, t.sampled.0)
            } else {
                t.sampled
            };
            if fa && a.is_finite() {
                left = Some(left.map_or(a, |l: T| l.max(a)));
            }
            if fb && b.is_finite() {
                right = Some(right.map_or(b, |r: T| r.min(b)));
            }
        }
        (left, right)
    }

    pub fn minimize(&self) -> LineMin<T> {
        let inf = T::infinity();
        let ninf = T::neg_infinity();
        let (lo, hi) = self.domain();
        let none = |value| LineMin {
            value,
            interval: None,
            at_sampled_edge: false,
        };
        if lo > hi {
            return none(inf);
        }
        // constant terms (scale 0) may already be +∞
        if self
            .terms
            .iter()
            .any(|t| t.scale == T::zero() && !t.eval(T::zero()).is_finite())
        {
            return none(inf);
        }
        if lo == hi {
            let v = self.eval(lo);
            return self.finish(v, (lo, lo));
        }
        let mut pts: Vec<T> = self
            .terms
            .iter()
            .flat_map(|t| t.breakpoints())
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

        let mut regions: Vec<(T, T)> = Vec::with_capacity(pts.len() + 1);
        if pts.is_empty() {
            regions.push((ninf, inf));
        } else {
            if !lo.is_finite() {
                regions.push((ninf, pts[0]));
            }
            for w in pts.windows(2) {
                regions.push((w[0], w[1]));
            }
            if !hi.is_finite() {
                regions.push((*pts.last().unwrap(), inf));
            }
        }

        // candidates: (value, lo, hi) of argmin pieces
        let mut cands: Vec<(T, T, T)> = pts.iter().map(|&p| (self.eval(p), p, p)).collect();
        for &(a, b) in &regions {
            let mid = interior_point(a, b);
            let (da, db) = self.terms.iter().fold((T::zero(), self.linear), |(x, y), t| {
                let (p, q) = t.derivative_at(mid);
                (x + p, y + q)
            });
            if da > T::zero() {
                let t = (-db / da).max(a).min(b);
                if t.is_finite() {
                    cands.push((self.eval(t), t, t));
                }
            } else if db > T::zero() {
                if !a.is_finite() {
                    return none(ninf);
                }
            } else if db < T::zero() {
                if !b.is_finite() {
                    return none(ninf);
                }
            } else {
                let v = self.eval(mid);
                cands.push((v, a, b));
            }
        }
        let best = cands.iter().fold(inf, |m, c| m.min(c.0));
        if !best.is_finite() {
            return none(best);
        }
        let slack = T::epsilon() * T::lit(1024.0) * T::one().max(best.abs());
        let (mut a, mut b) = (inf, ninf);
        for &(v, l, h) in &cands {
            if v <= best + slack {
                a = a.min(l);
                b = b.max(h);
            }
        }
        self.finish(best, (a, b))
    }

    fn finish(&self, value: T, interval: (T, T)) -> LineMin<T> {
        let (l, r) = self.sampled_walls();
        let at_edge = l.is_some_and(|w| interval.0 == w) || r.is_some_and(|w| interval.1 == w);
        LineMin {
            value,
            interval: Some(interval),
            at_sampled_edge: at_edge,
        }
    }
}

fn interior_point<T: Scalar>(a: T, b: T) -> T {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => (a + b) / T::lit(2.0),
        (true, false) => a + T::one(),
        (false, true) => b - T::one(),
        (false, false) => T::zero(),
    }
}

/// Point of a closed interval nearest to `target`.
pub fn nearest_in<T: Scalar>(interval: (T, T), target: T) -> T {
    target.max(interval.0).min(interval.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pwl(p: Pwl<f64>) -> Term<f64> {
        Term::new(Piece::Pwl(p))
    }

    #[test]
    fn abs_plus_shifted_abs() {
        // |x| + |x − 1|: minimum 1 on [0, 1]
        let f = LineFn::new(vec![pwl(Pwl::abs()), pwl(Pwl::abs_shifted(1.0))]);
        let m = f.minimize();
        assert_eq!(m.value, 1.0);
        assert_eq!(m.interval, Some((0.0, 1.0)));
    }

    #[test]
    fn parabola_with_kink() {
        // (x − 1)² = x²/2·2 − 2x + 1, plus |x|: minimum at x = 1/2
        let q = Term::new(Piece::Parabola { a: 2.0, b: -2.0, c: 1.0 });
        let f = LineFn::new(vec![q, pwl(Pwl::abs())]);
        let m = f.minimize();
        assert!((m.value - 0.75).abs() < 1e-15);
        assert_eq!(m.interval, Some((0.5, 0.5)));
    }

    #[test]
    fn unbounded_and_infeasible() {
        let f = LineFn::new(vec![pwl(Pwl::affine(1.0, 0.0).unwrap())]);
        assert_eq!(f.minimize().value, f64::NEG_INFINITY);
        let g = LineFn::new(vec![
            pwl(Pwl::indicator(0.0, 1.0).unwrap()),
            pwl(Pwl::indicator(2.0, 3.0).unwrap()),
        ]);
        assert_eq!(g.minimize().value, f64::INFINITY);
    }

    #[test]
    fn composed_terms() {
        // |2t − 1| has its kink at t = 1/2
        let f = LineFn::new(vec![pwl(Pwl::abs()).with_map(2.0, -1.0)]);
        let m = f.minimize();
        assert_eq!(m.interval, Some((0.5, 0.5)));
        // |−t + 3|
        let g = LineFn::new(vec![pwl(Pwl::abs()).with_map(-1.0, 3.0)]);
        assert_eq!(g.minimize().interval, Some((3.0, 3.0)));
    }

    #[test]
    fn parabola_conjugate() {
        let p = Piece::Parabola { a: 2.0f64, b: 1.0, c: 3.0 };
        let q = p.conjugate();
        // f*(y) at y = 5: sup_x 5x − x² − x − 3 → x = 2, value 1
        assert!((q.eval(5.0) - 1.0).abs() < 1e-14);
        assert_eq!(q.conjugate(), p);
    }

    #[test]
    fn sampled_edge_flag() {
        let p = Pwl::lower_hull(&[-2.0, -1.0, 0.0], &[2.0f64.exp().recip(), 1.0f64.exp().recip(), 1.0]).unwrap();
        let f = LineFn::new(vec![Term::new(Piece::Pwl(p)).sampled(true, true)]);
        let m = f.minimize();
        assert!(m.at_sampled_edge);
        assert_eq!(m.interval, Some((-2.0, -2.0)));
    }
}
