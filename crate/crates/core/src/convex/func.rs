//! The closed proper convex function catalog and its calculus.

use super::line::{nearest_in, LineFn, Piece, Term};
use super::pwl::Pwl;
use super::quadratic::{BoxSet, Quadratic};
use super::risk_fn::RiskFn;
use super::sampled::Sampled1D;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{dot, ext_add, Scalar};

#[derive(Debug, Clone)]
pub enum ConvexFn<T> {
    Pwl(Pwl<T>),
    Quadratic(Quadratic<T>),
    /// `δ_B + offset`.
    IndicatorBox { set: BoxSet<T>, offset: T },
    /// `σ_B + offset`.
    SupportBox { set: BoxSet<T>, offset: T },
    Sampled(Sampled1D<T>),
    Affine { slope: Vec<T>, offset: T },
    /// `x ↦ CVaR_α(−x)`.
    Cvar(RiskFn<T>),
    /// Conjugate of [`ConvexFn::Cvar`].
    RiskEnvelope(RiskFn<T>),
    /// `x ↦ (1/γ) log E[e^{−γx}]`.
    Entropic(RiskFn<T>),
    /// Conjugate of [`ConvexFn::Entropic`].
    RelativeEntropy(RiskFn<T>),
}

impl<T: PartialEq> PartialEq for ConvexFn<T> {
    fn eq(&self, other: &Self) -> bool {
        use ConvexFn::*;
        match (self, other) {
            (Pwl(a), Pwl(b)) => a == b,
            (Quadratic(a), Quadratic(b)) => a == b,
            (IndicatorBox { set: a, offset: x }, IndicatorBox { set: b, offset: y })
            | (SupportBox { set: a, offset: x }, SupportBox { set: b, offset: y }) => a == b && x == y,
            (Sampled(a), Sampled(b)) => a == b,
            (Affine { slope: a, offset: x }, Affine { slope: b, offset: y }) => a == b && x == y,
            (Cvar(a), Cvar(b))
            | (RiskEnvelope(a), RiskEnvelope(b))
            | (Entropic(a), Entropic(b))
            | (RelativeEntropy(a), RelativeEntropy(b)) => a == b,
            _ => false,
        }
    }
}

/// Result of [`ConvexFn::minimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<T> {
    pub value: T,
    /// A minimizer, present iff the infimum is attained.
    pub witness: Option<Vec<T>>,
    /// Full argmin interval for one-dimensional functions.
    pub interval: Option<(T, T)>,
    /// Sampled data only: the minimizer sits on the grid edge with the
    /// function still decreasing toward it, so the infimum is presumably
    /// not attained inside the grid.
    pub boundary_heuristic: bool,
}

impl<T: Scalar> Minimum<T> {
    pub fn attained(&self) -> bool {
        self.witness.is_some()
    }
}

/// Coordinatewise intervals, `None` for the empty set.
pub type Subdifferential<T> = Option<Vec<(T, T)>>;

impl<T: Scalar> ConvexFn<T> {
    pub fn abs() -> Self {
        ConvexFn::Pwl(Pwl::abs())
    }

    /// `½|x|²` on ℝᵈ.
    pub fn half_square(d: usize) -> Self {
        ConvexFn::Quadratic(Quadratic {
            q: Matrix::identity(d),
            b: vec![T::zero(); d],
            c: T::zero(),
        })
    }

    pub fn indicator_interval(lo: T, hi: T) -> Result<Self> {
        Ok(ConvexFn::IndicatorBox {
            set: BoxSet::interval(lo, hi)?,
            offset: T::zero(),
        })
    }

    pub fn affine1(slope: T, offset: T) -> Self {
        ConvexFn::Affine {
            slope: vec![slope],
            offset,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexFn::Pwl(_) | ConvexFn::Sampled(_) => 1,
            ConvexFn::Quadratic(q) => q.dim(),
            ConvexFn::IndicatorBox { set, .. } | ConvexFn::SupportBox { set, .. } => set.dim(),
            ConvexFn::Affine { slope, .. } => slope.len(),
            ConvexFn::Cvar(r)
            | ConvexFn::RiskEnvelope(r)
            | ConvexFn::Entropic(r)
            | ConvexFn::RelativeEntropy(r) => r.dim(),
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self, ConvexFn::Sampled(_))
    }

    pub fn eval(&self, x: &[T]) -> T {
        match self {
            ConvexFn::Pwl(p) => p.eval(x[0]),
            ConvexFn::Sampled(s) => s.eval(x[0]),
            ConvexFn::Quadratic(q) => q.eval(x),
            ConvexFn::IndicatorBox { set, offset } => {
                if set.contains(x) {
                    *offset
                } else {
                    T::infinity()
                }
            }
            ConvexFn::SupportBox { set, offset } => ext_add(set.support(x), *offset),
            ConvexFn::Affine { slope, offset } => dot(slope, x) + *offset,
            ConvexFn::Cvar(r) => r.cvar_eval(x),
            ConvexFn::RiskEnvelope(r) => r.envelope_eval(x),
            ConvexFn::Entropic(r) => r.entropic_eval(x),
            ConvexFn::RelativeEntropy(r) => r.relative_entropy_eval(x),
        }
    }

    pub fn eval1(&self, x: T) -> T {
        self.eval(&[x])
    }

    /// Canonical form: support functions of points and quadratics with
    /// `Q = 0` are affine.
    pub fn normalize(self) -> Self {
        match self {
            ConvexFn::SupportBox { set, offset } if set.is_point() => ConvexFn::Affine {
                slope: set.lo,
                offset,
            },
            ConvexFn::Quadratic(q) if q.q.is_zero() => ConvexFn::Affine {
                slope: q.b,
                offset: q.c,
            },
            f => f,
        }
    }

    /// Exact representation as a piecewise-linear function on ℝ, when the
    /// function is one-dimensional and polyhedral. Sampled data is replaced
    /// by its closed convex hull.
    pub fn to_pwl(&self) -> Option<Result<Pwl<T>>> {
        if self.dim() != 1 {
            return None;
        }
        Some(match self {
            ConvexFn::Pwl(p) => Ok(p.clone()),
            ConvexFn::Sampled(s) => s.to_pwl(),
            ConvexFn::Affine { slope, offset } => Pwl::affine(slope[0], *offset),
            ConvexFn::IndicatorBox { set, offset } => {
                Pwl::indicator(set.lo[0], set.hi[0]).map(|p| p.add_affine(T::zero(), *offset))
            }
            ConvexFn::SupportBox { set, offset } => Pwl::support_of_interval(set.lo[0], set.hi[0])
                .map(|p| p.add_affine(T::zero(), *offset)),
            ConvexFn::Quadratic(q) if q.q.is_zero() => Pwl::affine(q.b[0], q.c),
            _ => return None,
        })
    }

    /// One-dimensional building block for exact line minimization.
    pub fn to_term(&self) -> Result<Term<T>> {
        if let ConvexFn::Quadratic(q) = self {
            if q.dim() == 1 && !q.q.is_zero() {
                return Ok(Term::new(Piece::Parabola {
                    a: q.q[(0, 0)],
                    b: q.b[0],
                    c: q.c,
                }));
            }
        }
        let (l, r) = match self {
            ConvexFn::Sampled(s) => s.truncated_ends(),
            _ => (false, false),
        };
        match self.to_pwl() {
            Some(p) => Ok(Term::new(Piece::Pwl(p?)).sampled(l, r)),
            None => Err(Error::Unsupported(format!(
                "{}-dimensional {} has no exact one-dimensional form",
                self.dim(),
                self.kind()
            ))),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConvexFn::Pwl(_) => "pwl",
            ConvexFn::Quadratic(_) => "quadratic",
            ConvexFn::IndicatorBox { .. } => "indicator_box",
            ConvexFn::SupportBox { .. } => "support_box",
            ConvexFn::Sampled(_) => "sampled",
            ConvexFn::Affine { .. } => "affine",
            ConvexFn::Cvar(_) => "cvar",
            ConvexFn::RiskEnvelope(_) => "risk_envelope",
            ConvexFn::Entropic(_) => "entropic",
            ConvexFn::RelativeEntropy(_) => "relative_entropy",
        }
    }

    /// Exact conjugate `f*(y) = sup_x ⟨x, y⟩ − f(x)`. Sampled data is
    /// conjugated through its closed hull, which has the same conjugate.
    pub fn conjugate(&self) -> Result<Self> {
        let g = match self {
            ConvexFn::Pwl(p) => ConvexFn::Pwl(p.conjugate()),
            ConvexFn::Sampled(s) => ConvexFn::Pwl(s.to_pwl()?.conjugate()),
            ConvexFn::Quadratic(q) if q.q.is_zero() => ConvexFn::IndicatorBox {
                set: BoxSet::point(q.b.clone()),
                offset: -q.c,
            },
            ConvexFn::Quadratic(q) => ConvexFn::Quadratic(q.conjugate()?),
            ConvexFn::IndicatorBox { set, offset } => ConvexFn::SupportBox {
                set: set.clone(),
                offset: -*offset,
            },
            ConvexFn::SupportBox { set, offset } => ConvexFn::IndicatorBox {
                set: set.clone(),
                offset: -*offset,
            },
            ConvexFn::Affine { slope, offset } => ConvexFn::IndicatorBox {
                set: BoxSet::point(slope.clone()),
                offset: -*offset,
            },
            ConvexFn::Cvar(r) => ConvexFn::RiskEnvelope(r.clone()),
            ConvexFn::RiskEnvelope(r) => ConvexFn::Cvar(r.clone()),
            ConvexFn::Entropic(r) => ConvexFn::RelativeEntropy(r.clone()),
            ConvexFn::RelativeEntropy(r) => ConvexFn::Entropic(r.clone()),
        };
        Ok(g.normalize())
    }

    /// Lower closed convex envelope. Exact variants are already closed.
    pub fn closure(&self) -> Result<Self> {
        match self {
            ConvexFn::Sampled(s) => Ok(ConvexFn::Sampled(s.closure()?)),
            f => Ok(f.clone()),
        }
    }

    pub fn minimize(&self) -> Minimum<T> {
        if self.dim() == 1 {
            if let Ok(term) = self.to_term() {
                return minimum_of_line(&LineFn::new(vec![term]));
            }
        }
        let d = self.dim();
        let unbounded = Minimum {
            value: T::neg_infinity(),
            witness: None,
            interval: None,
            boundary_heuristic: false,
        };
        let at = |value: T, x: Vec<T>| Minimum {
            value,
            witness: Some(x),
            interval: None,
            boundary_heuristic: false,
        };
        match self {
            ConvexFn::Quadratic(q) => match q.minimize() {
                (v, Some(x)) => at(v, x),
                _ => unbounded,
            },
            ConvexFn::IndicatorBox { set, offset } => at(*offset, set.project(&vec![T::zero(); d])),
            ConvexFn::SupportBox { set, offset } => {
                let zero = vec![T::zero(); d];
                if set.contains(&zero) {
                    at(*offset, zero)
                } else {
                    unbounded
                }
            }
            ConvexFn::Affine { slope, offset } => {
                if slope.iter().all(|s| *s == T::zero()) {
                    at(*offset, vec![T::zero(); d])
                } else {
                    unbounded
                }
            }
            // translation invariance: ρ(c·1) = −c
            ConvexFn::Cvar(_) | ConvexFn::Entropic(_) => unbounded,
            ConvexFn::RiskEnvelope(r) | ConvexFn::RelativeEntropy(r) => {
                at(T::zero(), r.probs.iter().map(|&p| -p).collect())
            }
            ConvexFn::Pwl(_) | ConvexFn::Sampled(_) => unreachable!("one-dimensional"),
        }
    }

    /// `∂f(x)` as coordinatewise intervals where the subdifferential is a
    /// box; `Unsupported` otherwise.
    pub fn subdifferential_at(&self, x: &[T]) -> Result<Subdifferential<T>> {
        if !self.eval(x).is_finite() {
            return Ok(None);
        }
        if let Some(p) = self.to_pwl() {
            return Ok(p?.subdifferential(x[0]).map(|iv| vec![iv]));
        }
        let point = |v: Vec<T>| Some(v.into_iter().map(|g| (g, g)).collect());
        match self {
            ConvexFn::Quadratic(q) => Ok(point(q.gradient(x))),
            ConvexFn::IndicatorBox { set, .. } => Ok(Some(set.normal_cone(x))),
            ConvexFn::SupportBox { set, .. } => Ok(Some(set.face(x))),
            ConvexFn::Affine { slope, .. } => Ok(point(slope.clone())),
            ConvexFn::Entropic(r) => Ok(point(r.gibbs_weights(x).into_iter().map(|q| -q).collect())),
            f => Err(Error::Unsupported(format!(
                "subdifferential of {} is not a box",
                f.kind()
            ))),
        }
    }

    /// Effective domain when it is a box; otherwise a bounding box and
    /// `false`.
    pub fn domain_box(&self) -> (Vec<(T, T)>, bool) {
        let d = self.dim();
        let whole = vec![(T::neg_infinity(), T::infinity()); d];
        if let Some(Ok(p)) = self.to_pwl() {
            return (vec![p.domain()], true);
        }
        match self {
            ConvexFn::IndicatorBox { set, .. } => {
                (set.lo.iter().copied().zip(set.hi.iter().copied()).collect(), true)
            }
            ConvexFn::SupportBox { set, .. } => {
                let dom = set
                    .lo
                    .iter()
                    .zip(&set.hi)
                    .map(|(&l, &h)| {
                        let lo = if l.is_finite() { T::neg_infinity() } else { T::zero() };
                        let hi = if h.is_finite() { T::infinity() } else { T::zero() };
                        (lo, hi)
                    })
                    .collect();
                (dom, true)
            }
            ConvexFn::RiskEnvelope(r) => {
                (r.probs.iter().map(|&p| (-p / r.param, T::zero())).collect(), false)
            }
            ConvexFn::RelativeEntropy(_) => (vec![(-T::one(), T::zero()); d], false),
            _ => (whole, true),
        }
    }

    /// `x ↦ f(x − a)`, where the variant allows it.
    pub fn translate(&self, a: &[T]) -> Option<Self> {
        match self {
            ConvexFn::Pwl(p) => p.compose_affine(T::one(), -a[0]).ok().map(ConvexFn::Pwl),
            ConvexFn::Sampled(s) => {
                let grid = s.grid().iter().map(|&g| g + a[0]).collect();
                Sampled1D::new(grid, s.values().to_vec()).ok().map(ConvexFn::Sampled)
            }
            ConvexFn::Quadratic(q) => {
                let qa = q.q.mul_vec(a);
                let b = q.b.iter().zip(&qa).map(|(&u, &v)| u - v).collect();
                let c = q.c + dot(a, &qa) / T::lit(2.0) - dot(&q.b, a);
                Some(ConvexFn::Quadratic(Quadratic { q: q.q.clone(), b, c }))
            }
            ConvexFn::IndicatorBox { set, offset } => Some(ConvexFn::IndicatorBox {
                set: BoxSet {
                    lo: set.lo.iter().zip(a).map(|(&l, &t)| l + t).collect(),
                    hi: set.hi.iter().zip(a).map(|(&h, &t)| h + t).collect(),
                },
                offset: *offset,
            }),
            ConvexFn::Affine { slope, offset } => Some(ConvexFn::Affine {
                slope: slope.clone(),
                offset: *offset - dot(slope, a),
            }),
            _ => None,
        }
    }

    /// Closed infimal convolution `cl(f □ g) = (f* + g*)*`.
    ///
    /// Exact for piecewise-linear pairs, positive definite quadratic pairs
    /// and translations by a point indicator. Other one-dimensional pairs
    /// are tabulated on a grid, each node value computed exactly.
    pub fn inf_convolution(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "inf-convolution of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        for (p, q) in [(self, other), (other, self)] {
            if let ConvexFn::IndicatorBox { set, offset } = p {
                if set.is_point() {
                    if let Some(t) = q.translate(&set.lo) {
                        return Ok(t.add_constant(*offset));
                    }
                }
            }
        }
        let (fc, gc) = (self.conjugate()?, other.conjugate()?);
        if let (Some(a), Some(b)) = (fc.to_pwl(), gc.to_pwl()) {
            let sum = a?.add(&b?).map_err(|_| {
                Error::Improper("conjugate domains do not intersect; f □ g ≡ −∞".into())
            })?;
            return Ok(ConvexFn::Pwl(sum.conjugate()));
        }
        if let (ConvexFn::Quadratic(a), ConvexFn::Quadratic(b)) = (&fc, &gc) {
            let sum = Quadratic {
                q: a.q.add(&b.q),
                b: a.b.iter().zip(&b.b).map(|(&u, &v)| u + v).collect(),
                c: a.c + b.c,
            };
            return ConvexFn::Quadratic(sum).conjugate();
        }
        if self.dim() == 1 {
            let grid = default_primal_grid(self, other, &fc, &gc)?;
            return Ok(ConvexFn::Sampled(inf_convolution_on_grid(self, other, &grid)?));
        }
        Err(Error::Unsupported(format!(
            "inf-convolution of {} and {} in dimension {}",
            self.kind(),
            other.kind(),
            self.dim()
        )))
    }

    pub fn add_constant(self, k: T) -> Self {
        if k == T::zero() {
            return self;
        }
        match self {
            ConvexFn::Pwl(p) => ConvexFn::Pwl(p.add_affine(T::zero(), k)),
            ConvexFn::Sampled(s) => {
                let v = s.values().iter().map(|&v| v + k).collect();
                ConvexFn::Sampled(Sampled1D::new(s.grid().to_vec(), v).expect("same grid"))
            }
            ConvexFn::Quadratic(mut q) => {
                q.c = q.c + k;
                ConvexFn::Quadratic(q)
            }
            ConvexFn::IndicatorBox { set, offset } => ConvexFn::IndicatorBox { set, offset: offset + k },
            ConvexFn::SupportBox { set, offset } => ConvexFn::SupportBox { set, offset: offset + k },
            ConvexFn::Affine { slope, offset } => ConvexFn::Affine { slope, offset: offset + k },
            f => f,
        }
    }
}

/// Minimum of a line function with the sampled-edge heuristic applied.
pub fn minimum_of_line<T: Scalar>(f: &LineFn<T>) -> Minimum<T> {
    let m = f.minimize();
    let heuristic = m.at_sampled_edge && m.interval.is_some_and(|(a, b)| a == b);
    let witness = match m.interval {
        Some(iv) if !heuristic => Some(vec![nearest_in(iv, T::zero())]),
        _ => None,
    };
    Minimum {
        value: m.value,
        witness,
        interval: m.interval,
        boundary_heuristic: heuristic,
    }
}

/// `cl(f □ g)` at each grid node: `−min_y f*(y) + g*(y) − x·y`.
pub fn inf_convolution_on_grid<T: Scalar>(
    f: &ConvexFn<T>,
    g: &ConvexFn<T>,
    grid: &[T],
) -> Result<Sampled1D<T>> {
    let terms = vec![f.conjugate()?.to_term()?, g.conjugate()?.to_term()?];
    let mut values = Vec::with_capacity(grid.len());
    for &x in grid {
        let line = LineFn::new(terms.clone()).plus_affine(-x, T::zero());
        let m = line.minimize().value;
        if m == T::infinity() {
            return Err(Error::Improper("conjugate domains do not intersect; f □ g ≡ −∞".into()));
        }
        values.push(-m);
    }
    Sampled1D::new(grid.to_vec(), values)
}

fn default_primal_grid<T: Scalar>(
    f: &ConvexFn<T>,
    g: &ConvexFn<T>,
    fc: &ConvexFn<T>,
    gc: &ConvexFn<T>,
) -> Result<Vec<T>> {
    let mut marks: Vec<T> = Vec::new();
    let mut kinks = |h: &ConvexFn<T>| -> Vec<T> {
        let v: Vec<T> = match h.to_pwl() {
            Some(Ok(p)) => p.breakpoints().to_vec(),
            _ => match h {
                ConvexFn::Quadratic(q) => vec![-q.b[0] / q.q[(0, 0)]],
                _ => vec![],
            },
        };
        marks.extend(v.iter().copied());
        v
    };
    let (kf, kg) = (kinks(f), kinks(g));
    kinks(fc);
    kinks(gc);
    let scale = marks.iter().fold(T::one(), |m, v| m.max(v.abs()));
    let lo_dom = domain1(f).0 + domain1(g).0;
    let hi_dom = domain1(f).1 + domain1(g).1;
    let lo = (-T::lit(4.0) * scale).max(lo_dom);
    let hi = (T::lit(4.0) * scale).min(hi_dom);
    if !(lo <= hi) {
        return Err(Error::Improper("empty domain".into()));
    }
    let n = 801;
    let mut grid: Vec<T> = (0..n)
        .map(|i| lo + (hi - lo) * T::lit(i as f64) / T::lit((n - 1) as f64))
        .collect();
    for &a in &kf {
        for &b in &kg {
            let s = a + b;
            if s >= lo && s <= hi {
                grid.push(s);
            }
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    Ok(grid)
}

fn domain1<T: Scalar>(f: &ConvexFn<T>) -> (T, T) {
    match f.to_pwl() {
        Some(Ok(p)) => p.domain(),
        _ => (T::neg_infinity(), T::infinity()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_conjugates() {
        let sq = ConvexFn::<f64>::half_square(1);
        assert_eq!(sq.conjugate().unwrap(), sq);
        let ind = ConvexFn::indicator_interval(-1.0f64, 1.0).unwrap();
        let s = ind.conjugate().unwrap();
        for y in [-2.0, -0.5, 0.0, 3.0] {
            assert_eq!(s.eval1(y), f64::abs(y));
        }
        assert_eq!(s.conjugate().unwrap(), ind);
        let a = ConvexFn::affine1(2.0f64, 1.0);
        assert_eq!(a.conjugate().unwrap().conjugate().unwrap(), a);
    }

    #[test]
    fn huber_and_intervals() {
        let h = ConvexFn::abs().inf_convolution(&ConvexFn::half_square(1)).unwrap();
        for x in [-3.0f64, -1.0, -0.25, 0.0, 0.6, 2.5] {
            let want = if x.abs() <= 1.0 { x * x / 2.0 } else { x.abs() - 0.5 };
            assert!((h.eval1(x) - want).abs() < 1e-9, "{x}");
        }
        let f = ConvexFn::Pwl(Pwl::indicator(0.0f64, 1.0).unwrap());
        let g = ConvexFn::Pwl(Pwl::indicator(2.0, 3.0).unwrap());
        assert_eq!(f.inf_convolution(&g).unwrap(), ConvexFn::Pwl(Pwl::indicator(2.0, 4.0).unwrap()));
    }

    #[test]
    fn point_indicator_is_identity() {
        let zero = ConvexFn::indicator_interval(0.0f64, 0.0).unwrap();
        let g = ConvexFn::Pwl(Pwl::abs_shifted(1.0));
        assert_eq!(zero.inf_convolution(&g).unwrap(), g);
        let q = ConvexFn::half_square(2);
        let z2 = ConvexFn::IndicatorBox { set: BoxSet::point(vec![0.0, 0.0]), offset: 0.0 };
        assert_eq!(z2.inf_convolution(&q).unwrap(), q);
    }

    #[test]
    fn minimize_examples() {
        let sq = ConvexFn::Quadratic(Quadratic::scalar(2.0f64, -2.0, 1.0).unwrap());
        let m = sq.minimize();
        assert_eq!((m.value, m.witness), (0.0, Some(vec![1.0])));
        let f = ConvexFn::Pwl(Pwl::abs().add(&Pwl::indicator(2.0, 3.0).unwrap()).unwrap());
        let m = f.minimize();
        assert_eq!((m.value, m.witness, m.interval), (2.0, Some(vec![2.0]), Some((2.0, 2.0))));
        let e = ConvexFn::Sampled(
            Sampled1D::<f64>::from_source(super::super::sampled::SampleSource {
                sampler: super::super::sampled::Sampler::Exp,
                lo: -10.0,
                hi: 1.0,
                points: 111,
            })
            .unwrap(),
        );
        let m = e.minimize();
        assert!(m.boundary_heuristic && m.witness.is_none());
        assert!(m.value < 1e-4);
    }

    #[test]
    fn subdifferentials() {
        assert_eq!(ConvexFn::<f64>::abs().subdifferential_at(&[0.0]).unwrap(), Some(vec![(-1.0, 1.0)]));
        assert_eq!(ConvexFn::<f64>::half_square(1).subdifferential_at(&[3.0]).unwrap(), Some(vec![(3.0, 3.0)]));
        let ind = ConvexFn::indicator_interval(0.0f64, 1.0).unwrap();
        assert_eq!(ind.subdifferential_at(&[1.0]).unwrap(), Some(vec![(0.0, f64::INFINITY)]));
        assert_eq!(ind.subdifferential_at(&[2.0]).unwrap(), None);
    }
}
