//! Perturbation functions `Φ: ℝ^{dx} × ℝ^{dw} → L̄⁰`, one component per atom.

use serde::{Deserialize, Serialize};

use crate::convex::line::{LineFn, Term};
use crate::convex::{minimum_of_line, BoxSet, ConvexFn, Minimum, Quadratic};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::measure::MeasureSpace;
use crate::scalar::{dot, ext_add, Scalar};

/// How one atom's perturbation is given.
#[derive(Debug, Clone, PartialEq)]
pub enum PertComponent<T> {
    /// `Φ(x, w) = f(x) + g(Ax + w)`.
    Composite {
        f: ConvexFn<T>,
        g: ConvexFn<T>,
        a: Matrix<T>,
    },
    /// A convex function of the stacked vector `(x, w)`.
    Joint(ConvexFn<T>),
}

impl<T: Scalar> PertComponent<T> {
    /// `f(x) + g(a·x + w)` on ℝ × ℝ.
    pub fn composite1(f: ConvexFn<T>, g: ConvexFn<T>, a: T) -> Self {
        PertComponent::Composite {
            f,
            g,
            a: Matrix::scalar(a),
        }
    }
}

/// Working form of one component.
#[derive(Debug, Clone)]
pub(crate) enum Kernel<T> {
    /// `dx = dw = 1`: `f(x) + g(a·x + w)`, solved exactly on the line.
    Line {
        f: ConvexFn<T>,
        g: ConvexFn<T>,
        fc: ConvexFn<T>,
        gc: ConvexFn<T>,
        ft: Term<T>,
        gt: Term<T>,
        fct: Term<T>,
        gct: Term<T>,
        a: T,
    },
    /// `f(x) + g(w)`.
    Split {
        f: ConvexFn<T>,
        g: ConvexFn<T>,
        fc: ConvexFn<T>,
        gc: ConvexFn<T>,
    },
    /// Positive definite quadratic in `(x, w)` and its conjugate.
    Quad {
        joint: Quadratic<T>,
        conj: Quadratic<T>,
        dx: usize,
    },
}

fn unsupported<T>(what: &str) -> Result<T> {
    Err(Error::Unsupported(what.to_string()))
}

/// `f = f₁(x) + f₂(w)` for box-like and diagonal variants.
fn split_separable<T: Scalar>(h: &ConvexFn<T>, dx: usize) -> Option<(ConvexFn<T>, ConvexFn<T>)> {
    let cut = |v: &[T]| (v[..dx].to_vec(), v[dx..].to_vec());
    let cut_box = |s: &BoxSet<T>| {
        let (l1, l2) = cut(&s.lo);
        let (h1, h2) = cut(&s.hi);
        (BoxSet { lo: l1, hi: h1 }, BoxSet { lo: l2, hi: h2 })
    };
    match h {
        ConvexFn::IndicatorBox { set, offset } => {
            let (a, b) = cut_box(set);
            Some((
                ConvexFn::IndicatorBox { set: a, offset: *offset },
                ConvexFn::IndicatorBox { set: b, offset: T::zero() },
            ))
        }
        ConvexFn::SupportBox { set, offset } => {
            let (a, b) = cut_box(set);
            Some((
                ConvexFn::SupportBox { set: a, offset: *offset }.normalize(),
                ConvexFn::SupportBox { set: b, offset: T::zero() }.normalize(),
            ))
        }
        ConvexFn::Affine { slope, offset } => {
            let (a, b) = cut(slope);
            Some((
                ConvexFn::Affine { slope: a, offset: *offset },
                ConvexFn::Affine { slope: b, offset: T::zero() },
            ))
        }
        ConvexFn::Quadratic(q) if q.q.is_diagonal() => {
            let d = q.dim();
            let (b1, b2) = cut(&q.b);
            Some((
                ConvexFn::Quadratic(Quadratic { q: q.q.submatrix(0..dx, 0..dx), b: b1, c: q.c }).normalize(),
                ConvexFn::Quadratic(Quadratic { q: q.q.submatrix(dx..d, dx..d), b: b2, c: T::zero() })
                    .normalize(),
            ))
        }
        _ => None,
    }
}

/// `Φ(x, w) = f(x) + g(Ax + w)` as one quadratic in `(x, w)`.
fn stack_quadratics<T: Scalar>(f: &Quadratic<T>, g: &Quadratic<T>, a: &Matrix<T>) -> Quadratic<T> {
    let (dx, dw) = (f.dim(), g.dim());
    let at = a.transpose();
    let xx = f.q.add(&at.mul(&g.q).mul(a));
    let xw = at.mul(&g.q);
    let n = dx + dw;
    let mut q = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            q[(i, j)] = match (i < dx, j < dx) {
                (true, true) => xx[(i, j)],
                (true, false) => xw[(i, j - dx)],
                (false, true) => xw[(j, i - dx)],
                (false, false) => g.q[(i - dx, j - dx)],
            };
        }
    }
    let mut b = f.b.iter().zip(at.mul_vec(&g.b)).map(|(&u, v)| u + v).collect::<Vec<_>>();
    b.extend_from_slice(&g.b);
    Quadratic { q, b, c: f.c + g.c }
}

impl<T: Scalar> Kernel<T> {
    pub(crate) fn build(c: &PertComponent<T>, dx: usize, dw: usize) -> Result<Self> {
        match c {
            PertComponent::Composite { f, g, a } => {
                if f.dim() != dx || g.dim() != dw || a.rows() != dw || a.cols() != dx {
                    return Err(Error::DimensionMismatch(format!(
                        "composite expects f on ℝ^{dx}, g on ℝ^{dw}, A {dw}x{dx}; got {}, {}, {}x{}",
                        f.dim(),
                        g.dim(),
                        a.rows(),
                        a.cols()
                    )));
                }
                if dx == 1 && dw == 1 {
                    return Self::line(f.clone(), g.clone(), a[(0, 0)]);
                }
                if a.is_zero() {
                    return Self::split(f.clone(), g.clone());
                }
                if let (ConvexFn::Quadratic(qf), ConvexFn::Quadratic(qg)) = (f, g) {
                    return Self::quad(stack_quadratics(qf, qg, a), dx);
                }
                unsupported("multi-dimensional composite perturbations need quadratic f and g, or A = 0")
            }
            PertComponent::Joint(h) => {
                if h.dim() != dx + dw {
                    return Err(Error::DimensionMismatch(format!(
                        "joint perturbation of dimension {}, expected {}",
                        h.dim(),
                        dx + dw
                    )));
                }
                if let Some((f, g)) = split_separable(h, dx) {
                    return if dx == 1 && dw == 1 {
                        Self::line(f, g, T::zero())
                    } else {
                        Self::split(f, g)
                    };
                }
                if let ConvexFn::Quadratic(q) = h {
                    return Self::quad(q.clone(), dx);
                }
                unsupported(&format!("joint perturbation of kind {}", h.kind()))
            }
        }
    }

    fn line(f: ConvexFn<T>, g: ConvexFn<T>, a: T) -> Result<Self> {
        let (fc, gc) = (f.conjugate()?, g.conjugate()?);
        Ok(Kernel::Line {
            ft: f.to_term()?,
            gt: g.to_term()?,
            fct: fc.to_term()?,
            gct: gc.to_term()?,
            f,
            g,
            fc,
            gc,
            a,
        })
    }

    fn split(f: ConvexFn<T>, g: ConvexFn<T>) -> Result<Self> {
        let (fc, gc) = (f.conjugate()?, g.conjugate()?);
        Ok(Kernel::Split { f, g, fc, gc })
    }

    fn quad(joint: Quadratic<T>, dx: usize) -> Result<Self> {
        let conj = joint.conjugate().map_err(|e| match e {
            Error::DegenerateQuadratic(m) => {
                Error::Unsupported(format!("joint quadratic perturbation must be positive definite: {m}"))
            }
            e => e,
        })?;
        Ok(Kernel::Quad { joint, conj, dx })
    }

    /// Same kernel with sampled data regenerated at a finer level; `None`
    /// when nothing is refinable.
    pub(crate) fn refined(&self, level: u32) -> Option<Result<Self>> {
        let refine = |h: &ConvexFn<T>| match h {
            ConvexFn::Sampled(s) => s.refined(level).map(|r| r.map(ConvexFn::Sampled)),
            _ => None,
        };
        match self {
            Kernel::Line { f, g, a, .. } => {
                let (rf, rg) = (refine(f), refine(g));
                if rf.is_none() && rg.is_none() {
                    return None;
                }
                Some((|| {
                    let f = rf.unwrap_or_else(|| Ok(f.clone()))?;
                    let g = rg.unwrap_or_else(|| Ok(g.clone()))?;
                    Self::line(f, g, *a)
                })())
            }
            Kernel::Split { f, g, .. } => {
                let (rf, rg) = (refine(f), refine(g));
                if rf.is_none() && rg.is_none() {
                    return None;
                }
                Some((|| {
                    let f = rf.unwrap_or_else(|| Ok(f.clone()))?;
                    let g = rg.unwrap_or_else(|| Ok(g.clone()))?;
                    Self::split(f, g)
                })())
            }
            Kernel::Quad { .. } => None,
        }
    }

    pub(crate) fn dw(&self) -> usize {
        match self {
            Kernel::Line { .. } => 1,
            Kernel::Split { g, .. } => g.dim(),
            Kernel::Quad { joint, dx, .. } => joint.dim() - dx,
        }
    }

    pub(crate) fn phi(&self, x: &[T], w: &[T]) -> T {
        match self {
            Kernel::Line { f, g, a, .. } => ext_add(f.eval(x), g.eval1(*a * x[0] + w[0])),
            Kernel::Split { f, g, .. } => ext_add(f.eval(x), g.eval(w)),
            Kernel::Quad { joint, .. } => joint.eval(&[x, w].concat()),
        }
    }

    pub(crate) fn phi_conj(&self, y: &[T], z: &[T]) -> T {
        match self {
            Kernel::Line { fc, gc, a, .. } => ext_add(fc.eval1(y[0] - *a * z[0]), gc.eval(z)),
            Kernel::Split { fc, gc, .. } => ext_add(fc.eval(y), gc.eval(z)),
            Kernel::Quad { conj, .. } => conj.eval(&[y, z].concat()),
        }
    }

    fn primal_line(&self) -> LineFn<T> {
        match self {
            Kernel::Line { ft, gt, a, .. } => {
                LineFn::new(vec![ft.clone(), gt.clone().with_map(*a, T::zero())])
            }
            _ => unreachable!(),
        }
    }

    /// Effective domain of `x ↦ Φ(x, 0)` as a box (outer bound for
    /// non-box domains).
    pub(crate) fn primal_domain(&self) -> Vec<(T, T)> {
        match self {
            Kernel::Line { .. } => vec![self.primal_line().domain()],
            Kernel::Split { f, g, .. } => {
                let zero = vec![T::zero(); g.dim()];
                if g.eval(&zero).is_finite() {
                    f.domain_box().0
                } else {
                    vec![(T::infinity(), T::neg_infinity()); f.dim()]
                }
            }
            Kernel::Quad { dx, .. } => vec![(T::neg_infinity(), T::infinity()); *dx],
        }
    }

    /// `inf_x Φ(x, 0)`.
    pub(crate) fn primal(&self) -> Minimum<T> {
        match self {
            Kernel::Line { .. } => minimum_of_line(&self.primal_line()),
            Kernel::Split { f, g, .. } => {
                let g0 = g.eval(&vec![T::zero(); g.dim()]);
                let mut m = f.minimize();
                m.value = ext_add(m.value, g0);
                if !g0.is_finite() {
                    m.witness = None;
                }
                m
            }
            Kernel::Quad { joint, dx, .. } => {
                let q = Quadratic {
                    q: joint.q.submatrix(0..*dx, 0..*dx),
                    b: joint.b[..*dx].to_vec(),
                    c: joint.c,
                };
                quad_minimum(&q)
            }
        }
    }

    /// `(Φ(·, 0))*(y) = −inf_x Φ(x, 0) − ⟨x, y⟩`.
    pub(crate) fn lhs(&self, y: &[T]) -> T {
        match self {
            Kernel::Line { .. } => -self.primal_line().plus_affine(-y[0], T::zero()).minimize().value,
            Kernel::Split { fc, g, .. } => ext_add(fc.eval(y), -g.eval(&vec![T::zero(); g.dim()])),
            Kernel::Quad { joint, dx, .. } => {
                let q = Quadratic {
                    q: joint.q.submatrix(0..*dx, 0..*dx),
                    b: joint.b[..*dx].iter().zip(y).map(|(&b, &v)| b - v).collect(),
                    c: joint.c,
                };
                -q.minimize().0
            }
        }
    }

    /// `inf_z Φ*(y, z)`.
    pub(crate) fn conj_min(&self, y: &[T]) -> Minimum<T> {
        match self {
            Kernel::Line { fct, gct, a, .. } => {
                minimum_of_line(&LineFn::new(vec![fct.clone().with_map(-*a, y[0]), gct.clone()]))
            }
            Kernel::Split { fc, gc, .. } => {
                let v = fc.eval(y);
                let mut m = gc.minimize();
                m.value = ext_add(v, m.value);
                if v == T::infinity() && m.witness.is_none() {
                    m.witness = Some(vec![T::zero(); gc.dim()]);
                }
                m
            }
            Kernel::Quad { conj, dx, .. } => {
                let n = conj.dim();
                let r = &conj.q;
                let ryy = r.submatrix(0..*dx, 0..*dx);
                let rzy = r.submatrix(*dx..n, 0..*dx);
                let rzy_y = rzy.mul_vec(y);
                let q = Quadratic {
                    q: r.submatrix(*dx..n, *dx..n),
                    b: conj.b[*dx..].iter().zip(rzy_y).map(|(&b, v)| b + v).collect(),
                    c: ryy.quad_form(y) / T::lit(2.0) + dot(&conj.b[..*dx], y) + conj.c,
                };
                quad_minimum(&q)
            }
        }
    }

    /// Subdifferential form of `(0, z) ∈ ∂Φ(x, 0)`; `None` when the
    /// subdifferentials involved are not available in closed form.
    pub(crate) fn subgradient_form(&self, x: &[T], z: &[T], tol: T) -> Option<bool> {
        let inside = |iv: &[(T, T)], v: &[T]| {
            iv.iter().zip(v).all(|(&(l, h), &p)| {
                let s = tol * T::one().max(p.abs());
                l - s <= p && p <= h + s
            })
        };
        let check = |h: &ConvexFn<T>, at: &[T], v: &[T]| -> Option<bool> {
            match h.subdifferential_at(at) {
                Ok(Some(iv)) => Some(inside(&iv, v)),
                Ok(None) => Some(false),
                Err(_) => None,
            }
        };
        match self {
            Kernel::Line { f, g, a, .. } => {
                // z ∈ ∂g(a·x) and −a·z ∈ ∂f(x)
                Some(check(g, &[*a * x[0]], z)? && check(f, x, &[-*a * z[0]])?)
            }
            Kernel::Split { f, g, .. } => {
                let zero_x = vec![T::zero(); f.dim()];
                let zero_w = vec![T::zero(); g.dim()];
                Some(check(f, x, &zero_x)? && check(g, &zero_w, z)?)
            }
            Kernel::Quad { joint, .. } => {
                let w0 = vec![T::zero(); self.dw()];
                let grad = joint.gradient(&[x, &w0[..]].concat());
                let want: Vec<T> = vec![T::zero(); x.len()].into_iter().chain(z.iter().copied()).collect();
                let iv: Vec<(T, T)> = grad.iter().map(|&g| (g, g)).collect();
                Some(inside(&iv, &want))
            }
        }
    }
}

fn quad_minimum<T: Scalar>(q: &Quadratic<T>) -> Minimum<T> {
    let (value, witness) = q.minimize();
    let interval = match (&witness, q.dim()) {
        (Some(x), 1) if !q.q.is_zero() => Some((x[0], x[0])),
        _ => None,
    };
    Minimum {
        value,
        witness,
        interval,
        boundary_heuristic: false,
    }
}

/// A perturbation function with one component per atom.
#[derive(Debug, Clone)]
pub struct Perturbation<T> {
    space: MeasureSpace<T>,
    dx: usize,
    dw: usize,
    components: Vec<PertComponent<T>>,
    pub(crate) kernels: Vec<Kernel<T>>,
}

impl<T: Scalar> PartialEq for Perturbation<T> {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.dx == other.dx
            && self.dw == other.dw
            && self.components == other.components
    }
}

/// Serializable shape of a perturbation, for reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PertShape {
    pub atoms: usize,
    pub dx: usize,
    pub dw: usize,
}

impl<T: Scalar> Perturbation<T> {
    /// Validates dimensions and the feasibility `0 ∈ pr_W dom Φ`: some `x`
    /// makes every `Φᵢ(x, 0)` finite.
    pub fn new(space: MeasureSpace<T>, dx: usize, dw: usize, components: Vec<PertComponent<T>>) -> Result<Self> {
        if components.len() != space.atom_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} components for {} atoms",
                components.len(),
                space.atom_count()
            )));
        }
        if dx == 0 || dw == 0 {
            return Err(Error::DimensionMismatch("dx and dw must be positive".into()));
        }
        let kernels = components
            .iter()
            .map(|c| Kernel::build(c, dx, dw))
            .collect::<Result<Vec<_>>>()?;
        let mut common = vec![(T::neg_infinity(), T::infinity()); dx];
        for (i, k) in kernels.iter().enumerate() {
            for (slot, (l, h)) in common.iter_mut().zip(k.primal_domain()) {
                *slot = (slot.0.max(l), slot.1.min(h));
            }
            if common.iter().any(|(l, h)| l > h) {
                return Err(Error::Infeasible(format!(
                    "no x makes Φ(x, 0) finite on atoms 0..={i}"
                )));
            }
        }
        Ok(Self {
            space,
            dx,
            dw,
            components,
            kernels,
        })
    }

    /// The same component on every atom of a uniform space.
    pub fn replicated(atoms: usize, dx: usize, dw: usize, c: PertComponent<T>) -> Result<Self> {
        Self::new(MeasureSpace::uniform(atoms)?, dx, dw, vec![c; atoms])
    }

    pub fn space(&self) -> &MeasureSpace<T> {
        &self.space
    }

    pub fn dx(&self) -> usize {
        self.dx
    }

    pub fn dw(&self) -> usize {
        self.dw
    }

    pub fn atom_count(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[PertComponent<T>] {
        &self.components
    }

    pub fn shape(&self) -> PertShape {
        PertShape {
            atoms: self.atom_count(),
            dx: self.dx,
            dw: self.dw,
        }
    }

    /// `Φᵢ(x, w)`.
    pub fn eval(&self, atom: usize, x: &[T], w: &[T]) -> T {
        self.kernels[atom].phi(x, w)
    }

    /// `Φᵢ*(y, z)`.
    pub fn eval_conjugate(&self, atom: usize, y: &[T], z: &[T]) -> T {
        self.kernels[atom].phi_conj(y, z)
    }

    /// Finite dual breakpoints of the one-dimensional components.
    pub(crate) fn dual_marks(&self) -> Vec<T> {
        let mut out = Vec::new();
        for k in &self.kernels {
            if let Kernel::Line { f, g, a, .. } = k {
                let h = match (f.to_pwl(), g.to_pwl()) {
                    (Some(Ok(pf)), Some(Ok(pg))) => pg.compose_affine(*a, T::zero()).ok().and_then(|pg| pf.add(&pg).ok()),
                    _ => None,
                };
                match h {
                    Some(h) => out.extend(h.slopes().iter().copied().filter(|s| s.is_finite())),
                    None => {
                        for (fun, scale) in [(f, T::one()), (g, *a)] {
                            if let Some(Ok(p)) = fun.to_pwl() {
                                out.extend(p.slopes().iter().filter(|s| s.is_finite()).map(|&s| s * scale));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}
