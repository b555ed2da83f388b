//! Fenchel and Fenchel–Lagrange duality schemes.

use serde::{Deserialize, Serialize};

use crate::convex::{BoxSet, ConvexFn};
use crate::duality::{
    default_y_grid, duality_report, regularity_probe, DualityReport, PertComponent, Perturbation,
    ProbeReport, Verdict,
};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::measure::{L0Ext, MeasureSpace, Partition};
use crate::scalar::{dot, ext_add, Scalar};
use crate::scenario::{L0Point, ScenarioFn};

/// A `dw × dx` matrix with its transpose as adjoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearOp<T> {
    pub matrix: Matrix<T>,
}

impl<T: Scalar> LinearOp<T> {
    pub fn new(matrix: Matrix<T>) -> Self {
        Self { matrix }
    }

    pub fn identity(d: usize) -> Self {
        Self::new(Matrix::identity(d))
    }

    pub fn dx(&self) -> usize {
        self.matrix.cols()
    }

    pub fn dw(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.matrix.mul_vec(x)
    }

    pub fn adjoint_apply(&self, w: &[T]) -> Vec<T> {
        self.matrix.transpose().mul_vec(w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintSet<T> {
    Box(BoxSet<T>),
    /// `{x : rowsᵢ·x ≤ rhsᵢ}`.
    Halfspaces { rows: Vec<Vec<T>>, rhs: Vec<T> },
    /// `{x ∈ ℝᴺ : E[x | B] ≥ threshold for every block B}`.
    CondExpCone {
        space: MeasureSpace<T>,
        partition: Partition,
        threshold: T,
    },
}

fn feas_eps<T: Scalar>(scale: T) -> T {
    T::lit(1e-12) * T::one().max(scale)
}

impl<T: Scalar> ConstraintSet<T> {
    /// Validates dimensions and nonemptiness.
    pub fn new(set: Self) -> Result<Self> {
        match &set {
            ConstraintSet::Box(_) => {}
            ConstraintSet::Halfspaces { rows, rhs } => {
                if rows.is_empty() || rows.len() != rhs.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "{} rows and {} right-hand sides",
                        rows.len(),
                        rhs.len()
                    )));
                }
                let d = rows[0].len();
                if d == 0 || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::DimensionMismatch("rows of unequal length".into()));
                }
                if rows.iter().flatten().chain(rhs).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidFunction("halfspace data must be finite".into()));
                }
                if d > 2 {
                    return Err(Error::Unsupported(format!(
                        "halfspace intersections in dimension {d}; use boxes or the conditional-expectation cone"
                    )));
                }
                if set.candidates().is_empty() {
                    return Err(Error::Infeasible("the halfspace intersection is empty".into()));
                }
            }
            ConstraintSet::CondExpCone { space, partition, threshold } => {
                if partition.atom_count() != space.atom_count() {
                    return Err(Error::DimensionMismatch(format!(
                        "partition of {} atoms over a space of {}",
                        partition.atom_count(),
                        space.atom_count()
                    )));
                }
                if !threshold.is_finite() {
                    return Err(Error::InvalidFunction("threshold must be finite".into()));
                }
            }
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConstraintSet::Box(b) => b.dim(),
            ConstraintSet::Halfspaces { rows, .. } => rows[0].len(),
            ConstraintSet::CondExpCone { space, .. } => space.atom_count(),
        }
    }

    pub fn contains(&self, x: &[T], tol: T) -> bool {
        match self {
            ConstraintSet::Box(b) => x
                .iter()
                .zip(b.lo.iter().zip(&b.hi))
                .all(|(&v, (&l, &h))| l - tol * T::one().max(l.abs()) <= v && v <= h + tol * T::one().max(h.abs())),
            ConstraintSet::Halfspaces { rows, rhs } => rows
                .iter()
                .zip(rhs)
                .all(|(r, &c)| dot(r, x) <= c + tol * T::one().max(c.abs())),
            ConstraintSet::CondExpCone { space, partition, threshold } => {
                block_means(space, partition, x)
                    .iter()
                    .all(|&m| m >= *threshold - tol * T::one().max(threshold.abs()))
            }
        }
    }

    /// One-dimensional sets and boxes as an interval box.
    fn as_box(&self) -> Option<BoxSet<T>> {
        match self {
            ConstraintSet::Box(b) => Some(b.clone()),
            ConstraintSet::Halfspaces { rows, rhs } if rows[0].len() == 1 => {
                let (mut lo, mut hi) = (T::neg_infinity(), T::infinity());
                for (r, &c) in rows.iter().zip(rhs) {
                    let a = r[0];
                    if a > T::zero() {
                        hi = hi.min(c / a);
                    } else if a < T::zero() {
                        lo = lo.max(c / a);
                    }
                }
                BoxSet::interval(lo, hi).ok()
            }
            _ => None,
        }
    }

    /// `δ_S` as a catalog function, when `S` is a box.
    pub fn indicator(&self) -> Option<ConvexFn<T>> {
        self.as_box().map(|set| ConvexFn::IndicatorBox {
            set,
            offset: T::zero(),
        })
    }

    /// Feasible vertices and boundary points of a planar polygon.
    fn candidates(&self) -> Vec<Vec<T>> {
        let ConstraintSet::Halfspaces { rows, rhs } = self else {
            return vec![];
        };
        let d = rows[0].len();
        let mut pts: Vec<Vec<T>> = vec![vec![T::zero(); d]];
        for (r, &c) in rows.iter().zip(rhs) {
            let nn = dot(r, r);
            if nn > T::zero() {
                pts.push(r.iter().map(|&v| c * v / nn).collect());
            }
        }
        if d == 2 {
            for i in 0..rows.len() {
                for j in i + 1..rows.len() {
                    let m = Matrix::from_rows(&[rows[i].clone(), rows[j].clone()]).unwrap();
                    if let Some(p) = m.solve(&[rhs[i], rhs[j]]) {
                        pts.push(p);
                    }
                }
            }
        }
        let scale = rhs.iter().fold(T::one(), |m, v| m.max(v.abs()));
        pts.retain(|p| rows.iter().zip(rhs).all(|(r, &c)| dot(r, p) <= c + feas_eps(scale)));
        pts
    }

    /// `y` in the cone generated by the rows.
    fn in_row_cone(rows: &[Vec<T>], y: &[T]) -> bool {
        if y.iter().all(|v| *v == T::zero()) {
            return true;
        }
        let scale = y.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let eps = feas_eps(scale) * T::lit(1e3);
        for r in rows {
            // y = λ r with λ ≥ 0
            let rr = dot(r, r);
            if rr > T::zero() {
                let lam = dot(r, y) / rr;
                if lam >= T::zero() && r.iter().zip(y).all(|(&a, &b)| (lam * a - b).abs() <= eps) {
                    return true;
                }
            }
        }
        if y.len() == 2 {
            for i in 0..rows.len() {
                for j in i + 1..rows.len() {
                    let m = Matrix::from_rows(&[rows[i].clone(), rows[j].clone()]).unwrap().transpose();
                    if let Some(l) = m.solve(y) {
                        if l.iter().all(|&v| v >= -eps) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// `σ_S(y) = sup_{x ∈ S} ⟨x, y⟩`.
    pub fn support(&self, y: &[T]) -> T {
        if let Some(b) = self.as_box() {
            return b.support(y);
        }
        match self {
            ConstraintSet::Halfspaces { rows, .. } => {
                if !Self::in_row_cone(rows, y) {
                    return T::infinity();
                }
                self.candidates()
                    .iter()
                    .map(|p| dot(p, y))
                    .fold(T::neg_infinity(), |m, v| m.max(v))
            }
            ConstraintSet::CondExpCone { space, partition, threshold } => {
                match cone_multipliers(space, partition, y) {
                    Some(lams) => -*threshold * lams.iter().fold(T::zero(), |a, &b| a + b),
                    None => T::infinity(),
                }
            }
            ConstraintSet::Box(_) => unreachable!(),
        }
    }

    /// Some point of `S`.
    pub fn feasible_point(&self) -> Vec<T> {
        match self {
            ConstraintSet::Box(b) => b.project(&vec![T::zero(); b.dim()]),
            ConstraintSet::Halfspaces { .. } => self.candidates().swap_remove(0),
            ConstraintSet::CondExpCone { space, threshold, .. } => vec![*threshold; space.atom_count()],
        }
    }
}

fn block_means<T: Scalar>(space: &MeasureSpace<T>, partition: &Partition, x: &[T]) -> Vec<T> {
    let mut num = vec![T::zero(); partition.block_count()];
    let mut den = vec![T::zero(); partition.block_count()];
    for (i, (&w, &v)) in space.weights().iter().zip(x).enumerate() {
        let b = partition.block_of(i);
        num[b] = num[b] + w * v;
        den[b] = den[b] + w;
    }
    num.iter().zip(&den).map(|(&n, &d)| n / d).collect()
}

/// `λ_B ≥ 0` with `y_j = −λ_B p_j / P_B` on each block, if they exist.
fn cone_multipliers<T: Scalar>(space: &MeasureSpace<T>, partition: &Partition, y: &[T]) -> Option<Vec<T>> {
    let p = space.weights();
    let mut out = Vec::with_capacity(partition.block_count());
    for atoms in partition.blocks() {
        let mass = atoms.iter().fold(T::zero(), |a, &j| a + p[j]);
        let lams: Vec<T> = atoms.iter().map(|&j| -y[j] * mass / p[j]).collect();
        let lam = lams[0];
        let tol = T::lit(1e-9) * T::one().max(lam.abs());
        if lam < -tol || lams.iter().any(|&l| (l - lam).abs() > tol) {
            return None;
        }
        out.push(lam.max(T::zero()));
    }
    Some(out)
}

/// `δ_S*` on the dual space.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportFunction<T> {
    pub set: ConstraintSet<T>,
}

impl<T: Scalar> SupportFunction<T> {
    pub fn eval(&self, y: &[T]) -> T {
        self.set.support(y)
    }

    /// Catalog form, available for boxes.
    pub fn as_convex_fn(&self) -> Option<ConvexFn<T>> {
        self.set.as_box().map(|set| {
            ConvexFn::SupportBox {
                set,
                offset: T::zero(),
            }
            .normalize()
        })
    }
}

pub fn support_function<T: Scalar>(set: &ConstraintSet<T>) -> SupportFunction<T> {
    SupportFunction { set: set.clone() }
}

/// A duality report together with the equivalence surface: the conjugate
/// of the primal objective against the infimal formula, with attainment,
/// on a dual grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeReport<T> {
    pub report: DualityReport<T>,
    pub surface: ProbeReport<T>,
    pub notes: Vec<String>,
}

/// `inf_x f(x) + g(Ax)` against `sup_{w*} −f*(−Aᵀw*) − g*(w*)`, per atom.
pub fn fenchel_perturbation<T: Scalar>(
    f: &ScenarioFn<T>,
    g: &ScenarioFn<T>,
    a: &LinearOp<T>,
) -> Result<Perturbation<T>> {
    if f.atom_count() != g.atom_count() || f.space() != g.space() {
        return Err(Error::DimensionMismatch("f and g live on different spaces".into()));
    }
    if a.dx() != f.dim() || a.dw() != g.dim() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}, f on ℝ^{}, g on ℝ^{}",
            a.dw(),
            a.dx(),
            f.dim(),
            g.dim()
        )));
    }
    let comps = f
        .components()
        .iter()
        .zip(g.components())
        .map(|(fi, gi)| PertComponent::Composite {
            f: fi.clone(),
            g: gi.clone(),
            a: a.matrix.clone(),
        })
        .collect();
    checked(f.space(), f.dim(), g.dim(), comps)
}

/// Per-atom feasibility first, so the error names the offending atom.
fn checked<T: Scalar>(
    space: &MeasureSpace<T>,
    dx: usize,
    dw: usize,
    comps: Vec<PertComponent<T>>,
) -> Result<Perturbation<T>> {
    for (i, c) in comps.iter().enumerate() {
        match Perturbation::replicated(1, dx, dw, c.clone()) {
            Err(Error::Infeasible(_)) => {
                return Err(Error::Infeasible(format!("empty feasible set on atom {i}")))
            }
            Err(e) => return Err(e),
            Ok(_) => {}
        }
    }
    Perturbation::new(space.clone(), dx, dw, comps)
}

pub fn fenchel_dual_solve<T: Scalar>(
    f: &ScenarioFn<T>,
    g: &ScenarioFn<T>,
    a: &LinearOp<T>,
    tol: T,
) -> Result<SchemeReport<T>> {
    let phi = fenchel_perturbation(f, g, a)?;
    let report = duality_report(&phi, tol);
    let surface = regularity_probe(&phi, &default_y_grid(&phi), tol)?;
    Ok(SchemeReport {
        report,
        surface,
        notes: vec![],
    })
}

/// Residuals of the two Fenchel optimality conditions per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeCheck<T> {
    pub residual_i: L0Ext<T>,
    pub residual_ii: L0Ext<T>,
    pub pass: bool,
    pub diagnostic: Option<String>,
    pub tol: T,
}

/// `(i) f(x̄) + f*(−Aᵀw̄*) = −⟨Ax̄, w̄*⟩` and `(ii) g(Ax̄) + g*(w̄*) = ⟨Ax̄, w̄*⟩`.
pub fn fenchel_optimality_check<T: Scalar>(
    f: &ScenarioFn<T>,
    g: &ScenarioFn<T>,
    a: &LinearOp<T>,
    x_bar: &[T],
    w_star: &L0Point<T>,
    tol: T,
) -> Result<SchemeCheck<T>> {
    if x_bar.len() != a.dx() || w_star.dim != a.dw() || w_star.atom_count() != f.atom_count() {
        return Err(Error::DimensionMismatch("certificate dimensions do not match".into()));
    }
    let (fc, gc) = (f.vec_conjugate()?, g.vec_conjugate()?);
    let ax = a.apply(x_bar);
    let (mut r1, mut r2) = (vec![], vec![]);
    for i in 0..f.atom_count() {
        let w = w_star.at(i);
        let pair = dot(&ax, w);
        let atw: Vec<T> = a.adjoint_apply(w).into_iter().map(|v| -v).collect();
        let lhs1 = ext_add(f.components()[i].eval(x_bar), fc.components()[i].eval(&atw));
        let lhs2 = ext_add(g.components()[i].eval(&ax), gc.components()[i].eval(w));
        r1.push(ext_add(lhs1, pair).abs());
        r2.push(ext_add(lhs2, -pair).abs());
    }
    let pass = r1.iter().chain(&r2).all(|&r| r <= tol);
    Ok(SchemeCheck {
        residual_i: L0Ext::new(r1),
        residual_ii: L0Ext::new(r2),
        pass,
        diagnostic: None,
        tol,
    })
}

/// `Φ(x, u) = δ_S(x) + f(x + u)`: the dual variable is `v` in
/// `sup_v −f*(v) − δ_S*(−v)`.
pub fn fenchel_lagrange_perturbation<T: Scalar>(f: &ScenarioFn<T>, s: &ConstraintSet<T>) -> Result<Perturbation<T>> {
    if s.dim() != f.dim() {
        return Err(Error::DimensionMismatch(format!(
            "S in ℝ^{}, f on ℝ^{}",
            s.dim(),
            f.dim()
        )));
    }
    let ind = s.indicator().ok_or_else(|| {
        Error::Unsupported("Fenchel–Lagrange perturbation needs a box or one-dimensional S".into())
    })?;
    let d = f.dim();
    let comps = f
        .components()
        .iter()
        .map(|fi| PertComponent::Composite {
            f: ind.clone(),
            g: fi.clone(),
            a: Matrix::identity(d),
        })
        .collect();
    checked(f.space(), d, d, comps)
}

pub fn fenchel_lagrange_solve<T: Scalar>(
    f: &ScenarioFn<T>,
    s: &ConstraintSet<T>,
    tol: T,
) -> Result<SchemeReport<T>> {
    if let Some(r) = risk_cone_certificate(f, s, tol)? {
        return Ok(r);
    }
    let phi = fenchel_lagrange_perturbation(f, s).map_err(|e| match e {
        Error::Infeasible(m) => Error::Infeasible(format!("dom f ∩ S is empty: {m}")),
        e => e,
    })?;
    let report = duality_report(&phi, tol);
    let surface = regularity_probe(&phi, &default_y_grid(&phi), tol)?;
    Ok(SchemeReport {
        report,
        surface,
        notes: vec![],
    })
}

/// Risk measures over a conditional-expectation cone. Both values are `−∞`:
/// constant payoffs `c·1` stay in `S` while the risk drops to `−c`, and no
/// density in the conjugate domain lies in the polar cone.
fn risk_cone_certificate<T: Scalar>(
    f: &ScenarioFn<T>,
    s: &ConstraintSet<T>,
    tol: T,
) -> Result<Option<SchemeReport<T>>> {
    let ConstraintSet::CondExpCone { .. } = s else {
        return Ok(None);
    };
    if s.dim() != f.dim() {
        return Err(Error::DimensionMismatch(format!("S in ℝ^{}, f on ℝ^{}", s.dim(), f.dim())));
    }
    let risky = f
        .components()
        .iter()
        .all(|c| matches!(c, ConvexFn::Cvar(_) | ConvexFn::Entropic(_)));
    if !risky {
        return Err(Error::Unsupported(
            "the conditional-expectation cone is supported with risk-measure objectives".into(),
        ));
    }
    let n = f.atom_count();
    let ninf = T::neg_infinity();
    let x0 = s.feasible_point();
    let f0 = f.eval(&x0)?;
    if let Some(i) = f0.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Infeasible(format!("f is not finite at a point of S on atom {i}")));
    }
    let report = DualityReport {
        primal_value: L0Ext::constant(n, ninf),
        dual_value: L0Ext::constant(n, ninf),
        gap: L0Ext::constant(n, T::zero()),
        primal_minimizer: None,
        primal_attained: vec![false; n],
        // the dual objective is −∞ everywhere, so every multiplier attains
        dual_solution: Some(L0Point::constant(n, &vec![T::zero(); f.dim()])),
        dual_attained: vec![true; n],
        dual_attainment: vec![crate::duality::Attainment::Attained; n],
        regularity: Verdict::Verified,
        tol,
    };
    let surface = ProbeReport {
        points: vec![],
        verdict: Verdict::Undetermined,
        tol,
    };
    Ok(Some(SchemeReport {
        report,
        surface,
        notes: vec![
            "primal unbounded below along constant payoffs: ρ(x₀ + c·1) = ρ(x₀) − c with x₀ + c·1 ∈ S".into(),
            "dual infeasible: densities in dom ρ* are nonnegative with mass one, the polar cone of S holds only nonpositive ones".into(),
        ],
    }))
}

/// `(i) f(x̄) + f*(v̄) = ⟨x̄, v̄⟩` and `(ii) δ_S*(−v̄) = −⟨x̄, v̄⟩`.
pub fn fl_optimality_check<T: Scalar>(
    f: &ScenarioFn<T>,
    s: &ConstraintSet<T>,
    x_bar: &[T],
    v_bar: &L0Point<T>,
    tol: T,
) -> Result<SchemeCheck<T>> {
    if x_bar.len() != f.dim() || v_bar.dim != f.dim() || v_bar.atom_count() != f.atom_count() {
        return Err(Error::DimensionMismatch("certificate dimensions do not match".into()));
    }
    let n = f.atom_count();
    if !s.contains(x_bar, T::zero()) {
        return Ok(SchemeCheck {
            residual_i: L0Ext::constant(n, T::infinity()),
            residual_ii: L0Ext::constant(n, T::infinity()),
            pass: false,
            diagnostic: Some("x̄ is not in S".into()),
            tol,
        });
    }
    let fc = f.vec_conjugate()?;
    let (mut r1, mut r2) = (vec![], vec![]);
    for i in 0..n {
        let v = v_bar.at(i);
        let pair = dot(x_bar, v);
        let neg: Vec<T> = v.iter().map(|&t| -t).collect();
        r1.push(ext_add(ext_add(f.components()[i].eval(x_bar), fc.components()[i].eval(v)), -pair).abs());
        r2.push(ext_add(s.support(&neg), pair).abs());
    }
    let pass = r1.iter().chain(&r2).all(|&r| r <= tol);
    Ok(SchemeCheck {
        residual_i: L0Ext::new(r1),
        residual_ii: L0Ext::new(r2),
        pass,
        diagnostic: None,
        tol,
    })
}
