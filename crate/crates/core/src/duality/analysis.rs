//! Primal and dual values, duality reports, and the regularity probe.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::perturbation::{Kernel, Perturbation};
use crate::convex::Minimum;
use crate::error::{Error, Result};
use crate::measure::L0Ext;
use crate::scalar::{ext_dist, ext_sub, Scalar};
use crate::scenario::{common_minimizer, L0Point};

/// Tri-state outcome of a regularity assessment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Failed,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attainment {
    Attained,
    /// Exact non-attainment.
    NotAttained,
    /// Non-attainment inferred from sampled data: the minimizer sits on the
    /// grid edge, or moves away under grid refinement.
    NotAttainedHeuristic,
    Undetermined,
}

impl Attainment {
    pub fn is_attained(self) -> bool {
        self == Attainment::Attained
    }

    pub fn is_not_attained(self) -> bool {
        matches!(self, Attainment::NotAttained | Attainment::NotAttainedHeuristic)
    }
}

/// Refinement levels used by the divergence heuristic.
const REFINE_LEVELS: [u32; 2] = [1, 2];
/// Growth factor per level that counts as a diverging minimizer.
const DIVERGENCE_RATIO: f64 = 1.5;

fn radius<T: Scalar>(m: &Minimum<T>) -> Option<T> {
    m.witness
        .as_ref()
        .map(|w| w.iter().fold(T::zero(), |r, v| r.max(v.abs())))
}

/// Attainment of a minimum computed by `solve` on `kernel`.
pub(crate) fn assess<T: Scalar>(
    kernel: &Kernel<T>,
    m0: &Minimum<T>,
    solve: impl Fn(&Kernel<T>) -> Minimum<T>,
) -> Attainment {
    if !m0.value.is_finite() {
        return Attainment::Undetermined;
    }
    if m0.boundary_heuristic {
        return Attainment::NotAttainedHeuristic;
    }
    if !m0.attained() {
        return Attainment::NotAttained;
    }
    let mut radii = vec![radius(m0).unwrap()];
    for level in REFINE_LEVELS {
        match kernel.refined(level) {
            None => return Attainment::Attained,
            Some(Err(_)) => return Attainment::Undetermined,
            Some(Ok(k)) => {
                let m = solve(&k);
                if m.boundary_heuristic {
                    return Attainment::NotAttainedHeuristic;
                }
                match radius(&m) {
                    Some(r) => radii.push(r),
                    None => return Attainment::Undetermined,
                }
            }
        }
    }
    let ratio = T::lit(DIVERGENCE_RATIO);
    let diverges = radii[0] > T::zero() && radii.windows(2).all(|w| w[1] >= ratio * w[0]);
    if diverges {
        Attainment::NotAttainedHeuristic
    } else {
        Attainment::Attained
    }
}

/// `p − d` with equal infinities giving zero gap.
pub fn duality_gap<T: Scalar>(p: T, d: T) -> T {
    if p == d {
        T::zero()
    } else {
        ext_sub(p, d)
    }
}

fn within<T: Scalar>(v: T, reference: T, tol: T) -> bool {
    v <= tol * T::one().max(reference.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualValue<T> {
    pub value: L0Ext<T>,
    /// Maximizer assembled across atoms, present iff every atom attains.
    pub z_bar: Option<L0Point<T>>,
    pub attainment: Vec<Attainment>,
    pub per_atom: Vec<Option<Vec<T>>>,
}

impl<T> DualValue<T> {
    pub fn attained(&self) -> Vec<bool> {
        self.attainment.iter().map(|a| *a == Attainment::Attained).collect()
    }
}

/// `sup_z −Φᵢ*(0, z)` per atom.
pub fn dual_value<T: Scalar>(phi: &Perturbation<T>) -> DualValue<T> {
    let zero = vec![T::zero(); phi.dx()];
    let rows: Vec<(T, Attainment, Option<Vec<T>>)> = phi
        .kernels
        .par_iter()
        .map(|k| {
            let m = k.conj_min(&zero);
            if m.value == T::infinity() {
                // Φ*(0, ·) ≡ +∞: every z attains the dual value −∞
                return (T::neg_infinity(), Attainment::Attained, Some(vec![T::zero(); phi.dw()]));
            }
            let att = assess(k, &m, |r| r.conj_min(&zero));
            (-m.value, att, m.witness)
        })
        .collect();
    let value = L0Ext::new(rows.iter().map(|r| r.0).collect());
    let attainment: Vec<Attainment> = rows.iter().map(|r| r.1).collect();
    let per_atom: Vec<Option<Vec<T>>> = rows.into_iter().map(|r| r.2).collect();
    let z_bar = if attainment.iter().all(|a| a.is_attained()) {
        per_atom
            .iter()
            .cloned()
            .collect::<Option<Vec<_>>>()
            .and_then(|c| L0Point::new(phi.dw(), c).ok())
    } else {
        None
    };
    DualValue {
        value,
        z_bar,
        attainment,
        per_atom,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalValue<T> {
    pub value: L0Ext<T>,
    pub minimizer: Option<Vec<T>>,
    pub per_atom: Vec<Minimum<T>>,
}

/// `inf_x Φᵢ(x, 0)` per atom and a simultaneous minimizer if one exists.
pub fn primal_value<T: Scalar>(phi: &Perturbation<T>, tol: T) -> PrimalValue<T> {
    let per_atom: Vec<Minimum<T>> = phi.kernels.par_iter().map(|k| k.primal()).collect();
    let w0 = vec![T::zero(); phi.dw()];
    let minimizer = common_minimizer(&per_atom, phi.dx(), |i, x| phi.eval(i, x, &w0), None, tol);
    PrimalValue {
        value: L0Ext::new(per_atom.iter().map(|m| m.value).collect()),
        minimizer,
        per_atom,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport<T> {
    pub primal_value: L0Ext<T>,
    pub dual_value: L0Ext<T>,
    pub gap: L0Ext<T>,
    pub primal_minimizer: Option<Vec<T>>,
    pub primal_attained: Vec<bool>,
    pub dual_solution: Option<L0Point<T>>,
    pub dual_attained: Vec<bool>,
    pub dual_attainment: Vec<Attainment>,
    pub regularity: Verdict,
    pub tol: T,
}

pub fn duality_report<T: Scalar>(phi: &Perturbation<T>, tol: T) -> DualityReport<T> {
    let p = primal_value(phi, tol);
    let d = dual_value(phi);
    assemble_report(p, d, tol)
}

pub(crate) fn assemble_report<T: Scalar>(p: PrimalValue<T>, d: DualValue<T>, tol: T) -> DualityReport<T> {
    let gap = L0Ext::new(
        p.value
            .values
            .iter()
            .zip(&d.value.values)
            .map(|(&a, &b)| duality_gap(a, b))
            .collect(),
    );
    let closes = gap
        .values
        .iter()
        .zip(&p.value.values)
        .all(|(&g, &v)| within(g.abs(), v, tol));
    let regularity = if !closes || d.attainment.iter().any(|a| a.is_not_attained()) {
        Verdict::Failed
    } else if d.attainment.iter().all(|a| a.is_attained()) {
        Verdict::Verified
    } else {
        Verdict::Undetermined
    };
    DualityReport {
        primal_attained: p.per_atom.iter().map(|m| m.attained()).collect(),
        primal_value: p.value,
        dual_value: d.value.clone(),
        gap,
        primal_minimizer: p.minimizer,
        dual_attained: d.attained(),
        dual_solution: d.z_bar,
        dual_attainment: d.attainment,
        regularity,
        tol,
    }
}

/// Probe points `y`, the same on every atom.
pub fn default_y_grid<T: Scalar>(phi: &Perturbation<T>) -> Vec<L0Point<T>> {
    let n = phi.atom_count();
    if phi.dx() > 1 {
        let d = phi.dx();
        let mut out = vec![L0Point::constant(n, &vec![T::zero(); d])];
        for k in 0..d {
            for s in [-T::one(), T::one()] {
                let mut e = vec![T::zero(); d];
                e[k] = s;
                out.push(L0Point::constant(n, &e));
            }
        }
        return out;
    }
    let mut marks = phi.dual_marks();
    marks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    marks.dedup();
    let (lo, hi) = match (marks.first(), marks.last()) {
        (Some(&a), Some(&b)) if a < b => (a, b),
        (Some(&a), Some(_)) => (a - T::one(), a + T::one()),
        _ => (-T::one(), T::one()),
    };
    let mut pts = marks.clone();
    pts.extend(marks.windows(2).map(|w| (w[0] + w[1]) / T::lit(2.0)));
    let m = 33;
    pts.extend((0..m).map(|i| lo + (hi - lo) * T::lit(i as f64) / T::lit((m - 1) as f64)));
    pts.push(T::zero());
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts.into_iter().map(|y| L0Point::constant(n, &[y])).collect()
}

fn check_grid<T: Scalar>(phi: &Perturbation<T>, grid: &[L0Point<T>]) -> Result<()> {
    if let Some(y) = grid.iter().find(|y| y.atom_count() != phi.atom_count() || y.dim != phi.dx()) {
        return Err(Error::DimensionMismatch(format!(
            "probe point with {} atoms of dimension {}; expected {} of dimension {}",
            y.atom_count(),
            y.dim,
            phi.atom_count(),
            phi.dx()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MrPoint<T> {
    pub y: L0Point<T>,
    pub lhs: L0Ext<T>,
    pub rhs: L0Ext<T>,
    pub residual: L0Ext<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MrReport<T> {
    pub points: Vec<MrPoint<T>>,
    pub max_residual: T,
    pub pass: bool,
    pub tol: T,
}

/// Closure of `m` at `y` for `m` convex on the line: the smaller of `m(y)`
/// and the one-sided limits, extrapolated linearly from nearby samples.
fn closed_value<T: Scalar>(m: impl Fn(T) -> T, y: T) -> T {
    let d = T::lit(1e-9) * T::one().max(y.abs());
    let mut best = m(y);
    for s in [-d, d] {
        let (a, b) = (m(y + s), m(y + s + s));
        if a.is_finite() && b.is_finite() {
            best = best.min(a + a - b);
        }
    }
    best
}

/// `(Φ(·, 0))*(y)` against `cl(inf_z Φ*(·, z))(y)` on every grid point.
pub fn moreau_rockafellar_check<T: Scalar>(
    phi: &Perturbation<T>,
    grid: &[L0Point<T>],
    tol: T,
) -> Result<MrReport<T>> {
    check_grid(phi, grid)?;
    let points: Vec<MrPoint<T>> = grid
        .par_iter()
        .map(|y| {
            let (mut lhs, mut rhs, mut res) = (vec![], vec![], vec![]);
            for (i, k) in phi.kernels.iter().enumerate() {
                let yi = y.at(i);
                let l = k.lhs(yi);
                let r = if phi.dx() == 1 {
                    closed_value(|t| k.conj_min(&[t]).value, yi[0])
                } else {
                    k.conj_min(yi).value
                };
                lhs.push(l);
                rhs.push(r);
                res.push(ext_dist(l, r));
            }
            MrPoint {
                y: y.clone(),
                lhs: L0Ext::new(lhs),
                rhs: L0Ext::new(rhs),
                residual: L0Ext::new(res),
            }
        })
        .collect();
    let mut max_residual = T::zero();
    let mut pass = true;
    for p in &points {
        for (&r, &l) in p.residual.values.iter().zip(&p.lhs.values) {
            max_residual = max_residual.max(r);
            pass &= within(r, l, tol);
        }
    }
    Ok(MrReport {
        points,
        max_residual,
        pass,
        tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityReport<T> {
    /// `Φᵢ(x̄, 0) + Φᵢ*(0, z̄ᵢ)` per atom.
    pub residuals: L0Ext<T>,
    /// `(0, z̄ᵢ) ∈ ∂Φᵢ(x̄, 0)` checked through subdifferentials, where
    /// available.
    pub subgradient_form: Vec<Option<bool>>,
    pub pass: bool,
    pub tol: T,
}

pub fn check_optimality<T: Scalar>(
    phi: &Perturbation<T>,
    x_bar: &[T],
    z_bar: &L0Point<T>,
    tol: T,
) -> Result<OptimalityReport<T>> {
    if x_bar.len() != phi.dx() || z_bar.dim != phi.dw() || z_bar.atom_count() != phi.atom_count() {
        return Err(Error::DimensionMismatch("certificate dimensions do not match Φ".into()));
    }
    let w0 = vec![T::zero(); phi.dw()];
    let y0 = vec![T::zero(); phi.dx()];
    let mut res = Vec::with_capacity(phi.atom_count());
    let mut sub = Vec::with_capacity(phi.atom_count());
    for (i, k) in phi.kernels.iter().enumerate() {
        let z = z_bar.at(i);
        let r = crate::scalar::ext_add(k.phi(x_bar, &w0), k.phi_conj(&y0, z));
        res.push(r);
        sub.push(k.subgradient_form(x_bar, z, tol));
    }
    let pass = res.iter().all(|r| r.abs() <= tol);
    Ok(OptimalityReport {
        residuals: L0Ext::new(res),
        subgradient_form: sub,
        pass,
        tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbePoint<T> {
    pub y: L0Point<T>,
    /// `(Φᵢ(·, 0))*(yᵢ)`.
    pub lhs: L0Ext<T>,
    /// `inf_z Φᵢ*(yᵢ, z)`.
    pub min_value: L0Ext<T>,
    pub minimizer: Vec<Option<Vec<T>>>,
    pub attainment: Vec<Attainment>,
    pub residual: L0Ext<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport<T> {
    pub points: Vec<ProbePoint<T>>,
    pub verdict: Verdict,
    pub tol: T,
}

/// Attainment of `min_z Φ*(y, z)` and its agreement with `(Φ(·, 0))*(y)`
/// on each grid point.
pub fn regularity_probe<T: Scalar>(
    phi: &Perturbation<T>,
    grid: &[L0Point<T>],
    tol: T,
) -> Result<ProbeReport<T>> {
    check_grid(phi, grid)?;
    let points: Vec<ProbePoint<T>> = grid
        .par_iter()
        .map(|y| {
            let mut p = ProbePoint {
                y: y.clone(),
                lhs: L0Ext::new(vec![]),
                min_value: L0Ext::new(vec![]),
                minimizer: vec![],
                attainment: vec![],
                residual: L0Ext::new(vec![]),
            };
            for (i, k) in phi.kernels.iter().enumerate() {
                let yi = y.at(i);
                let l = k.lhs(yi);
                let m = k.conj_min(yi);
                let att = if m.value == T::infinity() && l == T::infinity() {
                    Attainment::Attained
                } else {
                    assess(k, &m, |r| r.conj_min(yi))
                };
                p.lhs.values.push(l);
                p.min_value.values.push(m.value);
                p.residual.values.push(ext_dist(l, m.value));
                p.minimizer.push(m.witness);
                p.attainment.push(att);
            }
            p
        })
        .collect();
    let mut failed = false;
    let mut all_ok = true;
    for p in &points {
        for i in 0..phi.atom_count() {
            let (att, r, l) = (p.attainment[i], p.residual.values[i], p.lhs.values[i]);
            let agrees = within(r, l, tol);
            if !agrees || (p.min_value.values[i] < T::infinity() && att.is_not_attained()) {
                failed = true;
            }
            all_ok &= agrees && att.is_attained();
        }
    }
    let verdict = if failed {
        Verdict::Failed
    } else if all_ok {
        Verdict::Verified
    } else {
        Verdict::Undetermined
    };
    Ok(ProbeReport { points, verdict, tol })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Farkas<T> {
    /// `Φ(·, 0) ≥ 0` on every atom, with `z` such that `Φ*(0, z) ≤ 0`.
    PrimalNonnegative { z: L0Point<T>, conjugate_values: L0Ext<T> },
    /// `Φᵢ(x, 0) < 0` on the given atom.
    NegativeEvidence { atom: usize, x: Vec<T>, value: T },
}

/// The alternative: either `inf_x Φ(x, 0) ≥ 0`, certified by a dual `z`
/// with `Φ*(0, z) ≤ 0`, or an explicit `x` with `Φᵢ(x, 0) < 0`. Requires
/// verified regularity on the default probe grid.
pub fn farkas_decide<T: Scalar>(phi: &Perturbation<T>, tol: T) -> Result<Farkas<T>> {
    let probe = regularity_probe(phi, &default_y_grid(phi), tol)?;
    if probe.verdict != Verdict::Verified {
        return Err(Error::Precondition(format!(
            "the alternative needs verified regularity; the probe returned {:?}",
            probe.verdict
        )));
    }
    let w0 = vec![T::zero(); phi.dw()];
    let p = primal_value(phi, tol);
    for (i, m) in p.per_atom.iter().enumerate() {
        if m.value < -tol {
            let x = m
                .witness
                .clone()
                .filter(|x| phi.eval(i, x, &w0) < T::zero())
                .or_else(|| search_negative(phi, i))
                .ok_or_else(|| {
                    Error::Unsupported(format!("no explicit point with Φ(x, 0) < 0 found on atom {i}"))
                })?;
            let value = phi.eval(i, &x, &w0);
            return Ok(Farkas::NegativeEvidence { atom: i, x, value });
        }
    }
    let d = dual_value(phi);
    let z = d.z_bar.ok_or_else(|| Error::Precondition("dual not attained".into()))?;
    let y0 = vec![T::zero(); phi.dx()];
    let conj = L0Ext::new((0..phi.atom_count()).map(|i| phi.eval_conjugate(i, &y0, z.at(i))).collect());
    Ok(Farkas::PrimalNonnegative {
        z,
        conjugate_values: conj,
    })
}

fn search_negative<T: Scalar>(phi: &Perturbation<T>, atom: usize) -> Option<Vec<T>> {
    let w0 = vec![T::zero(); phi.dw()];
    for k in 0..64 {
        let t = T::lit(2f64.powi(k));
        for j in 0..phi.dx() {
            for s in [t, -t] {
                let mut x = vec![T::zero(); phi.dx()];
                x[j] = s;
                if phi.eval(atom, &x, &w0) < T::zero() {
                    return Some(x);
                }
            }
        }
    }
    None
}
