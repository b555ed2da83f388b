//! Kernel integral operators, conditional risk measures and the
//! constrained portfolio problem.

use serde::{Deserialize, Serialize};

use crate::convex::{ConvexFn, Pwl, Quadratic, RiskFn, Sampled1D};
use crate::error::{Error, Result};
use crate::measure::{MeasureSpace, Partition};
use crate::scalar::{dot, Scalar};
use crate::scenario::ScenarioFn;
use crate::schemes::ConstraintSet;

/// `k(ω, s, ·)` on a finite grid: `kernels[i][j]` is the 1-D kernel at
/// outer atom `i` and inner atom `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable<T> {
    outer: MeasureSpace<T>,
    inner: MeasureSpace<T>,
    kernels: Vec<Vec<ConvexFn<T>>>,
}

impl<T: Scalar> KernelTable<T> {
    pub fn new(outer: MeasureSpace<T>, inner: MeasureSpace<T>, kernels: Vec<Vec<ConvexFn<T>>>) -> Result<Self> {
        if kernels.len() != outer.atom_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} kernel rows for {} outer atoms",
                kernels.len(),
                outer.atom_count()
            )));
        }
        for (i, row) in kernels.iter().enumerate() {
            if row.len() != inner.atom_count() {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} kernels for {} inner atoms",
                    row.len(),
                    inner.atom_count()
                )));
            }
            if let Some(j) = row.iter().position(|k| k.dim() != 1) {
                return Err(Error::DimensionMismatch(format!("kernel ({i}, {j}) is not one-dimensional")));
            }
        }
        Ok(Self { outer, inner, kernels })
    }

    pub fn outer(&self) -> &MeasureSpace<T> {
        &self.outer
    }

    pub fn inner(&self) -> &MeasureSpace<T> {
        &self.inner
    }

    pub fn kernels(&self) -> &[Vec<ConvexFn<T>>] {
        &self.kernels
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralOperator<T> {
    pub f: ScenarioFn<T>,
    pub warnings: Vec<String>,
}

const FALLBACK_POINTS: usize = 801;

/// `fᵢ(x) = Σⱼ νⱼ kᵢⱼ(x)`.
pub fn integral_operator<T: Scalar>(k: &KernelTable<T>) -> Result<IntegralOperator<T>> {
    let nu = k.inner.weights();
    let mut warnings = vec![];
    let mut comps = Vec::with_capacity(k.kernels.len());
    for (i, row) in k.kernels.iter().enumerate() {
        let row: Vec<ConvexFn<T>> = row.iter().map(|f| f.clone().normalize()).collect();
        if let Some(q) = quadratic_sum(&row, nu) {
            comps.push(q?);
        } else if let Some(p) = pwl_sum(&row, nu) {
            comps.push(ConvexFn::Pwl(p.map_err(|e| match e {
                Error::Improper(m) => Error::Improper(format!("outer atom {i}: {m}")),
                e => e,
            })?));
        } else {
            let (s, lo, hi) = sampled_sum(&row, nu).map_err(|e| match e {
                Error::Improper(m) => Error::Improper(format!("outer atom {i}: {m}")),
                e => e,
            })?;
            warnings.push(format!(
                "outer atom {i}: mixed kernel variants summed on {FALLBACK_POINTS} points over [{lo}, {hi}]"
            ));
            comps.push(ConvexFn::Sampled(s));
        }
    }
    let f = ScenarioFn::new(k.outer.clone(), comps)?;
    Ok(IntegralOperator { f, warnings })
}

fn quadratic_sum<T: Scalar>(row: &[ConvexFn<T>], nu: &[T]) -> Option<Result<ConvexFn<T>>> {
    let (mut a, mut b, mut c) = (T::zero(), T::zero(), T::zero());
    for (k, &w) in row.iter().zip(nu) {
        match k {
            ConvexFn::Affine { slope, offset } => {
                b = b + w * slope[0];
                c = c + w * *offset;
            }
            ConvexFn::Quadratic(q) => {
                a = a + w * q.q[(0, 0)];
                b = b + w * q.b[0];
                c = c + w * q.c;
            }
            _ => return None,
        }
    }
    Some(Quadratic::scalar(a, b, c).map(|q| ConvexFn::Quadratic(q).normalize()))
}

fn pwl_sum<T: Scalar>(row: &[ConvexFn<T>], nu: &[T]) -> Option<Result<Pwl<T>>> {
    let mut acc: Option<Pwl<T>> = None;
    for (k, &w) in row.iter().zip(nu) {
        let p = match k.to_pwl()?.and_then(|p| p.scale(w)) {
            Ok(p) => p,
            Err(e) => return Some(Err(e)),
        };
        acc = Some(match acc {
            None => p,
            Some(a) => match a.add(&p) {
                Ok(s) => s,
                Err(e) => return Some(Err(e)),
            },
        });
    }
    acc.map(Ok)
}

fn sampled_sum<T: Scalar>(row: &[ConvexFn<T>], nu: &[T]) -> Result<(Sampled1D<T>, T, T)> {
    let (mut lo, mut hi) = (T::neg_infinity(), T::infinity());
    for k in row {
        let (b, _) = k.domain_box();
        lo = lo.max(b[0].0);
        hi = hi.min(b[0].1);
    }
    if lo > hi {
        return Err(Error::Improper("kernel domains share no point".into()));
    }
    let reach = T::lit(16.0);
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {}
        (true, false) => hi = lo + reach,
        (false, true) => lo = hi - reach,
        (false, false) => (lo, hi) = (-reach, reach),
    }
    if lo == hi {
        hi = lo + T::lit(1e-9);
    }
    let n = FALLBACK_POINTS;
    let grid: Vec<T> = (0..n)
        .map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * T::lit(k as f64) / T::lit((n - 1) as f64) })
        .collect();
    let values = grid
        .iter()
        .map(|&x| {
            row.iter()
                .zip(nu)
                .fold(T::zero(), |acc, (k, &w)| crate::scalar::ext_add(acc, w * k.eval1(x)))
        })
        .collect();
    Ok((Sampled1D::new(grid, values)?, lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RiskKind<T> {
    Cvar { alpha: T },
    Entropic { gamma: T },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskSpec<T> {
    pub kind: RiskKind<T>,
    pub partition: Partition,
    pub space: MeasureSpace<T>,
    /// The integrability exponent; carried as metadata only.
    pub p: Option<T>,
}

impl<T: Scalar> RiskSpec<T> {
    pub fn new(kind: RiskKind<T>, partition: Partition, space: MeasureSpace<T>) -> Result<Self> {
        match kind {
            RiskKind::Cvar { alpha } if !(alpha > T::zero() && alpha < T::one()) => {
                return Err(Error::InvalidFunction(format!("CVaR level {alpha} outside (0, 1)")))
            }
            RiskKind::Entropic { gamma } if !(gamma > T::zero() && gamma.is_finite()) => {
                return Err(Error::InvalidFunction(format!("entropic parameter {gamma} must be positive")))
            }
            _ => {}
        }
        if !space.is_probability(T::lit(1e-9)) {
            return Err(Error::InvalidSpace("risk measures need probability weights".into()));
        }
        if partition.atom_count() != space.atom_count() {
            return Err(Error::DimensionMismatch(format!(
                "partition of {} atoms over a space of {}",
                partition.atom_count(),
                space.atom_count()
            )));
        }
        Ok(Self {
            kind,
            partition,
            space,
            p: None,
        })
    }

    /// Block probabilities and, per block, the conditional law on all atoms.
    fn conditional_laws(&self) -> (Vec<T>, Vec<Vec<T>>) {
        let w = self.space.weights();
        let blocks = self.partition.blocks();
        let masses: Vec<T> = blocks
            .iter()
            .map(|b| b.iter().fold(T::zero(), |a, &j| a + w[j]))
            .collect();
        let laws = blocks
            .iter()
            .zip(&masses)
            .map(|(b, &m)| {
                let mut q = vec![T::zero(); w.len()];
                for &j in b {
                    q[j] = w[j] / m;
                }
                q
            })
            .collect();
        (masses, laws)
    }
}

/// One output atom per block; each component acts on payoffs in ℝᴺ and only
/// sees the coordinates of its block.
pub fn conditional_risk<T: Scalar>(spec: &RiskSpec<T>) -> Result<ScenarioFn<T>> {
    let (masses, laws) = spec.conditional_laws();
    let comps = laws
        .into_iter()
        .map(|q| match spec.kind {
            RiskKind::Cvar { alpha } => RiskFn::cvar(q, alpha).map(ConvexFn::Cvar),
            RiskKind::Entropic { gamma } => RiskFn::entropic(q, gamma).map(ConvexFn::Entropic),
        })
        .collect::<Result<Vec<_>>>()?;
    ScenarioFn::new(MeasureSpace::new(masses)?, comps)
}

/// `inf_{x ∈ S} ρ(x)` with `S = {x : E[x | block] ≥ 0}`.
pub fn portfolio_instance<T: Scalar>(spec: &RiskSpec<T>) -> Result<(ScenarioFn<T>, ConstraintSet<T>)> {
    let f = conditional_risk(spec)?;
    let s = ConstraintSet::new(ConstraintSet::CondExpCone {
        space: spec.space.clone(),
        partition: spec.partition.clone(),
        threshold: T::zero(),
    })?;
    Ok((f, s))
}

pub const NUMERIC_MAX_DIM: usize = 3;

fn check_numeric_dim(n: usize) -> Result<()> {
    if n == 0 || n > NUMERIC_MAX_DIM {
        return Err(Error::Unsupported(format!(
            "numeric conjugation is limited to dimension {NUMERIC_MAX_DIM}, got {n}"
        )));
    }
    Ok(())
}

/// `sup_x ⟨x, y⟩ − f(x)` over the grid `{−r, …, r}ᴺ` with `2·steps + 1`
/// points per axis.
pub fn numeric_conjugate<T: Scalar>(f: &ConvexFn<T>, y: &[T], radius: T, steps: usize) -> Result<T> {
    let n = f.dim();
    check_numeric_dim(n)?;
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!("y has {} coordinates, f {n}", y.len())));
    }
    let side = 2 * steps + 1;
    let h = radius / T::lit(steps.max(1) as f64);
    let mut best = T::neg_infinity();
    let mut x = vec![T::zero(); n];
    for mut code in 0..side.pow(n as u32) {
        for xi in x.iter_mut() {
            *xi = h * T::lit((code % side) as f64) - radius;
            code /= side;
        }
        best = best.max(dot(&x, y) - f.eval(&x));
    }
    Ok(best)
}

/// `sup_q −⟨q, x⟩ − f*(−q)` over densities `q` of a risk component, by
/// pairwise mass transfers with halving steps. For cvar and entropic
/// components this is the biconjugate at `x`.
pub fn risk_biconjugate<T: Scalar>(f: &ConvexFn<T>, x: &[T]) -> Result<T> {
    let r = match f {
        ConvexFn::Cvar(r) | ConvexFn::Entropic(r) => r,
        _ => return Err(Error::Unsupported(format!("biconjugate of a {} component", f.kind()))),
    };
    check_numeric_dim(r.dim())?;
    if x.len() != r.dim() {
        return Err(Error::DimensionMismatch(format!("x has {} coordinates, f {}", x.len(), r.dim())));
    }
    let fc = f.conjugate()?;
    let support: Vec<usize> = (0..r.dim()).filter(|&j| r.probs[j] > T::zero()).collect();
    let objective = |q: &[T]| {
        let y: Vec<T> = q.iter().map(|&v| -v).collect();
        dot(&y, x) - fc.eval(&y)
    };
    let mut q = r.probs.clone();
    let mut best = objective(&q);
    let mut step = T::lit(0.25);
    let floor = T::lit(1e-13);
    let mut rounds = 0;
    while step > floor && rounds < 200_000 {
        rounds += 1;
        let mut moved = false;
        for &i in &support {
            for &j in &support {
                if i == j {
                    continue;
                }
                let s = step.min(q[j]);
                if s <= T::zero() {
                    continue;
                }
                let mut trial = q.clone();
                trial[i] = trial[i] + s;
                trial[j] = trial[j] - s;
                let v = objective(&trial);
                if v > best {
                    (q, best, moved) = (trial, v, true);
                }
            }
        }
        if !moved {
            step = step * T::lit(0.5);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_and_linear_sums() {
        let outer = MeasureSpace::uniform(2).unwrap();
        let inner = MeasureSpace::new(vec![0.25f64, 0.75]).unwrap();
        let lin = |c: f64| ConvexFn::affine1(c, 0.0);
        let k = KernelTable::new(outer, inner, vec![vec![lin(1.0), lin(-3.0)], vec![lin(2.0), lin(2.0)]]).unwrap();
        let op = integral_operator(&k).unwrap();
        assert!(op.warnings.is_empty());
        assert_eq!(op.f.components()[0], ConvexFn::affine1(-2.0, 0.0));
        assert_eq!(op.f.components()[1], ConvexFn::affine1(2.0, 0.0));
    }

    #[test]
    fn mixed_kernels_warn() {
        let outer = MeasureSpace::uniform(1).unwrap();
        let inner = MeasureSpace::new(vec![1.0f64, 1.0]).unwrap();
        let k = KernelTable::new(outer, inner, vec![vec![ConvexFn::abs(), ConvexFn::half_square(1)]]).unwrap();
        let op = integral_operator(&k).unwrap();
        assert_eq!(op.warnings.len(), 1);
        let f = &op.f.components()[0];
        for x in [-2.0, -0.3, 0.0, 1.5] {
            assert!((f.eval(&[x]) - (x.abs() + 0.5 * x * x)).abs() < 1e-3);
        }
    }

    #[test]
    fn cvar_alpha_one_rejected() {
        let r = RiskSpec::new(
            RiskKind::Cvar { alpha: 1.0f64 },
            Partition::trivial(2),
            MeasureSpace::uniform(2).unwrap(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn numeric_dim_limit() {
        let f = ConvexFn::half_square(4);
        assert!(matches!(numeric_conjugate(&f, &[0.0f64; 4], 1.0, 2), Err(Error::Unsupported(_))));
    }
}
