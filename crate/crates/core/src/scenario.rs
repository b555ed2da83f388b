//! Functions `f: ℝᵈ → L̄⁰` given by one closed convex component per atom.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convex::{ConvexFn, Minimum};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::measure::{L0Ext, MeasureSpace, Partition};
use crate::scalar::{dot, ext_add, Scalar};

/// An element of `L⁰(ℝᵈ)`: one point of ℝᵈ per atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L0Point<T> {
    pub dim: usize,
    pub coords: Vec<Vec<T>>,
}

impl<T: Scalar> L0Point<T> {
    pub fn new(dim: usize, coords: Vec<Vec<T>>) -> Result<Self> {
        if coords.iter().any(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch(format!("every coordinate must have length {dim}")));
        }
        if coords.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction("L0 points have finite coordinates".into()));
        }
        Ok(Self { dim, coords })
    }

    /// Scalar values, one per atom.
    pub fn scalars(values: &[T]) -> Self {
        Self {
            dim: 1,
            coords: values.iter().map(|&v| vec![v]).collect(),
        }
    }

    pub fn constant(atoms: usize, x: &[T]) -> Self {
        Self {
            dim: x.len(),
            coords: vec![x.to_vec(); atoms],
        }
    }

    pub fn atom_count(&self) -> usize {
        self.coords.len()
    }

    pub fn at(&self, atom: usize) -> &[T] {
        &self.coords[atom]
    }

    /// `Σ_k piece_k 1_{B_k}`.
    pub fn paste(pieces: &[Self], blocks: &Partition) -> Result<Self> {
        if pieces.len() != blocks.block_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} pieces for {} blocks",
                pieces.len(),
                blocks.block_count()
            )));
        }
        let n = blocks.atom_count();
        if pieces.iter().any(|p| p.atom_count() != n || p.dim != pieces[0].dim) {
            return Err(Error::DimensionMismatch("pieces disagree on atoms or dimension".into()));
        }
        Ok(Self {
            dim: pieces[0].dim,
            coords: (0..n).map(|i| pieces[blocks.block_of(i)].coords[i].clone()).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFn<T> {
    space: MeasureSpace<T>,
    dim: usize,
    components: Vec<ConvexFn<T>>,
}

/// Outcome of [`ScenarioFn::solve_primal`].
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalSolution<T> {
    pub value: L0Ext<T>,
    /// A single point minimizing every component simultaneously.
    pub minimizer: Option<Vec<T>>,
    pub per_atom: Vec<Minimum<T>>,
}

impl<T: Scalar> ScenarioFn<T> {
    /// Checks dimensions and that some `x₀` has every component finite, as
    /// far as the component domains are boxes.
    pub fn new(space: MeasureSpace<T>, components: Vec<ConvexFn<T>>) -> Result<Self> {
        let f = Self::unchecked(space, components)?;
        let d = f.dim;
        let mut common = vec![(T::neg_infinity(), T::infinity()); d];
        for c in &f.components {
            for (k, (l, h)) in c.domain_box().0.into_iter().enumerate() {
                common[k] = (common[k].0.max(l), common[k].1.min(h));
            }
        }
        if let Some(k) = common.iter().position(|(l, h)| l > h) {
            return Err(Error::Improper(format!(
                "component domains share no point (coordinate {k})"
            )));
        }
        Ok(f)
    }

    /// Dimension checks only; components may have disjoint domains, as
    /// conjugates of proper functions can.
    pub fn unchecked(space: MeasureSpace<T>, components: Vec<ConvexFn<T>>) -> Result<Self> {
        if components.len() != space.atom_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} components for {} atoms",
                components.len(),
                space.atom_count()
            )));
        }
        let dim = components[0].dim();
        if let Some(i) = components.iter().position(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "component {i} has dimension {}, expected {dim}",
                components[i].dim()
            )));
        }
        Ok(Self {
            space,
            dim,
            components,
        })
    }

    /// The same function on every atom of a uniform space.
    pub fn replicated(atoms: usize, f: ConvexFn<T>) -> Result<Self> {
        Self::new(MeasureSpace::uniform(atoms)?, vec![f; atoms])
    }

    pub fn space(&self) -> &MeasureSpace<T> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[ConvexFn<T>] {
        &self.components
    }

    pub fn atom_count(&self) -> usize {
        self.components.len()
    }

    fn check_point(&self, y: &L0Point<T>) -> Result<()> {
        if y.atom_count() != self.atom_count() || y.dim != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "point has {} atoms of dimension {}, function {} of dimension {}",
                y.atom_count(),
                y.dim,
                self.atom_count(),
                self.dim
            )));
        }
        Ok(())
    }

    fn check_const(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "point of dimension {}, function of dimension {}",
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Stable extension: `F(x)ᵢ = fᵢ(xᵢ)`.
    pub fn extend_eval(&self, x: &L0Point<T>) -> Result<L0Ext<T>> {
        self.check_point(x)?;
        Ok(L0Ext::new(
            self.components.iter().zip(&x.coords).map(|(f, xi)| f.eval(xi)).collect(),
        ))
    }

    pub fn eval(&self, x: &[T]) -> Result<L0Ext<T>> {
        self.check_const(x)?;
        Ok(L0Ext::new(self.components.iter().map(|f| f.eval(x)).collect()))
    }

    /// Atomwise conjugate `(F*(y))ᵢ = fᵢ*(yᵢ)`.
    pub fn vec_conjugate(&self) -> Result<Self> {
        let comps = self
            .components
            .par_iter()
            .map(|f| f.conjugate())
            .collect::<Result<Vec<_>>>()?;
        Self::unchecked(self.space.clone(), comps)
    }

    /// `f*(y) + f(x) − ⟨x, y⟩` per atom.
    pub fn young_fenchel_gap(&self, x: &[T], y: &L0Point<T>) -> Result<L0Ext<T>> {
        self.check_const(x)?;
        self.check_point(y)?;
        let conj = self.vec_conjugate()?;
        Ok(L0Ext::new(
            (0..self.atom_count())
                .map(|i| {
                    let yi = y.at(i);
                    ext_add(ext_add(conj.components[i].eval(yi), self.components[i].eval(x)), -dot(x, yi))
                })
                .collect(),
        ))
    }

    /// `yᵢ ∈ ∂fᵢ(x)` per atom, via the Young–Fenchel equality.
    pub fn is_subgradient(&self, x: &[T], y: &L0Point<T>, tol: T) -> Result<Vec<bool>> {
        let gap = self.young_fenchel_gap(x, y)?;
        Ok(self
            .components
            .iter()
            .zip(&gap.values)
            .map(|(f, &g)| f.eval(x).is_finite() && g <= tol)
            .collect())
    }

    /// Componentwise infimum over constant `x`, plus a simultaneous
    /// minimizer when one exists.
    pub fn solve_primal(&self, tol: T) -> PrimalSolution<T> {
        let per_atom: Vec<Minimum<T>> = self.components.par_iter().map(|f| f.minimize()).collect();
        let value = L0Ext::new(per_atom.iter().map(|m| m.value).collect());
        let minimizer = common_minimizer(
            &per_atom,
            self.dim,
            |i, x| self.components[i].eval(x),
            self.stacked_stationary_point(),
            tol,
        );
        PrimalSolution {
            value,
            minimizer,
            per_atom,
        }
    }

    /// Least-squares solution of `Qᵢx = −bᵢ` over the quadratic components.
    fn stacked_stationary_point(&self) -> Option<Vec<T>> {
        let d = self.dim;
        let mut normal = Matrix::zeros(d, d);
        let mut rhs = vec![T::zero(); d];
        let mut any = false;
        for f in &self.components {
            if let ConvexFn::Quadratic(q) = f {
                any = true;
                let qt = q.q.transpose();
                normal = normal.add(&qt.mul(&q.q));
                for (r, v) in rhs.iter_mut().zip(qt.mul_vec(&q.b)) {
                    *r = *r - v;
                }
            }
        }
        if !any {
            return None;
        }
        normal.solve_consistent(&rhs)
    }
}

/// A point attaining every per-atom minimum within `tol`, searched among
/// the intersection of one-dimensional argmin intervals, an optional extra
/// candidate and the per-atom witnesses.
pub(crate) fn common_minimizer<T: Scalar>(
    per_atom: &[Minimum<T>],
    dim: usize,
    eval: impl Fn(usize, &[T]) -> T,
    extra: Option<Vec<T>>,
    tol: T,
) -> Option<Vec<T>> {
    if !per_atom.iter().all(|m| m.attained()) {
        return None;
    }
    let mut cands: Vec<Vec<T>> = Vec::new();
    if dim == 1 && per_atom.iter().all(|m| m.interval.is_some()) {
        let (lo, hi) = per_atom.iter().fold((T::neg_infinity(), T::infinity()), |(l, h), m| {
            let (a, b) = m.interval.unwrap();
            (l.max(a), h.min(b))
        });
        let x = if lo <= hi {
            T::zero().max(lo).min(hi)
        } else {
            (lo + hi) / T::lit(2.0)
        };
        cands.push(vec![x]);
    }
    cands.extend(extra);
    cands.extend(per_atom.iter().filter_map(|m| m.witness.clone()));
    cands.into_iter().find(|x| {
        x.iter().all(|v| v.is_finite())
            && per_atom.iter().enumerate().all(|(i, m)| {
                let v = eval(i, x);
                v.is_finite() && v - m.value <= tol * T::one().max(m.value.abs())
            })
    })
}
