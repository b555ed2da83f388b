//! Finite measure spaces, atom-indexed extended-real vectors and partitions.
//!
//! A σ-finite space is modelled by finitely many weighted atoms, so the
//! almost-everywhere order is the exact componentwise order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpace<T> {
    weights: Vec<T>,
}

impl<T: Scalar> MeasureSpace<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSpace("no atoms".into()));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > T::zero()) {
                return Err(Error::InvalidSpace(format!(
                    "weight of atom {i} must be positive and finite, got {w}"
                )));
            }
        }
        Ok(Self { weights })
    }

    /// `n` atoms of mass `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpace("no atoms".into()));
        }
        let w = T::one() / T::from_usize(n).unwrap();
        Self::new(vec![w; n])
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn atom_count(&self) -> usize {
        self.weights.len()
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, &w| a + w)
    }

    /// Same atoms rescaled to total mass one.
    pub fn normalized(&self) -> Self {
        let m = self.total_mass();
        Self {
            weights: self.weights.iter().map(|&w| w / m).collect(),
        }
    }

    pub fn is_probability(&self, tol: T) -> bool {
        (self.total_mass() - T::one()).abs() <= tol
    }
}

/// An element of L̄⁰: one extended real per atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L0Ext<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> L0Ext<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn constant(n: usize, v: T) -> Self {
        Self { values: vec![v; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.len() == other.len() && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    /// Member of L⁰ (no infinite component).
    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= T::zero())
    }

    pub fn is_positive(&self) -> bool {
        self.values.iter().all(|&v| v > T::zero() && v.is_finite())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Inf,
    Sup,
}

/// Essential infimum or supremum of a finite family, computed atomwise.
pub fn ess_extrema<T: Scalar>(family: &[L0Ext<T>], mode: Extremum) -> Result<L0Ext<T>> {
    let first = family.first().ok_or(Error::EmptyFamily)?;
    let n = first.len();
    if let Some(bad) = family.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "expected {n} atoms, found {}",
            bad.len()
        )));
    }
    let mut out = first.values.clone();
    for v in &family[1..] {
        for (o, &x) in out.iter_mut().zip(&v.values) {
            *o = match mode {
                Extremum::Inf => o.min(x),
                Extremum::Sup => o.max(x),
            };
        }
    }
    Ok(L0Ext::new(out))
}

/// A finite measurable partition of the atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    block_of: Vec<usize>,
    block_count: usize,
}

impl Partition {
    /// `block_of[i]` is the block containing atom `i`; block indices must
    /// be `0..k` with every block nonempty.
    pub fn new(block_of: Vec<usize>) -> Result<Self> {
        if block_of.is_empty() {
            return Err(Error::InvalidSpace("partition of zero atoms".into()));
        }
        let k = block_of.iter().max().unwrap() + 1;
        let mut seen = vec![false; k];
        for &b in &block_of {
            seen[b] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidSpace(format!("block {empty} is empty")));
        }
        Ok(Self {
            block_of,
            block_count: k,
        })
    }

    pub fn from_blocks(atom_count: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut block_of = vec![usize::MAX; atom_count];
        for (b, atoms) in blocks.iter().enumerate() {
            if atoms.is_empty() {
                return Err(Error::InvalidSpace(format!("block {b} is empty")));
            }
            for &a in atoms {
                if a >= atom_count || block_of[a] != usize::MAX {
                    return Err(Error::InvalidSpace(format!(
                        "atom {a} out of range or assigned twice"
                    )));
                }
                block_of[a] = b;
            }
        }
        if let Some(a) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidSpace(format!("atom {a} not covered")));
        }
        Self::new(block_of)
    }

    pub fn trivial(atom_count: usize) -> Self {
        Self {
            block_of: vec![0; atom_count.max(1)],
            block_count: 1,
        }
    }

    pub fn discrete(atom_count: usize) -> Self {
        Self {
            block_of: (0..atom_count).collect(),
            block_count: atom_count,
        }
    }

    pub fn block_of(&self, atom: usize) -> usize {
        self.block_of[atom]
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn atom_count(&self) -> usize {
        self.block_of.len()
    }

    pub fn atoms_in(&self, block: usize) -> Vec<usize> {
        (0..self.block_of.len())
            .filter(|&i| self.block_of[i] == block)
            .collect()
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        (0..self.block_count).map(|b| self.atoms_in(b)).collect()
    }
}

/// `E[x | P]`: on each block, the weighted mean of `x` over the block.
pub fn cond_expectation<T: Scalar>(
    x: &L0Ext<T>,
    p: &Partition,
    space: &MeasureSpace<T>,
) -> Result<L0Ext<T>> {
    let n = space.atom_count();
    if x.len() != n || p.atom_count() != n {
        return Err(Error::DimensionMismatch(format!(
            "space has {n} atoms, vector {}, partition {}",
            x.len(),
            p.atom_count()
        )));
    }
    if !x.is_finite() {
        return Err(Error::InvalidSpace(
            "conditional expectation needs finite entries".into(),
        ));
    }
    let mut num = vec![T::zero(); p.block_count()];
    let mut den = vec![T::zero(); p.block_count()];
    for i in 0..n {
        let b = p.block_of(i);
        num[b] = num[b] + space.weights()[i] * x.values[i];
        den[b] = den[b] + space.weights()[i];
    }
    Ok(L0Ext::new(
        (0..n).map(|i| num[p.block_of(i)] / den[p.block_of(i)]).collect(),
    ))
}

/// Concatenation `Σ_k piece_k 1_{B_k}`.
pub fn paste<T: Scalar>(pieces: &[L0Ext<T>], blocks: &Partition) -> Result<L0Ext<T>> {
    if pieces.len() != blocks.block_count() {
        return Err(Error::DimensionMismatch(format!(
            "{} pieces for {} blocks",
            pieces.len(),
            blocks.block_count()
        )));
    }
    let n = blocks.atom_count();
    if let Some(bad) = pieces.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "piece has {} atoms, partition {n}",
            bad.len()
        )));
    }
    Ok(L0Ext::new(
        (0..n).map(|i| pieces[blocks.block_of(i)].values[i]).collect(),
    ))
}
