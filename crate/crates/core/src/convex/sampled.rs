//! Convex functions sampled on a one-dimensional grid.

use serde::{Deserialize, Serialize};

use super::pwl::Pwl;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Closed-form generators used to (re)sample a function at finer
/// resolutions. Refinement is what lets the toolkit tell a genuinely
/// attained optimum from one that only appears attained on a finite grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// `x²/2`
    HalfSquare,
    /// `|x|`
    Abs,
    /// `eˣ`
    Exp,
    /// `−2√(−x)` on `x ≤ 0`; conjugate `1/y` on `y > 0`
    NegSqrt,
    /// `x·ln x − x` on `x ≥ 0`
    Entropy,
}

impl Sampler {
    /// Closed effective domain of the generating function.
    pub fn natural_domain(self) -> (f64, f64) {
        match self {
            Sampler::NegSqrt => (f64::NEG_INFINITY, 0.0),
            Sampler::Entropy => (0.0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Sampler::HalfSquare => 0.5 * x * x,
            Sampler::Abs => x.abs(),
            Sampler::Exp => x.exp(),
            Sampler::NegSqrt => {
                if x <= 0.0 {
                    -2.0 * (-x).sqrt()
                } else {
                    f64::INFINITY
                }
            }
            Sampler::Entropy => {
                if x > 0.0 {
                    x * x.ln() - x
                } else if x == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSource {
    pub sampler: Sampler,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl SampleSource {
    /// Grid with `(points − 1)·4^level + 1` nodes over the same range.
    pub fn refined(&self, level: u32) -> Self {
        let n = (self.points.max(2) - 1) * 4usize.pow(level) + 1;
        Self { points: n, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sampled1D<T> {
    grid: Vec<T>,
    values: Vec<T>,
    source: Option<SampleSource>,
}

impl<T: Scalar> Sampled1D<T> {
    /// Values may be `+∞` (outside the effective domain) but never `−∞`.
    pub fn new(grid: Vec<T>, values: Vec<T>) -> Result<Self> {
        check_grid(&grid)?;
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values on {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| v.is_nan() || *v == T::neg_infinity()) {
            return Err(Error::Improper("sample value is −∞ or NaN".into()));
        }
        Ok(Self {
            grid,
            values,
            source: None,
        })
    }

    pub fn from_source(source: SampleSource) -> Result<Self> {
        if source.points < 2 || !(source.lo < source.hi) {
            return Err(Error::InvalidGrid(format!(
                "need at least two points on a nonempty range, got {source:?}"
            )));
        }
        let n = source.points;
        let step = (source.hi - source.lo) / (n - 1) as f64;
        let grid: Vec<f64> = (0..n)
            .map(|i| if i + 1 == n { source.hi } else { source.lo + step * i as f64 })
            .collect();
        let values = grid.iter().map(|&x| source.sampler.eval(x)).collect::<Vec<_>>();
        let mut s = Self::new(
            grid.into_iter().map(T::lit).collect(),
            values.into_iter().map(T::lit).collect(),
        )?;
        s.source = Some(source);
        Ok(s)
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn source(&self) -> Option<&SampleSource> {
        self.source.as_ref()
    }

    /// Whether the left and right grid ends truncate the function's true
    /// domain. Without a source both ends are treated as truncations.
    pub fn truncated_ends(&self) -> (bool, bool) {
        match &self.source {
            Some(src) => {
                let (lo, hi) = src.sampler.natural_domain();
                (lo < src.lo, hi > src.hi)
            }
            None => (true, true),
        }
    }

    /// Resample from the generating closed form, if there is one.
    pub fn refined(&self, level: u32) -> Option<Result<Self>> {
        self.source.map(|s| Self::from_source(s.refined(level)))
    }

    /// Piecewise-linear interpolation of the samples; `+∞` off the grid.
    pub fn eval(&self, x: T) -> T {
        let g = &self.grid;
        let n = g.len();
        if x < g[0] || x > g[n - 1] || x.is_nan() {
            return T::infinity();
        }
        let j = g.partition_point(|&p| p < x);
        if g[j] == x {
            return self.values[j];
        }
        let (a, b) = (self.values[j - 1], self.values[j]);
        if a.is_infinite() || b.is_infinite() {
            return T::infinity();
        }
        let t = (x - g[j - 1]) / (g[j] - g[j - 1]);
        a + (b - a) * t
    }

    /// Whether the finite samples are convex along the grid (second
    /// differences nonnegative up to `tol`) with a contiguous finite range.
    pub fn is_convex(&self, tol: T) -> bool {
        let finite: Vec<usize> = (0..self.grid.len())
            .filter(|&i| self.values[i].is_finite())
            .collect();
        if finite.is_empty() {
            return false;
        }
        if finite.windows(2).any(|w| w[1] != w[0] + 1) {
            return false;
        }
        finite.windows(3).all(|w| {
            let (x0, x1, x2) = (self.grid[w[0]], self.grid[w[1]], self.grid[w[2]]);
            let (v0, v1, v2) = (self.values[w[0]], self.values[w[1]], self.values[w[2]]);
            let s1 = (v1 - v0) / (x1 - x0);
            let s2 = (v2 - v1) / (x2 - x1);
            s2 - s1 >= -tol * T::one().max(s1.abs()).max(s2.abs())
        })
    }

    /// Closed convex hull of the samples, exactly as a piecewise-linear
    /// function with domain walls at the extreme finite samples.
    pub fn to_pwl(&self) -> Result<Pwl<T>> {
        Pwl::lower_hull(&self.grid, &self.values)
    }

    /// Same grid with the values replaced by the closed convex hull.
    pub fn closure(&self) -> Result<Self> {
        let hull = self.to_pwl()?;
        let values = self.grid.iter().map(|&x| hull.eval(x)).collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
            source: self.source,
        })
    }
}

fn check_grid<T: Scalar>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid("non-finite grid point".into()));
    }
    if let Some(i) = grid.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid(format!("grid not strictly increasing at {}", i + 1)));
    }
    Ok(())
}

/// Discrete Legendre transform `g(sⱼ) = maxᵢ (sⱼ·xᵢ − f(xᵢ))`.
///
/// One lower-hull pass over the samples, then a single monotone sweep over
/// the sorted dual grid: the maximizing hull vertex is nondecreasing in `s`.
/// Candidates are compared through the same expression the brute-force
/// maximum uses, so the two agree exactly.
pub fn conjugate_sampled_llt<T: Scalar>(f: &Sampled1D<T>, dual_grid: &[T]) -> Result<Sampled1D<T>> {
    check_grid(dual_grid)?;
    let pts: Vec<(T, T)> = f
        .grid
        .iter()
        .zip(&f.values)
        .filter(|(_, v)| v.is_finite())
        .map(|(&x, &v)| (x, v))
        .collect();
    if pts.is_empty() {
        return Err(Error::Improper("all sample values are +∞".into()));
    }
    let hull = hull_keep_collinear(&pts);
    let score = |i: usize, s: T| s * hull[i].0 - hull[i].1;
    let mut out = Vec::with_capacity(dual_grid.len());
    let mut idx = 0usize;
    for &s in dual_grid {
        while idx + 1 < hull.len() && score(idx + 1, s) >= score(idx, s) {
            idx += 1;
        }
        let mut best = score(idx, s);
        // rounding can leave a near-tie just behind or ahead of the sweep
        if idx > 0 {
            best = best.max(score(idx - 1, s));
        }
        for j in idx + 1..(idx + 3).min(hull.len()) {
            best = best.max(score(j, s));
        }
        out.push(best);
    }
    Sampled1D::new(dual_grid.to_vec(), out)
}

/// Lower hull that keeps points lying exactly on a chord.
fn hull_keep_collinear<T: Scalar>(pts: &[(T, T)]) -> Vec<(T, T)> {
    let mut hull: Vec<(T, T)> = Vec::with_capacity(pts.len());
    for &q in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (q.1 - a.1) - (b.1 - a.1) * (q.0 - a.0);
            if cross < T::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(q);
    }
    hull
}
