//! Random instance generators and brute-force oracles shared by the
//! property and acceptance tests.
#![allow(dead_code)]

use l0dual::convex::{BoxSet, ConvexFn, Pwl, Quadratic, Sampled1D};
use l0dual::duality::{PertComponent, Perturbation};
use l0dual::linalg::Matrix;
use l0dual::measure::MeasureSpace;
use rand::Rng;

const INF: f64 = f64::INFINITY;

/// Values on a coarse dyadic lattice keep the oracles free of rounding.
fn lattice(rng: &mut impl Rng, lo: i32, hi: i32) -> f64 {
    rng.gen_range(lo * 4..=hi * 4) as f64 / 4.0
}

fn sorted_distinct(rng: &mut impl Rng, n: usize, lo: i32, hi: i32) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| lattice(rng, lo, hi)).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

pub fn rand_pwl(rng: &mut impl Rng) -> Pwl<f64> {
    let n = rng.gen_range(0..=5);
    let b = sorted_distinct(rng, n, -4, 4);
    let k = b.len();
    let mut s: Vec<f64> = (0..=k).map(|_| lattice(rng, -3, 3)).collect();
    s.sort_by(f64::total_cmp);
    if k > 0 && rng.gen_bool(0.3) {
        s[0] = -INF;
    }
    if k > 0 && rng.gen_bool(0.3) {
        s[k] = INF;
    }
    let x0 = if k == 0 { 0.0 } else { b[rng.gen_range(0..k)] };
    Pwl::new(b, s, x0, lattice(rng, -3, 3)).unwrap()
}

/// Positive definite `½xᵀQx + bᵀx + c`.
pub fn rand_quadratic(rng: &mut impl Rng, d: usize) -> Quadratic<f64> {
    let a: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| lattice(rng, -2, 2)).collect()).collect();
    let mut q = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            q[(i, j)] = (0..d).map(|k| a[i][k] * a[j][k]).sum::<f64>() + if i == j { 0.5 } else { 0.0 };
        }
    }
    let b = (0..d).map(|_| lattice(rng, -2, 2)).collect();
    Quadratic::new(q, b, lattice(rng, -2, 2)).unwrap()
}

pub fn rand_box(rng: &mut impl Rng, d: usize) -> BoxSet<f64> {
    let mut lo = vec![];
    let mut hi = vec![];
    for _ in 0..d {
        let a = lattice(rng, -3, 3);
        let w = rng.gen_range(0..=8) as f64 / 4.0;
        lo.push(if rng.gen_bool(0.2) { -INF } else { a });
        hi.push(if rng.gen_bool(0.2) { INF } else { a + w });
    }
    BoxSet::new(lo, hi).unwrap()
}

/// An exact one-dimensional catalog function.
pub fn rand_exact_1d(rng: &mut impl Rng) -> ConvexFn<f64> {
    match rng.gen_range(0..6) {
        0 | 1 => ConvexFn::Pwl(rand_pwl(rng)),
        2 => ConvexFn::Quadratic(rand_quadratic(rng, 1)),
        3 => ConvexFn::IndicatorBox {
            set: rand_box(rng, 1),
            offset: lattice(rng, -2, 2),
        },
        4 => ConvexFn::SupportBox {
            set: rand_box(rng, 1),
            offset: lattice(rng, -2, 2),
        }
        .normalize(),
        _ => ConvexFn::affine1(lattice(rng, -2, 2), lattice(rng, -2, 2)),
    }
}

/// Convex samples from random nondecreasing chord slopes.
pub fn rand_sampled(rng: &mut impl Rng, n: usize) -> Sampled1D<f64> {
    let mut grid = vec![rng.gen_range(-5.0..0.0)];
    for _ in 1..n {
        let last = *grid.last().unwrap();
        grid.push(last + rng.gen_range(0.01..0.5));
    }
    let mut slopes: Vec<f64> = (1..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
    slopes.sort_by(f64::total_cmp);
    let mut values = vec![rng.gen_range(-2.0..2.0)];
    for i in 1..n {
        values.push(values[i - 1] + slopes[i - 1] * (grid[i] - grid[i - 1]));
    }
    Sampled1D::new(grid, values).unwrap()
}

/// `Φᵢ(x, w) = fᵢ(x) + gᵢ(aᵢx + w)` with exact data, or a joint positive
/// definite quadratic on ℝ². Retries until the instance is feasible.
pub fn rand_perturbation(rng: &mut impl Rng, atoms: usize, replicated: bool) -> Perturbation<f64> {
    loop {
        let mut comp = || {
            if rng.gen_bool(0.15) {
                PertComponent::Joint(ConvexFn::Quadratic(rand_quadratic(rng, 2)))
            } else {
                let a = rng.gen_range(-2..=2) as f64;
                PertComponent::composite1(rand_exact_1d(rng), rand_exact_1d(rng), a)
            }
        };
        let comps = if replicated {
            vec![comp(); atoms]
        } else {
            (0..atoms).map(|_| comp()).collect()
        };
        let w: Vec<f64> = (0..atoms).map(|_| rng.gen_range(1..=4) as f64 / 4.0).collect();
        if let Ok(p) = Perturbation::new(MeasureSpace::new(w).unwrap(), 1, 1, comps) {
            return p;
        }
    }
}

/// `sup_x xy − f(x)` for a PWL function: the supremum sits at a breakpoint
/// when `y` lies between the end slopes, and is `+∞` otherwise.
pub fn brute_pwl_conjugate(f: &Pwl<f64>, y: f64) -> f64 {
    let s = f.slopes();
    let (first, last) = (s[0], s[s.len() - 1]);
    if y < first || y > last {
        return INF;
    }
    let b = f.breakpoints();
    if b.is_empty() {
        // affine: y equals the slope
        return -f.eval(0.0);
    }
    b.iter()
        .map(|&x| x * y - f.eval(x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The O(n·m) discrete Legendre transform.
pub fn brute_llt(grid: &[f64], values: &[f64], dual: &[f64]) -> Vec<f64> {
    dual.iter()
        .map(|&s| {
            grid.iter()
                .zip(values)
                .map(|(&x, &v)| s * x - v)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// `min_p h(p)` on a uniform grid.
pub fn grid_min(h: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    (0..=n)
        .map(|k| h(lo + (hi - lo) * k as f64 / n as f64))
        .fold(INF, f64::min)
}

/// CVaR_α of a loss vector by the Rockafellar–Uryasev minimization over
/// the loss values.
pub fn cvar_oracle(p: &[f64], loss: &[f64], alpha: f64) -> f64 {
    loss.iter()
        .zip(p)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&t, _)| t + loss.iter().zip(p).map(|(&l, &w)| w * (l - t).max(0.0)).sum::<f64>() / alpha)
        .fold(INF, f64::min)
}

pub fn entropic_oracle(p: &[f64], x: &[f64], gamma: f64) -> f64 {
    let m = x.iter().zip(p).filter(|(_, &w)| w > 0.0).map(|(&v, _)| -gamma * v).fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = x.iter().zip(p).map(|(&v, &w)| w * (-gamma * v - m).exp()).sum();
    (m + s.ln()) / gamma
}

/// Risk envelope membership of `y = −q`.
pub fn in_envelope(p: &[f64], alpha: f64, y: &[f64], tol: f64) -> bool {
    let sum: f64 = y.iter().map(|v| -v).sum();
    (sum - 1.0).abs() <= tol && y.iter().zip(p).all(|(&v, &w)| -v >= -tol && -v <= w / alpha + tol)
}
