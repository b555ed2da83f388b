use l0dual::applications::*;
use l0dual::convex::{ConvexFn, Pwl};
use l0dual::measure::{MeasureSpace, Partition};
use l0dual::schemes::fenchel_lagrange_solve;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// CVaR_α(L) = min_t t + E[(L − t)⁺]/α, minimized over the loss values.
fn cvar_oracle(p: &[f64], loss: &[f64], alpha: f64) -> f64 {
    loss.iter()
        .zip(p)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&t, _)| t + loss.iter().zip(p).map(|(&l, &w)| w * (l - t).max(0.0)).sum::<f64>() / alpha)
        .fold(f64::INFINITY, f64::min)
}

fn entropic_oracle(p: &[f64], x: &[f64], g: f64) -> f64 {
    (p.iter().zip(x).map(|(&w, &v)| w * (-g * v).exp()).sum::<f64>()).ln() / g
}

fn spec(kind: RiskKind<f64>, blocks: &[Vec<usize>], weights: Vec<f64>) -> RiskSpec<f64> {
    let n = weights.len();
    RiskSpec::new(kind, Partition::from_blocks(n, blocks).unwrap(), MeasureSpace::new(weights).unwrap()).unwrap()
}

#[test]
fn integral_operator_examples() {
    let outer = MeasureSpace::uniform(2).unwrap();
    let inner = MeasureSpace::uniform(3).unwrap();
    let cs = [[1.0, 2.0, -0.5], [0.0, 3.0, 3.0]];
    let rows = cs.iter().map(|r| r.iter().map(|&c| ConvexFn::affine1(c, 0.0)).collect()).collect();
    let op = integral_operator(&KernelTable::new(outer.clone(), inner.clone(), rows).unwrap()).unwrap();
    for (i, r) in cs.iter().enumerate() {
        let expect: f64 = r.iter().sum::<f64>() / 3.0;
        for x in [-1.0, 0.5, 2.0] {
            assert!((op.f.components()[i].eval(&[x]) - expect * x).abs() < 1e-12);
        }
    }

    let rows = vec![vec![ConvexFn::half_square(1); 3]; 2];
    let op = integral_operator(&KernelTable::new(outer, inner, rows).unwrap()).unwrap();
    for c in op.f.components() {
        for x in [-2.0, 0.0, 1.0, 3.5] {
            assert!((c.eval(&[x]) - 0.5 * x * x).abs() < 1e-12);
        }
    }

    let k = KernelTable::new(
        MeasureSpace::uniform(1).unwrap(),
        MeasureSpace::new(vec![1.0, 1.0]).unwrap(),
        vec![vec![ConvexFn::abs(), ConvexFn::Pwl(Pwl::abs_shifted(1.0))]],
    )
    .unwrap();
    let op = integral_operator(&k).unwrap();
    assert!(op.warnings.is_empty());
    let f = &op.f.components()[0];
    assert!(matches!(f, ConvexFn::Pwl(_)));
    for x in [-3.0f64, -0.5, 0.0, 0.25, 1.0, 4.0] {
        assert_eq!(f.eval(&[x]), x.abs() + (x - 1.0).abs());
    }
    let m = f.minimize();
    assert_eq!(m.value, 1.0);
    assert_eq!(m.interval, Some((0.0, 1.0)));
}

#[test]
fn conditional_risk_examples() {
    let ent = spec(RiskKind::Entropic { gamma: 0.7 }, &[vec![0, 2], vec![1, 3]], vec![0.1, 0.2, 0.3, 0.4]);
    let f = conditional_risk(&ent).unwrap();
    assert_eq!(f.atom_count(), 2);
    for c in [-2.0, 0.0, 1.25] {
        for v in f.eval(&[c; 4]).unwrap().values {
            assert!((v + c).abs() < 1e-12);
        }
    }

    let cv = spec(RiskKind::Cvar { alpha: 0.5 }, &[vec![0, 1, 2, 3]], vec![0.25; 4]);
    let f = conditional_risk(&cv).unwrap();
    assert_eq!(f.eval(&[0.0, 0.0, -1.0, -1.0]).unwrap().values, vec![1.0]);
    assert_eq!(cvar_oracle(&[0.25; 4], &[0.0, 0.0, 1.0, 1.0], 0.5), 1.0);

    let cv = spec(RiskKind::Cvar { alpha: 0.5 }, &[vec![0, 1], vec![2, 3]], vec![0.25; 4]);
    let f = conditional_risk(&cv).unwrap();
    let v = f.eval(&[0.0, -1.0, 0.0, -1.0]).unwrap().values;
    let per_block = cvar_oracle(&[0.5, 0.5], &[0.0, 1.0], 0.5);
    assert_eq!(v, vec![per_block, per_block]);
}

#[test]
fn conditional_risk_against_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w = vec![0.1, 0.15, 0.25, 0.2, 0.3];
    let blocks = vec![vec![0, 3], vec![1, 2, 4]];
    for _ in 0..200 {
        let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-3.0..3.0)).collect();
        for kind in [RiskKind::Cvar { alpha: 0.3 }, RiskKind::Entropic { gamma: 1.7 }] {
            let f = conditional_risk(&spec(kind, &blocks, w.clone())).unwrap();
            let v = f.eval(&x).unwrap().values;
            for (b, atoms) in blocks.iter().enumerate() {
                let mass: f64 = atoms.iter().map(|&j| w[j]).sum();
                let p: Vec<f64> = atoms.iter().map(|&j| w[j] / mass).collect();
                let xb: Vec<f64> = atoms.iter().map(|&j| x[j]).collect();
                let oracle = match kind {
                    RiskKind::Cvar { alpha } => {
                        cvar_oracle(&p, &xb.iter().map(|v| -v).collect::<Vec<_>>(), alpha)
                    }
                    RiskKind::Entropic { gamma } => entropic_oracle(&p, &xb, gamma),
                };
                assert!((v[b] - oracle).abs() < 1e-12, "{kind:?} block {b}");
            }
        }
    }
}

#[test]
fn continuity_from_above() {
    let x = [0.3, -1.0, 2.0];
    for kind in [RiskKind::Cvar { alpha: 0.4 }, RiskKind::Entropic { gamma: 2.0 }] {
        let f = conditional_risk(&spec(kind, &[vec![0, 1, 2]], vec![0.2, 0.5, 0.3])).unwrap();
        let limit = f.eval(&x).unwrap().values[0];
        let mut prev = f64::NEG_INFINITY;
        for n in 1..=60 {
            let xn: Vec<f64> = x.iter().map(|v| v + 1.0 / n as f64).collect();
            let v = f.eval(&xn).unwrap().values[0];
            assert!(v >= prev && v <= limit + 1e-15);
            prev = v;
        }
        assert!((limit - prev) <= 1.0 / 60.0 + 1e-12);
    }
}

#[test]
fn fenchel_moreau_by_numeric_biconjugate() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (w, blocks) in [
        (vec![0.5, 0.5], vec![vec![0, 1]]),
        (vec![0.2, 0.3, 0.5], vec![vec![0, 1, 2]]),
        (vec![0.2, 0.3, 0.5], vec![vec![0, 2], vec![1]]),
    ] {
        for kind in [RiskKind::Cvar { alpha: 0.35 }, RiskKind::Entropic { gamma: 1.3 }] {
            let f = conditional_risk(&spec(kind, &blocks, w.clone())).unwrap();
            for _ in 0..10 {
                let x: Vec<f64> = (0..w.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
                for c in f.components() {
                    let bi = risk_biconjugate(c, &x).unwrap();
                    assert!((bi - c.eval(&x)).abs() < 1e-6, "{kind:?} {x:?}: {bi} vs {}", c.eval(&x));
                }
            }
        }
    }
}

/// Envelope membership by brute force: y = −q with q a density capped at p/α.
fn in_envelope(p: &[f64], alpha: f64, y: &[f64]) -> bool {
    let q: Vec<f64> = y.iter().map(|v| -v).collect();
    let sum: f64 = q.iter().sum();
    (sum - 1.0).abs() < 1e-12 && q.iter().zip(p).all(|(&v, &w)| v >= -1e-12 && v <= w / alpha + 1e-12)
}

#[test]
fn cvar_conjugate_is_envelope_indicator() {
    let p = [0.5, 0.3, 0.2];
    let alpha = 0.5;
    let f = conditional_risk(&spec(RiskKind::Cvar { alpha }, &[vec![0, 1, 2]], p.to_vec())).unwrap();
    let c = &f.components()[0];
    let (mut inside, mut outside) = (0, 0);
    for a in 0..=10 {
        for b in 0..=10 - a {
            for scale in [1.0, 0.8] {
                let q = [a as f64 / 10.0 * scale, b as f64 / 10.0, 1.0 - (a + b) as f64 / 10.0];
                let y: Vec<f64> = q.iter().map(|v| -v).collect();
                let v1 = numeric_conjugate(c, &y, 1.0, 10).unwrap();
                let v2 = numeric_conjugate(c, &y, 2.0, 10).unwrap();
                if in_envelope(&p, alpha, &y) {
                    inside += 1;
                    assert!(v1.abs() < 1e-12 && v2.abs() < 1e-12, "{q:?}: {v1}");
                    assert_eq!(c.conjugate().unwrap().eval(&y), 0.0);
                } else {
                    outside += 1;
                    assert!(v1 > 1e-3 && v2 > 1.5 * v1, "{q:?}: {v1} {v2}");
                    assert_eq!(c.conjugate().unwrap().eval(&y), f64::INFINITY);
                }
            }
        }
    }
    assert!(inside > 5 && outside > 5);
}

#[test]
fn portfolio_examples() {
    let ent = spec(RiskKind::Entropic { gamma: 1.0 }, &[vec![0, 1]], vec![0.5, 0.5]);
    let (f, s) = portfolio_instance(&ent).unwrap();
    assert!(s.contains(&[0.0, 0.0], 0.0));
    assert_eq!(f.eval(&[0.0, 0.0]).unwrap().values, vec![0.0]);
    let r = fenchel_lagrange_solve(&f, &s, 1e-9).unwrap();
    // bounded above by the feasible value f(0) = 0; in fact unbounded along x = c·1
    assert!(r.report.primal_value.values[0] <= 0.0);
    assert_eq!(r.report.primal_value.values[0], f64::NEG_INFINITY);
    assert_eq!(r.report.gap.values, vec![0.0]);
    for c in [1.0, 5.0, 50.0] {
        assert!((entropic_oracle(&[0.5, 0.5], &[c, c], 1.0) + c).abs() < 1e-12);
    }

    let one = spec(RiskKind::Cvar { alpha: 0.5 }, &[vec![0]], vec![1.0]);
    let (f, s) = portfolio_instance(&one).unwrap();
    for x in [0.0, 1.0, 7.0] {
        assert_eq!(f.eval(&[x]).unwrap().values, vec![-x]);
        assert!(s.contains(&[x], 0.0));
    }
    let r = fenchel_lagrange_solve(&f, &s, 1e-9).unwrap();
    assert_eq!(r.report.primal_value.values, vec![f64::NEG_INFINITY]);
    assert_eq!(r.report.dual_value.values, vec![f64::NEG_INFINITY]);
}
