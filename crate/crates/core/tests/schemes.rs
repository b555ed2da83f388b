use l0dual::convex::{BoxSet, ConvexFn, Pwl, Quadratic};
use l0dual::linalg::Matrix;
use l0dual::measure::{MeasureSpace, Partition};
use l0dual::scenario::{L0Point, ScenarioFn};
use l0dual::schemes::*;

fn one(f: ConvexFn<f64>) -> ScenarioFn<f64> {
    ScenarioFn::replicated(1, f).unwrap()
}

fn interval(lo: f64, hi: f64) -> ConstraintSet<f64> {
    ConstraintSet::new(ConstraintSet::Box(BoxSet::interval(lo, hi).unwrap())).unwrap()
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |k| lo + (hi - lo) * k as f64 / n as f64)
}

/// min over a fine grid, exact at grid-aligned kinks.
fn brute_min(h: impl Fn(f64) -> f64) -> f64 {
    grid(-8.0, 8.0, 6400).map(h).fold(f64::INFINITY, f64::min)
}

#[test]
fn support_function_examples() {
    let s = support_function(&interval(-1.0, 1.0));
    let s01 = support_function(&interval(0.0, 1.0));
    for y in grid(-3.0, 3.0, 24) {
        assert_eq!(s.eval(&[y]), y.abs());
        let oracle = [0.0, y].iter().fold(f64::NEG_INFINITY, |m: f64, v| m.max(*v));
        assert_eq!(s01.eval(&[y]), oracle);
    }
    let c = s01.as_convex_fn().unwrap();
    assert_eq!(c.eval(&[2.5]), 2.5);

    let plane = ConstraintSet::new(ConstraintSet::Halfspaces {
        rows: vec![vec![1.0, 1.0], vec![-1.0, -1.0]],
        rhs: vec![0.0, 0.0],
    })
    .unwrap();
    let sp = support_function(&plane);
    for (a, b) in [(1.0, 1.0), (-2.0, -2.0), (0.0, 0.0), (1.0, -1.0), (0.5, 0.0)] {
        // sup over x = (t, −t) of t(a − b)
        let oracle = if a == b { 0.0 } else { f64::INFINITY };
        assert_eq!(sp.eval(&[a, b]), oracle);
    }
    assert!(sp.as_convex_fn().is_none());
}

#[test]
fn polygon_support_against_vertex_oracle() {
    // unit square cut by x + y ≤ 1.5
    let rows = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0], vec![1.0, 1.0]];
    let rhs = vec![1.0, 0.0, 1.0, 0.0, 1.5];
    let s = ConstraintSet::new(ConstraintSet::Halfspaces { rows, rhs }).unwrap();
    let verts = [[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [0.5, 1.0], [0.0, 1.0]];
    for a in grid(-2.0, 2.0, 8) {
        for b in grid(-2.0, 2.0, 8) {
            let oracle = verts.iter().map(|v| v[0] * a + v[1] * b).fold(f64::NEG_INFINITY, f64::max);
            assert!((s.support(&[a, b]) - oracle).abs() < 1e-12, "{a} {b}");
        }
    }
}

#[test]
fn fenchel_examples() {
    let id = LinearOp::identity(1);
    let f = one(ConvexFn::abs());
    let g = one(ConvexFn::Pwl(Pwl::abs_shifted(1.0)));
    let r = fenchel_dual_solve(&f, &g, &id, 1e-9).unwrap();
    assert_eq!(r.report.primal_value.values, vec![1.0]);
    assert_eq!(r.report.dual_value.values, vec![1.0]);
    assert_eq!(r.report.gap.values, vec![0.0]);
    assert_eq!(r.report.dual_solution.as_ref().unwrap().coords, vec![vec![-1.0]]);

    let sq = one(ConvexFn::half_square(1));
    let r = fenchel_dual_solve(&sq, &sq, &id, 1e-9).unwrap();
    assert_eq!(r.report.primal_value.values, vec![0.0]);
    assert_eq!(r.report.dual_value.values, vec![0.0]);
    assert_eq!(r.report.primal_minimizer.as_ref().unwrap(), &vec![0.0]);

    let point = one(ConvexFn::indicator_interval(0.0, 0.0).unwrap());
    for gi in [ConvexFn::Pwl(Pwl::abs_shifted(1.0)), ConvexFn::Quadratic(Quadratic::scalar(1.0, 3.0, -2.0).unwrap())] {
        let g0 = gi.eval(&[0.0]);
        let r = fenchel_dual_solve(&point, &one(gi), &id, 1e-9).unwrap();
        assert!((r.report.primal_value.values[0] - g0).abs() < 1e-12);
        assert!((r.report.dual_value.values[0] - g0).abs() < 1e-12);
    }
}

#[test]
fn fenchel_against_brute_force() {
    // two atoms, A = 2
    let space = MeasureSpace::uniform(2).unwrap();
    let f = ScenarioFn::new(
        space.clone(),
        vec![ConvexFn::Pwl(Pwl::abs_shifted(0.5)), ConvexFn::half_square(1)],
    )
    .unwrap();
    let g = ScenarioFn::new(
        space,
        vec![ConvexFn::Pwl(Pwl::abs_shifted(3.0)), ConvexFn::Pwl(Pwl::abs_shifted(-1.0))],
    )
    .unwrap();
    let a = LinearOp::new(Matrix::from_rows(&[vec![2.0]]).unwrap());
    let r = fenchel_dual_solve(&f, &g, &a, 1e-9).unwrap();
    let (fc, gc) = (f.vec_conjugate().unwrap(), g.vec_conjugate().unwrap());
    for i in 0..2 {
        let primal = brute_min(|x| f.components()[i].eval(&[x]) + g.components()[i].eval(&[2.0 * x]));
        let dual = -brute_min(|w| fc.components()[i].eval(&[-2.0 * w]) + gc.components()[i].eval(&[w]));
        assert!((r.report.primal_value.values[i] - primal).abs() < 1e-9);
        assert!((r.report.dual_value.values[i] - dual).abs() < 1e-9);
        assert!(r.report.dual_value.values[i] <= r.report.primal_value.values[i] + 1e-12);
    }
}

#[test]
fn fenchel_conjugate_formula() {
    let f = one(ConvexFn::Pwl(Pwl::abs_shifted(0.5)));
    let g = one(ConvexFn::Quadratic(Quadratic::scalar(2.0, 1.0, 0.0).unwrap()));
    let a = LinearOp::new(Matrix::from_rows(&[vec![-1.5]]).unwrap());
    let phi = fenchel_perturbation(&f, &g, &a).unwrap();
    let (fc, gc) = (f.vec_conjugate().unwrap(), g.vec_conjugate().unwrap());
    for xs in grid(-2.0, 2.0, 8) {
        for ws in grid(-3.0, 3.0, 12) {
            let expect = fc.components()[0].eval(&[xs - a.adjoint_apply(&[ws])[0]]) + gc.components()[0].eval(&[ws]);
            let got = phi.eval_conjugate(0, &[xs], &[ws]);
            assert!(got == expect || (got - expect).abs() < 1e-9, "{xs} {ws}: {got} vs {expect}");
        }
    }
}

#[test]
fn fenchel_surface_matches_gap_and_attainment() {
    let f = one(ConvexFn::abs());
    let g = one(ConvexFn::Pwl(Pwl::abs_shifted(1.0)));
    let r = fenchel_dual_solve(&f, &g, &LinearOp::identity(1), 1e-9).unwrap();
    let all_attained = r.surface.points.iter().all(|p| p.attainment[0].is_attained());
    let zero_gap_attained = r.report.gap.values[0] == 0.0 && r.report.dual_attained[0];
    assert!(all_attained);
    assert_eq!(all_attained, zero_gap_attained);
    for p in &r.surface.points {
        assert!(p.residual.values[0] <= 1e-9);
    }
}

#[test]
fn fenchel_optimality_examples() {
    let id = LinearOp::identity(1);
    let f = one(ConvexFn::abs());
    let g = one(ConvexFn::Pwl(Pwl::abs_shifted(1.0)));
    let ok = fenchel_optimality_check(&f, &g, &id, &[0.0], &L0Point::scalars(&[-1.0]), 1e-9).unwrap();
    assert!(ok.pass);
    let bad = fenchel_optimality_check(&f, &g, &id, &[0.0], &L0Point::scalars(&[0.0]), 1e-9).unwrap();
    assert!(!bad.pass);
    assert_eq!(bad.residual_ii.values, vec![1.0]);
    let sq = one(ConvexFn::half_square(1));
    let r = fenchel_optimality_check(&sq, &sq, &id, &[0.0], &L0Point::scalars(&[0.0]), 1e-9).unwrap();
    assert!(r.pass);
    assert_eq!((r.residual_i.values[0], r.residual_ii.values[0]), (0.0, 0.0));
}

#[test]
fn fenchel_infeasible_names_atom() {
    let space = MeasureSpace::uniform(2).unwrap();
    let f = ScenarioFn::new(
        space.clone(),
        vec![ConvexFn::indicator_interval(0.0, 1.0).unwrap(), ConvexFn::indicator_interval(-1.0, 0.25).unwrap()],
    )
    .unwrap();
    let g = ScenarioFn::new(
        space,
        vec![ConvexFn::indicator_interval(0.0, 1.0).unwrap(), ConvexFn::indicator_interval(0.5, 6.0).unwrap()],
    )
    .unwrap();
    let err = fenchel_dual_solve(&f, &g, &LinearOp::identity(1), 1e-9).unwrap_err();
    assert!(err.to_string().contains("atom 1"), "{err}");
}

#[test]
fn fenchel_lagrange_examples() {
    let s = interval(0.0, 1.0);
    let r = fenchel_lagrange_solve(&one(ConvexFn::affine1(1.0, 0.0)), &s, 1e-9).unwrap();
    assert_eq!(r.report.primal_value.values, vec![0.0]);
    assert_eq!(r.report.primal_minimizer.as_ref().unwrap(), &vec![0.0]);
    assert_eq!(r.report.dual_value.values, vec![0.0]);
    assert_eq!(r.report.dual_solution.as_ref().unwrap().coords, vec![vec![1.0]]);

    let whole = ConstraintSet::new(ConstraintSet::Box(BoxSet::whole(1))).unwrap();
    let r = fenchel_lagrange_solve(&one(ConvexFn::half_square(1)), &whole, 1e-9).unwrap();
    assert_eq!(r.report.primal_value.values, vec![0.0]);
    assert_eq!(r.report.dual_value.values, vec![0.0]);
    assert_eq!(r.report.dual_solution.as_ref().unwrap().coords, vec![vec![0.0]]);

    let r = fenchel_lagrange_solve(&one(ConvexFn::Pwl(Pwl::abs_shifted(2.0))), &s, 1e-9).unwrap();
    assert_eq!(r.report.primal_value.values, vec![1.0]);
    assert_eq!(r.report.primal_minimizer.as_ref().unwrap(), &vec![1.0]);
    assert_eq!(r.report.dual_value.values, vec![1.0]);
}

#[test]
fn fenchel_lagrange_dual_is_inf_convolution_at_zero() {
    let s = interval(-0.5, 2.0);
    for fi in [
        ConvexFn::Pwl(Pwl::abs_shifted(3.0)),
        ConvexFn::Quadratic(Quadratic::scalar(1.0, -1.0, 0.25).unwrap()),
        ConvexFn::affine1(-2.0, 1.0),
    ] {
        let r = fenchel_lagrange_solve(&one(fi.clone()), &s, 1e-9).unwrap();
        let sigma = support_function(&s).as_convex_fn().unwrap();
        let box_ = fi.conjugate().unwrap().inf_convolution(&sigma).unwrap();
        assert!((r.report.dual_value.values[0] + box_.eval(&[0.0])).abs() < 1e-9);
        let primal = brute_min(|x| if (-0.5..=2.0).contains(&x) { fi.eval(&[x]) } else { f64::INFINITY });
        assert!((r.report.primal_value.values[0] - primal).abs() < 1e-9);
        assert!(r.report.dual_value.values[0] <= r.report.primal_value.values[0] + 1e-12);
    }
}

#[test]
fn fenchel_lagrange_conjugate_formula() {
    let s = interval(0.0, 1.0);
    let f = one(ConvexFn::Pwl(Pwl::abs_shifted(2.0)));
    let phi = fenchel_lagrange_perturbation(&f, &s).unwrap();
    let fc = f.vec_conjugate().unwrap();
    for y in grid(-3.0, 3.0, 12) {
        for v in grid(-2.0, 2.0, 8) {
            let expect = fc.components()[0].eval(&[v]) + s.support(&[y - v]);
            assert_eq!(phi.eval_conjugate(0, &[y], &[v]), expect, "{y} {v}");
        }
    }
}

#[test]
fn fl_optimality_examples() {
    let s = interval(0.0, 1.0);
    let f = one(ConvexFn::affine1(1.0, 0.0));
    let v1 = L0Point::scalars(&[1.0]);
    assert!(fl_optimality_check(&f, &s, &[0.0], &v1, 1e-9).unwrap().pass);
    let r = fl_optimality_check(&f, &s, &[1.0], &v1, 1e-9).unwrap();
    assert!(!r.pass);
    assert_eq!(r.residual_ii.values, vec![1.0]);
    let ind = one(ConvexFn::indicator_interval(0.0, 1.0).unwrap());
    assert!(fl_optimality_check(&ind, &s, &[0.5], &L0Point::scalars(&[0.0]), 1e-9).unwrap().pass);
    let out = fl_optimality_check(&f, &s, &[2.0], &v1, 1e-9).unwrap();
    assert!(!out.pass && out.diagnostic.is_some());
}

#[test]
fn risk_over_cone_is_unbounded_both_ways() {
    use l0dual::convex::RiskFn;
    let space = MeasureSpace::uniform(2).unwrap();
    let part = Partition::from_blocks(2, &[vec![0, 1]]).unwrap();
    let rho = one(ConvexFn::Entropic(RiskFn::entropic(vec![0.5, 0.5], 1.0).unwrap()));
    let s = ConstraintSet::new(ConstraintSet::CondExpCone {
        space,
        partition: part,
        threshold: 0.0,
    })
    .unwrap();
    let r = fenchel_lagrange_solve(&rho, &s, 1e-9).unwrap();
    assert_eq!(r.report.primal_value.values, vec![f64::NEG_INFINITY]);
    assert_eq!(r.report.dual_value.values, vec![f64::NEG_INFINITY]);
    assert_eq!(r.report.gap.values, vec![0.0]);
    // the unboundedness direction
    for c in [1.0, 10.0, 100.0] {
        assert!(s.contains(&[c, c], 0.0));
        assert!((rho.components()[0].eval(&[c, c]) + c).abs() < 1e-9);
    }
}
