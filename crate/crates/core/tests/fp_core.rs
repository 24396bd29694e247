mod common;

use fracprog::fp::{
    dinkelbach_solve, fp_solve, qt_md_optimal_y, qt_md_value, qt_optimal_y, qt_optimal_y_affine, qt_value,
    Combiner, FeasibleSet, FnRatio, OuterFunction, ProjectedGradient, QtParams, RatioProblem, Term,
};
use fracprog::numerics::{CMat, CVec, RngStream, SolverOptions};
use num_complex::Complex64;
use proptest::prelude::*;

fn inner() -> ProjectedGradient {
    ProjectedGradient(SolverOptions {
        max_inner_iters: 2000,
        grad_tol: 1e-12,
        ..SolverOptions::default()
    })
}

/// `(c0 + c1 x) / (d0 + (x - s)^2)` on a box, in one coordinate of `x`.
fn bump(coord: usize, c: (f64, f64), d0: f64, s: f64) -> Term {
    Term::Scalar(Box::new(FnRatio::new(
        move |x| c.0 + c.1 * x[coord],
        move |x| d0 + (x[coord] - s).powi(2),
        move |_, g| {
            g.fill(0.0);
            g[coord] = c.1;
        },
        move |x, g| {
            g.fill(0.0);
            g[coord] = 2.0 * (x[coord] - s);
        },
    )))
}

fn random_problem(rng: &mut RngStream, combiner: Combiner) -> RatioProblem {
    let terms = (0..2)
        .map(|k| bump(k, (rng.uniform_in(0.0, 1.0), rng.uniform_in(0.1, 2.0)), rng.uniform_in(0.2, 2.0), rng.uniform_in(0.0, 3.0)))
        .collect();
    RatioProblem::new(terms, combiner, FeasibleSet::boxed(vec![0.0; 2], vec![3.0; 2]).unwrap()).unwrap()
}

fn cmat_from(rng: &mut RngStream, n: usize) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| rng.complex_gaussian());
    &g * g.adjoint() + CMat::identity(n, n)
}

proptest! {
    #[test]
    fn scalar_transform_is_tight_upper_envelope(a in 0.0f64..50.0, b in 0.01f64..50.0, y in -10.0f64..10.0) {
        let ratio = a / b;
        let best = qt_value(a, b, qt_optimal_y(a, b).unwrap(), QtParams::default()).unwrap();
        prop_assert!((best - ratio).abs() <= 1e-12 * (1.0 + ratio));
        prop_assert!(qt_value(a, b, y, QtParams::default()).unwrap() <= ratio * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn affine_family_keeps_the_maximum(
        a in 0.0f64..50.0, b in 0.01f64..50.0,
        t1 in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0], t2 in -5.0f64..5.0,
    ) {
        let params = QtParams::new(t1, t2).unwrap();
        let y = qt_optimal_y_affine(a, b, params).unwrap();
        let v = qt_value(a, b, y, params).unwrap();
        prop_assert!((v - a / b).abs() <= 1e-10 * (1.0 + a / b));
        for dy in [-0.1, 0.1] {
            prop_assert!(qt_value(a, b, y + dy, params).unwrap() <= v + 1e-12);
        }
    }

    #[test]
    fn transformed_sum_matches_objective_at_optimal_aux(seed in 0u64..1000, x0 in 0.0f64..3.0, x1 in 0.0f64..3.0) {
        let mut rng = RngStream::new(seed);
        let p = random_problem(&mut rng, Combiner::Sum);
        let x = [x0, x1];
        let f = p.objective(&x).unwrap();
        let aux = p.optimal_aux(&x).unwrap();
        let at_opt: f64 = p.terms().iter().zip(&aux.values).map(|(t, y)| t.transformed(&x, y)).sum();
        prop_assert!((at_opt - f).abs() <= 1e-12 * (1.0 + f));
    }

    #[test]
    fn fp_sum_trace_is_monotone(seed in 0u64..500) {
        let mut rng = RngStream::new(seed);
        let p = random_problem(&mut rng, Combiner::Sum);
        let x0 = [rng.uniform_in(0.0, 3.0), rng.uniform_in(0.0, 3.0)];
        let sol = fp_solve(&p, &inner(), &x0, 1e-10, 300).unwrap();
        prop_assert!(sol.trace.is_nondecreasing(1e-10));
        prop_assert!(p.feasible_set().contains(&sol.x, 1e-12));
    }

    #[test]
    fn fp_sum_of_logs_trace_is_monotone(seed in 0u64..500) {
        let mut rng = RngStream::new(seed);
        let fs = vec![OuterFunction::weighted_log1p(1.0), OuterFunction::weighted_log1p(rng.uniform_in(0.5, 2.0))];
        let p = random_problem(&mut rng, Combiner::SumOfFunctions(fs));
        let sol = fp_solve(&p, &inner(), &[1.5, 1.5], 1e-10, 300).unwrap();
        prop_assert!(sol.trace.is_nondecreasing(1e-10));
    }

    #[test]
    fn dinkelbach_parameters_nondecreasing(c0 in 0.0f64..1.0, c1 in 0.1f64..2.0, d0 in 0.2f64..2.0, s in 0.0f64..3.0, x0 in 0.0f64..3.0) {
        let term = FnRatio::new(
            move |x| c0 + c1 * x[0],
            move |x| d0 + (x[0] - s).powi(2),
            move |_, g| g[0] = c1,
            move |x, g| g[0] = 2.0 * (x[0] - s),
        );
        let p = RatioProblem::single(term, FeasibleSet::boxed(vec![0.0], vec![3.0]).unwrap());
        let sol = dinkelbach_solve(&p, &inner(), &[x0], 1e-12, 100).unwrap();
        prop_assert!(sol.y_history.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        // golden section on the same ratio
        let (_, want) = common::golden_max(|x| (c0 + c1 * x) / (d0 + (x - s).powi(2)), 0.0, 3.0, 200);
        prop_assert!((sol.y - want).abs() <= 1e-8 * (1.0 + want));
    }
}

#[test]
fn multidimensional_transform_completes_the_square() {
    let mut rng = RngStream::new(5);
    for n in 1..=5 {
        for _ in 0..40 {
            let a = CVec::from_fn(n, |_, _| rng.complex_gaussian());
            let b = cmat_from(&mut rng, n);
            let binv = b.clone().try_inverse().unwrap();
            let want = (a.adjoint() * &binv * &a)[(0, 0)].re;
            let y = qt_md_optimal_y(&a, &b).unwrap();
            assert!((qt_md_value(&a, &b, &y).unwrap() - want).abs() <= 1e-10 * (1.0 + want));
            // f(y) = want - (y - y*)^H B (y - y*) for arbitrary y
            let z = CVec::from_fn(n, |_, _| rng.complex_gaussian());
            let d = &z - &binv * &a;
            let gap = (d.adjoint() * &b * &d)[(0, 0)].re;
            let got = qt_md_value(&a, &b, &z).unwrap();
            assert!((got - (want - gap)).abs() <= 1e-9 * (1.0 + want + gap), "n {n}: {got} vs {}", want - gap);
        }
    }
}

#[test]
fn multidimensional_rejects_non_hermitian() {
    let a = CVec::from_element(2, Complex64::new(1.0, 0.0));
    let mut b = CMat::identity(2, 2);
    b[(0, 1)] = Complex64::new(0.5, 0.0);
    assert!(qt_md_optimal_y(&a, &b).is_err());
}

#[test]
fn scalar_domain_errors() {
    assert!(qt_optimal_y(-1.0, 1.0).is_err());
    assert!(qt_optimal_y(1.0, 0.0).is_err());
    assert!(QtParams::new(0.0, 1.0).is_err());
}

#[test]
fn maxmin_reaches_balanced_point() {
    // max min(x0 / (1 + x1), x1 / (1 + x0)) on [0, 1]^2 is 1/2 at (1, 1).
    let t = |i: usize, j: usize| {
        Term::Scalar(Box::new(FnRatio::new(
            move |x| x[i],
            move |x| 1.0 + x[j],
            move |_, g| {
                g.fill(0.0);
                g[i] = 1.0;
            },
            move |_, g| {
                g.fill(0.0);
                g[j] = 1.0;
            },
        )))
    };
    let p = RatioProblem::new(vec![t(0, 1), t(1, 0)], Combiner::MaxMin, FeasibleSet::boxed(vec![0.0; 2], vec![1.0; 2]).unwrap())
        .unwrap();
    let sol = fp_solve(&p, &inner(), &[0.2, 0.7], 1e-12, 500).unwrap();
    assert!(sol.trace.is_nondecreasing(1e-10));
    assert!((sol.trace.final_objective() - 0.5).abs() < 1e-6, "{}", sol.trace.final_objective());
}

#[test]
fn rejects_infeasible_start() {
    let mut rng = RngStream::new(1);
    let p = random_problem(&mut rng, Combiner::Sum);
    assert!(fp_solve(&p, &inner(), &[5.0, 0.0], 1e-8, 10).is_err());
}
