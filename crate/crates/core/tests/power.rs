mod common;

use common::{grid_max_2d, min_sinr, random_siso, to_matrix, wsr};
use fracprog::numerics::RngStream;
use fracprog::power::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn two_cell(direct: [f64; 2], cross: f64) -> (Vec<Vec<f64>>, SisoNetwork) {
    let g = vec![vec![direct[0], cross], vec![cross, direct[1]]];
    let net = SisoNetwork::new(to_matrix(&g), vec![1.0; 2], 1.0, 1.0).unwrap();
    (g, net)
}

fn single_link(p_max: f64) -> SisoNetwork {
    SisoNetwork::new(DMatrix::from_element(1, 1, 2.0), vec![1.0], 0.5, p_max).unwrap()
}

fn rate(net: &SisoNetwork, sol: &PcSolution) -> f64 {
    weighted_sum_rate(&sol.p, net)
}

#[test]
fn single_link_uses_full_power() {
    let net = single_link(3.0);
    let half = PowerVector::half_power(&net);
    for sol in [
        pc_direct_solve(&net, &half, 1e-10, 1000).unwrap(),
        pc_closed_form_solve(&net, &half, 1e-10, 1000).unwrap(),
        pc_maxmin_solve(&net, &half, 1e-10, 1000).unwrap(),
        pc_utility_solve(&net, &[Utility::log_rate(1e-6)], &half, 1e-10, 1000).unwrap(),
    ] {
        assert!((sol.p.as_slice()[0] - 3.0).abs() < 1e-6, "{:?}", sol.p);
    }
    let one_step = pc_fixed_point_solve(&net, &half, 1e-10, 1).unwrap();
    assert_eq!(one_step.p.as_slice()[0], 3.0);
    assert!(pc_fixed_point_solve(&net, &half, 1e-10, 10).unwrap().converged);
}

#[test]
fn weighted_sum_rate_examples() {
    let net = SisoNetwork::new(DMatrix::from_element(1, 1, 1.0), vec![1.0], 1.0, 1.0).unwrap();
    assert!((weighted_sum_rate(&PowerVector::from_vec(vec![1.0]), &net) - 2f64.ln()).abs() < 1e-15);
    let (_, net2) = two_cell([1.0, 1.0], 1.0);
    assert_eq!(weighted_sum_rate(&PowerVector::from_vec(vec![0.0, 0.0]), &net2), 0.0);
}

#[test]
fn weak_interference_fixed_point_agrees_with_grid() {
    let (g, net) = two_cell([1.0, 1.0], 0.01);
    let (_, want) = grid_max_2d(|a, b| wsr(&g, &[1.0, 1.0], 1.0, &[a, b]), [0.0; 2], [1.0; 2], 1000, 3);
    let half = PowerVector::half_power(&net);
    let fixed = pc_fixed_point_solve(&net, &half, 1e-10, 10_000).unwrap();
    assert!(fixed.converged);
    assert!((weighted_sum_rate(&fixed.p, &net) - want).abs() < 1e-3);
    for sol in [pc_direct_solve(&net, &half, 1e-10, 10_000).unwrap(), pc_closed_form_solve(&net, &half, 1e-10, 10_000).unwrap()] {
        assert!((rate(&net, &sol) - want).abs() < 1e-3);
    }
}

#[test]
fn high_interference_fixed_point_runs() {
    // Convergence is not guaranteed here; only the flag is reported.
    let (_, net) = two_cell([1.0, 1.0], 10.0);
    let fixed = pc_fixed_point_solve(&net, &PowerVector::half_power(&net), 1e-10, 500).unwrap();
    assert!(fixed.p.is_feasible(&net, 1e-12));
    assert!(fixed.trace.len() >= 2);
}

#[test]
fn asymmetric_maxmin_matches_grid() {
    let (g, net) = two_cell([1.0, 4.0], 1.0);
    let (_, want) = grid_max_2d(|a, b| min_sinr(&g, 1.0, &[a, b]), [0.0; 2], [1.0; 2], 1000, 4);
    let sol = pc_maxmin_solve(&net, &PowerVector::half_power(&net), 1e-12, 20_000).unwrap();
    let got = sinr(&sol.p, &net).into_iter().fold(f64::INFINITY, f64::min);
    assert!((got - want).abs() < 1e-4, "{got} vs grid {want}");
    assert!(sol.trace.is_nondecreasing(1e-9));
}

#[test]
fn symmetric_maxmin_equalizes() {
    let (_, net) = two_cell([1.0, 1.0], 0.5);
    let sol = pc_maxmin_solve(&net, &PowerVector::from_vec(vec![0.2, 0.9]), 1e-12, 20_000).unwrap();
    let s = sinr(&sol.p, &net);
    assert!((s[0] - s[1]).abs() < 1e-6, "{s:?}");
    // both at full power is optimal for the symmetric instance
    assert!((s[0] - 1.0 / 1.5).abs() < 1e-6);
}

#[test]
fn maxmin_rejects_zero_start() {
    let (_, net) = two_cell([1.0, 1.0], 1.0);
    assert!(pc_maxmin_solve(&net, &PowerVector::from_vec(vec![0.0, 0.5]), 1e-8, 10).is_err());
    assert!(pc_fixed_point_solve(&net, &PowerVector::from_vec(vec![0.0, 0.5]), 1e-8, 10).is_err());
}

#[test]
fn log_utility_is_fair_on_symmetric_instance() {
    let (g, net) = two_cell([1.0, 1.0], 0.6);
    let utilities = [Utility::log_rate(1e-6), Utility::log_rate(1e-6)];
    let objective = |a: f64, b: f64| {
        (0..2)
            .map(|i| {
                let p = [a, b];
                let r = (1.0 + g[i][i] * p[i] / (g[i][1 - i] * p[1 - i] + 1.0)).ln();
                (r + 1e-6).ln()
            })
            .sum::<f64>()
    };
    let (x, want) = grid_max_2d(objective, [0.0; 2], [1.0; 2], 500, 4);
    let sol = pc_utility_solve(&net, &utilities, &PowerVector::from_vec(vec![0.3, 0.8]), 1e-12, 20_000).unwrap();
    let p = sol.p.as_slice();
    assert!((p[0] - p[1]).abs() < 1e-4, "{p:?}");
    assert!((p[0] - x[0]).abs() < 1e-3 && (p[1] - x[1]).abs() < 1e-3);
    assert!((sol.trace.final_objective() - want).abs() < 1e-6);
}

#[test]
fn linear_utility_reproduces_direct_iterates() {
    let mut rng = RngStream::new(8);
    let (g, p_max) = random_siso(3, &mut rng);
    let net = SisoNetwork::new(to_matrix(&g), vec![1.0, 0.5, 2.0], 1.0, p_max).unwrap();
    let half = PowerVector::half_power(&net);
    let a = pc_direct_solve(&net, &half, 1e-9, 500).unwrap();
    let linear: Vec<Utility> = net.weights().iter().map(|&w| Utility::linear(w)).collect();
    let b = pc_utility_solve(&net, &linear, &half, 1e-9, 500).unwrap();
    assert_eq!(a.trace.objectives(), b.trace.objectives());
    assert_eq!(a.p, b.p);
}

#[test]
fn multiband_single_link_splits_evenly() {
    let g = DMatrix::from_element(1, 1, 1.0);
    let net = SisoNetwork::multiband(vec![g.clone(), g], vec![1.0], 1.0, 2.0).unwrap();
    let p0 = PowerVector::new(1, 2, vec![1.5, 0.1]).unwrap();
    let sol = pc_multiband_solve(&net, &p0, 1e-12, 10_000).unwrap();
    assert!((sol.p.get(0, 0) - 1.0).abs() < 1e-5 && (sol.p.get(0, 1) - 1.0).abs() < 1e-5, "{:?}", sol.p);
}

#[test]
fn multiband_dead_band_gets_nothing() {
    let net = SisoNetwork::multiband(
        vec![DMatrix::from_element(1, 1, 1.0), DMatrix::from_element(1, 1, 0.0)],
        vec![1.0],
        1.0,
        2.0,
    )
    .unwrap();
    let sol = pc_multiband_solve(&net, &PowerVector::new(1, 2, vec![1.0, 1.0]).unwrap(), 1e-12, 10_000).unwrap();
    assert!(sol.p.get(0, 1) < 1e-9 && (sol.p.get(0, 0) - 2.0).abs() < 1e-9, "{:?}", sol.p);
    assert!(sol.trace.is_nondecreasing(1e-12));
}

#[test]
fn foc_residual_examples() {
    let net = single_link(1.0);
    assert_eq!(foc_residual(&PowerVector::from_vec(vec![1.0]), &net), 0.0);
    assert!(foc_residual(&PowerVector::from_vec(vec![0.3]), &net) > 0.0);
    let (_, two) = two_cell([1.0, 1.0], 0.01);
    let sol = pc_closed_form_solve(&two, &PowerVector::half_power(&two), 1e-10, 10_000).unwrap();
    assert!(foc_residual(&sol.p, &two) <= 1e-6);
}

#[test]
fn best_of_starts_is_reproducible() {
    let (_, net) = two_cell([1.0, 1.0], 4.0);
    let run = || best_of_starts(&net, 6, 21, |p0| pc_closed_form_solve(&net, p0, 1e-8, 20_000)).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a.p, b.p);
    assert!((rate(&net, &a) - 2f64.ln()).abs() < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fp_algorithms_monotone_and_stationary(seed in 0u64..10_000) {
        let mut rng = RngStream::new(seed);
        let (g, p_max) = random_siso(3, &mut rng);
        let net = SisoNetwork::new(to_matrix(&g), vec![1.0; 3], 1.0, p_max).unwrap();
        let p0 = random_start(&net, &mut rng);
        for sol in [pc_direct_solve(&net, &p0, 1e-7, 20_000).unwrap(), pc_closed_form_solve(&net, &p0, 1e-7, 200_000).unwrap()] {
            prop_assert!(sol.trace.is_nondecreasing(1e-9));
            prop_assert!(sol.p.is_feasible(&net, 1e-12));
            prop_assert!(sol.converged);
            prop_assert!(foc_residual(&sol.p, &net) <= 1e-6);
            // the reported objective is the oracle's sum rate
            let p: Vec<f64> = sol.p.as_slice().to_vec();
            prop_assert!((sol.trace.final_objective() - wsr(&g, &[1.0; 3], 1.0, &p)).abs() <= 1e-12 * (1.0 + sol.trace.final_objective()));
        }
    }

    #[test]
    fn sinr_matches_oracle(seed in 0u64..10_000) {
        let mut rng = RngStream::new(seed);
        let (g, p_max) = random_siso(4, &mut rng);
        let net = SisoNetwork::new(to_matrix(&g), vec![1.0; 4], 1.0, p_max).unwrap();
        let p = random_start(&net, &mut rng);
        let s = sinr(&p, &net);
        for i in 0..4 {
            let interference: f64 = (0..4).filter(|&j| j != i).map(|j| g[i][j] * p.as_slice()[j]).sum();
            let want = g[i][i] * p.as_slice()[i] / (interference + 1.0);
            prop_assert!((s[i] - want).abs() <= 1e-14 * (1.0 + want));
        }
    }
}
