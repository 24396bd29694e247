//! Euclidean projections onto the convex sets used by the applications.
//!
//! Rescaling projections leave points within `PROJECTION_SLACK` of the boundary
//! untouched, which makes every projection here idempotent bit-for-bit.

use std::ops::Range;

use num_complex::Complex64;

/// Relative slack under which a point counts as already feasible.
pub const PROJECTION_SLACK: f64 = 1e-12;

/// Elementwise clamp of `x` to `[lo, hi]`.
pub fn project_box(x: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&v, (&l, &h))| v.clamp(l, h))
        .collect()
}

pub fn project_box_in_place(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for (v, (&l, &h)) in x.iter_mut().zip(lo.iter().zip(hi)) {
        *v = v.clamp(l, h);
    }
}

/// Scales each coordinate group of `v` onto the ball of the matching radius.
pub fn project_group_ball(v: &[Complex64], groups: &[Range<usize>], radii: &[f64]) -> Vec<Complex64> {
    let mut out = v.to_vec();
    for (g, &r) in groups.iter().zip(radii) {
        let norm = out[g.clone()].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > r * (1.0 + PROJECTION_SLACK) {
            let s = r / norm;
            for z in &mut out[g.clone()] {
                *z *= s;
            }
        }
    }
    out
}

/// Real-coordinate version of [`project_group_ball`]: each group of real
/// coordinates (e.g. interleaved re/im pairs) is scaled onto its ball.
pub fn project_ball_groups_in_place(x: &mut [f64], groups: &[Range<usize>], radii: &[f64]) {
    for (g, &r) in groups.iter().zip(radii) {
        let norm = x[g.clone()].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > r * (1.0 + PROJECTION_SLACK) {
            let s = r / norm;
            for v in &mut x[g.clone()] {
                *v *= s;
            }
        }
    }
}

/// Projection onto `{x >= 0, sum(x) <= budget}`.
pub fn project_capped_simplex(x: &[f64], budget: f64) -> Vec<f64> {
    let mut out = x.to_vec();
    project_capped_simplex_in_place(&mut out, budget);
    out
}

pub fn project_capped_simplex_in_place(x: &mut [f64], budget: f64) {
    for v in x.iter_mut() {
        *v = v.max(0.0);
    }
    let total: f64 = x.iter().sum();
    if total <= budget * (1.0 + PROJECTION_SLACK) {
        return;
    }
    // Sorting-based projection onto the simplex {x >= 0, sum = budget}.
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - budget) / (k + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    for v in x.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::RngStream;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn box_examples() {
        assert_eq!(project_box(&[2.0], &[0.0], &[1.0]), vec![1.0]);
        assert_eq!(project_box(&[-1.0], &[0.0], &[1.0]), vec![0.0]);
        assert_eq!(project_box(&[0.5], &[0.0], &[1.0]), vec![0.5]);
    }

    #[test]
    fn ball_examples() {
        let v = vec![c(2.0), c(0.0)];
        let p = project_group_ball(&v, &[0..2], &[1.0]);
        assert_eq!(p, vec![c(1.0), c(0.0)]);
        let v = vec![c(0.3), c(0.4)];
        assert_eq!(project_group_ball(&v, &[0..2], &[1.0]), v);
        // group independence
        let v = vec![c(3.0), c(4.0), c(0.1), c(0.2)];
        let p = project_group_ball(&v, &[0..2, 2..4], &[1.0, 1.0]);
        assert!((p[0].re - 0.6).abs() < 1e-15 && (p[1].re - 0.8).abs() < 1e-15);
        assert_eq!(&p[2..], &v[2..]);
    }

    #[test]
    fn simplex_examples() {
        assert_eq!(project_capped_simplex(&[0.2, 0.3], 1.0), vec![0.2, 0.3]);
        let p = project_capped_simplex(&[1.0, 1.0], 1.0);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        let p = project_capped_simplex(&[2.0, -1.0], 1.0);
        assert_eq!(p, vec![1.0, 0.0]);
    }

    #[test]
    fn projections_idempotent_bitwise() {
        let mut rng = RngStream::new(11);
        for _ in 0..1000 {
            let n = 1 + (rng.uniform() * 6.0) as usize;
            let x: Vec<f64> = (0..n).map(|_| rng.normal(0.0, 3.0)).collect();
            let lo = vec![-1.0; n];
            let hi = vec![1.5; n];
            let b1 = project_box(&x, &lo, &hi);
            assert_eq!(b1, project_box(&b1, &lo, &hi));

            let s1 = project_capped_simplex(&x, 1.3);
            let s2 = project_capped_simplex(&s1, 1.3);
            assert_eq!(s1.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                       s2.iter().map(|v| v.to_bits()).collect::<Vec<_>>());

            let v: Vec<Complex64> = (0..2 * n).map(|_| rng.complex_gaussian() * 2.0).collect();
            let groups = vec![0..n, n..2 * n];
            let g1 = project_group_ball(&v, &groups, &[0.7, 1.9]);
            let g2 = project_group_ball(&g1, &groups, &[0.7, 1.9]);
            assert_eq!(g1, g2);
        }
    }

    #[test]
    fn simplex_projection_is_nearest_point() {
        // Compare against brute force over a fine grid in 2D.
        let x = [0.9, 0.7];
        let p = project_capped_simplex(&x, 1.0);
        let d = |q: [f64; 2]| (q[0] - x[0]).powi(2) + (q[1] - x[1]).powi(2);
        let dp = d([p[0], p[1]]);
        for i in 0..=200 {
            for j in 0..=200 {
                let q = [i as f64 / 200.0, j as f64 / 200.0];
                if q[0] + q[1] <= 1.0 + 1e-12 {
                    assert!(d(q) >= dp - 1e-12);
                }
            }
        }
    }
}
