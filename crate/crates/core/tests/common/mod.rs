//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the solvers under test.

#![allow(dead_code)]

use fracprog::numerics::{CMat, RngStream};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Maximizes `f` over the box by a `(n+1)^2` grid, then zooms in around the
/// best point `rounds` times with the same resolution.
pub fn grid_max_2d(f: impl Fn(f64, f64) -> f64, lo: [f64; 2], hi: [f64; 2], n: usize, rounds: usize) -> ([f64; 2], f64) {
    let mut box_lo = lo;
    let mut box_hi = hi;
    let mut best = ([lo[0], lo[1]], f64::NEG_INFINITY);
    for _ in 0..=rounds {
        let step = [(box_hi[0] - box_lo[0]) / n as f64, (box_hi[1] - box_lo[1]) / n as f64];
        for i in 0..=n {
            for j in 0..=n {
                let x = [box_lo[0] + i as f64 * step[0], box_lo[1] + j as f64 * step[1]];
                let v = f(x[0], x[1]);
                if v > best.1 {
                    best = (x, v);
                }
            }
        }
        for d in 0..2 {
            box_lo[d] = (best.0[d] - 2.0 * step[d]).max(lo[d]);
            box_hi[d] = (best.0[d] + 2.0 * step[d]).min(hi[d]);
        }
    }
    best
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    let (fa, fb, fx) = (f(a), f(b), f(x));
    [(a, fa), (b, fb), (x, fx)].into_iter().fold((x, fx), |acc, p| if p.1 > acc.1 { p } else { acc })
}

/// Weighted sum rate written out link by link, `g[i][j]` from tx `j` to rx `i`.
pub fn wsr(g: &[Vec<f64>], w: &[f64], noise: f64, p: &[f64]) -> f64 {
    (0..p.len())
        .map(|i| {
            let interference: f64 = (0..p.len()).filter(|&j| j != i).map(|j| g[i][j] * p[j]).sum();
            w[i] * (1.0 + g[i][i] * p[i] / (interference + noise)).ln()
        })
        .sum()
}

/// Minimum SINR over the links.
pub fn min_sinr(g: &[Vec<f64>], noise: f64, p: &[f64]) -> f64 {
    (0..p.len())
        .map(|i| {
            let interference: f64 = (0..p.len()).filter(|&j| j != i).map(|j| g[i][j] * p[j]).sum();
            g[i][i] * p[i] / (interference + noise)
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn to_matrix(g: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(g.len(), g.len(), |i, j| g[i][j])
}

/// Multi-band rate `(1/T) sum_t` of the per-band weighted sum rate;
/// `p[i][t]` is the power of link `i` on band `t`.
pub fn multiband_wsr(bands: &[Vec<Vec<f64>>], w: &[f64], noise: f64, p: &[Vec<f64>]) -> f64 {
    let t = bands.len();
    (0..t)
        .map(|b| {
            let pb: Vec<f64> = p.iter().map(|row| row[b]).collect();
            wsr(&bands[b], w, noise, &pb)
        })
        .sum::<f64>()
        / t as f64
}

/// Two links, two bands, per-link budget `p_max` on the sum over bands.
/// Every link's split is `(a, b)` with `a + b <= 1` (in units of `p_max`);
/// grid of step `1/n`, then two zoomed grids of ten times finer step.
pub fn multiband_grid_2x2(bands: &[Vec<Vec<f64>>], w: &[f64], noise: f64, p_max: f64, n: usize) -> f64 {
    let eval = |s: [f64; 4]| {
        let p = vec![vec![s[0] * p_max, s[1] * p_max], vec![s[2] * p_max, s[3] * p_max]];
        multiband_wsr(bands, w, noise, &p)
    };
    let feasible = |s: &[f64; 4]| s.iter().all(|v| *v >= 0.0) && s[0] + s[1] <= 1.0 + 1e-12 && s[2] + s[3] <= 1.0 + 1e-12;
    let mut center = [0.0; 4];
    let mut best = f64::NEG_INFINITY;
    let mut step = 1.0 / n as f64;
    let mut half = n as i64;
    let mut origin = [0.0; 4];
    for round in 0..3 {
        let range: Vec<i64> = if round == 0 { (0..=half).collect() } else { (-half..=half).collect() };
        let mut round_best = (center, best);
        for &i in &range {
            for &j in &range {
                for &k in &range {
                    for &l in &range {
                        let s = [
                            origin[0] + i as f64 * step,
                            origin[1] + j as f64 * step,
                            origin[2] + k as f64 * step,
                            origin[3] + l as f64 * step,
                        ];
                        if !feasible(&s) {
                            continue;
                        }
                        let v = eval(s);
                        if v > round_best.1 {
                            round_best = (s, v);
                        }
                    }
                }
            }
        }
        center = round_best.0;
        best = round_best.1;
        origin = center;
        half = 10;
        step /= 10.0;
    }
    best
}

/// `ln det(I + H v v^H H^H J^{-1})` with `J` the interference-plus-noise
/// covariance of stream `k`, via dense inverse and determinant.
pub fn mimo_rate(channels: &[Vec<CMat>], bs_of: &[usize], v: &[Vec<Complex64>], noise: f64, k: usize) -> f64 {
    let n = channels[k][0].nrows();
    let col = |l: usize| nalgebra::DVector::from_vec(v[l].clone());
    let mut j = CMat::identity(n, n) * Complex64::new(noise, 0.0);
    for l in 0..v.len() {
        if l != k {
            let u = &channels[k][bs_of[l]] * col(l);
            j += &u * u.adjoint();
        }
    }
    let s = &channels[k][bs_of[k]] * col(k);
    let m = CMat::identity(n, n) + &s * s.adjoint() * j.try_inverse().expect("noise keeps J invertible");
    m.determinant().re.ln()
}

/// Random interference network with direct gains in `[0.5, 1.5]`, cross gains
/// in `[0, 0.5]`, unit noise and `p_max` in `[1, 10]`: a moderate-SNR instance
/// where every solver settles in modest time.
pub fn random_siso(links: usize, rng: &mut RngStream) -> (Vec<Vec<f64>>, f64) {
    let g = (0..links)
        .map(|i| (0..links).map(|j| if i == j { rng.uniform_in(0.5, 1.5) } else { rng.uniform_in(0.0, 0.5) }).collect())
        .collect();
    (g, rng.uniform_in(1.0, 10.0))
}

/// `cells` BSs with `streams` users each, CN(0, 1) channels of size `rx x tx`.
pub fn random_mimo_channels(cells: usize, streams: usize, rx: usize, tx: usize, rng: &mut RngStream) -> Vec<Vec<CMat>> {
    (0..cells * streams)
        .map(|_| (0..cells).map(|_| CMat::from_fn(rx, tx, |_, _| rng.complex_gaussian())).collect())
        .collect()
}
