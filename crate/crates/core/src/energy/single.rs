//! Energy efficiency of one single-antenna link, by the quadratic transform
//! and by Dinkelbach's method.

use crate::error::{FpError, Result};
use crate::numerics::bisection_root;
use crate::trace::{objective_settled, IterationTrace};

/// An isolated link: rate `ln(1 + g p / sigma^2)` over power `p + p_on`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleLink {
    pub gain: f64,
    pub noise: f64,
    pub p_max: f64,
    pub p_on: f64,
}

impl SingleLink {
    pub fn new(gain: f64, noise: f64, p_max: f64, p_on: f64) -> Result<Self> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !(gain >= 0.0 && gain.is_finite()) || !ok(noise) || !ok(p_max) || !ok(p_on) {
            return Err(FpError::domain(
                "SingleLink",
                format!("need gain >= 0 and positive noise, p_max, p_on; got {gain}, {noise}, {p_max}, {p_on}"),
            ));
        }
        Ok(Self {
            gain,
            noise,
            p_max,
            p_on,
        })
    }

    /// `g / sigma^2`.
    pub fn snr_per_watt(&self) -> f64 {
        self.gain / self.noise
    }

    pub fn rate(&self, p: f64) -> f64 {
        (self.snr_per_watt() * p).ln_1p()
    }

    /// Rate over consumed power, nats per joule at unit bandwidth.
    pub fn ee(&self, p: f64) -> f64 {
        self.rate(p) / (p + self.p_on)
    }

    fn ee_derivative(&self, p: f64) -> f64 {
        let a = self.snr_per_watt();
        let d = p + self.p_on;
        (a / (1.0 + a * p) * d - self.rate(p)) / (d * d)
    }

    /// Projected-derivative residual of the efficiency in `p / p_max` units,
    /// scaled by `p_max` to be power-scale free.
    fn residual(&self, p: f64) -> f64 {
        let x = p / self.p_max;
        let g = self.ee_derivative(p) * self.p_max * self.p_max;
        ((x + g).clamp(0.0, 1.0) - x).abs()
    }

    fn check_start(&self, p0: f64) -> Result<()> {
        if !(0.0..=self.p_max).contains(&p0) {
            return Err(FpError::Infeasible(format!("p0 = {p0} is outside [0, {}]", self.p_max)));
        }
        Ok(())
    }
}

/// Efficiency at `p`.
pub fn ee_objective_link(link: &SingleLink, p: f64) -> f64 {
    link.ee(p)
}

#[derive(Debug, Clone)]
pub struct LinkSolution {
    pub p: f64,
    /// Final auxiliary variable: `sqrt(R)/(p + p_on)` for the quadratic
    /// transform, the efficiency itself for Dinkelbach's method.
    pub y: f64,
    pub trace: IterationTrace,
    pub converged: bool,
}

/// `argmax_p 2 y sqrt(R(p)) - y^2 (p + p_on)` over `[0, p_max]`.
///
/// The objective is concave with derivative `y R'(p) / sqrt(R(p)) - y^2`,
/// which decreases from `+inf` at `p = 0`; its root is bisected. With `y = 0`
/// every `p` is optimal and the largest is taken, which is what later
/// iterations need to leave a zero start.
fn qt_power_step(link: &SingleLink, y: f64) -> Result<f64> {
    let a = link.snr_per_watt();
    if a == 0.0 {
        return Ok(0.0);
    }
    if y == 0.0 {
        return Ok(link.p_max);
    }
    let slope = |p: f64| {
        let r = link.rate(p);
        y * a / ((1.0 + a * p) * r.sqrt()) - y * y
    };
    if slope(link.p_max) >= 0.0 {
        return Ok(link.p_max);
    }
    bisection_root(slope, 0.0, link.p_max, 0.0)
}

/// Quadratic-transform iteration for the single-link efficiency.
/// Stops when the relative efficiency change is at most `tol`.
pub fn ee_single_link_qt(link: &SingleLink, p0: f64, tol: f64, max_iters: usize) -> Result<LinkSolution> {
    link.check_start(p0)?;
    let mut p = p0;
    let mut trace = IterationTrace::new();
    let mut f = link.ee(p);
    trace.push(f, link.residual(p));
    let mut y = link.rate(p).sqrt() / (p + link.p_on);
    let mut converged = false;
    for _ in 0..max_iters {
        y = link.rate(p).sqrt() / (p + link.p_on);
        p = qt_power_step(link, y)?;
        let prev = f;
        f = link.ee(p);
        trace.push(f, link.residual(p));
        // Compared in units of nats per p_max-joule so the test is scale free.
        if objective_settled(prev * link.p_max, f * link.p_max, tol) {
            converged = true;
            break;
        }
    }
    Ok(LinkSolution { p, y, trace, converged })
}

/// Dinkelbach's method: `y = ee(p)`, then `p = argmax R(p) - y (p + p_on)`,
/// which is `clamp(1/y - sigma^2/g, 0, p_max)`. Same stopping rule as
/// [`ee_single_link_qt`].
pub fn ee_single_link_dinkelbach(link: &SingleLink, p0: f64, tol: f64, max_iters: usize) -> Result<LinkSolution> {
    link.check_start(p0)?;
    let a = link.snr_per_watt();
    let mut p = p0;
    let mut trace = IterationTrace::new();
    let mut f = link.ee(p);
    trace.push(f, link.residual(p));
    let mut converged = false;
    for _ in 0..max_iters {
        let y = f;
        p = if a == 0.0 {
            0.0
        } else if y == 0.0 {
            link.p_max
        } else {
            (1.0 / y - 1.0 / a).clamp(0.0, link.p_max)
        };
        let prev = f;
        f = link.ee(p);
        trace.push(f, link.residual(p));
        if objective_settled(prev * link.p_max, f * link.p_max, tol) {
            converged = true;
            break;
        }
    }
    Ok(LinkSolution { p, y: f, trace, converged })
}
