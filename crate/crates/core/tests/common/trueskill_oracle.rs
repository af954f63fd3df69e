//! TrueSkill by direct numerical integration of the truncated performance
//! difference.

use statrs::distribution::{Continuous, Normal};

const HALF_WIDTH: f64 = 14.0;
const INTERVALS: usize = 40_000;

/// Moments of Z ~ N(t, 1) restricted to `[lo, hi]`: (mass, mean, variance).
fn truncated_moments(t: f64, lo: f64, hi: f64) -> (f64, f64, f64) {
    let lo = lo.max(t - HALF_WIDTH);
    let hi = hi.min(t + HALF_WIDTH).max(lo + 1e-300);
    let lo = lo.min(hi);
    let n = INTERVALS;
    let h = (hi - lo) / n as f64;
    let phi = Normal::standard();
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for i in 0..=n {
        let z = lo + i as f64 * h;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let d = phi.pdf(z - t);
        m0 += w * d;
        m1 += w * d * z;
        m2 += w * d * z * z;
    }
    let (m0, m1, m2) = (m0 * h / 3.0, m1 * h / 3.0, m2 * h / 3.0);
    let mean = m1 / m0;
    (m0, mean, m2 / m0 - mean * mean)
}

/// (v, w) corrections from the moments.
pub fn corrections(t: f64, eps: f64, draw: bool) -> (f64, f64) {
    if draw {
        let (_, mean, var) = truncated_moments(t, -eps, eps);
        (mean - t, 1.0 - var)
    } else {
        let (_, mean, var) = truncated_moments(t, eps, f64::INFINITY);
        (mean - t, 1.0 - var)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Res {
    AWins,
    BWins,
    Draw,
}

/// Posterior (mu, sigma) of both players, via the conditional moments of
/// d = perf_A - perf_B and linear regression of each skill on d.
pub fn update(
    a: (f64, f64),
    b: (f64, f64),
    res: Res,
    beta: f64,
    tau: f64,
    eps: f64,
) -> ((f64, f64), (f64, f64)) {
    let va = a.1 * a.1 + tau * tau;
    let vb = b.1 * b.1 + tau * tau;
    let c2 = va + vb + 2.0 * beta * beta;
    let c = c2.sqrt();
    let delta = a.0 - b.0;
    // normalized difference z = d / c ~ N(delta / c, 1)
    let t = delta / c;
    let e = eps / c;
    let (_, mean_z, var_z) = match res {
        Res::AWins => truncated_moments(t, e, f64::INFINITY),
        Res::BWins => truncated_moments(t, f64::NEG_INFINITY, -e),
        Res::Draw => truncated_moments(t, -e, e),
    };
    let mean_d = mean_z * c;
    let var_d = var_z * c2;
    // cov(s_A, d) = va, cov(s_B, d) = -vb
    let post = |mu: f64, var: f64, cov: f64| {
        let k = cov / c2;
        let m = mu + k * (mean_d - delta);
        let v = var - cov * cov / c2 + k * k * var_d;
        (m, v.sqrt())
    };
    (post(a.0, va, va), post(b.0, vb, -vb))
}
