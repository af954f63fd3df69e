//! Two-player TrueSkill.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const DEFAULT_MU: f64 = 25.0;
pub const DEFAULT_SIGMA: f64 = 25.0 / 3.0;

/// Below this argument the Mills ratio comes from its continued fraction.
const ASYMPTOTIC_CUTOFF: f64 = -5.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rating {
    pub mu: f64,
    pub sigma: f64,
}

impl Default for Rating {
    fn default() -> Self {
        Rating {
            mu: DEFAULT_MU,
            sigma: DEFAULT_SIGMA,
        }
    }
}

impl Rating {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!("invalid rating ({mu}, {sigma})")));
        }
        Ok(Rating { mu, sigma })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrueSkillParams {
    pub beta: f64,
    pub tau: f64,
    pub draw_probability: f64,
}

impl Default for TrueSkillParams {
    fn default() -> Self {
        TrueSkillParams {
            beta: DEFAULT_SIGMA / 2.0,
            tau: DEFAULT_SIGMA / 100.0,
            draw_probability: 0.10,
        }
    }
}

impl TrueSkillParams {
    pub fn new(beta: f64, tau: f64, draw_probability: f64) -> Result<Self> {
        if !(beta > 0.0 && tau >= 0.0 && (0.0..1.0).contains(&draw_probability)) {
            return Err(Error::Domain(format!(
                "invalid TrueSkill parameters beta={beta} tau={tau} draw={draw_probability}"
            )));
        }
        Ok(TrueSkillParams {
            beta,
            tau,
            draw_probability,
        })
    }

    /// Draw margin in performance units.
    pub fn draw_margin(&self) -> f64 {
        std_normal().inverse_cdf((1.0 + self.draw_probability) / 2.0) * 2f64.sqrt() * self.beta
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GameResult {
    AWins,
    BWins,
    Draw,
}

impl GameResult {
    pub fn inverted(self) -> Self {
        match self {
            GameResult::AWins => GameResult::BWins,
            GameResult::BWins => GameResult::AWins,
            GameResult::Draw => GameResult::Draw,
        }
    }
}

fn std_normal() -> Normal {
    Normal::standard()
}

fn pdf(x: f64) -> f64 {
    std_normal().pdf(x)
}

fn cdf(x: f64) -> f64 {
    std_normal().cdf(x)
}

/// Q(z)/φ(z) for the upper tail.
fn mills_ratio(z: f64) -> f64 {
    if z < -ASYMPTOTIC_CUTOFF {
        return std_normal().sf(z) / pdf(z);
    }
    // Laplace continued fraction, evaluated from the tail
    let mut acc = z;
    for k in (1..=60).rev() {
        acc = z + k as f64 / acc;
    }
    1.0 / acc
}

/// The v and w corrections for a normalized difference `t` and margin `eps`.
pub fn truncated_gaussian_moments(t: f64, eps: f64, is_draw: bool) -> (f64, f64) {
    if is_draw {
        draw_moments(t, eps)
    } else {
        let x = t - eps;
        let v = if x < ASYMPTOTIC_CUTOFF {
            1.0 / mills_ratio(-x)
        } else {
            pdf(x) / cdf(x)
        };
        (v, v * (v + x))
    }
}

fn draw_moments(t: f64, eps: f64) -> (f64, f64) {
    let abs_t = t.abs();
    let a = eps - abs_t;
    let b = -eps - abs_t;
    let (v, tail) = if a < ASYMPTOTIC_CUTOFF {
        // both limits deep in the lower tail; divide through by φ(a)
        let e = ((a * a - b * b) / 2.0).exp();
        let denom = mills_ratio(-a) - e * mills_ratio(-b);
        ((e - 1.0) / denom, (a - b * e) / denom)
    } else {
        let denom = cdf(a) - cdf(b);
        ((pdf(b) - pdf(a)) / denom, (a * pdf(a) - b * pdf(b)) / denom)
    };
    let w = v * v + tail;
    (if t < 0.0 { -v } else { v }, w)
}

/// Posterior ratings of A and B after one game.
pub fn trueskill_update(
    a: Rating,
    b: Rating,
    result: GameResult,
    params: &TrueSkillParams,
) -> (Rating, Rating) {
    if result == GameResult::BWins {
        let (b2, a2) = trueskill_update(b, a, GameResult::AWins, params);
        return (a2, b2);
    }
    let tau2 = params.tau * params.tau;
    let var_a = a.sigma * a.sigma + tau2;
    let var_b = b.sigma * b.sigma + tau2;
    let c2 = 2.0 * params.beta * params.beta + var_a + var_b;
    let c = c2.sqrt();
    let t = (a.mu - b.mu) / c;
    let eps = params.draw_margin() / c;
    let (v, w) = truncated_gaussian_moments(t, eps, result == GameResult::Draw);
    let post = |mu: f64, var: f64, sign: f64| Rating {
        mu: mu + sign * var / c * v,
        sigma: (var * (1.0 - var / c2 * w)).sqrt(),
    };
    (post(a.mu, var_a, 1.0), post(b.mu, var_b, -1.0))
}
