//! Univariate marginal laws.
//!
//! | kind | parameters | cdf |
//! |---|---|---|
//! | normal | mean, sd | Φ((t − mean)/sd) |
//! | exponential | rate λ | 1 − e^(−λt) |
//! | chi | dof m | P(m/2, t²/2) |
//! | rayleigh | scale σ | 1 − e^(−t²/(2σ²)) |

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::interval::Interval;
use crate::special::{self, ln_gamma_pos, std_normal_cdf, std_normal_pdf};

/// A density with a continuous derivative, as needed by the `t*` search.
pub trait Density {
    fn pdf(&self, t: f64) -> f64;
    fn pdf_deriv(&self, t: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Marginal {
    Normal { mean: f64, sd: f64 },
    Exponential { rate: f64 },
    Chi { dof: u32 },
    Rayleigh { scale: f64 },
}

impl Marginal {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0) || !mean.is_finite() || !sd.is_finite() {
            return domain(format!("normal requires finite mean and sd > 0, got ({mean}, {sd})"));
        }
        Ok(Marginal::Normal { mean, sd })
    }

    pub fn standard_normal() -> Self {
        Marginal::Normal { mean: 0.0, sd: 1.0 }
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return domain(format!("exponential requires rate > 0, got {rate}"));
        }
        Ok(Marginal::Exponential { rate })
    }

    pub fn chi(dof: u32) -> Result<Self> {
        if dof == 0 {
            return domain("chi requires at least one degree of freedom");
        }
        Ok(Marginal::Chi { dof })
    }

    pub fn rayleigh(scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return domain(format!("rayleigh requires scale > 0, got {scale}"));
        }
        Ok(Marginal::Rayleigh { scale })
    }

    /// Re-checks parameter invariants (values built through serde bypass the
    /// constructors).
    pub fn validate(&self) -> Result<()> {
        match *self {
            Marginal::Normal { mean, sd } => Marginal::normal(mean, sd).map(|_| ()),
            Marginal::Exponential { rate } => Marginal::exponential(rate).map(|_| ()),
            Marginal::Chi { dof } => Marginal::chi(dof).map(|_| ()),
            Marginal::Rayleigh { scale } => Marginal::rayleigh(scale).map(|_| ()),
        }
    }

    pub fn support(&self) -> Interval {
        match self {
            Marginal::Normal { .. } => Interval::real_line(),
            _ => Interval::right_open(0.0, f64::INFINITY),
        }
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t.is_nan() {
            return f64::NAN;
        }
        match *self {
            Marginal::Normal { mean, sd } => std_normal_cdf((t - mean) / sd),
            _ if t <= 0.0 => 0.0,
            _ if t == f64::INFINITY => 1.0,
            Marginal::Exponential { rate } => -(-rate * t).exp_m1(),
            Marginal::Chi { dof } => {
                special::reg_lower_inc_gamma(0.5 * dof as f64, 0.5 * t * t).unwrap_or(1.0)
            }
            Marginal::Rayleigh { scale } => -(-0.5 * (t / scale).powi(2)).exp_m1(),
        }
    }

    /// Upper tail `1 − F(t)` without cancellation.
    pub fn sf(&self, t: f64) -> f64 {
        match *self {
            Marginal::Normal { mean, sd } => std_normal_cdf(-(t - mean) / sd),
            _ if t <= 0.0 => 1.0,
            Marginal::Exponential { rate } => (-rate * t).exp(),
            Marginal::Chi { dof } => {
                special::reg_upper_inc_gamma(0.5 * dof as f64, 0.5 * t * t).unwrap_or(0.0)
            }
            Marginal::Rayleigh { scale } => (-0.5 * (t / scale).powi(2)).exp(),
        }
    }

    pub fn pdf(&self, t: f64) -> f64 {
        match *self {
            Marginal::Normal { mean, sd } => std_normal_pdf((t - mean) / sd) / sd,
            _ if t < 0.0 => 0.0,
            Marginal::Exponential { rate } => rate * (-rate * t).exp(),
            Marginal::Chi { dof } => chi_pdf(dof, t),
            Marginal::Rayleigh { scale } => t / (scale * scale) * (-0.5 * (t / scale).powi(2)).exp(),
        }
    }

    /// Derivative of the density at interior points of the support.
    pub fn pdf_deriv(&self, t: f64) -> f64 {
        match *self {
            Marginal::Normal { mean, sd } => -(t - mean) / (sd * sd) * self.pdf(t),
            _ if t < 0.0 => 0.0,
            Marginal::Exponential { rate } => -rate * self.pdf(t),
            Marginal::Chi { dof } => {
                let m = dof as f64;
                if t == 0.0 {
                    return match dof {
                        1 => 0.0,
                        2 => 1.0,
                        _ => 0.0,
                    };
                }
                chi_pdf(dof, t) * ((m - 1.0) / t - t)
            }
            Marginal::Rayleigh { scale } => {
                let s2 = scale * scale;
                (1.0 - t * t / s2) / s2 * (-0.5 * t * t / s2).exp()
            }
        }
    }

    fn location_scale(&self) -> (f64, f64) {
        match *self {
            Marginal::Normal { mean, sd } => (mean, sd),
            Marginal::Exponential { rate } => (1.0 / rate, 1.0 / rate),
            Marginal::Chi { dof } => ((dof as f64).sqrt(), 1.0),
            Marginal::Rayleigh { scale } => (scale * 1.253_314_137_315_500_3, scale * 0.655),
        }
    }

    /// Inverse cdf on `(0, 1)` by bracketing and safeguarded Newton steps.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return domain(format!("quantile requires p in (0, 1), got {p}"));
        }
        let (center, spread) = self.location_scale();
        let support = self.support();
        let mut width = 10.0 * spread;
        let (mut lo, mut hi);
        loop {
            lo = (center - width).max(support.lo);
            hi = center + width;
            if self.cdf(lo) <= p && self.cdf(hi) >= p {
                break;
            }
            width *= 2.0;
            if !width.is_finite() {
                return Err(Error::Evaluation(format!("could not bracket quantile {p}")));
            }
        }
        // Work with whichever tail is small to keep relative accuracy.
        let upper = p > 0.5;
        let target = if upper { 1.0 - p } else { p };
        let resid = |t: f64| {
            if upper {
                target - self.sf(t)
            } else {
                self.cdf(t) - target
            }
        };
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let r = resid(x);
            if r == 0.0 {
                return Ok(x);
            }
            if r < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            if hi - lo <= 1e-15 * x.abs().max(1e-300) {
                break;
            }
            let dens = self.pdf(x);
            let step = r / dens;
            if dens > 0.0 && step.abs() <= 1e-15 * x.abs().max(1e-300) {
                return Ok(x - step);
            }
            let newton = x - step;
            x = if dens > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Ok(x)
    }

    /// Interval on which the chi cdf is concave-α, i.e. `z ↦ F(z^(1/α))`
    /// (`z ↦ F(e^z)` for α = 0) is concave.
    pub fn concave_alpha_interval(&self, alpha: f64) -> Result<Interval> {
        let Marginal::Chi { dof } = *self else {
            return Err(Error::UnsupportedKind(format!("{self:?}")));
        };
        let m = dof as f64;
        if alpha.is_nan() || alpha > 1.0 {
            return domain(format!("concave-alpha interval needs alpha <= 1, got {alpha}"));
        }
        let edge = (m - alpha).powf(alpha / 2.0);
        Ok(if alpha < 0.0 {
            Interval::left_open(0.0, edge)
        } else if alpha == 0.0 {
            Interval::right_open(m.ln() / 2.0, f64::INFINITY)
        } else {
            Interval::right_open(edge, f64::INFINITY)
        })
    }
}

impl Density for Marginal {
    fn pdf(&self, t: f64) -> f64 {
        Marginal::pdf(self, t)
    }

    fn pdf_deriv(&self, t: f64) -> f64 {
        Marginal::pdf_deriv(self, t)
    }
}

fn chi_pdf(dof: u32, t: f64) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    let m = dof as f64;
    if t == 0.0 {
        return match dof {
            1 => (2.0 / std::f64::consts::PI).sqrt(),
            _ => 0.0,
        };
    }
    let log = (m - 1.0) * t.ln() - 0.5 * t * t + (1.0 - 0.5 * m) * std::f64::consts::LN_2
        - ln_gamma_pos(0.5 * m);
    log.exp()
}

/// The density `(2/π) sin²(t)/t²` on `t > 0`, whose ratio to `G_α'` keeps
/// oscillating for every `α < 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SincSquared;

impl Density for SincSquared {
    fn pdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let s = t.sin() / t;
        std::f64::consts::FRAC_2_PI * s * s
    }

    fn pdf_deriv(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let (s, c) = t.sin_cos();
        std::f64::consts::FRAC_2_PI * (-2.0 * s * s / t.powi(3) + 2.0 * s * c / (t * t))
    }
}
