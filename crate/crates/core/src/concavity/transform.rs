use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::interval::Interval;
use crate::special::{std_normal_cdf, std_normal_pdf, std_normal_quantile};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

/// A continuous, strictly monotone scalar transform together with its
/// derivatives and inverse.
#[derive(Clone)]
pub struct TransformG {
    label: String,
    value: ScalarFn,
    deriv: ScalarFn,
    second_deriv: Option<ScalarFn>,
    inverse: ScalarFn,
    monotonicity: Monotonicity,
    domain: Interval,
    critical_points: Vec<f64>,
}

impl fmt::Debug for TransformG {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformG")
            .field("label", &self.label)
            .field("monotonicity", &self.monotonicity)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl TransformG {
    /// Builds a transform from its parts; `critical_points` lists the zeros
    /// of the derivative.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
        second_deriv: Option<ScalarFn>,
        inverse: impl Fn(f64) -> f64 + Send + Sync + 'static,
        monotonicity: Monotonicity,
        domain: Interval,
        critical_points: Vec<f64>,
    ) -> Self {
        Self {
            label: label.into(),
            value: Arc::new(value),
            deriv: Arc::new(deriv),
            second_deriv,
            inverse: Arc::new(inverse),
            monotonicity,
            domain,
            critical_points,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        (self.deriv)(t)
    }

    pub fn second_deriv(&self, t: f64) -> Option<f64> {
        self.second_deriv.as_ref().map(|g| g(t))
    }

    pub fn has_second_deriv(&self) -> bool {
        self.second_deriv.is_some()
    }

    pub fn inverse(&self, z: f64) -> f64 {
        (self.inverse)(z)
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn is_increasing(&self) -> bool {
        self.monotonicity == Monotonicity::Increasing
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn critical_points(&self) -> &[f64] {
        &self.critical_points
    }

    /// `G_α : t ↦ t^α`, with `G_0 = ln`.
    pub fn power(alpha: f64) -> Self {
        if alpha == 0.0 {
            return Self::log();
        }
        let (mono, domain) = if alpha > 0.0 {
            (Monotonicity::Increasing, Interval::right_open(0.0, f64::INFINITY))
        } else {
            (Monotonicity::Decreasing, Interval::open(0.0, f64::INFINITY))
        };
        Self::new(
            format!("power({alpha})"),
            move |t: f64| t.powf(alpha),
            move |t: f64| alpha * t.powf(alpha - 1.0),
            Some(Arc::new(move |t: f64| alpha * (alpha - 1.0) * t.powf(alpha - 2.0))),
            move |z: f64| z.powf(1.0 / alpha),
            mono,
            domain,
            Vec::new(),
        )
    }

    /// `G_0 : t ↦ ln t`.
    pub fn log() -> Self {
        Self::new(
            "log",
            f64::ln,
            |t: f64| 1.0 / t,
            Some(Arc::new(|t: f64| -1.0 / (t * t))),
            f64::exp,
            Monotonicity::Increasing,
            Interval::open(0.0, f64::INFINITY),
            Vec::new(),
        )
    }

    pub fn identity() -> Self {
        Self::new(
            "identity",
            |t| t,
            |_| 1.0,
            Some(Arc::new(|_| 0.0)),
            |z| z,
            Monotonicity::Increasing,
            Interval::real_line(),
            Vec::new(),
        )
    }

    /// `G(x) = exp(−(ln x)^(1/3))` on `(0, ∞)`, strictly decreasing. It maps
    /// `exp(−x³)` to `exp(x)`.
    pub fn exp_neg_cbrt_log() -> Self {
        Self::new(
            "exp-neg-cbrt-log",
            |x: f64| (-x.ln().cbrt()).exp(),
            |x: f64| {
                let c = x.ln().cbrt();
                -(-c).exp() / (3.0 * x * c * c)
            },
            Some(Arc::new(|x: f64| {
                let c = x.ln().cbrt();
                let denom = 9.0 * x * x * c.powi(4);
                (-c).exp() * (1.0 + 3.0 * c * c + 2.0 / c) / denom
            })),
            |z: f64| (-z.ln().powi(3)).exp(),
            Monotonicity::Decreasing,
            Interval::open(0.0, f64::INFINITY),
            Vec::new(),
        )
    }

    /// `G(x) = −1/√x`, strictly increasing on `(0, ∞)`.
    pub fn neg_inv_sqrt() -> Self {
        Self::new(
            "neg-inv-sqrt",
            |x: f64| -1.0 / x.sqrt(),
            |x: f64| 0.5 * x.powf(-1.5),
            Some(Arc::new(|x: f64| -0.75 * x.powf(-2.5))),
            |z: f64| 1.0 / (z * z),
            Monotonicity::Increasing,
            Interval::open(0.0, f64::INFINITY),
            Vec::new(),
        )
    }

    /// `G(u) = (ln u)²`, strictly decreasing on `(0, 1]`.
    pub fn log_squared() -> Self {
        Self::new(
            "log-squared",
            |u: f64| u.ln().powi(2),
            |u: f64| 2.0 * u.ln() / u,
            Some(Arc::new(|u: f64| (2.0 - 2.0 * u.ln()) / (u * u))),
            |z: f64| (-z.sqrt()).exp(),
            Monotonicity::Decreasing,
            Interval::left_open(0.0, 1.0),
            Vec::new(),
        )
    }

    /// `Ĝ = Φ⁻¹` on `(0, 1)`, whose inverse is the standard normal cdf.
    pub fn normal_quantile() -> Self {
        Self::new(
            "normal-quantile",
            |u: f64| std_normal_quantile(u).unwrap_or(f64::NAN),
            |u: f64| 1.0 / std_normal_pdf(std_normal_quantile(u).unwrap_or(f64::NAN)),
            Some(Arc::new(|u: f64| {
                let z = std_normal_quantile(u).unwrap_or(f64::NAN);
                z / std_normal_pdf(z).powi(2)
            })),
            std_normal_cdf,
            Monotonicity::Increasing,
            Interval::open(0.0, 1.0),
            Vec::new(),
        )
    }

    /// The transform `g_v(t) = −(b/t + β)²` attached to the radius function
    /// of a quadratic constraint along a direction with linear coefficient
    /// `β`. Requires `b < 0`.
    pub fn gv(offset_b: f64, beta: f64) -> Result<Self> {
        if !(offset_b < 0.0) {
            return domain(format!("g_v requires b < 0, got {offset_b}"));
        }
        let b = offset_b;
        let domain = if beta <= 0.0 {
            Interval::open(0.0, f64::INFINITY)
        } else {
            Interval::left_open(0.0, b / -beta)
        };
        Ok(Self::new(
            format!("g_v(b={b}, beta={beta})"),
            move |t: f64| -(b / t + beta).powi(2),
            move |t: f64| 2.0 * b * (b / t + beta) / (t * t),
            Some(Arc::new(move |t: f64| -2.0 * b * (3.0 * b + 2.0 * beta * t) / t.powi(4))),
            move |z: f64| -b / ((-z).sqrt() + beta),
            Monotonicity::Increasing,
            domain,
            Vec::new(),
        ))
    }

    /// Parses a catalog key: `identity`, `log`, `power:<α>`,
    /// `exp-neg-cbrt-log`, `neg-inv-sqrt`, `log-squared`, `normal-quantile`.
    pub fn from_key(key: &str) -> Result<Self> {
        let key = key.trim();
        if let Some(alpha) = key.strip_prefix("power:") {
            let alpha: f64 = alpha
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("bad power exponent in {key:?}")))?;
            if !alpha.is_finite() {
                return domain(format!("power exponent must be finite in {key:?}"));
            }
            return Ok(Self::power(alpha));
        }
        match key {
            "identity" => Ok(Self::identity()),
            "log" => Ok(Self::log()),
            "exp-neg-cbrt-log" => Ok(Self::exp_neg_cbrt_log()),
            "neg-inv-sqrt" => Ok(Self::neg_inv_sqrt()),
            "log-squared" => Ok(Self::log_squared()),
            "normal-quantile" => Ok(Self::normal_quantile()),
            other => domain(format!("unknown transform {other:?}")),
        }
    }

    /// Sampled check of the transform invariants on `interval` (which must
    /// lie in the domain): strict monotonicity, `G⁻¹(G(t)) = t` to 1e-9
    /// relative, and a derivative sign that agrees with the monotonicity.
    pub fn check_invariants(&self, interval: Interval, n: usize) -> Result<()> {
        let (lo, hi) = interval.sampling_range(10.0);
        let mut prev: Option<f64> = None;
        for i in 0..n.max(2) {
            let t = lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64;
            let g = self.value(t);
            let back = self.inverse(g);
            if (back - t).abs() > 1e-9 * t.abs().max(1.0) {
                return Err(Error::Evaluation(format!(
                    "{}: inverse(value({t})) = {back}",
                    self.label
                )));
            }
            let d = self.deriv(t);
            let sign_ok = match self.monotonicity {
                Monotonicity::Increasing => d >= 0.0,
                Monotonicity::Decreasing => d <= 0.0,
            };
            if !sign_ok {
                return Err(Error::Evaluation(format!(
                    "{}: derivative {d} at {t} disagrees with monotonicity",
                    self.label
                )));
            }
            if let Some(p) = prev {
                let strict = match self.monotonicity {
                    Monotonicity::Increasing => g > p,
                    Monotonicity::Decreasing => g < p,
                };
                if !strict {
                    return Err(Error::Evaluation(format!(
                        "{}: not strictly monotone near {t}",
                        self.label
                    )));
                }
            }
            prev = Some(g);
        }
        Ok(())
    }
}
