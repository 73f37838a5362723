use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::law::EllipticalLaw;
use super::sphere::{random_unit_vector, SpherePointSet};
use crate::error::{domain, Error, Result};
use crate::rho::ConstraintOracle;

/// A probability estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
    pub n: usize,
}

impl Estimate {
    /// Whether two estimates agree within `k` combined standard errors
    /// (with a floor for exact agreement).
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        let se = self.std_err.hypot(other.std_err);
        (self.value - other.value).abs() <= k * se + 1e-12
    }
}

/// Sphere average of `F_R(ρ(v))`, where `rho` maps a unit direction to the
/// radius along it (`+∞` when the ray never leaves the feasible set).
pub fn probability(
    law: &EllipticalLaw,
    rho: &dyn Fn(&[f64]) -> Result<f64>,
    pts: &SpherePointSet,
) -> Result<Estimate> {
    if pts.dim() != law.dim() {
        return Err(Error::DimensionMismatch { expected: law.dim(), got: pts.dim() });
    }
    let n = pts.len();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for v in pts.points() {
        let r = rho(v)?;
        if r.is_nan() || r < 0.0 {
            return Err(Error::Evaluation(format!("radius {r} along {v:?}")));
        }
        let f = law.radial_cdf(r);
        sum += f;
        sum_sq += f * f;
    }
    let mean = sum / n as f64;
    let var = if n > 1 { ((sum_sq - n as f64 * mean * mean) / (n - 1) as f64).max(0.0) } else { 0.0 };
    Ok(Estimate { value: mean.clamp(0.0, 1.0), std_err: (var / n as f64).sqrt(), n })
}

/// Crude Monte-Carlo estimate of `P[g(x, ξ) ≤ 0]` with `ξ = μ + r L ζ`,
/// `ζ` uniform on the sphere and `r` drawn by inverting the radial cdf.
pub fn direct_mc_probability(
    law: &EllipticalLaw,
    g: &ConstraintOracle,
    x: &[f64],
    n: usize,
    seed: u64,
) -> Result<Estimate> {
    if n == 0 {
        return domain("direct Monte Carlo needs n >= 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..n {
        let zeta = random_unit_vector(law.dim(), &mut rng);
        let r = law.radial_quantile(rng.random::<f64>())?;
        let xi = law.point_along(r, &law.scale_direction(&zeta));
        if g.eval(x, &xi) <= 0.0 {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    Ok(Estimate { value: p, std_err: (p * (1.0 - p) / n as f64).sqrt(), n })
}
