//! Copula families, separable chance constraints and the copula threshold.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::concavity::{BoxSampler, CheckConfig, ConcavityReport, PointSampler, TransformG, Tracker};
use crate::distributions::Marginal;
use crate::error::{domain, Error, Result};
use crate::interval::Interval;
use crate::numeric::integrate;
use crate::special::{std_normal_cdf, std_normal_pdf, std_normal_quantile};
use crate::thresholds::{Route, ThresholdReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Copula {
    Independent { dim: usize },
    Maximum { dim: usize },
    Gumbel { theta: f64, dim: usize },
    Clayton { theta: f64, dim: usize },
    Gaussian2d { corr: f64 },
}

impl Copula {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Copula::Independent { dim } | Copula::Maximum { dim } if dim >= 1 => Ok(()),
            Copula::Gumbel { theta, dim } if theta >= 1.0 && theta.is_finite() && dim >= 1 => Ok(()),
            Copula::Clayton { theta, dim } if theta > 0.0 && theta.is_finite() && dim >= 1 => Ok(()),
            Copula::Gaussian2d { corr } if corr > -1.0 && corr < 1.0 => Ok(()),
            other => domain(format!("invalid copula parameters {other:?}")),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Copula::Independent { dim }
            | Copula::Maximum { dim }
            | Copula::Gumbel { dim, .. }
            | Copula::Clayton { dim, .. } => dim,
            Copula::Gaussian2d { .. } => 2,
        }
    }
}

/// `C(u)` for `u ∈ [0, 1]^m`.
pub fn copula_eval(c: &Copula, u: &[f64]) -> Result<f64> {
    c.validate()?;
    if u.len() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), got: u.len() });
    }
    if let Some(bad) = u.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return domain(format!("copula argument {bad} outside [0, 1]"));
    }
    if u.contains(&0.0) {
        return Ok(0.0);
    }
    let value = match *c {
        Copula::Independent { .. } => u.iter().product(),
        Copula::Maximum { .. } => u.iter().copied().fold(1.0, f64::min),
        Copula::Gumbel { theta, .. } => {
            let s: f64 = u.iter().map(|v| (-v.ln()).powf(theta)).sum();
            (-s.powf(1.0 / theta)).exp()
        }
        Copula::Clayton { theta, .. } => {
            let s: f64 = 1.0 + u.iter().map(|v| (-theta * v.ln()).exp_m1()).sum::<f64>();
            (-s.ln() / theta).exp()
        }
        Copula::Gaussian2d { corr } => {
            if u[0] == 1.0 {
                u[1]
            } else if u[1] == 1.0 {
                u[0]
            } else {
                bivariate_normal_cdf(std_normal_quantile(u[0])?, std_normal_quantile(u[1])?, corr)
            }
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

/// `P[X ≤ h, Y ≤ k]` for standard normals with correlation `corr`, as
/// `∫_{−∞}^h φ(x) Φ((k − corr·x)/√(1 − corr²)) dx`.
pub fn bivariate_normal_cdf(h: f64, k: f64, corr: f64) -> f64 {
    let (h, k) = if h <= k { (h, k) } else { (k, h) };
    if h == f64::NEG_INFINITY {
        return 0.0;
    }
    if k == f64::INFINITY {
        return std_normal_cdf(h);
    }
    let s = (1.0 - corr * corr).sqrt();
    let lower = -10.0f64;
    let upper = h.min(10.0);
    if upper <= lower {
        return 0.0;
    }
    let v = integrate(|x| std_normal_pdf(x) * std_normal_cdf((k - corr * x) / s), lower, upper, 1e-12);
    v.clamp(0.0, 1.0)
}

/// `C(F₁(h₁), …, F_m(h_m))`.
pub fn separable_prob(h_values: &[f64], marginals: &[Marginal], c: &Copula) -> Result<f64> {
    if h_values.len() != marginals.len() {
        return Err(Error::DimensionMismatch { expected: marginals.len(), got: h_values.len() });
    }
    if marginals.len() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), got: marginals.len() });
    }
    let u: Vec<f64> = h_values.iter().zip(marginals).map(|(&h, f)| f.cdf(h)).collect();
    copula_eval(c, &u)
}

/// Default number of segments for the copula certificate.
pub const COPULA_SEGMENTS: usize = 5000;

/// Sampled quasi-concavity test of `z ↦ C(G₁⁻¹(z₁), …, G_m⁻¹(z_m))` on a
/// box: the value inside each segment must not drop below the smaller
/// endpoint value.
pub fn check_copula_concave_ginv(
    c: &Copula,
    ghat: &[TransformG],
    region: &[Interval],
    cfg: &CheckConfig,
) -> Result<ConcavityReport> {
    if ghat.len() != c.dim() || region.len() != c.dim() {
        return Err(Error::DimensionMismatch { expected: c.dim(), got: ghat.len().min(region.len()) });
    }
    let sampler = BoxSampler::new(region)?;
    let f = |z: &[f64]| -> Result<f64> {
        let u: Vec<f64> = z.iter().zip(ghat).map(|(&zi, g)| g.inverse(zi)).collect();
        copula_eval(c, &u)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tracker = Tracker::new();
    for _ in 0..cfg.n_pairs {
        let z1 = sampler.sample(&mut rng);
        let z2 = sampler.sample(&mut rng);
        let floor = f(&z1)?.min(f(&z2)?);
        for &lambda in &cfg.lambdas {
            let mid: Vec<f64> = z1.iter().zip(&z2).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
            tracker.record(f(&mid)?, floor, &z1, &z2, lambda);
        }
    }
    Ok(tracker.finish(cfg.tol))
}

/// `p* = max_i F_i(b_i)`.
pub fn copula_threshold(marginals: &[Marginal], b: &[f64]) -> Result<ThresholdReport> {
    if marginals.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: marginals.len(), got: b.len() });
    }
    if b.is_empty() {
        return domain("copula threshold needs at least one marginal");
    }
    let values: Vec<f64> = marginals.iter().zip(b).map(|(f, &bi)| f.cdf(bi)).collect();
    let argmax = (0..values.len()).max_by(|&i, &j| values[i].total_cmp(&values[j])).expect("non-empty");
    let interior = marginals.iter().zip(b).all(|(f, &bi)| {
        let s = f.support();
        bi > s.lo && bi < s.hi
    });
    Ok(ThresholdReport {
        p_star: values[argmax],
        t_star: None,
        q_star: None,
        delta_q: None,
        delta_nd: 1.0,
        p0: 0.5,
        route: Route::CopulaMax,
        binding: format!("marginal {argmax} at b = {}", b[argmax]),
        argmax: Some(argmax),
        allows_equality: interior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn families(m: usize) -> Vec<Copula> {
        let mut v = vec![
            Copula::Independent { dim: m },
            Copula::Maximum { dim: m },
            Copula::Gumbel { theta: 1.7, dim: m },
            Copula::Clayton { theta: 2.5, dim: m },
        ];
        if m == 2 {
            v.push(Copula::Gaussian2d { corr: 0.6 });
            v.push(Copula::Gaussian2d { corr: -0.8 });
        }
        v
    }

    #[test]
    fn simple_values() {
        assert_eq!(copula_eval(&Copula::Independent { dim: 2 }, &[0.5, 0.5]).unwrap(), 0.25);
        let u = [0.3, 0.7, 0.9];
        let g = copula_eval(&Copula::Gumbel { theta: 1.0, dim: 3 }, &u).unwrap();
        assert!((g - 0.3 * 0.7 * 0.9).abs() < 1e-15);
        assert_eq!(copula_eval(&Copula::Maximum { dim: 3 }, &u).unwrap(), 0.3);
        assert!(copula_eval(&Copula::Independent { dim: 2 }, &[1.2, 0.5]).is_err());
        assert!(copula_eval(&Copula::Independent { dim: 2 }, &[0.5]).is_err());
        assert!(copula_eval(&Copula::Gumbel { theta: 0.5, dim: 2 }, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn uncorrelated_gaussian_factorizes() {
        let c = Copula::Gaussian2d { corr: 0.0 };
        for &(a, b) in &[(0.1, 0.9), (0.5, 0.5), (0.02, 0.3), (0.77, 0.99)] {
            assert!((copula_eval(&c, &[a, b]).unwrap() - a * b).abs() < 1e-8);
        }
    }

    #[test]
    fn bivariate_normal_against_density_quadrature() {
        let corr: f64 = 0.45;
        let s = (1.0 - corr * corr).sqrt();
        let density = |x: f64, y: f64| {
            (-(x * x - 2.0 * corr * x * y + y * y) / (2.0 * s * s)).exp() / (std::f64::consts::TAU * s)
        };
        let (h, k) = (0.4, -0.3);
        let quad = integrate(|x| integrate(|y| density(x, y), -12.0, k, 1e-12), -12.0, h, 1e-11);
        assert!((bivariate_normal_cdf(h, k, corr) - quad).abs() < 1e-8);
    }

    #[test]
    fn boundaries_and_uniform_margins() {
        for m in [2usize, 3] {
            for c in families(m) {
                let mut u = vec![1.0; m];
                assert_eq!(copula_eval(&c, &u).unwrap(), 1.0);
                for i in 0..m {
                    for &ui in &[0.0, 0.13, 0.5, 0.88] {
                        u[i] = ui;
                        assert!((copula_eval(&c, &u).unwrap() - ui).abs() < 1e-9, "{c:?}");
                    }
                    u[i] = 1.0;
                }
            }
        }
    }

    #[test]
    fn gumbel_near_one_is_near_independence() {
        let g = Copula::Gumbel { theta: 1.0 + 1e-4, dim: 2 };
        let i = Copula::Independent { dim: 2 };
        for a in 1..20 {
            for b in 1..20 {
                let u = [a as f64 / 20.0, b as f64 / 20.0];
                assert!((copula_eval(&g, &u).unwrap() - copula_eval(&i, &u).unwrap()).abs() <= 1e-3);
            }
        }
    }

    proptest! {
        #[test]
        fn frechet_bounds(u in prop::collection::vec(0.0f64..=1.0, 2)) {
            for c in families(2) {
                let v = copula_eval(&c, &u).unwrap();
                let lower = (u.iter().sum::<f64>() - 1.0).max(0.0);
                let upper = u.iter().copied().fold(1.0, f64::min);
                prop_assert!(v >= lower - 1e-12 && v <= upper + 1e-12, "{:?} {:?}", c, u);
            }
        }

        #[test]
        fn coordinatewise_monotone(u in prop::collection::vec(0.0f64..=1.0, 3), bump in 0.0f64..0.5, i in 0usize..3) {
            for c in families(3) {
                let mut w = u.clone();
                w[i] = (w[i] + bump).min(1.0);
                prop_assert!(copula_eval(&c, &w).unwrap() >= copula_eval(&c, &u).unwrap() - 1e-12);
            }
        }
    }

    #[test]
    fn separable_probabilities() {
        let margins = [Marginal::exponential(1.0).unwrap(), Marginal::chi(2).unwrap()];
        let p = separable_prob(&[1.5, 3f64.sqrt()], &margins, &Copula::Independent { dim: 2 }).unwrap();
        assert!((p - (1.0 - (-1.5f64).exp()).powi(2)).abs() < 1e-12);
        assert!((p - 0.6036).abs() < 1e-4);
        let p = separable_prob(&[0.3, 2.0], &margins, &Copula::Maximum { dim: 2 }).unwrap();
        assert!((p - margins[0].cdf(0.3).min(margins[1].cdf(2.0))).abs() < 1e-15);
        let p = separable_prob(&[f64::INFINITY, f64::INFINITY], &margins, &Copula::Clayton { theta: 1.0, dim: 2 }).unwrap();
        assert_eq!(p, 1.0);
        assert!(separable_prob(&[1.0], &margins, &Copula::Independent { dim: 2 }).is_err());
    }

    #[test]
    fn copula_certificates() {
        let cfg = CheckConfig::default().with_pairs(COPULA_SEGMENTS);
        let g = TransformG::normal_quantile();
        let r = check_copula_concave_ginv(
            &Copula::Gaussian2d { corr: 0.5 },
            &[g.clone(), g],
            &[Interval::closed(-6.0, 6.0), Interval::closed(-6.0, 6.0)],
            &cfg,
        )
        .unwrap();
        assert!(r.holds, "{r:?}");
        let log = TransformG::log();
        let r = check_copula_concave_ginv(
            &Copula::Independent { dim: 2 },
            &[log.clone(), log],
            &[Interval::left_open(f64::NEG_INFINITY, 0.0), Interval::left_open(f64::NEG_INFINITY, 0.0)],
            &cfg,
        )
        .unwrap();
        assert!(r.holds);
        let sq = TransformG::log_squared();
        let r = check_copula_concave_ginv(
            &Copula::Clayton { theta: 2.0, dim: 2 },
            &[sq.clone(), sq],
            &[Interval::closed(1e-4, 20.0), Interval::closed(1e-4, 20.0)],
            &cfg,
        )
        .unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn copula_threshold_values() {
        let n = Marginal::standard_normal();
        let chi = Marginal::chi(2).unwrap();
        let r = copula_threshold(&[n, chi], &[1.86, 3f64.sqrt()]).unwrap();
        assert!((r.p_star - 0.9686).abs() < 5e-5);
        assert_eq!(r.argmax, Some(0));
        assert!(r.allows_equality);
        let r = copula_threshold(&[n, chi], &[1.6422, 1.3223]).unwrap();
        assert!((r.p_star - 0.9497).abs() < 5e-5);
        for lambda in [0.5, 1.0, 2.0] {
            let mut margins = vec![Marginal::exponential(lambda).unwrap()];
            let mut b = vec![1.5 / lambda];
            for alpha in [-6.0f64, -3.0, -1.0] {
                margins.push(Marginal::rayleigh(1.5).unwrap());
                b.push(((1.0 - alpha / 2.0) * 1.5).sqrt());
            }
            let r = copula_threshold(&margins, &b).unwrap();
            assert!((r.p_star - 0.7769).abs() < 5e-5);
            assert_eq!(r.argmax, Some(0));
        }
        assert!(!copula_threshold(&[Marginal::exponential(1.0).unwrap()], &[0.0]).unwrap().allows_equality);
    }
}
