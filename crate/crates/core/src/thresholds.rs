//! Eventual-convexity thresholds: the elliptical `q`-formula, the refined
//! Gaussian bound for quadratic constraints and the copula bound.

use serde::Serialize;

use crate::concavity::{check_concave_ginv, CheckConfig, ConcavityReport, TransformG};
use crate::distributions::Marginal;
use crate::elliptical::{EllipticalLaw, Generator};
use crate::error::{domain, Error, Result};
use crate::interval::Interval;
use crate::numeric::{bisect, golden_section_min};
use crate::special::{beta, inc_beta, std_normal_cdf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    EllipticalQFormula,
    GaussianRefined,
    CopulaMax,
}

/// A computed safety level `p*` together with what produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub p_star: f64,
    pub t_star: Option<f64>,
    pub q_star: Option<f64>,
    pub delta_q: Option<f64>,
    pub delta_nd: f64,
    pub p0: f64,
    pub route: Route,
    pub binding: String,
    /// Index of the binding marginal (copula route).
    pub argmax: Option<usize>,
    /// Whether `p = p*` itself is covered, not only `p > p*`.
    pub allows_equality: bool,
}

/// Solves `B_x((m−1)/2, 1/2) = (1 − 2q) B((m−1)/2, 1/2)` with
/// `x = 1 − δ²` for `δ ∈ (0, 1)`. For `m = 2` the root is `sin(πq)`.
pub fn delta_of_q(m: usize, q: f64) -> Result<f64> {
    if m < 2 {
        return domain(format!("delta(q) needs m >= 2, got {m}"));
    }
    if !(q > 0.0 && q < 0.5) {
        return domain(format!("delta(q) needs q in (0, 1/2), got {q}"));
    }
    let a = (m as f64 - 1.0) / 2.0;
    let rhs = (1.0 - 2.0 * q) * beta(a, 0.5)?;
    let resid = |d: f64| inc_beta(a, 0.5, (1.0 - d) * (1.0 + d)).unwrap_or(f64::NAN) - rhs;
    bisect(resid, 0.0, 1.0, 1e-13)
}

/// Residual of the defining equation of `δ(q)`.
pub fn delta_residual(m: usize, q: f64, delta: f64) -> Result<f64> {
    let a = (m as f64 - 1.0) / 2.0;
    Ok(inc_beta(a, 0.5, (1.0 - delta) * (1.0 + delta))? - (1.0 - 2.0 * q) * beta(a, 0.5)?)
}

/// `p(t*, q) = (1/2 − q) F_R(δ^nd t*/δ(q)) + 1/2 + q`.
pub fn p_of_t_q(radial_cdf: &dyn Fn(f64) -> f64, t_star: f64, delta_nd: f64, m: usize, q: f64) -> Result<f64> {
    let d = delta_of_q(m, q)?;
    Ok((0.5 - q) * radial_cdf(delta_nd * t_star / d) + 0.5 + q)
}

pub const Q_GRID: usize = 512;

/// `max(p0, min_q p(t*, q))` with the minimum taken over a `q` grid on
/// `(1e-4, 1/2 − 1e-4)` and refined by golden-section search.
pub fn eventual_threshold_elliptical(
    radial_cdf: &dyn Fn(f64) -> f64,
    m: usize,
    t_star: f64,
    delta_nd: f64,
    p0: f64,
    grid: usize,
) -> Result<ThresholdReport> {
    if !(0.5..=1.0).contains(&p0) {
        return domain(format!("p0 must lie in [1/2, 1], got {p0}"));
    }
    if !(delta_nd >= 1.0) {
        return domain(format!("delta_nd must be >= 1, got {delta_nd}"));
    }
    if !(t_star > 0.0) {
        return domain(format!("t* must be positive, got {t_star}"));
    }
    let grid = grid.max(3);
    let (q_lo, q_hi) = (1e-4, 0.5 - 1e-4);
    let qs: Vec<f64> = (0..grid).map(|i| q_lo + (q_hi - q_lo) * i as f64 / (grid - 1) as f64).collect();
    let values = qs.iter().map(|&q| p_of_t_q(radial_cdf, t_star, delta_nd, m, q)).collect::<Result<Vec<_>>>()?;
    let best = (0..grid).min_by(|&i, &j| values[i].total_cmp(&values[j])).expect("grid is non-empty");
    let (a, b) = (qs[best.saturating_sub(1)], qs[(best + 1).min(grid - 1)]);
    let objective = |q: f64| p_of_t_q(radial_cdf, t_star, delta_nd, m, q).unwrap_or(f64::INFINITY);
    let (mut q_star, mut p_min) = golden_section_min(objective, a, b, 1e-8);
    if values[best] < p_min {
        q_star = qs[best];
        p_min = values[best];
    }
    let (p_star, binding) = if p0 >= p_min {
        (p0, "p0".to_string())
    } else {
        (p_min, format!("q-formula at q = {q_star:.6}"))
    };
    Ok(ThresholdReport {
        p_star,
        t_star: Some(t_star),
        q_star: Some(q_star),
        delta_q: Some(delta_of_q(m, q_star)?),
        delta_nd,
        p0,
        route: Route::EllipticalQFormula,
        binding,
        argmax: None,
        allows_equality: true,
    })
}

/// Same as [`eventual_threshold_elliptical`] with the radial law of `law`.
pub fn eventual_threshold_for_law(law: &EllipticalLaw, t_star: f64, delta_nd: f64, p0: f64) -> Result<ThresholdReport> {
    let m = law.dim();
    if m < 2 {
        return domain("the q-formula needs dimension >= 2");
    }
    eventual_threshold_elliptical(&|r| law.radial_cdf(r), m, t_star, delta_nd, p0, Q_GRID)
}

/// `p* = Φ(√(m+3))` for Gaussian laws and quadratic constraints.
pub fn gaussian_refined_threshold(m: usize) -> Result<ThresholdReport> {
    if m == 0 {
        return domain("dimension must be >= 1");
    }
    let t = (m as f64 + 3.0).sqrt();
    Ok(ThresholdReport {
        p_star: std_normal_cdf(t),
        t_star: Some(t),
        q_star: None,
        delta_q: None,
        delta_nd: 1.0,
        p0: 0.5,
        route: Route::GaussianRefined,
        binding: format!("Phi(sqrt({}))", m + 3),
        argmax: None,
        allows_equality: true,
    })
}

/// Sampled check that the chi(m) cdf is concave-α on `(0, upper]`.
pub fn certify_chi_power_concavity(m: usize, alpha: f64, upper: f64) -> Result<ConcavityReport> {
    let chi = Marginal::chi(m as u32)?;
    check_concave_ginv(&|t| chi.cdf(t), &TransformG::power(alpha), Interval::left_open(0.0, upper), &CheckConfig::default())
}

/// `t* = √(m+3)` for a Gaussian law, certified by the concavity of the chi
/// cdf composed with `t ↦ t^(−1/3)` on `(0, (m+3)^(−3/2)]`.
pub fn quadratic_tstar(law: &EllipticalLaw) -> Result<f64> {
    if law.generator() != Generator::Gaussian {
        return domain("quadratic t* needs a Gaussian law");
    }
    let m = law.dim();
    let t = (m as f64 + 3.0).sqrt();
    let report = certify_chi_power_concavity(m, -3.0, t.powi(-3))?;
    if !report.holds {
        return Err(Error::Certification(format!(
            "chi({m}) cdf is not concave-(-3) on (0, {}] (worst violation {:e})",
            t.powi(-3),
            report.worst_violation
        )));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integrate;

    #[test]
    fn two_dimensional_delta_is_a_sine() {
        for i in 1..1000 {
            let q = 0.5 * i as f64 / 1000.0;
            let d = delta_of_q(2, q).unwrap();
            assert!((d - (std::f64::consts::PI * q).sin()).abs() <= 1e-8, "q {q}");
        }
    }

    #[test]
    fn arcsine_reduction_by_quadrature() {
        // B_x(1/2, 1/2) = 2 asin(√x)
        for &x in &[0.1, 0.4, 0.75, 0.99] {
            let quad = integrate(|t: f64| 1.0 / (t * (1.0 - t)).sqrt(), 0.0, x, 1e-12);
            assert!((quad - 2.0 * x.sqrt().asin()).abs() < 1e-6);
        }
    }

    #[test]
    fn delta_residuals_and_limits() {
        for m in [3usize, 5, 10] {
            for q in [0.05, 0.1, 0.25, 0.4] {
                let d = delta_of_q(m, q).unwrap();
                assert!(delta_residual(m, q, d).unwrap().abs() <= 1e-9);
            }
            let mut prev = 0.0;
            for i in 1..1000 {
                let d = delta_of_q(m, 0.5 * i as f64 / 1000.0).unwrap();
                assert!(d > prev);
                prev = d;
            }
        }
        assert!(delta_of_q(5, 1e-9).unwrap() < 1e-6);
        assert!(delta_of_q(5, 0.5 - 1e-12).unwrap() > 0.999);
        assert!(delta_of_q(1, 0.2).is_err());
        assert!(delta_of_q(3, 0.5).is_err());
    }

    #[test]
    fn p_of_t_q_compositions() {
        let law = EllipticalLaw::standard(2).unwrap();
        let f = |r: f64| law.radial_cdf(r);
        let t = 5f64.sqrt();
        let expected = 0.25 * law.radial_cdf(t / (std::f64::consts::FRAC_PI_4).sin()) + 0.75;
        assert!((p_of_t_q(&f, t, 1.0, 2, 0.25).unwrap() - expected).abs() < 1e-12);
        assert!((p_of_t_q(&f, t, 1.0, 2, 0.5 - 1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert_eq!(p_of_t_q(&|_| 1.0, t, 1.0, 2, 0.1).unwrap(), 1.0);
        for i in 1..50 {
            let q = i as f64 / 100.0;
            assert!(p_of_t_q(&f, t, 1.0, 2, q).unwrap() >= 0.5 + q);
        }
    }

    #[test]
    fn elliptical_threshold_is_weaker_than_refined() {
        let law = EllipticalLaw::standard(2).unwrap();
        let r = eventual_threshold_for_law(&law, 5f64.sqrt(), 1.0, 0.5).unwrap();
        let refined = gaussian_refined_threshold(2).unwrap();
        assert!(r.p_star > 0.5 && r.p_star < 1.0);
        assert!(r.p_star >= refined.p_star);
        assert!((refined.p_star - 0.9873).abs() < 5e-5);
        let q = r.q_star.unwrap();
        assert!(q > 0.0 && q < 0.5);
    }

    #[test]
    fn elliptical_threshold_limits_and_monotonicity() {
        let law = EllipticalLaw::standard(3).unwrap();
        let tiny = eventual_threshold_for_law(&law, 1e-9, 1.0, 0.5).unwrap();
        assert!((tiny.p_star - 0.5).abs() < 1e-3);
        let mut prev = 0.0;
        for k in 1..20 {
            let r = eventual_threshold_for_law(&law, 0.25 * k as f64, 1.0, 0.5).unwrap();
            assert!(r.p_star >= prev - 1e-12);
            prev = r.p_star;
        }
        let held = eventual_threshold_for_law(&law, 0.5, 1.0, 0.97).unwrap();
        assert_eq!(held.p_star, 0.97);
        assert_eq!(held.binding, "p0");
        assert!(eventual_threshold_for_law(&law, 1.0, 0.5, 0.5).is_err());
        assert!(eventual_threshold_for_law(&law, 1.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn refined_threshold_values() {
        assert!((gaussian_refined_threshold(1).unwrap().p_star - std_normal_cdf(2.0)).abs() < 1e-15);
        assert_eq!(gaussian_refined_threshold(2).unwrap().t_star, Some(5f64.sqrt()));
    }

    #[test]
    fn quadratic_tstar_is_certified() {
        assert!((quadratic_tstar(&EllipticalLaw::standard(2).unwrap()).unwrap() - 5f64.sqrt()).abs() < 1e-15);
        assert!((quadratic_tstar(&EllipticalLaw::standard(9).unwrap()).unwrap() - 12f64.sqrt()).abs() < 1e-15);
        for m in [2usize, 4, 9] {
            let edge = (m as f64 + 3.0).powf(-1.5);
            assert!(!certify_chi_power_concavity(m, -3.0, 1.5 * edge).unwrap().holds, "m {m}");
        }
        let student = EllipticalLaw::new(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]], Generator::Student { nu: 5.0 }).unwrap();
        assert!(quadratic_tstar(&student).is_err());
    }

    #[test]
    fn tstar_agrees_with_density_search() {
        use crate::concavity::g_decreasing_tstar;
        for m in [1u32, 2, 3, 6] {
            let t = g_decreasing_tstar(&Marginal::chi(m).unwrap(), &TransformG::power(-3.0), (0.1, 10.0)).unwrap();
            assert!((t - gaussian_refined_threshold(m as usize).unwrap().t_star.unwrap()).abs() < 1e-8);
        }
    }
}
