use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::transform::TransformG;
use crate::error::{domain, Error, Result};
use crate::interval::Interval;

/// Settings shared by the sampled certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub n_pairs: usize,
    pub lambdas: Vec<f64>,
    pub tol: f64,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            n_pairs: 2000,
            lambdas: (1..=9).map(|k| k as f64 / 10.0).collect(),
            tol: 1e-9,
            seed: 20_240_501,
        }
    }
}

impl CheckConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_pairs(mut self, n_pairs: usize) -> Self {
        self.n_pairs = n_pairs;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// The pair and weight at which the largest violation was seen.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lambda: f64,
}

/// Outcome of a sampled certificate.
///
/// Violations are relative: `(rhs − lhs) / max(1, |lhs|, |rhs|)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityReport {
    pub holds: bool,
    pub worst_violation: f64,
    pub witness: Option<Witness>,
    pub samples_used: usize,
    pub tolerance: f64,
}

pub(crate) struct Tracker {
    worst: f64,
    witness: Option<Witness>,
    samples: usize,
}

impl Tracker {
    pub(crate) fn new() -> Self {
        Self { worst: f64::NEG_INFINITY, witness: None, samples: 0 }
    }

    pub(crate) fn record(&mut self, lhs: f64, rhs: f64, x: &[f64], y: &[f64], lambda: f64) {
        self.samples += 1;
        let scale = 1f64.max(lhs.abs()).max(rhs.abs());
        let v = if lhs.is_infinite() && lhs == rhs { 0.0 } else { (rhs - lhs) / scale };
        if v > self.worst || self.witness.is_none() {
            self.worst = v;
            self.witness = Some(Witness { x: x.to_vec(), y: y.to_vec(), lambda });
        }
    }

    pub(crate) fn finish(self, tol: f64) -> ConcavityReport {
        ConcavityReport {
            holds: self.worst <= tol,
            worst_violation: self.worst,
            witness: self.witness,
            samples_used: self.samples,
            tolerance: tol,
        }
    }
}

/// Source of points in a convex domain.
pub trait PointSampler {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
}

/// Uniform points in a product of intervals. Unbounded sides are truncated
/// to a finite span and open ends are kept strictly inside.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSampler {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxSampler {
    pub fn new(sides: &[Interval]) -> Result<Self> {
        if sides.is_empty() {
            return domain("box sampler needs at least one side");
        }
        let (lo, hi) = sides.iter().map(|s| s.sampling_range(10.0)).unzip();
        let sampler = Self { lo, hi };
        if sampler.lo.iter().zip(&sampler.hi).any(|(l, h)| !(l <= h)) {
            return domain("box sampler side is empty");
        }
        Ok(sampler)
    }

    pub fn closed(bounds: &[(f64, f64)]) -> Result<Self> {
        let sides: Vec<Interval> = bounds.iter().map(|&(l, h)| Interval::closed(l, h)).collect();
        Self::new(&sides)
    }
}

impl PointSampler for BoxSampler {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| if l == h { l } else { l + (h - l) * rng.random::<f64>() })
            .collect()
    }
}

fn combine(x: &[f64], y: &[f64], lambda: f64) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect()
}

fn transformed(f: &dyn Fn(&[f64]) -> f64, g: &TransformG, x: &[f64]) -> Result<(f64, f64)> {
    let fx = f(x);
    if !g.domain().contains(fx) {
        return Err(Error::Evaluation(format!(
            "f({x:?}) = {fx} lies outside the domain {} of {}",
            g.domain(),
            g.label()
        )));
    }
    let gx = g.value(fx);
    if gx.is_nan() {
        return Err(Error::Evaluation(format!("{} is undefined at {fx}", g.label())));
    }
    Ok((fx, gx))
}

/// Sampled test of `f(λx + (1−λ)y) ≥ G⁻¹(λG(f(x)) + (1−λ)G(f(y)))`.
pub fn check_g_concavity(
    f: &dyn Fn(&[f64]) -> f64,
    g: &TransformG,
    sampler: &dyn PointSampler,
    cfg: &CheckConfig,
) -> Result<ConcavityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tracker = Tracker::new();
    for _ in 0..cfg.n_pairs {
        let x = sampler.sample(&mut rng);
        let y = sampler.sample(&mut rng);
        let (_, gx) = transformed(f, g, &x)?;
        let (_, gy) = transformed(f, g, &y)?;
        for &lambda in &cfg.lambdas {
            let lhs = f(&combine(&x, &y, lambda));
            let rhs = g.inverse(lambda * gx + (1.0 - lambda) * gy);
            if lhs.is_nan() || rhs.is_nan() {
                return Err(Error::Evaluation(format!(
                    "undefined value on the segment between {x:?} and {y:?}"
                )));
            }
            tracker.record(lhs, rhs, &x, &y, lambda);
        }
    }
    Ok(tracker.finish(cfg.tol))
}

/// Sampled concavity test of a scalar function on an interval: random
/// pairs over the weight grid, then a dense midpoint sweep of `n_pairs`
/// equally spaced points.
pub fn check_concave_on(h: &dyn Fn(f64) -> f64, interval: Interval, cfg: &CheckConfig) -> Result<ConcavityReport> {
    let (lo, hi) = interval.sampling_range(10.0);
    if !(lo < hi) {
        return domain(format!("interval {interval} is empty"));
    }
    let eval = |z: f64| -> Result<f64> {
        let v = h(z);
        if v.is_nan() {
            Err(Error::Domain(format!("function undefined at {z}")))
        } else {
            Ok(v)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tracker = Tracker::new();
    for _ in 0..cfg.n_pairs {
        let z1 = lo + (hi - lo) * rng.random::<f64>();
        let z2 = lo + (hi - lo) * rng.random::<f64>();
        let (h1, h2) = (eval(z1)?, eval(z2)?);
        for &lambda in &cfg.lambdas {
            let lhs = eval(lambda * z1 + (1.0 - lambda) * z2)?;
            tracker.record(lhs, lambda * h1 + (1.0 - lambda) * h2, &[z1], &[z2], lambda);
        }
    }
    let n = cfg.n_pairs.max(3);
    let step = (hi - lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect();
    let values = grid.iter().map(|&z| eval(z)).collect::<Result<Vec<_>>>()?;
    for i in 1..n - 1 {
        let (a, b) = (grid[i - 1], grid[i + 1]);
        let lambda = (b - grid[i]) / (b - a);
        let rhs = lambda * values[i - 1] + (1.0 - lambda) * values[i + 1];
        tracker.record(values[i], rhs, &[a], &[b], lambda);
    }
    Ok(tracker.finish(cfg.tol))
}

/// Sampled test that `z ↦ F(G⁻¹(z))` is concave on `interval`.
pub fn check_concave_ginv(
    cdf: &dyn Fn(f64) -> f64,
    g: &TransformG,
    interval: Interval,
    cfg: &CheckConfig,
) -> Result<ConcavityReport> {
    check_concave_on(&|z| cdf(g.inverse(z)), interval, cfg)
}

/// Sampled test that `z ↦ outer(F(G⁻¹(z)))` is concave on `interval`, e.g.
/// log-concavity of `F∘G⁻¹` with `outer = ln`.
pub fn check_outer_concave_ginv(
    cdf: &dyn Fn(f64) -> f64,
    outer: &TransformG,
    g: &TransformG,
    interval: Interval,
    cfg: &CheckConfig,
) -> Result<ConcavityReport> {
    check_concave_on(&|z| outer.value(cdf(g.inverse(z))), interval, cfg)
}

/// Chains two certificates: `f` is `G1`-concave and `G1⁻¹` is `G2`-concave
/// on the observed range of `G1∘f`, then confirms `f` is `G2`-concave on
/// the same samples and returns that report.
pub fn check_propagation(
    f: &dyn Fn(&[f64]) -> f64,
    g1: &TransformG,
    g2: &TransformG,
    sampler: &dyn PointSampler,
    cfg: &CheckConfig,
) -> Result<ConcavityReport> {
    let first = check_g_concavity(f, g1, sampler, cfg)?;
    if !first.holds {
        return Err(Error::Certification(format!(
            "f is not {}-concave (worst violation {:e})",
            g1.label(),
            first.worst_violation
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..2 * cfg.n_pairs {
        let (_, gx) = transformed(f, g1, &sampler.sample(&mut rng))?;
        lo = lo.min(gx);
        hi = hi.max(gx);
    }
    let range = BoxSampler::closed(&[(lo, hi)])?;
    let inner = check_g_concavity(&|z: &[f64]| g1.inverse(z[0]), g2, &range, cfg)?;
    if !inner.holds {
        return Err(Error::Certification(format!(
            "inverse of {} is not {}-concave on [{lo}, {hi}] (worst violation {:e})",
            g1.label(),
            g2.label(),
            inner.worst_violation
        )));
    }
    let last = check_g_concavity(f, g2, sampler, cfg)?;
    if !last.holds {
        return Err(Error::Certification(format!(
            "f fails the {}-concavity check although both premises hold (worst violation {:e})",
            g2.label(),
            last.worst_violation
        )));
    }
    Ok(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Marginal;

    fn exp_neg_cube(x: &[f64]) -> f64 {
        (-x[0].powi(3)).exp()
    }

    #[test]
    fn exp_neg_cube_is_concave_for_the_exotic_transform() {
        let s = BoxSampler::closed(&[(-2.0, 2.0)]).unwrap();
        let r = check_g_concavity(&exp_neg_cube, &TransformG::exp_neg_cbrt_log(), &s, &CheckConfig::default()).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!(r.samples_used, 2000 * 9);
    }

    #[test]
    fn exp_neg_cube_is_not_alpha_concave() {
        let s = BoxSampler::closed(&[(-2.0, 2.0)]).unwrap();
        for alpha in [-3.0, -1.0, 0.0, 0.5, 1.0] {
            let r = check_g_concavity(&exp_neg_cube, &TransformG::power(alpha), &s, &CheckConfig::default()).unwrap();
            assert!(!r.holds, "alpha {alpha}");
            assert!(r.witness.is_some());
        }
    }

    #[test]
    fn pow_ratio_is_concave_for_neg_inv_sqrt() {
        let s = BoxSampler::new(&[Interval::left_open(0.0, 3.0), Interval::left_open(0.0, 3.0)]).unwrap();
        let f = |z: &[f64]| (z[1] / (z[0] * z[0])).powi(2);
        let r = check_g_concavity(&f, &TransformG::neg_inv_sqrt(), &s, &CheckConfig::default()).unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn out_of_domain_values_are_reported() {
        let s = BoxSampler::closed(&[(-1.0, 1.0)]).unwrap();
        let f = |z: &[f64]| z[0];
        assert!(matches!(
            check_g_concavity(&f, &TransformG::log(), &s, &CheckConfig::default()),
            Err(Error::Evaluation(_))
        ));
    }

    #[test]
    fn hierarchy_on_shared_samples() {
        // A 0.5-concave function: square of a positive concave function.
        let f = |z: &[f64]| (3.0 - z[0] * z[0] - 0.5 * z[1] * z[1]).powi(2);
        let s = BoxSampler::closed(&[(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
        let cfg = CheckConfig::default();
        assert!(!check_g_concavity(&f, &TransformG::power(1.0), &s, &cfg).unwrap().holds);
        for beta in [0.5, 0.25, 0.0, -1.0, -3.0, -20.0] {
            let r = check_g_concavity(&f, &TransformG::power(beta), &s, &cfg).unwrap();
            assert!(r.holds, "beta {beta}: {r:?}");
        }
    }

    #[test]
    fn concave_ginv_for_normal_and_exotic_transform() {
        let g = TransformG::exp_neg_cbrt_log();
        let n = Marginal::standard_normal();
        let r = check_concave_ginv(&|t| n.cdf(t), &g, Interval::left_open(0.0, g.value(1.86)), &CheckConfig::default())
            .unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn concave_ginv_for_chi_intervals() {
        for m in [1u32, 2, 3, 5, 10] {
            let chi = Marginal::chi(m).unwrap();
            for alpha in [-0.5, -1.0, -3.0] {
                let i = chi.concave_alpha_interval(alpha).unwrap();
                let r = check_concave_ginv(&|t| chi.cdf(t), &TransformG::power(alpha), i, &CheckConfig::default())
                    .unwrap();
                assert!(r.holds, "m {m} alpha {alpha}: {r:?}");
            }
        }
        let chi2 = Marginal::chi(2).unwrap();
        let r = check_concave_ginv(&|t| chi2.cdf(t), &TransformG::power(-1.0), Interval::left_open(0.9, 1.5), &CheckConfig::default())
            .unwrap();
        assert!(!r.holds);
    }

    #[test]
    fn log_concavity_of_normal_cdf_through_exotic_transform() {
        let g = TransformG::exp_neg_cbrt_log();
        let n = Marginal::standard_normal();
        let r = check_outer_concave_ginv(
            &|t| n.cdf(t),
            &TransformG::log(),
            &g,
            Interval::left_open(0.0, g.value(1.6422)),
            &CheckConfig::default(),
        )
        .unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn propagation_concave_to_log_concave() {
        let f = |z: &[f64]| 4.0 - z[0] * z[0] - (z[1] - 0.5).powi(2);
        let s = BoxSampler::closed(&[(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
        let r = check_propagation(&f, &TransformG::identity(), &TransformG::log(), &s, &CheckConfig::default()).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn propagation_from_cdf_power_concavity() {
        // Past the mode the chi(5) cdf is concave, hence 0.5-concave.
        let chi = Marginal::chi(5).unwrap();
        let s = BoxSampler::closed(&[(2.2, 8.0)]).unwrap();
        let f = |z: &[f64]| chi.cdf(z[0]);
        let r = check_propagation(&f, &TransformG::power(0.5), &TransformG::log(), &s, &CheckConfig::default()).unwrap();
        assert!(r.holds);
    }

    #[test]
    fn propagation_rejects_failed_premise() {
        let s = BoxSampler::closed(&[(-2.0, 2.0)]).unwrap();
        assert!(matches!(
            check_propagation(&exp_neg_cube, &TransformG::power(-1.0), &TransformG::log(), &s, &CheckConfig::default()),
            Err(Error::Certification(_))
        ));
    }

    #[test]
    fn gv_inverse_is_minus_three_concave() {
        for &(b, beta) in &[(-1.0, 0.0), (-1.0, -0.4), (-2.5, -1.3)] {
            let gv = TransformG::gv(b, beta).unwrap();
            let s = BoxSampler::new(&[Interval::open(f64::NEG_INFINITY, -beta * beta)]).unwrap();
            let f = |z: &[f64]| gv.inverse(z[0]);
            let r = check_g_concavity(&f, &TransformG::power(-3.0), &s, &CheckConfig::default()).unwrap();
            assert!(r.holds, "b {b} beta {beta}: {r:?}");
            let r = check_propagation(&f, &TransformG::power(-3.0), &TransformG::power(-10.0), &s, &CheckConfig::default())
                .unwrap();
            assert!(r.holds);
        }
    }
}
