use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distributions::Marginal;
use crate::error::{domain, Error, Result};
use crate::linalg::{cholesky, mat_vec, Matrix};
use crate::numeric::{integrate, MonotoneCubic};

/// Generator of an elliptical law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    Gaussian,
    Student { nu: f64 },
}

/// `ξ = μ + R L ζ` with `ζ` uniform on the unit sphere and `R` the radial law.
#[derive(Debug, Clone)]
pub struct EllipticalLaw {
    mean: Vec<f64>,
    cov: Matrix,
    chol: Matrix,
    generator: Generator,
    radial: Radial,
}

#[derive(Debug, Clone)]
enum Radial {
    Chi(Marginal),
    Student(Arc<StudentRadial>),
}

impl EllipticalLaw {
    pub fn new(mean: Vec<f64>, cov: Matrix, generator: Generator) -> Result<Self> {
        let m = mean.len();
        if m == 0 {
            return domain("elliptical law needs dimension >= 1");
        }
        if cov.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: cov.len() });
        }
        if mean.iter().chain(cov.iter().flatten()).any(|v| !v.is_finite()) {
            return domain("mean and covariance must be finite");
        }
        let chol = cholesky(&cov)?;
        let radial = match generator {
            Generator::Gaussian => Radial::Chi(Marginal::chi(m as u32)?),
            Generator::Student { nu } => {
                if !(nu > 0.0 && nu.is_finite()) {
                    return domain(format!("student generator needs nu > 0, got {nu}"));
                }
                Radial::Student(Arc::new(StudentRadial::new(m, nu)))
            }
        };
        Ok(Self { mean, cov, chol, generator, radial })
    }

    pub fn standard(m: usize) -> Result<Self> {
        let cov = (0..m).map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::new(vec![0.0; m], cov, Generator::Gaussian)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix {
        &self.cov
    }

    pub fn chol(&self) -> &Matrix {
        &self.chol
    }

    pub fn generator(&self) -> Generator {
        self.generator
    }

    /// `L v`
    pub fn scale_direction(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(&self.chol, v)
    }

    /// `μ + t L v`
    pub fn point_along(&self, t: f64, lv: &[f64]) -> Vec<f64> {
        self.mean.iter().zip(lv).map(|(m, d)| m + t * d).collect()
    }

    pub fn radial_pdf(&self, r: f64) -> f64 {
        if !(r >= 0.0) {
            return 0.0;
        }
        match &self.radial {
            Radial::Chi(chi) => chi.pdf(r),
            Radial::Student(s) => s.pdf(r),
        }
    }

    /// `F_R(r)`; `+∞` maps to 1.
    pub fn radial_cdf(&self, r: f64) -> f64 {
        if r == f64::INFINITY {
            return 1.0;
        }
        if !(r > 0.0) {
            return 0.0;
        }
        match &self.radial {
            Radial::Chi(chi) => chi.cdf(r),
            Radial::Student(s) => s.cdf(r),
        }
    }

    /// Inverse of the radial cdf on `[0, 1)`.
    pub fn radial_quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return domain(format!("radial quantile needs p in [0, 1), got {p}"));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        match &self.radial {
            Radial::Chi(Marginal::Chi { dof: 2 }) => Ok((-2.0 * (-p).ln_1p()).sqrt()),
            Radial::Chi(chi) => chi.quantile(p),
            Radial::Student(s) => Ok(s.quantile(p)),
        }
    }
}

const KNOTS: usize = 4096;

/// Radial law of the multivariate Student distribution, tabulated from the
/// unnormalized density `r^(m−1) (1 + r²/ν)^(−(ν+m)/2)`.
#[derive(Debug)]
struct StudentRadial {
    m: f64,
    nu: f64,
    log_norm: f64,
    r_min: f64,
    r_max: f64,
    cdf_table: MonotoneCubic,
    knots_r: Vec<f64>,
    knots_p: Vec<f64>,
}

impl StudentRadial {
    fn new(m: usize, nu: f64) -> Self {
        let m = m as f64;
        let unnorm = |r: f64| ((m - 1.0) * r.ln() - 0.5 * (nu + m) * (r * r / nu).ln_1p()).exp();
        let scale = nu.sqrt().max(1.0);
        let (r_min, r_max) = (1e-6 * scale, 1e6 * scale);
        let step = (r_max / r_min).ln() / (KNOTS - 1) as f64;
        let knots_r: Vec<f64> = (0..KNOTS).map(|i| r_min * (step * i as f64).exp()).collect();
        let mut cum = Vec::with_capacity(KNOTS);
        let mut acc = r_min.powf(m) / m;
        cum.push(acc);
        for w in knots_r.windows(2) {
            acc += integrate(unnorm, w[0], w[1], 1e-13 * acc.max(1e-300));
            cum.push(acc);
        }
        let total = acc + Self::tail_unnorm(m, nu, r_max);
        let mut me = Self {
            m,
            nu,
            log_norm: -total.ln(),
            r_min,
            r_max,
            cdf_table: MonotoneCubic::new(vec![0.0, 1.0], vec![0.0, 0.0], vec![0.0, 0.0]),
            knots_r: Vec::new(),
            knots_p: Vec::new(),
        };
        let knots_p: Vec<f64> = cum.iter().map(|c| c / total).collect();
        let slopes: Vec<f64> = knots_r.iter().map(|&r| me.pdf(r)).collect();
        me.cdf_table = MonotoneCubic::new(knots_r.clone(), knots_p.clone(), slopes);
        me.knots_r = knots_r;
        me.knots_p = knots_p;
        me
    }

    /// `∫_r^∞` of the unnormalized density using its large-r form.
    fn tail_unnorm(m: f64, nu: f64, r: f64) -> f64 {
        let c = ((nu + m) / 2.0 * nu.ln()).exp() * (1.0 + nu / (r * r)).powf(-(nu + m) / 2.0);
        c * r.powf(-nu) / nu
    }

    fn pdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return if self.m == 1.0 && r == 0.0 { self.log_norm.exp() } else { 0.0 };
        }
        let (m, nu) = (self.m, self.nu);
        ((m - 1.0) * r.ln() - 0.5 * (nu + m) * (r * r / nu).ln_1p() + self.log_norm).exp()
    }

    fn cdf(&self, r: f64) -> f64 {
        if r < self.r_min {
            (r.powf(self.m) / self.m * self.log_norm.exp()).min(1.0)
        } else if r > self.r_max {
            1.0 - Self::tail_unnorm(self.m, self.nu, r) * self.log_norm.exp()
        } else {
            self.cdf_table.eval(r).min(1.0)
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        let last = *self.knots_p.last().expect("table is non-empty");
        if p >= last {
            let c = ((self.nu + self.m) / 2.0 * self.nu.ln()).exp() * self.log_norm.exp();
            return (c / (self.nu * (1.0 - p))).powf(1.0 / self.nu).max(self.r_max);
        }
        if p <= self.knots_p[0] {
            return (p * self.m / self.log_norm.exp()).powf(1.0 / self.m);
        }
        let i = self.knots_p.partition_point(|&q| q < p).clamp(1, KNOTS - 1);
        let (mut lo, mut hi) = (self.knots_r[i - 1], self.knots_r[i]);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}
