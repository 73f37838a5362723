//! Radius of the feasible set along rays `μ + t L v`: a bracketing solver
//! for arbitrary constraints and the closed form for quadratic ones.

use std::fmt;
use std::sync::Arc;

use crate::concavity::TransformG;
use crate::elliptical::{probability, EllipticalLaw, Estimate, SpherePointSet};
use crate::error::{domain, Error, Result};
use crate::linalg::{dot, mat_vec, quad_form, Matrix};

pub type ConstraintFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&[f64]) -> Matrix + Send + Sync>;

/// Evaluator of `g(x, z)`; several rows are reduced by their maximum.
#[derive(Clone)]
pub struct ConstraintOracle {
    label: String,
    rows: Vec<ConstraintFn>,
    convex_in_z: bool,
    quadratic: Option<QuadraticSpec>,
}

impl fmt::Debug for ConstraintOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstraintOracle")
            .field("label", &self.label)
            .field("rows", &self.rows.len())
            .field("convex_in_z", &self.convex_in_z)
            .field("quadratic", &self.quadratic.is_some())
            .finish()
    }
}

impl ConstraintOracle {
    pub fn new(
        label: impl Into<String>,
        convex_in_z: bool,
        g: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), rows: vec![Arc::new(g)], convex_in_z, quadratic: None }
    }

    pub fn with_rows(label: impl Into<String>, convex_in_z: bool, rows: Vec<ConstraintFn>) -> Result<Self> {
        if rows.is_empty() {
            return domain("constraint needs at least one row");
        }
        Ok(Self { label: label.into(), rows, convex_in_z, quadratic: None })
    }

    pub fn from_quadratic(label: impl Into<String>, spec: QuadraticSpec) -> Self {
        let inner = spec.clone();
        let mut oracle = Self::new(label, true, move |x: &[f64], z: &[f64]| inner.eval(x, z));
        oracle.quadratic = Some(spec);
        oracle
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn convex_in_z(&self) -> bool {
        self.convex_in_z
    }

    pub fn quadratic(&self) -> Option<&QuadraticSpec> {
        self.quadratic.as_ref()
    }

    pub fn eval(&self, x: &[f64], z: &[f64]) -> f64 {
        self.rows.iter().map(|g| g(x, z)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Matrix part `W(x)` of a quadratic constraint.
#[derive(Clone)]
pub enum WForm {
    Constant(Matrix),
    /// `Σ x_i W_i`
    Linear(Vec<Matrix>),
    /// `diag(x₁² + 0.5, |x₂ − 1|³ + 0.2)`
    CurvedDiagonal,
    Custom(MatrixFn),
}

impl fmt::Debug for WForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WForm::Constant(w) => f.debug_tuple("Constant").field(w).finish(),
            WForm::Linear(ws) => f.debug_tuple("Linear").field(ws).finish(),
            WForm::CurvedDiagonal => write!(f, "CurvedDiagonal"),
            WForm::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// `g(x, z) = zᵀ W(x) z + w̄ᵀ z + b` with `b < 0`.
#[derive(Debug, Clone)]
pub struct QuadraticSpec {
    w: WForm,
    linear_row: Vec<f64>,
    offset: f64,
}

impl QuadraticSpec {
    pub fn new(w: WForm, linear_row: Vec<f64>, offset: f64) -> Result<Self> {
        if !(offset < 0.0) {
            return domain(format!("quadratic constraint needs b < 0, got {offset}"));
        }
        if let WForm::CurvedDiagonal = w {
            if linear_row.len() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, got: linear_row.len() });
            }
        }
        Ok(Self { w, linear_row, offset })
    }

    pub fn constant(w: Matrix, linear_row: Vec<f64>, offset: f64) -> Result<Self> {
        Self::new(WForm::Constant(w), linear_row, offset)
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear_row(&self) -> &[f64] {
        &self.linear_row
    }

    pub fn w_form(&self) -> &WForm {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.linear_row.len()
    }

    pub fn w_at(&self, x: &[f64]) -> Matrix {
        match &self.w {
            WForm::Constant(w) => w.clone(),
            WForm::Linear(ws) => {
                let m = self.dim();
                let mut out = vec![vec![0.0; m]; m];
                for (xi, wi) in x.iter().zip(ws) {
                    for (orow, wrow) in out.iter_mut().zip(wi) {
                        for (o, w) in orow.iter_mut().zip(wrow) {
                            *o += xi * w;
                        }
                    }
                }
                out
            }
            WForm::CurvedDiagonal => {
                vec![vec![x[0] * x[0] + 0.5, 0.0], vec![0.0, (x[1] - 1.0).abs().powi(3) + 0.2]]
            }
            WForm::Custom(f) => f(x),
        }
    }

    pub fn eval(&self, x: &[f64], z: &[f64]) -> f64 {
        quad_form(&self.w_at(x), z) + dot(&self.linear_row, z) + self.offset
    }

    /// `h(x, v) = (Lv)ᵀ W(x) (Lv)`
    pub fn curvature(&self, x: &[f64], lv: &[f64]) -> f64 {
        quad_form(&self.w_at(x), lv)
    }

    /// `β(v) = w̄ᵀ(Lv) / 2`
    pub fn slope(&self, lv: &[f64]) -> f64 {
        0.5 * dot(&self.linear_row, lv)
    }

    /// Sampled check that `(Lv)ᵀ W(x) (Lv) ≥ 0` over the given directions.
    pub fn check_psd(&self, x: &[f64], law: &EllipticalLaw, pts: &SpherePointSet) -> Result<()> {
        let w = self.w_at(x);
        for v in pts.points() {
            let lv = law.scale_direction(v);
            let h = quad_form(&w, &lv);
            if h < -1e-12 * dot(&lv, &lv).max(1.0) {
                return domain(format!("W(x) is not positive semidefinite: h = {h} along {v:?}"));
            }
        }
        Ok(())
    }
}

/// Settings of the bracketing radius solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoConfig {
    pub r_max: f64,
    pub tol: f64,
}

impl Default for RhoConfig {
    fn default() -> Self {
        Self { r_max: 1e6, tol: 1e-10 }
    }
}

/// `sup { t ≥ 0 : g(x, μ + t L v) ≤ 0 }` by doubling from `t = 1` and
/// bisection; `+∞` when the ray is still feasible at `r_max`.
pub fn rho_bisect(g: &ConstraintOracle, x: &[f64], v: &[f64], law: &EllipticalLaw, cfg: RhoConfig) -> Result<f64> {
    let g0 = g.eval(x, law.mean());
    if !(g0 < 0.0) {
        return Err(Error::RepresentationViolated { value: g0 });
    }
    let lv = law.scale_direction(v);
    let along = |t: f64| g.eval(x, &law.point_along(t, &lv));
    let (mut lo, mut hi) = (0.0, 1.0f64.min(cfg.r_max));
    loop {
        let val = along(hi);
        if val.is_nan() {
            return Err(Error::Evaluation(format!("g is undefined at radius {hi}")));
        }
        if val > 0.0 {
            break;
        }
        if hi >= cfg.r_max {
            return Ok(f64::INFINITY);
        }
        lo = hi;
        hi = (2.0 * hi).min(cfg.r_max);
    }
    if hi < cfg.r_max && along(cfg.r_max) <= 0.0 {
        return Err(Error::BracketFailure(format!(
            "g changes sign more than once along {v:?} (feasible again at r_max)"
        )));
    }
    while hi - lo > cfg.tol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if along(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form radius for a quadratic constraint. With a nonzero mean the
/// offset and slope are taken at `μ`.
pub fn rho_quadratic(spec: &QuadraticSpec, x: &[f64], v: &[f64], law: &EllipticalLaw) -> Result<f64> {
    let lv = law.scale_direction(v);
    let w = spec.w_at(x);
    let mu = law.mean();
    let b = spec.eval(x, mu);
    if !(b < 0.0) {
        return Err(Error::RepresentationViolated { value: b });
    }
    let h = quad_form(&w, &lv);
    if h < 0.0 {
        return domain(format!("negative curvature h = {h}: W(x) is not positive semidefinite"));
    }
    let beta = spec.slope(&lv) + dot(mu, &mat_vec(&w, &lv));
    Ok(quadratic_root(h, beta, b))
}

/// Positive root of `h t² + 2β t + b = 0` for `b < 0`, `h ≥ 0`.
pub fn quadratic_root(h: f64, beta: f64, b: f64) -> f64 {
    if h == 0.0 {
        return if beta > 0.0 { -b / (2.0 * beta) } else { f64::INFINITY };
    }
    let disc = (beta * beta - b * h).sqrt();
    if beta >= 0.0 {
        -b / (beta + disc)
    } else {
        (-beta + disc) / h
    }
}

/// The transform `g_v(t) = −(b/t + β(v))²` for a quadratic constraint
/// under a centred law.
pub fn gv_transform(spec: &QuadraticSpec, v: &[f64], law: &EllipticalLaw) -> Result<TransformG> {
    TransformG::gv(spec.offset(), spec.slope(&law.scale_direction(v)))
}

/// `φ(x)` by the spherical-radial formula, using the closed-form radius
/// when the oracle is quadratic.
pub fn phi(law: &EllipticalLaw, g: &ConstraintOracle, x: &[f64], pts: &SpherePointSet) -> Result<Estimate> {
    let g0 = g.eval(x, law.mean());
    if !(g0 < 0.0) {
        return Err(Error::RepresentationViolated { value: g0 });
    }
    match g.quadratic() {
        Some(spec) => probability(law, &|v| rho_quadratic(spec, x, v, law), pts),
        None => probability(law, &|v| rho_bisect(g, x, v, law, RhoConfig::default()), pts),
    }
}
