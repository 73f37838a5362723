use serde::{Deserialize, Serialize};

use crate::concavity::TransformG;
use crate::copulas::Copula;
use crate::distributions::Marginal;
use crate::elliptical::{EllipticalLaw, Generator, SpherePointSet, SphereScheme};
use crate::error::{domain, Error, Result};
use crate::interval::Interval;
use crate::linalg::{dot, Matrix};
use crate::rho::{ConstraintOracle, QuadraticSpec, WForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    EllipticalQuadratic,
    EllipticalCustomCatalog,
    SeparableCopula,
    Certificate,
}

/// A problem description read from a TOML document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: String,
    pub model: Model,
    #[serde(default)]
    pub law: Option<LawSpec>,
    #[serde(default)]
    pub constraint: Option<ConstraintSpec>,
    #[serde(default)]
    pub copula: Option<Copula>,
    #[serde(default = "one")]
    pub delta_nd: f64,
    #[serde(default = "half")]
    pub p0: f64,
    #[serde(default)]
    pub integration: IntegrationSpec,
    /// Default box `[x_min, x_max, y_min, y_max]` for `grid`.
    #[serde(default)]
    pub grid_box: Option<[f64; 4]>,
    #[serde(default)]
    pub threshold: Option<ThresholdSpec>,
    #[serde(default)]
    pub certificate: Option<CertificateSpec>,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSpec {
    pub mean: Option<Vec<f64>>,
    pub cov: Option<Matrix>,
    pub generator: Option<Generator>,
    pub marginals: Option<Vec<Marginal>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum WSpec {
    Constant { matrix: Matrix },
    Linear { matrices: Vec<Matrix> },
    CurvedDiagonal,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    /// Quadratic constraint.
    pub w: Option<WSpec>,
    pub linear_row: Option<Vec<f64>>,
    pub offset: Option<f64>,
    /// Catalog constraint for `elliptical_custom_catalog`.
    pub key: Option<String>,
    #[serde(default)]
    pub params: Vec<f64>,
    /// Functions `h_i` for `separable_copula`.
    pub h: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSpec {
    #[serde(default = "default_scheme")]
    pub scheme: SchemeKind,
    pub n: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for IntegrationSpec {
    fn default() -> Self {
        Self { scheme: SchemeKind::Auto, n: None, seed: default_seed() }
    }
}

fn default_scheme() -> SchemeKind {
    SchemeKind::Auto
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Auto,
    #[serde(rename = "equal_angle_2d")]
    EqualAngle2d,
    MonteCarlo,
}

/// Per-marginal concavity declarations for the copula threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSpec {
    pub certificates: Vec<MarginalCertificate>,
    /// A normal-cdf argument printed as a comparison value.
    pub compare_normal_cdf_at: Option<f64>,
}

/// `F ∘ G⁻¹` (or `outer ∘ F ∘ G⁻¹`) is claimed concave on the image of
/// `[b, ∞)` under `G`; exactly one of `b` and `edge` (the image of `b`)
/// is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalCertificate {
    pub transform: String,
    pub outer: Option<String>,
    pub b: Option<f64>,
    pub edge: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum CheckKind {
    GConcavity,
    ConcaveGinv,
    CopulaGinv,
    Tstar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateSpec {
    pub check: CheckKind,
    /// Function key for `g_concavity`.
    pub function: Option<String>,
    /// Density key for `tstar` when no marginal is given.
    pub density: Option<String>,
    pub marginal: Option<Marginal>,
    pub transform: Option<String>,
    pub outer: Option<String>,
    pub transforms: Option<Vec<String>>,
    pub interval: Option<Interval>,
    pub region: Option<Vec<Interval>>,
    pub bracket: Option<[f64; 2]>,
    pub n: Option<usize>,
    pub tol: Option<f64>,
}

pub const GRID_BOX_DEFAULT: [f64; 4] = [-2.0, 2.0, -1.0, 3.0];

impl ProblemSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Domain(format!("spec parse error: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_nd >= 1.0) {
            return domain(format!("delta_nd must be >= 1, got {}", self.delta_nd));
        }
        if !(0.5..=1.0).contains(&self.p0) {
            return domain(format!("p0 must lie in [1/2, 1], got {}", self.p0));
        }
        match self.model {
            Model::EllipticalQuadratic | Model::EllipticalCustomCatalog => {
                let law = self.elliptical_law()?;
                self.oracle(law.dim())?;
            }
            Model::SeparableCopula => {
                self.separable_parts()?;
            }
            Model::Certificate => {
                if self.certificate.is_none() {
                    return domain("model certificate needs a [certificate] section");
                }
            }
        }
        Ok(())
    }

    pub fn elliptical_law(&self) -> Result<EllipticalLaw> {
        let law = self.law.as_ref().ok_or_else(|| Error::Domain("missing [law]".into()))?;
        let cov = law.cov.clone().ok_or_else(|| Error::Domain("law.cov is required".into()))?;
        let mean = law.mean.clone().unwrap_or_else(|| vec![0.0; cov.len()]);
        EllipticalLaw::new(mean, cov, law.generator.unwrap_or(Generator::Gaussian))
    }

    /// The constraint oracle of an elliptical model for a law of dimension `m`.
    pub fn oracle(&self, m: usize) -> Result<ConstraintOracle> {
        let c = self.constraint.as_ref().ok_or_else(|| Error::Domain("missing [constraint]".into()))?;
        match self.model {
            Model::EllipticalQuadratic => {
                let w = match c.w.clone().ok_or_else(|| Error::Domain("constraint.w is required".into()))? {
                    WSpec::Constant { matrix } => WForm::Constant(matrix),
                    WSpec::Linear { matrices } => WForm::Linear(matrices),
                    WSpec::CurvedDiagonal => WForm::CurvedDiagonal,
                };
                let row = c.linear_row.clone().unwrap_or_else(|| vec![0.0; m]);
                if row.len() != m {
                    return Err(Error::DimensionMismatch { expected: m, got: row.len() });
                }
                let offset = c.offset.ok_or_else(|| Error::Domain("constraint.offset is required".into()))?;
                Ok(ConstraintOracle::from_quadratic(self.name.clone(), QuadraticSpec::new(w, row, offset)?))
            }
            Model::EllipticalCustomCatalog => {
                let key = c.key.as_deref().ok_or_else(|| Error::Domain("constraint.key is required".into()))?;
                catalog_constraint(key, &c.params, m)
            }
            _ => domain("model has no elliptical constraint"),
        }
    }

    /// Marginals, `h` functions and copula of a separable model.
    pub fn separable_parts(&self) -> Result<(Vec<Marginal>, Vec<HFunction>, Copula)> {
        let marginals = self
            .law
            .as_ref()
            .and_then(|l| l.marginals.clone())
            .ok_or_else(|| Error::Domain("law.marginals is required".into()))?;
        for m in &marginals {
            m.validate()?;
        }
        let keys = self
            .constraint
            .as_ref()
            .and_then(|c| c.h.clone())
            .ok_or_else(|| Error::Domain("constraint.h is required".into()))?;
        let h = keys.iter().map(|k| HFunction::from_key(k)).collect::<Result<Vec<_>>>()?;
        let copula = self.copula.ok_or_else(|| Error::Domain("missing [copula]".into()))?;
        copula.validate()?;
        if marginals.len() != copula.dim() {
            return Err(Error::DimensionMismatch { expected: copula.dim(), got: marginals.len() });
        }
        if h.len() != marginals.len() {
            return Err(Error::DimensionMismatch { expected: marginals.len(), got: h.len() });
        }
        if let Some(t) = &self.threshold {
            if t.certificates.len() != marginals.len() {
                return Err(Error::DimensionMismatch { expected: marginals.len(), got: t.certificates.len() });
            }
        }
        Ok((marginals, h, copula))
    }

    pub fn sphere_points(&self, m: usize, seed: u64) -> Result<SpherePointSet> {
        let i = &self.integration;
        match (i.scheme, i.n) {
            (SchemeKind::Auto, None) => SpherePointSet::default_for(m, seed),
            (SchemeKind::Auto, Some(n)) if m == 2 => SpherePointSet::new(2, n, SphereScheme::EqualAngle2d),
            (SchemeKind::Auto, Some(n)) | (SchemeKind::MonteCarlo, Some(n)) => {
                SpherePointSet::new(m, n, SphereScheme::MonteCarlo { seed })
            }
            (SchemeKind::MonteCarlo, None) => {
                SpherePointSet::new(m, crate::elliptical::DEFAULT_MC_POINTS, SphereScheme::MonteCarlo { seed })
            }
            (SchemeKind::EqualAngle2d, n) => {
                SpherePointSet::new(m, n.unwrap_or(crate::elliptical::DEFAULT_ANGLES_2D), SphereScheme::EqualAngle2d)
            }
        }
    }

    /// Decision dimension, when the model fixes one.
    pub fn decision_dim(&self) -> Option<usize> {
        match self.model {
            Model::SeparableCopula => self.separable_parts().ok().map(|(_, h, _)| h.iter().map(|f| f.dim()).max().unwrap_or(0)),
            Model::EllipticalQuadratic => match self.constraint.as_ref()?.w.as_ref()? {
                WSpec::CurvedDiagonal => Some(2),
                WSpec::Linear { matrices } => Some(matrices.len()),
                WSpec::Constant { .. } => None,
            },
            Model::EllipticalCustomCatalog => match self.constraint.as_ref()?.key.as_deref()? {
                "half-space" => Some(1),
                _ => None,
            },
            Model::Certificate => None,
        }
    }
}

/// Constraint stubs available to `elliptical_custom_catalog` models.
///
/// | key | g(x, z) |
/// |---|---|
/// | always-feasible | −1 |
/// | constant-infeasible | 1 |
/// | unit-ball | ‖z‖² − r², r = params[0] (default 1) |
/// | half-space | aᵀz − x₁ with a = params |
pub fn catalog_constraint(key: &str, params: &[f64], m: usize) -> Result<ConstraintOracle> {
    match key {
        "always-feasible" => Ok(ConstraintOracle::new(key, true, |_: &[f64], _: &[f64]| -1.0)),
        "constant-infeasible" => Ok(ConstraintOracle::new(key, true, |_: &[f64], _: &[f64]| 1.0)),
        "unit-ball" => {
            let r = params.first().copied().unwrap_or(1.0);
            if !(r > 0.0) {
                return domain("unit-ball radius must be positive");
            }
            Ok(ConstraintOracle::new(key, true, move |_: &[f64], z: &[f64]| dot(z, z) - r * r))
        }
        "half-space" => {
            if params.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: params.len() });
            }
            let a = params.to_vec();
            Ok(ConstraintOracle::new(key, true, move |x: &[f64], z: &[f64]| {
                dot(&a, z) - x.first().copied().unwrap_or(0.0)
            }))
        }
        other => domain(format!("unknown constraint key {other:?}")),
    }
}

/// Inner functions `h_i(x, y)` of separable models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HFunction {
    /// `(y/x²)²`
    PowRatio,
    /// `exp(−(x+y)³)`
    NegExpCube,
    /// `1/(x² + y² + 1)`
    InvQuadratic,
}

impl HFunction {
    pub fn from_key(key: &str) -> Result<Self> {
        match key {
            "pow-ratio" => Ok(Self::PowRatio),
            "neg-exp-cube" => Ok(Self::NegExpCube),
            "inv-quadratic" => Ok(Self::InvQuadratic),
            other => domain(format!("unknown h function {other:?}")),
        }
    }

    pub fn dim(&self) -> usize {
        2
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::PowRatio => (x[1] / (x[0] * x[0])).powi(2),
            Self::NegExpCube => (-(x[0] + x[1]).powi(3)).exp(),
            Self::InvQuadratic => 1.0 / (x[0] * x[0] + x[1] * x[1] + 1.0),
        }
    }

    /// The transform under which `h` is generalized concave.
    pub fn transform(&self) -> TransformG {
        match self {
            Self::PowRatio => TransformG::neg_inv_sqrt(),
            Self::NegExpCube => TransformG::exp_neg_cbrt_log(),
            Self::InvQuadratic => TransformG::power(-1.0),
        }
    }
}

/// Scalar functions known to `certify g_concavity`.
pub type VectorFn = Box<dyn Fn(&[f64]) -> f64>;

pub fn catalog_function(key: &str) -> Result<(usize, VectorFn)> {
    match key {
        "exp-neg-cube" => Ok((1, Box::new(|x: &[f64]| (-x[0].powi(3)).exp()))),
        "pow-ratio" | "neg-exp-cube" | "inv-quadratic" => {
            let h = HFunction::from_key(key)?;
            Ok((2, Box::new(move |x: &[f64]| h.eval(x))))
        }
        other => domain(format!("unknown function {other:?}")),
    }
}

/// Builtin spec documents, addressable by name wherever a path is accepted.
pub const CATALOG: &[(&str, &str)] = &[
    ("paper-quadratic-2d", include_str!("../../specs/paper-quadratic-2d.toml")),
    ("zadeh-khorram-ex1", include_str!("../../specs/zadeh-khorram-ex1.toml")),
    ("zadeh-khorram-ex1-g0", include_str!("../../specs/zadeh-khorram-ex1-g0.toml")),
    ("always-feasible", include_str!("../../specs/always-feasible.toml")),
    ("constant-infeasible", include_str!("../../specs/constant-infeasible.toml")),
    ("unit-ball", include_str!("../../specs/unit-ball.toml")),
    ("half-space", include_str!("../../specs/half-space.toml")),
    ("student-unit-ball", include_str!("../../specs/student-unit-ball.toml")),
    ("certify-tstar-normal", include_str!("../../specs/certify-tstar-normal.toml")),
    ("certify-tstar-sinc", include_str!("../../specs/certify-tstar-sinc.toml")),
    ("certify-chi2-ginv", include_str!("../../specs/certify-chi2-ginv.toml")),
    ("certify-exp-neg-cube-alpha", include_str!("../../specs/certify-exp-neg-cube-alpha.toml")),
    ("certify-exp-neg-cube", include_str!("../../specs/certify-exp-neg-cube.toml")),
    ("certify-pow-ratio", include_str!("../../specs/certify-pow-ratio.toml")),
    ("certify-clayton", include_str!("../../specs/certify-clayton.toml")),
];

pub fn catalog_text(name: &str) -> Option<&'static str> {
    CATALOG.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn catalog_spec(name: &str) -> Result<ProblemSpec> {
    ProblemSpec::parse(catalog_text(name).ok_or_else(|| Error::Domain(format!("unknown catalog entry {name:?}")))?)
}

/// Reads a spec from a file, falling back to the builtin catalog by name.
pub fn load_spec(path_or_name: &str) -> Result<ProblemSpec> {
    match std::fs::read_to_string(path_or_name) {
        Ok(text) => ProblemSpec::parse(&text),
        Err(_) => match catalog_text(path_or_name) {
            Some(text) => ProblemSpec::parse(text),
            None => domain(format!("no spec file or catalog entry named {path_or_name:?}")),
        },
    }
}
