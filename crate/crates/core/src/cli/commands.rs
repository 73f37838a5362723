use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::spec::{
    catalog_function, CheckKind, HFunction, MarginalCertificate, Model, ProblemSpec, GRID_BOX_DEFAULT,
};
use super::{CliError, EXIT_NOT_2D, EXIT_PARSE};
use crate::concavity::{
    check_concave_ginv, check_g_concavity, check_outer_concave_ginv, g_decreasing_tstar, BoxSampler, CheckConfig,
    ConcavityReport, TransformG,
};
use crate::copulas::{check_copula_concave_ginv, copula_threshold, separable_prob, COPULA_SEGMENTS};
use crate::distributions::{Density, Marginal, SincSquared};
use crate::elliptical::{direct_mc_probability, EllipticalLaw, Estimate, Generator};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rho::{phi, rho_bisect, rho_quadratic, ConstraintOracle, RhoConfig};
use crate::special::std_normal_cdf;
use crate::thresholds::{eventual_threshold_for_law, gaussian_refined_threshold, quadratic_tstar, ThresholdReport};

/// Samples used when the spherical-radial formula does not apply.
pub const FALLBACK_MC_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbRecord {
    pub name: String,
    pub x: Vec<f64>,
    pub phi: f64,
    pub std_err: f64,
    pub n: usize,
    pub method: String,
}

fn check_x_dim(spec: &ProblemSpec, x: &[f64]) -> Result<()> {
    match spec.decision_dim() {
        Some(d) if d != x.len() => Err(Error::DimensionMismatch { expected: d, got: x.len() }),
        _ => Ok(()),
    }
}

pub fn prob_from_spec(spec: &ProblemSpec, x: &[f64], seed: u64) -> Result<ProbRecord> {
    check_x_dim(spec, x)?;
    let (est, method) = match spec.model {
        Model::EllipticalQuadratic | Model::EllipticalCustomCatalog => {
            let law = spec.elliptical_law()?;
            let g = spec.oracle(law.dim())?;
            let pts = spec.sphere_points(law.dim(), seed)?;
            (phi(&law, &g, x, &pts)?, "spherical_radial")
        }
        Model::SeparableCopula => {
            let (marginals, h, copula) = spec.separable_parts()?;
            let hv: Vec<f64> = h.iter().map(|f| f.eval(x)).collect();
            (Estimate { value: separable_prob(&hv, &marginals, &copula)?, std_err: 0.0, n: 1 }, "copula_closed_form")
        }
        Model::Certificate => return Err(Error::Domain("a certificate spec has no probability function".into())),
    };
    Ok(ProbRecord {
        name: spec.name.clone(),
        x: x.to_vec(),
        phi: est.value,
        std_err: est.std_err,
        n: est.n,
        method: method.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRecord {
    pub name: String,
    pub reports: Vec<ThresholdReport>,
    pub certificates: Vec<ConcavityReport>,
    pub comparison: Option<Comparison>,
}

/// `t*` with `F_R` concave-(−3) on `(0, t*^(−3)]`: `√(m+3)` for Gaussian
/// laws and `√(ν(m+3)/(ν−3))` for Student laws with `ν > 3`.
fn radial_tstar(law: &EllipticalLaw) -> Result<f64> {
    match law.generator() {
        Generator::Gaussian => quadratic_tstar(law),
        Generator::Student { nu } => {
            if nu <= 3.0 {
                return Err(Error::Certification(format!(
                    "student radial law with nu = {nu} has no concave-(-3) tail"
                )));
            }
            let m = law.dim() as f64;
            let t = (nu * (m + 3.0) / (nu - 3.0)).sqrt();
            let r = check_concave_ginv(
                &|r| law.radial_cdf(r),
                &TransformG::power(-3.0),
                Interval::left_open(0.0, t.powi(-3)),
                &CheckConfig::default(),
            )?;
            if !r.holds {
                return Err(Error::Certification(format!("radial cdf is not concave-(-3) on (0, {}]", t.powi(-3))));
            }
            Ok(t)
        }
    }
}

pub fn threshold_from_spec(spec: &ProblemSpec, _seed: u64) -> Result<ThresholdRecord> {
    match spec.model {
        Model::EllipticalQuadratic => {
            let law = spec.elliptical_law()?;
            let t = radial_tstar(&law)?;
            let mut reports = Vec::new();
            if law.generator() == Generator::Gaussian && spec.delta_nd == 1.0 {
                reports.push(gaussian_refined_threshold(law.dim())?);
            }
            if law.dim() >= 2 {
                reports.push(eventual_threshold_for_law(&law, t, spec.delta_nd, spec.p0)?);
            }
            Ok(ThresholdRecord { name: spec.name.clone(), reports, certificates: Vec::new(), comparison: None })
        }
        Model::EllipticalCustomCatalog => Err(Error::Certification(
            "no certified t* is available for catalog constraints".into(),
        )),
        Model::SeparableCopula => separable_threshold(spec),
        Model::Certificate => Err(Error::Domain("a certificate spec has no threshold".into())),
    }
}

/// Resolves `b` and the certified interval of a marginal declaration.
pub fn resolve_certificate(decl: &MarginalCertificate, marginal: &Marginal) -> Result<(f64, Interval, TransformG)> {
    let g = TransformG::from_key(&decl.transform)?;
    let (b, edge) = match (decl.b, decl.edge) {
        (Some(b), None) => (b, g.value(b)),
        (None, Some(edge)) => (g.inverse(edge), edge),
        _ => return Err(Error::Domain("a certificate needs exactly one of b and edge".into())),
    };
    let far = g.value(marginal.support().hi);
    let interval = if g.is_increasing() { Interval::right_open(edge, far) } else { Interval::left_open(far, edge) };
    Ok((b, interval, g))
}

pub fn separable_threshold(spec: &ProblemSpec) -> Result<ThresholdRecord> {
    let (marginals, _, _) = spec.separable_parts()?;
    let decl = spec
        .threshold
        .as_ref()
        .ok_or_else(|| Error::Domain("separable threshold needs a [threshold] section".into()))?;
    let mut b = Vec::new();
    let mut certificates = Vec::new();
    for (i, (c, f)) in decl.certificates.iter().zip(&marginals).enumerate() {
        let (bi, interval, g) = resolve_certificate(c, f)?;
        let cfg = CheckConfig::default();
        let report = match &c.outer {
            Some(outer) => check_outer_concave_ginv(&|t| f.cdf(t), &TransformG::from_key(outer)?, &g, interval, &cfg)?,
            None => check_concave_ginv(&|t| f.cdf(t), &g, interval, &cfg)?,
        };
        if !report.holds {
            return Err(Error::Certification(format!(
                "marginal {i}: F∘G⁻¹ is not concave on {interval} (worst violation {:e})",
                report.worst_violation
            )));
        }
        certificates.push(report);
        b.push(bi);
    }
    let report = copula_threshold(&marginals, &b)?;
    let comparison = decl
        .compare_normal_cdf_at
        .map(|t| Comparison { label: format!("Phi({t})"), value: std_normal_cdf(t) });
    Ok(ThresholdRecord { name: spec.name.clone(), reports: vec![report], certificates, comparison })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridOutput {
    pub grid: PathBuf,
    pub mask: PathBuf,
    pub rows: usize,
    pub phi_min: f64,
    pub phi_max: f64,
    pub mask_count: usize,
    pub fallback_points: usize,
    pub mask_radius: Option<f64>,
}

/// Decimal rendering with `sig` significant digits.
pub fn format_sig(v: f64, sig: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (sig as i64 - 1 - magnitude).max(0);
    if decimals > 40 {
        return format!("{:.*e}", sig - 1, v);
    }
    let s = format!("{:.*}", decimals as usize, v);
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" { "0".into() } else { t.into() }
    } else {
        s
    }
}

fn mask_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".mask");
    PathBuf::from(s)
}

enum GridModel {
    Elliptical { law: EllipticalLaw, g: ConstraintOracle, t_star: Option<f64> },
    Separable { marginals: Vec<Marginal>, h: Vec<HFunction>, copula: crate::copulas::Copula, b: Option<Vec<f64>> },
}

pub fn grid_from_spec(
    spec: &ProblemSpec,
    bbox: Option<[f64; 4]>,
    n: usize,
    seed: u64,
    out: &Path,
) -> std::result::Result<GridOutput, CliError> {
    if let Some(d) = spec.decision_dim() {
        if d != 2 {
            return Err(CliError::new(EXIT_NOT_2D, format!("grid needs a 2-D decision, spec has dimension {d}")));
        }
    }
    if spec.model == Model::Certificate {
        return Err(CliError::new(EXIT_PARSE, "a certificate spec has no probability function"));
    }
    let [a, b, c, d] = bbox.or(spec.grid_box).unwrap_or(GRID_BOX_DEFAULT);
    if !(a <= b && c <= d) || [a, b, c, d].iter().any(|v| !v.is_finite()) {
        return Err(CliError::new(EXIT_PARSE, format!("invalid box {a},{b},{c},{d}")));
    }
    if n == 0 {
        return Err(CliError::new(EXIT_PARSE, "--n must be at least 1"));
    }
    let model = match spec.model {
        Model::SeparableCopula => {
            let (marginals, h, copula) = spec.separable_parts()?;
            let b = match &spec.threshold {
                Some(t) => Some(
                    t.certificates
                        .iter()
                        .zip(&marginals)
                        .map(|(c, f)| resolve_certificate(c, f).map(|r| r.0))
                        .collect::<Result<Vec<_>>>()?,
                ),
                None => None,
            };
            GridModel::Separable { marginals, h, copula, b }
        }
        _ => {
            let law = spec.elliptical_law()?;
            let g = spec.oracle(law.dim())?;
            let t_star = match radial_tstar(&law) {
                Ok(t) => Some(t),
                Err(Error::Certification(_)) => None,
                Err(e) => return Err(e.into()),
            };
            GridModel::Elliptical { law, g, t_star }
        }
    };
    let pts = match &model {
        GridModel::Elliptical { law, .. } => Some(spec.sphere_points(law.dim(), seed)?),
        GridModel::Separable { .. } => None,
    };
    let axis = |lo: f64, hi: f64, i: usize| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };

    let mut grid_text = String::from("x1,x2,phi\n");
    let mut mask_text = String::from("x1,x2,mask\n");
    let (mut phi_min, mut phi_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut mask_count, mut fallback_points) = (0usize, 0usize);
    for i in 0..n {
        for j in 0..n {
            let x = [axis(a, b, i), axis(c, d, j)];
            let (value, inside) = match &model {
                GridModel::Elliptical { law, g, t_star } => {
                    let pts = pts.as_ref().expect("elliptical models have sphere points");
                    if g.eval(&x, law.mean()) < 0.0 {
                        let v = phi(law, g, &x, pts)?.value;
                        let inside = match t_star {
                            Some(t) => {
                                let mut ok = true;
                                for v in pts.points() {
                                    let r = match g.quadratic() {
                                        Some(q) => rho_quadratic(q, &x, v, law)?,
                                        None => rho_bisect(g, &x, v, law, RhoConfig::default())?,
                                    };
                                    if r < *t {
                                        ok = false;
                                        break;
                                    }
                                }
                                ok
                            }
                            None => false,
                        };
                        (v, inside)
                    } else {
                        fallback_points += 1;
                        let point_seed = seed ^ ((i * n + j) as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                        (direct_mc_probability(law, g, &x, FALLBACK_MC_SAMPLES, point_seed)?.value, false)
                    }
                }
                GridModel::Separable { marginals, h, copula, b } => {
                    let hv: Vec<f64> = h.iter().map(|f| f.eval(&x)).collect();
                    let v = separable_prob(&hv, marginals, copula)?;
                    let inside = b.as_ref().is_some_and(|b| hv.iter().zip(b).all(|(h, b)| h >= b));
                    (v, inside)
                }
            };
            phi_min = phi_min.min(value);
            phi_max = phi_max.max(value);
            mask_count += inside as usize;
            let (s1, s2) = (format_sig(x[0], 9), format_sig(x[1], 9));
            let _ = writeln!(grid_text, "{s1},{s2},{}", format_sig(value, 9));
            let _ = writeln!(mask_text, "{s1},{s2},{}", inside as u8);
        }
    }
    let mask = mask_path(out);
    for (path, text) in [(out, &grid_text), (mask.as_path(), &mask_text)] {
        std::fs::write(path, text)
            .map_err(|e| CliError::new(EXIT_PARSE, format!("cannot write {}: {e}", path.display())))?;
    }
    let mask_radius = match &model {
        GridModel::Elliptical { t_star, .. } => *t_star,
        GridModel::Separable { .. } => None,
    };
    Ok(GridOutput {
        grid: out.to_path_buf(),
        mask,
        rows: n * n,
        phi_min,
        phi_max,
        mask_count,
        fallback_points,
        mask_radius,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyOutcome {
    pub name: String,
    pub check: CheckKind,
    pub holds: bool,
    pub t_star: Option<f64>,
    pub report: Option<ConcavityReport>,
    pub detail: String,
}

fn need<T: Clone>(v: &Option<T>, what: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::Domain(format!("certificate needs `{what}`")))
}

pub fn certify_from_spec(
    spec: &ProblemSpec,
    check: Option<CheckKind>,
    n: Option<usize>,
    seed: u64,
) -> std::result::Result<CertifyOutcome, CliError> {
    let c = spec
        .certificate
        .as_ref()
        .ok_or_else(|| CliError::new(EXIT_PARSE, "spec has no [certificate] section"))?;
    let check = check.unwrap_or(c.check);
    let mut cfg = CheckConfig::default().with_seed(seed);
    if check == CheckKind::CopulaGinv {
        cfg = cfg.with_pairs(COPULA_SEGMENTS);
    }
    if let Some(n) = n.or(c.n) {
        cfg = cfg.with_pairs(n);
    }
    if let Some(tol) = c.tol {
        cfg = cfg.with_tol(tol);
    }
    let outcome = |holds: bool, t_star, report: Option<ConcavityReport>, detail: String| CertifyOutcome {
        name: spec.name.clone(),
        check,
        holds,
        t_star,
        report,
        detail,
    };
    let from_report = |r: ConcavityReport| {
        let detail = format!("worst violation {:e} (tolerance {:e})", r.worst_violation, r.tolerance);
        outcome(r.holds, None, Some(r), detail)
    };
    match check {
        CheckKind::Tstar => {
            let g = TransformG::from_key(&need(&c.transform, "transform")?)?;
            let [lo, hi] = need(&c.bracket, "bracket")?;
            let density: Box<dyn Density> = match (&c.marginal, c.density.as_deref()) {
                (Some(m), None) => Box::new(*m),
                (None, Some("sinc-squared")) => Box::new(SincSquared),
                (None, Some(other)) => return Err(CliError::new(EXIT_PARSE, format!("unknown density {other:?}"))),
                _ => return Err(CliError::new(EXIT_PARSE, "tstar needs exactly one of `marginal` and `density`")),
            };
            match g_decreasing_tstar(density.as_ref(), &g, (lo, hi)) {
                Ok(t) => Ok(outcome(true, Some(t), None, format!("t* = {t}"))),
                Err(e @ (Error::NoSignChange { .. }
                | Error::Oscillation { .. }
                | Error::Certification(_)
                | Error::CriticalPoint { .. })) => Ok(outcome(false, None, None, e.to_string())),
                Err(e) => Err(e.into()),
            }
        }
        CheckKind::GConcavity => {
            let (dim, f) = catalog_function(&need(&c.function, "function")?)?;
            let g = TransformG::from_key(&need(&c.transform, "transform")?)?;
            let region = need(&c.region, "region")?;
            if region.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: region.len() }.into());
            }
            let sampler = BoxSampler::new(&region)?;
            Ok(from_report(check_g_concavity(f.as_ref(), &g, &sampler, &cfg)?))
        }
        CheckKind::ConcaveGinv => {
            let m = need(&c.marginal, "marginal")?;
            let g = TransformG::from_key(&need(&c.transform, "transform")?)?;
            let interval = need(&c.interval, "interval")?;
            let r = match &c.outer {
                Some(outer) => check_outer_concave_ginv(&|t| m.cdf(t), &TransformG::from_key(outer)?, &g, interval, &cfg)?,
                None => check_concave_ginv(&|t| m.cdf(t), &g, interval, &cfg)?,
            };
            Ok(from_report(r))
        }
        CheckKind::CopulaGinv => {
            let copula = spec.copula.ok_or_else(|| CliError::new(EXIT_PARSE, "copula_ginv needs a [copula] section"))?;
            let transforms = need(&c.transforms, "transforms")?
                .iter()
                .map(|k| TransformG::from_key(k))
                .collect::<Result<Vec<_>>>()?;
            let region = need(&c.region, "region")?;
            Ok(from_report(check_copula_concave_ginv(&copula, &transforms, &region, &cfg)?))
        }
    }
}
