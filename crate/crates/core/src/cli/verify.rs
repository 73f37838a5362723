//! The reproduction suite behind `certctl verify`.
//!
//! Numeric rows pass when `|computed − expected| ≤ tolerance`. Certificate
//! rows encode outcomes as 1 (holds) and 0 (fails) with tolerance 0.

use std::fmt::Write as _;

use serde::Serialize;

use super::commands::{certify_from_spec, separable_threshold, threshold_from_spec};
use super::spec::{catalog_spec, ProblemSpec};
use crate::concavity::{g_decreasing_tstar, TransformG};
use crate::copulas::copula_threshold;
use crate::distributions::{Marginal, SincSquared};
use crate::numeric::bisect;
use crate::special::std_normal_cdf;
use crate::thresholds::Route;

pub const REFERENCE_TOL: f64 = 5e-5;
pub const TSTAR_TOL: f64 = 1e-3;
pub const CHI_TSTAR_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub quadratic: ProblemSpec,
    pub ex1: ProblemSpec,
    pub ex1_g0: ProblemSpec,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        let load = |name: &str| catalog_spec(name).expect("catalog entries parse");
        Self { quadratic: load("paper-quadratic-2d"), ex1: load("zadeh-khorram-ex1"), ex1_g0: load("zadeh-khorram-ex1-g0") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyRow {
    pub id: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

impl VerifyRow {
    fn numeric(id: impl Into<String>, expected: f64, computed: f64, tolerance: f64) -> Self {
        Self {
            id: id.into(),
            expected,
            computed,
            tolerance,
            pass: (computed - expected).abs() <= tolerance,
            note: String::new(),
        }
    }

    fn outcome(id: impl Into<String>, expect_holds: bool, holds: bool) -> Self {
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        Self::numeric(id, flag(expect_holds), flag(holds), 0.0)
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

fn value_or_nan<E: std::fmt::Display>(r: Result<f64, E>) -> (f64, String) {
    match r {
        Ok(v) => (v, String::new()),
        Err(e) => (f64::NAN, e.to_string()),
    }
}

fn certificate_holds(name: &str) -> (bool, String) {
    let spec = match catalog_spec(name) {
        Ok(s) => s,
        Err(e) => return (false, e.to_string()),
    };
    match certify_from_spec(&spec, None, None, spec.integration.seed) {
        Ok(o) => (o.holds, o.detail),
        Err(e) => (false, e.message),
    }
}

pub fn run_suite(opts: &VerifyOptions) -> Vec<VerifyRow> {
    let mut rows = Vec::new();

    let (refined, note) = value_or_nan(threshold_from_spec(&opts.quadratic, opts.quadratic.integration.seed).map(|r| {
        r.reports.iter().find(|t| t.route == Route::GaussianRefined).map_or(f64::NAN, |t| t.p_star)
    }));
    rows.push(VerifyRow::numeric("quadratic refined p* = Phi(sqrt 5)", 0.9873, refined, REFERENCE_TOL).note(note));

    let rayleigh = Marginal::Rayleigh { scale: 1.5 };
    let alphas = [-6.0, -3.0, -1.0];
    let rayleigh_b = |a: f64| ((1.0 - a / 2.0) * 1.5).sqrt();
    for rate in [0.5, 1.0, 2.0] {
        let marginals = [Marginal::Exponential { rate }, rayleigh];
        let (p, note) = value_or_nan(copula_threshold(&marginals, &[1.5 / rate, rayleigh_b(-6.0)]).map(|r| r.p_star));
        rows.push(VerifyRow::numeric(format!("exponential/rayleigh p* (rate {rate})"), 0.7769, p, REFERENCE_TOL).note(note));
    }
    let (best_alpha, best) = alphas
        .iter()
        .map(|&a| (a, rayleigh.cdf(rayleigh_b(a))))
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, (a, v)| if v > acc.1 { (a, v) } else { acc });
    rows.push(VerifyRow::numeric("rayleigh bound max", 0.7364, best, REFERENCE_TOL));
    rows.push(VerifyRow::numeric("rayleigh bound argmax alpha", -6.0, best_alpha, 0.0));

    let chi_marginal = |spec: &ProblemSpec| spec.separable_parts().map(|(m, _, _)| m[1]);
    let (f, note) = value_or_nan(chi_marginal(&opts.ex1).map(|m| m.cdf(3f64.sqrt())));
    rows.push(VerifyRow::numeric("ex1 F_chi(sqrt 3)", 0.7769, f, REFERENCE_TOL).note(note));
    let (p, note) = value_or_nan(separable_threshold(&opts.ex1).map(|r| r.reports[0].p_star));
    rows.push(VerifyRow::numeric("ex1 p*", 0.9686, p, REFERENCE_TOL).note(note));

    let (f, note) = value_or_nan(chi_marginal(&opts.ex1_g0).map(|m| m.cdf(1.3223)));
    rows.push(VerifyRow::numeric("ex1-g0 F_chi(1.3223)", 0.5828, f, REFERENCE_TOL).note(note));
    let g0 = separable_threshold(&opts.ex1_g0);
    let (p, note) = value_or_nan(g0.as_ref().map(|r| r.reports[0].p_star).map_err(|e| e.to_string()));
    rows.push(VerifyRow::numeric("ex1-g0 p*", 0.9497, p, REFERENCE_TOL).note(note));
    let cmp = g0.ok().and_then(|r| r.comparison).map_or(f64::NAN, |c| c.value);
    rows.push(VerifyRow::numeric("ex1-g0 comparison Phi(3)", 0.9987, cmp, REFERENCE_TOL));
    rows.push(VerifyRow::numeric("Phi(3)", 0.9987, std_normal_cdf(3.0), REFERENCE_TOL));

    let normal_tstar = catalog_spec("certify-tstar-normal")
        .map_err(|e| e.to_string())
        .and_then(|s| certify_from_spec(&s, None, None, s.integration.seed).map_err(|e| e.message))
        .and_then(|o| o.t_star.ok_or(o.detail));
    let (t, note) = value_or_nan(normal_tstar);
    rows.push(
        VerifyRow::numeric("t* normal density, exp-neg-cbrt-log", 1.8528, t, TSTAR_TOL)
            .note(if note.is_empty() { "exact root of the ratio derivative".to_string() } else { note }),
    );
    let surrogate = bisect(|x: f64| (x * x - 1.0) * x.ln() - 1.5, 1.1, 3.0, 1e-12);
    let (s, note) = value_or_nan(surrogate);
    rows.push(
        VerifyRow::numeric("root of (x^2-1) ln x - 3/2", 1.8528, s, TSTAR_TOL)
            .note(if note.is_empty() { "diagnostic".to_string() } else { note }),
    );

    for m in [2u32, 3, 5] {
        for alpha in [-1.0, -3.0] {
            let chi = Marginal::Chi { dof: m };
            let (t, note) = value_or_nan(g_decreasing_tstar(&chi, &TransformG::power(alpha), (0.5, 10.0)));
            let expected = (m as f64 - alpha).sqrt();
            rows.push(VerifyRow::numeric(format!("t* chi({m}), power {alpha}"), expected, t, CHI_TSTAR_TOL).note(note));
        }
    }

    for (name, expect) in [
        ("certify-chi2-ginv", true),
        ("certify-exp-neg-cube", true),
        ("certify-exp-neg-cube-alpha", false),
    ] {
        let (holds, detail) = certificate_holds(name);
        rows.push(VerifyRow::outcome(format!("certificate {name}"), expect, holds).note(detail));
    }
    for alpha in [-0.5, -1.0, -3.0] {
        let r = g_decreasing_tstar(&SincSquared, &TransformG::power(alpha), (1.0, 100.0));
        let note = match &r {
            Ok(t) => format!("unexpected t* = {t}"),
            Err(e) => e.to_string(),
        };
        rows.push(VerifyRow::outcome(format!("sinc-squared t*, power {alpha}"), false, r.is_ok()).note(note));
    }
    rows
}

pub fn render_table(rows: &[VerifyRow]) -> String {
    let width = rows.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>12}  {:>12}  {:>9}  status", "id", "expected", "computed", "tolerance");
    for r in rows {
        let _ = write!(
            out,
            "{:<width$}  {:>12.6}  {:>12.6}  {:>9.1e}  {}",
            r.id,
            r.expected,
            r.computed,
            r.tolerance,
            if r.pass { "PASS" } else { "FAIL" }
        );
        if !r.note.is_empty() {
            let _ = write!(out, "  ({})", r.note);
        }
        out.push('\n');
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    let _ = write!(out, "{passed}/{} passed", rows.len());
    out
}
