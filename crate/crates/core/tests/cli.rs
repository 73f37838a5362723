use std::path::Path;
use std::process::Command;

use eventual_convexity::cli::{
    catalog_spec, prob_from_spec, run, run_suite, CliError, ProblemSpec, VerifyOptions, EXIT_CERTIFICATE,
    EXIT_NOT_2D, EXIT_OK, EXIT_PARSE, EXIT_REPRESENTATION, EXIT_VERIFY_FAILED,
};
use eventual_convexity::elliptical::direct_mc_probability;

fn certctl(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["certctl"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_spec(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const QUADRATIC: &str = r#"
name = "quadratic"
model = "elliptical_quadratic"

[law]
mean = [0.0, 0.0]
cov = [[1.0, 0.0], [0.0, 1.0]]

[constraint]
w = { form = "curved_diagonal" }
linear_row = [1.0, 1.0]
offset = -1.0
"#;

const MC_HALF_SPACE: &str = r#"
name = "mc-half-space"
model = "elliptical_custom_catalog"

[law]
cov = [[2.0, 0.3], [0.3, 0.5]]

[constraint]
key = "half-space"
params = [1.0, -2.0]

[integration]
scheme = "monte_carlo"
n = 500
seed = 1
"#;

#[test]
fn prob_success_is_quiet_on_stderr() {
    let (code, out, err) = certctl(&["prob", "--spec", "paper-quadratic-2d", "--x", "1,1"]);
    assert_eq!(code, EXIT_OK);
    assert!(err.is_empty());
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let phi = v["phi"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&phi));
}

#[test]
fn prob_agrees_with_direct_sampling() {
    let spec = catalog_spec("paper-quadratic-2d").unwrap();
    let rec = prob_from_spec(&spec, &[1.0, 1.0], 1).unwrap();
    let law = spec.elliptical_law().unwrap();
    let mc = direct_mc_probability(&law, &spec.oracle(2).unwrap(), &[1.0, 1.0], 100_000, 17).unwrap();
    let se = rec.std_err.hypot(mc.std_err);
    assert!((rec.phi - mc.value).abs() <= 3.0 * se, "{} vs {} (se {se})", rec.phi, mc.value);
}

#[test]
fn degenerate_catalog_stubs() {
    let (code, out, _) = certctl(&["prob", "--spec", "always-feasible", "--x", "0.3"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["phi"].as_f64(), Some(1.0));
}

#[test]
fn representation_violation_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let shifted = QUADRATIC.replace("mean = [0.0, 0.0]", "mean = [1.0, 1.0]");
    let spec = write_spec(dir.path(), "shifted.toml", &shifted);
    let (code, out, err) = certctl(&["prob", "--spec", &spec, "--x", "0,0"]);
    assert_eq!(code, EXIT_REPRESENTATION);
    assert!(out.is_empty());
    assert!(err.contains("g(x"), "{err}");
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let typo = write_spec(dir.path(), "typo.toml", &QUADRATIC.replace("offset", "ofset"));
    assert_eq!(certctl(&["prob", "--spec", &typo, "--x", "0,0"]).0, EXIT_PARSE);
    assert_eq!(certctl(&["prob", "--spec", "no-such-spec", "--x", "0"]).0, EXIT_PARSE);
    assert_eq!(certctl(&["prob", "--spec", "paper-quadratic-2d", "--x", "1,a"]).0, EXIT_PARSE);
    assert_eq!(certctl(&["prob", "--spec", "paper-quadratic-2d", "--x", "1,2,3"]).0, EXIT_PARSE);
    assert_eq!(certctl(&["grid", "--spec", "paper-quadratic-2d", "--box", "0,1,2"]).0, EXIT_PARSE);
    assert_eq!(certctl(&["frobnicate"]).0, EXIT_PARSE);
    assert_eq!(certctl(&["prob", "--spec", "certify-clayton", "--x", "0"]).0, EXIT_PARSE);
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, err) = certctl(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verify") && err.is_empty());
}

#[test]
fn thresholds_from_catalog() {
    let (code, out, err) = certctl(&["threshold", "--spec", "paper-quadratic-2d"]);
    assert_eq!((code, err.as_str()), (EXIT_OK, ""));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let p = v["reports"][0]["p_star"].as_f64().unwrap();
    assert!((p - 0.9873).abs() <= 5e-5);
    let q_route = v["reports"][1]["p_star"].as_f64().unwrap();
    assert!(q_route >= p);

    let (code, out, _) = certctl(&["threshold", "--spec", "zadeh-khorram-ex1"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["reports"][0]["p_star"].as_f64().unwrap() - 0.9686).abs() <= 5e-5);

    let (code, out, _) = certctl(&["threshold", "--spec", "zadeh-khorram-ex1-g0"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["reports"][0]["p_star"].as_f64().unwrap() - 0.9497).abs() <= 5e-5);
    assert!((v["comparison"]["value"].as_f64().unwrap() - 0.9987).abs() <= 5e-5);
}

#[test]
fn failing_certificates_exit_4() {
    let (code, out, err) = certctl(&["certify", "--spec", "certify-tstar-sinc"]);
    assert_eq!(code, EXIT_CERTIFICATE);
    assert!(out.contains("\"holds\": false") && !err.is_empty());
    let (code, out, _) = certctl(&["certify", "--spec", "certify-exp-neg-cube-alpha"]);
    assert_eq!(code, EXIT_CERTIFICATE);
    assert!(out.contains("witness"));
    assert_eq!(certctl(&["threshold", "--spec", "unit-ball"]).0, EXIT_CERTIFICATE);
}

#[test]
fn holding_certificates_exit_0() {
    for name in ["certify-chi2-ginv", "certify-exp-neg-cube", "certify-pow-ratio", "certify-clayton"] {
        let (code, out, err) = certctl(&["certify", "--spec", name]);
        assert_eq!(code, EXIT_OK, "{name}: {err}");
        assert!(out.contains("\"holds\": true") && err.is_empty());
    }
}

#[test]
fn certify_normal_tstar_value() {
    let (code, out, _) = certctl(&["certify", "--spec", "certify-tstar-normal"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let t = v["t_star"].as_f64().unwrap();
    assert!((t - 1.8528).abs() <= 1e-3, "t* = {t}");
}

#[test]
fn grid_single_cell() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cell.csv");
    let (code, _, err) = certctl(&[
        "grid", "--spec", "paper-quadratic-2d", "--box", "-0.5,0.5,0,1", "--n", "2", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!((code, err.as_str()), (EXIT_OK, ""));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x1,x2,phi");
    assert_eq!(lines.len(), 5);
    for l in &lines[1..] {
        let phi: f64 = l.split(',').nth(2).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&phi));
    }
    let mask = std::fs::read_to_string(dir.path().join("cell.csv.mask")).unwrap();
    assert!(mask.starts_with("x1,x2,mask\n"));
    assert_eq!(mask.lines().count(), 5);
}

#[test]
fn grid_constant_infeasible_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zero.csv");
    let (code, _, _) = certctl(&["grid", "--spec", "constant-infeasible", "--n", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn grid_rejects_non_2d() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let (code, _, _) = certctl(&["grid", "--spec", "half-space", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_NOT_2D);
    assert!(!out.exists());
}

#[test]
fn grid_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let text = QUADRATIC.to_string() + "\n[integration]\nscheme = \"monte_carlo\"\nn = 300\nseed = 5\n";
    let spec = write_spec(dir.path(), "mc.toml", &text);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        assert_eq!(certctl(&["grid", "--spec", &spec, "--n", "5", "--out", p.to_str().unwrap()]).0, EXIT_OK);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(std::fs::read(dir.path().join("a.csv.mask")).unwrap(), std::fs::read(dir.path().join("b.csv.mask")).unwrap());
}

#[test]
fn seed_precedence_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "mc.toml", MC_HALF_SPACE);
    let exe = env!("CARGO_BIN_EXE_certctl");
    let prob = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(exe);
        cmd.args(["prob", "--spec", &spec, "--x", "0.7"]).env_remove("CERTCTL_SEED");
        if let Some(e) = env {
            cmd.env("CERTCTL_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        let o = cmd.output().unwrap();
        assert!(o.status.success());
        assert!(o.stderr.is_empty());
        String::from_utf8(o.stdout).unwrap()
    };
    let spec_seed = prob(None, None);
    assert_eq!(spec_seed, prob(None, None));
    assert_eq!(spec_seed, prob(Some("1"), None));
    let env_seed = prob(Some("77"), None);
    assert_ne!(spec_seed, env_seed);
    assert_eq!(env_seed, prob(None, Some("77")));
    assert_eq!(spec_seed, prob(Some("77"), Some("1")));

    let bad = Command::new(exe)
        .args(["prob", "--spec", &spec, "--x", "0.7"])
        .env("CERTCTL_SEED", "seven")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_PARSE));
}

#[test]
fn out_flag_writes_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let (code, stdout, _) = certctl(&["threshold", "--spec", "paper-quadratic-2d", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(stdout.is_empty());
    assert!(std::fs::read_to_string(out).unwrap().contains("gaussian_refined"));
}

#[test]
fn verify_suite_has_enough_assertions() {
    let rows = run_suite(&VerifyOptions::default());
    assert!(rows.len() >= 12);
    let ids: std::collections::HashSet<_> = rows.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(ids.len(), rows.len());
}

#[test]
fn verify_suite_exits_zero() {
    let (code, out, err) = certctl(&["verify"]);
    assert!(err.is_empty());
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn verify_exit_code_tracks_rows() {
    let (code, out, _) = certctl(&["verify"]);
    let any_fail = out.lines().any(|l| l.contains(" FAIL"));
    assert_eq!(code, if any_fail { EXIT_VERIFY_FAILED } else { EXIT_OK });
}

fn with_chi_dof(spec: &ProblemSpec, dof: u32) -> ProblemSpec {
    let mut s = spec.clone();
    let law = s.law.as_mut().unwrap();
    let marginals = law.marginals.as_mut().unwrap();
    marginals[1] = eventual_convexity::distributions::Marginal::Chi { dof };
    s
}

#[test]
fn verify_detects_perturbed_chi_dof() {
    let mut opts = VerifyOptions::default();
    opts.ex1 = with_chi_dof(&opts.ex1, 3);
    let rows = run_suite(&opts);
    let row = rows.iter().find(|r| r.id == "ex1 F_chi(sqrt 3)").unwrap();
    assert!(!row.pass, "computed {}", row.computed);
    let baseline = run_suite(&VerifyOptions::default());
    let base = baseline.iter().find(|r| r.id == "ex1 F_chi(sqrt 3)").unwrap();
    assert!(base.pass);
}

#[test]
fn cli_error_codes_from_library_errors() {
    use eventual_convexity::error::Error;
    assert_eq!(CliError::from(Error::RepresentationViolated { value: 1.0 }).code, EXIT_REPRESENTATION);
    assert_eq!(CliError::from(Error::Oscillation { changes: 3 }).code, EXIT_CERTIFICATE);
    assert_eq!(CliError::from(Error::Domain("x".into())).code, EXIT_PARSE);
}
