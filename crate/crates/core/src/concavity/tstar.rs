use super::transform::{Monotonicity, TransformG};
use crate::distributions::Density;
use crate::error::{domain, Error, Result, Sign};
use crate::numeric::bisect;

const GRID_POINTS: usize = 4096;

/// Derivative of the ratio `r = f / G'`:
/// `ψ'(t) = −G''(t)/G'(t)² · f(t) + f'(t)/G'(t)`.
pub fn ratio_derivative(f: &dyn Density, g: &TransformG, t: f64) -> f64 {
    let d1 = g.deriv(t);
    let d2 = g.second_deriv(t).unwrap_or(f64::NAN);
    -d2 / (d1 * d1) * f.pdf(t) + f.pdf_deriv(t) / d1
}

fn sign_of(v: f64) -> Option<Sign> {
    if v > 0.0 {
        Some(Sign::Positive)
    } else if v < 0.0 {
        Some(Sign::Negative)
    } else {
        None
    }
}

/// Locates the point `t*` past which the density `f` is `G`-decreasing:
/// the ratio `f/G'` decreases beyond it when `G` increases and increases
/// when `G` decreases.
///
/// `ψ'` is sampled on a dense grid over `bracket`; it must change sign
/// exactly once and in the direction demanded by the monotonicity of `G`.
/// The root is refined by bisection and the monotonicity of the ratio past
/// the root is re-checked on the grid. Zeros of `G'` must lie strictly
/// below the bracket.
pub fn g_decreasing_tstar(f: &dyn Density, g: &TransformG, bracket: (f64, f64)) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return domain(format!("bracket [{lo}, {hi}] must be a finite positive interval"));
    }
    if !g.has_second_deriv() {
        return domain(format!("transform {} has no second derivative", g.label()));
    }
    if let Some(&c) = g.critical_points().iter().find(|&&c| c >= lo) {
        return Err(Error::CriticalPoint { point: c });
    }

    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    let psi: Vec<f64> = grid.iter().map(|&t| ratio_derivative(f, g, t)).collect();
    if let Some(i) = psi.iter().position(|v| v.is_nan()) {
        return Err(Error::Evaluation(format!("ratio derivative undefined at {}", grid[i])));
    }

    let mut changes = Vec::new();
    let mut last: Option<(usize, Sign)> = None;
    for (i, &v) in psi.iter().enumerate() {
        if let Some(s) = sign_of(v) {
            if let Some((j, prev)) = last {
                if prev != s {
                    changes.push((j, i, s));
                }
            }
            last = Some((i, s));
        }
    }
    let (j, i, after) = match changes.as_slice() {
        [] => {
            let sign = last.map(|(_, s)| s).unwrap_or(Sign::Positive);
            return Err(Error::NoSignChange { sign });
        }
        [one] => *one,
        many => return Err(Error::Oscillation { changes: many.len() }),
    };
    let wanted = match g.monotonicity() {
        Monotonicity::Increasing => Sign::Negative,
        Monotonicity::Decreasing => Sign::Positive,
    };
    if after != wanted {
        return Err(Error::Certification(format!(
            "ratio derivative turns {after} past the sign change, but {} needs it {wanted}",
            g.label()
        )));
    }
    let t_star = bisect(|t| ratio_derivative(f, g, t), grid[j], grid[i], 1e-12)?;

    let ratio = |t: f64| f.pdf(t) / g.deriv(t);
    let mut prev = ratio(t_star);
    for &t in grid.iter().filter(|&&t| t > t_star) {
        let r = ratio(t);
        let slack = 1e-12 * prev.abs().max(r.abs());
        let ok = match wanted {
            Sign::Negative => r <= prev + slack,
            Sign::Positive => r >= prev - slack,
        };
        if !ok {
            return Err(Error::Certification(format!("ratio f/G' is not monotone past {t_star} (at {t})")));
        }
        prev = r;
    }
    Ok(t_star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{Marginal, SincSquared};

    #[test]
    fn chi_roots_are_analytic() {
        for m in [2u32, 3, 5] {
            let chi = Marginal::chi(m).unwrap();
            for alpha in [-1.0, -3.0] {
                let t = g_decreasing_tstar(&chi, &TransformG::power(alpha), (0.1, 10.0)).unwrap();
                let exact = (m as f64 - alpha).sqrt();
                assert!((t - exact).abs() < 1e-6, "m {m} alpha {alpha}: {t}");
            }
        }
    }

    #[test]
    fn normal_density_with_exotic_transform() {
        let t = g_decreasing_tstar(&Marginal::standard_normal(), &TransformG::exp_neg_cbrt_log(), (1.1, 3.0)).unwrap();
        // Root of (x² − 1)·ln x − (ln x)^(1/3)/3 − 2/3 = 0.
        let oracle = |x: f64| {
            let l = x.ln();
            (x * x - 1.0) * l - l.cbrt() / 3.0 - 2.0 / 3.0
        };
        let exact = bisect(oracle, 1.1, 3.0, 1e-14).unwrap();
        assert!((t - exact).abs() < 1e-8, "{t} vs {exact}");
        assert!((t - 1.675_971_7).abs() < 1e-6);
    }

    #[test]
    fn sinc_squared_is_never_g_decreasing() {
        for alpha in [-0.5, -1.0, -3.0] {
            let err = g_decreasing_tstar(&SincSquared, &TransformG::power(alpha), (1.0, 100.0)).unwrap_err();
            assert!(matches!(err, Error::Oscillation { .. }), "alpha {alpha}: {err}");
        }
    }

    #[test]
    fn single_sign_reports_its_sign() {
        let chi = Marginal::chi(2).unwrap();
        let err = g_decreasing_tstar(&chi, &TransformG::power(-1.0), (2.0, 6.0)).unwrap_err();
        assert_eq!(err, Error::NoSignChange { sign: Sign::Positive });
    }

    #[test]
    fn critical_point_must_be_separated() {
        let g = TransformG::new(
            "cubic",
            |t: f64| (t - 1.0).powi(3),
            |t: f64| 3.0 * (t - 1.0).powi(2),
            Some(std::sync::Arc::new(|t: f64| 6.0 * (t - 1.0))),
            |z: f64| 1.0 + z.cbrt(),
            Monotonicity::Increasing,
            crate::interval::Interval::real_line(),
            vec![1.0],
        );
        let err = g_decreasing_tstar(&Marginal::standard_normal(), &g, (1.0, 3.0)).unwrap_err();
        assert_eq!(err, Error::CriticalPoint { point: 1.0 });
    }
}
