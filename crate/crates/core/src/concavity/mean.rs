/// Generalized (power) mean `m_α(a, b, λ)` of two nonnegative numbers.
///
/// `α = −∞` gives `min(a, b)`, `α = 0` the weighted geometric mean and
/// `α ≠ 0` the weighted power mean. For `α ≤ 0` the mean is zero whenever
/// `ab = 0`. The computation runs in log space so large exponents neither
/// overflow nor underflow, and the arguments are put in canonical order so
/// `m_α(a, b, λ) = m_α(b, a, 1 − λ)` holds bit for bit.
pub fn generalized_mean(a: f64, b: f64, lambda: f64, alpha: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0, "generalized_mean needs nonnegative inputs");
    debug_assert!((0.0..=1.0).contains(&lambda), "weight must lie in [0, 1]");
    // The larger weight is formed first and the smaller one as its exact
    // complement, so (λ, 1 − λ) and (1 − λ, λ) give identical pairs.
    let (wa, wb) = if lambda >= 0.5 {
        (lambda, 1.0 - lambda)
    } else {
        let big = 1.0 - lambda;
        (1.0 - big, big)
    };
    let (a, wa, b, wb) = if a <= b { (a, wa, b, wb) } else { (b, wb, a, wa) };
    if a == b {
        return a;
    }
    if alpha <= 0.0 && a == 0.0 {
        return 0.0;
    }
    if alpha == f64::NEG_INFINITY {
        return a;
    }
    if wa == 0.0 {
        return b;
    }
    if wb == 0.0 {
        return a;
    }
    let (la, lb) = (a.ln(), b.ln());
    if alpha == 0.0 {
        return (wa * la + wb * lb).exp();
    }
    if alpha.abs() < 1.0 && a > 0.0 {
        // ln(λa^α + (1−λ)b^α) = ln1p(λ(a^α − 1) + (1−λ)(b^α − 1)), accurate as α → 0.
        let s = wa * (alpha * la).exp_m1() + wb * (alpha * lb).exp_m1();
        return (s.ln_1p() / alpha).exp();
    }
    let terms = [wa.ln() + alpha * la, wb.ln() + alpha * lb];
    let top = terms[0].max(terms[1]);
    let lse = top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln();
    (lse / alpha).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classic_means() {
        assert!((generalized_mean(2.0, 4.0, 0.5, 1.0) - 3.0).abs() < 1e-15);
        assert!((generalized_mean(4.0, 9.0, 0.5, 0.0) - 6.0).abs() < 1e-14);
        assert_eq!(generalized_mean(3.0, 7.0, 0.2, f64::NEG_INFINITY), 3.0);
        let harmonic = 1.0 / (0.5 / 2.0 + 0.5 / 4.0);
        assert!((generalized_mean(2.0, 4.0, 0.5, -1.0) - harmonic).abs() < 1e-14);
    }

    #[test]
    fn zero_argument_clause() {
        assert_eq!(generalized_mean(0.0, 5.0, 0.3, 0.0), 0.0);
        assert_eq!(generalized_mean(5.0, 0.0, 0.3, -2.0), 0.0);
        let expected = (0.7f64 * 25.0).sqrt();
        assert!((generalized_mean(0.0, 5.0, 0.3, 2.0) - expected).abs() < 1e-14);
    }

    #[test]
    fn huge_exponents_stay_finite() {
        let v = generalized_mean(1e10, 2e10, 0.5, 80.0);
        assert!(v.is_finite() && v > 1e10 && v < 2e10);
        let v = generalized_mean(1e-10, 2e-10, 0.5, -80.0);
        assert!(v.is_finite() && v > 1e-10 && v < 2e-10);
    }

    #[test]
    fn limit_towards_minimum() {
        for &(a, b) in &[(0.5, 2.0), (1.3, 0.7), (2.0, 1.99)] {
            let m = generalized_mean(a, b, 0.5, -100.0);
            let lo = f64::min(a, b);
            assert!((m - lo).abs() <= 1e-2 * lo);
        }
    }

    proptest! {
        #[test]
        fn nondecreasing_in_alpha(a in 1e-3f64..1e3, b in 1e-3f64..1e3, l in 0.0f64..=1.0) {
            let mut prev = 0.0;
            for k in 0..=106 {
                let alpha = -50.0 + 0.5 * k as f64;
                let m = generalized_mean(a, b, l, alpha);
                prop_assert!(m >= prev * (1.0 - 1e-12), "alpha {alpha}: {m} < {prev}");
                prev = m;
            }
        }

        #[test]
        fn continuous_at_zero(a in 0.1f64..10.0, b in 0.1f64..10.0, l in 0.0f64..=1.0, e in -1e-6f64..1e-6) {
            let m0 = generalized_mean(a, b, l, 0.0);
            prop_assert!((generalized_mean(a, b, l, e) - m0).abs() <= 1e-4);
        }

        #[test]
        fn relatively_continuous_at_zero(a in 1e-3f64..1e3, b in 1e-3f64..1e3, l in 0.0f64..=1.0, e in -1e-6f64..1e-6) {
            let m0 = generalized_mean(a, b, l, 0.0);
            prop_assert!((generalized_mean(a, b, l, e) - m0).abs() <= 1e-4 * m0);
        }

        #[test]
        fn exact_symmetry(a in 0.0f64..1e3, b in 0.0f64..1e3, l in 0.0f64..=1.0, alpha in -20.0f64..3.0) {
            prop_assert_eq!(generalized_mean(a, b, l, alpha), generalized_mean(b, a, 1.0 - l, alpha));
        }

        #[test]
        fn between_min_and_max(a in 1e-3f64..1e3, b in 1e-3f64..1e3, l in 0.0f64..=1.0, alpha in -20.0f64..3.0) {
            let m = generalized_mean(a, b, l, alpha);
            prop_assert!(m >= a.min(b) * (1.0 - 1e-12) && m <= a.max(b) * (1.0 + 1e-12));
        }
    }
}
