//! Sampled certificates: G-concavity of a function, and concavity of F∘G⁻¹
//! for a cdf.

use eventual_convexity::concavity::{check_concave_ginv, check_g_concavity, BoxSampler, CheckConfig, TransformG};
use eventual_convexity::distributions::Marginal;
use eventual_convexity::interval::Interval;

fn main() -> Result<(), eventual_convexity::error::Error> {
    let f = |x: &[f64]| (-x[0].powi(3)).exp();
    let region = BoxSampler::closed(&[(-2.0, 2.0)])?;
    let cfg = CheckConfig::default();

    for g in [TransformG::power(-1.0), TransformG::log(), TransformG::exp_neg_cbrt_log()] {
        let r = check_g_concavity(&f, &g, &region, &cfg)?;
        print!("exp(-x³) under {:<18} holds={} worst={:+.3e}", g.label(), r.holds, r.worst_violation);
        match r.witness {
            Some(w) if !r.holds => println!("  at x={:?} y={:?} λ={:.2}", w.x, w.y, w.lambda),
            _ => println!(),
        }
    }

    let chi2 = Marginal::chi(2)?;
    let r = check_concave_ginv(&|t| chi2.cdf(t), &TransformG::power(-1.0), Interval::left_open(0.0, 1.0 / 3f64.sqrt()), &cfg)?;
    println!("chi(2) concave-G⁻¹ for t^-1 on (0, 1/√3]: holds={} ({} samples)", r.holds, r.samples_used);
    Ok(())
}
