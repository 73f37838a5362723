use eventual_convexity::concavity::{g_decreasing_tstar, TransformG};
use eventual_convexity::distributions::{Marginal, SincSquared};

fn main() -> Result<(), eventual_convexity::error::Error> {
    for m in [2, 3, 5] {
        for alpha in [-1.0, -3.0] {
            let t = g_decreasing_tstar(&Marginal::chi(m)?, &TransformG::power(alpha), (0.5, 10.0))?;
            println!("chi({m}), power {alpha}: t* = {t:.9}   √(m−α) = {:.9}", (m as f64 - alpha).sqrt());
        }
    }

    let t = g_decreasing_tstar(&Marginal::standard_normal(), &TransformG::exp_neg_cbrt_log(), (1.1, 3.0))?;
    println!("normal, exp(-(ln x)^(1/3)): t* = {t:.9}");

    match g_decreasing_tstar(&SincSquared, &TransformG::power(-1.0), (1.0, 100.0)) {
        Ok(t) => println!("sinc²: t* = {t}"),
        Err(e) => println!("sinc²: {e}"),
    }
    Ok(())
}
