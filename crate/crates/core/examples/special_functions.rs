//! Incomplete gamma/beta and the normal cdf at a few reference points.

use eventual_convexity::special::{inc_beta, ln_gamma, reg_inc_beta, reg_lower_inc_gamma, std_normal_cdf, std_normal_quantile};

fn main() -> Result<(), eventual_convexity::error::Error> {
    println!("ln Γ(5)          = {:.12} (ln 24 = {:.12})", ln_gamma(5.0)?, 24f64.ln());
    println!("P(1, 1.5)        = {:.12}", reg_lower_inc_gamma(1.0, 1.5)?);
    println!("I_0.3(2, 3)      = {:.12}", reg_inc_beta(2.0, 3.0, 0.3)?);
    println!("B_0.5(0.5, 0.5)  = {:.12} (π/2)", inc_beta(0.5, 0.5, 0.5)?);
    for z in [0.0, 1.0, 5f64.sqrt(), 3.0] {
        let p = std_normal_cdf(z);
        println!("Φ({z:.4}) = {p:.6}   Φ⁻¹ back = {:.12}", std_normal_quantile(p)?);
    }
    Ok(())
}
