use eventual_convexity::copulas::copula_threshold;
use eventual_convexity::distributions::Marginal;
use eventual_convexity::elliptical::EllipticalLaw;
use eventual_convexity::thresholds::{delta_of_q, eventual_threshold_for_law, gaussian_refined_threshold, quadratic_tstar};

fn main() -> Result<(), eventual_convexity::error::Error> {
    for m in [2, 3, 5, 10] {
        let law = EllipticalLaw::standard(m)?;
        let t = quadratic_tstar(&law)?;
        let refined = gaussian_refined_threshold(m)?;
        let q = eventual_threshold_for_law(&law, t, 1.0, 0.5)?;
        println!(
            "m = {m:>2}: refined p* = {:.6}, q-formula p* = {:.6} (q = {:.4}, δ = {:.4})",
            refined.p_star,
            q.p_star,
            q.q_star.unwrap_or(f64::NAN),
            q.delta_q.unwrap_or(f64::NAN)
        );
    }
    println!("δ(2, 0.25) = {:.12}", delta_of_q(2, 0.25)?);

    let marginals = [Marginal::exponential(1.0)?, Marginal::rayleigh(1.5)?];
    let r = copula_threshold(&marginals, &[1.5, 6f64.sqrt()])?;
    println!("copula route: p* = {:.4} ({})", r.p_star, r.binding);
    Ok(())
}
