use eventual_convexity::distributions::Marginal;

fn main() -> Result<(), eventual_convexity::error::Error> {
    let list = [
        Marginal::normal(0.0, 1.0)?,
        Marginal::exponential(1.0)?,
        Marginal::chi(2)?,
        Marginal::rayleigh(1.5)?,
    ];
    for m in list {
        let med = m.quantile(0.5)?;
        println!("{m:?}: support {}, median {med:.6}, pdf(median) {:.6}", m.support(), m.pdf(med));
    }

    println!("exponential(λ) at 3/(2λ): {:.4}", Marginal::exponential(2.0)?.cdf(0.75));
    println!("chi(2) at √3:             {:.4}", Marginal::chi(2)?.cdf(3f64.sqrt()));
    println!("rayleigh(1.5) at √6:      {:.4}", Marginal::rayleigh(1.5)?.cdf(6f64.sqrt()));

    // chi(m) is concave-(α) beyond √(m − α)
    let iv = Marginal::chi(2)?.concave_alpha_interval(-1.0)?;
    println!("chi(2), α = −1: F∘G⁻¹ concave on {iv}");
    Ok(())
}
