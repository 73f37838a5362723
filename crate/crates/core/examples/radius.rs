use eventual_convexity::cli::catalog_spec;
use eventual_convexity::rho::{gv_transform, rho_bisect, rho_quadratic, RhoConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = catalog_spec("paper-quadratic-2d")?;
    let law = spec.elliptical_law()?;
    let g = spec.oracle(2)?;
    let quad = g.quadratic().expect("quadratic oracle");
    let x = [0.5, 1.5];

    for k in 0..8 {
        let a = std::f64::consts::TAU * k as f64 / 8.0;
        let v = [a.cos(), a.sin()];
        let closed = rho_quadratic(quad, &x, &v, &law)?;
        let bis = rho_bisect(&g, &x, &v, &law, RhoConfig::default())?;
        let gv = gv_transform(quad, &v, &law)?;
        println!("v = ({:+.3}, {:+.3}): ρ = {closed:.10}  bisection {bis:.10}  g_v(ρ) = {:.6}", v[0], v[1], gv.value(closed));
    }
    Ok(())
}
