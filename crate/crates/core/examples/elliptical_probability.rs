//! φ(x) for the catalog quadratic instance by the spherical-radial formula,
//! checked against plain sampling of ξ.

use eventual_convexity::cli::catalog_spec;
use eventual_convexity::elliptical::{direct_mc_probability, EllipticalLaw, Generator};
use eventual_convexity::rho::phi;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = catalog_spec("paper-quadratic-2d")?;
    let law = spec.elliptical_law()?;
    let g = spec.oracle(2)?;
    let pts = spec.sphere_points(2, spec.integration.seed)?;

    for x in [[0.0, 1.0], [1.0, 1.0], [-1.5, 2.5]] {
        let sr = phi(&law, &g, &x, &pts)?;
        let mc = direct_mc_probability(&law, &g, &x, 200_000, 7)?;
        println!(
            "x = {x:?}: spherical-radial {:.5} ± {:.1e}, sampling {:.5} ± {:.1e}, agree(3σ) = {}",
            sr.value,
            sr.std_err,
            mc.value,
            mc.std_err,
            sr.agrees_with(&mc, 3.0)
        );
    }

    let t = EllipticalLaw::new(vec![0.0; 3], vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], Generator::Student { nu: 5.0 })?;
    for r in [0.5, 1.0, 2.0, 4.0] {
        println!("student(ν=5), m=3: F_R({r}) = {:.6}", t.radial_cdf(r));
    }
    Ok(())
}
