use eventual_convexity::concavity::{CheckConfig, TransformG};
use eventual_convexity::copulas::{check_copula_concave_ginv, copula_eval, Copula, COPULA_SEGMENTS};
use eventual_convexity::interval::Interval;

fn main() -> Result<(), eventual_convexity::error::Error> {
    let u = [0.7, 0.4];
    for c in [
        Copula::Independent { dim: 2 },
        Copula::Maximum { dim: 2 },
        Copula::Gumbel { theta: 2.0, dim: 2 },
        Copula::Clayton { theta: 1.5, dim: 2 },
        Copula::Gaussian2d { corr: 0.5 },
    ] {
        println!("{c:?}: C{u:?} = {:.6}", copula_eval(&c, &u)?);
    }

    let clayton = Copula::Clayton { theta: 2.0, dim: 2 };
    let ghat = [TransformG::log(), TransformG::log()];
    let region = [Interval::closed(-3.0, -0.01), Interval::closed(-3.0, -0.01)];
    let r = check_copula_concave_ginv(&clayton, &ghat, &region, &CheckConfig::default().with_pairs(COPULA_SEGMENTS))?;
    println!("Clayton(2) with log marginal transforms: holds={} worst={:+.3e}", r.holds, r.worst_violation);
    Ok(())
}
