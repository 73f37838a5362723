use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::norm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum SphereScheme {
    MonteCarlo { seed: u64 },
    EqualAngle2d,
}

/// Equally weighted unit vectors discretizing the uniform law on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePointSet {
    points: Vec<Vec<f64>>,
    scheme: SphereScheme,
}

pub const DEFAULT_ANGLES_2D: usize = 720;
pub const DEFAULT_MC_POINTS: usize = 20_000;

impl SpherePointSet {
    pub fn new(m: usize, n: usize, scheme: SphereScheme) -> Result<Self> {
        if n == 0 || m == 0 {
            return domain("sphere point set needs m >= 1 and n >= 1");
        }
        let points = match scheme {
            SphereScheme::EqualAngle2d => {
                if m != 2 {
                    return domain(format!("equal-angle points exist only for m = 2, got m = {m}"));
                }
                (0..n)
                    .map(|k| {
                        let a = std::f64::consts::TAU * k as f64 / n as f64;
                        vec![a.cos(), a.sin()]
                    })
                    .collect()
            }
            SphereScheme::MonteCarlo { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n).map(|_| random_unit_vector(m, &mut rng)).collect()
            }
        };
        Ok(Self { points, scheme })
    }

    /// 720 equal angles for `m = 2`, otherwise 20000 seeded Monte-Carlo points.
    pub fn default_for(m: usize, seed: u64) -> Result<Self> {
        if m == 2 {
            Self::new(2, DEFAULT_ANGLES_2D, SphereScheme::EqualAngle2d)
        } else {
            Self::new(m, DEFAULT_MC_POINTS, SphereScheme::MonteCarlo { seed })
        }
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }

    pub fn scheme(&self) -> SphereScheme {
        self.scheme
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }
}

/// Normalized standard normal vector; near-zero draws are redrawn.
pub(crate) fn random_unit_vector(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm(&v);
        if n >= 1e-12 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}
