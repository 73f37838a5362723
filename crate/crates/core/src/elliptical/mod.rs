//! Elliptical laws in spherical-radial form and the resulting
//! probability estimators.

mod law;
mod probability;
mod sphere;

pub use law::{EllipticalLaw, Generator};
pub use probability::{direct_mc_probability, probability, Estimate};
pub use sphere::{SpherePointSet, SphereScheme, DEFAULT_ANGLES_2D, DEFAULT_MC_POINTS};
