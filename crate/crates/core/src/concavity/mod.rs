//! Generalized means, strictly monotone transforms and sampled
//! certificates of generalized concavity.

mod certify;
mod mean;
mod transform;
mod tstar;

pub use certify::{
    check_concave_ginv, check_concave_on, check_g_concavity, check_outer_concave_ginv, check_propagation,
    BoxSampler, CheckConfig, ConcavityReport, PointSampler, Witness,
};
pub use mean::generalized_mean;
pub use transform::{Monotonicity, ScalarFn, TransformG};
pub use tstar::{g_decreasing_tstar, ratio_derivative};
pub(crate) use certify::Tracker;
