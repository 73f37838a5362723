#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod concavity;
pub mod copulas;
pub mod distributions;
pub mod elliptical;
pub mod error;
pub mod interval;
pub mod linalg;
pub mod numeric;
pub mod rho;
pub mod special;
pub mod thresholds;
