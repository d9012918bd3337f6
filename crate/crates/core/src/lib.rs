pub mod arith;
pub mod chern;
pub mod combin;
pub mod error;
pub mod jacobian;
pub mod oracle;
pub mod strata;
pub mod tautprod;
pub mod ucurve;

pub use error::{Error, Result};
