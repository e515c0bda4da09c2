#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision, clippy::assertions_on_constants))]

pub mod applications;
pub mod density;
pub mod error;
pub mod exclusion;
pub mod oracle;
pub mod report;
pub mod special;
pub mod thermo;

pub use density::DensityProfile;
pub use error::{Error, Result};
pub use exclusion::{ConstantsRegistry, Fraction, StatisticsKind, StatisticsParams};
pub use report::{BoundReport, Diagnostic};
