pub mod dualization;
pub mod error;
pub mod formal;
pub mod heisenberg;
pub mod ratfun;
pub mod regrep;
pub mod voa_core;
pub mod scalars;
pub mod suites;

pub use error::{Error, Result};
pub use formal::{Coeff, Direction, TruncatedSeries};
pub use scalars::{FieldConfig, PhaseKind, Scalar, Q64};
