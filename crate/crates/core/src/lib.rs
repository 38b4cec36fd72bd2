//! Four-wave-mixing suppression in a double-Λ EIT medium with a Raman
//! absorber acting on the idler.
//!
//! All frequencies are MHz (see [`units`]); optical depths are amplitude
//! exponents.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod design;
pub mod error;
pub mod integrate;
pub mod linalg;
pub mod model;
pub mod propagation;
pub mod record;
pub mod scan;
pub mod scenario;
pub mod susceptibility;
pub mod units;

pub use error::{Error, Result, ValidationErrors, Violation};
pub use linalg::Mat2;
pub use model::{AtomicLine, EitMedium, FieldPair, RamanAbsorber};
pub use scenario::Scenario;
