//! CHSH violations for the hybrid atom-field state `cos ν|s,0⟩ + sin ν|g,α⟩`
//! under line loss and imperfect detection.
//!
//! [`coefficients`] and [`chsh`] hold the closed-form path and its optimizers;
//! [`oracle`] rebuilds the same quantities by brute force on a truncated Fock
//! space; [`catstates`] covers heralded cat states; [`verify`] bundles the
//! cross-checks into seeded suites.

// `!(x > 0.0)` is used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catstates;
pub mod chsh;
pub mod coefficients;
pub mod error;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    ChannelSpec, ChshResult, Coefficients, LossConvention, MeasurementSpec, Scenario, ScenarioKind, StateSpec,
};
