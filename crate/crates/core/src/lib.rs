//! Arithmetic invariants governing torsion of CM elliptic curves.
//!
//! The crate computes, in exact integer and rational arithmetic:
//!
//! * class numbers of imaginary quadratic orders via reduced binary
//!   quadratic forms ([`quadorders`]),
//! * the Cartan subalgebra of 2x2 matrices mod N induced by an order,
//!   with its orbit and normalizer structure ([`cartan`]),
//! * least degrees of CM points on the modular curves X1(N) and the
//!   divisibility bounds they satisfy ([`degrees`]),
//! * gonality-derived finite/infinite degree thresholds for X1(N) and
//!   the crossover comparison against CM degrees ([`thresholds`]),
//! * the analytic constructions: least-nonresidue degree upper bounds,
//!   inert-prime congruence families, and the torsion-growth sequence
//!   ([`asymptotics`]).
//!
//! Everything downstream of [`arith`] is deterministic and, outside the
//! few columns explicitly marked approximate, exact.

// divisibility reads better as `n % p == 0` throughout
#![allow(clippy::manual_is_multiple_of)]

pub mod arith;
pub mod asymptotics;
pub mod cartan;
pub mod degrees;
pub mod quadorders;
pub mod thresholds;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub use cartan::{CartanContext, OrbitReport, SplitType};
pub use degrees::{CmDegreeResult, DegreeCandidate};
pub use quadorders::{Discriminant, OrderProfile, ReducedForm};
pub use thresholds::ThresholdReport;
