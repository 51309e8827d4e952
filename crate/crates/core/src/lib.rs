//! Exact finite-horizon sensitivity analysis for non-autonomous discrete
//! dynamical systems.
//!
//! The library works with sequences of maps acting on a closed interval, the
//! unit circle, or finite products of those, and answers questions of the form
//! "do these open sets get separated by more than `δ` at a common time?" with
//! certificates that a third party can re-check by exact rational arithmetic.
//!
//! Everything is exact: interval maps are piecewise linear (plus a
//! quadratic-capable hybrid kind) over arbitrary-precision rationals, circle
//! maps multiply angles by rational factors, and circle distances are kept as
//! fractions of a full turn so that `π` never appears as a float.
//!
//! Because separation properties quantify over all open sets and all times,
//! the deciders here are finite-horizon: verdicts are `witnessed`,
//! `refuted-at-horizon`, or `inconclusive`, never bare booleans, and each
//! certificate records the horizon and the family of regions that was
//! actually scanned.

pub mod circle;
pub mod corpus;
pub mod detect;
pub mod error;
pub mod hybrid;
pub mod interval_set;
pub mod map;
pub mod measure;
pub mod metric;
pub mod nds;
pub mod plmap;
pub mod rational;
pub mod schema;

pub use error::{MapError, SchemaError};
pub use rational::Q;
