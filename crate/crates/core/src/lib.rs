//! Explicit Padé approximations to Euler's factorial series `F(t) = sum n! t^n`
//! and to generalised factorial series, certified evaluation of these series
//! in `p`-adic completions of `Q` and quadratic fields, and non-vanishing
//! certificates and effective bounds for linear forms in their values.

pub mod arith;
pub mod certify;
pub mod cli;
pub mod error;
pub mod numfield;
pub mod pade;
pub mod padics;
pub mod places;

pub use error::{Error, Result};
pub use numfield::{FieldElement, QuadraticField, Rational};
pub use places::{Place, Splitting};
