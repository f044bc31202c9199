//! Class groups of positive definite binary quadratic forms and the
//! classification of completely p-primitive proper classes.
//!
//! A form `[a,b,c]` is completely p-primitive when every integer it
//! represents is also represented by some `(x,y)` with `gcd(x,y,p) = 1`.
//! The [`pprim`] module decides this per proper class; the [`oracle`]
//! module re-checks every decision by exhaustive enumeration.

pub mod classgroup;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod intarith;
pub mod oracle;
pub mod pprim;
pub mod qform;
pub mod repcount;
pub mod ternary;

pub use classgroup::{ClassGroup, ProperClass};
pub use error::{Error, Result};
pub use pprim::{Route, Verdict};
pub use qform::{BinaryForm, IntMap2};
