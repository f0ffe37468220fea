//! Exact evaluation of the limiting slope of the K-energy for a projective
//! hypersurface under a diagonal one-parameter subgroup, and a search over
//! weight vectors for directions where it turns negative.
//!
//! * [`envelope`]: lower envelopes of lines on `[0, ∞)` and the penalty integral.
//! * [`polynomial`]: monomial supports, text and JSON input.
//! * [`stability`]: weights, per-variable penalties, the energy and its limit.
//! * [`search`]: weight-space search and exact certification of the minimum.
//! * [`cli`]: the `kstab` command-line front end.

pub mod cli;
pub mod envelope;
pub mod polynomial;
pub mod rational;
pub mod search;
pub mod stability;

pub use envelope::{Envelope, Line};
pub use polynomial::{parse_polynomial, parse_support_json, Support};
pub use rational::Rational;
pub use stability::{StabilityReport, WeightVector};
