//! Exact and rigorous computations with the Mahler product
//! `T_p(z) = ∏_{j≥1} (1 - z^{p^j})^{-1/p^j}`.
//!
//! * [`arith`]: primes, p-adic valuations, p-power denominators, heights.
//! * [`series`]: truncated power series over the rationals.
//! * [`coeffs`]: the coefficient table `t_p(n)` from three generators, with audits.
//! * [`eval`]: certified numeric evaluation inside the unit disk.
//! * [`auxiliary`]: auxiliary functions with prescribed vanishing, decay and height ledgers.
//! * [`cli`]: the batch front end behind the `tp-mahler` binary.

pub mod arith;
pub mod auxiliary;
pub mod ball;
pub mod cli;
pub mod coeffs;
pub mod error;
pub mod eval;
pub mod golden;
pub mod linalg;
pub mod series;

pub use arith::{ExactRational, Prime};
pub use coeffs::{Algorithm, CoeffTable};
pub use error::{Error, Result};
pub use series::TruncSeries;
