//! Numerical toolkit for approximation numbers of composition operators on
//! Hardy spaces H^p.
//!
//! The crate evaluates every explicit lower and upper bound on the
//! approximation numbers `a_n(C_phi)` as a function of `n`, and validates
//! them at desk scale against an exact singular-value oracle built from
//! truncated operator matrices on H^2.
//!
//! Modules:
//! - [`disk`]: pseudo-hyperbolic geometry, separation and interpolation
//!   constants, evaluation-functional norms, Carleson constants.
//! - [`symbols`]: the symbol zoo (lens, cusp profile, Shapiro-Taylor,
//!   automorphisms) with derivatives, radial moduli and Taylor access.
//! - [`oracle`]: truncated matrices of `C_phi` on the monomial basis of
//!   H^2, singular values as approximation numbers, s-number cross checks.
//! - [`bounds`]: the explicit bounds with their constants ledger and
//!   rigor flags.
//! - [`fit`]: decay-law fitting (geometric, stretched-exponential,
//!   `n/log n`) in log domain.
//! - [`cli`]: batch front-end emitting CSV/JSON tables.

pub mod bounds;
pub mod cli;
pub mod disk;
pub mod error;
pub mod fit;
pub mod oracle;
pub mod symbols;

pub use error::{Error, Result};
