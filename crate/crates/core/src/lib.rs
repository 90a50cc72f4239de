//! Exact q-series arithmetic for Dedekind eta quotients and Eisenstein series
//! on `Gamma0(N)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`]: rationals, Bernoulli numbers, divisor sums, cyclotomic numbers
//!   and `SL2(Z)` completions.
//! - [`qseries`]: truncated series in fractional powers of `q`.
//! - [`eta`]: eta quotients, their expansions and orders at cusps.
//! - [`eisenstein`]: the spaces spanned by `E_k(tz)`, identity certification
//!   and eta/Eisenstein matching.
//! - [`cusps`]: expansions of Eisenstein elements at arbitrary cusps and the
//!   order-of-vanishing bound for prime power levels.
//! - [`search`]: classification of eta quotients inside the Eisenstein
//!   spaces, dual pairs and second-derivative solutions at level 4.

pub mod arith;
pub mod cusps;
pub mod eisenstein;
mod error;
pub mod eta;
mod parse;
pub mod qseries;
pub mod search;

pub use arith::cyclotomic::CycNumber;
pub use arith::sl2::{efgh_complete, sl2_complete, EfghCompletion, Sl2Matrix};
pub use arith::{bernoulli, sigma, Rational};
pub use cusps::{cusp_reps, Cusp, CuspExpansion};
pub use eisenstein::{EisensteinElement, MembershipTag};
pub use error::{Error, Result};
pub use eta::{EtaQuotient, ModularityReport};
pub use qseries::{Coefficient, QSeries, Valuation};
