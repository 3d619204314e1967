//! Conversion of approximating subdivision symbols into interpolatory ones.
//!
//! A level symbol `â(z)` is turned into `m(z) = â(z) p(z) / z^(2i-ℓ)` by solving
//! `â(z)p(z) ⋆ â(-z)p(-z) = 2 z^(2i-ℓ)`, either through the resultant matrix of
//! `â(z)` and `â(-z)` ([`bezout_matrix`]) or from the roots of `â`
//! ([`bezout_roots`]). [`appint`] drives this level by level and
//! [`subdivision`] runs and checks the resulting schemes.

pub mod appint;
pub mod bezout;
pub mod bezout_matrix;
pub mod bezout_roots;
pub mod laurent;
pub mod spectra;
pub mod subdivision;

pub use crate::appint::{run_appint, InterpolatorySelection, InterpolatorySequence, SelectionPlan, Solver};
pub use crate::bezout::Star;
pub use crate::laurent::LaurentPolynomial;
pub use crate::spectra::{SpectrumSpec, SymbolProgram};
