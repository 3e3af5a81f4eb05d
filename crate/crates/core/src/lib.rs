//! Exact computer algebra over iterated Laurent series fields
//! K = F_p((t1))...((tn)): square-class decomposition against a value-group
//! basis, isotropy of diagonal quadratic forms through residue forms,
//! decomposition and index bounds for symbol algebras, and a symbolic
//! calculator for the resulting field invariants.
//!
//! All arithmetic is exact (arbitrary-precision integers and rationals);
//! decision procedures return checkable certificates and are cross-validated
//! against independent oracles.

pub mod bounds;
pub mod brauer;
pub mod decompose;
pub mod error;
pub mod finite_field;
pub mod laurent;
pub mod quadform;
pub mod valgroup;

pub use error::{Error, Result};
pub use laurent::{GroupWord, LClass, LaurentElement, LaurentField, LeadingData};
