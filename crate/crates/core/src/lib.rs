//! Exact RNS-CKKS over `Z[x]/(x^n + 1)` with an optional split mode that
//! evaluates degree-2N arithmetic using only degree-N transforms.
//!
//! The crate is layered bottom-up:
//!
//! * [`modarith`] word-sized modular arithmetic and RNS base generation
//! * [`polyring`] residue polynomials and on-the-fly negacyclic transforms
//! * [`ringsplit`] the split/join maps between one degree-2N polynomial and
//!   a pair of twisted degree-N polynomials
//! * [`keys`] the Trivium stream, samplers, encoders and key generation
//! * [`heaan`] the homomorphic operations

pub mod error;
pub mod heaan;
pub mod keys;
pub mod modarith;
pub mod par;
pub mod params;
pub mod polyring;
pub mod ringsplit;
pub mod scale;
pub mod serialize;

pub use error::{Error, Result};
