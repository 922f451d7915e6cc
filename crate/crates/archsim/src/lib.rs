//! Cycle-level model of a CKKS accelerator built from residue-polynomial
//! arithmetic units (RPAUs), one per RNS limb.
//!
//! High-level operations are [compiled](compile) into instruction streams,
//! [scheduled](sim) against a [cost model](cost), [audited](audit) for
//! on-chip memory and [executed](exec) on real data so the same stream that is
//! timed can be checked against the software library.

pub mod audit;
pub mod calibrate;
pub mod compile;
pub mod cost;
pub mod exec;
pub mod isa;
pub mod sim;
pub mod workload;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid program {program}: instruction {index}: {reason}")]
    Program { program: String, index: usize, reason: String },
    #[error("{program} needs {needed} slots per RPAU, the machine has {available}")]
    Memory { program: String, needed: usize, available: usize },
    #[error(transparent)]
    Core(#[from] flexhe::Error),
}
