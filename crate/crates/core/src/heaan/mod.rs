//! RNS-CKKS evaluation.
//!
//! All operations are written once over [`LimbPoly`]; the degree mode of the
//! context decides whether a limb is one transform or a split pair.

mod crt;
mod ops;
mod poly;

pub use crt::{crt_compose, CrtBasis};
pub use ops::{
    add, add_plain, boost_scale, drop_to_level, key_switch, mod_down, mul_integer, mul_plain, mult, mult_relin,
    relinearize, rescale, rotate, sub, galois_element,
};
pub use poly::{LimbPoly, RnsPoly};

use crate::params::DegreeMode;
use crate::scale::Scale;
use crate::{Error, Result};

/// Two or three polynomials over `q_0..q_{level-1}` with an exact scale.
#[derive(Clone, Debug, PartialEq)]
pub struct Ciphertext {
    parts: Vec<RnsPoly>,
    scale: Scale,
}

impl Ciphertext {
    pub fn new(parts: Vec<RnsPoly>, scale: Scale) -> Result<Self> {
        if !(2..=3).contains(&parts.len()) {
            return Err(Error::Mismatch(format!("ciphertext with {} parts", parts.len())));
        }
        let level = parts[0].len();
        let mode = parts[0].mode();
        if parts.iter().any(|p| p.len() != level || p.mode() != mode) {
            return Err(Error::Mismatch("ciphertext parts disagree on level or mode".into()));
        }
        Ok(Self { parts, scale })
    }

    pub fn level(&self) -> usize {
        self.parts[0].len()
    }

    pub fn mode(&self) -> DegreeMode {
        self.parts[0].mode()
    }

    pub fn scale(&self) -> &Scale {
        &self.scale
    }

    pub fn set_scale(&mut self, scale: Scale) {
        self.scale = scale;
    }

    pub fn parts(&self) -> &[RnsPoly] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<RnsPoly> {
        self.parts
    }

    /// Degree in the secret: 1 after relinearization, 2 straight after a product.
    pub fn degree(&self) -> usize {
        self.parts.len() - 1
    }
}
