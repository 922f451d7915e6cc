use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::modarith::Modulus;
use crate::polyring::ResiduePoly;
use crate::{Error, Result};

/// Reconstruction constants for one prefix of the base.
#[derive(Clone, Debug)]
pub struct CrtBasis {
    product: BigUint,
    half: BigUint,
    // (Q/q_i) * [(Q/q_i)^-1]_{q_i}
    weights: Vec<BigUint>,
}

impl CrtBasis {
    pub fn new(moduli: &[Modulus]) -> Result<Self> {
        let product = moduli.iter().fold(BigUint::one(), |acc, q| acc * q.value());
        let weights = moduli
            .iter()
            .map(|q| {
                let cofactor = &product / q.value();
                let residue = u64::try_from(&cofactor % q.value()).expect("below q");
                Ok(cofactor * q.inv(residue)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let half = &product >> 1u32;
        Ok(Self { product, half, weights })
    }

    pub fn product(&self) -> &BigUint {
        &self.product
    }

    /// Centered integer with the given residues.
    pub fn compose(&self, residues: &[u64]) -> BigInt {
        let mut acc = BigUint::zero();
        for (w, &r) in self.weights.iter().zip(residues) {
            acc += w * r;
        }
        acc %= &self.product;
        if acc > self.half {
            BigInt::from(acc) - BigInt::from(self.product.clone())
        } else {
            BigInt::from(acc)
        }
    }
}

/// Centered integer coefficients of coefficient-domain limbs.
pub fn crt_compose(limbs: &[ResiduePoly]) -> Result<Vec<BigInt>> {
    if limbs.is_empty() {
        return Err(Error::Mismatch("nothing to compose".into()));
    }
    let basis = CrtBasis::new(&limbs.iter().map(ResiduePoly::modulus).collect::<Vec<_>>())?;
    let n = limbs[0].data().len();
    let mut residues = vec![0u64; limbs.len()];
    Ok((0..n)
        .map(|k| {
            for (r, l) in residues.iter_mut().zip(limbs) {
                *r = l.data()[k];
            }
            basis.compose(&residues)
        })
        .collect())
}
