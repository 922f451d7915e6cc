//! Residue polynomials modulo `x^n - c` and their number-theoretic transforms.
//!
//! A [`Ring`] fixes the modulus, degree and the constant `c = rho^n`. The
//! standard ring has `c = -1`; the two twisted rings that appear after
//! splitting have `c = +zeta^n` and `c = -zeta^n`.

mod auto;
mod ntt;

pub use auto::{automorphism_coeff, automorphism_eval, eval_index_exponent};
pub use ntt::{bit_reverse, ntt_forward, ntt_inverse, StageSeed, TwiddleSeeds};

use crate::modarith::Modulus;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Twist {
    /// `x^n + 1`
    Standard,
    /// `x^n - zeta^n`
    Plus,
    /// `x^n + zeta^n`
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Coefficient,
    Evaluation,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Coefficient => "coefficient",
            Domain::Evaluation => "evaluation",
        }
    }
}

/// `Z_q[x]/(x^n - rho^n)` together with the transform roots.
///
/// Evaluation slot `k` holds the value at `rho * omega^brv(k)` where `omega`
/// is a primitive `n`-th root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    modulus: Modulus,
    degree: usize,
    twist: Twist,
    rho: u64,
    omega: u64,
}

impl Ring {
    /// Negacyclic ring from a primitive `2n`-th root `psi`.
    pub fn standard(modulus: Modulus, degree: usize, psi: u64) -> Result<Self> {
        check_degree(degree)?;
        let q = modulus.value();
        if modulus.pow(psi, degree as u64) != q - 1 {
            return Err(Error::InvalidParams(format!("{psi} is not a primitive {}-th root mod {q}", 2 * degree)));
        }
        Ok(Self { modulus, degree, twist: Twist::Standard, rho: psi, omega: modulus.mul(psi, psi) })
    }

    /// Twisted ring from a primitive `4n`-th root `zeta`.
    pub fn twisted(modulus: Modulus, degree: usize, twist: Twist, zeta: u64) -> Result<Self> {
        check_degree(degree)?;
        let q = modulus.value();
        if modulus.pow(zeta, 2 * degree as u64) != q - 1 {
            return Err(Error::InvalidParams(format!("{zeta} is not a primitive {}-th root mod {q}", 4 * degree)));
        }
        let rho = match twist {
            Twist::Standard => modulus.mul(zeta, zeta),
            Twist::Plus => zeta,
            Twist::Minus => modulus.pow(zeta, 3),
        };
        Ok(Self { modulus, degree, twist, rho, omega: modulus.pow(zeta, 4) })
    }

    /// The plus and minus halves of a standard ring of even degree.
    pub fn halves(&self) -> Result<(Ring, Ring)> {
        if self.twist != Twist::Standard || self.degree < 16 {
            return Err(Error::Unsupported("only a standard ring of degree >= 16 splits".into()));
        }
        let half = self.degree / 2;
        Ok((
            Ring::twisted(self.modulus, half, Twist::Plus, self.rho)?,
            Ring::twisted(self.modulus, half, Twist::Minus, self.rho)?,
        ))
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn log_degree(&self) -> u32 {
        self.degree.trailing_zeros()
    }

    pub fn twist(&self) -> Twist {
        self.twist
    }

    /// Coset shift `rho`.
    pub fn rho(&self) -> u64 {
        self.rho
    }

    /// Primitive `n`-th root used by the transform.
    pub fn omega(&self) -> u64 {
        self.omega
    }

    /// `c` in `x^n = c`.
    pub fn constant(&self) -> u64 {
        self.modulus.pow(self.rho, self.degree as u64)
    }

    pub fn zero(&self, domain: Domain) -> ResiduePoly {
        ResiduePoly { ring: *self, domain, data: vec![0; self.degree] }
    }

    pub fn poly(&self, domain: Domain, data: Vec<u64>) -> Result<ResiduePoly> {
        if data.len() != self.degree {
            return Err(Error::Mismatch(format!("{} values for degree {}", data.len(), self.degree)));
        }
        let q = self.modulus.value();
        if let Some(v) = data.iter().find(|&&v| v >= q) {
            return Err(Error::Malformed(format!("value {v} not reduced mod {q}")));
        }
        Ok(ResiduePoly { ring: *self, domain, data })
    }

    /// Lifts signed coefficients.
    pub fn from_signed(&self, coeffs: &[i64]) -> Result<ResiduePoly> {
        let data = coeffs.iter().map(|&c| self.modulus.from_i64(c)).collect();
        self.poly(Domain::Coefficient, data)
    }
}

fn check_degree(degree: usize) -> Result<()> {
    if degree < 8 || !degree.is_power_of_two() {
        return Err(Error::InvalidParams(format!("degree {degree} is not a power of two >= 8")));
    }
    Ok(())
}

/// One RNS limb: `n` residues in a fixed domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResiduePoly {
    ring: Ring,
    domain: Domain,
    data: Vec<u64>,
}

impl ResiduePoly {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn modulus(&self) -> Modulus {
        self.ring.modulus
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u64> {
        self.data
    }

    pub fn expect_domain(&self, domain: Domain) -> Result<()> {
        if self.domain != domain {
            return Err(Error::WrongDomain { expected: domain.name(), found: self.domain.name() });
        }
        Ok(())
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::Mismatch("operands live in different rings".into()));
        }
        if self.domain != other.domain {
            return Err(Error::WrongDomain { expected: self.domain.name(), found: other.domain.name() });
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.compatible(other)?;
        let q = self.ring.modulus;
        self.data.iter_mut().zip(&other.data).for_each(|(a, &b)| *a = q.add(*a, b));
        Ok(())
    }

    pub fn sub_assign(&mut self, other: &Self) -> Result<()> {
        self.compatible(other)?;
        let q = self.ring.modulus;
        self.data.iter_mut().zip(&other.data).for_each(|(a, &b)| *a = q.sub(*a, b));
        Ok(())
    }

    pub fn neg_assign(&mut self) {
        let q = self.ring.modulus;
        self.data.iter_mut().for_each(|a| *a = q.neg(*a));
    }

    pub fn scalar_mul_assign(&mut self, k: u64) {
        let q = self.ring.modulus;
        let k = q.reduce(k);
        self.data.iter_mut().for_each(|a| *a = q.mul(*a, k));
    }

    /// Pointwise product; evaluation domain only.
    pub fn dyadic_mul_assign(&mut self, other: &Self) -> Result<()> {
        self.compatible(other)?;
        self.expect_domain(Domain::Evaluation)?;
        let q = self.ring.modulus;
        self.data.iter_mut().zip(&other.data).for_each(|(a, &b)| *a = q.mul(*a, b));
        Ok(())
    }

    /// `self += a * b` pointwise.
    pub fn dyadic_mac(&mut self, a: &Self, b: &Self) -> Result<()> {
        self.compatible(a)?;
        self.compatible(b)?;
        self.expect_domain(Domain::Evaluation)?;
        let q = self.ring.modulus;
        for ((acc, &x), &y) in self.data.iter_mut().zip(&a.data).zip(&b.data) {
            *acc = q.add(*acc, q.mul(x, y));
        }
        Ok(())
    }

    pub fn forward(mut self) -> Result<Self> {
        self.expect_domain(Domain::Coefficient)?;
        let seeds = TwiddleSeeds::new(&self.ring);
        ntt_forward(&mut self.data, &seeds);
        self.domain = Domain::Evaluation;
        Ok(self)
    }

    pub fn inverse(mut self) -> Result<Self> {
        self.expect_domain(Domain::Evaluation)?;
        let seeds = TwiddleSeeds::new(&self.ring);
        ntt_inverse(&mut self.data, &seeds);
        self.domain = Domain::Coefficient;
        Ok(self)
    }

    /// Product in `Z_q[x]/(x^n - c)` through the transform; any input domain.
    pub fn ring_mul(&self, other: &Self) -> Result<Self> {
        let to_eval = |p: &Self| match p.domain {
            Domain::Evaluation => Ok(p.clone()),
            Domain::Coefficient => p.clone().forward(),
        };
        let mut a = to_eval(self)?;
        a.dyadic_mul_assign(&to_eval(other)?)?;
        a.inverse()
    }

    /// Reinterprets the residues under a different modulus, reducing each.
    pub fn reduce_into(&self, target: &Ring) -> Result<Self> {
        self.expect_domain(Domain::Coefficient)?;
        if target.degree != self.ring.degree {
            return Err(Error::Mismatch("degree differs".into()));
        }
        let src = self.ring.modulus;
        let dst = target.modulus;
        let data = self.data.iter().map(|&x| dst.from_i64(src.center(x))).collect();
        Ok(ResiduePoly { ring: *target, domain: Domain::Coefficient, data })
    }
}

impl ResiduePoly {
    pub(crate) fn from_parts(ring: Ring, domain: Domain, data: Vec<u64>) -> Self {
        debug_assert_eq!(data.len(), ring.degree);
        Self { ring, domain, data }
    }
}
