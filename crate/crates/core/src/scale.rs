//! Exact ciphertext scale kept as a reduced product of word-sized factors.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scale {
    num: Vec<u64>,
    den: Vec<u64>,
}

impl Scale {
    pub fn one() -> Self {
        Self { num: Vec::new(), den: Vec::new() }
    }

    /// `2^bits`.
    pub fn pow2(bits: u32) -> Self {
        Self::from_factors(vec![2; bits as usize], Vec::new())
    }

    pub fn integer(k: u64) -> Self {
        Self::from_factors(vec![k], Vec::new())
    }

    pub fn from_factors(num: Vec<u64>, den: Vec<u64>) -> Self {
        let mut s = Self { num, den };
        s.normalize();
        s
    }

    pub fn numerator(&self) -> &[u64] {
        &self.num
    }

    pub fn denominator(&self) -> &[u64] {
        &self.den
    }

    fn normalize(&mut self) {
        self.num.retain(|&x| x != 1);
        self.den.retain(|&x| x != 1);
        self.num.sort_unstable();
        self.den.sort_unstable();
        let mut num = Vec::with_capacity(self.num.len());
        let mut den = std::mem::take(&mut self.den);
        for &x in &self.num {
            if let Some(pos) = den.iter().position(|&d| d == x) {
                den.remove(pos);
            } else {
                num.push(x);
            }
        }
        self.num = num;
        self.den = den;
    }

    pub fn mul(&self, other: &Scale) -> Scale {
        let mut num = self.num.clone();
        num.extend_from_slice(&other.num);
        let mut den = self.den.clone();
        den.extend_from_slice(&other.den);
        Self::from_factors(num, den)
    }

    pub fn div(&self, other: &Scale) -> Scale {
        self.mul(&other.recip())
    }

    pub fn recip(&self) -> Scale {
        Self { num: self.den.clone(), den: self.num.clone() }
    }

    /// Drops the factor `q` from the scale, as rescaling by `q` does.
    pub fn div_int(&self, q: u64) -> Scale {
        self.div(&Scale::integer(q))
    }

    pub fn mul_int(&self, k: u64) -> Scale {
        self.mul(&Scale::integer(k))
    }

    /// Equality of the rational values, independent of factorization.
    pub fn same_value(&self, other: &Scale) -> bool {
        let prod = |v: &[u64]| v.iter().fold(BigUint::one(), |acc, &x| acc * x);
        prod(&self.num) * prod(&other.den) == prod(&other.num) * prod(&self.den)
    }

    pub fn to_f64(&self) -> f64 {
        let prod = |v: &[u64]| v.iter().fold(BigUint::one(), |acc, &x| acc * x);
        let (n, d) = (prod(&self.num), prod(&self.den));
        // shift both into f64 range before dividing
        let shift = n.bits().max(d.bits()).saturating_sub(900);
        let nf = (&n >> shift).to_f64().unwrap_or(f64::INFINITY);
        let df = (&d >> shift).to_f64().unwrap_or(f64::INFINITY);
        nf / df
    }

    pub fn log2(&self) -> f64 {
        let n: f64 = self.num.iter().map(|&x| (x as f64).log2()).sum();
        let d: f64 = self.den.iter().map(|&x| (x as f64).log2()).sum();
        n - d
    }
}
