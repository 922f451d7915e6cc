//! Word-sized modular arithmetic, prime search, and roots of unity.
//!
//! Every modulus is an odd prime below 2^62. Products are reduced either
//! with a shift-and-add pass for moduli of the form 2^k plus a few signed
//! powers of two, or with 128-bit Barrett reduction.

use crate::{Error, Result};

/// A modulus written as `2^lead + sum(sign * 2^exp)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SparseForm {
    lead: u32,
    // low part `c` with `q = 2^lead + c`; |c| < 2^(lead - 2)
    low: i128,
}

impl SparseForm {
    /// Builds the form from the leading exponent and signed lower terms.
    pub fn new(lead: u32, terms: &[(i8, u32)]) -> Result<Self> {
        if !(3..=62).contains(&lead) {
            return Err(Error::InvalidModulus(format!("leading exponent {lead} out of range")));
        }
        let mut low: i128 = 0;
        for &(sign, exp) in terms {
            if exp >= lead || (sign != 1 && sign != -1) {
                return Err(Error::InvalidModulus(format!("bad term ({sign}, {exp})")));
            }
            low += i128::from(sign) << exp;
        }
        if low.unsigned_abs() >= 1u128 << (lead - 2) {
            return Err(Error::InvalidModulus("lower terms too large for sparse reduction".into()));
        }
        Ok(Self { lead, low })
    }

    pub fn value(&self) -> u64 {
        ((1i128 << self.lead) + self.low) as u64
    }

    pub fn lead(&self) -> u32 {
        self.lead
    }

    /// Reduces `x` using `2^lead = -low (mod q)`.
    #[inline]
    fn reduce(&self, x: u128) -> u64 {
        let q = self.value() as i128;
        let mask = (1u128 << self.lead) - 1;
        // first fold in unsigned space so the i128 never overflows
        let hi = (x >> self.lead) as i128;
        let lo = (x & mask) as i128;
        let mut t = lo - hi * self.low;
        loop {
            let bound = 1i128 << (self.lead + 1);
            if t >= 0 && t < bound {
                break;
            }
            let hi = t >> self.lead;
            let lo = t & (mask as i128);
            t = lo - hi * self.low;
        }
        while t >= q {
            t -= q;
        }
        t as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reduction {
    Sparse(SparseForm),
    Barrett,
}

/// An odd prime modulus with its reduction constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    value: u64,
    ratio: u128,
    reduction: Reduction,
}

impl Modulus {
    /// Generic modulus reduced with Barrett.
    pub fn new(value: u64) -> Result<Self> {
        if value < 3 || value % 2 == 0 || value >= 1 << 62 {
            return Err(Error::InvalidModulus(format!("{value} is not an odd value in [3, 2^62)")));
        }
        Ok(Self { value, ratio: u128::MAX / u128::from(value), reduction: Reduction::Barrett })
    }

    /// Modulus with the shift-and-add reduction path.
    pub fn sparse(form: SparseForm) -> Result<Self> {
        let mut m = Self::new(form.value())?;
        m.reduction = Reduction::Sparse(form);
        Ok(m)
    }

    /// Same modulus, forced onto the Barrett path.
    pub fn as_barrett(&self) -> Self {
        Self { reduction: Reduction::Barrett, ..*self }
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn bits(&self) -> u32 {
        64 - self.value.leading_zeros()
    }

    pub fn reduction(&self) -> Reduction {
        self.reduction
    }

    #[inline]
    pub fn reduce_u128(&self, x: u128) -> u64 {
        match self.reduction {
            Reduction::Sparse(f) => f.reduce(x),
            Reduction::Barrett => self.barrett(x),
        }
    }

    #[inline]
    fn barrett(&self, x: u128) -> u64 {
        let q = u128::from(self.value);
        let est = mul_hi_u128(x, self.ratio);
        let mut r = x.wrapping_sub(est.wrapping_mul(q));
        while r >= q {
            r -= q;
        }
        r as u64
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        if x < self.value {
            x
        } else {
            x % self.value
        }
    }

    /// Maps a signed integer to `[0, q)`.
    #[inline]
    pub fn from_i64(&self, x: i64) -> u64 {
        let r = (i128::from(x)).rem_euclid(i128::from(self.value));
        r as u64
    }

    #[inline]
    pub fn from_i128(&self, x: i128) -> u64 {
        x.rem_euclid(i128::from(self.value)) as u64
    }

    /// Centered representative in `(-q/2, q/2]`.
    #[inline]
    pub fn center(&self, x: u64) -> i64 {
        if x > self.value / 2 {
            -((self.value - x) as i64)
        } else {
            x as i64
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.value {
            s - self.value
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.value - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.value - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce_u128(u128::from(a) * u128::from(b))
    }

    /// `x / 2 mod q`.
    #[inline]
    pub fn half(&self, x: u64) -> u64 {
        if x & 1 == 1 {
            (x >> 1) + (self.value >> 1) + 1
        } else {
            x >> 1
        }
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.value;
        let mut b = self.reduce(base);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Inverse for a prime modulus.
    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = self.reduce(a);
        if a == 0 {
            return Err(Error::NotInvertible { value: a, modulus: self.value });
        }
        Ok(self.pow(a, self.value - 2))
    }

    /// Primitive root of unity of the given power-of-two order.
    ///
    /// Picks the smallest quadratic non-residue `g` and returns
    /// `g^((q-1)/order)`, so the result is deterministic.
    pub fn root_of_unity(&self, order: u64) -> Result<u64> {
        let q = self.value;
        if order < 2 || !order.is_power_of_two() || (q - 1) % order != 0 {
            return Err(Error::NoRootOfUnity { order, modulus: q });
        }
        let g = (2..q)
            .find(|&g| self.pow(g, (q - 1) / 2) == q - 1)
            .ok_or(Error::NoRootOfUnity { order, modulus: q })?;
        Ok(self.pow(g, (q - 1) / order))
    }
}

/// High 128 bits of a 128x128 product.
#[inline]
fn mul_hi_u128(a: u128, b: u128) -> u128 {
    let (a1, a0) = (a >> 64, a & u128::from(u64::MAX));
    let (b1, b0) = (b >> 64, b & u128::from(u64::MAX));
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & u128::from(u64::MAX)) + (p10 & u128::from(u64::MAX));
    p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64)
}

const SMALL_PRIMES: [u64; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307,
    311,
];

/// Miller-Rabin over the first 64 primes as bases; exact below 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mulmod = |a: u64, b: u64| ((u128::from(a) * u128::from(b)) % u128::from(n)) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &SMALL_PRIMES {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Layout of an RNS base: one wide first prime, equal-width primes after it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseSpec {
    /// Every prime is `1 mod congruence`; a power of two.
    pub congruence: u64,
    pub first_bits: u32,
    pub other_bits: u32,
    /// Total number of primes including the special prime.
    pub count: usize,
    /// Try the sparse 60-bit prime `2^59 + 2^25 + 2^22 - 2^20 + 1` first.
    pub sparse_first: bool,
}

/// The sparse first prime used when its 2-adic order allows it.
pub fn sparse_q0() -> SparseForm {
    SparseForm::new(59, &[(1, 25), (1, 22), (-1, 20), (1, 0)]).expect("constant form")
}

/// Ordered primes `q_0, ..., q_{L-1}` followed by the special prime `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnsBase {
    moduli: Vec<Modulus>,
}

impl RnsBase {
    pub fn from_moduli(moduli: Vec<Modulus>) -> Result<Self> {
        if moduli.len() < 2 {
            return Err(Error::InvalidModulus("an RNS base needs at least two primes".into()));
        }
        for (i, a) in moduli.iter().enumerate() {
            if moduli[..i].iter().any(|b| b.value() == a.value()) {
                return Err(Error::InvalidModulus(format!("duplicate prime {}", a.value())));
            }
        }
        Ok(Self { moduli })
    }

    /// Deterministic prime search.
    ///
    /// Primes are taken downward from `2^bits`, so each prime has exactly the
    /// requested bit width and the product bit length equals the width sum.
    pub fn generate(spec: &BaseSpec) -> Result<Self> {
        if spec.count < 2 || !spec.congruence.is_power_of_two() {
            return Err(Error::InvalidParams("base needs >= 2 primes and a power-of-two congruence".into()));
        }
        let mut moduli = Vec::with_capacity(spec.count);
        let q0 = sparse_q0();
        if spec.sparse_first
            && spec.first_bits == 60
            && (q0.value() - 1) % spec.congruence == 0
        {
            moduli.push(Modulus::sparse(q0)?);
        } else {
            let p = search_down(spec.first_bits, spec.congruence, &[])?;
            moduli.push(Modulus::new(p)?);
        }
        while moduli.len() < spec.count {
            let taken: Vec<u64> = moduli.iter().map(Modulus::value).collect();
            let p = search_down(spec.other_bits, spec.congruence, &taken)?;
            moduli.push(Modulus::new(p)?);
        }
        Self::from_moduli(moduli)
    }

    /// Ciphertext primes `q_0..q_{L-1}`.
    pub fn ciphertext(&self) -> &[Modulus] {
        &self.moduli[..self.moduli.len() - 1]
    }

    pub fn special(&self) -> Modulus {
        *self.moduli.last().expect("non-empty")
    }

    /// All primes, special last.
    pub fn all(&self) -> &[Modulus] {
        &self.moduli
    }

    /// Number of ciphertext primes `L`.
    pub fn max_level(&self) -> usize {
        self.moduli.len() - 1
    }

    pub fn bit_sum(&self) -> u32 {
        self.moduli.iter().map(Modulus::bits).sum()
    }

    /// Bit length of the product of every prime.
    pub fn product_bits(&self) -> u64 {
        let mut prod = num_bigint::BigUint::from(1u32);
        for m in &self.moduli {
            prod *= m.value();
        }
        prod.bits()
    }
}

fn search_down(bits: u32, congruence: u64, taken: &[u64]) -> Result<u64> {
    if !(20..=62).contains(&bits) || (1u64 << (bits - 1)) <= congruence {
        return Err(Error::InvalidParams(format!("cannot search {bits}-bit primes")));
    }
    let floor = 1u64 << (bits - 1);
    // largest value = 1 mod congruence below 2^bits
    let mut cand = (1u64 << bits) - congruence + 1;
    while cand > floor {
        if !taken.contains(&cand) && is_prime(cand) {
            return Ok(cand);
        }
        cand -= congruence;
    }
    Err(Error::InvalidParams(format!("no {bits}-bit prime = 1 mod {congruence} left")))
}
