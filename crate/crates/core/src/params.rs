//! Parameter sets and the derived evaluation context.

use crate::modarith::{BaseSpec, Modulus, RnsBase};
use crate::polyring::Ring;
use crate::{Error, Result};
use sha2::{Digest, Sha256};

/// How a ciphertext polynomial maps onto degree-`hw` transforms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DegreeMode {
    /// Ring degree equals the transform size.
    Native,
    /// Ring degree is twice the transform size; every limb is held as a
    /// plus/minus pair.
    Split,
}

impl DegreeMode {
    pub fn name(self) -> &'static str {
        match self {
            DegreeMode::Native => "native",
            DegreeMode::Split => "split",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet {
    pub name: String,
    /// log2 of the ciphertext ring degree.
    pub log_degree: u32,
    /// log2 of the transform size the arithmetic is organised around.
    pub log_hw_degree: u32,
    pub mode: DegreeMode,
    /// Primes including the special prime.
    pub moduli: usize,
    pub first_bits: u32,
    pub other_bits: u32,
    pub log_scale: u32,
    pub sigma: f64,
    /// Every prime is `1 mod 2^log_congruence`.
    pub log_congruence: u32,
}

impl ParamSet {
    /// `N = 2^14`, 8 primes, 438-bit `pQ`.
    pub fn set1() -> Self {
        Self::custom("set1", 14, 14, 8, 40)
    }

    /// `2N = 2^15` on `2^14` transforms, 10 primes, 546-bit `pQ`.
    pub fn set2() -> Self {
        Self::custom("set2", 15, 14, 10, 40)
    }

    /// Same primes as [`set2`](Self::set2) with native degree-`2^15`
    /// transforms; a reference for the split path.
    pub fn set2_native() -> Self {
        Self::set2().native_reference()
    }

    /// Native twin of a split set: same primes, full-degree transforms.
    pub fn native_reference(&self) -> Self {
        let mut p = self.clone();
        p.name = format!("{}-native", self.name);
        p.log_hw_degree = self.log_degree;
        p.mode = DegreeMode::Native;
        p
    }

    /// `N = 2^14`, 7 primes, 384-bit `pQ`.
    pub fn logreg() -> Self {
        Self::custom("logreg", 14, 14, 7, 54)
    }

    /// Any shape; split mode whenever `log_degree > log_hw_degree`.
    pub fn custom(name: &str, log_degree: u32, log_hw_degree: u32, moduli: usize, log_scale: u32) -> Self {
        Self {
            name: name.into(),
            log_degree,
            log_hw_degree,
            mode: if log_degree > log_hw_degree { DegreeMode::Split } else { DegreeMode::Native },
            moduli,
            first_bits: 60,
            other_bits: 54,
            log_scale,
            sigma: 3.2,
            log_congruence: log_hw_degree.max(log_degree - 1) + 2,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "set1" | "set-1" => Ok(Self::set1()),
            "set2" | "set-2" => Ok(Self::set2()),
            "set2-native" => Ok(Self::set2_native()),
            "logreg" => Ok(Self::logreg()),
            _ => Err(Error::InvalidParams(format!("unknown parameter set {name:?}"))),
        }
    }

    pub fn degree(&self) -> usize {
        1 << self.log_degree
    }

    pub fn hw_degree(&self) -> usize {
        1 << self.log_hw_degree
    }

    /// Number of ciphertext primes `L`.
    pub fn max_level(&self) -> usize {
        self.moduli - 1
    }

    pub fn slots(&self) -> usize {
        self.degree() / 2
    }

    pub fn log_pq(&self) -> u32 {
        self.first_bits + (self.moduli as u32 - 1) * self.other_bits
    }

    pub fn validate(&self) -> Result<()> {
        let ok_mode = match self.mode {
            DegreeMode::Native => self.log_degree == self.log_hw_degree,
            DegreeMode::Split => self.log_degree == self.log_hw_degree + 1,
        };
        if !ok_mode {
            return Err(Error::InvalidParams(format!(
                "degree 2^{} does not fit {} mode on 2^{} transforms",
                self.log_degree,
                self.mode.name(),
                self.log_hw_degree
            )));
        }
        if !(3..=16).contains(&self.log_hw_degree) || self.moduli < 2 || self.log_congruence < self.log_degree + 1 {
            return Err(Error::InvalidParams("unsupported degree or prime count".into()));
        }
        if self.log_scale == 0 || self.log_scale >= self.other_bits.max(self.first_bits) {
            return Err(Error::InvalidParams(format!("scale 2^{} does not fit the primes", self.log_scale)));
        }
        Ok(())
    }

        pub fn base_spec(&self) -> BaseSpec {
        BaseSpec {
            congruence: 1u64 << self.log_congruence,
            first_bits: self.first_bits,
            other_bits: self.other_bits,
            count: self.moduli,
            sparse_first: true,
        }
    }
}

/// Everything derived from a [`ParamSet`]: primes and one standard ring of
/// full degree per prime.
#[derive(Clone, Debug)]
pub struct Context {
    params: ParamSet,
    base: RnsBase,
    rings: Vec<Ring>,
    fingerprint: u64,
}

impl Context {
    pub fn new(params: ParamSet) -> Result<Self> {
        params.validate()?;
        let base = RnsBase::generate(&params.base_spec())?;
        let n = params.degree();
        let rings = base
            .all()
            .iter()
            .map(|&q| Ring::standard(q, n, q.root_of_unity(2 * n as u64)?))
            .collect::<Result<Vec<_>>>()?;
        let fingerprint = fingerprint(&params, &base);
        Ok(Self { params, base, rings, fingerprint })
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn base(&self) -> &RnsBase {
        &self.base
    }

    pub fn mode(&self) -> DegreeMode {
        self.params.mode
    }

    pub fn degree(&self) -> usize {
        self.params.degree()
    }

    pub fn max_level(&self) -> usize {
        self.base.max_level()
    }

    /// Ring of extended index `j`: `q_j` for `j < L`, `p` for `j = L`.
    pub fn ring(&self, j: usize) -> &Ring {
        &self.rings[j]
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn modulus(&self, j: usize) -> Modulus {
        self.rings[j].modulus()
    }

    /// Index of the special prime.
    pub fn special_index(&self) -> usize {
        self.rings.len() - 1
    }

    /// Stable 64-bit digest of the parameters and derived primes.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }
}

fn fingerprint(params: &ParamSet, base: &RnsBase) -> u64 {
    let mut h = Sha256::new();
    h.update(format!(
        "{}|{}|{}|{}|{}|{}|{}",
        params.log_degree,
        params.log_hw_degree,
        params.mode.name(),
        params.moduli,
        params.log_scale,
        params.sigma,
        params.log_congruence
    ));
    for q in base.all() {
        h.update(q.value().to_le_bytes());
    }
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}
