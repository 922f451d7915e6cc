use std::collections::BTreeMap;

use rand::RngCore;

use super::sampling::{self, GaussianTable};
use super::trivium::{StreamTag, Trivium};
use crate::heaan::{LimbPoly, RnsPoly};
use crate::params::Context;
use crate::polyring::{automorphism_coeff, Domain};
use crate::{par, Error, Result};

/// Galois tag of the relinearization key.
pub const RELIN_TAG: u32 = 0;

const LABEL_SECRET: u64 = 1;
const LABEL_PK_ERROR: u64 = 2;
const LABEL_PK_SEED: u64 = 3;
const LABEL_KSK_SEED: u64 = 1 << 32;
const LABEL_KSK_ERROR: u64 = 2 << 32;
const COMPONENT_PK: u16 = 0;
const COMPONENT_KSK: u16 = 1;

/// Ternary secret with its transform over every prime, special included.
#[derive(Clone, Debug)]
pub struct SecretKey {
    coeffs: Vec<i64>,
    eval: RnsPoly,
}

impl SecretKey {
    pub fn from_coeffs(ctx: &Context, coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() != ctx.degree() || coeffs.iter().any(|c| !(-1..=1).contains(c)) {
            return Err(Error::Malformed("secret must be ternary of full degree".into()));
        }
        let eval = RnsPoly::from_signed(ctx, &coeffs, &all_indices(ctx))?;
        Ok(Self { coeffs, eval })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Limbs over `q_0..q_{L-1}, p`.
    pub fn eval(&self) -> &RnsPoly {
        &self.eval
    }
}

#[derive(Clone, Debug)]
pub struct PublicKey {
    pub b: RnsPoly,
    pub a: RnsPoly,
}

/// Key-switching key to a target `t`, one digit per ciphertext prime.
///
/// Digit `i` is `(b_i, a_i)` over every prime with
/// `b_i = -a_i s + e_i + [j = i] p t`. The `a_i` are expanded from the seed and
/// can be regenerated, so only `b_i` is ever stored.
#[derive(Clone, Debug)]
pub struct KeySwitchKey {
    seed: u64,
    tag: u32,
    secret: Vec<RnsPoly>,
    uniform: Vec<RnsPoly>,
}

impl KeySwitchKey {
    /// Rebuilds a key from its seed, tag and stored secret component.
    pub fn from_secret(ctx: &Context, seed: u64, tag: u32, secret: Vec<RnsPoly>) -> Result<Self> {
        if secret.len() != ctx.max_level() || secret.iter().any(|s| s.len() != ctx.max_level() + 1) {
            return Err(Error::Malformed("key-switching key shape does not match the parameters".into()));
        }
        let uniform = par::try_map_range(ctx.max_level(), |i| expand_uniform(ctx, seed, i, tag))?;
        Ok(Self { seed, tag, secret, uniform })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The Galois element, or [`RELIN_TAG`].
    pub fn tag(&self) -> u32 {
        self.tag
    }

    pub fn digits(&self) -> usize {
        self.secret.len()
    }

    pub fn secret(&self, i: usize) -> &RnsPoly {
        &self.secret[i]
    }

    pub fn uniform(&self, i: usize) -> &RnsPoly {
        &self.uniform[i]
    }

    pub fn secret_parts(&self) -> &[RnsPoly] {
        &self.secret
    }
}

/// Relinearization and rotation keys.
#[derive(Clone, Debug, Default)]
pub struct EvalKeys {
    relin: Option<KeySwitchKey>,
    galois: BTreeMap<usize, KeySwitchKey>,
}

impl EvalKeys {
    pub fn relin(&self) -> Option<&KeySwitchKey> {
        self.relin.as_ref()
    }

    pub fn galois(&self, g: usize) -> Option<&KeySwitchKey> {
        self.galois.get(&g)
    }

    pub fn galois_elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.galois.keys().copied()
    }

    pub fn insert(&mut self, key: KeySwitchKey) {
        if key.tag == RELIN_TAG {
            self.relin = Some(key);
        } else {
            self.galois.insert(key.tag as usize, key);
        }
    }

    pub fn all(&self) -> impl Iterator<Item = &KeySwitchKey> {
        self.relin.iter().chain(self.galois.values())
    }
}

fn all_indices(ctx: &Context) -> Vec<usize> {
    (0..=ctx.max_level()).collect()
}

/// Digit `i` of the uniform component, drawn in the evaluation domain.
fn expand_uniform(ctx: &Context, seed: u64, i: usize, tag: u32) -> Result<RnsPoly> {
    let limbs = (0..=ctx.max_level())
        .map(|j| {
            let ring = ctx.ring(j);
            let t = StreamTag { i: i as u16, j: j as u16, component: COMPONENT_KSK, extra: tag };
            LimbPoly::from_eval(ring, Trivium::uniform_vec(seed, t, ring.modulus().value(), ring.degree()), ctx.mode())
        })
        .collect::<Result<_>>()?;
    RnsPoly::new(limbs)
}

/// Every key derives from one master seed; each purpose has its own stream.
pub struct KeyGenerator<'a> {
    ctx: &'a Context,
    master: u64,
    gaussian: GaussianTable,
}

impl<'a> KeyGenerator<'a> {
    pub fn new(ctx: &'a Context, master: u64) -> Self {
        Self { ctx, master, gaussian: GaussianTable::standard(ctx.params().sigma) }
    }

    fn sub_seed(&self, label: u64) -> u64 {
        sampling::stream(self.master, label).next_u64()
    }

    pub fn secret_key(&self) -> Result<SecretKey> {
        let mut rng = sampling::stream(self.master, LABEL_SECRET);
        SecretKey::from_coeffs(self.ctx, sampling::ternary(&mut rng, self.ctx.degree()))
    }

    pub fn public_key(&self, sk: &SecretKey) -> Result<PublicKey> {
        let ctx = self.ctx;
        let l = ctx.max_level();
        let seed = self.sub_seed(LABEL_PK_SEED);
        let a_limbs = (0..l)
            .map(|j| {
                let ring = ctx.ring(j);
                let t = StreamTag { i: 0, j: j as u16, component: COMPONENT_PK, extra: 0 };
                LimbPoly::from_eval(ring, Trivium::uniform_vec(seed, t, ring.modulus().value(), ring.degree()), ctx.mode())
            })
            .collect::<Result<_>>()?;
        let a = RnsPoly::new(a_limbs)?;
        let mut rng = sampling::stream(self.master, LABEL_PK_ERROR);
        let e = self.gaussian.sample_vec(&mut rng, ctx.degree());
        let mut b = RnsPoly::from_signed(ctx, &e, &(0..l).collect::<Vec<_>>())?;
        let mut s = sk.eval().clone();
        s.truncate(l);
        b.sub_assign(&a.dyadic_mul(&s)?)?;
        Ok(PublicKey { b, a })
    }

    /// Key from `s` to the polynomial `target`, given over every prime.
    pub fn switch_key(&self, sk: &SecretKey, target: &RnsPoly, tag: u32) -> Result<KeySwitchKey> {
        let ctx = self.ctx;
        let big_l = ctx.max_level();
        let special = ctx.special_index();
        let seed = self.sub_seed(LABEL_KSK_SEED | u64::from(tag));
        let mut rng = sampling::stream(self.master, LABEL_KSK_ERROR | u64::from(tag));
        let errors: Vec<Vec<i64>> = (0..big_l).map(|_| self.gaussian.sample_vec(&mut rng, ctx.degree())).collect();
        let p = ctx.modulus(special).value();
        let secret = par::try_map_range(big_l, |i| {
            let a = expand_uniform(ctx, seed, i, tag)?;
            let mut b = RnsPoly::from_signed(ctx, &errors[i], &all_indices(ctx))?;
            b.sub_assign(&a.dyadic_mul(sk.eval())?)?;
            let mut lift = target.limbs()[i].clone();
            lift.scalar_mul_assign(ctx.modulus(i).reduce(p));
            b.limbs_mut()[i].add_assign(&lift)?;
            Ok(b)
        })?;
        KeySwitchKey::from_secret(ctx, seed, tag, secret)
    }

    pub fn relin_key(&self, sk: &SecretKey) -> Result<KeySwitchKey> {
        let s2 = sk.eval().dyadic_mul(sk.eval())?;
        self.switch_key(sk, &s2, RELIN_TAG)
    }

    /// Key from `s(x^g)` back to `s`.
    pub fn galois_key(&self, sk: &SecretKey, g: usize) -> Result<KeySwitchKey> {
        let ctx = self.ctx;
        let ring = ctx.ring(0);
        let permuted = automorphism_coeff(&ring.from_signed(sk.coeffs())?, g)?;
        let signed: Vec<i64> = permuted.data().iter().map(|&x| ring.modulus().center(x)).collect();
        debug_assert_eq!(permuted.domain(), Domain::Coefficient);
        let target = RnsPoly::from_signed(ctx, &signed, &all_indices(ctx))?;
        let tag = u32::try_from(g).map_err(|_| Error::InvalidParams("Galois element too large".into()))?;
        self.switch_key(sk, &target, tag)
    }

    /// Relinearization key plus one Galois key per rotation step.
    pub fn eval_keys(&self, sk: &SecretKey, rotations: &[i64]) -> Result<EvalKeys> {
        let mut keys = EvalKeys::default();
        keys.insert(self.relin_key(sk)?);
        for &r in rotations {
            let g = crate::heaan::galois_element(self.ctx.degree(), r);
            if g != 1 && keys.galois(g).is_none() {
                keys.insert(self.galois_key(sk, g)?);
            }
        }
        Ok(keys)
    }
}
