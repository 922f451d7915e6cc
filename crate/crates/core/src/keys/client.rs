use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::RngCore;

use super::encoding::{Encoder, Plaintext};
use super::keygen::{PublicKey, SecretKey};
use super::sampling::{self, GaussianTable};
use crate::heaan::{crt_compose, Ciphertext, RnsPoly};
use crate::params::Context;
use crate::{Error, Result};

/// Public-key encryption at `level`: `(r b + e0 + m, r a + e1)` with ternary `r`.
pub fn encrypt(ctx: &Context, pk: &PublicKey, pt: &Plaintext, level: usize, rng: &mut impl RngCore) -> Result<Ciphertext> {
    if level == 0 || level > ctx.max_level() {
        return Err(Error::LevelExhausted(level));
    }
    if pt.coeffs.len() != ctx.degree() {
        return Err(Error::Mismatch("plaintext degree differs from the context".into()));
    }
    let n = ctx.degree();
    let indices: Vec<usize> = (0..level).collect();
    let g = GaussianTable::standard(ctx.params().sigma);
    let r = RnsPoly::from_signed(ctx, &sampling::ternary(rng, n), &indices)?;
    let e0 = RnsPoly::from_signed(ctx, &g.sample_vec(rng, n), &indices)?;
    let e1 = RnsPoly::from_signed(ctx, &g.sample_vec(rng, n), &indices)?;
    let m = RnsPoly::from_wide(ctx, &pt.coeffs, &indices)?;
    let mut b = pk.b.clone();
    let mut a = pk.a.clone();
    b.truncate(level);
    a.truncate(level);
    let mut c0 = r.dyadic_mul(&b)?;
    c0.add_assign(&e0)?;
    c0.add_assign(&m)?;
    let mut c1 = r.dyadic_mul(&a)?;
    c1.add_assign(&e1)?;
    Ciphertext::new(vec![c0, c1], pt.scale.clone())
}

/// Coefficients of `c0 + c1 s (+ c2 s^2)` divided by the scale.
pub fn decrypt_coeffs(ctx: &Context, sk: &SecretKey, ct: &Ciphertext) -> Result<Vec<f64>> {
    let l = ct.level();
    let mut s = sk.eval().clone();
    s.truncate(l);
    let mut acc = ct.parts()[0].clone();
    let mut power = s.clone();
    for part in &ct.parts()[1..] {
        acc.add_assign(&part.dyadic_mul(&power)?)?;
        power = power.dyadic_mul(&s)?;
    }
    let ints = crt_compose(&acc.to_coefficients()?)?;
    let scale = ct.scale().to_f64();
    debug_assert_eq!(ints.len(), ctx.degree());
    Ok(ints.iter().map(|x| x.to_f64().unwrap_or(f64::NAN) / scale).collect())
}

/// Slot values of a ciphertext.
pub fn decrypt(ctx: &Context, sk: &SecretKey, ct: &Ciphertext) -> Result<Vec<Complex64>> {
    let coeffs = decrypt_coeffs(ctx, sk, ct)?;
    Encoder::new(ctx.degree())?.decode(&coeffs)
}
