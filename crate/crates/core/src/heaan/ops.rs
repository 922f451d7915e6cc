use super::{Ciphertext, LimbPoly, RnsPoly};
use crate::keys::{EvalKeys, KeySwitchKey, Plaintext};
use crate::params::{Context, DegreeMode};
use crate::polyring::{automorphism_coeff, automorphism_eval};
use crate::{par, Error, Result};

fn same_shape(a: &Ciphertext, b: &Ciphertext) -> Result<()> {
    if a.level() != b.level() {
        return Err(Error::Mismatch(format!("levels {} and {}", a.level(), b.level())));
    }
    if a.mode() != b.mode() {
        return Err(Error::Mismatch("native and split ciphertexts mixed".into()));
    }
    Ok(())
}

fn same_scale(a: &Ciphertext, b: &Ciphertext) -> Result<()> {
    if !a.scale().same_value(b.scale()) {
        return Err(Error::Mismatch(format!("scales 2^{:.3} and 2^{:.3}", a.scale().log2(), b.scale().log2())));
    }
    Ok(())
}

fn combine(a: &Ciphertext, b: &Ciphertext, subtract: bool) -> Result<Ciphertext> {
    same_shape(a, b)?;
    same_scale(a, b)?;
    if a.parts().len() != b.parts().len() {
        return Err(Error::Mismatch("ciphertext degrees differ".into()));
    }
    let mut parts = a.parts().to_vec();
    for (x, y) in parts.iter_mut().zip(b.parts()) {
        if subtract {
            x.sub_assign(y)?;
        } else {
            x.add_assign(y)?;
        }
    }
    Ciphertext::new(parts, a.scale().clone())
}

pub fn add(a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
    combine(a, b, false)
}

pub fn sub(a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
    combine(a, b, true)
}

/// Tensor product; the result has three parts and needs relinearization.
pub fn mult(a: &Ciphertext, b: &Ciphertext) -> Result<Ciphertext> {
    same_shape(a, b)?;
    if a.degree() != 1 || b.degree() != 1 {
        return Err(Error::Unsupported("multiplying a ciphertext that is not relinearized".into()));
    }
    let (a0, a1) = (&a.parts()[0], &a.parts()[1]);
    let (b0, b1) = (&b.parts()[0], &b.parts()[1]);
    let d0 = a0.dyadic_mul(b0)?;
    let mut d1 = a0.dyadic_mul(b1)?;
    d1.add_assign(&a1.dyadic_mul(b0)?)?;
    let d2 = a1.dyadic_mul(b1)?;
    Ciphertext::new(vec![d0, d1, d2], a.scale().mul(b.scale()))
}

/// Removes the last limb: `x -> (x - [x]_last) / last` in every other limb.
///
/// The last limb is taken to coefficients, reduced centrally into every
/// remaining prime and subtracted before scaling by the inverse.
fn drop_last_limb(ctx: &Context, poly: &RnsPoly, last: usize) -> Result<RnsPoly> {
    let keep = poly.len() - 1;
    let mode = poly.mode();
    let tail = poly.limbs()[keep].to_coefficients()?;
    let dropped = ctx.modulus(last).value();
    let limbs = par::try_map_range(keep, |i| {
        let q = ctx.modulus(i);
        let mut out = poly.limbs()[i].clone();
        let correction = LimbPoly::from_coefficients(tail.reduce_into(ctx.ring(i))?, mode)?;
        out.sub_assign(&correction)?;
        out.scalar_mul_assign(q.inv(dropped)?);
        Ok(out)
    })?;
    RnsPoly::new(limbs)
}

/// Divides a polynomial over `q_0..q_{l-1}, p` by `p`, leaving `l` limbs.
pub fn mod_down(ctx: &Context, extended: &RnsPoly) -> Result<RnsPoly> {
    if extended.len() < 2 || extended.limbs().last().map(LimbPoly::modulus) != Some(ctx.base().special().value()) {
        return Err(Error::Mismatch("mod-down needs the special prime as its last limb".into()));
    }
    drop_last_limb(ctx, extended, ctx.special_index())
}

/// Divides by `q_{l-1}` and drops one level.
pub fn rescale(ctx: &Context, ct: &Ciphertext) -> Result<Ciphertext> {
    let l = ct.level();
    if l < 2 {
        return Err(Error::LevelExhausted(l));
    }
    let parts = ct.parts().iter().map(|p| drop_last_limb(ctx, p, l - 1)).collect::<Result<Vec<_>>>()?;
    Ciphertext::new(parts, ct.scale().div_int(ctx.modulus(l - 1).value()))
}

/// Key switching of `poly` at level `l`: returns `(u0, u1)` over `l` limbs
/// with `u0 + u1 s ~ poly * target`.
pub fn key_switch(ctx: &Context, poly: &RnsPoly, key: &KeySwitchKey) -> Result<(RnsPoly, RnsPoly)> {
    let l = poly.len();
    let mode = poly.mode();
    let special = ctx.special_index();
    if l > ctx.max_level() || key.digits() < l {
        return Err(Error::Mismatch(format!("key covers {} digits, input has {l}", key.digits())));
    }
    let digits = poly.to_coefficients()?;
    let targets: Vec<usize> = (0..l).chain([special]).collect();
    let accs = par::try_map_range(targets.len(), |k| {
        let j = targets[k];
        let ring = ctx.ring(j);
        let mut acc0 = LimbPoly::zero(ring, mode)?;
        let mut acc1 = LimbPoly::zero(ring, mode)?;
        for (i, digit) in digits.iter().enumerate() {
            let r = LimbPoly::from_coefficients(digit.reduce_into(ring)?, mode)?;
            acc0.dyadic_mac(&key.secret(i).limbs()[j], &r)?;
            acc1.dyadic_mac(&key.uniform(i).limbs()[j], &r)?;
        }
        Ok((acc0, acc1))
    })?;
    let (acc0, acc1): (Vec<_>, Vec<_>) = accs.into_iter().unzip();
    let u0 = mod_down(ctx, &RnsPoly::new(acc0)?)?;
    let u1 = mod_down(ctx, &RnsPoly::new(acc1)?)?;
    Ok((u0, u1))
}

/// Folds the third part back into a two-part ciphertext.
pub fn relinearize(ctx: &Context, ct: &Ciphertext, keys: &EvalKeys) -> Result<Ciphertext> {
    if ct.degree() != 2 {
        return Err(Error::Unsupported("relinearizing a ciphertext of degree 1".into()));
    }
    let key = keys.relin().ok_or_else(|| Error::Unsupported("no relinearization key".into()))?;
    let (u0, u1) = key_switch(ctx, &ct.parts()[2], key)?;
    let mut c0 = ct.parts()[0].clone();
    let mut c1 = ct.parts()[1].clone();
    c0.add_assign(&u0)?;
    c1.add_assign(&u1)?;
    Ciphertext::new(vec![c0, c1], ct.scale().clone())
}

pub fn mult_relin(ctx: &Context, a: &Ciphertext, b: &Ciphertext, keys: &EvalKeys) -> Result<Ciphertext> {
    relinearize(ctx, &mult(a, b)?, keys)
}

/// `5^steps mod 2n`, with steps taken modulo the slot count.
pub fn galois_element(degree: usize, steps: i64) -> usize {
    let slots = (degree / 2) as i64;
    let k = steps.rem_euclid(slots) as u64;
    let two_n = 2 * degree as u64;
    let mut g = 1u64;
    for _ in 0..k {
        g = g * 5 % two_n;
    }
    g as usize
}

fn apply_galois(poly: &RnsPoly, g: usize) -> Result<RnsPoly> {
    let limbs = par::try_map_range(poly.len(), |i| match &poly.limbs()[i] {
        LimbPoly::Native(p) => Ok(LimbPoly::Native(automorphism_eval(p, g)?)),
        split @ LimbPoly::Split(_) => {
            let coeffs = split.to_coefficients()?;
            LimbPoly::from_coefficients(automorphism_coeff(&coeffs, g)?, DegreeMode::Split)
        }
    })?;
    RnsPoly::new(limbs)
}

/// Moves slot `j + steps` to slot `j`.
pub fn rotate(ctx: &Context, ct: &Ciphertext, steps: i64, keys: &EvalKeys) -> Result<Ciphertext> {
    if ct.degree() != 1 {
        return Err(Error::Unsupported("rotating a ciphertext that is not relinearized".into()));
    }
    let g = galois_element(ctx.degree(), steps);
    if g == 1 {
        return Ok(ct.clone());
    }
    let key = keys.galois(g).ok_or_else(|| Error::Unsupported(format!("no Galois key for element {g}")))?;
    let c0 = apply_galois(&ct.parts()[0], g)?;
    let c1 = apply_galois(&ct.parts()[1], g)?;
    let (u0, u1) = key_switch(ctx, &c1, key)?;
    let mut out0 = c0;
    out0.add_assign(&u0)?;
    Ciphertext::new(vec![out0, u1], ct.scale().clone())
}

fn lift_plain(ctx: &Context, pt: &Plaintext, level: usize) -> Result<RnsPoly> {
    if pt.coeffs.len() != ctx.degree() {
        return Err(Error::Mismatch("plaintext degree differs from the context".into()));
    }
    RnsPoly::from_wide(ctx, &pt.coeffs, &(0..level).collect::<Vec<_>>())
}

pub fn mul_plain(ctx: &Context, ct: &Ciphertext, pt: &Plaintext) -> Result<Ciphertext> {
    let m = lift_plain(ctx, pt, ct.level())?;
    let parts = ct.parts().iter().map(|p| p.dyadic_mul(&m)).collect::<Result<Vec<_>>>()?;
    Ciphertext::new(parts, ct.scale().mul(&pt.scale))
}

pub fn add_plain(ctx: &Context, ct: &Ciphertext, pt: &Plaintext) -> Result<Ciphertext> {
    if !ct.scale().same_value(&pt.scale) {
        return Err(Error::Mismatch("plaintext scale differs".into()));
    }
    let m = lift_plain(ctx, pt, ct.level())?;
    let mut parts = ct.parts().to_vec();
    parts[0].add_assign(&m)?;
    Ciphertext::new(parts, ct.scale().clone())
}

/// Multiplies the message by `k`; the scale is unchanged.
pub fn mul_integer(ctx: &Context, ct: &Ciphertext, k: i64) -> Result<Ciphertext> {
    let factors: Vec<u64> = (0..ct.level()).map(|i| ctx.modulus(i).from_i64(k)).collect();
    let mut parts = ct.parts().to_vec();
    parts.iter_mut().for_each(|p| p.scalar_mul_assign(&factors));
    Ciphertext::new(parts, ct.scale().clone())
}

/// Multiplies by `k` and the scale by `k`, so the message is unchanged.
pub fn boost_scale(ctx: &Context, ct: &Ciphertext, k: u64) -> Result<Ciphertext> {
    let k_signed = i64::try_from(k).map_err(|_| Error::InvalidParams("boost factor too large".into()))?;
    let mut out = mul_integer(ctx, ct, k_signed)?;
    out.set_scale(ct.scale().mul_int(k));
    Ok(out)
}

/// Discards limbs above `level`.
pub fn drop_to_level(ct: &Ciphertext, level: usize) -> Result<Ciphertext> {
    if level == 0 || level > ct.level() {
        return Err(Error::LevelExhausted(level));
    }
    let mut parts = ct.parts().to_vec();
    parts.iter_mut().for_each(|p| p.truncate(level));
    Ciphertext::new(parts, ct.scale().clone())
}
