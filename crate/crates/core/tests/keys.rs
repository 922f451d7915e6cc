use std::collections::HashSet;

use flexhe::heaan::{crt_compose, RnsPoly};
use flexhe::keys::sampling::{self, GaussianTable};
use flexhe::keys::{encrypt, Encoder, KeyGenerator, KeySwitchKey, SecretKey, StreamTag, Trivium, RELIN_TAG};
use flexhe::params::{Context, ParamSet};
use flexhe::scale::Scale;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;

fn toy(split: bool) -> Context {
    let p = if split { ParamSet::custom("toy-split", 6, 5, 4, 40) } else { ParamSet::custom("toy", 5, 5, 4, 40) };
    Context::new(p).unwrap()
}

/// Centered coefficients of `b_i + a_i s - p [j = i] t` per limb.
fn key_errors(ctx: &Context, sk: &SecretKey, key: &KeySwitchKey, target: &RnsPoly) -> Vec<Vec<Vec<i64>>> {
    let p = ctx.base().special().value();
    (0..key.digits())
        .map(|i| {
            let mut acc = key.secret(i).clone();
            acc.add_assign(&key.uniform(i).dyadic_mul(sk.eval()).unwrap()).unwrap();
            let mut lift = target.limbs()[i].clone();
            lift.scalar_mul_assign(ctx.modulus(i).reduce(p));
            acc.limbs_mut()[i].sub_assign(&lift).unwrap();
            acc.to_coefficients()
                .unwrap()
                .iter()
                .map(|limb| limb.data().iter().map(|&x| limb.modulus().center(x)).collect())
                .collect()
        })
        .collect()
}

fn check_key(ctx: &Context, sk: &SecretKey, key: &KeySwitchKey, target: &RnsPoly) {
    for limbs in key_errors(ctx, sk, key, target) {
        assert!(limbs.iter().all(|e| e == &limbs[0]), "error differs between primes");
        assert!(limbs[0].iter().all(|e| e.abs() <= 19));
        assert!(limbs[0].iter().any(|&e| e != 0));
    }
}

#[test]
fn switching_keys_hide_the_target_under_small_error() {
    for ctx in [toy(false), toy(true), Context::new(ParamSet::set1()).unwrap()] {
        let kg = KeyGenerator::new(&ctx, 5);
        let sk = kg.secret_key().unwrap();
        let relin = kg.relin_key(&sk).unwrap();
        assert_eq!(relin.tag(), RELIN_TAG);
        assert_eq!(relin.digits(), ctx.max_level());
        check_key(&ctx, &sk, &relin, &sk.eval().dyadic_mul(sk.eval()).unwrap());
        if ctx.degree() <= 64 {
            let g = flexhe::heaan::galois_element(ctx.degree(), 1);
            let gk = kg.galois_key(&sk, g).unwrap();
            let ring = ctx.ring(0);
            let perm = flexhe::polyring::automorphism_coeff(&ring.from_signed(sk.coeffs()).unwrap(), g).unwrap();
            let signed: Vec<i64> = perm.data().iter().map(|&x| ring.modulus().center(x)).collect();
            let all: Vec<usize> = (0..=ctx.max_level()).collect();
            check_key(&ctx, &sk, &gk, &RnsPoly::from_signed(&ctx, &signed, &all).unwrap());
        }
    }
}

#[test]
fn uniform_part_regenerates_from_seed() {
    let ctx = toy(true);
    let kg = KeyGenerator::new(&ctx, 5);
    let sk = kg.secret_key().unwrap();
    let key = kg.relin_key(&sk).unwrap();
    let rebuilt = KeySwitchKey::from_secret(&ctx, key.seed(), key.tag(), key.secret_parts().to_vec()).unwrap();
    for i in 0..key.digits() {
        assert_eq!(rebuilt.uniform(i), key.uniform(i));
    }
    let other = KeySwitchKey::from_secret(&ctx, key.seed() ^ 1, key.tag(), key.secret_parts().to_vec()).unwrap();
    assert_ne!(other.uniform(0), key.uniform(0));
    assert!(KeySwitchKey::from_secret(&ctx, 1, 0, key.secret_parts()[1..].to_vec()).is_err());
}

#[test]
fn generation_is_deterministic_per_master_seed() {
    let ctx = toy(false);
    let a = KeyGenerator::new(&ctx, 9);
    let b = KeyGenerator::new(&ctx, 9);
    let sa = a.secret_key().unwrap();
    assert_eq!(sa.coeffs(), b.secret_key().unwrap().coeffs());
    assert_ne!(sa.coeffs(), KeyGenerator::new(&ctx, 10).secret_key().unwrap().coeffs());
    assert_eq!(a.public_key(&sa).unwrap().b, b.public_key(&sa).unwrap().b);
    assert!(sa.coeffs().iter().all(|c| (-1..=1).contains(c)));
    assert!(SecretKey::from_coeffs(&ctx, vec![2; ctx.degree()]).is_err());
}

#[test]
fn stream_tags_give_disjoint_streams() {
    let mut heads = HashSet::new();
    let mut ivs = HashSet::new();
    let mut count = 0;
    for i in 0..12u16 {
        for j in 0..12u16 {
            for component in 0..2u16 {
                for extra in [0u32, 5, 25, 1 << 20] {
                    let tag = StreamTag { i, j, component, extra };
                    assert!(ivs.insert(tag.bits()));
                    let mut t = Trivium::new(77, tag);
                    assert!(heads.insert([t.next_u64(), t.next_u64()]));
                    count += 1;
                }
            }
        }
    }
    assert!(count >= 1000);
    let tag = StreamTag { i: 0, j: 0, component: 0, extra: 0 };
    assert_ne!(Trivium::new(1, tag).next_u64(), Trivium::new(2, tag).next_u64());
}

#[test]
fn uniform_residues_are_flat() {
    let q = 576460752303423489u64;
    let tag = StreamTag { i: 1, j: 2, component: 1, extra: 0 };
    let v = Trivium::uniform_vec(3, tag, q, 200_000);
    assert!(v.iter().all(|&x| x < q));
    let mean = v.iter().map(|&x| x as f64 / q as f64).sum::<f64>() / v.len() as f64;
    assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
    let mut buckets = [0f64; 16];
    v.iter().for_each(|&x| buckets[(x as u128 * 16 / q as u128) as usize] += 1.0);
    let expect = v.len() as f64 / 16.0;
    let chi2: f64 = buckets.iter().map(|b| (b - expect).powi(2) / expect).sum();
    // 15 degrees of freedom, far tail
    assert!(chi2 < 40.0, "chi2 {chi2}");
    let small = Trivium::uniform_vec(3, tag, 17, 10_000);
    assert!(small.iter().all(|&x| x < 17) && small.contains(&16) && small.contains(&0));
}

#[test]
fn gaussian_matches_its_width() {
    let g = GaussianTable::standard(3.2);
    assert_eq!(g.bound(), 19);
    let mut rng = sampling::stream(4, 8);
    let xs = g.sample_vec(&mut rng, 1_000_000);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<i64>() as f64 / n;
    let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / n;
    assert!(mean.abs() < 0.02, "mean {mean}");
    assert!((var / (3.2 * 3.2) - 1.0).abs() < 0.01, "variance {var}");
    assert!(xs.iter().all(|x| x.abs() <= 19));
    let ones = xs.iter().filter(|&&x| x == 1).count() as f64 / n;
    let minus = xs.iter().filter(|&&x| x == -1).count() as f64 / n;
    assert!((ones - minus).abs() < 0.003);
}

#[test]
fn encoding_round_trips() {
    for n in [16usize, 1 << 12] {
        let enc = Encoder::new(n).unwrap();
        let values: Vec<Complex64> =
            (0..enc.slots()).map(|j| Complex64::new((j as f64 * 0.1).sin(), (j as f64 * 0.3).cos() * 0.5)).collect();
        let delta = Scale::pow2(40);
        let pt = enc.encode(&values, &delta).unwrap();
        let coeffs: Vec<f64> = pt.coeffs.iter().map(|&c| c as f64 / delta.to_f64()).collect();
        let back = enc.decode(&coeffs).unwrap();
        let err = back.iter().zip(&values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 2f64.powi(-30), "n={n} err={err:e}");
    }
    assert!(Encoder::new(16).unwrap().encode(&vec![Complex64::new(1.0, 0.0); 9], &Scale::pow2(10)).is_err());
}

#[test]
fn fresh_ciphertexts_carry_small_noise() {
    for ctx in [toy(false), toy(true)] {
        let kg = KeyGenerator::new(&ctx, 6);
        let sk = kg.secret_key().unwrap();
        let pk = kg.public_key(&sk).unwrap();
        let enc = Encoder::new(ctx.degree()).unwrap();
        let pt = enc.encode_real(&vec![0.25; enc.slots()], &Scale::pow2(40)).unwrap();
        let mut rng = sampling::stream(1, 1);
        for level in 1..=ctx.max_level() {
            let ct = encrypt(&ctx, &pk, &pt, level, &mut rng).unwrap();
            let mut s = sk.eval().clone();
            s.truncate(level);
            let mut phase = ct.parts()[0].clone();
            phase.add_assign(&ct.parts()[1].dyadic_mul(&s).unwrap()).unwrap();
            let ints = crt_compose(&phase.to_coefficients().unwrap()).unwrap();
            let bound = (2 * ctx.degree() as i64 + 1) * 19;
            for (x, m) in ints.iter().zip(&pt.coeffs) {
                let noise = (x - BigInt::from(*m)).to_i64().unwrap();
                assert!(noise.abs() <= bound);
            }
        }
        assert!(encrypt(&ctx, &pk, &pt, 0, &mut rng).is_err());
    }
}
