//! Independent reference arithmetic: plain `u128 %` and quadratic algorithms.
#![allow(dead_code)]

use flexhe::polyring::{bit_reverse, Ring};
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub fn powmod(mut b: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    b %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, q);
        }
        b = mulmod(b, b, q);
        e >>= 1;
    }
    acc
}

/// `a mod (x^n - c)` product by the quadratic method.
pub fn schoolbook(a: &[u64], b: &[u64], c: u64, q: u64) -> Vec<u64> {
    let n = a.len();
    let mut out = vec![0u64; n];
    for i in 0..n {
        for j in 0..n {
            let t = mulmod(a[i], b[j], q);
            let (k, t) = if i + j >= n { (i + j - n, mulmod(t, c, q)) } else { (i + j, t) };
            out[k] = (out[k] + t) % q;
        }
    }
    out
}

/// Value of `a` at `rho * omega^brv(k)` for every slot `k`.
pub fn direct_eval(ring: &Ring, a: &[u64]) -> Vec<u64> {
    let q = ring.modulus().value();
    let n = ring.degree();
    (0..n)
        .map(|k| {
            let x = mulmod(ring.rho(), powmod(ring.omega(), bit_reverse(k, ring.log_degree()) as u64, q), q);
            a.iter().rev().fold(0u64, |acc, &c| (mulmod(acc, x, q) + c) % q)
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut impl Rng, n: usize, q: u64) -> Vec<u64> {
    (0..n).map(|_| rng.gen_range(0..q)).collect()
}

/// Proptest runner with a fixed seed so failures reproduce.
pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, ..Config::default() },
        proptest::test_runner::TestRng::from_seed(proptest::test_runner::RngAlgorithm::ChaCha, &[7; 32]),
    )
}
