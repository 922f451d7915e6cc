#![allow(dead_code)]

use flexhe::heaan::Ciphertext;
use flexhe::keys::{encrypt, sampling};
use flexhe::params::{Context, ParamSet};
use flexhe::scale::Scale;
use flexhe_archsim::workload::Session;
use num_complex::Complex64;
use rand::Rng;

pub fn toy_native() -> Context {
    Context::new(ParamSet::custom("toy", 5, 5, 4, 40)).unwrap()
}

pub fn toy_split() -> Context {
    Context::new(ParamSet::custom("toy-split", 6, 5, 4, 40)).unwrap()
}

pub const ROTATIONS: [i64; 4] = [1, -1, 3, 5];

pub fn session(ctx: &Context) -> Session<'_> {
    Session::new(ctx, 42, &ROTATIONS).unwrap()
}

/// A fresh encryption of random unit-circle values at `level`.
pub fn fresh(s: &Session<'_>, level: usize, scale: &Scale, seed: u64) -> Ciphertext {
    let mut rng = sampling::stream(seed, 1);
    let values: Vec<Complex64> = (0..s.encoder().slots()).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..6.28))).collect();
    let pt = s.encoder().encode(&values, scale).unwrap();
    encrypt(s.ctx, &s.public, &pt, level, &mut rng).unwrap()
}

pub fn delta(ctx: &Context) -> Scale {
    Scale::pow2(ctx.params().log_scale)
}
