use super::Ring;

/// Twiddle generator for one butterfly stage.
///
/// The factor of the block at exponent index `e` is `start * step^e`; the
/// block it applies to is `brv(e)` over the stage's bit width.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StageSeed {
    pub start: u64,
    pub step: u64,
}

/// Per-stage seeds for both transform directions; `2 log n` pairs in total.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwiddleSeeds {
    ring: Ring,
    pub forward: Vec<StageSeed>,
    pub inverse: Vec<StageSeed>,
}

impl TwiddleSeeds {
    pub fn new(ring: &Ring) -> Self {
        let q = ring.modulus();
        let n = ring.degree() as u64;
        let rho_inv = q.inv(ring.rho()).expect("root is a unit");
        let omega_inv = q.inv(ring.omega()).expect("root is a unit");
        let mut forward = Vec::new();
        let mut inverse = Vec::new();
        for s in 0..ring.log_degree() {
            let e = n >> (s + 1);
            forward.push(StageSeed { start: q.pow(ring.rho(), e), step: q.pow(ring.omega(), e) });
            inverse.push(StageSeed { start: q.pow(rho_inv, e), step: q.pow(omega_inv, e) });
        }
        Self { ring: *ring, forward, inverse }
    }

    /// Seeds of the standard ring of the same degree, derived from the seeds
    /// of a twisted ring by multiplying each start by `zeta^(+-n/2m)`.
    ///
    /// `zeta` must be the primitive `4n`-th root the twisted ring was built
    /// from.
    pub fn derive_standard(twisted: &TwiddleSeeds, zeta: u64) -> crate::Result<Self> {
        use super::Twist;
        let ring = twisted.ring;
        let q = ring.modulus();
        let n = ring.degree() as u64;
        let zeta_inv = q.inv(zeta)?;
        let (up, down) = match ring.twist() {
            Twist::Plus => (zeta, zeta_inv),
            Twist::Minus => (zeta_inv, zeta),
            Twist::Standard => return Ok(twisted.clone()),
        };
        let target = Ring::twisted(q, ring.degree(), Twist::Standard, zeta)?;
        let adjust = |seeds: &[StageSeed], by: u64| {
            seeds
                .iter()
                .enumerate()
                .map(|(s, seed)| StageSeed { start: q.mul(seed.start, q.pow(by, n >> (s + 1))), step: seed.step })
                .collect()
        };
        Ok(Self { ring: target, forward: adjust(&twisted.forward, up), inverse: adjust(&twisted.inverse, down) })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Factors of stage `s` in block order, regenerated from the seed.
    pub fn stage_factors(&self, s: usize, inverse: bool) -> Vec<u64> {
        let q = self.ring.modulus();
        let seed = if inverse { self.inverse[s] } else { self.forward[s] };
        let m = 1usize << s;
        let mut out = vec![0; m];
        let mut w = seed.start;
        for e in 0..m {
            out[bit_reverse(e, s as u32)] = w;
            w = q.mul(w, seed.step);
        }
        out
    }
}

/// Reverses the low `bits` bits of `x`.
#[inline]
pub fn bit_reverse(x: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (usize::BITS - bits)
    }
}

/// Cooley-Tukey, natural order in, bit-reversed order out.
pub fn ntt_forward(a: &mut [u64], seeds: &TwiddleSeeds) {
    let q = seeds.ring.modulus();
    let n = a.len();
    debug_assert_eq!(n, seeds.ring.degree());
    for (s, seed) in seeds.forward.iter().enumerate() {
        let m = 1usize << s;
        let t = n >> (s + 1);
        let mut w = seed.start;
        for e in 0..m {
            let base = 2 * bit_reverse(e, s as u32) * t;
            let (lo, hi) = a[base..base + 2 * t].split_at_mut(t);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let u = *x;
                let v = q.mul(*y, w);
                *x = q.add(u, v);
                *y = q.sub(u, v);
            }
            w = q.mul(w, seed.step);
        }
    }
}

/// Gentleman-Sande, bit-reversed order in, natural order out.
///
/// Each stage halves its outputs, so no final scaling by `1/n` is needed.
pub fn ntt_inverse(a: &mut [u64], seeds: &TwiddleSeeds) {
    let q = seeds.ring.modulus();
    let n = a.len();
    debug_assert_eq!(n, seeds.ring.degree());
    for (s, seed) in seeds.inverse.iter().enumerate().rev() {
        let m = 1usize << s;
        let t = n >> (s + 1);
        let mut w = seed.start;
        for e in 0..m {
            let base = 2 * bit_reverse(e, s as u32) * t;
            let (lo, hi) = a[base..base + 2 * t].split_at_mut(t);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let u = *x;
                let v = *y;
                *x = q.half(q.add(u, v));
                *y = q.half(q.mul(q.sub(u, v), w));
            }
            w = q.mul(w, seed.step);
        }
    }
}
