//! Trivium keystream, 64 output bits per step.
//!
//! The state is three shift registers of 93, 84 and 111 bits. Every tap is at
//! least 64 positions from the input end, so 64 consecutive updates can be
//! computed from the current state with word-wide operations.

const LEN_A: u32 = 93;
const LEN_B: u32 = 84;
const LEN_C: u32 = 111;
const WARMUP_ROUNDS: usize = 18;

/// 80-bit IV naming one expanded polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamTag {
    pub i: u16,
    pub j: u16,
    pub component: u16,
    pub extra: u32,
}

impl StreamTag {
    pub fn bits(&self) -> u128 {
        u128::from(self.i) | u128::from(self.j) << 16 | u128::from(self.component) << 32 | u128::from(self.extra) << 48
    }
}

/// Registers are stored with register position `k` at bit `len - 1 - k`, so a
/// run of 64 consecutive step values of one tap is a single shift.
#[derive(Clone, Debug)]
pub struct Trivium {
    a: u128,
    b: u128,
    c: u128,
}

impl Trivium {
    /// Key is `seed` followed by 16 zero bits; IV is the 80-bit tag.
    pub fn new(seed: u64, tag: StreamTag) -> Self {
        Self::with_key_iv(u128::from(seed), tag.bits())
    }

    /// Raw 80-bit key and IV, bit `k` of each loaded into register position `k`.
    pub fn with_key_iv(key: u128, iv: u128) -> Self {
        let mask80 = (1u128 << 80) - 1;
        let (key, iv) = (key & mask80, iv & mask80);
        let place = |len: u32, value: u128, width: u32| {
            (0..width).filter(|&k| value >> k & 1 == 1).fold(0u128, |acc, k| acc | 1u128 << (len - 1 - k))
        };
        let mut t = Self { a: place(LEN_A, key, 80), b: place(LEN_B, iv, 80), c: place(LEN_C, 0b111 << 108, 111) };
        for _ in 0..WARMUP_ROUNDS {
            t.step64();
        }
        t
    }

    #[inline]
    fn tap(reg: u128, len: u32, pos: u32) -> u64 {
        (reg >> (len - 1 - pos)) as u64
    }

    #[inline]
    fn step64(&mut self) -> u64 {
        let (a, b, c) = (self.a, self.b, self.c);
        let ta = |p| Self::tap(a, LEN_A, p);
        let tb = |p| Self::tap(b, LEN_B, p);
        let tc = |p| Self::tap(c, LEN_C, p);
        let t1 = ta(65) ^ ta(92);
        let t2 = tb(68) ^ tb(83);
        let t3 = tc(65) ^ tc(110);
        let z = t1 ^ t2 ^ t3;
        let n1 = t1 ^ (ta(90) & ta(91)) ^ tb(77);
        let n2 = t2 ^ (tb(81) & tb(82)) ^ tc(86);
        let n3 = t3 ^ (tc(108) & tc(109)) ^ ta(68);
        let mask = |len: u32| (1u128 << len) - 1;
        self.a = ((a >> 64) | u128::from(n3) << (LEN_A - 64)) & mask(LEN_A);
        self.b = ((b >> 64) | u128::from(n1) << (LEN_B - 64)) & mask(LEN_B);
        self.c = ((c >> 64) | u128::from(n2) << (LEN_C - 64)) & mask(LEN_C);
        z
    }

    /// Next 64 keystream bits, first bit in the least significant position.
    pub fn next_u64(&mut self) -> u64 {
        self.step64()
    }

    /// Uniform value below `q` by masking to its bit length and rejecting.
    pub fn uniform_below(&mut self, q: u64) -> u64 {
        let bits = 64 - q.leading_zeros();
        let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        loop {
            let v = self.next_u64() & mask;
            if v < q {
                return v;
            }
        }
    }

    /// `len` uniform residues below `q`.
    pub fn uniform_vec(seed: u64, tag: StreamTag, q: u64, len: usize) -> Vec<u64> {
        let mut t = Self::new(seed, tag);
        (0..len).map(|_| t.uniform_below(q)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Textbook one-bit-per-step Trivium over a 288-entry state.
    struct BitSerial {
        s: [u8; 288],
    }

    impl BitSerial {
        fn new(key: u128, iv: u128) -> Self {
            let mut s = [0u8; 288];
            for k in 0..80 {
                s[k] = (key >> k & 1) as u8;
                s[93 + k] = (iv >> k & 1) as u8;
            }
            s[285] = 1;
            s[286] = 1;
            s[287] = 1;
            let mut t = Self { s };
            for _ in 0..1152 {
                t.step();
            }
            t
        }

        fn step(&mut self) -> u8 {
            let s = &mut self.s;
            let mut t1 = s[65] ^ s[92];
            let mut t2 = s[161] ^ s[176];
            let mut t3 = s[242] ^ s[287];
            let z = t1 ^ t2 ^ t3;
            t1 ^= (s[90] & s[91]) ^ s[170];
            t2 ^= (s[174] & s[175]) ^ s[263];
            t3 ^= (s[285] & s[286]) ^ s[68];
            s.copy_within(0..92, 1);
            s[0] = t3;
            s.copy_within(93..176, 94);
            s[93] = t1;
            s.copy_within(177..287, 178);
            s[177] = t2;
            z
        }
    }

    #[test]
    fn word_parallel_matches_bit_serial() {
        for (key, iv) in [(0u128, 0u128), (0x0123456789abcdef, 0xfedcba9876543210), ((1 << 80) - 1, 12345)] {
            let mut fast = Trivium::with_key_iv(key, iv);
            let mut slow = BitSerial::new(key, iv);
            for _ in 0..8 {
                let want = (0..64).fold(0u64, |acc, k| acc | u64::from(slow.step()) << k);
                assert_eq!(fast.next_u64(), want);
            }
        }
    }

    #[test]
    fn tags_separate_streams() {
        let t0 = StreamTag { i: 0, j: 0, component: 1, extra: 0 };
        let t1 = StreamTag { j: 1, ..t0 };
        let q = 18014398509404161;
        assert_ne!(Trivium::uniform_vec(7, t0, q, 4), Trivium::uniform_vec(7, t1, q, 4));
        assert_eq!(Trivium::uniform_vec(7, t0, q, 4), Trivium::uniform_vec(7, t0, q, 4));
        assert!(Trivium::uniform_vec(7, t0, q, 1000).iter().all(|&v| v < q));
    }
}
