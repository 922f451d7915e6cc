//! Secret-side samplers driven by ChaCha20.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Deterministic generator for one labelled purpose of a master seed.
pub fn stream(master: u64, label: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master);
    rng.set_stream(label);
    rng
}

/// Coefficients uniform in `{-1, 0, 1}`.
pub fn ternary(rng: &mut impl RngCore, n: usize) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-1i64..=1)).collect()
}

/// Discrete Gaussian by cumulative table lookup, truncated at `|x| <= bound`.
#[derive(Clone, Debug)]
pub struct GaussianTable {
    sigma: f64,
    // thresholds[k] = P(|x| <= k) scaled to 2^64
    thresholds: Vec<u64>,
}

impl GaussianTable {
    pub fn new(sigma: f64, bound: u32) -> Self {
        let weight = |x: f64| (-x * x / (2.0 * sigma * sigma)).exp();
        let mut w: Vec<f64> = (0..=bound).map(|k| if k == 0 { 1.0 } else { 2.0 * weight(f64::from(k)) }).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let mut acc = 0.0;
        let mut thresholds: Vec<u64> = w
            .iter()
            .map(|p| {
                acc += p;
                (acc * 2f64.powi(64)).min(u64::MAX as f64) as u64
            })
            .collect();
        *thresholds.last_mut().expect("bound >= 0") = u64::MAX;
        Self { sigma, thresholds }
    }

    /// Six standard deviations, as used throughout the crate.
    pub fn standard(sigma: f64) -> Self {
        Self::new(sigma, (6.0 * sigma).floor() as u32)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn bound(&self) -> i64 {
        self.thresholds.len() as i64 - 1
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> i64 {
        let u = rng.next_u64();
        let mag = self.thresholds.iter().position(|&t| u < t).unwrap_or(self.thresholds.len() - 1) as i64;
        if mag != 0 && rng.gen::<bool>() {
            -mag
        } else {
            mag
        }
    }

    pub fn sample_vec(&self, rng: &mut impl RngCore, n: usize) -> Vec<i64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments() {
        let g = GaussianTable::standard(3.2);
        assert_eq!(g.bound(), 19);
        let mut rng = stream(1, 0);
        let xs = g.sample_vec(&mut rng, 200_000);
        let mean = xs.iter().sum::<i64>() as f64 / xs.len() as f64;
        let var = xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.05, "mean {mean}");
        assert!((var.sqrt() - 3.2).abs() < 0.05, "sd {}", var.sqrt());
        assert!(xs.iter().all(|x| x.abs() <= 19));
    }

    #[test]
    fn ternary_range() {
        let mut rng = stream(2, 0);
        let t = ternary(&mut rng, 3000);
        assert!(t.iter().all(|x| (-1..=1).contains(x)));
        for v in -1..=1 {
            let c = t.iter().filter(|&&x| x == v).count();
            assert!((800..1200).contains(&c));
        }
    }
}
