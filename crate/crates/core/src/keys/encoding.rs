//! Canonical-embedding encoder.
//!
//! Slot `j` is the value at the root `xi^(5^j)` with `xi = exp(i pi / n)`;
//! its conjugate sits at `xi^(-5^j)`. Both directions are a twist by `xi^i`
//! followed by one length-`n` FFT.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::scale::Scale;
use crate::{Error, Result};

/// An encoded message: rounded integer coefficients and their scale.
#[derive(Clone, Debug, PartialEq)]
pub struct Plaintext {
    pub coeffs: Vec<i128>,
    pub scale: Scale,
}

#[derive(Clone, Debug)]
pub struct Encoder {
    n: usize,
    // position in the odd-root FFT output of slot j
    slot_index: Vec<usize>,
    conj_index: Vec<usize>,
}

impl Encoder {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidParams(format!("cannot encode for degree {n}")));
        }
        let two_n = 2 * n;
        let mut slot_index = Vec::with_capacity(n / 2);
        let mut conj_index = Vec::with_capacity(n / 2);
        let mut e = 1usize;
        for _ in 0..n / 2 {
            slot_index.push((e - 1) / 2);
            conj_index.push((two_n - e - 1) / 2);
            e = e * 5 % two_n;
        }
        Ok(Self { n, slot_index, conj_index })
    }

    pub fn slots(&self) -> usize {
        self.n / 2
    }

    fn twist(&self, i: usize, sign: f64) -> Complex64 {
        Complex64::from_polar(1.0, sign * PI * i as f64 / self.n as f64)
    }

    /// Real coefficients whose slots are `values` (zero padded).
    pub fn embed_inverse(&self, values: &[Complex64]) -> Result<Vec<f64>> {
        if values.len() > self.slots() {
            return Err(Error::Mismatch(format!("{} values for {} slots", values.len(), self.slots())));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); self.n];
        for (j, z) in values.iter().enumerate() {
            v[self.slot_index[j]] = *z;
            v[self.conj_index[j]] = z.conj();
        }
        FftPlanner::new().plan_fft_forward(self.n).process(&mut v);
        let inv_n = 1.0 / self.n as f64;
        Ok(v.iter().enumerate().map(|(i, x)| (x * self.twist(i, -1.0)).re * inv_n).collect())
    }

    /// Slot values of real coefficients.
    pub fn embed(&self, coeffs: &[f64]) -> Result<Vec<Complex64>> {
        if coeffs.len() != self.n {
            return Err(Error::Mismatch(format!("{} coefficients for degree {}", coeffs.len(), self.n)));
        }
        let mut v: Vec<Complex64> = coeffs.iter().enumerate().map(|(i, &c)| self.twist(i, 1.0) * c).collect();
        FftPlanner::new().plan_fft_inverse(self.n).process(&mut v);
        Ok(self.slot_index.iter().map(|&k| v[k]).collect())
    }

    pub fn encode(&self, values: &[Complex64], scale: &Scale) -> Result<Plaintext> {
        let delta = scale.to_f64();
        let coeffs = self
            .embed_inverse(values)?
            .into_iter()
            .map(|c| {
                let x = (c * delta).round();
                if !x.is_finite() || x.abs() >= 2f64.powi(126) {
                    Err(Error::InvalidParams("encoded coefficient overflows".into()))
                } else {
                    Ok(x as i128)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Plaintext { coeffs, scale: scale.clone() })
    }

    pub fn encode_real(&self, values: &[f64], scale: &Scale) -> Result<Plaintext> {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.encode(&v, scale)
    }

    /// Slots of coefficients already divided by the scale.
    pub fn decode(&self, coeffs: &[f64]) -> Result<Vec<Complex64>> {
        self.embed(coeffs)
    }
}
