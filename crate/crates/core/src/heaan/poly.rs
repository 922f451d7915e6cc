use crate::params::{Context, DegreeMode};
use crate::polyring::{Domain, ResiduePoly, Ring};
use crate::ringsplit::{join, split, SplitPair};
use crate::{par, Error, Result};

/// One RNS limb of a full-degree polynomial, always in the evaluation domain.
///
/// In split mode the limb is carried as the transformed plus and minus halves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimbPoly {
    Native(ResiduePoly),
    Split(SplitPair),
}

impl LimbPoly {
    /// Transforms a coefficient-domain polynomial of the full standard ring.
    pub fn from_coefficients(poly: ResiduePoly, mode: DegreeMode) -> Result<Self> {
        poly.expect_domain(Domain::Coefficient)?;
        match mode {
            DegreeMode::Native => Ok(LimbPoly::Native(poly.forward()?)),
            DegreeMode::Split => Ok(LimbPoly::Split(split(&poly)?.forward()?)),
        }
    }

    /// Back to coefficients of the full standard ring.
    pub fn to_coefficients(&self) -> Result<ResiduePoly> {
        match self {
            LimbPoly::Native(p) => p.clone().inverse(),
            LimbPoly::Split(pair) => join(&pair.clone().inverse()?),
        }
    }

    /// Wraps a full-length evaluation vector of `ring`.
    pub fn from_eval(ring: &Ring, data: Vec<u64>, mode: DegreeMode) -> Result<Self> {
        match mode {
            DegreeMode::Native => Ok(LimbPoly::Native(ring.poly(Domain::Evaluation, data)?)),
            DegreeMode::Split => Ok(LimbPoly::Split(SplitPair::from_eval(ring, &data)?)),
        }
    }

    pub fn zero(ring: &Ring, mode: DegreeMode) -> Result<Self> {
        Self::from_eval(ring, vec![0; ring.degree()], mode)
    }

    /// Full-length evaluation vector; halves are concatenated plus first.
    pub fn eval_data(&self) -> Vec<u64> {
        match self {
            LimbPoly::Native(p) => p.data().to_vec(),
            LimbPoly::Split(pair) => pair.concat_eval().expect("limbs stay in the evaluation domain"),
        }
    }

    pub fn mode(&self) -> DegreeMode {
        match self {
            LimbPoly::Native(_) => DegreeMode::Native,
            LimbPoly::Split(_) => DegreeMode::Split,
        }
    }

    pub fn modulus(&self) -> u64 {
        match self {
            LimbPoly::Native(p) => p.modulus().value(),
            LimbPoly::Split(pair) => pair.plus.modulus().value(),
        }
    }

    /// The transform-sized pieces: one in native mode, two in split mode.
    pub fn parts(&self) -> Vec<&ResiduePoly> {
        match self {
            LimbPoly::Native(p) => vec![p],
            LimbPoly::Split(pair) => vec![&pair.plus, &pair.minus],
        }
    }

    fn parts_mut(&mut self) -> Vec<&mut ResiduePoly> {
        match self {
            LimbPoly::Native(p) => vec![p],
            LimbPoly::Split(pair) => vec![&mut pair.plus, &mut pair.minus],
        }
    }

    fn zip<F>(&mut self, other: &Self, mut f: F) -> Result<()>
    where
        F: FnMut(&mut ResiduePoly, &ResiduePoly) -> Result<()>,
    {
        if self.mode() != other.mode() {
            return Err(Error::Mismatch("native and split limbs mixed".into()));
        }
        for (a, b) in self.parts_mut().into_iter().zip(other.parts()) {
            f(a, b)?;
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.zip(other, |a, b| a.add_assign(b))
    }

    pub fn sub_assign(&mut self, other: &Self) -> Result<()> {
        self.zip(other, |a, b| a.sub_assign(b))
    }

    pub fn dyadic_mul_assign(&mut self, other: &Self) -> Result<()> {
        self.zip(other, |a, b| a.dyadic_mul_assign(b))
    }

    pub fn neg_assign(&mut self) {
        self.parts_mut().into_iter().for_each(ResiduePoly::neg_assign);
    }

    pub fn scalar_mul_assign(&mut self, k: u64) {
        self.parts_mut().into_iter().for_each(|p| p.scalar_mul_assign(k));
    }

    /// `self += a * b`.
    pub fn dyadic_mac(&mut self, a: &Self, b: &Self) -> Result<()> {
        if self.mode() != a.mode() || self.mode() != b.mode() {
            return Err(Error::Mismatch("native and split limbs mixed".into()));
        }
        for ((acc, x), y) in self.parts_mut().into_iter().zip(a.parts()).zip(b.parts()) {
            acc.dyadic_mac(x, y)?;
        }
        Ok(())
    }
}

/// A polynomial over the first `level` primes, optionally followed by the
/// special prime while key switching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnsPoly {
    limbs: Vec<LimbPoly>,
}

impl RnsPoly {
    pub fn new(limbs: Vec<LimbPoly>) -> Result<Self> {
        if limbs.is_empty() {
            return Err(Error::Mismatch("polynomial without limbs".into()));
        }
        let mode = limbs[0].mode();
        if limbs.iter().any(|l| l.mode() != mode) {
            return Err(Error::Mismatch("native and split limbs mixed".into()));
        }
        Ok(Self { limbs })
    }

    pub fn limbs(&self) -> &[LimbPoly] {
        &self.limbs
    }

    pub fn limbs_mut(&mut self) -> &mut [LimbPoly] {
        &mut self.limbs
    }

    pub fn into_limbs(self) -> Vec<LimbPoly> {
        self.limbs
    }

    pub fn len(&self) -> usize {
        self.limbs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.limbs.is_empty()
    }

    pub fn mode(&self) -> DegreeMode {
        self.limbs[0].mode()
    }

    pub fn truncate(&mut self, level: usize) {
        self.limbs.truncate(level);
    }

    /// Zero over the given extended indices.
    pub fn zero(ctx: &Context, indices: &[usize]) -> Result<Self> {
        let limbs = indices.iter().map(|&j| LimbPoly::zero(ctx.ring(j), ctx.mode())).collect::<Result<_>>()?;
        Self::new(limbs)
    }

    /// Lifts small signed coefficients onto the given extended indices.
    pub fn from_signed(ctx: &Context, coeffs: &[i64], indices: &[usize]) -> Result<Self> {
        let limbs = par::try_map_range(indices.len(), |k| {
            let ring = ctx.ring(indices[k]);
            LimbPoly::from_coefficients(ring.from_signed(coeffs)?, ctx.mode())
        })?;
        Self::new(limbs)
    }

    /// Lifts wide signed coefficients onto the given extended indices.
    pub fn from_wide(ctx: &Context, coeffs: &[i128], indices: &[usize]) -> Result<Self> {
        let limbs = par::try_map_range(indices.len(), |k| {
            let ring = ctx.ring(indices[k]);
            let q = ring.modulus();
            let data = coeffs.iter().map(|&c| q.from_i128(c)).collect();
            LimbPoly::from_coefficients(ring.poly(Domain::Coefficient, data)?, ctx.mode())
        })?;
        Self::new(limbs)
    }

    fn zip<F>(&mut self, other: &Self, f: F) -> Result<()>
    where
        F: Fn(&mut LimbPoly, &LimbPoly) -> Result<()> + Sync + Send,
    {
        if self.len() != other.len() {
            return Err(Error::Mismatch(format!("{} limbs against {}", self.len(), other.len())));
        }
        let errs: Vec<Result<()>> = {
            let mut out: Vec<Option<Result<()>>> = (0..self.len()).map(|_| None).collect();
            let mut pairs: Vec<(&mut LimbPoly, &LimbPoly, &mut Option<Result<()>>)> = self
                .limbs
                .iter_mut()
                .zip(&other.limbs)
                .zip(out.iter_mut())
                .map(|((a, b), o)| (a, b, o))
                .collect();
            par::for_each_mut(&mut pairs, |_, (a, b, o)| **o = Some(f(a, b)));
            drop(pairs);
            out.into_iter().map(|o| o.expect("every limb visited")).collect()
        };
        errs.into_iter().collect()
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.zip(other, |a, b| a.add_assign(b))
    }

    pub fn sub_assign(&mut self, other: &Self) -> Result<()> {
        self.zip(other, |a, b| a.sub_assign(b))
    }

    pub fn dyadic_mul_assign(&mut self, other: &Self) -> Result<()> {
        self.zip(other, |a, b| a.dyadic_mul_assign(b))
    }

    pub fn dyadic_mul(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.dyadic_mul_assign(other)?;
        Ok(out)
    }

    pub fn neg_assign(&mut self) {
        par::for_each_mut(&mut self.limbs, |_, l| l.neg_assign());
    }

    /// Multiplies limb `i` by `k[i]`.
    pub fn scalar_mul_assign(&mut self, k: &[u64]) {
        par::for_each_mut(&mut self.limbs, |i, l| l.scalar_mul_assign(k[i]));
    }

    /// Coefficient form of every limb.
    pub fn to_coefficients(&self) -> Result<Vec<ResiduePoly>> {
        par::try_map_range(self.len(), |i| self.limbs[i].to_coefficients())
    }
}
