//! Split and join between `Z_q[x]/(x^2N + 1)` and the pair
//! `Z_q[x]/(x^N - zeta^N) x Z_q[x]/(x^N + zeta^N)`.
//!
//! With `a = a_lo + x^N a_hi`:
//!
//! ```text
//! split:  a_+ = a_lo + zeta^N a_hi        a_- = a_lo - zeta^N a_hi
//! join:   a_lo = (a_+ + a_-) / 2          a_hi = (a_+ - a_-) zeta^-N / 2
//! ```
//!
//! Both are single butterfly passes over `N` coefficient pairs. They are the
//! first stage of the forward transform and the last stage of the inverse
//! transform of the degree-2N ring, so splitting then transforming each half
//! gives exactly the degree-2N evaluation vector.

use crate::polyring::{Domain, ResiduePoly, Ring, Twist};
use crate::{Error, Result};

/// The two twisted halves of a degree-2N polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPair {
    pub plus: ResiduePoly,
    pub minus: ResiduePoly,
}

impl SplitPair {
    pub fn domain(&self) -> Domain {
        self.plus.domain()
    }

    pub fn forward(self) -> Result<Self> {
        Ok(Self { plus: self.plus.forward()?, minus: self.minus.forward()? })
    }

    pub fn inverse(self) -> Result<Self> {
        Ok(Self { plus: self.plus.inverse()?, minus: self.minus.inverse()? })
    }

    /// The degree-2N evaluation vector of the joined polynomial.
    pub fn concat_eval(&self) -> Result<Vec<u64>> {
        self.plus.expect_domain(Domain::Evaluation)?;
        self.minus.expect_domain(Domain::Evaluation)?;
        let mut v = self.plus.data().to_vec();
        v.extend_from_slice(self.minus.data());
        Ok(v)
    }

    /// Inverse of [`concat_eval`](Self::concat_eval).
    pub fn from_eval(parent: &Ring, data: &[u64]) -> Result<Self> {
        let (plus, minus) = parent.halves()?;
        let n = plus.degree();
        if data.len() != 2 * n {
            return Err(Error::Mismatch(format!("{} values for degree {}", data.len(), 2 * n)));
        }
        Ok(Self {
            plus: plus.poly(Domain::Evaluation, data[..n].to_vec())?,
            minus: minus.poly(Domain::Evaluation, data[n..].to_vec())?,
        })
    }
}

/// Splits a coefficient-domain polynomial of the standard degree-2N ring.
pub fn split(a: &ResiduePoly) -> Result<SplitPair> {
    a.expect_domain(Domain::Coefficient)?;
    let (plus_ring, minus_ring) = a.ring().halves()?;
    let q = a.modulus();
    let n = plus_ring.degree();
    let c = plus_ring.constant();
    let (lo, hi) = a.data().split_at(n);
    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    for (&x, &y) in lo.iter().zip(hi) {
        let t = q.mul(y, c);
        plus.push(q.add(x, t));
        minus.push(q.sub(x, t));
    }
    Ok(SplitPair {
        plus: ResiduePoly::from_parts(plus_ring, Domain::Coefficient, plus),
        minus: ResiduePoly::from_parts(minus_ring, Domain::Coefficient, minus),
    })
}

/// Joins coefficient-domain halves back into the standard degree-2N ring.
pub fn join(pair: &SplitPair) -> Result<ResiduePoly> {
    pair.plus.expect_domain(Domain::Coefficient)?;
    pair.minus.expect_domain(Domain::Coefficient)?;
    let pr = pair.plus.ring();
    let mr = pair.minus.ring();
    if pr.twist() != Twist::Plus || mr.twist() != Twist::Minus || pr.modulus() != mr.modulus() {
        return Err(Error::Mismatch("join needs a plus half and a minus half".into()));
    }
    let q = pr.modulus();
    // the plus ring's rho is the primitive 4N-th root zeta itself
    let zeta = pr.rho();
    if q.pow(zeta, 3) != mr.rho() {
        return Err(Error::Mismatch("halves come from different parents".into()));
    }
    let n = pr.degree();
    let parent = Ring::standard(q, 2 * n, zeta)?;
    let c_inv = q.inv(pr.constant())?;
    let mut out = vec![0u64; 2 * n];
    for (i, (&x, &y)) in pair.plus.data().iter().zip(pair.minus.data()).enumerate() {
        out[i] = q.half(q.add(x, y));
        out[i + n] = q.half(q.mul(q.sub(x, y), c_inv));
    }
    Ok(ResiduePoly::from_parts(parent, Domain::Coefficient, out))
}

/// `join(split(a) * split(b))` with each half multiplied in its twisted ring.
pub fn split_mul_check(a: &ResiduePoly, b: &ResiduePoly) -> Result<ResiduePoly> {
    let (sa, sb) = (split(a)?, split(b)?);
    join(&SplitPair { plus: sa.plus.ring_mul(&sb.plus)?, minus: sa.minus.ring_mul(&sb.minus)? })
}
