use super::{bit_reverse, Domain, ResiduePoly, Twist};
use crate::{Error, Result};

/// Odd exponent `j` such that evaluation slot `k` holds `a(psi^j)`.
pub fn eval_index_exponent(k: usize, log_n: u32) -> usize {
    2 * bit_reverse(k, log_n) + 1
}

fn check(poly: &ResiduePoly, g: usize, domain: Domain) -> Result<()> {
    poly.expect_domain(domain)?;
    if poly.ring().twist() != Twist::Standard {
        return Err(Error::Unsupported("automorphisms need the standard ring".into()));
    }
    if g % 2 == 0 {
        return Err(Error::InvalidParams(format!("Galois element {g} is even")));
    }
    Ok(())
}

/// `a(x) -> a(x^g)` on coefficients.
pub fn automorphism_coeff(poly: &ResiduePoly, g: usize) -> Result<ResiduePoly> {
    check(poly, g, Domain::Coefficient)?;
    let n = poly.ring().degree();
    let q = poly.modulus();
    let g = g % (2 * n);
    let mut out = vec![0u64; n];
    for (i, &c) in poly.data().iter().enumerate() {
        let j = (i * g) % (2 * n);
        if j < n {
            out[j] = c;
        } else {
            out[j - n] = q.neg(c);
        }
    }
    Ok(ResiduePoly::from_parts(*poly.ring(), Domain::Coefficient, out))
}

/// `a(x) -> a(x^g)` as a permutation of evaluation slots.
pub fn automorphism_eval(poly: &ResiduePoly, g: usize) -> Result<ResiduePoly> {
    check(poly, g, Domain::Evaluation)?;
    let n = poly.ring().degree();
    let log_n = poly.ring().log_degree();
    let g = g % (2 * n);
    let src = poly.data();
    let out = (0..n)
        .map(|k| {
            let e = (g * eval_index_exponent(k, log_n)) % (2 * n);
            src[bit_reverse((e - 1) / 2, log_n)]
        })
        .collect();
    Ok(ResiduePoly::from_parts(*poly.ring(), Domain::Evaluation, out))
}
