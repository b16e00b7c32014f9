//! λ-operations from leaky Adams operations.
//!
//! In a p-torsion-free ring with a Frobenius lift, the leaky λ-structure
//! has `ψ^k = ψ^{p^j}` when `k = u p^j` with `u` prime to `p` (so every
//! prime-to-p Adams operation is the identity). The λ-operations follow
//! from Newton's identity
//!
//! ```text
//! n λ^n(x) = sum_{i=1}^{n} (-1)^{i-1} λ^{n-i}(x) ψ^i(x)
//! ```
//!
//! with the division by `n` done exactly. On Z_p every ψ is the identity and
//! `λ^n(x) = binom(x, n)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{pow_p, vp_factorial, vp_u64, PadicInt};
use crate::theta::ThetaElement;

/// A ring with the operations Newton's recursion needs.
pub trait LeakyAdams: Clone {
    fn prime(&self) -> u32;
    fn precision(&self) -> u32;
    fn one_like(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &PadicInt) -> Self;
    fn exact_div_p(&self, k: u32) -> Result<Self>;
    /// `ψ^{p^j}`.
    fn psi_p_pow(&self, j: u32) -> Result<Self>;
}

impl LeakyAdams for PadicInt {
    fn prime(&self) -> u32 {
        PadicInt::prime(self)
    }
    fn precision(&self) -> u32 {
        PadicInt::precision(self)
    }
    fn one_like(&self) -> Self {
        PadicInt::one(self.prime(), self.precision())
    }
    fn zero_like(&self) -> Self {
        PadicInt::zero(self.prime(), self.precision())
    }
    fn add(&self, other: &Self) -> Self {
        *self + *other
    }
    fn sub(&self, other: &Self) -> Self {
        *self - *other
    }
    fn mul(&self, other: &Self) -> Self {
        *self * *other
    }
    fn scale(&self, c: &PadicInt) -> Self {
        *self * *c
    }
    fn exact_div_p(&self, k: u32) -> Result<Self> {
        PadicInt::exact_div_p(self, k)
    }
    fn psi_p_pow(&self, _j: u32) -> Result<Self> {
        Ok(*self)
    }
}

impl LeakyAdams for ThetaElement {
    fn prime(&self) -> u32 {
        self.presentation().prime()
    }
    fn precision(&self) -> u32 {
        ThetaElement::precision(self)
    }
    fn one_like(&self) -> Self {
        self.presentation().one()
    }
    fn zero_like(&self) -> Self {
        self.presentation().zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &PadicInt) -> Self {
        ThetaElement::scale(self, c)
    }
    fn exact_div_p(&self, k: u32) -> Result<Self> {
        ThetaElement::exact_div_p(self, k)
    }
    fn psi_p_pow(&self, j: u32) -> Result<Self> {
        let pres: &Arc<_> = self.presentation();
        pres.psi_p_pow(self, j)
    }
}

/// `λ^0(x), ..., λ^n(x)`.
pub fn lambdas<R: LeakyAdams>(x: &R, n: u32) -> Result<Vec<R>> {
    let p = x.prime();
    let guard = vp_factorial(n as u64, p);
    if x.precision() <= guard {
        return Err(Error::PrecisionExhausted { available: x.precision(), required: guard + 1 });
    }
    // ψ^{p^j}(x) for every j that occurs
    let top = if n == 0 { 0 } else { (n as u64).ilog(p as u64) };
    let mut psi = vec![x.clone()];
    for _ in 0..top {
        let next = psi.last().unwrap().psi_p_pow(1)?;
        psi.push(next);
    }
    let mut out = vec![x.one_like()];
    for k in 1..=n as u64 {
        let mut acc = x.zero_like();
        for i in 1..=k {
            let term = out[(k - i) as usize].mul(&psi[vp_u64(i, p) as usize]);
            acc = if i % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        }
        let v = vp_u64(k, p);
        let unit = k / pow_p(p, v);
        let q = acc.exact_div_p(v)?;
        let inv = PadicInt::int(p, unit as i128, q.precision()).unit_inverse()?;
        out.push(q.scale(&inv));
    }
    Ok(out)
}

pub fn lambda_n<R: LeakyAdams>(x: &R, n: u32) -> Result<R> {
    Ok(lambdas(x, n)?.pop().unwrap())
}

/// `sum_{i+j=n} λ^i(x) λ^j(y)`, the value of `λ^n(x + y)`.
pub fn cartan_product<R: LeakyAdams>(lams_x: &[R], lams_y: &[R], n: usize) -> Result<R> {
    for l in [lams_x, lams_y] {
        if l.len() <= n {
            return Err(Error::InsufficientLength { needed: n + 1, got: l.len() });
        }
    }
    let mut acc = lams_x[0].zero_like();
    for i in 0..=n {
        acc = acc.add(&lams_x[i].mul(&lams_y[n - i]));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::ThetaPresentation;

    #[test]
    fn scalars() {
        let one = PadicInt::int(3, 1, 10);
        // λ^1(1) = 1 is forced by λ^1(x) = x; the vanishing starts at n = 2
        assert_eq!(lambda_n(&one, 1).unwrap(), one);
        for n in 2..6 {
            assert!(lambda_n(&one, n).unwrap().is_zero());
        }
        assert_eq!(lambda_n(&PadicInt::int(3, 3, 10), 2).unwrap().to_signed(), 3);
        let x = PadicInt::int(2, 12345, 30);
        for n in 0..=12 {
            let (l, b) = (lambda_n(&x, n).unwrap(), x.binomial(n as u64).unwrap());
            assert!(l.precision() >= b.precision(), "n = {n}");
            assert!(l.eq_mod(&b, b.precision()), "n = {n}");
        }
    }

    #[test]
    fn cartan_on_scalars() {
        let p = 5;
        let (x, y) = (PadicInt::int(p, 2, 12), PadicInt::int(p, 3, 12));
        let (lx, ly) = (lambdas(&x, 2).unwrap(), lambdas(&y, 2).unwrap());
        assert_eq!(cartan_product(&lx, &ly, 2).unwrap().to_signed(), 10);
        assert_eq!(cartan_product(&lx, &ly, 1).unwrap(), x + y);
        assert!(matches!(cartan_product(&lx, &ly, 3), Err(Error::InsufficientLength { .. })));
    }

    #[test]
    fn lambda_two_of_b() {
        let t = ThetaPresentation::free(2, &["b"], 3, 16, Some(24)).unwrap();
        let b = t.base("b");
        assert_eq!(lambda_n(&b, 2).unwrap(), -t.gen("b", 1).unwrap());
        assert_eq!(lambda_n(&b, 1).unwrap(), b);
        assert!(lambda_n(&t.one(), 3).unwrap().is_zero());
        assert_eq!(lambda_n(&t.one(), 1).unwrap(), t.one());
    }
}
