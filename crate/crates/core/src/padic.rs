//! Truncated p-adic integers with explicit precision.
//!
//! A [`PadicInt`] is a residue modulo `p^precision` for `p` in {2, 3, 5}.
//! Precision never grows silently: sums and products keep the smaller of the
//! two precisions, and division by `p^k` gives up `k` digits.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

const fn powers<const N: usize>(p: u64) -> [u64; N] {
    let mut out = [0u64; N];
    let mut i = 0;
    let mut v = 1u64;
    while i < N {
        out[i] = v;
        if i + 1 < N {
            v *= p;
        }
        i += 1;
    }
    out
}

static POW2: [u64; 63] = powers(2);
static POW3: [u64; 40] = powers(3);
static POW5: [u64; 27] = powers(5);

/// Primes the crate knows how to work with.
pub const SUPPORTED_PRIMES: [u32; 3] = [2, 3, 5];

pub fn check_prime(p: u32) -> Result<()> {
    if SUPPORTED_PRIMES.contains(&p) {
        Ok(())
    } else {
        Err(Error::UnsupportedPrime(p))
    }
}

/// Largest precision whose modulus fits comfortably in a `u64`.
pub fn max_precision(p: u32) -> u32 {
    match p {
        2 => 62,
        3 => 39,
        5 => 26,
        _ => panic!("unsupported prime {p}"),
    }
}

/// `p^k` as a `u64`. Panics if `k` exceeds [`max_precision`].
pub fn pow_p(p: u32, k: u32) -> u64 {
    let k = k as usize;
    match p {
        2 => POW2[k],
        3 => POW3[k],
        5 => POW5[k],
        _ => panic!("unsupported prime {p}"),
    }
}

/// `v_p(n)` for `n > 0`.
pub fn vp_u64(mut n: u64, p: u32) -> u32 {
    assert!(n != 0, "valuation of zero");
    let p = p as u64;
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// `v_p(n!)` by Legendre's formula.
pub fn vp_factorial(n: u64, p: u32) -> u32 {
    let p = p as u64;
    let mut q = n;
    let mut v = 0u64;
    while q > 0 {
        q /= p;
        v += q;
    }
    v as u32
}

/// `floor(log_p n)` for `n >= 1`.
pub fn ilog_p(n: u64, p: u32) -> u32 {
    n.ilog(p as u64)
}

/// Valuation of a truncated p-adic integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(u32),
    /// The residue is zero: all we know is that the valuation is at least
    /// the precision.
    AtLeast(u32),
}

impl Valuation {
    /// Lower bound on the valuation, valid in both cases.
    pub fn lower_bound(self) -> u32 {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">= {v}"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicInt {
    prime: u32,
    residue: u64,
    precision: u32,
}

impl PadicInt {
    /// Reduce `value` modulo `p^precision`.
    pub fn new(prime: u32, value: i128, precision: u32) -> Result<Self> {
        check_prime(prime)?;
        let max = max_precision(prime);
        if precision == 0 || precision > max {
            return Err(Error::PrecisionOutOfRange { prime, requested: precision, max });
        }
        Ok(Self::int(prime, value, precision))
    }

    /// Like [`PadicInt::new`] but panics on a bad prime or precision.
    pub fn int(prime: u32, value: i128, precision: u32) -> Self {
        debug_assert!(precision >= 1 && precision <= max_precision(prime));
        let m = pow_p(prime, precision) as i128;
        Self { prime, residue: value.rem_euclid(m) as u64, precision }
    }

    pub fn zero(prime: u32, precision: u32) -> Self {
        Self::int(prime, 0, precision)
    }

    pub fn one(prime: u32, precision: u32) -> Self {
        Self::int(prime, 1, precision)
    }

    fn raw(prime: u32, residue: u64, precision: u32) -> Self {
        Self { prime, residue, precision }
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> u64 {
        pow_p(self.prime, self.precision)
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    pub fn is_one(&self) -> bool {
        self.residue == 1
    }

    pub fn is_unit(&self) -> bool {
        !self.residue.is_multiple_of(self.prime as u64)
    }

    /// Representative in `(-p^prec/2, p^prec/2]`.
    pub fn to_signed(&self) -> i128 {
        let m = self.modulus() as i128;
        let r = self.residue as i128;
        if 2 * r > m {
            r - m
        } else {
            r
        }
    }

    pub fn valuation(&self) -> Valuation {
        if self.residue == 0 {
            return Valuation::AtLeast(self.precision);
        }
        Valuation::Finite(vp_u64(self.residue, self.prime))
    }

    /// Drop digits down to `precision` (never raises precision).
    pub fn with_precision(&self, precision: u32) -> Self {
        assert!(precision >= 1, "precision must be positive");
        if precision >= self.precision {
            return *self;
        }
        Self::raw(self.prime, self.residue % pow_p(self.prime, precision), precision)
    }

    /// Equality of the two values modulo `p^k`, `k` at most both precisions.
    pub fn eq_mod(&self, other: &Self, k: u32) -> bool {
        let m = pow_p(self.prime, k);
        self.prime == other.prime && self.residue % m == other.residue % m
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.prime == other.prime {
            Ok(())
        } else {
            Err(Error::PrimeMismatch(self.prime, other.prime))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let prec = self.precision.min(other.precision);
        let m = pow_p(self.prime, prec);
        Ok(Self::raw(self.prime, (self.residue % m + other.residue % m) % m, prec))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-*other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let prec = self.precision.min(other.precision);
        let m = pow_p(self.prime, prec);
        let (a, b) = (self.residue % m, other.residue % m);
        let r = match a.checked_mul(b) {
            Some(x) => x % m,
            None => ((a as u128 * b as u128) % m as u128) as u64,
        };
        Ok(Self::raw(self.prime, r, prec))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::one(self.prime, self.precision);
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        acc
    }

    /// Multiply by a small integer.
    pub fn scale(&self, c: i128) -> Self {
        *self * Self::int(self.prime, c, self.precision)
    }

    /// Divide by `p^k`, which must divide the value.
    pub fn exact_div_p(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(*self);
        }
        if self.precision <= k {
            return Err(Error::PrecisionExhausted { available: self.precision, required: k + 1 });
        }
        if let Valuation::Finite(v) = self.valuation() {
            if v < k {
                return Err(Error::NotDivisible { valuation: v, required: k });
            }
        }
        Ok(Self::raw(self.prime, self.residue / pow_p(self.prime, k), self.precision - k))
    }

    /// Multiply by `p^k`. Unlike an ordinary product this gains `k` digits
    /// (capped at [`max_precision`]), since `p^k x` is known mod `p^(prec+k)`.
    pub fn mul_p_pow(&self, k: u32) -> Self {
        let prec = (self.precision + k).min(max_precision(self.prime));
        let m = pow_p(self.prime, prec) as u128;
        let pk = if k <= max_precision(self.prime) {
            pow_p(self.prime, k) as u128 % m
        } else {
            0
        };
        Self::raw(self.prime, ((self.residue as u128 * pk) % m) as u64, prec)
    }

    pub fn unit_inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit);
        }
        let m = self.modulus() as i128;
        let (mut r0, mut r1) = (m, self.residue as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(Self::int(self.prime, t0, self.precision))
    }

    /// Teichmüller representative of `self mod p`, computed as the limit of
    /// `r^(p^m)`. The sequence is stationary once `m >= precision`.
    pub fn teichmuller(&self) -> Self {
        let mut t = Self::raw(self.prime, self.residue % self.prime as u64, self.precision);
        if t.is_zero() {
            return t;
        }
        for _ in 0..self.precision {
            t = t.pow(self.prime as u64);
        }
        t
    }

    /// Digits `a_0..a_{count-1}`, each zero or a `(p-1)`-th root of unity,
    /// with `self = sum a_i p^i mod p^count`.
    pub fn teichmuller_digits(&self, count: u32) -> Result<Vec<Self>> {
        if count > self.precision {
            return Err(Error::PrecisionExhausted { available: self.precision, required: count });
        }
        let mut digits = Vec::with_capacity(count as usize);
        let mut rest = *self;
        for i in 0..count {
            let d = Self::raw(self.prime, rest.residue % self.prime as u64, self.precision).teichmuller();
            digits.push(d);
            if i + 1 < count {
                rest = (rest - d).exact_div_p(1)?;
            }
        }
        Ok(digits)
    }

    /// `binom(self, n)`, losing `v_p(n!)` digits.
    pub fn binomial(&self, n: u64) -> Result<Self> {
        let v = vp_factorial(n, self.prime);
        if self.precision <= v {
            return Err(Error::PrecisionExhausted { available: self.precision, required: v + 1 });
        }
        let p = self.prime;
        let prec = self.precision;
        let mut num = Self::one(p, prec);
        let mut den_unit = Self::one(p, prec);
        for i in 0..n {
            num *= *self - Self::int(p, i as i128, prec);
            let k = i + 1;
            let u = k / pow_p(p, vp_u64(k, p));
            den_unit *= Self::int(p, u as i128, prec);
        }
        let q = num.exact_div_p(v)?;
        Ok(q * den_unit.unit_inverse()?.with_precision(q.precision))
    }

    /// The p-adic logarithm on `1 + pZ_p` (`1 + 4Z_2` when `p = 2`).
    ///
    /// Writing `x - 1 = p^v u`, the n-th term is `p^(nv - v_p(n)) u^n / unit(n)`,
    /// so each term is formed at a precision that loses nothing and the sum
    /// keeps the input precision. Summation stops at the first `n` with
    /// `n v - floor(log_p n) >= precision`; that bound is nondecreasing in `n`,
    /// so every later term vanishes too.
    pub fn log(&self) -> Result<Self> {
        let p = self.prime;
        let prec = self.precision;
        let need = if p == 2 { 2 } else { 1 };
        if prec < need {
            return Err(Error::PrecisionExhausted { available: prec, required: need });
        }
        let m = pow_p(p, need);
        if self.residue % m != 1 {
            return Err(Error::OutsideDomain(format!(
                "log needs x = 1 mod {m}, got {}",
                self.residue % m
            )));
        }
        let y = *self - Self::one(p, prec);
        let v = match y.valuation() {
            Valuation::AtLeast(_) => return Ok(Self::zero(p, prec)),
            Valuation::Finite(v) => v,
        };
        let u = y.exact_div_p(v)?;
        let mut acc = Self::zero(p, prec);
        let mut un = Self::one(p, u.precision);
        let mut n: u64 = 1;
        while (n as u128) * (v as u128) < (prec + ilog_p(n, p)) as u128 {
            un *= u;
            let vn = vp_u64(n, p);
            let unit_n = n / pow_p(p, vn);
            let core = un * Self::int(p, unit_n as i128, un.precision).unit_inverse()?;
            let shift = (n as u32) * v - vn;
            let term = core.mul_p_pow(shift).with_precision(prec);
            if n % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
            n += 1;
        }
        Ok(acc)
    }

    /// Canonical text: the nonnegative residue.
    pub fn canonical_text(&self) -> String {
        self.residue.to_string()
    }
}

/// `binom(x, k)` for `k = 0..=kmax` at an exact integer `x`, reduced mod
/// `p^precision`. Exact integer values need no guard digits: the p-part and
/// the unit part of each ratio are tracked separately.
pub fn binomial_row(x: i128, kmax: usize, prime: u32, precision: u32) -> Vec<PadicInt> {
    let mut out = Vec::with_capacity(kmax + 1);
    let mut val: i64 = 0;
    let mut unit = PadicInt::one(prime, precision);
    let mut dead = false;
    let p = prime as i128;
    for k in 0..=kmax {
        if k > 0 {
            let mut a = x - (k as i128 - 1);
            if a == 0 {
                dead = true;
            }
            if !dead {
                while a % p == 0 {
                    a /= p;
                    val += 1;
                }
                let mut b = k as i128;
                while b % p == 0 {
                    b /= p;
                    val -= 1;
                }
                let inv = PadicInt::int(prime, b, precision).unit_inverse().expect("unit");
                unit = unit * PadicInt::int(prime, a, precision) * inv;
            }
        }
        if dead {
            out.push(PadicInt::zero(prime, precision));
        } else {
            debug_assert!(val >= 0);
            let v = val as u32;
            out.push(if v >= precision {
                PadicInt::zero(prime, precision)
            } else {
                unit.mul_p_pow(v).with_precision(precision)
            });
        }
    }
    out
}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.to_signed(), self.prime, self.precision)
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_signed())
    }
}

impl Add for PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("prime mismatch")
    }
}

impl Sub for PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("prime mismatch")
    }
}

impl Mul for PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).expect("prime mismatch")
    }
}

impl Neg for PadicInt {
    type Output = PadicInt;
    fn neg(self) -> Self {
        let m = self.modulus();
        Self::raw(self.prime, (m - self.residue) % m, self.precision)
    }
}

impl AddAssign for PadicInt {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for PadicInt {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for PadicInt {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u32, v: i128, prec: u32) -> PadicInt {
        PadicInt::int(p, v, prec)
    }

    #[test]
    fn small_arithmetic() {
        assert!((z(3, 1, 4) + z(3, -1, 4)).is_zero());
        let sq = z(2, 2, 5) * z(2, 2, 5);
        assert_eq!((sq.residue(), sq.precision()), (4, 5));
        let mixed = z(5, 7, 3) + z(5, 7, 8);
        assert_eq!(mixed.precision(), 3);
        assert_eq!(z(2, 1, 3).try_add(&z(3, 1, 3)), Err(Error::PrimeMismatch(2, 3)));
    }

    #[test]
    fn construction_limits() {
        assert!(PadicInt::new(7, 1, 3).is_err());
        assert!(PadicInt::new(2, 1, 0).is_err());
        assert!(PadicInt::new(3, 1, 40).is_err());
        assert_eq!(PadicInt::new(3, -1, 2).unwrap().residue(), 8);
    }

    #[test]
    fn valuations() {
        assert_eq!(z(2, 12, 8).valuation(), Valuation::Finite(2));
        assert_eq!(z(2, 0, 8).valuation(), Valuation::AtLeast(8));
        assert_eq!(z(3, 9, 8).valuation(), Valuation::Finite(2));
    }

    #[test]
    fn exact_division() {
        let q = z(2, 12, 8).exact_div_p(2).unwrap();
        assert_eq!((q.residue(), q.precision()), (3, 6));
        assert_eq!(
            z(2, 3, 8).exact_div_p(1),
            Err(Error::NotDivisible { valuation: 0, required: 1 })
        );
        assert!(matches!(z(3, 0, 2).exact_div_p(2), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn inverses() {
        assert_eq!(z(2, 1, 4).unit_inverse().unwrap().residue(), 1);
        assert_eq!(z(2, 3, 4).unit_inverse().unwrap().residue(), 11);
        assert_eq!(z(3, 6, 4).unit_inverse(), Err(Error::NotAUnit));
    }

    #[test]
    fn teichmuller_examples() {
        let d: Vec<i128> = z(2, 5, 6).teichmuller_digits(3).unwrap().iter().map(|d| d.to_signed()).collect();
        assert_eq!(d, vec![1, 0, 1]);
        let d: Vec<i128> = z(3, -1, 6).teichmuller_digits(3).unwrap().iter().map(|d| d.to_signed()).collect();
        assert_eq!(d, vec![-1, 0, 0]);
        let d: Vec<i128> = z(3, 3, 6).teichmuller_digits(3).unwrap().iter().map(|d| d.to_signed()).collect();
        assert_eq!(d, vec![0, 1, 0]);
        assert!(z(3, 3, 2).teichmuller_digits(3).is_err());
        // 2 mod 5 lifts to a primitive fourth root of unity
        let t = z(5, 2, 10).teichmuller();
        assert_eq!(t.pow(4).residue(), 1);
        assert_eq!(t.pow(2).to_signed(), -1);
    }

    #[test]
    fn binomials() {
        assert_eq!(z(3, 3, 6).binomial(2).unwrap().residue(), 3);
        for n in 0..=10 {
            let b = z(2, -1, 12).binomial(n).unwrap();
            assert_eq!(b.to_signed(), if n % 2 == 0 { 1 } else { -1 });
            assert_eq!(b.precision(), 12 - vp_factorial(n, 2));
        }
        assert!(z(2, 5, 3).binomial(4).is_err());
        assert_eq!(z(5, 1234, 9).binomial(0).unwrap().residue(), 1);
    }

    #[test]
    fn binomial_row_matches_integers() {
        let row = binomial_row(-7, 9, 3, 8);
        let mut c: i128 = 1;
        for (k, v) in row.iter().enumerate() {
            assert_eq!(*v, z(3, c, 8), "k = {k}");
            c = c * (-7 - k as i128) / (k as i128 + 1);
        }
        let row = binomial_row(4, 6, 2, 5);
        let want = [1, 4, 6, 4, 1, 0, 0];
        for (v, w) in row.iter().zip(want) {
            assert_eq!(v.to_signed(), w);
        }
    }

    #[test]
    fn log_basics() {
        assert!(z(3, 1, 10).log().unwrap().is_zero());
        assert!(matches!(z(3, 2, 10).log(), Err(Error::OutsideDomain(_))));
        assert!(matches!(z(2, 3, 10).log(), Err(Error::OutsideDomain(_))));
        assert_eq!(z(3, 4, 10).log().unwrap().precision(), 10);
        let x = z(5, 26, 12);
        assert_eq!((x * x).log().unwrap(), x.log().unwrap().scale(2));
        // log(-1) = 0 on 1 + 4Z_2 is excluded, but log(5) has valuation 2
        assert_eq!(z(2, 5, 20).log().unwrap().valuation(), Valuation::Finite(2));
    }

    #[test]
    fn mul_p_pow_gains_precision() {
        let x = z(3, 5, 4).mul_p_pow(2);
        assert_eq!((x.residue(), x.precision()), (45, 6));
        let y = z(2, 1, 61).mul_p_pow(5);
        assert_eq!(y.precision(), 62);
    }
}
