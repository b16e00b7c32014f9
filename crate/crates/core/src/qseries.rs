//! q-expansions of modular forms over Z_p.
//!
//! Series are truncated at a q-precision `M` (coefficients of `q^0..q^{M-1}`)
//! and carry p-adic precision per coefficient. The Frobenius lift acts by
//! `q ↦ q^p`, and the series `b`, `f`, `θ(f)`, `h` and `α` of the Tate curve
//! computation are built from `E_4` (p = 2) or `E_6` (p = 3).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::padic::{check_prime, ilog_p, pow_p, vp_u64, PadicInt, Valuation};

#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    prime: u32,
    coeffs: Vec<PadicInt>,
}

impl QSeries {
    pub fn new(prime: u32, coeffs: Vec<PadicInt>) -> Result<Self> {
        check_prime(prime)?;
        if let Some(c) = coeffs.iter().find(|c| c.prime() != prime) {
            return Err(Error::PrimeMismatch(prime, c.prime()));
        }
        Ok(Self { prime, coeffs })
    }

    pub fn from_ints(prime: u32, coeffs: &[i128], precision: u32) -> Result<Self> {
        let c = coeffs.iter().map(|&v| PadicInt::new(prime, v, precision)).collect::<Result<_>>()?;
        Self::new(prime, c)
    }

    pub fn zero(prime: u32, terms: usize, precision: u32) -> Self {
        Self { prime, coeffs: vec![PadicInt::zero(prime, precision); terms] }
    }

    pub fn one(prime: u32, terms: usize, precision: u32) -> Self {
        let mut s = Self::zero(prime, terms, precision);
        if terms > 0 {
            s.coeffs[0] = PadicInt::one(prime, precision);
        }
        s
    }

    /// The series `q`.
    pub fn q(prime: u32, terms: usize, precision: u32) -> Self {
        let mut s = Self::zero(prime, terms, precision);
        if terms > 1 {
            s.coeffs[1] = PadicInt::one(prime, precision);
        }
        s
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    /// q-precision `M`.
    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[PadicInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> PadicInt {
        self.coeffs[k]
    }

    /// Least coefficient precision.
    pub fn precision(&self) -> u32 {
        self.coeffs.iter().map(|c| c.precision()).min().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Least p-adic valuation over all coefficients.
    pub fn valuation(&self) -> Valuation {
        let mut best: Option<u32> = None;
        let mut bound = u32::MAX;
        for c in &self.coeffs {
            match c.valuation() {
                Valuation::Finite(v) => best = Some(best.map_or(v, |b| b.min(v))),
                Valuation::AtLeast(v) => bound = bound.min(v),
            }
        }
        match best {
            Some(v) if v < bound => Valuation::Finite(v),
            Some(v) => Valuation::AtLeast(v.min(bound)),
            None => Valuation::AtLeast(if bound == u32::MAX { 0 } else { bound }),
        }
    }

    /// Order of vanishing at `q = 0` among known coefficients.
    pub fn q_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, terms: usize) -> Self {
        Self { prime: self.prime, coeffs: self.coeffs[..terms.min(self.terms())].to_vec() }
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        self.map(|c| c.with_precision(precision))
    }

    pub fn scale(&self, c: &PadicInt) -> Self {
        self.map(|x| *x * *c)
    }

    pub fn scale_int(&self, c: i128) -> Self {
        self.map(|x| x.scale(c))
    }

    pub fn exact_div_p(&self, k: u32) -> Result<Self> {
        let c = self.coeffs.iter().map(|x| x.exact_div_p(k)).collect::<Result<_>>()?;
        Ok(Self { prime: self.prime, coeffs: c })
    }

    pub fn mul_p_pow(&self, k: u32) -> Self {
        self.map(|x| x.mul_p_pow(k))
    }

    fn map(&self, f: impl Fn(&PadicInt) -> PadicInt) -> Self {
        Self { prime: self.prime, coeffs: self.coeffs.iter().map(f).collect() }
    }

    fn check(&self, other: &Self) -> Result<usize> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        Ok(self.terms().min(other.terms()))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let m = self.check(other)?;
        Ok(Self { prime: self.prime, coeffs: (0..m).map(|k| self.coeffs[k] + other.coeffs[k]).collect() })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let m = self.check(other)?;
        Ok(Self { prime: self.prime, coeffs: (0..m).map(|k| self.coeffs[k] - other.coeffs[k]).collect() })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let m = self.check(other)?;
        let prec = self.precision().min(other.precision());
        let mut out = vec![PadicInt::zero(self.prime, prec); m];
        for (i, a) in self.coeffs.iter().enumerate().take(m) {
            if a.is_zero() && a.precision() >= prec {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(m - i) {
                out[i + j] += *a * *b;
            }
        }
        Ok(Self { prime: self.prime, coeffs: out })
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one(self.prime, self.terms(), self.precision());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a series whose constant term is a p-adic unit.
    pub fn inverse(&self) -> Result<Self> {
        let m = self.terms();
        if m == 0 {
            return Ok(self.clone());
        }
        let u = self.coeffs[0].unit_inverse()?;
        let mut out: Vec<PadicInt> = vec![u];
        for k in 1..m {
            let mut acc = PadicInt::zero(self.prime, self.precision());
            for j in 1..=k {
                acc += self.coeffs[j] * out[k - j];
            }
            out.push(-(acc * u));
        }
        Ok(Self { prime: self.prime, coeffs: out })
    }

    /// Same q-precision and equal coefficients at the precision both know.
    pub fn agrees(&self, other: &Self) -> bool {
        self.prime == other.prime
            && self.terms() == other.terms()
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.eq_mod(b, a.precision().min(b.precision())))
    }

    /// Coefficientwise residues mod p.
    pub fn mod_p(&self) -> Vec<u64> {
        self.coeffs.iter().map(|c| c.residue() % self.prime as u64).collect()
    }

    /// `p=<p> M=<M> N=<N> [c_0, ...]`, residues reduced to the least
    /// coefficient precision.
    pub fn canonical_text(&self) -> String {
        let n = self.precision();
        let c: Vec<String> = self.coeffs.iter().map(|c| c.with_precision(n).canonical_text()).collect();
        format!("p={} M={} N={} [{}]", self.prime, self.terms(), n, c.join(", "))
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_text())
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{}", c.to_signed()),
                1 => format!("{}*q", c.to_signed()),
                _ => format!("{}*q^{k}", c.to_signed()),
            })
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        write!(f, "{body} + O(q^{})", self.terms())
    }
}

macro_rules! series_op {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&QSeries> for &QSeries {
            type Output = QSeries;
            fn $m(self, rhs: &QSeries) -> QSeries {
                self.$f(rhs).expect("series over the same prime")
            }
        }
        impl $tr<QSeries> for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                (&self).$f(&rhs).expect("series over the same prime")
            }
        }
    };
}
series_op!(Add, add, try_add);
series_op!(Sub, sub, try_sub);
series_op!(Mul, mul, try_mul);

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.map(|c| -*c)
    }
}

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        -&self
    }
}

fn sigma(n: u64, k: u32) -> i128 {
    (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| (d as i128).pow(k)).sum()
}

fn eisenstein(prime: u32, terms: usize, precision: u32, scale: i128, k: u32) -> Result<QSeries> {
    if terms < 2 {
        return Err(Error::InsufficientLength { needed: 2, got: terms });
    }
    let c: Vec<i128> = (0..terms as u64).map(|n| if n == 0 { 1 } else { scale * sigma(n, k) }).collect();
    QSeries::from_ints(prime, &c, precision)
}

/// `E_4 = 1 + 240 sum σ_3(n) q^n`.
pub fn eisenstein_e4(prime: u32, terms: usize, precision: u32) -> Result<QSeries> {
    eisenstein(prime, terms, precision, 240, 3)
}

/// `E_6 = 1 - 504 sum σ_5(n) q^n`.
pub fn eisenstein_e6(prime: u32, terms: usize, precision: u32) -> Result<QSeries> {
    eisenstein(prime, terms, precision, -504, 5)
}

/// `Δ = (E_4^3 - E_6^2) / 1728`. The p-part of 1728 is divided out exactly,
/// so a normalization slip surfaces as `NotDivisible`; the result loses
/// `v_p(1728)` digits.
pub fn discriminant(prime: u32, terms: usize, precision: u32) -> Result<QSeries> {
    let e4 = eisenstein_e4(prime, terms, precision)?;
    let e6 = eisenstein_e6(prime, terms, precision)?;
    let diff = &e4.pow(3) - &e6.pow(2);
    let v = vp_u64(1728, prime);
    let unit = 1728 / pow_p(prime, v) as i128;
    let q = diff.exact_div_p(v)?;
    let inv = PadicInt::new(prime, unit, q.precision())?.unit_inverse()?;
    Ok(q.scale(&inv))
}

/// `j^{-1} = Δ / E_4^3`.
pub fn j_inverse(prime: u32, terms: usize, precision: u32) -> Result<QSeries> {
    let delta = discriminant(prime, terms, precision)?;
    let e4 = eisenstein_e4(prime, terms, precision)?;
    Ok(&delta * &e4.pow(3).inverse()?)
}

/// `q ↦ q^p`. The coefficient of `q^k` only involves the input coefficient
/// of `q^{k/p}`, so the q-precision is preserved exactly.
pub fn frobenius(f: &QSeries) -> QSeries {
    let p = f.prime as usize;
    let prec = f.precision();
    let coeffs = (0..f.terms())
        .map(|k| if k % p == 0 { f.coeffs[k / p] } else { PadicInt::zero(f.prime, prec) })
        .collect();
    QSeries { prime: f.prime, coeffs }
}

/// Coefficientwise p-adic logarithm of a series `1 + y` with every
/// coefficient of `y` divisible by p (by 4 when p = 2). With `y = p^v z`
/// the n-th term is `p^{nv - v_p(n)} z^n / unit(n)`; summation stops once
/// the omitted tail has valuation at least the working precision.
pub fn log_one_unit(f: &QSeries) -> Result<QSeries> {
    let p = f.prime;
    let m = f.terms();
    let prec = f.precision();
    let need = if p == 2 { 2 } else { 1 };
    if m == 0 {
        return Ok(f.clone());
    }
    let y = f - &QSeries::one(p, m, prec);
    let v = match y.valuation() {
        Valuation::AtLeast(_) => return Ok(QSeries::zero(p, m, prec)),
        Valuation::Finite(v) => v,
    };
    if v < need {
        return Err(Error::OutsideDomain(format!(
            "series log needs every coefficient of f - 1 divisible by {}, found valuation {v}",
            pow_p(p, need)
        )));
    }
    let z = y.exact_div_p(v)?;
    // if y(0) = 0 then z^n = O(q^n) and terms with n >= M vanish
    let q_bound = if y.coeffs[0].is_zero() { m as u64 } else { u64::MAX };
    let mut acc = QSeries::zero(p, m, prec);
    let mut zn = QSeries::one(p, m, z.precision());
    let mut n: u64 = 1;
    while n < q_bound && (n as u128) * (v as u128) < (prec + ilog_p(n, p)) as u128 {
        zn = &zn * &z;
        let vn = vp_u64(n, p);
        let inv = PadicInt::int(p, (n / pow_p(p, vn)) as i128, zn.precision()).unit_inverse()?;
        let term = zn.scale(&inv).mul_p_pow(n as u32 * v - vn).with_precision(prec);
        acc = if n % 2 == 1 { &acc + &term } else { &acc - &term };
        n += 1;
    }
    Ok(acc)
}

/// Generator `g`, weight `w` and Eisenstein series used for `b` at `p`.
fn trivialization(prime: u32, terms: usize, precision: u32) -> Result<(i128, u32, QSeries)> {
    match prime {
        2 => Ok((3, 4, eisenstein_e4(prime, terms, precision)?)),
        3 => Ok((2, 6, eisenstein_e6(prime, terms, precision)?)),
        _ => Err(Error::UnsupportedPrime(prime)),
    }
}

/// `b = -log(E) / log(g^w)`: `E_4` with `g = 3` at p = 2, `E_6` with `g = 2`
/// at p = 3. Dividing by `log(g^w)` costs its valuation in digits.
pub fn b_series(prime: u32, terms: usize, precision: u32) -> Result<QSeries> {
    let (g, w, e) = trivialization(prime, terms, precision)?;
    let lg = PadicInt::new(prime, g.pow(w), precision)?.log()?;
    let v = match lg.valuation() {
        Valuation::Finite(v) => v,
        Valuation::AtLeast(_) => return Err(Error::PrecisionExhausted { available: precision, required: precision + 1 }),
    };
    let unit = lg.exact_div_p(v)?.unit_inverse()?;
    let le = log_one_unit(&e)?;
    Ok(-le.exact_div_p(v)?.scale(&unit))
}

/// `f = ψ^p(b) - b`.
pub fn f_series(prime: u32, terms: usize, precision: u32) -> Result<QSeries> {
    let b = b_series(prime, terms, precision)?;
    Ok(&frobenius(&b) - &b)
}

/// `θ(f) = (ψ^p(f) - f^p) / p`, the division exact.
pub fn theta_on_series(f: &QSeries) -> Result<QSeries> {
    let d = &frobenius(f) - &f.pow(f.prime as u64);
    d.exact_div_p(1)
}

/// Coefficients `d_0..d_{M-1}` with `sum d_k base^k = target` to q-precision,
/// for `base = u q + O(q^2)`. `d_k` is solved from the `q^k` coefficient,
/// dividing by `u^k`; if `u` is not a unit the division is audited and a
/// non-integral `d_k` raises `NotIntegral`.
pub fn express_in_base(target: &QSeries, base: &QSeries) -> Result<Vec<PadicInt>> {
    let m = target.check(base)?;
    if m < 2 || !base.coeffs[0].is_zero() || base.coeffs[1].is_zero() {
        return Err(Error::BaseNotInvertible);
    }
    let p = target.prime;
    let u = base.coeffs[1];
    let s = match u.valuation() {
        Valuation::Finite(s) => s,
        Valuation::AtLeast(_) => return Err(Error::BaseNotInvertible),
    };
    let uinv = u.exact_div_p(s)?.unit_inverse()?;
    let mut rest = target.truncate(m);
    let mut power = QSeries::one(p, m, base.precision());
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let c = rest.coeffs[k];
        let d = c.exact_div_p(s * k as u32).map_err(|e| match e {
            Error::NotDivisible { .. } => Error::NotIntegral { index: k },
            other => other,
        })? * uinv.pow(k as u64);
        rest = &rest - &power.scale(&d);
        out.push(d);
        power = &power * &base.truncate(m);
    }
    Ok(out)
}

/// `sum d_k base^k` to the q-precision of `base`.
pub fn compose(coeffs: &[PadicInt], base: &QSeries) -> Result<QSeries> {
    if !base.coeffs.first().is_some_and(|c| c.is_zero()) {
        return Err(Error::BaseNotInvertible);
    }
    let m = base.terms();
    let prec = coeffs.iter().map(|c| c.precision()).fold(base.precision(), u32::min);
    let mut acc = QSeries::zero(base.prime, m, prec);
    let mut power = QSeries::one(base.prime, m, base.precision());
    for d in coeffs.iter().take(m) {
        acc = &acc + &power.scale(d);
        power = &power * base;
    }
    Ok(acc)
}

/// Everything the q-expansion checks need, computed at one working
/// precision.
#[derive(Debug, Clone)]
pub struct TateData {
    pub b: QSeries,
    pub f: QSeries,
    pub theta_f: QSeries,
    pub j_inv: QSeries,
    /// `θ(f) = h(f)`.
    pub h: Vec<PadicInt>,
    /// `f = α(j^{-1})`.
    pub alpha: Vec<PadicInt>,
}

impl TateData {
    pub fn compute(prime: u32, terms: usize, precision: u32) -> Result<Self> {
        let b = b_series(prime, terms, precision)?;
        let f = &frobenius(&b) - &b;
        let theta_f = theta_on_series(&f)?;
        let j_inv = j_inverse(prime, terms, precision)?;
        let h = express_in_base(&theta_f, &f)?;
        let alpha = express_in_base(&f, &j_inv)?;
        Ok(Self { b, f, theta_f, j_inv, h, alpha })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::max_precision;

    fn signed(s: &QSeries) -> Vec<i128> {
        s.coeffs().iter().map(|c| c.to_signed()).collect()
    }

    #[test]
    fn eisenstein_and_delta() {
        let e4 = eisenstein_e4(5, 4, 10).unwrap();
        assert_eq!(signed(&e4), vec![1, 240, 2160, 6720]);
        for p in [2, 3, 5] {
            let d = discriminant(p, 5, max_precision(p)).unwrap();
            assert_eq!(signed(&d), vec![0, 1, -24, 252, -1472], "p = {p}");
            let j = j_inverse(p, 4, max_precision(p)).unwrap();
            assert_eq!(signed(&j), vec![0, 1, -744, 356652]);
        }
    }

    #[test]
    fn frobenius_basics() {
        let q = QSeries::q(3, 8, 5);
        assert_eq!(frobenius(&q), q.pow(3));
        let one = QSeries::one(3, 8, 5);
        assert_eq!(frobenius(&one), one);
    }

    #[test]
    fn log_basics() {
        let one = QSeries::one(3, 6, 10);
        assert!(log_one_unit(&one).unwrap().is_zero());
        let bad = QSeries::from_ints(2, &[1, 2], 10).unwrap();
        assert!(matches!(log_one_unit(&bad), Err(Error::OutsideDomain(_))));
        let x = QSeries::from_ints(3, &[4, 3, 9, 0, 6], 12).unwrap();
        let y = QSeries::from_ints(3, &[1, 6, 0, 3, 3], 12).unwrap();
        let lhs = log_one_unit(&(&x * &y)).unwrap();
        let rhs = &log_one_unit(&x).unwrap() + &log_one_unit(&y).unwrap();
        assert!(lhs.agrees(&rhs));
    }

    #[test]
    fn congruence_with_j_inverse() {
        for p in [2, 3] {
            let f = f_series(p, 64, max_precision(p)).unwrap();
            assert!(f.coeff(0).is_zero());
            let j = j_inverse(p, 64, max_precision(p)).unwrap();
            assert_eq!(f.mod_p(), j.mod_p(), "p = {p}");
        }
    }

    #[test]
    fn express_roundtrip() {
        let p = 2;
        let data = TateData::compute(p, 24, max_precision(p)).unwrap();
        assert!(compose(&data.h, &data.f).unwrap().agrees(&data.theta_f));
        assert!(compose(&data.alpha, &data.j_inv).unwrap().agrees(&data.f));
        assert!(data.alpha[1].is_unit());
        let e = express_in_base(&data.f, &data.f).unwrap();
        assert!(e[1].is_one() && e.iter().enumerate().all(|(k, c)| k == 1 || c.is_zero()));
        let flat = QSeries::from_ints(2, &[0, 2, 1], 10).unwrap();
        let target = QSeries::from_ints(2, &[0, 1, 0], 10).unwrap();
        assert!(matches!(express_in_base(&target, &flat), Err(Error::NotIntegral { index: 1 })));
        assert!(matches!(express_in_base(&target, &QSeries::one(2, 3, 10)), Err(Error::BaseNotInvertible)));
    }

    #[test]
    fn theta_on_constants() {
        assert!(theta_on_series(&QSeries::one(2, 10, 20)).unwrap().is_zero());
    }
}
