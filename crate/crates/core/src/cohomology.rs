//! Continuous cohomology of Z_p (topologically generated by g) with
//! coefficients in `(Z/p^N)^r`.
//!
//! Z_p has cohomological dimension 1, so only `H^0 = ker(ψ^g - 1)` and
//! `H^1 = coker(ψ^g - 1)` can be nonzero. Both are read off the Smith
//! normal form of `ψ^g - 1`.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::padic::{check_prime, max_precision, pow_p, vp_u64, PadicInt};

/// A matrix over `Z/p^N`, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct ModMatrix {
    prime: u32,
    exponent: u32,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn new(prime: u32, exponent: u32, rows: usize, cols: usize, entries: &[i128]) -> Result<Self> {
        check_prime(prime)?;
        if exponent == 0 || exponent > max_precision(prime) {
            return Err(Error::PrecisionOutOfRange { prime, requested: exponent, max: max_precision(prime) });
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch);
        }
        let m = pow_p(prime, exponent) as i128;
        let data = entries.iter().map(|&v| v.rem_euclid(m) as u64).collect();
        Ok(Self { prime, exponent, rows, cols, data })
    }

    pub fn zero(prime: u32, exponent: u32, rows: usize, cols: usize) -> Self {
        Self { prime, exponent, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(prime: u32, exponent: u32, n: usize) -> Self {
        let mut m = Self::zero(prime, exponent, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn random<R: Rng>(prime: u32, exponent: u32, rows: usize, cols: usize, rng: &mut R) -> Self {
        let m = pow_p(prime, exponent);
        Self { prime, exponent, rows, cols, data: (0..rows * cols).map(|_| rng.gen_range(0..m)).collect() }
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn modulus(&self) -> u64 {
        pow_p(self.prime, self.exponent)
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    fn mulmod(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus() as u128) as u64
    }

    fn submod(&self, a: u64, b: u64) -> u64 {
        let m = self.modulus();
        (a + m - b) % m
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows || self.prime != other.prime || self.exponent != other.exponent {
            return Err(Error::DimensionMismatch);
        }
        let m = self.modulus() as u128;
        let mut out = Self::zero(self.prime, self.exponent, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: u128 = 0;
                for k in 0..self.cols {
                    acc = (acc + self.get(i, k) as u128 * other.get(k, j) as u128) % m;
                }
                out.set(i, j, acc as u64);
            }
        }
        Ok(out)
    }

    /// `self - I`.
    pub fn minus_identity(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch);
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            out.set(i, i, self.submod(self.get(i, i), 1));
        }
        Ok(out)
    }

    /// Invertible over `Z/p^N`, i.e. invertible mod p.
    pub fn is_invertible(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let s = smith_normal_form(self);
        s.diagonal.len() == self.rows && s.diagonal.iter().all(|&d| d == 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row_i -= f * row_t`.
    fn row_axpy(&mut self, i: usize, t: usize, f: u64) {
        for j in 0..self.cols {
            let v = self.submod(self.get(i, j), self.mulmod(f, self.get(t, j)));
            self.set(i, j, v);
        }
    }

    fn col_axpy(&mut self, j: usize, t: usize, f: u64) {
        for i in 0..self.rows {
            let v = self.submod(self.get(i, j), self.mulmod(f, self.get(i, t)));
            self.set(i, j, v);
        }
    }

    fn scale_row(&mut self, i: usize, f: u64) {
        for j in 0..self.cols {
            let v = self.mulmod(f, self.get(i, j));
            self.set(i, j, v);
        }
    }
}

impl fmt::Debug for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| format!("[{}]", (0..self.cols).map(|j| self.get(i, j).to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}] mod {}^{}", rows.join(", "), self.prime, self.exponent)
    }
}

/// `U A V = D` with `D` diagonal, entries `p^k` (`k < N`) followed by zeros.
#[derive(Debug, Clone)]
pub struct SmithForm {
    /// Nonzero diagonal entries, each a power of p.
    pub diagonal: Vec<u64>,
    pub d: ModMatrix,
    pub u: ModMatrix,
    pub v: ModMatrix,
}

/// Smith normal form over the local ring `Z/p^N` by minimal-valuation
/// pivoting: the pivot divides every remaining entry, so each elimination
/// step is an exact division.
pub fn smith_normal_form(a: &ModMatrix) -> SmithForm {
    let (p, n) = (a.prime, a.exponent);
    let mut d = a.clone();
    let mut u = ModMatrix::identity(p, n, a.rows);
    let mut v = ModMatrix::identity(p, n, a.cols);
    let mut diagonal = Vec::new();
    let modulus = a.modulus();
    for t in 0..a.rows.min(a.cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in t..a.rows {
            for j in t..a.cols {
                let x = d.get(i, j);
                if x != 0 {
                    let val = vp_u64(x, p);
                    if best.is_none_or(|(b, _, _)| val < b) {
                        best = Some((val, i, j));
                    }
                }
            }
        }
        let Some((val, pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        let pk = pow_p(p, val);
        let unit = d.get(t, t) / pk;
        let inv = PadicInt::int(p, unit as i128, n).unit_inverse().expect("unit").residue();
        d.scale_row(t, inv);
        u.scale_row(t, inv);
        for i in t + 1..a.rows {
            let f = d.get(i, t) / pk;
            if f != 0 {
                d.row_axpy(i, t, f);
                u.row_axpy(i, t, f);
            }
        }
        for j in t + 1..a.cols {
            let f = d.get(t, j) / pk;
            if f != 0 {
                d.col_axpy(j, t, f);
                v.col_axpy(j, t, f);
            }
        }
        debug_assert_eq!(d.get(t, t), pk % modulus);
        diagonal.push(pk);
    }
    SmithForm { diagonal, d, u, v }
}

/// A finite abelian p-group `⊕ Z/p^{e_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    pub prime: u32,
    /// Exponents `e_i > 0`, sorted descending.
    pub exponents: Vec<u32>,
}

impl AbelianGroup {
    pub fn new(prime: u32, mut exponents: Vec<u32>) -> Self {
        exponents.retain(|&e| e > 0);
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        Self { prime, exponents }
    }

    pub fn zero(prime: u32) -> Self {
        Self { prime, exponents: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.is_empty()
    }

    /// `log_p` of the order.
    pub fn order_log(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// The order, when it fits in a u128.
    pub fn order(&self) -> Option<u128> {
        (self.prime as u128).checked_pow(self.order_log())
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .exponents
            .iter()
            .map(|&e| match (self.prime as u128).checked_pow(e) {
                Some(m) if e <= 8 => format!("Z/{m}"),
                _ => format!("Z/{}^{e}", self.prime),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `ψ^g` acting on `(Z/p^N)^r`.
#[derive(Debug, Clone)]
pub struct CyclicAction {
    operator: ModMatrix,
}

impl CyclicAction {
    /// The operator must be invertible mod p.
    pub fn new(operator: ModMatrix) -> Result<Self> {
        if !operator.is_invertible() {
            return Err(Error::NotAUnit);
        }
        Ok(Self { operator })
    }

    /// Multiplication by an integer unit on `Z/p^N`.
    pub fn scalar(prime: u32, exponent: u32, unit: i128) -> Result<Self> {
        Self::new(ModMatrix::new(prime, exponent, 1, 1, &[unit])?)
    }

    /// The zero module.
    pub fn zero_module(prime: u32, exponent: u32) -> Self {
        Self { operator: ModMatrix::zero(prime, exponent, 0, 0) }
    }

    pub fn operator(&self) -> &ModMatrix {
        &self.operator
    }

    pub fn prime(&self) -> u32 {
        self.operator.prime
    }

    pub fn exponent(&self) -> u32 {
        self.operator.exponent
    }

    pub fn rank(&self) -> usize {
        self.operator.rows
    }

    /// `g A g^{-1}`-style change of basis: `P A P^{-1}` given `P` and its
    /// inverse.
    pub fn conjugate(&self, p: &ModMatrix, p_inv: &ModMatrix) -> Result<Self> {
        Ok(Self { operator: p.mul(&self.operator)?.mul(p_inv)? })
    }
}

/// `H^0 = ker(ψ^g - 1)` and `H^1 = coker(ψ^g - 1)`. A Smith entry `p^k`
/// contributes `Z/p^k` to both; a zero entry contributes `Z/p^N` to both.
pub fn h0_h1(a: &CyclicAction) -> (AbelianGroup, AbelianGroup) {
    let p = a.prime();
    let n = a.exponent();
    let m = a.operator.minus_identity().expect("square operator");
    let s = smith_normal_form(&m);
    let mut exps: Vec<u32> = s.diagonal.iter().map(|&d| vp_u64(d, p)).collect();
    exps.resize(a.rank(), n);
    let g = AbelianGroup::new(p, exps);
    (g.clone(), g)
}

/// `H^s`; zero for `s >= 2` since Z_p has cohomological dimension 1.
pub fn cohomology(a: &CyclicAction, s: u32) -> AbelianGroup {
    match s {
        0 => h0_h1(a).0,
        1 => h0_h1(a).1,
        _ => AbelianGroup::zero(a.prime()),
    }
}

/// Generator of Z_p^×/μ used for the presets.
pub fn preset_generator(prime: u32) -> Result<i128> {
    match prime {
        2 => Ok(3),
        3 => Ok(2),
        _ => Err(Error::UnsupportedPrime(prime)),
    }
}

/// `ψ^g` on `KO_t ⊗ Z_p` mod `p^N`. In degree `4k` it is `g^{2k}` on Z_p;
/// at p = 2 the η-torsion in degrees `8k+1` and `8k+2` is Z/2 with trivial
/// action; every other degree is zero.
pub fn ko_preset(prime: u32, t: i64, exponent: u32) -> Result<CyclicAction> {
    let g = preset_generator(prime)?;
    ModMatrix::new(prime, exponent, 0, 0, &[])?;
    let residue = match prime {
        2 => t.rem_euclid(8),
        _ => t.rem_euclid(4),
    };
    match (prime, residue) {
        (_, 0) | (2, 4) => {
            let gp = PadicInt::int(prime, g, exponent);
            let e = t.unsigned_abs() / 2;
            let power = if t >= 0 { gp.pow(e) } else { gp.unit_inverse()?.pow(e) };
            CyclicAction::scalar(prime, exponent, power.residue() as i128)
        }
        (2, 1) | (2, 2) => CyclicAction::scalar(2, 1, 1),
        _ => Ok(CyclicAction::zero_module(prime, exponent)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn smith_examples() {
        let a = ModMatrix::new(2, 8, 1, 1, &[2]).unwrap();
        assert_eq!(smith_normal_form(&a).diagonal, vec![2]);
        assert_eq!(smith_normal_form(&ModMatrix::identity(3, 4, 3)).diagonal, vec![1, 1, 1]);
        assert!(smith_normal_form(&ModMatrix::zero(5, 2, 1, 1)).diagonal.is_empty());
        let b = ModMatrix::new(2, 6, 2, 3, &[4, 6, 2, 8, 0, 12]).unwrap();
        let s = smith_normal_form(&b);
        assert_eq!(s.u.mul(&b).unwrap().mul(&s.v).unwrap(), s.d);
    }

    #[test]
    fn smith_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = ModMatrix::random(2, 10, 4, 4, &mut rng);
            let s = smith_normal_form(&a);
            assert_eq!(s.u.mul(&a).unwrap().mul(&s.v).unwrap(), s.d);
            assert!(s.u.is_invertible() && s.v.is_invertible());
        }
    }

    #[test]
    fn presets() {
        let triv = ko_preset(3, 0, 6).unwrap();
        assert_eq!(h0_h1(&triv), (AbelianGroup::new(3, vec![6]), AbelianGroup::new(3, vec![6])));
        let ko4 = ko_preset(2, 4, 12).unwrap();
        assert_eq!(ko4.operator().get(0, 0), 9);
        assert_eq!(h0_h1(&ko4).1.order(), Some(8));
        let eta = ko_preset(2, 1, 12).unwrap();
        assert_eq!(h0_h1(&eta).1, AbelianGroup::new(2, vec![1]));
        assert_eq!(ko_preset(3, 4, 5).unwrap().operator().get(0, 0), 4);
        assert_eq!(ko_preset(3, 2, 5).unwrap().rank(), 0);
        assert!(matches!(ko_preset(5, 0, 3), Err(Error::UnsupportedPrime(5))));
        assert!(cohomology(&ko4, 2).is_zero());
        let neg = ko_preset(2, -4, 10).unwrap();
        assert_eq!((neg.operator().get(0, 0) * 9) % 1024, 1);
    }

    #[test]
    fn free_action_has_no_cohomology() {
        let a = CyclicAction::scalar(3, 5, 2).unwrap();
        let (h0, h1) = h0_h1(&a);
        assert!(h0.is_zero() && h1.is_zero());
        assert!(matches!(CyclicAction::scalar(3, 5, 3), Err(Error::NotAUnit)));
    }
}
