//! Continuous functions Z_p -> Z/p^N through their Mahler expansions.
//!
//! A function is stored as its complete list of Mahler coefficients
//! `c_k = (Δ^k f)(0)`, so that `f(x) = sum_k c_k binom(x, k)`. Mod `p^N`
//! only finitely many coefficients survive, and every constructor checks
//! that the list it produces is complete.
//!
//! The group Z_p^×/μ is identified with Z_p by sending the topological
//! generator g to 1. Under this identification the multiplicative formulas
//! for the Adams action and the Hopf structure on `Maps(Z_p^×/μ, Z_p)`
//! become additive:
//!
//! | multiplicative          | additive           |
//! |-------------------------|--------------------|
//! | `(ψ^a f)(b) = f(ab)`    | `translate(f, c)`  |
//! | `Δf(a, b) = f(ab)`      | `f(x + y)`         |
//! | `S f(a) = f(a^{-1})`    | `f(-x)`            |
//! | `ε f = f(1)`            | `f(0)`             |

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lambda::lambdas;
use crate::padic::{binomial_row, max_precision, pow_p, PadicInt};
use crate::poly::{Generator, Monomial, PolyRing, Registry, RewriteSystem, SparsePoly};
use crate::theta::{ThetaElement, ThetaPresentation};

/// Number of trailing differences that must vanish for a sample window to
/// be accepted.
const TRAILING: usize = 2;

fn trim(mut c: Vec<PadicInt>) -> Vec<PadicInt> {
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    c
}

/// Forward differences `(Δ^k v)(0)` for `k < v.len()`.
fn forward_differences(values: &[PadicInt]) -> Vec<PadicInt> {
    let mut row = values.to_vec();
    let mut out = Vec::with_capacity(values.len());
    while !row.is_empty() {
        out.push(row[0]);
        row = row.windows(2).map(|w| w[1] - w[0]).collect();
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MahlerFn1 {
    prime: u32,
    modulus: u32,
    coeffs: Vec<PadicInt>,
}

impl MahlerFn1 {
    pub fn from_coeffs(prime: u32, modulus: u32, coeffs: &[i128]) -> Result<Self> {
        PadicInt::new(prime, 0, modulus)?;
        let c = coeffs.iter().map(|&v| PadicInt::int(prime, v, modulus)).collect();
        Ok(Self { prime, modulus, coeffs: trim(c) })
    }

    /// Mahler inversion of samples `f(0), ..., f(M)`. The last two forward
    /// differences must vanish, otherwise the window is reported incomplete.
    /// The modulus is lowered to the least precise sample if necessary.
    pub fn from_samples(values: &[PadicInt], modulus: u32) -> Result<Self> {
        let first = values.first().ok_or(Error::IncompleteSampleWindow)?;
        let prime = first.prime();
        let modulus = values.iter().map(|v| v.precision()).fold(modulus, u32::min);
        let vals: Vec<PadicInt> = values.iter().map(|v| v.with_precision(modulus)).collect();
        let diffs = forward_differences(&vals);
        let tail = TRAILING.min(diffs.len());
        if diffs[diffs.len() - tail..].iter().any(|d| !d.is_zero()) {
            return Err(Error::IncompleteSampleWindow);
        }
        Ok(Self { prime, modulus, coeffs: trim(diffs) })
    }

    /// Sample `f` on `0..len + TRAILING` and invert. `len` must bound the
    /// length of the Mahler expansion.
    pub fn from_fn(prime: u32, modulus: u32, len: usize, f: impl Fn(i128) -> PadicInt) -> Result<Self> {
        let vals: Vec<PadicInt> = (0..(len + TRAILING) as i128).map(f).collect();
        if vals[0].prime() != prime {
            return Err(Error::PrimeMismatch(prime, vals[0].prime()));
        }
        Self::from_samples(&vals, modulus)
    }

    /// `β_k(x) = binom(x, k)`.
    pub fn beta(prime: u32, modulus: u32, k: usize) -> Self {
        let mut c = vec![0i128; k + 1];
        c[k] = 1;
        Self::from_coeffs(prime, modulus, &c).expect("valid prime and modulus")
    }

    pub fn identity(prime: u32, modulus: u32) -> Self {
        Self::beta(prime, modulus, 1)
    }

    pub fn constant(prime: u32, modulus: u32, c: i128) -> Self {
        Self::from_coeffs(prime, modulus, &[c]).expect("valid prime and modulus")
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[PadicInt] {
        &self.coeffs
    }

    /// Mahler coefficient `c_k` (zero past the end of the list).
    pub fn coeff(&self, k: usize) -> PadicInt {
        self.coeffs.get(k).copied().unwrap_or_else(|| PadicInt::zero(self.prime, self.modulus))
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Value at an integer point.
    pub fn evaluate_int(&self, x: i128) -> PadicInt {
        let row = binomial_row(x, self.coeffs.len().saturating_sub(1), self.prime, self.modulus);
        self.coeffs.iter().zip(row).fold(PadicInt::zero(self.prime, self.modulus), |acc, (c, b)| acc + *c * b)
    }

    /// Value at a p-adic point; `binom(x, k)` costs `v_p(k!)` digits of `x`.
    pub fn evaluate(&self, x: &PadicInt) -> Result<PadicInt> {
        let mut acc = PadicInt::zero(self.prime, self.modulus);
        for (k, c) in self.coeffs.iter().enumerate() {
            acc += *c * x.binomial(k as u64)?;
        }
        Ok(acc)
    }

    fn same(&self, other: &Self) -> Result<u32> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        Ok(self.modulus.min(other.modulus))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let n = self.same(other)?;
        let len = self.len().max(other.len());
        let c = (0..len).map(|k| (self.coeff(k) + other.coeff(k)).with_precision(n)).collect();
        Ok(Self { prime: self.prime, modulus: n, coeffs: trim(c) })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&PadicInt::int(self.prime, -1, self.modulus)))
    }

    pub fn scale(&self, c: &PadicInt) -> Self {
        let n = self.modulus.min(c.precision());
        Self { prime: self.prime, modulus: n, coeffs: trim(self.coeffs.iter().map(|x| (*x * *c).with_precision(n)).collect()) }
    }

    /// Pointwise product. `β_i β_j` only involves `β_k` for `k <= i + j`, so
    /// `len(f) + len(g) - 1` samples determine the product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let n = self.same(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self { prime: self.prime, modulus: n, coeffs: Vec::new() });
        }
        let len = self.len() + other.len() - 1;
        Self::from_fn(self.prime, n, len, |x| self.evaluate_int(x) * other.evaluate_int(x))
    }

    /// `x ↦ f(x + c)`; `translate(f, 1)` is the action of the generator g.
    pub fn translate(&self, c: &PadicInt) -> Result<Self> {
        if c.prime() != self.prime {
            return Err(Error::PrimeMismatch(self.prime, c.prime()));
        }
        let vals: Vec<PadicInt> = (0..(self.len() + TRAILING) as i128)
            .map(|i| self.evaluate(&(*c + PadicInt::int(self.prime, i, c.precision()))))
            .collect::<Result<_>>()?;
        Self::from_samples(&vals, self.modulus)
    }

    /// Translation by an integer, exact at any modulus.
    pub fn translate_int(&self, c: i128) -> Self {
        Self::from_fn(self.prime, self.modulus, self.len(), |x| self.evaluate_int(x + c)).expect("translation preserves length")
    }

    /// Antipode `x ↦ f(-x)`.
    pub fn antipode(&self) -> Self {
        Self::from_fn(self.prime, self.modulus, self.len(), |x| self.evaluate_int(-x)).expect("negation preserves length")
    }

    /// Counit: evaluation at 0.
    pub fn counit(&self) -> PadicInt {
        self.coeff(0)
    }

    /// Coproduct `(x, y) ↦ f(x + y)`; its coefficient of `β_j(x) β_k(y)` is
    /// `c_{j+k}` by Vandermonde's identity, which the grid inversion recovers.
    pub fn coproduct(&self) -> MahlerFn2 {
        let l = self.len();
        MahlerFn2::from_fn(self.prime, self.modulus, l, l, |x, y| self.evaluate_int(x + y)).expect("coproduct preserves length")
    }

    /// Reduce mod `p^modulus` (never raises the modulus).
    pub fn reduce(&self, modulus: u32) -> Self {
        let n = self.modulus.min(modulus);
        Self { prime: self.prime, modulus: n, coeffs: trim(self.coeffs.iter().map(|c| c.with_precision(n)).collect()) }
    }

    /// `p=<p> N=<N> [c_0, c_1, ...]` with nonnegative residues.
    pub fn canonical_text(&self) -> String {
        let c: Vec<String> = self.coeffs.iter().map(|c| c.canonical_text()).collect();
        format!("p={} N={} [{}]", self.prime, self.modulus, c.join(", "))
    }
}

impl fmt::Debug for MahlerFn1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_text())
    }
}

impl fmt::Display for MahlerFn1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("{}*β_{k}", c.to_signed()))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Functions of two variables, basis `β_j(x) β_k(y)`.
#[derive(Clone, PartialEq, Eq)]
pub struct MahlerFn2 {
    prime: u32,
    modulus: u32,
    /// `coeffs[j][k]`, rectangular.
    coeffs: Vec<Vec<PadicInt>>,
}

impl MahlerFn2 {
    /// Invert a grid `values[x][y]`; trailing differences along both axes
    /// must vanish.
    pub fn from_grid(values: &[Vec<PadicInt>], modulus: u32) -> Result<Self> {
        let prime = values.first().and_then(|r| r.first()).ok_or(Error::IncompleteSampleWindow)?.prime();
        let rows: Vec<Vec<PadicInt>> =
            values.iter().map(|r| Ok(MahlerFn1::from_samples(r, modulus)?.pad(r.len()))).collect::<Result<_>>()?;
        let ny = rows[0].len();
        let mut coeffs: Vec<Vec<PadicInt>> = Vec::with_capacity(rows.len());
        let mut cols = Vec::with_capacity(ny);
        for k in 0..ny {
            let col: Vec<PadicInt> = rows.iter().map(|r| r[k]).collect();
            cols.push(MahlerFn1::from_samples(&col, modulus)?.pad(rows.len()));
        }
        for j in 0..rows.len() {
            coeffs.push((0..ny).map(|k| cols[k][j]).collect());
        }
        let modulus = coeffs.iter().flatten().map(|c: &PadicInt| c.precision()).fold(modulus, u32::min);
        let mut out = Self { prime, modulus, coeffs };
        out.trim();
        Ok(out)
    }

    pub fn from_fn(prime: u32, modulus: u32, lx: usize, ly: usize, f: impl Fn(i128, i128) -> PadicInt) -> Result<Self> {
        let grid: Vec<Vec<PadicInt>> = (0..(lx + TRAILING) as i128)
            .map(|x| (0..(ly + TRAILING) as i128).map(|y| f(x, y)).collect())
            .collect();
        if grid[0][0].prime() != prime {
            return Err(Error::PrimeMismatch(prime, grid[0][0].prime()));
        }
        Self::from_grid(&grid, modulus)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|r| r.iter().all(|c| c.is_zero())) {
            self.coeffs.pop();
        }
        let width = self
            .coeffs
            .iter()
            .map(|r| r.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1))
            .max()
            .unwrap_or(0);
        for r in &mut self.coeffs {
            r.truncate(width);
        }
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Coefficient of `β_j(x) β_k(y)`.
    pub fn coeff(&self, j: usize, k: usize) -> PadicInt {
        self.coeffs
            .get(j)
            .and_then(|r| r.get(k))
            .copied()
            .unwrap_or_else(|| PadicInt::zero(self.prime, self.modulus))
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.coeffs.len(), self.coeffs.first().map_or(0, |r| r.len()))
    }

    pub fn evaluate_int(&self, x: i128, y: i128) -> PadicInt {
        let (lx, ly) = self.shape();
        let bx = binomial_row(x, lx.saturating_sub(1), self.prime, self.modulus);
        let by = binomial_row(y, ly.saturating_sub(1), self.prime, self.modulus);
        let mut acc = PadicInt::zero(self.prime, self.modulus);
        for (j, row) in self.coeffs.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                acc += *c * bx[j] * by[k];
            }
        }
        acc
    }

    pub fn canonical_text(&self) -> String {
        let rows: Vec<String> = self
            .coeffs
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|c| c.canonical_text()).collect::<Vec<_>>().join(", ")))
            .collect();
        format!("p={} N={} [{}]", self.prime, self.modulus, rows.join(", "))
    }
}

impl fmt::Debug for MahlerFn2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_text())
    }
}

impl MahlerFn1 {
    fn pad(&self, len: usize) -> Vec<PadicInt> {
        (0..len).map(|k| self.coeff(k)).collect()
    }
}

/// `π(b_0)(x), ..., π(b_n)(x)` from the ghost identity
/// `x = π(b_0)^{p^k} + p π(b_1)^{p^{k-1}} + ... + p^k π(b_k)`
/// (ψ^p acts trivially on functions), at `precision - k` digits for level k.
pub fn pi_levels_at(x: i128, n: u32, prime: u32, precision: u32) -> Result<Vec<PadicInt>> {
    let xv = PadicInt::int(prime, x, precision);
    let mut out: Vec<PadicInt> = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        let mut rhs = xv;
        for (i, v) in out.iter().enumerate() {
            rhs -= v.pow((prime as u64).pow(k - i as u32)).mul_p_pow(i as u32);
        }
        out.push(rhs.exact_div_p(k)?);
    }
    Ok(out)
}

/// `π(b_n)` mod `p^modulus`. As a function it is a polynomial of degree
/// `p^n`, so `p^n + 1` Mahler coefficients suffice.
pub fn pi_bn(n: u32, prime: u32, modulus: u32) -> Result<MahlerFn1> {
    let work = modulus + n;
    if work > max_precision(prime) {
        return Err(Error::PrecisionOutOfRange { prime, requested: work, max: max_precision(prime) });
    }
    let len = (prime as usize).pow(n) + 1;
    let vals: Vec<PadicInt> =
        (0..(len + TRAILING) as i128).map(|x| Ok(pi_levels_at(x, n, prime, work)?[n as usize])).collect::<Result<_>>()?;
    MahlerFn1::from_samples(&vals, modulus)
}

/// Values of every generator of a presentation on T(b) (or T(b, b̄)) at a
/// point: `b_k ↦ π(b_k)(x)`, `bbar_k ↦ π(b_k)(y)`.
fn generator_values(pres: &ThetaPresentation, point: &[(String, i128)], precision: u32) -> Result<Vec<PadicInt>> {
    let reg = pres.ring().registry();
    let mut vals = Vec::with_capacity(reg.len());
    let cap = pres.level_cap();
    let mut levels: Vec<(String, Vec<PadicInt>)> = Vec::new();
    for (name, x) in point {
        levels.push((name.clone(), pi_levels_at(*x, cap, pres.prime(), precision)?));
    }
    for g in reg.generators() {
        let lv = levels
            .iter()
            .find(|(n, _)| *n == g.name)
            .ok_or_else(|| Error::OutsideDomain(format!("π is not defined on generator {g}")))?;
        vals.push(lv.1[g.level as usize]);
    }
    Ok(vals)
}

fn check_pi_input(a: &ThetaElement) -> Result<()> {
    if a.poly().is_truncated() {
        return Err(Error::TruncatedInput("π"));
    }
    Ok(())
}

/// Largest `sum e_k p^k` over monomials in level generators.
fn weighted_degree(a: &SparsePoly, names: &[&str]) -> usize {
    let reg = a.registry();
    let p = a.prime() as usize;
    a.terms()
        .map(|(m, _)| {
            m.pairs()
                .iter()
                .filter(|(g, _)| names.contains(&reg.get(*g).name.as_str()))
                .map(|&(g, e)| e as usize * p.pow(reg.get(g).level))
                .sum::<usize>()
        })
        .max()
        .unwrap_or(0)
}

/// The ring map `π: T(b) -> Maps(Z_p, Z_p)`, `b ↦ id`, commuting with θ.
/// The result is known mod `p^N` with `N` the element's precision.
pub fn pi_map(a: &ThetaElement) -> Result<MahlerFn1> {
    check_pi_input(a)?;
    let pres = a.presentation();
    let p = pres.prime();
    let modulus = a.precision();
    let work = (modulus + pres.level_cap()).min(max_precision(p));
    let len = weighted_degree(a.poly(), &["b"]) + 1;
    let vals: Vec<PadicInt> = (0..(len + TRAILING) as i128)
        .map(|x| a.poly().evaluate(&generator_values(pres, &[("b".to_string(), x)], work)?))
        .collect::<Result<_>>()?;
    MahlerFn1::from_samples(&vals, modulus)
}

/// `(π ⊗ π)` on T(b, b̄): `b` is evaluated in `x` and `bbar` in `y`.
pub fn pi_pair_at(a: &ThetaElement, x: i128, y: i128) -> Result<PadicInt> {
    check_pi_input(a)?;
    let pres = a.presentation();
    let work = (a.precision() + pres.level_cap()).min(max_precision(pres.prime()));
    let vals = generator_values(pres, &[("b".to_string(), x), ("bbar".to_string(), y)], work)?;
    Ok(a.poly().evaluate(&vals)?.with_precision(a.precision()))
}

/// The coalgebra section `s(β_k) = λ^k(b)`, extended linearly.
pub fn section_s(f: &MahlerFn1, pres: &Arc<ThetaPresentation>) -> Result<ThetaElement> {
    if f.is_zero() {
        return Ok(pres.zero());
    }
    let lams = lambdas(&pres.base("b"), (f.len() - 1) as u32)?;
    let mut acc = pres.zero();
    for (c, l) in f.coeffs().iter().zip(&lams) {
        acc = acc + l.scale(c);
    }
    Ok(acc)
}

/// Result of `((1 - sπ) ⊗ π) ∘ Δ` applied to `s(β_n)`.
#[derive(Debug, Clone)]
pub struct HopkinsImage {
    pub input: ThetaElement,
    /// `(k, A_k)`: the image is `sum_k A_k ⊗ β_k`.
    pub components: Vec<(usize, ThetaElement)>,
}

impl HopkinsImage {
    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|(_, a)| a.is_zero())
    }
}

/// Apply `((1 - sπ) ⊗ π) ∘ Δ` to `s(β_n)`. Writing `Δ s(β_n) = sum_j L_j ⊗ R_j`
/// and `π(R_j) = sum_k c_{jk} β_k`, the image is
/// `sum_k (1 - sπ)(sum_j c_{jk} L_j) ⊗ β_k`.
pub fn hopkins_mistake(pres: &Arc<ThetaPresentation>, n: usize) -> Result<HopkinsImage> {
    let p = pres.prime();
    let modulus = pres.precision();
    let input = section_s(&MahlerFn1::beta(p, modulus, n), pres)?;
    let delta = pres.comultiply(&input)?;
    if delta.poly().is_truncated() {
        return Err(Error::TruncatedInput("Δ"));
    }
    let parts = pres.split_tensor(&delta)?;
    let mut a_k: Vec<ThetaElement> = Vec::new();
    for (left, right) in parts {
        let f = pi_map(&right)?;
        for (k, c) in f.coeffs().iter().enumerate() {
            while a_k.len() <= k {
                a_k.push(pres.zero());
            }
            a_k[k] = &a_k[k] + &left.scale(c);
        }
    }
    let mut components = Vec::new();
    for (k, a) in a_k.into_iter().enumerate() {
        let back = section_s(&pi_map(&a)?, pres)?;
        components.push((k, a - back));
    }
    Ok(HopkinsImage { input, components })
}

/// Ring of digit functions `α_0, ..., α_m` mod `p^modulus` with the rules
/// `α_i^p -> α_i`.
pub fn alpha_ring(prime: u32, m: u32, modulus: u32) -> Result<(PolyRing, RewriteSystem)> {
    let reg = Registry::levels(&["alpha"], m);
    let ring = PolyRing::new(reg.clone(), prime, modulus, None)?;
    let mut rules = RewriteSystem::new(&reg);
    for i in 0..=m {
        let g = Generator::new("alpha", i);
        rules.add_power_rule(&g, prime, ring.gen(&g)?)?;
    }
    Ok((ring, rules))
}

/// Teichmüller digits `α_0(x), ..., α_m(x)` mod `p^modulus`.
pub fn digits_at(x: i128, m: u32, prime: u32, modulus: u32) -> Vec<PadicInt> {
    let prec = modulus.max(m + 1);
    PadicInt::int(prime, x, prec)
        .teichmuller_digits(m + 1)
        .expect("precision covers the digit count")
        .into_iter()
        .map(|d| d.with_precision(modulus))
        .collect()
}

/// Solve `V c = v` for the Vandermonde matrix on the Teichmüller nodes.
fn vandermonde_inverse(nodes: &[PadicInt]) -> Result<Vec<Vec<PadicInt>>> {
    let n = nodes.len();
    let (p, prec) = (nodes[0].prime(), nodes[0].precision());
    let mut a: Vec<Vec<PadicInt>> = nodes
        .iter()
        .map(|t| {
            let mut row: Vec<PadicInt> = (0..n).map(|e| t.pow(e as u64)).collect();
            row.extend((0..n).map(|_| PadicInt::zero(p, prec)));
            row
        })
        .collect();
    for (i, row) in a.iter_mut().enumerate() {
        row[n + i] = PadicInt::one(p, prec);
    }
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col].is_unit()).ok_or(Error::NotAUnit)?;
        a.swap(col, piv);
        let inv = a[col][col].unit_inverse()?;
        for v in a[col].iter_mut() {
            *v *= inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for c in 0..2 * n {
                    let t = a[col][c];
                    a[r][c] -= f * t;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Express `f` as a polynomial in the digit functions `α_0..α_m`, reduced
/// by `α_i^p = α_i`. Requires `f(x + p^{m+1}) = f(x)`; since the difference
/// has a Mahler expansion no longer than `f`'s, checking it on
/// `0..len(f)` proves it.
pub fn to_alpha(f: &MahlerFn1, m: u32) -> Result<SparsePoly> {
    let p = f.prime();
    let n = f.modulus();
    if m + 1 > max_precision(p) {
        return Err(Error::WindowTooSmall(format!("digit count {} exceeds precision range", m + 1)));
    }
    let period = pow_p(p, m + 1) as i128;
    for x in 0..f.len().max(1) as i128 {
        if f.evaluate_int(x + period) != f.evaluate_int(x) {
            return Err(Error::WindowTooSmall(format!("f is not periodic mod {p}^{}", m + 1)));
        }
    }
    let prec = n.max(m + 1);
    let nodes: Vec<PadicInt> = (0..p as i128).map(|d| PadicInt::int(p, d, prec).teichmuller()).collect();
    let node_ints: Vec<i128> = nodes.iter().map(|t| (t.residue() % period as u64) as i128).collect();
    let inv = vandermonde_inverse(&nodes.iter().map(|t| t.with_precision(n)).collect::<Vec<_>>())?;
    let digits = (m + 1) as usize;
    let size = (p as usize).pow(digits as u32);
    // values indexed by digit tuple, digit 0 least significant in the index
    let mut vals: Vec<PadicInt> = (0..size)
        .map(|idx| {
            let mut x = 0i128;
            let mut rest = idx;
            let mut scale = 1i128;
            for _ in 0..digits {
                x += node_ints[rest % p as usize] * scale;
                rest /= p as usize;
                scale *= p as i128;
            }
            f.evaluate_int(x.rem_euclid(period))
        })
        .collect();
    // apply the inverse Vandermonde matrix along each axis
    let pu = p as usize;
    for axis in 0..digits {
        let stride = pu.pow(axis as u32);
        let mut next = vals.clone();
        for idx in 0..size {
            let d = (idx / stride) % pu;
            let base = idx - d * stride;
            let mut acc = PadicInt::zero(p, n);
            for (j, row_val) in inv[d].iter().enumerate() {
                acc += *row_val * vals[base + j * stride];
            }
            next[idx] = acc;
        }
        vals = next;
    }
    let (ring, _) = alpha_ring(p, m, n)?;
    let reg = ring.registry().clone();
    let mut out = ring.zero();
    for (idx, c) in vals.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut rest = idx;
        let mut pairs = Vec::new();
        for i in 0..digits {
            let e = (rest % pu) as u32;
            rest /= pu;
            pairs.push((reg.id(&Generator::new("alpha", i as u32)).unwrap(), e));
        }
        out = out + ring.monomial(*c, Monomial::from_pairs(pairs));
    }
    Ok(out)
}

/// The function of a digit polynomial in `α_0..α_m`. A function periodic
/// mod `p^{m+1}` with values mod `p^N` has Mahler coefficients vanishing
/// from index `N p^{m+1}` on, which bounds the sampling window.
pub fn from_alpha(a: &SparsePoly, m: u32) -> Result<MahlerFn1> {
    let p = a.prime();
    let n = a.precision();
    let reg = a.registry();
    for g in reg.generators() {
        if (g.name != "alpha" || g.level > m) && a.uses(g) {
            return Err(Error::OutsideDomain(format!("{g} is not a digit function α_0..α_{m}")));
        }
    }
    let len = n as usize * (p as usize).pow(m + 1);
    MahlerFn1::from_fn(p, n, len, |x| {
        let d = digits_at(x, m, p, n);
        let vals: Vec<PadicInt> = reg
            .generators()
            .iter()
            .map(|g| if g.name == "alpha" && g.level <= m { d[g.level as usize] } else { PadicInt::zero(p, n) })
            .collect();
        a.evaluate(&vals).expect("one value per generator")
    })
}

/// Grid check that `(π ⊗ π)(λ^n(b - b̄))` is `(x, y) ↦ binom(x - y, n)` and
/// satisfies `F(x, y) = F(0, y - x)`. Returns the first failing point.
pub fn antidiagonal_defect(pres: &Arc<ThetaPresentation>, n: u32, grid: i128) -> Result<Option<String>> {
    let ell = pres.base("b") - pres.base("bbar");
    let lam = crate::lambda::lambda_n(&ell, n)?;
    let p = pres.prime();
    let modulus = lam.precision();
    let target = MahlerFn2::from_fn(p, modulus, n as usize + 1, n as usize + 1, |x, y| {
        binomial_row(x - y, n as usize, p, modulus)[n as usize]
    })?;
    for x in 0..grid {
        for y in 0..grid {
            let v = pi_pair_at(&lam, x, y)?;
            let want = target.evaluate_int(x, y);
            if v != want {
                return Ok(Some(format!("F({x}, {y}) = {v}, binom(x - y, {n}) = {want}")));
            }
            let w = pi_pair_at(&lam, 0, y - x)?;
            if w != v {
                return Ok(Some(format!("F({x}, {y}) = {v} but F(0, {}) = {w}", y - x)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(f: &MahlerFn1) -> Vec<i128> {
        f.coeffs().iter().map(|c| c.to_signed()).collect()
    }

    #[test]
    fn samples() {
        for p in [2, 3, 5] {
            let vals: Vec<PadicInt> = (0..5).map(|x| PadicInt::int(p, x * x, 8)).collect();
            assert_eq!(ints(&MahlerFn1::from_samples(&vals, 8).unwrap()), vec![0, 1, 2]);
        }
        let ones = vec![PadicInt::int(2, 1, 8); 3];
        assert_eq!(ints(&MahlerFn1::from_samples(&ones, 8).unwrap()), vec![1]);
        let b3 = MahlerFn1::from_fn(3, 6, 4, |x| binomial_row(x, 3, 3, 6)[3]).unwrap();
        assert_eq!(ints(&b3), vec![0, 0, 0, 1]);
        let short: Vec<PadicInt> = (0..3).map(|x| PadicInt::int(2, x * x, 8)).collect();
        assert_eq!(MahlerFn1::from_samples(&short, 8), Err(Error::IncompleteSampleWindow));
    }

    #[test]
    fn translate_and_multiply() {
        let b4 = MahlerFn1::beta(3, 6, 4);
        // binom(c + i, 4) costs v_3(4!) = 1 digit of c
        assert_eq!(b4.translate(&PadicInt::one(3, 6)).unwrap().modulus(), 5);
        let one = PadicInt::one(3, 7);
        assert_eq!(b4.translate(&one).unwrap(), b4.add(&MahlerFn1::beta(3, 6, 3)).unwrap());
        let id = MahlerFn1::identity(2, 8);
        assert_eq!(ints(&id.multiply(&id).unwrap()), vec![0, 1, 2]);
        let mut f = id.clone();
        for _ in 0..5 {
            f = f.translate(&PadicInt::one(2, 8)).unwrap();
        }
        assert_eq!(f, id.add(&MahlerFn1::constant(2, 8, 5)).unwrap());
        assert_eq!(id.translate_int(-3).translate_int(3), id);
    }

    #[test]
    fn hopf_examples() {
        let b3 = MahlerFn1::beta(2, 8, 3);
        let d = b3.coproduct();
        for j in 0..5 {
            for k in 0..5 {
                let want = if j + k == 3 { 1 } else { 0 };
                assert_eq!(d.coeff(j, k).to_signed(), want);
            }
        }
        assert_eq!(b3.counit().to_signed(), 0);
        assert_eq!(MahlerFn1::beta(2, 8, 0).counit().to_signed(), 1);
        let id = MahlerFn1::identity(5, 4);
        assert_eq!(ints(&id.antipode()), vec![0, -1]);
    }

    #[test]
    fn pi_of_levels() {
        assert_eq!(pi_bn(0, 3, 6).unwrap(), MahlerFn1::identity(3, 6));
        assert_eq!(ints(&pi_bn(1, 2, 8).unwrap()), vec![0, 0, -1]);
    }

    #[test]
    fn pi_digits_mod_p() {
        for p in [2, 3] {
            for n in 0..=3 {
                let f = pi_bn(n, p, 1).unwrap();
                let a = to_alpha(&f, n).unwrap();
                let (ring, _) = alpha_ring(p, n, 1).unwrap();
                assert_eq!(a, ring.var("alpha", n), "p = {p}, n = {n}");
            }
        }
    }

    #[test]
    fn digit_conversions() {
        let (p, n) = (3, 3);
        let id = MahlerFn1::identity(p, n);
        let a = to_alpha(&id, n - 1).unwrap();
        let (ring, _) = alpha_ring(p, n - 1, n).unwrap();
        let want = (0..n).fold(ring.zero(), |acc, i| acc + ring.var("alpha", i).scale_int(3i128.pow(i)));
        assert_eq!(a, want);
        assert_eq!(from_alpha(&a, n - 1).unwrap(), id);
        assert!(matches!(to_alpha(&id, 0), Err(Error::WindowTooSmall(_))));
        let one = MahlerFn1::constant(p, n, 1);
        assert_eq!(to_alpha(&one, 1).unwrap(), alpha_ring(p, 1, n).unwrap().0.one());
        // parity at p = 2: digit α_0
        let parity = MahlerFn1::from_fn(2, 4, 8, |x| PadicInt::int(2, x.rem_euclid(2), 4)).unwrap();
        let (r2, _) = alpha_ring(2, 0, 4).unwrap();
        assert_eq!(to_alpha(&parity, 0).unwrap(), r2.var("alpha", 0));
        assert_eq!(from_alpha(&r2.var("alpha", 0), 0).unwrap(), parity);
    }

    #[test]
    fn section_and_pi() {
        let t = ThetaPresentation::free(2, &["b"], 3, 12, Some(24)).unwrap();
        assert_eq!(section_s(&MahlerFn1::beta(2, 12, 0), &t).unwrap(), t.one());
        assert_eq!(section_s(&MahlerFn1::beta(2, 12, 1), &t).unwrap(), t.base("b"));
        assert_eq!(section_s(&MahlerFn1::beta(2, 12, 2), &t).unwrap(), -t.gen("b", 1).unwrap());
        let b = t.base("b");
        let f = t.psi_p(&b).unwrap() - &b;
        assert!(pi_map(&f).unwrap().is_zero());
        assert_eq!(pi_map(&t.one()).unwrap(), MahlerFn1::constant(2, 12, 1));
        for k in 0..=6 {
            let l = crate::lambda::lambda_n(&b, k).unwrap();
            assert_eq!(pi_map(&l).unwrap(), MahlerFn1::beta(2, l.precision(), k as usize), "k = {k}");
        }
    }

    #[test]
    fn hopkins_small() {
        for p in [2, 3] {
            let t = ThetaPresentation::free(p, &["b"], 3, 12, Some(24)).unwrap();
            for n in 1..=3 {
                let h = hopkins_mistake(&t, n).unwrap();
                assert!(h.is_zero(), "p = {p}, n = {n}");
                assert!(!h.input.is_zero());
            }
        }
    }

    #[test]
    fn antidiagonal_small() {
        let t = ThetaPresentation::free(2, &["b", "bbar"], 3, 12, Some(24)).unwrap();
        for n in 0..=2 {
            assert_eq!(antidiagonal_defect(&t, n, 8).unwrap(), None, "n = {n}");
        }
    }
}
