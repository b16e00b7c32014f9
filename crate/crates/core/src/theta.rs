//! θ-algebras over Z_p presented by generators and levels.
//!
//! For a base generator `b` the level generators `b_0, b_1, ...` are the
//! Witt components of `b`: they are defined by the ghost identities
//!
//! ```text
//! ψ^{p^n}(b) = b_0^{p^n} + p b_1^{p^{n-1}} + ... + p^n b_n
//! ```
//!
//! so `b_1 = θ(b)` but `b_n` for `n >= 2` is `θ_n(b)`, not the n-fold iterate
//! of θ. The Frobenius lift ψ^p is computed on generators from these
//! identities by exact division, and θ is recovered from ψ^p as
//! `θ(a) = (ψ^p(a) - a^p) / p`. Every such division is an integrality
//! claim; when one fails the operation returns [`Error::NotDivisible`].
//!
//! Only levels `0..=K` exist, where `K` is the presentation's level cap.
//! ψ^p of a level-`n` generator needs level `n + 1`, so it is unavailable at
//! the top level and reports [`Error::LevelCapExceeded`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::padic::{max_precision, pow_p, vp_factorial, vp_u64, PadicInt};
use crate::poly::{poly_valuation, Assignment, GenId, Generator, PolyRing, Registry, RewriteSystem, SparsePoly};

/// Digits to carry so that results are good to `target` digits after the
/// divisions done by level-`K` ghost inversion and degree-`D` binomials.
pub fn working_precision(p: u32, target: u32, level_cap: u32, degree_cap: u32) -> u32 {
    (target + level_cap + vp_factorial(degree_cap as u64, p)).min(max_precision(p))
}

/// Name of the second tensor factor's copy of a base generator.
pub fn primed(name: &str) -> String {
    format!("{name}'")
}

pub struct ThetaPresentation {
    prime: u32,
    bases: Vec<String>,
    level_cap: u32,
    ring: PolyRing,
    /// θ(g) for relation-presented bases, as polynomials in the ring.
    relations: BTreeMap<String, SparsePoly>,
    rules: RewriteSystem,
    psi_images: OnceLock<Vec<Option<SparsePoly>>>,
    square: OnceLock<Arc<ThetaPresentation>>,
}

impl fmt::Debug for ThetaPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ThetaPresentation")
            .field("prime", &self.prime)
            .field("bases", &self.bases)
            .field("level_cap", &self.level_cap)
            .field("precision", &self.ring.precision())
            .field("degree_cap", &self.ring.degree_cap())
            .field("relations", &self.relations.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl ThetaPresentation {
    /// The free θ-algebra on `bases`, polynomial on levels `0..=level_cap`.
    pub fn free(
        prime: u32,
        bases: &[&str],
        level_cap: u32,
        precision: u32,
        degree_cap: Option<u32>,
    ) -> Result<Arc<Self>> {
        Self::with_relations(prime, bases, &[], level_cap, precision, degree_cap, |_| Ok(Vec::new()))
    }

    /// Free on `bases`, plus generators `related` subject to `θ(g) = rhs(g)`.
    ///
    /// `relations` receives the ring of the presentation and returns the
    /// right-hand sides, which may use level-0 generators of `related` and
    /// any level of `bases`. A related generator `g` is stored with levels 0
    /// and 1 and the rewrite rule `g_1 -> rhs`, so elements never contain `g_1`.
    pub fn with_relations<F>(
        prime: u32,
        bases: &[&str],
        related: &[&str],
        level_cap: u32,
        precision: u32,
        degree_cap: Option<u32>,
        relations: F,
    ) -> Result<Arc<Self>>
    where
        F: FnOnce(&PolyRing) -> Result<Vec<(String, SparsePoly)>>,
    {
        let mut gens = Vec::new();
        for b in bases {
            gens.extend((0..=level_cap).map(|l| Generator::new(b, l)));
        }
        for g in related {
            gens.extend((0..=1).map(|l| Generator::new(g, l)));
        }
        let registry = Registry::new(gens);
        let ring = PolyRing::new(registry.clone(), prime, precision, degree_cap)?;
        let mut rules = RewriteSystem::new(&registry);
        let mut rel = BTreeMap::new();
        for (name, rhs) in relations(&ring)? {
            if !related.contains(&name.as_str()) {
                return Err(Error::UnknownGenerator(name));
            }
            rules.add_replace_rule(&Generator::new(&name, 1), rhs.clone())?;
            rel.insert(name, rhs);
        }
        if let Some(missing) = related.iter().find(|g| !rel.contains_key(**g)) {
            return Err(Error::UnassignedGenerator(missing.to_string()));
        }
        let mut all_bases: Vec<String> = bases.iter().map(|s| s.to_string()).collect();
        all_bases.extend(related.iter().map(|s| s.to_string()));
        Ok(Arc::new(Self {
            prime,
            bases: all_bases,
            level_cap,
            ring,
            relations: rel,
            rules,
            psi_images: OnceLock::new(),
            square: OnceLock::new(),
        }))
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn level_cap(&self) -> u32 {
        self.level_cap
    }

    pub fn precision(&self) -> u32 {
        self.ring.precision()
    }

    pub fn degree_cap(&self) -> Option<u32> {
        self.ring.degree_cap()
    }

    pub fn bases(&self) -> &[String] {
        &self.bases
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn is_free(&self) -> bool {
        self.relations.is_empty()
    }

    fn is_related(&self, name: &str) -> bool {
        self.relations.contains_key(name)
    }

    pub fn element(self: &Arc<Self>, value: SparsePoly) -> Result<ThetaElement> {
        let value = if self.rules.is_empty() { value } else { self.rules.normal_form(&value)? };
        Ok(ThetaElement { pres: self.clone(), value })
    }

    fn wrap(self: &Arc<Self>, value: SparsePoly) -> ThetaElement {
        ThetaElement { pres: self.clone(), value }
    }

    /// The level generator `θ_level(name)`.
    pub fn gen(self: &Arc<Self>, name: &str, level: u32) -> Result<ThetaElement> {
        if self.is_related(name) && level > 0 {
            return Err(Error::OutsideDomain(format!("{name} is related; only level 0 is a generator")));
        }
        if level > self.level_cap {
            return Err(Error::LevelCapExceeded { level, cap: self.level_cap });
        }
        Ok(self.wrap(self.ring.gen(&Generator::new(name, level))?))
    }

    /// Level-0 generator; panics if `name` is not a base.
    pub fn base(self: &Arc<Self>, name: &str) -> ThetaElement {
        self.gen(name, 0).expect("unknown base generator")
    }

    pub fn constant(self: &Arc<Self>, c: i128) -> ThetaElement {
        self.wrap(self.ring.constant(c))
    }

    pub fn scalar(self: &Arc<Self>, c: PadicInt) -> ThetaElement {
        self.wrap(self.ring.scalar(c))
    }

    pub fn zero(self: &Arc<Self>) -> ThetaElement {
        self.wrap(self.ring.zero())
    }

    pub fn one(self: &Arc<Self>) -> ThetaElement {
        self.constant(1)
    }

    fn psi_images(&self) -> Result<&Vec<Option<SparsePoly>>> {
        if let Some(v) = self.psi_images.get() {
            return Ok(v);
        }
        let images = self.compute_psi_images()?;
        Ok(self.psi_images.get_or_init(|| images))
    }

    fn compute_psi_images(&self) -> Result<Vec<Option<SparsePoly>>> {
        let p = self.prime;
        let reg = self.ring.registry();
        let mut out: Vec<Option<SparsePoly>> = vec![None; reg.len()];
        for base in &self.bases {
            if let Some(rhs) = self.relations.get(base) {
                let g0 = self.ring.gen(&Generator::new(base, 0))?;
                let img = g0.pow(p as u64) + rhs.mul_p_pow(1);
                out[reg.id(&Generator::new(base, 0)).unwrap() as usize] = Some(img);
                continue;
            }
            let levels: Vec<SparsePoly> = (0..=self.level_cap)
                .map(|l| self.ring.gen(&Generator::new(base, l)))
                .collect::<Result<_>>()?;
            let mut psi: Vec<SparsePoly> = Vec::new();
            for n in 0..self.level_cap {
                // p^n ψ(b_n) = w_{n+1}(b) - sum_{i<n} p^i ψ(b_i)^{p^{n-i}}
                let mut rhs = ghost(&levels, n + 1, p);
                for (i, img) in psi.iter().enumerate() {
                    let e = (p as u64).pow(n - i as u32);
                    rhs = rhs - img.pow(e).mul_p_pow(i as u32);
                }
                let img = rhs.exact_div_p(n)?;
                out[reg.id(&Generator::new(base, n)).unwrap() as usize] = Some(img.clone());
                psi.push(img);
            }
        }
        Ok(out)
    }

    fn check_levels(&self, a: &SparsePoly, headroom: u32) -> Result<()> {
        for base in &self.bases {
            if self.is_related(base) {
                continue;
            }
            if let Some(l) = a.max_level(base) {
                if l + headroom > self.level_cap {
                    return Err(Error::LevelCapExceeded { level: l + headroom, cap: self.level_cap });
                }
            }
        }
        Ok(())
    }

    fn same(&self, a: &ThetaElement) -> Result<()> {
        if std::ptr::eq(self, Arc::as_ptr(&a.pres)) {
            Ok(())
        } else {
            Err(Error::RegistryMismatch)
        }
    }

    /// The Frobenius lift ψ^p, a ring endomorphism.
    pub fn psi_p(self: &Arc<Self>, a: &ThetaElement) -> Result<ThetaElement> {
        self.same(a)?;
        self.check_levels(&a.value, 1)?;
        let images = self.psi_images()?;
        let reg = self.ring.registry();
        let mut asg = Assignment::new(reg, &self.ring);
        for (id, img) in images.iter().enumerate() {
            match img {
                Some(img) => asg.set(reg.get(id as GenId), img.clone())?,
                None => asg.fix(reg.get(id as GenId))?,
            }
        }
        Ok(self.wrap(a.value.substitute(&asg)?))
    }

    /// ψ^{p^n} = (ψ^p)^n.
    pub fn psi_p_pow(self: &Arc<Self>, a: &ThetaElement, n: u32) -> Result<ThetaElement> {
        let mut x = a.clone();
        for _ in 0..n {
            x = self.psi_p(&x)?;
        }
        Ok(x)
    }

    /// θ(a) = (ψ^p(a) - a^p) / p.
    pub fn theta(self: &Arc<Self>, a: &ThetaElement) -> Result<ThetaElement> {
        let psi = self.psi_p(a)?;
        let d = psi.value - a.value.pow(self.prime as u64);
        Ok(self.wrap(d.exact_div_p(1)?))
    }

    /// `θ_0(a), ..., θ_n(a)`, the Witt components of `a`, from
    /// `p^k θ_k(a) = ψ^{p^k}(a) - sum_{i<k} p^i θ_i(a)^{p^{k-i}}`.
    pub fn thetas(self: &Arc<Self>, a: &ThetaElement, n: u32) -> Result<Vec<ThetaElement>> {
        self.same(a)?;
        let p = self.prime;
        let mut out: Vec<SparsePoly> = vec![a.value.clone()];
        let mut psi = a.clone();
        for k in 1..=n {
            psi = self.psi_p(&psi)?;
            let mut rhs = psi.value.clone();
            for (i, t) in out.iter().enumerate() {
                let e = (p as u64).pow(k - i as u32);
                rhs = rhs - t.pow(e).mul_p_pow(i as u32);
            }
            out.push(rhs.exact_div_p(k)?);
        }
        Ok(out.into_iter().map(|v| self.wrap(v)).collect())
    }

    pub fn theta_n(self: &Arc<Self>, a: &ThetaElement, n: u32) -> Result<ThetaElement> {
        Ok(self.thetas(a, n)?.pop().unwrap())
    }

    /// The θ-commuting ring map with `base ↦ image` on the given bases;
    /// unspecified bases are fixed. A level generator `b_n` goes to
    /// `θ_n(image of b)`.
    pub fn adams_action(self: &Arc<Self>, a: &ThetaElement, images: &[(&str, ThetaElement)]) -> Result<ThetaElement> {
        self.same(a)?;
        let reg = self.ring.registry();
        let mut asg = Assignment::new(reg, &self.ring);
        for (name, img) in images {
            self.same(img)?;
            if !self.bases.iter().any(|b| b == name) {
                return Err(Error::UnknownGenerator(name.to_string()));
            }
            let top = if self.is_related(name) { 0 } else { a.value.max_level(name).unwrap_or(0) };
            let levels = self.thetas(img, top)?;
            for (l, t) in levels.into_iter().enumerate() {
                asg.set(&Generator::new(name, l as u32), t.value)?;
            }
        }
        for g in reg.generators() {
            if asg.image(g).is_none() {
                asg.fix(g)?;
            }
        }
        Ok(self.wrap(a.value.substitute(&asg)?))
    }

    /// `T(bases) ⊗ T(bases)`, realized as the free algebra on the bases and
    /// their primed copies. Only defined for free presentations.
    pub fn tensor_square(&self) -> Result<Arc<ThetaPresentation>> {
        if !self.is_free() {
            return Err(Error::OutsideDomain("comultiplication needs a free presentation".into()));
        }
        if let Some(sq) = self.square.get() {
            return Ok(sq.clone());
        }
        let mut names: Vec<String> = self.bases.clone();
        names.extend(self.bases.iter().map(|b| primed(b)));
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let sq = Self::free(self.prime, &refs, self.level_cap, self.precision(), self.degree_cap())?;
        Ok(self.square.get_or_init(|| sq).clone())
    }

    /// `x ↦ x ⊗ 1` (`right = false`) or `x ↦ 1 ⊗ x` (`right = true`).
    pub fn include(self: &Arc<Self>, a: &ThetaElement, right: bool) -> Result<ThetaElement> {
        self.same(a)?;
        let sq = self.tensor_square()?;
        let mut asg = Assignment::new(self.ring.registry(), sq.ring());
        for g in self.ring.registry().generators() {
            let name = if right { primed(&g.name) } else { g.name.clone() };
            asg.set(g, sq.ring().gen(&Generator::new(&name, g.level))?)?;
        }
        Ok(sq.wrap(a.value.substitute(&asg)?))
    }

    /// The Witt comultiplication: each base is primitive, and `Δ(b_n)` is
    /// the n-th Witt addition polynomial in `b ⊗ 1` and `1 ⊗ b`.
    pub fn comultiply(self: &Arc<Self>, a: &ThetaElement) -> Result<ThetaElement> {
        self.same(a)?;
        let sq = self.tensor_square()?;
        let mut asg = Assignment::new(self.ring.registry(), sq.ring());
        for base in &self.bases {
            let top = a.value.max_level(base).unwrap_or(0);
            let x: Vec<SparsePoly> = (0..=top).map(|l| sq.ring().gen(&Generator::new(base, l))).collect::<Result<_>>()?;
            let y: Vec<SparsePoly> =
                (0..=top).map(|l| sq.ring().gen(&Generator::new(&primed(base), l))).collect::<Result<_>>()?;
            for (l, s) in witt_sum(&x, &y, self.prime)?.into_iter().enumerate() {
                asg.set(&Generator::new(base, l as u32), s)?;
            }
        }
        asg.fix_rest()?;
        Ok(sq.wrap(a.value.substitute(&asg)?))
    }

    /// Counit: every generator to zero.
    pub fn counit(&self, a: &ThetaElement) -> PadicInt {
        a.value.constant_term()
    }

    /// Write an element of the tensor square as `sum_j L_j ⊗ R_j`, with `L_j`
    /// the distinct monomials in unprimed generators (coefficient 1) and
    /// `R_j` elements of this presentation.
    pub fn split_tensor(self: &Arc<Self>, a: &ThetaElement) -> Result<Vec<(ThetaElement, ThetaElement)>> {
        let sq = self.tensor_square()?;
        sq.same(a)?;
        let sreg = sq.ring().registry();
        let mut groups: BTreeMap<Vec<(Generator, u32)>, SparsePoly> = BTreeMap::new();
        let one = PadicInt::one(self.prime, self.precision());
        for (m, c) in a.value.terms() {
            let mut left = Vec::new();
            let mut right = self.ring.scalar(*c);
            for &(g, e) in m.pairs() {
                let gen = sreg.get(g);
                match gen.name.strip_suffix('\'') {
                    Some(base) => right = right * self.ring.gen(&Generator::new(base, gen.level))?.pow(e as u64),
                    None => left.push((gen.clone(), e)),
                }
            }
            let entry = groups.entry(left).or_insert_with(|| self.ring.zero());
            *entry = &*entry + &right;
        }
        let mut out = Vec::new();
        for (left, right) in groups {
            let mut l = self.ring.scalar(one);
            for (g, e) in left {
                l = l * self.ring.gen(&g)?.pow(e as u64);
            }
            out.push((self.wrap(l), self.wrap(right)));
        }
        Ok(out)
    }

    /// `(1 + h)^e = sum_{n <= terms} binom(e, n) h^n` for `h` of positive
    /// valuation (at least 2 when `p = 2`).
    ///
    /// With `h = p^v u`, the n-th term is `p^(nv - v_p(n!)) u^n (e)_n / unit(n!)`
    /// where `(e)_n` is the falling factorial. The result's precision is
    /// capped by the valuation bound on the omitted tail.
    pub fn unit_power_series(self: &Arc<Self>, h: &ThetaElement, e: &ThetaElement, terms: u32) -> Result<ThetaElement> {
        self.same(h)?;
        self.same(e)?;
        let p = self.prime;
        let need = if p == 2 { 2 } else { 1 };
        let v = poly_valuation(&h.value).lower_bound();
        if v < need {
            return Err(Error::OutsideDomain(format!("(1+h)^e needs v_p(h) >= {need}, got {v}")));
        }
        if h.value.is_zero() {
            return Ok(self.one());
        }
        let work = h.value.precision().min(e.value.precision());
        let u = h.value.exact_div_p(v)?;
        let mut acc = self.ring.one().with_precision(work);
        let mut falling = self.ring.one();
        let mut un = self.ring.one();
        for n in 1..=terms as u64 {
            falling = falling * (&e.value - &self.ring.constant(n as i128 - 1));
            un = un * &u;
            let vn = vp_factorial(n, p);
            let unit = unit_part_factorial(n, p, self.precision());
            let term = (&falling * &un).scale(&unit.unit_inverse()?).mul_p_pow(n as u32 * v - vn);
            acc = acc + term.with_precision(work);
        }
        let tail = tail_bound(p, v, terms as u64, work);
        Ok(self.wrap(acc.with_precision(tail.min(work))))
    }
}

/// `n! / p^{v_p(n!)}` mod `p^precision`.
fn unit_part_factorial(n: u64, p: u32, precision: u32) -> PadicInt {
    let mut acc = PadicInt::one(p, precision);
    for k in 2..=n {
        let u = k / pow_p(p, vp_u64(k, p));
        acc *= PadicInt::int(p, u as i128, precision);
    }
    acc
}

/// Minimum of `n v - v_p(n!)` over `n > terms`, capped at `cap`.
fn tail_bound(p: u32, v: u32, terms: u64, cap: u32) -> u32 {
    let mut best = u64::MAX;
    let mut n = terms + 1;
    loop {
        let val = n * v as u64 - vp_factorial(n, p) as u64;
        best = best.min(val);
        // n v - v_p(n!) >= n (v - 1/(p-1)) grows without bound
        let lower = (n as f64) * (v as f64 - 1.0 / (p as f64 - 1.0));
        if lower >= cap as f64 || lower >= best as f64 {
            break;
        }
        n += 1;
    }
    best.min(cap as u64) as u32
}

/// `w_n = sum_{i<=n} p^i x_i^{p^{n-i}}`.
pub fn ghost(x: &[SparsePoly], n: u32, p: u32) -> SparsePoly {
    let mut acc = x[0].ring().zero();
    for i in 0..=n {
        let e = (p as u64).pow(n - i);
        acc = acc + x[i as usize].pow(e).mul_p_pow(i);
    }
    acc
}

/// Witt vector addition: `s_n` with `w_n(s) = w_n(x) + w_n(y)`, solved level
/// by level with exact division by `p^n`.
pub fn witt_sum(x: &[SparsePoly], y: &[SparsePoly], p: u32) -> Result<Vec<SparsePoly>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch);
    }
    let mut s: Vec<SparsePoly> = Vec::with_capacity(x.len());
    for n in 0..x.len() as u32 {
        let mut rhs = ghost(x, n, p) + ghost(y, n, p);
        for (i, si) in s.iter().enumerate() {
            let e = (p as u64).pow(n - i as u32);
            rhs = rhs - si.pow(e).mul_p_pow(i as u32);
        }
        s.push(rhs.exact_div_p(n)?);
    }
    Ok(s)
}

#[derive(Clone)]
pub struct ThetaElement {
    pres: Arc<ThetaPresentation>,
    value: SparsePoly,
}

impl ThetaElement {
    pub fn presentation(&self) -> &Arc<ThetaPresentation> {
        &self.pres
    }

    pub fn poly(&self) -> &SparsePoly {
        &self.value
    }

    pub fn into_poly(self) -> SparsePoly {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn precision(&self) -> u32 {
        self.value.precision()
    }

    pub fn pow(&self, e: u64) -> Self {
        self.map(|v| v.pow(e))
    }

    pub fn scale_int(&self, c: i128) -> Self {
        self.map(|v| v.scale_int(c))
    }

    pub fn scale(&self, c: &PadicInt) -> Self {
        self.map(|v| v.scale(c))
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        self.map(|v| v.with_precision(precision))
    }

    pub fn exact_div_p(&self, k: u32) -> Result<Self> {
        Ok(Self { pres: self.pres.clone(), value: self.value.exact_div_p(k)? })
    }

    fn map(&self, f: impl FnOnce(&SparsePoly) -> SparsePoly) -> Self {
        Self { pres: self.pres.clone(), value: f(&self.value) }
    }

    pub fn psi_p(&self) -> Result<Self> {
        self.pres.psi_p(self)
    }

    pub fn theta(&self) -> Result<Self> {
        self.pres.theta(self)
    }

    pub fn theta_n(&self, n: u32) -> Result<Self> {
        self.pres.theta_n(self, n)
    }
}

impl PartialEq for ThetaElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.pres, &other.pres) && self.value == other.value
    }
}

impl fmt::Display for ThetaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Debug for ThetaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.value)
    }
}

macro_rules! elem_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&ThetaElement> for &ThetaElement {
            type Output = ThetaElement;
            fn $method(self, rhs: &ThetaElement) -> ThetaElement {
                assert!(Arc::ptr_eq(&self.pres, &rhs.pres), "elements of different presentations");
                ThetaElement { pres: self.pres.clone(), value: (&self.value).$method(&rhs.value) }
            }
        }
        impl $tr<ThetaElement> for ThetaElement {
            type Output = ThetaElement;
            fn $method(self, rhs: ThetaElement) -> ThetaElement {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ThetaElement> for ThetaElement {
            type Output = ThetaElement;
            fn $method(self, rhs: &ThetaElement) -> ThetaElement {
                (&self).$method(rhs)
            }
        }
    };
}

elem_binop!(Add, add);
elem_binop!(Sub, sub);
elem_binop!(Mul, mul);

impl Neg for &ThetaElement {
    type Output = ThetaElement;
    fn neg(self) -> ThetaElement {
        self.map(|v| -v)
    }
}

impl Neg for ThetaElement {
    type Output = ThetaElement;
    fn neg(self) -> ThetaElement {
        -&self
    }
}

/// `θ_i(ψ^p(b) - b)` reduced mod `(p, b_0, ..., b_{i-1})`, minus
/// `b_i^p - b_i`. Zero exactly when the congruence holds.
pub fn f_congruence_defect(pres: &Arc<ThetaPresentation>, i: u32) -> Result<SparsePoly> {
    let p = pres.prime();
    let b = pres.base("b");
    let f = pres.psi_p(&b)? - &b;
    let fi = pres.theta_n(&f, i)?;
    let kill: Vec<Generator> = (0..i).map(|l| Generator::new("b", l)).collect();
    let bi = pres.gen("b", i)?;
    let target = bi.pow(p as u64) - &bi;
    Ok((fi - target).into_poly().reduce_mod(1, &kill))
}

/// `θ_i(θ(f) - h(f))` reduced mod `(p, b_0, ..., b_i)`, minus
/// `b_{i+1}^p - b_{i+1}`, where `f = ψ^p(b) - b` and `h(f) = sum_k d_k f^k`.
/// Coefficients of `h` beyond the degree cap cannot contribute and are
/// ignored.
pub fn x_congruence_defect(pres: &Arc<ThetaPresentation>, i: u32, h: &[PadicInt]) -> Result<SparsePoly> {
    let p = pres.prime();
    let b = pres.base("b");
    let f = pres.psi_p(&b)? - &b;
    let cap = pres.degree_cap().map_or(h.len(), |d| (d as usize + 1).min(h.len()));
    let mut hf = pres.zero();
    let mut fk = pres.one();
    for d in &h[..cap] {
        hf = hf + fk.scale(d);
        fk = fk * &f;
    }
    let g = pres.theta(&f)? - hf;
    let xi = pres.theta_n(&g, i)?;
    let kill: Vec<Generator> = (0..=i).map(|l| Generator::new("b", l)).collect();
    let b1 = pres.gen("b", i + 1)?;
    let target = b1.pow(p as u64) - &b1;
    Ok((xi - target).into_poly().reduce_mod(1, &kill))
}

/// `ψ^p(ℓ) - ℓ - (f - f̄)` in `T(b, b̄)`, with `ℓ = b - b̄`, `f = ψ^p(b) - b`,
/// `f̄ = ψ^p(b̄) - b̄`. Zero exactly.
pub fn ell_relation_defect(pres: &Arc<ThetaPresentation>) -> Result<SparsePoly> {
    let b = pres.base("b");
    let bb = pres.base("bbar");
    let ell = &b - &bb;
    let f = pres.psi_p(&b)? - &b;
    let fb = pres.psi_p(&bb)? - &bb;
    Ok((pres.psi_p(&ell)? - &ell - (f - fb)).into_poly())
}
