//! Sparse multivariate polynomials over [`PadicInt`] coefficients.
//!
//! Generators live in a [`Registry`], sorted by `(name, level)`; a monomial
//! is a sorted list of `(generator id, exponent)` pairs. A polynomial may
//! carry a total-degree cap: terms above it are dropped silently, which is
//! arithmetic in the quotient by the `(cap + 1)`-st power of the ideal of
//! all generators. A polynomial remembers whether the cap ever discarded a
//! nonzero term, and operations that are unsound on truncated input
//! (substituting images with constant terms) refuse it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::Rng;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::padic::{check_prime, max_precision, PadicInt, Valuation};

pub type GenId = u16;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub name: String,
    pub level: u32,
}

impl Generator {
    pub fn new(name: &str, level: u32) -> Self {
        Self { name: name.to_string(), level }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.name, self.level)
    }
}

/// A fixed, sorted set of generators.
#[derive(Debug, PartialEq, Eq)]
pub struct Registry {
    gens: Vec<Generator>,
}

impl Registry {
    pub fn new(gens: impl IntoIterator<Item = Generator>) -> Arc<Self> {
        let mut gens: Vec<Generator> = gens.into_iter().collect();
        gens.sort();
        gens.dedup();
        assert!(gens.len() <= GenId::MAX as usize, "too many generators");
        Arc::new(Self { gens })
    }

    /// Levels `0..=max_level` of each named generator.
    pub fn levels(names: &[&str], max_level: u32) -> Arc<Self> {
        Self::new(names.iter().flat_map(|n| (0..=max_level).map(move |l| Generator::new(n, l))))
    }

    pub fn id(&self, g: &Generator) -> Option<GenId> {
        self.gens.binary_search(g).ok().map(|i| i as GenId)
    }

    pub fn get(&self, id: GenId) -> &Generator {
        &self.gens[id as usize]
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }
}

fn same_registry(a: &Arc<Registry>, b: &Arc<Registry>) -> bool {
    Arc::ptr_eq(a, b) || a.gens == b.gens
}

/// Exponent vector, sorted by generator id, no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[(GenId, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(id: GenId) -> Self {
        Self::from_pairs([(id, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (GenId, u32)>) -> Self {
        let mut v: SmallVec<[(GenId, u32); 4]> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        v.sort();
        let mut out: SmallVec<[(GenId, u32); 4]> = SmallVec::new();
        for (g, e) in v {
            match out.last_mut() {
                Some((h, f)) if *h == g => *f += e,
                _ => out.push((g, e)),
            }
        }
        Self(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, id: GenId) -> u32 {
        self.0.iter().find(|&&(g, _)| g == id).map_or(0, |&(_, e)| e)
    }

    pub fn pairs(&self) -> &[(GenId, u32)] {
        &self.0
    }

    /// `self` with the exponent of `id` lowered by `k` (which must not exceed it).
    pub fn lower(&self, id: GenId, k: u32) -> Self {
        let mut v = self.0.clone();
        if let Some(i) = v.iter().position(|&(g, _)| g == id) {
            v[i].1 -= k;
            if v[i].1 == 0 {
                v.remove(i);
            }
        }
        Self(v)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self(out)
    }

    fn render(&self, reg: &Registry) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(g, e)| {
                let g = reg.get(g);
                if e == 1 {
                    g.to_string()
                } else {
                    format!("{g}^{e}")
                }
            })
            .collect();
        parts.join("*")
    }
}

/// Factory for polynomials sharing a registry, prime, precision and cap.
#[derive(Clone, Debug)]
pub struct PolyRing {
    registry: Arc<Registry>,
    prime: u32,
    precision: u32,
    degree_cap: Option<u32>,
}

impl PolyRing {
    pub fn new(registry: Arc<Registry>, prime: u32, precision: u32, degree_cap: Option<u32>) -> Result<Self> {
        check_prime(prime)?;
        let max = max_precision(prime);
        if precision == 0 || precision > max {
            return Err(Error::PrecisionOutOfRange { prime, requested: precision, max });
        }
        Ok(Self { registry, prime, precision, degree_cap })
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn degree_cap(&self) -> Option<u32> {
        self.degree_cap
    }

    pub fn zero(&self) -> SparsePoly {
        SparsePoly {
            registry: self.registry.clone(),
            prime: self.prime,
            floor: self.precision,
            degree_cap: self.degree_cap,
            truncated: false,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(&self, c: PadicInt) -> SparsePoly {
        self.monomial(c, Monomial::one())
    }

    pub fn constant(&self, c: i128) -> SparsePoly {
        self.scalar(PadicInt::int(self.prime, c, self.precision))
    }

    pub fn one(&self) -> SparsePoly {
        self.constant(1)
    }

    pub fn monomial(&self, c: PadicInt, m: Monomial) -> SparsePoly {
        let mut p = self.zero();
        p.insert(m, c.with_precision(self.precision));
        p
    }

    pub fn gen(&self, g: &Generator) -> Result<SparsePoly> {
        let id = self.registry.id(g).ok_or_else(|| Error::UnknownGenerator(g.to_string()))?;
        Ok(self.monomial(PadicInt::one(self.prime, self.precision), Monomial::var(id)))
    }

    /// Generator by name and level; panics if it is not registered.
    pub fn var(&self, name: &str, level: u32) -> SparsePoly {
        self.gen(&Generator::new(name, level)).expect("generator not in registry")
    }

    pub fn with_degree_cap(&self, degree_cap: Option<u32>) -> Self {
        Self { degree_cap, ..self.clone() }
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        Self { precision, ..self.clone() }
    }
}

#[derive(Clone)]
pub struct SparsePoly {
    registry: Arc<Registry>,
    prime: u32,
    /// Precision to which absent monomials are known to vanish.
    floor: u32,
    degree_cap: Option<u32>,
    truncated: bool,
    terms: BTreeMap<Monomial, PadicInt>,
}

fn min_cap(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl SparsePoly {
    fn empty_like(&self, floor: u32, degree_cap: Option<u32>) -> Self {
        Self {
            registry: self.registry.clone(),
            prime: self.prime,
            floor,
            degree_cap,
            truncated: false,
            terms: BTreeMap::new(),
        }
    }

    /// Add `c * m`, respecting the floor, the cap and zero-dropping.
    fn insert(&mut self, m: Monomial, c: PadicInt) {
        if let Some(cap) = self.degree_cap {
            if m.degree() > cap {
                if !c.is_zero() {
                    self.truncated = true;
                }
                return;
            }
        }
        let c = c.with_precision(self.floor);
        let sum = match self.terms.remove(&m) {
            Some(old) => old + c,
            None => c,
        };
        if sum.is_zero() {
            self.floor = self.floor.min(sum.precision());
        } else {
            self.terms.insert(m, sum);
        }
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn degree_cap(&self) -> Option<u32> {
        self.degree_cap
    }

    /// True if the degree cap has discarded a nonzero term.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Ring this polynomial lives in (precision = its current precision).
    pub fn ring(&self) -> PolyRing {
        PolyRing {
            registry: self.registry.clone(),
            prime: self.prime,
            precision: self.precision(),
            degree_cap: self.degree_cap,
        }
    }

    /// Minimum precision over stored coefficients and absent terms.
    pub fn precision(&self) -> u32 {
        self.terms.values().map(|c| c.precision()).fold(self.floor, u32::min)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &PadicInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> PadicInt {
        self.terms.get(m).copied().unwrap_or_else(|| PadicInt::zero(self.prime, self.floor))
    }

    pub fn constant_term(&self) -> PadicInt {
        self.coefficient(&Monomial::one())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Highest level of a generator named `name` that occurs.
    pub fn max_level(&self, name: &str) -> Option<u32> {
        self.terms
            .keys()
            .flat_map(|m| m.pairs().iter().map(|&(g, _)| self.registry.get(g)))
            .filter(|g| g.name == name)
            .map(|g| g.level)
            .max()
    }

    pub fn uses(&self, g: &Generator) -> bool {
        match self.registry.id(g) {
            Some(id) => self.terms.keys().any(|m| m.exponent(id) > 0),
            None => false,
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !same_registry(&self.registry, &other.registry) {
            return Err(Error::RegistryMismatch);
        }
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let cap = min_cap(self.degree_cap, other.degree_cap);
        let mut out = self.empty_like(self.floor.min(other.floor), cap);
        out.truncated = self.truncated || other.truncated;
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            out.insert(m.clone(), *c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let cap = min_cap(self.degree_cap, other.degree_cap);
        let floor = self.floor.min(other.floor);
        let mut acc: FxHashMap<Monomial, PadicInt> = FxHashMap::default();
        let mut truncated = self.truncated || other.truncated;
        // bucket the right factor by degree so pairs past the cap are never visited
        let top = other.terms.keys().map(|m| m.degree()).max().unwrap_or(0) as usize;
        let mut buckets: Vec<Vec<(&Monomial, &PadicInt)>> = vec![Vec::new(); top + 1];
        for (m, c) in &other.terms {
            buckets[m.degree() as usize].push((m, c));
        }
        for (ma, ca) in &self.terms {
            let da = ma.degree() as usize;
            let limit = match cap {
                Some(cap) if da > cap as usize => {
                    truncated = true;
                    continue;
                }
                Some(cap) => (cap as usize - da).min(top),
                None => top,
            };
            if limit < top && buckets[limit + 1..].iter().any(|b| !b.is_empty()) {
                truncated = true;
            }
            for bucket in &buckets[..=limit] {
                for (mb, cb) in bucket {
                    let c = (*ca * **cb).with_precision(floor);
                    acc.entry(ma.mul(mb)).and_modify(|x| *x += c).or_insert(c);
                }
            }
        }
        let mut out = self.empty_like(floor, cap);
        out.truncated = truncated;
        for (m, c) in acc {
            if c.is_zero() {
                out.floor = out.floor.min(c.precision());
            } else {
                out.terms.insert(m, c);
            }
        }
        Ok(out)
    }

    fn neg_ref(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -*c;
        }
        out
    }

    pub fn scale(&self, c: &PadicInt) -> Self {
        assert_eq!(c.prime(), self.prime, "prime mismatch");
        let mut out = self.empty_like(self.floor.min(c.precision()), self.degree_cap);
        out.truncated = self.truncated;
        for (m, a) in &self.terms {
            out.insert(m.clone(), *a * *c);
        }
        out
    }

    pub fn scale_int(&self, c: i128) -> Self {
        self.scale(&PadicInt::int(self.prime, c, self.floor))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = self.ring().one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Divide every coefficient by `p^k`; fails if some coefficient is not
    /// divisible, which for θ-type divisions means an integrality claim broke.
    pub fn exact_div_p(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if self.floor <= k {
            return Err(Error::PrecisionExhausted { available: self.floor, required: k + 1 });
        }
        let mut out = self.empty_like(self.floor - k, self.degree_cap);
        out.truncated = self.truncated;
        for (m, c) in &self.terms {
            let q = c.exact_div_p(k)?;
            out.insert(m.clone(), q);
        }
        Ok(out)
    }

    /// Multiply by `p^k`, gaining `k` digits of precision (see
    /// [`PadicInt::mul_p_pow`]).
    pub fn mul_p_pow(&self, k: u32) -> Self {
        let floor = (self.floor + k).min(max_precision(self.prime));
        let mut out = self.empty_like(floor, self.degree_cap);
        out.truncated = self.truncated;
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.mul_p_pow(k));
        }
        out
    }

    /// Lower the precision of every coefficient (and of the floor).
    pub fn with_precision(&self, precision: u32) -> Self {
        let mut out = self.empty_like(self.floor.min(precision), self.degree_cap);
        out.truncated = self.truncated;
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.with_precision(precision));
        }
        out
    }

    /// Replace the degree cap (dropping terms above a tighter one).
    pub fn with_degree_cap(&self, cap: Option<u32>) -> Self {
        let mut out = self.empty_like(self.floor, cap);
        out.truncated = self.truncated;
        for (m, c) in &self.terms {
            out.insert(m.clone(), *c);
        }
        out
    }

    /// Kill every term containing a generator of `kill` and reduce the
    /// remaining coefficients mod `p^e`.
    pub fn reduce_mod(&self, e: u32, kill: &[Generator]) -> Self {
        let ids: Vec<GenId> = kill.iter().filter_map(|g| self.registry.id(g)).collect();
        let mut out = self.empty_like(self.floor.min(e), self.degree_cap);
        out.truncated = self.truncated;
        for (m, c) in &self.terms {
            if ids.iter().any(|&id| m.exponent(id) > 0) {
                continue;
            }
            out.insert(m.clone(), c.with_precision(e));
        }
        out
    }

    /// Image under the ring map given by `assignment`.
    pub fn substitute(&self, assignment: &Assignment) -> Result<Self> {
        if !same_registry(&self.registry, &assignment.source) {
            return Err(Error::RegistryMismatch);
        }
        let target = &assignment.target;
        let cap = min_cap(self.degree_cap, target.degree_cap);
        let ring = PolyRing { degree_cap: cap, precision: self.floor.min(target.precision), ..target.clone() };
        let mut powers: HashMap<GenId, Vec<SparsePoly>> = HashMap::new();
        let mut out = ring.zero();
        out.truncated = self.truncated;
        for (m, c) in &self.terms {
            let mut term = ring.scalar(*c);
            for &(g, e) in m.pairs() {
                let image = assignment.images[g as usize]
                    .as_ref()
                    .ok_or_else(|| Error::UnassignedGenerator(self.registry.get(g).to_string()))?;
                if self.truncated && !image.constant_term().is_zero() {
                    return Err(Error::TruncatedInput("substitution with a constant term"));
                }
                let cache = powers.entry(g).or_insert_with(|| vec![ring.one(), image.with_degree_cap(cap)]);
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * &cache[1];
                    cache.push(next);
                }
                term = &term * &cache[e as usize];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Evaluate at scalar values indexed by generator id.
    pub fn evaluate(&self, values: &[PadicInt]) -> Result<PadicInt> {
        if values.len() != self.registry.len() {
            return Err(Error::DimensionMismatch);
        }
        let mut acc = PadicInt::zero(self.prime, self.floor);
        for (m, c) in &self.terms {
            let mut t = *c;
            for &(g, e) in m.pairs() {
                t *= values[g as usize].pow(e as u64);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Move into `target`, mapping each generator to the one with the same
    /// name and level.
    pub fn embed(&self, target: &PolyRing) -> Result<Self> {
        let mut a = Assignment::new(&self.registry, target);
        for g in self.registry.generators() {
            if target.registry.id(g).is_some() {
                a.fix(g)?;
            }
        }
        self.substitute(&a)
    }

    /// Semantic equality at the smaller of the two precisions.
    pub fn eq_poly(&self, other: &Self) -> Result<bool> {
        Ok(self.try_sub(other)?.is_zero())
    }

    /// Byte-stable rendering: monomials in registry order, nonnegative
    /// residues, explicit coefficients.
    pub fn canonical_text(&self) -> String {
        if self.terms.is_empty() {
            return format!("0 mod {}^{}", self.prime, self.precision());
        }
        let body: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("{}*{}", c.canonical_text(), m.render(&self.registry)))
            .collect();
        format!("{} mod {}^{}", body.join(" + "), self.prime, self.precision())
    }
}

impl PartialEq for SparsePoly {
    fn eq(&self, other: &Self) -> bool {
        self.eq_poly(other).unwrap_or(false)
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (mod {}^{})", self.prime, self.precision())
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let v = c.to_signed();
            let (sign, mag) = if v < 0 { ("-", -v) } else { ("+", v) };
            match (i, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{}", m.render(&self.registry))?;
            } else {
                write!(f, "{mag}*{}", m.render(&self.registry))?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl $tr<&SparsePoly> for &SparsePoly {
            type Output = SparsePoly;
            fn $method(self, rhs: &SparsePoly) -> SparsePoly {
                self.$try(rhs).expect("incompatible polynomials")
            }
        }
        impl $tr<SparsePoly> for SparsePoly {
            type Output = SparsePoly;
            fn $method(self, rhs: SparsePoly) -> SparsePoly {
                self.$try(&rhs).expect("incompatible polynomials")
            }
        }
        impl $tr<&SparsePoly> for SparsePoly {
            type Output = SparsePoly;
            fn $method(self, rhs: &SparsePoly) -> SparsePoly {
                self.$try(rhs).expect("incompatible polynomials")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.neg_ref()
    }
}

impl Neg for SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.neg_ref()
    }
}

/// Images of the generators of a source registry in a target ring.
#[derive(Clone)]
pub struct Assignment {
    source: Arc<Registry>,
    target: PolyRing,
    images: Vec<Option<SparsePoly>>,
}

impl Assignment {
    pub fn new(source: &Arc<Registry>, target: &PolyRing) -> Self {
        Self { source: source.clone(), target: target.clone(), images: vec![None; source.len()] }
    }

    pub fn set(&mut self, g: &Generator, image: SparsePoly) -> Result<()> {
        let id = self.source.id(g).ok_or_else(|| Error::UnknownGenerator(g.to_string()))?;
        if !same_registry(&image.registry, &self.target.registry) {
            return Err(Error::RegistryMismatch);
        }
        self.images[id as usize] = Some(image);
        Ok(())
    }

    /// Send `g` to the generator of the same name and level in the target.
    pub fn fix(&mut self, g: &Generator) -> Result<()> {
        let image = self.target.gen(g)?;
        self.set(g, image)
    }

    /// Fix every generator that has no image yet.
    pub fn fix_rest(&mut self) -> Result<()> {
        for i in 0..self.images.len() {
            if self.images[i].is_none() {
                let g = self.source.get(i as GenId).clone();
                self.fix(&g)?;
            }
        }
        Ok(())
    }

    pub fn image(&self, g: &Generator) -> Option<&SparsePoly> {
        self.source.id(g).and_then(|id| self.images[id as usize].as_ref())
    }

    pub fn target(&self) -> &PolyRing {
        &self.target
    }
}

/// Rules `g^k -> rhs` (power rules) and `g -> rhs` (replacement rules),
/// checked for termination when added.
#[derive(Clone)]
pub struct RewriteSystem {
    registry: Arc<Registry>,
    rules: Vec<(GenId, u32, SparsePoly)>,
}

impl RewriteSystem {
    pub fn new(registry: &Arc<Registry>) -> Self {
        Self { registry: registry.clone(), rules: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// `g^exponent -> rhs`; `rhs` must contain `g` only to smaller powers.
    pub fn add_power_rule(&mut self, g: &Generator, exponent: u32, rhs: SparsePoly) -> Result<()> {
        self.add(g, exponent.max(1), rhs)
    }

    /// `g -> rhs`; `rhs` must not contain `g`.
    pub fn add_replace_rule(&mut self, g: &Generator, rhs: SparsePoly) -> Result<()> {
        self.add(g, 1, rhs)
    }

    fn add(&mut self, g: &Generator, k: u32, rhs: SparsePoly) -> Result<()> {
        if !same_registry(&self.registry, &rhs.registry) {
            return Err(Error::RegistryMismatch);
        }
        let id = self.registry.id(g).ok_or_else(|| Error::UnknownGenerator(g.to_string()))?;
        if self.rules.iter().any(|r| r.0 == id) {
            return Err(Error::NonTerminating(format!("second rule for {g}")));
        }
        if rhs.terms.keys().any(|m| m.exponent(id) >= k) {
            return Err(Error::NonTerminating(format!("rule for {g} does not lower its exponent")));
        }
        self.rules.push((id, k, rhs));
        if let Some(cycle_at) = self.find_cycle() {
            self.rules.pop();
            return Err(Error::NonTerminating(format!(
                "rules depend on each other cyclically through {}",
                self.registry.get(cycle_at)
            )));
        }
        Ok(())
    }

    /// Depth-first search on "target of rule -> other rule targets in rhs".
    fn find_cycle(&self) -> Option<GenId> {
        let targets: HashMap<GenId, usize> = self.rules.iter().enumerate().map(|(i, r)| (r.0, i)).collect();
        let edges: Vec<Vec<usize>> = self
            .rules
            .iter()
            .map(|(g, _, rhs)| {
                let mut e: Vec<usize> = rhs
                    .terms
                    .keys()
                    .flat_map(|m| m.pairs().iter().map(|&(h, _)| h))
                    .filter(|h| h != g)
                    .filter_map(|h| targets.get(&h).copied())
                    .collect();
                e.sort();
                e.dedup();
                e
            })
            .collect();
        // 0 = unseen, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.rules.len()];
        fn visit(v: usize, edges: &[Vec<usize>], state: &mut [u8]) -> Option<usize> {
            state[v] = 1;
            for &w in &edges[v] {
                if state[w] == 1 {
                    return Some(w);
                }
                if state[w] == 0 {
                    if let Some(c) = visit(w, edges, state) {
                        return Some(c);
                    }
                }
            }
            state[v] = 2;
            None
        }
        for v in 0..self.rules.len() {
            if state[v] == 0 {
                if let Some(c) = visit(v, &edges, &mut state) {
                    return Some(self.rules[c].0);
                }
            }
        }
        None
    }

    /// Normal form under exhaustive rule application.
    pub fn normal_form(&self, a: &SparsePoly) -> Result<SparsePoly> {
        if !same_registry(&self.registry, &a.registry) {
            return Err(Error::RegistryMismatch);
        }
        let mut done = a.empty_like(a.floor, a.degree_cap);
        done.truncated = a.truncated;
        let mut pending = a.clone();
        while !pending.is_zero() {
            let mut next = pending.empty_like(pending.floor, pending.degree_cap);
            next.truncated = pending.truncated;
            for (m, c) in &pending.terms {
                let rule = self.rules.iter().find(|(g, k, _)| m.exponent(*g) >= *k);
                match rule {
                    None => done.insert(m.clone(), *c),
                    Some((g, k, rhs)) => {
                        let rest = pending.ring().monomial(*c, m.lower(*g, *k));
                        next = &next + &(&rest * rhs);
                    }
                }
            }
            done.floor = done.floor.min(next.floor);
            done.truncated |= next.truncated;
            pending = next;
        }
        Ok(done)
    }
}

/// A random polynomial with `terms` terms of degree at most `max_degree` in
/// `gens`, coefficients uniform mod `p^precision`.
pub fn random_poly<R: Rng>(ring: &PolyRing, gens: &[Generator], terms: usize, max_degree: u32, rng: &mut R) -> SparsePoly {
    let ids: Vec<GenId> = gens.iter().map(|g| ring.registry.id(g).expect("generator not in registry")).collect();
    let m = crate::padic::pow_p(ring.prime, ring.precision);
    let mut out = ring.zero();
    for _ in 0..terms {
        let deg = rng.gen_range(0..=max_degree);
        let mono = Monomial::from_pairs((0..deg).map(|_| (ids[rng.gen_range(0..ids.len())], 1)));
        let c = PadicInt::int(ring.prime, rng.gen_range(0..m) as i128, ring.precision);
        out = &out + &ring.monomial(c, mono);
    }
    out
}

/// Valuation of a polynomial: minimum over its coefficients.
pub fn poly_valuation(a: &SparsePoly) -> Valuation {
    a.terms()
        .map(|(_, c)| c.valuation())
        .min_by_key(|v| match v {
            Valuation::Finite(x) => (*x, 0),
            Valuation::AtLeast(x) => (*x, 1),
        })
        .unwrap_or(Valuation::AtLeast(a.precision()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u32, cap: Option<u32>) -> PolyRing {
        PolyRing::new(Registry::levels(&["b"], 3), p, 10, cap).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let r = ring(3, None);
        let (b0, b1) = (r.var("b", 0), r.var("b", 1));
        let lhs = (&b0 + &b1) * (&b0 - &b1);
        assert_eq!(lhs, &b0 * &b0 - &b1 * &b1);
        assert_eq!(&lhs * &r.one(), lhs);
        assert_eq!(lhs.to_string(), "b_0^2 - b_1^2");
    }

    #[test]
    fn degree_cap_truncates() {
        let r = ring(2, Some(2));
        let b0 = r.var("b", 0);
        let cube = &(&b0 * &b0) * &b0;
        assert!(cube.is_zero());
        assert!(cube.is_truncated());
        assert!(!(&b0 * &b0).is_truncated());
    }

    #[test]
    fn substitution() {
        let r = ring(3, None);
        let (b0, b1) = (r.var("b", 0), r.var("b", 1));
        let mut a = Assignment::new(r.registry(), &r);
        a.set(&Generator::new("b", 0), &b0 + &r.one()).unwrap();
        a.fix_rest().unwrap();
        let sq = (&b0 * &b0).substitute(&a).unwrap();
        assert_eq!(sq, &b0 * &b0 + b0.scale_int(2) + r.one());

        let mut id = Assignment::new(r.registry(), &r);
        id.fix_rest().unwrap();
        let x = &b0 * &b1 + b1.scale_int(7);
        assert_eq!(x.substitute(&id).unwrap(), x);

        let mut kill = Assignment::new(r.registry(), &r);
        kill.set(&Generator::new("b", 0), r.zero()).unwrap();
        kill.fix_rest().unwrap();
        assert!((&b0 * &b1).substitute(&kill).unwrap().is_zero());

        let partial = Assignment::new(r.registry(), &r);
        assert!(matches!(b1.substitute(&partial), Err(Error::UnassignedGenerator(_))));
    }

    #[test]
    fn truncated_input_refuses_translation() {
        let r = ring(3, Some(2));
        let b0 = r.var("b", 0);
        let t = b0.pow(3) + b0.clone();
        assert!(t.is_truncated());
        let mut a = Assignment::new(r.registry(), &r);
        a.set(&Generator::new("b", 0), &b0 + &r.one()).unwrap();
        a.fix_rest().unwrap();
        assert!(matches!(t.substitute(&a), Err(Error::TruncatedInput(_))));
    }

    #[test]
    fn reduction() {
        let r = ring(2, None);
        let (b0, b1) = (r.var("b", 0), r.var("b", 1));
        let a = &b1 * &b1 + b1.scale_int(2) + &b0 * &b1;
        let red = a.reduce_mod(1, &[Generator::new("b", 0)]);
        assert_eq!(red.precision(), 1);
        assert_eq!(red, (&b1 * &b1).with_precision(1));
        assert_eq!(a.reduce_mod(10, &[]), a);
    }

    #[test]
    fn rewriting_alpha_powers() {
        let reg = Registry::levels(&["alpha"], 2);
        let r = PolyRing::new(reg.clone(), 3, 8, None).unwrap();
        let a0 = r.var("alpha", 0);
        let mut rw = RewriteSystem::new(&reg);
        rw.add_power_rule(&Generator::new("alpha", 0), 3, a0.clone()).unwrap();
        assert_eq!(rw.normal_form(&a0.pow(4)).unwrap(), a0.pow(2));
        assert_eq!(rw.normal_form(&a0.pow(6)).unwrap(), a0.pow(2));
        let a1 = r.var("alpha", 1);
        assert_eq!(rw.normal_form(&a1.pow(5)).unwrap(), a1.pow(5));
    }

    #[test]
    fn rewriting_rejects_cycles() {
        let reg = Registry::levels(&["x"], 2);
        let r = PolyRing::new(reg.clone(), 2, 8, None).unwrap();
        let mut rw = RewriteSystem::new(&reg);
        let g = |l| Generator::new("x", l);
        rw.add_replace_rule(&g(1), r.var("x", 2)).unwrap();
        assert!(matches!(rw.add_replace_rule(&g(2), r.var("x", 1)), Err(Error::NonTerminating(_))));
        assert!(matches!(rw.add_replace_rule(&g(0), r.var("x", 0)), Err(Error::NonTerminating(_))));
        assert!(matches!(rw.add_power_rule(&g(0), 2, r.var("x", 0).pow(2)), Err(Error::NonTerminating(_))));
        rw.add_replace_rule(&g(2), r.var("x", 0).pow(3)).unwrap();
        assert_eq!(rw.normal_form(&r.var("x", 1)).unwrap(), r.var("x", 0).pow(3));
    }

    #[test]
    fn exact_division_audits() {
        let r = ring(2, None);
        let b0 = r.var("b", 0);
        let a = b0.scale_int(4) + r.constant(2);
        let q = a.exact_div_p(1).unwrap();
        assert_eq!(q, b0.scale_int(2) + r.one());
        assert_eq!(q.precision(), 9);
        assert!(matches!(q.exact_div_p(1), Err(Error::NotDivisible { .. })));
    }

    #[test]
    fn precision_floor_survives_cancellation() {
        let r = ring(3, None);
        let b0 = r.var("b", 0);
        let low = b0.with_precision(4);
        let diff = &low - &b0;
        assert!(diff.is_zero());
        assert_eq!(diff.precision(), 4);
    }

    #[test]
    fn canonical_text_is_explicit() {
        let r = ring(2, None);
        let a = r.var("b", 1) - r.constant(1);
        assert_eq!(a.canonical_text(), "1023*1 + 1*b_1 mod 2^10");
    }
}
