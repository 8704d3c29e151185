//! Free graded-commutative algebras over ℚ with sparse exact arithmetic.
//!
//! A monomial is a dense exponent vector over the generator list. Odd
//! generators appear with exponent at most one; the normal form orders
//! generators by index, and the sign of a product is obtained by counting
//! odd generators that have to pass each other. An optional cap bounds the
//! total power of degree-0 generators (monomials beyond it are zero), which
//! gives finite truncations of polynomial coefficient rings.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::exactlin::{fmt_q, qi, RationalMatrix, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GcaError {
    #[error("operands live in different algebras")]
    CarrierMismatch,
    #[error("generator name {0:?} occurs in both factors")]
    NameCollision(String),
    #[error("duplicate generator name {0:?}")]
    DuplicateGenerator(String),
    #[error("unknown generator {name:?} at offset {pos}")]
    UnknownGenerator { name: String, pos: usize },
    #[error("parse error at offset {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("degree {0} has infinitely many monomials (uncapped degree-0 generators)")]
    InfiniteBasis(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
    pub bidegree: Option<(u32, u32)>,
}

impl Generator {
    pub fn new(name: &str, degree: u32) -> Self {
        Self { name: name.to_string(), degree, bidegree: None }
    }

    pub fn bigraded(name: &str, degree: u32, bidegree: (u32, u32)) -> Self {
        Self { name: name.to_string(), degree, bidegree: Some(bidegree) }
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedAlgebra {
    pub name: String,
    generators: Vec<Generator>,
    zero_degree_cap: Option<u32>,
    index: HashMap<String, usize>,
}

/// Shared handle; elements and derivations keep one.
pub type Alg = Arc<GradedAlgebra>;

impl GradedAlgebra {
    pub fn new(name: &str, generators: Vec<Generator>) -> Result<Alg, GcaError> {
        Self::with_cap(name, generators, None)
    }

    pub fn with_cap(name: &str, generators: Vec<Generator>, zero_degree_cap: Option<u32>) -> Result<Alg, GcaError> {
        let mut index = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            if let Some((p, q)) = g.bidegree {
                if p + q != g.degree {
                    return Err(GcaError::DegreeMismatch(format!(
                        "generator {} has degree {} but bidegree ({p},{q})",
                        g.name, g.degree
                    )));
                }
            }
            if index.insert(g.name.clone(), i).is_some() {
                return Err(GcaError::DuplicateGenerator(g.name.clone()));
            }
        }
        Ok(Arc::new(Self { name: name.to_string(), generators, zero_degree_cap, index }))
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn zero_degree_cap(&self) -> Option<u32> {
        self.zero_degree_cap
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u32 {
        m.0.iter().zip(&self.generators).map(|(e, g)| e * g.degree).sum()
    }

    pub fn monomial_bidegree(&self, m: &Monomial) -> Option<(u32, u32)> {
        let mut p = 0;
        let mut q = 0;
        for (e, g) in m.0.iter().zip(&self.generators) {
            if *e == 0 {
                continue;
            }
            let (a, b) = g.bidegree?;
            p += e * a;
            q += e * b;
        }
        Some((p, q))
    }

    /// Product of two monomials with its Koszul sign, or `None` when it
    /// vanishes (repeated odd generator or truncation).
    pub fn multiply_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        let mut exps = Vec::with_capacity(a.0.len());
        let mut negative = false;
        let mut odd_after = 0usize; // odd generators of `a` with index greater than the current one
        for (i, g) in self.generators.iter().enumerate() {
            if g.is_odd() && a.0[i] > 0 {
                odd_after += 1;
            }
        }
        let mut zero_power = 0;
        for (i, g) in self.generators.iter().enumerate() {
            let (ea, eb) = (a.0[i], b.0[i]);
            if g.is_odd() {
                if ea > 0 {
                    odd_after -= 1;
                }
                if eb > 0 {
                    if ea > 0 {
                        return None;
                    }
                    if odd_after % 2 == 1 {
                        negative = !negative;
                    }
                }
            } else if g.degree == 0 {
                zero_power += ea + eb;
            }
            exps.push(ea + eb);
        }
        if let Some(cap) = self.zero_degree_cap {
            if zero_power > cap {
                return None;
            }
        }
        Some((Monomial(exps), negative))
    }

    /// All monomials of total degree `n`, in canonical order.
    pub fn degree_basis(&self, n: u32) -> Result<Vec<Monomial>, GcaError> {
        if self.zero_degree_cap.is_none() && self.generators.iter().any(|g| g.degree == 0) {
            return Err(GcaError::InfiniteBasis(n));
        }
        let cap = self.zero_degree_cap.unwrap_or(0);
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.generators.len()];
        self.enumerate(0, n, cap, &mut cur, &mut out);
        out.sort();
        Ok(out)
    }

    fn enumerate(&self, i: usize, left: u32, zero_left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == self.generators.len() {
            if left == 0 {
                out.push(Monomial(cur.clone()));
            }
            return;
        }
        let g = &self.generators[i];
        let max = if g.degree == 0 {
            zero_left
        } else if g.is_odd() {
            u32::from(g.degree <= left)
        } else {
            left / g.degree
        };
        for e in 0..=max {
            cur[i] = e;
            let used = e * g.degree;
            let zl = if g.degree == 0 { zero_left - e } else { zero_left };
            self.enumerate(i + 1, left - used, zl, cur, out);
        }
        cur[i] = 0;
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let parts: Vec<String> = m
            .0
            .iter()
            .zip(&self.generators)
            .filter(|(e, _)| **e > 0)
            .map(|(e, g)| if *e == 1 { g.name.clone() } else { format!("{}^{}", g.name, e) })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("·")
        }
    }
}

/// Exponent vector in normal form. Ordered by word length first, then
/// so that earlier generators come first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn generator(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Monomial(v)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn length(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.length().cmp(&other.length()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse linear combination of monomials.
#[derive(Clone, Debug)]
pub struct Element {
    alg: Alg,
    terms: BTreeMap<Monomial, Q>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        same_carrier(&self.alg, &other.alg) && self.terms == other.terms
    }
}

impl Eq for Element {}

pub fn same_carrier(a: &Alg, b: &Alg) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Element {
    pub fn zero(alg: &Alg) -> Self {
        Self { alg: alg.clone(), terms: BTreeMap::new() }
    }

    pub fn one(alg: &Alg) -> Self {
        Self::scalar(alg, Q::one())
    }

    pub fn scalar(alg: &Alg, c: Q) -> Self {
        Self::monomial(alg, Monomial::one(alg.ngens()), c)
    }

    pub fn monomial(alg: &Alg, m: Monomial, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { alg: alg.clone(), terms }
    }

    pub fn generator(alg: &Alg, i: usize) -> Self {
        Self::monomial(alg, Monomial::generator(alg.ngens(), i), Q::one())
    }

    /// Generator by name; panics if absent.
    pub fn gen(alg: &Alg, name: &str) -> Self {
        let i = alg.generator_index(name).unwrap_or_else(|| panic!("no generator {name:?}"));
        Self::generator(alg, i)
    }

    pub fn from_terms(alg: &Alg, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut e = Self::zero(alg);
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    /// Coordinates `v` over `basis` back to an element.
    pub fn from_vector(alg: &Alg, basis: &[Monomial], v: &[Q]) -> Self {
        Self::from_terms(alg, basis.iter().cloned().zip(v.iter().cloned()))
    }

    pub fn algebra(&self) -> &Alg {
        &self.alg
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Element, c: &Q) {
        assert!(same_carrier(&self.alg, &other.alg), "carrier mismatch");
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn scale(&self, c: &Q) -> Element {
        if c.is_zero() {
            return Element::zero(&self.alg);
        }
        Element { alg: self.alg.clone(), terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    /// `Some(d)` when every term has total degree `d`; zero has none.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| self.alg.monomial_degree(m));
        let d = degs.next()?;
        degs.all(|x| x == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    /// Terms of total degree `n`.
    pub fn degree_part(&self, n: u32) -> Element {
        self.filter(|m| self.alg.monomial_degree(m) == n)
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Element {
        Element {
            alg: self.alg.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Constant term.
    pub fn constant(&self) -> Q {
        self.coefficient(&Monomial::one(self.alg.ngens()))
    }

    pub fn checked_mul(&self, other: &Element) -> Result<Element, GcaError> {
        if !same_carrier(&self.alg, &other.alg) {
            return Err(GcaError::CarrierMismatch);
        }
        let mut out = Element::zero(&self.alg);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((m, neg)) = self.alg.multiply_monomials(m1, m2) {
                    let c = c1 * c2;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &Element) -> Result<Element, GcaError> {
        if !same_carrier(&self.alg, &other.alg) {
            return Err(GcaError::CarrierMismatch);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Element {
        let mut out = Element::one(&self.alg);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Coordinates over a degree basis. Terms outside the basis are
    /// reported as an error.
    pub fn coordinates(&self, index: &HashMap<Monomial, usize>) -> Result<Vec<Q>, GcaError> {
        let mut v = vec![Q::zero(); index.len()];
        for (m, c) in &self.terms {
            let i = index.get(m).ok_or_else(|| {
                GcaError::DegreeMismatch(format!("monomial {} outside the basis", self.alg.format_monomial(m)))
            })?;
            v[*i] = c.clone();
        }
        Ok(v)
    }

    /// Rename the carrier to a structurally equal algebra.
    pub fn recarrier(&self, alg: &Alg) -> Result<Element, GcaError> {
        if !same_carrier(&self.alg, alg) {
            return Err(GcaError::CarrierMismatch);
        }
        Ok(Element { alg: alg.clone(), terms: self.terms.clone() })
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let abs = c.abs();
            let mono = self.alg.format_monomial(m);
            if m.length() == 0 {
                write!(f, "{}", fmt_q(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}·{mono}", fmt_q(&abs))?;
            }
        }
        Ok(())
    }
}

impl<'a> Mul<&'a Element> for &'a Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.checked_mul(rhs).expect("carrier mismatch")
    }
}

impl<'a> Add<&'a Element> for &'a Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.checked_add(rhs).expect("carrier mismatch")
    }
}

impl<'a> Sub<&'a Element> for &'a Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Q::one());
        out
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&-Q::one())
    }
}

impl Mul for Element {
    type Output = Element;
    fn mul(self, rhs: Element) -> Element {
        &self * &rhs
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        &self + &rhs
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

/// A graded derivation determined by its values on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    alg: Alg,
    degree: i32,
    images: Vec<Element>,
}

impl Derivation {
    pub fn new(alg: &Alg, degree: i32, images: Vec<Element>) -> Result<Self, GcaError> {
        if images.len() != alg.ngens() {
            return Err(GcaError::DegreeMismatch(format!(
                "{} images for {} generators",
                images.len(),
                alg.ngens()
            )));
        }
        for (g, img) in alg.generators().iter().zip(&images) {
            if !same_carrier(alg, &img.alg) {
                return Err(GcaError::CarrierMismatch);
            }
            if let Some(d) = img.homogeneous_degree() {
                if d as i64 != g.degree as i64 + degree as i64 {
                    return Err(GcaError::DegreeMismatch(format!(
                        "image of {} has degree {d}, expected {}",
                        g.name,
                        g.degree as i64 + degree as i64
                    )));
                }
            } else if !img.is_zero() {
                return Err(GcaError::DegreeMismatch(format!("image of {} is inhomogeneous", g.name)));
            }
        }
        Ok(Self { alg: alg.clone(), degree, images })
    }

    pub fn zero(alg: &Alg, degree: i32) -> Self {
        Self { alg: alg.clone(), degree, images: vec![Element::zero(alg); alg.ngens()] }
    }

    pub fn algebra(&self) -> &Alg {
        &self.alg
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Element {
        &self.images[i]
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Element::is_zero)
    }

    pub fn apply(&self, x: &Element) -> Element {
        self.try_apply(x).expect("carrier mismatch")
    }

    pub fn try_apply(&self, x: &Element) -> Result<Element, GcaError> {
        if !same_carrier(&self.alg, &x.alg) {
            return Err(GcaError::CarrierMismatch);
        }
        let mut out = Element::zero(&self.alg);
        for (m, c) in &x.terms {
            let dm = self.apply_monomial(m);
            out.add_scaled(&dm, c);
        }
        Ok(out)
    }

    /// Leibniz expansion over the normal-form factorisation of `m`.
    pub fn apply_monomial(&self, m: &Monomial) -> Element {
        let n = self.alg.ngens();
        let gens = self.alg.generators();
        let odd_d = self.degree.rem_euclid(2) == 1;
        let mut out = Element::zero(&self.alg);
        let mut prefix = Monomial::one(n);
        let mut prefix_degree = 0u32;
        for i in 0..n {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let img = &self.images[i];
            if !img.is_zero() {
                let mut rest = m.0.clone();
                for r in rest.iter_mut().take(i) {
                    *r = 0;
                }
                rest[i] = e - 1;
                let suffix = Monomial(rest);
                let mut factor = qi(e as i64);
                if odd_d && prefix_degree % 2 == 1 {
                    factor = -factor;
                }
                let left = Element::monomial(&self.alg, prefix.clone(), factor);
                let right = Element::monomial(&self.alg, suffix, Q::one());
                out = &out + &(&(&left * img) * &right);
            }
            prefix.0[i] = e;
            prefix_degree += e * gens[i].degree;
        }
        out
    }

    /// Graded commutator `D1∘D2 − (−1)^{|D1||D2|} D2∘D1`.
    pub fn commutator(&self, other: &Derivation) -> Derivation {
        let sign = if (self.degree * other.degree).rem_euclid(2) == 1 { Q::one() } else { -Q::one() };
        let images = (0..self.alg.ngens())
            .map(|i| {
                let mut x = self.apply(&other.images[i]);
                x.add_scaled(&other.apply(&self.images[i]), &sign);
                x
            })
            .collect();
        Derivation { alg: self.alg.clone(), degree: self.degree + other.degree, images }
    }

    pub fn scale(&self, c: &Q) -> Derivation {
        Derivation {
            alg: self.alg.clone(),
            degree: self.degree,
            images: self.images.iter().map(|x| x.scale(c)).collect(),
        }
    }

    /// `self + c·other`; degrees must agree.
    pub fn add_scaled(&self, other: &Derivation, c: &Q) -> Derivation {
        assert_eq!(self.degree, other.degree, "adding derivations of different degree");
        let images = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| {
                let mut x = a.clone();
                x.add_scaled(b, c);
                x
            })
            .collect();
        Derivation { alg: self.alg.clone(), degree: self.degree, images }
    }

    /// Matrix from the degree-`n` basis to the degree-`n + |D|` basis.
    pub fn matrix(&self, n: u32) -> Result<RationalMatrix, GcaError> {
        let target = n as i64 + self.degree as i64;
        let src = self.alg.degree_basis(n)?;
        let tgt = if target < 0 { Vec::new() } else { self.alg.degree_basis(target as u32)? };
        linear_map_matrix(&self.alg, &src, &tgt, |x| self.apply(x))
    }
}

/// Matrix of a linear map between two monomial bases.
pub fn linear_map_matrix(
    alg: &Alg,
    src: &[Monomial],
    tgt: &[Monomial],
    f: impl Fn(&Element) -> Element,
) -> Result<RationalMatrix, GcaError> {
    let index = basis_index(tgt);
    let mut m = RationalMatrix::zeros(tgt.len(), src.len());
    for (j, mono) in src.iter().enumerate() {
        let img = f(&Element::monomial(alg, mono.clone(), Q::one()));
        for (i, c) in img.coordinates(&index)?.into_iter().enumerate() {
            if !c.is_zero() {
                m.set(i, j, c);
            }
        }
    }
    Ok(m)
}

pub fn basis_index(basis: &[Monomial]) -> HashMap<Monomial, usize> {
    basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect()
}

/// Degree-preserving algebra homomorphism given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraMap {
    source: Alg,
    target: Alg,
    images: Vec<Element>,
}

impl AlgebraMap {
    pub fn new(source: &Alg, target: &Alg, images: Vec<Element>) -> Result<Self, GcaError> {
        if images.len() != source.ngens() {
            return Err(GcaError::DegreeMismatch(format!(
                "{} images for {} generators",
                images.len(),
                source.ngens()
            )));
        }
        for (g, img) in source.generators().iter().zip(&images) {
            if !same_carrier(target, &img.alg) {
                return Err(GcaError::CarrierMismatch);
            }
            if !img.is_zero() && img.homogeneous_degree() != Some(g.degree) {
                return Err(GcaError::DegreeMismatch(format!(
                    "image of {} must be homogeneous of degree {}",
                    g.name, g.degree
                )));
            }
        }
        Ok(Self { source: source.clone(), target: target.clone(), images })
    }

    pub fn identity(alg: &Alg) -> Self {
        let images = (0..alg.ngens()).map(|i| Element::generator(alg, i)).collect();
        Self { source: alg.clone(), target: alg.clone(), images }
    }

    pub fn source(&self) -> &Alg {
        &self.source
    }

    pub fn target(&self) -> &Alg {
        &self.target
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn apply(&self, x: &Element) -> Element {
        self.try_apply(x).expect("carrier mismatch")
    }

    pub fn try_apply(&self, x: &Element) -> Result<Element, GcaError> {
        if !same_carrier(&self.source, &x.alg) {
            return Err(GcaError::CarrierMismatch);
        }
        let mut out = Element::zero(&self.target);
        for (m, c) in &x.terms {
            let mut img = Element::scalar(&self.target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    img = &img * &self.images[i];
                }
                if img.is_zero() {
                    break;
                }
            }
            out = &out + &img;
        }
        Ok(out)
    }

    /// `other ∘ self`
    pub fn then(&self, other: &AlgebraMap) -> AlgebraMap {
        let images = self.images.iter().map(|x| other.apply(x)).collect();
        AlgebraMap { source: self.source.clone(), target: other.target.clone(), images }
    }
}

/// The tensor product `A ⊗ B` with the generators of `A` first. Fails on a
/// shared generator name.
pub fn tensor(a: &Alg, b: &Alg) -> Result<Alg, GcaError> {
    tensor_with_prefix(a, b, None)
}

/// As [`tensor`], renaming every generator of `b` to `prefix + name` when
/// a prefix is given.
pub fn tensor_with_prefix(a: &Alg, b: &Alg, prefix: Option<&str>) -> Result<Alg, GcaError> {
    let mut gens = a.generators().to_vec();
    for g in b.generators() {
        let mut g = g.clone();
        if let Some(p) = prefix {
            g.name = format!("{p}{}", g.name);
        }
        if a.generator_index(&g.name).is_some() {
            return Err(GcaError::NameCollision(g.name));
        }
        gens.push(g);
    }
    let cap = match (a.zero_degree_cap, b.zero_degree_cap) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    GradedAlgebra::with_cap(&format!("{}⊗{}", a.name, b.name), gens, cap)
}

/// Inclusion of a factor into a tensor product, with its generators
/// starting at `offset`.
pub fn factor_inclusion(factor: &Alg, product: &Alg, offset: usize) -> AlgebraMap {
    let images = (0..factor.ngens()).map(|i| Element::generator(product, offset + i)).collect();
    AlgebraMap { source: factor.clone(), target: product.clone(), images }
}

/// Extend derivations of the two factors (same degree) to `A ⊗ B` as
/// `D_A ⊗ 1 + 1 ⊗ D_B`; the Koszul sign comes out of the Leibniz rule.
pub fn tensor_derivation(product: &Alg, da: &Derivation, db: &Derivation) -> Result<Derivation, GcaError> {
    if da.degree != db.degree {
        return Err(GcaError::DegreeMismatch("factor derivations differ in degree".into()));
    }
    let ia = factor_inclusion(&da.alg, product, 0);
    let ib = factor_inclusion(&db.alg, product, da.alg.ngens());
    let mut images: Vec<Element> = da.images.iter().map(|x| ia.apply(x)).collect();
    images.extend(db.images.iter().map(|x| ib.apply(x)));
    Derivation::new(product, da.degree, images)
}

/// Parse a polynomial expression such as `1/6·θ1·θ2 - 2*u^2 + (x + 1)`.
pub fn parse_element(alg: &Alg, text: &str) -> Result<Element, GcaError> {
    let mut p = Parser { alg, chars: text.char_indices().collect(), pos: 0, text };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    alg: &'a Alg,
    chars: Vec<(usize, char)>,
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.text.len(), |c| c.0)
    }

    fn error(&self, message: &str) -> GcaError {
        GcaError::Parse { pos: self.offset(), message: message.to_string() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<Element, GcaError> {
        self.skip_ws();
        let mut acc = Element::zero(self.alg);
        let mut sign = Q::one();
        if self.peek() == Some('-') {
            self.pos += 1;
            sign = -Q::one();
        } else if self.peek() == Some('+') {
            self.pos += 1;
        }
        loop {
            let t = self.term()?;
            acc.add_scaled(&t, &sign);
            self.skip_ws();
            match self.peek() {
                Some('+') => sign = Q::one(),
                Some('-') => sign = -Q::one(),
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Element, GcaError> {
        let mut acc = self.power()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') | Some('·') => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = &acc * &f;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Element, GcaError> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let n = self.integer()?;
            let k = n.to_u32().ok_or_else(|| self.error("exponent out of range"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<num_bigint::BigInt, GcaError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let s: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
        Ok(s.parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<Element, GcaError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some('-') => {
                self.pos += 1;
                let a = self.power()?;
                Ok(-&a)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let mut value = Q::from_integer(n);
                if self.peek() == Some('/') {
                    self.pos += 1;
                    let d = self.integer()?;
                    if d.is_zero() {
                        return Err(self.error("division by zero"));
                    }
                    value /= Q::from_integer(d);
                }
                Ok(Element::scalar(self.alg, value))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                let offset = self.offset();
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().map(|c| c.1).collect();
                match self.alg.generator_index(&name) {
                    Some(i) => Ok(Element::generator(self.alg, i)),
                    None => Err(GcaError::UnknownGenerator { name, pos: offset }),
                }
            }
            Some(_) => Err(self.error("expected a number, generator or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::q;

    fn weil_su2_like() -> Alg {
        GradedAlgebra::new(
            "w",
            vec![
                Generator::bigraded("l1", 1, (0, 1)),
                Generator::bigraded("l2", 1, (0, 1)),
                Generator::bigraded("l3", 1, (0, 1)),
                Generator::bigraded("u1", 2, (2, 0)),
                Generator::bigraded("u2", 2, (2, 0)),
                Generator::bigraded("u3", 2, (2, 0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn koszul_signs() {
        let a = weil_su2_like();
        let l1 = Element::gen(&a, "l1");
        let l2 = Element::gen(&a, "l2");
        assert_eq!(&l2 * &l1, -(&l1 * &l2));
        assert!((&l1 * &l1).is_zero());
        let u = Element::gen(&a, "u1");
        let x = &u + &(&l1 * &l2);
        assert_eq!(&x * &u, &(&u * &u) + &(&(&u * &l1) * &l2));
    }

    #[test]
    fn carrier_mismatch_is_an_error() {
        let a = weil_su2_like();
        let b = GradedAlgebra::new("b", vec![Generator::new("x", 1)]).unwrap();
        assert_eq!(
            Element::one(&a).checked_mul(&Element::one(&b)),
            Err(GcaError::CarrierMismatch)
        );
    }

    #[test]
    fn contraction_by_leibniz() {
        let a = weil_su2_like();
        let mut images = vec![Element::zero(&a); 6];
        images[0] = Element::one(&a);
        let iota1 = Derivation::new(&a, -1, images).unwrap();
        let l1 = Element::gen(&a, "l1");
        let l2 = Element::gen(&a, "l2");
        assert_eq!(iota1.apply(&(&l1 * &l2)), l2);
        assert_eq!(iota1.apply(&(&l2 * &l1)), -&l2);
        assert!(iota1.apply(&Element::gen(&a, "u1")).is_zero());
    }

    #[test]
    fn commutator_of_contractions_vanishes() {
        let a = weil_su2_like();
        let iota = |k: usize| {
            let mut images = vec![Element::zero(&a); 6];
            images[k] = Element::one(&a);
            Derivation::new(&a, -1, images).unwrap()
        };
        assert!(iota(0).commutator(&iota(1)).is_zero());
        assert!(iota(0).commutator(&iota(0)).is_zero());
    }

    #[test]
    fn degree_basis_examples() {
        let w = GradedAlgebra::new("w", vec![Generator::new("θ", 1), Generator::new("u", 2)]).unwrap();
        let show = |n| -> Vec<String> { w.degree_basis(n).unwrap().iter().map(|m| w.format_monomial(m)).collect() };
        assert_eq!(show(2), vec!["u"]);
        assert_eq!(show(3), vec!["θ·u"]);
        assert_eq!(weil_su2_like().degree_basis(2).unwrap().len(), 6);
    }

    #[test]
    fn degree_zero_generators_need_a_cap() {
        let a = GradedAlgebra::new("t", vec![Generator::new("t", 0)]).unwrap();
        assert_eq!(a.degree_basis(0), Err(GcaError::InfiniteBasis(0)));
        let b = GradedAlgebra::with_cap("t", vec![Generator::new("t", 0)], Some(2)).unwrap();
        assert_eq!(b.degree_basis(0).unwrap().len(), 3);
        let t = Element::gen(&b, "t");
        assert!(t.pow(3).is_zero());
    }

    #[test]
    fn tensor_names_and_basis() {
        let w = GradedAlgebra::new("w", vec![Generator::new("θ", 1), Generator::new("u", 2)]).unwrap();
        let m = GradedAlgebra::new("m", vec![Generator::new("λM", 1)]).unwrap();
        let t = tensor(&w, &m).unwrap();
        let names: Vec<String> = t.degree_basis(2).unwrap().iter().map(|x| t.format_monomial(x)).collect();
        assert_eq!(names, vec!["u", "θ·λM"]);
        assert_eq!(tensor(&w, &w), Err(GcaError::NameCollision("θ".into())));
        let tw = tensor_with_prefix(&w, &w, Some("k_")).unwrap();
        assert_eq!(tw.generator_index("k_u"), Some(3));
    }

    #[test]
    fn tensor_differential_squares_to_zero() {
        let w = GradedAlgebra::new("w", vec![Generator::new("θ", 1), Generator::new("u", 2)]).unwrap();
        let x = GradedAlgebra::new("x", vec![Generator::new("x3", 3)]).unwrap();
        let dw = Derivation::new(&w, 1, vec![Element::gen(&w, "u"), Element::zero(&w)]).unwrap();
        let dx = Derivation::zero(&x, 1);
        let t = tensor(&w, &x).unwrap();
        let d = tensor_derivation(&t, &dw, &dx).unwrap();
        assert!(d.commutator(&d).is_zero());
    }

    #[test]
    fn parse_and_print() {
        let a = weil_su2_like();
        let e = parse_element(&a, "1/6*l1·l2·l3 - u1^2 + 2").unwrap();
        assert_eq!(e.to_string(), "2 - u1^2 + 1/6·l1·l2·l3");
        assert_eq!(parse_element(&a, &e.to_string()).unwrap(), e);
        assert_eq!(parse_element(&a, "l2*l1").unwrap().to_string(), "-l1·l2");
        assert_eq!(parse_element(&a, "-(u1 + u2)*3").unwrap().coefficient(&Monomial::generator(6, 3)), qi(-3));
        assert_eq!(parse_element(&a, "u1/2"), Err(GcaError::Parse { pos: 2, message: "unexpected trailing input".into() }));
        match parse_element(&a, "u1 + zz") {
            Err(GcaError::UnknownGenerator { name, pos }) => {
                assert_eq!(name, "zz");
                assert_eq!(pos, 5);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_element(&a, "3/4").unwrap().constant(), q(3, 4));
    }

    #[test]
    fn algebra_map_is_multiplicative() {
        let a = weil_su2_like();
        let swap = AlgebraMap::new(
            &a,
            &a,
            vec![
                Element::gen(&a, "l2"),
                Element::gen(&a, "l1"),
                Element::gen(&a, "l3"),
                Element::gen(&a, "u1"),
                Element::gen(&a, "u2"),
                Element::gen(&a, "u3"),
            ],
        )
        .unwrap();
        let x = parse_element(&a, "l1*l2 + u1").unwrap();
        let y = parse_element(&a, "l3 + l1").unwrap();
        assert_eq!(swap.apply(&(&x * &y)), &swap.apply(&x) * &swap.apply(&y));
        assert_eq!(swap.apply(&parse_element(&a, "l1*l2").unwrap()), parse_element(&a, "-l1*l2").unwrap());
    }
}
