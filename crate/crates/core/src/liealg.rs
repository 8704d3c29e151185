//! Lie algebras given by structure constants, their coadjoint action, and
//! invariant polynomials from characteristic polynomials of a defining
//! representation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlin::{fmt_q, q, qi, RationalMatrix, Q};

/// An element `re + i·im` of ℚ(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: Q,
    pub im: Q,
}

impl GaussianRational {
    pub fn new(re: Q, im: Q) -> Self {
        Self { re, im }
    }

    pub fn real(re: Q) -> Self {
        Self { re, im: Q::zero() }
    }

    pub fn i() -> Self {
        Self { re: Q::zero(), im: Q::one() }
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self { re: Q::zero(), im: Q::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(Q::one())
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        self.clone() * o.clone()
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_q(&self.re)),
            (true, false) => write!(f, "{}i", fmt_q(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "{}{}{}i", fmt_q(&self.re), sign, fmt_q(&self.im.abs()))
            }
        }
    }
}

/// Square matrix over ℚ(i).
pub type ComplexMatrix = Vec<Vec<GaussianRational>>;

fn cmat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![GaussianRational::zero(); m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] = out[i][j].clone() + &a[i][k] * &bk[j];
            }
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("invalid Lie algebra: {0}")]
    Invalid(LieReport),
    #[error("no defining representation and the algebra is not abelian")]
    NoRepresentation,
    #[error("characteristic coefficient {0} is not a unit multiple of a rational polynomial")]
    NotRationalizable(usize),
    #[error("not a Lie algebra homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// A single failed identity, with zero-based indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LieViolation {
    /// `c^a_{bc} ≠ −c^a_{cb}`
    Antisymmetry { a: usize, b: usize, c: usize },
    /// the Jacobi sum for `(a, b, c)` has a nonzero `e`-component
    Jacobi { a: usize, b: usize, c: usize, e: usize },
    /// `ρ([ξ_b, ξ_c]) ≠ [ρ(ξ_b), ρ(ξ_c)]`
    Representation { b: usize, c: usize },
}

impl fmt::Display for LieViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LieViolation::Antisymmetry { a, b, c } => {
                write!(f, "antisymmetry at ({},{},{})", a + 1, b + 1, c + 1)
            }
            LieViolation::Jacobi { a, b, c, e } => {
                write!(f, "jacobi at ({},{},{}) component {}", a + 1, b + 1, c + 1, e + 1)
            }
            LieViolation::Representation { b, c } => {
                write!(f, "representation bracket at ({},{})", b + 1, c + 1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LieReport {
    pub violations: Vec<LieViolation>,
}

impl LieReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for LieReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// A finite-dimensional Lie algebra. `structure[a][b][c] = c^a_{bc}`, so
/// `[ξ_b, ξ_c] = Σ_a c^a_{bc} ξ_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    pub name: String,
    pub basis_names: Vec<String>,
    structure: Vec<Vec<Vec<Q>>>,
    pub defining_rep: Option<Vec<ComplexMatrix>>,
}

impl LieAlgebra {
    /// Unchecked construction; call [`validate_lie`] before use.
    pub fn new(name: &str, basis_names: Vec<String>, structure: Vec<Vec<Vec<Q>>>) -> Self {
        Self { name: name.to_string(), basis_names, structure, defining_rep: None }
    }

    pub fn with_rep(mut self, rep: Vec<ComplexMatrix>) -> Self {
        self.defining_rep = Some(rep);
        self
    }

    /// From a sparse list `(a, b, c, value)` meaning `c^a_{bc} = value`;
    /// the antisymmetric partner is filled in.
    pub fn from_brackets(name: &str, basis_names: Vec<String>, brackets: &[(usize, usize, usize, Q)]) -> Self {
        let n = basis_names.len();
        let mut s = vec![vec![vec![Q::zero(); n]; n]; n];
        for (a, b, c, v) in brackets {
            s[*a][*b][*c] = v.clone();
            s[*a][*c][*b] = -v.clone();
        }
        Self::new(name, basis_names, s)
    }

    pub fn abelian(name: &str, n: usize) -> Self {
        let names = (1..=n).map(|i| format!("ξ{i}")).collect();
        Self::new(name, names, vec![vec![vec![Q::zero(); n]; n]; n])
    }

    pub fn u1() -> Self {
        Self::abelian("u1", 1)
    }

    pub fn r2() -> Self {
        Self::abelian("r2", 2)
    }

    /// su(2) with `[ξ_a, ξ_b] = ε_{abc} ξ_c` and `ρ(ξ_a) = −(i/2)σ_a`.
    pub fn su2() -> Self {
        let mut br = Vec::new();
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            br.push((c, a, b, qi(1)));
        }
        let names = (1..=3).map(|i| format!("ξ{i}")).collect();
        Self::from_brackets("su2", names, &br).with_rep(su2_rep())
    }

    /// u(2) = su(2) ⊕ u(1), the last basis vector acting by `−(i/2)·I`.
    pub fn u2() -> Self {
        let mut br = Vec::new();
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            br.push((c, a, b, qi(1)));
        }
        let names = (1..=4).map(|i| format!("ξ{i}")).collect();
        let mut rep = su2_rep();
        let h = GaussianRational::new(Q::zero(), q(-1, 2));
        rep.push(vec![vec![h.clone(), GaussianRational::zero()], vec![GaussianRational::zero(), h]]);
        Self::from_brackets("u2", names, &br).with_rep(rep)
    }

    /// The Heisenberg algebra `[ξ1, ξ2] = ξ3`, represented by strictly
    /// upper triangular 3×3 matrices.
    pub fn heisenberg3() -> Self {
        let names = (1..=3).map(|i| format!("ξ{i}")).collect();
        let unit = |i: usize, j: usize| {
            let mut m = vec![vec![GaussianRational::zero(); 3]; 3];
            m[i][j] = GaussianRational::one();
            m
        };
        Self::from_brackets("heisenberg3", names, &[(2, 0, 1, qi(1))])
            .with_rep(vec![unit(0, 1), unit(1, 2), unit(0, 2)])
    }

    /// Direct sum `self ⊕ other`; basis of `other` follows that of `self`.
    pub fn direct_sum(&self, other: &LieAlgebra) -> LieAlgebra {
        let (n, m) = (self.dim(), other.dim());
        let t = n + m;
        let mut s = vec![vec![vec![Q::zero(); t]; t]; t];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    s[a][b][c] = self.structure[a][b][c].clone();
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    s[n + a][n + b][n + c] = other.structure[a][b][c].clone();
                }
            }
        }
        let mut names = self.basis_names.clone();
        names.extend(other.basis_names.iter().cloned());
        LieAlgebra::new(&format!("{}+{}", self.name, other.name), names, s)
    }

    pub fn dim(&self) -> usize {
        self.basis_names.len()
    }

    /// The structure constants restricted to basis vectors
    /// `offset..offset + len`. Meaningful when that block is a subalgebra.
    pub fn block(&self, name: &str, offset: usize, len: usize) -> LieAlgebra {
        let s = (0..len)
            .map(|a| {
                (0..len)
                    .map(|b| (0..len).map(|c| self.structure[offset + a][offset + b][offset + c].clone()).collect())
                    .collect()
            })
            .collect();
        LieAlgebra::new(name, self.basis_names[offset..offset + len].to_vec(), s)
    }

    /// `c^a_{bc}`
    pub fn c(&self, a: usize, b: usize, c: usize) -> &Q {
        &self.structure[a][b][c]
    }

    pub fn structure(&self) -> &Vec<Vec<Vec<Q>>> {
        &self.structure
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().flatten().flatten().all(Zero::is_zero)
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let n = self.dim();
        let mut out = vec![Q::zero(); n];
        for b in 0..n {
            if x[b].is_zero() {
                continue;
            }
            for c in 0..n {
                if y[c].is_zero() {
                    continue;
                }
                let xy = &x[b] * &y[c];
                for (a, o) in out.iter_mut().enumerate() {
                    let s = &self.structure[a][b][c];
                    if !s.is_zero() {
                        *o += s * &xy;
                    }
                }
            }
        }
        out
    }

    pub fn basis_vector(&self, a: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim()];
        v[a] = Q::one();
        v
    }
}

fn su2_rep() -> Vec<ComplexMatrix> {
    let z = GaussianRational::zero;
    let half = |re: i64, im: i64| GaussianRational::new(q(re, 2), q(im, 2));
    // −(i/2)σ_1, −(i/2)σ_2, −(i/2)σ_3
    vec![
        vec![vec![z(), half(0, -1)], vec![half(0, -1), z()]],
        vec![vec![z(), half(-1, 0)], vec![half(1, 0), z()]],
        vec![vec![half(0, -1), z()], vec![z(), half(0, 1)]],
    ]
}

/// Antisymmetry, Jacobi and (when present) representation compatibility.
pub fn validate_lie(g: &LieAlgebra) -> LieReport {
    let n = g.dim();
    let mut report = LieReport::default();
    for a in 0..n {
        for b in 0..n {
            for c in b..n {
                if (g.c(a, b, c) + g.c(a, c, b)).is_zero() {
                    continue;
                }
                report.violations.push(LieViolation::Antisymmetry { a, b, c });
            }
        }
    }
    // Σ_d (c^e_{ad} c^d_{bc} + c^e_{bd} c^d_{ca} + c^e_{cd} c^d_{ab}) = 0
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for e in 0..n {
                    let mut s = Q::zero();
                    for d in 0..n {
                        s += g.c(e, a, d) * g.c(d, b, c);
                        s += g.c(e, b, d) * g.c(d, c, a);
                        s += g.c(e, c, d) * g.c(d, a, b);
                    }
                    if !s.is_zero() {
                        report.violations.push(LieViolation::Jacobi { a, b, c, e });
                    }
                }
            }
        }
    }
    if let Some(rep) = &g.defining_rep {
        for b in 0..n {
            for c in 0..n {
                let lhs = rep_of(rep, &g.bracket(&g.basis_vector(b), &g.basis_vector(c)));
                let bc = cmat_mul(&rep[b], &rep[c]);
                let cb = cmat_mul(&rep[c], &rep[b]);
                let rhs: ComplexMatrix = bc
                    .into_iter()
                    .zip(cb)
                    .map(|(r1, r2)| r1.into_iter().zip(r2).map(|(x, y)| x - y).collect())
                    .collect();
                if lhs != rhs {
                    report.violations.push(LieViolation::Representation { b, c });
                }
            }
        }
    }
    report
}

fn rep_of(rep: &[ComplexMatrix], x: &[Q]) -> ComplexMatrix {
    let m = rep.first().map_or(0, Vec::len);
    let mut out = vec![vec![GaussianRational::zero(); m]; m];
    for (xa, ra) in x.iter().zip(rep) {
        if xa.is_zero() {
            continue;
        }
        let s = GaussianRational::real(xa.clone());
        for i in 0..m {
            for j in 0..m {
                out[i][j] = out[i][j].clone() + &s * &ra[i][j];
            }
        }
    }
    out
}

/// Matrices of `L_{ξ_a}` on 𝔤* in the dual basis: entry `[b][e]` is the
/// coefficient of `ξ^b` in `L_{ξ_a} ξ^e = −Σ_b c^e_{ab} ξ^b`.
pub fn coadjoint_matrices(g: &LieAlgebra) -> Vec<RationalMatrix> {
    let n = g.dim();
    (0..n)
        .map(|a| {
            let mut m = RationalMatrix::zeros(n, n);
            for b in 0..n {
                for e in 0..n {
                    m.set(b, e, -g.c(e, a, b).clone());
                }
            }
            m
        })
        .collect()
}

/// A unit of ℚ(i) factored out of a polynomial so that the remaining
/// coefficients are rational. Signs are folded into the coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    One,
    I,
}

impl Phase {
    fn times(self, other: Phase) -> (Phase, bool) {
        match (self, other) {
            (Phase::One, p) | (p, Phase::One) => (p, false),
            (Phase::I, Phase::I) => (Phase::One, true),
        }
    }
}

/// Exponent vector over the basis of 𝔤* mapped to a rational coefficient.
pub type PolyTerms = BTreeMap<Vec<u32>, Q>;

/// An element of `S^k 𝔤*`, stored as a homogeneous polynomial in the
/// coordinates `x_a = ξ^a`. The true value is `phase · (polynomial)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantPolynomial {
    pub name: String,
    pub degree: usize,
    pub phase: Phase,
    terms: PolyTerms,
}

impl InvariantPolynomial {
    /// Rejects inhomogeneous term lists and drops zero coefficients.
    pub fn new(name: &str, dim: usize, degree: usize, phase: Phase, terms: PolyTerms) -> Result<Self, LieError> {
        let mut clean = PolyTerms::new();
        for (e, c) in terms {
            if e.len() != dim || e.iter().sum::<u32>() as usize != degree {
                return Err(LieError::Shape(format!("term {e:?} is not homogeneous of degree {degree}")));
            }
            if !c.is_zero() {
                clean.insert(e, c);
            }
        }
        Ok(Self { name: name.to_string(), degree, phase, terms: clean })
    }

    pub fn terms(&self) -> &PolyTerms {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.terms.keys().next().map_or(0, Vec::len)
    }

    /// `ω(X, …, X)` without the phase factor.
    pub fn evaluate(&self, x: &[Q]) -> Q {
        let mut s = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t *= xi;
                }
            }
            s += t;
        }
        s
    }

    /// Fully polarized value `ω(ξ_{i_1}, …, ξ_{i_k})` (without phase):
    /// `c_α · α! / k!` for the multi-index `α` counted from the indices.
    pub fn polarized(&self, indices: &[usize], dim: usize) -> Q {
        if indices.len() != self.degree {
            return Q::zero();
        }
        let mut alpha = vec![0u32; dim];
        for &i in indices {
            alpha[i] += 1;
        }
        let Some(c) = self.terms.get(&alpha) else {
            return Q::zero();
        };
        let mut num = Q::one();
        for &a in &alpha {
            num *= factorial(a as usize);
        }
        c * num / factorial(self.degree)
    }

    pub fn product(&self, other: &InvariantPolynomial) -> InvariantPolynomial {
        let (phase, negate) = self.phase.times(other.phase);
        let mut terms = PolyTerms::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let v = terms.entry(e).or_insert_with(Q::zero);
                *v += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        if negate {
            for c in terms.values_mut() {
                *c = -c.clone();
            }
        }
        let name = if self.name == other.name {
            format!("{}^2", self.name)
        } else {
            format!("{}*{}", self.name, other.name)
        };
        InvariantPolynomial { name, degree: self.degree + other.degree, phase, terms }
    }

    /// `(L_{ξ_a} ω)(x) = −Σ_{b,e} c^e_{ab} x_b ∂ω/∂x_e`.
    pub fn coadjoint_derivative(&self, g: &LieAlgebra, a: usize) -> PolyTerms {
        let n = g.dim();
        let mut out = PolyTerms::new();
        for (exp, coef) in &self.terms {
            for e in 0..n {
                if exp[e] == 0 {
                    continue;
                }
                for b in 0..n {
                    let c = g.c(e, a, b);
                    if c.is_zero() {
                        continue;
                    }
                    let mut m = exp.clone();
                    m[e] -= 1;
                    m[b] += 1;
                    let v = out.entry(m).or_insert_with(Q::zero);
                    *v -= c * coef * qi(exp[e] as i64);
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    pub fn is_invariant(&self, g: &LieAlgebra) -> bool {
        (0..g.dim()).all(|a| self.coadjoint_derivative(g, a).is_empty())
    }
}

impl fmt::Display for InvariantPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut s = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| if k == 1 { format!("x{}", j + 1) } else { format!("x{}^{}", j + 1, k) })
                .collect();
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if mono.is_empty() {
                s.push_str(&fmt_q(&abs));
            } else {
                if !abs.is_one() {
                    s.push_str(&fmt_q(&abs));
                    s.push('·');
                }
                s.push_str(&mono.join("·"));
            }
        }
        match self.phase {
            Phase::One => write!(f, "{s}"),
            Phase::I => write!(f, "i·({s})"),
        }
    }
}

fn factorial(n: usize) -> Q {
    (1..=n).fold(Q::one(), |acc, k| acc * qi(k as i64))
}

type GPoly = BTreeMap<Vec<u32>, GaussianRational>;

fn gpoly_mul(a: &GPoly, b: &GPoly) -> GPoly {
    let mut out = GPoly::new();
    for (e1, c1) in a {
        for (e2, c2) in b {
            let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
            let v = out.entry(e).or_insert_with(GaussianRational::zero);
            *v = v.clone() + c1 * c2;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn gpoly_add_into(acc: &mut GPoly, p: &GPoly, negate: bool) {
    for (e, c) in p {
        let v = acc.entry(e.clone()).or_insert_with(GaussianRational::zero);
        *v = if negate { v.clone() - c.clone() } else { v.clone() + c.clone() };
    }
    acc.retain(|_, c| !c.is_zero());
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, odd: bool, out: &mut Vec<(Vec<usize>, bool)>) {
        let n = used.len();
        if prefix.len() == n {
            out.push((prefix.clone(), odd));
            return;
        }
        for i in 0..n {
            if used[i] {
                continue;
            }
            // inversions contributed by placing i after the current prefix
            let inv = prefix.iter().filter(|&&p| p > i).count();
            used[i] = true;
            prefix.push(i);
            go(prefix, used, odd ^ (inv % 2 == 1), out);
            prefix.pop();
            used[i] = false;
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], false, &mut out);
    out
}

/// `det(λ·I − ρ(X))` as a polynomial in `x_1 … x_n, λ` (λ is the last
/// variable).
fn characteristic_polynomial(g: &LieAlgebra, rep: &[ComplexMatrix]) -> GPoly {
    let n = g.dim();
    let m = rep.first().map_or(0, Vec::len);
    let nv = n + 1;
    let mut entries: Vec<Vec<GPoly>> = vec![vec![GPoly::new(); m]; m];
    for (i, row) in entries.iter_mut().enumerate() {
        for (j, p) in row.iter_mut().enumerate() {
            if i == j {
                let mut e = vec![0; nv];
                e[n] = 1;
                p.insert(e, GaussianRational::one());
            }
            for (a, ra) in rep.iter().enumerate() {
                if ra[i][j].is_zero() {
                    continue;
                }
                let mut e = vec![0; nv];
                e[a] = 1;
                p.insert(e, -ra[i][j].clone());
            }
        }
    }
    let mut det = GPoly::new();
    for (perm, odd) in permutations(m) {
        let mut term: GPoly = [(vec![0; nv], GaussianRational::one())].into_iter().collect();
        for (i, &j) in perm.iter().enumerate() {
            term = gpoly_mul(&term, &entries[i][j]);
            if term.is_empty() {
                break;
            }
        }
        gpoly_add_into(&mut det, &term, odd);
    }
    det
}

/// The coefficient σ_k of `λ^{m−k}` in `det(λ·I − ρ(X))`, with its
/// phase factored out.
pub fn characteristic_coefficient(g: &LieAlgebra, k: usize) -> Result<InvariantPolynomial, LieError> {
    let rep = g.defining_rep.as_ref().ok_or(LieError::NoRepresentation)?;
    let m = rep.first().map_or(0, Vec::len);
    if k > m {
        return InvariantPolynomial::new(&format!("sigma{k}"), g.dim(), k, Phase::One, PolyTerms::new());
    }
    let n = g.dim();
    let det = characteristic_polynomial(g, rep);
    let mut coeffs: BTreeMap<Vec<u32>, GaussianRational> = BTreeMap::new();
    for (e, c) in det {
        if e[n] as usize == m - k {
            coeffs.insert(e[..n].to_vec(), c);
        }
    }
    let all_real = coeffs.values().all(|c| c.im.is_zero());
    let all_imag = coeffs.values().all(|c| c.re.is_zero());
    let (phase, terms): (Phase, PolyTerms) = if all_real {
        (Phase::One, coeffs.into_iter().map(|(e, c)| (e, c.re)).collect())
    } else if all_imag {
        (Phase::I, coeffs.into_iter().map(|(e, c)| (e, c.im)).collect())
    } else {
        return Err(LieError::NotRationalizable(k));
    };
    InvariantPolynomial::new(&format!("sigma{k}"), n, k, phase, terms)
}

/// Generators used as Chern–Weil inputs: every monomial of `S^k` for an
/// abelian algebra without representation, otherwise the nonzero
/// characteristic coefficients σ_1 … σ_{max_k}.
pub fn invariant_generators(g: &LieAlgebra, max_k: usize) -> Result<Vec<InvariantPolynomial>, LieError> {
    let n = g.dim();
    if g.defining_rep.is_none() {
        if !g.is_abelian() {
            return Err(LieError::NoRepresentation);
        }
        let mut out = Vec::new();
        for k in 1..=max_k {
            for e in exponent_vectors(n, k as u32) {
                let name = monomial_name(&e, n);
                let terms = [(e, Q::one())].into_iter().collect();
                out.push(InvariantPolynomial::new(&name, n, k, Phase::One, terms)?);
            }
        }
        return Ok(out);
    }
    let mut out = Vec::new();
    for k in 1..=max_k {
        let p = characteristic_coefficient(g, k)?;
        if !p.is_zero() {
            out.push(p);
        }
    }
    Ok(out)
}

fn monomial_name(e: &[u32], n: usize) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| {
            let base = if n == 1 { "u".to_string() } else { format!("u{}", i + 1) };
            if k == 1 { base } else { format!("{base}^{k}") }
        })
        .collect();
    parts.join("·")
}

/// All exponent vectors of length `n` summing to `k`, in lexicographic
/// order with larger leading exponents first.
pub fn exponent_vectors(n: usize, k: u32) -> Vec<Vec<u32>> {
    fn go(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let n = cur.len();
        if i == n - 1 {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for v in (0..=left).rev() {
            cur[i] = v;
            go(i + 1, left - v, cur, out);
        }
    }
    if n == 0 {
        return if k == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    go(0, k, &mut vec![0; n], &mut out);
    out
}

/// A linear map `φ: 𝔤₁ → 𝔤₂` given by `phi[b][a]`, the `ξ₂_b` coefficient
/// of `φ(ξ₁_a)`. Checks `φ([x, y]) = [φx, φy]` on basis pairs.
pub fn check_homomorphism(g1: &LieAlgebra, g2: &LieAlgebra, phi: &[Vec<Q>]) -> Result<(), LieError> {
    if phi.len() != g2.dim() || phi.iter().any(|r| r.len() != g1.dim()) {
        return Err(LieError::NotAHomomorphism(format!(
            "matrix must be {}×{}",
            g2.dim(),
            g1.dim()
        )));
    }
    let image = |v: &[Q]| -> Vec<Q> {
        phi.iter()
            .map(|row| row.iter().zip(v).fold(Q::zero(), |s, (p, x)| s + p * x))
            .collect()
    };
    for a in 0..g1.dim() {
        for b in 0..g1.dim() {
            let lhs = image(&g1.bracket(&g1.basis_vector(a), &g1.basis_vector(b)));
            let rhs = g2.bracket(&image(&g1.basis_vector(a)), &image(&g1.basis_vector(b)));
            if lhs != rhs {
                return Err(LieError::NotAHomomorphism(format!(
                    "bracket of basis vectors {} and {} is not preserved",
                    a + 1,
                    b + 1
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_valid() {
        for g in [
            LieAlgebra::u1(),
            LieAlgebra::r2(),
            LieAlgebra::su2(),
            LieAlgebra::u2(),
            LieAlgebra::heisenberg3(),
        ] {
            assert!(validate_lie(&g).is_ok(), "{}: {}", g.name, validate_lie(&g));
        }
    }

    #[test]
    fn broken_antisymmetry_is_reported() {
        let mut s = vec![vec![vec![Q::zero(); 3]; 3]; 3];
        s[0][1][2] = qi(1);
        s[0][2][1] = qi(1);
        let g = LieAlgebra::new("bad", vec!["a".into(), "b".into(), "c".into()], s);
        let report = validate_lie(&g);
        assert!(report.violations.contains(&LieViolation::Antisymmetry { a: 0, b: 1, c: 2 }));
        assert!(report.to_string().contains("antisymmetry at (1,2,3)"));
    }

    #[test]
    fn coadjoint_su2_first_basis_vector() {
        let m = &coadjoint_matrices(&LieAlgebra::su2())[0];
        // ξ^2 ↦ ξ^3 and ξ^3 ↦ −ξ^2
        assert_eq!(m.get(2, 1), qi(1));
        assert_eq!(m.get(1, 2), qi(-1));
        assert_eq!(m.nonzero_entries().count(), 2);
    }

    #[test]
    fn coadjoint_heisenberg_center_acts_trivially() {
        assert!(coadjoint_matrices(&LieAlgebra::heisenberg3())[2].is_zero());
        assert!(coadjoint_matrices(&LieAlgebra::r2()).iter().all(RationalMatrix::is_zero));
    }

    #[test]
    fn coadjoint_is_a_representation() {
        for g in [LieAlgebra::su2(), LieAlgebra::u2(), LieAlgebra::heisenberg3()] {
            let ms = coadjoint_matrices(&g);
            let n = g.dim();
            for a in 0..n {
                for b in 0..n {
                    let ab = ms[a].mul(&ms[b]);
                    let ba = ms[b].mul(&ms[a]);
                    let mut expect = RationalMatrix::zeros(n, n);
                    let mut lhs = RationalMatrix::zeros(n, n);
                    for i in 0..n {
                        for j in 0..n {
                            lhs.set(i, j, ab.get(i, j) - ba.get(i, j));
                            let mut s = Q::zero();
                            for e in 0..n {
                                s += g.c(e, a, b) * ms[e].get(i, j);
                            }
                            expect.set(i, j, s);
                        }
                    }
                    assert_eq!(lhs, expect, "{} ({a},{b})", g.name);
                }
            }
        }
    }

    #[test]
    fn u1_generators() {
        let gens = invariant_generators(&LieAlgebra::u1(), 2).unwrap();
        assert_eq!(gens.len(), 2);
        assert_eq!(gens[0].evaluate(&[qi(1)]), qi(1));
        assert_eq!(gens[1].name, "u^2");
    }

    #[test]
    fn su2_sigma2_is_quarter_norm() {
        let gens = invariant_generators(&LieAlgebra::su2(), 2).unwrap();
        assert_eq!(gens.len(), 1);
        let s2 = &gens[0];
        assert_eq!(s2.phase, Phase::One);
        assert_eq!(s2.evaluate(&[qi(1), qi(2), qi(3)]), q(14, 4));
        assert!(s2.is_invariant(&LieAlgebra::su2()));
        assert_eq!(s2.polarized(&[0, 0], 3), q(1, 4));
        assert_eq!(s2.polarized(&[0, 1], 3), Q::zero());
    }

    #[test]
    fn u2_trace_and_determinant() {
        let g = LieAlgebra::u2();
        let gens = invariant_generators(&g, 2).unwrap();
        assert_eq!(gens.len(), 2);
        let s1 = &gens[0];
        assert_eq!(s1.phase, Phase::I);
        assert_eq!(s1.evaluate(&[qi(0), qi(0), qi(0), qi(1)]), qi(1));
        let s2 = &gens[1];
        // (x1²+x2²+x3²−x4²)/4
        assert_eq!(s2.evaluate(&[qi(1), qi(1), qi(1), qi(1)]), q(2, 4));
        assert!(gens.iter().all(|p| p.is_invariant(&g)));
        let sq = s1.product(s1);
        assert_eq!(sq.phase, Phase::One);
        assert_eq!(sq.evaluate(&[qi(0), qi(0), qi(0), qi(2)]), qi(-4));
    }

    #[test]
    fn abelian_without_rep_needs_nothing_but_nonabelian_does() {
        let mut g = LieAlgebra::su2();
        g.defining_rep = None;
        assert_eq!(invariant_generators(&g, 2), Err(LieError::NoRepresentation));
    }

    #[test]
    fn noninvariant_polynomial_detected() {
        let g = LieAlgebra::su2();
        let terms = [(vec![2, 0, 0], qi(1))].into_iter().collect();
        let p = InvariantPolynomial::new("x1^2", 3, 2, Phase::One, terms).unwrap();
        assert!(!p.is_invariant(&g));
    }

    #[test]
    fn homomorphism_checks() {
        let u1 = LieAlgebra::u1();
        assert!(check_homomorphism(&u1, &u1, &[vec![qi(2)]]).is_ok());
        let su2 = LieAlgebra::su2();
        let id: Vec<Vec<Q>> = (0..3).map(|a| su2.basis_vector(a)).collect();
        assert!(check_homomorphism(&su2, &su2, &id).is_ok());
        let mut scaled = id.clone();
        scaled[0][0] = qi(2);
        assert!(check_homomorphism(&su2, &su2, &scaled).is_err());
    }

    #[test]
    fn exponent_vector_counts() {
        assert_eq!(exponent_vectors(3, 2).len(), 6);
        assert_eq!(exponent_vectors(1, 4), vec![vec![4]]);
    }
}
