//! Differential cochains `(c, h, ω)` on finite models of `EG ×_G M`,
//! with `Λ = ℤ ⊂ V = ℚ`.
//!
//! A [`GeometricModel`] pairs an integral cochain complex with a complex
//! of basic forms and an injective comparison map `j`. Degrees beyond the
//! stored skeleton are zero.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactlin::{
    cohomology_of_complex, fmt_q, integer_kernel, smith_normal_form, to_integral, to_q, FGAbelianGroup, IntMatrix,
    LinError, RationalMatrix, Ring, SmithDecomposition, Q,
};
use crate::gca::{basis_index, AlgebraMap, Derivation, Element, GcaError, Generator, GradedAlgebra, Monomial};
use crate::gstar::{basic_subcomplex, point_model, GStarAlgebra, GStarError};
use crate::liealg::LieAlgebra;

#[derive(Debug, Error)]
pub enum DiffCohError {
    #[error("model invariant violated: {0}")]
    ModelInvariantViolation(String),
    #[error("grading mismatch: {0}")]
    GradingMismatch(String),
    #[error("degree {degree} is outside the certified range 0..={max}")]
    OutOfRange { degree: usize, max: usize },
    #[error("not a cocycle: {0}")]
    NotACocycle(String),
    #[error("both curvatures are nonzero and the model records no homotopy B")]
    NeedsHomotopyData,
    #[error("the model has no cup product")]
    NoCupProduct,
    #[error("unknown built-in model `{0}`")]
    UnknownModel(String),
    #[error(transparent)]
    GStar(#[from] GStarError),
    #[error(transparent)]
    Gca(#[from] GcaError),
    #[error(transparent)]
    Lin(#[from] LinError),
}

impl From<crate::liealg::LieError> for DiffCohError {
    fn from(e: crate::liealg::LieError) -> Self {
        DiffCohError::GStar(e.into())
    }
}

/// Cochain homotopy `B` between `j(ω₁) ∪ j(ω₂)` and `j(ω₁ ∧ ω₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Homotopy {
    /// Left abstract: products with both curvatures nonzero are refused.
    Abstract,
    /// `j` is strictly multiplicative and `B = 0`.
    Zero,
}

/// Basic forms by degree, as explicit bases inside a G★-algebra.
#[derive(Clone, Debug)]
pub struct FormsComplex {
    pub gstar: GStarAlgebra,
    bases: Vec<Vec<Element>>,
    monomials: Vec<Vec<Monomial>>,
    d: Vec<RationalMatrix>,
}

impl FormsComplex {
    /// `bases[n]` must consist of basic elements of degree `n`, closed
    /// under `d`. Degrees past the end are zero.
    pub fn new(gstar: GStarAlgebra, bases: Vec<Vec<Element>>) -> Result<Self, DiffCohError> {
        let alg = gstar.carrier.clone();
        let mut monomials = Vec::new();
        for (n, basis) in bases.iter().enumerate() {
            for b in basis {
                if b.homogeneous_degree().map_or(!b.is_zero(), |k| k as usize != n) {
                    return Err(DiffCohError::ModelInvariantViolation(format!("form {b} is not of degree {n}")));
                }
                let horizontal = gstar.iota.iter().all(|i| i.apply(b).is_zero());
                let invariant = gstar.lie_derivative.iter().all(|l| l.apply(b).is_zero())
                    && gstar.finite_action.iter().all(|f| &f.apply(b) == b);
                if !horizontal || !invariant {
                    return Err(DiffCohError::ModelInvariantViolation(format!("form {b} is not basic")));
                }
            }
            monomials.push(alg.degree_basis(n as u32)?);
        }
        let mut out = Self { gstar, bases, monomials, d: Vec::new() };
        for n in 0..out.bases.len() {
            let mut m = RationalMatrix::zeros(out.dim(n + 1), out.dim(n));
            for (jx, b) in out.bases[n].iter().enumerate() {
                let db = out.gstar.d.apply(b);
                let coords = out.coordinates(n + 1, &db).ok_or_else(|| {
                    DiffCohError::ModelInvariantViolation(format!("d({b}) = {db} leaves the forms complex"))
                })?;
                for (i, x) in coords.into_iter().enumerate() {
                    m.set(i, jx, x);
                }
            }
            out.d.push(m);
        }
        Ok(out)
    }

    /// The basic subcomplex of `gstar` in degrees `0..=top`.
    pub fn basic(gstar: GStarAlgebra, top: usize) -> Result<Self, DiffCohError> {
        let bases = (0..=top).map(|n| basic_subcomplex(&gstar, n as u32)).collect::<Result<Vec<_>, _>>()?;
        Self::new(gstar, bases)
    }

    pub fn dim(&self, n: usize) -> usize {
        self.bases.get(n).map_or(0, Vec::len)
    }

    pub fn basis(&self, n: usize) -> &[Element] {
        self.bases.get(n).map_or(&[], |b| b.as_slice())
    }

    pub fn top(&self) -> usize {
        self.bases.len().saturating_sub(1)
    }

    /// `d_G` from degree `n` to `n + 1` in basis coordinates.
    pub fn d_matrix(&self, n: usize) -> RationalMatrix {
        self.d.get(n).cloned().unwrap_or_else(|| RationalMatrix::zeros(self.dim(n + 1), self.dim(n)))
    }

    /// Coordinates of a degree-`n` element, or `None` outside the span.
    pub fn coordinates(&self, n: usize, x: &Element) -> Option<Vec<Q>> {
        if x.is_zero() {
            return Some(vec![Q::zero(); self.dim(n)]);
        }
        if n >= self.bases.len() || x.homogeneous_degree() != Some(n as u32) {
            return None;
        }
        let index = basis_index(&self.monomials[n]);
        let columns: Vec<Vec<Q>> = self.bases[n].iter().map(|b| b.coordinates(&index).ok()).collect::<Option<_>>()?;
        let m = RationalMatrix::from_columns(self.monomials[n].len(), &columns);
        m.solve(&x.coordinates(&index).ok()?)
    }

    pub fn element(&self, n: usize, coords: &[Q]) -> Element {
        let mut out = Element::zero(&self.gstar.carrier);
        for (b, c) in self.basis(n).iter().zip(coords) {
            out.add_scaled(b, c);
        }
        out
    }
}

/// Integral cup product structure constants: `(k₁, i₁, k₂, i₂)` to a
/// vector in `C^{k₁+k₂}`. Missing entries are zero.
pub type CupTable = BTreeMap<(usize, usize, usize, usize), Vec<BigInt>>;

#[derive(Clone, Debug)]
pub struct GeometricModel {
    pub name: String,
    pub group: String,
    cells: Vec<Vec<String>>,
    delta: Vec<IntMatrix>,
    cup: Option<CupTable>,
    pub forms: FormsComplex,
    j: Vec<RationalMatrix>,
    pub homotopy: Homotopy,
    /// When set, the complex is exact in every degree, not a truncation.
    pub complete: bool,
    /// How `j` normalizes periods, e.g. `t ↦ α`.
    pub normalization: String,
}

/// Raw data for [`GeometricModel::new`].
#[derive(Clone, Debug)]
pub struct ModelData {
    pub name: String,
    pub group: String,
    /// Cell names per degree `0..=top`.
    pub cells: Vec<Vec<String>>,
    /// `delta[k]: C^k → C^{k+1}` as a `rank(k+1) × rank(k)` matrix.
    pub delta: Vec<IntMatrix>,
    pub cup: Option<CupTable>,
    pub forms: FormsComplex,
    /// `j[n]`: forms of degree `n` to `C^n ⊗ ℚ`.
    pub j: Vec<RationalMatrix>,
    pub homotopy: Homotopy,
    pub complete: bool,
    pub normalization: String,
}

impl GeometricModel {
    /// Validates `δ² = 0`, shapes, injectivity of `j`, `j d_G = δ j`, and
    /// strict multiplicativity of `j` when `B = 0`.
    pub fn new(data: ModelData) -> Result<Self, DiffCohError> {
        let ModelData { name, group, cells, delta, cup, forms, j, homotopy, complete, normalization } = data;
        let bad = |s: String| Err(DiffCohError::ModelInvariantViolation(s));
        if cells.is_empty() {
            return bad("the complex has no cells".into());
        }
        let top = cells.len() - 1;
        let model = Self { name, group, cells, delta, cup, forms, j, homotopy, complete, normalization };
        if model.delta.len() > top {
            return bad(format!("{} differentials for a complex of top degree {top}", model.delta.len()));
        }
        for (k, m) in model.delta.iter().enumerate() {
            if m.rows() != model.rank(k + 1) || m.cols() != model.rank(k) {
                return bad(format!("δ^{k} has shape {}×{}, expected {}×{}", m.rows(), m.cols(), model.rank(k + 1), model.rank(k)));
            }
        }
        for k in 0..top {
            if !model.delta(k + 1).mul(&model.delta(k)).is_zero() {
                return bad(format!("δ^{} ∘ δ^{k} ≠ 0", k + 1));
            }
        }
        if model.j.len() > top + 1 {
            return bad("comparison map given past the top degree".into());
        }
        for n in 0..=top {
            let jn = model.j_matrix(n);
            if jn.rows() != model.rank(n) || jn.cols() != model.forms.dim(n) {
                return bad(format!("j^{n} has shape {}×{}, expected {}×{}", jn.rows(), jn.cols(), model.rank(n), model.forms.dim(n)));
            }
            if jn.rank() != model.forms.dim(n) {
                return bad(format!("j is not injective in degree {n}"));
            }
            let lhs = model.j_matrix(n + 1).mul(&model.forms.d_matrix(n));
            let rhs = model.delta(n).to_rational().mul(&jn);
            if n < top && lhs != rhs {
                return bad(format!("j ∘ d_G ≠ δ ∘ j in degree {n}"));
            }
        }
        if model.complete && model.forms.dim(top + 1) != 0 {
            return bad("a complete model cannot have forms past its top degree".into());
        }
        if let Some(cup) = &model.cup {
            for ((k1, i1, k2, i2), v) in cup {
                if *i1 >= model.rank(*k1) || *i2 >= model.rank(*k2) || v.len() != model.rank(k1 + k2) {
                    return bad(format!("cup entry ({k1},{i1},{k2},{i2}) has the wrong shape"));
                }
            }
            if model.homotopy == Homotopy::Zero {
                model.check_multiplicative()?;
            }
        }
        Ok(model)
    }

    fn check_multiplicative(&self) -> Result<(), DiffCohError> {
        let top = self.top();
        for k1 in 0..=top {
            for k2 in 0..=top - k1 {
                for (a, fa) in self.forms.basis(k1).iter().enumerate() {
                    for (b, fb) in self.forms.basis(k2).iter().enumerate() {
                        let ea = unit_vec(self.forms.dim(k1), a);
                        let eb = unit_vec(self.forms.dim(k2), b);
                        let lhs = self.cup_q(k1, &self.j_matrix(k1).mul_vec(&ea), k2, &self.j_matrix(k2).mul_vec(&eb))?;
                        let prod = fa.checked_mul(fb)?;
                        let coords = self.forms.coordinates(k1 + k2, &prod).ok_or_else(|| {
                            DiffCohError::ModelInvariantViolation(format!("{fa} ∧ {fb} leaves the forms complex"))
                        })?;
                        if lhs != self.j_matrix(k1 + k2).mul_vec(&coords) {
                            return Err(DiffCohError::ModelInvariantViolation(format!(
                                "j is not multiplicative on {fa} and {fb}, so B = 0 is not a homotopy"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn top(&self) -> usize {
        self.cells.len() - 1
    }

    /// Largest degree `n` for which `Ȟ^n` of the model is certified.
    pub fn certified_max(&self) -> usize {
        if self.complete {
            usize::MAX
        } else {
            self.top().saturating_sub(1)
        }
    }

    pub fn rank(&self, k: usize) -> usize {
        self.cells.get(k).map_or(0, Vec::len)
    }

    pub fn cell_names(&self, k: usize) -> &[String] {
        self.cells.get(k).map_or(&[], |c| c.as_slice())
    }

    pub fn has_cup(&self) -> bool {
        self.cup.is_some()
    }

    /// `δ^k: C^k → C^{k+1}`.
    pub fn delta(&self, k: usize) -> IntMatrix {
        self.delta.get(k).cloned().unwrap_or_else(|| IntMatrix::zeros(self.rank(k + 1), self.rank(k)))
    }

    /// `δ^{k−1}`, with `δ^{−1} = 0`.
    fn delta_into(&self, k: usize) -> IntMatrix {
        if k == 0 {
            IntMatrix::zeros(self.rank(0), 0)
        } else {
            self.delta(k - 1)
        }
    }

    pub fn j_matrix(&self, n: usize) -> RationalMatrix {
        self.j.get(n).cloned().unwrap_or_else(|| RationalMatrix::zeros(self.rank(n), self.forms.dim(n)))
    }

    /// `H^n(C*; ℤ)` by Smith normal form.
    pub fn integral_cohomology(&self, n: usize) -> Result<FGAbelianGroup, DiffCohError> {
        Ok(cohomology_of_complex(&self.delta_into(n), &self.delta(n), Ring::Integers)?)
    }

    fn cup_q(&self, k1: usize, a: &[Q], k2: usize, b: &[Q]) -> Result<Vec<Q>, DiffCohError> {
        let cup = self.cup.as_ref().ok_or(DiffCohError::NoCupProduct)?;
        let mut out = vec![Q::zero(); self.rank(k1 + k2)];
        for (i1, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (i2, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                if let Some(v) = cup.get(&(k1, i1, k2, i2)) {
                    for (o, c) in out.iter_mut().zip(v) {
                        *o += x * y * Q::from_integer(c.clone());
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn zero_cochain(&self, level: usize, degree: usize) -> DiffCochain {
        DiffCochain {
            level,
            degree,
            c: vec![BigInt::zero(); self.rank(degree)],
            h: vec![Q::zero(); if degree == 0 { 0 } else { self.rank(degree - 1) }],
            omega: vec![Q::zero(); self.forms.dim(degree)],
        }
    }

    /// Assemble a triple, checking lengths and that `ω = 0` below `level`.
    pub fn cochain(&self, level: usize, degree: usize, c: Vec<BigInt>, h: Vec<Q>, omega: Vec<Q>) -> Result<DiffCochain, DiffCohError> {
        let x = DiffCochain { level, degree, c, h, omega };
        self.check_shape(&x)?;
        Ok(x)
    }

    /// Same as [`GeometricModel::cochain`] with `ω` given as an element.
    pub fn cochain_with_form(&self, level: usize, degree: usize, c: Vec<BigInt>, h: Vec<Q>, omega: &Element) -> Result<DiffCochain, DiffCohError> {
        let coords = self.forms.coordinates(degree, omega).ok_or_else(|| {
            DiffCohError::GradingMismatch(format!("{omega} is not a basic form of degree {degree}"))
        })?;
        self.cochain(level, degree, c, h, coords)
    }

    fn check_shape(&self, x: &DiffCochain) -> Result<(), DiffCohError> {
        let hr = if x.degree == 0 { 0 } else { self.rank(x.degree - 1) };
        if x.c.len() != self.rank(x.degree) || x.h.len() != hr || x.omega.len() != self.forms.dim(x.degree) {
            return Err(DiffCohError::GradingMismatch(format!(
                "component lengths ({}, {}, {}) do not fit degree {}",
                x.c.len(),
                x.h.len(),
                x.omega.len(),
                x.degree
            )));
        }
        if x.degree < x.level && x.omega.iter().any(|w| !w.is_zero()) {
            return Err(DiffCohError::GradingMismatch(format!(
                "nonzero form in degree {} below level {}",
                x.degree, x.level
            )));
        }
        Ok(())
    }

    /// `d(c, h, ω) = (δc, j(ω) − c − δh, d_G ω)`.
    pub fn differential(&self, x: &DiffCochain) -> Result<DiffCochain, DiffCohError> {
        self.check_shape(x)?;
        let k = x.degree;
        let c = self.delta(k).mul_vec(&x.c);
        let mut h = self.j_matrix(k).mul_vec(&x.omega);
        let dh = if k == 0 { Vec::new() } else { self.delta(k - 1).mul_qvec(&x.h) };
        for (i, hi) in h.iter_mut().enumerate() {
            *hi -= Q::from_integer(x.c[i].clone());
            if let Some(v) = dh.get(i) {
                *hi -= v;
            }
        }
        let omega = if k + 1 >= x.level { self.forms.d_matrix(k).mul_vec(&x.omega) } else { vec![Q::zero(); self.forms.dim(k + 1)] };
        Ok(DiffCochain { level: x.level, degree: k + 1, c, h, omega })
    }

    pub fn is_cocycle(&self, x: &DiffCochain) -> Result<bool, DiffCohError> {
        Ok(self.differential(x)?.is_zero())
    }

    fn require_cocycle(&self, x: &DiffCochain) -> Result<(), DiffCohError> {
        if x.level != x.degree {
            return Err(DiffCohError::GradingMismatch(format!(
                "classes live in degree equal to the level, got degree {} at level {}",
                x.degree, x.level
            )));
        }
        if !self.is_cocycle(x)? {
            return Err(DiffCohError::NotACocycle(self.format(x)));
        }
        Ok(())
    }

    fn lattices(&self, n: usize) -> Lattices {
        let snf = smith_normal_form(&self.delta_into(n));
        let r = self.rank(n);
        let rho = snf.rank();
        let u_inv = snf.u.inverse_unimodular();
        let p = IntMatrix::from_rows(r - rho, r, (rho..r).map(|i| snf.u.row(i).to_vec()).collect());
        let rc = IntMatrix::from_columns(r, &(rho..r).map(|i| u_inv.column(i)).collect::<Vec<_>>());
        let kernel = IntMatrix::from_columns(r, &integer_kernel(&self.delta(n)));
        let m = p.mul(&kernel);
        Lattices { snf, u_inv, p, rc, kernel, m }
    }

    /// Canonical representative of the class of a cocycle `x`.
    pub fn normalize(&self, x: &DiffCochain) -> Result<DiffCochain, DiffCohError> {
        self.require_cocycle(x)?;
        let n = x.degree;
        let lat = self.lattices(n);
        let rho = lat.snf.rank();
        let mut z = lat.snf.u.mul_vec(&x.c);
        let mut shift = vec![BigInt::zero(); if n == 0 { 0 } else { self.rank(n - 1) }];
        for i in 0..rho {
            let d = lat.snf.d.get(i, i).clone();
            let (qt, rem) = z[i].div_mod_floor(&d);
            z[i] = rem;
            shift[i] = qt;
        }
        let c = lat.u_inv.mul_vec(&z);
        let mut h = x.h.clone();
        if n > 0 {
            let c_prime = lat.snf.v.mul_vec(&shift);
            for (hi, ci) in h.iter_mut().zip(&c_prime) {
                *hi += Q::from_integer(ci.clone());
            }
            let prev = self.lattices(n - 1);
            let y = prev.p.mul_qvec(&h);
            let (reduced, _) = reduce_mod_lattice(&y, &prev.m);
            h = prev.rc.mul_qvec(&reduced);
        }
        Ok(DiffCochain { level: x.level, degree: n, c, h, omega: x.omega.clone() })
    }

    pub fn is_coboundary(&self, x: &DiffCochain) -> Result<bool, DiffCohError> {
        Ok(self.normalize(x)?.is_zero())
    }

    /// Direct test: `ω = 0` and `h ∈ C^{n−1}(ℤ) + δ C^{n−2}(ℚ)`.
    pub fn is_coboundary_direct(&self, x: &DiffCochain) -> Result<bool, DiffCohError> {
        self.require_cocycle(x)?;
        if x.omega.iter().any(|w| !w.is_zero()) {
            return Ok(false);
        }
        if x.degree == 0 {
            return Ok(true);
        }
        let lat = self.lattices(x.degree - 1);
        Ok(lat.p.mul_qvec(&x.h).iter().all(|v| v.is_integer()))
    }

    /// Class of the characteristic cocycle in `H^n(C*; ℤ)`.
    pub fn cc(&self, x: &DiffCochain) -> Result<IntegralClass, DiffCohError> {
        self.require_cocycle(x)?;
        Ok(self.integral_class(x.degree, &x.c))
    }

    /// Class of an integral cocycle `c ∈ C^n`.
    pub fn integral_class(&self, n: usize, c: &[BigInt]) -> IntegralClass {
        let lat = self.lattices(n);
        let rho = lat.snf.rank();
        let mut z = lat.snf.u.mul_vec(c);
        let mut torsion = Vec::new();
        for (i, zi) in z.iter_mut().enumerate().take(rho) {
            let d = lat.snf.d.get(i, i).clone();
            *zi = zi.mod_floor(&d);
            if !d.is_one() {
                torsion.push((d.to_u64().expect("torsion order exceeds u64"), zi.clone()));
            }
        }
        let representative = lat.u_inv.mul_vec(&z);
        let basis = lattice_basis(&lat.m);
        let cols: Vec<Vec<Q>> = basis.iter().map(|(v, _)| to_q(v)).collect();
        let b = RationalMatrix::from_columns(lat.m.rows(), &cols);
        let free = b
            .solve(&to_q(&lat.p.mul_vec(c)))
            .and_then(|v| to_integral(&v))
            .unwrap_or_default();
        IntegralClass { degree: n, representative, free, torsion }
    }

    /// The curvature `ω` as an element.
    pub fn curv(&self, x: &DiffCochain) -> Result<Element, DiffCohError> {
        self.require_cocycle(x)?;
        Ok(self.forms.element(x.degree, &x.omega))
    }

    /// `(c₁ ∪ c₂, (−1)^{|c₁|} c₁ ∪ h₂ + h₁ ∪ j(ω₂) + B(ω₁, ω₂), ω₁ ∧ ω₂)`.
    pub fn product(&self, x1: &DiffCochain, x2: &DiffCochain) -> Result<DiffCochain, DiffCohError> {
        self.check_shape(x1)?;
        self.check_shape(x2)?;
        if self.cup.is_none() {
            return Err(DiffCohError::NoCupProduct);
        }
        let both = x1.omega.iter().any(|w| !w.is_zero()) && x2.omega.iter().any(|w| !w.is_zero());
        if both && self.homotopy == Homotopy::Abstract {
            return Err(DiffCohError::NeedsHomotopyData);
        }
        let (k1, k2) = (x1.degree, x2.degree);
        let k = k1 + k2;
        let mut out = self.zero_cochain(x1.level + x2.level, k);
        let cq = self.cup_q(k1, &to_q(&x1.c), k2, &to_q(&x2.c))?;
        out.c = cq.iter().map(|v| v.to_integer()).collect();
        if k > 0 {
            let mut h = vec![Q::zero(); self.rank(k - 1)];
            if k2 > 0 {
                let sign = if k1 % 2 == 0 { Q::one() } else { -Q::one() };
                for (o, v) in h.iter_mut().zip(self.cup_q(k1, &to_q(&x1.c), k2 - 1, &x2.h)?) {
                    *o += &sign * v;
                }
            }
            if k1 > 0 {
                let jw = self.j_matrix(k2).mul_vec(&x2.omega);
                for (o, v) in h.iter_mut().zip(self.cup_q(k1 - 1, &x1.h, k2, &jw)?) {
                    *o += v;
                }
            }
            out.h = h;
        }
        if k >= out.level {
            let w = self.forms.element(k1, &x1.omega).checked_mul(&self.forms.element(k2, &x2.omega))?;
            out.omega = self.forms.coordinates(k, &w).unwrap_or_else(|| vec![Q::zero(); self.forms.dim(k)]);
        }
        Ok(out)
    }

    /// The unit `(1, 0, 1)` in degree 0.
    pub fn unit(&self) -> Result<DiffCochain, DiffCohError> {
        let one = Element::one(&self.forms.gstar.carrier);
        let coords = self.forms.coordinates(0, &one).ok_or_else(|| DiffCohError::ModelInvariantViolation("1 is not a form".into()))?;
        let c = self.j_matrix(0).mul_vec(&coords);
        let c = to_integral(&c).ok_or_else(|| DiffCohError::ModelInvariantViolation("j(1) is not integral".into()))?;
        self.cochain(0, 0, c, Vec::new(), coords)
    }

    /// `a(η) = (0, j(η), d_G η)` for `η` of degree `n − 1`.
    pub fn from_form(&self, eta_degree: usize, eta: &[Q]) -> Result<DiffCochain, DiffCohError> {
        let n = eta_degree + 1;
        let h = self.j_matrix(eta_degree).mul_vec(eta);
        let omega = self.forms.d_matrix(eta_degree).mul_vec(eta);
        self.cochain(n, n, vec![BigInt::zero(); self.rank(n)], h, omega)
    }

    /// Whether a degree-`n` form is closed with integral periods.
    pub fn has_integral_periods(&self, n: usize, omega: &[Q]) -> bool {
        if self.forms.d_matrix(n).mul_vec(omega).iter().any(|x| !x.is_zero()) {
            return false;
        }
        let lat = self.lattices(n);
        let y = lat.p.mul_qvec(&self.j_matrix(n).mul_vec(omega));
        let (reduced, _) = reduce_mod_lattice(&y, &lat.m);
        reduced.iter().all(Zero::is_zero)
    }

    fn check_degree(&self, n: usize) -> Result<(), DiffCohError> {
        if n > self.certified_max() {
            return Err(DiffCohError::OutOfRange { degree: n, max: self.certified_max() });
        }
        Ok(())
    }

    /// `h` with `δh = target`, for `target ∈ C^n ⊗ ℚ`.
    fn primitive(&self, n: usize, target: &[Q]) -> Result<Vec<Q>, DiffCohError> {
        if n == 0 {
            if target.iter().all(Zero::is_zero) {
                return Ok(Vec::new());
            }
            return Err(DiffCohError::NotACocycle("no primitive in degree −1".into()));
        }
        self.delta(n - 1)
            .to_rational()
            .solve(target)
            .ok_or_else(|| DiffCohError::NotACocycle(format!("no rational primitive in degree {}", n - 1)))
    }

    /// Completes a closed `ω` and integral cocycle `c` with
    /// `[j(ω)] = [c]` over ℚ into a cocycle triple.
    fn complete_triple(&self, n: usize, c: Vec<BigInt>, omega: Vec<Q>) -> Result<DiffCochain, DiffCohError> {
        let mut target = self.j_matrix(n).mul_vec(&omega);
        for (t, ci) in target.iter_mut().zip(&c) {
            *t -= Q::from_integer(ci.clone());
        }
        let h = self.primitive(n, &target)?;
        self.cochain(n, n, c, h, omega)
    }

    /// Structure of `Ȟ^n` with explicit generating triples.
    pub fn diff_cohomology(&self, n: usize) -> Result<DiffCohomologyReport, DiffCohError> {
        self.check_degree(n)?;
        let lat = self.lattices(n);
        // Closed forms and their period classes.
        let closed = self.forms.d_matrix(n).kernel_basis();
        let zmat = RationalMatrix::from_columns(self.forms.dim(n), &closed);
        let a = lat.p.to_rational().mul(&self.j_matrix(n)).mul(&zmat);
        // Forms whose periods vanish.
        let mut exact_forms = Vec::new();
        for x in a.kernel_basis() {
            let omega = zmat.mul_vec(&x);
            exact_forms.push(self.complete_triple(n, vec![BigInt::zero(); self.rank(n)], omega)?);
        }
        // Lattice of integral period classes reached by closed forms.
        let mut lattice_generators = Vec::new();
        for (ell, y) in lattice_in_image(&lat.m, &a) {
            let x = a.solve(&to_q(&ell)).expect("lattice vector lies in the image");
            let omega = zmat.mul_vec(&x);
            let c = lat.kernel.mul_vec(&y);
            lattice_generators.push(self.complete_triple(n, c, omega)?);
        }
        let (flat_torsion, flat_divisible) = self.flat_generators(n)?;
        let integral = self.integral_cohomology(n)?;
        let qz_rank = flat_divisible.len();
        let torsion: Vec<u64> = flat_torsion.iter().map(|(d, _)| *d).collect();
        let q_rank = exact_forms.len();
        let total = GroupDescription::new(lattice_generators.len(), torsion.clone(), qz_rank, q_rank);
        let flat_part = GroupDescription::new(0, torsion, qz_rank, 0);
        let curvature_image = GroupDescription::new(lattice_generators.len(), Vec::new(), 0, q_rank);
        let integral_cohomology = GroupDescription::new(integral.free_rank, integral.torsion.clone(), 0, 0);
        let mut generators = Vec::new();
        for x in &lattice_generators {
            generators.push(GeneratorEntry { kind: "lattice".into(), order: None, triple: self.format(x) });
        }
        for (d, x) in &flat_torsion {
            generators.push(GeneratorEntry { kind: "flat-torsion".into(), order: Some(*d), triple: self.format(x) });
        }
        for x in &flat_divisible {
            generators.push(GeneratorEntry { kind: "flat-divisible".into(), order: None, triple: self.format_scaled(x, "r") });
        }
        for x in &exact_forms {
            generators.push(GeneratorEntry { kind: "exact-forms".into(), order: None, triple: self.format_scaled(x, "s") });
        }
        Ok(DiffCohomologyReport {
            model: self.name.clone(),
            degree: n,
            certified_max: if self.complete { None } else { Some(self.certified_max()) },
            total,
            flat_part,
            curvature_image,
            integral_cohomology,
            generators,
            lattice_generators,
            flat_torsion,
            flat_divisible,
            exact_forms,
        })
    }

    /// Flat generators in degree `n`: torsion triples `(−δh, h, 0)` with
    /// `h = v_i / d_i`, and divisible families `(0, r·z, 0)`.
    fn flat_generators(&self, n: usize) -> Result<FlatGenerators, DiffCohError> {
        let mut torsion = Vec::new();
        let mut divisible = Vec::new();
        if n == 0 {
            return Ok((torsion, divisible));
        }
        let lat = self.lattices(n);
        for (i, d) in lat.snf.invariant_factors().into_iter().enumerate() {
            if d.is_one() {
                continue;
            }
            let dq = Q::from_integer(d.clone());
            let h: Vec<Q> = lat.snf.v.column(i).into_iter().map(|v| Q::from_integer(v) / &dq).collect();
            let c: Vec<BigInt> = self.delta(n - 1).mul_qvec(&h).iter().map(|v| -v.to_integer()).collect();
            let order = d.to_u64().expect("torsion order exceeds u64");
            torsion.push((order, self.cochain(n, n, c, h, vec![Q::zero(); self.forms.dim(n)])?));
        }
        let prev = self.lattices(n - 1);
        for (_, y) in lattice_basis(&prev.m) {
            let z = prev.kernel.mul_vec(&y);
            divisible.push(self.cochain(n, n, vec![BigInt::zero(); self.rank(n)], to_q(&z), vec![Q::zero(); self.forms.dim(n)])?);
        }
        Ok((torsion, divisible))
    }

    /// Elementwise checks of both short exact sequences and the square.
    pub fn verify_ses(&self, n: usize) -> Result<SesReport, DiffCohError> {
        let report = self.diff_cohomology(n)?;
        let integral = self.integral_cohomology(n)?;
        let mut checks = Vec::new();
        let mut push = |name: &str, failures: Vec<String>| {
            checks.push(SesCheck { name: name.into(), passed: failures.is_empty(), counterexamples: failures });
        };
        let zero_form = vec![Q::zero(); self.forms.dim(n)];

        // SES1: curv onto forms with integral periods.
        let mut f = Vec::new();
        for x in report.lattice_generators.iter().chain(&report.exact_forms) {
            if !self.is_cocycle(x)? {
                f.push(format!("{} is not a cocycle", self.format(x)));
            } else if !self.has_integral_periods(n, &x.omega) {
                f.push(format!("curvature of {} lacks integral periods", self.format(x)));
            }
        }
        if report.total.rank != integral.free_rank {
            f.push(format!("curvature lattice rank {} but H^{n}(C;ℤ) has rank {}", report.total.rank, integral.free_rank));
        }
        let closed = self.forms.d_matrix(n).kernel_basis();
        let forms_reached = report.lattice_generators.len() + report.exact_forms.len();
        if forms_reached != closed.len() {
            f.push(format!("{forms_reached} curvature generators for {} closed forms", closed.len()));
        }
        push("SES1 curv onto integral-period forms", f);

        // SES1: kernel of curv is the flat subgroup.
        let mut f = Vec::new();
        for (d, x) in &report.flat_torsion {
            if !self.is_cocycle(x)? || x.omega != zero_form {
                f.push(format!("{} is not a flat cocycle", self.format(x)));
                continue;
            }
            if !self.is_coboundary(&x.scale(&Q::from_integer(BigInt::from(*d))))? {
                f.push(format!("{d}·{} is not a coboundary", self.format(x)));
            }
            for p in prime_factors(*d) {
                if self.is_coboundary(&x.scale(&Q::from_integer(BigInt::from(*d / p))))? {
                    f.push(format!("{}·{} is a coboundary", d / p, self.format(x)));
                }
            }
        }
        for x in &report.flat_divisible {
            for r in sample_scalars() {
                let y = x.scale(&r);
                let expect = r.is_integer();
                if !self.is_cocycle(&y)? || self.is_coboundary(&y)? != expect || self.is_coboundary_direct(&y)? != expect {
                    f.push(format!("{} with r = {} misclassified", self.format(x), fmt_q(&r)));
                }
            }
        }
        let torsion: Vec<u64> = report.flat_torsion.iter().map(|(d, _)| *d).collect();
        if torsion != integral.torsion {
            f.push(format!("flat torsion {torsion:?} but H^{n}(C;ℤ) torsion {:?}", integral.torsion));
        }
        let below = if n == 0 { 0 } else { self.integral_cohomology(n - 1)?.free_rank };
        if report.flat_divisible.len() != below {
            f.push(format!("{} divisible flat generators but b_{} = {below}", report.flat_divisible.len(), n as i64 - 1));
        }
        push("SES1 kernel of curv is flat", f);

        // SES2: cc onto H^n(C; ℤ).
        let mut f = Vec::new();
        let lat = self.lattices(n);
        let mut lifts = Vec::new();
        for (i, d) in lat.snf.invariant_factors().into_iter().enumerate() {
            if d.is_one() {
                continue;
            }
            let tau = lat.u_inv.column(i);
            let dq = Q::from_integer(d);
            let h: Vec<Q> = lat.snf.v.column(i).into_iter().map(|v| -Q::from_integer(v) / &dq).collect();
            lifts.push((tau.clone(), self.cochain(n, n, tau, h, zero_form.clone())?));
        }
        let closed_m = RationalMatrix::from_columns(self.forms.dim(n), &closed);
        let a = lat.p.to_rational().mul(&self.j_matrix(n)).mul(&closed_m);
        for (ell, y) in lattice_basis(&lat.m) {
            let z = lat.kernel.mul_vec(&y);
            match a.solve(&to_q(&ell)) {
                Some(x) => lifts.push((z.clone(), self.complete_triple(n, z, closed_m.mul_vec(&x))?)),
                None => f.push(format!("no closed form has the periods of {}", self.format_int(n, &z))),
            }
        }
        for (z, x) in &lifts {
            if !self.is_cocycle(x)? || self.cc(x)? != self.integral_class(n, z) {
                f.push(format!("cc({}) is not [{}]", self.format(x), self.format_int(n, z)));
            }
        }
        push("SES2 cc onto H^n(C;ℤ)", f);

        // SES2: kernel of cc is forms modulo integral-period forms.
        let mut f = Vec::new();
        if n > 0 {
            for i in 0..self.forms.dim(n - 1) {
                for s in [Q::one(), Q::new(1.into(), 2.into())] {
                    let mut eta = vec![Q::zero(); self.forms.dim(n - 1)];
                    eta[i] = s.clone();
                    let x = self.from_form(n - 1, &eta)?;
                    let label = format!("a({}·{})", fmt_q(&s), self.forms.basis(n - 1)[i]);
                    if !self.is_cocycle(&x)? {
                        f.push(format!("{label} is not a cocycle"));
                        continue;
                    }
                    if !self.cc(&x)?.is_zero() {
                        f.push(format!("cc({label}) ≠ 0"));
                    }
                    if self.is_coboundary(&x)? != self.has_integral_periods(n - 1, &eta) {
                        f.push(format!("{label}: coboundary test disagrees with integral periods"));
                    }
                }
            }
            let prev_closed = RationalMatrix::from_columns(self.forms.dim(n - 1), &self.forms.d_matrix(n - 1).kernel_basis());
            let prev = self.lattices(n - 1);
            let a_prev = prev.p.to_rational().mul(&self.j_matrix(n - 1)).mul(&prev_closed);
            for x in &report.flat_divisible {
                for r in [Q::new(1.into(), 2.into()), Q::new(2.into(), 3.into())] {
                    let y = x.scale(&r);
                    let hit = a_prev.solve(&prev.p.mul_qvec(&y.h)).map(|e| prev_closed.mul_vec(&e));
                    let ok = match hit {
                        Some(eta) => {
                            let diff = y.sub(&self.from_form(n - 1, &eta)?);
                            self.is_coboundary(&diff)?
                        }
                        None => false,
                    };
                    if !ok {
                        f.push(format!("{} is not of the form a(η)", self.format(&y)));
                    }
                }
            }
        }
        push("SES2 kernel of cc is forms mod integral periods", f);

        // Square: dR ∘ curv = cc ⊗ ℚ.
        let mut f = Vec::new();
        let all = report
            .lattice_generators
            .iter()
            .chain(&report.exact_forms)
            .chain(report.flat_torsion.iter().map(|(_, x)| x))
            .chain(&report.flat_divisible)
            .chain(lifts.iter().map(|(_, x)| x));
        for x in all {
            let mut v = self.j_matrix(n).mul_vec(&x.omega);
            for (vi, ci) in v.iter_mut().zip(&x.c) {
                *vi -= Q::from_integer(ci.clone());
            }
            if lat.p.mul_qvec(&v).iter().any(|e| !e.is_zero()) {
                f.push(format!("[j(ω)] ≠ [c] for {}", self.format(x)));
            }
        }
        push("square dR∘curv = cc⊗ℚ", f);

        let ok = checks.iter().all(|c| c.passed);
        Ok(SesReport { model: self.name.clone(), degree: n, checks, ok })
    }

    fn format_int(&self, k: usize, v: &[BigInt]) -> String {
        format_combination(self.cell_names(k), &to_q(v))
    }

    /// `(c, h, ω)` with cells and forms by name.
    pub fn format(&self, x: &DiffCochain) -> String {
        let h = if x.degree == 0 { "0".to_string() } else { format_combination(self.cell_names(x.degree - 1), &x.h) };
        format!("({}, {}, {})", self.format_int(x.degree, &x.c), h, self.forms.element(x.degree, &x.omega))
    }

    fn format_scaled(&self, x: &DiffCochain, r: &str) -> String {
        let h = if x.degree == 0 { "0".to_string() } else { format_combination(self.cell_names(x.degree - 1), &x.h) };
        let omega = self.forms.element(x.degree, &x.omega);
        let c = self.format_int(x.degree, &x.c);
        let scale = |s: String| if s == "0" { s } else if s.contains(' ') { format!("{r}·({s})") } else { format!("{r}·{s}") };
        format!("({}, {}, {})", scale(c), scale(h), scale(omega.to_string()))
    }
}

type FlatGenerators = (Vec<(u64, DiffCochain)>, Vec<DiffCochain>);

struct Lattices {
    /// Smith form of `δ^{n−1}`.
    snf: SmithDecomposition,
    u_inv: IntMatrix,
    /// Saturated annihilator of `im δ^{n−1}`.
    p: IntMatrix,
    /// Columns with `p · rc = 1`.
    rc: IntMatrix,
    /// Integer cocycles, as columns.
    kernel: IntMatrix,
    /// `p · kernel`: the free part of `H^n(C; ℤ)` in `p`-coordinates.
    m: IntMatrix,
}

/// A ℤ-basis of the column lattice of `m`, each vector with integer
/// coefficients `y` such that `m y` is the vector.
fn lattice_basis(m: &IntMatrix) -> Vec<(Vec<BigInt>, Vec<BigInt>)> {
    let snf = smith_normal_form(m);
    let mv = m.mul(&snf.v);
    (0..snf.rank()).map(|i| (mv.column(i), snf.v.column(i))).collect()
}

/// Basis of `colspan_ℤ(m) ∩ im_ℚ(a)` with coefficients over `m`.
fn lattice_in_image(m: &IntMatrix, a: &RationalMatrix) -> Vec<(Vec<BigInt>, Vec<BigInt>)> {
    let ann = a.transpose().kernel_basis();
    let rows: Vec<Vec<BigInt>> = ann.iter().map(|r| clear_denominators(r)).collect();
    let n = IntMatrix::from_rows(rows.len(), m.rows(), rows);
    let ys = integer_kernel(&n.mul(m));
    let ymat = IntMatrix::from_columns(m.cols(), &ys);
    let sub = m.mul(&ymat);
    lattice_basis(&sub).into_iter().map(|(v, w)| (v, ymat.mul_vec(&w))).collect()
}

fn clear_denominators(v: &[Q]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect()
}

/// Reduces `y` modulo the column lattice of `m` to a canonical
/// representative. Returns it with `t` such that `y − reduced = m t`.
fn reduce_mod_lattice(y: &[Q], m: &IntMatrix) -> (Vec<Q>, Vec<BigInt>) {
    let snf = smith_normal_form(m);
    let mut w = snf.u.mul_qvec(y);
    let mut k = vec![BigInt::zero(); m.cols()];
    for (i, ki) in k.iter_mut().enumerate().take(snf.rank()) {
        let d = Q::from_integer(snf.d.get(i, i).clone());
        let f = (&w[i] / &d).floor();
        w[i] -= &f * &d;
        *ki = f.to_integer();
    }
    (snf.u.inverse_unimodular().mul_qvec(&w), snf.v.mul_vec(&k))
}

fn unit_vec(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

fn prime_factors(mut d: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= d {
        if d.is_multiple_of(p) {
            out.push(p);
            while d.is_multiple_of(p) {
                d /= p;
            }
        }
        p += 1;
    }
    if d > 1 {
        out.push(d);
    }
    out
}

/// The scalars used to probe divisible flat families.
pub fn sample_scalars() -> Vec<Q> {
    [(0, 1), (1, 1), (-3, 1), (1, 2), (2, 3), (7, 5)].iter().map(|&(n, d)| Q::new(n.into(), d.into())).collect()
}

fn format_combination(names: &[String], coeffs: &[Q]) -> String {
    let mut out = String::new();
    for (name, c) in names.iter().zip(coeffs).filter(|(_, c)| !c.is_zero()) {
        let neg = c.is_negative();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let abs = c.abs();
        if name == "1" {
            out.push_str(&fmt_q(&abs));
        } else if abs.is_one() {
            out.push_str(name);
        } else {
            out.push_str(&format!("{}·{name}", fmt_q(&abs)));
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// A triple `(c, h, ω)` of degree `degree` in `CG(level)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffCochain {
    pub level: usize,
    pub degree: usize,
    pub c: Vec<BigInt>,
    pub h: Vec<Q>,
    pub omega: Vec<Q>,
}

impl DiffCochain {
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero) && self.h.iter().all(Zero::is_zero) && self.omega.iter().all(Zero::is_zero)
    }

    /// Rational multiple. The characteristic cocycle is truncated to its
    /// integer part, so only use with scalars keeping it integral or on
    /// triples with `c = 0`.
    pub fn scale(&self, r: &Q) -> DiffCochain {
        DiffCochain {
            level: self.level,
            degree: self.degree,
            c: self.c.iter().map(|x| (Q::from_integer(x.clone()) * r).to_integer()).collect(),
            h: self.h.iter().map(|x| x * r).collect(),
            omega: self.omega.iter().map(|x| x * r).collect(),
        }
    }

    pub fn add(&self, other: &DiffCochain) -> DiffCochain {
        DiffCochain {
            level: self.level,
            degree: self.degree,
            c: self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect(),
            h: self.h.iter().zip(&other.h).map(|(a, b)| a + b).collect(),
            omega: self.omega.iter().zip(&other.omega).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &DiffCochain) -> DiffCochain {
        self.add(&other.scale(&-Q::one()))
    }
}

/// An element of `H^n(C*; ℤ)`: canonical representative cocycle, free
/// coordinates and torsion residues `(order, residue)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralClass {
    pub degree: usize,
    pub representative: Vec<BigInt>,
    pub free: Vec<BigInt>,
    pub torsion: Vec<(u64, BigInt)>,
}

impl IntegralClass {
    pub fn is_zero(&self) -> bool {
        self.representative.iter().all(Zero::is_zero)
    }
}

/// `ℤ^rank ⊕ ⊕ℤ/t ⊕ (ℚ/ℤ)^qz_rank ⊕ ℚ^q_rank`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupDescription {
    pub rank: usize,
    pub torsion: Vec<u64>,
    pub qz_rank: usize,
    pub q_rank: usize,
    pub presentation: String,
}

impl GroupDescription {
    pub fn new(rank: usize, torsion: Vec<u64>, qz_rank: usize, q_rank: usize) -> Self {
        let power = |s: &str, k: usize| if k == 1 { s.to_string() } else { format!("{s}^{k}") };
        let mut parts = Vec::new();
        if rank > 0 {
            parts.push(power("ℤ", rank));
        }
        parts.extend(torsion.iter().map(|t| format!("ℤ/{t}")));
        if qz_rank > 0 {
            parts.push(power(if qz_rank == 1 { "ℚ/ℤ" } else { "(ℚ/ℤ)" }, qz_rank));
        }
        if q_rank > 0 {
            parts.push(power("ℚ", q_rank));
        }
        let presentation = if parts.is_empty() { "0".into() } else { parts.join(" ⊕ ") };
        Self { rank, torsion, qz_rank, q_rank, presentation }
    }
}

impl fmt::Display for GroupDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.presentation)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorEntry {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<u64>,
    pub triple: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiffCohomologyReport {
    pub model: String,
    pub degree: usize,
    /// `None` for complete models.
    pub certified_max: Option<usize>,
    pub total: GroupDescription,
    pub flat_part: GroupDescription,
    pub curvature_image: GroupDescription,
    pub integral_cohomology: GroupDescription,
    pub generators: Vec<GeneratorEntry>,
    #[serde(skip)]
    pub lattice_generators: Vec<DiffCochain>,
    #[serde(skip)]
    pub flat_torsion: Vec<(u64, DiffCochain)>,
    /// Families `r·x`, `r ∈ ℚ/ℤ`, represented at `r = 1`.
    #[serde(skip)]
    pub flat_divisible: Vec<DiffCochain>,
    /// Families `s·x`, `s ∈ ℚ`.
    #[serde(skip)]
    pub exact_forms: Vec<DiffCochain>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SesCheck {
    pub name: String,
    pub passed: bool,
    pub counterexamples: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SesReport {
    pub model: String,
    pub degree: usize,
    pub checks: Vec<SesCheck>,
    pub ok: bool,
}

/// Forms of `W(𝔲(1))` with the curvature generator named `t`.
pub fn circle_forms(top: usize) -> Result<FormsComplex, DiffCohError> {
    let alg = GradedAlgebra::new("W(u1)", vec![Generator::bigraded("θ", 1, (0, 1)), Generator::bigraded("t", 2, (2, 0))])?;
    let t = Element::gen(&alg, "t");
    let d = Derivation::new(&alg, 1, vec![t.clone(), Element::zero(&alg)])?;
    let iota = vec![Derivation::new(&alg, -1, vec![Element::one(&alg), Element::zero(&alg)])?];
    let mut w = GStarAlgebra::new("W(u1)", Arc::new(LieAlgebra::u1()), d, iota, None, Vec::new())?;
    w.weil_factor = Some(1);
    let bases = (0..=top).map(|n| if n % 2 == 0 { vec![t.pow(n as u32 / 2)] } else { Vec::new() }).collect();
    FormsComplex::new(w, bases)
}

/// Forms on a point, fixed by a finite group acting trivially.
pub fn point_forms(finite: bool) -> Result<FormsComplex, DiffCohError> {
    let mut pt = point_model(&LieAlgebra::abelian("0", 0))?;
    if finite {
        pt.finite_action.push(AlgebraMap::identity(&pt.carrier));
    }
    let one = Element::one(&pt.carrier);
    FormsComplex::new(pt, vec![vec![one]])
}

fn single_cells(names: impl Iterator<Item = String>) -> Vec<Vec<String>> {
    names.map(|n| vec![n]).collect()
}

fn power_name(base: &str, k: usize) -> String {
    match k {
        0 => "1".into(),
        1 => base.into(),
        _ => format!("{base}^{k}"),
    }
}

/// `CP^N` skeleton of `BS¹`: cells `α^k` in degree `2k`, `k ≤ N`.
pub fn cp(n: usize) -> Result<GeometricModel, DiffCohError> {
    let top = 2 * n;
    let cells: Vec<Vec<String>> =
        (0..=top).map(|k| if k % 2 == 0 { vec![power_name("α", k / 2)] } else { Vec::new() }).collect();
    let delta = (0..top).map(|k| IntMatrix::zeros(cells[k + 1].len(), cells[k].len())).collect();
    let mut cup = CupTable::new();
    for a in 0..=n {
        for b in 0..=n - a {
            cup.insert((2 * a, 0, 2 * b, 0), vec![BigInt::one()]);
        }
    }
    let j = (0..=top).map(|k| RationalMatrix::identity(cells[k].len())).collect();
    GeometricModel::new(ModelData {
        name: format!("cp{n}"),
        group: "S¹".into(),
        cells,
        delta,
        cup: Some(cup),
        forms: circle_forms(top)?,
        j,
        homotopy: Homotopy::Zero,
        complete: false,
        normalization: "t ↦ α".into(),
    })
}

/// `N`-skeleton of `Bℤ/m` (lens space cells, one per degree).
pub fn lens(m: u64, n: usize) -> Result<GeometricModel, DiffCohError> {
    if m < 2 {
        return Err(DiffCohError::ModelInvariantViolation("lens models need a group of order at least 2".into()));
    }
    let cells = single_cells((0..=n).map(|k| format!("e{k}")));
    let delta = (0..n)
        .map(|k| IntMatrix::from_rows(1, 1, vec![vec![if k % 2 == 1 { BigInt::from(m) } else { BigInt::zero() }]]))
        .collect();
    let mut j = vec![RationalMatrix::identity(1)];
    j.extend((1..=n).map(|_| RationalMatrix::zeros(1, 0)));
    GeometricModel::new(ModelData {
        name: if m == 2 { format!("rp{n}") } else { format!("lens{m}_{n}") },
        group: format!("ℤ/{m}"),
        cells,
        delta,
        cup: None,
        forms: point_forms(true)?,
        j,
        homotopy: Homotopy::Abstract,
        complete: false,
        normalization: "1 ↦ e0".into(),
    })
}

pub fn rp(n: usize) -> Result<GeometricModel, DiffCohError> {
    lens(2, n)
}

/// The trivial group acting on a point.
pub fn point() -> Result<GeometricModel, DiffCohError> {
    let mut cup = CupTable::new();
    cup.insert((0, 0, 0, 0), vec![BigInt::one()]);
    GeometricModel::new(ModelData {
        name: "point".into(),
        group: "trivial".into(),
        cells: vec![vec!["pt".into()]],
        delta: Vec::new(),
        cup: Some(cup),
        forms: point_forms(false)?,
        j: vec![RationalMatrix::identity(1)],
        homotopy: Homotopy::Zero,
        complete: true,
        normalization: "1 ↦ pt".into(),
    })
}

/// `cpN`, `rpN`, `lensM_N` or `point`.
pub fn builtin(name: &str) -> Result<GeometricModel, DiffCohError> {
    let unknown = || DiffCohError::UnknownModel(name.to_string());
    if name == "point" {
        return point();
    }
    if let Some(n) = name.strip_prefix("cp") {
        return cp(n.parse().map_err(|_| unknown())?);
    }
    if let Some(n) = name.strip_prefix("rp") {
        return rp(n.parse().map_err(|_| unknown())?);
    }
    if let Some(rest) = name.strip_prefix("lens") {
        let (m, n) = rest.split_once('_').ok_or_else(unknown)?;
        return lens(m.parse().map_err(|_| unknown())?, n.parse().map_err(|_| unknown())?);
    }
    Err(unknown())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::q;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn alpha(m: &GeometricModel, k: usize) -> DiffCochain {
        let t = Element::gen(&m.forms.gstar.carrier, "t").pow(k as u32);
        m.cochain_with_form(2 * k, 2 * k, bi(&[1]), vec![], &t).unwrap()
    }

    fn flat(m: &GeometricModel, k: usize, r: Q) -> DiffCochain {
        m.cochain(2 * k + 1, 2 * k + 1, vec![], vec![r], vec![]).unwrap()
    }

    #[test]
    fn cp_integral_cohomology() {
        let m = cp(4).unwrap();
        for n in 0..=8 {
            let h = m.integral_cohomology(n).unwrap();
            assert_eq!(h, if n % 2 == 0 { FGAbelianGroup::free(1) } else { FGAbelianGroup::trivial() });
        }
    }

    #[test]
    fn rp_integral_cohomology() {
        let m = rp(9).unwrap();
        for n in 0..=8 {
            let h = m.integral_cohomology(n).unwrap();
            let expected = match n {
                0 => FGAbelianGroup::free(1),
                n if n % 2 == 0 => FGAbelianGroup::from_cyclic_orders(0, &[2]),
                _ => FGAbelianGroup::trivial(),
            };
            assert_eq!(h, expected, "degree {n}");
        }
    }

    #[test]
    fn differential_examples() {
        let m = cp(4).unwrap();
        let x = alpha(&m, 1);
        assert!(m.differential(&x).unwrap().is_zero());
        let y = flat(&m, 2, q(2, 7));
        assert!(m.differential(&y).unwrap().is_zero());
        let m = rp(9).unwrap();
        let x = m.cochain(3, 2, bi(&[0]), vec![Q::one()], vec![]).unwrap();
        let dx = m.differential(&x).unwrap();
        assert_eq!(dx.h, vec![Q::from_integer((-2).into())]);
    }

    #[test]
    fn d_squared_on_lens() {
        let m = lens(3, 7).unwrap();
        let x = m.cochain(2, 3, bi(&[5]), vec![q(1, 3)], vec![]).unwrap();
        let dx = m.differential(&x).unwrap();
        assert_eq!(dx.c, bi(&[15]));
        assert!(m.differential(&dx).unwrap().is_zero());
    }

    #[test]
    fn circle_even_and_odd() {
        let m = cp(8).unwrap();
        for k in 1..=3 {
            let r = m.diff_cohomology(2 * k).unwrap();
            assert_eq!(r.total.presentation, "ℤ");
            assert_eq!(m.format(&r.lattice_generators[0]), format!("({}, 0, {})", power_name("α", k), power_name("t", k)));
            let r = m.diff_cohomology(2 * k + 1).unwrap();
            assert_eq!(r.total.presentation, "ℚ/ℤ");
            for s in sample_scalars() {
                let x = flat(&m, k, s.clone());
                assert_eq!(m.is_coboundary(&x).unwrap(), s.is_integer());
                assert_eq!(m.is_coboundary_direct(&x).unwrap(), s.is_integer());
            }
        }
    }

    #[test]
    fn finite_group_degrees() {
        let m = rp(9).unwrap();
        assert_eq!(m.diff_cohomology(1).unwrap().total.presentation, "ℚ/ℤ");
        for n in 2..=8 {
            let r = m.diff_cohomology(n).unwrap();
            assert_eq!(r.total.presentation, if n % 2 == 0 { "ℤ/2" } else { "0" }, "degree {n}");
        }
        let m = lens(3, 7).unwrap();
        assert_eq!(m.diff_cohomology(4).unwrap().total.presentation, "ℤ/3");
        assert!(matches!(m.diff_cohomology(7), Err(DiffCohError::OutOfRange { .. })));
    }

    #[test]
    fn torsion_generator_order() {
        let m = rp(9).unwrap();
        let r = m.diff_cohomology(4).unwrap();
        let (d, x) = &r.flat_torsion[0];
        assert_eq!(*d, 2);
        assert!(!m.is_coboundary(x).unwrap());
        assert!(m.is_coboundary(&x.scale(&Q::from_integer(2.into()))).unwrap());
        assert!(!m.cc(x).unwrap().is_zero());
    }

    #[test]
    fn products_on_circle() {
        let m = cp(8).unwrap();
        let even = alpha(&m, 1).scale(&Q::from_integer(3.into()));
        let odd = flat(&m, 2, q(2, 5));
        let p = m.product(&even, &odd).unwrap();
        assert_eq!(m.format(&p), "(0, 6/5·α^3, 0)");
        let p = m.product(&odd, &flat(&m, 0, q(1, 3))).unwrap();
        assert!(p.is_zero());
        let x = alpha(&m, 2);
        assert_eq!(m.product(&x, &m.unit().unwrap()).unwrap(), x);
        assert_eq!(m.format(&m.product(&alpha(&m, 1), &alpha(&m, 2)).unwrap()), "(α^3, 0, t^3)");
    }

    #[test]
    fn abstract_homotopy_refuses() {
        let m = point().unwrap();
        let mut m2 = m.clone();
        m2.homotopy = Homotopy::Abstract;
        let u = m2.unit().unwrap();
        assert!(matches!(m2.product(&u, &u), Err(DiffCohError::NeedsHomotopyData)));
        assert_eq!(m.product(&u, &u).unwrap(), u);
    }

    #[test]
    fn normalize_is_idempotent() {
        let m = rp(9).unwrap();
        let x = m.cochain(4, 4, bi(&[3]), vec![q(-3, 2)], vec![]).unwrap();
        assert!(m.is_cocycle(&x).unwrap());
        let y = m.normalize(&x).unwrap();
        assert_eq!(m.normalize(&y).unwrap(), y);
        assert_eq!(m.format(&y), "(e4, -1/2·e3, 0)");
        assert!(m.is_coboundary(&x.sub(&y)).unwrap());
    }

    #[test]
    fn ses_on_builtins() {
        let m = cp(8).unwrap();
        for n in 2..=6 {
            let r = m.verify_ses(n).unwrap();
            assert!(r.ok, "{r:?}");
        }
        let m = rp(9).unwrap();
        for n in 2..=8 {
            assert!(m.verify_ses(n).unwrap().ok);
        }
        let r = point().unwrap().diff_cohomology(0).unwrap();
        assert_eq!(r.total.presentation, "ℤ");
        assert_eq!(r.curvature_image.presentation, "ℤ");
        assert!(point().unwrap().verify_ses(0).unwrap().ok);
    }

    #[test]
    fn builtin_names() {
        assert_eq!(builtin("lens3_7").unwrap().group, "ℤ/3");
        assert!(builtin("cpx").is_err());
        assert!(builtin("torus").is_err());
    }
}
