//! G★-algebras: a graded-commutative algebra with a differential,
//! contractions ι_a and Lie derivatives L_a for each basis vector of a Lie
//! algebra, plus optional finite-group automorphisms.
//!
//! Sign conventions used throughout: `ι_a θ^b = δ_ab`, the curvature is
//! `Ω = dΘ + ½[Θ, Θ]`, and the Cartan differential is `d − Σ u^a ι_a`.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exactlin::{kernel_basis, q, rational_cohomology, FGAbelianGroup, LinError, RationalMatrix, Q};
use crate::gca::{
    basis_index, linear_map_matrix, same_carrier, tensor, Alg, AlgebraMap, Derivation, Element, GcaError,
    Generator, GradedAlgebra, Monomial,
};
use crate::liealg::{validate_lie, LieAlgebra, LieError};

#[derive(Debug, Error)]
pub enum GStarError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Gca(#[from] GcaError),
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error("not a connection: {0}")]
    NotAConnection(String),
    #[error("the carrier has no Weil algebra factor")]
    NoWeilFactor,
    #[error("{0}")]
    Invalid(String),
}

/// Generator names of `W(𝔤)`: `θ`, `u` in rank one, else `θ1…`, `u1…`.
pub fn weil_generator_names(dim: usize) -> (Vec<String>, Vec<String>) {
    if dim == 1 {
        (vec!["θ".into()], vec!["u".into()])
    } else {
        ((1..=dim).map(|i| format!("θ{i}")).collect(), (1..=dim).map(|i| format!("u{i}")).collect())
    }
}

#[derive(Clone, Debug)]
pub struct GStarAlgebra {
    pub name: String,
    pub carrier: Alg,
    pub lie: Arc<LieAlgebra>,
    pub d: Derivation,
    pub iota: Vec<Derivation>,
    pub lie_derivative: Vec<Derivation>,
    pub finite_action: Vec<AlgebraMap>,
    /// Rank of a leading `W(𝔤)` factor: generators `0..2·rank` are the
    /// `θ^a` followed by the `u^a`.
    pub weil_factor: Option<usize>,
}

impl GStarAlgebra {
    /// When `lie_derivative` is omitted it is defined as `[d, ι_a]`.
    pub fn new(
        name: &str,
        lie: Arc<LieAlgebra>,
        d: Derivation,
        iota: Vec<Derivation>,
        lie_derivative: Option<Vec<Derivation>>,
        finite_action: Vec<AlgebraMap>,
    ) -> Result<Self, GStarError> {
        let carrier = d.algebra().clone();
        if d.degree() != 1 {
            return Err(GStarError::Invalid("d must have degree 1".into()));
        }
        if iota.len() != lie.dim() {
            return Err(GStarError::Invalid(format!("{} contractions for a {}-dimensional Lie algebra", iota.len(), lie.dim())));
        }
        for i in &iota {
            if i.degree() != -1 || !same_carrier(i.algebra(), &carrier) {
                return Err(GStarError::Invalid("contractions must be degree −1 derivations of the carrier".into()));
            }
        }
        let lie_derivative = match lie_derivative {
            Some(l) => {
                if l.len() != lie.dim() || l.iter().any(|x| x.degree() != 0) {
                    return Err(GStarError::Invalid("Lie derivatives must be degree 0, one per basis vector".into()));
                }
                l
            }
            None => iota.iter().map(|i| d.commutator(i)).collect(),
        };
        for f in &finite_action {
            if !same_carrier(f.source(), &carrier) || !same_carrier(f.target(), &carrier) {
                return Err(GStarError::Invalid("finite action maps must be endomorphisms of the carrier".into()));
            }
        }
        Ok(Self { name: name.to_string(), carrier, lie, d, iota, lie_derivative, finite_action, weil_factor: None })
    }

    pub fn dim(&self) -> usize {
        self.lie.dim()
    }
}

/// A `𝔨`-valued degree-one element. `offset` places `𝔨` as a block of
/// the algebra's Lie algebra (for direct sums `𝔤 ⊕ 𝔨`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionElement {
    pub lie: Arc<LieAlgebra>,
    pub offset: usize,
    pub components: Vec<Element>,
}

impl ConnectionElement {
    pub fn new(lie: Arc<LieAlgebra>, offset: usize, components: Vec<Element>) -> Self {
        Self { lie, offset, components }
    }
}

/// The Weil algebra with its tautological connection.
pub fn build_weil(g: &LieAlgebra) -> Result<(GStarAlgebra, ConnectionElement), GStarError> {
    let report = validate_lie(g);
    if !report.is_ok() {
        return Err(LieError::Invalid(report).into());
    }
    let n = g.dim();
    let (thetas, us) = weil_generator_names(n);
    let mut gens: Vec<Generator> = thetas.iter().map(|s| Generator::bigraded(s, 1, (0, 1))).collect();
    gens.extend(us.iter().map(|s| Generator::bigraded(s, 2, (2, 0))));
    let alg = GradedAlgebra::new(&format!("W({})", g.name), gens)?;
    let theta = |a: usize| Element::generator(&alg, a);
    let u = |a: usize| Element::generator(&alg, n + a);

    // Chevalley–Eilenberg part −½ Σ c^b_{cd} θ^c θ^d
    let ce: Vec<Element> = (0..n)
        .map(|b| {
            let mut x = Element::zero(&alg);
            for c in 0..n {
                for d in 0..n {
                    let s = g.c(b, c, d);
                    if !s.is_zero() {
                        x.add_scaled(&(&theta(c) * &theta(d)), &(s * q(-1, 2)));
                    }
                }
            }
            x
        })
        .collect();
    let mut provisional: Vec<Element> = (0..n).map(|b| &ce[b] + &u(b)).collect();
    provisional.extend((0..n).map(|_| Element::zero(&alg)));
    let d0 = Derivation::new(&alg, 1, provisional.clone())?;
    // d u^b is forced by d² θ^b = 0
    for b in 0..n {
        provisional[n + b] = -d0.apply(&ce[b]);
    }
    let d = Derivation::new(&alg, 1, provisional)?;
    let iota = (0..n)
        .map(|a| {
            let mut images = vec![Element::zero(&alg); 2 * n];
            images[a] = Element::one(&alg);
            Derivation::new(&alg, -1, images)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let lie = Arc::new(g.clone());
    let mut w = GStarAlgebra::new(&format!("W({})", g.name), lie.clone(), d, iota, None, Vec::new())?;
    w.weil_factor = Some(n);
    let conn = ConnectionElement::new(lie, 0, (0..n).map(theta).collect());
    Ok((w, conn))
}

/// `Λ𝔤*` with the Chevalley–Eilenberg differential and the Maurer–Cartan
/// connection.
pub fn chevalley_eilenberg(g: &LieAlgebra) -> Result<(GStarAlgebra, ConnectionElement), GStarError> {
    let report = validate_lie(g);
    if !report.is_ok() {
        return Err(LieError::Invalid(report).into());
    }
    let n = g.dim();
    let (thetas, _) = weil_generator_names(n);
    let alg = GradedAlgebra::new(&format!("Λ({})", g.name), thetas.iter().map(|s| Generator::bigraded(s, 1, (0, 1))).collect())?;
    let images = (0..n)
        .map(|b| {
            let mut x = Element::zero(&alg);
            for c in 0..n {
                for d in 0..n {
                    let s = g.c(b, c, d);
                    if !s.is_zero() {
                        x.add_scaled(&(&Element::generator(&alg, c) * &Element::generator(&alg, d)), &(s * q(-1, 2)));
                    }
                }
            }
            x
        })
        .collect();
    let d = Derivation::new(&alg, 1, images)?;
    let iota = (0..n)
        .map(|a| {
            let mut images = vec![Element::zero(&alg); n];
            images[a] = Element::one(&alg);
            Derivation::new(&alg, -1, images)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let lie = Arc::new(g.clone());
    let a = GStarAlgebra::new(&format!("Λ({})", g.name), lie.clone(), d, iota, None, Vec::new())?;
    let conn = ConnectionElement::new(lie, 0, (0..n).map(|i| Element::generator(&alg, i)).collect());
    Ok((a, conn))
}

/// `W(𝔤) ⊗ M` for a 𝔤-model `M` (same Lie algebra), with all structure
/// maps extended as `X ⊗ 1 + 1 ⊗ X`.
pub fn weil_tensor(model: &GStarAlgebra) -> Result<GStarAlgebra, GStarError> {
    let (w, _) = build_weil(&model.lie)?;
    let carrier = tensor(&w.carrier, &model.carrier)?;
    let d = crate::gca::tensor_derivation(&carrier, &w.d, &model.d)?;
    let iota = w
        .iota
        .iter()
        .zip(&model.iota)
        .map(|(a, b)| crate::gca::tensor_derivation(&carrier, a, b))
        .collect::<Result<Vec<_>, _>>()?;
    let lie_derivative = w
        .lie_derivative
        .iter()
        .zip(&model.lie_derivative)
        .map(|(a, b)| crate::gca::tensor_derivation(&carrier, a, b))
        .collect::<Result<Vec<_>, _>>()?;
    let nw = w.carrier.ngens();
    let finite_action = model
        .finite_action
        .iter()
        .map(|f| {
            let mut images: Vec<Element> = (0..nw).map(|i| Element::generator(&carrier, i)).collect();
            let inc = crate::gca::factor_inclusion(&model.carrier, &carrier, nw);
            images.extend(f.images().iter().map(|x| inc.apply(x)));
            AlgebraMap::new(&carrier, &carrier, images)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = GStarAlgebra::new(
        &format!("W({})⊗{}", model.lie.name, model.name),
        model.lie.clone(),
        d,
        iota,
        Some(lie_derivative),
        finite_action,
    )?;
    out.weil_factor = Some(model.dim());
    Ok(out)
}

/// `ℚ` in degree 0 with every structure map zero: forms on a point.
pub fn point_model(g: &LieAlgebra) -> Result<GStarAlgebra, GStarError> {
    let alg = GradedAlgebra::new("pt", Vec::new())?;
    let iota = (0..g.dim()).map(|_| Derivation::zero(&alg, -1)).collect();
    GStarAlgebra::new("pt", Arc::new(g.clone()), Derivation::zero(&alg, 1), iota, None, Vec::new())
}

fn transport(d: &Derivation, f: &AlgebraMap) -> Result<Derivation, GStarError> {
    Ok(Derivation::new(f.target(), d.degree(), d.images().iter().map(|x| f.apply(x)).collect())?)
}

/// A copy of `a` whose generators are renamed `prefix + name`.
pub fn rename_gstar(a: &GStarAlgebra, prefix: &str) -> Result<GStarAlgebra, GStarError> {
    let empty = GradedAlgebra::new("", Vec::new())?;
    let carrier = crate::gca::tensor_with_prefix(&empty, &a.carrier, Some(prefix))?;
    let f = crate::gca::factor_inclusion(&a.carrier, &carrier, 0);
    let iota = a.iota.iter().map(|d| transport(d, &f)).collect::<Result<Vec<_>, _>>()?;
    let lie = a.lie_derivative.iter().map(|d| transport(d, &f)).collect::<Result<Vec<_>, _>>()?;
    let finite = a
        .finite_action
        .iter()
        .map(|r| AlgebraMap::new(&carrier, &carrier, r.images().iter().map(|x| f.apply(x)).collect()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = GStarAlgebra::new(&format!("{prefix}{}", a.name), a.lie.clone(), transport(&a.d, &f)?, iota, Some(lie), finite)?;
    out.weil_factor = a.weil_factor;
    Ok(out)
}

/// `P ⊗ A` where `P`'s Lie algebra acts as the basis block starting at
/// `offset` of `A`'s Lie algebra, and `P` is inert for the other vectors.
pub fn block_tensor(p: &GStarAlgebra, offset: usize, a: &GStarAlgebra) -> Result<GStarAlgebra, GStarError> {
    if offset + p.dim() > a.dim() {
        return Err(GStarError::Invalid("block does not fit in the Lie algebra".into()));
    }
    let carrier = tensor(&p.carrier, &a.carrier)?;
    let d = crate::gca::tensor_derivation(&carrier, &p.d, &a.d)?;
    let pick = |ds: &[Derivation], x: usize, degree: i32| {
        if (offset..offset + p.dim()).contains(&x) {
            ds[x - offset].clone()
        } else {
            Derivation::zero(&p.carrier, degree)
        }
    };
    let iota = (0..a.dim())
        .map(|x| crate::gca::tensor_derivation(&carrier, &pick(&p.iota, x, -1), &a.iota[x]))
        .collect::<Result<Vec<_>, _>>()?;
    let lie = (0..a.dim())
        .map(|x| crate::gca::tensor_derivation(&carrier, &pick(&p.lie_derivative, x, 0), &a.lie_derivative[x]))
        .collect::<Result<Vec<_>, _>>()?;
    let np = p.carrier.ngens();
    let inc = crate::gca::factor_inclusion(&a.carrier, &carrier, np);
    let finite = a
        .finite_action
        .iter()
        .map(|r| {
            let mut images: Vec<Element> = (0..np).map(|i| Element::generator(&carrier, i)).collect();
            images.extend(r.images().iter().map(|x| inc.apply(x)));
            AlgebraMap::new(&carrier, &carrier, images)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = GStarAlgebra::new(&format!("{}⊗{}", p.name, a.name), a.lie.clone(), d, iota, Some(lie), finite)?;
    if offset == 0 {
        out.weil_factor = p.weil_factor;
    }
    Ok(out)
}

impl GStarAlgebra {
    /// The same carrier viewed as a `lie`-algebra through the basis block
    /// starting at `offset`.
    pub fn restrict(&self, lie: Arc<LieAlgebra>, offset: usize) -> Result<GStarAlgebra, GStarError> {
        let k = lie.dim();
        let mut out = GStarAlgebra::new(
            &self.name,
            lie,
            self.d.clone(),
            self.iota[offset..offset + k].to_vec(),
            Some(self.lie_derivative[offset..offset + k].to_vec()),
            self.finite_action.clone(),
        )?;
        out.weil_factor = if offset == 0 { self.weil_factor.filter(|&w| w == k) } else { None };
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GStarViolation {
    pub relation: String,
    pub basis_element: String,
    pub defect: String,
}

impl fmt::Display for GStarViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at {}: defect {}", self.relation, self.basis_element, self.defect)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GStarReport {
    pub max_degree: u32,
    pub checked_monomials: usize,
    pub violations: Vec<GStarViolation>,
}

impl GStarReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verify the G★ relations on every monomial of degree ≤ `max_degree`.
pub fn check_gstar(a: &GStarAlgebra, max_degree: u32) -> Result<GStarReport, GStarError> {
    let n = a.dim();
    let alg = &a.carrier;
    let mut monomials = Vec::new();
    for deg in 0..=max_degree {
        monomials.extend(alg.degree_basis(deg)?);
    }
    let bracket_iota: Vec<Vec<Derivation>> = (0..n)
        .map(|i| (0..n).map(|j| combine(&a.iota, &a.lie, i, j, -1)).collect())
        .collect();
    let bracket_l: Vec<Vec<Derivation>> = (0..n)
        .map(|i| (0..n).map(|j| combine(&a.lie_derivative, &a.lie, i, j, 0)).collect())
        .collect();
    let violations: Vec<GStarViolation> = monomials
        .par_iter()
        .flat_map_iter(|m| {
            let x = Element::monomial(alg, m.clone(), Q::one());
            let label = alg.format_monomial(m);
            let mut out = Vec::new();
            let mut record = |relation: String, defect: Element| {
                if !defect.is_zero() {
                    out.push(GStarViolation { relation, basis_element: label.clone(), defect: defect.to_string() });
                }
            };
            let dx = a.d.apply(&x);
            record("d^2 = 0".into(), a.d.apply(&dx));
            for i in 0..n {
                let ix = a.iota[i].apply(&x);
                let lx = a.lie_derivative[i].apply(&x);
                record(
                    format!("[d, iota_{}] = L_{}", i + 1, i + 1),
                    &(&a.d.apply(&ix) + &a.iota[i].apply(&dx)) - &lx,
                );
                record(format!("[L_{}, d] = 0", i + 1), &a.lie_derivative[i].apply(&dx) - &a.d.apply(&lx));
                for j in 0..n {
                    let jx = a.iota[j].apply(&x);
                    if j >= i {
                        record(
                            format!("iota_{} iota_{} + iota_{} iota_{} = 0", i + 1, j + 1, j + 1, i + 1),
                            &a.iota[i].apply(&jx) + &a.iota[j].apply(&ix),
                        );
                    }
                    record(
                        format!("[L_{}, iota_{}] = iota_[{},{}]", i + 1, j + 1, i + 1, j + 1),
                        &(&a.lie_derivative[i].apply(&jx) - &a.iota[j].apply(&lx)) - &bracket_iota[i][j].apply(&x),
                    );
                    record(
                        format!("[L_{}, L_{}] = L_[{},{}]", i + 1, j + 1, i + 1, j + 1),
                        &(&a.lie_derivative[i].apply(&a.lie_derivative[j].apply(&x))
                            - &a.lie_derivative[j].apply(&lx))
                            - &bracket_l[i][j].apply(&x),
                    );
                }
            }
            for (k, f) in a.finite_action.iter().enumerate() {
                record(format!("rho_{} d = d rho_{}", k + 1, k + 1), &f.apply(&dx) - &a.d.apply(&f.apply(&x)));
            }
            out
        })
        .collect();
    Ok(GStarReport { max_degree, checked_monomials: monomials.len(), violations })
}

/// `Σ_e c^e_{ij} D_e`
fn combine(ds: &[Derivation], g: &LieAlgebra, i: usize, j: usize, degree: i32) -> Derivation {
    let alg = ds.first().map(|d| d.algebra().clone());
    let mut acc = match alg {
        Some(alg) => Derivation::zero(&alg, degree),
        None => unreachable!("combine is only called with a nonempty basis"),
    };
    for (e, d) in ds.iter().enumerate() {
        let c = g.c(e, i, j);
        if !c.is_zero() {
            acc = acc.add_scaled(d, c);
        }
    }
    acc
}

/// Check `ι_{off+a} Θ^b = δ_ab` and
/// `L_x Θ^e = −Σ_b c^{off+e}_{x, off+b} Θ^b` for every basis vector `x`.
pub fn check_connection(a: &GStarAlgebra, conn: &ConnectionElement) -> Result<(), GStarError> {
    let k = conn.lie.dim();
    if conn.components.len() != k || conn.offset + k > a.dim() {
        return Err(GStarError::NotAConnection("component count does not match the Lie algebra".into()));
    }
    for (b, th) in conn.components.iter().enumerate() {
        if !same_carrier(th.algebra(), &a.carrier) {
            return Err(GStarError::NotAConnection("component outside the carrier".into()));
        }
        if !(th.is_zero() || th.homogeneous_degree() == Some(1)) {
            return Err(GStarError::NotAConnection(format!("component {} is not of degree 1", b + 1)));
        }
        for i in 0..k {
            let v = a.iota[conn.offset + i].apply(th);
            let expect = if i == b { Element::one(&a.carrier) } else { Element::zero(&a.carrier) };
            if v != expect {
                return Err(GStarError::NotAConnection(format!(
                    "iota_{} of component {} is {v}, expected {expect}",
                    conn.offset + i + 1,
                    b + 1
                )));
            }
        }
    }
    for x in 0..a.dim() {
        for e in 0..k {
            let lhs = a.lie_derivative[x].apply(&conn.components[e]);
            let mut rhs = Element::zero(&a.carrier);
            for b in 0..k {
                let c = a.lie.c(conn.offset + e, x, conn.offset + b);
                if !c.is_zero() {
                    rhs.add_scaled(&conn.components[b], &-c.clone());
                }
            }
            if lhs != rhs {
                return Err(GStarError::NotAConnection(format!(
                    "L_{} of component {} is {lhs}, expected {rhs}",
                    x + 1,
                    e + 1
                )));
            }
        }
    }
    Ok(())
}

/// `Ω^a = dΘ^a + ½ Σ c^a_{bc} Θ^b Θ^c`, checked to be horizontal.
pub fn curvature(a: &GStarAlgebra, conn: &ConnectionElement) -> Result<Vec<Element>, GStarError> {
    check_connection(a, conn)?;
    let omega = curvature_unchecked(&a.d, conn);
    for (e, om) in omega.iter().enumerate() {
        for i in 0..conn.lie.dim() {
            let v = a.iota[conn.offset + i].apply(om);
            if !v.is_zero() {
                return Err(GStarError::NotAConnection(format!(
                    "curvature component {} is not horizontal: iota_{} gives {v}",
                    e + 1,
                    conn.offset + i + 1
                )));
            }
        }
    }
    Ok(omega)
}

/// The curvature formula without any axiom checks.
pub fn curvature_unchecked(d: &Derivation, conn: &ConnectionElement) -> Vec<Element> {
    let k = conn.lie.dim();
    (0..k)
        .map(|e| {
            let mut x = d.apply(&conn.components[e]);
            for b in 0..k {
                for c in 0..k {
                    let s = conn.lie.c(e, b, c);
                    if !s.is_zero() {
                        x.add_scaled(&(&conn.components[b] * &conn.components[c]), &(s * q(1, 2)));
                    }
                }
            }
            x
        })
        .collect()
}

/// `θ^a ↦ Θ^a`, `u^a ↦ Ω^a` from `W(𝔨)` into the carrier.
pub fn weil_homomorphism(a: &GStarAlgebra, conn: &ConnectionElement) -> Result<AlgebraMap, GStarError> {
    let omega = curvature(a, conn)?;
    let (w, _) = build_weil(&conn.lie)?;
    let mut images = conn.components.clone();
    images.extend(omega);
    Ok(AlgebraMap::new(&w.carrier, &a.carrier, images)?)
}

/// Check that `f: A → B` intertwines `d`, and `ι`, `L` where `iota_map[i]`
/// names the basis vector of `B`'s Lie algebra matching vector `i` of
/// `A`'s. Checked on generators.
pub fn check_morphism(a: &GStarAlgebra, b: &GStarAlgebra, f: &AlgebraMap, iota_map: &[usize]) -> Result<(), String> {
    for i in 0..a.carrier.ngens() {
        let g = Element::generator(&a.carrier, i);
        let name = &a.carrier.generators()[i].name;
        let lhs = f.apply(&a.d.apply(&g));
        let rhs = b.d.apply(&f.apply(&g));
        if lhs != rhs {
            return Err(format!("d does not commute on {name}: {lhs} vs {rhs}"));
        }
        for (k, &j) in iota_map.iter().enumerate() {
            let lhs = f.apply(&a.iota[k].apply(&g));
            let rhs = b.iota[j].apply(&f.apply(&g));
            if lhs != rhs {
                return Err(format!("iota_{} does not commute on {name}: {lhs} vs {rhs}", k + 1));
            }
            let lhs = f.apply(&a.lie_derivative[k].apply(&g));
            let rhs = b.lie_derivative[j].apply(&f.apply(&g));
            if lhs != rhs {
                return Err(format!("L_{} does not commute on {name}: {lhs} vs {rhs}", k + 1));
            }
        }
    }
    Ok(())
}

/// Basis of `A^n_basic`: the joint kernel of every `ι_a`, every `L_a` and
/// every `ρ − id` on the degree-`n` monomials.
pub fn basic_subcomplex(a: &GStarAlgebra, n: u32) -> Result<Vec<Element>, GStarError> {
    let src = a.carrier.degree_basis(n)?;
    let lower = if n == 0 { Vec::new() } else { a.carrier.degree_basis(n - 1)? };
    let mut stacked = RationalMatrix::zeros(0, src.len());
    for i in &a.iota {
        stacked = stacked.vstack(&linear_map_matrix(&a.carrier, &src, &lower, |x| i.apply(x))?);
    }
    for l in &a.lie_derivative {
        stacked = stacked.vstack(&linear_map_matrix(&a.carrier, &src, &src, |x| l.apply(x))?);
    }
    for f in &a.finite_action {
        stacked = stacked.vstack(&linear_map_matrix(&a.carrier, &src, &src, |x| &f.apply(x) - x)?);
    }
    Ok(kernel_basis(&stacked).iter().map(|v| Element::from_vector(&a.carrier, &src, v)).collect())
}

/// Coordinates of `x` in the span of `basis` (given as coordinate vectors
/// over `monomials`), or `None` if outside.
pub fn coordinates_in_span(basis: &[Element], monomials: &[Monomial], x: &Element) -> Result<Option<Vec<Q>>, GStarError> {
    let index = basis_index(monomials);
    let columns = basis.iter().map(|b| b.coordinates(&index)).collect::<Result<Vec<_>, _>>()?;
    let m = RationalMatrix::from_columns(monomials.len(), &columns);
    Ok(m.solve(&x.coordinates(&index)?))
}

/// Cohomology of `(A, d)` over ℚ in degrees `0..=max_degree`.
pub fn cohomology(a: &GStarAlgebra, max_degree: u32) -> Result<Vec<FGAbelianGroup>, GStarError> {
    let mats: Vec<RationalMatrix> =
        (0..=max_degree + 1).map(|n| a.d.matrix(n)).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for n in 0..=max_degree as usize {
        let prev = if n == 0 { RationalMatrix::zeros(mats[0].cols(), 0) } else { mats[n - 1].clone() };
        out.push(rational_cohomology(&prev, &mats[n])?);
    }
    Ok(out)
}

/// Matrix of `d` from the basic basis in degree `n` to that in `n + 1`.
fn basic_differential(a: &GStarAlgebra, n: u32, src: &[Element], tgt: &[Element]) -> Result<RationalMatrix, GStarError> {
    let monos = a.carrier.degree_basis(n + 1)?;
    let mut columns = Vec::new();
    for x in src {
        let dx = a.d.apply(x);
        let c = coordinates_in_span(tgt, &monos, &dx)?
            .ok_or_else(|| GStarError::Invalid(format!("d({x}) leaves the basic subcomplex")))?;
        columns.push(c);
    }
    Ok(RationalMatrix::from_columns(tgt.len(), &columns))
}

/// Cohomology of the basic subcomplex in degrees `0..=max_degree`.
pub fn basic_cohomology(a: &GStarAlgebra, max_degree: u32) -> Result<Vec<FGAbelianGroup>, GStarError> {
    let bases: Vec<Vec<Element>> = (0..=max_degree + 1).map(|n| basic_subcomplex(a, n)).collect::<Result<_, _>>()?;
    let mats: Vec<RationalMatrix> = (0..=max_degree)
        .map(|n| basic_differential(a, n, &bases[n as usize], &bases[n as usize + 1]))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for n in 0..=max_degree as usize {
        let prev = if n == 0 { RationalMatrix::zeros(bases[0].len(), 0) } else { mats[n - 1].clone() };
        out.push(rational_cohomology(&prev, &mats[n])?);
    }
    Ok(out)
}

/// `ι_{Ω}`-type operator `x ↦ Σ_a c_a · D_a(x)` for even coefficients, or
/// for odd coefficients paired with odd `D_a` (then it is an even
/// derivation). Built from generator images.
pub fn weighted_derivation(alg: &Alg, coeffs: &[Element], ds: &[Derivation], degree: i32) -> Result<Derivation, GStarError> {
    let images = (0..alg.ngens())
        .map(|i| {
            let g = Element::generator(alg, i);
            let mut x = Element::zero(alg);
            for (c, d) in coeffs.iter().zip(ds) {
                x = &x + &(c * &d.apply(&g));
            }
            x
        })
        .collect();
    Ok(Derivation::new(alg, degree, images)?)
}

/// The Koszul part `d_K` of `d_W`: the bidegree-(2,−1) component of each
/// generator image.
pub fn koszul_derivation(w: &GStarAlgebra) -> Result<Derivation, GStarError> {
    let alg = &w.carrier;
    let images = (0..alg.ngens())
        .map(|i| {
            let (p, qd) = alg.generators()[i]
                .bidegree
                .ok_or_else(|| GStarError::Invalid("generators carry no bidegree".into()))?;
            let target = (p + 2, qd.checked_sub(1));
            Ok(w.d.image(i).filter(|m| {
                target.1.is_some_and(|t| alg.monomial_bidegree(m) == Some((target.0, t)))
            }))
        })
        .collect::<Result<Vec<_>, GStarError>>()?;
    Ok(Derivation::new(alg, 1, images)?)
}

/// `ι_{Ω_𝔤} = Σ_a Ω^a ι_a` on a Weil algebra, with `Ω` its curvature.
pub fn iota_curvature(w: &GStarAlgebra, conn: &ConnectionElement) -> Result<Derivation, GStarError> {
    let omega = curvature(w, conn)?;
    let iotas: Vec<Derivation> = (0..conn.lie.dim()).map(|a| w.iota[conn.offset + a].clone()).collect();
    weighted_derivation(&w.carrier, &omega, &iotas, 1)
}

/// The automorphism `exp(ι_θ)` of `W(𝔤) ⊗ M` and its inverse.
#[derive(Clone, Debug)]
pub struct MathaiQuillen {
    /// `ι_θ = Σ_a θ^a ι^M_a`, an even nilpotent derivation.
    pub iota_theta: Derivation,
    pub forward: AlgebraMap,
    pub inverse: AlgebraMap,
    /// `ι^M_a` and `d_M` extended by zero on the Weil generators.
    pub model_iota: Vec<Derivation>,
    pub model_d: Derivation,
}

impl MathaiQuillen {
    /// `Σ_k (±ι_θ)^k(x) / k!` applied directly, as an independent check of
    /// the algebra maps.
    pub fn series(&self, x: &Element, sign: i64) -> Element {
        let s = Q::from_integer(sign.into());
        let mut out = x.clone();
        let mut term = x.clone();
        let mut k = 1i64;
        loop {
            term = self.iota_theta.apply(&term).scale(&(s.clone() / Q::from_integer(k.into())));
            if term.is_zero() {
                return out;
            }
            out = &out + &term;
            k += 1;
        }
    }
}

fn split_model(a: &GStarAlgebra) -> Result<(usize, Vec<Derivation>, Derivation), GStarError> {
    let n = a.weil_factor.ok_or(GStarError::NoWeilFactor)?;
    let nw = 2 * n;
    let restrict = |d: &Derivation| {
        let images = (0..a.carrier.ngens())
            .map(|i| if i < nw { Element::zero(&a.carrier) } else { d.image(i).clone() })
            .collect();
        Derivation::new(&a.carrier, d.degree(), images)
    };
    let iotas = a.iota.iter().map(restrict).collect::<Result<Vec<_>, _>>()?;
    Ok((n, iotas, restrict(&a.d)?))
}

pub fn mathai_quillen(a: &GStarAlgebra) -> Result<MathaiQuillen, GStarError> {
    let (n, model_iota, model_d) = split_model(a)?;
    let thetas: Vec<Element> = (0..n).map(|i| Element::generator(&a.carrier, i)).collect();
    let iota_theta = weighted_derivation(&a.carrier, &thetas, &model_iota, 0)?;
    let exp = |sign: i64| {
        let images = (0..a.carrier.ngens())
            .map(|i| {
                let g = Element::generator(&a.carrier, i);
                let s = Q::from_integer(sign.into());
                let mut out = g.clone();
                let mut term = g;
                let mut k = 1i64;
                loop {
                    term = iota_theta.apply(&term).scale(&(s.clone() / Q::from_integer(k.into())));
                    if term.is_zero() {
                        break out;
                    }
                    out = &out + &term;
                    k += 1;
                }
            })
            .collect();
        AlgebraMap::new(&a.carrier, &a.carrier, images)
    };
    Ok(MathaiQuillen { forward: exp(1)?, inverse: exp(-1)?, iota_theta, model_iota, model_d })
}

/// The Cartan carrier `(S𝔤* ⊗ M)^G` in one degree together with `d_C`.
#[derive(Clone, Debug)]
pub struct CartanModel {
    pub basis: Vec<Element>,
    pub d_c: Derivation,
}

/// `d_C = d_M − Σ u^a ι^M_a` and the invariant θ-free elements of degree `n`.
pub fn cartan_model(a: &GStarAlgebra, n: u32) -> Result<CartanModel, GStarError> {
    let (k, model_iota, model_d) = split_model(a)?;
    let us: Vec<Element> = (0..k).map(|i| -Element::generator(&a.carrier, k + i)).collect();
    let correction = weighted_derivation(&a.carrier, &us, &model_iota, 1)?;
    let d_c = model_d.add_scaled(&correction, &Q::one());
    let src: Vec<Monomial> = a.carrier.degree_basis(n)?.into_iter().filter(|m| m.0[..k].iter().all(|&e| e == 0)).collect();
    let mut stacked = RationalMatrix::zeros(0, src.len());
    let full = a.carrier.degree_basis(n)?;
    for l in &a.lie_derivative {
        stacked = stacked.vstack(&linear_map_matrix(&a.carrier, &src, &full, |x| l.apply(x))?);
    }
    for f in &a.finite_action {
        stacked = stacked.vstack(&linear_map_matrix(&a.carrier, &src, &full, |x| &f.apply(x) - x)?);
    }
    let basis = kernel_basis(&stacked).iter().map(|v| Element::from_vector(&a.carrier, &src, v)).collect();
    Ok(CartanModel { basis, d_c })
}

/// Report of the Mathai–Quillen comparison through a degree cap.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CartanComparison {
    pub max_degree: u32,
    pub inverse_exact: bool,
    pub series_agrees: bool,
    pub conjugation_matches: bool,
    pub dc_squares_to_zero: bool,
    pub basic_maps_into_cartan: bool,
    pub dimensions: Vec<(usize, usize)>,
    pub failures: Vec<String>,
}

impl CartanComparison {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check `exp(ι_θ)` against its inverse and the series, and compare
/// `exp(ι_θ) ∘ d ∘ exp(−ι_θ)` with `d_C` on the Cartan carrier.
pub fn compare_cartan(a: &GStarAlgebra, max_degree: u32) -> Result<CartanComparison, GStarError> {
    let mq = mathai_quillen(a)?;
    let mut rep = CartanComparison { max_degree, ..Default::default() };
    let id = AlgebraMap::identity(&a.carrier);
    rep.inverse_exact = mq.forward.then(&mq.inverse) == id && mq.inverse.then(&mq.forward) == id;
    if !rep.inverse_exact {
        rep.failures.push("exp(ι_θ) ∘ exp(−ι_θ) is not the identity".into());
    }
    rep.series_agrees = true;
    rep.conjugation_matches = true;
    rep.dc_squares_to_zero = true;
    rep.basic_maps_into_cartan = true;
    for n in 0..=max_degree {
        for m in a.carrier.degree_basis(n)? {
            let x = Element::monomial(&a.carrier, m, Q::one());
            if mq.series(&x, 1) != mq.forward.apply(&x) || mq.series(&x, -1) != mq.inverse.apply(&x) {
                rep.series_agrees = false;
                rep.failures.push(format!("series and algebra map differ on {x}"));
            }
        }
        let cm = cartan_model(a, n)?;
        for x in &cm.basis {
            let conj = mq.forward.apply(&a.d.apply(&mq.inverse.apply(x)));
            let dc = cm.d_c.apply(x);
            if conj != dc {
                rep.conjugation_matches = false;
                rep.failures.push(format!("conjugated d and d_C differ on {x}: {conj} vs {dc}"));
            }
            let dd = cm.d_c.apply(&dc);
            if !dd.is_zero() {
                rep.dc_squares_to_zero = false;
                rep.failures.push(format!("d_C^2 ≠ 0 on {x}"));
            }
        }
        let basic = basic_subcomplex(a, n)?;
        let k = a.weil_factor.unwrap_or(0);
        let src: Vec<Monomial> =
            a.carrier.degree_basis(n)?.into_iter().filter(|m| m.0[..k].iter().all(|&e| e == 0)).collect();
        for b in &basic {
            let img = mq.forward.apply(b);
            let inside = img.terms().keys().all(|m| m.0[..k].iter().all(|&e| e == 0))
                && coordinates_in_span(&cm.basis, &src, &img)?.is_some();
            if !inside {
                rep.basic_maps_into_cartan = false;
                rep.failures.push(format!("exp(ι_θ)({b}) = {img} is outside the Cartan carrier"));
            }
        }
        rep.dimensions.push((basic.len(), cm.basis.len()));
        if basic.len() != cm.basis.len() {
            rep.failures.push(format!(
                "degree {n}: basic dimension {} but Cartan dimension {}",
                basic.len(),
                cm.basis.len()
            ));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::parse_element;

    #[test]
    fn u1_weil_differential() {
        let (w, _) = build_weil(&LieAlgebra::u1()).unwrap();
        assert_eq!(w.d.image(0).to_string(), "u");
        assert!(w.d.image(1).is_zero());
    }

    #[test]
    fn weil_algebras_satisfy_the_axioms() {
        for g in [LieAlgebra::u1(), LieAlgebra::su2(), LieAlgebra::heisenberg3()] {
            let (w, _) = build_weil(&g).unwrap();
            let r = check_gstar(&w, 5).unwrap();
            assert!(r.is_ok(), "{}: {:?}", g.name, r.violations.first());
        }
    }

    #[test]
    fn lie_derivative_matches_coadjoint() {
        let g = LieAlgebra::su2();
        let (w, _) = build_weil(&g).unwrap();
        let co = crate::liealg::coadjoint_matrices(&g);
        for a in 0..3 {
            for e in 0..3 {
                let img = w.lie_derivative[a].apply(&Element::generator(&w.carrier, e));
                for b in 0..3 {
                    assert_eq!(img.coefficient(&Monomial::generator(6, b)), co[a].get(b, e));
                }
            }
        }
    }

    #[test]
    fn corrupted_differential_is_reported() {
        let (w, _) = build_weil(&LieAlgebra::su2()).unwrap();
        let mut images = w.d.images().to_vec();
        images[3] = Element::zero(&w.carrier);
        let d = Derivation::new(&w.carrier, 1, images).unwrap();
        let bad = GStarAlgebra::new("bad", w.lie.clone(), d, w.iota.clone(), None, Vec::new()).unwrap();
        let r = check_gstar(&bad, 2).unwrap();
        assert!(r.violations.iter().any(|v| v.relation == "d^2 = 0"));
    }

    #[test]
    fn weil_su2_is_acyclic() {
        let (w, _) = build_weil(&LieAlgebra::su2()).unwrap();
        let h = cohomology(&w, 4).unwrap();
        assert_eq!(h[0], FGAbelianGroup::free(1));
        assert!(h[1..].iter().all(FGAbelianGroup::is_trivial));
    }

    #[test]
    fn maurer_cartan_is_flat() {
        let (a, th) = chevalley_eilenberg(&LieAlgebra::su2()).unwrap();
        assert!(curvature(&a, &th).unwrap().iter().all(Element::is_zero));
        let f = weil_homomorphism(&a, &th).unwrap();
        assert!(f.images()[3..].iter().all(Element::is_zero));
    }

    #[test]
    fn weil_curvature_and_koszul() {
        let (w, th) = build_weil(&LieAlgebra::su2()).unwrap();
        let om = curvature(&w, &th).unwrap();
        assert_eq!(om[0].to_string(), "u1");
        assert_eq!(iota_curvature(&w, &th).unwrap(), koszul_derivation(&w).unwrap());
        let f = weil_homomorphism(&w, &th).unwrap();
        assert_eq!(f, AlgebraMap::identity(&w.carrier));
    }

    #[test]
    fn basic_subcomplexes() {
        let (w, _) = build_weil(&LieAlgebra::u1()).unwrap();
        let b2 = basic_subcomplex(&w, 2).unwrap();
        assert_eq!(b2.len(), 1);
        assert_eq!(b2[0].to_string(), "u");
        assert!(basic_subcomplex(&w, 3).unwrap().is_empty());
        let (ws, _) = build_weil(&LieAlgebra::su2()).unwrap();
        let b4 = basic_subcomplex(&ws, 4).unwrap();
        assert_eq!(b4.len(), 1);
        let casimir = parse_element(&ws.carrier, "u1^2 + u2^2 + u3^2").unwrap();
        let c = b4[0].coefficient(&Monomial(vec![0, 0, 0, 2, 0, 0]));
        assert_eq!(b4[0].scale(&c.recip()), casimir);
    }

    #[test]
    fn no_weil_factor() {
        let (a, _) = chevalley_eilenberg(&LieAlgebra::u1()).unwrap();
        assert!(matches!(mathai_quillen(&a), Err(GStarError::NoWeilFactor)));
    }
}
