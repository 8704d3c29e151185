//! Chern–Weil and Chern–Simons forms, equivariant connections and
//! curvatures, the pullback connection on `𝔤 ⊕ 𝔨`, the substitution map
//! `W(𝔤) ⊗ W(𝔨) ⊗ A → W(𝔤) ⊗ A`, associated-bundle maps on forms, and the
//! polynomial-coefficient witness of injectivity on `S𝔤*`.
//!
//! Invariant polynomials with phase `i` are evaluated on their rational
//! part; the phase travels with the polynomial as metadata.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactlin::{qi, Q};
use crate::gca::{
    factor_inclusion, parse_element, tensor, Alg, AlgebraMap, Derivation, Element, GcaError, Generator,
    GradedAlgebra, Monomial,
};
use crate::gstar::{
    block_tensor, build_weil, check_connection, check_morphism, curvature, curvature_unchecked,
    mathai_quillen, rename_gstar, weil_tensor, ConnectionElement, GStarAlgebra, GStarError,
};
use crate::liealg::{check_homomorphism, InvariantPolynomial, LieAlgebra, LieError, Phase, PolyTerms};

#[derive(Debug, Error)]
pub enum ChernError {
    #[error(transparent)]
    GStar(#[from] GStarError),
    #[error(transparent)]
    Gca(#[from] GcaError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("polynomial {0} is not invariant")]
    NotInvariant(String),
    #[error("axiom violated: {0}")]
    Axiom(String),
    #[error("polynomial has no nonzero coefficient")]
    NoNonzeroEvaluation,
}

/// `Σ_α c_α Π_a x_a^{α_a}` with the `x_a` replaced by commuting even
/// elements.
pub fn substitute(omega: &InvariantPolynomial, values: &[Element], alg: &Alg) -> Element {
    let mut out = Element::zero(alg);
    for (exp, c) in omega.terms() {
        let mut term = Element::scalar(alg, c.clone());
        for (x, &e) in values.iter().zip(exp) {
            if e > 0 {
                term = &term * &x.pow(e);
            }
        }
        out = &out + &term;
    }
    out
}

/// The polynomial as an element of `S𝔤* ⊂ W(𝔤)`.
pub fn polynomial_in_weil(omega: &InvariantPolynomial, w: &GStarAlgebra) -> Element {
    let n = w.dim();
    let us: Vec<Element> = (0..n).map(|a| Element::generator(&w.carrier, n + a)).collect();
    substitute(omega, &us, &w.carrier)
}

/// Read an element of `S𝔤* ⊂ W(𝔤)` back as a polynomial.
pub fn polynomial_from_weil(name: &str, x: &Element, w: &GStarAlgebra) -> Result<InvariantPolynomial, ChernError> {
    let n = w.dim();
    let mut terms = PolyTerms::new();
    let mut degree = None;
    for (m, c) in x.terms() {
        if m.0[..n].iter().any(|&e| e > 0) {
            return Err(ChernError::Axiom(format!("{x} involves odd Weil generators")));
        }
        let e = m.0[n..].to_vec();
        let k = e.iter().sum::<u32>() as usize;
        if *degree.get_or_insert(k) != k {
            return Err(ChernError::Axiom(format!("{x} is not homogeneous")));
        }
        terms.insert(e, c.clone());
    }
    Ok(InvariantPolynomial::new(name, n, degree.unwrap_or(0), Phase::One, terms)?)
}

fn require_invariant(omega: &InvariantPolynomial, g: &LieAlgebra) -> Result<(), ChernError> {
    if omega.dim() != 0 && omega.dim() != g.dim() {
        return Err(ChernError::Axiom(format!("{} lives on a different Lie algebra", omega.name)));
    }
    if !omega.is_invariant(g) {
        return Err(ChernError::NotInvariant(omega.name.clone()));
    }
    Ok(())
}

/// `ω(Ω, …, Ω)` for the curvature of `conn`; checked closed and basic for
/// the connection's block.
pub fn chern_weil(omega: &InvariantPolynomial, a: &GStarAlgebra, conn: &ConnectionElement) -> Result<Element, ChernError> {
    require_invariant(omega, &conn.lie)?;
    let om = curvature(a, conn)?;
    let x = substitute(omega, &om, &a.carrier);
    if !a.d.apply(&x).is_zero() {
        return Err(ChernError::Axiom(format!("Chern–Weil form {x} is not closed")));
    }
    for i in 0..conn.lie.dim() {
        let j = conn.offset + i;
        if !a.iota[j].apply(&x).is_zero() || !a.lie_derivative[j].apply(&x).is_zero() {
            return Err(ChernError::Axiom(format!("Chern–Weil form {x} is not basic")));
        }
    }
    Ok(x)
}

/// `W(𝔤)` extended by `t` (degree 0) and `dt` (degree 1), placed first so
/// that normal-form monomials start with `t^m dt`.
#[derive(Clone, Debug)]
pub struct TransgressionRing {
    pub weil: GStarAlgebra,
    pub alg: Alg,
    pub d: Derivation,
}

impl TransgressionRing {
    pub fn new(g: &LieAlgebra) -> Result<Self, ChernError> {
        let (weil, _) = build_weil(g)?;
        let interval = GradedAlgebra::new("I", vec![Generator::new("t", 0), Generator::new("dt", 1)])?;
        let alg = tensor(&interval, &weil.carrier)?;
        let dint = Derivation::new(&interval, 1, vec![Element::gen(&interval, "dt"), Element::zero(&interval)])?;
        let d = crate::gca::tensor_derivation(&alg, &dint, &weil.d)?;
        Ok(Self { weil, alg, d })
    }

    pub fn include(&self, x: &Element) -> Element {
        factor_inclusion(&self.weil.carrier, &self.alg, 2).apply(x)
    }

    /// `∫₀¹`: keep the terms linear in `dt`, send `t^m dt ∧ β` to
    /// `β / (m + 1)`.
    pub fn integrate(&self, x: &Element) -> Element {
        let mut out = Element::zero(&self.weil.carrier);
        for (m, c) in x.terms() {
            if m.0[1] != 1 {
                continue;
            }
            let rest = Monomial(m.0[2..].to_vec());
            out.add_term(rest, c / qi(m.0[0] as i64 + 1));
        }
        out
    }

    /// `Ω_t = d(tθ) + ½[tθ, tθ]`.
    pub fn interpolated_curvature(&self) -> Vec<Element> {
        let n = self.weil.dim();
        let t = Element::gen(&self.alg, "t");
        let conn = ConnectionElement::new(
            self.weil.lie.clone(),
            0,
            (0..n).map(|a| &t * &Element::generator(&self.alg, 2 + a)).collect(),
        );
        curvature_unchecked(&self.d, &conn)
    }
}

/// `CS_ω = ∫₀¹ ω(Ω_t, …, Ω_t)`, checked against `d_W CS_ω = ω`.
pub fn chern_simons(omega: &InvariantPolynomial, g: &LieAlgebra) -> Result<Element, ChernError> {
    require_invariant(omega, g)?;
    let ring = TransgressionRing::new(g)?;
    let om_t = ring.interpolated_curvature();
    let cs = ring.integrate(&substitute(omega, &om_t, &ring.alg));
    let target = polynomial_in_weil(omega, &ring.weil);
    let dcs = ring.weil.d.apply(&cs);
    if dcs != target {
        return Err(ChernError::Axiom(format!("d CS = {dcs} differs from {target}")));
    }
    Ok(cs)
}

/// The result of the pullback construction on `A_P ⊗ A`.
#[derive(Clone, Debug)]
pub struct PullbackConnection {
    /// `A_P ⊗ A` as a `(𝔤 ⊕ 𝔨)`-algebra.
    pub total: GStarAlgebra,
    /// `(Θ_P, Θ_Q − ι_{Θ_P} Θ_Q)` with values in `𝔤 ⊕ 𝔨`.
    pub connection: ConnectionElement,
}

/// `Θ_P ⊕ (Θ_Q − Σ_a Θ_P^a ι_a Θ_Q)` on `A_P ⊗ A`, where `A` carries the
/// `𝔤 ⊕ 𝔨` action and `A_P` only `𝔤`.
pub fn pullback_connection(
    ap: &GStarAlgebra,
    theta_p: &ConnectionElement,
    a: &GStarAlgebra,
    theta_q: &ConnectionElement,
) -> Result<PullbackConnection, ChernError> {
    let ng = ap.dim();
    let nk = theta_q.lie.dim();
    if a.dim() != ng + nk || theta_q.offset != ng || theta_p.offset != 0 {
        return Err(ChernError::Axiom("expected A over 𝔤 ⊕ 𝔨 with the 𝔨 block last".into()));
    }
    check_connection(ap, theta_p)?;
    check_connection(a, theta_q)?;
    let total = block_tensor(ap, 0, a)?;
    let ip = factor_inclusion(&ap.carrier, &total.carrier, 0);
    let ia = factor_inclusion(&a.carrier, &total.carrier, ap.carrier.ngens());
    let mut components: Vec<Element> = theta_p.components.iter().map(|x| ip.apply(x)).collect();
    for q in &theta_q.components {
        let mut x = ia.apply(q);
        for (c, p) in theta_p.components.iter().enumerate() {
            let iq = ia.apply(&a.iota[c].apply(q));
            x = &x - &(&ip.apply(p) * &iq);
        }
        components.push(x);
    }
    let connection = ConnectionElement::new(total.lie.clone(), 0, components);
    check_connection(&total, &connection).map_err(|e| ChernError::Axiom(e.to_string()))?;
    Ok(PullbackConnection { total, connection })
}

/// `Θ_G`, `Ω_G` and the Cartan curvature for a `𝔨`-connection on a
/// `(𝔤 ⊕ 𝔨)`-algebra `A`.
#[derive(Clone, Debug)]
pub struct EquivariantConnection {
    pub g: Arc<LieAlgebra>,
    pub k: Arc<LieAlgebra>,
    pub base: GStarAlgebra,
    pub theta: ConnectionElement,
    /// `W(𝔤) ⊗ A` with both actions.
    pub joint: GStarAlgebra,
    /// `W(𝔤) ⊗ A` as a `𝔤`-algebra only.
    pub weil_g: GStarAlgebra,
    pub theta_g: ConnectionElement,
    pub omega_g_weil: Vec<Element>,
    pub omega_g_cartan: Vec<Element>,
}

pub fn equivariant_connection(a: &GStarAlgebra, theta: &ConnectionElement) -> Result<EquivariantConnection, ChernError> {
    let nk = theta.lie.dim();
    let ng = a.dim().checked_sub(nk).ok_or_else(|| ChernError::Axiom("𝔨 larger than the Lie algebra".into()))?;
    let g = Arc::new(a.lie.block(&format!("{}|g", a.lie.name), 0, ng));
    let (w, theta_w) = build_weil(&g)?;
    let pb = pullback_connection(&w, &theta_w, a, theta)?;
    let joint = pb.total;
    let weil_g = joint.restrict(g.clone(), 0)?;
    let theta_g = ConnectionElement::new(theta.lie.clone(), ng, pb.connection.components[ng..].to_vec());
    let omega_g_weil = curvature_unchecked(&joint.d, &theta_g);

    let ia = factor_inclusion(&a.carrier, &joint.carrier, w.carrier.ngens());
    let omega_a = curvature_unchecked(&a.d, theta);
    let omega_g_cartan = (0..nk)
        .map(|e| {
            let mut x = ia.apply(&omega_a[e]);
            for c in 0..ng {
                let u = Element::generator(&joint.carrier, ng + c);
                x = &x - &(&u * &ia.apply(&a.iota[c].apply(&theta.components[e])));
            }
            x
        })
        .collect();
    let ec = EquivariantConnection {
        g,
        k: theta.lie.clone(),
        base: a.clone(),
        theta: theta.clone(),
        joint,
        weil_g,
        theta_g,
        omega_g_weil,
        omega_g_cartan,
    };
    ec.verify()?;
    Ok(ec)
}

impl EquivariantConnection {
    /// Horizontality and invariance of `Θ_G`, `Ω_G` for `𝔤`, the
    /// connection axioms for `𝔨`, and the Mathai–Quillen comparison of the
    /// two curvatures.
    pub fn verify(&self) -> Result<(), ChernError> {
        let ng = self.g.dim();
        check_connection(&self.joint, &self.theta_g).map_err(|e| ChernError::Axiom(e.to_string()))?;
        for a in 0..ng {
            for (e, (th, om)) in self.theta_g.components.iter().zip(&self.omega_g_weil).enumerate() {
                for (what, x) in [("Θ_G", th), ("Ω_G", om)] {
                    if !self.joint.iota[a].apply(x).is_zero() {
                        return Err(ChernError::Axiom(format!("{what}^{} is not 𝔤-horizontal", e + 1)));
                    }
                    if !self.joint.lie_derivative[a].apply(x).is_zero() {
                        return Err(ChernError::Axiom(format!("{what}^{} is not 𝔤-invariant", e + 1)));
                    }
                }
            }
        }
        for (e, om) in self.omega_g_weil.iter().enumerate() {
            for b in 0..self.k.dim() {
                if !self.joint.iota[ng + b].apply(om).is_zero() {
                    return Err(ChernError::Axiom(format!("Ω_G^{} is not 𝔨-horizontal", e + 1)));
                }
            }
        }
        let mq = mathai_quillen(&self.weil_g)?;
        for (e, (w, c)) in self.omega_g_weil.iter().zip(&self.omega_g_cartan).enumerate() {
            let img = mq.forward.apply(w);
            if &img != c {
                return Err(ChernError::Axiom(format!(
                    "exp(ι_θ) Ω_G^{} = {img} differs from the Cartan curvature {c}",
                    e + 1
                )));
            }
        }
        Ok(())
    }

    /// `θ_𝔨 ↦ Θ_G`, `u_𝔨 ↦ Ω_G` from `W(𝔨)`.
    pub fn weil_map(&self) -> Result<AlgebraMap, ChernError> {
        let (wk, _) = build_weil(&self.k)?;
        let mut images = self.theta_g.components.clone();
        images.extend(self.omega_g_weil.iter().cloned());
        Ok(AlgebraMap::new(&wk.carrier, &self.joint.carrier, images)?)
    }
}

/// `ω(Ω_G, …, Ω_G)`, checked `d_G`-closed and basic for `𝔤 ⊕ 𝔨`.
pub fn equivariant_chern_weil(omega: &InvariantPolynomial, ec: &EquivariantConnection) -> Result<Element, ChernError> {
    require_invariant(omega, &ec.k)?;
    let x = substitute(omega, &ec.omega_g_weil, &ec.joint.carrier);
    if !ec.joint.d.apply(&x).is_zero() {
        return Err(ChernError::Axiom(format!("{x} is not d_G-closed")));
    }
    for (i, l) in ec.joint.iota.iter().zip(&ec.joint.lie_derivative) {
        if !i.apply(&x).is_zero() || !l.apply(&x).is_zero() {
            return Err(ChernError::Axiom(format!("{x} is not basic")));
        }
    }
    Ok(x)
}

/// The image of `CS_ω` under `θ_𝔨 ↦ Θ_G`, `u_𝔨 ↦ Ω_G`; checked against
/// `d_G CS_ω(Θ_G) = ω(Ω_G)`.
pub fn equivariant_chern_simons(omega: &InvariantPolynomial, ec: &EquivariantConnection) -> Result<Element, ChernError> {
    let cs = chern_simons(omega, &ec.k)?;
    let x = ec.weil_map()?.apply(&cs);
    let target = equivariant_chern_weil(omega, ec)?;
    let dx = ec.joint.d.apply(&x);
    if dx != target {
        return Err(ChernError::Axiom(format!("d_G CS = {dx} differs from {target}")));
    }
    Ok(x)
}

/// The map `W(𝔤) ⊗ W(𝔨) ⊗ A → W(𝔤) ⊗ A` with its source algebra.
#[derive(Clone, Debug)]
pub struct ThetaStar {
    pub source: GStarAlgebra,
    pub map: AlgebraMap,
}

/// Generator prefix of the `W(𝔨)` factor in [`theta_g_star`].
pub const K_PREFIX: &str = "k";

/// Substitute `θ_𝔨 ↦ Θ_G`, `u_𝔨 ↦ Ω_G`, identity elsewhere. Checked to
/// intertwine `d`, `ι` and `L` for `𝔤 ⊕ 𝔨`.
pub fn theta_g_star(ec: &EquivariantConnection) -> Result<ThetaStar, ChernError> {
    let ng = ec.g.dim();
    let (wk, _) = build_weil(&ec.k)?;
    let wk = rename_gstar(&wk, K_PREFIX)?;
    let (wg, _) = build_weil(&ec.g)?;
    let inner = block_tensor(&wk, ng, &ec.base)?;
    let source = block_tensor(&wg, 0, &inner)?;
    let target = &ec.joint;
    let nwg = wg.carrier.ngens();
    let nwk = wk.carrier.ngens();
    let mut images: Vec<Element> = (0..nwg).map(|i| Element::generator(&target.carrier, i)).collect();
    images.extend(ec.theta_g.components.iter().cloned());
    images.extend(ec.omega_g_weil.iter().cloned());
    images.extend((0..ec.base.carrier.ngens()).map(|i| Element::generator(&target.carrier, nwg + i)));
    debug_assert_eq!(images.len(), nwg + nwk + ec.base.carrier.ngens());
    let map = AlgebraMap::new(&source.carrier, &target.carrier, images)?;
    let ids: Vec<usize> = (0..source.dim()).collect();
    check_morphism(&source, target, &map, &ids).map_err(ChernError::Axiom)?;
    Ok(ThetaStar { source, map })
}

impl ThetaStar {
    /// Inclusion of `W(𝔤) ⊗ A` into the source (trivial `W(𝔨)` part).
    pub fn inclusion(&self, ec: &EquivariantConnection) -> AlgebraMap {
        let nwg = 2 * ec.g.dim();
        let nwk = 2 * ec.k.dim();
        let images = (0..ec.joint.carrier.ngens())
            .map(|i| {
                let j = if i < nwg { i } else { i + nwk };
                Element::generator(&self.source.carrier, j)
            })
            .collect();
        AlgebraMap::new(&ec.joint.carrier, &self.source.carrier, images).expect("degree-preserving inclusion")
    }
}

/// `W(φ) ⊗ F: W(𝔤₂) ⊗ N → W(𝔤₁) ⊗ M`, with `φ` given by `phi[b][a]`
/// (coefficient of `ξ₂_b` in `φ(ξ₁_a)`) and `F: N → M`. Checked to be a
/// Lie homomorphism and to commute with `d`.
pub fn associated_forms(
    phi: &[Vec<Q>],
    m: &GStarAlgebra,
    n: &GStarAlgebra,
    f: &AlgebraMap,
) -> Result<(AlgebraMap, GStarAlgebra, GStarAlgebra), ChernError> {
    check_homomorphism(&m.lie, &n.lie, phi)?;
    let src = weil_tensor(n)?;
    let tgt = weil_tensor(m)?;
    let (d1, d2) = (m.dim(), n.dim());
    let mut images = Vec::new();
    for block in 0..2 {
        for b in 0..d2 {
            let mut x = Element::zero(&tgt.carrier);
            for a in 0..d1 {
                let c = &phi[b][a];
                if !c.is_zero() {
                    x.add_scaled(&Element::generator(&tgt.carrier, block * d1 + a), c);
                }
            }
            images.push(x);
        }
    }
    let inc = factor_inclusion(&m.carrier, &tgt.carrier, 2 * d1);
    images.extend(f.images().iter().map(|x| inc.apply(x)));
    let map = AlgebraMap::new(&src.carrier, &tgt.carrier, images)?;
    for i in 0..src.carrier.ngens() {
        let g = Element::generator(&src.carrier, i);
        let lhs = map.apply(&src.d.apply(&g));
        let rhs = tgt.d.apply(&map.apply(&g));
        if lhs != rhs {
            return Err(ChernError::Axiom(format!(
                "d does not commute on {}: {lhs} vs {rhs}",
                src.carrier.generators()[i].name
            )));
        }
    }
    Ok((map, src, tgt))
}

/// Evaluation certificate for the polynomial-coefficient witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub polynomial: String,
    pub indices: Vec<usize>,
    pub n: usize,
    pub polarized_value: String,
    pub expected: String,
    pub evaluation: String,
    pub connection: Vec<String>,
    pub ok: bool,
}

/// Build `Θ^a = Σ_{m: i_m = a} x^{2m−1} dx^{2m}` on `ℝ^{2n}` (coefficients
/// truncated at polynomial degree 2), evaluate `ω(Ω, …, Ω)` at the origin
/// and compare the `dx¹…dx^{2n}` coefficient with `n!·ω(ξ_{i₁}, …, ξ_{i_n})`.
/// The indices are searched for (earliest basis vectors first) unless
/// given; given indices are zero-based.
pub fn weil_injectivity_witness(
    omega: &InvariantPolynomial,
    g: &LieAlgebra,
    indices: Option<&[usize]>,
) -> Result<WitnessReport, ChernError> {
    let n = omega.degree;
    let indices: Vec<usize> = match indices {
        Some(ix) => {
            if ix.len() != n || ix.iter().any(|&i| i >= g.dim()) {
                return Err(ChernError::Axiom(format!("expected {n} indices below {}", g.dim())));
            }
            ix.to_vec()
        }
        None => {
            let (alpha, _) = omega.terms().iter().next_back().ok_or(ChernError::NoNonzeroEvaluation)?;
            let mut ix = Vec::new();
            for (a, &e) in alpha.iter().enumerate() {
                ix.extend(std::iter::repeat_n(a, e as usize));
            }
            ix
        }
    };
    let mut gens: Vec<Generator> = (1..=2 * n).map(|i| Generator::new(&format!("x{i}"), 0)).collect();
    gens.extend((1..=2 * n).map(|i| Generator::new(&format!("dx{i}"), 1)));
    let alg = GradedAlgebra::with_cap(&format!("R{}", 2 * n), gens, Some(2))?;
    let mut d_images: Vec<Element> = (0..2 * n).map(|i| Element::generator(&alg, 2 * n + i)).collect();
    d_images.extend((0..2 * n).map(|_| Element::zero(&alg)));
    let d = Derivation::new(&alg, 1, d_images)?;
    let mut comps = vec![Element::zero(&alg); g.dim()];
    for (m, &a) in indices.iter().enumerate() {
        let x = Element::generator(&alg, 2 * m);
        let dx = Element::generator(&alg, 2 * n + 2 * m + 1);
        comps[a] = &comps[a] + &(&x * &dx);
    }
    let conn = ConnectionElement::new(Arc::new(g.clone()), 0, comps.clone());
    let om = curvature_unchecked(&d, &conn);
    let value = substitute(omega, &om, &alg);
    let mut top = vec![0u32; 2 * n];
    top.extend(std::iter::repeat_n(1, 2 * n));
    let evaluation = value.coefficient(&Monomial(top));
    let polarized = omega.polarized(&indices, g.dim());
    let mut fact = Q::one();
    for k in 1..=n {
        fact *= qi(k as i64);
    }
    let expected = fact * &polarized;
    Ok(WitnessReport {
        polynomial: omega.to_string(),
        indices: indices.iter().map(|i| i + 1).collect(),
        n,
        polarized_value: crate::exactlin::fmt_q(&polarized),
        expected: crate::exactlin::fmt_q(&expected),
        evaluation: crate::exactlin::fmt_q(&evaluation),
        connection: comps.iter().map(|c| c.to_string()).collect(),
        ok: evaluation == expected && !expected.is_zero(),
    })
}

/// The rotation instance: `A = Λ(λM)` over `𝔤 ⊕ 𝔨 = u(1) ⊕ u(1)` with
/// `dλM = 0` and both contractions sending `λM` to 1; `Θ = λM`.
pub fn rotation_instance() -> Result<(GStarAlgebra, ConnectionElement), ChernError> {
    let u1 = LieAlgebra::u1();
    let lie = Arc::new(u1.direct_sum(&u1));
    let alg = GradedAlgebra::new("Λ(λM)", vec![Generator::new("λM", 1)])?;
    let one = || Derivation::new(&alg, -1, vec![Element::one(&alg)]);
    let a = GStarAlgebra::new("rotation", lie, Derivation::zero(&alg, 1), vec![one()?, one()?], None, Vec::new())?;
    let theta = ConnectionElement::new(Arc::new(u1), 1, vec![Element::gen(&alg, "λM")]);
    Ok((a, theta))
}

/// The product instance `A = W(𝔤) ⊗ W(𝔨)`, each factor acted on by its
/// own Lie algebra; `Θ = θ_𝔨`. Generators are prefixed `P` and `Q`.
pub fn product_instance(g: &LieAlgebra, k: &LieAlgebra) -> Result<(GStarAlgebra, ConnectionElement), ChernError> {
    let lie = Arc::new(g.direct_sum(k));
    let (wg, _) = build_weil(g)?;
    let (wk, _) = build_weil(k)?;
    let wg = rename_gstar(&wg, "P")?;
    let wk = rename_gstar(&wk, "Q")?;
    let ng = g.dim();
    let carrier = tensor(&wg.carrier, &wk.carrier)?;
    let zero = |alg: &Alg, deg| Derivation::zero(alg, deg);
    let d = crate::gca::tensor_derivation(&carrier, &wg.d, &wk.d)?;
    let mut iota = Vec::new();
    for x in 0..lie.dim() {
        let (a, b) = if x < ng {
            (wg.iota[x].clone(), zero(&wk.carrier, -1))
        } else {
            (zero(&wg.carrier, -1), wk.iota[x - ng].clone())
        };
        iota.push(crate::gca::tensor_derivation(&carrier, &a, &b)?);
    }
    let a = GStarAlgebra::new("product", lie, d, iota, None, Vec::new())?;
    let off = wg.carrier.ngens();
    let comps = (0..k.dim()).map(|e| Element::generator(&carrier, off + e)).collect();
    Ok((a, ConnectionElement::new(Arc::new(k.clone()), ng, comps)))
}

/// Resolve a polynomial argument: `sigmaK` (characteristic coefficient),
/// a product such as `sigma1^2`, or an expression in the `u` generators of
/// `W(𝔤)`.
pub fn resolve_polynomial(text: &str, g: &LieAlgebra) -> Result<InvariantPolynomial, ChernError> {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix("sigma") {
        let (k, power) = match rest.split_once('^') {
            Some((k, p)) => (k.trim(), p.trim()),
            None => (rest, "1"),
        };
        if let (Ok(k), Ok(p)) = (k.parse::<usize>(), power.parse::<u32>()) {
            let base = crate::liealg::characteristic_coefficient(g, k)?;
            let mut out = base.clone();
            for _ in 1..p {
                out = out.product(&base);
            }
            out.name = t.to_string();
            return Ok(out);
        }
    }
    let (w, _) = build_weil(g)?;
    let x = parse_element(&w.carrier, t)?;
    let p = polynomial_from_weil(t, &x, &w)?;
    require_invariant(&p, g)?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::invariant_generators;

    #[test]
    fn abelian_chern_simons_closed_form() {
        let g = LieAlgebra::u1();
        for k in 1..=4 {
            let omega = resolve_polynomial(&format!("u^{k}"), &g).unwrap();
            let cs = chern_simons(&omega, &g).unwrap();
            let expect = if k == 1 { "θ".to_string() } else if k == 2 { "θ·u".into() } else { format!("θ·u^{}", k - 1) };
            assert_eq!(cs.to_string(), expect);
        }
    }

    #[test]
    fn su2_chern_simons_is_a_transgression() {
        let g = LieAlgebra::su2();
        let omega = &invariant_generators(&g, 2).unwrap()[0];
        let cs = chern_simons(omega, &g).unwrap();
        let (w, _) = build_weil(&g).unwrap();
        for l in &w.lie_derivative {
            assert!(l.apply(&cs).is_zero());
        }
        // the cubic term carries the 1/6-type coefficient of the Chern–Simons 3-form
        assert!(cs.terms().keys().any(|m| m.0[..3] == [1, 1, 1]));
    }

    #[test]
    fn chern_weil_examples() {
        let (w, th) = build_weil(&LieAlgebra::u1()).unwrap();
        let u2 = resolve_polynomial("u^2", &LieAlgebra::u1()).unwrap();
        assert_eq!(chern_weil(&u2, &w, &th).unwrap().to_string(), "u^2");
        let (a, mc) = crate::gstar::chevalley_eilenberg(&LieAlgebra::su2()).unwrap();
        let s2 = &invariant_generators(&LieAlgebra::su2(), 2).unwrap()[0];
        assert!(chern_weil(s2, &a, &mc).unwrap().is_zero());
    }

    #[test]
    fn rotation_equivariant_forms() {
        let (a, theta) = rotation_instance().unwrap();
        let ec = equivariant_connection(&a, &theta).unwrap();
        assert_eq!(ec.theta_g.components[0].to_string(), "-θ + λM");
        assert_eq!(ec.omega_g_weil[0].to_string(), "-u");
        assert_eq!(ec.omega_g_cartan[0].to_string(), "-u");
        let u1 = LieAlgebra::u1();
        let c1 = resolve_polynomial("u", &u1).unwrap();
        assert_eq!(equivariant_chern_weil(&c1, &ec).unwrap().to_string(), "-u");
        let c1sq = resolve_polynomial("u^2", &u1).unwrap();
        assert_eq!(equivariant_chern_weil(&c1sq, &ec).unwrap().to_string(), "u^2");
        assert_eq!(equivariant_chern_simons(&c1, &ec).unwrap().to_string(), "-θ + λM");
        let cs2 = equivariant_chern_simons(&c1sq, &ec).unwrap();
        let expect = parse_element(&ec.joint.carrier, "(λM - θ)*(-u)").unwrap();
        assert_eq!(cs2, expect);
    }

    #[test]
    fn product_instance_reduces_to_classical() {
        let (a, theta) = product_instance(&LieAlgebra::u1(), &LieAlgebra::su2()).unwrap();
        let ec = equivariant_connection(&a, &theta).unwrap();
        assert_eq!(ec.theta_g.components[0].to_string(), "Qθ1");
        let ts = theta_g_star(&ec).unwrap();
        let inc = ts.inclusion(&ec);
        assert_eq!(inc.then(&ts.map), AlgebraMap::identity(&ec.joint.carrier));
    }

    #[test]
    fn rotation_theta_star() {
        let (a, theta) = rotation_instance().unwrap();
        let ec = equivariant_connection(&a, &theta).unwrap();
        let ts = theta_g_star(&ec).unwrap();
        let ku = Element::gen(&ts.source.carrier, "ku");
        assert_eq!(ts.map.apply(&ku).to_string(), "-u");
    }

    #[test]
    fn weight_two_map() {
        let u1 = LieAlgebra::u1();
        let pt = crate::gstar::point_model(&u1).unwrap();
        let f = AlgebraMap::identity(&pt.carrier);
        let (map, src, _) = associated_forms(&[vec![qi(2)]], &pt, &pt, &f).unwrap();
        assert_eq!(map.apply(&Element::gen(&src.carrier, "u")).to_string(), "2·u");
        assert_eq!(map.apply(&Element::gen(&src.carrier, "θ")).to_string(), "2·θ");
        let (zero, _, _) = associated_forms(&[vec![qi(0)]], &pt, &pt, &f).unwrap();
        assert!(zero.images().iter().all(Element::is_zero));
    }

    #[test]
    fn witness_values() {
        let u1 = LieAlgebra::u1();
        let r = weil_injectivity_witness(&resolve_polynomial("u", &u1).unwrap(), &u1, None).unwrap();
        assert!(r.ok);
        assert_eq!(r.evaluation, "1");
        let r = weil_injectivity_witness(&resolve_polynomial("u^2", &u1).unwrap(), &u1, None).unwrap();
        assert_eq!(r.evaluation, "2");
        let su2 = LieAlgebra::su2();
        let s2 = resolve_polynomial("sigma2", &su2).unwrap();
        let r = weil_injectivity_witness(&s2, &su2, None).unwrap();
        assert_eq!(r.indices, vec![1, 1]);
        assert_eq!(r.evaluation, "1/2");
        assert!(r.ok);
        let r = weil_injectivity_witness(&s2, &su2, Some(&[2, 2])).unwrap();
        assert!(r.ok);
        assert!(!weil_injectivity_witness(&s2, &su2, Some(&[0, 1])).unwrap().ok);
    }

    #[test]
    fn non_invariant_polynomial_rejected() {
        let su2 = LieAlgebra::su2();
        assert!(matches!(resolve_polynomial("u1^2", &su2), Err(ChernError::NotInvariant(_))));
    }
}
