//! Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic
//! throughout. Runs without the libtest harness so the lines always show.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::sync::Arc;

use eqcoh::chern::{
    chern_simons, equivariant_chern_simons, equivariant_chern_weil, equivariant_connection, polynomial_in_weil,
    product_instance, pullback_connection, resolve_polynomial, rotation_instance, theta_g_star,
    weil_injectivity_witness,
};
use eqcoh::cli::MODELS;
use eqcoh::diffcoh::{cp, lens, rp, sample_scalars, DiffCochain, GeometricModel};
use eqcoh::exactlin::{q, Q};
use eqcoh::gca::{parse_element, AlgebraMap, Derivation, Element, Generator, GradedAlgebra};
use eqcoh::gstar::{
    build_weil, check_connection, check_gstar, cohomology, compare_cartan, iota_curvature, koszul_derivation,
    weil_tensor, ConnectionElement, GStarAlgebra,
};
use eqcoh::liealg::{invariant_generators, LieAlgebra};
use eqcoh::modelfile::{parse_model, print_model};
use num_bigint::BigInt;

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn test_algebras() -> Vec<LieAlgebra> {
    vec![LieAlgebra::u1(), LieAlgebra::r2(), LieAlgebra::su2(), LieAlgebra::u2(), LieAlgebra::heisenberg3()]
}

fn su2_x3() -> GStarAlgebra {
    let su2 = Arc::new(LieAlgebra::su2());
    let alg = GradedAlgebra::new("Λ(x3)", vec![Generator::new("x3", 3)]).unwrap();
    let zero = |deg| Derivation::zero(&alg, deg);
    let a = GStarAlgebra::new("Λ(x3)", su2, zero(1), vec![zero(-1), zero(-1), zero(-1)], None, Vec::new()).unwrap();
    weil_tensor(&a).unwrap()
}

fn c1_gstar_axioms() -> Check {
    for g in test_algebras() {
        let (w, _) = build_weil(&g).map_err(|e| e.to_string())?;
        let r = check_gstar(&w, 8).map_err(|e| e.to_string())?;
        ensure(r.is_ok(), || format!("{}: {}", g.name, r.violations[0]))?;
        ensure(r.max_degree == 8 && r.checked_monomials > 0, || format!("{}: nothing checked", g.name))?;
    }
    Ok(())
}

fn c2_weil_acyclic() -> Check {
    let (w, _) = build_weil(&LieAlgebra::su2()).map_err(|e| e.to_string())?;
    let h = cohomology(&w, 6).map_err(|e| e.to_string())?;
    let dims: Vec<usize> = h.iter().map(|g| g.free_rank).collect();
    ensure(dims == vec![1, 0, 0, 0, 0, 0, 0], || format!("dimensions {dims:?}"))
}

fn c3_koszul_contraction() -> Check {
    for g in test_algebras() {
        let (w, th) = build_weil(&g).map_err(|e| e.to_string())?;
        let ic = iota_curvature(&w, &th).map_err(|e| e.to_string())?;
        let dk = koszul_derivation(&w).map_err(|e| e.to_string())?;
        for i in 0..w.carrier.ngens() {
            ensure(ic.image(i) == dk.image(i), || format!("{}: generator {i}: {} vs {}", g.name, ic.image(i), dk.image(i)))?;
        }
    }
    Ok(())
}

fn c4_mathai_quillen() -> Check {
    let (a, theta) = rotation_instance().map_err(|e| e.to_string())?;
    let ec = equivariant_connection(&a, &theta).map_err(|e| e.to_string())?;
    for (label, alg) in [("rotation", ec.weil_g.clone()), ("W(su2)⊗Λ(x3)", su2_x3())] {
        let r = compare_cartan(&alg, 8).map_err(|e| e.to_string())?;
        ensure(r.is_ok(), || format!("{label}: {}", r.failures[0]))?;
        ensure(r.inverse_exact && r.conjugation_matches && r.dc_squares_to_zero, || format!("{label}: flags {r:?}"))?;
    }
    Ok(())
}

fn c5_transgression() -> Check {
    let u1 = LieAlgebra::u1();
    for (k, expect) in [(2, "θ·u"), (3, "θ·u^2")] {
        let omega = resolve_polynomial(&format!("u^{k}"), &u1).map_err(|e| e.to_string())?;
        let cs = chern_simons(&omega, &u1).map_err(|e| e.to_string())?;
        ensure(cs.to_string() == expect, || format!("CS_u^{k} = {cs}"))?;
    }
    let cases = [
        (LieAlgebra::su2(), invariant_generators(&LieAlgebra::su2(), 2).map_err(|e| e.to_string())?[0].clone()),
        (LieAlgebra::u2(), resolve_polynomial("sigma1^2", &LieAlgebra::u2()).map_err(|e| e.to_string())?),
        (LieAlgebra::u2(), resolve_polynomial("sigma2", &LieAlgebra::u2()).map_err(|e| e.to_string())?),
    ];
    for (g, omega) in cases {
        let cs = chern_simons(&omega, &g).map_err(|e| e.to_string())?;
        let (w, _) = build_weil(&g).map_err(|e| e.to_string())?;
        ensure(w.d.apply(&cs) == polynomial_in_weil(&omega, &w), || format!("{} {}: d CS ≠ ω", g.name, omega.name))?;
    }
    Ok(())
}

fn c6_equivariant_connection() -> Check {
    let (a, theta) = rotation_instance().map_err(|e| e.to_string())?;
    let ec = equivariant_connection(&a, &theta).map_err(|e| e.to_string())?;
    ec.verify().map_err(|e| e.to_string())?;
    let tg = &ec.theta_g.components[0];
    ensure(tg == &parse_element(&ec.joint.carrier, "λM - θ").unwrap(), || format!("Θ_G = {tg}"))?;
    for (i, l) in ec.joint.iota.iter().zip(&ec.joint.lie_derivative).take(ec.g.dim()) {
        ensure(i.apply(tg).is_zero() && l.apply(tg).is_zero(), || "Θ_G not 𝔤-basic".into())?;
    }
    ensure(ec.omega_g_cartan[0].to_string() == "-u", || format!("Cartan curvature {}", ec.omega_g_cartan[0]))?;
    let u1 = LieAlgebra::u1();
    let lin = resolve_polynomial("u", &u1).map_err(|e| e.to_string())?;
    let cs = equivariant_chern_simons(&lin, &ec).map_err(|e| e.to_string())?;
    ensure(ec.joint.d.apply(&cs) == ec.omega_g_weil[0], || "d_G CS_u(Θ_G) ≠ Ω_G".into())?;
    let sq = resolve_polynomial("u^2", &u1).map_err(|e| e.to_string())?;
    let cs2 = equivariant_chern_simons(&sq, &ec).map_err(|e| e.to_string())?;
    let cw2 = equivariant_chern_weil(&sq, &ec).map_err(|e| e.to_string())?;
    ensure(ec.joint.d.apply(&cs2) == cw2, || "d_G CS_u²(Θ_G) ≠ ω(Ω_G)".into())
}

fn pullback_check(a: &GStarAlgebra, theta: &ConnectionElement) -> Check {
    let ng = a.dim() - theta.lie.dim();
    let g = a.lie.block("g", 0, ng);
    let (w, tw) = build_weil(&g).map_err(|e| e.to_string())?;
    let pb = pullback_connection(&w, &tw, a, theta).map_err(|e| e.to_string())?;
    for (x, iota) in pb.total.iota.iter().enumerate() {
        for (e, comp) in pb.connection.components.iter().enumerate() {
            let v = iota.apply(comp);
            let expect = if x == e { Element::one(&pb.total.carrier) } else { Element::zero(&pb.total.carrier) };
            ensure(v == expect, || format!("ι_{}(Θ^{}) = {v}", x + 1, e + 1))?;
        }
    }
    check_connection(&pb.total, &pb.connection).map_err(|e| e.to_string())?;
    let ec = equivariant_connection(a, theta).map_err(|e| e.to_string())?;
    let ts = theta_g_star(&ec).map_err(|e| e.to_string())?;
    let composed = ts.inclusion(&ec).then(&ts.map);
    ensure(composed == AlgebraMap::identity(&ec.joint.carrier), || "θ_G* ∘ inclusion is not the identity".into())
}

fn c7_pullback() -> Check {
    let (a, theta) = rotation_instance().map_err(|e| e.to_string())?;
    pullback_check(&a, &theta).map_err(|e| format!("rotation: {e}"))?;
    let (a, theta) = product_instance(&LieAlgebra::u1(), &LieAlgebra::su2()).map_err(|e| e.to_string())?;
    pullback_check(&a, &theta).map_err(|e| format!("product: {e}"))
}

fn c8_witness() -> Check {
    let u1 = LieAlgebra::u1();
    let su2 = LieAlgebra::su2();
    let cases = [(u1.clone(), "u", "1"), (u1, "u^2", "2"), (su2, "sigma2", "1/2")];
    for (g, poly, value) in cases {
        let omega = resolve_polynomial(poly, &g).map_err(|e| e.to_string())?;
        let r = weil_injectivity_witness(&omega, &g, None).map_err(|e| e.to_string())?;
        ensure(r.ok && r.evaluation == value && r.expected == value, || format!("{} {poly}: {r:?}", g.name))?;
    }
    Ok(())
}

fn model_err<T>(r: Result<T, eqcoh::diffcoh::DiffCohError>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn flat(m: &GeometricModel, k: usize, r: Q) -> Result<DiffCochain, String> {
    model_err(m.cochain(2 * k + 1, 2 * k + 1, Vec::new(), vec![r], Vec::new()))
}

fn even(m: &GeometricModel, k: usize, n: i64) -> Result<DiffCochain, String> {
    let t = Element::gen(&m.forms.gstar.carrier, "t").pow(k as u32).scale(&Q::from_integer(n.into()));
    model_err(m.cochain_with_form(2 * k, 2 * k, vec![BigInt::from(n)], Vec::new(), &t))
}

fn c9_circle() -> Check {
    let m = model_err(cp(8))?;
    for k in 1..=3 {
        let r = model_err(m.diff_cohomology(2 * k))?;
        ensure(r.total.rank == 1 && r.total.torsion.is_empty() && r.total.qz_rank == 0 && r.total.q_rank == 0, || {
            format!("Ȟ^{} = {}", 2 * k, r.total)
        })?;
        let g = &r.lattice_generators[0];
        ensure(g == &even(&m, k, 1)?, || format!("generator {}", m.format(g)))?;
        for s in sample_scalars() {
            let x = flat(&m, k, s.clone())?;
            ensure(model_err(m.is_cocycle(&x))?, || "flat triple is not a cocycle".into())?;
            let cob = model_err(m.is_coboundary(&x))?;
            ensure(cob == s.is_integer(), || format!("(0, {s}·α^{k}, 0): coboundary = {cob}"))?;
        }
    }
    Ok(())
}

fn c10_finite_group() -> Check {
    let m = model_err(rp(9))?;
    for n in 2..=8 {
        let r = model_err(m.diff_cohomology(n))?;
        let h = model_err(m.integral_cohomology(n))?;
        let expect: Vec<u64> = if n % 2 == 0 { vec![2] } else { vec![] };
        ensure(r.total.rank == 0 && r.total.qz_rank == 0 && r.total.q_rank == 0, || format!("Ȟ^{n} = {}", r.total))?;
        ensure(r.total.torsion == expect && h.torsion == expect && h.free_rank == 0, || format!("Ȟ^{n} = {} vs H^{n} = {h}", r.total))?;
    }
    let r1 = model_err(m.diff_cohomology(1))?;
    ensure(r1.total.presentation == "ℚ/ℤ", || format!("Ȟ^1 = {}", r1.total))?;
    let m = model_err(lens(3, 7))?;
    for n in 2..=6 {
        let r = model_err(m.diff_cohomology(n))?;
        let expect = if n % 2 == 0 { "ℤ/3" } else { "0" };
        ensure(r.total.presentation == expect, || format!("lens Ȟ^{n} = {}", r.total))?;
    }
    ensure(model_err(m.diff_cohomology(1))?.total.presentation == "ℚ/ℤ", || "lens Ȟ^1".into())
}

fn c11_ring() -> Check {
    let m = model_err(cp(8))?;
    for (n, k1, k2, r) in [(3, 1, 2, q(2, 5)), (-2, 2, 0, q(1, 3)), (1, 1, 1, q(7, 5))] {
        let x = even(&m, k1, n)?;
        let y = flat(&m, k2, r.clone())?;
        let expect = model_err(m.cochain(2 * (k1 + k2) + 1, 2 * (k1 + k2) + 1, Vec::new(), vec![Q::from_integer(n.into()) * &r], Vec::new()))?;
        let xy = model_err(m.product(&x, &y))?;
        ensure(xy == expect, || format!("even·odd = {}", m.format(&xy)))?;
        let yx = model_err(m.product(&y, &x))?;
        ensure(model_err(m.is_coboundary(&yx.sub(&xy)))?, || "odd·even ≠ even·odd in cohomology".into())?;
    }
    let p = model_err(m.product(&flat(&m, 1, q(1, 2))?, &flat(&m, 2, q(2, 3))?))?;
    ensure(p.is_zero(), || format!("odd·odd = {}", m.format(&p)))?;
    for (k1, k2) in [(1, 1), (1, 2), (2, 1)] {
        let (x, y) = (even(&m, k1, 2)?, even(&m, k2, -3)?);
        let xy = model_err(m.product(&x, &y))?;
        ensure(model_err(m.is_cocycle(&xy))?, || "product of cocycles is not a cocycle".into())?;
        let cc_lhs = model_err(m.cc(&xy))?;
        let cup = m.integral_class(2 * (k1 + k2), &[BigInt::from(-6)]);
        ensure(cc_lhs == cup, || "cc is not multiplicative".into())?;
        let curv = model_err(m.curv(&xy))?;
        let wedge = &model_err(m.curv(&x))? * &model_err(m.curv(&y))?;
        ensure(curv == wedge, || "curv is not multiplicative".into())?;
    }
    let x = even(&m, 2, 5)?;
    ensure(model_err(m.product(&x, &model_err(m.unit())?))? == x, || "unit".into())
}

fn c12_ses() -> Check {
    for (m, range) in [(model_err(cp(8))?, 2..=6), (model_err(rp(9))?, 2..=8)] {
        for n in range {
            let r = model_err(m.verify_ses(n))?;
            if let Some(c) = r.checks.iter().find(|c| !c.passed) {
                return Err(format!("{} degree {n}: {} ({:?})", m.name, c.name, c.counterexamples));
            }
        }
    }
    Ok(())
}

fn c13_cli() -> Check {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let mut cases: Vec<PathBuf> = fs::read_dir(root.join("tests/golden/cases"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "args"))
        .collect();
    cases.sort();
    ensure(!cases.is_empty(), || "empty golden corpus".into())?;
    for case in &cases {
        let args: Vec<String> = fs::read_to_string(case).map_err(|e| e.to_string())?.lines().map(String::from).collect();
        let out = Command::new(env!("CARGO_BIN_EXE_eqcoh")).args(&args).current_dir(&root).output().map_err(|e| e.to_string())?;
        let read = |ext| fs::read(case.with_extension(ext)).map_err(|e| e.to_string());
        let code: i32 = String::from_utf8_lossy(&read("code")?).trim().parse().map_err(|_| "bad code file".to_string())?;
        ensure(out.stdout == read("stdout")? && out.stderr == read("stderr")?, || format!("{} output differs", case.display()))?;
        ensure(out.status.code() == Some(code), || format!("{} exit code", case.display()))?;
        let name = case.file_stem().unwrap().to_string_lossy();
        let contract = if name.starts_with("err_") { 2 } else if name.ends_with("_bad") { 1 } else { 0 };
        ensure(code == contract, || format!("{name}: exit {code} breaks the contract"))?;
    }
    for (name, text) in MODELS {
        let f = parse_model(text).map_err(|e| format!("{name}: {e}"))?;
        ensure(print_model(&f) == *text, || format!("{name}: print ∘ parse is not the identity"))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 13] = [
        ("G★ axioms on W(g) through degree 8", c1_gstar_axioms),
        ("Weil acyclicity of W(su2) through degree 6", c2_weil_acyclic),
        ("Koszul differential equals contraction with curvature", c3_koszul_contraction),
        ("Mathai-Quillen conjugation gives the Cartan differential", c4_mathai_quillen),
        ("transgression d CS = ω", c5_transgression),
        ("equivariant connection on the rotation instance", c6_equivariant_connection),
        ("pullback connection and θ_G* splitting", c7_pullback),
        ("injectivity witness", c8_witness),
        ("differential cohomology of the circle on cp8", c9_circle),
        ("differential cohomology of ℤ/2 and ℤ/3", c10_finite_group),
        ("ring structure on cp8", c11_ring),
        ("short exact sequences and the square", c12_ses),
        ("CLI golden corpus, round trip, exit codes", c13_cli),
    ];
    let mut passed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match r {
            Ok(()) => {
                passed += 1;
                println!("PASS {:>2} {name}", i + 1);
            }
            Err(e) => println!("FAIL {:>2} {name}: {e}", i + 1),
        }
    }
    println!("{passed}/{} criteria pass", criteria.len());
    if passed == criteria.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
