//! Property tests against independent oracles.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use eqcoh::diffcoh::{builtin, DiffCochain, GeometricModel};
use eqcoh::exactlin::{q, smith_normal_form, IntMatrix, Q};
use eqcoh::gca::{Alg, Element, Generator, GradedAlgebra};
use eqcoh::gstar::build_weil;
use eqcoh::liealg::LieAlgebra;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// gcd of all k×k minors.
fn determinantal_divisor(m: &[Vec<i64>], k: usize) -> BigInt {
    let (r, c) = (m.len(), m[0].len());
    let mut g = BigInt::zero();
    for rows in combinations(r, k) {
        for cols in combinations(c, k) {
            let sub: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j]).collect()).collect();
            g = g.gcd(&IntMatrix::from_i64(k, k, &sub).determinant());
        }
    }
    g
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_matches_determinantal_divisors(m in matrix()) {
        let (r, c) = (m.len(), m[0].len());
        let a = IntMatrix::from_i64(r, c, &m);
        let snf = smith_normal_form(&a);
        prop_assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.d.clone());
        prop_assert_eq!(snf.u.determinant().abs(), BigInt::from(1));
        prop_assert_eq!(snf.v.determinant().abs(), BigInt::from(1));
        for i in 0..r {
            for j in 0..c {
                prop_assert!(i == j || snf.d.get(i, j).is_zero());
            }
        }
        let f = snf.invariant_factors();
        for w in f.windows(2) {
            prop_assert!(w[0].is_positive() && w[1].is_multiple_of(&w[0]));
        }
        let mut prod = BigInt::from(1);
        for k in 1..=r.min(c) {
            let dk = determinantal_divisor(&m, k);
            if k <= f.len() {
                prod *= &f[k - 1];
                prop_assert_eq!(&prod, &dk);
            } else {
                prop_assert!(dk.is_zero());
            }
        }
    }
}

/// Coefficient of x^n in ∏ 1/(1 − x^d) over even d times ∏ (1 + x^d) over odd d.
fn series_count(degrees: &[u32], n: usize) -> usize {
    let mut s = vec![0usize; n + 1];
    s[0] = 1;
    for &d in degrees {
        let d = d as usize;
        if d % 2 == 1 {
            for i in (d..=n).rev() {
                s[i] += s[i - d];
            }
        } else {
            for i in d..=n {
                s[i] += s[i - d];
            }
        }
    }
    s[n]
}

fn algebra(degrees: &[u32]) -> Alg {
    let gens = degrees.iter().enumerate().map(|(i, &d)| Generator::new(&format!("x{i}"), d)).collect();
    GradedAlgebra::new("A", gens).unwrap()
}

fn element(alg: &Alg, n: u32, coeffs: &[i64]) -> Element {
    let basis = alg.degree_basis(n).unwrap();
    let v: Vec<Q> = basis.iter().enumerate().map(|(i, _)| q(coeffs[i % coeffs.len()], 1 + (i as i64 % 3))).collect();
    Element::from_vector(alg, &basis, &v)
}

fn sign(a: u32, b: u32) -> Q {
    if a * b % 2 == 1 {
        q(-1, 1)
    } else {
        q(1, 1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn basis_counts_match_generating_function(degrees in prop::collection::vec(1u32..=4, 1..=5), n in 0usize..=9) {
        let alg = algebra(&degrees);
        prop_assert_eq!(alg.degree_basis(n as u32).unwrap().len(), series_count(&degrees, n));
    }

    #[test]
    fn product_is_associative_and_graded_commutative(
        degrees in prop::collection::vec(1u32..=3, 1..=4),
        ns in (0u32..=3, 0u32..=3, 0u32..=3),
        coeffs in prop::collection::vec(-4i64..=4, 2..=6),
    ) {
        let alg = algebra(&degrees);
        let (a, b, c) = (element(&alg, ns.0, &coeffs), element(&alg, ns.1, &coeffs[1..]), element(&alg, ns.2, &coeffs));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, (&b * &a).scale(&sign(ns.0, ns.1)));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn weil_differential_is_a_square_zero_derivation(
        which in 0usize..5,
        ns in (0u32..=3, 0u32..=3),
        coeffs in prop::collection::vec(-4i64..=4, 2..=6),
    ) {
        let g = [LieAlgebra::u1(), LieAlgebra::r2(), LieAlgebra::su2(), LieAlgebra::u2(), LieAlgebra::heisenberg3()][which].clone();
        let (w, _) = build_weil(&g).unwrap();
        let d = &w.d;
        let (a, b) = (element(&w.carrier, ns.0, &coeffs), element(&w.carrier, ns.1, &coeffs[1..]));
        let lhs = d.apply(&(&a * &b));
        let rhs = &(&d.apply(&a) * &b) + &(&a * &d.apply(&b)).scale(&sign(ns.0, 1));
        prop_assert_eq!(lhs, rhs);
        prop_assert!(d.apply(&d.apply(&a)).is_zero());
        for iota in &w.iota {
            prop_assert_eq!(iota.apply(&(&a * &b)), &(&iota.apply(&a) * &b) + &(&a * &iota.apply(&b)).scale(&sign(ns.0, 1)));
        }
    }
}

const MODELS: [&str; 4] = ["cp8", "rp9", "lens3_7", "point"];

fn random_cochain(m: &GeometricModel, level: usize, degree: usize, ints: &[i64]) -> DiffCochain {
    let mut x = m.zero_cochain(level, degree);
    let mut k = 0;
    let mut next = || {
        k += 1;
        ints[k % ints.len()]
    };
    for c in &mut x.c {
        *c = BigInt::from(next());
    }
    for h in &mut x.h {
        *h = q(next(), 1 + next().rem_euclid(4));
    }
    if degree >= level {
        for w in &mut x.omega {
            *w = q(next(), 1 + next().rem_euclid(3));
        }
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn differential_squares_to_zero(which in 0usize..4, level in 0usize..=8, degree in 0usize..=6, ints in prop::collection::vec(-5i64..=5, 1..=8)) {
        let m = builtin(MODELS[which]).unwrap();
        prop_assume!(degree + 2 <= m.top());
        let x = random_cochain(&m, level, degree, &ints);
        let dx = m.differential(&x).unwrap();
        prop_assert!(m.differential(&dx).unwrap().is_zero());
    }

    #[test]
    fn normalize_is_idempotent_and_stays_in_class(
        which in 0usize..4,
        n in 0usize..=6,
        ints in prop::collection::vec(-5i64..=5, 1..=8),
        r in (-7i64..=7, 1i64..=6),
    ) {
        let m = builtin(MODELS[which]).unwrap();
        prop_assume!(n <= m.certified_max());
        let report = m.diff_cohomology(n).unwrap();
        let mut x = m.zero_cochain(n, n);
        if n > 0 {
            let y = random_cochain(&m, n, n - 1, &ints);
            let dy = m.differential(&y).unwrap();
            prop_assert!(m.is_coboundary(&dy).unwrap());
            prop_assert!(m.normalize(&dy).unwrap().is_zero());
            x = x.add(&dy);
        }
        let scalar = q(r.0, r.1);
        for g in &report.lattice_generators {
            x = x.add(&g.scale(&q(r.0, 1)));
        }
        for (_, t) in &report.flat_torsion {
            x = x.add(&t.scale(&q(r.0, 1)));
        }
        for f in report.flat_divisible.iter().chain(&report.exact_forms) {
            x = x.add(&f.scale(&scalar));
        }
        prop_assert!(m.is_cocycle(&x).unwrap());
        let nx = m.normalize(&x).unwrap();
        prop_assert_eq!(m.normalize(&nx).unwrap(), nx.clone());
        prop_assert!(m.is_coboundary_direct(&x.sub(&nx)).unwrap());
        prop_assert_eq!(m.is_coboundary(&x).unwrap(), m.is_coboundary_direct(&x).unwrap());
    }
}
