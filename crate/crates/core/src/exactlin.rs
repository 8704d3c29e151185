//! Exact linear algebra over the rationals and the integers.
//!
//! Everything here is exact: rational matrices are reduced with
//! `BigRational` arithmetic and integer matrices are diagonalised with
//! unimodular row and column operations (Smith normal form). The
//! cohomology of a finite cochain complex is reported as a finitely
//! generated abelian group.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Format a rational as `n` or `n/d`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinError {
    #[error("d_next * d_prev is nonzero")]
    CompositionNonzero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Sparse rational matrix. Only nonzero entries are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Q>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_dense(rows: usize, cols: usize, data: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, row) in data.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_i64(data: &[Vec<i64>]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (i, row) in data.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, qi(x));
            }
        }
        m
    }

    /// Build a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, i: usize, j: usize, x: Q) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        if x.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), x);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = (&(usize, usize), &Q)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        let mut out = vec![vec![Q::zero(); self.cols]; self.rows];
        for (&(i, j), x) in &self.entries {
            out[i][j] = x.clone();
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (&(i, j), x) in &self.entries {
            t.entries.insert((j, i), x.clone());
        }
        t
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = vec![Q::zero(); self.rows];
        for (&(i, j), x) in &self.entries {
            out[i] += x * &v[j];
        }
        out
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut by_row: BTreeMap<usize, Vec<(usize, &Q)>> = BTreeMap::new();
        for (&(k, j), x) in &other.entries {
            by_row.entry(k).or_default().push((j, x));
        }
        let mut acc: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for (&(i, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    *acc.entry((i, j)).or_insert_with(Q::zero) += a * b;
                }
            }
        }
        acc.retain(|_, x| !x.is_zero());
        RationalMatrix { rows: self.rows, cols: other.cols, entries: acc }
    }

    /// Stack `self` on top of `other`.
    pub fn vstack(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut m = self.clone();
        m.rows += other.rows;
        for (&(i, j), x) in &other.entries {
            m.entries.insert((i + self.rows, j), x.clone());
        }
        m
    }

    pub fn rank(&self) -> usize {
        rref(self.to_dense(), self.cols).1.len()
    }

    /// A basis of `{v : m v = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<Q>> {
        kernel_basis(self)
    }

    /// Some `x` with `m x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let mut aug = self.to_dense();
        for (row, bi) in aug.iter_mut().zip(b) {
            row.push(bi.clone());
        }
        let (reduced, pivots) = rref(aug, self.cols + 1);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = reduced[r][self.cols].clone();
        }
        Some(x)
    }
}

/// Reduced row echelon form of the first `ncols` columns. Returns the
/// reduced rows and the pivot columns.
fn rref(mut a: Vec<Vec<Q>>, ncols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let nrows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// A basis of the null space of `m`, one vector per free column of the
/// reduced row echelon form.
pub fn kernel_basis(m: &RationalMatrix) -> Vec<Vec<Q>> {
    let (reduced, pivots) = rref(m.to_dense(), m.cols);
    let mut basis = Vec::new();
    let mut pivot_of_col = vec![None; m.cols];
    for (r, &p) in pivots.iter().enumerate() {
        pivot_of_col[p] = Some(r);
    }
    for free in 0..m.cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![Q::zero(); m.cols];
        v[free] = Q::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -reduced[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Dense integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![vec![BigInt::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    /// `rows` must be given explicitly so that empty matrices keep a shape.
    pub fn from_i64(rows: usize, cols: usize, data: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(rows, cols);
        assert_eq!(data.len(), rows, "row count mismatch");
        for (i, row) in data.iter().enumerate() {
            assert_eq!(row.len(), cols, "column count mismatch");
            for (j, &x) in row.iter().enumerate() {
                m.data[i][j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Vec<BigInt>>) -> Self {
        assert_eq!(data.len(), rows, "row count mismatch");
        assert!(data.iter().all(|r| r.len() == cols), "column count mismatch");
        Self { rows, cols, data }
    }

    /// Matrix with the given columns.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m.data[i][j] = x.clone();
            }
        }
        m
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> IntMatrix {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let q = self.to_rational();
        let n = self.rows;
        let mut out = IntMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![Q::zero(); n];
            e[j] = Q::one();
            let x = q.solve(&e).expect("matrix is not invertible");
            for (i, v) in x.into_iter().enumerate() {
                assert!(v.is_integer(), "matrix is not unimodular");
                out.data[i][j] = v.to_integer();
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i][j] = x;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        self.data
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_qvec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        self.data
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| Q::from_integer(a.clone()) * b)
                    .fold(Q::zero(), |s, x| s + x)
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    pub fn to_rational(&self) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, Q::from_integer(self.data[i][j].clone()));
            }
        }
        m
    }

    /// Determinant by fraction-free Bareiss elimination. Square only.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.data.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.data {
            row.swap(i, j);
        }
    }

    /// row_i += f * row_j
    fn add_row(&mut self, i: usize, j: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        let src = self.data[j].clone();
        for (x, y) in self.data[i].iter_mut().zip(&src) {
            *x += f * y;
        }
    }

    /// col_i += f * col_j
    fn add_col(&mut self, i: usize, j: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for row in &mut self.data {
            let y = row[j].clone();
            row[i] += f * y;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.data[i] {
            *x = -x.clone();
        }
    }
}

/// `u * m * v = d` with `u`, `v` unimodular and `d` diagonal.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries, in order. Each divides the next.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.data[i][i].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form by elementary operations, pivoting on the entry of
/// smallest absolute value in the remaining block.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    for t in 0..r.min(c) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = &a.data[i][j];
                    if x.is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if a.data[bi][bj].abs() <= x.abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(a, u, v);
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..r {
                if a.data[i][t].is_zero() {
                    continue;
                }
                let f = -(&a.data[i][t] / &a.data[t][t]);
                a.add_row(i, t, &f);
                u.add_row(i, t, &f);
                clean &= a.data[i][t].is_zero();
            }
            for j in t + 1..c {
                if a.data[t][j].is_zero() {
                    continue;
                }
                let f = -(&a.data[t][j] / &a.data[t][t]);
                a.add_col(j, t, &f);
                v.add_col(j, t, &f);
                clean &= a.data[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let pivot = a.data[t][t].clone();
            let offender = (t + 1..r).find(|&i| {
                (t + 1..c).any(|j| !a.data[i][j].is_multiple_of(&pivot))
            });
            if let Some(i) = offender {
                a.add_row(t, i, &BigInt::one());
                u.add_row(t, i, &BigInt::one());
                continue;
            }
            if pivot.is_negative() {
                a.negate_row(t);
                u.negate_row(t);
            }
            break;
        }
    }
    finish(a, u, v)
}

fn finish(d: IntMatrix, u: IntMatrix, v: IntMatrix) -> SmithDecomposition {
    SmithDecomposition { u, d, v }
}

/// A ℤ-basis of the integer kernel `{x ∈ ℤ^c : m x = 0}`, as columns.
pub fn integer_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(m);
    (snf.rank()..m.cols).map(|j| snf.v.column(j)).collect()
}

/// A ℤ-basis of the saturated lattice `{y ∈ ℤ^r : yᵀ m = 0}`, as rows.
/// These rows extend to a unimodular matrix.
pub fn integer_left_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(m);
    (snf.rank()..m.rows).map(|i| snf.u.row(i).to_vec()).collect()
}

/// Coefficient rings for cohomology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ring {
    Rationals,
    Integers,
}

/// A finitely generated abelian group `ℤ^r ⊕ ℤ/d_1 ⊕ … ⊕ ℤ/d_k` with
/// `d_i ≥ 2` and `d_i | d_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FGAbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl FGAbelianGroup {
    pub fn trivial() -> Self {
        Self { free_rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        Self { free_rank: rank, torsion: Vec::new() }
    }

    /// Canonicalise from arbitrary cyclic orders by re-running the
    /// divisibility-chain reduction on the diagonal matrix.
    pub fn from_cyclic_orders(free_rank: usize, orders: &[u64]) -> Self {
        let n = orders.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, &o) in orders.iter().enumerate() {
            m.set(i, i, BigInt::from(o));
        }
        let torsion = smith_normal_form(&m)
            .invariant_factors()
            .into_iter()
            .filter_map(|x| x.to_u64())
            .filter(|&x| x > 1)
            .collect();
        Self { free_rank, torsion }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.torsion.iter().all(|&d| d >= 2)
            && self.torsion.windows(2).all(|w| w[1] % w[0] == 0)
    }
}

impl fmt::Display for FGAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("ℤ".to_string()),
            r => parts.push(format!("ℤ^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("ℤ/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

/// `ker(d_next) / im(d_prev)` for integer differentials
/// `d_prev: C^{n-1} → C^n` (shape `dim C^n × dim C^{n-1}`) and
/// `d_next: C^n → C^{n+1}`.
pub fn cohomology_of_complex(
    d_prev: &IntMatrix,
    d_next: &IntMatrix,
    ring: Ring,
) -> Result<FGAbelianGroup, LinError> {
    if d_prev.rows != d_next.cols {
        return Err(LinError::DimensionMismatch(format!(
            "d_prev has {} rows but d_next has {} columns",
            d_prev.rows, d_next.cols
        )));
    }
    if !d_next.mul(d_prev).is_zero() {
        return Err(LinError::CompositionNonzero);
    }
    let dim = d_prev.rows;
    let prev = smith_normal_form(d_prev);
    let next_rank = smith_normal_form(d_next).rank();
    let free_rank = dim - next_rank - prev.rank();
    let torsion = match ring {
        Ring::Rationals => Vec::new(),
        Ring::Integers => prev
            .invariant_factors()
            .into_iter()
            .filter(|x| !x.is_one())
            .map(|x| x.to_u64().expect("torsion order exceeds u64"))
            .collect(),
    };
    Ok(FGAbelianGroup { free_rank, torsion })
}

/// Same as [`cohomology_of_complex`] over ℚ for rational differentials.
pub fn rational_cohomology(
    d_prev: &RationalMatrix,
    d_next: &RationalMatrix,
) -> Result<FGAbelianGroup, LinError> {
    if d_prev.rows != d_next.cols {
        return Err(LinError::DimensionMismatch(format!(
            "d_prev has {} rows but d_next has {} columns",
            d_prev.rows, d_next.cols
        )));
    }
    if !d_next.mul(d_prev).is_zero() {
        return Err(LinError::CompositionNonzero);
    }
    Ok(FGAbelianGroup::free(d_prev.rows - d_next.rank() - d_prev.rank()))
}

/// Convert an integer vector to rationals.
pub fn to_q(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

/// `Some(integers)` when every entry is integral.
pub fn to_integral(v: &[Q]) -> Option<Vec<BigInt>> {
    v.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[i64]]) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        IntMatrix::from_i64(r, c, &rows.iter().map(|x| x.to_vec()).collect::<Vec<_>>())
    }

    fn diag(d: &IntMatrix) -> Vec<i64> {
        (0..d.rows().min(d.cols())).map(|i| d.get(i, i).to_i64().unwrap()).collect()
    }

    #[test]
    fn kernel_of_zero_and_identity() {
        let z = RationalMatrix::from_i64(&[vec![0]]);
        assert_eq!(z.kernel_basis(), vec![vec![qi(1)]]);
        assert!(RationalMatrix::identity(3).kernel_basis().is_empty());
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = RationalMatrix::from_i64(&[vec![1, 1], vec![2, 2]]);
        assert_eq!(m.kernel_basis(), vec![vec![qi(-1), qi(1)]]);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = RationalMatrix::from_i64(&[vec![1, 1], vec![2, 2]]);
        let x = m.solve(&[qi(3), qi(6)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![qi(3), qi(6)]);
        assert!(m.solve(&[qi(1), qi(1)]).is_none());
    }

    #[test]
    fn snf_small_cases() {
        let s = smith_normal_form(&dense(&[&[2]]));
        assert_eq!(diag(&s.d), vec![2]);
        let m = dense(&[&[2, 4], &[6, 8]]);
        let s = smith_normal_form(&m);
        assert_eq!(diag(&s.d), vec![2, 4]);
        assert_eq!(s.u.mul(&m).mul(&s.v), s.d);
    }

    #[test]
    fn snf_of_empty_shapes() {
        let m = IntMatrix::zeros(0, 3);
        let s = smith_normal_form(&m);
        assert_eq!(s.rank(), 0);
        assert_eq!(integer_kernel(&m).len(), 3);
    }

    #[test]
    fn rp2_boundary_gives_two_torsion() {
        // cellular cochains of RP²: δ⁰ = 0, δ¹ = 2
        let d0 = IntMatrix::zeros(1, 1);
        let d1 = dense(&[&[2]]);
        let h1 = cohomology_of_complex(&d0, &d1, Ring::Integers).unwrap();
        assert!(h1.is_trivial());
        let h2 = cohomology_of_complex(&d1, &IntMatrix::zeros(0, 1), Ring::Integers).unwrap();
        assert_eq!(h2, FGAbelianGroup { free_rank: 0, torsion: vec![2] });
    }

    #[test]
    fn nonzero_composition_is_rejected() {
        let a = dense(&[&[1]]);
        assert_eq!(
            cohomology_of_complex(&a, &a, Ring::Integers),
            Err(LinError::CompositionNonzero)
        );
    }

    #[test]
    fn rational_cohomology_of_zero_complex() {
        let z = RationalMatrix::zeros(1, 1);
        assert_eq!(rational_cohomology(&z, &z).unwrap(), FGAbelianGroup::free(1));
    }

    #[test]
    fn left_kernel_is_saturated() {
        // image of (2,2)ᵀ; annihilator is spanned by (1,-1)
        let m = dense(&[&[2], &[2]]);
        let rows = integer_left_kernel(&m);
        assert_eq!(rows.len(), 1);
        let r: Vec<i64> = rows[0].iter().map(|x| x.to_i64().unwrap()).collect();
        assert!(r == vec![1, -1] || r == vec![-1, 1]);
    }

    #[test]
    fn group_display_and_canonical_form() {
        let g = FGAbelianGroup::from_cyclic_orders(1, &[2, 3, 1]);
        assert_eq!(g.torsion, vec![6]);
        assert_eq!(g.to_string(), "ℤ ⊕ ℤ/6");
        assert_eq!(FGAbelianGroup::trivial().to_string(), "0");
    }

    #[test]
    fn bareiss_determinant() {
        assert_eq!(dense(&[&[2, 1], &[1, 1]]).determinant(), BigInt::from(1));
        assert_eq!(dense(&[&[0, 1], &[1, 0]]).determinant(), BigInt::from(-1));
        assert_eq!(dense(&[&[1, 2], &[2, 4]]).determinant(), BigInt::from(0));
    }
}
