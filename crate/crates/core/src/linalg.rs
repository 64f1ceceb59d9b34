//! Dense exact linear algebra over any [`Field`].
//!
//! Row spaces are kept in reduced row-echelon form, so equality of
//! subspaces is entry-wise equality of their [`RowSpace`] values.

use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::field::{Field, FieldTower, MidElement, TopElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular (rank {rank} of {size})")]
    Singular { rank: usize, size: usize },
    #[error("subspace is not contained in the ambient space")]
    NotContained,
    #[error("entry ({row}, {col}) does not lie in the base field")]
    NotInBaseField { row: usize, col: usize },
    #[error("block assembly overflows the target shape")]
    Overflow,
    #[error("no blocks supplied")]
    NoBlocks,
}

/// A dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Copy> Matrix<E> {
    pub fn new(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Builds a matrix from row vectors; `cols` fixes the width when `rows` is empty.
    pub fn from_rows(cols: usize, rows: &[Vec<E>]) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(LinalgError::Shape(format!(
                    "row {i} has length {}, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn row_vector(v: &[E]) -> Self {
        Matrix::new(1, v.len(), v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [E] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)]);
            }
        }
        Matrix::new(self.cols, self.rows, data)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix::new(idx.len(), self.cols, data)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for i in 0..self.rows {
            for &j in idx {
                data.push(self[(i, j)]);
            }
        }
        Matrix::new(self.rows, idx.len(), data)
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let rows: Vec<usize> = (r0..r1).collect();
        let cols: Vec<usize> = (c0..c1).collect();
        self.select_rows(&rows).select_cols(&cols)
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::Shape(format!(
                "vstack of widths {} and {}",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix::new(self.rows + other.rows, self.cols, data))
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::Shape(format!(
                "hstack of heights {} and {}",
                self.rows, other.rows
            )));
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(Matrix::new(self.rows, self.cols + other.cols, data))
    }

    pub fn map<T: Copy>(&self, f: impl Fn(E) -> T) -> Matrix<T> {
        Matrix::new(self.rows, self.cols, self.data.iter().map(|&x| f(x)).collect())
    }
}

impl<E> Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    fn index(&self, (i, j): (usize, usize)) -> &E {
        assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Matrix<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<E: Copy + Eq> Matrix<E> {
    /// Field-aware helpers. All take the field explicitly.
    pub fn zeros<F: Field<Elem = E>>(f: &F, rows: usize, cols: usize) -> Self {
        Matrix::filled(rows, cols, f.zero())
    }

    pub fn identity<F: Field<Elem = E>>(f: &F, n: usize) -> Self {
        let mut m = Matrix::zeros(f, n, n);
        for i in 0..n {
            m[(i, i)] = f.one();
        }
        m
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.data.iter().all(|&x| f.is_zero(x))
    }

    pub fn matmul<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self[(i, t)];
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let cell = &mut out.data[i * other.cols + j];
                    *cell = f.add(*cell, f.mul(a, other[(t, j)]));
                }
            }
        }
        Ok(out)
    }

    /// `self · selfᵀ`.
    pub fn gram<F: Field<Elem = E>>(&self, f: &F) -> Self {
        self.matmul(f, &self.transpose()).expect("gram shape")
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Result<Self, LinalgError> {
        self.zip(other, |a, b| f.add(a, b))
    }

    pub fn sub<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Result<Self, LinalgError> {
        self.zip(other, |a, b| f.sub(a, b))
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, c: E) -> Self {
        self.map(|x| f.mul(c, x))
    }

    fn zip(&self, other: &Self, op: impl Fn(E, E) -> E) -> Result<Self, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::Shape(format!(
                "elementwise op on {:?} and {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Matrix::new(self.rows, self.cols, data))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }
}

/// Dot product of two equal-length vectors.
pub fn dot<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(f.zero(), |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// `v · M` for a row vector `v`.
pub fn vec_mat<F: Field>(f: &F, v: &[F::Elem], m: &Matrix<F::Elem>) -> Vec<F::Elem> {
    debug_assert_eq!(v.len(), m.rows());
    let mut out = vec![f.zero(); m.cols()];
    for (i, &c) in v.iter().enumerate() {
        if f.is_zero(c) {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(m.row(i)) {
            *o = f.add(*o, f.mul(c, x));
        }
    }
    out
}

/// Result of [`rref`]: `transform · input = reduced`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref<E> {
    pub reduced: Matrix<E>,
    pub pivots: Vec<usize>,
    pub transform: Matrix<E>,
}

impl<E> Rref<E> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

fn reduce<F: Field>(
    f: &F,
    m: &mut Matrix<F::Elem>,
    mut transform: Option<&mut Matrix<F::Elem>>,
) -> Vec<usize> {
    let (rows, cols) = m.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !f.is_zero(m[(i, c)])) else {
            continue;
        };
        m.swap_rows(pr, r);
        if let Some(t) = transform.as_deref_mut() {
            t.swap_rows(pr, r);
        }
        let inv = f.inv(m[(r, c)]).expect("pivot is nonzero");
        scale_row(f, m, r, inv);
        if let Some(t) = transform.as_deref_mut() {
            scale_row(f, t, r, inv);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = m[(i, c)];
            if f.is_zero(factor) {
                continue;
            }
            axpy_row(f, m, i, r, factor);
            if let Some(t) = transform.as_deref_mut() {
                axpy_row(f, t, i, r, factor);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn scale_row<F: Field>(f: &F, m: &mut Matrix<F::Elem>, r: usize, c: F::Elem) {
    for x in m.row_mut(r) {
        *x = f.mul(c, *x);
    }
}

/// `row[target] -= factor · row[source]`.
fn axpy_row<F: Field>(f: &F, m: &mut Matrix<F::Elem>, target: usize, source: usize, factor: F::Elem) {
    let cols = m.cols();
    for j in 0..cols {
        let s = m.data[source * cols + j];
        if f.is_zero(s) {
            continue;
        }
        let t = &mut m.data[target * cols + j];
        *t = f.sub(*t, f.mul(factor, s));
    }
}

/// Reduced row-echelon form with the row operations that produce it.
///
/// The pivot in each column is the first nonzero entry at or below the
/// current row.
pub fn rref<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Rref<F::Elem> {
    let mut reduced = m.clone();
    let mut transform = Matrix::identity(f, m.rows());
    let pivots = reduce(f, &mut reduced, Some(&mut transform));
    Rref {
        reduced,
        pivots,
        transform,
    }
}

pub fn rank<F: Field>(f: &F, m: &Matrix<F::Elem>) -> usize {
    let mut work = m.clone();
    reduce(f, &mut work, None).len()
}

/// Right null space `{x : M xᵀ = 0}`.
pub fn kernel<F: Field>(f: &F, m: &Matrix<F::Elem>) -> RowSpace<F::Elem> {
    let cols = m.cols();
    let mut work = m.clone();
    let pivots = reduce(f, &mut work, None);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut gens = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![f.zero(); cols];
        v[free] = f.one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = f.neg(work[(r, free)]);
        }
        gens.push(v);
    }
    let gens = Matrix::from_rows(cols, &gens).expect("kernel rows");
    RowSpace::from_generators(f, &gens)
}

pub fn inverse<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Result<Matrix<F::Elem>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Shape(format!(
            "inverse of non-square {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let r = rref(f, m);
    if r.rank() < m.rows() {
        return Err(LinalgError::Singular {
            rank: r.rank(),
            size: m.rows(),
        });
    }
    Ok(r.transform)
}

pub fn determinant<F: Field>(f: &F, m: &Matrix<F::Elem>) -> Result<F::Elem, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Shape("determinant of non-square matrix".into()));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut det = f.one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !f.is_zero(a[(i, c)])) else {
            return Ok(f.zero());
        };
        if pr != c {
            a.swap_rows(pr, c);
            det = f.neg(det);
        }
        let piv = a[(c, c)];
        det = f.mul(det, piv);
        let inv = f.inv(piv).expect("nonzero pivot");
        for i in c + 1..n {
            let factor = f.mul(a[(i, c)], inv);
            if !f.is_zero(factor) {
                axpy_row(f, &mut a, i, c, factor);
            }
        }
    }
    Ok(det)
}

/// A subspace of `F^ambient`, stored as its RREF basis with no zero rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RowSpace<E> {
    basis: Matrix<E>,
}

impl<E: Copy + Eq> RowSpace<E> {
    pub fn zero(ambient: usize) -> Self {
        RowSpace {
            basis: Matrix::new(0, ambient, Vec::new()),
        }
    }

    pub fn from_generators<F: Field<Elem = E>>(f: &F, gens: &Matrix<E>) -> Self {
        let mut work = gens.clone();
        let r = reduce(f, &mut work, None).len();
        let idx: Vec<usize> = (0..r).collect();
        RowSpace {
            basis: work.select_rows(&idx),
        }
    }

    pub fn full<F: Field<Elem = E>>(f: &F, ambient: usize) -> Self {
        RowSpace {
            basis: Matrix::identity(f, ambient),
        }
    }

    pub fn basis(&self) -> &Matrix<E> {
        &self.basis
    }

    pub fn into_basis(self) -> Matrix<E> {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Pivot column of each basis row.
    pub fn pivots<F: Field<Elem = E>>(&self, f: &F) -> Vec<usize> {
        (0..self.dim())
            .map(|i| {
                self.basis
                    .row(i)
                    .iter()
                    .position(|&x| !f.is_zero(x))
                    .expect("basis rows are nonzero")
            })
            .collect()
    }

    /// Checks the RREF invariant directly.
    pub fn is_canonical<F: Field<Elem = E>>(&self, f: &F) -> bool {
        let pivots = self.pivots(f);
        pivots.windows(2).all(|w| w[0] < w[1])
            && pivots.iter().enumerate().all(|(r, &p)| {
                (0..self.dim()).all(|i| {
                    let x = self.basis[(i, p)];
                    if i == r {
                        x == f.one()
                    } else {
                        f.is_zero(x)
                    }
                })
            })
    }

    pub fn contains<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> bool {
        assert_eq!(v.len(), self.ambient());
        let mut r = v.to_vec();
        for (i, p) in self.pivots(f).into_iter().enumerate() {
            let c = r[p];
            if f.is_zero(c) {
                continue;
            }
            for (x, &b) in r.iter_mut().zip(self.basis.row(i)) {
                *x = f.sub(*x, f.mul(c, b));
            }
        }
        r.iter().all(|&x| f.is_zero(x))
    }

    pub fn contains_space<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> bool {
        (0..other.dim()).all(|i| self.contains(f, other.basis.row(i)))
    }

    pub fn sum<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Result<Self, LinalgError> {
        self.check_ambient(other)?;
        Ok(RowSpace::from_generators(f, &self.basis.vstack(&other.basis)?))
    }

    /// `U ∩ V` from the left kernel of the stacked bases: `x U = y V`.
    pub fn intersect<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Result<Self, LinalgError> {
        self.check_ambient(other)?;
        let a = self.dim();
        let stacked = self.basis.vstack(&other.basis)?;
        let relations = kernel(f, &stacked.transpose());
        let cols: Vec<usize> = (0..a).collect();
        let coeffs = relations.basis().select_cols(&cols);
        let gens = coeffs.matmul(f, &self.basis)?;
        Ok(RowSpace::from_generators(f, &gens))
    }

    /// Orthogonal complement under the standard dot product.
    pub fn orthogonal<F: Field<Elem = E>>(&self, f: &F) -> Self {
        if self.is_zero() {
            return RowSpace::full(f, self.ambient());
        }
        kernel(f, &self.basis)
    }

    fn check_ambient(&self, other: &Self) -> Result<(), LinalgError> {
        if self.ambient() != other.ambient() {
            return Err(LinalgError::Shape(format!(
                "ambient dimensions {} and {}",
                self.ambient(),
                other.ambient()
            )));
        }
        Ok(())
    }
}

/// Incrementally built echelon basis, used for greedy independence scans.
struct Echelon<E> {
    rows: Vec<(usize, Vec<E>)>,
}

impl<E: Copy + Eq> Echelon<E> {
    fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    /// Adds `v` if it is independent of the rows so far.
    fn insert<F: Field<Elem = E>>(&mut self, f: &F, v: &[E]) -> bool {
        let mut r = v.to_vec();
        for (p, row) in &self.rows {
            let c = r[*p];
            if f.is_zero(c) {
                continue;
            }
            for (x, &b) in r.iter_mut().zip(row) {
                *x = f.sub(*x, f.mul(c, b));
            }
        }
        let Some(p) = r.iter().position(|&x| !f.is_zero(x)) else {
            return false;
        };
        let inv = f.inv(r[p]).expect("nonzero");
        for x in r.iter_mut() {
            *x = f.mul(inv, *x);
        }
        self.rows.push((p, r));
        true
    }
}

/// Extends a basis of `sub` to a basis of `full`.
///
/// The first `sub.dim()` rows are the RREF basis of `sub`; the rest are the
/// rows of `full`'s RREF basis that are independent of everything kept so
/// far, taken in order.
pub fn complete_basis<F: Field>(
    f: &F,
    sub: &RowSpace<F::Elem>,
    full: &RowSpace<F::Elem>,
) -> Result<Matrix<F::Elem>, LinalgError> {
    if sub.ambient() != full.ambient() {
        return Err(LinalgError::Shape("ambient mismatch".into()));
    }
    if !full.contains_space(f, sub) {
        return Err(LinalgError::NotContained);
    }
    let mut ech = Echelon::new();
    let mut rows: Vec<Vec<F::Elem>> = Vec::with_capacity(full.dim());
    for i in 0..sub.dim() {
        let inserted = ech.insert(f, sub.basis().row(i));
        debug_assert!(inserted);
        rows.push(sub.basis().row(i).to_vec());
    }
    for i in 0..full.dim() {
        if rows.len() == full.dim() {
            break;
        }
        let v = full.basis().row(i);
        if ech.insert(f, v) {
            rows.push(v.to_vec());
        }
    }
    Matrix::from_rows(full.ambient(), &rows)
}

/// Block-diagonal assembly of square (possibly empty) blocks.
pub fn block_diag<F: Field>(f: &F, blocks: &[Matrix<F::Elem>]) -> Result<Matrix<F::Elem>, LinalgError> {
    if blocks.is_empty() {
        return Err(LinalgError::NoBlocks);
    }
    if let Some(b) = blocks.iter().find(|b| !b.is_square()) {
        return Err(LinalgError::Shape(format!(
            "block_diag needs square blocks, got {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = Matrix::zeros(f, n, n);
    let mut at = 0;
    for b in blocks {
        out = embed_into(out, b, (at, at))?;
        at += b.rows();
    }
    Ok(out)
}

/// Places `m` at offset `at` inside a zero matrix of shape `into`.
pub fn embed<F: Field>(
    f: &F,
    m: &Matrix<F::Elem>,
    at: (usize, usize),
    into: (usize, usize),
) -> Result<Matrix<F::Elem>, LinalgError> {
    embed_into(Matrix::zeros(f, into.0, into.1), m, at)
}

fn embed_into<E: Copy>(mut target: Matrix<E>, m: &Matrix<E>, at: (usize, usize)) -> Result<Matrix<E>, LinalgError> {
    if at.0 + m.rows() > target.rows() || at.1 + m.cols() > target.cols() {
        return Err(LinalgError::Overflow);
    }
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            target[(at.0 + i, at.1 + j)] = m[(i, j)];
        }
    }
    Ok(target)
}

/// Canonical inclusion of a base-field matrix into the top field.
pub fn lift(tower: &FieldTower, m: &Matrix<MidElement>) -> Matrix<TopElement> {
    m.map(|x| tower.lift(x))
}

/// Inverse of [`lift`] on matrices whose entries all lie in `F_q`.
pub fn project_check(tower: &FieldTower, m: &Matrix<TopElement>) -> Result<Matrix<MidElement>, LinalgError> {
    let mut data = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let x = tower
                .project(m[(i, j)])
                .ok_or(LinalgError::NotInBaseField { row: i, col: j })?;
            data.push(x);
        }
    }
    Ok(Matrix::new(m.rows(), m.cols(), data))
}
