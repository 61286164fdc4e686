//! Vectors, dense and CSR matrices, and the small dense kernels used as
//! oracles (partial-pivoting LU, determinants, eigenvalues).

use std::ops::{Deref, DerefMut};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{C64, DEFAULT_SMALL_CAP};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Relative pivot floor for [`LuFactors`].
pub const PIVOT_FLOOR: f64 = 1e-14;

/// A complex vector of fixed length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector(Vec<C64>);

impl Vector {
    /// Builds a vector, rejecting empty input and non-finite entries.
    pub fn new(data: Vec<C64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidInput("vector must have length >= 1".into()));
        }
        if let Some(i) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at index {i}"
            )));
        }
        Ok(Self(data))
    }

    pub fn from_real(data: &[f64]) -> Self {
        Self(data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![ZERO; n])
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![ONE; n])
    }

    /// The `i`-th canonical basis vector.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = ONE;
        v
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    /// Real parts of the entries.
    pub fn re(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.re).collect()
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        norm(&self.0, kind)
    }

    /// `(x, y)` stacked into one vector.
    pub fn concat(x: &[C64], y: &[C64]) -> Self {
        let mut v = Vec::with_capacity(x.len() + y.len());
        v.extend_from_slice(x);
        v.extend_from_slice(y);
        Self(v)
    }

    pub(crate) fn from_vec_unchecked(data: Vec<C64>) -> Self {
        Self(data)
    }
}

impl Deref for Vector {
    type Target = [C64];
    fn deref(&self) -> &[C64] {
        &self.0
    }
}

impl DerefMut for Vector {
    fn deref_mut(&mut self) -> &mut [C64] {
        &mut self.0
    }
}

impl From<Vector> for Vec<C64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    #[default]
    Two,
    Inf,
}

impl std::str::FromStr for NormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two" | "2" => Ok(NormKind::Two),
            "inf" | "max" => Ok(NormKind::Inf),
            _ => Err(Error::InvalidInput(format!(
                "unknown norm '{s}' (expected two|inf)"
            ))),
        }
    }
}

pub fn norm(x: &[C64], kind: NormKind) -> f64 {
    match kind {
        NormKind::Two => {
            // scaled to avoid overflow on diverging iterates
            let scale = x
                .iter()
                .fold(0.0f64, |m, z| m.max(z.re.abs()).max(z.im.abs()));
            if scale == 0.0 || !scale.is_finite() {
                return scale;
            }
            let s: f64 = x.iter().map(|z| (z / scale).norm_sqr()).sum();
            scale * s.sqrt()
        }
        NormKind::Inf => x.iter().fold(0.0f64, |m, z| m.max(z.norm())),
    }
}

/// Unconjugated bilinear product `x^T y`.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Hermitian inner product `x^H y`.
pub fn dotc(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Anything that can be applied to a vector.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    fn apply_into(&self, x: &[C64], y: &mut [C64]);

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds from real rows; all rows must have equal length.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(r, c, data)
    }

    /// Matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(n: usize, cols: &[Vec<C64>]) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = col[i];
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn matvec(&self, x: &[C64]) -> Result<Vector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has length {}",
                self.cols,
                x.len()
            )));
        }
        let y = (0..self.rows).map(|i| dot(self.row(i), x)).collect();
        Ok(Vector::from_vec_unchecked(y))
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Plain (unconjugated) transpose.
    pub fn transpose(&self) -> DenseMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &DenseMatrix, f: impl Fn(C64, C64) -> C64) -> Result<DenseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: C64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.rows
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }
}

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row, so duplicate
/// entries cannot be represented; use [`CsrMatrix::from_triplets`] to
/// coalesce them.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<C64>,
    ) -> Result<Self> {
        if row_offsets.len() != rows + 1 {
            return Err(Error::InvalidInput(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                rows + 1
            )));
        }
        if row_offsets[0] != 0 || row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput(
                "row_offsets must start at 0 and be non-decreasing".into(),
            ));
        }
        let nnz = row_offsets[rows];
        if col_indices.len() != nnz || values.len() != nnz {
            return Err(Error::InvalidInput(format!(
                "expected {nnz} stored entries, got {} indices and {} values",
                col_indices.len(),
                values.len()
            )));
        }
        for i in 0..rows {
            let idx = &col_indices[row_offsets[i]..row_offsets[i + 1]];
            if idx.iter().any(|&j| j >= cols) {
                return Err(Error::InvalidInput(format!(
                    "column index out of range in row {i}"
                )));
            }
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidInput(format!(
                    "column indices in row {i} must be strictly increasing"
                )));
            }
        }
        if values
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self {
            rows,
            cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Assembles from `(row, col, value)` triplets, summing duplicates.
    /// Entries that sum to exactly zero are kept.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, C64)],
    ) -> Result<Self> {
        if let Some(&(i, j, _)) = triplets.iter().find(|&&(i, j, _)| i >= rows || j >= cols) {
            return Err(Error::InvalidInput(format!(
                "triplet ({i}, {j}) outside {rows}x{cols}"
            )));
        }
        let mut sorted: Vec<_> = triplets.to_vec();
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_offsets = vec![0usize; rows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<C64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(j);
                values.push(v);
                row_offsets[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Self::new(rows, cols, row_offsets, col_indices, values)
    }

    pub fn from_real_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let t: Vec<_> = triplets
            .iter()
            .map(|&(i, j, v)| (i, j, C64::new(v, 0.0)))
            .collect();
        Self::from_triplets(rows, cols, &t)
    }

    /// Stores every nonzero entry of `m`.
    pub fn from_dense(m: &DenseMatrix) -> Self {
        let mut t = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m[(i, j)] != ZERO {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.rows(), m.cols(), &t).expect("dense entries are valid")
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![ONE; n],
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_offsets: vec![0; rows + 1],
            col_indices: vec![],
            values: vec![],
        }
    }

    /// Banded Toeplitz matrix with `diagonals[k]` on offset `first_offset + k`.
    pub fn banded(n: usize, first_offset: i64, diagonals: &[f64]) -> Self {
        let mut t = Vec::new();
        for i in 0..n {
            for (k, &v) in diagonals.iter().enumerate() {
                let j = i as i64 + first_offset + k as i64;
                if v != 0.0 && (0..n as i64).contains(&j) {
                    t.push((i, j as usize, v));
                }
            }
        }
        Self::from_real_triplets(n, n, &t).expect("band entries are in range")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// `(column, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    /// Iterates over all stored `(row, col, value)` entries.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i))
            .collect()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[C64]) -> Result<Vector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has length {}",
                self.cols,
                x.len()
            )));
        }
        let mut y = vec![ZERO; self.rows];
        self.matvec_into(x, &mut y);
        Ok(Vector::from_vec_unchecked(y))
    }

    /// Unchecked kernel behind [`CsrMatrix::matvec`].
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            *yi = acc;
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// Entrywise `self * a + other * b`; exact zeros are dropped.
    pub fn linear_combination(&self, a: C64, other: &CsrMatrix, b: C64) -> Result<CsrMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("csr shapes differ".into()));
        }
        let t: Vec<_> = self
            .triplets()
            .map(|(i, j, v)| (i, j, v * a))
            .chain(other.triplets().map(|(i, j, v)| (i, j, v * b)))
            .collect();
        Ok(Self::from_triplets(self.rows, self.cols, &t)?.drop_zeros())
    }

    /// Removes stored entries that are exactly zero.
    pub fn drop_zeros(&self) -> CsrMatrix {
        let t: Vec<_> = self.triplets().filter(|&(_, _, v)| v != ZERO).collect();
        Self::from_triplets(self.rows, self.cols, &t).expect("filtered entries stay valid")
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.rows
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        self.matvec_into(x, y);
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl LuFactors {
    /// Fails when a pivot falls below `1e-14 * ||A||_inf`.
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows, a.cols
            )));
        }
        let floor = PIVOT_FLOOR * a.norm_inf();
        let (lu, perm, swaps) = eliminate(a, Some(floor))?;
        Ok(Self {
            n: a.rows,
            lu,
            perm,
            swaps,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vector> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "LU of size {n}, rhs of length {}",
                b.len()
            )));
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: C64 = (0..i).map(|k| self.lu[i * n + k] * x[k]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: C64 = (i + 1..n).map(|k| self.lu[i * n + k] * x[k]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        Ok(Vector::from_vec_unchecked(x))
    }

    pub fn determinant(&self) -> C64 {
        let d: C64 = (0..self.n).map(|i| self.lu[i * self.n + i]).product();
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }
}

fn eliminate(a: &DenseMatrix, floor: Option<f64>) -> Result<(Vec<C64>, Vec<usize>, usize)> {
    let n = a.rows;
    let mut lu = a.data.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[i * n + k].norm()))
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        match floor {
            Some(f) if pmax <= f => {
                return Err(Error::SingularPivot {
                    column: k,
                    pivot: pmax,
                })
            }
            None if pmax == 0.0 => {
                return Err(Error::SingularPivot {
                    column: k,
                    pivot: 0.0,
                })
            }
            _ => {}
        }
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
            swaps += 1;
        }
        let pivot = lu[k * n + k];
        for i in k + 1..n {
            let l = lu[i * n + k] / pivot;
            lu[i * n + k] = l;
            if l != ZERO {
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= l * u;
                }
            }
        }
    }
    Ok((lu, perm, swaps))
}

/// Solves `A x = b` by partial-pivoting LU.
pub fn dense_lu_solve(a: &DenseMatrix, b: &[C64]) -> Result<Vector> {
    LuFactors::new(a)?.solve(b)
}

/// Determinant via partial-pivoting elimination; exactly singular input gives zero.
pub fn determinant(a: &DenseMatrix) -> Result<C64> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(
            "determinant of non-square matrix".into(),
        ));
    }
    match eliminate(a, None) {
        Ok((lu, _, swaps)) => {
            let n = a.rows;
            let d: C64 = (0..n).map(|i| lu[i * n + i]).product();
            Ok(if swaps % 2 == 1 { -d } else { d })
        }
        Err(Error::SingularPivot { .. }) => Ok(ZERO),
        Err(e) => Err(e),
    }
}

/// All eigenvalues of a small square matrix, with multiplicity.
pub fn dense_eigenvalues(a: &DenseMatrix) -> Result<Vec<C64>> {
    dense_eigenvalues_capped(a, DEFAULT_SMALL_CAP)
}

pub fn dense_eigenvalues_capped(a: &DenseMatrix, cap: usize) -> Result<Vec<C64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues need a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    if a.rows > cap {
        return Err(Error::CapExceeded { n: a.rows, cap });
    }
    if a.rows == 0 {
        return Ok(vec![]);
    }
    let schur = nalgebra::Schur::try_new(a.to_nalgebra(), f64::EPSILON, 1000 * a.rows.max(10))
        .ok_or(Error::EigenFailure)?;
    let ev = schur.eigenvalues().ok_or(Error::EigenFailure)?;
    Ok(ev.iter().copied().collect())
}

pub fn spectral_radius(eigs: &[C64]) -> f64 {
    eigs.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hausdorff distance between two finite point sets in the complex plane.
/// Two empty sets are at distance zero.
pub fn hausdorff_distance(a: &[C64], b: &[C64]) -> f64 {
    fn directed(a: &[C64], b: &[C64]) -> f64 {
        a.iter()
            .map(|x| {
                b.iter()
                    .map(|y| (x - y).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    directed(a, b).max(directed(b, a))
}

/// Pairs two multisets greedily by nearest neighbour and returns the largest
/// pair distance. `a` and `b` must have equal length.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .fold((usize::MAX, f64::INFINITY), |best, cur| {
                if cur.1 < best.1 {
                    cur
                } else {
                    best
                }
            });
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn sorted_re(mut v: Vec<C64>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        v.into_iter().map(|z| z.re).collect()
    }

    #[test]
    fn identity_csr_matvec() {
        let x = Vector::from_real(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let y = CsrMatrix::identity(5).matvec(&x).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn skew_tridiag_matvec_telescopes() {
        let b = CsrMatrix::banded(4, -1, &[-0.5, 0.0, 0.5]);
        let y = b.matvec(&Vector::ones(4)).unwrap();
        assert_eq!(y.re(), vec![0.5, 0.0, 0.0, -0.5]);
    }

    #[test]
    fn matvec_dimension_mismatch() {
        let a = CsrMatrix::identity(3);
        assert!(matches!(
            a.matvec(&Vector::ones(4)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn csr_rejects_duplicate_and_unsorted_columns() {
        let r = CsrMatrix::new(1, 3, vec![0, 2], vec![1, 1], vec![c(1.0), c(2.0)]);
        assert!(r.is_err());
        let r = CsrMatrix::new(1, 3, vec![0, 2], vec![2, 0], vec![c(1.0), c(2.0)]);
        assert!(r.is_err());
    }

    #[test]
    fn triplets_coalesce() {
        let a =
            CsrMatrix::from_real_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 2.0), (0, 0, 3.0)]).unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 0), c(4.0));
    }

    #[test]
    fn diagonal_eigenvalues() {
        let a = DenseMatrix::from_real_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        let ev = sorted_re(dense_eigenvalues(&a).unwrap());
        assert_eq!(ev.len(), 3);
        for (got, want) in ev.iter().zip([-1.0, 0.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn swap_and_rank_one_eigenvalues() {
        let a = DenseMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let ev = sorted_re(dense_eigenvalues(&a).unwrap());
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
        let a = DenseMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let ev = sorted_re(dense_eigenvalues(&a).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_reject_non_square_and_large() {
        assert!(dense_eigenvalues(&DenseMatrix::zeros(2, 3)).is_err());
        assert!(matches!(
            dense_eigenvalues_capped(&DenseMatrix::identity(5), 4),
            Err(Error::CapExceeded { n: 5, cap: 4 })
        ));
    }

    #[test]
    fn lu_identity_and_scaling() {
        let b = Vector::from_real(&[0.3, -2.0, 7.5]);
        assert_eq!(dense_lu_solve(&DenseMatrix::identity(3), &b).unwrap(), b);
        let two = DenseMatrix::identity(3).scale(c(2.0));
        let x = dense_lu_solve(&two, &Vector::from_real(&[2.0, 4.0, 6.0])).unwrap();
        assert_eq!(x.re(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn lu_on_demo_matrix() {
        let a = DenseMatrix::from_real_rows(&[
            vec![5.0, 3.0, 2.0, 2.0],
            vec![1.0, 4.0, 3.0, 2.0],
            vec![2.0, 1.0, 4.0, 3.0],
            vec![4.0, 2.0, 1.0, 5.0],
        ])
        .unwrap();
        let b = a.matvec(&Vector::ones(4)).unwrap();
        let x = dense_lu_solve(&a, &b).unwrap();
        for z in x.iter() {
            assert!((z - c(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn lu_singular_pivot() {
        let a = DenseMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(
            dense_lu_solve(&a, &Vector::ones(2)),
            Err(Error::SingularPivot { .. })
        ));
        assert_eq!(determinant(&a).unwrap(), c(0.0));
    }

    #[test]
    fn determinant_sign_tracks_swaps() {
        let a = DenseMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(determinant(&a).unwrap(), c(-1.0));
        assert_eq!(LuFactors::new(&a).unwrap().determinant(), c(-1.0));
    }

    #[test]
    fn norms() {
        assert_eq!(Vector::from_real(&[3.0, 4.0]).norm(NormKind::Two), 5.0);
        assert_eq!(
            Vector::from_real(&[1.0, -7.0, 2.0]).norm(NormKind::Inf),
            7.0
        );
        assert_eq!(Vector::zeros(3).norm(NormKind::Two), 0.0);
        assert_eq!(Vector::zeros(3).norm(NormKind::Inf), 0.0);
    }

    #[test]
    fn vector_rejects_non_finite() {
        assert!(Vector::new(vec![C64::new(f64::NAN, 0.0)]).is_err());
        assert!(Vector::new(vec![]).is_err());
    }

    #[test]
    fn hausdorff_basics() {
        assert_eq!(hausdorff_distance(&[], &[]), 0.0);
        let d = hausdorff_distance(&[c(0.0), c(1.0)], &[c(1.0)]);
        assert_eq!(d, 1.0);
    }
}
