//! Circulant operators `M = F D F^{-1}`.
//!
//! Conventions:
//! - forward DFT `X_k = sum_j x_j exp(-2 pi i jk/n)`, inverse carries `1/n`;
//! - a circulant is described by its first column `c`, entry `(i, j)` is
//!   `c[(i - j) mod n]`, and its eigenvalues are `dft(c)`;
//! - stencil offsets count `i - j`, i.e. positive offsets sit below the
//!   diagonal. The centered row notation `circulant(a, b, c)` puts `a` on the
//!   sub-diagonal, `b` on the diagonal and `c` on the super-diagonal.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, LinearOperator, Vector};
use crate::{C64, DEFAULT_SMALL_CAP};

/// Relative threshold below which a circulant eigenvalue counts as zero.
pub const SINGULAR_RTOL: f64 = 1e-12;

pub fn dft(x: &[C64]) -> Vector {
    let mut buf = x.to_vec();
    if !buf.is_empty() {
        FftPlanner::new()
            .plan_fft_forward(buf.len())
            .process(&mut buf);
    }
    Vector::from_vec_unchecked(buf)
}

pub fn idft(x: &[C64]) -> Vector {
    let mut buf = x.to_vec();
    let n = buf.len();
    if n > 0 {
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        let s = 1.0 / n as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }
    Vector::from_vec_unchecked(buf)
}

/// Sparse band description of one circulant row.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    offsets: Vec<i64>,
    coefficients: Vec<C64>,
}

impl Stencil {
    /// `offsets[k]` is the `i - j` distance carrying `coefficients[k]`.
    pub fn new(offsets: Vec<i64>, coefficients: Vec<C64>) -> Result<Self> {
        if offsets.len() != coefficients.len() {
            return Err(Error::DimensionMismatch(
                "stencil offsets and coefficients differ in length".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for &o in &offsets {
            if !seen.insert(o) {
                return Err(Error::InvalidInput(format!("duplicate stencil offset {o}")));
            }
        }
        Ok(Self {
            offsets,
            coefficients,
        })
    }

    /// Centered row notation: `row[k]` sits `p - k` places below the
    /// diagonal, where `row.len() == 2p + 1`.
    pub fn centered(row: &[C64]) -> Result<Self> {
        if row.len().is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "centered stencil needs odd length, got {}",
                row.len()
            )));
        }
        let p = (row.len() / 2) as i64;
        let offsets = (0..row.len() as i64).map(|k| p - k).collect();
        Self::new(offsets, row.to_vec())
    }

    pub fn centered_real(row: &[f64]) -> Result<Self> {
        Self::centered(&row.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    pub fn half_width(&self) -> i64 {
        self.offsets.iter().map(|o| o.abs()).max().unwrap_or(0)
    }

    /// Stencil of the product of the two circulants.
    pub fn convolve(&self, other: &Stencil) -> Stencil {
        let mut acc: BTreeMap<i64, C64> = BTreeMap::new();
        for (&o1, &c1) in self.offsets.iter().zip(&self.coefficients) {
            for (&o2, &c2) in other.offsets.iter().zip(&other.coefficients) {
                *acc.entry(o1 + o2).or_default() += c1 * c2;
            }
        }
        let (offsets, coefficients) = acc.into_iter().unzip();
        Stencil {
            offsets,
            coefficients,
        }
    }
}

/// Circulant matrix with cached eigenvalues and FFT plans.
#[derive(Clone)]
pub struct Circulant {
    first_column: Vector,
    eigenvalues: Vector,
    singular: Option<(usize, f64)>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Circulant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Circulant")
            .field("n", &self.n())
            .field("first_column", &self.first_column)
            .finish_non_exhaustive()
    }
}

impl PartialEq for Circulant {
    fn eq(&self, other: &Self) -> bool {
        self.first_column == other.first_column
    }
}

impl Circulant {
    pub fn from_first_column(first_column: Vector) -> Self {
        let n = first_column.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let mut eig = first_column.to_vec();
        forward.process(&mut eig);
        let max = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let singular = eig
            .iter()
            .enumerate()
            .map(|(k, z)| (k, z.norm()))
            .filter(|&(_, m)| m <= SINGULAR_RTOL * max || m == 0.0)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        Self {
            first_column,
            eigenvalues: Vector::from_vec_unchecked(eig),
            singular,
            forward,
            inverse,
        }
    }

    /// Circulant whose first row is `row`.
    pub fn from_first_row(row: &[C64]) -> Self {
        let n = row.len();
        let col = (0..n).map(|i| row[(n - i) % n]).collect();
        Self::from_first_column(Vector::from_vec_unchecked(col))
    }

    pub fn from_stencil(n: usize, stencil: &Stencil) -> Result<Self> {
        let p = stencil.half_width();
        if n == 0 || (n as i64) <= 2 * p {
            return Err(Error::InvalidInput(format!(
                "circulant of size {n} too small for stencil half-width {p} (need n > {})",
                2 * p
            )));
        }
        let mut col = vec![C64::new(0.0, 0.0); n];
        let mut used = vec![false; n];
        for (&o, &c) in stencil.offsets().iter().zip(stencil.coefficients()) {
            let k = o.rem_euclid(n as i64) as usize;
            if used[k] {
                return Err(Error::StencilCollision { offset: o, n });
            }
            used[k] = true;
            col[k] = c;
        }
        Ok(Self::from_first_column(Vector::from_vec_unchecked(col)))
    }

    pub fn n(&self) -> usize {
        self.first_column.len()
    }

    pub fn first_column(&self) -> &Vector {
        &self.first_column
    }

    pub fn first_row(&self) -> Vec<C64> {
        let n = self.n();
        (0..n).map(|j| self.first_column[(n - j) % n]).collect()
    }

    /// `dft(first_column)`, computed once at construction.
    pub fn eigenvalues(&self) -> &Vector {
        &self.eigenvalues
    }

    pub fn is_singular(&self) -> bool {
        self.singular.is_some()
    }

    /// `max |lambda| / min |lambda|`.
    pub fn condition_number(&self) -> f64 {
        let (lo, hi) = self
            .eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), m| {
                (lo.min(m), hi.max(m))
            });
        hi / lo
    }

    /// Entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        let n = self.n();
        self.first_column[(i + n - j % n) % n]
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "circulant of size {}, vector of length {len}",
                self.n()
            )));
        }
        Ok(())
    }

    fn spectral_op(&self, x: &[C64], out: &mut [C64], f: impl Fn(C64, C64) -> C64) {
        out.copy_from_slice(x);
        self.forward.process(out);
        for (z, &l) in out.iter_mut().zip(self.eigenvalues.iter()) {
            *z = f(*z, l);
        }
        self.inverse.process(out);
        let s = 1.0 / self.n() as f64;
        out.iter_mut().for_each(|z| *z *= s);
    }

    pub fn matvec(&self, x: &[C64]) -> Result<Vector> {
        self.check_len(x.len())?;
        let mut y = vec![C64::new(0.0, 0.0); self.n()];
        self.matvec_into(x, &mut y);
        Ok(Vector::from_vec_unchecked(y))
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        self.spectral_op(x, y, |z, l| z * l);
    }

    /// `x = idft(dft(b) / eigenvalues)`.
    pub fn solve(&self, b: &[C64]) -> Result<Vector> {
        self.check_len(b.len())?;
        let mut x = vec![C64::new(0.0, 0.0); self.n()];
        self.solve_into(b, &mut x)?;
        Ok(Vector::from_vec_unchecked(x))
    }

    pub fn solve_into(&self, b: &[C64], x: &mut [C64]) -> Result<()> {
        if let Some((index, modulus)) = self.singular {
            return Err(Error::SingularCirculant { index, modulus });
        }
        self.spectral_op(b, x, |z, l| z / l);
        Ok(())
    }

    pub fn densify(&self) -> Result<DenseMatrix> {
        self.densify_capped(DEFAULT_SMALL_CAP)
    }

    pub fn densify_capped(&self, cap: usize) -> Result<DenseMatrix> {
        let n = self.n();
        if n > cap {
            return Err(Error::CapExceeded { n, cap });
        }
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.entry(i, j);
            }
        }
        Ok(m)
    }

    /// Positions `k` with a nonzero first-column entry.
    pub(crate) fn support(&self) -> Vec<(usize, C64)> {
        self.first_column
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, c)| *c != C64::new(0.0, 0.0))
            .collect()
    }
}

impl LinearOperator for Circulant {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        self.matvec_into(x, y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn dft_delta_and_constant() {
        let d = dft(&[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert!(close(&d, &[c(1.0); 4], 1e-15));
        let d = dft(&[c(1.0); 4]);
        assert!(close(&d, &[c(4.0), c(0.0), c(0.0), c(0.0)], 1e-15));
    }

    #[test]
    fn tridiagonal_stencil_first_column() {
        let s = Stencil::centered_real(&[-5.0 / 6.0, 8.0 / 3.0, -5.0 / 6.0]).unwrap();
        let m = Circulant::from_stencil(5, &s).unwrap();
        assert_eq!(
            m.first_column().re(),
            vec![8.0 / 3.0, -5.0 / 6.0, 0.0, 0.0, -5.0 / 6.0]
        );
    }

    #[test]
    fn hepta_stencil_first_column() {
        let row = [
            1.0 / 2240.0,
            3.0 / 56.0,
            1191.0 / 2240.0,
            151.0 / 140.0,
            1191.0 / 2240.0,
            3.0 / 56.0,
            1.0 / 2240.0,
        ];
        let m = Circulant::from_stencil(9, &Stencil::centered_real(&row).unwrap()).unwrap();
        let want = [
            151.0 / 140.0,
            1191.0 / 2240.0,
            3.0 / 56.0,
            1.0 / 2240.0,
            0.0,
            0.0,
            1.0 / 2240.0,
            3.0 / 56.0,
            1191.0 / 2240.0,
        ];
        assert_eq!(m.first_column().re(), want);
    }

    #[test]
    fn sub_and_super_diagonal_orientation() {
        let s = Stencil::centered_real(&[1.0, 2.0, 3.0]).unwrap();
        let d = Circulant::from_stencil(5, &s).unwrap().densify().unwrap();
        assert_eq!(d[(1, 0)], c(1.0));
        assert_eq!(d[(0, 1)], c(3.0));
        assert_eq!(d[(0, 4)], c(1.0));
        assert_eq!(d[(4, 0)], c(3.0));
    }

    #[test]
    fn diagonal_stencil_is_scaled_identity() {
        let s = Stencil::new(vec![0], vec![c(2.5)]).unwrap();
        let m = Circulant::from_stencil(6, &s).unwrap();
        let x: Vec<C64> = (0..6).map(|i| C64::new(i as f64, -1.0)).collect();
        let y = m.matvec(&x).unwrap();
        let want: Vec<C64> = x.iter().map(|z| z * 2.5).collect();
        assert!(close(&y, &want, 1e-14));
        assert_eq!(m.densify().unwrap(), DenseMatrix::identity(6).scale(c(2.5)));
    }

    #[test]
    fn stencil_errors() {
        let s = Stencil::centered_real(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert!(Circulant::from_stencil(4, &s).is_err());
        assert!(Stencil::centered_real(&[1.0, 2.0]).is_err());
        assert!(Stencil::new(vec![1, 1], vec![c(1.0), c(2.0)]).is_err());
    }

    #[test]
    fn ones_is_an_eigenvector() {
        let m = Circulant::from_first_column(Vector::from_real(&[3.0, -1.0, 0.5, 2.0, 0.25]));
        let y = m.matvec(&Vector::ones(5)).unwrap();
        assert!(close(&y, &[c(4.75); 5], 1e-14));
    }

    #[test]
    fn row_sum_solve() {
        let m = Circulant::from_first_row(&[c(3.0), c(1.0), c(0.0), c(1.0)]);
        let x = m.solve(&[c(5.0); 4]).unwrap();
        assert!(close(&x, &[c(1.0); 4], 1e-14));
    }

    #[test]
    fn singular_circulant_names_index() {
        let m = Circulant::from_first_row(&[c(2.0), c(1.0), c(0.0), c(1.0)]);
        assert!(m.is_singular());
        match m.solve(&[c(1.0); 4]) {
            Err(Error::SingularCirculant { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected singularity error, got {other:?}"),
        }
    }

    #[test]
    fn densify_transposes_column_into_row() {
        let m = Circulant::from_first_column(Vector::from_real(&[4.0, 1.0, 2.0, 3.0]));
        let d = m.densify().unwrap();
        assert_eq!(d.row(0), &[c(4.0), c(3.0), c(2.0), c(1.0)]);
        assert_eq!(m.first_row(), vec![c(4.0), c(3.0), c(2.0), c(1.0)]);
        let s = Stencil::centered_real(&[-5.0 / 6.0, 8.0 / 3.0, -5.0 / 6.0]).unwrap();
        let d = Circulant::from_stencil(4, &s).unwrap().densify().unwrap();
        assert_eq!(d[(0, 3)], c(-5.0 / 6.0));
        assert_eq!(d[(3, 0)], c(-5.0 / 6.0));
    }

    #[test]
    fn densify_cap() {
        let m = Circulant::from_first_column(Vector::ones(10));
        assert!(matches!(
            m.densify_capped(8),
            Err(Error::CapExceeded { n: 10, cap: 8 })
        ));
    }

    #[test]
    fn matvec_dimension_mismatch() {
        let m = Circulant::from_first_column(Vector::ones(3));
        assert!(m.matvec(&[c(1.0)]).is_err());
        assert!(m.solve(&[c(1.0)]).is_err());
    }
}
