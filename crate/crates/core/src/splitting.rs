//! Splittings `A = M - N` with an easily invertible `M`, plus the spectral
//! checks that certify convergence of the induced iteration.
//!
//! A is *nearly M* when `N = U V^T` and `rho(V^T M^{-1} U) < 1`. The nonzero
//! eigenvalues of the iteration matrix `M^{-1} N` coincide with the
//! eigenvalues of the small `r x r` matrix `V^T M^{-1} U`, so the check costs
//! `r` operator solves instead of an `n x n` eigenproblem.

use std::sync::OnceLock;

use crate::circulant::Circulant;
use crate::error::{Error, Result};
use crate::linalg::{
    dense_eigenvalues_capped, determinant, dot, hausdorff_distance, spectral_radius, CsrMatrix,
    DenseMatrix, LinearOperator, LuFactors, Vector,
};
use crate::{C64, DEFAULT_SMALL_CAP};

/// Tolerance for `N = U V^T` when factors are attached to a splitting.
pub const FACTOR_TOL: f64 = 1e-10;

/// The `M` of a splitting.
#[derive(Debug, Clone)]
pub enum InvertibleOperator {
    Circulant(Circulant),
    Dense { matrix: DenseMatrix, lu: LuFactors },
}

impl From<Circulant> for InvertibleOperator {
    fn from(c: Circulant) -> Self {
        InvertibleOperator::Circulant(c)
    }
}

impl InvertibleOperator {
    /// Factorizes `m` once; fails if it is singular to working precision.
    pub fn dense(matrix: DenseMatrix) -> Result<Self> {
        let lu = LuFactors::new(&matrix)?;
        Ok(InvertibleOperator::Dense { matrix, lu })
    }

    pub fn n(&self) -> usize {
        match self {
            InvertibleOperator::Circulant(c) => c.n(),
            InvertibleOperator::Dense { matrix, .. } => matrix.rows(),
        }
    }

    pub fn is_circulant(&self) -> bool {
        matches!(self, InvertibleOperator::Circulant(_))
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vector> {
        match self {
            InvertibleOperator::Circulant(c) => c.matvec(x),
            InvertibleOperator::Dense { matrix, .. } => matrix.matvec(x),
        }
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vector> {
        match self {
            InvertibleOperator::Circulant(c) => c.solve(b),
            InvertibleOperator::Dense { lu, .. } => lu.solve(b),
        }
    }

    pub(crate) fn solve_into(&self, b: &[C64], x: &mut [C64]) -> Result<()> {
        match self {
            InvertibleOperator::Circulant(c) => c.solve_into(b, x),
            InvertibleOperator::Dense { lu, .. } => {
                x.copy_from_slice(&lu.solve(b)?);
                Ok(())
            }
        }
    }

    pub(crate) fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        match self {
            InvertibleOperator::Circulant(c) => c.matvec_into(x, y),
            InvertibleOperator::Dense { matrix, .. } => matrix.apply_into(x, y),
        }
    }

    pub fn densify(&self, cap: usize) -> Result<DenseMatrix> {
        match self {
            InvertibleOperator::Circulant(c) => c.densify_capped(cap),
            InvertibleOperator::Dense { matrix, .. } => {
                if matrix.rows() > cap {
                    return Err(Error::CapExceeded {
                        n: matrix.rows(),
                        cap,
                    });
                }
                Ok(matrix.clone())
            }
        }
    }

    /// All nonzero entries as triplets, without densifying a circulant.
    fn triplets(&self) -> Vec<(usize, usize, C64)> {
        match self {
            InvertibleOperator::Circulant(c) => {
                let n = c.n();
                let support = c.support();
                (0..n)
                    .flat_map(|i| support.iter().map(move |&(k, v)| (i, (i + n - k) % n, v)))
                    .collect()
            }
            InvertibleOperator::Dense { matrix, .. } => {
                let n = matrix.rows();
                (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| (i, j, matrix[(i, j)]))
                    .filter(|t| t.2 != C64::new(0.0, 0.0))
                    .collect()
            }
        }
    }

    /// `M^{-1} X` column by column.
    pub fn solve_columns(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        let cols: Vec<Vec<C64>> = (0..x.cols())
            .map(|j| self.solve(&x.column(j)).map(Vector::into_inner))
            .collect::<Result<_>>()?;
        Ok(DenseMatrix::from_columns(x.rows(), &cols))
    }
}

/// `N = U V^T` with `U, V` of shape `n x r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankFactors {
    pub u: DenseMatrix,
    pub v: DenseMatrix,
}

impl LowRankFactors {
    pub fn new(u: DenseMatrix, v: DenseMatrix) -> Result<Self> {
        if u.rows() != v.rows() || u.cols() != v.cols() {
            return Err(Error::DimensionMismatch(format!(
                "U is {}x{} but V is {}x{}",
                u.rows(),
                u.cols(),
                v.rows(),
                v.cols()
            )));
        }
        Ok(Self { u, v })
    }

    /// Exact factors from the nonzero columns `J` of `N`: `U = N[:, J]` and
    /// `V = I[:, J]`. The rank equals the number of nonzero columns, which is
    /// small when `N` lives in the corners.
    pub fn from_column_support(n_mat: &CsrMatrix) -> Result<Self> {
        let n = n_mat.rows();
        if n_mat.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "N must be square, got {}x{}",
                n,
                n_mat.cols()
            )));
        }
        let mut cols: Vec<usize> = n_mat.col_indices().to_vec();
        cols.sort_unstable();
        cols.dedup();
        let mut u = DenseMatrix::zeros(n, cols.len());
        let mut v = DenseMatrix::zeros(n, cols.len());
        for (k, &j) in cols.iter().enumerate() {
            v[(j, k)] = C64::new(1.0, 0.0);
        }
        for (i, j, val) in n_mat.triplets() {
            let k = cols.binary_search(&j).expect("column collected above");
            u[(i, k)] = val;
        }
        Ok(Self { u, v })
    }

    pub fn rank(&self) -> usize {
        self.u.cols()
    }

    pub fn n(&self) -> usize {
        self.u.rows()
    }

    pub fn product(&self) -> DenseMatrix {
        self.u
            .matmul(&self.v.transpose())
            .expect("shapes checked at construction")
    }

    /// Largest entrywise `|(U V^T)_{ij} - N_{ij}|`, visiting only the rows
    /// of `U` and `V` that carry nonzeros.
    pub fn mismatch(&self, n_mat: &CsrMatrix) -> f64 {
        let support = |m: &DenseMatrix| -> Vec<bool> {
            (0..m.rows())
                .map(|i| m.row(i).iter().any(|z| *z != C64::new(0.0, 0.0)))
                .collect()
        };
        let (su, sv) = (support(&self.u), support(&self.v));
        let mut worst = 0.0f64;
        for i in (0..self.n()).filter(|&i| su[i]) {
            for j in (0..self.n()).filter(|&j| sv[j]) {
                let p = dot(self.u.row(i), self.v.row(j));
                worst = worst.max((p - n_mat.get(i, j)).norm());
            }
        }
        for (i, j, v) in n_mat.triplets() {
            if !(su[i] && sv[j]) {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    /// `V^T M^{-1} U`, an `r x r` matrix.
    pub fn capacitance(&self, m: &InvertibleOperator) -> Result<DenseMatrix> {
        if m.n() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "M is {}x{}, factors have {} rows",
                m.n(),
                m.n(),
                self.n()
            )));
        }
        let minv_u = m.solve_columns(&self.u)?;
        self.v.transpose().matmul(&minv_u)
    }
}

/// A rank-one perturbation `A = M - u v^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOnePerturbation {
    pub u: Vector,
    pub v: Vector,
}

impl RankOnePerturbation {
    pub fn new(u: Vector, v: Vector) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "u has length {}, v has length {}",
                u.len(),
                v.len()
            )));
        }
        Ok(Self { u, v })
    }

    pub fn factors(&self) -> LowRankFactors {
        let n = self.u.len();
        LowRankFactors {
            u: DenseMatrix::from_columns(n, &[self.u.to_vec()]),
            v: DenseMatrix::from_columns(n, &[self.v.to_vec()]),
        }
    }
}

/// `A = M - N` with `N` stored sparse.
#[derive(Debug, Clone)]
pub struct SmwSplitting {
    m: InvertibleOperator,
    n_mat: CsrMatrix,
    a: Option<CsrMatrix>,
    low_rank: Option<LowRankFactors>,
    validated_rho: OnceLock<f64>,
    cap: usize,
}

impl SmwSplitting {
    pub fn new(m: InvertibleOperator, n_mat: CsrMatrix) -> Result<Self> {
        let n = m.n();
        if n_mat.rows() != n || n_mat.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "M is {n}x{n}, N is {}x{}",
                n_mat.rows(),
                n_mat.cols()
            )));
        }
        Ok(Self {
            m,
            n_mat,
            a: None,
            low_rank: None,
            validated_rho: OnceLock::new(),
            cap: DEFAULT_SMALL_CAP,
        })
    }

    /// `N = M - A`, storing only the positions where `M` and `A` differ.
    pub fn from_difference(a: &CsrMatrix, m: InvertibleOperator) -> Result<Self> {
        let n = m.n();
        if a.rows() != a.cols() {
            return Err(Error::DimensionMismatch(format!(
                "A must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if a.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, M is {n}x{n}",
                a.rows(),
                a.cols()
            )));
        }
        let m_csr = CsrMatrix::from_triplets(n, n, &m.triplets())?;
        let n_mat = m_csr.linear_combination(C64::new(1.0, 0.0), a, C64::new(-1.0, 0.0))?;
        let mut s = Self::new(m, n_mat)?;
        s.a = Some(a.clone());
        Ok(s)
    }

    /// Attaches `N = U V^T`, checked entrywise against the stored `N`.
    pub fn with_low_rank(mut self, factors: LowRankFactors) -> Result<Self> {
        if factors.n() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "factors have {} rows, splitting has n = {}",
                factors.n(),
                self.n()
            )));
        }
        let diff = factors.mismatch(&self.n_mat);
        if diff > FACTOR_TOL {
            return Err(Error::InvalidInput(format!(
                "U V^T differs from N by {diff:e}"
            )));
        }
        self.low_rank = Some(factors);
        Ok(self)
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    pub fn m(&self) -> &InvertibleOperator {
        &self.m
    }

    pub fn n_mat(&self) -> &CsrMatrix {
        &self.n_mat
    }

    /// The assembled `A`, when the splitting was built from it.
    pub fn a(&self) -> Option<&CsrMatrix> {
        self.a.as_ref()
    }

    pub fn low_rank(&self) -> Option<&LowRankFactors> {
        self.low_rank.as_ref()
    }

    pub fn validated_rho(&self) -> Option<f64> {
        self.validated_rho.get().copied()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// `y = A x`, through the stored `A` or as `M x - N x`.
    pub fn apply_a_into(&self, x: &[C64], y: &mut [C64]) {
        match &self.a {
            Some(a) => a.matvec_into(x, y),
            None => {
                self.m.apply_into(x, y);
                let nx = self.n_mat.apply(x);
                y.iter_mut().zip(nx).for_each(|(yi, v)| *yi -= v);
            }
        }
    }

    pub fn assemble_a(&self) -> Result<CsrMatrix> {
        if let Some(a) = &self.a {
            return Ok(a.clone());
        }
        let n = self.n();
        let m_csr = CsrMatrix::from_triplets(n, n, &self.m.triplets())?;
        m_csr.linear_combination(C64::new(1.0, 0.0), &self.n_mat, C64::new(-1.0, 0.0))
    }

    /// Dense `M^{-1} N`; only for `n` within the cap.
    pub fn iteration_matrix(&self) -> Result<DenseMatrix> {
        let n = self.n();
        if n > self.cap {
            return Err(Error::CapExceeded { n, cap: self.cap });
        }
        self.m.solve_columns(&self.n_mat.to_dense())
    }

    /// Spectral radius certifying convergence: `rho(V^T M^{-1} U)` when
    /// factors are attached, otherwise `rho(M^{-1} N)` computed densely.
    /// The value is memoized.
    pub fn validate_nearly_m(&self) -> Result<f64> {
        if let Some(rho) = self.validated_rho.get() {
            return Ok(*rho);
        }
        let rho = if self.n_mat.nnz() == 0 {
            0.0
        } else if let Some(f) = &self.low_rank {
            if f.rank() > self.cap {
                return Err(Error::CapExceeded {
                    n: f.rank(),
                    cap: self.cap,
                });
            }
            spectral_radius(&dense_eigenvalues_capped(
                &f.capacitance(&self.m)?,
                self.cap,
            )?)
        } else {
            spectral_radius(&dense_eigenvalues_capped(
                &self.iteration_matrix()?,
                self.cap,
            )?)
        };
        Ok(*self.validated_rho.get_or_init(|| rho))
    }

    /// Distance between the spectrum of `M^{-1} N` and that of
    /// `V^T M^{-1} U` padded with zeros. Zero up to rounding whenever
    /// `N = U V^T`.
    pub fn spectrum_coincidence_check(&self) -> Result<f64> {
        let f = self
            .low_rank
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("spectrum check needs low-rank factors".into()))?;
        let big = dense_eigenvalues_capped(&self.iteration_matrix()?, self.cap)?;
        let mut small = dense_eigenvalues_capped(&f.capacitance(&self.m)?, self.cap)?;
        let mut big = big;
        let len = big.len().max(small.len());
        big.resize(len, C64::new(0.0, 0.0));
        small.resize(len, C64::new(0.0, 0.0));
        Ok(hausdorff_distance(&big, &small))
    }
}

/// `rho(V^T M^{-1} U)` for arbitrary factors, whether or not they reproduce `N`.
pub fn capacitance_radius(m: &InvertibleOperator, factors: &LowRankFactors) -> Result<f64> {
    Ok(spectral_radius(&dense_eigenvalues_capped(
        &factors.capacitance(m)?,
        DEFAULT_SMALL_CAP,
    )?))
}

/// The single nonzero eigenvalue `v^T M^{-1} u` of `M^{-1} u v^T`.
pub fn rank_one_eigenvalue(m: &InvertibleOperator, p: &RankOnePerturbation) -> Result<C64> {
    if p.u.len() != m.n() {
        return Err(Error::DimensionMismatch(format!(
            "M has size {}, u has length {}",
            m.n(),
            p.u.len()
        )));
    }
    let z = m.solve(&p.u)?;
    Ok(dot(&p.v, &z))
}

/// `|det(M - U V^T) - det(I - V^T M^{-1} U) det(M)| / max(1, |det M|)`.
pub fn determinant_lemma_residual(
    m: &DenseMatrix,
    u: &DenseMatrix,
    v: &DenseMatrix,
) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("M must be square".into()));
    }
    if m.rows() > DEFAULT_SMALL_CAP {
        return Err(Error::CapExceeded {
            n: m.rows(),
            cap: DEFAULT_SMALL_CAP,
        });
    }
    let factors = LowRankFactors::new(u.clone(), v.clone())?;
    if factors.n() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "M is {0}x{0}, U has {1} rows",
            m.rows(),
            u.rows()
        )));
    }
    let lu = LuFactors::new(m)?;
    let det_m = lu.determinant();
    let minv_u = {
        let cols: Vec<Vec<C64>> = (0..u.cols())
            .map(|j| lu.solve(&u.column(j)).map(Vector::into_inner))
            .collect::<Result<_>>()?;
        DenseMatrix::from_columns(m.rows(), &cols)
    };
    let cap_mat = DenseMatrix::identity(u.cols()).sub(&v.transpose().matmul(&minv_u)?)?;
    let lhs = determinant(&m.sub(&factors.product())?)?;
    let rhs = determinant(&cap_mat)? * det_m;
    Ok((lhs - rhs).norm() / det_m.norm().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulant::Stencil;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn demo_a() -> CsrMatrix {
        CsrMatrix::from_dense(
            &DenseMatrix::from_real_rows(&[
                vec![5.0, 3.0, 2.0, 2.0],
                vec![1.0, 4.0, 3.0, 2.0],
                vec![2.0, 1.0, 4.0, 3.0],
                vec![4.0, 2.0, 1.0, 5.0],
            ])
            .unwrap(),
        )
    }

    fn demo_m() -> InvertibleOperator {
        Circulant::from_first_row(&[c(4.0), c(3.0), c(2.0), c(1.0)]).into()
    }

    #[test]
    fn self_splitting_has_empty_n() {
        let a = demo_a();
        let s = SmwSplitting::from_difference(&a, InvertibleOperator::dense(a.to_dense()).unwrap())
            .unwrap();
        assert_eq!(s.n_mat().nnz(), 0);
        assert_eq!(s.validate_nearly_m().unwrap(), 0.0);
    }

    #[test]
    fn demo_difference_is_four_corners() {
        let s = SmwSplitting::from_difference(&demo_a(), demo_m()).unwrap();
        let n = s.n_mat();
        assert_eq!(n.nnz(), 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_eq!(n.get(i, j), c(-1.0));
        }
        let y = n.matvec(&Vector::ones(4)).unwrap();
        assert_eq!(y.re(), vec![-2.0, 0.0, 0.0, -2.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let m: InvertibleOperator = Circulant::from_first_column(Vector::ones(5)).into();
        assert!(SmwSplitting::from_difference(&demo_a(), m).is_err());
    }

    #[test]
    fn identity_rank_one_radius() {
        let n = 5;
        let alpha = -0.75;
        let u = Vector::unit(n, 0);
        let mut v = Vector::zeros(n);
        v[0] = c(alpha);
        let p = RankOnePerturbation::new(u, v).unwrap();
        let f = p.factors();
        let m = InvertibleOperator::dense(DenseMatrix::identity(n)).unwrap();
        let s = SmwSplitting::new(m, CsrMatrix::from_dense(&f.product()))
            .unwrap()
            .with_low_rank(f)
            .unwrap();
        assert!((s.validate_nearly_m().unwrap() - alpha.abs()).abs() < 1e-15);
        assert_eq!(s.validated_rho(), Some(alpha.abs()));
    }

    #[test]
    fn rank_one_eigenvalue_trivial_cases() {
        let n = 4;
        let id = InvertibleOperator::dense(DenseMatrix::identity(n)).unwrap();
        let u = Vector::from_real(&[1.0, 2.0, 0.0, -1.0]);
        let v = Vector::from_real(&[0.5, 0.5, 3.0, 1.0]);
        let p = RankOnePerturbation::new(u.clone(), v.clone()).unwrap();
        assert_eq!(rank_one_eigenvalue(&id, &p).unwrap(), dot(&v, &u));

        let two = InvertibleOperator::dense(DenseMatrix::identity(n).scale(c(2.0))).unwrap();
        let e1 = RankOnePerturbation::new(Vector::unit(n, 0), Vector::unit(n, 0)).unwrap();
        assert_eq!(rank_one_eigenvalue(&two, &e1).unwrap(), c(0.5));
    }

    #[test]
    fn column_support_factors_are_exact() {
        let n_mat = CsrMatrix::from_real_triplets(
            5,
            5,
            &[(0, 0, 2.0), (4, 0, -1.0), (0, 4, 3.0), (2, 4, 0.5)],
        )
        .unwrap();
        let f = LowRankFactors::from_column_support(&n_mat).unwrap();
        assert_eq!(f.rank(), 2);
        assert_eq!(f.mismatch(&n_mat), 0.0);
        assert_eq!(f.product(), n_mat.to_dense());
        let empty = LowRankFactors::from_column_support(&CsrMatrix::zeros(3, 3)).unwrap();
        assert_eq!(empty.rank(), 0);
    }

    #[test]
    fn factors_must_reproduce_n() {
        let s = SmwSplitting::from_difference(&demo_a(), demo_m()).unwrap();
        let wrong = RankOnePerturbation::new(Vector::unit(4, 0), Vector::unit(4, 0)).unwrap();
        assert!(s.with_low_rank(wrong.factors()).is_err());
    }

    #[test]
    fn determinant_lemma_trivial_cases() {
        let m = DenseMatrix::from_real_rows(&[vec![3.0, 1.0], vec![-1.0, 2.0]]).unwrap();
        let zero = DenseMatrix::zeros(2, 1);
        assert!(determinant_lemma_residual(&m, &zero, &zero).unwrap() <= 1e-12);

        let m = DenseMatrix::from_real_rows(&[vec![1.7]]).unwrap();
        let u = DenseMatrix::from_real_rows(&[vec![0.3]]).unwrap();
        let v = DenseMatrix::from_real_rows(&[vec![-2.1]]).unwrap();
        assert!(determinant_lemma_residual(&m, &u, &v).unwrap() <= 1e-14);
    }

    #[test]
    fn coincidence_needs_factors() {
        let s = SmwSplitting::from_difference(&demo_a(), demo_m()).unwrap();
        assert!(s.spectrum_coincidence_check().is_err());
    }

    #[test]
    fn fallback_validation_respects_cap() {
        let a = CsrMatrix::banded(12, -1, &[-5.0 / 6.0, 8.0 / 3.0, -5.0 / 6.0]);
        let m = Circulant::from_stencil(
            12,
            &Stencil::centered_real(&[-5.0 / 6.0, 8.0 / 3.0, -5.0 / 6.0]).unwrap(),
        )
        .unwrap();
        let s = SmwSplitting::from_difference(&a, m.into())
            .unwrap()
            .with_cap(8);
        assert!(matches!(
            s.validate_nearly_m(),
            Err(Error::CapExceeded { .. })
        ));
    }
}
