//! Deterministic generators for the one-dimensional test systems.
//!
//! All problems use mesh size `h = 1`, the exact solution `x = (1, ..., 1)`
//! and the right-hand side `b = A x`. Matrix entries are built from exact
//! rationals rounded once to `f64`.

use std::fmt;
use std::str::FromStr;

use crate::circulant::{Circulant, Stencil};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, DenseMatrix, LinearOperator, Vector};
use crate::solvers::BlockSystem;
use crate::splitting::{InvertibleOperator, LowRankFactors, RankOnePerturbation, SmwSplitting};
use crate::C64;

fn q(p: i64, d: i64) -> f64 {
    p as f64 / d as f64
}

/// A single system `A x = b` with its splitting.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub name: String,
    pub a: CsrMatrix,
    pub splitting: SmwSplitting,
    pub rhs: Vector,
    pub exact_solution: Vector,
    pub suggested_omega: Option<f64>,
    /// Corner factors as published alongside the linear-element problem.
    pub published_factors: Option<LowRankFactors>,
    /// Whether `published_factors` reproduce `N = M - A` within `1e-12`.
    pub published_factors_match: Option<bool>,
}

impl ProblemInstance {
    fn new(
        name: &str,
        a: CsrMatrix,
        splitting: SmwSplitting,
        suggested_omega: Option<f64>,
    ) -> Self {
        let n = a.rows();
        let exact_solution = Vector::ones(n);
        let rhs = a.matvec(&exact_solution).expect("square");
        Self {
            name: name.to_string(),
            a,
            splitting,
            rhs,
            exact_solution,
            suggested_omega,
            published_factors: None,
            published_factors_match: None,
        }
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }
}

/// A 2×2 block saddle-point system.
#[derive(Debug, Clone)]
pub struct BlockProblemInstance {
    pub name: String,
    pub system: BlockSystem,
    pub exact_solution: Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Linear,
    Cubic,
    Demo4,
    Mixed,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 4] = [
        ProblemKind::Linear,
        ProblemKind::Cubic,
        ProblemKind::Demo4,
        ProblemKind::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Linear => "linear",
            ProblemKind::Cubic => "cubic",
            ProblemKind::Demo4 => "demo4",
            ProblemKind::Mixed => "mixed",
        }
    }

    pub fn min_n(self) -> usize {
        match self {
            ProblemKind::Linear => 7,
            ProblemKind::Cubic => 15,
            ProblemKind::Demo4 => 4,
            ProblemKind::Mixed => 5,
        }
    }

    pub fn is_block(self) -> bool {
        self == ProblemKind::Mixed
    }

    /// Builds a scalar problem; `n` is ignored for the fixed-size demo.
    pub fn build(self, n: usize) -> Result<ProblemInstance> {
        match self {
            ProblemKind::Linear => linear_element_problem(n),
            ProblemKind::Cubic => cubic_spline_problem(n),
            ProblemKind::Demo4 => Ok(demo4_problem()),
            ProblemKind::Mixed => Err(Error::InvalidInput("mixed is a block problem".into())),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = ProblemKind::ALL.iter().map(|p| p.name()).collect();
                Error::InvalidInput(format!(
                    "unknown problem '{s}' (valid: {})",
                    names.join(", ")
                ))
            })
    }
}

fn require_n(kind: ProblemKind, n: usize) -> Result<()> {
    if n < kind.min_n() {
        return Err(Error::InvalidInput(format!(
            "{} problem needs n >= {}, got {n}",
            kind.name(),
            kind.min_n()
        )));
    }
    Ok(())
}

fn corner_factors(n: usize, u: [[f64; 2]; 2], v: [[f64; 2]; 2]) -> LowRankFactors {
    // column 0 carries the entries in matrix column 1, column 1 those in matrix column n
    let build = |e: [[f64; 2]; 2]| {
        let mut m = DenseMatrix::zeros(n, 2);
        m[(0, 0)] = C64::new(e[0][0], 0.0);
        m[(0, 1)] = C64::new(e[0][1], 0.0);
        m[(n - 1, 0)] = C64::new(e[1][0], 0.0);
        m[(n - 1, 1)] = C64::new(e[1][1], 0.0);
        m
    };
    LowRankFactors {
        u: build(u),
        v: build(v),
    }
}

/// Linear elements for `-u'' + u = f`: stiffness plus mass with `h = 1`,
/// split against `M = circulant(-5/6, 8/3, -5/6)`.
pub fn linear_element_problem(n: usize) -> Result<ProblemInstance> {
    require_n(ProblemKind::Linear, n)?;
    let (diag, off, end) = (q(8, 3), q(-5, 6), q(4, 3));
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        let d = if i == 0 || i == n - 1 { end } else { diag };
        t.push((i, i, d));
        if i + 1 < n {
            t.push((i, i + 1, off));
            t.push((i + 1, i, off));
        }
    }
    let a = CsrMatrix::from_real_triplets(n, n, &t)?;
    let m = Circulant::from_stencil(n, &Stencil::centered_real(&[off, diag, off])?)?;
    let base = SmwSplitting::from_difference(&a, m.into())?;

    let published = corner_factors(
        n,
        [[2.0, 1.0], [1.0, 2.0]],
        [[-1.0, q(7, 6)], [q(7, 6), -1.0]],
    );
    let published_match = published.mismatch(base.n_mat()) <= 1e-12;
    // U with its corner values exchanged reproduces N = M - A
    let consistent = corner_factors(
        n,
        [[1.0, 2.0], [2.0, 1.0]],
        [[-1.0, q(7, 6)], [q(7, 6), -1.0]],
    );
    let splitting = base.with_low_rank(consistent)?;

    let mut p = ProblemInstance::new("linear", a, splitting, Some(1.20));
    p.published_factors = Some(published);
    p.published_factors_match = Some(published_match);
    Ok(p)
}

/// Interior row of the cubic-spline mass matrix, left to right.
pub fn cubic_stencil_row() -> [f64; 7] {
    [
        q(1, 2240),
        q(3, 56),
        q(1191, 2240),
        q(151, 140),
        q(1191, 2240),
        q(3, 56),
        q(1, 2240),
    ]
}

/// Mass matrix of smooth cubic splines (hepta-diagonal, not diagonally
/// dominant) split against the circulant of its interior stencil.
pub fn cubic_spline_problem(n: usize) -> Result<ProblemInstance> {
    require_n(ProblemKind::Cubic, n)?;
    let row = cubic_stencil_row();
    let boundary: [&[f64]; 3] = [
        &[q(31, 140), q(773, 2240), q(29, 560), q(1, 2240)],
        &[q(773, 2240), q(41, 40), q(17, 32), q(3, 56), q(1, 2240)],
        &[
            q(29, 560),
            q(17, 32),
            q(151, 140),
            q(1191, 2240),
            q(3, 56),
            q(1, 2240),
        ],
    ];
    let mut t = Vec::with_capacity(7 * n);
    for i in 3..n - 3 {
        for (k, &v) in row.iter().enumerate() {
            t.push((i, i + k - 3, v));
        }
    }
    for (i, entries) in boundary.iter().enumerate() {
        for (j, &v) in entries.iter().enumerate() {
            t.push((i, j, v));
            t.push((n - 1 - i, n - 1 - j, v));
        }
    }
    let a = CsrMatrix::from_real_triplets(n, n, &t)?;
    let m = Circulant::from_stencil(n, &Stencil::centered_real(&row)?)?;
    let splitting = SmwSplitting::from_difference(&a, m.into())?;
    Ok(ProblemInstance::new("cubic", a, splitting, Some(1.86)))
}

pub fn demo4_matrix() -> CsrMatrix {
    let rows = [
        [5.0, 3.0, 2.0, 2.0],
        [1.0, 4.0, 3.0, 2.0],
        [2.0, 1.0, 4.0, 3.0],
        [4.0, 2.0, 1.0, 5.0],
    ];
    let t: Vec<_> = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j, rows[i][j])))
        .collect();
    CsrMatrix::from_real_triplets(4, 4, &t).expect("static entries")
}

/// The 4×4 non-symmetric demo, `M` the circulant with first row `(4, 3, 2, 1)`.
///
/// `N = M - A` has `-1` in each corner, i.e. `N = u v^T` with
/// `u = e1 + e4` and `v = -(e1 + e4)`.
pub fn demo4_problem() -> ProblemInstance {
    let a = demo4_matrix();
    let row: Vec<C64> = [4.0, 3.0, 2.0, 1.0]
        .iter()
        .map(|&x| C64::new(x, 0.0))
        .collect();
    let m = Circulant::from_first_row(&row);
    let p = demo4_rank_one();
    let splitting = SmwSplitting::from_difference(&a, m.into())
        .and_then(|s| s.with_low_rank(p.factors()))
        .expect("demo splitting is consistent");
    ProblemInstance::new("demo4", a, splitting, Some(0.7))
}

pub fn demo4_rank_one() -> RankOnePerturbation {
    let u = Vector::from_real(&[1.0, 0.0, 0.0, 1.0]);
    let v = Vector::from_real(&[-1.0, 0.0, 0.0, -1.0]);
    RankOnePerturbation::new(u, v).expect("equal lengths")
}

/// Linear-element mass matrix, `h = 1`.
pub fn linear_mass_matrix(n: usize) -> CsrMatrix {
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        let d = if i == 0 || i == n - 1 {
            q(1, 3)
        } else {
            q(2, 3)
        };
        t.push((i, i, d));
        if i + 1 < n {
            t.push((i, i + 1, q(1, 6)));
            t.push((i + 1, i, q(1, 6)));
        }
    }
    CsrMatrix::from_real_triplets(n, n, &t).expect("band entries in range")
}

/// Mixed formulation: `A1 = A2` the linear-element mass matrix and
/// `B1 = B2 = tridiag(-1/2, 0, 1/2)`, each diagonal block split against
/// `circulant(1/6, 2/3, 1/6)`.
pub fn mixed_formulation_problem(n: usize) -> Result<BlockProblemInstance> {
    require_n(ProblemKind::Mixed, n)?;
    let mass = linear_mass_matrix(n);
    let coupling = CsrMatrix::banded(n, -1, &[-0.5, 0.0, 0.5]);
    let m = Circulant::from_stencil(n, &Stencil::centered_real(&[q(1, 6), q(2, 3), q(1, 6)])?)?;
    let s1 = SmwSplitting::from_difference(&mass, m.clone().into())?;
    let s2 = SmwSplitting::from_difference(&mass, InvertibleOperator::from(m))?;
    let ones = Vector::ones(2 * n);
    let placeholder = Vector::zeros(n);
    let mut system = BlockSystem::new(
        mass.clone(),
        mass,
        coupling.clone(),
        coupling,
        placeholder.clone(),
        placeholder,
        s1,
        s2,
    )?;
    let rhs = system.apply(&ones);
    system.rhs1 = Vector::from_vec_unchecked(rhs[..n].to_vec());
    system.rhs2 = Vector::from_vec_unchecked(rhs[n..].to_vec());
    Ok(BlockProblemInstance {
        name: "mixed".into(),
        system,
        exact_solution: ones,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(z: C64) -> f64 {
        assert_eq!(z.im, 0.0);
        z.re
    }

    #[test]
    fn linear_entries() {
        let p = linear_element_problem(7).unwrap();
        assert_eq!(re(p.a.get(3, 3)), 8.0 / 3.0);
        assert_eq!(re(p.a.get(3, 4)), -5.0 / 6.0);
        assert_eq!(re(p.a.get(0, 0)), 4.0 / 3.0);
        assert!((p.rhs.re()[0] - 0.5).abs() < 1e-15);
        assert!((p.rhs.re()[3] - 1.0).abs() < 1e-15);
        assert_eq!(p.suggested_omega, Some(1.20));
    }

    #[test]
    fn linear_n_is_corner_only() {
        let p = linear_element_problem(6 + 1).unwrap();
        let n = p.n();
        let nm = p.splitting.n_mat();
        assert_eq!(nm.nnz(), 4);
        for (i, j, _) in nm.triplets() {
            assert!((i == 0 || i == n - 1) && (j == 0 || j == n - 1));
        }
        assert_eq!(re(nm.get(0, 0)), 8.0 / 3.0 - 4.0 / 3.0);
        assert_eq!(re(nm.get(0, n - 1)), -5.0 / 6.0);
    }

    #[test]
    fn published_linear_factors_are_flagged() {
        let p = linear_element_problem(16).unwrap();
        // the published U places 4/3 and -5/6 on transposed corners
        assert_eq!(p.published_factors_match, Some(false));
        assert!(p.splitting.low_rank().is_some());
    }

    #[test]
    fn cubic_entries() {
        let p = cubic_spline_problem(20).unwrap();
        assert_eq!(re(p.a.get(10, 10)), 151.0 / 140.0);
        assert_eq!(re(p.a.get(10, 11)), 1191.0 / 2240.0);
        assert_eq!(re(p.a.get(0, 0)), 31.0 / 140.0);
        assert_eq!(re(p.a.get(0, 1)), 773.0 / 2240.0);
        assert_eq!(re(p.a.get(19, 18)), 773.0 / 2240.0);
        assert_eq!(re(p.a.get(17, 17)), 151.0 / 140.0);
        assert_eq!(re(p.a.get(18, 18)), 41.0 / 40.0);
        for i in 0..20 {
            for j in 0..20 {
                assert_eq!(p.a.get(i, j), p.a.get(j, i));
            }
        }
        assert!(cubic_spline_problem(14).is_err());
    }

    #[test]
    fn cubic_n_lives_in_corners() {
        let p = cubic_spline_problem(20).unwrap();
        let n = 20;
        let near = |i: usize| i.min(n - 1 - i) < 3;
        for (i, j, _) in p.splitting.n_mat().triplets() {
            assert!(near(i) && near(j), "({i}, {j})");
        }
    }

    #[test]
    fn demo_matrix_and_rhs() {
        let p = demo4_problem();
        assert_eq!(
            (0..4).map(|j| re(p.a.get(0, j))).collect::<Vec<_>>(),
            vec![5.0, 3.0, 2.0, 2.0]
        );
        assert_eq!(p.rhs.re(), vec![12.0, 10.0, 10.0, 12.0]);
        assert_eq!(p.splitting.n_mat().nnz(), 4);
    }

    #[test]
    fn mixed_structure() {
        let p = mixed_formulation_problem(8).unwrap();
        let s = &p.system;
        assert_eq!(
            s.b1.matvec(&Vector::ones(8)).unwrap().re(),
            vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -0.5]
        );
        assert_eq!(re(s.a1.get(3, 3)), 2.0 / 3.0);
        let nm = s.s1.n_mat();
        for (i, j, _) in nm.triplets() {
            assert!((i == 0 || i == 7) && (j == 0 || j == 7));
        }
        assert_eq!(nm.nnz(), 4);
    }

    #[test]
    fn generators_are_deterministic() {
        let a = cubic_spline_problem(40).unwrap();
        let b = cubic_spline_problem(40).unwrap();
        assert_eq!(a.a, b.a);
        assert_eq!(a.splitting.n_mat(), b.splitting.n_mat());
        assert_eq!(a.rhs, b.rhs);
    }

    #[test]
    fn problem_names() {
        for k in ProblemKind::ALL {
            assert_eq!(k.name().parse::<ProblemKind>().unwrap(), k);
        }
        let err = "quadratic".parse::<ProblemKind>().unwrap_err();
        assert!(err.to_string().contains("linear, cubic, demo4, mixed"));
    }
}
