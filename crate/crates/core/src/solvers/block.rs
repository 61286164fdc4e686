use super::{run_fixed_point, SolveOptions, SolveReport};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, LinearOperator, Vector};
use crate::splitting::SmwSplitting;
use crate::C64;

/// The 2×2 block system
///
/// ```text
/// [ A1  B1 ] [x]   [b1]
/// [ B2  A2 ] [y] = [b2]
/// ```
///
/// with `A1` (n×n) and `A2` (m×m) each carrying its own splitting.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub a1: CsrMatrix,
    pub a2: CsrMatrix,
    pub b1: CsrMatrix,
    pub b2: CsrMatrix,
    pub rhs1: Vector,
    pub rhs2: Vector,
    pub s1: SmwSplitting,
    pub s2: SmwSplitting,
}

impl BlockSystem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a1: CsrMatrix,
        a2: CsrMatrix,
        b1: CsrMatrix,
        b2: CsrMatrix,
        rhs1: Vector,
        rhs2: Vector,
        s1: SmwSplitting,
        s2: SmwSplitting,
    ) -> Result<Self> {
        let (n, m) = (a1.rows(), a2.rows());
        let shapes = [
            ("A1", a1.rows(), a1.cols(), n, n),
            ("A2", a2.rows(), a2.cols(), m, m),
            ("B1", b1.rows(), b1.cols(), n, m),
            ("B2", b2.rows(), b2.cols(), m, n),
        ];
        for (name, r, c, wr, wc) in shapes {
            if (r, c) != (wr, wc) {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {r}x{c}, expected {wr}x{wc}"
                )));
            }
        }
        if rhs1.len() != n || rhs2.len() != m {
            return Err(Error::DimensionMismatch(
                "block right-hand sides do not match A1/A2".into(),
            ));
        }
        if s1.n() != n || s2.n() != m {
            return Err(Error::DimensionMismatch(
                "block splittings do not match A1/A2".into(),
            ));
        }
        Ok(Self {
            a1,
            a2,
            b1,
            b2,
            rhs1,
            rhs2,
            s1,
            s2,
        })
    }

    pub fn n1(&self) -> usize {
        self.a1.rows()
    }

    pub fn n2(&self) -> usize {
        self.a2.rows()
    }

    pub fn rhs(&self) -> Vector {
        Vector::concat(&self.rhs1, &self.rhs2)
    }

    /// The full `(n + m) x (n + m)` matrix.
    pub fn assemble(&self) -> CsrMatrix {
        let n = self.n1();
        let mut t: Vec<(usize, usize, C64)> = self.a1.triplets().collect();
        t.extend(self.b1.triplets().map(|(i, j, v)| (i, j + n, v)));
        t.extend(self.b2.triplets().map(|(i, j, v)| (i + n, j, v)));
        t.extend(self.a2.triplets().map(|(i, j, v)| (i + n, j + n, v)));
        let d = self.dim();
        CsrMatrix::from_triplets(d, d, &t).expect("block shapes checked at construction")
    }
}

impl LinearOperator for BlockSystem {
    fn dim(&self) -> usize {
        self.n1() + self.n2()
    }

    fn apply_into(&self, u: &[C64], out: &mut [C64]) {
        let n = self.n1();
        let (x, y) = u.split_at(n);
        let (ox, oy) = out.split_at_mut(n);
        let bx = self.b1.apply(y);
        self.a1.matvec_into(x, ox);
        ox.iter_mut().zip(bx).for_each(|(o, v)| *o += v);
        let by = self.b2.apply(x);
        self.a2.matvec_into(y, oy);
        oy.iter_mut().zip(by).for_each(|(o, v)| *o += v);
    }
}

/// One half-step `M z = N w - B v + rhs`.
fn half_step(
    s: &SmwSplitting,
    w: &[C64],
    coupling: &CsrMatrix,
    v: &[C64],
    rhs: &[C64],
    work: &mut [C64],
    out: &mut [C64],
) -> Result<()> {
    s.n_mat().matvec_into(w, work);
    let bv = coupling.apply(v);
    for ((z, bvi), &r) in work.iter_mut().zip(bv).zip(rhs) {
        *z += r - bvi;
    }
    s.m().solve_into(work, out)
}

fn block_iterate(
    sys: &BlockSystem,
    opts: &SolveOptions,
    gauss_seidel: bool,
    name: &str,
) -> Result<SolveReport> {
    let (n, m) = (sys.n1(), sys.n2());
    let b = sys.rhs();
    let mut w1 = vec![C64::new(0.0, 0.0); n];
    let mut w2 = vec![C64::new(0.0, 0.0); m];
    run_fixed_point(
        name,
        &b,
        opts,
        |u, out| sys.apply_into(u, out),
        |u, next| {
            let (x, y) = u.split_at(n);
            let (nx, ny) = next.split_at_mut(n);
            half_step(&sys.s1, x, &sys.b1, y, &sys.rhs1, &mut w1, nx)?;
            let x_for_y: &[C64] = if gauss_seidel { nx } else { x };
            half_step(&sys.s2, y, &sys.b2, x_for_y, &sys.rhs2, &mut w2, ny)
        },
    )
}

/// Block Jacobi-SMW: both halves updated from iterate `k`.
pub fn block_jacobi_smw(sys: &BlockSystem, opts: &SolveOptions) -> Result<SolveReport> {
    block_iterate(sys, opts, false, "block_jacobi_smw")
}

/// Block Gauss–Seidel-SMW: the `y` update uses the fresh `x_{k+1}`.
pub fn block_gs_smw(sys: &BlockSystem, opts: &SolveOptions) -> Result<SolveReport> {
    block_iterate(sys, opts, true, "block_gs_smw")
}
