use log::warn;

use super::{run_fixed_point, SolveOptions, SolveReport};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, LinearOperator};
use crate::splitting::SmwSplitting;
use crate::C64;

fn check_rhs(n: usize, b: &[C64]) -> Result<()> {
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "system has n = {n}, rhs has length {}",
            b.len()
        )));
    }
    Ok(())
}

fn warn_unvalidated(s: &SmwSplitting) {
    if s.validated_rho().is_none() {
        warn!(
            "solving with an unvalidated splitting (n = {}); convergence is not certified",
            s.n()
        );
    }
}

/// `x_{k+1} = M^{-1} (N x_k + b)`.
pub fn smw_iterate(s: &SmwSplitting, b: &[C64], opts: &SolveOptions) -> Result<SolveReport> {
    check_rhs(s.n(), b)?;
    warn_unvalidated(s);
    let opts = SolveOptions {
        omega: None,
        ..opts.clone()
    };
    let mut work = vec![C64::new(0.0, 0.0); s.n()];
    run_fixed_point(
        "smw",
        b,
        &opts,
        |x, y| s.apply_a_into(x, y),
        |x, next| {
            s.n_mat().matvec_into(x, &mut work);
            work.iter_mut().zip(b).for_each(|(w, &bi)| *w += bi);
            s.m().solve_into(&work, next)
        },
    )
}

/// `x_{k+1} = (1 - w) x_k + w M^{-1} (N x_k + b)`.
///
/// With `w = 1` the update is the SMW step exactly, since `0 * x_k`
/// contributes an exact zero.
pub fn esmw_iterate(s: &SmwSplitting, b: &[C64], opts: &SolveOptions) -> Result<SolveReport> {
    check_rhs(s.n(), b)?;
    let omega = opts
        .omega
        .ok_or_else(|| Error::InvalidInput("extrapolated SMW needs omega".into()))?;
    if omega == C64::new(0.0, 0.0) {
        return Err(Error::InvalidInput("omega must be nonzero".into()));
    }
    warn_unvalidated(s);
    let keep = C64::new(1.0, 0.0) - omega;
    let mut work = vec![C64::new(0.0, 0.0); s.n()];
    let mut y = vec![C64::new(0.0, 0.0); s.n()];
    run_fixed_point(
        "esmw",
        b,
        opts,
        |x, out| s.apply_a_into(x, out),
        |x, next| {
            s.n_mat().matvec_into(x, &mut work);
            work.iter_mut().zip(b).for_each(|(w, &bi)| *w += bi);
            s.m().solve_into(&work, &mut y)?;
            for ((nx, &xi), &yi) in next.iter_mut().zip(x).zip(&y) {
                *nx = keep * xi + omega * yi;
            }
            Ok(())
        },
    )
}

fn checked_diagonal(a: &CsrMatrix, b: &[C64]) -> Result<Vec<C64>> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    check_rhs(a.rows(), b)?;
    let d = a.diagonal();
    if let Some(i) = d.iter().position(|z| *z == C64::new(0.0, 0.0)) {
        return Err(Error::ZeroDiagonal(i));
    }
    Ok(d)
}

pub fn jacobi_iterate(a: &CsrMatrix, b: &[C64], opts: &SolveOptions) -> Result<SolveReport> {
    let diag = checked_diagonal(a, b)?;
    run_fixed_point(
        "jacobi",
        b,
        opts,
        |x, y| a.apply_into(x, y),
        |x, next| {
            for (i, nx) in next.iter_mut().enumerate() {
                let off: C64 = a
                    .row(i)
                    .filter(|&(j, _)| j != i)
                    .map(|(j, v)| v * x[j])
                    .sum();
                *nx = (b[i] - off) / diag[i];
            }
            Ok(())
        },
    )
}

/// Forward sweep in natural ordering.
pub fn gauss_seidel_iterate(a: &CsrMatrix, b: &[C64], opts: &SolveOptions) -> Result<SolveReport> {
    let diag = checked_diagonal(a, b)?;
    run_fixed_point(
        "gauss_seidel",
        b,
        opts,
        |x, y| a.apply_into(x, y),
        |x, next| {
            next.copy_from_slice(x);
            for i in 0..next.len() {
                let off: C64 = a
                    .row(i)
                    .filter(|&(j, _)| j != i)
                    .map(|(j, v)| v * next[j])
                    .sum();
                next[i] = (b[i] - off) / diag[i];
            }
            Ok(())
        },
    )
}
