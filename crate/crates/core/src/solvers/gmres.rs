//! Full (non-restarted) GMRES with modified Gram–Schmidt Arnoldi and
//! complex Givens rotations.

use super::{Criterion, Monitor, SolveOptions, SolveReport, Status};
use crate::error::{Error, Result};
use crate::linalg::{dotc, norm, LinearOperator, NormKind};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Rotation `[[c, s], [-conj(s), c]]` zeroing the second component of `(a, b)`.
fn givens(a: C64, b: f64) -> (f64, C64) {
    let r = a.norm().hypot(b);
    if r == 0.0 {
        return (1.0, ZERO);
    }
    if a.norm() == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let phase = a / a.norm();
    (a.norm() / r, phase * b / r)
}

fn rotate(c: f64, s: C64, a: C64, b: C64) -> (C64, C64) {
    (a * c + s * b, -s.conj() * a + b * c)
}

/// Iterate `x0 + V y` where `R y = g` on the leading `k` entries.
fn assemble(x0: &[C64], basis: &[Vec<C64>], h: &[Vec<C64>], g: &[C64], k: usize) -> Vec<C64> {
    let mut y = vec![ZERO; k];
    for i in (0..k).rev() {
        let s: C64 = (i + 1..k).map(|j| h[j][i] * y[j]).sum();
        y[i] = (g[i] - s) / h[i][i];
    }
    let mut x = x0.to_vec();
    for (yj, v) in y.iter().zip(basis) {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += yj * vi;
        }
    }
    x
}

/// Solves `A x = b`; one iteration is one Arnoldi step. A breakdown of the
/// Arnoldi process means the Krylov space is invariant and the current
/// iterate is exact.
pub fn gmres_solve<A: LinearOperator + ?Sized>(
    a: &A,
    b: &[C64],
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "operator has n = {n}, rhs has length {}",
            b.len()
        )));
    }
    opts.validate(n)?;
    let x0 = opts.start(n);
    let mut mon = Monitor::new(opts, b);

    let mut r0 = a.apply(&x0);
    r0.iter_mut().zip(b).for_each(|(r, &bi)| *r = bi - *r);
    let beta = norm(&r0, NormKind::Two);

    if mon.checks_initial() {
        let m = mon.metric(&x0, &x0, Some(&r0));
        let status = mon.record(m);
        if status != Status::Continue {
            return Ok(mon.finish("gmres", 0, status, x0));
        }
    }
    if beta == 0.0 {
        mon.record(0.0);
        return Ok(mon.finish("gmres", 0, Status::Converged, x0));
    }

    // residual norm available from the Givens recurrence
    let cheap = opts.criterion.uses_residual() && opts.norm_kind == NormKind::Two;
    let b_scale = if opts.criterion == Criterion::RelativeResidual {
        let bn = norm(b, NormKind::Two);
        if bn > 0.0 {
            bn
        } else {
            1.0
        }
    } else {
        1.0
    };

    let kmax = opts.max_iter.min(n);
    let mut basis: Vec<Vec<C64>> = vec![r0.iter().map(|z| z / beta).collect()];
    // h[j] holds column j of the (rotated) Hessenberg matrix
    let mut h: Vec<Vec<C64>> = Vec::with_capacity(kmax);
    let mut rot: Vec<(f64, C64)> = Vec::with_capacity(kmax);
    let mut g = vec![C64::new(beta, 0.0)];
    let mut prev = x0.clone();
    let mut status = Status::Continue;
    let mut k = 0;

    while k < kmax {
        let mut w = a.apply(&basis[k]);
        let w_norm0 = norm(&w, NormKind::Two);
        let mut col = vec![ZERO; k + 2];
        for (j, v) in basis.iter().enumerate() {
            let hj = dotc(v, &w);
            col[j] = hj;
            w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= hj * vi);
        }
        let next_norm = norm(&w, NormKind::Two);
        col[k + 1] = C64::new(next_norm, 0.0);
        for (j, &(c, s)) in rot.iter().enumerate() {
            let (p, q) = rotate(c, s, col[j], col[j + 1]);
            col[j] = p;
            col[j + 1] = q;
        }
        let (c, s) = givens(col[k], col[k + 1].re);
        let (p, _) = rotate(c, s, col[k], col[k + 1]);
        col[k] = p;
        col[k + 1] = ZERO;
        rot.push((c, s));
        let (gk, gk1) = rotate(c, s, g[k], ZERO);
        g[k] = gk;
        g.push(gk1);
        col.truncate(k + 1);
        h.push(col);
        k += 1;

        let breakdown = next_norm <= f64::EPSILON * w_norm0.max(f64::MIN_POSITIVE);
        let metric = if cheap {
            gk1.norm() / b_scale
        } else {
            let x = assemble(&x0, &basis, &h, &g, k);
            let res = if mon.needs_residual() {
                let mut r = a.apply(&x);
                r.iter_mut().zip(b).for_each(|(ri, &bi)| *ri = bi - *ri);
                Some(r)
            } else {
                None
            };
            let m = mon.metric(&x, &prev, res.as_deref());
            prev = x;
            m
        };
        status = mon.record(metric);
        if breakdown && status == Status::Continue {
            // the next iterate would repeat this one
            if opts.criterion == Criterion::Increment {
                status = mon.record(0.0);
            } else {
                break;
            }
        }
        if status != Status::Continue {
            break;
        }
        basis.push(w.iter().map(|z| z / next_norm).collect());
    }
    let x = assemble(&x0, &basis, &h, &g, k);
    Ok(mon.finish("gmres", k, status, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CsrMatrix, DenseMatrix, Vector};

    #[test]
    fn identity_converges_in_one_step() {
        let b = Vector::from_real(&[1.0, -2.0, 3.0]);
        let r = gmres_solve(&CsrMatrix::identity(3), &b, &SolveOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        for (x, y) in r.solution.iter().zip(b.iter()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn complex_system() {
        let a = DenseMatrix::new(
            2,
            2,
            vec![
                C64::new(2.0, 1.0),
                C64::new(0.0, -1.0),
                C64::new(1.0, 0.0),
                C64::new(3.0, 0.5),
            ],
        )
        .unwrap();
        let x = vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.25)];
        let b = a.matvec(&x).unwrap();
        let r = gmres_solve(&a, &b, &SolveOptions::default().with_tol(1e-12)).unwrap();
        assert!(r.converged);
        for (u, v) in r.solution.iter().zip(&x) {
            assert!((u - v).norm() < 1e-10);
        }
    }

    #[test]
    fn residual_history_is_monotone() {
        let a = CsrMatrix::banded(40, -2, &[0.3, -1.0, 3.0, -0.7, 0.2]);
        let b = a.matvec(&Vector::ones(40)).unwrap();
        let r = gmres_solve(
            &a,
            &b,
            &SolveOptions::default().with_tol(1e-12).with_history(),
        )
        .unwrap();
        assert!(r.converged);
        let h = r.metric_history.unwrap();
        assert!(h.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }

    #[test]
    fn explicit_iterate_matches_recurrence() {
        let a = CsrMatrix::banded(30, -1, &[-1.0, 2.5, -1.2]);
        let b = a.matvec(&Vector::ones(30)).unwrap();
        let cheap = gmres_solve(&a, &b, &SolveOptions::default()).unwrap();
        let opts =
            SolveOptions::default().with_criterion(Criterion::RelativeResidual, NormKind::Inf);
        let explicit = gmres_solve(&a, &b, &opts).unwrap();
        assert!(cheap.converged && explicit.converged);
        assert!((cheap.iterations as i64 - explicit.iterations as i64).abs() <= 2);
    }
}
