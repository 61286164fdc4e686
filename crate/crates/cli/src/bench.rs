use serde::{Deserialize, Serialize};
use smw_core::problems::{mixed_formulation_problem, ProblemKind};
use smw_core::solvers::{
    block_gs_smw, block_jacobi_smw, esmw_iterate, gauss_seidel_iterate, gmres_solve,
    jacobi_iterate, smw_iterate,
};
use smw_core::{CsrMatrix, SmwSplitting, SolveOptions, SolveReport, Vector};

use crate::config::{Method, ResolvedConfig};
use crate::BenchError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub problem: String,
    pub method: String,
    pub n: usize,
    pub iterations: usize,
    pub converged: bool,
    pub diverged: bool,
    pub final_metric: f64,
    pub wall_seconds: f64,
}

/// What a single method needs from a problem, scalar or block.
#[allow(clippy::large_enum_variant)]
enum System {
    Scalar {
        a: CsrMatrix,
        splitting: SmwSplitting,
        rhs: Vector,
        omega: Option<f64>,
    },
    Block(smw_core::solvers::BlockSystem, CsrMatrix, Vector),
}

impl System {
    fn build(kind: ProblemKind, n: usize) -> Result<(Self, Vector), BenchError> {
        if kind.is_block() {
            let p = mixed_formulation_problem(n)?;
            let a = p.system.assemble();
            let rhs = p.system.rhs();
            Ok((System::Block(p.system, a, rhs), p.exact_solution))
        } else {
            let p = kind.build(n)?;
            let omega = p.suggested_omega;
            Ok((
                System::Scalar {
                    a: p.a,
                    splitting: p.splitting,
                    rhs: p.rhs,
                    omega,
                },
                p.exact_solution,
            ))
        }
    }

    fn matrix_and_rhs(&self) -> (&CsrMatrix, &Vector) {
        match self {
            System::Scalar { a, rhs, .. } => (a, rhs),
            System::Block(_, a, rhs) => (a, rhs),
        }
    }

    fn run(
        &self,
        method: Method,
        opts: &SolveOptions,
        omega: Option<f64>,
    ) -> Result<SolveReport, BenchError> {
        let (a, rhs) = self.matrix_and_rhs();
        let report = match (method, self) {
            (Method::Jacobi, _) => jacobi_iterate(a, rhs, opts)?,
            (Method::GaussSeidel, _) => gauss_seidel_iterate(a, rhs, opts)?,
            (Method::Gmres, _) => gmres_solve(a, rhs, opts)?,
            (Method::Smw, System::Scalar { splitting, .. }) => smw_iterate(splitting, rhs, opts)?,
            (
                Method::Esmw,
                System::Scalar {
                    splitting,
                    omega: suggested,
                    ..
                },
            ) => {
                let w = omega
                    .or(*suggested)
                    .ok_or_else(|| BenchError::Config("esmw needs --omega".into()))?;
                esmw_iterate(splitting, rhs, &opts.clone().with_omega(w))?
            }
            (Method::BlockJacobiSmw, System::Block(sys, ..)) => block_jacobi_smw(sys, opts)?,
            (Method::BlockGsSmw, System::Block(sys, ..)) => block_gs_smw(sys, opts)?,
            (m, _) => {
                return Err(BenchError::Config(format!(
                    "{m} does not apply to this problem"
                )))
            }
        };
        Ok(report)
    }
}

/// Runs every (size, method) pair in config order. Iteration counts come
/// from the first run; the reported time is the minimum over `repeats`.
pub fn run_bench(cfg: &ResolvedConfig) -> Result<Vec<BenchRow>, BenchError> {
    let mut rows = Vec::with_capacity(cfg.sizes.len() * cfg.methods.len());
    for &n in &cfg.sizes {
        let (system, exact) = System::build(cfg.problem, n)?;
        let opts = SolveOptions::default()
            .with_tol(cfg.tol)
            .with_max_iter(cfg.max_iter)
            .with_criterion(cfg.criterion, cfg.norm)
            .with_known_solution(exact);
        for &method in &cfg.methods {
            let first = system.run(method, &opts, cfg.omega)?;
            let mut best = first.wall_seconds;
            for _ in 1..cfg.repeats {
                best = best.min(system.run(method, &opts, cfg.omega)?.wall_seconds);
            }
            rows.push(BenchRow {
                problem: cfg.problem.name().to_string(),
                method: method.name().to_string(),
                n: first.n,
                iterations: first.iterations,
                converged: first.converged,
                diverged: first.diverged,
                final_metric: first.final_metric,
                wall_seconds: best,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::BenchConfig;

    fn config(problem: &str, sizes: Vec<usize>, methods: &[&str]) -> ResolvedConfig {
        BenchConfig {
            problem: problem.into(),
            sizes,
            methods: methods.iter().map(|m| m.to_string()).collect(),
            repeats: 1,
            ..Default::default()
        }
        .resolve()
        .unwrap()
    }

    #[test]
    fn demo_counts() {
        let rows = run_bench(&config(
            "demo4",
            vec![4],
            &["smw", "esmw", "gauss_seidel", "gmres"],
        ))
        .unwrap();
        let iters: Vec<usize> = rows.iter().map(|r| r.iterations).collect();
        assert!(rows.iter().all(|r| r.converged && r.n == 4));
        assert!(iters[0].abs_diff(20) <= 4, "{iters:?}");
        assert!(iters[1].abs_diff(14) <= 4, "{iters:?}");
        assert!(iters[2].abs_diff(78) <= 8, "{iters:?}");
        assert!(iters[3].abs_diff(3) <= 1, "{iters:?}");
    }

    #[test]
    fn rows_follow_config_order() {
        let rows = run_bench(&config("linear", vec![50, 20], &["gmres", "smw"])).unwrap();
        let keys: Vec<(usize, &str)> = rows.iter().map(|r| (r.n, r.method.as_str())).collect();
        assert_eq!(
            keys,
            vec![(50, "gmres"), (50, "smw"), (20, "gmres"), (20, "smw")]
        );
    }

    #[test]
    fn block_methods_run_on_mixed() {
        let rows = run_bench(&config("mixed", vec![10], &["block_jacobi_smw", "gmres"])).unwrap();
        assert_eq!(rows[0].n, 20);
        assert!(rows[1].converged);
    }
}
