//! Iterative solvers with a shared stopping contract.
//!
//! Every method counts one iteration per update of the iterate and checks
//! its convergence metric after each update. Residual and error based
//! criteria are also checked once on the initial guess, so starting at the
//! exact solution reports convergence after zero iterations.

mod block;
mod gmres;
mod stationary;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, NormKind, Vector};
use crate::C64;

pub use block::{block_gs_smw, block_jacobi_smw, BlockSystem};
pub use gmres::gmres_solve;
pub use stationary::{esmw_iterate, gauss_seidel_iterate, jacobi_iterate, smw_iterate};

/// Factor over the first metric beyond which a stationary method is flagged divergent.
pub const DEFAULT_BLOWUP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// `||b - A x|| / ||b||`
    #[default]
    RelativeResidual,
    /// `||b - A x||`
    AbsoluteResidual,
    /// `||x_{k+1} - x_k||`
    Increment,
    /// `||x_k - x_*||` against a supplied solution.
    ErrorVsKnown,
}

impl Criterion {
    pub const ALL: [Criterion; 4] = [
        Criterion::RelativeResidual,
        Criterion::AbsoluteResidual,
        Criterion::Increment,
        Criterion::ErrorVsKnown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::RelativeResidual => "relative_residual",
            Criterion::AbsoluteResidual => "absolute_residual",
            Criterion::Increment => "increment",
            Criterion::ErrorVsKnown => "error_vs_known",
        }
    }

    fn uses_residual(self) -> bool {
        matches!(
            self,
            Criterion::RelativeResidual | Criterion::AbsoluteResidual
        )
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Criterion::ALL.iter().map(|c| c.name()).collect();
                Error::InvalidInput(format!(
                    "unknown criterion '{s}' (valid: {})",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub criterion: Criterion,
    pub norm_kind: NormKind,
    /// Extrapolation parameter; required by the extrapolated SMW iteration.
    pub omega: Option<C64>,
    pub record_history: bool,
    /// Defaults to the zero vector.
    pub initial_guess: Option<Vector>,
    /// Required by [`Criterion::ErrorVsKnown`].
    pub known_solution: Option<Vector>,
    pub blowup_factor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 10_000,
            criterion: Criterion::RelativeResidual,
            norm_kind: NormKind::Two,
            omega: None,
            record_history: false,
            initial_guess: None,
            known_solution: None,
            blowup_factor: DEFAULT_BLOWUP,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_criterion(mut self, criterion: Criterion, norm_kind: NormKind) -> Self {
        self.criterion = criterion;
        self.norm_kind = norm_kind;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = Some(C64::new(omega, 0.0));
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_history(mut self) -> Self {
        self.record_history = true;
        self
    }

    pub fn with_initial_guess(mut self, x0: Vector) -> Self {
        self.initial_guess = Some(x0);
        self
    }

    pub fn with_known_solution(mut self, x: Vector) -> Self {
        self.known_solution = Some(x);
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        if let Some(x0) = &self.initial_guess {
            if x0.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "initial guess has length {}, system has n = {n}",
                    x0.len()
                )));
            }
        }
        match (&self.known_solution, self.criterion) {
            (None, Criterion::ErrorVsKnown) => Err(Error::InvalidInput(
                "criterion error_vs_known needs a known solution".into(),
            )),
            (Some(x), _) if x.len() != n => Err(Error::DimensionMismatch(format!(
                "known solution has length {}, system has n = {n}",
                x.len()
            ))),
            _ => Ok(()),
        }
    }

    fn start(&self, n: usize) -> Vec<C64> {
        self.initial_guess
            .as_ref()
            .map_or_else(|| vec![C64::new(0.0, 0.0); n], |x| x.to_vec())
    }
}

/// Outcome of one solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method: String,
    pub n: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Set when a stationary method exceeded the blow-up factor or produced
    /// non-finite iterates.
    pub diverged: bool,
    pub final_metric: f64,
    pub metric_history: Option<Vec<f64>>,
    /// Main loop only.
    pub wall_seconds: f64,
    pub solution: Vector,
    pub tol: f64,
    pub criterion: Criterion,
    pub omega: Option<C64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq)]
#[serde(untagged)]
pub enum OmegaValue {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl From<C64> for OmegaValue {
    fn from(z: C64) -> Self {
        if z.im == 0.0 {
            OmegaValue::Real(z.re)
        } else {
            OmegaValue::Complex { re: z.re, im: z.im }
        }
    }
}

/// The stable machine-readable view of a [`SolveReport`].
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ReportSummary {
    pub method: String,
    pub n: usize,
    pub iterations: usize,
    pub converged: bool,
    pub final_metric: f64,
    pub wall_seconds: f64,
    pub tol: f64,
    pub criterion: Criterion,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub omega: Option<OmegaValue>,
}

impl SolveReport {
    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            method: self.method.clone(),
            n: self.n,
            iterations: self.iterations,
            converged: self.converged,
            final_metric: self.final_metric,
            wall_seconds: self.wall_seconds,
            tol: self.tol,
            criterion: self.criterion,
            omega: self.omega.map(OmegaValue::from),
        }
    }
}

/// `2 / (lambda_min + lambda_max)`, where the bounds enclose the real
/// spectrum of the preconditioned matrix `M^{-1} A = I - M^{-1} N`.
/// The extrapolated iteration then has spectral radius
/// `(lambda_max - lambda_min) / (lambda_max + lambda_min)`.
pub fn optimal_omega(lambda_min: f64, lambda_max: f64) -> Result<f64> {
    let sum = lambda_min + lambda_max;
    if sum == 0.0 || !sum.is_finite() {
        return Err(Error::DegenerateOmega);
    }
    Ok(2.0 / sum)
}

/// Stopping logic shared by all methods.
pub(crate) struct Monitor<'a> {
    opts: &'a SolveOptions,
    b_norm: f64,
    history: Vec<f64>,
    first: Option<f64>,
    pub last: f64,
    started: Instant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Status {
    Continue,
    Converged,
    Diverged,
}

impl<'a> Monitor<'a> {
    pub fn new(opts: &'a SolveOptions, b: &[C64]) -> Self {
        let b_norm = norm(b, opts.norm_kind);
        Self {
            opts,
            b_norm: if b_norm > 0.0 { b_norm } else { 1.0 },
            history: Vec::new(),
            first: None,
            last: f64::INFINITY,
            started: Instant::now(),
        }
    }

    /// Metric for iterate `x`, given the previous iterate and the residual `b - A x`.
    pub fn metric(&self, x: &[C64], prev: &[C64], residual: Option<&[C64]>) -> f64 {
        let kind = self.opts.norm_kind;
        match self.opts.criterion {
            Criterion::RelativeResidual => {
                norm(residual.expect("residual required"), kind) / self.b_norm
            }
            Criterion::AbsoluteResidual => norm(residual.expect("residual required"), kind),
            Criterion::Increment => {
                let d: Vec<C64> = x.iter().zip(prev).map(|(a, b)| a - b).collect();
                norm(&d, kind)
            }
            Criterion::ErrorVsKnown => {
                let known = self.opts.known_solution.as_ref().expect("validated");
                let d: Vec<C64> = x.iter().zip(known.iter()).map(|(a, b)| a - b).collect();
                norm(&d, kind)
            }
        }
    }

    pub fn needs_residual(&self) -> bool {
        self.opts.criterion.uses_residual()
    }

    /// Whether the initial guess is checked before iterating.
    pub fn checks_initial(&self) -> bool {
        self.opts.criterion != Criterion::Increment
    }

    pub fn record(&mut self, metric: f64) -> Status {
        self.last = metric;
        if self.opts.record_history {
            self.history.push(metric);
        }
        if metric <= self.opts.tol {
            return Status::Converged;
        }
        if !metric.is_finite() {
            return Status::Diverged;
        }
        match self.first {
            None => {
                self.first = Some(metric);
                Status::Continue
            }
            Some(f) if metric > self.opts.blowup_factor * f => Status::Diverged,
            Some(_) => Status::Continue,
        }
    }

    pub fn finish(
        self,
        method: &str,
        iterations: usize,
        status: Status,
        solution: Vec<C64>,
    ) -> SolveReport {
        let wall_seconds = self.started.elapsed().as_secs_f64();
        SolveReport {
            method: method.to_string(),
            n: solution.len(),
            iterations,
            converged: status == Status::Converged,
            diverged: status == Status::Diverged,
            final_metric: self.last,
            metric_history: self.opts.record_history.then_some(self.history),
            wall_seconds,
            solution: Vector::from_vec_unchecked(solution),
            tol: self.opts.tol,
            criterion: self.opts.criterion,
            omega: self.opts.omega,
        }
    }
}

/// Runs a one-step fixed-point map `x_new = step(x_old)` under the shared
/// stopping rule. `apply_a` writes `A x` into its second argument.
pub(crate) fn run_fixed_point(
    method: &str,
    b: &[C64],
    opts: &SolveOptions,
    apply_a: impl Fn(&[C64], &mut [C64]),
    mut step: impl FnMut(&[C64], &mut [C64]) -> Result<()>,
) -> Result<SolveReport> {
    let n = b.len();
    opts.validate(n)?;
    let mut x = opts.start(n);
    let mut next = vec![C64::new(0.0, 0.0); n];
    let mut res = vec![C64::new(0.0, 0.0); n];
    let residual = |x: &[C64], res: &mut Vec<C64>| {
        apply_a(x, res);
        res.iter_mut().zip(b).for_each(|(r, &bi)| *r = bi - *r);
    };

    let mut mon = Monitor::new(opts, b);
    if mon.checks_initial() {
        if mon.needs_residual() {
            residual(&x, &mut res);
        }
        let m = mon.metric(&x, &x, Some(&res));
        let status = mon.record(m);
        if status != Status::Continue {
            return Ok(mon.finish(method, 0, status, x));
        }
    }
    let mut status = Status::Continue;
    let mut k = 0;
    while k < opts.max_iter {
        step(&x, &mut next)?;
        k += 1;
        if mon.needs_residual() {
            residual(&next, &mut res);
        }
        let m = mon.metric(&next, &x, Some(&res));
        std::mem::swap(&mut x, &mut next);
        status = mon.record(m);
        if status != Status::Continue {
            break;
        }
    }
    Ok(mon.finish(method, k, status, x))
}
