//! Stationary iterations built on a Sherman–Morrison–Woodbury splitting.
//!
//! A matrix `A` is written as `A = M - N` where `M` is cheap to invert
//! (typically circulant, inverted in `O(n log n)` with the FFT) and `N` is a
//! sparse low-rank correction. The basic iteration is
//!
//! ```text
//! x_{k+1} = M^{-1} (N x_k + b)
//! ```
//!
//! and converges whenever `rho(V^T M^{-1} U) < 1` for a factorization
//! `N = U V^T`. The crate also provides the extrapolated variant, block
//! Jacobi / Gauss–Seidel versions for 2×2 saddle-point systems, the
//! baselines used for comparison (Jacobi, Gauss–Seidel, GMRES), and
//! generators for the one-dimensional finite-element test problems.
//!
//! # Modules
//!
//! - [`linalg`] - vectors, dense and CSR matrices, LU, dense eigenvalues
//! - [`mtx`] - Matrix Market coordinate reader/writer
//! - [`circulant`] - circulant operators diagonalized by the DFT
//! - [`splitting`] - `A = M - N` splittings and their spectral oracles
//! - [`solvers`] - the iterations and their reports
//! - [`problems`] - deterministic test-problem generators

pub mod circulant;
pub mod error;
pub mod linalg;
pub mod mtx;
pub mod problems;
pub mod solvers;
pub mod splitting;

pub use num_complex::Complex64 as C64;

pub use circulant::{dft, idft, Circulant, Stencil};
pub use error::{Error, Result};
pub use linalg::{CsrMatrix, DenseMatrix, LinearOperator, NormKind, Vector};
pub use problems::{BlockProblemInstance, ProblemInstance};
pub use solvers::{Criterion, SolveOptions, SolveReport};
pub use splitting::{InvertibleOperator, LowRankFactors, SmwSplitting};

/// Dimension above which dense oracles (eigenvalues, densification) refuse to run.
pub const DEFAULT_SMALL_CAP: usize = 512;
