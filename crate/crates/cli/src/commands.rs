use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Serialize;
use smw_core::linalg::{dense_eigenvalues, spectral_radius};
use smw_core::problems::{mixed_formulation_problem, ProblemKind};
use smw_core::solvers::{
    esmw_iterate, gauss_seidel_iterate, gmres_solve, jacobi_iterate, smw_iterate,
};
use smw_core::splitting::{capacitance_radius, determinant_lemma_residual};
use smw_core::{
    mtx, Circulant, Criterion, CsrMatrix, DenseMatrix, Error, InvertibleOperator, LinearOperator,
    LowRankFactors, NormKind, SmwSplitting, SolveOptions, SolveReport, Stencil, Vector,
};

use crate::config::Method;
use crate::BenchError;

/// Oracle readings for one splitting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub problem: String,
    pub n: usize,
    /// Which matrix `M` was used: `"circulant"` or `"identity"`.
    pub m: String,
    /// Where the `U, V` factors came from.
    pub factors: String,
    pub rank: usize,
    pub rho_capacitance: f64,
    pub rho_dense: f64,
    pub coincidence_distance: f64,
    pub determinant_residual: f64,
}

impl SpectrumReport {
    pub fn is_contraction(&self) -> bool {
        self.rho_capacitance < 1.0 && self.rho_dense < 1.0
    }
}

impl fmt::Display for SpectrumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "problem:               {} (n = {}, M = {})",
            self.problem, self.n, self.m
        )?;
        writeln!(
            f,
            "factors:               {} (rank {})",
            self.factors, self.rank
        )?;
        writeln!(f, "rho(V^T M^-1 U):       {:.12}", self.rho_capacitance)?;
        writeln!(f, "rho(M^-1 N) dense:     {:.12}", self.rho_dense)?;
        writeln!(
            f,
            "spectrum coincidence:  {:.3e}",
            self.coincidence_distance
        )?;
        write!(
            f,
            "determinant lemma:     {:.3e}",
            self.determinant_residual
        )
    }
}

/// Scalar view of a problem: the matrix, its shipped splitting and, for the
/// mixed problem, the first diagonal block.
fn scalar_parts(
    kind: ProblemKind,
    n: usize,
) -> Result<(CsrMatrix, SmwSplitting, String), BenchError> {
    if kind.is_block() {
        let p = mixed_formulation_problem(n)?;
        Ok((p.system.a1, p.system.s1, "mixed (block A1)".into()))
    } else {
        let p = kind.build(n)?;
        Ok((p.a, p.splitting, p.name))
    }
}

/// Runs the spectral oracles on a shipped problem. With `identity_m` the
/// circulant is replaced by `M = I`, which generally breaks the
/// nearly-M condition.
pub fn spectrum_command(
    kind: ProblemKind,
    n: usize,
    identity_m: bool,
) -> Result<SpectrumReport, BenchError> {
    let (a, shipped, name) = scalar_parts(kind, n)?;
    let n = a.rows();
    let cap = shipped.cap();
    if n > cap {
        return Err(Error::CapExceeded { n, cap }.into());
    }
    let splitting = if identity_m {
        SmwSplitting::from_difference(&a, InvertibleOperator::dense(DenseMatrix::identity(n))?)?
    } else {
        shipped
    };
    let (factors, source) = match splitting.low_rank() {
        Some(f) => (f.clone(), "attached"),
        None => (
            LowRankFactors::from_column_support(splitting.n_mat())?,
            "column support of N",
        ),
    };
    let with_factors = match splitting.low_rank() {
        Some(_) => splitting.clone(),
        None => splitting.clone().with_low_rank(factors.clone())?,
    };
    let rho_dense = spectral_radius(&dense_eigenvalues(&splitting.iteration_matrix()?)?);
    Ok(SpectrumReport {
        problem: name,
        n,
        m: if identity_m { "identity" } else { "circulant" }.into(),
        factors: source.into(),
        rank: factors.rank(),
        rho_capacitance: capacitance_radius(splitting.m(), &factors)?,
        rho_dense,
        coincidence_distance: with_factors.spectrum_coincidence_check()?,
        determinant_residual: determinant_lemma_residual(
            &splitting.m().densify(cap)?,
            &factors.u,
            &factors.v,
        )?,
    })
}

fn splitting_radius(s: &SmwSplitting) -> Result<f64, BenchError> {
    match s.low_rank() {
        Some(_) => Ok(s.validate_nearly_m()?),
        None => Ok(capacitance_radius(
            s.m(),
            &LowRankFactors::from_column_support(s.n_mat())?,
        )?),
    }
}

/// `rho(V^T M^-1 U)` for every splitting of a problem, at any size: factors
/// come from the problem when attached and from the columns of `N` otherwise.
pub fn validate_problem(kind: ProblemKind, n: usize) -> Result<Vec<(String, f64)>, BenchError> {
    if kind.is_block() {
        let p = mixed_formulation_problem(n)?;
        Ok(vec![
            ("A1".into(), splitting_radius(&p.system.s1)?),
            ("A2".into(), splitting_radius(&p.system.s2)?),
        ])
    } else {
        let p = kind.build(n)?;
        Ok(vec![("A".into(), splitting_radius(&p.splitting)?)])
    }
}

fn parse_scalar(token: &str) -> Result<f64, BenchError> {
    let bad = || {
        BenchError::Config(format!(
            "cannot parse '{token}' as a number or p/q fraction"
        ))
    };
    match token.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            Ok(p / q)
        }
        None => token.parse().map_err(|_| bad()),
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>, BenchError> {
    let body = text
        .trim()
        .trim_start_matches(['[', '('])
        .trim_end_matches([']', ')']);
    body.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(parse_scalar)
        .collect()
}

/// Parses `circulant = [a, b, c]`, `[a, b, c]` or `a, b, c` into a row of
/// stencil coefficients, left to right. Entries may be `p/q` fractions.
pub fn parse_stencil_literal(text: &str) -> Result<Vec<f64>, BenchError> {
    let body = match text.split_once('=') {
        Some((name, rest)) if name.trim() == "circulant" => rest,
        Some((name, _)) => {
            return Err(BenchError::Config(format!(
                "expected 'circulant = [...]', found '{}'",
                name.trim()
            )))
        }
        None => text,
    };
    let row = parse_list(body)?;
    if row.is_empty() {
        return Err(BenchError::Config("stencil literal is empty".into()));
    }
    Ok(row)
}

fn real(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

#[derive(Debug, Clone)]
pub struct SolveArgs {
    pub matrix: PathBuf,
    /// Centered stencil literal, see [`parse_stencil_literal`].
    pub stencil: Option<String>,
    /// Full first row of `M`, for circulants not given by a centered stencil.
    pub first_row: Option<String>,
    /// Text file with one value per line (`re` or `re im`).
    pub rhs: Option<PathBuf>,
    pub ones: bool,
    pub method: Method,
    pub tol: f64,
    pub criterion: Criterion,
    pub norm: NormKind,
    pub omega: Option<f64>,
    pub max_iter: usize,
}

fn read_rhs(path: &Path, n: usize) -> Result<Vector, BenchError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
    let mut values = Vec::with_capacity(n);
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let at =
            |msg: String| BenchError::Config(format!("{} line {}: {msg}", path.display(), k + 1));
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| at(format!("invalid number '{s}'")))
        };
        let z = match parts.as_slice() {
            [re] => C64::new(num(re)?, 0.0),
            [re, im] => C64::new(num(re)?, num(im)?),
            _ => return Err(at("expected 're' or 're im'".into())),
        };
        values.push(z);
    }
    if values.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix has n = {n}, rhs has {} entries",
            values.len()
        ))
        .into());
    }
    Ok(Vector::new(values)?)
}

fn circulant_from_args(args: &SolveArgs, n: usize) -> Result<Option<Circulant>, BenchError> {
    match (&args.stencil, &args.first_row) {
        (Some(_), Some(_)) => Err(BenchError::Config(
            "give either a stencil or a first row, not both".into(),
        )),
        (Some(s), None) => {
            let stencil = Stencil::centered(&real(&parse_stencil_literal(s)?))?;
            Ok(Some(Circulant::from_stencil(n, &stencil)?))
        }
        (None, Some(r)) => {
            let row = parse_list(r)?;
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "matrix has n = {n}, first row has {} entries",
                    row.len()
                ))
                .into());
            }
            Ok(Some(Circulant::from_first_row(&real(&row))))
        }
        (None, None) => Ok(None),
    }
}

/// Solves a system read from a Matrix Market file.
pub fn solve_command(args: &SolveArgs) -> Result<SolveReport, BenchError> {
    let a = mtx::read_matrix_market_file(&args.matrix)?;
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        ))
        .into());
    }
    let n = a.rows();
    let b = match (&args.rhs, args.ones) {
        (Some(_), true) => {
            return Err(BenchError::Config(
                "give either --rhs or --ones, not both".into(),
            ))
        }
        (Some(path), false) => read_rhs(path, n)?,
        (None, true) => Vector::new(a.apply(&Vector::ones(n)))?,
        (None, false) => {
            return Err(BenchError::Config(
                "a right-hand side is required (--rhs FILE or --ones)".into(),
            ))
        }
    };
    let m = circulant_from_args(args, n)?;
    let mut opts = SolveOptions::default()
        .with_tol(args.tol)
        .with_max_iter(args.max_iter)
        .with_criterion(args.criterion, args.norm);
    if args.ones {
        opts = opts.with_known_solution(Vector::ones(n));
    }
    let splitting = || -> Result<SmwSplitting, BenchError> {
        let m = m.clone().ok_or_else(|| {
            BenchError::Config(format!(
                "{} needs a circulant (--stencil or --first-row)",
                args.method
            ))
        })?;
        Ok(SmwSplitting::from_difference(&a, m.into())?)
    };
    let report = match args.method {
        Method::Smw => smw_iterate(&splitting()?, &b, &opts)?,
        Method::Esmw => {
            let w = args
                .omega
                .ok_or_else(|| BenchError::Config("esmw needs --omega".into()))?;
            esmw_iterate(&splitting()?, &b, &opts.with_omega(w))?
        }
        Method::Jacobi => jacobi_iterate(&a, &b, &opts)?,
        Method::GaussSeidel => gauss_seidel_iterate(&a, &b, &opts)?,
        Method::Gmres => gmres_solve(&a, &b, &opts)?,
        m => {
            return Err(BenchError::Config(format!(
                "{m} needs a block system; use `bench --problem mixed`"
            )))
        }
    };
    Ok(report)
}

fn column_matrix(v: &[C64]) -> Result<CsrMatrix, BenchError> {
    let t: Vec<(usize, usize, C64)> = v.iter().enumerate().map(|(i, &z)| (i, 0, z)).collect();
    Ok(CsrMatrix::from_triplets(v.len(), 1, &t)?)
}

/// Writes the matrices of a problem as Matrix Market files into `dir`.
/// Circulants are stored by their first column, as `n x 1` matrices.
pub fn dump_problem(kind: ProblemKind, n: usize, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    std::fs::create_dir_all(dir).map_err(|e| BenchError::Io(format!("{}: {e}", dir.display())))?;
    let mut parts: Vec<(String, CsrMatrix)> = Vec::new();
    let n_actual;
    if kind.is_block() {
        let p = mixed_formulation_problem(n)?;
        let s = &p.system;
        n_actual = s.n1();
        parts.push(("A".into(), s.assemble()));
        parts.push(("A1".into(), s.a1.clone()));
        parts.push(("A2".into(), s.a2.clone()));
        parts.push(("B1".into(), s.b1.clone()));
        parts.push(("B2".into(), s.b2.clone()));
        parts.push(("N1".into(), s.s1.n_mat().clone()));
        parts.push(("N2".into(), s.s2.n_mat().clone()));
        parts.push(("b".into(), column_matrix(&s.rhs())?));
    } else {
        let p = kind.build(n)?;
        n_actual = p.n();
        parts.push(("A".into(), p.a.clone()));
        parts.push(("N".into(), p.splitting.n_mat().clone()));
        if let InvertibleOperator::Circulant(c) = p.splitting.m() {
            parts.push(("M_first_column".into(), column_matrix(c.first_column())?));
        }
        parts.push(("b".into(), column_matrix(&p.rhs)?));
    }
    let mut written = Vec::with_capacity(parts.len());
    for (part, matrix) in parts {
        let path = dir.join(format!("{}_n{}_{}.mtx", kind.name(), n_actual, part));
        mtx::write_matrix_market_file(&matrix, &path)?;
        written.push(path);
    }
    Ok(written)
}
