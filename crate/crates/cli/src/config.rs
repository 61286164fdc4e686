use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smw_core::problems::ProblemKind;
use smw_core::{Criterion, NormKind};

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Smw,
    Esmw,
    Jacobi,
    GaussSeidel,
    Gmres,
    BlockJacobiSmw,
    BlockGsSmw,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Smw,
        Method::Esmw,
        Method::Jacobi,
        Method::GaussSeidel,
        Method::Gmres,
        Method::BlockJacobiSmw,
        Method::BlockGsSmw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Smw => "smw",
            Method::Esmw => "esmw",
            Method::Jacobi => "jacobi",
            Method::GaussSeidel => "gauss_seidel",
            Method::Gmres => "gmres",
            Method::BlockJacobiSmw => "block_jacobi_smw",
            Method::BlockGsSmw => "block_gs_smw",
        }
    }

    /// Column heading for markdown tables.
    pub fn label(self) -> &'static str {
        match self {
            Method::Smw => "SMW",
            Method::Esmw => "eSMW",
            Method::Jacobi => "Jacobi",
            Method::GaussSeidel => "Gauss-Seidel",
            Method::Gmres => "GMRES",
            Method::BlockJacobiSmw => "Block Jacobi-SMW",
            Method::BlockGsSmw => "Block Gauss-Seidel-SMW",
        }
    }

    pub fn is_block(self) -> bool {
        matches!(self, Method::BlockJacobiSmw | Method::BlockGsSmw)
    }

    pub fn valid_names() -> String {
        Method::ALL
            .iter()
            .map(|m| m.name())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, BenchError> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| BenchError::UnknownMethod {
                name: s.to_string(),
                valid: Method::valid_names(),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
    Md,
}

impl FromStr for Format {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "" | "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Md),
            _ => Err(BenchError::Config(format!(
                "unknown format '{s}' (valid: csv, json, md)"
            ))),
        }
    }
}

/// Benchmark settings as stored in a JSON config file. Names are kept as
/// strings so that unknown ones are reported with the list of valid names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub problem: String,
    pub sizes: Vec<usize>,
    pub methods: Vec<String>,
    pub tol: f64,
    pub criterion: String,
    pub norm: String,
    pub omega: Option<f64>,
    pub format: String,
    pub repeats: usize,
    pub max_iter: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            problem: "linear".into(),
            sizes: vec![1000],
            methods: vec![
                "gauss_seidel".into(),
                "gmres".into(),
                "smw".into(),
                "esmw".into(),
            ],
            tol: 1e-8,
            criterion: Criterion::default().name().into(),
            // the residual of these problems sits in the corners, so the
            // two-norm relative residual drifts with sqrt(n); inf does not
            norm: "inf".into(),
            omega: None,
            format: "csv".into(),
            repeats: 3,
            max_iter: 10_000,
        }
    }
}

/// A [`BenchConfig`] with every name resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub problem: ProblemKind,
    pub sizes: Vec<usize>,
    pub methods: Vec<Method>,
    pub tol: f64,
    pub criterion: Criterion,
    pub norm: NormKind,
    pub omega: Option<f64>,
    pub format: Format,
    pub repeats: usize,
    pub max_iter: usize,
}

impl BenchConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))
    }

    pub fn resolve(&self) -> Result<ResolvedConfig, BenchError> {
        let problem: ProblemKind = self.problem.parse()?;
        let methods = self
            .methods
            .iter()
            .map(|m| m.parse())
            .collect::<Result<Vec<Method>, _>>()?;
        if methods.is_empty() {
            return Err(BenchError::Config("at least one method is required".into()));
        }
        if self.sizes.is_empty() {
            return Err(BenchError::Config("at least one size is required".into()));
        }
        for m in &methods {
            if m.is_block() && !problem.is_block() {
                return Err(BenchError::Config(format!(
                    "{m} only applies to the mixed problem"
                )));
            }
            if matches!(m, Method::Smw | Method::Esmw) && problem.is_block() {
                return Err(BenchError::Config(format!(
                    "{m} needs a scalar problem; use the block variants for mixed"
                )));
            }
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| n < problem.min_n()) {
            return Err(BenchError::Config(format!(
                "{problem} needs n >= {}, got {n}",
                problem.min_n()
            )));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(BenchError::Config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.repeats == 0 || self.max_iter == 0 {
            return Err(BenchError::Config(
                "repeats and max_iter must be positive".into(),
            ));
        }
        Ok(ResolvedConfig {
            problem,
            // the demo has a fixed size
            sizes: if problem == ProblemKind::Demo4 {
                vec![4]
            } else {
                self.sizes.clone()
            },
            methods,
            tol: self.tol,
            criterion: self.criterion.parse()?,
            norm: self.norm.parse()?,
            omega: self.omega,
            format: self.format.parse()?,
            repeats: self.repeats,
            max_iter: self.max_iter,
        })
    }
}
