use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use smw_bench::{
    dump_problem, emit_table, run_bench, solve_command, spectrum_command, validate_problem,
    BenchConfig, Method, SolveArgs,
};
use smw_core::problems::ProblemKind;

/// Exit status when every solve converged.
const EXIT_OK: u8 = 0;
/// Exit status for usage and I/O errors.
const EXIT_ERROR: u8 = 1;
/// Exit status when some solve did not converge, or a splitting is not a contraction.
const EXIT_NOT_CONVERGED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "smw-bench",
    version,
    about = "SMW splitting solvers for nearly circulant systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run iteration-count and timing benchmarks on a shipped problem.
    Bench(BenchArgs),
    /// Solve a system read from a Matrix Market file.
    Solve(SolveCli),
    /// Report spectral radius and oracle residuals for a splitting.
    Spectrum(SpectrumArgs),
    /// Export problem matrices as Matrix Market files.
    Dump(DumpArgs),
}

fn comma_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

#[derive(Args)]
struct BenchArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// linear, cubic, demo4 or mixed.
    #[arg(long)]
    problem: Option<String>,
    /// Comma-separated dimensions, e.g. 1000,10000.
    #[arg(long)]
    sizes: Option<String>,
    /// Comma-separated method names.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    /// relative_residual, absolute_residual, increment or error_vs_known.
    #[arg(long)]
    criterion: Option<String>,
    /// Norm for the stopping metric: two or inf (default inf).
    #[arg(long)]
    norm: Option<String>,
    /// Extrapolation parameter for esmw (defaults to the problem's value).
    #[arg(long)]
    omega: Option<f64>,
    /// csv, json or md.
    #[arg(long)]
    format: Option<String>,
    /// Timing repeats; the minimum is reported.
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Also write the problem matrices here.
    #[arg(long)]
    dump_dir: Option<PathBuf>,
    /// Check rho(V^T M^-1 U) < 1 before solving.
    #[arg(long)]
    validate: bool,
}

impl BenchArgs {
    fn config(&self) -> Result<BenchConfig> {
        let mut cfg = match &self.config {
            Some(path) => BenchConfig::from_json_file(path)?,
            None => BenchConfig::default(),
        };
        if let Some(p) = &self.problem {
            cfg.problem = p.clone();
        }
        if let Some(s) = &self.sizes {
            cfg.sizes = comma_list(s)
                .iter()
                .map(|t| t.parse().with_context(|| format!("invalid size '{t}'")))
                .collect::<Result<_>>()?;
        }
        if let Some(m) = &self.methods {
            cfg.methods = comma_list(m);
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(c) = &self.criterion {
            cfg.criterion = c.clone();
        }
        if let Some(n) = &self.norm {
            cfg.norm = n.clone();
        }
        if self.omega.is_some() {
            cfg.omega = self.omega;
        }
        if let Some(f) = &self.format {
            cfg.format = f.clone();
        }
        if let Some(r) = self.repeats {
            cfg.repeats = r;
        }
        if let Some(m) = self.max_iter {
            cfg.max_iter = m;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct SolveCli {
    /// Matrix Market file holding A.
    matrix: PathBuf,
    /// Centered circulant stencil, e.g. "circulant = [-5/6, 8/3, -5/6]".
    #[arg(long)]
    stencil: Option<String>,
    /// Full first row of M, e.g. "4,3,2,1".
    #[arg(long)]
    first_row: Option<String>,
    /// Right-hand side, one value per line.
    #[arg(long)]
    rhs: Option<PathBuf>,
    /// Use b = A * ones (the error against ones is then available).
    #[arg(long)]
    ones: bool,
    #[arg(long, default_value = "smw")]
    method: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value = "relative_residual")]
    criterion: String,
    #[arg(long, default_value = "two")]
    norm: String,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, default_value = "demo4")]
    problem: String,
    #[arg(long, default_value_t = 16)]
    n: usize,
    /// Replace the circulant by M = I.
    #[arg(long)]
    identity_m: bool,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long)]
    problem: String,
    #[arg(long, default_value = "16")]
    sizes: String,
    #[arg(long)]
    dump_dir: PathBuf,
}

fn bench(args: &BenchArgs) -> Result<u8> {
    let cfg = args.config()?.resolve()?;
    if let Some(dir) = &args.dump_dir {
        for &n in &cfg.sizes {
            for path in dump_problem(cfg.problem, n, dir)? {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    if args.validate {
        for &n in &cfg.sizes {
            for (block, rho) in validate_problem(cfg.problem, n)? {
                eprintln!("{} n={n} {block}: rho(V^T M^-1 U) = {rho:.6}", cfg.problem);
                if rho >= 1.0 {
                    eprintln!(
                        "warning: the splitting is not nearly-M; SMW iterations will not converge"
                    );
                }
            }
        }
    }
    let rows = run_bench(&cfg)?;
    print!("{}", emit_table(&rows, cfg.format)?);
    Ok(if rows.iter().all(|r| r.converged) {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn solve(args: &SolveCli) -> Result<u8> {
    let method: Method = args.method.parse()?;
    let report = solve_command(&SolveArgs {
        matrix: args.matrix.clone(),
        stencil: args.stencil.clone(),
        first_row: args.first_row.clone(),
        rhs: args.rhs.clone(),
        ones: args.ones,
        method,
        tol: args.tol,
        criterion: args.criterion.parse()?,
        norm: args.norm.parse()?,
        omega: args.omega,
        max_iter: args.max_iter,
    })?;
    println!("{}", serde_json::to_string_pretty(&report.summary())?);
    Ok(if report.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn spectrum(args: &SpectrumArgs) -> Result<u8> {
    let kind: ProblemKind = args.problem.parse()?;
    let report = spectrum_command(kind, args.n, args.identity_m)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("{report}");
    }
    if report.is_contraction() {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "rho >= 1: the splitting is not nearly-M and the SMW iteration does not converge"
        );
        Ok(EXIT_NOT_CONVERGED)
    }
}

fn dump(args: &DumpArgs) -> Result<u8> {
    let kind: ProblemKind = args.problem.parse()?;
    for size in comma_list(&args.sizes) {
        let n: usize = size
            .parse()
            .with_context(|| format!("invalid size '{size}'"))?;
        for path in dump_problem(kind, n, &args.dump_dir)? {
            println!("{}", path.display());
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Bench(a) => bench(a),
        Command::Solve(a) => solve(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Dump(a) => dump(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
