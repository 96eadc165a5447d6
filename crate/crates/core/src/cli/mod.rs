//! Command-line front end.
//!
//! Every subcommand produces a [`RunReport`]; `--format csv` writes the main
//! table instead. Exit codes: 0 success, 2 precondition violated, 3 numerical
//! failure or unsettled extrapolation, 64 usage error.

mod compare;
mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

pub use compare::{
    compare, Comparison, DIXMIER_TOL, ORDERED_TOL, RESIDUE_TOL, SHELL_ACCELERATED_TOL, SHELL_RAW_TOL,
};
pub use report::{canonical_json, flat_csv, format_float, EngineGap, RunReport, FORMAT_VERSION};

use crate::algebra::{matrix_block, read_operator, weighted_product, CoefficientOperator, DiagonalWeight, Form};
use crate::config::MagneticConfig;
use crate::dixmier::{
    calderon_norm, collect_spectrum, default_checkpoints, dixmier_estimate, gamma, tauberian_residue, Spectrum,
    SpectrumKind, SpectrumSource, Truncation,
};
use crate::dos::{
    dixmier_dos_check, dos_measure, functional_calculus, idos, idos_shell_approx, landau_hamiltonian, spectral_formula_check,
    CompactTestFunction,
};
use crate::error::{Error, Result};
use crate::kernel::{apply_kernel, commutant_residual, folner_trace, kernel_of, GridFunction, UniformGrid};
use crate::laguerre::{orthonormality_check, psi, BasisIndex, Point2D, QuadratureSpec};
use crate::trace::{tau_diagonal, tau_ordered_basis, tau_residue, tau_shell, ConvergenceTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Fit residual above which a Dixmier extrapolation is flagged unsettled.
const DIXMIER_RESIDUAL_FLAG: f64 = 10.0 * DIXMIER_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BudgetProfile {
    Quick,
    Full,
}

/// Truncations and grids shared by the engines.
#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    pub dixmier_shells: usize,
    pub x_grid: Vec<f64>,
    pub n_grid: Vec<usize>,
    /// Shell cutoffs used as ordered-basis checkpoints.
    pub ordered_shells: Vec<usize>,
}

impl Budget {
    pub fn quick() -> Self {
        Self {
            dixmier_shells: 512,
            x_grid: vec![1e-1, 1e-2, 1e-3],
            n_grid: vec![100, 1000, 10_000],
            ordered_shells: vec![64, 128, 256, 512],
        }
    }

    pub fn full() -> Self {
        Self {
            dixmier_shells: 2000,
            ordered_shells: vec![250, 500, 1000, 2000],
            ..Self::quick()
        }
    }

    pub fn for_profile(p: BudgetProfile) -> Self {
        match p {
            BudgetProfile::Quick => Self::quick(),
            BudgetProfile::Full => Self::full(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "magtrace", version, about = "Trace calculus for magnetic operators")]
struct Cli {
    /// Magnetic length.
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    ell: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Reserved; every pipeline is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long = "budget-profile", global = true, value_enum, default_value_t = BudgetProfile::Quick)]
    budget_profile: BudgetProfile,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Laguerre basis functions.
    #[command(subcommand)]
    Basis(BasisCmd),
    /// Coefficient-operator algebra.
    #[command(subcommand)]
    Op(OpCmd),
    /// Position-space kernels.
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Canonical trace engines.
    #[command(subcommand)]
    Trace(TraceCmd),
    /// Singular traces of weighted operators.
    #[command(subcommand)]
    Dixmier(DixmierCmd),
    /// Density of states of the Landau Hamiltonian.
    #[command(subcommand)]
    Dos(DosCmd),
    /// Runs every trace engine on one operator.
    Compare {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
    },
}

#[derive(Debug, Subcommand)]
enum BasisCmd {
    /// Evaluates ψ_{n,m} at a point.
    Eval {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, allow_negative_numbers = true)]
        x1: f64,
        #[arg(long, allow_negative_numbers = true)]
        x2: f64,
    },
    /// Gram-matrix errors for indices up to max-index.
    Gram {
        #[arg(long = "max-index")]
        max_index: usize,
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Samples ψ_{n,m} on a uniform grid (CSV).
    Grid {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long = "R", default_value_t = 10.0)]
        half_width: f64,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
    },
}

#[derive(Debug, Subcommand)]
enum OpCmd {
    /// Product of two operators, written as an operator file.
    Compose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "in2")]
        input2: PathBuf,
    },
    /// Adjoint, written as an operator file.
    Adjoint {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// ℓ^p norm of the coefficients (`--p inf` for the maximum).
    Norm {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Dense block m truncated to order N.
    Block {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long = "N")]
        order: usize,
    },
}

#[derive(Debug, Subcommand)]
enum KernelCmd {
    /// Kernel value f_S(x).
    Eval {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        x1: f64,
        #[arg(long, allow_negative_numbers = true)]
        x2: f64,
    },
    /// Trace per unit volume over [−R, R]².
    Folner {
        #[arg(long)]
        op: PathBuf,
        #[arg(long = "R")]
        half_width: f64,
    },
    /// Commutator residual with the magnetic translation V(a) on ψ_{0,0}.
    Commutant {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        a1: f64,
        #[arg(long, allow_negative_numbers = true)]
        a2: f64,
        #[arg(long = "R", default_value_t = 10.0)]
        half_width: f64,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
    },
    /// Applies the kernel to a grid function read from CSV (CSV output).
    Apply {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        grid: PathBuf,
    },
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[arg(long)]
    op: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(long, value_delimiter = ',')]
    xgrid: Option<Vec<f64>>,
    #[arg(long = "Ngrid", value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
}

#[derive(Debug, Subcommand)]
enum TraceCmd {
    /// Diagonal sum.
    Diag(TraceArgs),
    /// Zeta residue.
    Residue(TraceArgs),
    /// Energy-shell averages.
    Shell(TraceArgs),
    /// Ordered-eigenbasis averages.
    Ordered(TraceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Singular,
    Eigen,
}

#[derive(Debug, Args)]
struct DixmierArgs {
    /// Operator S; without it the pure weight Q_λ^{-s} is used.
    /// Without --shells an operator supported on K levels gets enough shells
    /// to retain as many values as the budget gives the pure weight.
    #[arg(long)]
    op: Option<PathBuf>,
    #[arg(long, default_value = "left")]
    form: Form,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda: f64,
    /// Second shift for the split form; defaults to --lambda.
    #[arg(long, allow_negative_numbers = true)]
    lambda2: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long)]
    shells: Option<usize>,
    #[arg(long, value_enum, default_value_t = KindArg::Singular)]
    kind: KindArg,
}

#[derive(Debug, Subcommand)]
enum DixmierCmd {
    /// Leading values of the merged spectrum.
    Spectrum {
        #[command(flatten)]
        args: DixmierArgs,
        #[arg(long, default_value_t = 64)]
        limit: usize,
    },
    /// γ_N at the default checkpoints and the Calderón norm.
    Gamma {
        #[command(flatten)]
        args: DixmierArgs,
    },
    /// Extrapolated Dixmier trace.
    Estimate {
        #[command(flatten)]
        args: DixmierArgs,
    },
    /// Residue of x·ζ_T(x) at zero.
    Tauberian {
        #[command(flatten)]
        args: DixmierArgs,
        #[arg(long, value_delimiter = ',')]
        xgrid: Option<Vec<f64>>,
    },
}

#[derive(Debug, Subcommand)]
enum DosCmd {
    /// Integrated density of states N_H(ε).
    Idos {
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long = "J", default_value_t = 64)]
        levels: usize,
    },
    /// Atoms of the DOS measure.
    Measure {
        #[arg(long = "J", default_value_t = 64)]
        levels: usize,
    },
    /// Both sides of the spectral formula for a test function.
    Spectral {
        #[arg(long)]
        f: PathBuf,
        #[arg(long = "J", default_value_t = 64)]
        levels: usize,
    },
    /// Shell-average approximation of the IDOS.
    Approx {
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long = "Ngrid", value_delimiter = ',')]
        n_grid: Option<Vec<usize>>,
        #[arg(long = "J", default_value_t = 64)]
        levels: usize,
    },
    /// Dixmier trace of Q_λ^{-1} f(H) against the DOS integral.
    Dixmier {
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value = "left")]
        form: Form,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, allow_negative_numbers = true)]
        lambda2: Option<f64>,
        #[arg(long = "J", default_value_t = 64)]
        levels: usize,
        #[arg(long)]
        shells: Option<usize>,
    },
}

/// What a handler hands back to the dispatcher.
#[derive(Default)]
struct Outcome {
    results: Value,
    /// Replaces the flattened CSV when set.
    csv: Option<String>,
    /// Raw text written as-is regardless of `--format`.
    raw: Option<String>,
    config: BTreeMap<String, Value>,
    gaps: Vec<EngineGap>,
    warnings: Vec<String>,
    non_convergent: bool,
}

impl Outcome {
    fn table(table: ConvergenceTable) -> Self {
        let unsettled = table.extrapolated.is_none() && table.rows.len() >= 3;
        let warnings = table.warnings.clone();
        Self {
            csv: Some(table.to_csv()),
            results: json!({ "table": table }),
            warnings,
            non_convergent: unsettled,
            ..Self::default()
        }
    }

    fn with_config(mut self, key: &str, v: Value) -> Self {
        self.config.insert(key.into(), v);
        self
    }
}

/// Same `[re, im]` layout that tables use.
fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Runs the CLI on `args`, writing to standard output and error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let command: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let started = Instant::now();
    let outcome = MagneticConfig::new(cli.ell).and_then(|cfg| dispatch(&cli, &cfg));
    match outcome.and_then(|o| emit(&cli, command, o, started, out)) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "magtrace: {e}");
            match e {
                Error::Computation { .. } => EXIT_NON_CONVERGENCE,
                _ => EXIT_DOMAIN,
            }
        }
    }
}

fn emit(cli: &Cli, command: Vec<String>, o: Outcome, started: Instant, out: &mut dyn Write) -> Result<i32> {
    let code = if o.non_convergent { EXIT_NON_CONVERGENCE } else { EXIT_OK };
    let text = if let Some(raw) = o.raw {
        raw
    } else {
        match cli.format {
            OutputFormat::Csv => o.csv.unwrap_or_else(|| flat_csv(&o.results)),
            OutputFormat::Json => {
                let mut report = RunReport::new(command);
                report.config.insert("ell".into(), json!(cli.ell));
                report.config.insert(
                    "budget_profile".into(),
                    json!(match cli.budget_profile {
                        BudgetProfile::Quick => "quick",
                        BudgetProfile::Full => "full",
                    }),
                );
                if let Some(seed) = cli.seed {
                    report.config.insert("seed".into(), json!(seed));
                }
                report.config.extend(o.config);
                report.results = o.results;
                report.gaps = o.gaps;
                report.warnings = o.warnings;
                report.non_convergent = o.non_convergent;
                report.wall_time_s = started.elapsed().as_secs_f64();
                report.to_canonical_json()?
            }
        }
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(code)
}

fn dispatch(cli: &Cli, cfg: &MagneticConfig) -> Result<Outcome> {
    let budget = Budget::for_profile(cli.budget_profile);
    match &cli.command {
        Command::Basis(c) => basis(c, cfg),
        Command::Op(c) => op(c),
        Command::Kernel(c) => kernel(c, cfg),
        Command::Trace(c) => trace(c, &budget),
        Command::Dixmier(c) => dixmier(c, &budget),
        Command::Dos(c) => dos(c, cfg, &budget),
        Command::Compare { op, lambda } => {
            let s = read_operator(op)?;
            let cmp = compare(&s, *lambda, &budget)?;
            let ok = cmp.within_tolerance();
            let mut csv = String::from("engine,value,gap,tolerance\n");
            for g in &cmp.gaps {
                let cell = |v: Option<f64>| v.map(format_float).unwrap_or_default();
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    g.engine,
                    cell(g.value),
                    cell(g.gap),
                    format_float(g.tolerance)
                ));
            }
            Ok(Outcome {
                results: json!({
                    "reference": complex(cmp.reference),
                    "max_gap": cmp.max_gap(),
                    "tables": cmp.tables,
                }),
                csv: Some(csv),
                gaps: cmp.gaps,
                warnings: cmp.warnings,
                non_convergent: !ok,
                ..Outcome::default()
            }
            .with_config("lambda", json!(lambda))
            .with_config("dixmier_shells", json!(budget.dixmier_shells))
            .with_config("x_grid", json!(budget.x_grid))
            .with_config("n_grid", json!(budget.n_grid))
            .with_config("ordered_shells", json!(budget.ordered_shells)))
        }
    }
}

fn basis(c: &BasisCmd, cfg: &MagneticConfig) -> Result<Outcome> {
    match c {
        BasisCmd::Eval { n, m, x1, x2 } => {
            let v = psi(BasisIndex::new(*n, *m), Point2D::new(*x1, *x2), cfg);
            Ok(Outcome {
                results: json!({ "n": n, "m": m, "x1": x1, "x2": x2, "value": complex(v) }),
                ..Outcome::default()
            })
        }
        BasisCmd::Gram { max_index, nodes } => {
            let mut quad = QuadratureSpec::default_for(cfg);
            if let Some(nodes) = nodes {
                quad.nodes = *nodes;
            }
            let report = orthonormality_check(*max_index, cfg, &quad)?;
            let mut csv = String::from("n1,m1,n2,m2,error\n");
            for (a, row) in report.indices.iter().zip(&report.errors) {
                for (b, e) in report.indices.iter().zip(row) {
                    csv.push_str(&format!("{},{},{},{},{}\n", a.n, a.m, b.n, b.m, format_float(*e)));
                }
            }
            Ok(Outcome {
                results: json!({ "gram": report }),
                csv: Some(csv),
                ..Outcome::default()
            }
            .with_config("quadrature", json!(quad)))
        }
        BasisCmd::Grid {
            n,
            m,
            half_width,
            nodes,
        } => {
            let grid = UniformGrid::new(*half_width, *nodes)?;
            let idx = BasisIndex::new(*n, *m);
            let f = GridFunction::sample(grid, |p| psi(idx, p, cfg));
            Ok(Outcome {
                raw: Some(f.to_csv()),
                ..Outcome::default()
            })
        }
    }
}

fn op(c: &OpCmd) -> Result<Outcome> {
    match c {
        OpCmd::Compose { input, input2 } => {
            let a = read_operator(input)?;
            let b = read_operator(input2)?;
            Ok(Outcome {
                raw: Some(a.compose(&b).to_json() + "\n"),
                ..Outcome::default()
            })
        }
        OpCmd::Adjoint { input } => Ok(Outcome {
            raw: Some(read_operator(input)?.adjoint().to_json() + "\n"),
            ..Outcome::default()
        }),
        OpCmd::Norm { input, p } => {
            let a = read_operator(input)?;
            Ok(Outcome {
                results: json!({ "p": if p.is_finite() { json!(p) } else { json!("inf") }, "norm": a.lp_norm(*p)? }),
                ..Outcome::default()
            })
        }
        OpCmd::Block { input, m, order } => {
            let a = read_operator(input)?;
            let block = matrix_block(&a, *m, *order)?;
            let mut csv = String::from("row,col,re,im\n");
            let mut rows = Vec::with_capacity(*order);
            for r in 0..*order {
                let mut row = Vec::with_capacity(*order);
                for c in 0..*order {
                    let v = block.entry(r, c);
                    csv.push_str(&format!("{r},{c},{},{}\n", format_float(v.re), format_float(v.im)));
                    row.push(complex(v));
                }
                rows.push(Value::Array(row));
            }
            Ok(Outcome {
                results: json!({ "m": m, "order": order, "entries": rows, "trace": complex(block.trace()) }),
                csv: Some(csv),
                ..Outcome::default()
            })
        }
    }
}

fn kernel(c: &KernelCmd, cfg: &MagneticConfig) -> Result<Outcome> {
    match c {
        KernelCmd::Eval { op, x1, x2 } => {
            let s = read_operator(op)?;
            let v = kernel_of(&s, cfg).eval(Point2D::new(*x1, *x2));
            Ok(Outcome {
                results: json!({ "x1": x1, "x2": x2, "value": complex(v) }),
                ..Outcome::default()
            })
        }
        KernelCmd::Folner { op, half_width } => {
            let s = read_operator(op)?;
            let v = folner_trace(&s, *half_width, cfg)?;
            Ok(Outcome {
                results: json!({ "R": half_width, "trace": complex(v), "diagonal": complex(tau_diagonal(&s)) }),
                ..Outcome::default()
            })
        }
        KernelCmd::Commutant {
            op,
            a1,
            a2,
            half_width,
            nodes,
        } => {
            let s = read_operator(op)?;
            let grid = UniformGrid::new(*half_width, *nodes)?;
            let phi = GridFunction::sample(grid, |p| psi(BasisIndex::new(0, 0), p, cfg));
            let r = commutant_residual(&s, Point2D::new(*a1, *a2), &phi, cfg)?;
            Ok(Outcome {
                results: json!({ "a1": a1, "a2": a2, "residual": r }),
                ..Outcome::default()
            }
            .with_config("grid", json!({ "R": half_width, "nodes": nodes })))
        }
        KernelCmd::Apply { op, grid } => {
            let s = read_operator(op)?;
            let phi = GridFunction::read_csv(grid)?;
            let result = apply_kernel(&s, &phi, cfg)?;
            Ok(Outcome {
                raw: Some(result.function.to_csv()),
                warnings: result.warnings,
                ..Outcome::default()
            })
        }
    }
}

fn trace(c: &TraceCmd, budget: &Budget) -> Result<Outcome> {
    let (TraceCmd::Diag(a) | TraceCmd::Residue(a) | TraceCmd::Shell(a) | TraceCmd::Ordered(a)) = c;
    let s = read_operator(&a.op)?;
    let x_grid = a.xgrid.clone().unwrap_or_else(|| budget.x_grid.clone());
    let n_grid = a.n_grid.clone().unwrap_or_else(|| budget.n_grid.clone());
    Ok(match c {
        TraceCmd::Diag(_) => {
            let v = tau_diagonal(&s);
            Outcome {
                results: json!({ "value": complex(v) }),
                csv: Some(format!("value,value_im\n{},{}\n", format_float(v.re), format_float(v.im))),
                ..Outcome::default()
            }
        }
        TraceCmd::Residue(_) => Outcome::table(tau_residue(&s, a.lambda, &x_grid)?)
            .with_config("lambda", json!(a.lambda))
            .with_config("x_grid", json!(x_grid)),
        TraceCmd::Shell(_) => Outcome::table(tau_shell(&s, &n_grid)?).with_config("n_grid", json!(n_grid)),
        TraceCmd::Ordered(_) => Outcome::table(tau_ordered_basis(&s, &n_grid)?).with_config("n_grid", json!(n_grid)),
    })
}

fn dixmier(c: &DixmierCmd, budget: &Budget) -> Result<Outcome> {
    let a = match c {
        DixmierCmd::Spectrum { args, .. }
        | DixmierCmd::Gamma { args }
        | DixmierCmd::Estimate { args }
        | DixmierCmd::Tauberian { args, .. } => args,
    };
    let lambda2 = a.lambda2.unwrap_or(a.lambda);
    let kind = match (c, a.kind) {
        (DixmierCmd::Gamma { .. } | DixmierCmd::Tauberian { .. }, _) | (_, KindArg::Singular) => SpectrumKind::Singular,
        (_, KindArg::Eigen) => SpectrumKind::Eigen,
    };
    let weight;
    let product;
    let (source, trunc) = match &a.op {
        Some(path) => {
            let s: CoefficientOperator = read_operator(path)?;
            product = weighted_product(&s, a.form, a.lambda, lambda2, a.s)?;
            let trunc = match a.shells {
                Some(e) => Truncation::shells(e),
                None => Truncation::matched_to_weight(budget.dixmier_shells, s.support_dim()),
            };
            (SpectrumSource::from(&product), trunc)
        }
        None => {
            weight = DiagonalWeight::q_power(a.s, a.lambda)?;
            let trunc = Truncation::shells(a.shells.unwrap_or(budget.dixmier_shells));
            (SpectrumSource::from(&weight), trunc)
        }
    };
    let shells = trunc.shells;
    let spectrum = collect_spectrum(source, trunc, kind)?;
    let seq = spectrum.as_sequence();
    let mut outcome = match c {
        DixmierCmd::Spectrum { limit, .. } => {
            let shown = (*limit).min(seq.len());
            let mut csv = String::from("index,re,im\n");
            let mut values = Vec::with_capacity(shown);
            for i in 0..shown {
                let v = match &spectrum {
                    Spectrum::Singular(s) => Complex64::new(s.value(i), 0.0),
                    Spectrum::Eigen(e) => e.value(i),
                };
                csv.push_str(&format!("{i},{},{}\n", format_float(v.re), format_float(v.im)));
                values.push(complex(v));
            }
            Outcome {
                results: json!({
                    "values": values,
                    "len": seq.len(),
                    "certified_len": seq.certified_len(),
                    "operator": seq.describe(),
                }),
                csv: Some(csv),
                ..Outcome::default()
            }
        }
        DixmierCmd::Gamma { .. } => {
            let Spectrum::Singular(s) = &spectrum else {
                unreachable!("gamma uses singular values")
            };
            let cps = default_checkpoints(s, 8)?;
            let mut csv = String::from("N,gamma\n");
            let mut rows = Vec::new();
            for &n in &cps {
                let g = gamma(s, n)?;
                csv.push_str(&format!("{n},{}\n", format_float(g)));
                rows.push(json!({ "N": n, "gamma": g }));
            }
            Outcome {
                results: json!({ "gamma": rows, "calderon_norm": calderon_norm(s)? }),
                csv: Some(csv),
                ..Outcome::default()
            }
        }
        DixmierCmd::Estimate { .. } => {
            let cps = default_checkpoints(seq, 8)?;
            let mut o = Outcome::table(dixmier_estimate(seq, &cps)?);
            let residual = o.results["table"]["residual"].as_f64();
            if residual.is_none_or(|r| r > DIXMIER_RESIDUAL_FLAG) {
                o.non_convergent = true;
            }
            o
        }
        DixmierCmd::Tauberian { xgrid, .. } => {
            let Spectrum::Singular(s) = &spectrum else {
                unreachable!("tauberian uses singular values")
            };
            let x_grid = xgrid.clone().unwrap_or_else(|| budget.x_grid.clone());
            Outcome::table(tauberian_residue(s, &x_grid)?).with_config("x_grid", json!(x_grid))
        }
    };
    outcome.warnings.extend(match &spectrum {
        Spectrum::Singular(s) => s.warnings.clone(),
        Spectrum::Eigen(e) => e.warnings.clone(),
    });
    Ok(outcome
        .with_config("shells", json!(shells))
        .with_config("form", json!(a.form))
        .with_config("lambda", json!(a.lambda))
        .with_config("lambda2", json!(lambda2))
        .with_config("s", json!(a.s)))
}

fn dos(c: &DosCmd, cfg: &MagneticConfig, budget: &Budget) -> Result<Outcome> {
    match c {
        DosCmd::Idos { eps, levels } => {
            let h = landau_hamiltonian(*levels)?;
            Ok(Outcome {
                results: json!({ "eps": eps, "idos": idos(&h, *eps, cfg)? }),
                ..Outcome::default()
            }
            .with_config("J", json!(levels)))
        }
        DosCmd::Measure { levels } => {
            let h = landau_hamiltonian(*levels)?;
            let m = dos_measure(&h, cfg);
            let mut csv = String::from("energy,weight\n");
            for (e, w) in &m.atoms {
                csv.push_str(&format!("{},{}\n", format_float(*e), format_float(*w)));
            }
            Ok(Outcome {
                results: json!({ "measure": m }),
                csv: Some(csv),
                ..Outcome::default()
            }
            .with_config("J", json!(levels)))
        }
        DosCmd::Spectral { f, levels } => {
            let h = landau_hamiltonian(*levels)?;
            let f = CompactTestFunction::read(f)?;
            let check = spectral_formula_check(&h, &f, cfg)?;
            Ok(Outcome {
                results: json!({ "check": check }),
                ..Outcome::default()
            }
            .with_config("J", json!(levels)))
        }
        DosCmd::Approx { eps, n_grid, levels } => {
            let h = landau_hamiltonian(*levels)?;
            let n_grid = n_grid.clone().unwrap_or_else(|| budget.n_grid.clone());
            let table = idos_shell_approx(&h, *eps, &n_grid, cfg)?;
            let exact = idos(&h, *eps, cfg)?;
            let mut o = Outcome::table(table);
            o.results["idos"] = json!(exact);
            Ok(o.with_config("J", json!(levels)).with_config("n_grid", json!(n_grid)))
        }
        DosCmd::Dixmier {
            f,
            form,
            lambda,
            lambda2,
            levels,
            shells,
        } => {
            let h = landau_hamiltonian(*levels)?;
            let f = CompactTestFunction::read(f)?;
            let support = functional_calculus(&h, &f)?.support_dim();
            let shells =
                shells.unwrap_or_else(|| Truncation::matched_to_weight(budget.dixmier_shells, support).shells);
            let lambda2 = lambda2.unwrap_or(*lambda);
            let check = dixmier_dos_check(&h, &f, *form, *lambda, lambda2, shells, cfg)?;
            let warnings = check.table.warnings.clone();
            let unsettled = !check.table.rows.is_empty()
                && check.table.residual.is_none_or(|r| r > DIXMIER_RESIDUAL_FLAG);
            Ok(Outcome {
                csv: Some(check.table.to_csv()),
                results: json!({ "check": check }),
                warnings,
                non_convergent: unsettled,
                ..Outcome::default()
            }
            .with_config("J", json!(levels))
            .with_config("shells", json!(shells))
            .with_config("form", json!(form))
            .with_config("lambda", json!(lambda))
            .with_config("lambda2", json!(lambda2)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("magtrace").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_and_help_codes() {
        assert_eq!(run_capture(&["--bogus"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["trace"]).0, EXIT_USAGE);
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("compare"));
    }

    #[test]
    fn domain_errors_exit_two() {
        let (code, _, err) = run_capture(&["--ell", "-1", "dos", "idos", "--eps", "1"]);
        assert_eq!(code, EXIT_DOMAIN);
        assert!(err.contains("magnetic length"));
        let (code, _, err) = run_capture(&["dos", "idos", "--eps", "100", "--J", "3"]);
        assert_eq!(code, EXIT_DOMAIN);
        assert!(err.contains("range error"));
    }

    #[test]
    fn idos_report() {
        let (code, out, _) = run_capture(&["dos", "idos", "--eps", "2.0"]);
        assert_eq!(code, EXIT_OK);
        let r = RunReport::from_json(&out).unwrap();
        assert!((r.results["idos"].as_f64().unwrap() - std::f64::consts::FRAC_1_PI).abs() < 1e-15);
        assert_eq!(r.format_version, FORMAT_VERSION);
    }

    #[test]
    fn weight_only_dixmier() {
        let (code, out, _) = run_capture(&["dixmier", "estimate", "--s", "2", "--shells", "300"]);
        assert_eq!(code, EXIT_OK);
        let r = RunReport::from_json(&out).unwrap();
        let v = r.results["table"]["extrapolated"][0].as_f64().unwrap();
        assert!((v - 0.5).abs() < 1e-2, "{v}");
    }
}
