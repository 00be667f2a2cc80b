//! Command-line front end for `kanto-core`.
//!
//! Every command writes CSV (header row, LF endings, 17 significant
//! digits) to `--out` or standard output. Exit codes: 0 on success, 2 for
//! configuration errors, 3 for data errors such as a missing lattice value.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use kanto_core::analysis::{audit, convergence_study, AuditConfig, Operator};
use kanto_core::io::{csv_string, fmt_f64, read_grid_csv, read_pgm};
use kanto_core::kernel1d::CombinationKernel;
use kanto_core::kernel2d::{partition_of_unity_check, DEFAULT_MOMENT_GRID};
use kanto_core::operators::{apply_gbs, apply_gw, apply_sw};
use kanto_core::quadrature::DEFAULT_QUAD_ORDER;
use kanto_core::{
    fn_lookup, EvalGrid, FieldKind, GridField, Kernel1D, MomentTable, Rect, SourceField,
    TensorKernel2D, TestFunction,
};

/// Largest partition-of-unity deviation accepted at startup.
pub const POU_TOLERANCE: f64 = 1e-8;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "KANTO_THREADS";

#[derive(thiserror::Error, Debug)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] kanto_core::Error),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use kanto_core::Error as E;
        match self {
            CliError::Core(E::MissingData { .. } | E::Parse(_)) => 3,
            _ => 2,
        }
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

#[derive(Parser, Debug)]
#[command(name = "kanto", version, about = "Bivariate sampling and Kantorovich series experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Apply an operator on an evaluation grid.
    Reconstruct(Opts),
    /// Tabulate kernel moments.
    Moments(Opts),
    /// Bound constants and the measured errors they control.
    Bounds(Opts),
    /// Sup error over a list of rates with a log-log slope.
    Converge(Opts),
    /// Kernel coefficients, support and validity checks.
    KernelInfo(Opts),
    /// GBS operator error and its two bounds.
    Gbs(Opts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelFamily {
    Bspline,
    Combo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OpArg {
    Gw,
    Sw,
    Gbs,
}

impl From<OpArg> for Operator {
    fn from(op: OpArg) -> Self {
        match op {
            OpArg::Gw => Operator::Gw,
            OpArg::Sw => Operator::Sw,
            OpArg::Gbs => Operator::Gbs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Samples,
    CellAverages,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Kernel family; applied to both axes.
    #[arg(long, value_enum, default_value = "combo")]
    pub kernel: KernelFamily,
    /// B-spline order, or the base order of the combination kernel.
    #[arg(long, default_value_t = 3)]
    pub r: usize,
    /// Combination shifts (default 2,3,4 for r = 3, else 2..r+1).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub shifts: Option<Vec<f64>>,
    /// Explicit combination coefficients instead of solving the moment system.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "sw")]
    pub op: OpArg,
    /// Catalog function name.
    #[arg(long = "fn", conflicts_with = "input")]
    pub function: Option<String>,
    /// Lattice data: `.csv` with a JSON sidecar, or a binary `.pgm`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Data kind for PGM input.
    #[arg(long, value_enum, default_value = "samples")]
    pub kind: KindArg,
    /// Sampling rate (default 10; PGM input defaults to 1, CSV input to its sidecar).
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,40")]
    pub w_list: Vec<f64>,
    /// Evaluation box `x0,y0,x1,y1`.
    #[arg(long = "box", value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    pub rect: Option<Vec<f64>>,
    #[arg(long, default_value_t = 20)]
    pub grid_n: usize,
    #[arg(long, default_value_t = DEFAULT_QUAD_ORDER)]
    pub quad_order: usize,
    /// Highest total moment order tabulated.
    #[arg(long, default_value_t = 4)]
    pub eta_max: u32,
    /// Base-point grid size for moment sups.
    #[arg(long, default_value_t = DEFAULT_MOMENT_GRID)]
    pub moment_grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const DEFAULT_W: f64 = 10.0;

impl Opts {
    pub fn kernel_1d(&self) -> Result<Kernel1D, CliError> {
        match self.kernel {
            KernelFamily::Bspline => {
                if self.shifts.is_some() || self.coeffs.is_some() {
                    return Err(config("--shifts and --coeffs apply to the combo kernel only"));
                }
                Ok(Kernel1D::bspline(self.r)?)
            }
            KernelFamily::Combo => {
                let shifts = self
                    .shifts
                    .clone()
                    .unwrap_or_else(|| (0..self.r).map(|i| (i + 2) as f64).collect());
                match &self.coeffs {
                    Some(c) => Ok(Kernel1D::Combination(CombinationKernel::from_parts(
                        self.r, &shifts, c,
                    )?)),
                    None => Ok(Kernel1D::combination(self.r, &shifts)?),
                }
            }
        }
    }

    /// Builds the tensor kernel and rejects it if it fails the partition of
    /// unity.
    pub fn kernel(&self) -> Result<TensorKernel2D, CliError> {
        let kernel = TensorKernel2D::symmetric(self.kernel_1d()?);
        let dev = partition_of_unity_check(&kernel, DEFAULT_MOMENT_GRID)?;
        if !(dev <= POU_TOLERANCE) {
            return Err(config(format!(
                "kernel {} violates the partition of unity (deviation {dev:e})",
                kernel.describe()
            )));
        }
        Ok(kernel)
    }

    fn rect(&self) -> Result<Option<Rect>, CliError> {
        match &self.rect {
            None => Ok(None),
            Some(v) if v.len() == 4 => Ok(Some(Rect::new(v[0], v[1], v[2], v[3])?)),
            Some(v) => Err(config(format!("--box needs 4 values, got {}", v.len()))),
        }
    }

    fn test_function(&self) -> Result<&'static TestFunction, CliError> {
        match &self.function {
            Some(name) => Ok(fn_lookup(name)?),
            None => Err(config("this command needs --fn")),
        }
    }

    fn rate(&self) -> Result<f64, CliError> {
        let w = self.w.unwrap_or(DEFAULT_W);
        if w.is_finite() && w > 0.0 {
            Ok(w)
        } else {
            Err(config(format!("--w must be positive, got {w}")))
        }
    }

    fn grid_size(&self) -> Result<usize, CliError> {
        if self.grid_n < 1 {
            return Err(config("--grid-n must be at least 1"));
        }
        Ok(self.grid_n)
    }
}

/// Parses arguments and runs one command, returning the CSV text.
pub fn execute(cli: &Cli) -> Result<(String, Option<PathBuf>), CliError> {
    let (opts, text) = match &cli.command {
        Command::Reconstruct(o) => (o, cmd_reconstruct(o)?),
        Command::Moments(o) => (o, cmd_moments(o)?),
        Command::Bounds(o) => (o, cmd_bounds(o)?),
        Command::Converge(o) => (o, cmd_converge(o)?),
        Command::KernelInfo(o) => (o, cmd_kernel_info(o)?),
        Command::Gbs(o) => (o, cmd_gbs(o)?),
    };
    Ok((text, opts.out.clone()))
}

/// Writes `text` to `out`, or standard output when `None`.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Sizes the global rayon pool from `KANTO_THREADS`, if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| config(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| config(format!("cannot size thread pool: {e}")))
}

fn load_input(opts: &Opts, path: &Path) -> Result<GridField, CliError> {
    let is_pgm = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let field = if is_pgm {
        let kind = match opts.kind {
            KindArg::Samples => FieldKind::Samples,
            KindArg::CellAverages => FieldKind::CellAverages,
        };
        read_pgm(path, 1.0, kind)?
    } else {
        read_grid_csv(path)?
    };
    match opts.w {
        Some(_) => Ok(field.with_rate(opts.rate()?)?),
        None => Ok(field),
    }
}

fn cmd_reconstruct(opts: &Opts) -> Result<String, CliError> {
    let kernel = opts.kernel()?;
    let n = opts.grid_size()?;
    match (&opts.function, &opts.input) {
        (Some(_), None) => {
            let f = opts.test_function()?;
            let rect = opts.rect()?.unwrap_or_else(|| f.default_box());
            let grid = EvalGrid::on_rect(&rect, n, opts.rate()?)?;
            let approx = match opts.op {
                OpArg::Gw => apply_gw(SourceField::Analytic(f), &kernel, &grid)?,
                OpArg::Sw => apply_sw(SourceField::Analytic(f), &kernel, &grid, opts.quad_order)?,
                OpArg::Gbs => apply_gbs(f, &kernel, &grid, opts.quad_order)?,
            };
            let rows: Vec<Vec<String>> = grid
                .points
                .iter()
                .zip(&approx)
                .map(|(&(x, y), &a)| {
                    let e = f.eval(x, y);
                    vec![fmt_f64(x), fmt_f64(y), fmt_f64(a), fmt_f64(e), fmt_f64((a - e).abs())]
                })
                .collect();
            Ok(csv_string(&["x", "y", "approx", "exact", "abs_err"], &rows)?)
        }
        (None, Some(path)) => {
            let field = load_input(opts, path)?;
            let rect = match opts.rect()? {
                Some(r) => r,
                None => field
                    .admissible_rect(&kernel)
                    .ok_or_else(|| config("input grid is too small for the kernel support"))?,
            };
            let grid = EvalGrid::on_rect(&rect, n, field.w())?;
            let approx = match opts.op {
                OpArg::Gw => apply_gw(SourceField::Grid(&field), &kernel, &grid)?,
                OpArg::Sw => apply_sw(SourceField::Grid(&field), &kernel, &grid, opts.quad_order)?,
                OpArg::Gbs => {
                    return Err(config("the GBS operator needs an analytic source (--fn)"));
                }
            };
            let rows: Vec<Vec<String>> = grid
                .points
                .iter()
                .zip(&approx)
                .map(|(&(x, y), &a)| vec![fmt_f64(x), fmt_f64(y), fmt_f64(a)])
                .collect();
            Ok(csv_string(&["x", "y", "approx"], &rows)?)
        }
        _ => Err(config("reconstruct needs exactly one of --fn or --input")),
    }
}

fn cmd_moments(opts: &Opts) -> Result<String, CliError> {
    let kernel = opts.kernel()?;
    let table = MomentTable::compute(&kernel, opts.eta_max, opts.moment_grid)?;
    let mut entries: Vec<_> = table.entries().collect();
    entries.sort_by_key(|(&(p1, p2), _)| (p1 + p2, std::cmp::Reverse(p1)));
    let rows: Vec<Vec<String>> = entries
        .into_iter()
        .map(|(&(p1, p2), e)| {
            vec![
                p1.to_string(),
                p2.to_string(),
                fmt_f64(e.algebraic_mean),
                fmt_f64(e.algebraic_spread),
                fmt_f64(e.absolute_sup),
            ]
        })
        .collect();
    Ok(csv_string(
        &["p1", "p2", "algebraic_mean", "spread", "absolute_sup"],
        &rows,
    )?)
}

fn audit_config(opts: &Opts, f: &TestFunction) -> Result<AuditConfig, CliError> {
    Ok(AuditConfig {
        w: opts.rate()?,
        rect: opts.rect()?.unwrap_or_else(|| f.default_box()),
        grid_n: opts.grid_size()?,
        quad_order: opts.quad_order,
        moment_grid: opts.moment_grid,
    })
}

fn cmd_bounds(opts: &Opts) -> Result<String, CliError> {
    let kernel = opts.kernel()?;
    let f = opts.test_function()?;
    Ok(audit(f, &kernel, &audit_config(opts, f)?)?.to_csv()?)
}

fn cmd_gbs(opts: &Opts) -> Result<String, CliError> {
    let kernel = opts.kernel()?;
    let f = opts.test_function()?;
    let report = audit(f, &kernel, &audit_config(opts, f)?)?;
    let keys = [
        "w",
        "measured_gbs_error",
        "omega_b",
        "gbs_modulus_bound",
        "db_sup",
        "omega_db",
        "D",
        "gbs_differential_bound",
        "kf_H",
        "kf_J",
        "kf_L",
    ];
    let rows: Vec<Vec<String>> = keys
        .iter()
        .filter_map(|k| report.get(k).map(|v| vec![k.to_string(), fmt_f64(v)]))
        .collect();
    Ok(csv_string(&["name", "value"], &rows)?)
}

fn cmd_converge(opts: &Opts) -> Result<String, CliError> {
    let kernel = opts.kernel()?;
    let f = opts.test_function()?;
    let rect = opts.rect()?.unwrap_or_else(|| f.default_box());
    let table = convergence_study(
        f,
        &kernel,
        opts.op.into(),
        &opts.w_list,
        &rect,
        opts.grid_size()?,
        opts.quad_order,
    )
    .map_err(|e| match e {
        kanto_core::Error::InvalidParameter(m) => config(format!("--w-list: {m}")),
        other => other.into(),
    })?;
    Ok(table.to_csv()?)
}

fn cmd_kernel_info(opts: &Opts) -> Result<String, CliError> {
    let k1 = opts.kernel_1d()?;
    let kernel = TensorKernel2D::symmetric(k1.clone());
    let dev = partition_of_unity_check(&kernel, DEFAULT_MOMENT_GRID)?;
    let mut rows: Vec<Vec<String>> = vec![vec!["kernel".into(), kernel.describe()]];
    let (lo, hi) = k1.support();
    rows.push(vec!["support_lo".into(), fmt_f64(lo)]);
    rows.push(vec!["support_hi".into(), fmt_f64(hi)]);
    if let Kernel1D::Combination(c) = &k1 {
        for (i, (s, a)) in c.shifts().iter().zip(c.coefficients()).enumerate() {
            rows.push(vec![format!("shift_{i}"), fmt_f64(*s)]);
            rows.push(vec![format!("coeff_{i}"), fmt_f64(*a)]);
        }
    }
    rows.push(vec!["pou_deviation".into(), fmt_f64(dev)]);
    if !(dev <= POU_TOLERANCE) {
        return Err(config(format!(
            "kernel {} violates the partition of unity (deviation {dev:e})",
            kernel.describe()
        )));
    }
    let table = MomentTable::compute(&kernel, opts.eta_max, opts.moment_grid)?;
    let r = table.moment_order();
    rows.push(vec!["moment_order".into(), r.to_string()]);
    if let Ok(c) = table.moment_constant(r) {
        rows.push(vec!["moment_constant".into(), fmt_f64(c)]);
    }
    rows.push(vec!["M00".into(), fmt_f64(table.absolute(0, 0)?)]);
    Ok(csv_string(&["name", "value"], &rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(args: &[&str]) -> Opts {
        let mut full = vec!["kanto", "moments"];
        full.extend_from_slice(args);
        match Cli::try_parse_from(full).unwrap().command {
            Command::Moments(o) => o,
            _ => unreachable!(),
        }
    }

    #[test]
    fn default_kernel_is_order3_combination() {
        let k = opts(&[]).kernel().unwrap();
        assert_eq!(k, TensorKernel2D::default_order3());
    }

    #[test]
    fn default_shifts_follow_order() {
        match opts(&["--r", "4"]).kernel_1d().unwrap() {
            Kernel1D::Combination(c) => assert_eq!(c.shifts(), &[2.0, 3.0, 4.0, 5.0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn box_and_negative_shifts_parse() {
        let o = opts(&["--box", "-1,-2,3,4", "--shifts", "-1,0,1"]);
        assert_eq!(o.rect().unwrap(), Some(Rect::new(-1.0, -2.0, 3.0, 4.0).unwrap()));
        assert!(o.kernel().is_ok());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(kanto_core::Error::MissingData { k: 1, j: 2 }).exit_code(), 3);
        assert_eq!(CliError::from(kanto_core::Error::Parse("x".into())).exit_code(), 3);
        assert_eq!(CliError::from(kanto_core::Error::InvalidOrder(0)).exit_code(), 2);
        assert_eq!(config("bad").exit_code(), 2);
    }

    #[test]
    fn bspline_rejects_combination_flags() {
        assert!(opts(&["--kernel", "bspline", "--shifts", "1,2,3"]).kernel_1d().is_err());
    }
}
