//! Sweep engine behind the command-line tool: validated sweep
//! specifications, tabulated curves with a full metadata echo, and the
//! grid evaluator with serial and data-parallel execution paths.
//!
//! Grid points are pure, independent evaluations, so parallel and serial
//! runs produce identical values; output ordering is fixed by index, never
//! by completion order. CSV output uses scientific notation with 12
//! significant digits and LF line endings so that golden files compare
//! bit-for-bit.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::decoherence::{self, BranchEvolution, DecoherenceParams};
use crate::fock::{FockSpace, StateVector};
use crate::model::{self, CompositeSpace, SystemParams};
use crate::numerics::{self, Propagator};
use crate::rabi;
use crate::{Error, Result, C64};

/// Convergence tolerance used by the `convergence` command.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-8;

/// Number of revival times listed by the `revival` summary.
pub const REVIVAL_COUNT: usize = 5;

/// Sweep command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Transfer,
    Revival,
    Decoherence,
    RwaCheck,
    Convergence,
    Audit,
}

impl Command {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "transfer" => Ok(Self::Transfer),
            "revival" => Ok(Self::Revival),
            "decoherence" => Ok(Self::Decoherence),
            "rwa-check" => Ok(Self::RwaCheck),
            "convergence" => Ok(Self::Convergence),
            "audit" => Ok(Self::Audit),
            other => Err(Error::InvalidParams(format!("unknown command `{other}`"))),
        }
    }
}

/// Decoherence-factor evaluation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Numeric,
    PrintedSeries,
    RederivedSeries,
    Chi0,
    ShortTime,
}

impl Method {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "numeric" => Ok(Self::Numeric),
            "printed-series" => Ok(Self::PrintedSeries),
            "rederived-series" => Ok(Self::RederivedSeries),
            "chi0" => Ok(Self::Chi0),
            "short-time" => Ok(Self::ShortTime),
            other => Err(Error::InvalidParams(format!("unknown method `{other}`"))),
        }
    }

    pub fn column_name(&self) -> &'static str {
        match self {
            Self::Numeric => "numeric",
            Self::PrintedSeries => "printed_series",
            Self::RederivedSeries => "rederived_series",
            Self::Chi0 => "chi0",
            Self::ShortTime => "short_time",
        }
    }
}

/// Output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidParams(format!("unknown format `{other}`"))),
        }
    }
}

/// Execution mode for grid evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    /// Single-threaded, index order; the bitwise-reproducible mode.
    Serial,
    /// Data-parallel over grid points (rayon); falls back to serial when
    /// the `parallel` feature is disabled.
    Parallel,
}

/// Fully specified sweep: command, model parameters, initial qubit
/// amplitudes, time grid (in units of omega t), truncation dimension,
/// decoherence methods, dims for convergence scans, and output routing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub command: Command,
    pub params: SystemParams,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub beta_re: f64,
    pub beta_im: f64,
    /// Grid start, in units of omega t.
    pub t_min: f64,
    /// Grid end, in units of omega t.
    pub t_max: f64,
    pub t_steps: usize,
    pub dim: usize,
    pub methods: Vec<Method>,
    pub dims: Vec<usize>,
    pub output_path: Option<String>,
    pub format: Format,
    pub serial: bool,
}

impl SweepSpec {
    pub fn alpha(&self) -> C64 {
        C64::new(self.alpha_re, self.alpha_im)
    }

    pub fn beta(&self) -> C64 {
        C64::new(self.beta_re, self.beta_im)
    }

    pub fn exec_mode(&self) -> ExecMode {
        if self.serial {
            ExecMode::Serial
        } else {
            ExecMode::Parallel
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_steps < 2 {
            return Err(Error::InvalidParams(format!(
                "t_steps = {} must be >= 2",
                self.t_steps
            )));
        }
        if !self.t_min.is_finite() || !self.t_max.is_finite() || self.t_min >= self.t_max {
            return Err(Error::InvalidParams(format!(
                "t_min = {} must be < t_max = {}",
                self.t_min, self.t_max
            )));
        }
        if self.dim < 8 {
            return Err(Error::InvalidParams(format!(
                "dim = {} must be >= 8",
                self.dim
            )));
        }
        if self.command == Command::Decoherence && self.methods.is_empty() {
            return Err(Error::InvalidParams(
                "decoherence needs at least one method".into(),
            ));
        }
        if self.command == Command::Convergence {
            if self.dims.len() < 2 || self.dims.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParams(
                    "convergence needs at least two strictly increasing dims".into(),
                ));
            }
            if self.dims.iter().any(|&d| d < 8) {
                return Err(Error::InvalidParams("all dims must be >= 8".into()));
            }
        }
        let norm = self.alpha().norm_sqr() + self.beta().norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "|alpha|^2 + |beta|^2 = {norm}, expected 1"
            )));
        }
        // SystemParams invariants are re-checked so a hand-built spec
        // cannot smuggle invalid frequencies past the constructor.
        SystemParams::new(
            self.params.omega,
            self.params.omega_q,
            self.params.g,
            self.params.chi,
        )?;
        Ok(())
    }

    /// The time grid in units of omega t, t_steps points inclusive of both
    /// endpoints.
    pub fn time_grid(&self) -> Vec<f64> {
        let n = self.t_steps;
        (0..n)
            .map(|i| self.t_min + (self.t_max - self.t_min) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Tabulated curves plus the metadata echo.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub columns: Vec<(String, Vec<f64>)>,
    pub spec: SweepSpec,
    pub version: String,
    pub wall_time_s: f64,
    pub scalars: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl SweepResult {
    /// CSV rendering: header row of column names, one row per grid point,
    /// floats in scientific notation with 12 significant digits, LF line
    /// endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        let rows = self.columns.first().map_or(0, |(_, v)| v.len());
        for i in 0..rows {
            let row: Vec<String> = self
                .columns
                .iter()
                .map(|(_, v)| format_float(v[i]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON run summary: spec echo, per-method scalar results, warnings,
    /// wall time.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "spec": self.spec,
            "version": self.version,
            "results": self.scalars,
            "warnings": self.warnings,
            "wall_time_s": self.wall_time_s,
        })
    }
}

/// Scientific notation with 12 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.11e}")
}

/// Cap the data-parallel thread count for this process. Later calls are
/// ignored once a pool exists; a no-op without the `parallel` feature.
#[cfg(feature = "parallel")]
pub fn configure_threads(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
}

#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_n: usize) {}

/// Evaluate a pure function over grid points, either serially or
/// data-parallel. Results are ordered by index in both modes.
pub fn evaluate_grid<T, F>(points: &[f64], f: F, mode: ExecMode) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    match mode {
        ExecMode::Serial => points.iter().map(|&t| f(t)).collect(),
        ExecMode::Parallel => evaluate_parallel(points, f),
    }
}

#[cfg(feature = "parallel")]
fn evaluate_parallel<T, F>(points: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    use rayon::prelude::*;
    points.par_iter().map(|&t| f(t)).collect()
}

#[cfg(not(feature = "parallel"))]
fn evaluate_parallel<T, F>(points: &[f64], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    points.iter().map(|&t| f(t)).collect()
}

/// Run a validated spec.
pub fn run(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let start = Instant::now();
    let mut result = match spec.command {
        Command::Transfer => run_transfer(spec),
        Command::Revival => run_revival(spec),
        Command::Decoherence => run_decoherence(spec, spec.methods.clone()),
        Command::RwaCheck => run_rwa_check(spec),
        Command::Convergence => run_convergence(spec),
        Command::Audit => run_decoherence(
            spec,
            vec![
                Method::Numeric,
                Method::PrintedSeries,
                Method::RederivedSeries,
            ],
        ),
    }?;
    result.wall_time_s = start.elapsed().as_secs_f64();
    Ok(result)
}

fn new_result(spec: &SweepSpec, columns: Vec<(String, Vec<f64>)>) -> SweepResult {
    SweepResult {
        columns,
        spec: spec.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: 0.0,
        scalars: BTreeMap::new(),
        warnings: Vec::new(),
    }
}

/// Physical time for a grid value expressed in omega t units.
fn physical_time(omega_t: f64, params: &SystemParams) -> f64 {
    omega_t / params.omega
}

/// Transfer sweep: P(t) from the closed form and from exact propagation
/// under the rotating-wave Hamiltonian.
fn run_transfer(spec: &SweepSpec) -> Result<SweepResult> {
    let params = resonant_params(spec)?;
    let (alpha, beta) = (spec.alpha(), spec.beta());
    let grid = spec.time_grid();
    let cs = CompositeSpace::new(FockSpace::new(spec.dim)?);
    let prop = Propagator::new(&model::rwa_hamiltonian(&params, &cs));
    let psi0 = cs.product_state(alpha, beta, &StateVector::vacuum(cs.resonator()))?;

    let rows = evaluate_grid(
        &grid,
        |omega_t| {
            let t = physical_time(omega_t, &params);
            let analytic = rabi::transfer_probability(alpha, beta, t, &params)?;
            let psi_t = prop.propagate(t, &psi0)?;
            let oracle = psi_t.amplitude(cs.index(0, 0)).norm_sqr()
                + psi_t.amplitude(cs.index(0, 1)).norm_sqr();
            Ok([analytic, oracle])
        },
        spec.exec_mode(),
    )?;

    let mut result = new_result(
        spec,
        vec![
            ("t".into(), grid.clone()),
            ("P_analytic".into(), rows.iter().map(|r| r[0]).collect()),
            ("P_oracle".into(), rows.iter().map(|r| r[1]).collect()),
        ],
    );
    let sup_grid = rows.iter().map(|r| r[0]).fold(0.0, f64::max);
    let sup_analytic = rabi::transfer_probability_max(alpha, beta, &params)?;
    let max_diff = rows.iter().map(|r| (r[0] - r[1]).abs()).fold(0.0, f64::max);
    result.scalars.insert("p_max_grid".into(), sup_grid);
    result.scalars.insert("p_max_analytic".into(), sup_analytic);
    result
        .scalars
        .insert("max_abs_diff_analytic_oracle".into(), max_diff);
    Ok(result)
}

/// Revival sweep: purity and |C01| over the grid, revival times in the
/// summary.
fn run_revival(spec: &SweepSpec) -> Result<SweepResult> {
    let params = resonant_params(spec)?;
    let (alpha, beta) = (spec.alpha(), spec.beta());
    let grid = spec.time_grid();

    let rows = evaluate_grid(
        &grid,
        |omega_t| {
            let t = physical_time(omega_t, &params);
            let triple = rabi::evolve_amplitudes(alpha, beta, t, &params)?;
            Ok([triple.qubit_purity(), triple.c01.norm()])
        },
        spec.exec_mode(),
    )?;

    let mut result = new_result(
        spec,
        vec![
            ("t".into(), grid.clone()),
            ("purity".into(), rows.iter().map(|r| r[0]).collect()),
            ("abs_c01".into(), rows.iter().map(|r| r[1]).collect()),
        ],
    );
    let taus = rabi::revival_times(&params, REVIVAL_COUNT)?;
    for (k, tau) in taus.iter().enumerate() {
        let triple = rabi::evolve_amplitudes(alpha, beta, *tau, &params)?;
        result
            .scalars
            .insert(format!("tau_{}", k + 1), tau * params.omega);
        result
            .scalars
            .insert(format!("purity_tau_{}", k + 1), triple.qubit_purity());
    }
    result.scalars.insert(
        "min_purity".into(),
        rows.iter().map(|r| r[0]).fold(f64::INFINITY, f64::min),
    );
    Ok(result)
}

/// Decoherence sweep over the requested methods; also serves the audit
/// command, which fixes the method set and reports the printed-series
/// deviations.
fn run_decoherence(spec: &SweepSpec, methods: Vec<Method>) -> Result<SweepResult> {
    let params = resonant_params(spec)?;
    if methods.is_empty() {
        return Err(Error::InvalidParams(
            "no decoherence methods requested".into(),
        ));
    }
    let grid = spec.time_grid();
    let space = FockSpace::new(spec.dim)?;
    let dp = DecoherenceParams::from_system(&params)?;
    let engine = if methods.contains(&Method::Numeric) {
        Some(BranchEvolution::new(&params, space)?)
    } else {
        None
    };

    let eval = |method: Method, omega_t: f64| -> Result<f64> {
        let t = physical_time(omega_t, &params);
        Ok(match method {
            Method::Numeric => engine
                .as_ref()
                .expect("engine built for numeric method")
                .decoherence_factor(t)?,
            Method::PrintedSeries => decoherence::decoherence_factor_printed_series(t, &dp),
            Method::RederivedSeries => decoherence::decoherence_factor_rederived(t, &dp),
            Method::Chi0 => decoherence::decoherence_factor_chi0(t, params.g, params.omega),
            Method::ShortTime => decoherence::decoherence_factor_shorttime(t, &dp),
        })
    };

    let mut columns = vec![("t".to_string(), grid.clone())];
    let mut curves: BTreeMap<Method, Vec<f64>> = BTreeMap::new();
    for &method in &methods {
        let values = evaluate_grid(&grid, |omega_t| eval(method, omega_t), spec.exec_mode())?;
        columns.push((method.column_name().to_string(), values.clone()));
        curves.insert(method, values);
    }

    let mut result = new_result(spec, columns);
    result.scalars.insert("lambda".into(), dp.lambda);
    result.scalars.insert("omega_eff".into(), dp.omega_eff);
    for (method, values) in &curves {
        result.scalars.insert(
            format!("min_{}", method.column_name()),
            values.iter().copied().fold(f64::INFINITY, f64::min),
        );
    }
    if let Some(numeric) = curves.get(&Method::Numeric) {
        for (method, values) in &curves {
            if *method == Method::Numeric {
                continue;
            }
            let max_diff = numeric
                .iter()
                .zip(values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            result.scalars.insert(
                format!("max_abs_diff_{}_vs_numeric", method.column_name()),
                max_diff,
            );
        }
    }
    if curves.contains_key(&Method::PrintedSeries) {
        let d0 = decoherence::decoherence_factor_printed_series(0.0, &dp);
        result.scalars.insert("printed_series_at_t0".into(), d0);
        result.warnings.push(format!(
            "D0_defect: printed series evaluates to exp(-lambda^2) = {:.6} at t = 0 instead of 1",
            d0
        ));
    }
    Ok(result)
}

/// RWA check: trace distance between full and rotating-wave qubit states
/// over the grid.
fn run_rwa_check(spec: &SweepSpec) -> Result<SweepResult> {
    let params = resonant_params(spec)?;
    let grid = spec.time_grid();
    let cs = CompositeSpace::new(FockSpace::new(spec.dim)?);
    let t_grid: Vec<f64> = grid.iter().map(|&x| physical_time(x, &params)).collect();
    let curve = numerics::rwa_trace_distance_curve(&params, &t_grid, &cs)?;
    let max = curve.iter().copied().fold(0.0, f64::max);
    let mut result = new_result(
        spec,
        vec![("t".into(), grid), ("trace_distance".into(), curve)],
    );
    result.scalars.insert("max_trace_distance".into(), max);
    Ok(result)
}

/// Convergence scan of the numeric decoherence factor at the grid midpoint
/// over the requested dims.
fn run_convergence(spec: &SweepSpec) -> Result<SweepResult> {
    let params = resonant_params(spec)?;
    let omega_t = 0.5 * (spec.t_min + spec.t_max);
    let t = physical_time(omega_t, &params);
    let report = numerics::truncation_scan(
        |s| decoherence::decoherence_factor_numeric(t, &params, s),
        &spec.dims,
        CONVERGENCE_TOLERANCE,
    )?;
    let mut result = new_result(
        spec,
        vec![
            (
                "dim".into(),
                report.dims.iter().map(|&d| d as f64).collect(),
            ),
            ("value".into(), report.values.clone()),
        ],
    );
    result
        .scalars
        .insert("final_delta".into(), report.final_delta);
    result
        .scalars
        .insert("converged".into(), if report.converged { 1.0 } else { 0.0 });
    result.scalars.insert("omega_t".into(), omega_t);
    if !report.converged {
        result.warnings.push(format!(
            "not converged: final delta {:.3e} >= {:.0e}",
            report.final_delta, CONVERGENCE_TOLERANCE
        ));
    }
    Ok(result)
}

/// All sweeps run the resonant model: omega_q is pinned to omega.
fn resonant_params(spec: &SweepSpec) -> Result<SystemParams> {
    SystemParams::resonant(spec.params.omega, spec.params.g, spec.params.chi)
}
