//! Per-configuration pipelines and the sweeps built from them.

use faer::c64;
use rayon::prelude::*;

use super::config::{restriction_name, ExperimentConfig, RestrictionChoice};
use super::output::{PlotSpec, Table, Value};
use super::reference::{reference_solution, ReferenceProblem};
use crate::analysis::{
    assemble_e, power_norm_sweep, speedup_bound, spectral_lower_bound, check_bounds, BoundInputs, BoundReport,
    PowerNorm, BoundCheck,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{build_system, sample_initial_condition, Grid1D, Scheme, SystemMatrix};
use crate::parareal::{run_with, PararealSetup, RunOptions, RunTrace};
use crate::propagator::{build_propagator, OneStepMethod};
use crate::toy::{toy_error_after, toy_error_matrix, toy_error_vs_discretisation_ratio, toy_setup, ToyConfig};
use crate::transfer::{compose_coarse_propagator, default_restriction_mode, is_nested, RestrictionMode, TransferPair};

/// Normality tolerance relative to `‖A‖_F²`.
const NORMAL_TOL: f64 = 1e-10;

/// One point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case {
    pub scheme: Scheme,
    pub method: OneStepMethod,
    pub diffusivity: f64,
    pub m: usize,
    pub restriction: RestrictionMode,
    pub nf: usize,
}

impl Case {
    fn sort_key(&self) -> (&'static str, &'static str, u64, usize, &'static str, usize) {
        (
            self.scheme.name(),
            self.method.name(),
            self.diffusivity.to_bits(),
            self.m,
            self.restriction.name(),
            self.nf,
        )
    }
}

fn grids(cfg: &ExperimentConfig, scheme: Scheme, m: usize) -> Result<(Grid1D, Grid1D)> {
    let periodic = scheme.periodicity().unwrap_or(true);
    Ok((
        Grid1D::new(cfg.n, cfg.length, periodic)?,
        Grid1D::new(m, cfg.length, periodic)?,
    ))
}

fn restriction_modes(choice: RestrictionChoice, coarse: &Grid1D, fine: &Grid1D) -> Vec<RestrictionMode> {
    match choice {
        RestrictionChoice::Default => vec![default_restriction_mode(coarse, fine)],
        RestrictionChoice::Injection => vec![RestrictionMode::Injection],
        RestrictionChoice::Linear => vec![RestrictionMode::LinearResample],
        RestrictionChoice::Both if is_nested(coarse, fine) => {
            vec![RestrictionMode::Injection, RestrictionMode::LinearResample]
        }
        RestrictionChoice::Both => vec![RestrictionMode::LinearResample],
    }
}

/// All sweep points of `cfg`, sorted by configuration key.
pub fn enumerate_cases(cfg: &ExperimentConfig) -> Vec<Case> {
    let mut cases = Vec::new();
    for (scheme, method) in cfg.scheme_method_pairs() {
        for &diffusivity in &cfg.diffusivity {
            for &m in &cfg.m {
                let modes = match grids(cfg, scheme, m) {
                    Ok((fine, coarse)) => restriction_modes(cfg.restriction, &coarse, &fine),
                    // invalid grids surface as a row error in build_case
                    Err(_) => vec![RestrictionMode::LinearResample],
                };
                for restriction in modes {
                    for &nf in &cfg.nf {
                        cases.push(Case {
                            scheme,
                            method,
                            diffusivity,
                            m,
                            restriction,
                            nf,
                        });
                    }
                }
            }
        }
    }
    cases.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    cases.dedup_by(|a, b| a.sort_key() == b.sort_key());
    cases
}

/// Everything built for one case.
#[derive(Debug, Clone)]
pub struct CasePipeline {
    pub a: SystemMatrix,
    pub coarse_a: SystemMatrix,
    pub pair: TransferPair,
    pub setup: PararealSetup,
    /// Fine step.
    pub dt: f64,
    /// Coarse steps per slice.
    pub ng: usize,
}

impl CasePipeline {
    pub fn fine_grid(&self) -> &Grid1D {
        self.pair.fine_grid()
    }
}

/// Fine operator on `n` nodes, coarse operator of the same scheme on `m`
/// nodes, `G = I·G̃·R`, and the sampled initial state.
pub fn build_case(cfg: &ExperimentConfig, case: &Case) -> Result<CasePipeline> {
    let (fine_grid, coarse_grid) = grids(cfg, case.scheme, case.m)?;
    let a = build_system(fine_grid, case.scheme, cfg.velocity, case.diffusivity)?;
    let coarse_a = build_system(coarse_grid, case.scheme, cfg.velocity, case.diffusivity)?;
    let pair = TransferPair::new(coarse_grid, fine_grid, case.restriction)?;
    let slice = cfg.slice_length();
    let dt = slice / case.nf as f64;
    let ng = cfg.coarse_steps(case.nf);
    let fine = build_propagator(&a, dt, case.nf, case.method)?;
    let g_tilde = build_propagator(&coarse_a, slice / ng as f64, ng, case.method)?;
    let coarse = compose_coarse_propagator(&pair, &g_tilde)?;
    let y0 = sample_initial_condition(&cfg.ic.build(), &fine_grid);
    let setup = PararealSetup::new(fine, coarse, cfg.slices, y0, cfg.t_end)?;
    Ok(CasePipeline {
        a,
        coarse_a,
        pair,
        setup,
        dt,
        ng,
    })
}

/// Bound quantities for one case.
#[derive(Debug, Clone)]
pub struct BoundAnalysis {
    pub report: BoundReport,
    pub check: BoundCheck,
    pub lambda_m1: Option<c64>,
}

pub fn analyse_bounds(case: &Case, pipe: &CasePipeline) -> Result<BoundAnalysis> {
    let spectrum = pipe.a.spectrum()?;
    let e = assemble_e(pipe.setup.fine().matrix(), pipe.setup.coarse(), pipe.setup.slices())?;
    let inputs = BoundInputs {
        spectrum: &spectrum,
        method: case.method,
        dt: pipe.dt,
        steps: case.nf,
        m: case.m.min(spectrum.len()),
        normal: pipe.a.is_normal(NORMAL_TOL),
    };
    let report = BoundReport::compute(&e, &inputs)?;
    let lambda_m1 = spectral_lower_bound(&spectrum, case.method, pipe.dt, case.nf, inputs.m)?.lambda_m1;
    let check = check_bounds(&report);
    Ok(BoundAnalysis {
        report,
        check,
        lambda_m1,
    })
}

/// Outcome of a Parareal run with its diagnostics.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub trace: RunTrace,
    /// `‖y_f(T) − u(T)‖₂` against the analytic or refined reference.
    pub disc_error: Option<f64>,
    /// First `k` with `‖e^k‖₂` below `disc_error`.
    pub k_star: Option<usize>,
    /// `max_k ‖e^k‖₂ / ‖e^0‖₂`.
    pub transient_growth: f64,
    pub speedup: Option<f64>,
    pub normal: bool,
    pub bounds: Option<BoundAnalysis>,
    pub powers: Option<Vec<PowerNorm>>,
}

pub fn discretisation_error(cfg: &ExperimentConfig, case: &Case, pipe: &CasePipeline) -> Result<Option<f64>> {
    let ic = cfg.ic.build();
    let problem = ReferenceProblem {
        grid: *pipe.fine_grid(),
        scheme: case.scheme,
        velocity: cfg.velocity,
        diffusivity: case.diffusivity,
        ic: &ic,
        method: case.method,
        dt: pipe.dt,
        steps: case.nf * cfg.slices,
        refinement: cfg.refinement,
    };
    let Some(reference) = reference_solution(&problem)? else {
        return Ok(None);
    };
    let fine = crate::parareal::fine_serial_solve(&pipe.setup);
    let last = fine.block(cfg.slices);
    Ok(Some(linalg::vec_norm2(&(last - &reference))))
}

pub fn run_case(cfg: &ExperimentConfig, case: &Case, pipe: &CasePipeline) -> Result<RunSummary> {
    let options = RunOptions {
        k_max: cfg.k_max,
        stop_tol: cfg.stop_tol,
        stop_on: cfg.stop_on,
        initial_guess: cfg.initial_guess,
    };
    let trace = run_with(&pipe.setup, options)?;
    let disc_error = discretisation_error(cfg, case, pipe)?;
    let errors = trace.error_norms_l2();
    let k_star = disc_error.and_then(|d| errors.iter().position(|&e| e < d));
    let transient_growth = if errors[0] > 0.0 {
        errors.iter().fold(0.0f64, |a, &e| a.max(e)) / errors[0]
    } else {
        f64::NAN
    };
    let speedup = match k_star {
        Some(k) if k > 0 => Some(speedup_bound(cfg.slices, k, f64::INFINITY)?),
        _ => None,
    };
    let normal = pipe.a.is_normal(NORMAL_TOL);
    let (bounds, powers) = if cfg.compute_e_norm {
        let bounds = analyse_bounds(case, pipe)?;
        let powers = if cfg.power_sweep {
            let e = assemble_e(pipe.setup.fine().matrix(), pipe.setup.coarse(), cfg.slices)?;
            Some(power_norm_sweep(&e, cfg.slices + 1)?)
        } else {
            None
        };
        (Some(bounds), powers)
    } else {
        (None, None)
    };
    Ok(RunSummary {
        trace,
        disc_error,
        k_star,
        transient_growth,
        speedup,
        normal,
        bounds,
        powers,
    })
}

const CASE_COLUMNS: [&str; 11] = [
    "scheme",
    "method",
    "diffusivity",
    "m",
    "restriction",
    "nf",
    "ng",
    "dt",
    "n",
    "slices",
    "t_end",
];

fn case_cells(cfg: &ExperimentConfig, case: &Case) -> Vec<Value> {
    vec![
        case.scheme.name().into(),
        case.method.name().into(),
        case.diffusivity.into(),
        case.m.into(),
        case.restriction.name().into(),
        case.nf.into(),
        cfg.coarse_steps(case.nf).into(),
        (cfg.slice_length() / case.nf as f64).into(),
        cfg.n.into(),
        cfg.slices.into(),
        cfg.t_end.into(),
    ]
}

fn header(extra: &[&'static str]) -> Vec<&'static str> {
    CASE_COLUMNS.iter().copied().chain(extra.iter().copied()).collect()
}

/// First failing row, kept so the driver can pick an exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct RowFailure {
    pub exit_code: i32,
    pub message: String,
}

impl RowFailure {
    fn from(e: &Error) -> Self {
        Self {
            exit_code: e.exit_code(),
            message: e.to_string(),
        }
    }
}

fn fill_row(prefix: Vec<Value>, result: Result<Vec<Value>>, width: usize, failures: &mut Vec<RowFailure>) -> Vec<Value> {
    let mut row = prefix;
    match result {
        Ok(values) => {
            row.push("ok".into());
            row.extend(values);
        }
        Err(e) => {
            failures.push(RowFailure::from(&e));
            row.push(Value::Text(format!("error: {e}")));
        }
    }
    row.resize(width, Value::Empty);
    row
}

const BOUND_COLUMNS: [&str; 13] = [
    "status",
    "norm2_e",
    "norm_inf_e",
    "norm2_b0",
    "norm_fro_b0",
    "sum_bound",
    "single_bound",
    "general_bound",
    "exact_decay",
    "lambda_m1_re",
    "lambda_m1_im",
    "rank_g",
    "normal",
];

fn bound_cells(b: &BoundAnalysis) -> Vec<Value> {
    let r = &b.report;
    vec![
        r.norm2_e.into(),
        r.norm_inf_e.into(),
        r.norm2_b0.into(),
        r.norm_fro_b0.into(),
        r.sum_bound.into(),
        r.single_bound.into(),
        r.general_bound.into(),
        r.exact_decay.into(),
        Value::opt_float(b.lambda_m1.map(|l| l.re)),
        Value::opt_float(b.lambda_m1.map(|l| l.im)),
        r.rank_g.into(),
        r.normal.into(),
        b.check.label().into(),
    ]
}

/// Tables produced by one experiment plus the first row failure, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutput {
    pub tables: Vec<Table>,
    pub failures: Vec<RowFailure>,
}

/// `‖E‖₂` and the lower bounds for every case.
pub fn norm_sweep(cfg: &ExperimentConfig) -> StudyOutput {
    let cases = enumerate_cases(cfg);
    let results: Vec<Result<BoundAnalysis>> = cases
        .par_iter()
        .map(|case| build_case(cfg, case).and_then(|pipe| analyse_bounds(case, &pipe)))
        .collect();
    let mut columns = header(&BOUND_COLUMNS);
    columns.push("bound_check");
    let mut table = Table::new(cfg.experiment.name(), &columns).with_plot(PlotSpec {
        x: "dt",
        y: vec!["norm2_e"],
        panels: vec!["scheme", "method", "diffusivity", "restriction"],
        series: vec!["m"],
        log_x: true,
        log_y: false,
    });
    let mut failures = Vec::new();
    for (case, result) in cases.iter().zip(results) {
        let row = fill_row(case_cells(cfg, case), result.map(|b| bound_cells(&b)), columns.len(), &mut failures);
        table.push(row);
    }
    StudyOutput {
        tables: vec![table],
        failures,
    }
}

const RUN_COLUMNS: [&str; 15] = [
    "ic",
    "initial_guess",
    "status",
    "iterations",
    "converged",
    "disc_error",
    "k_star",
    "speedup_bound",
    "transient_growth",
    "final_error_l2",
    "normal",
    "norm2_e",
    "sum_bound",
    "single_bound",
    "bound_check",
];

const TRACE_COLUMNS: [&str; 9] = [
    "status",
    "k",
    "power_norm2",
    "power_norm_inf",
    "error_l2",
    "error_inf",
    "increment_l2",
    "increment_inf",
    "disc_error",
];

fn run_cells(s: &RunSummary) -> Vec<Value> {
    let final_error = s.trace.norms.last().map_or(f64::NAN, |n| n.error_l2);
    let (norm2_e, sum, single, check) = match &s.bounds {
        Some(b) => (
            b.report.norm2_e,
            b.report.sum_bound,
            b.report.single_bound,
            b.check.label(),
        ),
        None => (
            f64::NAN,
            f64::NAN,
            f64::NAN,
            if s.normal { "not-computed" } else { BoundCheck::HypothesisNotMet.label() },
        ),
    };
    vec![
        s.trace.iterations().into(),
        s.trace.converged.into(),
        Value::opt_float(s.disc_error),
        Value::opt_int(s.k_star),
        Value::opt_float(s.speedup),
        s.transient_growth.into(),
        final_error.into(),
        s.normal.into(),
        norm2_e.into(),
        sum.into(),
        single.into(),
        check.into(),
    ]
}

/// Parareal runs with error histories, discretisation error and `K*`.
pub fn run_sweep(cfg: &ExperimentConfig) -> StudyOutput {
    let cases = enumerate_cases(cfg);
    let results: Vec<Result<RunSummary>> = cases
        .par_iter()
        .map(|case| build_case(cfg, case).and_then(|pipe| run_case(cfg, case, &pipe)))
        .collect();
    let summary_cols = header(&RUN_COLUMNS);
    let trace_cols = header(&TRACE_COLUMNS);
    let name = cfg.experiment.name();
    let mut summary = Table::new(format!("{name}-summary"), &summary_cols).with_plot(PlotSpec {
        x: "m",
        y: vec!["k_star"],
        panels: vec!["scheme", "method", "restriction"],
        series: vec!["diffusivity"],
        log_x: false,
        log_y: false,
    });
    let mut trace = Table::new(format!("{name}-trace"), &trace_cols).with_plot(PlotSpec {
        x: "k",
        y: vec!["power_norm2", "error_l2", "disc_error"],
        panels: vec!["scheme", "method", "diffusivity", "restriction"],
        series: vec!["m", "nf"],
        log_x: false,
        log_y: true,
    });
    let mut failures = Vec::new();
    let labels = [Value::from(cfg.ic.label()), Value::from(super::config::initial_guess_name(cfg.initial_guess))];
    for (case, result) in cases.iter().zip(results) {
        let mut prefix = case_cells(cfg, case);
        prefix.extend(labels.iter().cloned());
        match &result {
            Ok(s) => {
                let steps = s.trace.norms.len().max(s.powers.as_ref().map_or(0, |p| p.len()));
                for k in 0..steps {
                    let mut row = case_cells(cfg, case);
                    let norms = s.trace.norms.get(k);
                    let power = s.powers.as_ref().and_then(|p| p.get(k));
                    row.extend([
                        "ok".into(),
                        k.into(),
                        Value::opt_float(power.map(|p| p.norm2)),
                        Value::opt_float(power.map(|p| p.norm_inf)),
                        Value::opt_float(norms.map(|n| n.error_l2)),
                        Value::opt_float(norms.map(|n| n.error_inf)),
                        Value::opt_float(norms.and_then(|n| n.increment_l2)),
                        Value::opt_float(norms.and_then(|n| n.increment_inf)),
                        Value::opt_float(s.disc_error),
                    ]);
                    trace.push(row);
                }
            }
            Err(e) => {
                let mut row = case_cells(cfg, case);
                row.push(Value::Text(format!("error: {e}")));
                row.resize(trace_cols.len(), Value::Empty);
                trace.push(row);
            }
        }
        let row = fill_row(prefix, result.map(|s| run_cells(&s)), summary_cols.len(), &mut failures);
        summary.push(row);
    }
    StudyOutput {
        tables: vec![summary, trace],
        failures,
    }
}

/// Parameters of one toy row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyCase {
    pub method: OneStepMethod,
    pub nu: f64,
    pub epsilon: f64,
    pub nf: usize,
}

pub fn toy_config(cfg: &ExperimentConfig, case: &ToyCase) -> ToyConfig {
    ToyConfig {
        nu: case.nu,
        epsilon: case.epsilon,
        wavenumber: cfg.wavenumber,
        slices: cfg.slices,
        method: case.method,
        dt: cfg.slice_length() / case.nf as f64,
        steps: case.nf,
    }
}

pub fn toy_cases(cfg: &ExperimentConfig) -> Vec<ToyCase> {
    let mut out = Vec::new();
    for &method in &cfg.methods {
        for &nu in &cfg.diffusivity {
            for &epsilon in &cfg.epsilon {
                for &nf in &cfg.nf {
                    out.push(ToyCase { method, nu, epsilon, nf });
                }
            }
        }
    }
    out
}

struct ToyResult {
    closed: Vec<f64>,
    engine: Vec<f64>,
    norm2_e: f64,
    bounds: crate::analysis::SpectralBound,
    ratio: Option<f64>,
}

fn toy_row(cfg: &ExperimentConfig, case: &ToyCase) -> Result<ToyResult> {
    let tc = toy_config(cfg, case);
    let setup = toy_setup(&tc)?;
    let trace = run_with(&setup, RunOptions::new(cfg.slices, 0.0, crate::parareal::StopOn::None))?;
    let closed = (0..=cfg.slices).map(|k| toy_error_after(&tc, k)).collect::<Result<Vec<_>>>()?;
    let e = toy_error_matrix(&tc)?;
    let (l1, l2) = tc.lambdas();
    let bounds = spectral_lower_bound(&[l1, l2], tc.method, tc.dt, tc.steps, 1)?;
    let ratio = match tc.method {
        OneStepMethod::ExactExponential => None,
        _ => Some(toy_error_vs_discretisation_ratio(&tc)?),
    };
    Ok(ToyResult {
        closed,
        engine: trace.error_norms_l2(),
        norm2_e: e.norm2()?,
        bounds,
        ratio,
    })
}

/// Closed form against the engine for the two-mode problem.
pub fn toy_study(cfg: &ExperimentConfig) -> StudyOutput {
    let cases = toy_cases(cfg);
    let results: Vec<Result<ToyResult>> = cases.par_iter().map(|c| toy_row(cfg, c)).collect();
    const KEY: [&str; 7] = ["method", "nu", "epsilon", "wavenumber", "slices", "nf", "dt"];
    let key = |c: &ToyCase| -> Vec<Value> {
        vec![
            c.method.name().into(),
            c.nu.into(),
            c.epsilon.into(),
            (cfg.wavenumber as usize).into(),
            cfg.slices.into(),
            c.nf.into(),
            (cfg.slice_length() / c.nf as f64).into(),
        ]
    };
    let summary_cols: Vec<&str> = KEY
        .iter()
        .copied()
        .chain([
            "status",
            "norm2_e",
            "single_bound",
            "sum_bound",
            "closed_error_pm1",
            "engine_error_pm1",
            "ratio_to_disc",
        ])
        .collect();
    let trace_cols: Vec<&str> = KEY
        .iter()
        .copied()
        .chain(["status", "k", "closed_form", "engine", "abs_diff"])
        .collect();
    let mut summary = Table::new("toy-demo-summary", &summary_cols);
    let mut trace = Table::new("toy-demo-trace", &trace_cols).with_plot(PlotSpec {
        x: "k",
        y: vec!["engine"],
        panels: vec!["method", "nu"],
        series: vec!["epsilon"],
        log_x: false,
        log_y: true,
    });
    let mut failures = Vec::new();
    for (case, result) in cases.iter().zip(results) {
        match &result {
            Ok(r) => {
                for k in 0..r.closed.len() {
                    let mut row = key(case);
                    row.extend([
                        "ok".into(),
                        k.into(),
                        r.closed[k].into(),
                        r.engine[k].into(),
                        (r.closed[k] - r.engine[k]).abs().into(),
                    ]);
                    trace.push(row);
                }
            }
            Err(e) => {
                let mut row = key(case);
                row.push(Value::Text(format!("error: {e}")));
                row.resize(trace_cols.len(), Value::Empty);
                trace.push(row);
            }
        }
        let cells = result.map(|r| {
            let pm1 = cfg.slices - 1;
            vec![
                r.norm2_e.into(),
                r.bounds.single_bound.into(),
                r.bounds.sum_bound.into(),
                r.closed[pm1].into(),
                r.engine[pm1].into(),
                Value::opt_float(r.ratio),
            ]
        });
        summary.push(fill_row(key(case), cells, summary_cols.len(), &mut failures));
    }
    StudyOutput {
        tables: vec![summary, trace],
        failures,
    }
}

/// Human-readable restriction setting for metadata.
pub fn restriction_label(cfg: &ExperimentConfig) -> &'static str {
    restriction_name(cfg.restriction)
}
