//! Line-oriented `key = value` experiment configuration.
//!
//! ```text
//! # shared settings apply to every section below
//! n = 64
//!
//! [norm-sweep]
//! m = 32, 48, 63
//! scheme = upwind, method = trapezoidal
//! ```
//!
//! Lists are comma separated. A comma followed by another `key =` starts a
//! new assignment on the same line. Without sections, `experiment = <id>`
//! selects the experiment (default `norm-sweep`).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{InitialCondition, Scheme, SineMode};
use crate::parareal::{InitialGuess, StopOn};
use crate::propagator::OneStepMethod;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentId {
    NormSweep,
    PowerVsError,
    SineDivergence,
    HeatNormSweep,
    HeatRun,
    ToyDemo,
    NonNormalAdvection,
    NonNormalAdvectionDiffusion,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] = [
        ExperimentId::NormSweep,
        ExperimentId::PowerVsError,
        ExperimentId::SineDivergence,
        ExperimentId::HeatNormSweep,
        ExperimentId::HeatRun,
        ExperimentId::ToyDemo,
        ExperimentId::NonNormalAdvection,
        ExperimentId::NonNormalAdvectionDiffusion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::NormSweep => "norm-sweep",
            ExperimentId::PowerVsError => "power-vs-error",
            ExperimentId::SineDivergence => "sine-divergence",
            ExperimentId::HeatNormSweep => "heat-norm-sweep",
            ExperimentId::HeatRun => "heat-run",
            ExperimentId::ToyDemo => "toy-demo",
            ExperimentId::NonNormalAdvection => "non-normal-advection",
            ExperimentId::NonNormalAdvectionDiffusion => "non-normal-advection-diffusion",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentId::NormSweep => "‖E‖₂ and lower bounds vs δt for periodic advection, coarse m ∈ {32,48,63,64}",
            ExperimentId::PowerVsError => "‖E^k‖ next to the actual error ‖e^k‖ for a Gaussian pulse",
            ExperimentId::SineDivergence => "error history for sin(πx)+sin(24πx) under centered/trapezoidal advection",
            ExperimentId::HeatNormSweep => "‖E‖₂ and lower bounds vs δt for the periodic heat equation",
            ExperimentId::HeatRun => "heat equation run: ‖E^k‖, ‖e^k‖, discretisation error and speedup bound",
            ExperimentId::ToyDemo => "two-mode spectral problem: closed form vs engine, ratio to discretisation error",
            ExperimentId::NonNormalAdvection => "non-normal Dirichlet advection, P=40 (qualitative)",
            ExperimentId::NonNormalAdvectionDiffusion => {
                "non-normal Dirichlet advection-diffusion for D ∈ {1,0.1,0.01,0}, P=40 (qualitative)"
            }
        }
    }

    /// Non-normal studies mirror a different discretisation and only claim
    /// qualitative agreement.
    pub fn is_qualitative(self) -> bool {
        matches!(self, ExperimentId::NonNormalAdvection | ExperimentId::NonNormalAdvectionDiffusion)
    }
}

/// How scheme and method lists combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// `schemes[i]` with `methods[i]`.
    Matched,
    /// Every scheme with every method.
    Cross,
}

/// Which restriction operators a sweep uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestrictionChoice {
    /// Injection on nested grids, linear resampling otherwise.
    Default,
    Injection,
    Linear,
    /// Linear resampling everywhere plus injection where nested.
    Both,
}

/// Named initial profile; see [`InitialSpec::build`].
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Gaussian { center: f64, width: f64 },
    /// `sin(πx) + sin(24πx)`
    SinePair,
    /// `sin(kπx)`
    Sine(f64),
    /// `Σ_{k=1}^{count} sin(kπx)/k²`
    SineSeries(usize),
}

impl InitialSpec {
    pub fn build(&self) -> InitialCondition {
        match self {
            InitialSpec::Gaussian { center, width } => InitialCondition::Gaussian {
                center: *center,
                width: *width,
            },
            InitialSpec::SinePair => InitialCondition::sine_pair(),
            InitialSpec::Sine(k) => InitialCondition::SineSum {
                modes: vec![SineMode {
                    wavenumber: *k,
                    amplitude: 1.0,
                }],
            },
            InitialSpec::SineSeries(count) => InitialCondition::decaying_sine_series(*count),
        }
    }

    pub fn label(&self) -> String {
        match self {
            InitialSpec::Gaussian { center, width } => format!("gaussian:{center}:{width}"),
            InitialSpec::SinePair => "sine-pair".into(),
            InitialSpec::Sine(k) => format!("sine:{k}"),
            InitialSpec::SineSeries(c) => format!("sine-series:{c}"),
        }
    }

    fn parse(text: &str) -> Option<Self> {
        let mut parts = text.split(':');
        let head = parts.next()?;
        let args: Vec<&str> = parts.collect();
        let num = |i: usize, default: f64| -> Option<f64> {
            args.get(i).map_or(Some(default), |s| s.trim().parse().ok())
        };
        match (head, args.len()) {
            ("gaussian", 0..=2) => Some(InitialSpec::Gaussian {
                center: num(0, 1.0)?,
                width: num(1, 0.25)?,
            }),
            ("sine-pair", 0) => Some(InitialSpec::SinePair),
            ("sine", 1) => Some(InitialSpec::Sine(num(0, 1.0)?)),
            ("sine-series", 0..=1) => Some(InitialSpec::SineSeries(num(0, 8.0)? as usize)),
            _ => None,
        }
    }
}

/// Coarse steps per slice: equal to the fine count, or fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoarseSteps {
    SameAsFine,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub n: usize,
    pub m: Vec<usize>,
    /// Fine steps per slice.
    pub nf: Vec<usize>,
    pub ng: CoarseSteps,
    pub slices: usize,
    pub t_end: f64,
    pub length: f64,
    pub velocity: f64,
    pub diffusivity: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub methods: Vec<OneStepMethod>,
    pub pairing: Pairing,
    pub ic: InitialSpec,
    pub restriction: RestrictionChoice,
    pub stop_tol: f64,
    pub stop_on: StopOn,
    pub k_max: usize,
    pub initial_guess: InitialGuess,
    /// Refinement factor of the reference run on non-periodic grids.
    pub refinement: usize,
    /// Assemble `E` and take its SVD (expensive for large `P·n`).
    pub compute_e_norm: bool,
    pub power_sweep: bool,
    pub epsilon: Vec<f64>,
    pub wavenumber: u32,
}

const DEFAULT_NF: [usize; 7] = [1, 2, 4, 6, 8, 10, 20];

impl ExperimentConfig {
    pub fn defaults(experiment: ExperimentId) -> Self {
        use ExperimentId::*;
        let mut c = Self {
            experiment,
            n: 64,
            m: vec![32, 48, 63, 64],
            nf: DEFAULT_NF.to_vec(),
            ng: CoarseSteps::SameAsFine,
            slices: 10,
            t_end: 1.0,
            length: 2.0,
            velocity: 1.0,
            diffusivity: vec![0.0],
            schemes: vec![Scheme::UpwindPeriodic, Scheme::CenteredPeriodic],
            methods: vec![OneStepMethod::ImplicitEuler, OneStepMethod::Trapezoidal],
            pairing: Pairing::Cross,
            ic: InitialSpec::Gaussian {
                center: 1.0,
                width: 0.25,
            },
            restriction: RestrictionChoice::Default,
            stop_tol: 1e-6,
            stop_on: StopOn::None,
            k_max: 10,
            initial_guess: InitialGuess::CoarseRun,
            refinement: 8,
            compute_e_norm: true,
            power_sweep: false,
            epsilon: vec![1e-1, 1e-3, 1e-6],
            wavenumber: 8,
        };
        match experiment {
            NormSweep => c.restriction = RestrictionChoice::Both,
            PowerVsError => {
                c.m = vec![32, 48, 63];
                c.nf = vec![10];
                c.pairing = Pairing::Matched;
                c.power_sweep = true;
            }
            SineDivergence => {
                c.m = vec![32, 48, 63];
                c.nf = vec![10];
                c.schemes = vec![Scheme::CenteredPeriodic];
                c.methods = vec![OneStepMethod::Trapezoidal];
                c.ic = InitialSpec::SinePair;
            }
            HeatNormSweep => {
                c.schemes = vec![Scheme::HeatCentered];
                c.methods = vec![OneStepMethod::Trapezoidal];
                c.diffusivity = vec![1.0];
            }
            HeatRun => {
                c.m = vec![32, 48, 63];
                c.nf = vec![10];
                c.schemes = vec![Scheme::HeatCentered];
                c.methods = vec![OneStepMethod::Trapezoidal];
                c.diffusivity = vec![1.0];
                c.ic = InitialSpec::SinePair;
                c.power_sweep = true;
            }
            ToyDemo => {
                c.slices = 3;
                c.k_max = 3;
                c.nf = vec![10];
                c.methods = OneStepMethod::ALL.to_vec();
                c.diffusivity = vec![0.0, 1.0];
                c.schemes = vec![Scheme::SpectralDiagonal];
                c.m = vec![1];
                c.n = 2;
                c.compute_e_norm = true;
            }
            NonNormalAdvection | NonNormalAdvectionDiffusion => {
                c.schemes = vec![Scheme::CenteredDirichlet];
                c.methods = vec![OneStepMethod::Trapezoidal];
                c.m = vec![32];
                c.slices = 40;
                c.k_max = 40;
                c.length = 4.0;
                c.stop_on = StopOn::Increment;
                c.compute_e_norm = false;
                if experiment == NonNormalAdvection {
                    // δt = 1/48000
                    c.nf = vec![1200];
                    c.ic = InitialSpec::Sine(2.0);
                } else {
                    // δt = 1/160
                    c.nf = vec![4];
                    c.diffusivity = vec![1.0, 0.1, 0.01, 0.0];
                    c.ic = InitialSpec::SineSeries(8);
                }
            }
        }
        c
    }

    pub fn slice_length(&self) -> f64 {
        self.t_end / self.slices as f64
    }

    /// (scheme, method) combinations implied by the pairing.
    pub fn scheme_method_pairs(&self) -> Vec<(Scheme, OneStepMethod)> {
        match self.pairing {
            Pairing::Matched => self.schemes.iter().copied().zip(self.methods.iter().copied()).collect(),
            Pairing::Cross => self
                .schemes
                .iter()
                .flat_map(|&s| self.methods.iter().map(move |&m| (s, m)))
                .collect(),
        }
    }

    pub fn coarse_steps(&self, nf: usize) -> usize {
        match self.ng {
            CoarseSteps::SameAsFine => nf,
            CoarseSteps::Fixed(ng) => ng,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::config(0, msg));
        if self.n == 0 || self.m.is_empty() || self.m.iter().any(|&m| m == 0) {
            return bad("n and every m must be positive".into());
        }
        if self.nf.is_empty() || self.nf.contains(&0) {
            return bad("nf must list positive step counts".into());
        }
        if self.slices == 0 || self.k_max == 0 {
            return bad("slices and k_max must be positive".into());
        }
        if !(self.t_end > 0.0 && self.length > 0.0) {
            return bad("t_end and length must be positive".into());
        }
        if self.schemes.is_empty() || self.methods.is_empty() {
            return bad("need at least one scheme and one method".into());
        }
        if self.pairing == Pairing::Matched && self.schemes.len() != self.methods.len() {
            return bad(format!(
                "matched pairing needs as many schemes ({}) as methods ({})",
                self.schemes.len(),
                self.methods.len()
            ));
        }
        if self.diffusivity.is_empty() || self.diffusivity.iter().any(|d| !(*d >= 0.0)) {
            return bad("diffusivity values must be nonnegative".into());
        }
        if self.refinement == 0 {
            return bad("refinement must be positive".into());
        }
        if self.experiment == ExperimentId::ToyDemo && (self.epsilon.is_empty() || self.wavenumber < 2) {
            return bad("toy needs epsilon values and wavenumber ≥ 2".into());
        }
        Ok(())
    }

    /// Config text that parses back to `self`.
    pub fn to_text(&self) -> String {
        let list = |v: &[String]| v.join(", ");
        let floats = |v: &[f64]| list(&v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>());
        let ints = |v: &[usize]| list(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.experiment.description());
        let _ = writeln!(s, "[{}]", self.experiment.name());
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("n", self.n.to_string());
        kv("m", ints(&self.m));
        kv("nf", ints(&self.nf));
        kv(
            "ng",
            match self.ng {
                CoarseSteps::SameAsFine => "same".into(),
                CoarseSteps::Fixed(v) => v.to_string(),
            },
        );
        kv("slices", self.slices.to_string());
        kv("t_end", format!("{:e}", self.t_end));
        kv("length", format!("{:e}", self.length));
        kv("velocity", format!("{:e}", self.velocity));
        kv("diffusivity", floats(&self.diffusivity));
        kv(
            "schemes",
            list(&self.schemes.iter().map(|s| s.name().to_string()).collect::<Vec<_>>()),
        );
        kv(
            "methods",
            list(&self.methods.iter().map(|m| m.name().to_string()).collect::<Vec<_>>()),
        );
        kv(
            "pairing",
            match self.pairing {
                Pairing::Matched => "matched",
                Pairing::Cross => "cross",
            }
            .into(),
        );
        kv("ic", self.ic.label());
        kv("restriction", restriction_name(self.restriction).into());
        kv("stop_tol", format!("{:e}", self.stop_tol));
        kv("stop_on", stop_on_name(self.stop_on).into());
        kv("k_max", self.k_max.to_string());
        kv("initial_guess", initial_guess_name(self.initial_guess).into());
        kv("refinement", self.refinement.to_string());
        kv("compute_e_norm", self.compute_e_norm.to_string());
        kv("power_sweep", self.power_sweep.to_string());
        kv("epsilon", floats(&self.epsilon));
        kv("wavenumber", self.wavenumber.to_string());
        s
    }
}

pub(crate) fn restriction_name(r: RestrictionChoice) -> &'static str {
    match r {
        RestrictionChoice::Default => "default",
        RestrictionChoice::Injection => "injection",
        RestrictionChoice::Linear => "linear",
        RestrictionChoice::Both => "both",
    }
}

pub(crate) fn stop_on_name(s: StopOn) -> &'static str {
    match s {
        StopOn::Increment => "increment",
        StopOn::Error => "error",
        StopOn::None => "none",
    }
}

pub(crate) fn initial_guess_name(g: InitialGuess) -> &'static str {
    match g {
        InitialGuess::CoarseRun => "coarse",
        InitialGuess::Zero => "zero",
    }
}

struct Assignment {
    line: usize,
    key: String,
    value: String,
}

/// Split a line into assignments; a comma starts a new one only when the
/// following text contains `=`.
fn split_assignments(line_no: usize, line: &str) -> Result<Vec<Assignment>> {
    let mut out: Vec<Assignment> = Vec::new();
    for segment in line.split(',') {
        if let Some((k, v)) = segment.split_once('=') {
            out.push(Assignment {
                line: line_no,
                key: k.trim().to_string(),
                value: v.trim().to_string(),
            });
        } else if let Some(last) = out.last_mut() {
            last.value.push(',');
            last.value.push_str(segment.trim());
        } else {
            return Err(Error::config(line_no, format!("expected `key = value`, got `{}`", line.trim())));
        }
    }
    for a in &out {
        if a.key.is_empty() {
            return Err(Error::config(line_no, "empty key"));
        }
    }
    Ok(out)
}

fn parse_list<T>(a: &Assignment, item: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    a.value
        .split(',')
        .map(|s| s.trim())
        .map(|s| item(s).ok_or_else(|| Error::config(a.line, format!("invalid value `{s}` for `{}`", a.key))))
        .collect()
}

fn parse_one<T>(a: &Assignment, item: impl Fn(&str) -> Option<T>) -> Result<T> {
    item(a.value.trim()).ok_or_else(|| Error::config(a.line, format!("invalid value `{}` for `{}`", a.value, a.key)))
}

const KEYS: &[&str] = &[
    "experiment",
    "n",
    "m",
    "nf",
    "ng",
    "dt",
    "slices",
    "t_end",
    "length",
    "velocity",
    "diffusivity",
    "schemes",
    "scheme",
    "methods",
    "method",
    "pairing",
    "ic",
    "restriction",
    "stop_tol",
    "stop_on",
    "k_max",
    "initial_guess",
    "refinement",
    "compute_e_norm",
    "power_sweep",
    "epsilon",
    "wavenumber",
];

fn apply(cfg: &mut ExperimentConfig, a: &Assignment, dt: &mut Option<(usize, f64)>) -> Result<()> {
    let int = |s: &str| s.parse::<usize>().ok();
    let float = |s: &str| s.parse::<f64>().ok().filter(|x| x.is_finite());
    let boolean = |s: &str| s.parse::<bool>().ok();
    match a.key.as_str() {
        "experiment" => {} // handled by the caller
        "n" => cfg.n = parse_one(a, int)?,
        "m" => cfg.m = parse_list(a, int)?,
        "nf" => cfg.nf = parse_list(a, int)?,
        "ng" => {
            cfg.ng = parse_one(a, |s| {
                if s == "same" {
                    Some(CoarseSteps::SameAsFine)
                } else {
                    int(s).map(CoarseSteps::Fixed)
                }
            })?
        }
        "dt" => *dt = Some((a.line, parse_one(a, float)?)),
        "slices" => cfg.slices = parse_one(a, int)?,
        "t_end" => cfg.t_end = parse_one(a, float)?,
        "length" => cfg.length = parse_one(a, float)?,
        "velocity" => cfg.velocity = parse_one(a, float)?,
        "diffusivity" => cfg.diffusivity = parse_list(a, float)?,
        "schemes" | "scheme" => cfg.schemes = parse_list(a, Scheme::from_name)?,
        "methods" | "method" => cfg.methods = parse_list(a, OneStepMethod::from_name)?,
        "pairing" => {
            cfg.pairing = parse_one(a, |s| match s {
                "matched" => Some(Pairing::Matched),
                "cross" => Some(Pairing::Cross),
                _ => None,
            })?
        }
        "ic" => cfg.ic = parse_one(a, InitialSpec::parse)?,
        "restriction" => {
            cfg.restriction = parse_one(a, |s| match s {
                "default" => Some(RestrictionChoice::Default),
                "injection" => Some(RestrictionChoice::Injection),
                "linear" => Some(RestrictionChoice::Linear),
                "both" => Some(RestrictionChoice::Both),
                _ => None,
            })?
        }
        "stop_tol" => cfg.stop_tol = parse_one(a, float)?,
        "stop_on" => {
            cfg.stop_on = parse_one(a, |s| match s {
                "increment" => Some(StopOn::Increment),
                "error" => Some(StopOn::Error),
                "none" => Some(StopOn::None),
                _ => None,
            })?
        }
        "k_max" => cfg.k_max = parse_one(a, int)?,
        "initial_guess" => {
            cfg.initial_guess = parse_one(a, |s| match s {
                "coarse" => Some(InitialGuess::CoarseRun),
                "zero" => Some(InitialGuess::Zero),
                _ => None,
            })?
        }
        "refinement" => cfg.refinement = parse_one(a, int)?,
        "compute_e_norm" => cfg.compute_e_norm = parse_one(a, boolean)?,
        "power_sweep" => cfg.power_sweep = parse_one(a, boolean)?,
        "epsilon" => cfg.epsilon = parse_list(a, float)?,
        "wavenumber" => cfg.wavenumber = parse_one(a, |s| s.parse().ok())?,
        _ => unreachable!("unknown keys are rejected before applying"),
    }
    Ok(())
}

fn build(experiment: ExperimentId, assignments: &[&Assignment], line: usize) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(experiment);
    let mut dt = None;
    for a in assignments {
        apply(&mut cfg, a, &mut dt)?;
    }
    if let Some((dt_line, dt)) = dt {
        let steps = cfg.slice_length() / dt;
        let rounded = steps.round();
        if rounded < 1.0 || (steps - rounded).abs() > 1e-9 * steps {
            return Err(Error::config(
                dt_line,
                format!("dt = {dt} does not divide the slice length {}", cfg.slice_length()),
            ));
        }
        cfg.nf = vec![rounded as usize];
    }
    cfg.validate().map_err(|e| match e {
        Error::Config { message, .. } => Error::config(line, message),
        other => other,
    })?;
    Ok(cfg)
}

/// Parse a config file into one configuration per section (or a single
/// configuration when there are no sections).
pub fn parse_config(text: &str) -> Result<Vec<ExperimentConfig>> {
    let mut shared: Vec<Assignment> = Vec::new();
    let mut sections: Vec<(usize, ExperimentId, Vec<Assignment>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::config(line_no, "unterminated section header"))?
                .trim();
            let id = ExperimentId::from_name(name)
                .ok_or_else(|| Error::config(line_no, format!("unknown experiment `{name}`")))?;
            sections.push((line_no, id, Vec::new()));
            continue;
        }
        let assignments = split_assignments(line_no, line)?;
        match sections.last_mut() {
            Some((_, _, list)) => list.extend(assignments),
            None => shared.extend(assignments),
        }
    }

    let all = shared.iter().chain(sections.iter().flat_map(|s| s.2.iter()));
    let unknown: Vec<String> = all
        .filter(|a| !KEYS.contains(&a.key.as_str()))
        .map(|a| format!("`{}` (line {})", a.key, a.line))
        .collect();
    if !unknown.is_empty() {
        let first_line = unknown[0].rsplit("line ").next().and_then(|s| s.trim_end_matches(')').parse().ok());
        return Err(Error::config(
            first_line.unwrap_or(0),
            format!("unknown key(s): {}", unknown.join(", ")),
        ));
    }

    let experiment_key = shared.iter().rev().find(|a| a.key == "experiment");
    if sections.is_empty() {
        let id = match experiment_key {
            Some(a) => parse_one(a, ExperimentId::from_name)?,
            None => ExperimentId::NormSweep,
        };
        let refs: Vec<&Assignment> = shared.iter().collect();
        return Ok(vec![build(id, &refs, 0)?]);
    }
    if let Some(a) = experiment_key {
        return Err(Error::config(a.line, "`experiment` cannot be combined with sections"));
    }
    if let Some(a) = sections.iter().flat_map(|s| s.2.iter()).find(|a| a.key == "experiment") {
        return Err(Error::config(a.line, "`experiment` is implied by the section header"));
    }
    sections
        .iter()
        .map(|(line, id, own)| {
            let refs: Vec<&Assignment> = shared.iter().chain(own.iter()).collect();
            build(*id, &refs, *line)
        })
        .collect()
}
