//! Error-propagation matrix `E` of Parareal and lower bounds on its norm.
//!
//! `E` is strictly block-lower-triangular with block `(r, c) = B_{r-c-1}` and
//! `B_k = G^k (F − G)`, so that `e^{k+1} = E e^k`.

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, ZERO};
use crate::propagator::{stability_power, OneStepMethod};

#[derive(Debug, Clone)]
pub struct ErrorMatrix {
    entries: CMat,
    blocks: Vec<CMat>,
    fine: CMat,
    coarse: CMat,
    slices: usize,
}

/// Build `E` for `P` slices from the fine and coarse slice propagators.
pub fn assemble_e(fine: &CMat, coarse: &CMat, slices: usize) -> Result<ErrorMatrix> {
    let n = linalg::check_square(fine, "fine propagator")?;
    if coarse.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "coarse propagator is {}x{}, fine is {n}x{n}",
            coarse.nrows(),
            coarse.ncols()
        )));
    }
    if slices == 0 {
        return Err(Error::InvalidParameter("need at least one time slice".into()));
    }
    let mut blocks = Vec::with_capacity(slices);
    blocks.push(fine - coarse);
    for k in 1..slices {
        let next = coarse * &blocks[k - 1];
        blocks.push(next);
    }
    let size = (slices + 1) * n;
    let entries = Mat::from_fn(size, size, |i, j| {
        let (r, c) = (i / n, j / n);
        if r > c {
            blocks[r - c - 1][(i % n, j % n)]
        } else {
            ZERO
        }
    });
    Ok(ErrorMatrix {
        entries,
        blocks,
        fine: fine.clone(),
        coarse: coarse.clone(),
        slices,
    })
}

impl ErrorMatrix {
    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    /// `B_0, …, B_{P−1}`.
    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn fine(&self) -> &CMat {
        &self.fine
    }

    pub fn coarse(&self) -> &CMat {
        &self.coarse
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    /// Block size `n`.
    pub fn block_dim(&self) -> usize {
        self.fine.nrows()
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        &self.entries * v
    }

    /// `E^k v` by repeated products.
    pub fn apply_power(&self, k: usize, v: &CVec) -> CVec {
        let mut out = v.clone();
        for _ in 0..k {
            out = &self.entries * &out;
        }
        out
    }

    pub fn norm2(&self) -> Result<f64> {
        norm2(&self.entries)
    }

    pub fn norm_inf(&self) -> f64 {
        linalg::norm_inf(&self.entries)
    }
}

/// Largest singular value.
pub fn norm2(m: &CMat) -> Result<f64> {
    linalg::norm2(m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerNorm {
    pub k: usize,
    pub norm2: f64,
    pub norm_inf: f64,
}

/// `‖E^k‖₂` and `‖E^k‖_∞` for `k = 0..=k_max` (`k_max ≤ P+1`).
pub fn power_norm_sweep(e: &ErrorMatrix, k_max: usize) -> Result<Vec<PowerNorm>> {
    if k_max > e.slices + 1 {
        return Err(Error::InvalidParameter(format!(
            "k_max = {k_max} exceeds P+1 = {}",
            e.slices + 1
        )));
    }
    let mut power = linalg::identity(e.entries.nrows());
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            power = &e.entries * &power;
        }
        out.push(PowerNorm {
            k,
            norm2: norm2(&power)?,
            norm_inf: linalg::norm_inf(&power),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBound {
    /// `sqrt(Σ_{j>m} |R(λ_j δt)^N|²)`
    pub sum_bound: f64,
    /// `|R(λ_{m+1} δt)^N|`, zero when `m = n`.
    pub single_bound: f64,
    /// `λ_{m+1}`, if it exists.
    pub lambda_m1: Option<c64>,
}

/// Lower bound on `‖E‖₂` from the `n − m` modes that a rank-`m` coarse
/// propagator cannot represent.
///
/// The tail is taken after ordering the modes by decreasing `|R(λ δt)^N|`
/// (the singular values of `F` for normal `A`), so the order of `spectrum`
/// does not matter.
pub fn spectral_lower_bound(
    spectrum: &[c64],
    method: OneStepMethod,
    dt: f64,
    steps: usize,
    m: usize,
) -> Result<SpectralBound> {
    let n = spectrum.len();
    if m > n {
        return Err(Error::InvalidParameter(format!("m = {m} exceeds n = {n}")));
    }
    let mut modes: Vec<(f64, c64)> = spectrum
        .iter()
        .map(|&l| Ok((stability_power(method, l, dt, steps)?.norm(), l)))
        .collect::<Result<_>>()?;
    modes.sort_by(|a, b| b.0.total_cmp(&a.0));
    let tail = &modes[m..];
    Ok(SpectralBound {
        sum_bound: tail.iter().map(|(s, _)| s * s).sum::<f64>().sqrt(),
        single_bound: tail.first().map_or(0.0, |t| t.0),
        lambda_m1: tail.first().map(|t| t.1),
    })
}

/// `max_i |σ_i(F) − σ_i(G)|`, a lower bound on `‖F − G‖₂`.
pub fn general_lower_bound(fine: &CMat, coarse: &CMat) -> Result<f64> {
    let sf = linalg::singular_values(fine)?;
    let sg = linalg::singular_values(coarse)?;
    let len = sf.len().max(sg.len());
    Ok((0..len)
        .map(|i| (sf.get(i).unwrap_or(&0.0) - sg.get(i).unwrap_or(&0.0)).abs())
        .fold(0.0, f64::max))
}

/// `|exp(λ Δt)|`, the limit of the single-mode bound as `δt → 0`.
pub fn exact_decay(lambda: c64, slice_length: f64) -> f64 {
    (lambda.re * slice_length).exp()
}

/// `min(P/K, cost_ratio)`.
pub fn speedup_bound(slices: usize, iterations: usize, cost_ratio: f64) -> Result<f64> {
    if iterations == 0 {
        return Err(Error::InvalidParameter("speedup needs at least one iteration".into()));
    }
    if !(cost_ratio > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cost ratio must be positive, got {cost_ratio}"
        )));
    }
    Ok((slices as f64 / iterations as f64).min(cost_ratio))
}

/// What the bound computation needs to know about the fine problem.
#[derive(Debug, Clone, Copy)]
pub struct BoundInputs<'a> {
    /// Eigenvalues of the fine operator `A`.
    pub spectrum: &'a [c64],
    pub method: OneStepMethod,
    pub dt: f64,
    pub steps: usize,
    /// Coarse dimension.
    pub m: usize,
    /// Whether `A` is normal (the bound's hypothesis).
    pub normal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub norm2_e: f64,
    pub norm_inf_e: f64,
    pub norm2_b0: f64,
    /// `‖B_0‖_F`, which the sum bound does bound from above.
    pub norm_fro_b0: f64,
    pub sum_bound: f64,
    pub single_bound: f64,
    pub general_bound: f64,
    pub exact_decay: f64,
    pub singular_values_f: Vec<f64>,
    pub singular_values_g: Vec<f64>,
    /// Numerical rank of `G` at `1e-10·σ₁`.
    pub rank_g: usize,
    pub m: usize,
    pub normal: bool,
}

impl BoundReport {
    pub fn compute(e: &ErrorMatrix, inputs: &BoundInputs) -> Result<Self> {
        let spectral = spectral_lower_bound(inputs.spectrum, inputs.method, inputs.dt, inputs.steps, inputs.m)?;
        let singular_values_f = linalg::singular_values(&e.fine)?;
        let singular_values_g = linalg::singular_values(&e.coarse)?;
        let top = singular_values_g.first().copied().unwrap_or(0.0);
        let rank_g = singular_values_g.iter().filter(|&&s| top > 0.0 && s > 1e-10 * top).count();
        let general_bound = singular_values_f
            .iter()
            .zip(&singular_values_g)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let slice_length = inputs.dt * inputs.steps as f64;
        Ok(Self {
            norm2_e: e.norm2()?,
            norm_inf_e: e.norm_inf(),
            norm2_b0: norm2(&e.blocks[0])?,
            norm_fro_b0: linalg::norm_fro(&e.blocks[0]),
            sum_bound: spectral.sum_bound,
            single_bound: spectral.single_bound,
            general_bound,
            exact_decay: spectral.lambda_m1.map_or(0.0, |l| exact_decay(l, slice_length)),
            singular_values_f,
            singular_values_g,
            rank_g,
            m: inputs.m,
            normal: inputs.normal,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundCheck {
    Satisfied,
    /// Descriptions of the failed inequalities.
    Violated(Vec<String>),
    /// `A` is not normal; the bound does not apply.
    HypothesisNotMet,
}

impl BoundCheck {
    pub fn label(&self) -> &'static str {
        match self {
            BoundCheck::Satisfied => "satisfied",
            BoundCheck::Violated(_) => "violated",
            BoundCheck::HypothesisNotMet => "skipped-non-normal",
        }
    }

    pub fn is_satisfied(&self) -> bool {
        matches!(self, BoundCheck::Satisfied)
    }
}

/// Check `‖E‖₂ ≥ sum bound`, `‖E‖₂ ≥ ‖B_0‖₂` and `‖B_0‖₂ ≥ general bound`,
/// each with slack `1e-9`.
pub fn check_bounds(report: &BoundReport) -> BoundCheck {
    if !report.normal {
        return BoundCheck::HypothesisNotMet;
    }
    const SLACK: f64 = 1e-9;
    let mut failed = Vec::new();
    if report.norm2_e < report.sum_bound - SLACK {
        failed.push(format!(
            "‖E‖₂ = {:.12e} < sum bound {:.12e}",
            report.norm2_e, report.sum_bound
        ));
    }
    if report.norm2_e < report.norm2_b0 - SLACK {
        failed.push(format!("‖E‖₂ = {:.12e} < ‖B₀‖₂ = {:.12e}", report.norm2_e, report.norm2_b0));
    }
    if report.norm2_b0 < report.general_bound - SLACK {
        failed.push(format!(
            "‖B₀‖₂ = {:.12e} < general bound {:.12e}",
            report.norm2_b0, report.general_bound
        ));
    }
    if failed.is_empty() {
        BoundCheck::Satisfied
    } else {
        BoundCheck::Violated(failed)
    }
}
