//! Two-mode spectral problem with a closed-form Parareal error.
//!
//! `u_t + u_x = ν u_xx` with `u_0 = exp(ix) + ε exp(iLx)` on `[0, 2π]` is exact
//! in the modes `1` and `L`, giving `A = diag(λ₁, λ₂)` with `λ₁ = −i − ν` and
//! `λ₂ = −iL − νL²`. The coarse level keeps mode 1 only, so `G` never sees
//! mode `L` and the error in that mode is transported one slice per iteration.

use std::f64::consts::PI;

use faer::{c64, Mat};

use crate::analysis::{assemble_e, ErrorMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, real, ZERO};
use crate::model::Grid1D;
use crate::parareal::PararealSetup;
use crate::propagator::{stability_power, OneStepMethod, Propagator};
use crate::transfer::{compose_coarse_propagator, TransferPair};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyConfig {
    pub nu: f64,
    pub epsilon: f64,
    /// High wavenumber `L ≥ 2`.
    pub wavenumber: u32,
    pub slices: usize,
    pub method: OneStepMethod,
    pub dt: f64,
    /// Fine steps per slice (the coarse level uses the same).
    pub steps: usize,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            nu: 0.0,
            epsilon: 1e-3,
            wavenumber: 8,
            slices: 3,
            method: OneStepMethod::ExactExponential,
            dt: 1.0 / 30.0,
            steps: 10,
        }
    }
}

impl ToyConfig {
    pub fn lambdas(&self) -> (c64, c64) {
        let l = self.wavenumber as f64;
        (c64::new(-self.nu, -1.0), c64::new(-self.nu * l * l, -l))
    }

    pub fn slice_length(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn total_time(&self) -> f64 {
        self.slice_length() * self.slices as f64
    }

    fn validate(&self) -> Result<()> {
        if !(self.nu >= 0.0) {
            return Err(Error::InvalidParameter(format!("ν must be nonnegative, got {}", self.nu)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("ε must be positive, got {}", self.epsilon)));
        }
        if self.wavenumber < 2 {
            return Err(Error::InvalidParameter("high wavenumber must be at least 2".into()));
        }
        if self.slices == 0 || self.steps == 0 || !(self.dt > 0.0) {
            return Err(Error::InvalidParameter("need P ≥ 1, N ≥ 1 and δt > 0".into()));
        }
        Ok(())
    }

    /// `R(λ₂ δt)^N`, the per-slice amplification of the unresolved mode.
    fn high_mode_factor(&self) -> Result<c64> {
        stability_power(self.method, self.lambdas().1, self.dt, self.steps)
    }
}

/// `I = (1 0)ᵀ`, `R = (1 0)`.
pub fn toy_transfers() -> Result<TransferPair> {
    let fine = Grid1D::periodic(2, 2.0 * PI)?;
    let coarse = Grid1D::periodic(1, 2.0 * PI)?;
    let i = Mat::from_fn(2, 1, |r, _| if r == 0 { 1.0 } else { 0.0 });
    let r = i.transpose().to_owned();
    TransferPair::from_matrices(i, r, coarse, fine)
}

/// Parareal setup with `F = diag(R(λ₁δt)^N, R(λ₂δt)^N)`, `G = I R(λ₁δt)^N R`
/// and `y₀ = (1, ε)`.
pub fn toy_setup(cfg: &ToyConfig) -> Result<PararealSetup> {
    cfg.validate()?;
    let (l1, l2) = cfg.lambdas();
    let pair = toy_transfers()?;
    // both levels share R(λ₁δt)^N bit for bit, so F − G vanishes exactly in mode 1
    let r1 = stability_power(cfg.method, l1, cfg.dt, cfg.steps)?;
    let r2 = stability_power(cfg.method, l2, cfg.dt, cfg.steps)?;
    let diag = |v: &[c64]| Mat::from_fn(v.len(), v.len(), |i, j| if i == j { v[i] } else { ZERO });
    let fine = Propagator::from_matrix(diag(&[r1, r2]), cfg.method, cfg.dt, cfg.steps)?;
    let g_tilde = Propagator::from_matrix(diag(&[r1]), cfg.method, cfg.dt, cfg.steps)?;
    let coarse = compose_coarse_propagator(&pair, &g_tilde)?;
    let y0 = linalg::col_from_slice(&[real(1.0), real(cfg.epsilon)]);
    PararealSetup::new(fine, coarse, cfg.slices, y0, cfg.total_time())
}

pub fn toy_error_matrix(cfg: &ToyConfig) -> Result<ErrorMatrix> {
    let setup = toy_setup(cfg)?;
    assemble_e(setup.fine().matrix(), setup.coarse(), cfg.slices)
}

/// Closed-form `‖e^k‖₂ = ε·sqrt(Σ_{j=k+1}^{P} |R₂|^{2j})` with `R₂ = R(λ₂δt)^N`.
pub fn toy_error_after(cfg: &ToyConfig, k: usize) -> Result<f64> {
    cfg.validate()?;
    if k > cfg.slices {
        return Err(Error::InvalidParameter(format!(
            "iteration {k} beyond P = {}",
            cfg.slices
        )));
    }
    let r2 = cfg.high_mode_factor()?.norm();
    let sum = (k + 1..=cfg.slices).fold(0.0, |acc, j| acc + r2.powi(2 * j as i32));
    Ok(cfg.epsilon * sum.sqrt())
}

/// `‖e^{P−1}‖₂ / ‖e_disc‖₂`, where `e_disc` is the fine method's error at
/// `T = P N δt` against the exact modal solution. For `P = 3`, `ε = 1` this is
/// `|R(λ₂δt)^{3N}| / sqrt(|ε⁽¹⁾|² + |ε⁽ᴸ⁾|²)`.
pub fn toy_error_vs_discretisation_ratio(cfg: &ToyConfig) -> Result<f64> {
    cfg.validate()?;
    if cfg.method == OneStepMethod::ExactExponential {
        return Err(Error::InvalidParameter(
            "fine method has no discretisation error (exact flow); ratio undefined".into(),
        ));
    }
    let (l1, l2) = cfg.lambdas();
    let total_steps = cfg.steps * cfg.slices;
    let t = cfg.total_time();
    let e1 = stability_power(cfg.method, l1, cfg.dt, total_steps)? - (l1 * t).exp();
    let el = (stability_power(cfg.method, l2, cfg.dt, total_steps)? - (l2 * t).exp()) * cfg.epsilon;
    let disc = (e1.norm_sqr() + el.norm_sqr()).sqrt();
    Ok(toy_error_after(cfg, cfg.slices - 1)? / disc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{spectral_lower_bound, BoundInputs, BoundReport};
    use crate::model::SystemMatrix;
    use crate::parareal::{run, StopOn};
    use crate::propagator::build_propagator;
    use proptest::prelude::*;

    #[test]
    fn closed_form_propagator_matches_dense_builder() {
        for method in OneStepMethod::ALL {
            let cfg = ToyConfig {
                nu: 0.1,
                method,
                ..ToyConfig::default()
            };
            let (l1, l2) = cfg.lambdas();
            let a = SystemMatrix::diagonal(&[l1, l2], *toy_transfers().unwrap().fine_grid()).unwrap();
            let dense = build_propagator(&a, cfg.dt, cfg.steps, method).unwrap();
            let s = toy_setup(&cfg).unwrap();
            assert!(linalg::rel_fro_distance(s.fine().matrix(), dense.matrix()) < 1e-13);
        }
    }

    #[test]
    fn exact_inviscid_setup() {
        let cfg = ToyConfig::default();
        let s = toy_setup(&cfg).unwrap();
        let dt_slice = cfg.slice_length();
        let f = s.fine().matrix();
        assert!((f[(0, 0)] - c64::new(0.0, -dt_slice).exp()).norm() < 1e-13);
        assert!((f[(1, 1)] - c64::new(0.0, -8.0 * dt_slice).exp()).norm() < 1e-13);
        assert_eq!(linalg::numerical_rank(s.coarse(), 1e-10).unwrap(), 1);
        let e = toy_error_matrix(&cfg).unwrap();
        for b in &e.blocks()[1..] {
            assert_eq!(linalg::norm_fro(b), 0.0);
        }
    }

    #[test]
    fn closed_form_values() {
        for eps in [1e-1, 1e-3, 1e-6] {
            let cfg = ToyConfig {
                epsilon: eps,
                ..ToyConfig::default()
            };
            assert!((toy_error_after(&cfg, 2).unwrap() - eps).abs() < 1e-12 * eps.max(1.0));
            assert_eq!(toy_error_after(&cfg, 3).unwrap(), 0.0);
            assert!((toy_error_after(&cfg, 0).unwrap() - eps * 3f64.sqrt()).abs() < 1e-12);
        }
        let damped = ToyConfig {
            nu: 1.0,
            wavenumber: 4,
            epsilon: 0.5,
            dt: 0.1,
            steps: 10,
            ..ToyConfig::default()
        };
        let want = 0.5 * (-48.0f64).exp();
        assert!((toy_error_after(&damped, 2).unwrap() - want).abs() <= 1e-12 * want);
        assert!(toy_error_after(&damped, 4).is_err());
    }

    #[test]
    fn ratio_examples() {
        let cfg = ToyConfig {
            nu: 1.0,
            epsilon: 1.0,
            wavenumber: 8,
            method: OneStepMethod::ImplicitEuler,
            ..ToyConfig::default()
        };
        assert!(toy_error_vs_discretisation_ratio(&cfg).unwrap() < 1e-6);
        let inviscid = ToyConfig {
            epsilon: 1.0,
            method: OneStepMethod::Trapezoidal,
            ..ToyConfig::default()
        };
        assert!(toy_error_vs_discretisation_ratio(&inviscid).unwrap().is_finite());
        assert!(toy_error_vs_discretisation_ratio(&ToyConfig::default()).is_err());
    }

    #[test]
    fn bound_is_tight_with_exact_flow() {
        let cfg = ToyConfig::default();
        let e = toy_error_matrix(&cfg).unwrap();
        let (l1, l2) = cfg.lambdas();
        let spectrum = [l1, l2];
        let inputs = BoundInputs {
            spectrum: &spectrum,
            method: cfg.method,
            dt: cfg.dt,
            steps: cfg.steps,
            m: 1,
            normal: true,
        };
        let report = BoundReport::compute(&e, &inputs).unwrap();
        let tb = spectral_lower_bound(&spectrum, cfg.method, cfg.dt, cfg.steps, 1).unwrap();
        assert!((report.norm2_e - tb.single_bound).abs() < 1e-12);
        assert!((report.norm2_e - 1.0).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn engine_matches_closed_form(
            nu in 0.0f64..0.3,
            log_eps in -6.0f64..0.0,
            wavenumber in 2u32..=12,
            slices in 1usize..=6,
            method_idx in 0usize..3,
            steps in 1usize..=8,
        ) {
            let cfg = ToyConfig {
                nu,
                epsilon: 10f64.powf(log_eps),
                wavenumber,
                slices,
                method: OneStepMethod::ALL[method_idx],
                dt: 0.02,
                steps,
            };
            let trace = run(&toy_setup(&cfg).unwrap(), slices, 0.0, StopOn::None).unwrap();
            for k in 0..=slices {
                let closed = toy_error_after(&cfg, k).unwrap();
                prop_assert!((trace.norms[k].error_l2 - closed).abs() <= 1e-12 * cfg.epsilon.max(closed));
            }
        }
    }
}
