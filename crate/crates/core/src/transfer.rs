//! Interpolation and restriction between a fine grid (n nodes) and a coarse
//! grid (m nodes), and the coarse propagator `G = I·G̃·R` in fine space.
//!
//! Positions are located with integer arithmetic so that coincident nodes are
//! detected exactly, not up to round-off.

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::model::Grid1D;
use crate::propagator::Propagator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RestrictionMode {
    /// Pick the fine value at each coarse node (nested grids only).
    Injection,
    /// Evaluate the piecewise-linear interpolant of the fine data at each coarse node.
    LinearResample,
}

impl RestrictionMode {
    pub fn name(self) -> &'static str {
        match self {
            RestrictionMode::Injection => "injection",
            RestrictionMode::LinearResample => "linear",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [RestrictionMode::Injection, RestrictionMode::LinearResample]
            .into_iter()
            .find(|m| m.name() == name)
    }
}

/// Position of target node `j` in the source index space as
/// `(whole, numerator, denominator)`, i.e. `whole + numerator/denominator`.
/// `whole` may be −1 for Dirichlet grids (left of the first interior node).
fn locate(source: &Grid1D, target: &Grid1D, j: usize) -> (i64, usize, usize) {
    let (ns, nt) = (source.n_points(), target.n_points());
    if source.is_periodic() {
        // x = j·L/nt, index = x/(L/ns)
        let num = j * ns;
        ((num / nt) as i64, num % nt, nt)
    } else {
        // x = (j+1)·L/(nt+1), index = x/(L/(ns+1)) − 1
        let num = (j + 1) * (ns + 1);
        ((num / (nt + 1)) as i64 - 1, num % (nt + 1), nt + 1)
    }
}

fn check_pair(coarse: &Grid1D, fine: &Grid1D) -> Result<()> {
    if !coarse.compatible_with(fine) {
        return Err(Error::GridMismatch(format!(
            "coarse grid (L={}, periodic={}) and fine grid (L={}, periodic={}) differ",
            coarse.domain_length(),
            coarse.is_periodic(),
            fine.domain_length(),
            fine.is_periodic()
        )));
    }
    if coarse.n_points() > fine.n_points() {
        return Err(Error::InvalidParameter(format!(
            "coarse grid has more nodes ({}) than the fine grid ({})",
            coarse.n_points(),
            fine.n_points()
        )));
    }
    Ok(())
}

/// Piecewise-linear resampling of data on `source` at the nodes of `target`
/// (`target.n × source.n`, rows sum to one). Periodic grids wrap around;
/// Dirichlet grids extrapolate linearly beyond the outermost source nodes.
pub fn linear_resample_matrix(source: &Grid1D, target: &Grid1D) -> Result<Mat<f64>> {
    if !source.compatible_with(target) {
        return Err(Error::GridMismatch("resampling between different domains".into()));
    }
    let (ns, nt) = (source.n_points(), target.n_points());
    let mut w = Mat::<f64>::zeros(nt, ns);
    for j in 0..nt {
        let (whole, num, den) = locate(source, target, j);
        if source.is_periodic() {
            let i = whole as usize % ns;
            let theta = num as f64 / den as f64;
            w[(j, i)] += 1.0 - theta;
            w[(j, (i + 1) % ns)] += theta;
        } else if ns == 1 {
            w[(j, 0)] = 1.0;
        } else {
            let left = whole.clamp(0, ns as i64 - 2);
            let theta = (whole - left) as f64 + num as f64 / den as f64;
            let left = left as usize;
            w[(j, left)] += 1.0 - theta;
            w[(j, left + 1)] += theta;
        }
    }
    Ok(w)
}

/// Coarse-to-fine linear interpolation (`n × m`).
pub fn build_linear_interpolation(coarse: &Grid1D, fine: &Grid1D) -> Result<Mat<f64>> {
    check_pair(coarse, fine)?;
    linear_resample_matrix(coarse, fine)
}

/// Whether every coarse node coincides with a fine node.
pub fn is_nested(coarse: &Grid1D, fine: &Grid1D) -> bool {
    coarse.compatible_with(fine) && (0..coarse.n_points()).all(|j| locate(fine, coarse, j).1 == 0)
}

/// Injection where the grids are nested, linear resampling otherwise.
pub fn default_restriction_mode(coarse: &Grid1D, fine: &Grid1D) -> RestrictionMode {
    if is_nested(coarse, fine) {
        RestrictionMode::Injection
    } else {
        RestrictionMode::LinearResample
    }
}

/// Fine-to-coarse restriction (`m × n`).
pub fn build_restriction(coarse: &Grid1D, fine: &Grid1D, mode: RestrictionMode) -> Result<Mat<f64>> {
    check_pair(coarse, fine)?;
    match mode {
        RestrictionMode::LinearResample => linear_resample_matrix(fine, coarse),
        RestrictionMode::Injection => {
            if !is_nested(coarse, fine) {
                return Err(Error::GridMismatch(format!(
                    "injection needs nested grids; {} coarse nodes do not all lie on {} fine nodes",
                    coarse.n_points(),
                    fine.n_points()
                )));
            }
            let mut r = Mat::<f64>::zeros(coarse.n_points(), fine.n_points());
            for j in 0..coarse.n_points() {
                let (whole, _, _) = locate(fine, coarse, j);
                r[(j, whole as usize % fine.n_points())] = 1.0;
            }
            Ok(r)
        }
    }
}

/// Interpolation and restriction between one fine and one coarse space.
#[derive(Debug, Clone)]
pub struct TransferPair {
    interpolation: Mat<f64>,
    restriction: Mat<f64>,
    fine_grid: Grid1D,
    coarse_grid: Grid1D,
    mode: Option<RestrictionMode>,
}

impl TransferPair {
    pub fn new(coarse: Grid1D, fine: Grid1D, mode: RestrictionMode) -> Result<Self> {
        Ok(Self {
            interpolation: build_linear_interpolation(&coarse, &fine)?,
            restriction: build_restriction(&coarse, &fine, mode)?,
            fine_grid: fine,
            coarse_grid: coarse,
            mode: Some(mode),
        })
    }

    /// Pair with the default restriction for these grids.
    pub fn with_default_restriction(coarse: Grid1D, fine: Grid1D) -> Result<Self> {
        Self::new(coarse, fine, default_restriction_mode(&coarse, &fine))
    }

    /// Pair from explicit matrices (`interpolation` is `n × m`, `restriction` is `m × n`).
    pub fn from_matrices(
        interpolation: Mat<f64>,
        restriction: Mat<f64>,
        coarse: Grid1D,
        fine: Grid1D,
    ) -> Result<Self> {
        let (n, m) = (fine.n_points(), coarse.n_points());
        if interpolation.shape() != (n, m) || restriction.shape() != (m, n) {
            return Err(Error::Dimension(format!(
                "transfer shapes {:?} and {:?} do not match n={n}, m={m}",
                interpolation.shape(),
                restriction.shape()
            )));
        }
        Ok(Self {
            interpolation,
            restriction,
            fine_grid: fine,
            coarse_grid: coarse,
            mode: None,
        })
    }

    pub fn interpolation(&self) -> &Mat<f64> {
        &self.interpolation
    }

    pub fn restriction(&self) -> &Mat<f64> {
        &self.restriction
    }

    pub fn fine_grid(&self) -> &Grid1D {
        &self.fine_grid
    }

    pub fn coarse_grid(&self) -> &Grid1D {
        &self.coarse_grid
    }

    /// `None` for pairs built from explicit matrices.
    pub fn restriction_mode(&self) -> Option<RestrictionMode> {
        self.mode
    }
}

/// `G = I·G̃·R`, the coarse propagator acting on fine-space vectors.
pub fn compose_coarse_propagator(pair: &TransferPair, g_tilde: &Propagator) -> Result<CMat> {
    let m = pair.coarse_grid.n_points();
    if g_tilde.dim() != m {
        return Err(Error::Dimension(format!(
            "coarse propagator is {0}x{0} but the coarse grid has {m} nodes",
            g_tilde.dim()
        )));
    }
    let i = linalg::complexify(&pair.interpolation);
    let r = linalg::complexify(&pair.restriction);
    Ok(i * g_tilde.matrix() * r)
}
