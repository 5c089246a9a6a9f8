//! Reference solutions for measuring the fine solver's discretisation error.
//!
//! Periodic problems with Fourier data use the analytic solution. Dirichlet
//! problems have none, so the same scheme is rerun on a grid refined `r`
//! times with step `δt/r` and sampled at the coarse nodes. The Dirichlet
//! operators are tridiagonal, which keeps the refined run cheap.

use faer::c64;

use crate::error::{Error, Result};
use crate::linalg::{CVec, ONE};
use crate::model::{build_system, Grid1D, InitialCondition, Scheme};
use crate::propagator::OneStepMethod;

/// Bands of a tridiagonal matrix: `lower[i] = a[i+1][i]`, `upper[i] = a[i][i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<c64>,
    pub diag: Vec<c64>,
    pub upper: Vec<c64>,
}

impl Tridiagonal {
    /// Extract the bands, refusing matrices with entries outside them.
    pub fn from_dense(a: &crate::linalg::CMat) -> Result<Self> {
        let n = crate::linalg::check_square(a, "tridiagonal operator")?;
        for j in 0..n {
            for i in 0..n {
                if i.abs_diff(j) > 1 && a[(i, j)] != c64::new(0.0, 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({i}, {j}) lies outside the tridiagonal band"
                    )));
                }
            }
        }
        Ok(Self {
            lower: (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)]).collect(),
            diag: (0..n).map(|i| a[(i, i)]).collect(),
            upper: (0..n.saturating_sub(1)).map(|i| a[(i, i + 1)]).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `α I + β T`
    pub fn shifted(&self, alpha: c64, beta: c64) -> Self {
        Self {
            lower: self.lower.iter().map(|&x| x * beta).collect(),
            diag: self.diag.iter().map(|&x| alpha + x * beta).collect(),
            upper: self.upper.iter().map(|&x| x * beta).collect(),
        }
    }

    pub fn mul(&self, y: &[c64]) -> Vec<c64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * y[i];
                if i > 0 {
                    s += self.lower[i - 1] * y[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * y[i + 1];
                }
                s
            })
            .collect()
    }

    /// Thomas algorithm (no pivoting).
    pub fn solve(&self, rhs: &[c64]) -> Result<Vec<c64>> {
        let n = self.dim();
        let mut c = vec![c64::new(0.0, 0.0); n];
        let mut d = vec![c64::new(0.0, 0.0); n];
        for i in 0..n {
            let sub = if i > 0 { self.lower[i - 1] } else { c64::new(0.0, 0.0) };
            let denom = self.diag[i] - if i > 0 { sub * c[i - 1] } else { c64::new(0.0, 0.0) };
            if denom.norm() < 1e-300 {
                return Err(Error::SingularMatrix(format!("zero pivot at row {i} of tridiagonal solve")));
            }
            if i + 1 < n {
                c[i] = self.upper[i] / denom;
            }
            let prev = if i > 0 { sub * d[i - 1] } else { c64::new(0.0, 0.0) };
            d[i] = (rhs[i] - prev) / denom;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            let next = d[i + 1];
            d[i] -= c[i] * next;
        }
        Ok(d)
    }
}

/// Time-step `y' = T y` with a one-step method; the exact flow is replaced by
/// the trapezoidal rule.
pub fn integrate_tridiagonal(
    t: &Tridiagonal,
    y0: &[c64],
    dt: f64,
    steps: usize,
    method: OneStepMethod,
) -> Result<Vec<c64>> {
    let (implicit, explicit) = match method {
        OneStepMethod::ImplicitEuler => (t.shifted(ONE, c64::new(-dt, 0.0)), None),
        OneStepMethod::Trapezoidal | OneStepMethod::ExactExponential => (
            t.shifted(ONE, c64::new(-dt / 2.0, 0.0)),
            Some(t.shifted(ONE, c64::new(dt / 2.0, 0.0))),
        ),
    };
    let mut y = y0.to_vec();
    for _ in 0..steps {
        let rhs = match &explicit {
            Some(e) => e.mul(&y),
            None => y,
        };
        y = implicit.solve(&rhs)?;
    }
    Ok(y)
}

/// Parameters of a reference computation.
#[derive(Debug, Clone)]
pub struct ReferenceProblem<'a> {
    pub grid: Grid1D,
    pub scheme: Scheme,
    pub velocity: f64,
    pub diffusivity: f64,
    pub ic: &'a InitialCondition,
    pub method: OneStepMethod,
    pub dt: f64,
    /// Total fine steps to the final time.
    pub steps: usize,
    pub refinement: usize,
}

/// Solution on `grid` at `dt·steps`, or `None` when no reference is available
/// (periodic data without a closed form, spectral operators).
pub fn reference_solution(p: &ReferenceProblem) -> Result<Option<CVec>> {
    if p.scheme == Scheme::SpectralDiagonal {
        return Ok(None);
    }
    let t_end = p.dt * p.steps as f64;
    if p.grid.is_periodic() {
        let velocity = if p.scheme.is_advection() { p.velocity } else { 0.0 };
        return Ok(p.ic.exact_solution(&p.grid, t_end, velocity, p.diffusivity));
    }
    let r = p.refinement;
    if r == 0 {
        return Err(Error::InvalidParameter("refinement must be positive".into()));
    }
    let n = p.grid.n_points();
    let fine = Grid1D::dirichlet(r * (n + 1) - 1, p.grid.domain_length())?;
    let a = build_system(fine, p.scheme, p.velocity, p.diffusivity)?;
    let t = Tridiagonal::from_dense(a.entries())?;
    let y0: Vec<c64> = fine.nodes().into_iter().map(|x| p.ic.evaluate(x)).collect();
    let y = integrate_tridiagonal(&t, &y0, p.dt / r as f64, p.steps * r, p.method)?;
    Ok(Some(faer::Col::from_fn(n, |j| y[r * (j + 1) - 1])))
}
