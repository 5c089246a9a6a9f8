//! One-step integrators realized as dense matrices `R(δt A)^N`.

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::linalg::{self, real, CMat, CVec, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OneStepMethod {
    ImplicitEuler,
    Trapezoidal,
    ExactExponential,
}

impl OneStepMethod {
    pub const ALL: [OneStepMethod; 3] = [
        OneStepMethod::ImplicitEuler,
        OneStepMethod::Trapezoidal,
        OneStepMethod::ExactExponential,
    ];

    /// Classical order; `None` for the exact flow.
    pub fn order(self) -> Option<u32> {
        match self {
            OneStepMethod::ImplicitEuler => Some(1),
            OneStepMethod::Trapezoidal => Some(2),
            OneStepMethod::ExactExponential => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OneStepMethod::ImplicitEuler => "implicit-euler",
            OneStepMethod::Trapezoidal => "trapezoidal",
            OneStepMethod::ExactExponential => "exact",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }

    fn pole(self) -> Option<c64> {
        match self {
            OneStepMethod::ImplicitEuler => Some(real(1.0)),
            OneStepMethod::Trapezoidal => Some(real(2.0)),
            OneStepMethod::ExactExponential => None,
        }
    }
}

/// Amplification factor of one step applied to `y' = λ y` with `z = λ δt`.
pub fn stability_function(method: OneStepMethod, z: c64) -> Result<c64> {
    if let Some(pole) = method.pole() {
        if (z - pole).norm() <= f64::EPSILON * pole.norm() {
            return Err(Error::Singularity(z));
        }
    }
    Ok(match method {
        OneStepMethod::ImplicitEuler => ONE / (ONE - z),
        OneStepMethod::Trapezoidal => (ONE + z * 0.5) / (ONE - z * 0.5),
        OneStepMethod::ExactExponential => z.exp(),
    })
}

/// `R(λ δt)^N`.
pub fn stability_power(method: OneStepMethod, lambda: c64, dt: f64, steps: usize) -> Result<c64> {
    Ok(stability_function(method, lambda * dt)?.powi(steps as i32))
}

/// Dense time-slice propagator `R(δt A)^N`.
#[derive(Debug, Clone)]
pub struct Propagator {
    matrix: CMat,
    method: OneStepMethod,
    dt: f64,
    steps: usize,
}

impl Propagator {
    /// Wraps an explicitly given slice matrix (e.g. a coarse propagator in fine space).
    pub fn from_matrix(matrix: CMat, method: OneStepMethod, dt: f64, steps: usize) -> Result<Self> {
        linalg::check_square(&matrix, "propagator")?;
        Ok(Self {
            matrix,
            method,
            dt,
            steps,
        })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn method(&self) -> OneStepMethod {
        self.method
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Time covered by one application, `N·δt`.
    pub fn slice_length(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, y: &CVec) -> Result<CVec> {
        if y.nrows() != self.dim() {
            return Err(Error::Dimension(format!(
                "propagator of size {} applied to a vector of length {}",
                self.dim(),
                y.nrows()
            )));
        }
        Ok(&self.matrix * y)
    }
}

/// Matrix of a single step of `method` with step size `dt`.
pub fn single_step_matrix(a: &CMat, dt: f64, method: OneStepMethod) -> Result<CMat> {
    let n = linalg::check_square(a, "system matrix")?;
    let id = linalg::identity(n);
    match method {
        OneStepMethod::ImplicitEuler => linalg::inverse(&(&id - linalg::scaled(a, real(dt)))),
        OneStepMethod::Trapezoidal => {
            let half = linalg::scaled(a, real(0.5 * dt));
            let lhs = linalg::inverse(&(&id - &half))?;
            Ok(lhs * (&id + &half))
        }
        OneStepMethod::ExactExponential => exponential(a, dt),
    }
}

/// `V exp(Λ dt) V⁻¹` for diagonalizable `a`.
fn exponential(a: &CMat, dt: f64) -> Result<CMat> {
    let n = a.nrows();
    let diagonal = (0..n).all(|j| (0..n).all(|i| i == j || a[(i, j)] == ZERO));
    if diagonal {
        return Ok(Mat::from_fn(n, n, |i, j| if i == j { (a[(i, i)] * dt).exp() } else { ZERO }));
    }
    let (values, v) = linalg::eigen(a)?;
    let v_inv = linalg::inverse(&v)
        .map_err(|_| Error::Decomposition("matrix is not diagonalizable (singular eigenvector basis)".into()))?;
    let scale_cols = |d: &dyn Fn(c64) -> c64| {
        let mut m = v.clone();
        for (j, &l) in values.iter().enumerate() {
            let f = d(l);
            for i in 0..n {
                m[(i, j)] *= f;
            }
        }
        m
    };
    let reconstructed = scale_cols(&|l| l) * &v_inv;
    let scale = linalg::norm_fro(a).max(1.0);
    if linalg::norm_fro(&(&reconstructed - a)) > 1e-8 * scale {
        return Err(Error::Decomposition(
            "eigendecomposition does not reproduce the matrix; exact flow needs a diagonalizable operator".into(),
        ));
    }
    Ok(scale_cols(&|l| (l * dt).exp()) * &v_inv)
}

/// `R(dt·A)^N` as a dense matrix.
pub fn build_propagator_from_matrix(a: &CMat, dt: f64, steps: usize, method: OneStepMethod) -> Result<Propagator> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("need at least one step per slice".into()));
    }
    let step = single_step_matrix(a, dt, method)?;
    Propagator::from_matrix(linalg::matrix_power(&step, steps), method, dt, steps)
}

pub fn build_propagator(
    a: &crate::model::SystemMatrix,
    dt: f64,
    steps: usize,
    method: OneStepMethod,
) -> Result<Propagator> {
    build_propagator_from_matrix(a.entries(), dt, steps, method)
}

/// Zero propagator of size `n`, handy as a degenerate coarse level.
pub fn zero_propagator(n: usize, method: OneStepMethod, dt: f64, steps: usize) -> Propagator {
    Propagator {
        matrix: Mat::zeros(n, n),
        method,
        dt,
        steps,
    }
}
