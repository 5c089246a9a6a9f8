//! Semi-discrete linear model problems `y' = A y` in one space dimension.
//!
//! Periodic finite-difference operators are circulant (and therefore normal);
//! the Dirichlet operators are the non-normal counterparts used to probe what
//! happens outside the normal-matrix setting.

use std::f64::consts::PI;

use faer::{c64, Col, Mat};

use crate::error::{Error, Result};
use crate::linalg::{self, real, CMat, CVec, ZERO};

/// Uniform 1-D grid on `[0, domain_length]`.
///
/// Periodic grids place `n` nodes at `j·dx` with `dx = L/n`. Dirichlet grids
/// hold only interior nodes at `(j+1)·dx` with `dx = L/(n+1)`; the boundary
/// values are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n_points: usize,
    domain_length: f64,
    periodic: bool,
}

impl Grid1D {
    pub fn new(n_points: usize, domain_length: f64, periodic: bool) -> Result<Self> {
        if n_points == 0 {
            return Err(Error::InvalidParameter("grid needs at least one node".into()));
        }
        if !(domain_length > 0.0) || !domain_length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "domain length must be positive, got {domain_length}"
            )));
        }
        Ok(Self {
            n_points,
            domain_length,
            periodic,
        })
    }

    pub fn periodic(n_points: usize, domain_length: f64) -> Result<Self> {
        Self::new(n_points, domain_length, true)
    }

    pub fn dirichlet(n_points: usize, domain_length: f64) -> Result<Self> {
        Self::new(n_points, domain_length, false)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn dx(&self) -> f64 {
        if self.periodic {
            self.domain_length / self.n_points as f64
        } else {
            self.domain_length / (self.n_points + 1) as f64
        }
    }

    pub fn node(&self, j: usize) -> f64 {
        if self.periodic {
            j as f64 * self.dx()
        } else {
            (j + 1) as f64 * self.dx()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.node(j)).collect()
    }

    /// Same domain and boundary treatment (node counts may differ).
    pub fn compatible_with(&self, other: &Grid1D) -> bool {
        self.periodic == other.periodic
            && (self.domain_length - other.domain_length).abs()
                <= 1e-12 * self.domain_length.max(other.domain_length)
    }
}

/// Spatial discretisation that produced a [`SystemMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// First-order upwind advection, periodic.
    UpwindPeriodic,
    /// Second-order centered advection, periodic.
    CenteredPeriodic,
    /// First-order upwind advection with a zero inflow value at `x = 0`.
    UpwindDirichlet,
    /// Centered advection with a zero inflow value at `x = 0` and a
    /// one-sided upwind row at the outflow node.
    CenteredDirichlet,
    /// Second difference for `u_t = ν u_xx`; periodic or zero Dirichlet values,
    /// following the grid.
    HeatCentered,
    /// Diagonal operator given directly by its spectrum.
    SpectralDiagonal,
}

impl Scheme {
    pub const ADVECTION: [Scheme; 4] = [
        Scheme::UpwindPeriodic,
        Scheme::CenteredPeriodic,
        Scheme::UpwindDirichlet,
        Scheme::CenteredDirichlet,
    ];

    pub fn is_advection(self) -> bool {
        Self::ADVECTION.contains(&self)
    }

    /// Required grid periodicity, if the scheme fixes one.
    pub fn periodicity(self) -> Option<bool> {
        match self {
            Scheme::UpwindPeriodic | Scheme::CenteredPeriodic => Some(true),
            Scheme::UpwindDirichlet | Scheme::CenteredDirichlet => Some(false),
            Scheme::HeatCentered | Scheme::SpectralDiagonal => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::UpwindPeriodic => "upwind",
            Scheme::CenteredPeriodic => "centered",
            Scheme::UpwindDirichlet => "upwind-dirichlet",
            Scheme::CenteredDirichlet => "centered-dirichlet",
            Scheme::HeatCentered => "heat",
            Scheme::SpectralDiagonal => "spectral",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            Scheme::UpwindPeriodic,
            Scheme::CenteredPeriodic,
            Scheme::UpwindDirichlet,
            Scheme::CenteredDirichlet,
            Scheme::HeatCentered,
            Scheme::SpectralDiagonal,
        ]
        .into_iter()
        .find(|s| s.name() == name)
    }
}

/// Dense system matrix `A` together with how it was built.
#[derive(Debug, Clone)]
pub struct SystemMatrix {
    entries: CMat,
    scheme: Scheme,
    grid: Grid1D,
    velocity: f64,
    diffusivity: f64,
}

impl SystemMatrix {
    /// Diagonal operator with the given eigenvalues (spectral discretisations).
    pub fn diagonal(eigenvalues: &[c64], grid: Grid1D) -> Result<Self> {
        if eigenvalues.len() != grid.n_points() {
            return Err(Error::Dimension(format!(
                "{} eigenvalues for a grid of {} points",
                eigenvalues.len(),
                grid.n_points()
            )));
        }
        let n = eigenvalues.len();
        let entries = Mat::from_fn(n, n, |i, j| if i == j { eigenvalues[i] } else { ZERO });
        Ok(Self {
            entries,
            scheme: Scheme::SpectralDiagonal,
            grid,
            velocity: 0.0,
            diffusivity: 0.0,
        })
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    pub fn diffusivity(&self) -> f64 {
        self.diffusivity
    }

    /// Periodic finite-difference operators are circulant.
    pub fn is_circulant(&self) -> bool {
        self.grid.is_periodic() && self.scheme != Scheme::SpectralDiagonal
    }

    pub fn first_column(&self) -> Vec<c64> {
        (0..self.dim()).map(|i| self.entries[(i, 0)]).collect()
    }

    /// Eigenvalues sorted by decreasing modulus (ties: decreasing real part,
    /// then decreasing imaginary part). Circulant operators use the DFT
    /// formula, diagonal ones read the diagonal, anything else goes through
    /// the dense eigensolver.
    pub fn spectrum(&self) -> Result<Vec<c64>> {
        if self.is_circulant() {
            return circulant_eigenvalues(&self.first_column());
        }
        let mut values = if self.scheme == Scheme::SpectralDiagonal {
            (0..self.dim()).map(|i| self.entries[(i, i)]).collect()
        } else {
            linalg::eigenvalues(&self.entries)?
        };
        linalg::sort_spectrum(&mut values);
        Ok(values)
    }

    pub fn is_normal(&self, tol: f64) -> bool {
        is_normal(&self.entries, tol)
    }
}

fn check_advection(grid: &Grid1D, scheme: Scheme) -> Result<()> {
    let Some(periodic) = scheme.periodicity().filter(|_| scheme.is_advection()) else {
        return Err(Error::InvalidParameter(format!(
            "{} is not an advection scheme",
            scheme.name()
        )));
    };
    if grid.is_periodic() != periodic {
        return Err(Error::GridMismatch(format!(
            "scheme {} needs a {} grid",
            scheme.name(),
            if periodic { "periodic" } else { "Dirichlet" }
        )));
    }
    if matches!(scheme, Scheme::CenteredPeriodic | Scheme::CenteredDirichlet) && grid.n_points() < 2 {
        return Err(Error::InvalidParameter("centered differences need at least two nodes".into()));
    }
    Ok(())
}

fn advection_entries(grid: &Grid1D, scheme: Scheme, velocity: f64) -> Mat<f64> {
    let n = grid.n_points();
    let c = velocity / grid.dx();
    let mut a = Mat::<f64>::zeros(n, n);
    match scheme {
        Scheme::UpwindPeriodic => {
            for j in 0..n {
                a[(j, j)] -= c;
                a[(j, (j + n - 1) % n)] += c;
            }
        }
        Scheme::CenteredPeriodic => {
            for j in 0..n {
                a[(j, (j + 1) % n)] -= 0.5 * c;
                a[(j, (j + n - 1) % n)] += 0.5 * c;
            }
        }
        Scheme::UpwindDirichlet => {
            for j in 0..n {
                a[(j, j)] -= c;
                if j > 0 {
                    a[(j, j - 1)] += c;
                }
            }
        }
        Scheme::CenteredDirichlet => {
            for j in 0..n - 1 {
                a[(j, j + 1)] -= 0.5 * c;
                if j > 0 {
                    a[(j, j - 1)] += 0.5 * c;
                }
            }
            let last = n - 1;
            a[(last, last)] -= c;
            if last > 0 {
                a[(last, last - 1)] += c;
            }
        }
        Scheme::HeatCentered | Scheme::SpectralDiagonal => unreachable!("checked by caller"),
    }
    a
}

fn diffusion_entries(grid: &Grid1D, diffusivity: f64) -> Mat<f64> {
    let n = grid.n_points();
    let c = diffusivity / (grid.dx() * grid.dx());
    let mut a = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        a[(j, j)] -= 2.0 * c;
        if grid.is_periodic() {
            a[(j, (j + 1) % n)] += c;
            a[(j, (j + n - 1) % n)] += c;
        } else {
            if j + 1 < n {
                a[(j, j + 1)] += c;
            }
            if j > 0 {
                a[(j, j - 1)] += c;
            }
        }
    }
    a
}

/// Operator for `u_t + velocity·u_x = 0` under the named stencil.
pub fn build_advection_matrix(grid: Grid1D, scheme: Scheme, velocity: f64) -> Result<SystemMatrix> {
    build_advection_diffusion_matrix(grid, scheme, velocity, 0.0)
}

/// Operator for `u_t = diffusivity·u_xx` (centered second difference).
pub fn build_heat_matrix(grid: Grid1D, diffusivity: f64) -> Result<SystemMatrix> {
    if !(diffusivity >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "diffusivity must be nonnegative, got {diffusivity}"
        )));
    }
    Ok(SystemMatrix {
        entries: linalg::complexify(&diffusion_entries(&grid, diffusivity)),
        scheme: Scheme::HeatCentered,
        grid,
        velocity: 0.0,
        diffusivity,
    })
}

/// Sum of the advection operator and the centered diffusion operator.
pub fn build_advection_diffusion_matrix(
    grid: Grid1D,
    scheme: Scheme,
    velocity: f64,
    diffusivity: f64,
) -> Result<SystemMatrix> {
    check_advection(&grid, scheme)?;
    if !(diffusivity >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "diffusivity must be nonnegative, got {diffusivity}"
        )));
    }
    let mut a = advection_entries(&grid, scheme, velocity);
    if diffusivity > 0.0 {
        a = a + diffusion_entries(&grid, diffusivity);
    }
    Ok(SystemMatrix {
        entries: linalg::complexify(&a),
        scheme,
        grid,
        velocity,
        diffusivity,
    })
}

/// Build any finite-difference operator from its scheme.
pub fn build_system(grid: Grid1D, scheme: Scheme, velocity: f64, diffusivity: f64) -> Result<SystemMatrix> {
    match scheme {
        Scheme::HeatCentered => build_heat_matrix(grid, diffusivity),
        Scheme::SpectralDiagonal => Err(Error::InvalidParameter(
            "spectral operators are built from their eigenvalues".into(),
        )),
        _ => build_advection_diffusion_matrix(grid, scheme, velocity, diffusivity),
    }
}

/// Eigenvalues `λ_k = Σ_j c_j exp(2πi·jk/n)` of the circulant matrix with first
/// column `c`, sorted like [`SystemMatrix::spectrum`].
pub fn circulant_eigenvalues(first_column: &[c64]) -> Result<Vec<c64>> {
    let n = first_column.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty circulant column".into()));
    }
    let mut values: Vec<c64> = (0..n)
        .map(|k| {
            first_column
                .iter()
                .enumerate()
                .map(|(j, &c)| {
                    // reduce jk mod n first so the angle stays small
                    let phase = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    c * c64::new(phase.cos(), phase.sin())
                })
                .sum()
        })
        .collect();
    linalg::sort_spectrum(&mut values);
    Ok(values)
}

/// `‖A A* − A* A‖_F ≤ tol·‖A‖_F²`.
pub fn is_normal(a: &CMat, tol: f64) -> bool {
    let adj = a.adjoint().to_owned();
    let commutator = a * &adj - &adj * a;
    let scale = linalg::norm_fro(a).powi(2);
    linalg::norm_fro(&commutator) <= tol * scale
}

/// One `amplitude·sin(wavenumber·π·x)` term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineMode {
    pub wavenumber: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone)]
pub enum InitialCondition {
    /// `exp(−(x−center)²/width²)`
    Gaussian { center: f64, width: f64 },
    /// `Σ a_k sin(k·π·x)`
    SineSum { modes: Vec<SineMode> },
    /// `exp(i x) + ε exp(i L x)`
    SinglePlusHigh { epsilon: f64, high_wavenumber: f64 },
    /// Arbitrary pointwise profile.
    Custom(fn(f64) -> c64),
}

impl InitialCondition {
    /// `sin(πx) + sin(24πx)`
    pub fn sine_pair() -> Self {
        Self::SineSum {
            modes: vec![
                SineMode {
                    wavenumber: 1.0,
                    amplitude: 1.0,
                },
                SineMode {
                    wavenumber: 24.0,
                    amplitude: 1.0,
                },
            ],
        }
    }

    /// `sin(kπx)`
    pub fn single_sine(wavenumber: f64) -> Self {
        Self::SineSum {
            modes: vec![SineMode {
                wavenumber,
                amplitude: 1.0,
            }],
        }
    }

    /// `Σ_{k=1}^{count} sin(kπx)/k²`
    pub fn decaying_sine_series(count: usize) -> Self {
        Self::SineSum {
            modes: (1..=count)
                .map(|k| SineMode {
                    wavenumber: k as f64,
                    amplitude: 1.0 / (k * k) as f64,
                })
                .collect(),
        }
    }

    /// `exp(−(x−1)²/0.25²)`
    pub fn standard_gaussian() -> Self {
        Self::Gaussian {
            center: 1.0,
            width: 0.25,
        }
    }

    pub fn evaluate(&self, x: f64) -> c64 {
        match self {
            Self::Gaussian { center, width } => real((-((x - center) / width).powi(2)).exp()),
            Self::SineSum { modes } => real(
                modes
                    .iter()
                    .map(|m| m.amplitude * (m.wavenumber * PI * x).sin())
                    .sum(),
            ),
            Self::SinglePlusHigh {
                epsilon,
                high_wavenumber,
            } => c64::new(x.cos(), x.sin()) + c64::new(0.0, high_wavenumber * x).exp() * *epsilon,
            Self::Custom(f) => f(x),
        }
    }

    /// Exact solution of `u_t + velocity·u_x = diffusivity·u_xx` at time `t`
    /// on a periodic grid, for the Fourier-type profiles whose modes are
    /// periodic on the domain. `None` otherwise.
    pub fn exact_solution(&self, grid: &Grid1D, t: f64, velocity: f64, diffusivity: f64) -> Option<CVec> {
        if !grid.is_periodic() {
            return None;
        }
        let periodic_on_domain = |angular: f64| {
            let turns = angular * grid.domain_length() / (2.0 * PI);
            (turns - turns.round()).abs() < 1e-9
        };
        match self {
            Self::SineSum { modes } => {
                if !modes.iter().all(|m| periodic_on_domain(m.wavenumber * PI)) {
                    return None;
                }
                Some(Col::from_fn(grid.n_points(), |j| {
                    let x = grid.node(j);
                    real(
                        modes
                            .iter()
                            .map(|m| {
                                let k = m.wavenumber * PI;
                                m.amplitude * (k * (x - velocity * t)).sin() * (-diffusivity * k * k * t).exp()
                            })
                            .sum(),
                    )
                }))
            }
            Self::SinglePlusHigh {
                epsilon,
                high_wavenumber,
            } => {
                if !periodic_on_domain(1.0) || !periodic_on_domain(*high_wavenumber) {
                    return None;
                }
                let mode = |k: f64, x: f64| {
                    c64::new(0.0, k * (x - velocity * t)).exp() * (-diffusivity * k * k * t).exp()
                };
                Some(Col::from_fn(grid.n_points(), |j| {
                    let x = grid.node(j);
                    mode(1.0, x) + mode(*high_wavenumber, x) * *epsilon
                }))
            }
            _ => None,
        }
    }
}

/// Pointwise evaluation of the profile at the grid nodes.
pub fn sample_initial_condition(ic: &InitialCondition, grid: &Grid1D) -> CVec {
    Col::from_fn(grid.n_points(), |j| ic.evaluate(grid.node(j)))
}
