//! The Parareal iteration over `P` time slices with dense propagators.
//!
//! Fine-propagator applications within one iteration are independent and run
//! on the rayon pool; the coarse sweep is sequential. Each block is a plain
//! matrix-vector product, so results do not depend on the thread count.

use faer::Col;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::propagator::Propagator;

/// States at the `P+1` slice boundaries `t_0, …, t_P`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeVector {
    blocks: Vec<CVec>,
}

impl CompositeVector {
    pub fn new(blocks: Vec<CVec>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::Dimension("composite vector needs at least one block".into()));
        };
        let n = first.nrows();
        if let Some(bad) = blocks.iter().position(|b| b.nrows() != n) {
            return Err(Error::Dimension(format!(
                "block {bad} has length {}, expected {n}",
                blocks[bad].nrows()
            )));
        }
        Ok(Self { blocks })
    }

    pub fn zeros(slices: usize, n: usize) -> Self {
        Self {
            blocks: vec![Col::zeros(n); slices + 1],
        }
    }

    /// Stacked vector of length `(P+1)·n` split into `P+1` blocks.
    pub fn from_stacked(v: &CVec, slices: usize) -> Result<Self> {
        let len = v.nrows();
        if len % (slices + 1) != 0 {
            return Err(Error::Dimension(format!(
                "length {len} is not a multiple of {}",
                slices + 1
            )));
        }
        let n = len / (slices + 1);
        Ok(Self {
            blocks: (0..=slices).map(|j| Col::from_fn(n, |i| v[j * n + i])).collect(),
        })
    }

    pub fn to_stacked(&self) -> CVec {
        let n = self.dim();
        Col::from_fn(self.blocks.len() * n, |k| self.blocks[k / n][k % n])
    }

    pub fn slices(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.blocks[0].nrows()
    }

    pub fn block(&self, j: usize) -> &CVec {
        &self.blocks[j]
    }

    pub fn blocks(&self) -> &[CVec] {
        &self.blocks
    }

    /// Euclidean norm of the stacked vector.
    pub fn norm2(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_l2().powi(2)).sum::<f64>().sqrt()
    }

    /// Largest entry modulus over all blocks.
    pub fn norm_inf(&self) -> f64 {
        self.blocks.iter().map(linalg::vec_norm_inf).fold(0.0, f64::max)
    }

    /// Blockwise `self − other`.
    pub fn sub(&self, other: &CompositeVector) -> Result<CompositeVector> {
        if self.blocks.len() != other.blocks.len() || self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "composite shapes differ: {}x{} vs {}x{}",
                self.blocks.len(),
                self.dim(),
                other.blocks.len(),
                other.dim()
            )));
        }
        Ok(CompositeVector {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect(),
        })
    }
}

/// Everything a Parareal run needs: `F`, `G` (both acting on fine space),
/// the number of slices and the initial state.
#[derive(Debug, Clone)]
pub struct PararealSetup {
    fine: Propagator,
    coarse: CMat,
    slices: usize,
    initial_state: CVec,
    total_time: f64,
}

impl PararealSetup {
    pub fn new(fine: Propagator, coarse: CMat, slices: usize, initial_state: CVec, total_time: f64) -> Result<Self> {
        let n = fine.dim();
        if coarse.nrows() != n || coarse.ncols() != n {
            return Err(Error::Dimension(format!(
                "coarse propagator is {}x{}, fine is {n}x{n}",
                coarse.nrows(),
                coarse.ncols()
            )));
        }
        if initial_state.nrows() != n {
            return Err(Error::Dimension(format!(
                "initial state has length {}, expected {n}",
                initial_state.nrows()
            )));
        }
        if slices == 0 {
            return Err(Error::InvalidParameter("need at least one time slice".into()));
        }
        let slice_length = total_time / slices as f64;
        if (fine.slice_length() - slice_length).abs() > 1e-12 * total_time.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "fine propagator covers {} per slice, but T/P = {slice_length}",
                fine.slice_length()
            )));
        }
        Ok(Self {
            fine,
            coarse,
            slices,
            initial_state,
            total_time,
        })
    }

    pub fn fine(&self) -> &Propagator {
        &self.fine
    }

    pub fn coarse(&self) -> &CMat {
        &self.coarse
    }

    pub fn slices(&self) -> usize {
        self.slices
    }

    pub fn initial_state(&self) -> &CVec {
        &self.initial_state
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn slice_length(&self) -> f64 {
        self.total_time / self.slices as f64
    }

    pub fn dim(&self) -> usize {
        self.initial_state.nrows()
    }

    fn serial(&self, op: &CMat) -> CompositeVector {
        let mut blocks = Vec::with_capacity(self.slices + 1);
        blocks.push(self.initial_state.clone());
        for j in 0..self.slices {
            let next = op * &blocks[j];
            blocks.push(next);
        }
        CompositeVector { blocks }
    }
}

/// Sequential fine run `y_{j+1} = F y_j`.
pub fn fine_serial_solve(setup: &PararealSetup) -> CompositeVector {
    setup.serial(setup.fine.matrix())
}

/// Sequential coarse run `y_{j+1} = G y_j`.
pub fn coarse_serial_solve(setup: &PararealSetup) -> CompositeVector {
    setup.serial(&setup.coarse)
}

/// One Parareal update `y^{k+1}_{j+1} = G y^{k+1}_j + F y^k_j − G y^k_j`.
pub fn parareal_iterate(setup: &PararealSetup, prev: &CompositeVector) -> Result<CompositeVector> {
    if prev.slices() != setup.slices || prev.dim() != setup.dim() {
        return Err(Error::Dimension(format!(
            "iterate has {} slices of size {}, setup has {} of size {}",
            prev.slices(),
            prev.dim(),
            setup.slices,
            setup.dim()
        )));
    }
    let f = setup.fine.matrix();
    let g = &setup.coarse;
    let corrections: Vec<CVec> = prev.blocks[..setup.slices]
        .par_iter()
        .map(|y| f * y - g * y)
        .collect();
    let mut blocks = Vec::with_capacity(setup.slices + 1);
    blocks.push(prev.blocks[0].clone());
    for (j, c) in corrections.iter().enumerate() {
        let next = g * &blocks[j] + c;
        blocks.push(next);
    }
    Ok(CompositeVector { blocks })
}

/// Which quantity terminates a run early.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopOn {
    /// `‖Δ^k‖_∞ < tol`
    Increment,
    /// `‖e^{k+1}‖_∞ < tol`
    Error,
    /// Always run `k_max` iterations.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitialGuess {
    /// Serial coarse run.
    CoarseRun,
    /// Initial state in block 0, zeros elsewhere.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub k_max: usize,
    pub stop_tol: f64,
    pub stop_on: StopOn,
    pub initial_guess: InitialGuess,
}

impl RunOptions {
    pub fn new(k_max: usize, stop_tol: f64, stop_on: StopOn) -> Self {
        Self {
            k_max,
            stop_tol,
            stop_on,
            initial_guess: InitialGuess::CoarseRun,
        }
    }
}

/// Norms recorded for iterate `k`. Increment norms refer to `Δ^k` and are
/// absent for the final iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationNorms {
    pub k: usize,
    pub error_l2: f64,
    pub error_inf: f64,
    pub increment_l2: Option<f64>,
    pub increment_inf: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunTrace {
    pub iterates: Vec<CompositeVector>,
    /// `e^k = y_f − y^k`
    pub errors: Vec<CompositeVector>,
    /// `Δ^k = y^{k+1} − y^k`
    pub increments: Vec<CompositeVector>,
    pub norms: Vec<IterationNorms>,
    pub fine_solution: CompositeVector,
    /// Stopping criterion met (as opposed to running out of iterations).
    pub converged: bool,
}

impl RunTrace {
    pub fn iterations(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn error_norms_l2(&self) -> Vec<f64> {
        self.norms.iter().map(|r| r.error_l2).collect()
    }

    pub fn reached_k_max(&self) -> bool {
        !self.converged
    }
}

/// Iterate from the coarse initial guess until `stop_on` drops below
/// `stop_tol` (checked after each iteration) or `k_max` iterations are done.
pub fn run(setup: &PararealSetup, k_max: usize, stop_tol: f64, stop_on: StopOn) -> Result<RunTrace> {
    run_with(setup, RunOptions::new(k_max, stop_tol, stop_on))
}

pub fn run_with(setup: &PararealSetup, options: RunOptions) -> Result<RunTrace> {
    if options.k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    let fine_solution = fine_serial_solve(setup);
    let first = match options.initial_guess {
        InitialGuess::CoarseRun => coarse_serial_solve(setup),
        InitialGuess::Zero => {
            let mut z = CompositeVector::zeros(setup.slices, setup.dim());
            z.blocks[0] = setup.initial_state.clone();
            z
        }
    };
    let mut errors = vec![fine_solution.sub(&first)?];
    let mut iterates = vec![first];
    let mut increments = Vec::new();
    let mut converged = false;
    for _ in 0..options.k_max {
        let current = iterates.last().expect("nonempty");
        let next = parareal_iterate(setup, current)?;
        let increment = next.sub(current)?;
        let error = fine_solution.sub(&next)?;
        let monitor = match options.stop_on {
            StopOn::Increment => Some(increment.norm_inf()),
            StopOn::Error => Some(error.norm_inf()),
            StopOn::None => None,
        };
        increments.push(increment);
        errors.push(error);
        iterates.push(next);
        if monitor.is_some_and(|v| v < options.stop_tol) {
            converged = true;
            break;
        }
    }
    let norms = errors
        .iter()
        .enumerate()
        .map(|(k, e)| IterationNorms {
            k,
            error_l2: e.norm2(),
            error_inf: e.norm_inf(),
            increment_l2: increments.get(k).map(CompositeVector::norm2),
            increment_inf: increments.get(k).map(CompositeVector::norm_inf),
        })
        .collect();
    Ok(RunTrace {
        iterates,
        errors,
        increments,
        norms,
        fine_solution,
        converged,
    })
}
