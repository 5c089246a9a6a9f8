//! Parareal on periodic advection: error and increment per iteration.

use parareal_core::model::{build_system, sample_initial_condition, Grid1D, InitialCondition, Scheme};
use parareal_core::parareal::{run, PararealSetup, StopOn};
use parareal_core::propagator::{build_propagator, OneStepMethod};
use parareal_core::transfer::{compose_coarse_propagator, TransferPair};

fn main() -> parareal_core::Result<()> {
    let (n, m, slices, steps) = (64, 32, 10, 10);
    let t_end = 1.0;
    let dt = t_end / (slices * steps) as f64;
    let fine_grid = Grid1D::periodic(n, 2.0)?;
    let coarse_grid = Grid1D::periodic(m, 2.0)?;

    let method = OneStepMethod::ImplicitEuler;
    let fine = build_propagator(&build_system(fine_grid, Scheme::UpwindPeriodic, 1.0, 0.0)?, dt, steps, method)?;
    let g_tilde = build_propagator(&build_system(coarse_grid, Scheme::UpwindPeriodic, 1.0, 0.0)?, dt, steps, method)?;
    let coarse = compose_coarse_propagator(&TransferPair::with_default_restriction(coarse_grid, fine_grid)?, &g_tilde)?;

    let y0 = sample_initial_condition(&InitialCondition::standard_gaussian(), &fine_grid);
    let setup = PararealSetup::new(fine, coarse, slices, y0, t_end)?;
    let trace = run(&setup, slices, 1e-6, StopOn::Increment)?;

    println!(" k   ‖e^k‖₂      ‖Δ^k‖_∞");
    for row in &trace.norms {
        let inc = row.increment_inf.map_or("-".to_string(), |v| format!("{v:.3e}"));
        println!("{:2}   {:.3e}   {inc}", row.k, row.error_l2);
    }
    println!("converged: {} after {} iterations", trace.converged, trace.iterations());
    Ok(())
}
