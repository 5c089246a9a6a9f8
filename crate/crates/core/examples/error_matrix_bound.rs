//! Assemble E for one configuration and compare ‖E‖₂ with the lower bounds.

use parareal_core::analysis::{assemble_e, power_norm_sweep, check_bounds, BoundInputs, BoundReport};
use parareal_core::model::{build_system, Grid1D, Scheme};
use parareal_core::propagator::{build_propagator, OneStepMethod};
use parareal_core::transfer::{compose_coarse_propagator, TransferPair};

fn main() -> parareal_core::Result<()> {
    let (n, m, slices, steps) = (64, 63, 10, 4);
    let dt = 1.0 / (slices * steps) as f64;
    let method = OneStepMethod::Trapezoidal;
    let fine_grid = Grid1D::periodic(n, 2.0)?;
    let coarse_grid = Grid1D::periodic(m, 2.0)?;
    let a = build_system(fine_grid, Scheme::CenteredPeriodic, 1.0, 0.0)?;
    let fine = build_propagator(&a, dt, steps, method)?;
    let g_tilde = build_propagator(&build_system(coarse_grid, Scheme::CenteredPeriodic, 1.0, 0.0)?, dt, steps, method)?;
    let coarse = compose_coarse_propagator(&TransferPair::with_default_restriction(coarse_grid, fine_grid)?, &g_tilde)?;

    let e = assemble_e(fine.matrix(), &coarse, slices)?;
    let spectrum = a.spectrum()?;
    let report = BoundReport::compute(
        &e,
        &BoundInputs {
            spectrum: &spectrum,
            method,
            dt,
            steps,
            m,
            normal: a.is_normal(1e-10),
        },
    )?;
    println!("‖E‖₂           {:.6}", report.norm2_e);
    println!("‖E‖_∞          {:.6}", report.norm_inf_e);
    println!("‖F - G‖₂       {:.6}", report.norm2_b0);
    println!("single bound   {:.6}", report.single_bound);
    println!("sum bound      {:.6}", report.sum_bound);
    println!("general bound  {:.6}", report.general_bound);
    println!("|exp(λΔt)|     {:.6}", report.exact_decay);
    println!("rank(G) = {} (m = {m}), check: {}", report.rank_g, check_bounds(&report).label());

    println!("\n k  ‖E^k‖₂");
    for p in power_norm_sweep(&e, slices + 1)? {
        println!("{:2}  {:.3e}", p.k, p.norm2);
    }
    Ok(())
}
