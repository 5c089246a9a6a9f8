//! Coarse propagators built through a coarse grid have rank at most m.

use parareal_core::linalg;
use parareal_core::model::{build_system, Grid1D, Scheme};
use parareal_core::propagator::{build_propagator, OneStepMethod};
use parareal_core::transfer::{compose_coarse_propagator, RestrictionMode, TransferPair};

fn main() -> parareal_core::Result<()> {
    let n = 32;
    let fine = Grid1D::periodic(n, 2.0)?;
    for m in [8, 16, 31, 32] {
        let coarse = Grid1D::periodic(m, 2.0)?;
        for mode in [RestrictionMode::Injection, RestrictionMode::LinearResample] {
            let Ok(pair) = TransferPair::new(coarse, fine, mode) else {
                println!("m={m:<3} {:<10} not available (grids not nested)", mode.name());
                continue;
            };
            let a = build_system(coarse, Scheme::UpwindPeriodic, 1.0, 0.0)?;
            let g_tilde = build_propagator(&a, 0.01, 10, OneStepMethod::ImplicitEuler)?;
            let g = compose_coarse_propagator(&pair, &g_tilde)?;
            let ri = linalg::complexify(&(pair.restriction() * pair.interpolation()));
            println!(
                "m={m:<3} {:<10} rank(G)={:<3} ‖RI - I‖_F={:.1e}",
                mode.name(),
                linalg::numerical_rank(&g, 1e-10)?,
                linalg::norm_fro(&(ri - linalg::identity(m)))
            );
        }
    }
    Ok(())
}
