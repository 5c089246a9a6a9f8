//! Spectra and normality of the model operators.

use parareal_core::model::{build_system, Grid1D, Scheme};

fn main() -> parareal_core::Result<()> {
    let n = 16;
    for (scheme, diffusivity) in [
        (Scheme::UpwindPeriodic, 0.0),
        (Scheme::CenteredPeriodic, 0.0),
        (Scheme::HeatCentered, 1.0),
        (Scheme::UpwindDirichlet, 0.0),
        (Scheme::CenteredDirichlet, 0.1),
    ] {
        let grid = Grid1D::new(n, 2.0, scheme.periodicity().unwrap_or(true))?;
        let a = build_system(grid, scheme, 1.0, diffusivity)?;
        let spectrum = a.spectrum()?;
        let max_re = spectrum.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        println!(
            "{:<20} normal={:<5} |λ|max={:9.3} max Re λ={:+.2e}",
            scheme.name(),
            a.is_normal(1e-10),
            spectrum[0].norm(),
            max_re
        );
        for l in spectrum.iter().take(3) {
            println!("    λ = {:+.4} {:+.4}i", l.re, l.im);
        }
    }
    Ok(())
}
