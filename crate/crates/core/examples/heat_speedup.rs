//! Heat equation: iterations needed to reach the discretisation error, and
//! the speedup that leaves.

use parareal_core::experiments::studies::run_case;
use parareal_core::experiments::{build_case, enumerate_cases, ExperimentConfig, ExperimentId};

fn main() -> parareal_core::Result<()> {
    let mut cfg = ExperimentConfig::defaults(ExperimentId::HeatRun);
    cfg.power_sweep = false;
    for case in enumerate_cases(&cfg) {
        let pipe = build_case(&cfg, &case)?;
        let s = run_case(&cfg, &case, &pipe)?;
        println!(
            "m={:<3} {:<9} disc={:.3e} K*={:?} speedup ≤ {:.2}  ‖E‖₂={:.4}",
            case.m,
            case.restriction.name(),
            s.disc_error.unwrap_or(f64::NAN),
            s.k_star,
            s.speedup.unwrap_or(f64::NAN),
            s.bounds.as_ref().map_or(f64::NAN, |b| b.report.norm2_e)
        );
        let errs: Vec<String> = s.trace.error_norms_l2().iter().map(|e| format!("{e:.1e}")).collect();
        println!("      ‖e^k‖₂: {}", errs.join(" "));
    }
    Ok(())
}
