//! Two-mode problem: the unresolved mode is carried one slice per iteration.

use parareal_core::parareal::{run, StopOn};
use parareal_core::propagator::OneStepMethod;
use parareal_core::toy::{toy_error_after, toy_error_matrix, toy_error_vs_discretisation_ratio, toy_setup, ToyConfig};

fn main() -> parareal_core::Result<()> {
    for (nu, method) in [
        (0.0, OneStepMethod::ExactExponential),
        (0.0, OneStepMethod::Trapezoidal),
        (1.0, OneStepMethod::ImplicitEuler),
    ] {
        let cfg = ToyConfig {
            nu,
            epsilon: 1e-3,
            method,
            ..ToyConfig::default()
        };
        let trace = run(&toy_setup(&cfg)?, cfg.slices, 0.0, StopOn::None)?;
        println!("ν={nu} {} ‖E‖₂={:.6}", method.name(), toy_error_matrix(&cfg)?.norm2()?);
        for k in 0..=cfg.slices {
            println!("  k={k} closed form {:.6e}  engine {:.6e}", toy_error_after(&cfg, k)?, trace.norms[k].error_l2);
        }
        match toy_error_vs_discretisation_ratio(&ToyConfig { epsilon: 1.0, ..cfg }) {
            Ok(r) => println!("  ‖e^(P-1)‖ / ‖e_disc‖ at ε=1: {r:.3e}"),
            Err(e) => println!("  ratio: {e}"),
        }
    }
    Ok(())
}
