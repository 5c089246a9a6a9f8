//! Stability functions on the imaginary axis and the order of the slice error.

use parareal_core::c64;
use parareal_core::propagator::{stability_function, stability_power, OneStepMethod};

fn main() -> parareal_core::Result<()> {
    println!("|R(iy)| for y = 0.5, 2, 8");
    for method in OneStepMethod::ALL {
        let values: Vec<String> = [0.5, 2.0, 8.0]
            .iter()
            .map(|&y| format!("{:.6}", stability_function(method, c64::new(0.0, y)).unwrap().norm()))
            .collect();
        println!("  {:<15} {}", method.name(), values.join("  "));
    }

    // error of R(λδt)^N against exp(λΔt) with Δt = Nδt fixed
    let lambda = c64::new(-1.0, 2.0);
    let slice = 0.5;
    let exact = (lambda * slice).exp();
    println!("\n|R(λδt)^N - exp(λΔt)|, λ = -1+2i, Δt = {slice}");
    for method in [OneStepMethod::ImplicitEuler, OneStepMethod::Trapezoidal] {
        let mut prev: Option<f64> = None;
        for steps in [8, 16, 32, 64, 128] {
            let err = (stability_power(method, lambda, slice / steps as f64, steps)? - exact).norm();
            let rate = prev.map_or(String::new(), |p| format!("  observed order {:.2}", (p / err).log2()));
            println!("  {:<15} N={steps:<4} {err:.3e}{rate}", method.name());
            prev = Some(err);
        }
    }
    Ok(())
}
