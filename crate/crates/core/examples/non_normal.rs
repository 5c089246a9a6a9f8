//! Dirichlet advection-diffusion at P=40: diffusion decides how fast
//! Parareal reaches the discretisation error.

use parareal_core::experiments::{run_experiment, ExperimentConfig, ExperimentId};

fn main() {
    let cfg = ExperimentConfig::defaults(ExperimentId::NonNormalAdvectionDiffusion);
    let out = run_experiment(&cfg);
    let t = &out.tables[0];
    for row in &t.rows {
        let get = |name: &str| row[t.column(name).unwrap()].to_string();
        println!(
            "D={:<6} K*={:<3} iterations={:<3} disc={} growth={} normal={}",
            get("diffusivity"),
            get("k_star"),
            get("iterations"),
            get("disc_error"),
            get("transient_growth"),
            get("normal")
        );
    }
}
