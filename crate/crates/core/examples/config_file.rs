//! Parse a multi-section config and run each section.

use parareal_core::experiments::{parse_config, run_experiment};

const CONFIG: &str = "
# shared by every section
n = 24
slices = 6

[heat-run]
m = 12, 23
nf = 5, ic = sine-pair

[toy-demo]
methods = trapezoidal
epsilon = 1e-2, 1e-4
";

fn main() -> parareal_core::Result<()> {
    for cfg in parse_config(CONFIG)? {
        let out = run_experiment(&cfg);
        println!("[{}] {} row error(s)", cfg.experiment.name(), out.failures.len());
        for t in &out.tables {
            println!("  {} ({} rows): {}", t.file_name(), t.rows.len(), t.header.join(","));
        }
    }
    Ok(())
}
