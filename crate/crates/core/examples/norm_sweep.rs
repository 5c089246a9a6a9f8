//! A reduced norm sweep through the experiments API, written to CSV.

use parareal_core::experiments::{run_experiment, write_outputs, ExperimentConfig, ExperimentId};

fn main() -> parareal_core::Result<()> {
    let mut cfg = ExperimentConfig::defaults(ExperimentId::NormSweep);
    cfg.n = 32;
    cfg.m = vec![16, 31, 32];
    cfg.nf = vec![1, 4, 10];

    let out = run_experiment(&cfg);
    let table = &out.tables[0];
    let col = |name: &str| table.column(name).unwrap();
    for row in &table.rows {
        println!(
            "{:<9} {:<15} m={:<3} {:<9} nf={:<3} ‖E‖₂={:.4} single bound={:.4} {}",
            row[col("scheme")].to_string(),
            row[col("method")].to_string(),
            row[col("m")].to_string(),
            row[col("restriction")].to_string(),
            row[col("nf")].to_string(),
            row[col("norm2_e")].as_f64().unwrap_or(f64::NAN),
            row[col("single_bound")].as_f64().unwrap_or(f64::NAN),
            row[col("bound_check")]
        );
    }
    let dir = std::env::temp_dir().join("parareal-norm-sweep");
    for path in write_outputs(&cfg, &out, &dir, true, None)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
