//! Configured parameter sweeps and their CSV output.
//!
//! [`run_experiment`] evaluates a configuration into tables;
//! [`write_outputs`] writes one CSV per table, an optional gnuplot script per
//! CSV and a `.meta` sidecar describing the run.

pub mod config;
pub mod output;
pub mod reference;
pub mod studies;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub use config::{parse_config, CoarseSteps, ExperimentConfig, ExperimentId, InitialSpec, Pairing, RestrictionChoice};
pub use output::{emit_csv, emit_plot_script, read_csv, PlotSpec, Table, Value};
pub use studies::{build_case, enumerate_cases, Case, CasePipeline, RowFailure, StudyOutput};

use crate::error::Result;

pub fn run_experiment(cfg: &ExperimentConfig) -> StudyOutput {
    use ExperimentId::*;
    match cfg.experiment {
        NormSweep | HeatNormSweep => studies::norm_sweep(cfg),
        PowerVsError | SineDivergence | HeatRun | NonNormalAdvection | NonNormalAdvectionDiffusion => {
            studies::run_sweep(cfg)
        }
        ToyDemo => studies::toy_study(cfg),
    }
}

/// Sidecar text: configuration echo plus how the numbers were produced.
pub fn metadata(cfg: &ExperimentConfig, out: &StudyOutput, seed: Option<u64>) -> String {
    let mut s = String::new();
    let label = if cfg.experiment.is_qualitative() {
        "QUALITATIVE"
    } else {
        "QUANTITATIVE"
    };
    let _ = writeln!(s, "label = {label}");
    if cfg.experiment.is_qualitative() {
        let _ = writeln!(
            s,
            "note = centered finite differences with Dirichlet inflow stand in for a higher-order discretisation; compare trends, not iteration counts"
        );
    }
    let _ = writeln!(s, "initial_guess = {}", config::initial_guess_name(cfg.initial_guess));
    let _ = writeln!(s, "restriction = {}", studies::restriction_label(cfg));
    let _ = writeln!(s, "error_reference = serial fine solution");
    let _ = writeln!(
        s,
        "disc_reference = analytic solution on periodic grids, refined run (factor {}) on Dirichlet grids",
        cfg.refinement
    );
    if let Some(seed) = seed {
        let _ = writeln!(s, "seed = {seed}");
    }
    for t in &out.tables {
        let _ = writeln!(s, "table = {} ({} rows)", t.file_name(), t.rows.len());
    }
    let _ = writeln!(s, "row_errors = {}", out.failures.len());
    let _ = writeln!(s, "\n# configuration");
    s.push_str(&cfg.to_text());
    s
}

/// Write CSVs, plot scripts (unless `plots` is false) and the sidecar.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    out: &StudyOutput,
    dir: &Path,
    plots: bool,
    seed: Option<u64>,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for table in &out.tables {
        let path = dir.join(table.file_name());
        emit_csv(table, &path)?;
        written.push(path.clone());
        if plots && table.plot.is_some() {
            written.push(emit_plot_script(table, &path)?);
        }
    }
    let meta = dir.join(format!("{}.meta", cfg.experiment.name()));
    fs::write(&meta, metadata(cfg, out, seed))?;
    written.push(meta);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_csv_plot_and_meta() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::defaults(ExperimentId::ToyDemo);
        let out = run_experiment(&cfg);
        let files = write_outputs(&cfg, &out, dir.path(), true, Some(7)).unwrap();
        let names: Vec<String> = files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            names,
            ["toy-demo-summary.csv", "toy-demo-trace.csv", "toy-demo-trace.gp", "toy-demo.meta"]
        );
        let meta = fs::read_to_string(dir.path().join("toy-demo.meta")).unwrap();
        assert!(meta.contains("label = QUANTITATIVE") && meta.contains("seed = 7"));
        let cfg_text = meta.split("# configuration\n").nth(1).unwrap();
        assert_eq!(parse_config(cfg_text).unwrap(), vec![cfg]);
    }

    #[test]
    fn no_plots_flag() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::defaults(ExperimentId::ToyDemo);
        let out = run_experiment(&cfg);
        let files = write_outputs(&cfg, &out, dir.path(), false, None).unwrap();
        assert!(files.iter().all(|p| p.extension().unwrap() != "gp"));
    }
}
