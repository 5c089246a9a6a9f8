use parareal_core::experiments::{
    parse_config, read_csv, run_experiment, write_outputs, ExperimentConfig, ExperimentId, Value,
};

fn reduced(id: ExperimentId) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::defaults(id);
    if id != ExperimentId::ToyDemo {
        cfg.n = 12;
        cfg.m = vec![6, 11];
        cfg.nf = vec![2];
        cfg.slices = 4;
        cfg.k_max = 4;
        cfg.t_end = 0.1;
    }
    cfg
}

#[test]
fn default_text_parses_back() {
    let all: String = ExperimentId::ALL
        .iter()
        .map(|&id| ExperimentConfig::defaults(id).to_text())
        .collect::<Vec<_>>()
        .join("\n");
    let parsed = parse_config(&all).unwrap();
    let want: Vec<_> = ExperimentId::ALL.iter().map(|&id| ExperimentConfig::defaults(id)).collect();
    assert_eq!(parsed, want);
}

#[test]
fn emitted_csv_parses_back_exactly() {
    let dir = tempfile::tempdir().unwrap();
    for id in ExperimentId::ALL {
        let cfg = reduced(id);
        let out = run_experiment(&cfg);
        assert!(out.failures.is_empty(), "{}: {:?}", id.name(), out.failures);
        write_outputs(&cfg, &out, dir.path(), false, None).unwrap();
        for table in &out.tables {
            let (header, rows) = read_csv(&dir.path().join(table.file_name())).unwrap();
            assert_eq!(header, table.header);
            assert_eq!(rows.len(), table.rows.len());
            for (text_row, row) in rows.iter().zip(&table.rows) {
                for (text, value) in text_row.iter().zip(row) {
                    match value {
                        Value::Float(x) if x.is_nan() => assert!(text.parse::<f64>().unwrap().is_nan()),
                        Value::Float(x) => assert_eq!(text.parse::<f64>().unwrap(), *x),
                        Value::Int(i) => assert_eq!(text.parse::<i64>().unwrap(), *i),
                        Value::Bool(b) => assert_eq!(text.parse::<bool>().unwrap(), *b),
                        Value::Text(s) => assert_eq!(text, s),
                        Value::Empty => assert!(text.is_empty()),
                    }
                }
            }
        }
    }
}

/// `‖E‖₂ ≥ ‖B₀‖₂ ≥ σ_{m+1}(F)` and `‖B₀‖_F ≥ sum bound` on every normal row. The
/// sum bound itself is only a Frobenius-norm statement, so `bound_check`
/// may legitimately read "violated".
#[test]
fn normal_rows_satisfy_valid_bound_chain() {
    for id in [ExperimentId::NormSweep, ExperimentId::HeatNormSweep] {
        let out = run_experiment(&reduced(id));
        let t = &out.tables[0];
        let col = |name: &str| t.column(name).unwrap();
        for row in &t.rows {
            assert_eq!(row[col("normal")], Value::Bool(true));
            let f = |name: &str| row[col(name)].as_f64().unwrap();
            assert!(f("norm2_e") >= f("norm2_b0") - 1e-9);
            assert!(f("norm2_b0") >= f("single_bound") - 1e-9);
            assert!(f("norm2_b0") >= f("general_bound") - 1e-9);
            assert!(f("norm_fro_b0") >= f("sum_bound") - 1e-9);
        }
    }
}
