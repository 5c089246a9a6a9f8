use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parareal-lab")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn list_and_defaults() {
    let out = lab(&["list-experiments"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(text.contains("non-normal-advection-diffusion"));

    let out = lab(&["defaults", "toy-demo"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("[toy-demo]"));
    assert_eq!(lab(&["defaults", "nope"]).status.code(), Some(1));
}

#[test]
fn run_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "toy.cfg", "[toy-demo]\nepsilon = 1e-3\n");
    let out_dir = dir.path().join("out");
    let out = lab(&["run", &cfg, "--out-dir", out_dir.to_str().unwrap(), "--jobs", "2", "--no-plots", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("toy-demo-summary.csv").exists());
    assert!(!out_dir.join("toy-demo-trace.gp").exists());
    let meta = std::fs::read_to_string(out_dir.join("toy-demo.meta")).unwrap();
    assert!(meta.contains("seed = 3"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.cfg", "n = 8\nwhat = 1\n");
    let out = lab(&["run", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let missing = dir.path().join("missing.cfg");
    assert_eq!(lab(&["run", missing.to_str().unwrap()]).status.code(), Some(3));

    // a file where the output directory should be
    let blocker = write(dir.path(), "blocker", "");
    let ok = write(dir.path(), "ok.cfg", "experiment = toy-demo\n");
    assert_eq!(lab(&["run", &ok, "--out-dir", &blocker]).status.code(), Some(3));

    // centered differences on a one-node coarse grid: the row fails, the rest are written
    let infeasible = write(
        dir.path(),
        "infeasible.cfg",
        "n = 8\nm = 1, 4\nnf = 2\nschemes = centered\nmethods = trapezoidal\nrestriction = linear\n",
    );
    let out_dir = dir.path().join("partial");
    let out = lab(&["run", &infeasible, "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let csv = std::fs::read_to_string(out_dir.join("norm-sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.contains("error:"));
}
