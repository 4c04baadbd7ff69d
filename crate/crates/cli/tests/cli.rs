//! End-to-end runs of the `skewfold` binary.

use std::path::Path;
use std::process::{Command, Output};

fn skewfold(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_skewfold"));
    cmd.args(args).env_remove("SKEWFOLD_OUT");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SKEW_BM: &str = "seed = 7\npaths = 2000\n[grid]\nsteps = 64\n[params]\nalpha = 0.7\n";

fn strip_wall_clock(json: &str) -> String {
    json.lines().filter(|l| !l.contains("\"wall_clock_seconds\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn list_names_every_scenario() {
    let out = skewfold(&["list"], &[]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "unfold-skorokhod",
        "unfold-conventional",
        "skew-bm",
        "skew-bessel",
        "ocone",
        "nakao",
        "particles",
        "localtime-xval",
    ] {
        assert!(text.contains(name), "{name} missing from:\n{text}");
    }
}

#[test]
fn missing_alpha_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "paths = 10\n[grid]\nsteps = 8\n");
    let out = skewfold(&["simulate", "skew-bm", "--config", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
    assert!(!dir.path().join("skew-bm_report.json").exists());
}

#[test]
fn bad_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let good = write_config(dir.path(), "good.toml", SKEW_BM);
    let unknown_key = write_config(dir.path(), "bad.toml", &format!("{SKEW_BM}bogus = 1\n"));
    let bad_alpha = write_config(dir.path(), "alpha.toml", &SKEW_BM.replace("0.7", "1.5"));
    for args in [
        vec!["verify", "no-such-scenario", "--config", &good, "--out", out_dir],
        vec!["verify", "skew-bm", "--config", "/nonexistent/c.toml", "--out", out_dir],
        vec!["verify", "skew-bm", "--config", &unknown_key, "--out", out_dir],
        vec!["verify", "skew-bm", "--config", &bad_alpha, "--out", out_dir],
        vec!["verify", "ocone", "--config", &good, "--out", out_dir],
    ] {
        let out = skewfold(&args, &[]);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn verify_sets_exit_code_and_simulate_does_not() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    // On 64 steps X(1) sits at 0 often enough to bias the fraction, so the
    // passing run gets a loose tolerance; a zero tolerance cannot be met at all.
    let ok = write_config(dir.path(), "ok.toml", &format!("{SKEW_BM}[tolerances]\nsign_law = 0.1\n"));
    let strict = write_config(dir.path(), "strict.toml", &format!("{SKEW_BM}[tolerances]\nsign_law = 0.0\n"));
    assert_eq!(skewfold(&["verify", "skew-bm", "--config", &ok, "--out", out_dir], &[]).status.code(), Some(0));
    assert_eq!(skewfold(&["verify", "skew-bm", "--config", &strict, "--out", out_dir], &[]).status.code(), Some(1));
    assert_eq!(skewfold(&["simulate", "skew-bm", "--config", &strict, "--out", out_dir], &[]).status.code(), Some(0));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("skew-bm_report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    assert_eq!(report["tolerance_overrides"]["sign_law"], 0.0);
}

#[test]
fn ocone_with_equal_slopes_has_zero_target_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "o.toml",
        "seed = 3\npaths = 20000\n[grid]\nhorizon = 2.0\nsteps = 4\n[params]\nu = 1.5\nv = 1.5\n",
    );
    let out = skewfold(&["verify", "ocone", "--config", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ocone_report.json")).unwrap()).unwrap();
    let third = report["checks"].as_array().unwrap().iter().find(|c| c["name"] == "third_moment").unwrap();
    assert_eq!(third["target"], 0.0);
    assert_eq!(third["pass"], true);
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SKEW_BM);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (out, workers) in [(&a, "1"), (&b, "3")] {
        let st = skewfold(
            &["simulate", "skew-bm", "--config", &cfg, "--out", out.to_str().unwrap(), "--workers", workers],
            &[],
        );
        assert!(st.status.success());
    }
    let read = |d: &Path, f: &str| std::fs::read_to_string(d.join(f)).unwrap();
    assert_eq!(
        strip_wall_clock(&read(&a, "skew-bm_report.json")),
        strip_wall_clock(&read(&b, "skew-bm_report.json"))
    );
    assert_eq!(read(&a, "skew-bm_paths.csv"), read(&b, "skew-bm_paths.csv"));
}

#[test]
fn seed_flag_overrides_config_and_changes_paths() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SKEW_BM);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    skewfold(&["simulate", "skew-bm", "--config", &cfg, "--out", a.to_str().unwrap()], &[]);
    skewfold(&["simulate", "skew-bm", "--config", &cfg, "--out", b.to_str().unwrap(), "--seed", "8"], &[]);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(b.join("skew-bm_report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 8);
    assert_ne!(
        std::fs::read(a.join("skew-bm_paths.csv")).unwrap(),
        std::fs::read(b.join("skew-bm_paths.csv")).unwrap()
    );
}

#[test]
fn output_directory_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SKEW_BM);
    let env_dir = dir.path().join("from-env");
    let out = skewfold(&["simulate", "skew-bm", "--config", &cfg], &[("SKEWFOLD_OUT", &env_dir)]);
    assert!(out.status.success());
    assert!(env_dir.join("skew-bm_report.json").exists());

    // The config's own directory wins over the environment.
    let cfg_dir = dir.path().join("from-config");
    let text = format!("{SKEW_BM}[output]\ndir = {:?}\n", cfg_dir.to_str().unwrap());
    let cfg = write_config(dir.path(), "d.toml", &text);
    let out = skewfold(&["simulate", "skew-bm", "--config", &cfg], &[("SKEWFOLD_OUT", &env_dir)]);
    assert!(out.status.success());
    assert!(cfg_dir.join("skew-bm_report.json").exists());
}

#[test]
fn csv_has_header_and_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p.toml",
        "paths = 4\n[grid]\nsteps = 32\n[params]\nzeta1 = 3.0\nzeta2 = 1.0\neta1 = 1.0\neta2 = 1.0\n[output]\nsample_paths = 2\n",
    );
    let out = skewfold(&["simulate", "particles", "--config", &cfg, "--out", dir.path().to_str().unwrap()], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("particles_paths.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,path,x1,x2,y,skew_gap,skew_b1,skew_b2,skew_x1,skew_x2"
    );
    assert_eq!(lines.count(), 2 * 33);
}
