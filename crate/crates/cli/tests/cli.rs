use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lcr_cli::config::{ExperimentSpec, FileConfig, Overrides, Scenario};
use lcr_cli::error::CliError;
use lcr_core::channel::LayoutPreset;
use tempfile::TempDir;

fn ris_lcr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ris-lcr")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn flags_take_precedence_over_file() {
    let file = FileConfig::parse("seed = 5\nthreads = 3\n[mc]\nsamples = 200000\n").unwrap();
    let flags = Overrides { seed: Some(9), samples: Some(160_000), ..Default::default() };
    let spec = ExperimentSpec::resolve(Scenario::Fig3b, Some(file.clone()), &flags).unwrap();
    assert_eq!(spec.seed, 9);
    assert_eq!(spec.mc.samples, 160_000);
    assert_eq!(spec.threads, 3);
    let spec = ExperimentSpec::resolve(Scenario::Fig3b, Some(file), &Overrides::default()).unwrap();
    assert_eq!(spec.seed, 5);
    assert_eq!(spec.mc.samples, 200_000);
}

#[test]
fn layout_flag_selects_preset_geometry() {
    let flags = Overrides { layout: Some(LayoutPreset::C), ..Default::default() };
    let spec = ExperimentSpec::resolve(Scenario::Fig3a, None, &flags).unwrap();
    assert_eq!(spec.scene.layout.d_x, 35.0);
    assert_eq!(spec.scene.layout.d_rb, 40.0);
    assert_eq!(spec.scene.layout.d_y, 5.0);
    let spec = ExperimentSpec::resolve(Scenario::Fig4a, None, &Overrides::default()).unwrap();
    assert_eq!(spec.scene.layout.d_x, 20.0);
    for name in ["c", "C"] {
        let file = FileConfig::parse(&format!("[scene]\nlayout = \"{name}\"\n")).unwrap();
        let spec = ExperimentSpec::resolve(Scenario::Fig3a, Some(file), &Overrides::default()).unwrap();
        assert_eq!(spec.scene.layout.d_x, 35.0);
    }
}

#[test]
fn unknown_key_is_a_usage_error() {
    let err = FileConfig::parse("seed = 1\nsede = 2\n").unwrap_err();
    assert!(matches!(err, CliError::Usage(_)));
    assert!(err.to_string().contains("sede"), "{err}");

    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[mc]\nsampels = 10\n");
    let out = ris_lcr(&["run", "fig3b", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sampels"));
}

#[test]
fn inverted_grid_is_rejected_before_any_work() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "grid.toml", "[grid]\nmin_db = 10.0\nmax_db = 0.0\nstep_db = 1.0\n");
    let out_dir = dir.path().join("out");
    let out = ris_lcr(&["run", "fig3b", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("min_db"));
    assert!(!out_dir.exists());
}

#[test]
fn bad_flag_values_are_rejected() {
    assert_eq!(ris_lcr(&["run", "fig3b", "--samples", "100"]).status.code(), Some(2));
    assert_eq!(ris_lcr(&["run", "fig3b", "--shadow-dominant", "1.5"]).status.code(), Some(2));
    assert_eq!(ris_lcr(&["run", "fig9"]).status.code(), Some(2));
}

fn small_run(dir: &Path, sub: &str, threads: &str) -> std::path::PathBuf {
    let cfg = write(dir, "small.toml", "[grid]\nmin_db = 8.0\nmax_db = 26.0\nstep_db = 0.5\n");
    let out = dir.join(sub);
    let res = ris_lcr(&[
        "run", "fig3b", "--config", &cfg, "--samples", "80000", "--seed", "7", "--threads", threads, "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    out
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let dir = TempDir::new().unwrap();
    let a = small_run(dir.path(), "t1", "1");
    let b = small_run(dir.path(), "t2", "2");
    let mut names: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    assert_eq!(names.len(), 4);
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n} differs");
    }
}

#[test]
fn fig3b_writes_four_curves_and_a_manifest() {
    let dir = TempDir::new().unwrap();
    let out = small_run(dir.path(), "o", "0");
    for stem in ["fig3b_N64_ris", "fig3b_N128_ris"] {
        for kind in ["analytic", "sim"] {
            let text = fs::read_to_string(out.join(format!("{stem}_{kind}.csv"))).unwrap();
            let mut lines = text.lines();
            assert_eq!(lines.next(), Some("threshold_db,lcr_normalized,source,ci_low,ci_high"));
            assert_eq!(lines.count(), 37);
        }
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config"]["mc"]["samples"], 80_000);
    let curves = manifest["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 4);
    for c in curves {
        assert!(c["formula_version"].is_string());
        assert!(c["scene"]["ris_mean_snr_db"].is_number());
        assert!(out.join(c["file"].as_str().unwrap()).exists());
    }
}
