use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use catspin::config::{validate_config, ScenarioConfig, ScenarioId};
use catspin::output::{config_text_from_header, emit_plot_script, strip_header};

fn template(id: ScenarioId) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{id}.toml"))
}

fn catspin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catspin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_into(id: ScenarioId, out: &Path, extra: &[&str]) -> Output {
    let config = template(id);
    let mut args = vec![
        id.as_str(),
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    catspin(&args)
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    v.sort();
    v
}

#[test]
fn every_scenario_runs_quickly_and_round_trips_its_config() {
    let dir = tempfile::tempdir().unwrap();
    for id in ScenarioId::ALL {
        let start = Instant::now();
        let out = run_into(id, dir.path(), &["--seed", "7"]);
        let elapsed = start.elapsed();
        assert!(out.status.success(), "{id}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(elapsed < Duration::from_secs(60), "{id} took {elapsed:?}");

        let mut expected = validate_config(&fs::read_to_string(template(id)).unwrap(), id).unwrap();
        expected.sampling.seed = 7;
        expected.output.dir = dir.path().display().to_string();
        let files: Vec<PathBuf> = csv_files(dir.path())
            .into_iter()
            .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with(&format!("{id}_")))
            .collect();
        assert!(files.len() >= 2, "{id}: {files:?}");
        for f in files {
            let text = fs::read_to_string(&f).unwrap();
            let stored = config_text_from_header(&text).unwrap();
            assert_eq!(validate_config(&stored, id).unwrap(), expected, "{}", f.display());
        }
    }
}

#[test]
fn curve_rows_are_sorted_and_paired() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_into(ScenarioId::RamseyClassical, dir.path(), &[]).status.success());
    for setting in ["plus", "minus"] {
        let text = fs::read_to_string(dir.path().join(format!("ramsey-classical_curve_{setting}.csv"))).unwrap();
        let body = strip_header(&text);
        let mut lines = body.lines();
        assert_eq!(lines.next().unwrap(), "phi_rf_rad,probability,shots,mean,stderr");
        let xs: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
        assert_eq!(xs.len(), 121);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn existing_outputs_are_not_overwritten_without_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_into(ScenarioId::PulseOptimize, dir.path(), &[]).status.success());
    let target = dir.path().join("pulse-optimize_optima.csv");
    fs::write(&target, "sentinel").unwrap();
    let refused = run_into(ScenarioId::PulseOptimize, dir.path(), &["--seed", "3"]);
    assert!(!refused.status.success());
    assert!(String::from_utf8_lossy(&refused.stderr).contains("--overwrite"));
    assert_eq!(fs::read_to_string(&target).unwrap(), "sentinel");
    assert!(run_into(ScenarioId::PulseOptimize, dir.path(), &["--overwrite"])
        .status
        .success());
    assert_ne!(fs::read_to_string(&target).unwrap(), "sentinel");
}

#[test]
fn identical_seeds_give_identical_bodies() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        assert!(run_into(ScenarioId::FringesVsPhiMw, dir.path(), &["--seed", "99"])
            .status
            .success());
    }
    let (fa, fb) = (csv_files(a.path()), csv_files(b.path()));
    assert_eq!(fa.len(), fb.len());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(
            strip_header(&fs::read_to_string(x).unwrap()),
            strip_header(&fs::read_to_string(y).unwrap())
        );
    }
    let c = tempfile::tempdir().unwrap();
    assert!(run_into(ScenarioId::FringesVsPhiMw, c.path(), &["--seed", "100"])
        .status
        .success());
    let name = "fringes-vs-phimw_fringe_plus.csv";
    assert_ne!(
        strip_header(&fs::read_to_string(a.path().join(name)).unwrap()),
        strip_header(&fs::read_to_string(c.path().join(name)).unwrap())
    );
}

#[test]
fn invalid_configs_exit_nonzero_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[physics]\nombega_rf = \"1.6 MHz\"\ntau = \"-56 ns\"\n").unwrap();
    let out = catspin(&[
        "fringes-vs-phimw",
        "--config",
        bad.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("omega_rf"), "{err}");
    assert!(err.contains("line 3") && err.contains("physics.tau"), "{err}");
    assert!(csv_files(dir.path()).is_empty());

    let out = catspin(&["fringes-vs-phmw", "--config", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("fringes-vs-phimw"));
}

#[test]
fn minimal_config_takes_defaults() {
    let cfg = validate_config("", ScenarioId::SensitivityVsTau).unwrap();
    assert_eq!(cfg, ScenarioConfig::defaults(ScenarioId::SensitivityVsTau));
}

#[test]
fn plot_scripts_cover_pairs_and_sensitivity() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_into(ScenarioId::SensitivityVsTau, dir.path(), &["--emit-plots"])
        .status
        .success());
    let script = fs::read_to_string(dir.path().join("sensitivity-vs-tau.gp")).unwrap();
    assert!(script.contains("set logscale xy"));
    assert!(script.contains("hl_v_cm") && script.contains("sql_v_cm"));

    assert!(run_into(ScenarioId::FringesVsPhiMw, dir.path(), &["--emit-plots"])
        .status
        .success());
    let script = fs::read_to_string(dir.path().join("fringes-vs-phimw.gp")).unwrap();
    assert_eq!(script.matches("\nplot ").count(), 1, "{script}");
    assert!(script.contains("fringe_plus") && script.contains("fringe_minus"));

    let missing = emit_plot_script(&[dir.path().join("absent.csv")]);
    assert!(missing.is_err());
}
