use std::path::Path;
use std::process::Command;

use eqradar::config::RunConfig;
use eqradar::{presets, run, svg};
use eqradar_core::units::Units;

const T0: f64 = 1e-10;

fn vacuum_config() -> String {
    format!(
        r#"{{
  "name": "vac",
  "units": {{ "length_m": 1e-5, "fermi_velocity_m_per_s": 1e5 }},
  "solver": {{ "omega_max_rad_per_s": {wmax:e}, "omega_step_rad_per_s": {step:e} }},
  "scenarios": [{{
    "name": "vacuum",
    "coupler": {{ "kind": "counter_propagating", "alpha": 0.2 }},
    "probe": {{ "tau_e_s": {tau:e} }},
    "analysis": {{ "kind": "contrast_sweep", "variable": "emission_time", "unit": "s",
                  "start": 0.0, "stop": {stop:e}, "points": 5 }}
  }}]
}}"#,
        wmax = 80.0 / T0,
        step = 0.02 / T0,
        tau = 0.3 * T0,
        stop = 2.0 * T0
    )
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn run_bin(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_eqradar")).args(args).current_dir(dir).output().unwrap()
}

#[test]
fn vacuum_sweep_has_unit_relative_contrast() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::from_json(&vacuum_config()).unwrap();
    let out = run::execute(&cfg, dir.path(), &dir.path().join("out"), true).unwrap();
    let text = std::fs::read_to_string(&out.csv[0]).unwrap();
    assert!(text.lines().any(|l| l == "scan_value,x_re,x_im,abs_x,baseline_abs,relative_abs"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 5);
    for r in &rows {
        assert_eq!(r[5], 1.0);
        assert!((r[3] - r[4]).abs() < 1e-15);
    }
    let svg_text = std::fs::read_to_string(out.svg.unwrap()).unwrap();
    assert_eq!(svg_text.matches("<polyline").count(), 1);
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.manifest).unwrap()).unwrap();
    assert_eq!(manifest["scenarios"][0]["diagnostics"]["rows"], 5);
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("vac.json");
    std::fs::write(&cfg_path, vacuum_config()).unwrap();
    for (out, jobs) in [("a", "1"), ("b", "3")] {
        let o = run_bin(&["run", "vac.json", "--out", out, "--jobs", jobs], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["vacuum.csv", "manifest.json"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs between runs");
    }
}

#[test]
fn exit_codes_follow_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let typo = vacuum_config().replace("\"tau_e_s\"", "\"tau_e\"");
    std::fs::write(dir.path().join("typo.json"), typo).unwrap();
    assert_eq!(run_bin(&["run", "typo.json"], dir.path()).status.code(), Some(2));
    let unit = vacuum_config().replace("\"unit\": \"s\"", "\"unit\": \"ns\"");
    std::fs::write(dir.path().join("unit.json"), unit).unwrap();
    assert_eq!(run_bin(&["run", "unit.json"], dir.path()).status.code(), Some(2));
    assert_eq!(run_bin(&["run", "missing.json"], dir.path()).status.code(), Some(4));
    assert_eq!(run_bin(&["run", "--preset", "fig99"], dir.path()).status.code(), Some(2));
    // ω_max too small for the Leviton width: the filter refuses to truncate.
    let short = vacuum_config().replace(&format!("{:e}", 80.0 / T0), &format!("{:e}", 5.0 / T0));
    std::fs::write(dir.path().join("short.json"), short).unwrap();
    assert_eq!(run_bin(&["run", "short.json"], dir.path()).status.code(), Some(3));
}

#[test]
fn every_preset_validates_and_round_trips() {
    for name in presets::NAMES {
        let cfg = presets::preset(name).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg, "{name}");
    }
    let fig4 = presets::preset("fig4").unwrap();
    assert_eq!(fig4.scenarios.len(), 3);
    let fig8 = presets::preset("fig8").unwrap();
    assert_eq!(fig8.scenarios.len(), 6);
    let text = serde_json::to_string(&presets::preset("fig6").unwrap()).unwrap();
    assert!(text.contains("\"alpha\":0.2"));
    let text = serde_json::to_string(&presets::preset("fig7").unwrap()).unwrap();
    assert!(text.contains("\"tau_e_s\":2.5e-12"));
    let text = serde_json::to_string(&fig8).unwrap();
    assert!(text.contains("\"gamma0_per_s\":1000000000.0"));
}

#[test]
fn unit_conversions_round_trip() {
    let u = Units::new(10e-6, 1e5).unwrap();
    for v in [1e-15, 2.5e-12, 1e-9, 3.3e-7] {
        assert!((u.from_tau(u.to_tau(v)) / v - 1.0).abs() < 1e-12);
    }
    for w in [1e6, 3.1e10, 8e12] {
        assert!((u.from_x(u.to_x(w)) / w - 1.0).abs() < 1e-12);
    }
}

#[test]
fn small_presets_run_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["fig10", "squeeze-min"] {
        let cfg = presets::preset(name).unwrap();
        let out = run::execute(&cfg, dir.path(), &dir.path().join(name), true).unwrap();
        let svg_text = std::fs::read_to_string(out.svg.unwrap()).unwrap();
        assert_eq!(svg_text.matches("<polyline").count(), cfg.scenarios.len());
    }
    let rows = data_rows(&std::fs::read_to_string(dir.path().join("squeeze-min/q0_5.csv")).unwrap());
    // Q₀ = 5, |S_ba|² = 1: |F| − 1 peaks at 5.1 % for 3 dB.
    let three_db = rows.iter().find(|r| (r[0] - 3.0).abs() < 1e-9).unwrap();
    assert!((three_db[4] - 1.051).abs() < 1e-3);
}

#[test]
fn tabulated_inputs_are_parsed() {
    let dir = tempfile::tempdir().unwrap();
    let mut coupler = String::from("# flat coupler\nomega_rad_per_s,s_bb_re,s_bb_im,s_ba_re,s_ba_im\n");
    for k in 0..=400 {
        let w = k as f64 * 0.25 / T0;
        let phase = k as f64 * 0.25 * 0.5;
        coupler += &format!("{w:e},{},{},0,0\n", phase.cos(), phase.sin());
    }
    std::fs::write(dir.path().join("delay.csv"), coupler).unwrap();
    let mut drive = String::from("time_s,voltage_v\n");
    let units = Units::new(1e-5, 1e5).unwrap();
    for k in 0..=400 {
        let t = (-10.0 + 0.05 * k as f64) * T0;
        let tau = t / T0;
        drive += &format!("{t:e},{:e}\n", 0.5 * units.voltage() * (-tau * tau).exp() * (2.0 * tau).sin());
    }
    std::fs::write(dir.path().join("pulse.csv"), drive).unwrap();
    let cfg = vacuum_config()
        .replace(r#"{ "kind": "counter_propagating", "alpha": 0.2 }"#, r#"{ "kind": "tabulated", "path": "delay.csv" }"#)
        .replace(r#""probe""#, r#""radiation": { "kind": "classical_series", "path": "pulse.csv" }, "probe""#);
    let cfg = RunConfig::from_json(&cfg).unwrap();
    let out = run::execute(&cfg, dir.path(), &dir.path().join("out"), false).unwrap();
    let rows = data_rows(&std::fs::read_to_string(&out.csv[0]).unwrap());
    // A pure 0.5 l/v_F delay: the optimal baseline is 1 and, with S_ba = 0, the drive is invisible.
    for r in &rows {
        assert!((r[4] - 1.0).abs() < 1e-4, "baseline {}", r[4]);
        assert!((r[5] - 1.0).abs() < 1e-12, "relative {}", r[5]);
    }
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "omega_rad_per_s,s_bb_re,s_bb_im,s_ba_re,s_ba_im\n0,1,0,0.5,0\n1,1,0,0.5,0\n").unwrap();
    assert!(matches!(
        eqradar::tables::read_coupler(&bad, units),
        Err(eqradar::CliError::Schema(_))
    ));
}

#[test]
fn plotting_rejects_empty_data() {
    assert!(svg::render(&[], "t", "x", "y", false).is_err());
    let one = svg::Series { label: "a".into(), points: vec![(0.0, 1.0), (1.0, 2.0)] };
    let text = svg::render(&[one], "t", "x", "y", false).unwrap();
    assert_eq!(text.matches("<polyline").count(), 1);
}

#[test]
fn shipped_scenario_validates() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/squeezed_contrast.json");
    let cfg = RunConfig::load(&path).unwrap();
    assert_eq!(cfg.scenarios.len(), 2);
}
