use std::path::Path;

use vhp_core::lab::{self, LabConfig, SmoothingParams, REPORT_SCHEMA, SCENARIOS};
use vhp_core::VhpError;

fn parse(text: &str) -> vhp_core::Result<LabConfig> {
    LabConfig::parse(text, Path::new("inline.cfg"))
}

#[test]
fn parse_errors_name_the_source() {
    for bad in ["scenario = ", "seed = 3", "scenario = \"bs-roundtrip\"\n[output]\nevery = 0"] {
        match parse(bad) {
            Err(VhpError::Config { path, .. }) => assert_eq!(path, Path::new("inline.cfg")),
            other => panic!("{bad:?}: {other:?}"),
        }
    }
    let missing = LabConfig::from_path(Path::new("/nonexistent/x.cfg")).unwrap_err();
    assert!(missing.to_string().contains("/nonexistent/x.cfg"), "{missing}");
}

#[test]
fn scenario_sections_are_checked() {
    let cfg = parse("scenario = \"smoothing-rates\"\n[grid]\nl1 = 6.0\nn1 = 32\n").unwrap();
    assert!(matches!(cfg.params::<SmoothingParams>(), Err(VhpError::Config { .. })));
    let cfg = parse("scenario = \"smoothing-rates\"\nsamples = 9\nbogus = 1\n").unwrap();
    assert!(cfg.params::<SmoothingParams>().is_err());
    let cfg = parse("scenario = \"smoothing-rates\"\nseed = 5\nsamples = 9\n").unwrap();
    let p: SmoothingParams = cfg.params().unwrap();
    assert_eq!(p.samples, 9);
    assert_eq!(p.grid.n1, SmoothingParams::default().grid.n1);
    assert_eq!(cfg.seed, 5);
}

#[test]
fn unknown_scenario_is_reported() {
    let cfg = parse("scenario = \"vortex-street\"").unwrap();
    assert!(matches!(lab::run(&cfg), Err(VhpError::UnknownScenario(_))));
    assert_eq!(SCENARIOS.len(), 8);
}

#[test]
fn hash_follows_the_text() {
    let a = parse("scenario = \"bs-roundtrip\"").unwrap();
    let b = parse("scenario = \"bs-roundtrip\"\n").unwrap();
    assert_eq!(a.config_hash().len(), 64);
    assert_ne!(a.config_hash(), b.config_hash());
}

#[test]
fn relative_series_paths_resolve_next_to_the_config() {
    let cfg = LabConfig::parse("scenario = \"green-envelope\"", Path::new("/a/b/c.cfg")).unwrap();
    assert_eq!(cfg.resolve(Path::new("u.csv")), Path::new("/a/b/u.csv"));
    assert_eq!(cfg.resolve(Path::new("/x/u.csv")), Path::new("/x/u.csv"));
}

#[test]
fn report_and_series_are_written() {
    let text = "scenario = \"green-envelope\"\n[output]\nevery = 5\n";
    let cfg = parse(text).unwrap();
    let (report, rows) = lab::run(&cfg).unwrap();
    assert!(report.pass);
    let dir = std::env::temp_dir().join(format!("vhp-lab-test-{}", std::process::id()));
    let (csv, json) = lab::write_outputs(&cfg, &report, &rows, &dir).unwrap();
    let header = std::fs::read_to_string(&csv).unwrap();
    assert!(header.starts_with("t,sup_omega,sup_u,sup_grad_u,trace_drift,leakage,mass\n"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["schema"], REPORT_SCHEMA);
    assert_eq!(doc["scenario"], "green-envelope");
    assert!(doc["summary"].as_array().unwrap().iter().any(|l| l == "drift ratio ≤ 1.05: pass"));
    assert_eq!(doc["provenance"]["config_hash"], cfg.config_hash());
    let _ = std::fs::remove_dir_all(dir);
}

// Smooth data has no initial layer: the gradient norms only feel viscous
// decay, well away from the rates -1/2 and -1 of rough data.
#[test]
fn smooth_data_has_flat_gradient_slopes() {
    let text = "scenario = \"smoothing-rates\"\n[grid]\nl1 = 6.283185307179586\nn1 = 32\nheight = 8.0\nn2 = 65\n\
                [time]\ndt = 2e-4\nt_end = 0.1\n[initial]\npreset = \"stream-poly\"\n";
    let (report, _) = lab::run(&parse(text).unwrap()).unwrap();
    let g1 = report.slopes["|grad u| slope"];
    let g2 = report.slopes["|grad^2 u| slope"];
    assert!(g1.abs() <= 0.25 && g2.abs() <= 0.25, "{g1} {g2}");
}
