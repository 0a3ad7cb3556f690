use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn vhp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vhp")).args(args).output().expect("spawn vhp")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("vhp-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn lists_the_scenarios() {
    let out = vhp(&["run", "--list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().collect();
    assert_eq!(names.len(), 8);
    assert!(names.contains(&"bs-roundtrip") && names.contains(&"smoothing-rates"));
}

#[test]
fn missing_config_exits_3_and_names_it() {
    let out = vhp(&["run", "--config", "/no/such/dir/missing.cfg"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/dir/missing.cfg"));
}

#[test]
fn unknown_scenario_exits_2() {
    let d = scratch("unknown");
    let cfg = d.join("x.cfg");
    std::fs::write(&cfg, "scenario = \"vortex-street\"\n").unwrap();
    let out = vhp(&["run", "--config", cfg.to_str().unwrap(), "--out", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_dir_all(d);
}

#[test]
fn non_finite_run_exits_4() {
    let d = scratch("nan");
    let cfg = d.join("nan.cfg");
    let text = "scenario = \"stokes-oracle\"\n[grid]\nl1 = 6.283185307179586\nn1 = 8\nheight = 4.0\nn2 = 17\n\
                [time]\ndt = 0.01\nt_end = 0.02\n[initial]\npreset = \"stream-poly\"\namplitude = nan\n";
    std::fs::write(&cfg, text).unwrap();
    let out = vhp(&["run", "--config", cfg.to_str().unwrap(), "--out", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    let _ = std::fs::remove_dir_all(d);
}

#[test]
fn roundtrip_scenario_passes_and_reports() {
    let d = scratch("bs");
    let cfg = configs().join("bs_roundtrip.cfg");
    let out = vhp(&["run", "--config", cfg.to_str().unwrap(), "--out", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json = std::fs::read_to_string(d.join("bs_roundtrip.json")).unwrap();
    assert!(json.contains("order ≥ 1.8: pass"), "{json}");
    let csv = std::fs::read_to_string(d.join("bs_roundtrip.csv")).unwrap();
    assert!(csv.starts_with("t,sup_omega,sup_u,sup_grad_u,trace_drift,leakage,mass"));
    let _ = std::fs::remove_dir_all(d);
}

#[test]
fn same_seed_same_bytes_under_thread_caps() {
    let cfg = configs().join("green_envelope.cfg");
    let mut bytes = vec![];
    for (k, threads) in ["1", "4"].iter().enumerate() {
        let d = scratch(&format!("det{k}"));
        let out = Command::new(env!("CARGO_BIN_EXE_vhp"))
            .args(["run", "--config", cfg.to_str().unwrap(), "--out", d.to_str().unwrap(), "--seed", "9"])
            .env("VHP_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        bytes.push(std::fs::read(d.join("green_envelope.csv")).unwrap());
        let _ = std::fs::remove_dir_all(d);
    }
    assert_eq!(bytes[0], bytes[1]);
}
