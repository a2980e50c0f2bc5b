//! End-to-end tests of the `adcr` binary: exit codes, file outputs, summary
//! JSON, and determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn adcr() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adcr"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn adcr");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json_stdout(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write_spec(dir: &Path, length: usize, count: usize, seed: u64) -> PathBuf {
    let spec = serde_json::json!({
        "fs": 100.0,
        "length": length,
        "channels": 2,
        "noise_level": 1.0,
        "seed": seed,
        "count": count,
        "name": "fix",
        "events": [
            { "center_s": length as f64 / 200.0, "duration_s": 1.0, "band": [11.0, 16.0], "amplitude": 5.0 }
        ]
    });
    let path = dir.join("spec.json");
    fs::write(&path, spec.to_string()).unwrap();
    path
}

fn gen_fixtures(dir: &Path, length: usize, count: usize, seed: u64) -> Vec<PathBuf> {
    let spec = write_spec(dir, length, count, seed);
    let fixtures = dir.join("fixtures");
    run_ok(adcr().arg("gen-synthetic").arg(&spec).arg("--out-dir").arg(&fixtures));
    (0..count).map(|i| fixtures.join(format!("fix_{i:03}.raw"))).collect()
}

#[test]
fn gen_synthetic_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), 800, 1, 42);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    run_ok(adcr().arg("gen-synthetic").arg(&spec).arg("--out-dir").arg(&out_a));
    run_ok(adcr().arg("gen-synthetic").arg(&spec).arg("--out-dir").arg(&out_b));
    let bytes_a = fs::read(out_a.join("fix_000.raw")).unwrap();
    let bytes_b = fs::read(out_b.join("fix_000.raw")).unwrap();
    assert_eq!(bytes_a, bytes_b);
    // events ground truth is written alongside
    assert!(out_a.join("fix_000.events.json").exists());
    // a different seed changes the bytes
    let out_c = dir.path().join("c");
    run_ok(adcr().arg("gen-synthetic").arg(&spec).arg("--out-dir").arg(&out_c).arg("--seed").arg("43"));
    let bytes_c = fs::read(out_c.join("fix_000.raw")).unwrap();
    assert_ne!(bytes_a, bytes_c);
}

#[test]
fn compress_then_reconstruct_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = gen_fixtures(dir.path(), 1500, 1, 7);
    let container = dir.path().join("seg.adcr");

    let out = run_ok(
        adcr()
            .arg("compress")
            .arg(&fixtures[0])
            .arg(&container)
            .args(["--ratio", "0.25", "--preset", "isruc"]),
    );
    let summary = json_stdout(&out);
    let realized = summary["realized_keep_ratio"].as_f64().unwrap();
    assert!(realized > 0.25 - 1.0 / 64.0 && realized < 0.25 + 0.05 + 2.0 / 1500.0);
    assert_eq!(summary["stored_scalars"].as_u64().unwrap() % 2, 0); // 2 channels

    let restored = dir.path().join("seg_back.raw");
    let out = run_ok(
        adcr()
            .arg("reconstruct")
            .arg(&container)
            .arg(&restored)
            .arg("--original")
            .arg(&fixtures[0]),
    );
    let summary = json_stdout(&out);
    assert_eq!(summary["used_fallback"], serde_json::json!(false));
    assert!(summary["fidelity"]["mean_pearson_r"].as_f64().unwrap() > 0.5);
    assert!(restored.exists());
}

#[test]
fn identity_ratio_keeps_high_global_snr() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = gen_fixtures(dir.path(), 1200, 1, 11);
    let container = dir.path().join("seg.adcr");
    let summary = json_stdout(&run_ok(
        adcr().arg("compress").arg(&fixtures[0]).arg(&container).args(["--ratio", "1.0"]),
    ));
    assert!(summary["realized_keep_ratio"].as_f64().unwrap() >= 1.0);
    assert_eq!(summary["rate"]["u"], serde_json::json!(1));
    assert_eq!(summary["rate"]["d"], serde_json::json!(1));

    let restored = dir.path().join("seg_back.raw");
    let summary = json_stdout(&run_ok(
        adcr()
            .arg("reconstruct")
            .arg(&container)
            .arg(&restored)
            .arg("--original")
            .arg(&fixtures[0]),
    ));
    assert!(
        summary["fidelity"]["mean_snr_db"].as_f64().unwrap() >= 60.0,
        "identity round trip should be nearly lossless: {}",
        summary["fidelity"]["mean_snr_db"]
    );
}

#[test]
fn reconstruct_without_original_omits_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = gen_fixtures(dir.path(), 900, 1, 3);
    let container = dir.path().join("seg.adcr");
    run_ok(adcr().arg("compress").arg(&fixtures[0]).arg(&container).args(["--ratio", "0.5"]));
    let restored = dir.path().join("back.raw");
    let summary = json_stdout(&run_ok(adcr().arg("reconstruct").arg(&container).arg(&restored)));
    assert!(summary.get("fidelity").is_none());
}

#[test]
fn tampered_rate_header_triggers_flagged_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = gen_fixtures(dir.path(), 1000, 1, 5);
    let container = dir.path().join("seg.adcr");
    run_ok(adcr().arg("compress").arg(&fixtures[0]).arg(&container).args(["--ratio", "0.25"]));

    // corrupt the rate denominator (byte 16..18) so the stored y length no
    // longer matches ceil(N*u/d)
    let mut bytes = fs::read(&container).unwrap();
    bytes[16..18].copy_from_slice(&7u16.to_le_bytes());
    fs::write(&container, &bytes).unwrap();

    let restored = dir.path().join("back.raw");
    let summary = json_stdout(&run_ok(adcr().arg("reconstruct").arg(&container).arg(&restored)));
    assert_eq!(summary["used_fallback"], serde_json::json!(true));
    assert_eq!(summary["reconstruction"], serde_json::json!("fallback"));
    assert!(restored.exists());
}

#[test]
fn exit_codes_distinguish_usage_and_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = gen_fixtures(dir.path(), 900, 1, 1);
    let container = dir.path().join("seg.adcr");

    // unknown preset -> usage error (1)
    let out = adcr()
        .arg("compress")
        .arg(&fixtures[0])
        .arg(&container)
        .args(["--ratio", "0.5", "--preset", "nope"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // ratio outside (0, 1] -> usage error (1)
    let out = adcr()
        .arg("compress")
        .arg(&fixtures[0])
        .arg(&container)
        .args(["--ratio", "1.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // missing input file -> data error (2)
    let out = adcr()
        .arg("compress")
        .arg(dir.path().join("missing.raw"))
        .arg(&container)
        .args(["--ratio", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // corrupt magic -> data error (2)
    run_ok(adcr().arg("compress").arg(&fixtures[0]).arg(&container).args(["--ratio", "0.5"]));
    let mut bytes = fs::read(&container).unwrap();
    bytes[0] = b'X';
    fs::write(&container, &bytes).unwrap();
    let out = adcr()
        .arg("reconstruct")
        .arg(&container)
        .arg(dir.path().join("back.raw"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_reports_per_ratio_rows() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = gen_fixtures(dir.path(), 1500, 2, 21);
    let csv_path = dir.path().join("sweep.csv");
    run_ok(
        adcr()
            .arg("sweep")
            .args(&fixtures)
            .args(["--ratios", "0.25,0.5,1.0"])
            .arg("--out")
            .arg(&csv_path),
    );
    let csv = fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.trim().lines().collect();
    assert_eq!(lines.len(), 4, "header plus one row per ratio:\n{csv}");
    assert!(lines[0].starts_with("ratio,realized_ratio,pearson_r,snr_db,psd_cosine"));

    let snr_of = |line: &str| -> f64 { line.split(',').nth(3).unwrap().parse().unwrap() };
    let ok_of = |line: &str| -> u64 { line.split(',').nth(5).unwrap().parse().unwrap() };
    for line in &lines[1..] {
        assert_eq!(ok_of(line), 2);
    }
    // fidelity does not degrade as the ratio grows (0.5 dB slack)
    assert!(snr_of(lines[2]) >= snr_of(lines[1]) - 0.5);
    assert!(snr_of(lines[3]) >= snr_of(lines[2]) - 0.5);

    // json format variant
    let out = run_ok(
        adcr()
            .arg("sweep")
            .args(&fixtures)
            .args(["--ratios", "0.5", "--format", "json"]),
    );
    let rows = json_stdout(&out);
    assert_eq!(rows.as_array().unwrap().len(), 1);
    assert_eq!(rows[0]["segments_ok"], serde_json::json!(2));
}

#[test]
fn buffer_sim_gates_and_replays_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = gen_fixtures(dir.path(), 800, 4, 30);

    // 20 pseudo rows: 15 clear the gate (16+ windows above 0.9), 5 fall
    // short (10 windows above), plus 8 true rows for the replay mix
    let mut manifest = String::new();
    for i in 0..8 {
        let path = fixtures[i % fixtures.len()].display();
        manifest.push_str(&format!("{path}\t{}\ttrue\t\t0.{i},1.0\n", i % 3));
    }
    for i in 0..20 {
        let path = fixtures[i % fixtures.len()].display();
        let confs = if i < 15 { "0.95,".repeat(16) } else { "0.95,".repeat(10) + &"0.5,".repeat(6) };
        let confs = confs.trim_end_matches(',');
        manifest.push_str(&format!("{path}\t{}\tpseudo\t{confs}\t0.{i},0.5\n", i % 3));
    }
    let manifest_path = dir.path().join("stream.tsv");
    fs::write(&manifest_path, &manifest).unwrap();

    let log_path = dir.path().join("events.jsonl");
    let mut cmd = adcr();
    cmd.arg("buffer-sim")
        .arg(&manifest_path)
        .args(["--budget-true", "100000", "--budget-pseudo", "100000"])
        .args(["--ratio", "0.25", "--min-windows", "15", "--seed", "9"])
        .arg("--out")
        .arg(&log_path);
    run_ok(&mut cmd);
    let log = fs::read_to_string(&log_path).unwrap();

    let events: Vec<serde_json::Value> = log
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect();
    let final_event = events.last().unwrap();
    assert_eq!(final_event["event"], "final");
    assert_eq!(final_event["admitted_pseudo"], serde_json::json!(15));
    assert_eq!(final_event["rejected_pseudo"], serde_json::json!(5));
    assert_eq!(final_event["inserted_true"], serde_json::json!(8));
    let replay = &events[events.len() - 2];
    assert_eq!(replay["event"], "replay");
    assert_eq!(replay["batch"].as_array().unwrap().len(), 10);
    let trues = replay["batch"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|b| b["provenance"] == "true")
        .count();
    assert_eq!(trues, 8, "8:2 replay mix");

    // identical run, identical bytes
    let log_path_2 = dir.path().join("events2.jsonl");
    let mut cmd = adcr();
    cmd.arg("buffer-sim")
        .arg(&manifest_path)
        .args(["--budget-true", "100000", "--budget-pseudo", "100000"])
        .args(["--ratio", "0.25", "--min-windows", "15", "--seed", "9"])
        .arg("--out")
        .arg(&log_path_2);
    run_ok(&mut cmd);
    assert_eq!(fs::read(&log_path).unwrap(), fs::read(&log_path_2).unwrap());
}

#[test]
fn buffer_sim_skips_malformed_rows() {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = gen_fixtures(dir.path(), 800, 1, 2);
    let manifest = format!(
        "{}\t0\ttrue\t\t0.5\nnot-enough-fields\n{}\tbad\ttrue\t\t0.5\n",
        fixtures[0].display(),
        fixtures[0].display()
    );
    let manifest_path = dir.path().join("stream.tsv");
    fs::write(&manifest_path, &manifest).unwrap();
    let out = run_ok(
        adcr()
            .arg("buffer-sim")
            .arg(&manifest_path)
            .args(["--budget-true", "10000", "--budget-pseudo", "10000"]),
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("warning"), "expected warnings, got: {stderr}");
    let last = out.stdout.split(|&b| b == b'\n').rfind(|l| !l.is_empty()).unwrap();
    let final_event: serde_json::Value = serde_json::from_slice(last).unwrap();
    assert_eq!(final_event["inserted_true"], serde_json::json!(1));
}

#[test]
fn presets_lists_the_three_builtins() {
    let out = run_ok(adcr().arg("presets"));
    let listing = json_stdout(&out);
    let names: Vec<&str> = listing
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, vec!["isruc", "faced", "physionet-mi"]);
}
