use std::fs;
use std::path::{Path, PathBuf};

use super::{run_with, Env};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

struct Output {
    code: i32,
    stdout: Vec<u8>,
    stderr: Vec<u8>,
}

fn qlink_in(catalog_dir: Option<&Path>, args: &[&str]) -> Output {
    let env = Env {
        catalog_dir: catalog_dir.map(Path::to_path_buf),
    };
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(
        std::iter::once("qlink").chain(args.iter().copied()),
        &env,
        &mut out,
        &mut err,
    );
    Output {
        code,
        stdout: out,
        stderr: err,
    }
}

fn qlink(args: &[&str]) -> Output {
    qlink_in(None, args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(Result::unwrap)
        .collect()
}

#[test]
fn budget_valid_fixture() {
    let o = qlink(&["budget", &fixture("proxima_xray.json")]);
    assert_eq!(o.code, (0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("survival"));
    assert!(out.contains("model choice"));
}

#[test]
fn budget_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = qlink(&[
        "budget",
        &fixture("empty.json"),
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.code, (0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["verdict"]["survival"], 1.0);
    assert_eq!(v["verdict"]["worst_overlap_squared"], 1.0);
    assert_eq!(v["test_energy"]["unit"], "eV");
}

#[test]
fn budget_malformed_json_names_byte_offset() {
    let o = qlink(&["budget", &fixture("malformed.json")]);
    assert_eq!(o.code, (2));
    assert!(stderr(&o).contains("byte"), "{}", stderr(&o));
}

#[test]
fn budget_energy_above_electron_mass() {
    let o = qlink(&["budget", &fixture("above_electron_mass.json")]);
    assert_eq!(o.code, (2));
    assert!(stderr(&o).contains("domain error"), "{}", stderr(&o));
}

#[test]
fn budget_missing_file() {
    let o = qlink(&["budget", "/nonexistent/scenario.json"]);
    assert_eq!(o.code, (2));
}

#[test]
fn budget_tmax_violation_flagged() {
    let o = qlink(&["budget", &fixture("tmax_violation.json"), "--format", "csv"]);
    assert_eq!(o.code, (0));
    let rows = csv_rows(&stdout(&o));
    assert!(rows
        .iter()
        .any(|r| &r[0] == "verdict" && &r[2] == "tmax_violation" && &r[3] == "true"));
    assert!(rows.iter().all(|r| r.len() == 5));
}

#[test]
fn budget_resolves_catalog_dir() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixtures().join("empty.json"), dir.path().join("mine.json")).unwrap();
    let o = qlink_in(Some(dir.path()), &["budget", "mine.json"]);
    assert_eq!(o.code, (0), "{}", stderr(&o));
}

#[test]
fn reproduce_single_case() {
    let o = qlink(&["reproduce-paper", "--case", "delta2_optical_leo"]);
    assert_eq!(o.code, (0));
    let out = stdout(&o);
    assert!(out.contains("delta2_optical_leo") && out.contains("PASS"), "{out}");
    let o = qlink(&["reproduce-paper", "--case", "mfp_ism_thomson", "--format", "json"]);
    assert_eq!(o.code, (0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["pass"], true);
    assert_eq!(v[0]["unit"], "m");
}

#[test]
fn reproduce_unknown_case() {
    let o = qlink(&["reproduce-paper", "--case", "bogus"]);
    assert_eq!(o.code, (2));
    assert!(stderr(&o).contains("sigma_th_electron"));
}

#[test]
fn reproduce_all_lists_every_case() {
    let o = qlink(&["reproduce-paper", "--format", "csv"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), crate::cases::case_ids().len());
    let all_pass = rows.iter().all(|r| &r[6] == "PASS");
    assert_eq!(o.code, (if all_pass { 0 } else { 1 }));
}

#[test]
fn sweep_r_receive_monotone() {
    let o = qlink(&[
        "sweep",
        &fixture("proxima_xray.json"),
        "--vary",
        "gravity_legs[0].r_receive",
        "--from",
        "2e8 km",
        "--to",
        "4e13 km",
        "--steps",
        "10",
    ]);
    assert_eq!(o.code, (0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 10);
    let d2: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(d2.windows(2).all(|w| w[1] <= w[0]), "{d2:?}");
    let x: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(x.windows(2).all(|w| w[1] > w[0]));
    assert!(rows.iter().all(|r| &r[1] == "km"));
}

#[test]
fn sweep_single_step_matches_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = qlink(&[
        "sweep",
        &fixture("proxima_xray.json"),
        "--vary",
        "segments[0].length",
        "--from",
        "1.3 pc",
        "--to",
        "1.3 pc",
        "--steps",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.code, (0), "{}", stderr(&o));
    let rows = csv_rows(&fs::read_to_string(out).unwrap());
    assert_eq!(rows.len(), 1);
    let b = qlink(&["budget", &fixture("proxima_xray.json"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(
        rows[0][2].parse::<f64>().unwrap(),
        v["verdict"]["survival"].as_f64().unwrap()
    );
    assert_eq!(
        rows[0][4].parse::<f64>().unwrap(),
        v["verdict"]["worst_overlap_squared"].as_f64().unwrap()
    );
    assert_eq!(&rows[0][5], "false");
    assert_eq!(
        rows[0][7].parse::<f64>().unwrap(),
        v["teleport"]["mean_fidelity"].as_f64().unwrap()
    );
}

#[test]
fn sweep_energy_survival_non_increasing_for_photon_backgrounds() {
    let dir = tempfile::tempdir().unwrap();
    let scn = dir.path().join("gg.json");
    fs::write(
        &scn,
        r#"{"name": "gg", "test_photon": {"energy": "1 keV"},
            "segments": [{"label": "deep", "length": "1e6 pc", "backgrounds": ["cmb", "ebl_optical"]}]}"#,
    )
    .unwrap();
    let o = qlink(&[
        "sweep",
        scn.to_str().unwrap(),
        "--vary",
        "test_photon.energy",
        "--from",
        "1 keV",
        "--to",
        "100 keV",
        "--steps",
        "12",
    ]);
    assert_eq!(o.code, (0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    let surv: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    let tau: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(surv.windows(2).all(|w| w[1] <= w[0]));
    assert!(tau.windows(2).all(|w| w[1] > w[0]), "{tau:?}");
}

#[test]
fn sweep_unknown_parameter() {
    let o = qlink(&[
        "sweep",
        &fixture("proxima_xray.json"),
        "--vary",
        "gravity_legs[4].r_emit",
        "--from",
        "1",
        "--to",
        "2",
    ]);
    assert_eq!(o.code, (2));
    assert!(stderr(&o).contains("unknown parameter path"));
}

#[test]
fn ingest_fixture_excerpt() {
    let o = qlink(&["spectrum-ingest", &fixture("solar_excerpt.csv"), "--validate-only"]);
    assert_eq!(o.code, (0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("samples               13"), "{out}");
    assert!(out.contains("300.000 .. 2400.00 nm"), "{out}");
}

#[test]
fn ingest_non_monotone_reports_line() {
    let o = qlink(&["spectrum-ingest", &fixture("non_monotone.csv"), "--validate-only"]);
    assert_eq!(o.code, (2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn synthetic_table_irradiance_and_registration() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("bb.csv");
    let o = qlink(&["synth-spectrum", "--out", table.to_str().unwrap()]);
    assert_eq!(o.code, (0), "{}", stderr(&o));

    let catalog = dir.path().join("catalog");
    let o = qlink_in(
        Some(&catalog),
        &["spectrum-ingest", table.to_str().unwrap(), "--name", "sun_bb"],
    );
    assert_eq!(o.code, (0), "{}", stderr(&o));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("integrated irradiance")).unwrap();
    let w: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!(((w - 1361.0) / 1361.0).abs() <= 0.05, "{w}");
    assert!(catalog.join("sun_bb.csv").exists());

    let scn = dir.path().join("s.json");
    fs::write(
        &scn,
        r#"{"name": "near_sun", "test_photon": {"energy": "100 keV"},
            "segments": [{"label": "1 AU", "length": "1 AU", "backgrounds": ["sun_bb"]}]}"#,
    )
    .unwrap();
    let o = qlink_in(Some(&catalog), &["budget", scn.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.code, (0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rate = v["link"]["segments"][0]["contributions"][0]["rate"]["value"]
        .as_f64()
        .unwrap();
    assert!(rate > 7e-34 && rate < 7e-32, "{rate}");
}

#[test]
fn ingest_without_catalog_dir_needs_validate_only() {
    let o = qlink(&["spectrum-ingest", &fixture("solar_excerpt.csv")]);
    assert_eq!(o.code, (2));
    assert!(stderr(&o).contains("QLINK_CATALOG_DIR"));
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(qlink(&["budget"]).code, (2));
    assert_eq!(qlink(&["frobnicate"]).code, (2));
    assert_eq!(qlink(&["--help"]).code, (0));
}
