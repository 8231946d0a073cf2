use std::path::PathBuf;

use qlink_core::gravity::CoherenceFlag;
use qlink_core::scenario::{evaluate, load_scenario, parse_scenario, DephaseSource, Resolver};
use qlink_core::Error;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

#[test]
fn proxima_fixture() {
    let r = evaluate(&load_scenario(&fixture("proxima_xray.json")).unwrap()).unwrap();
    assert!(r.verdict.survival > 0.999);
    assert!((7.2e-9..7.8e-9).contains(&r.gravity[0].delta));
    assert_eq!(r.gravity[0].coherence_flag, Some(CoherenceFlag::Ok));
    let t = r.teleport.as_ref().unwrap();
    assert_eq!(t.dephase_source, DephaseSource::SurvivalCoupling);
    assert_eq!(t.summary.histogram.iter().sum::<u64>(), 2000);
    let tau: f64 = r
        .link
        .segments
        .iter()
        .flat_map(|s| &s.contributions)
        .map(|c| c.optical_depth)
        .sum();
    assert!(((-tau).exp() - r.verdict.survival).abs() <= 1e-12 * r.verdict.survival);
}

#[test]
fn empty_fixture() {
    let r = evaluate(&load_scenario(&fixture("empty.json")).unwrap()).unwrap();
    assert_eq!(r.verdict.survival, 1.0);
    assert_eq!(r.verdict.worst_overlap_squared, Some(1.0));
    assert!((r.teleport.unwrap().summary.mean_fidelity - 1.0).abs() < 1e-10);
}

#[test]
fn tmax_fixture() {
    let r = evaluate(&load_scenario(&fixture("tmax_violation.json")).unwrap()).unwrap();
    assert!(r.verdict.tmax_violation);
}

#[test]
fn malformed_fixture() {
    match load_scenario(&fixture("malformed.json")) {
        Err(Error::Scenario { message, .. }) => assert!(message.contains("byte 59"), "{message}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn relative_spectrum_path_resolves_next_to_scenario() {
    let text = r#"{"name": "x", "test_photon": {"energy": "100 keV"},
        "segments": [{"label": "a", "length": "1 AU",
                      "backgrounds": [{"name": "excerpt", "spectrum_csv": "solar_excerpt.csv"}]}]}"#;
    let resolver = Resolver::default().with_base_dir(fixture(""));
    let r = evaluate(&parse_scenario(text, &resolver).unwrap()).unwrap();
    assert!(r.link.segments[0].contributions[0].rate > 0.0);
    assert!(parse_scenario(text, &Resolver::default()).is_err());
}

#[test]
fn evaluation_is_deterministic() {
    let s = load_scenario(&fixture("proxima_xray.json")).unwrap();
    assert_eq!(evaluate(&s).unwrap(), evaluate(&s).unwrap());
}
