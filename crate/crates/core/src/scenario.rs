//! End-to-end channel descriptions loaded from JSON and their evaluation into
//! a combined report: link budget, gravitational fidelity per leg, and
//! optional teleportation trials.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::environments::{builtin_catalog, load_solar_spectrum, Catalog, ParticlePopulation, RadiationBackground};
use crate::error::{Error, Result};
use crate::gravity::{
    classify_path, gaussian_overlap, max_coherent_path, redshift_delta, redshift_factor, CoherenceFlag, GaussianPulse,
    RedshiftModel, SchwarzschildBody, EFFECTIVELY_ZERO,
};
use crate::propagation::{link_budget, LinkBudgetReport, PathSegment, PropagationOptions};
use crate::quantities::{Dimension, Quantity};
use crate::teleport::{run_trials, BellKind, TrialSummary};
use crate::xsec::ChargedSpecies;

pub const CATALOG_DIR_ENV: &str = "QLINK_CATALOG_DIR";

#[derive(Debug, Clone, PartialEq)]
pub struct TestPhoton {
    pub energy: Option<Quantity>,
    pub pulse: Option<GaussianPulse>,
}

impl TestPhoton {
    /// Photon energy in eV, from the explicit energy or else the pulse peak.
    pub fn energy(&self) -> Result<Quantity> {
        match (self.energy, &self.pulse) {
            (Some(e), _) => Ok(Quantity::ev(e.photon_energy_ev()?)),
            (None, Some(p)) => Ok(Quantity::ev(p.peak.photon_energy_ev()?)),
            (None, None) => Err(Error::Scenario {
                path: "test_photon".into(),
                message: "needs `energy` or `pulse`".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GravityLeg {
    pub body: SchwarzschildBody,
    pub r_emit: Quantity,
    pub r_receive: Quantity,
    pub closest_approach: Option<Quantity>,
    pub redshift_model: RedshiftModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportTrials {
    pub count: u64,
    pub seed: u64,
    pub shared: BellKind,
    /// Explicit dephasing probability; overrides the survival coupling.
    pub dephase_p: Option<f64>,
    /// Derive p = 1 − survival when no explicit value is given.
    pub couple_to_survival: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub test_photon: TestPhoton,
    pub segments: Vec<PathSegment>,
    pub gravity_legs: Vec<GravityLeg>,
    pub teleport_trials: Option<TeleportTrials>,
    pub propagation: PropagationOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DephaseSource {
    Explicit,
    /// Model choice: p = 1 − survival probability.
    SurvivalCoupling,
    Disabled,
}

impl DephaseSource {
    pub fn label(self) -> &'static str {
        match self {
            DephaseSource::Explicit => "explicit",
            DephaseSource::SurvivalCoupling => "model choice: p = 1 - survival",
            DephaseSource::Disabled => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GravityLegReport {
    pub body: String,
    pub upsilon: f64,
    pub delta: f64,
    /// Present when the test photon carries a pulse.
    pub overlap: Option<f64>,
    pub overlap_squared: Option<f64>,
    pub effectively_zero: Option<bool>,
    /// ℓ²/r_S in m, when a closest approach is given.
    pub coherence_bound: Option<f64>,
    /// Path length compared against the bound, m.
    pub path_length: f64,
    pub coherence_flag: Option<CoherenceFlag>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportReport {
    pub summary: TrialSummary,
    pub dephase_source: DephaseSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub survival: f64,
    /// Smallest Δ² over legs with a pulse.
    pub worst_overlap_squared: Option<f64>,
    pub tmax_violation: bool,
    pub tmax_marginal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelReport {
    pub name: String,
    pub test_energy: Quantity,
    pub link: LinkBudgetReport,
    pub gravity: Vec<GravityLegReport>,
    pub teleport: Option<TeleportReport>,
    pub verdict: Verdict,
}

pub fn evaluate(scenario: &Scenario) -> Result<ChannelReport> {
    if scenario.segments.is_empty() && scenario.gravity_legs.is_empty() {
        return Err(Error::Scenario {
            path: "segments".into(),
            message: "scenario needs at least one segment or gravity leg".into(),
        });
    }
    let energy = scenario.test_photon.energy()?;
    let link = link_budget(&scenario.segments, energy, &scenario.propagation)?;
    let segment_total: f64 = scenario.segments.iter().map(|s| s.length.canonical()).sum();

    let mut gravity = Vec::with_capacity(scenario.gravity_legs.len());
    for leg in &scenario.gravity_legs {
        let upsilon = redshift_factor(&leg.body, leg.r_emit, leg.r_receive, leg.redshift_model)?;
        let delta = redshift_delta(&leg.body, leg.r_emit, leg.r_receive, leg.redshift_model)?;
        let overlap = match &scenario.test_photon.pulse {
            Some(p) => Some(gaussian_overlap(p, delta)?),
            None => None,
        };
        let path_length = if scenario.segments.is_empty() {
            (leg.r_receive.canonical() - leg.r_emit.canonical()).abs()
        } else {
            segment_total
        };
        let (bound, flag) = match leg.closest_approach {
            Some(l) => {
                let b = max_coherent_path(&leg.body, l)?;
                (
                    Some(b.canonical()),
                    Some(classify_path(Quantity::meters(path_length), b)?),
                )
            }
            None => (None, None),
        };
        let overlap_squared = overlap.map(|d| d * d);
        gravity.push(GravityLegReport {
            body: leg.body.name.clone(),
            upsilon,
            delta,
            overlap,
            overlap_squared,
            effectively_zero: overlap_squared.map(|d2| d2 < EFFECTIVELY_ZERO),
            coherence_bound: bound,
            path_length,
            coherence_flag: flag,
        });
    }

    let teleport = match &scenario.teleport_trials {
        Some(t) => {
            let (p, source) = match (t.dephase_p, t.couple_to_survival) {
                (Some(p), _) => (p, DephaseSource::Explicit),
                (None, true) => ((1.0 - link.survival).clamp(0.0, 1.0), DephaseSource::SurvivalCoupling),
                (None, false) => (0.0, DephaseSource::Disabled),
            };
            Some(TeleportReport {
                summary: run_trials(t.count, t.seed, t.shared, p)?,
                dephase_source: source,
            })
        }
        None => None,
    };

    let verdict = Verdict {
        survival: link.survival,
        worst_overlap_squared: gravity.iter().filter_map(|g| g.overlap_squared).reduce(f64::min),
        tmax_violation: gravity
            .iter()
            .any(|g| g.coherence_flag == Some(CoherenceFlag::Violated)),
        tmax_marginal: gravity
            .iter()
            .any(|g| g.coherence_flag == Some(CoherenceFlag::Marginal)),
    };
    Ok(ChannelReport {
        name: scenario.name.clone(),
        test_energy: energy,
        link,
        gravity,
        teleport,
        verdict,
    })
}

// ---------------------------------------------------------------------------
// JSON form

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    test_photon: RawTestPhoton,
    #[serde(default)]
    segments: Vec<RawSegment>,
    #[serde(default)]
    gravity_legs: Vec<RawGravityLeg>,
    #[serde(default)]
    teleport_trials: Option<RawTrials>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTestPhoton {
    energy: Option<Quantity>,
    pulse: Option<RawPulse>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPulse {
    peak: Quantity,
    width: Quantity,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSegment {
    label: String,
    length: Quantity,
    #[serde(default)]
    populations: Vec<Ref<RawPopulation>>,
    #[serde(default)]
    backgrounds: Vec<Ref<RawBackground>>,
    #[serde(default)]
    mfp_overrides: Vec<RawOverride>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Ref<T> {
    Name(String),
    Inline(T),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPopulation {
    name: String,
    species: String,
    density: Option<Quantity>,
    flux: Option<Quantity>,
    flux_lower: Option<Quantity>,
    energy_range: Option<(Quantity, Quantity)>,
    radial_scaling_exponent: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBackground {
    name: String,
    blackbody: Option<Quantity>,
    spectrum_csv: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOverride {
    label: String,
    mfp: Quantity,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGravityLeg {
    body: Ref<RawBody>,
    r_emit: Quantity,
    r_receive: Quantity,
    closest_approach: Option<Quantity>,
    #[serde(default)]
    redshift_model: RedshiftModel,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBody {
    name: String,
    schwarzschild_radius: Quantity,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrials {
    count: u64,
    seed: u64,
    #[serde(default = "default_shared")]
    shared: BellKind,
    dephase_p: Option<f64>,
    #[serde(default = "default_true")]
    couple_to_survival: bool,
}

fn default_shared() -> BellKind {
    BellKind::PsiMinus
}

fn default_true() -> bool {
    true
}

/// Where catalog names and relative spectrum paths are looked up.
#[derive(Debug, Clone)]
pub struct Resolver {
    pub catalog: Catalog,
    /// Directory of the scenario file, for relative paths.
    pub base_dir: Option<PathBuf>,
    /// Extra directory of `<name>.csv` spectra and scenario files.
    pub catalog_dir: Option<PathBuf>,
}

impl Default for Resolver {
    fn default() -> Self {
        Self {
            catalog: builtin_catalog(),
            base_dir: None,
            catalog_dir: None,
        }
    }
}

impl Resolver {
    /// Builtin catalog plus the directory named by `QLINK_CATALOG_DIR`.
    pub fn from_env() -> Self {
        Self {
            catalog_dir: std::env::var_os(CATALOG_DIR_ENV).map(PathBuf::from),
            ..Self::default()
        }
    }

    pub fn with_base_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.base_dir = Some(dir.into());
        self
    }

    fn find_file(&self, relative: &str) -> Option<PathBuf> {
        let p = Path::new(relative);
        if p.is_absolute() {
            return p.exists().then(|| p.to_path_buf());
        }
        [&self.base_dir, &self.catalog_dir]
            .into_iter()
            .flatten()
            .map(|d| d.join(p))
            .find(|c| c.exists())
    }

    fn population(&self, r: &Ref<RawPopulation>, path: &str) -> Result<ParticlePopulation> {
        match r {
            Ref::Name(name) => self.catalog.population(name).cloned().map_err(|e| at(path, e)),
            Ref::Inline(raw) => inline_population(raw).map_err(|e| at(path, e)),
        }
    }

    fn background(&self, r: &Ref<RawBackground>, path: &str) -> Result<RadiationBackground> {
        match r {
            Ref::Name(name) => match self.catalog.background(name) {
                Ok(b) => Ok(b.clone()),
                Err(Error::NotFound { .. }) => match self
                    .find_file(&format!("{name}.csv"))
                    .filter(|_| self.catalog_dir.is_some())
                {
                    Some(file) => self.load_csv(name, &file, path),
                    None => Err(at(path, Error::NotFound { name: name.clone() })),
                },
                Err(e) => Err(at(path, e)),
            },
            Ref::Inline(raw) => match (&raw.blackbody, &raw.spectrum_csv) {
                (Some(t), None) => RadiationBackground::blackbody(raw.name.clone(), *t).map_err(|e| at(path, e)),
                (None, Some(file)) => {
                    let found = self.find_file(file).ok_or_else(|| Error::Scenario {
                        path: format!("{path}.spectrum_csv"),
                        message: format!("file `{file}` not found"),
                    })?;
                    self.load_csv(&raw.name, &found, path)
                }
                _ => Err(Error::Scenario {
                    path: path.into(),
                    message: "inline background needs exactly one of `blackbody`, `spectrum_csv`".into(),
                }),
            },
        }
    }

    fn load_csv(&self, name: &str, file: &Path, path: &str) -> Result<RadiationBackground> {
        let f = fs::File::open(file).map_err(|e| at(path, Error::Io(format!("{}: {e}", file.display()))))?;
        load_solar_spectrum(name, f).map_err(|e| at(path, e))
    }

    fn body(&self, r: &Ref<RawBody>, path: &str) -> Result<SchwarzschildBody> {
        match r {
            Ref::Name(name) => SchwarzschildBody::by_name(name).map_err(|e| at(path, e)),
            Ref::Inline(raw) => {
                SchwarzschildBody::new(raw.name.clone(), raw.schwarzschild_radius).map_err(|e| at(path, e))
            }
        }
    }
}

fn at(path: &str, e: Error) -> Error {
    match e {
        Error::Scenario { .. } => e,
        other => Error::Scenario {
            path: path.to_string(),
            message: other.to_string(),
        },
    }
}

fn inline_population(raw: &RawPopulation) -> Result<ParticlePopulation> {
    let species = ChargedSpecies::by_name(&raw.species)?;
    let mut p = match (raw.density, raw.flux) {
        (Some(n), None) => {
            if raw.flux_lower.is_some() {
                return Err(Error::Domain("`flux_lower` only applies to flux populations".into()));
            }
            ParticlePopulation::with_density(raw.name.clone(), species, n)?
        }
        (None, Some(phi)) => ParticlePopulation::with_flux_range(raw.name.clone(), species, raw.flux_lower, phi)?,
        _ => {
            return Err(Error::Domain(
                "population needs exactly one of `density`, `flux`".into(),
            ))
        }
    };
    if let Some((lo, hi)) = raw.energy_range {
        lo.expect_dimension(Dimension::Energy, "energy range")?;
        hi.expect_dimension(Dimension::Energy, "energy range")?;
        p = p.energy_range_ev(lo.canonical(), hi.canonical());
    }
    if let Some(k) = raw.radial_scaling_exponent {
        p = p.radial_exponent(k);
    }
    Ok(p)
}

fn build(raw: RawScenario, resolver: &Resolver) -> Result<Scenario> {
    let pulse = match raw.test_photon.pulse {
        Some(p) => Some(GaussianPulse::new(p.peak, p.width).map_err(|e| at("test_photon.pulse", e))?),
        None => None,
    };
    let test_photon = TestPhoton {
        energy: raw.test_photon.energy,
        pulse,
    };
    test_photon.energy().map_err(|e| at("test_photon", e))?;

    let mut segments = Vec::with_capacity(raw.segments.len());
    for (i, s) in raw.segments.iter().enumerate() {
        let base = format!("segments[{i}]");
        let mut seg = PathSegment::new(s.label.clone(), s.length).map_err(|e| at(&format!("{base}.length"), e))?;
        for (j, p) in s.populations.iter().enumerate() {
            seg = seg.with_population(resolver.population(p, &format!("{base}.populations[{j}]"))?);
        }
        for (j, b) in s.backgrounds.iter().enumerate() {
            seg = seg.with_background(resolver.background(b, &format!("{base}.backgrounds[{j}]"))?);
        }
        for (j, o) in s.mfp_overrides.iter().enumerate() {
            seg = seg
                .with_override(o.label.clone(), o.mfp)
                .map_err(|e| at(&format!("{base}.mfp_overrides[{j}].mfp"), e))?;
        }
        segments.push(seg);
    }

    let mut gravity_legs = Vec::with_capacity(raw.gravity_legs.len());
    for (i, g) in raw.gravity_legs.iter().enumerate() {
        let base = format!("gravity_legs[{i}]");
        let body = resolver.body(&g.body, &format!("{base}.body"))?;
        for (key, q) in [
            ("r_emit", Some(g.r_emit)),
            ("r_receive", Some(g.r_receive)),
            ("closest_approach", g.closest_approach),
        ] {
            if let Some(q) = q {
                q.expect_dimension(Dimension::Length, key)
                    .map_err(|e| at(&format!("{base}.{key}"), e))?;
            }
        }
        gravity_legs.push(GravityLeg {
            body,
            r_emit: g.r_emit,
            r_receive: g.r_receive,
            closest_approach: g.closest_approach,
            redshift_model: g.redshift_model,
        });
    }

    if segments.is_empty() && gravity_legs.is_empty() {
        return Err(Error::Scenario {
            path: "segments".into(),
            message: "scenario needs at least one segment or gravity leg".into(),
        });
    }

    let teleport_trials = match raw.teleport_trials {
        Some(t) => {
            if t.count == 0 {
                return Err(Error::Scenario {
                    path: "teleport_trials.count".into(),
                    message: "must be positive".into(),
                });
            }
            if let Some(p) = t.dephase_p {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Scenario {
                        path: "teleport_trials.dephase_p".into(),
                        message: format!("must lie in [0, 1], got {p}"),
                    });
                }
            }
            Some(TeleportTrials {
                count: t.count,
                seed: t.seed,
                shared: t.shared,
                dephase_p: t.dephase_p,
                couple_to_survival: t.couple_to_survival,
            })
        }
        None => None,
    };

    Ok(Scenario {
        name: raw.name,
        test_photon,
        segments,
        gravity_legs,
        teleport_trials,
        propagation: PropagationOptions::default(),
    })
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

/// Parses a scenario document. Unknown keys are rejected; errors carry the
/// offending key path and, for syntax errors, the byte offset.
pub fn parse_scenario(text: &str, resolver: &Resolver) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawScenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.inner();
        let offset = byte_offset(text, inner.line(), inner.column());
        Error::Scenario {
            path: if path == "." { "(root)".into() } else { path },
            message: format!("{inner} (byte {offset})"),
        }
    })?;
    build(raw, resolver)
}

/// Builds a scenario from an already-parsed JSON value.
pub fn scenario_from_value(value: serde_json::Value, resolver: &Resolver) -> Result<Scenario> {
    let raw: RawScenario = serde_path_to_error::deserialize(value).map_err(|e| Error::Scenario {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    build(raw, resolver)
}

/// Reads a scenario file; relative spectrum paths resolve against its
/// directory, then `QLINK_CATALOG_DIR`. A bare file name that does not exist
/// is also looked up in `QLINK_CATALOG_DIR`.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    load_scenario_with(path, Resolver::from_env())
}

/// As [`load_scenario`], with an explicit resolver instead of the environment.
pub fn load_scenario_with(path: &Path, mut resolver: Resolver) -> Result<Scenario> {
    let file = resolve_scenario_path(path, resolver.catalog_dir.as_deref())?;
    let text = fs::read_to_string(&file).map_err(|e| Error::Io(format!("{}: {e}", file.display())))?;
    if let Some(dir) = file.parent() {
        resolver = resolver.with_base_dir(dir);
    }
    parse_scenario(&text, &resolver)
}

pub fn resolve_scenario_path(path: &Path, catalog_dir: Option<&Path>) -> Result<PathBuf> {
    if path.exists() {
        return Ok(path.to_path_buf());
    }
    if let Some(dir) = catalog_dir {
        let candidate = dir.join(path);
        if candidate.exists() {
            return Ok(candidate);
        }
    }
    Err(Error::Io(format!("{}: no such file", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::PC_IN_M;
    use crate::quantities::Unit;
    use approx::assert_relative_eq;

    const PROXIMA: &str = r#"{
        "name": "proxima_xray",
        "test_photon": {"energy": "100 keV"},
        "segments": [{"label": "local ism", "length": "1.3 pc", "populations": ["ism_electrons"]}],
        "gravity_legs": [{"body": "sun", "r_emit": "4e13 km", "r_receive": "1e8 km"}]
    }"#;

    fn parse(text: &str) -> Result<Scenario> {
        parse_scenario(text, &Resolver::default())
    }

    fn scenario_error(r: Result<Scenario>) -> (String, String) {
        match r {
            Err(Error::Scenario { path, message }) => (path, message),
            other => panic!("expected scenario error, got {other:?}"),
        }
    }

    #[test]
    fn proxima() {
        let s = parse(PROXIMA).unwrap();
        let r = evaluate(&s).unwrap();
        assert!(r.verdict.survival > 0.999);
        let d = r.gravity[0].delta;
        assert!((7.2e-9..7.8e-9).contains(&d), "{d}");
        assert_eq!(r.verdict.worst_overlap_squared, None);
        assert!(!r.verdict.tmax_violation);
    }

    #[test]
    fn empty_environment() {
        let s = parse(
            r#"{"name": "flat", "test_photon": {"pulse": {"peak": "600 THz", "width": "7 MHz"}},
                "segments": [{"label": "vacuum", "length": "1 AU"}],
                "gravity_legs": [{"body": "earth", "r_emit": "7000 km", "r_receive": "7000 km"}]}"#,
        )
        .unwrap();
        let r = evaluate(&s).unwrap();
        assert_eq!(r.verdict.survival, 1.0);
        assert_eq!(r.verdict.worst_overlap_squared, Some(1.0));
        assert_relative_eq!(
            r.test_energy.value,
            600e12 * crate::constants::H_EV_S,
            max_relative = 1e-15
        );
    }

    #[test]
    fn tmax_violation() {
        let s = parse(
            r#"{"name": "far", "test_photon": {"energy": "1 eV"},
                "segments": [{"label": "long", "length": "100 pc"}],
                "gravity_legs": [{"body": {"name": "sun3", "schwarzschild_radius": "3 km"},
                                  "r_emit": "1 AU", "r_receive": "2 AU", "closest_approach": "6e7 km"}]}"#,
        )
        .unwrap();
        let r = evaluate(&s).unwrap();
        assert!(r.verdict.tmax_violation);
        assert_eq!(r.gravity[0].coherence_flag, Some(CoherenceFlag::Violated));
        assert_relative_eq!(r.gravity[0].path_length, 100.0 * PC_IN_M, max_relative = 1e-15);
    }

    #[test]
    fn unknown_key_rejected_with_path() {
        let (path, msg) = scenario_error(parse(
            r#"{"name": "x", "test_photon": {"energy": "1 eV"},
                "segments": [{"label": "a", "length": "1 pc", "colour": "red"}]}"#,
        ));
        assert_eq!(path, "segments[0].colour");
        assert!(msg.contains("colour"), "{msg}");
        let (path, _) = scenario_error(parse(r#"{"name": "x", "test_photon": {"energy": "1 eV"}, "extra": 1}"#));
        assert_eq!(path, "extra");
    }

    #[test]
    fn malformed_json_reports_byte_offset() {
        let text = "{\n  \"name\": \"x\",\n  \"test_photon\": {\"energy\": \"1 eV\"\n}";
        let (_, msg) = scenario_error(parse(text));
        assert!(msg.contains("byte"), "{msg}");
    }

    #[test]
    fn bad_quantity_and_unresolved_names() {
        let (path, msg) = scenario_error(parse(
            r#"{"name": "x", "test_photon": {"energy": "1 parsec"}, "segments": [{"label": "a", "length": "1 pc"}]}"#,
        ));
        assert_eq!(path, "test_photon.energy");
        assert!(msg.contains("unknown unit"), "{msg}");
        let (path, msg) = scenario_error(parse(
            r#"{"name": "x", "test_photon": {"energy": "1 eV"},
                "segments": [{"label": "a", "length": "1 pc", "populations": ["nope"]}]}"#,
        ));
        assert_eq!(path, "segments[0].populations[0]");
        assert!(msg.contains("nope"));
        let (path, _) = scenario_error(parse(
            r#"{"name": "x", "test_photon": {"energy": "1 eV"},
                "segments": [{"label": "a", "length": "1 pc", "backgrounds": ["ism_electrons"]}]}"#,
        ));
        assert_eq!(path, "segments[0].backgrounds[0]");
    }

    #[test]
    fn needs_segment_or_leg() {
        let (path, _) = scenario_error(parse(r#"{"name": "x", "test_photon": {"energy": "1 eV"}}"#));
        assert_eq!(path, "segments");
    }

    #[test]
    fn energy_above_electron_mass_is_domain_error() {
        let s = parse(
            r#"{"name": "x", "test_photon": {"energy": "2 MeV"},
                "segments": [{"label": "a", "length": "1 pc", "backgrounds": ["cmb"]}]}"#,
        )
        .unwrap();
        assert!(matches!(evaluate(&s), Err(Error::Domain(_))));
    }

    #[test]
    fn inline_population_and_override() {
        let s = parse(
            r#"{"name": "x", "test_photon": {"energy": "1 keV"},
                "segments": [{"label": "a", "length": "1 pc",
                  "populations": [{"name": "cloud", "species": "electron", "density": "10 cm^-3"},
                                  {"name": "beam", "species": "proton", "flux": "1e5 cm^-2 s^-1", "energy_range": ["1 MeV", "5 GeV"]}],
                  "mfp_overrides": [{"label": "dust", "mfp": "2 pc"}]}]}"#,
        )
        .unwrap();
        let r = evaluate(&s).unwrap();
        assert_eq!(r.link.segments[0].contributions.len(), 3);
        assert!(parse(
            r#"{"name": "x", "test_photon": {"energy": "1 keV"},
                "segments": [{"label": "a", "length": "1 pc",
                  "populations": [{"name": "c", "species": "electron", "density": "1 cm^-3", "flux": "1 cm^-2 s^-1"}]}]}"#
        )
        .is_err());
    }

    #[test]
    fn zero_density_population_is_inert() {
        let with = parse(
            r#"{"name": "x", "test_photon": {"energy": "100 keV"},
                "segments": [{"label": "a", "length": "1.3 pc",
                  "populations": ["ism_electrons", {"name": "void", "species": "proton", "density": "0 cm^-3"}]}],
                "teleport_trials": {"count": 200, "seed": 3}}"#,
        )
        .unwrap();
        let without = parse(
            r#"{"name": "x", "test_photon": {"energy": "100 keV"},
                "segments": [{"label": "a", "length": "1.3 pc", "populations": ["ism_electrons"]}],
                "teleport_trials": {"count": 200, "seed": 3}}"#,
        )
        .unwrap();
        let (a, b) = (evaluate(&with).unwrap(), evaluate(&without).unwrap());
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(a.link.total_optical_depth, b.link.total_optical_depth);
        assert_eq!(a.teleport, b.teleport);
    }

    #[test]
    fn survival_coupling_and_determinism() {
        let text = r#"{"name": "x", "test_photon": {"energy": "100 keV"},
            "segments": [{"label": "a", "length": "1 kpc", "populations": ["hii_electrons"]}],
            "teleport_trials": {"count": 300, "seed": 11}}"#;
        let s = parse(text).unwrap();
        let r1 = evaluate(&s).unwrap();
        let r2 = evaluate(&s).unwrap();
        assert_eq!(r1, r2);
        let t = r1.teleport.unwrap();
        assert_eq!(t.dephase_source, DephaseSource::SurvivalCoupling);
        assert_relative_eq!(t.summary.dephase_p, 1.0 - r1.verdict.survival, max_relative = 1e-15);
        assert!(t.summary.mean_fidelity < 1.0);

        let off = parse(&text.replace(r#""seed": 11"#, r#""seed": 11, "couple_to_survival": false"#)).unwrap();
        let t = evaluate(&off).unwrap().teleport.unwrap();
        assert_eq!(t.dephase_source, DephaseSource::Disabled);
        assert!((t.summary.mean_fidelity - 1.0).abs() < 1e-10);
    }

    #[test]
    fn verdict_survival_recomputable() {
        let s = parse(
            r#"{"name": "x", "test_photon": {"energy": "100 keV"},
                "segments": [{"label": "a", "length": "3 kpc", "populations": ["ism_electrons", "lic_protons"]},
                             {"label": "b", "length": "20 pc", "populations": ["hii_electrons"], "backgrounds": ["cmb"]}]}"#,
        )
        .unwrap();
        let r = evaluate(&s).unwrap();
        let tau: f64 = r
            .link
            .segments
            .iter()
            .flat_map(|s| &s.contributions)
            .map(|c| c.optical_depth)
            .sum();
        assert_relative_eq!(r.verdict.survival, (-tau).exp(), max_relative = 1e-12);
    }

    #[test]
    fn spectrum_csv_resolution() {
        let dir = std::env::temp_dir().join(format!("qlink-scn-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        fs::write(dir.join("flat.csv"), "wavelength_nm,irradiance_W_m2_nm\n400,1\n800,1\n").unwrap();
        let resolver = Resolver {
            catalog_dir: Some(dir.clone()),
            ..Resolver::default()
        };
        let by_name = parse_scenario(
            r#"{"name": "x", "test_photon": {"energy": "100 keV"},
                "segments": [{"label": "a", "length": "1 AU", "backgrounds": ["flat"]}]}"#,
            &resolver,
        )
        .unwrap();
        let inline = parse_scenario(
            r#"{"name": "x", "test_photon": {"energy": "100 keV"},
                "segments": [{"label": "a", "length": "1 AU", "backgrounds": [{"name": "flat", "spectrum_csv": "flat.csv"}]}]}"#,
            &resolver,
        )
        .unwrap();
        assert_eq!(by_name.segments[0].backgrounds, inline.segments[0].backgrounds);
        let missing = parse_scenario(
            r#"{"name": "x", "test_photon": {"energy": "100 keV"},
                "segments": [{"label": "a", "length": "1 AU", "backgrounds": ["flat"]}]}"#,
            &Resolver::default(),
        );
        assert!(missing.is_err());
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn value_round_trip() {
        let v: serde_json::Value = serde_json::from_str(PROXIMA).unwrap();
        let a = scenario_from_value(v, &Resolver::default()).unwrap();
        assert_eq!(a, parse(PROXIMA).unwrap());
        assert_eq!(a.segments[0].length, Quantity::new(1.3, Unit::Pc));
    }
}
