//! One-parameter sweeps over a scenario document.

use rayon::prelude::*;
use serde_json::Value;

use qlink_core::quantities::{format_exact, parse_quantity};
use qlink_core::scenario::{evaluate, scenario_from_value, Resolver, Verdict};
use qlink_core::{Error, Quantity, Result};

#[derive(Debug, Clone, PartialEq)]
enum Step<'a> {
    Key(&'a str),
    Index(usize),
}

fn unknown(path: &str, why: &str) -> Error {
    Error::Scenario {
        path: path.to_string(),
        message: format!("unknown parameter path ({why})"),
    }
}

fn parse_path(path: &str) -> Result<Vec<Step<'_>>> {
    let mut steps = Vec::new();
    for part in path.split('.') {
        let (key, mut rest) = match part.find('[') {
            Some(i) => (&part[..i], &part[i..]),
            None => (part, ""),
        };
        if key.is_empty() {
            return Err(unknown(path, "empty key"));
        }
        steps.push(Step::Key(key));
        while !rest.is_empty() {
            let close = rest.find(']').ok_or_else(|| unknown(path, "unclosed `[`"))?;
            let idx = rest[1..close].parse().map_err(|_| unknown(path, "bad index"))?;
            steps.push(Step::Index(idx));
            rest = &rest[close + 1..];
            if !rest.is_empty() && !rest.starts_with('[') {
                return Err(unknown(path, "junk after index"));
            }
        }
    }
    Ok(steps)
}

fn locate<'v>(doc: &'v mut Value, path: &str) -> Result<&'v mut Value> {
    let mut cur = doc;
    for step in parse_path(path)? {
        cur = match step {
            Step::Key(k) => cur.get_mut(k),
            Step::Index(i) => cur.get_mut(i),
        }
        .ok_or_else(|| unknown(path, "no such field"))?;
    }
    Ok(cur)
}

/// What kind of value the swept field holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldKind {
    Quantity(qlink_core::Unit),
    Integer,
    Real,
}

impl FieldKind {
    pub fn unit_label(self) -> &'static str {
        match self {
            FieldKind::Quantity(u) => u.symbol(),
            FieldKind::Integer | FieldKind::Real => "1",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub path: String,
    pub kind: FieldKind,
    /// Grid values in the unit given by `kind`.
    pub values: Vec<f64>,
}

/// A bare number takes the unit already in the document.
fn endpoint(text: &str, default_unit: qlink_core::Unit) -> Result<Quantity> {
    match text.trim().parse::<f64>() {
        Ok(v) => Ok(Quantity::new(v, default_unit)),
        Err(_) => parse_quantity(text),
    }
}

pub fn plan(doc: &Value, path: &str, from: &str, to: &str, steps: usize) -> Result<SweepPlan> {
    if steps == 0 {
        return Err(Error::Domain("--steps must be at least 1".into()));
    }
    let mut probe = doc.clone();
    let field = locate(&mut probe, path)?;
    let (kind, lo, hi) = match field {
        Value::String(s) => {
            let current = parse_quantity(s).map_err(|_| unknown(path, "field is not a quantity"))?;
            let a = endpoint(from, current.unit)?;
            let b = endpoint(to, current.unit)?;
            a.expect_dimension(current.dimension(), "--from")?;
            (FieldKind::Quantity(a.unit), a.value, b.value_in(a.unit)?)
        }
        Value::Number(n) => {
            let (a, b): (f64, f64) = (
                from.trim()
                    .parse()
                    .map_err(|_| Error::Domain(format!("--from `{from}` must be a plain number")))?,
                to.trim()
                    .parse()
                    .map_err(|_| Error::Domain(format!("--to `{to}` must be a plain number")))?,
            );
            (
                if n.is_u64() {
                    FieldKind::Integer
                } else {
                    FieldKind::Real
                },
                a,
                b,
            )
        }
        _ => return Err(unknown(path, "field is not numeric")),
    };
    let values = if steps == 1 {
        vec![lo]
    } else {
        (0..steps)
            .map(|i| {
                if i == steps - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (steps - 1) as f64
                }
            })
            .collect()
    };
    let values = match kind {
        FieldKind::Integer => {
            if values.iter().any(|v| *v < 0.0) {
                return Err(Error::Domain(format!("`{path}` takes non-negative integers")));
            }
            values.into_iter().map(f64::round).collect()
        }
        _ => values,
    };
    Ok(SweepPlan {
        path: path.to_string(),
        kind,
        values,
    })
}

pub fn apply(doc: &Value, plan: &SweepPlan, value: f64) -> Result<Value> {
    let mut out = doc.clone();
    let field = locate(&mut out, &plan.path)?;
    *field = match plan.kind {
        FieldKind::Quantity(u) => Value::String(format!("{} {}", format_exact(value), u.symbol())),
        FieldKind::Integer => Value::from(value as u64),
        FieldKind::Real => serde_json::Number::from_f64(value)
            .map(Value::Number)
            .ok_or_else(|| Error::Domain(format!("non-finite sweep value {value}")))?,
    };
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub verdict: Verdict,
    pub total_optical_depth: f64,
    pub mean_fidelity: Option<f64>,
}

/// Evaluates every grid point, possibly in parallel; rows come back in grid
/// order.
pub fn run(doc: &Value, plan: &SweepPlan, resolver: &Resolver) -> Result<Vec<SweepRow>> {
    plan.values
        .par_iter()
        .map(|&v| {
            let scenario = scenario_from_value(apply(doc, plan, v)?, resolver)?;
            let r = evaluate(&scenario)?;
            Ok(SweepRow {
                value: v,
                total_optical_depth: r.link.total_optical_depth,
                mean_fidelity: r.teleport.as_ref().map(|t| t.summary.mean_fidelity),
                verdict: r.verdict,
            })
        })
        .collect()
}

pub const SWEEP_CSV_HEADER: [&str; 8] = [
    "parameter",
    "unit",
    "survival",
    "total_optical_depth",
    "worst_overlap_squared",
    "tmax_violation",
    "tmax_marginal",
    "mean_fidelity",
];

pub fn write_csv<W: std::io::Write>(plan: &SweepPlan, rows: &[SweepRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_CSV_HEADER)?;
    let opt = |v: Option<f64>| v.map(format_exact).unwrap_or_default();
    for r in rows {
        w.write_record([
            format_exact(r.value),
            plan.kind.unit_label().to_string(),
            format_exact(r.verdict.survival),
            format_exact(r.total_optical_depth),
            opt(r.verdict.worst_overlap_squared),
            r.verdict.tmax_violation.to_string(),
            r.verdict.tmax_marginal.to_string(),
            opt(r.mean_fidelity),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn doc() -> Value {
        json!({
            "name": "s",
            "test_photon": {"energy": "1 keV"},
            "segments": [{"label": "a", "length": "1 pc", "populations": ["ism_electrons"]}],
            "teleport_trials": {"count": 10, "seed": 1, "dephase_p": 0.1}
        })
    }

    #[test]
    fn path_parsing() {
        assert_eq!(
            parse_path("segments[0].length").unwrap(),
            vec![Step::Key("segments"), Step::Index(0), Step::Key("length")]
        );
        assert!(parse_path("segments[x]").is_err());
        assert!(parse_path("a..b").is_err());
        assert!(plan(&doc(), "segments[3].length", "1", "2", 2).is_err());
        assert!(plan(&doc(), "name", "1", "2", 2).is_err());
    }

    #[test]
    fn grid_keeps_unit_and_endpoints() {
        let p = plan(&doc(), "segments[0].length", "1", "2 pc", 3).unwrap();
        assert_eq!(p.kind, FieldKind::Quantity(qlink_core::Unit::Pc));
        assert_eq!(p.values, vec![1.0, 1.5, 2.0]);
        let p = plan(&doc(), "test_photon.energy", "1 keV", "100 keV", 2).unwrap();
        assert_eq!(p.values, vec![1e3, 1e5]);
        let p = plan(&doc(), "teleport_trials.count", "1", "4", 3).unwrap();
        assert_eq!(p.values, vec![1.0, 3.0, 4.0]);
        let v = apply(&doc(), &p, 3.0).unwrap();
        assert_eq!(v["teleport_trials"]["count"], json!(3));
    }

    #[test]
    fn rows_in_grid_order() {
        let p = plan(&doc(), "segments[0].length", "1 kpc", "1 pc", 8).unwrap();
        let rows = run(&doc(), &p, &Resolver::default()).unwrap();
        let got: Vec<f64> = rows.iter().map(|r| r.value).collect();
        assert_eq!(got, p.values);
        assert!(rows.windows(2).all(|w| w[1].verdict.survival >= w[0].verdict.survival));
    }
}
