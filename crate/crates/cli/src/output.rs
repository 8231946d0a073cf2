use std::io::Write;

use clap::ValueEnum;
use serde_json::{json, Value};

use qlink_core::gravity::CoherenceFlag;
use qlink_core::propagation::ContributionKind;
use qlink_core::quantities::{format_exact, format_sig6};
use qlink_core::scenario::ChannelReport;
use qlink_core::teleport::BellKind;

use crate::cases::CaseResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

/// JSON number, or the exact string form for non-finite values.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::String(format_exact(v))
    }
}

fn with_unit(v: f64, unit: &str) -> Value {
    json!({ "value": num(v), "unit": unit })
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

fn kind_name(k: ContributionKind) -> &'static str {
    match k {
        ContributionKind::Population => "population",
        ContributionKind::Background => "background",
        ContributionKind::Override => "override",
    }
}

fn flag_name(f: CoherenceFlag) -> &'static str {
    match f {
        CoherenceFlag::Ok => "ok",
        CoherenceFlag::Marginal => "marginal",
        CoherenceFlag::Violated => "violated",
    }
}

fn bell_name(k: BellKind) -> &'static str {
    match k {
        BellKind::PsiMinus => "psi_minus",
        BellKind::PsiPlus => "psi_plus",
        BellKind::PhiMinus => "phi_minus",
        BellKind::PhiPlus => "phi_plus",
    }
}

pub fn report_json(r: &ChannelReport) -> Value {
    let segments: Vec<Value> = r
        .link
        .segments
        .iter()
        .map(|s| {
            json!({
                "label": s.label,
                "length": with_unit(s.length, "m"),
                "optical_depth": num(s.optical_depth),
                "contributions": s.contributions.iter().map(|c| json!({
                    "label": c.label,
                    "kind": kind_name(c.kind),
                    "rate": with_unit(c.rate, "s^-1"),
                    "mean_free_path": with_unit(c.mean_free_path, "m"),
                    "optical_depth": num(c.optical_depth),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let gravity: Vec<Value> = r
        .gravity
        .iter()
        .map(|g| {
            json!({
                "body": g.body,
                "upsilon": num(g.upsilon),
                "delta": num(g.delta),
                "overlap": opt(g.overlap),
                "overlap_squared": opt(g.overlap_squared),
                "effectively_zero": g.effectively_zero,
                "coherence_bound": g.coherence_bound.map(|b| with_unit(b, "m")),
                "path_length": with_unit(g.path_length, "m"),
                "coherence_flag": g.coherence_flag.map(flag_name),
            })
        })
        .collect();
    let teleport = r.teleport.as_ref().map(|t| {
        let hist: serde_json::Map<String, Value> = BellKind::ALL
            .iter()
            .zip(t.summary.histogram)
            .map(|(k, n)| (bell_name(*k).to_string(), json!(n)))
            .collect();
        json!({
            "count": t.summary.count,
            "seed": t.summary.seed,
            "dephase_p": num(t.summary.dephase_p),
            "dephase_source": t.dephase_source.label(),
            "mean_fidelity": num(t.summary.mean_fidelity),
            "histogram": hist,
        })
    });
    json!({
        "name": r.name,
        "test_energy": with_unit(r.test_energy.value, r.test_energy.unit.symbol()),
        "link": {
            "segments": segments,
            "total_optical_depth": num(r.link.total_optical_depth),
            "survival": num(r.link.survival),
        },
        "gravity": gravity,
        "teleport": teleport,
        "verdict": {
            "survival": num(r.verdict.survival),
            "worst_overlap_squared": opt(r.verdict.worst_overlap_squared),
            "tmax_violation": r.verdict.tmax_violation,
            "tmax_marginal": r.verdict.tmax_marginal,
        },
    })
}

pub const REPORT_CSV_HEADER: [&str; 5] = ["section", "item", "field", "value", "unit"];

/// Long-form rows: section, item, field, exact value, unit.
pub fn report_rows(r: &ChannelReport) -> Vec<[String; 5]> {
    let mut rows = Vec::new();
    let mut push = |section: &str, item: &str, field: &str, value: String, unit: &str| {
        rows.push([section.into(), item.into(), field.into(), value, unit.into()]);
    };
    let x = format_exact;
    push(
        "scenario",
        &r.name,
        "test_energy",
        x(r.test_energy.value),
        r.test_energy.unit.symbol(),
    );
    for s in &r.link.segments {
        push("segment", &s.label, "length", x(s.length), "m");
        push("segment", &s.label, "optical_depth", x(s.optical_depth), "1");
        for c in &s.contributions {
            let item = format!("{}/{}", s.label, c.label);
            push("contribution", &item, "kind", kind_name(c.kind).into(), "");
            push("contribution", &item, "rate", x(c.rate), "s^-1");
            push("contribution", &item, "mean_free_path", x(c.mean_free_path), "m");
            push("contribution", &item, "optical_depth", x(c.optical_depth), "1");
        }
    }
    push("link", "", "total_optical_depth", x(r.link.total_optical_depth), "1");
    push("link", "", "survival", x(r.link.survival), "1");
    for (i, g) in r.gravity.iter().enumerate() {
        let item = format!("{i}:{}", g.body);
        push("gravity", &item, "upsilon", x(g.upsilon), "1");
        push("gravity", &item, "delta", x(g.delta), "1");
        if let (Some(o), Some(o2), Some(z)) = (g.overlap, g.overlap_squared, g.effectively_zero) {
            push("gravity", &item, "overlap", x(o), "1");
            push("gravity", &item, "overlap_squared", x(o2), "1");
            push("gravity", &item, "effectively_zero", z.to_string(), "");
        }
        push("gravity", &item, "path_length", x(g.path_length), "m");
        if let (Some(b), Some(f)) = (g.coherence_bound, g.coherence_flag) {
            push("gravity", &item, "coherence_bound", x(b), "m");
            push("gravity", &item, "coherence_flag", flag_name(f).into(), "");
        }
    }
    if let Some(t) = &r.teleport {
        push("teleport", "", "count", t.summary.count.to_string(), "");
        push("teleport", "", "seed", t.summary.seed.to_string(), "");
        push("teleport", "", "dephase_p", x(t.summary.dephase_p), "1");
        push("teleport", "", "dephase_source", t.dephase_source.label().into(), "");
        push("teleport", "", "mean_fidelity", x(t.summary.mean_fidelity), "1");
        for (k, n) in BellKind::ALL.iter().zip(t.summary.histogram) {
            push("teleport", bell_name(*k), "outcomes", n.to_string(), "");
        }
    }
    push("verdict", "", "survival", x(r.verdict.survival), "1");
    if let Some(w) = r.verdict.worst_overlap_squared {
        push("verdict", "", "worst_overlap_squared", x(w), "1");
    }
    push(
        "verdict",
        "",
        "tmax_violation",
        r.verdict.tmax_violation.to_string(),
        "",
    );
    push("verdict", "", "tmax_marginal", r.verdict.tmax_marginal.to_string(), "");
    rows
}

pub fn write_report<W: Write>(r: &ChannelReport, format: OutputFormat, mut out: W) -> std::io::Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &report_json(r))?;
            writeln!(out)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(REPORT_CSV_HEADER)?;
            for row in report_rows(r) {
                w.write_record(&row)?;
            }
            w.flush()
        }
        OutputFormat::Table => write_report_table(r, out),
    }
}

fn write_report_table<W: Write>(r: &ChannelReport, mut out: W) -> std::io::Result<()> {
    let s = format_sig6;
    writeln!(
        out,
        "scenario {}  test photon {} eV",
        r.name,
        s(r.test_energy.canonical())
    )?;
    for seg in &r.link.segments {
        writeln!(
            out,
            "\nsegment {}  length {} m  tau {}",
            seg.label,
            s(seg.length),
            s(seg.optical_depth)
        )?;
        writeln!(
            out,
            "  {:<24} {:<11} {:>13} {:>13} {:>13}",
            "contribution", "kind", "rate [s^-1]", "mfp [m]", "tau"
        )?;
        for c in &seg.contributions {
            writeln!(
                out,
                "  {:<24} {:<11} {:>13} {:>13} {:>13}",
                c.label,
                kind_name(c.kind),
                s(c.rate),
                s(c.mean_free_path),
                s(c.optical_depth)
            )?;
        }
    }
    writeln!(
        out,
        "\ntotal tau {}  survival {}",
        s(r.link.total_optical_depth),
        s(r.link.survival)
    )?;
    for g in &r.gravity {
        write!(
            out,
            "\ngravity {}  upsilon {}  delta {}",
            g.body,
            s(g.upsilon),
            s(g.delta)
        )?;
        if let Some(o2) = g.overlap_squared {
            write!(out, "  overlap^2 {}", s(o2))?;
            if g.effectively_zero == Some(true) {
                write!(out, " (effectively zero)")?;
            }
        }
        writeln!(out)?;
        if let (Some(b), Some(f)) = (g.coherence_bound, g.coherence_flag) {
            writeln!(out, "  path {} m  bound {} m  {}", s(g.path_length), s(b), flag_name(f))?;
        }
    }
    if let Some(t) = &r.teleport {
        writeln!(
            out,
            "\nteleport {} trials  seed {}  dephase p {} ({})  mean fidelity {}",
            t.summary.count,
            t.summary.seed,
            s(t.summary.dephase_p),
            t.dephase_source.label(),
            s(t.summary.mean_fidelity)
        )?;
        let hist: Vec<String> = BellKind::ALL
            .iter()
            .zip(t.summary.histogram)
            .map(|(k, n)| format!("{}={n}", bell_name(*k)))
            .collect();
        writeln!(out, "  outcomes {}", hist.join(" "))?;
    }
    writeln!(out, "\nverdict")?;
    writeln!(out, "  survival              {}", s(r.verdict.survival))?;
    let worst = r.verdict.worst_overlap_squared.map_or_else(|| "n/a".to_string(), s);
    writeln!(out, "  worst overlap^2       {worst}")?;
    writeln!(out, "  t_max violation       {}", r.verdict.tmax_violation)?;
    writeln!(out, "  t_max marginal        {}", r.verdict.tmax_marginal)
}

pub const CASE_CSV_HEADER: [&str; 8] = [
    "case",
    "unit",
    "reference",
    "computed",
    "relative_deviation",
    "tolerance",
    "status",
    "description",
];

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn write_cases<W: Write>(results: &[CaseResult], format: OutputFormat, mut out: W) -> std::io::Result<()> {
    match format {
        OutputFormat::Json => {
            let rows: Vec<Value> = results
                .iter()
                .map(|c| {
                    json!({
                        "case": c.id,
                        "description": c.description,
                        "unit": c.unit,
                        "reference": num(c.reference),
                        "computed": num(c.computed),
                        "relative_deviation": num(c.relative_deviation()),
                        "tolerance": c.tolerance.describe(),
                        "pass": c.pass,
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CASE_CSV_HEADER)?;
            for c in results {
                w.write_record([
                    c.id,
                    c.unit,
                    &format_exact(c.reference),
                    &format_exact(c.computed),
                    &format_exact(c.relative_deviation()),
                    &c.tolerance.describe(),
                    status(c.pass),
                    c.description,
                ])?;
            }
            w.flush()
        }
        OutputFormat::Table => {
            writeln!(
                out,
                "{:<30} {:>13} {:>13} {:>11} {:<22} {:<6} unit",
                "case", "reference", "computed", "rel.dev", "tolerance", "status"
            )?;
            for c in results {
                let dev = c.relative_deviation();
                let dev = if dev.is_nan() {
                    "n/a".to_string()
                } else {
                    format_sig6(dev)
                };
                writeln!(
                    out,
                    "{:<30} {:>13} {:>13} {:>11} {:<22} {:<6} {}",
                    c.id,
                    format_sig6(c.reference),
                    format_sig6(c.computed),
                    dev,
                    c.tolerance.describe(),
                    status(c.pass),
                    c.unit
                )?;
            }
            let failed = results.iter().filter(|c| !c.pass).count();
            writeln!(
                out,
                "\n{} cases, {} passed, {} failed",
                results.len(),
                results.len() - failed,
                failed
            )
        }
    }
}
