use std::io::{Read, Write};

use super::spectrum::{RadiationBackground, Spectrum};
use crate::error::{Error, Result};

pub const SPECTRUM_CSV_HEADER: [&str; 2] = ["wavelength_nm", "irradiance_W_m2_nm"];

/// Reads a two-column solar spectrum CSV. Lines starting with `#` are
/// comments; LF and CRLF endings are both accepted.
pub fn load_solar_spectrum<R: Read>(name: &str, reader: R) -> Result<RadiationBackground> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);

    let headers = rdr.headers().map_err(|e| csv_error(&e, 1))?.clone();
    let header_line = headers.position().map(|p| p.line()).unwrap_or(1);
    let got: Vec<&str> = headers.iter().collect();
    if got != SPECTRUM_CSV_HEADER {
        return Err(Error::Spectrum {
            line: header_line,
            message: format!(
                "expected header `{}`, found `{}`",
                SPECTRUM_CSV_HEADER.join(","),
                got.join(",")
            ),
        });
    }

    let mut samples: Vec<(f64, f64)> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(&e, 0))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::Spectrum {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let field = |i: usize, what: &str| -> Result<f64> {
            let raw = &record[i];
            let v: f64 = raw.parse().map_err(|_| Error::Spectrum {
                line,
                message: format!("{what} `{raw}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Spectrum {
                    line,
                    message: format!("{what} `{raw}` is not finite"),
                });
            }
            Ok(v)
        };
        let wl = field(0, "wavelength")?;
        let irr = field(1, "irradiance")?;
        if wl <= 0.0 {
            return Err(Error::Spectrum {
                line,
                message: format!("wavelength {wl} nm must be positive"),
            });
        }
        if irr < 0.0 {
            return Err(Error::Spectrum {
                line,
                message: format!("negative irradiance {irr}"),
            });
        }
        if let Some(&(prev, _)) = samples.last() {
            if wl <= prev {
                return Err(Error::Spectrum {
                    line,
                    message: format!("wavelength {wl} nm does not increase (previous {prev} nm)"),
                });
            }
        }
        samples.push((wl, irr));
    }
    if samples.len() < 2 {
        return Err(Error::Spectrum {
            line: 0,
            message: format!("need at least 2 samples, found {}", samples.len()),
        });
    }
    RadiationBackground::tabulated(name, samples)
}

/// Writes a tabulated background in the same format `load_solar_spectrum`
/// reads, values printed round-trip exact.
pub fn write_spectrum_csv<W: Write>(background: &RadiationBackground, writer: W) -> Result<()> {
    let Spectrum::Tabulated { samples } = &background.spectrum else {
        return Err(Error::Domain(format!(
            "`{}` is not a tabulated spectrum",
            background.name
        )));
    };
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(SPECTRUM_CSV_HEADER).map_err(io)?;
    for (wl, irr) in samples {
        w.write_record([format!("{wl:e}"), format!("{irr:e}")]).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: &csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(fallback_line);
    Error::Spectrum {
        line,
        message: e.to_string(),
    }
}
