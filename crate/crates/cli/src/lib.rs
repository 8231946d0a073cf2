//! `qlink` command-line front end.
//!
//! Exit codes: 0 success, 1 reference cases out of tolerance, 2 input or validation error,
//! 3 numerical failure.

pub mod cases;
pub mod output;
pub mod sweep;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use qlink_core::environments::{load_solar_spectrum, synthetic_solar_spectrum, write_spectrum_csv, Spectrum};
use qlink_core::quantities::format_sig6;
use qlink_core::scenario::{evaluate, load_scenario_with, resolve_scenario_path, Resolver, CATALOG_DIR_ENV};
use qlink_core::Error;

use crate::output::OutputFormat;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CASES: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qlink",
    version,
    about = "Quantum channel feasibility over interstellar paths"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a scenario file into a channel report.
    Budget {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the published reference numbers and compare.
    ReproducePaper {
        /// Case id, or `all`.
        #[arg(long, default_value = "all")]
        case: String,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
    },
    /// Vary one numeric scenario field and tabulate the verdict.
    Sweep {
        scenario: PathBuf,
        /// Field path such as `gravity_legs[0].r_receive`.
        #[arg(long)]
        vary: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// CSV destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a solar irradiance CSV and register it in the catalog directory.
    SpectrumIngest {
        csv: PathBuf,
        #[arg(long)]
        validate_only: bool,
        /// Catalog name; defaults to the file stem.
        #[arg(long)]
        name: Option<String>,
        /// Overrides QLINK_CATALOG_DIR.
        #[arg(long)]
        catalog_dir: Option<PathBuf>,
    },
    /// Write a blackbody solar irradiance table at 1 AU.
    SynthSpectrum {
        #[arg(long, default_value_t = 5778.0)]
        temperature: f64,
        #[arg(long, default_value_t = 400)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INPUT
    }
}

/// Process-level settings, read once in `main`.
#[derive(Debug, Clone, Default)]
pub struct Env {
    pub catalog_dir: Option<PathBuf>,
}

impl Env {
    pub fn from_process() -> Self {
        Self {
            catalog_dir: std::env::var_os(CATALOG_DIR_ENV).map(PathBuf::from),
        }
    }

    fn resolver(&self) -> Resolver {
        Resolver {
            catalog_dir: self.catalog_dir.clone(),
            ..Resolver::default()
        }
    }
}

fn io_err(e: io::Error) -> Error {
    Error::Io(e.to_string())
}

fn create(p: &Path) -> Result<io::BufWriter<fs::File>, Error> {
    Ok(io::BufWriter::new(
        fs::File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
    ))
}

/// Writes to `--out` when given, else to `out`.
fn emit<F>(target: Option<&Path>, out: &mut dyn Write, f: F) -> Result<(), Error>
where
    F: FnOnce(&mut dyn Write) -> Result<(), Error>,
{
    match target {
        Some(p) => {
            let mut file = create(p)?;
            f(&mut file)?;
            file.flush().map_err(io_err)
        }
        None => f(out),
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let code = run_with(
        args,
        &Env::from_process(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    let _ = io::stdout().flush();
    code
}

pub fn run_with<I, T>(args: I, env: &Env, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_INPUT
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, env, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, env: &Env, out: &mut dyn Write) -> Result<i32, Error> {
    match command {
        Command::Budget {
            scenario,
            format,
            out: target,
        } => {
            let s = load_scenario_with(&scenario, env.resolver())?;
            let report = evaluate(&s)?;
            emit(target.as_deref(), out, |w| {
                output::write_report(&report, format, w).map_err(io_err)
            })?;
            Ok(EXIT_OK)
        }
        Command::ReproducePaper { case, format } => reproduce(&case, format, out),
        Command::Sweep {
            scenario,
            vary,
            from,
            to,
            steps,
            out: target,
        } => {
            let file = resolve_scenario_path(&scenario, env.catalog_dir.as_deref())?;
            let text = fs::read_to_string(&file).map_err(|e| Error::Io(format!("{}: {e}", file.display())))?;
            let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Scenario {
                path: "(root)".into(),
                message: e.to_string(),
            })?;
            let resolver = match file.parent() {
                Some(d) => env.resolver().with_base_dir(d),
                None => env.resolver(),
            };
            let plan = sweep::plan(&doc, &vary, &from, &to, steps)?;
            let rows = sweep::run(&doc, &plan, &resolver)?;
            emit(target.as_deref(), out, |w| {
                sweep::write_csv(&plan, &rows, w).map_err(io_err)
            })?;
            Ok(EXIT_OK)
        }
        Command::SpectrumIngest {
            csv,
            validate_only,
            name,
            catalog_dir,
        } => {
            let dir = catalog_dir.or_else(|| env.catalog_dir.clone());
            ingest(&csv, validate_only, name, dir, out)
        }
        Command::SynthSpectrum {
            temperature,
            samples,
            out: target,
        } => {
            let bg = synthetic_solar_spectrum(temperature, samples)?;
            emit(target.as_deref(), out, |w| write_spectrum_csv(&bg, w))?;
            Ok(EXIT_OK)
        }
    }
}

fn reproduce(case: &str, format: OutputFormat, out: &mut dyn Write) -> Result<i32, Error> {
    let all = cases::all_cases();
    let selected: Vec<_> = if case == "all" {
        all.iter().collect()
    } else {
        match all.iter().find(|c| c.id == case) {
            Some(c) => vec![c],
            None => {
                return Err(Error::Domain(format!(
                    "unknown case id `{case}`; valid ids: all, {}",
                    cases::case_ids().join(", ")
                )))
            }
        }
    };
    let results = selected.iter().map(|c| c.run()).collect::<Result<Vec<_>, _>>()?;
    output::write_cases(&results, format, out).map_err(io_err)?;
    Ok(if results.iter().all(|r| r.pass) {
        EXIT_OK
    } else {
        EXIT_FAILED_CASES
    })
}

fn ingest(
    csv: &Path,
    validate_only: bool,
    name: Option<String>,
    catalog_dir: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<i32, Error> {
    let name = match name {
        Some(n) => n,
        None => csv
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::Domain(format!("cannot derive a catalog name from {}", csv.display())))?
            .to_string(),
    };
    let file = fs::File::open(csv).map_err(|e| Error::Io(format!("{}: {e}", csv.display())))?;
    let bg = load_solar_spectrum(&name, file).map_err(|e| match e {
        Error::Spectrum { line, message } => Error::Spectrum {
            line,
            message: format!("{}: {message}", csv.display()),
        },
        other => other,
    })?;
    let Spectrum::Tabulated { samples } = &bg.spectrum else {
        return Err(Error::Domain(format!("{} did not load as a table", csv.display())));
    };
    let (lo, hi) = (samples[0].0, samples[samples.len() - 1].0);
    let total = bg.integrated_irradiance()?;
    writeln!(out, "samples               {}", samples.len()).map_err(io_err)?;
    writeln!(
        out,
        "wavelength span       {} .. {} nm",
        format_sig6(lo),
        format_sig6(hi)
    )
    .map_err(io_err)?;
    writeln!(out, "integrated irradiance {} W m^-2", format_sig6(total)).map_err(io_err)?;
    if validate_only {
        return Ok(EXIT_OK);
    }
    let dir = catalog_dir.ok_or_else(|| {
        Error::Domain(format!(
            "set {CATALOG_DIR_ENV} or pass --catalog-dir, or use --validate-only"
        ))
    })?;
    fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let target = dir.join(format!("{name}.csv"));
    let mut f = create(&target)?;
    write_spectrum_csv(&bg, &mut f)?;
    f.flush().map_err(io_err)?;
    writeln!(out, "registered as         {name} ({})", target.display()).map_err(io_err)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests;
