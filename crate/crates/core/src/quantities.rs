//! Unit-tagged physical scalars over a closed unit list.
//!
//! Every unit belongs to one [`Dimension`] and carries a factor to the
//! dimension's canonical unit (eV, m, s, Hz, K, m^-3, ...). Conversions only
//! happen between units of the same dimension; spectral conversions between
//! energy, frequency and wavelength go through [`Quantity::photon_energy_ev`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::constants::{AU_IN_M, C_M_S, EV_IN_J, H_EV_S, K_B_EV_K, LY_IN_M, PC_IN_M};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Energy,
    Length,
    Time,
    /// Frequencies and rates share a dimension (Hz = s^-1).
    InverseTime,
    Temperature,
    NumberDensity,
    ParticleFlux,
    Area,
    SpectralIrradiance,
    Radiance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    EV,
    J,
    M,
    Cm,
    Pc,
    AU,
    Ly,
    Km,
    S,
    Hz,
    K,
    PerM3,
    PerCm3,
    PerM2PerS,
    PerCm2PerS,
    M2,
    Cm2,
    PerS,
    WPerM2PerNm,
    NWPerM2PerSr,
}

impl Unit {
    pub const ALL: [Unit; 20] = [
        Unit::EV,
        Unit::J,
        Unit::M,
        Unit::Cm,
        Unit::Pc,
        Unit::AU,
        Unit::Ly,
        Unit::Km,
        Unit::S,
        Unit::Hz,
        Unit::K,
        Unit::PerM3,
        Unit::PerCm3,
        Unit::PerM2PerS,
        Unit::PerCm2PerS,
        Unit::M2,
        Unit::Cm2,
        Unit::PerS,
        Unit::WPerM2PerNm,
        Unit::NWPerM2PerSr,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Unit::EV => "eV",
            Unit::J => "J",
            Unit::M => "m",
            Unit::Cm => "cm",
            Unit::Pc => "pc",
            Unit::AU => "AU",
            Unit::Ly => "ly",
            Unit::Km => "km",
            Unit::S => "s",
            Unit::Hz => "Hz",
            Unit::K => "K",
            Unit::PerM3 => "m^-3",
            Unit::PerCm3 => "cm^-3",
            Unit::PerM2PerS => "m^-2 s^-1",
            Unit::PerCm2PerS => "cm^-2 s^-1",
            Unit::M2 => "m^2",
            Unit::Cm2 => "cm^2",
            Unit::PerS => "s^-1",
            Unit::WPerM2PerNm => "W m^-2 nm^-1",
            Unit::NWPerM2PerSr => "nW m^-2 sr^-1",
        }
    }

    pub fn dimension(self) -> Dimension {
        match self {
            Unit::EV | Unit::J => Dimension::Energy,
            Unit::M | Unit::Cm | Unit::Pc | Unit::AU | Unit::Ly | Unit::Km => Dimension::Length,
            Unit::S => Dimension::Time,
            Unit::Hz | Unit::PerS => Dimension::InverseTime,
            Unit::K => Dimension::Temperature,
            Unit::PerM3 | Unit::PerCm3 => Dimension::NumberDensity,
            Unit::PerM2PerS | Unit::PerCm2PerS => Dimension::ParticleFlux,
            Unit::M2 | Unit::Cm2 => Dimension::Area,
            Unit::WPerM2PerNm => Dimension::SpectralIrradiance,
            Unit::NWPerM2PerSr => Dimension::Radiance,
        }
    }

    /// Multiplier taking a value in this unit to the canonical unit of its
    /// dimension.
    pub fn to_canonical(self) -> f64 {
        match self {
            Unit::EV => 1.0,
            Unit::J => 1.0 / EV_IN_J,
            Unit::M => 1.0,
            Unit::Cm => 1e-2,
            Unit::Pc => PC_IN_M,
            Unit::AU => AU_IN_M,
            Unit::Ly => LY_IN_M,
            Unit::Km => 1e3,
            Unit::S => 1.0,
            Unit::Hz | Unit::PerS => 1.0,
            Unit::K => 1.0,
            Unit::PerM3 => 1.0,
            Unit::PerCm3 => 1e6,
            Unit::PerM2PerS => 1.0,
            Unit::PerCm2PerS => 1e4,
            Unit::M2 => 1.0,
            Unit::Cm2 => 1e-4,
            Unit::WPerM2PerNm => 1.0,
            Unit::NWPerM2PerSr => 1.0,
        }
    }

    fn accepted_list() -> String {
        let mut tokens: Vec<&str> = Unit::ALL.iter().map(|u| u.symbol()).collect();
        tokens.extend(PREFIXED.iter().map(|(t, _, _)| *t));
        tokens.join(", ")
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = normalize_token(s);
        Unit::ALL
            .iter()
            .copied()
            .find(|u| u.symbol() == norm)
            .ok_or_else(|| Error::UnknownUnit {
                token: s.to_string(),
                accepted: Unit::accepted_list(),
            })
    }
}

/// Prefixed spellings accepted by the parser; the value is rescaled into the
/// base unit at parse time.
const PREFIXED: [(&str, Unit, f64); 14] = [
    ("neV", Unit::EV, 1e-9),
    ("ueV", Unit::EV, 1e-6),
    ("meV", Unit::EV, 1e-3),
    ("keV", Unit::EV, 1e3),
    ("MeV", Unit::EV, 1e6),
    ("GeV", Unit::EV, 1e9),
    ("nm", Unit::M, 1e-9),
    ("um", Unit::M, 1e-6),
    ("mm", Unit::M, 1e-3),
    ("kpc", Unit::Pc, 1e3),
    ("kHz", Unit::Hz, 1e3),
    ("MHz", Unit::Hz, 1e6),
    ("GHz", Unit::Hz, 1e9),
    ("THz", Unit::Hz, 1e12),
];

fn normalize_token(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub const fn new(value: f64, unit: Unit) -> Self {
        Self { value, unit }
    }

    pub fn dimension(&self) -> Dimension {
        self.unit.dimension()
    }

    /// Value expressed in the canonical unit of the dimension.
    pub fn canonical(&self) -> f64 {
        self.value * self.unit.to_canonical()
    }

    pub fn convert(&self, target: Unit) -> Result<Quantity> {
        if self.unit == target {
            return Ok(*self);
        }
        if self.unit.dimension() != target.dimension() {
            return Err(Error::IncompatibleUnits {
                from: self.unit.symbol().to_string(),
                to: target.symbol().to_string(),
            });
        }
        let value = self.value * self.unit.to_canonical() / target.to_canonical();
        Ok(Quantity::new(value, target))
    }

    /// Value in `target`, or an incompatible-units error.
    pub fn value_in(&self, target: Unit) -> Result<f64> {
        self.convert(target).map(|q| q.value)
    }

    pub fn expect_dimension(&self, dim: Dimension, what: &str) -> Result<()> {
        if self.dimension() == dim {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{what} must be a {dim:?} quantity, got `{self}`"
            )))
        }
    }

    pub fn checked_add(&self, other: &Quantity) -> Result<Quantity> {
        let rhs = other.convert(self.unit)?;
        Ok(Quantity::new(self.value + rhs.value, self.unit))
    }

    pub fn checked_sub(&self, other: &Quantity) -> Result<Quantity> {
        let rhs = other.convert(self.unit)?;
        Ok(Quantity::new(self.value - rhs.value, self.unit))
    }

    pub fn scale(&self, factor: f64) -> Quantity {
        Quantity::new(self.value * factor, self.unit)
    }

    /// Ratio of two quantities of the same dimension.
    pub fn ratio(&self, other: &Quantity) -> Result<f64> {
        Ok(self.value / other.value_in(self.unit)?)
    }

    /// Photon energy in eV for an energy, frequency (E = hν), wavelength
    /// (E = hc/λ) or temperature (E = k_B T) quantity.
    pub fn photon_energy_ev(&self) -> Result<f64> {
        let v = self.canonical();
        match self.dimension() {
            Dimension::Energy => Ok(v),
            Dimension::InverseTime => Ok(H_EV_S * v),
            Dimension::Length => {
                if v <= 0.0 {
                    return Err(Error::Domain(format!("wavelength must be positive, got `{self}`")));
                }
                Ok(H_EV_S * C_M_S / v)
            }
            Dimension::Temperature => Ok(K_B_EV_K * v),
            _ => Err(Error::IncompatibleUnits {
                from: self.unit.symbol().to_string(),
                to: "eV".to_string(),
            }),
        }
    }

    pub fn ev(value: f64) -> Self {
        Self::new(value, Unit::EV)
    }

    pub fn meters(value: f64) -> Self {
        Self::new(value, Unit::M)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", format_exact(self.value), self.unit.symbol())
    }
}

/// Shortest representation that parses back to the same bits.
pub fn format_exact(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Six significant digits, for human-readable tables.
pub fn format_sig6(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-3..1e6).contains(&a) {
        let digits = if v == 0.0 {
            5
        } else {
            (5 - a.log10().floor() as i32).max(0) as usize
        };
        format!("{v:.digits$}")
    } else {
        format!("{v:.5e}")
    }
}

/// Parses `<number><whitespace?><unit>`, e.g. `"6.6 cm^-3"`, `"14.4keV"`.
pub fn parse_quantity(text: &str) -> Result<Quantity> {
    let bytes = text.as_bytes();
    let start = bytes
        .iter()
        .position(|b| !b.is_ascii_whitespace())
        .unwrap_or(bytes.len());
    let end = scan_number(bytes, start);
    if end == start {
        return Err(Error::Parse {
            offset: start,
            message: "expected a number".to_string(),
        });
    }
    let number = &text[start..end];
    let value: f64 = number.parse().map_err(|_| Error::Parse {
        offset: start,
        message: format!("invalid number `{number}`"),
    })?;
    let rest = text[end..].trim();
    if rest.is_empty() {
        return Err(Error::Parse {
            offset: end,
            message: "missing unit".to_string(),
        });
    }
    let token = normalize_token(rest);
    if let Some((_, unit, factor)) = PREFIXED.iter().find(|(t, _, _)| *t == token) {
        return Ok(Quantity::new(value * factor, *unit));
    }
    let unit: Unit = token.parse().map_err(|_| Error::UnknownUnit {
        token: rest.to_string(),
        accepted: Unit::accepted_list(),
    })?;
    Ok(Quantity::new(value, unit))
}

// sign? digits [. digits] [(e|E) sign? digits]
fn scan_number(b: &[u8], start: usize) -> usize {
    let mut i = start;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        let frac_start = i + 1;
        let mut j = frac_start;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        digits += j - frac_start;
        if digits > 0 {
            i = j;
        }
    }
    if digits == 0 {
        return start;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let exp_start = j;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        if j > exp_start {
            i = j;
        }
    }
    i
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_quantity(s)
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_quantity(&s).map_err(serde::de::Error::custom)
    }
}
