use std::f64::consts::PI;

use crate::constants::{AU_IN_M, C_M_S, EV_IN_J, H_EV_S, K_B_EV_K, SOLAR_RADIUS_M};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::quantities::{Dimension, Quantity};

/// h·c in eV·nm.
pub(crate) const HC_EV_NM: f64 = H_EV_S * C_M_S * 1e9;

/// Spectral shape of a photon background.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    Blackbody {
        temperature_ev: f64,
    },
    /// A/((E/E_b)^a1 + (E/E_b)^a2) photons cm⁻² s⁻¹ sr⁻¹ keV⁻¹ on
    /// `[e_min_ev, e_max_ev]`.
    DoublePowerLaw {
        amplitude: f64,
        break_ev: f64,
        index_low: f64,
        index_high: f64,
        e_min_ev: f64,
        e_max_ev: f64,
    },
    /// ln(νI_ν / W m⁻² sr⁻¹) = c0 + c1 ln ν + c2 ln² ν with ν in GHz.
    LogQuadraticEbl {
        c0: f64,
        c1: f64,
        c2: f64,
        nu_min_ghz: f64,
        nu_max_ghz: f64,
    },
    /// (wavelength nm, irradiance W m⁻² nm⁻¹), strictly increasing in
    /// wavelength.
    Tabulated {
        samples: Vec<(f64, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiationBackground {
    pub name: String,
    pub spectrum: Spectrum,
    /// True when the spectrum is a specific intensity (per steradian) and
    /// rates must integrate over solid angle; false for directed irradiance.
    pub per_steradian: bool,
}

/// Which spectral variable a photon flux density is per.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralBasis {
    /// photons cm⁻² s⁻¹ eV⁻¹
    PerEv,
    /// photons cm⁻² s⁻¹ nm⁻¹
    PerNm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPhotonFlux {
    pub value: f64,
    pub basis: SpectralBasis,
    /// Additionally per steradian.
    pub per_steradian: bool,
}

impl RadiationBackground {
    pub fn blackbody(name: impl Into<String>, temperature: Quantity) -> Result<Self> {
        let t = temperature_ev(temperature)?;
        Ok(Self {
            name: name.into(),
            spectrum: Spectrum::Blackbody { temperature_ev: t },
            per_steradian: true,
        })
    }

    pub fn double_power_law(
        name: impl Into<String>,
        amplitude: f64,
        break_energy: Quantity,
        index_low: f64,
        index_high: f64,
        support: (Quantity, Quantity),
    ) -> Result<Self> {
        let break_ev = energy_ev(break_energy, "break energy")?;
        let e_min_ev = energy_ev(support.0, "support lower bound")?;
        let e_max_ev = energy_ev(support.1, "support upper bound")?;
        if !(amplitude > 0.0) || !(break_ev > 0.0) {
            return Err(Error::Domain("double power law needs A > 0 and E_b > 0".into()));
        }
        if !(index_high > index_low) {
            return Err(Error::Domain(format!(
                "double power law needs a2 > a1, got a1 = {index_low}, a2 = {index_high}"
            )));
        }
        if !(e_min_ev > 0.0 && e_max_ev > e_min_ev) {
            return Err(Error::Domain(
                "double power law support must be a positive, non-empty range".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            spectrum: Spectrum::DoublePowerLaw {
                amplitude,
                break_ev,
                index_low,
                index_high,
                e_min_ev,
                e_max_ev,
            },
            per_steradian: true,
        })
    }

    pub fn log_quadratic_ebl(
        name: impl Into<String>,
        coefficients: (f64, f64, f64),
        nu_range: (Quantity, Quantity),
    ) -> Result<Self> {
        let lo = frequency_ghz(nu_range.0)?;
        let hi = frequency_ghz(nu_range.1)?;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::Domain(
                "EBL frequency range must be positive and non-empty".into(),
            ));
        }
        Ok(Self {
            name: name.into(),
            spectrum: Spectrum::LogQuadraticEbl {
                c0: coefficients.0,
                c1: coefficients.1,
                c2: coefficients.2,
                nu_min_ghz: lo,
                nu_max_ghz: hi,
            },
            per_steradian: true,
        })
    }

    pub fn tabulated(name: impl Into<String>, samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain(format!(
                "tabulated spectrum needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        for (i, &(wl, irr)) in samples.iter().enumerate() {
            if !wl.is_finite() || !irr.is_finite() || wl <= 0.0 {
                return Err(Error::Domain(format!(
                    "sample {i}: non-finite or non-positive wavelength"
                )));
            }
            if irr < 0.0 {
                return Err(Error::Domain(format!("sample {i}: negative irradiance {irr}")));
            }
            if i > 0 && wl <= samples[i - 1].0 {
                return Err(Error::Domain(format!(
                    "sample {i}: wavelengths not strictly increasing"
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            spectrum: Spectrum::Tabulated { samples },
            per_steradian: false,
        })
    }

    /// Support of the spectrum as a photon-energy range in eV.
    pub fn energy_support_ev(&self) -> (f64, f64) {
        match &self.spectrum {
            Spectrum::Blackbody { .. } => (0.0, f64::INFINITY),
            Spectrum::DoublePowerLaw { e_min_ev, e_max_ev, .. } => (*e_min_ev, *e_max_ev),
            Spectrum::LogQuadraticEbl {
                nu_min_ghz, nu_max_ghz, ..
            } => (H_EV_S * nu_min_ghz * 1e9, H_EV_S * nu_max_ghz * 1e9),
            Spectrum::Tabulated { samples } => (HC_EV_NM / samples[samples.len() - 1].0, HC_EV_NM / samples[0].0),
        }
    }

    /// Photon flux density at a photon energy, wavelength or frequency.
    pub fn spectral_photon_flux(&self, at: Quantity) -> Result<SpectralPhotonFlux> {
        let e = at.photon_energy_ev()?;
        if at.dimension() == Dimension::Temperature {
            return Err(Error::Domain(
                "spectral position must be an energy, wavelength or frequency".into(),
            ));
        }
        let (lo, hi) = self.energy_support_ev();
        let slack = 1e-12;
        if !(e > 0.0) || e < lo * (1.0 - slack) || e > hi * (1.0 + slack) {
            return Err(Error::Domain(format!(
                "{at} lies outside the support of `{}` ({lo:e}–{hi:e} eV)",
                self.name
            )));
        }
        let (value, basis) = match &self.spectrum {
            Spectrum::Blackbody { temperature_ev } => (
                planck_photon_radiance_per_ev(e, *temperature_ev) * 1e-4,
                SpectralBasis::PerEv,
            ),
            Spectrum::DoublePowerLaw { .. } => (self.power_law_per_kev(e) / 1e3, SpectralBasis::PerEv),
            Spectrum::LogQuadraticEbl { .. } => {
                let nu_i_nu = self.ebl_nu_i_nu(e / H_EV_S / 1e9);
                (nu_i_nu / EV_IN_J / (e * e) * 1e-4, SpectralBasis::PerEv)
            }
            Spectrum::Tabulated { .. } => {
                let wl = HC_EV_NM / e;
                let f = self.interpolate_irradiance(wl)?;
                (f / (e * EV_IN_J) * 1e-4, SpectralBasis::PerNm)
            }
        };
        Ok(SpectralPhotonFlux {
            value,
            basis,
            per_steradian: self.per_steradian,
        })
    }

    pub(crate) fn power_law_per_kev(&self, e_ev: f64) -> f64 {
        match &self.spectrum {
            Spectrum::DoublePowerLaw {
                amplitude,
                break_ev,
                index_low,
                index_high,
                ..
            } => {
                let x = e_ev / break_ev;
                amplitude / (x.powf(*index_low) + x.powf(*index_high))
            }
            _ => unreachable!("power_law_per_kev on non power-law background"),
        }
    }

    /// νI_ν in W m⁻² sr⁻¹ at ν in GHz.
    pub(crate) fn ebl_nu_i_nu(&self, nu_ghz: f64) -> f64 {
        match &self.spectrum {
            Spectrum::LogQuadraticEbl { c0, c1, c2, .. } => {
                let l = nu_ghz.ln();
                (c0 + c1 * l + c2 * l * l).exp()
            }
            _ => unreachable!("ebl_nu_i_nu on non-EBL background"),
        }
    }

    /// Linear interpolation of a tabulated irradiance (W m⁻² nm⁻¹); refuses to
    /// extrapolate.
    pub fn interpolate_irradiance(&self, wavelength_nm: f64) -> Result<f64> {
        let Spectrum::Tabulated { samples } = &self.spectrum else {
            return Err(Error::Domain(format!("`{}` is not a tabulated spectrum", self.name)));
        };
        interpolate(samples, wavelength_nm).ok_or_else(|| {
            Error::Domain(format!(
                "{wavelength_nm} nm outside tabulated range {}–{} nm of `{}`",
                samples[0].0,
                samples[samples.len() - 1].0,
                self.name
            ))
        })
    }

    /// ∫F_λ dλ over the table, W m⁻² (exact for the piecewise-linear
    /// interpolant).
    pub fn integrated_irradiance(&self) -> Result<f64> {
        let Spectrum::Tabulated { samples } = &self.spectrum else {
            return Err(Error::Domain(format!("`{}` is not a tabulated spectrum", self.name)));
        };
        Ok(samples
            .windows(2)
            .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
            .sum())
    }

    /// ∫νI_ν d ln ν over the EBL band, in nW m⁻² sr⁻¹.
    pub fn ebl_brightness(&self, spec: &QuadratureSpec) -> Result<f64> {
        let Spectrum::LogQuadraticEbl {
            nu_min_ghz, nu_max_ghz, ..
        } = &self.spectrum
        else {
            return Err(Error::Domain(format!("`{}` is not an EBL spectrum", self.name)));
        };
        let r = integrate(|t| self.ebl_nu_i_nu(t.exp()), nu_min_ghz.ln(), nu_max_ghz.ln(), spec)?;
        Ok(r.value * 1e9)
    }
}

pub(crate) fn interpolate(samples: &[(f64, f64)], x: f64) -> Option<f64> {
    let first = samples.first()?.0;
    let last = samples.last()?.0;
    if !(x >= first && x <= last) {
        return None;
    }
    let i = samples.partition_point(|s| s.0 <= x);
    if i == 0 {
        return Some(samples[0].1);
    }
    if i >= samples.len() {
        return Some(samples[samples.len() - 1].1);
    }
    let (x0, y0) = samples[i - 1];
    let (x1, y1) = samples[i];
    if x == x0 {
        return Some(y0);
    }
    Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
}

/// Planck photon radiance per unit energy, photons m⁻² s⁻¹ sr⁻¹ eV⁻¹.
pub(crate) fn planck_photon_radiance_per_ev(e_ev: f64, t_ev: f64) -> f64 {
    let x = e_ev / t_ev;
    if x > 700.0 {
        return 0.0;
    }
    2.0 * e_ev * e_ev / (H_EV_S.powi(3) * C_M_S * C_M_S) / x.exp_m1()
}

fn temperature_ev(t: Quantity) -> Result<f64> {
    let v = match t.dimension() {
        Dimension::Temperature => t.canonical() * K_B_EV_K,
        Dimension::Energy => t.canonical(),
        _ => return Err(Error::Domain(format!("temperature must be in K or eV, got `{t}`"))),
    };
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("temperature must be positive, got `{t}`")));
    }
    Ok(v)
}

pub(crate) fn positive_temperature_ev(t: Quantity) -> Result<f64> {
    temperature_ev(t)
}

fn energy_ev(q: Quantity, what: &str) -> Result<f64> {
    q.expect_dimension(Dimension::Energy, what)?;
    Ok(q.canonical())
}

fn frequency_ghz(q: Quantity) -> Result<f64> {
    q.expect_dimension(Dimension::InverseTime, "EBL frequency")?;
    Ok(q.canonical() / 1e9)
}

/// Tabulated stand-in for the solar spectrum at 1 AU: a blackbody photosphere
/// of the given temperature and nominal solar radius, sampled on a log grid
/// from 0.1 to 2400 nm.
pub fn synthetic_solar_spectrum(temperature_k: f64, n_samples: usize) -> Result<RadiationBackground> {
    if n_samples < 2 {
        return Err(Error::Domain("need at least 2 samples".into()));
    }
    let (lo, hi) = (0.1f64, 2400.0f64);
    let dilution = PI * (SOLAR_RADIUS_M / AU_IN_M).powi(2);
    let t_ev = temperature_k * K_B_EV_K;
    let samples = (0..n_samples)
        .map(|i| {
            let wl = if i == n_samples - 1 {
                hi
            } else {
                lo * (hi / lo).powf(i as f64 / (n_samples - 1) as f64)
            };
            (wl, dilution * planck_spectral_radiance_per_nm(wl, t_ev))
        })
        .collect();
    RadiationBackground::tabulated("solar_synthetic", samples)
}

/// Planck spectral radiance B_λ, W m⁻² sr⁻¹ nm⁻¹.
fn planck_spectral_radiance_per_nm(wl_nm: f64, t_ev: f64) -> f64 {
    let e = HC_EV_NM / wl_nm;
    let x = e / t_ev;
    if x > 700.0 {
        return 0.0;
    }
    // photon radiance per nm times photon energy
    let per_ev = planck_photon_radiance_per_ev(e, t_ev);
    per_ev * (e / wl_nm) * e * EV_IN_J
}
