//! Interaction rates, mean free paths and optical depths along a path.
//!
//! Rates are Γ = c·n·σ for a density and Γ = Φ·σ for a directed flux; mean
//! free paths are l = 1/(nσ) and l = c/(Φσ).

use crate::constants::EV_IN_J;
use crate::constants::{C_M_S, ELECTRON_MASS_EV, H_EV_S};
use crate::environments::{
    cmb_mean_energy, cmb_number_density, interpolate_samples, planck_photon_radiance_per_ev, Abundance,
    ParticlePopulation, RadiationBackground, Spectrum, HC_EV_NM,
};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_with_breakpoints, QuadratureSpec};
use crate::quantities::{Dimension, Quantity, Unit};
use crate::xsec::{
    com_energy, com_energy_ev, photon_photon_cross_section, photon_photon_cross_section_ev, thomson_cross_section,
    AngleModel,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PathSegment {
    pub label: String,
    pub length: Quantity,
    pub populations: Vec<ParticlePopulation>,
    pub backgrounds: Vec<RadiationBackground>,
    /// Literature mean free paths for processes not modeled here.
    pub mfp_overrides: Vec<(String, Quantity)>,
}

impl PathSegment {
    pub fn new(label: impl Into<String>, length: Quantity) -> Result<Self> {
        length.expect_dimension(Dimension::Length, "segment length")?;
        if !(length.value > 0.0) || !length.value.is_finite() {
            return Err(Error::Domain(format!("segment length must be positive, got {length}")));
        }
        Ok(Self {
            label: label.into(),
            length,
            populations: Vec::new(),
            backgrounds: Vec::new(),
            mfp_overrides: Vec::new(),
        })
    }

    pub fn with_population(mut self, p: ParticlePopulation) -> Self {
        self.populations.push(p);
        self
    }

    pub fn with_background(mut self, b: RadiationBackground) -> Self {
        self.backgrounds.push(b);
        self
    }

    pub fn with_override(mut self, label: impl Into<String>, mfp: Quantity) -> Result<Self> {
        mfp.expect_dimension(Dimension::Length, "mean free path override")?;
        if !(mfp.value > 0.0) {
            return Err(Error::Domain(format!(
                "mean free path override must be positive, got {mfp}"
            )));
        }
        self.mfp_overrides.push((label.into(), mfp));
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        self.length.expect_dimension(Dimension::Length, "segment length")?;
        if !(self.length.value > 0.0) || !self.length.value.is_finite() {
            return Err(Error::Domain(format!(
                "segment `{}`: length must be positive, got {}",
                self.label, self.length
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContributionKind {
    Population,
    Background,
    Override,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contribution {
    pub label: String,
    pub kind: ContributionKind,
    /// s⁻¹
    pub rate: f64,
    /// m; infinite when the contribution cannot scatter the photon.
    pub mean_free_path: f64,
    pub optical_depth: f64,
}

impl Contribution {
    pub fn non_interacting(&self) -> bool {
        self.mean_free_path.is_infinite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentReport {
    pub label: String,
    /// m
    pub length: f64,
    pub contributions: Vec<Contribution>,
    pub optical_depth: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudgetReport {
    pub segments: Vec<SegmentReport>,
    pub total_optical_depth: f64,
    pub survival: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PropagationOptions {
    pub angle: AngleModel,
    pub quadrature: QuadratureSpec,
}

/// l = 1/(nσ), in m. Zero density or cross section gives an infinite path.
pub fn mean_free_path_density(n: Quantity, sigma: Quantity) -> Result<Quantity> {
    let n = density_per_m3(n)?;
    let s = area_m2(sigma)?;
    Ok(Quantity::meters(inverse_or_infinite(n * s)))
}

/// Γ = c·n·σ, in s⁻¹.
pub fn rate_density(n: Quantity, sigma: Quantity) -> Result<Quantity> {
    let n = density_per_m3(n)?;
    let s = area_m2(sigma)?;
    Ok(Quantity::new(C_M_S * n * s, Unit::PerS))
}

/// Γ = Φ·σ, in s⁻¹.
pub fn rate_from_flux(phi: Quantity, sigma: Quantity) -> Result<Quantity> {
    let phi = flux_per_m2_s(phi)?;
    let s = area_m2(sigma)?;
    Ok(Quantity::new(phi * s, Unit::PerS))
}

/// l = c/(Φσ), in m.
pub fn mfp_from_flux(phi: Quantity, sigma: Quantity) -> Result<Quantity> {
    let gamma = rate_from_flux(phi, sigma)?.value;
    Ok(Quantity::meters(C_M_S * inverse_or_infinite(gamma)))
}

fn inverse_or_infinite(x: f64) -> f64 {
    if x == 0.0 {
        f64::INFINITY
    } else {
        1.0 / x
    }
}

fn density_per_m3(n: Quantity) -> Result<f64> {
    n.expect_dimension(Dimension::NumberDensity, "number density")?;
    non_negative(n.canonical(), "number density")
}

fn flux_per_m2_s(phi: Quantity) -> Result<f64> {
    phi.expect_dimension(Dimension::ParticleFlux, "particle flux")?;
    non_negative(phi.canonical(), "particle flux")
}

fn area_m2(sigma: Quantity) -> Result<f64> {
    sigma.expect_dimension(Dimension::Area, "cross section")?;
    non_negative(sigma.canonical(), "cross section")
}

fn non_negative(v: f64, what: &str) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!(
            "{what} must be non-negative and finite, got {v}"
        )))
    }
}

fn test_energy_ev(test_energy: Quantity) -> Result<f64> {
    let e = test_energy.photon_energy_ev()?;
    if !(e > 0.0) {
        return Err(Error::Domain(format!(
            "test photon energy must be positive, got {test_energy}"
        )));
    }
    if e >= ELECTRON_MASS_EV {
        return Err(Error::Domain(format!(
            "test photon energy {test_energy} is not below the electron mass ({ELECTRON_MASS_EV} eV)"
        )));
    }
    Ok(e)
}

/// Rate at which a test photon scatters off a photon background,
/// Γ = ∫σ_γγ(ω(E_test, E)) dN/dE dE, with dN/dE the background photon flux
/// density. Per-steradian backgrounds are multiplied by the quadrature's
/// solid-angle factor. Background photons are cut off above min(support, m_e)
/// and wherever ω would reach m_e.
pub fn rate_spectral(
    test_energy: Quantity,
    bg: &RadiationBackground,
    angle: AngleModel,
    quadrature: &QuadratureSpec,
) -> Result<Quantity> {
    let e_test = test_energy_ev(test_energy)?;
    let k = angle.kinematic_factor();
    if k <= 0.0 {
        return Ok(Quantity::new(0.0, Unit::PerS));
    }
    let (support_lo, support_hi) = bg.energy_support_ev();
    // ω < m_e  ⇔  E < m_e²/(E_test k)
    let omega_cut = ELECTRON_MASS_EV * ELECTRON_MASS_EV / (e_test * k) * (1.0 - 1e-12);
    let mut hi = support_hi.min(ELECTRON_MASS_EV).min(omega_cut);
    let sigma_cm2 =
        |e: f64| -> f64 { photon_photon_cross_section_ev(com_energy_ev(e_test, e, angle)).unwrap_or(0.0) * 1e4 };

    let value = match &bg.spectrum {
        Spectrum::Blackbody { temperature_ev } => {
            let t = *temperature_ev;
            hi = hi.min(700.0 * t);
            let lo = 1e-8 * t;
            if hi <= lo {
                0.0
            } else {
                // photons cm⁻² s⁻¹ sr⁻¹ per unit ln E
                let f = |u: f64| {
                    let e = u.exp();
                    sigma_cm2(e) * planck_photon_radiance_per_ev(e, t) * 1e-4 * e
                };
                let peak = (10.0 * t).min(hi).max(lo);
                let pts = [lo.ln(), peak.ln(), hi.ln()];
                let pts: Vec<f64> = dedup_sorted(&pts);
                integrate_with_breakpoints(f, &pts, quadrature)?.value
            }
        }
        Spectrum::DoublePowerLaw { break_ev, .. } => {
            let lo = support_lo;
            if hi <= lo {
                0.0
            } else {
                let f = |u: f64| {
                    let e = u.exp();
                    sigma_cm2(e) * bg.power_law_per_kev(e) / 1e3 * e
                };
                let mut pts = vec![lo.ln()];
                if *break_ev > lo && *break_ev < hi {
                    pts.push(break_ev.ln());
                }
                pts.push(hi.ln());
                integrate_with_breakpoints(f, &pts, quadrature)?.value
            }
        }
        Spectrum::LogQuadraticEbl { .. } => {
            let lo = support_lo;
            if hi <= lo {
                0.0
            } else {
                let f = |u: f64| {
                    let e = u.exp();
                    let nu_i_nu = bg.ebl_nu_i_nu(e / H_EV_S / 1e9);
                    // νI_ν / E² is the photon radiance per eV
                    sigma_cm2(e) * nu_i_nu / EV_IN_J / (e * e) * 1e-4 * e
                };
                integrate(f, lo.ln(), hi.ln(), quadrature)?.value
            }
        }
        Spectrum::Tabulated { samples } => {
            // integrate over wavelength in nm, from the cutoff up
            let wl_min = samples[0].0.max(HC_EV_NM / hi);
            let wl_max = samples[samples.len() - 1].0;
            if wl_max <= wl_min {
                0.0
            } else {
                let mut pts = vec![wl_min];
                pts.extend(samples.iter().map(|s| s.0).filter(|&x| x > wl_min && x < wl_max));
                pts.push(wl_max);
                let f = |wl: f64| {
                    let e = HC_EV_NM / wl;
                    let irr = interpolate_samples(samples, wl).unwrap_or(0.0);
                    sigma_cm2(e) * irr / (e * EV_IN_J) * 1e-4
                };
                integrate_with_breakpoints(f, &pts, quadrature)?.value
            }
        }
    };
    let geometric = if bg.per_steradian {
        quadrature.solid_angle_factor
    } else {
        1.0
    };
    Ok(Quantity::new(value * geometric, Unit::PerS))
}

fn dedup_sorted(pts: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for &p in pts {
        if out.last().is_none_or(|&l| p > l) {
            out.push(p);
        }
    }
    out
}

/// l = 1/(σ_γγ(ω)·n_γ) for a test photon against a blackbody bath, using the
/// mean bath photon energy to form ω.
pub fn mean_free_path_cmb(test_energy: Quantity, t_cmb: Quantity, angle: AngleModel) -> Result<Quantity> {
    let e_test = test_energy_ev(test_energy)?;
    let e_bath = cmb_mean_energy(t_cmb)?;
    let n = cmb_number_density(t_cmb)?;
    let omega = com_energy(Quantity::ev(e_test), e_bath, angle)?;
    let sigma = photon_photon_cross_section(omega)?;
    mean_free_path_density(n, sigma)
}

fn population_contribution(p: &ParticlePopulation, length_m: f64) -> Result<Contribution> {
    let sigma = thomson_cross_section(&p.species);
    let (rate, mfp) = match &p.abundance {
        Abundance::Density(n) => (rate_density(*n, sigma)?.value, mean_free_path_density(*n, sigma)?.value),
        Abundance::Flux { upper, .. } => (
            rate_from_flux(*upper, sigma)?.value,
            mfp_from_flux(*upper, sigma)?.value,
        ),
    };
    Ok(Contribution {
        label: p.name.clone(),
        kind: ContributionKind::Population,
        rate,
        mean_free_path: mfp,
        optical_depth: length_m / mfp,
    })
}

fn background_contribution(
    b: &RadiationBackground,
    test_energy: Quantity,
    length_m: f64,
    opts: &PropagationOptions,
) -> Result<Contribution> {
    let rate = rate_spectral(test_energy, b, opts.angle, &opts.quadrature)?.value;
    let mfp = C_M_S * inverse_or_infinite(rate);
    Ok(Contribution {
        label: b.name.clone(),
        kind: ContributionKind::Background,
        rate,
        mean_free_path: mfp,
        optical_depth: length_m / mfp,
    })
}

pub fn link_budget(
    segments: &[PathSegment],
    test_energy: Quantity,
    opts: &PropagationOptions,
) -> Result<LinkBudgetReport> {
    test_energy_ev(test_energy)?;
    let mut reports = Vec::with_capacity(segments.len());
    let mut total = 0.0;
    for seg in segments {
        seg.validate()?;
        let length_m = seg.length.canonical();
        let mut contributions = Vec::new();
        for p in &seg.populations {
            contributions.push(population_contribution(p, length_m)?);
        }
        for b in &seg.backgrounds {
            contributions.push(background_contribution(b, test_energy, length_m, opts)?);
        }
        for (label, mfp) in &seg.mfp_overrides {
            let l = mfp.canonical();
            contributions.push(Contribution {
                label: label.clone(),
                kind: ContributionKind::Override,
                rate: C_M_S / l,
                mean_free_path: l,
                optical_depth: length_m / l,
            });
        }
        let tau: f64 = contributions.iter().map(|c| c.optical_depth).sum();
        total += tau;
        reports.push(SegmentReport {
            label: seg.label.clone(),
            length: length_m,
            contributions,
            optical_depth: tau,
        });
    }
    Ok(LinkBudgetReport {
        segments: reports,
        total_optical_depth: total,
        survival: (-total).exp(),
    })
}
