//! Particle populations and photon backgrounds a signal photon can scatter
//! off, plus the builtin catalog of interstellar and heliospheric values.

mod csv_io;
mod spectrum;

use std::f64::consts::PI;

pub use csv_io::{load_solar_spectrum, write_spectrum_csv, SPECTRUM_CSV_HEADER};
pub(crate) use spectrum::{interpolate as interpolate_samples, planck_photon_radiance_per_ev, HC_EV_NM};
pub use spectrum::{synthetic_solar_spectrum, RadiationBackground, SpectralBasis, SpectralPhotonFlux, Spectrum};

use crate::constants::{HBAR_C_EV_M, ZETA3};
use crate::error::{Error, Result};
use crate::quantities::{Dimension, Quantity, Unit};
use crate::xsec::ChargedSpecies;

/// How much of a population the photon meets: a number density it crosses,
/// or a directed flux that crosses it.
#[derive(Debug, Clone, PartialEq)]
pub enum Abundance {
    Density(Quantity),
    /// Flux known as a range; rates use `upper`.
    Flux {
        upper: Quantity,
        lower: Option<Quantity>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticlePopulation {
    pub name: String,
    pub species: ChargedSpecies,
    pub abundance: Abundance,
    /// Kinetic energy range, eV.
    pub energy_range: Option<(f64, f64)>,
    /// Abundance falls off as R^-k with heliocentric distance.
    pub radial_scaling_exponent: Option<f64>,
}

impl ParticlePopulation {
    pub fn with_density(name: impl Into<String>, species: ChargedSpecies, density: Quantity) -> Result<Self> {
        density.expect_dimension(Dimension::NumberDensity, "population density")?;
        check_non_negative(density, "density")?;
        Ok(Self {
            name: name.into(),
            species,
            abundance: Abundance::Density(density),
            energy_range: None,
            radial_scaling_exponent: None,
        })
    }

    pub fn with_flux(name: impl Into<String>, species: ChargedSpecies, flux: Quantity) -> Result<Self> {
        Self::with_flux_range(name, species, None, flux)
    }

    pub fn with_flux_range(
        name: impl Into<String>,
        species: ChargedSpecies,
        lower: Option<Quantity>,
        upper: Quantity,
    ) -> Result<Self> {
        upper.expect_dimension(Dimension::ParticleFlux, "population flux")?;
        check_non_negative(upper, "flux")?;
        if let Some(lo) = lower {
            lo.expect_dimension(Dimension::ParticleFlux, "population flux")?;
            check_non_negative(lo, "flux")?;
            if lo.canonical() > upper.canonical() {
                return Err(Error::Domain(format!("flux range inverted: {lo} > {upper}")));
            }
        }
        Ok(Self {
            name: name.into(),
            species,
            abundance: Abundance::Flux { upper, lower },
            energy_range: None,
            radial_scaling_exponent: None,
        })
    }

    pub fn energy_range_ev(mut self, lo: f64, hi: f64) -> Self {
        self.energy_range = Some((lo, hi));
        self
    }

    pub fn radial_exponent(mut self, k: f64) -> Self {
        self.radial_scaling_exponent = Some(k);
        self
    }

    pub fn density(&self) -> Option<Quantity> {
        match &self.abundance {
            Abundance::Density(q) => Some(*q),
            Abundance::Flux { .. } => None,
        }
    }

    pub fn flux(&self) -> Option<Quantity> {
        match &self.abundance {
            Abundance::Flux { upper, .. } => Some(*upper),
            Abundance::Density(_) => None,
        }
    }
}

fn check_non_negative(q: Quantity, what: &str) -> Result<()> {
    if q.value >= 0.0 && q.value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be non-negative, got {q}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogEntry {
    Population(ParticlePopulation),
    Background(RadiationBackground),
}

impl CatalogEntry {
    pub fn name(&self) -> &str {
        match self {
            CatalogEntry::Population(p) => &p.name,
            CatalogEntry::Background(b) => &b.name,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    /// Adds or replaces an entry by name.
    pub fn insert(&mut self, entry: CatalogEntry) {
        if let Some(slot) = self.entries.iter_mut().find(|e| e.name() == entry.name()) {
            *slot = entry;
        } else {
            self.entries.push(entry);
        }
    }

    pub fn lookup(&self, name: &str) -> Result<&CatalogEntry> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| Error::NotFound { name: name.to_string() })
    }

    pub fn population(&self, name: &str) -> Result<&ParticlePopulation> {
        match self.lookup(name)? {
            CatalogEntry::Population(p) => Ok(p),
            CatalogEntry::Background(_) => Err(Error::Domain(format!(
                "`{name}` is a radiation background, not a population"
            ))),
        }
    }

    pub fn background(&self, name: &str) -> Result<&RadiationBackground> {
        match self.lookup(name)? {
            CatalogEntry::Background(b) => Ok(b),
            CatalogEntry::Population(_) => Err(Error::Domain(format!(
                "`{name}` is a particle population, not a background"
            ))),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name())
    }
}

fn per_cm3(v: f64) -> Quantity {
    Quantity::new(v, Unit::PerCm3)
}

fn per_cm2_s(v: f64) -> Quantity {
    Quantity::new(v, Unit::PerCm2PerS)
}

/// Interstellar, heliospheric and near-Earth environments.
pub fn builtin_catalog() -> Catalog {
    use ChargedSpecies as S;
    let density = |name: &str, species: ChargedSpecies, n: f64| {
        CatalogEntry::Population(ParticlePopulation::with_density(name, species, per_cm3(n)).expect("builtin density"))
    };
    let flux = |p: ParticlePopulation| CatalogEntry::Population(p);
    let mut cat = Catalog::default();
    let entries = vec![
        density("ism_electrons", S::electron(), 1.0),
        density("hii_electrons", S::electron(), 1e4),
        density("lic_hydrogen", S::hydrogen_atom(), 0.24),
        density("lic_electrons", S::electron(), 0.09),
        density("lic_protons", S::proton(), 0.07),
        density("lic_helium", S::helium_atom(), 0.014),
        density("local_bubble_protons", S::proton(), 0.005),
        density("solar_wind_protons", S::proton(), 6.6),
        density("solar_wind_electrons", S::electron(), 7.1),
        density("solar_wind_alphas", S::alpha_particle(), 0.25),
        flux(
            ParticlePopulation::with_flux("spe_protons", S::proton(), per_cm2_s(1e5))
                .expect("builtin flux")
                .energy_range_ev(1e6, 5e9)
                .radial_exponent(1.0),
        ),
        flux(
            ParticlePopulation::with_flux_range("gcr_protons", S::proton(), Some(per_cm2_s(1.0)), per_cm2_s(10.0))
                .expect("builtin flux")
                .energy_range_ev(1e6, 1e20),
        ),
        flux(
            ParticlePopulation::with_flux("van_allen_protons", S::proton(), per_cm2_s(1e8))
                .expect("builtin flux")
                .energy_range_ev(1e3, 3e8),
        ),
        flux(
            ParticlePopulation::with_flux("van_allen_electrons", S::electron(), per_cm2_s(1e7))
                .expect("builtin flux")
                .energy_range_ev(1e3, 5e6),
        ),
        CatalogEntry::Background(RadiationBackground::blackbody("cmb", Quantity::ev(2e-4)).expect("builtin blackbody")),
        CatalogEntry::Background(
            RadiationBackground::double_power_law(
                "cxb",
                10.15e-2,
                Quantity::ev(29.99e3),
                1.32,
                2.88,
                (Quantity::ev(2e3), Quantity::ev(2e6)),
            )
            .expect("builtin power law"),
        ),
        CatalogEntry::Background(
            RadiationBackground::log_quadratic_ebl(
                "ebl_optical",
                (-111.231, 15.2089, -0.623),
                (Quantity::new(4e13, Unit::Hz), Quantity::new(1e15, Unit::Hz)),
            )
            .expect("builtin EBL"),
        ),
    ];
    for e in entries {
        cat.insert(e);
    }
    cat
}

/// Blackbody photon number density 2ζ(3)T³/π², in cm⁻³.
pub fn cmb_number_density(temperature: Quantity) -> Result<Quantity> {
    let t = spectrum::positive_temperature_ev(temperature)?;
    let t_per_cm = t / (HBAR_C_EV_M * 100.0);
    Ok(per_cm3(2.0 * ZETA3 / (PI * PI) * t_per_cm.powi(3)))
}

/// Mean blackbody photon energy π⁴T/(30ζ(3)), in eV.
pub fn cmb_mean_energy(temperature: Quantity) -> Result<Quantity> {
    let t = spectrum::positive_temperature_ev(temperature)?;
    Ok(Quantity::ev(PI.powi(4) * t / (30.0 * ZETA3)))
}

/// Blackbody energy density π²T⁴/15, in eV cm⁻³.
pub fn cmb_energy_density_ev_per_cm3(temperature: Quantity) -> Result<f64> {
    let t = spectrum::positive_temperature_ev(temperature)?;
    let t_per_cm = t / (HBAR_C_EV_M * 100.0);
    Ok(PI * PI / 15.0 * t * t_per_cm.powi(3))
}
