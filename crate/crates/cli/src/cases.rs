//! Published reference values and how to recompute each one.

use qlink_core::environments::{builtin_catalog, cmb_mean_energy, cmb_number_density, synthetic_solar_spectrum};
use qlink_core::gravity::{
    gaussian_overlap, max_coherent_path, redshift_delta, GaussianPulse, RedshiftModel, SchwarzschildBody,
    EFFECTIVELY_ZERO,
};
use qlink_core::propagation::{mean_free_path_density, mfp_from_flux, rate_from_flux, rate_spectral};
use qlink_core::quadrature::QuadratureSpec;
use qlink_core::quantities::parse_quantity;
use qlink_core::xsec::{photon_photon_cross_section_ev, thomson_cross_section, AngleModel, ChargedSpecies};
use qlink_core::{Quantity, Result, Unit};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Relative(f64),
    Absolute(f64),
    Window(f64, f64),
    /// Within a multiplicative factor either way.
    Factor(f64),
    Below(f64),
}

impl Tolerance {
    pub fn accepts(self, reference: f64, computed: f64) -> bool {
        if !computed.is_finite() {
            return false;
        }
        match self {
            Tolerance::Relative(r) => ((computed - reference) / reference).abs() <= r,
            Tolerance::Absolute(a) => (computed - reference).abs() <= a,
            Tolerance::Window(lo, hi) => (lo..=hi).contains(&computed),
            Tolerance::Factor(f) => {
                computed > 0.0 && reference > 0.0 && (computed / reference).max(reference / computed) <= f
            }
            Tolerance::Below(b) => computed < b,
        }
    }

    pub fn describe(self) -> String {
        match self {
            Tolerance::Relative(r) if r < 1e-4 => format!("±{r:e} rel"),
            Tolerance::Relative(r) => format!("±{}%", r * 100.0),
            Tolerance::Absolute(a) => format!("±{a:e} abs"),
            Tolerance::Window(lo, hi) => format!("[{lo:e}, {hi:e}]"),
            Tolerance::Factor(f) => format!("×/÷{f}"),
            Tolerance::Below(b) => format!("<{b:e}"),
        }
    }
}

pub struct Case {
    pub id: &'static str,
    pub description: &'static str,
    pub unit: &'static str,
    pub reference: f64,
    pub tolerance: Tolerance,
    compute: fn() -> Result<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub id: &'static str,
    pub description: &'static str,
    pub unit: &'static str,
    pub reference: f64,
    pub computed: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
}

impl CaseResult {
    /// |computed − reference| / |reference|; NaN for a zero reference.
    pub fn relative_deviation(&self) -> f64 {
        if self.reference == 0.0 {
            f64::NAN
        } else {
            ((self.computed - self.reference) / self.reference).abs()
        }
    }
}

impl Case {
    pub fn run(&self) -> Result<CaseResult> {
        let computed = (self.compute)()?;
        Ok(CaseResult {
            id: self.id,
            description: self.description,
            unit: self.unit,
            reference: self.reference,
            computed,
            tolerance: self.tolerance,
            pass: self.tolerance.accepts(self.reference, computed),
        })
    }
}

fn q(text: &str) -> Quantity {
    parse_quantity(text).expect("literal quantity")
}

fn optical_pulse() -> GaussianPulse {
    GaussianPulse::new(q("600 THz"), q("7 MHz")).expect("valid pulse")
}

fn sun_3km() -> SchwarzschildBody {
    SchwarzschildBody::new("sun_3km", q("3 km")).expect("valid body")
}

fn leo_delta() -> Result<f64> {
    redshift_delta(
        &SchwarzschildBody::earth(),
        q("6371 km"),
        q("7500 km"),
        RedshiftModel::Static,
    )
}

fn ism_mfp(n: &str, unit: Unit) -> Result<f64> {
    mean_free_path_density(q(n), thomson_cross_section(&ChargedSpecies::electron()))?.value_in(unit)
}

fn background_rate(name: &str) -> Result<f64> {
    let cat = builtin_catalog();
    rate_spectral(
        q("100 keV"),
        cat.background(name)?,
        AngleModel::IsotropicMean,
        &QuadratureSpec::default(),
    )?
    .value_in(Unit::PerS)
}

fn spe_phi_sigma() -> (Quantity, Quantity) {
    (q("1e5 cm^-2 s^-1"), thomson_cross_section(&ChargedSpecies::proton()))
}

fn va_phi_sigma() -> (Quantity, Quantity) {
    (q("1e7 cm^-2 s^-1"), thomson_cross_section(&ChargedSpecies::electron()))
}

pub fn all_cases() -> Vec<Case> {
    vec![
        Case {
            id: "sigma_th_electron",
            description: "Thomson cross section, electron",
            unit: "cm^2",
            reference: 6.65e-25,
            tolerance: Tolerance::Relative(0.005),
            compute: || thomson_cross_section(&ChargedSpecies::electron()).value_in(Unit::Cm2),
        },
        Case {
            id: "mfp_ism_thomson",
            description: "Thomson mean free path, n = 1 cm^-3",
            unit: "m",
            reference: 1e22,
            tolerance: Tolerance::Window(1e22, 2e22),
            compute: || ism_mfp("1 cm^-3", Unit::M),
        },
        Case {
            id: "mfp_ism_thomson_pc",
            description: "Thomson mean free path, n = 1 cm^-3, order in pc",
            unit: "pc",
            reference: 1e6,
            tolerance: Tolerance::Factor(10.0),
            compute: || ism_mfp("1 cm^-3", Unit::Pc),
        },
        Case {
            id: "mfp_hii_thomson",
            description: "Thomson mean free path, n = 1e4 cm^-3",
            unit: "pc",
            reference: 1e2,
            tolerance: Tolerance::Window(1e2, 2e2),
            compute: || ism_mfp("1e4 cm^-3", Unit::Pc),
        },
        Case {
            id: "n_cmb",
            description: "CMB photon number density, T = 2e-4 eV",
            unit: "cm^-3",
            reference: 411.0,
            tolerance: Tolerance::Relative(0.01),
            compute: || cmb_number_density(q("2e-4 eV"))?.value_in(Unit::PerCm3),
        },
        Case {
            id: "e_cmb_mean",
            description: "CMB mean photon energy, T = 2e-4 eV",
            unit: "eV",
            reference: 6.34e-4,
            tolerance: Tolerance::Relative(0.01),
            compute: || cmb_mean_energy(q("2e-4 eV"))?.value_in(Unit::EV),
        },
        Case {
            id: "sigma_gg_5_07ev",
            description: "photon-photon cross section, omega = 5.07 eV",
            unit: "cm^2",
            reference: 1.19e-61,
            tolerance: Tolerance::Relative(0.02),
            compute: || Ok(photon_photon_cross_section_ev(5.07)? * 1e4),
        },
        Case {
            id: "mfp_cmb",
            description: "CMB mean free path, omega = 5.07 eV, n = 411 cm^-3",
            unit: "cm",
            reference: 2e58,
            tolerance: Tolerance::Factor(1.5),
            compute: || {
                let sigma = Quantity::new(photon_photon_cross_section_ev(5.07)?, Unit::M2);
                mean_free_path_density(q("411 cm^-3"), sigma)?.value_in(Unit::Cm)
            },
        },
        Case {
            id: "catalog_solar_wind_electrons",
            description: "catalog density, solar wind electrons",
            unit: "cm^-3",
            reference: 7.1,
            tolerance: Tolerance::Relative(1e-12),
            compute: || {
                let cat = builtin_catalog();
                let p = cat.population("solar_wind_electrons")?;
                p.density().expect("density population").value_in(Unit::PerCm3)
            },
        },
        Case {
            id: "gamma_spe",
            description: "solar particle event rate, protons",
            unit: "s^-1",
            reference: 1e-26,
            tolerance: Tolerance::Factor(2.0),
            compute: || {
                let (phi, sigma) = spe_phi_sigma();
                rate_from_flux(phi, sigma)?.value_in(Unit::PerS)
            },
        },
        Case {
            id: "mfp_spe",
            description: "solar particle event mean free path",
            unit: "m",
            reference: 1e34,
            tolerance: Tolerance::Factor(2.0),
            compute: || {
                let (phi, sigma) = spe_phi_sigma();
                mfp_from_flux(phi, sigma)?.value_in(Unit::M)
            },
        },
        Case {
            id: "gamma_va",
            description: "Van Allen belt rate, electrons",
            unit: "s^-1",
            reference: 1e-18,
            tolerance: Tolerance::Factor(2.0),
            compute: || {
                let (phi, sigma) = va_phi_sigma();
                rate_from_flux(phi, sigma)?.value_in(Unit::PerS)
            },
        },
        Case {
            id: "mfp_va",
            description: "Van Allen belt mean free path",
            unit: "m",
            reference: 1e25,
            tolerance: Tolerance::Factor(2.0),
            compute: || {
                let (phi, sigma) = va_phi_sigma();
                mfp_from_flux(phi, sigma)?.value_in(Unit::M)
            },
        },
        Case {
            id: "catalog_cxb_amplitude",
            description: "catalog CXB amplitude",
            unit: "keV^-1 cm^-2 s^-1 sr^-1",
            reference: 10.15e-2,
            tolerance: Tolerance::Relative(1e-12),
            compute: || {
                let cat = builtin_catalog();
                match cat.background("cxb")?.spectrum {
                    qlink_core::environments::Spectrum::DoublePowerLaw { amplitude, .. } => Ok(amplitude),
                    _ => Ok(f64::NAN),
                }
            },
        },
        Case {
            id: "gamma_cxb",
            description: "100 keV photon on the cosmic X-ray background",
            unit: "s^-1",
            reference: 8e-52,
            tolerance: Tolerance::Factor(10.0),
            compute: || background_rate("cxb"),
        },
        Case {
            id: "gamma_ebl",
            description: "100 keV photon on the optical EBL",
            unit: "s^-1",
            reference: 5e-44,
            tolerance: Tolerance::Factor(10.0),
            compute: || background_rate("ebl_optical"),
        },
        Case {
            id: "ebl_brightness",
            description: "EBL integrated brightness, 4e4 to 1e6 GHz",
            unit: "nW m^-2 sr^-1",
            reference: 21.0,
            tolerance: Tolerance::Absolute(1.0),
            compute: || {
                builtin_catalog()
                    .background("ebl_optical")?
                    .ebl_brightness(&QuadratureSpec::default())
            },
        },
        Case {
            id: "gamma_solar",
            description: "100 keV photon on sunlight at 1 AU (synthetic 5778 K table)",
            unit: "s^-1",
            reference: 7e-33,
            tolerance: Tolerance::Factor(10.0),
            compute: || {
                let sun = synthetic_solar_spectrum(5778.0, 400)?;
                rate_spectral(
                    q("100 keV"),
                    &sun,
                    AngleModel::IsotropicMean,
                    &QuadratureSpec::default(),
                )?
                .value_in(Unit::PerS)
            },
        },
        Case {
            id: "delta_leo",
            description: "redshift delta, Earth 6371 -> 7500 km",
            unit: "1",
            reference: 5e-11,
            tolerance: Tolerance::Window(4.5e-11, 6e-11),
            compute: leo_delta,
        },
        Case {
            id: "delta2_minkowski",
            description: "overlap squared at delta = 0",
            unit: "1",
            reference: 1.0,
            tolerance: Tolerance::Absolute(1e-15),
            compute: || Ok(gaussian_overlap(&optical_pulse(), 0.0)?.powi(2)),
        },
        Case {
            id: "delta2_optical_leo",
            description: "overlap squared, 600 THz / 7 MHz, Earth LEO",
            unit: "1",
            reference: 0.9999948,
            tolerance: Tolerance::Absolute(1e-6),
            compute: || Ok(gaussian_overlap(&optical_pulse(), leo_delta()?)?.powi(2)),
        },
        Case {
            id: "delta2_mossbauer_leo",
            description: "overlap squared, 14.4 keV / 5 neV, Earth LEO",
            unit: "1",
            reference: 0.0,
            tolerance: Tolerance::Below(EFFECTIVELY_ZERO),
            compute: || {
                let pulse = GaussianPulse::new(q("14.4 keV"), q("5e-9 eV"))?;
                Ok(gaussian_overlap(&pulse, leo_delta()?)?.powi(2))
            },
        },
        Case {
            id: "delta_sun_proxima",
            description: "redshift delta, Sun 1e8 -> 4e13 km",
            unit: "1",
            reference: 7.5e-9,
            tolerance: Tolerance::Window(7.2e-9, 7.8e-9),
            compute: || {
                redshift_delta(
                    &SchwarzschildBody::sun(),
                    q("1e8 km"),
                    q("4e13 km"),
                    RedshiftModel::Static,
                )
            },
        },
        Case {
            id: "delta2_proxima",
            description: "overlap squared, 600 THz / 7 MHz, delta = 7.5e-9",
            unit: "1",
            reference: 0.901842,
            tolerance: Tolerance::Absolute(0.002),
            compute: || Ok(gaussian_overlap(&optical_pulse(), 7.5e-9)?.powi(2)),
        },
        Case {
            id: "delta2_sun_1au",
            description: "overlap squared, 600 THz / 7 MHz, Sun 1 -> 1.01 AU",
            unit: "1",
            reference: 0.9999948,
            tolerance: Tolerance::Absolute(1e-5),
            compute: || {
                let d = redshift_delta(
                    &SchwarzschildBody::sun(),
                    q("1 AU"),
                    q("1.01 AU"),
                    RedshiftModel::Static,
                )?;
                Ok(gaussian_overlap(&optical_pulse(), d)?.powi(2))
            },
        },
        Case {
            id: "ct_max_ly",
            description: "coherent path bound, l = 6e7 km, r_S = 3 km",
            unit: "ly",
            reference: 127.0,
            tolerance: Tolerance::Relative(0.01),
            compute: || max_coherent_path(&sun_3km(), q("6e7 km"))?.value_in(Unit::Ly),
        },
        Case {
            id: "ct_max_pc",
            description: "coherent path bound, l = 6e7 km, r_S = 3 km",
            unit: "pc",
            reference: 39.0,
            tolerance: Tolerance::Relative(0.03),
            compute: || max_coherent_path(&sun_3km(), q("6e7 km"))?.value_in(Unit::Pc),
        },
    ]
}

pub fn case_ids() -> Vec<&'static str> {
    all_cases().iter().map(|c| c.id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_unique() {
        let mut ids = case_ids();
        let n = ids.len();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn tolerance_rules() {
        assert!(Tolerance::Relative(0.01).accepts(100.0, 100.9));
        assert!(!Tolerance::Relative(0.01).accepts(100.0, 101.1));
        assert!(Tolerance::Factor(2.0).accepts(1.0, 0.51));
        assert!(!Tolerance::Factor(2.0).accepts(1.0, 2.1));
        assert!(Tolerance::Window(1.0, 2.0).accepts(0.0, 2.0));
        assert!(!Tolerance::Below(1e-30).accepts(0.0, f64::NAN));
    }

    #[test]
    fn optical_leo_passes() {
        let case = all_cases().into_iter().find(|c| c.id == "delta2_optical_leo").unwrap();
        let r = case.run().unwrap();
        assert!(r.pass, "{r:?}");
    }
}
