//! Photon scattering cross sections: Thomson scattering off free charges and
//! low-energy (Euler–Heisenberg) light-by-light scattering.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{
    ALPHA, ALPHA_PARTICLE_MASS_EV, ELECTRON_MASS_EV, HBAR_C_EV_M, HELIUM_MASS_EV, HYDROGEN_MASS_EV, PROTON_MASS_EV,
};
use crate::error::{Error, Result};
use crate::quantities::{Dimension, Quantity, Unit};

#[derive(Debug, Clone, PartialEq)]
pub struct ChargedSpecies {
    pub name: String,
    mass_ev: f64,
    pub charge_magnitude: u32,
}

impl ChargedSpecies {
    pub fn new(name: impl Into<String>, mass: Quantity, charge_magnitude: u32) -> Result<Self> {
        mass.expect_dimension(Dimension::Energy, "species mass")?;
        let mass_ev = mass.canonical();
        if !(mass_ev > 0.0) || !mass_ev.is_finite() {
            return Err(Error::Domain(format!("species mass must be positive, got {mass}")));
        }
        Ok(Self {
            name: name.into(),
            mass_ev,
            charge_magnitude,
        })
    }

    pub fn mass(&self) -> Quantity {
        Quantity::ev(self.mass_ev)
    }

    pub fn mass_ev(&self) -> f64 {
        self.mass_ev
    }

    pub fn electron() -> Self {
        Self::builtin("electron", ELECTRON_MASS_EV, 1)
    }

    pub fn proton() -> Self {
        Self::builtin("proton", PROTON_MASS_EV, 1)
    }

    pub fn alpha_particle() -> Self {
        Self::builtin("alpha", ALPHA_PARTICLE_MASS_EV, 2)
    }

    pub fn hydrogen_atom() -> Self {
        Self::builtin("hydrogen", HYDROGEN_MASS_EV, 0)
    }

    pub fn helium_atom() -> Self {
        Self::builtin("helium", HELIUM_MASS_EV, 0)
    }

    fn builtin(name: &str, mass_ev: f64, charge: u32) -> Self {
        Self {
            name: name.to_string(),
            mass_ev,
            charge_magnitude: charge,
        }
    }

    /// Looks up one of the builtin species by name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "electron" | "e-" => Ok(Self::electron()),
            "proton" | "p+" => Ok(Self::proton()),
            "alpha" => Ok(Self::alpha_particle()),
            "hydrogen" | "H" => Ok(Self::hydrogen_atom()),
            "helium" | "He" => Ok(Self::helium_atom()),
            _ => Err(Error::NotFound { name: name.to_string() }),
        }
    }
}

/// Thomson cross section (8π/3)·Z⁴α²(ħc)²/m², in m².
///
/// Neutral species have no free charge to scatter off and return zero.
pub fn thomson_cross_section(species: &ChargedSpecies) -> Quantity {
    let z2 = f64::from(species.charge_magnitude).powi(2);
    let r = z2 * ALPHA * HBAR_C_EV_M / species.mass_ev;
    Quantity::new(8.0 * PI / 3.0 * r * r, Unit::M2)
}

/// Euler–Heisenberg γγ → γγ cross section 937α⁴ω⁶/(10125π m⁸), in m², for a
/// centre-of-momentum photon energy below the electron mass.
pub fn photon_photon_cross_section(omega_com: Quantity) -> Result<Quantity> {
    omega_com.expect_dimension(Dimension::Energy, "centre-of-momentum energy")?;
    photon_photon_cross_section_ev(omega_com.canonical()).map(|s| Quantity::new(s, Unit::M2))
}

/// Same as [`photon_photon_cross_section`] on raw eV, returning m².
pub fn photon_photon_cross_section_ev(omega_ev: f64) -> Result<f64> {
    if !(omega_ev >= 0.0) {
        return Err(Error::Domain(format!(
            "centre-of-momentum energy must be non-negative, got {omega_ev} eV"
        )));
    }
    if omega_ev >= ELECTRON_MASS_EV {
        return Err(Error::Domain(format!(
            "centre-of-momentum energy {omega_ev} eV is not below the electron mass \
             ({ELECTRON_MASS_EV} eV); the low-energy photon-photon cross section does not apply"
        )));
    }
    let x = omega_ev / ELECTRON_MASS_EV;
    let alpha2 = ALPHA * ALPHA;
    // ω⁶/m⁸ = (ω/m)⁶/m², evaluated in a scaled form to stay far from underflow.
    let natural = 937.0 * alpha2 * alpha2 * x.powi(6) / (10125.0 * PI) / (ELECTRON_MASS_EV * ELECTRON_MASS_EV);
    Ok(natural * HBAR_C_EV_M * HBAR_C_EV_M)
}

/// How the collision angle between the test photon and a background photon is
/// chosen when forming ω = √(E₁E₂(1 − cos θ)/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AngleModel {
    HeadOn,
    /// Average over isotropic directions, ⟨1 − cos θ⟩ = 1.
    #[default]
    IsotropicMean,
    /// Fixed angle in radians.
    Fixed(f64),
}

impl AngleModel {
    /// The factor (1 − cos θ)/2 entering ω².
    pub fn kinematic_factor(self) -> f64 {
        match self {
            AngleModel::HeadOn => 1.0,
            AngleModel::IsotropicMean => 0.5,
            AngleModel::Fixed(theta) => (1.0 - theta.cos()) / 2.0,
        }
    }
}

pub fn com_energy(e1: Quantity, e2: Quantity, angle: AngleModel) -> Result<Quantity> {
    let e1 = e1.photon_energy_ev()?;
    let e2 = e2.photon_energy_ev()?;
    if !(e1 > 0.0 && e2 > 0.0) {
        return Err(Error::Domain("photon energies must be positive".into()));
    }
    Ok(Quantity::ev(com_energy_ev(e1, e2, angle)))
}

pub fn com_energy_ev(e1: f64, e2: f64, angle: AngleModel) -> f64 {
    (e1 * e2 * angle.kinematic_factor()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cm2(q: Quantity) -> f64 {
        q.value_in(Unit::Cm2).unwrap()
    }

    #[test]
    fn thomson_electron() {
        assert_relative_eq!(
            cm2(thomson_cross_section(&ChargedSpecies::electron())),
            6.65e-25,
            max_relative = 5e-3
        );
    }

    #[test]
    fn thomson_proton() {
        // electron value × (m_e/m_p)², evaluated independently at 30 digits
        assert_relative_eq!(
            cm2(thomson_cross_section(&ChargedSpecies::proton())),
            1.973_170_483_327_093e-31,
            max_relative = 1e-12
        );
    }

    #[test]
    fn thomson_double_mass_quarter() {
        let heavy = ChargedSpecies::new("heavy", Quantity::ev(2.0 * ELECTRON_MASS_EV), 1).unwrap();
        let e = thomson_cross_section(&ChargedSpecies::electron()).value;
        assert_relative_eq!(thomson_cross_section(&heavy).value, e / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn neutral_species_do_not_scatter() {
        assert_eq!(thomson_cross_section(&ChargedSpecies::hydrogen_atom()).value, 0.0);
    }

    #[test]
    fn species_mass_validated() {
        assert!(ChargedSpecies::new("x", Quantity::ev(0.0), 1).is_err());
        assert!(ChargedSpecies::new("x", Quantity::ev(-1.0), 1).is_err());
        assert!(ChargedSpecies::new("x", Quantity::meters(1.0), 1).is_err());
        assert!(ChargedSpecies::by_name("muon").is_err());
    }

    #[test]
    fn photon_photon_reference_value() {
        let s = photon_photon_cross_section(Quantity::ev(5.07)).unwrap();
        assert_relative_eq!(cm2(s), 1.19e-61, max_relative = 2e-2);
        assert_relative_eq!(cm2(s), 1.188_274_120_892_846e-61, max_relative = 1e-12);
    }

    #[test]
    fn photon_photon_zero_and_scaling() {
        assert_eq!(photon_photon_cross_section_ev(0.0).unwrap(), 0.0);
        let a = photon_photon_cross_section_ev(5.07).unwrap();
        let b = photon_photon_cross_section_ev(10.14).unwrap();
        assert_relative_eq!(b, 64.0 * a, max_relative = 1e-12);
    }

    #[test]
    fn photon_photon_domain() {
        assert!(matches!(
            photon_photon_cross_section_ev(ELECTRON_MASS_EV),
            Err(Error::Domain(_))
        ));
        assert!(photon_photon_cross_section_ev(1e7).is_err());
        assert!(photon_photon_cross_section(Quantity::meters(1.0)).is_err());
    }

    #[test]
    fn com_energy_examples() {
        let e = Quantity::ev(3.0);
        assert_relative_eq!(
            com_energy(e, e, AngleModel::HeadOn).unwrap().value,
            3.0,
            max_relative = 1e-15
        );
        assert_eq!(
            com_energy(e, Quantity::ev(7.0), AngleModel::Fixed(0.0)).unwrap().value,
            0.0
        );
        let w = com_energy(Quantity::ev(1e5), Quantity::ev(6.34e-4), AngleModel::HeadOn).unwrap();
        assert_relative_eq!(w.value, 7.962_411_694_957_753, max_relative = 1e-14);
        assert!(com_energy(Quantity::ev(0.0), e, AngleModel::HeadOn).is_err());
        let fixed_pi = com_energy(e, e, AngleModel::Fixed(PI)).unwrap().value;
        assert_relative_eq!(fixed_pi, 3.0, max_relative = 1e-15);
    }

    proptest! {
        #[test]
        fn thomson_mass_ratio(m1 in 1e3f64..1e12, m2 in 1e3f64..1e12) {
            let s1 = thomson_cross_section(&ChargedSpecies::new("a", Quantity::ev(m1), 1).unwrap()).value;
            let s2 = thomson_cross_section(&ChargedSpecies::new("b", Quantity::ev(m2), 1).unwrap()).value;
            prop_assert!((s1 / s2 - (m2 / m1).powi(2)).abs() <= 1e-12 * (m2 / m1).powi(2));
            if m1 < m2 { prop_assert!(s1 > s2); }
            prop_assert!(s1 >= 0.0);
        }

        #[test]
        fn photon_photon_sixth_power(w in 1e-6f64..1e4, k in 0.01f64..40.0) {
            let a = photon_photon_cross_section_ev(w).unwrap();
            let b = photon_photon_cross_section_ev(k * w).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert!((b / (a * k.powi(6)) - 1.0).abs() < 1e-12);
        }
    }
}
