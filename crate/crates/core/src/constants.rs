//! Physical constants (CODATA 2018 / IAU 2012 and 2015 nominal values).
//!
//! Natural-unit kernels work in eV with ħ = c = 1; `HBAR_C` and `H_EV_S`
//! convert back to lengths and times at module boundaries.

/// Fine-structure constant.
pub const ALPHA: f64 = 7.297_352_569_3e-3;
/// Electron mass, eV.
pub const ELECTRON_MASS_EV: f64 = 0.510_998_950_00e6;
/// Proton mass, eV.
pub const PROTON_MASS_EV: f64 = 938.272_088_16e6;
/// Alpha-particle mass, eV.
pub const ALPHA_PARTICLE_MASS_EV: f64 = 3_727.379_409_7e6;
/// Hydrogen atom mass (1.007825 u), eV.
pub const HYDROGEN_MASS_EV: f64 = 938.783_066e6;
/// Helium-4 atom mass (4.002602 u), eV.
pub const HELIUM_MASS_EV: f64 = 3_728.401_3e6;
/// ħc in eV·m.
pub const HBAR_C_EV_M: f64 = 1.973_269_804e-7;
/// Planck constant in eV·s.
pub const H_EV_S: f64 = 4.135_667_696e-15;
/// Speed of light, m/s.
pub const C_M_S: f64 = 299_792_458.0;
/// Boltzmann constant, eV/K.
pub const K_B_EV_K: f64 = 8.617_333_262e-5;
/// Elementary charge; one eV in joules.
pub const EV_IN_J: f64 = 1.602_176_634e-19;
/// Apéry's constant ζ(3).
pub const ZETA3: f64 = 1.202_056_903_159_594_3;
/// Parsec, m.
pub const PC_IN_M: f64 = 3.085_677_581_491_367e16;
/// Astronomical unit, m.
pub const AU_IN_M: f64 = 1.495_978_707e11;
/// Julian light-year, m.
pub const LY_IN_M: f64 = 9.460_730_472_580_8e15;
/// Nominal solar radius, m.
pub const SOLAR_RADIUS_M: f64 = 6.957e8;

/// Bundle of the constants above, for callers that want to pass them around
/// or print them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub alpha: f64,
    pub m_e: f64,
    pub m_p: f64,
    pub hbar_c: f64,
    pub c: f64,
    pub k_b: f64,
    pub zeta3: f64,
    pub pc_in_m: f64,
    pub au_in_m: f64,
    pub ly_in_m: f64,
}

pub const CONSTANTS: Constants = Constants {
    alpha: ALPHA,
    m_e: ELECTRON_MASS_EV,
    m_p: PROTON_MASS_EV,
    hbar_c: HBAR_C_EV_M,
    c: C_M_S,
    k_b: K_B_EV_K,
    zeta3: ZETA3,
    pc_in_m: PC_IN_M,
    au_in_m: AU_IN_M,
    ly_in_m: LY_IN_M,
};
