//! Gravitational redshift between two static observers outside a
//! Schwarzschild body, the resulting loss of overlap for a Gaussian wave
//! packet, and the path-length bound for coherent propagation past a body.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::quantities::{Dimension, Quantity};

#[derive(Debug, Clone, PartialEq)]
pub struct SchwarzschildBody {
    pub name: String,
    schwarzschild_radius_m: f64,
}

impl SchwarzschildBody {
    pub fn new(name: impl Into<String>, schwarzschild_radius: Quantity) -> Result<Self> {
        schwarzschild_radius.expect_dimension(Dimension::Length, "Schwarzschild radius")?;
        let r = schwarzschild_radius.canonical();
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!(
                "Schwarzschild radius must be positive, got {schwarzschild_radius}"
            )));
        }
        Ok(Self {
            name: name.into(),
            schwarzschild_radius_m: r,
        })
    }

    pub fn earth() -> Self {
        Self {
            name: "earth".into(),
            schwarzschild_radius_m: 8.87e-3,
        }
    }

    pub fn sun() -> Self {
        Self {
            name: "sun".into(),
            schwarzschild_radius_m: 2.95e3,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "earth" => Ok(Self::earth()),
            "sun" => Ok(Self::sun()),
            _ => Err(Error::NotFound { name: name.to_string() }),
        }
    }

    pub fn schwarzschild_radius(&self) -> Quantity {
        Quantity::meters(self.schwarzschild_radius_m)
    }

    pub fn schwarzschild_radius_m(&self) -> f64 {
        self.schwarzschild_radius_m
    }
}

/// Normalized Gaussian spectral amplitude of a single-photon wave packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulse {
    pub peak: Quantity,
    pub width: Quantity,
}

impl GaussianPulse {
    pub fn new(peak: Quantity, width: Quantity) -> Result<Self> {
        let dim = peak.dimension();
        if dim != Dimension::Energy && dim != Dimension::InverseTime {
            return Err(Error::Domain(format!(
                "pulse peak must be a frequency or energy, got {peak}"
            )));
        }
        width.expect_dimension(dim, "pulse width")?;
        let (p, w) = (peak.canonical(), width.canonical());
        if !(p > 0.0 && w > 0.0) || !p.is_finite() || !w.is_finite() {
            return Err(Error::Domain("pulse peak and width must be positive".into()));
        }
        if p / w <= 10.0 {
            return Err(Error::Domain(format!(
                "pulse peak/width = {} is too small; need > 10 for the narrow-band approximation",
                p / w
            )));
        }
        Ok(Self { peak, width })
    }

    /// Ω₀/σ
    pub fn quality(&self) -> f64 {
        self.peak.canonical() / self.width.canonical()
    }
}

/// Optional orbital-motion correction to the static redshift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RedshiftModel {
    /// 1 − r_S/r
    #[default]
    Static,
    /// 1 − (3/2) r_S/r for observers on circular orbits.
    CircularOrbit,
}

impl RedshiftModel {
    fn coefficient(self) -> f64 {
        match self {
            RedshiftModel::Static => 1.0,
            RedshiftModel::CircularOrbit => 1.5,
        }
    }
}

/// Υ = ω_B/ω_A = √((1 − r_S/r_A)/(1 − r_S/r_B)).
pub fn redshift_factor(body: &SchwarzschildBody, r_a: Quantity, r_b: Quantity, model: RedshiftModel) -> Result<f64> {
    Ok(log_upsilon(body, r_a, r_b, model)?.exp())
}

/// δ = |Υ^{1/2} − 1|, evaluated without cancellation.
pub fn redshift_delta(body: &SchwarzschildBody, r_a: Quantity, r_b: Quantity, model: RedshiftModel) -> Result<f64> {
    Ok((0.5 * log_upsilon(body, r_a, r_b, model)?).exp_m1().abs())
}

fn log_upsilon(body: &SchwarzschildBody, r_a: Quantity, r_b: Quantity, model: RedshiftModel) -> Result<f64> {
    let k = model.coefficient();
    let rs = body.schwarzschild_radius_m;
    let x_a = k * rs / radius_outside(body, r_a, k)?;
    let x_b = k * rs / radius_outside(body, r_b, k)?;
    Ok(0.5 * ((-x_a).ln_1p() - (-x_b).ln_1p()))
}

fn radius_outside(body: &SchwarzschildBody, r: Quantity, k: f64) -> Result<f64> {
    r.expect_dimension(Dimension::Length, "radius")?;
    let v = r.canonical();
    if !(v > k * body.schwarzschild_radius_m) || !v.is_finite() {
        return Err(Error::Domain(format!(
            "radius {r} is not outside {} r_S of `{}` ({} m)",
            k, body.name, body.schwarzschild_radius_m
        )));
    }
    Ok(v)
}

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..1.0).contains(&delta) {
        Ok(())
    } else {
        Err(Error::Domain(format!("δ must lie in [0, 1), got {delta}")))
    }
}

/// Closed-form overlap Δ = √(2s/(1+s²))·exp(−δ²(Ω₀/σ)²/(4(1+s²))), s = 1 − δ.
pub fn gaussian_overlap(pulse: &GaussianPulse, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let s = 1.0 - delta;
    let q = pulse.quality();
    let d = 1.0 + s * s;
    Ok((2.0 * s / d).sqrt() * (-(delta * q).powi(2) / (4.0 * d)).exp())
}

/// Δ = ∫₀^∞ f_A(Ω) f_B(Ω) dΩ evaluated by quadrature, with f_B the packet
/// received at frequencies scaled by 1 − δ.
pub fn gaussian_overlap_numeric(pulse: &GaussianPulse, delta: f64, quadrature: &QuadratureSpec) -> Result<f64> {
    check_delta(delta)?;
    let s = 1.0 - delta;
    let q = pulse.quality();
    let dq = delta * q;
    // standardized u = (Ω − Ω₀)/σ; Ω ≥ 0 means u ≥ −Ω₀/σ
    let norm = s.sqrt() / (2.0 * std::f64::consts::PI).sqrt();
    let f = |u: f64| norm * (-(u * u) / 4.0 - (s * u - dq).powi(2) / 4.0).exp();
    let centre = s * dq / (1.0 + s * s);
    let lo = (centre - 40.0).max(-q);
    let hi = centre + 40.0;
    if hi <= lo {
        return Ok(0.0);
    }
    Ok(integrate(f, lo, hi, quadrature)?.value)
}

/// ℓ²/r_S: coherent propagation past a body at closest approach ℓ requires
/// c·t_max well below this length.
pub fn max_coherent_path(body: &SchwarzschildBody, closest_approach: Quantity) -> Result<Quantity> {
    let l = radius_outside(body, closest_approach, 1.0)?;
    Ok(Quantity::meters(l * l / body.schwarzschild_radius_m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceFlag {
    Ok,
    /// Path above 10% of the bound.
    Marginal,
    Violated,
}

pub const MARGINAL_FRACTION: f64 = 0.1;

pub fn classify_path(path_length: Quantity, bound: Quantity) -> Result<CoherenceFlag> {
    path_length.expect_dimension(Dimension::Length, "path length")?;
    bound.expect_dimension(Dimension::Length, "coherence bound")?;
    let (l, b) = (path_length.canonical(), bound.canonical());
    Ok(if l > b {
        CoherenceFlag::Violated
    } else if l > MARGINAL_FRACTION * b {
        CoherenceFlag::Marginal
    } else {
        CoherenceFlag::Ok
    })
}

pub const EFFECTIVELY_ZERO: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub upsilon: f64,
    pub delta: f64,
    pub overlap: f64,
    pub overlap_squared: f64,
    /// Δ² below 1e-30.
    pub effectively_zero: bool,
}

pub fn fidelity_report(
    body: &SchwarzschildBody,
    r_a: Quantity,
    r_b: Quantity,
    pulse: &GaussianPulse,
    model: RedshiftModel,
) -> Result<FidelityReport> {
    let upsilon = redshift_factor(body, r_a, r_b, model)?;
    let delta = redshift_delta(body, r_a, r_b, model)?;
    let overlap = gaussian_overlap(pulse, delta)?;
    let overlap_squared = overlap * overlap;
    Ok(FidelityReport {
        upsilon,
        delta,
        overlap,
        overlap_squared,
        effectively_zero: overlap_squared < EFFECTIVELY_ZERO,
    })
}
