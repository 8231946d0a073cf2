//! Single-qubit teleportation over a shared Bell pair, a dephasing channel
//! for Bob's half, and the spin-decoherence model in which a qubit's relative
//! phase is averaged over a momentum distribution.
//!
//! Registers are ordered (A′, A, B): A′ holds the state to send, A and B the
//! shared pair. Basis index 0 is |+⟩ and 1 is |−⟩.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{entropy_of_spectrum, fidelity, CMatrix, DensityMatrix, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellKind {
    PsiMinus,
    PsiPlus,
    PhiMinus,
    PhiPlus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PsiMinus,
        BellKind::PsiPlus,
        BellKind::PhiMinus,
        BellKind::PhiPlus,
    ];

    /// Two classical bits naming a Bell measurement result: the first is 1
    /// for Ψ (odd parity), the second is 1 for the minus sign.
    pub fn bits(self) -> [u8; 2] {
        match self {
            BellKind::PhiPlus => [0, 0],
            BellKind::PhiMinus => [0, 1],
            BellKind::PsiPlus => [1, 0],
            BellKind::PsiMinus => [1, 1],
        }
    }

    pub fn from_bits(bits: [u8; 2]) -> Result<Self> {
        match bits {
            [0, 0] => Ok(BellKind::PhiPlus),
            [0, 1] => Ok(BellKind::PhiMinus),
            [1, 0] => Ok(BellKind::PsiPlus),
            [1, 1] => Ok(BellKind::PsiMinus),
            other => Err(Error::InvalidState(format!("invalid classical bits {other:?}"))),
        }
    }

    fn amplitudes(self) -> [f64; 4] {
        let s = FRAC_1_SQRT_2;
        match self {
            BellKind::PsiMinus => [0.0, s, -s, 0.0],
            BellKind::PsiPlus => [0.0, s, s, 0.0],
            BellKind::PhiMinus => [s, 0.0, 0.0, -s],
            BellKind::PhiPlus => [s, 0.0, 0.0, s],
        }
    }

    fn index(self) -> usize {
        Self::ALL.iter().position(|&k| k == self).unwrap()
    }
}

pub fn make_bell(kind: BellKind) -> PureState {
    PureState::new(kind.amplitudes().iter().map(|&a| Complex64::from(a)).collect()).expect("Bell states are normalized")
}

fn c(re: f64) -> Complex64 {
    Complex64::from(re)
}

fn identity() -> CMatrix {
    CMatrix::identity(2, 2)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

/// Bob's correction for a measured outcome, up to global phase.
///
/// With Ψ⁻ shared: Ψ⁻ → I, Ψ⁺ → Z, Φ⁻ → X, Φ⁺ → Z·X. Any other shared pair
/// equals (I ⊗ P)Ψ⁻ up to phase, with P = Z, X, X·Z for Ψ⁺, Φ⁻, Φ⁺, so its
/// table is the Ψ⁻ table followed by P†.
pub fn correction_unitary(outcome: BellKind, shared: BellKind) -> CMatrix {
    let (x, z) = (pauli_x(), pauli_z());
    let base = match outcome {
        BellKind::PsiMinus => identity(),
        BellKind::PsiPlus => z.clone(),
        BellKind::PhiMinus => x.clone(),
        BellKind::PhiPlus => &z * &x,
    };
    let frame = match shared {
        BellKind::PsiMinus => identity(),
        BellKind::PsiPlus => z,
        BellKind::PhiMinus => x,
        BellKind::PhiPlus => &x * &z,
    };
    base * frame.adjoint()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportOutcome {
    pub measured: BellKind,
    pub classical_bits: [u8; 2],
    /// Probability of the measured branch.
    pub probability: f64,
    pub bob_raw: DensityMatrix,
    pub bob_corrected: DensityMatrix,
    pub fidelity_with_input: f64,
}

/// Bob's unnormalized conditional state for each Bell outcome on (A′, A).
fn branch_states(chi: &PureState, shared: BellKind) -> [[Complex64; 2]; 4] {
    let full = chi.tensor(&make_bell(shared)).expect("3 qubits fit");
    let psi = full.amplitudes();
    let mut out = [[Complex64::from(0.0); 2]; 4];
    for (k, kind) in BellKind::ALL.iter().enumerate() {
        let bell = kind.amplitudes();
        for (j, slot) in out[k].iter_mut().enumerate() {
            *slot = (0..4).map(|x| psi[x * 2 + j] * bell[x]).sum();
        }
    }
    out
}

fn check_qubit(chi: &PureState) -> Result<()> {
    if chi.dim() != 2 {
        return Err(Error::InvalidState(format!(
            "teleportation sends a qubit, got dimension {}",
            chi.dim()
        )));
    }
    Ok(())
}

/// Runs the protocol once with a generator seeded from `rng_seed`.
pub fn teleport(chi: &PureState, shared: BellKind, rng_seed: u64) -> Result<TeleportOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    teleport_with_rng(chi, shared, &mut rng, None)
}

/// Runs the protocol drawing the Bell measurement from `rng`. When
/// `dephase_p` is given, Bob's qubit passes through [`dephase`] before the
/// correction. Classical bits are delivered without error.
pub fn teleport_with_rng<R: Rng + ?Sized>(
    chi: &PureState,
    shared: BellKind,
    rng: &mut R,
    dephase_p: Option<f64>,
) -> Result<TeleportOutcome> {
    check_qubit(chi)?;
    let branches = branch_states(chi, shared);
    let probs: Vec<f64> = branches.iter().map(|b| b[0].norm_sqr() + b[1].norm_sqr()).collect();
    let u: f64 = rng.random::<f64>() * probs.iter().sum::<f64>();
    let mut acc = 0.0;
    let mut k = 3;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            k = i;
            break;
        }
    }
    let measured = BellKind::ALL[k];
    let bob = PureState::normalized(branches[k].to_vec())?;
    let mut bob_raw = bob.density();
    if let Some(p) = dephase_p {
        bob_raw = dephase(&bob_raw, p)?;
    }
    let bob_corrected = bob_raw.evolve(&correction_unitary(measured, shared))?;
    let fidelity_with_input = fidelity(&bob_corrected, &chi.density())?;
    Ok(TeleportOutcome {
        measured,
        classical_bits: measured.bits(),
        probability: probs[k],
        bob_raw,
        bob_corrected,
        fidelity_with_input,
    })
}

/// Scales the off-diagonal entries of a qubit state by 1 − p.
pub fn dephase(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::InvalidState(format!(
            "dephasing acts on a qubit, got dimension {}",
            rho.dim()
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "dephasing probability must lie in [0, 1], got {p}"
        )));
    }
    let mut m = rho.matrix().clone();
    m[(0, 1)] *= 1.0 - p;
    m[(1, 0)] *= 1.0 - p;
    DensityMatrix::new(m)
}

/// Uniform random qubit on the Bloch sphere from two uniform variates
/// u₁, u₂ ∈ [0, 1) drawn in that order: cos θ = 1 − 2u₁, φ = 2πu₂,
/// state cos(θ/2)|+⟩ + e^{iφ} sin(θ/2)|−⟩.
pub fn random_bloch_state<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let theta = (1.0 - 2.0 * u1).clamp(-1.0, 1.0).acos();
    let phi = 2.0 * PI * u2;
    let (s, co) = (theta / 2.0).sin_cos();
    PureState::normalized(vec![Complex64::from(co), Complex64::from_polar(s, phi)]).expect("unit vector")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub count: u64,
    pub seed: u64,
    pub dephase_p: f64,
    pub mean_fidelity: f64,
    /// Outcome counts in [`BellKind::ALL`] order.
    pub histogram: [u64; 4],
}

/// Teleports `count` random Bloch states. One generator seeded from `seed`
/// supplies, per trial, the two state variates then the measurement variate.
pub fn run_trials(count: u64, seed: u64, shared: BellKind, dephase_p: f64) -> Result<TrialSummary> {
    if count == 0 {
        return Err(Error::Domain("trial count must be positive".into()));
    }
    if !(0.0..=1.0).contains(&dephase_p) {
        return Err(Error::Domain(format!(
            "dephasing probability must lie in [0, 1], got {dephase_p}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut histogram = [0u64; 4];
    let mut total = 0.0;
    let noise = (dephase_p > 0.0).then_some(dephase_p);
    for _ in 0..count {
        let chi = random_bloch_state(&mut rng);
        let out = teleport_with_rng(&chi, shared, &mut rng, noise)?;
        histogram[out.measured.index()] += 1;
        total += out.fidelity_with_input;
    }
    Ok(TrialSummary {
        count,
        seed,
        dephase_p,
        mean_fidelity: total / count as f64,
        histogram,
    })
}

/// Distribution of the accumulated phase Ωτ over the momentum spread of a
/// wave packet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumSpread {
    Delta { phase: f64 },
    GaussianPhase { mean: f64, std: f64 },
    Samples { samples: Vec<(f64, f64)> },
}

impl MomentumSpread {
    pub fn samples(samples: Vec<(f64, f64)>) -> Result<Self> {
        let s = Self::Samples { samples };
        s.validate()?;
        Ok(s)
    }

    /// `n` equally weighted phases evenly spaced over [0, 2π).
    pub fn uniform_grid(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("need at least one phase sample".into()));
        }
        let w = 1.0 / n as f64;
        Self::samples((0..n).map(|i| (2.0 * PI * i as f64 / n as f64, w)).collect())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MomentumSpread::Delta { phase } if !phase.is_finite() => Err(Error::Domain("phase must be finite".into())),
            MomentumSpread::GaussianPhase { mean, std } if !mean.is_finite() || !(*std >= 0.0) || !std.is_finite() => {
                Err(Error::Domain(format!(
                    "Gaussian phase needs finite mean and std ≥ 0, got ({mean}, {std})"
                )))
            }
            MomentumSpread::Samples { samples } => {
                if samples.is_empty() {
                    return Err(Error::Domain("phase sample list is empty".into()));
                }
                if samples.iter().any(|&(p, w)| !p.is_finite() || !(w >= 0.0)) {
                    return Err(Error::Domain(
                        "phase samples need finite phases and non-negative weights".into(),
                    ));
                }
                let total: f64 = samples.iter().map(|s| s.1).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::Domain(format!("phase weights sum to {total}, not 1")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// ⟨e^{iΩτ}⟩
    pub fn characteristic(&self) -> Result<Complex64> {
        self.validate()?;
        Ok(match self {
            MomentumSpread::Delta { phase } => Complex64::from_polar(1.0, *phase),
            MomentumSpread::GaussianPhase { mean, std } => Complex64::from_polar((-0.5 * std * std).exp(), *mean),
            MomentumSpread::Samples { samples } => samples.iter().map(|&(p, w)| Complex64::from_polar(w, p)).sum(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinDecoherence {
    pub rho_f: DensityMatrix,
    /// |⟨e^{iΩτ}⟩|
    pub coherence: f64,
    /// Smaller eigenvalue of ρ_f, ½(1 − |⟨e^{iΩτ}⟩|).
    pub p: f64,
    pub entropy_bits: f64,
}

pub fn spin_decoherence(spread: &MomentumSpread) -> Result<SpinDecoherence> {
    let avg = spread.characteristic()?;
    let coherence = avg.norm().min(1.0);
    let (cos, sin) = (avg.re, avg.im);
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[c(0.5 * (1.0 + cos)), c(0.5 * sin), c(0.5 * sin), c(0.5 * (1.0 - cos))],
    );
    let rho_f = DensityMatrix::new(m)?;
    let p = 0.5 * (1.0 - coherence);
    let entropy_bits = entropy_of_spectrum(&[p, 1.0 - p]);
    Ok(SpinDecoherence {
        rho_f,
        coherence,
        p,
        entropy_bits,
    })
}
