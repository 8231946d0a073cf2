//! Small exact quantum states: pure states and density matrices up to four
//! qubits, Uhlmann fidelity, von Neumann entropy and partial traces.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const MAX_DIM: usize = 16;
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalues below this count as zero in the entropy.
pub const ENTROPY_CUTOFF: f64 = 1e-12;

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidState(format!("dimension {dim} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let v = CVector::from_vec(amplitudes);
        let norm2 = v.norm_squared();
        if (norm2 - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("state is not normalized: Σ|a|² = {norm2}")));
        }
        Ok(Self { amplitudes: v })
    }

    /// Rescales to unit norm before validating.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let v = CVector::from_vec(amplitudes);
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidState(
                "cannot normalize a zero or non-finite vector".into(),
            ));
        }
        Ok(Self {
            amplitudes: v / Complex64::from(n),
        })
    }

    /// c|0⟩ + d|1⟩
    pub fn qubit(c: Complex64, d: Complex64) -> Result<Self> {
        Self::new(vec![c, d])
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = CVector::zeros(dim);
        v[index] = Complex64::from(1.0);
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            m: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        check_dim(self.dim() * other.dim())?;
        Ok(PureState {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to 1e-10.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidState(format!(
                "matrix is {}×{}, not square",
                m.nrows(),
                m.ncols()
            )));
        }
        check_dim(m.nrows())?;
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("matrix has non-finite entries".into()));
        }
        let herm_err = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "matrix is not Hermitian (max deviation {herm_err:e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, not 1")));
        }
        let rho = Self { m };
        let min = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("matrix has negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            m: CMatrix::identity(dim, dim) / Complex64::from(dim as f64),
        })
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let v: Vec<Complex64> = populations.iter().map(|&p| Complex64::from(p)).collect();
        Self::new(CMatrix::from_diagonal(&CVector::from_vec(v)))
    }

    /// Probabilistic mixture Σ wᵢρᵢ; weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::InvalidState("empty mixture".into()));
        };
        let dim = first.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: rho.dim(),
                });
            }
            if *w < 0.0 {
                return Err(Error::InvalidState(format!("negative mixture weight {w}")));
            }
            m += rho.matrix() * Complex64::from(*w);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = hermitian_part(&self.m)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    /// U ρ U†
    pub fn evolve(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: u.nrows(),
            });
        }
        Ok(Self {
            m: u * &self.m * u.adjoint(),
        })
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        check_dim(self.dim() * other.dim())?;
        Ok(Self {
            m: self.m.kronecker(&other.m),
        })
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.m - &other.m).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::from(0.5)
}

/// Positive square root of a Hermitian positive semi-definite matrix.
/// Eigenvalues below the state tolerance are clamped to zero so round-off
/// does not leak in through the square root.
fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let eig = hermitian_part(m).symmetric_eigen();
    let roots = eig.eigenvalues.map(|l| Complex64::from(clamped(l).sqrt()));
    &eig.eigenvectors * CMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

/// Drops round-off negatives.
fn clamped(l: f64) -> f64 {
    l.max(0.0)
}

/// The vector |ψ⟩ with ρ = |ψ⟩⟨ψ| when ρ is pure to within tolerance.
fn pure_vector(rho: &CMatrix) -> Option<CVector> {
    let eig = hermitian_part(rho).symmetric_eigen();
    let (i, &top) = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    (top >= 1.0 - STATE_TOL).then(|| eig.eigenvectors.column(i).into_owned())
}

/// Uhlmann fidelity F = (Tr √(√ρ σ √ρ))². When either argument is pure this
/// reduces to ⟨ψ|σ|ψ⟩, which is evaluated directly.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    if let Some(v) = pure_vector(&rho.m) {
        return Ok((v.adjoint() * &sigma.m * &v)[(0, 0)].re.clamp(0.0, 1.0));
    }
    if let Some(v) = pure_vector(&sigma.m) {
        return Ok((v.adjoint() * &rho.m * &v)[(0, 0)].re.clamp(0.0, 1.0));
    }
    let s = psd_sqrt(&rho.m);
    let inner = &s * &sigma.m * &s;
    let tr: f64 = hermitian_part(&inner)
        .symmetric_eigenvalues()
        .iter()
        .map(|&l| clamped(l).sqrt())
        .sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

/// S = −Tr ρ log₂ ρ, in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    let s: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > ENTROPY_CUTOFF)
        .map(|&l| -l * l.log2())
        .sum();
    s.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Reduced state of one factor of a bipartite A⊗B system.
pub fn partial_trace(rho: &DensityMatrix, dims: (usize, usize), keep: Subsystem) -> Result<DensityMatrix> {
    let (da, db) = dims;
    if da == 0 || db == 0 || da * db != rho.dim() {
        return Err(Error::InvalidState(format!(
            "dimension {} does not factor as {da}×{db}",
            rho.dim()
        )));
    }
    let m = &rho.m;
    let out = match keep {
        Subsystem::A => CMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
        Subsystem::B => CMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()),
    };
    Ok(DensityMatrix { m: out })
}

/// Applies U|λ⟩ = e^{−iλα}|λ⟩ to a qubit in the helicity basis
/// {λ = +1, λ = −1}: off-diagonal entries pick up e^{∓2iα}.
pub fn apply_helicity_phase(rho: &DensityMatrix, alpha: f64) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::InvalidState(format!(
            "helicity phase acts on a qubit, got dimension {}",
            rho.dim()
        )));
    }
    let mut m = rho.m.clone();
    let phase = Complex64::from_polar(1.0, -2.0 * alpha);
    m[(0, 1)] *= phase;
    m[(1, 0)] *= phase.conj();
    Ok(DensityMatrix { m })
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    if u.nrows() != u.ncols() {
        return false;
    }
    let n = u.nrows();
    let diff = u * u.adjoint() - CMatrix::identity(n, n);
    diff.iter().all(|z| z.norm() <= tol)
}

/// Haar-random pure state from complex Gaussian amplitudes.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<PureState> {
    check_dim(dim)?;
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::normalized(v)
}

/// Random full-rank state G G†/Tr(G G†) with Gaussian G.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<DensityMatrix> {
    check_dim(dim)?;
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    Ok(DensityMatrix { m: m / tr })
}

/// exp(iH) for a random Gaussian Hermitian H.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<CMatrix> {
    check_dim(dim)?;
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let eig = hermitian_part(&g).symmetric_eigen();
    let phases = eig.eigenvalues.map(|l| Complex64::from_polar(1.0, l));
    Ok(&eig.eigenvectors * CMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn pure_state_validation() {
        assert!(PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(PureState::new(vec![]).is_err());
        assert!(PureState::new(vec![c(1.0, 0.0); 17]).is_err());
        assert!(PureState::normalized(vec![c(0.0, 0.0), c(0.0, 0.0)]).is_err());
        let s = PureState::normalized(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert_relative_eq!(s.amplitudes().norm(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn density_validation() {
        let not_herm = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
        assert!(DensityMatrix::new(not_herm).is_err());
        let bad_trace = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = CMatrix::from_row_slice(2, 2, &[c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)]);
        assert!(DensityMatrix::new(negative).is_err());
        assert!(DensityMatrix::new(CMatrix::zeros(2, 3)).is_err());
        assert!(DensityMatrix::diagonal(&[0.25, 0.75]).is_ok());
    }

    #[test]
    fn fidelity_examples() {
        let plus = PureState::basis(2, 0).unwrap();
        let minus = PureState::basis(2, 1).unwrap();
        let sup = PureState::qubit(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)).unwrap();
        assert_relative_eq!(
            fidelity(&plus.density(), &plus.density()).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert!(fidelity(&plus.density(), &minus.density()).unwrap() < 1e-12);
        assert_relative_eq!(
            fidelity(&plus.density(), &sup.density()).unwrap(),
            0.5,
            max_relative = 1e-10
        );
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_relative_eq!(fidelity(&mixed, &mixed).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(fidelity(&mixed, &plus.density()).unwrap(), 0.5, max_relative = 1e-10);
        let three = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(matches!(fidelity(&mixed, &three), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn entropy_examples() {
        let sup = PureState::qubit(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        assert!(von_neumann_entropy(&sup.density()).abs() < 1e-12);
        assert_relative_eq!(
            von_neumann_entropy(&DensityMatrix::maximally_mixed(2).unwrap()),
            1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            von_neumann_entropy(&DensityMatrix::maximally_mixed(16).unwrap()),
            4.0,
            max_relative = 1e-12
        );
        let rho = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        assert_relative_eq!(von_neumann_entropy(&rho), 0.468_995_593_589_281, max_relative = 1e-12);
    }

    #[test]
    fn partial_trace_examples() {
        let mut r = rng(7);
        let a = random_density_matrix(&mut r, 2).unwrap();
        let b = random_density_matrix(&mut r, 3).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert!(partial_trace(&ab, (2, 3), Subsystem::A).unwrap().max_abs_diff(&a) < 1e-14);
        assert!(partial_trace(&ab, (2, 3), Subsystem::B).unwrap().max_abs_diff(&b) < 1e-14);
        assert!(partial_trace(&ab, (2, 2), Subsystem::A).is_err());

        let s = FRAC_1_SQRT_2;
        let psi_minus = PureState::new(vec![c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)]).unwrap();
        let half = DensityMatrix::maximally_mixed(2).unwrap();
        for keep in [Subsystem::A, Subsystem::B] {
            let red = partial_trace(&psi_minus.density(), (2, 2), keep).unwrap();
            assert!(red.max_abs_diff(&half) < 1e-15);
        }
    }

    #[test]
    fn helicity_phase_examples() {
        let rho = DensityMatrix::new(CMatrix::from_element(2, 2, c(0.5, 0.0))).unwrap();
        let out = apply_helicity_phase(&rho, PI / 4.0).unwrap();
        assert!((out.entry(0, 1) - c(0.0, -0.5)).norm() < 1e-15);
        let u = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::from_polar(1.0, -PI / 4.0),
            Complex64::from_polar(1.0, PI / 4.0),
        ]));
        assert!(rho.evolve(&u).unwrap().max_abs_diff(&out) < 1e-15);
        assert_eq!(apply_helicity_phase(&rho, 0.0).unwrap(), rho);
        let diag = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        assert_eq!(apply_helicity_phase(&diag, 1.234).unwrap(), diag);
        assert!(apply_helicity_phase(&DensityMatrix::maximally_mixed(4).unwrap(), 0.1).is_err());
    }

    #[test]
    fn mixture_and_purity() {
        let p = PureState::basis(2, 0).unwrap().density();
        let q = PureState::basis(2, 1).unwrap().density();
        let m = DensityMatrix::mixture(&[(0.5, p.clone()), (0.5, q)]).unwrap();
        assert!(m.max_abs_diff(&DensityMatrix::maximally_mixed(2).unwrap()) < 1e-15);
        assert_relative_eq!(m.purity(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(p.purity(), 1.0, max_relative = 1e-14);
        assert!(DensityMatrix::mixture(&[(-0.5, p.clone()), (1.5, p)]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn fidelity_symmetric(seed: u64, dim in 1usize..=8) {
            let mut r = rng(seed);
            let a = random_density_matrix(&mut r, dim).unwrap();
            let b = random_density_matrix(&mut r, dim).unwrap();
            let f1 = fidelity(&a, &b).unwrap();
            let f2 = fidelity(&b, &a).unwrap();
            prop_assert!((f1 - f2).abs() < 1e-10);
            prop_assert!((0.0..=1.0).contains(&f1));
            prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn fidelity_of_pure_states_is_overlap(seed: u64, dim in 1usize..=16) {
            let mut r = rng(seed);
            let a = random_pure_state(&mut r, dim).unwrap();
            let b = random_pure_state(&mut r, dim).unwrap();
            let overlap = a.inner(&b).unwrap().norm_sqr();
            prop_assert!((fidelity(&a.density(), &b.density()).unwrap() - overlap).abs() < 1e-9);
        }

        #[test]
        fn general_path_matches_pure_path(seed: u64, dim in 2usize..=8, w in 0.0f64..0.2) {
            // a slightly mixed ρ forces the square-root path; compare with the
            // linear-in-ρ form F = ⟨φ|ρ|φ⟩ for pure σ = |φ⟩⟨φ|
            let mut r = rng(seed);
            let psi = random_pure_state(&mut r, dim).unwrap();
            let phi = random_pure_state(&mut r, dim).unwrap();
            let noise = DensityMatrix::maximally_mixed(dim).unwrap();
            let rho = DensityMatrix::mixture(&[(1.0 - w - 1e-3, psi.density()), (w + 1e-3, noise)]).unwrap();
            let expected = (phi.amplitudes().adjoint() * rho.matrix() * phi.amplitudes())[(0, 0)].re;
            let s = psd_sqrt(rho.matrix());
            let inner = &s * phi.density().matrix() * &s;
            let tr: f64 = hermitian_part(&inner).symmetric_eigenvalues().iter().map(|&l| clamped(l).sqrt()).sum();
            prop_assert!((tr * tr - expected).abs() < 1e-6);
        }

        #[test]
        fn entropy_unitarily_invariant(seed: u64, dim in 1usize..=8) {
            let mut r = rng(seed);
            let rho = random_density_matrix(&mut r, dim).unwrap();
            let u = random_unitary(&mut r, dim).unwrap();
            prop_assert!(is_unitary(&u, 1e-10));
            let s1 = von_neumann_entropy(&rho);
            let s2 = von_neumann_entropy(&rho.evolve(&u).unwrap());
            prop_assert!((s1 - s2).abs() < 1e-9);
            prop_assert!(s1 >= 0.0 && s1 <= (dim as f64).log2() + 1e-12);
        }

        #[test]
        fn partial_trace_has_unit_trace(seed: u64, da in 1usize..=4, db in 1usize..=4) {
            let mut r = rng(seed);
            let rho = random_density_matrix(&mut r, da * db).unwrap();
            for (keep, d) in [(Subsystem::A, da), (Subsystem::B, db)] {
                let red = partial_trace(&rho, (da, db), keep).unwrap();
                prop_assert_eq!(red.dim(), d);
                prop_assert!(DensityMatrix::new(red.matrix().clone()).is_ok());
            }
        }

        #[test]
        fn helicity_phase_preserves_state(seed: u64, alpha in -10.0f64..10.0) {
            let mut r = rng(seed);
            let rho = random_density_matrix(&mut r, 2).unwrap();
            let out = apply_helicity_phase(&rho, alpha).unwrap();
            prop_assert!((out.matrix().trace() - rho.matrix().trace()).norm() < 1e-15);
            prop_assert!(DensityMatrix::new(out.matrix().clone()).is_ok());
            let (e1, e2) = (rho.eigenvalues(), out.eigenvalues());
            for (x, y) in e1.iter().zip(&e2) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            let back = apply_helicity_phase(&out, -alpha).unwrap();
            prop_assert!(back.max_abs_diff(&rho) < 1e-12);
        }
    }
}
