//! Two-qubit entanglement measures on 4×4 density matrices.
//!
//! The qubit-resonator system restricted to the n-excitation subspace is a
//! two-qubit system in the basis {|g,n-1>, |g,n>, |e,n-1>, |e,n>}; the same
//! operations serve the mapped two-qubit pipeline in {|gg>, |ge>, |eg>, |ee>}.

use crate::linalg::{self, CMatrix};
use crate::model::PureState;
use num_complex::Complex64;
use thiserror::Error;

/// Hermiticity tolerance for density-matrix construction.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Trace tolerance for density-matrix construction.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues above this (negative) floor still count as physical.
pub const POSITIVITY_TOL: f64 = -1e-9;
/// Eigenvalues below this floor are zeroed before square roots (tomography
/// noise floor; also suppresses sqrt-amplified float noise).
pub const EIGENVALUE_CLIP: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntanglementError {
    #[error("expected a {expected}x{expected} matrix, got {got}x{got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian within {HERMITICITY_TOL:e} (defect {0:e})")]
    NotHermitian(f64),
    #[error("trace deviates from 1 by {0:e}")]
    BadTrace(f64),
    #[error("matrix has eigenvalue {0:e} below the positivity floor")]
    NotPositive(f64),
    #[error("operation requires a physical (positive semidefinite) density matrix")]
    NotPhysical,
    #[error("invalid subsystem index {0} (must be 0 or 1)")]
    InvalidSubsystem(usize),
    #[error("basis labels do not match: {0:?} vs {1:?}")]
    BasisMismatch(Vec<String>, Vec<String>),
    #[error("label count {0} does not match dimension {1}")]
    LabelMismatch(usize, usize),
}

/// Hermitian, trace-one density matrix with ordered basis labels.
///
/// The `physical` flag records whether positivity was verified at
/// construction; linear-inversion tomography produces `raw` matrices whose
/// spectrum may dip slightly below zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    labels: Vec<String>,
    physical: bool,
}

impl DensityMatrix {
    /// Construct a physical density matrix (Hermitian, trace one, PSD within
    /// the noise floor).
    pub fn new(entries: CMatrix, labels: Vec<String>) -> Result<Self, EntanglementError> {
        let dm = Self::raw(entries, labels)?;
        let (values, _) = linalg::hermitian_eigen(&dm.entries);
        if let Some(&lo) = values.first() {
            if lo < POSITIVITY_TOL {
                return Err(EntanglementError::NotPositive(lo));
            }
        }
        Ok(Self { physical: true, ..dm })
    }

    /// Construct without the positivity check (pre-projection tomography output).
    pub fn raw(entries: CMatrix, labels: Vec<String>) -> Result<Self, EntanglementError> {
        if entries.nrows() != entries.ncols() {
            return Err(EntanglementError::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        if labels.len() != entries.nrows() {
            return Err(EntanglementError::LabelMismatch(labels.len(), entries.nrows()));
        }
        let defect = linalg::hermiticity_defect(&entries);
        if defect > HERMITICITY_TOL {
            return Err(EntanglementError::NotHermitian(defect));
        }
        let trace: Complex64 = (0..entries.nrows()).map(|i| entries[(i, i)]).sum();
        let trace_defect = (trace - Complex64::ONE).norm();
        if trace_defect > TRACE_TOL {
            return Err(EntanglementError::BadTrace(trace_defect));
        }
        Ok(Self { entries, labels, physical: false })
    }

    /// Projector onto a pure state.
    pub fn from_pure(state: &PureState) -> Self {
        let dim = state.dim();
        let mut entries = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                entries[(i, j)] = state.amplitudes()[i] * state.amplitudes()[j].conj();
            }
        }
        Self { entries, labels: state.labels().to_vec(), physical: true }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_physical(&self) -> bool {
        self.physical
    }

    /// Real eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.entries).0
    }

    fn require_dim(&self, expected: usize) -> Result<(), EntanglementError> {
        if self.dim() != expected {
            return Err(EntanglementError::DimensionMismatch { expected, got: self.dim() });
        }
        Ok(())
    }
}

/// sigma_y ⊗ sigma_y in the computational product basis (a real matrix).
fn sigma_yy() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 3)] = Complex64::new(-1.0, 0.0);
    m[(1, 2)] = Complex64::ONE;
    m[(2, 1)] = Complex64::ONE;
    m[(3, 0)] = Complex64::new(-1.0, 0.0);
    m
}

/// Spin-flipped product ρ (σy⊗σy) ρ* (σy⊗σy).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinFlipProduct {
    pub entries: CMatrix,
}

/// Compute the spin-flipped product whose eigenvalues determine the
/// concurrence. Complex conjugation is taken in the stored basis.
pub fn spin_flip_product(rho: &DensityMatrix) -> Result<SpinFlipProduct, EntanglementError> {
    rho.require_dim(4)?;
    let yy = sigma_yy();
    let conj = rho.entries.map(|c| c.conj());
    let entries = rho.entries() * &yy * conj * &yy;
    Ok(SpinFlipProduct { entries })
}

/// Square roots of the spin-flip-product eigenvalues, descending.
///
/// Computed from the Hermitian matrix M = √ρ (σy⊗σy) ρ* (σy⊗σy) √ρ, which is
/// similar to the spin-flipped product but manifestly positive semidefinite.
fn concurrence_lambdas(rho: &DensityMatrix) -> Result<[f64; 4], EntanglementError> {
    rho.require_dim(4)?;
    if !rho.is_physical() {
        return Err(EntanglementError::NotPhysical);
    }
    let yy = sigma_yy();
    let sqrt_rho = linalg::sqrtm_psd(rho.entries(), EIGENVALUE_CLIP);
    let conj = rho.entries.map(|c| c.conj());
    let m = &sqrt_rho * &yy * conj * &yy * &sqrt_rho;
    let (values, _) = linalg::hermitian_eigen(&m);
    let mut lambdas = [0.0; 4];
    for (k, &v) in values.iter().rev().enumerate() {
        lambdas[k] = if v > EIGENVALUE_CLIP { v.sqrt() } else { 0.0 };
    }
    Ok(lambdas)
}

/// Wootters concurrence of a 4×4 density matrix, in [0, 1].
pub fn concurrence(rho: &DensityMatrix) -> Result<f64, EntanglementError> {
    let l = concurrence_lambdas(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// Partial transpose over one tensor factor (0 = first, 1 = second).
///
/// Hermiticity and trace are preserved; the result is returned raw since it
/// is generally not positive.
pub fn partial_transpose(
    rho: &DensityMatrix,
    subsystem: usize,
) -> Result<DensityMatrix, EntanglementError> {
    rho.require_dim(4)?;
    if subsystem > 1 {
        return Err(EntanglementError::InvalidSubsystem(subsystem));
    }
    let mut out = CMatrix::zeros(4, 4);
    for i in 0..2 {
        for a in 0..2 {
            for j in 0..2 {
                for b in 0..2 {
                    let (row, col) = (2 * i + a, 2 * j + b);
                    let src = if subsystem == 0 {
                        (2 * j + a, 2 * i + b)
                    } else {
                        (2 * i + b, 2 * j + a)
                    };
                    out[(row, col)] = rho.entries[src];
                }
            }
        }
    }
    DensityMatrix::raw(out, rho.labels.clone())
}

/// Negativity: |sum of negative eigenvalues of the partial transpose|,
/// in [0, 1/2] for two qubits.
pub fn negativity(rho: &DensityMatrix) -> Result<f64, EntanglementError> {
    if !rho.is_physical() {
        return Err(EntanglementError::NotPhysical);
    }
    let pt = partial_transpose(rho, 1)?;
    let total: f64 = pt.eigenvalues().iter().filter(|&&v| v < 0.0).sum();
    Ok(-total)
}

/// Overlap fidelity |<a|b>|^2 of two pure states over the same basis.
pub fn state_fidelity(a: &PureState, b: &PureState) -> Result<f64, EntanglementError> {
    if a.labels() != b.labels() {
        return Err(EntanglementError::BasisMismatch(a.labels().to_vec(), b.labels().to_vec()));
    }
    Ok(a.inner(b).norm_sqr())
}

/// Standard two-qubit product-basis labels {|gg>, |ge>, |eg>, |ee>}.
pub fn two_qubit_labels() -> Vec<String> {
    ["gg", "ge", "eg", "ee"].iter().map(|s| s.to_string()).collect()
}

/// Embed a state on the 2-dim subspace {|e,n-1>, |g,n>} into the 4-dim
/// two-qubit basis {|g,n-1>, |g,n>, |e,n-1>, |e,n>}.
pub fn embed_subspace_state(state: &PureState, n: u32) -> Result<PureState, EntanglementError> {
    if state.dim() != 2 {
        return Err(EntanglementError::DimensionMismatch { expected: 2, got: state.dim() });
    }
    let labels = vec![
        format!("g,{}", n - 1),
        format!("g,{n}"),
        format!("e,{}", n - 1),
        format!("e,{n}"),
    ];
    let amplitudes = vec![
        Complex64::ZERO,
        state.amplitudes()[1],
        state.amplitudes()[0],
        Complex64::ZERO,
    ];
    Ok(PureState::new(amplitudes, labels).expect("embedding preserves the norm"))
}
