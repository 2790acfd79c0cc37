//! Simulated end-to-end measurement pipeline: state mapping with resonator
//! decay, finite-shot two-qubit tomography, readout-confusion correction,
//! mapping inversion and single-excitation post-projection.
//!
//! Two-qubit conventions, fixed once for the whole pipeline: tensor index
//! `2*i_Q + i_Qa` (test qubit major), outcome labels gg/ge/eg/ee with the
//! first letter belonging to Q, readout correction `(F_Q ⊗ F_Qa)^-1`. In the
//! mapped frame |e_a,g> sits at index 1 and |g_a,e> at index 2; they carry
//! the original |e,0> and |g,1> amplitudes respectively.

mod pipeline;
mod tomography;

pub use pipeline::{run_pipeline_point, PipelinePoint, PipelineSettings};
pub use tomography::{
    parse_shot_counts, reconstruct_from_probabilities, setting_probabilities,
    simulate_tomography, tomography_reconstruct, write_shot_counts, PauliAxis, SettingCounts,
    ShotCounts, TomographyResult, TOMOGRAPHY_SETTINGS,
};

use crate::entanglement::{DensityMatrix, EntanglementError};
use crate::linalg::{self, CMatrix};
use crate::model::{ModelError, PureState};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasurementError {
    #[error("invalid readout fidelity entries: {0}")]
    InvalidFidelity(String),
    #[error("fidelity matrix is singular (det = {0:e})")]
    SingularFidelity(f64),
    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),
    #[error("shots must be >= 1")]
    InvalidShots,
    #[error("mapping factor k = {0} outside (0, 1]")]
    BadK(f64),
    #[error("invalid mapping parameters: {0}")]
    InvalidMapping(String),
    #[error("single-excitation block trace {0:e} too small to renormalize")]
    VanishingBlock(f64),
    #[error("trace after mapping correction is not positive")]
    NonPositiveCorrected,
    #[error("tomography settings incomplete: missing {0}")]
    MissingSetting(String),
    #[error("malformed shot-count record: {0}")]
    MalformedRecord(String),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Column-stochastic 2×2 readout confusion matrix
/// [[F_g, e_ge], [e_eg, F_e]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityMatrix {
    f_g: f64,
    f_e: f64,
    e_ge: f64,
    e_eg: f64,
}

impl FidelityMatrix {
    /// Build from the two correct-readout probabilities; leakage entries
    /// are the complements.
    pub fn from_fidelities(f_g: f64, f_e: f64) -> Result<Self, MeasurementError> {
        Self::new(f_g, f_e, 1.0 - f_e, 1.0 - f_g)
    }

    /// Full constructor; columns must sum to 1 within 1e-12 and the matrix
    /// must be invertible.
    pub fn new(f_g: f64, f_e: f64, e_ge: f64, e_eg: f64) -> Result<Self, MeasurementError> {
        for (name, v) in [("F_g", f_g), ("F_e", f_e), ("e_ge", e_ge), ("e_eg", e_eg)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(MeasurementError::InvalidFidelity(format!("{name} = {v}")));
            }
        }
        if (f_g + e_eg - 1.0).abs() > 1e-12 || (f_e + e_ge - 1.0).abs() > 1e-12 {
            return Err(MeasurementError::InvalidFidelity(
                "columns must sum to 1 within 1e-12".into(),
            ));
        }
        let m = Self { f_g, f_e, e_ge, e_eg };
        if m.det().abs() < 1e-9 {
            return Err(MeasurementError::SingularFidelity(m.det()));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Self { f_g: 1.0, f_e: 1.0, e_ge: 0.0, e_eg: 0.0 }
    }

    pub fn f_g(&self) -> f64 {
        self.f_g
    }

    pub fn f_e(&self) -> f64 {
        self.f_e
    }

    pub fn e_ge(&self) -> f64 {
        self.e_ge
    }

    pub fn e_eg(&self) -> f64 {
        self.e_eg
    }

    pub fn det(&self) -> f64 {
        self.f_g * self.f_e - self.e_ge * self.e_eg
    }

    /// Row-major entries [[F_g, e_ge], [e_eg, F_e]].
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.f_g, self.e_ge], [self.e_eg, self.f_e]]
    }

    /// Row-major entries of the inverse.
    pub fn inverse(&self) -> [[f64; 2]; 2] {
        let d = self.det();
        [[self.f_e / d, -self.e_ge / d], [-self.e_eg / d, self.f_g / d]]
    }
}

/// Apply A ⊗ B to a two-qubit probability vector (first factor major).
fn apply_kron2(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2], p: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for iq in 0..2 {
        for ia in 0..2 {
            for jq in 0..2 {
                for ja in 0..2 {
                    out[2 * iq + ia] += a[iq][jq] * b[ia][ja] * p[2 * jq + ja];
                }
            }
        }
    }
    out
}

/// Readout-distorted outcome distribution P_M = (F_Q ⊗ F_Qa) P_N.
pub fn distort_probabilities(
    p_true: &[f64; 4],
    f_q: &FidelityMatrix,
    f_qa: &FidelityMatrix,
) -> [f64; 4] {
    apply_kron2(&f_q.matrix(), &f_qa.matrix(), p_true)
}

fn validate_probabilities(p: &[f64; 4]) -> Result<[f64; 4], MeasurementError> {
    let mut clean = [0.0; 4];
    for (i, &v) in p.iter().enumerate() {
        if !v.is_finite() || v < -1e-9 {
            return Err(MeasurementError::InvalidProbability(format!("entry {i} = {v}")));
        }
        clean[i] = v.max(0.0);
    }
    let total: f64 = clean.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(MeasurementError::InvalidProbability(format!("sum = {total}")));
    }
    for v in &mut clean {
        *v /= total;
    }
    Ok(clean)
}

/// Draw multinomial counts over the four outcomes with the distortion
/// P_M = (F_Q ⊗ F_Qa) P_N applied first. Same seed, same counts.
pub fn simulate_readout(
    p_true: &[f64; 4],
    f_q: &FidelityMatrix,
    f_qa: &FidelityMatrix,
    shots: u64,
    seed: u64,
) -> Result<[u64; 4], MeasurementError> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    sample_counts(p_true, f_q, f_qa, shots, &mut rng)
}

pub(crate) fn sample_counts(
    p_true: &[f64; 4],
    f_q: &FidelityMatrix,
    f_qa: &FidelityMatrix,
    shots: u64,
    rng: &mut ChaCha12Rng,
) -> Result<[u64; 4], MeasurementError> {
    if shots == 0 {
        return Err(MeasurementError::InvalidShots);
    }
    let p_true = validate_probabilities(p_true)?;
    let p_meas = distort_probabilities(&p_true, f_q, f_qa);
    let mut counts = [0u64; 4];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut outcome = 3;
        for (i, &p) in p_meas.iter().enumerate() {
            acc += p;
            if u < acc {
                outcome = i;
                break;
            }
        }
        counts[outcome] += 1;
    }
    Ok(counts)
}

/// Raw and clipped-renormalized variants of a corrected distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectedProbabilities {
    /// Direct inverse-matrix output; small negatives possible.
    pub raw: [f64; 4],
    /// Negatives clipped to zero and renormalized.
    pub physical: [f64; 4],
}

/// Invert the readout confusion: P_N = (F_Q ⊗ F_Qa)^-1 P_M.
pub fn correct_readout(
    p_meas: &[f64; 4],
    f_q: &FidelityMatrix,
    f_qa: &FidelityMatrix,
) -> Result<CorrectedProbabilities, MeasurementError> {
    for (i, &v) in p_meas.iter().enumerate() {
        if !v.is_finite() {
            return Err(MeasurementError::InvalidProbability(format!("entry {i} = {v}")));
        }
    }
    let raw = apply_kron2(&f_q.inverse(), &f_qa.inverse(), p_meas);
    let mut physical = raw.map(|v| v.max(0.0));
    let total: f64 = physical.iter().sum();
    if total <= 0.0 {
        return Err(MeasurementError::InvalidProbability("corrected sum <= 0".into()));
    }
    for v in &mut physical {
        *v /= total;
    }
    Ok(CorrectedProbabilities { raw, physical })
}

/// R -> Q transfer description controlling the mapping decay factor
/// k = exp(-kappa_f t_evol) exp(-kappa_f tau/4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappingParams {
    tau: f64,
    swap_time: f64,
    kappa_f: f64,
    t_evol: f64,
}

impl MappingParams {
    /// `tau` is the R->Q transfer duration (ns), `swap_time` the Q<->R_b
    /// swap duration (ns, informational), `kappa_f` the resonator decay
    /// (1/ns), `t_evol` the NH evolution time preceding the mapping (ns).
    pub fn new(
        tau: f64,
        swap_time: f64,
        kappa_f: f64,
        t_evol: f64,
    ) -> Result<Self, MeasurementError> {
        if !(tau > 0.0) {
            return Err(MeasurementError::InvalidMapping(format!("tau = {tau}")));
        }
        if !(swap_time >= 0.0 && kappa_f >= 0.0 && t_evol >= 0.0) {
            return Err(MeasurementError::InvalidMapping(
                "swap_time, kappa_f, t_evol must be nonnegative".into(),
            ));
        }
        let m = Self { tau, swap_time, kappa_f, t_evol };
        let k = m.k_factor();
        if !(k > 0.0 && k <= 1.0) {
            return Err(MeasurementError::BadK(k));
        }
        Ok(m)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn swap_time(&self) -> f64 {
        self.swap_time
    }

    pub fn kappa_f(&self) -> f64 {
        self.kappa_f
    }

    pub fn t_evol(&self) -> f64 {
        self.t_evol
    }

    /// With a fresh NH evolution duration.
    pub fn at_evolution_time(&self, t_evol: f64) -> Result<Self, MeasurementError> {
        Self::new(self.tau, self.swap_time, self.kappa_f, t_evol)
    }

    /// Amplitude decay factor applied to the |g,1> component.
    pub fn k_factor(&self) -> f64 {
        (-self.kappa_f * self.t_evol).exp() * (-self.kappa_f * self.tau / 4.0).exp()
    }
}

/// Basis labels of the mapped two-qubit single-excitation subspace.
pub fn mapped_labels() -> Vec<String> {
    vec!["e_a,g".into(), "g_a,e".into()]
}

/// Map the qubit-resonator state c1|e,0> + c2|g,1> onto the ancilla-qubit
/// pair: (c1 |e_a,g> + k c2 |g_a,e>) renormalized.
pub fn apply_mapping_decay(
    state: &PureState,
    map: &MappingParams,
) -> Result<PureState, MeasurementError> {
    if state.dim() != 2 {
        return Err(MeasurementError::InvalidMapping(format!(
            "expected a 2-dim subspace state, got dim {}",
            state.dim()
        )));
    }
    let k = map.k_factor();
    let amplitudes = vec![state.amplitudes()[0], k * state.amplitudes()[1]];
    Ok(PureState::from_unnormalized(amplitudes, mapped_labels())?.0)
}

/// Survival probability of the mapping step, |c1|^2 + k^2 |c2|^2.
pub fn mapping_survival(state: &PureState, map: &MappingParams) -> f64 {
    let k = map.k_factor();
    state.amplitudes()[0].norm_sqr() + k * k * state.amplitudes()[1].norm_sqr()
}

/// Invert the mapping decay on a 2×2 density matrix in
/// {|e_a,g>, |g_a,e>}: off-diagonals divided by k, the |g_a,e> diagonal by
/// k^2, then renormalized.
pub fn unmap_correction(
    rho_block: &DensityMatrix,
    k: f64,
) -> Result<DensityMatrix, MeasurementError> {
    if !(k > 0.0 && k <= 1.0) {
        return Err(MeasurementError::BadK(k));
    }
    if rho_block.dim() != 2 {
        return Err(MeasurementError::InvalidMapping(format!(
            "expected a 2x2 block, got {0}x{0}",
            rho_block.dim()
        )));
    }
    let e = rho_block.entries();
    let mut out = CMatrix::zeros(2, 2);
    out[(0, 0)] = e[(0, 0)];
    out[(0, 1)] = e[(0, 1)] / k;
    out[(1, 0)] = e[(1, 0)] / k;
    out[(1, 1)] = e[(1, 1)] / (k * k);
    let trace = out[(0, 0)].re + out[(1, 1)].re;
    if trace <= 0.0 {
        return Err(MeasurementError::NonPositiveCorrected);
    }
    let out = out / Complex64::new(trace, 0.0);
    Ok(DensityMatrix::raw(out, rho_block.labels().to_vec())?)
}

/// Project a 4×4 two-qubit matrix onto the single-excitation subspace
/// {|e_a,g>, |g_a,e>} (indices 1 and 2) and renormalize.
pub fn post_project(rho: &DensityMatrix) -> Result<DensityMatrix, MeasurementError> {
    if rho.dim() != 4 {
        return Err(MeasurementError::Entanglement(EntanglementError::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        }));
    }
    let e = rho.entries();
    let trace = e[(1, 1)].re + e[(2, 2)].re;
    if trace <= 1e-9 {
        return Err(MeasurementError::VanishingBlock(trace));
    }
    let scale = Complex64::new(trace, 0.0);
    let mut out = CMatrix::zeros(2, 2);
    out[(0, 0)] = e[(1, 1)] / scale;
    out[(0, 1)] = e[(1, 2)] / scale;
    out[(1, 0)] = e[(2, 1)] / scale;
    out[(1, 1)] = e[(2, 2)] / scale;
    Ok(DensityMatrix::raw(out, mapped_labels())?)
}

/// Nearest-physical projection by eigenvalue clipping and trace
/// renormalization. Idempotent.
pub fn project_physical(rho: &DensityMatrix) -> DensityMatrix {
    let (values, vectors) = linalg::hermitian_eigen(rho.entries());
    let clipped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let dim = rho.dim();
    let mut out = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let w = Complex64::new(clipped[k] / total, 0.0);
        let v = vectors.column(k);
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] += w * v[i] * v[j].conj();
            }
        }
    }
    DensityMatrix::new(out, rho.labels().to_vec()).expect("clipped matrix is physical")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::two_qubit_labels;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn fidelity_matrix_validation() {
        let f = FidelityMatrix::from_fidelities(0.981, 0.901).unwrap();
        assert_relative_eq!(f.e_eg(), 0.019, epsilon = 1e-12);
        assert_relative_eq!(f.e_ge(), 0.099, epsilon = 1e-12);
        assert!(FidelityMatrix::from_fidelities(1.1, 0.9).is_err());
        // F = [[0.5, 0.5], [0.5, 0.5]] is singular
        assert!(matches!(
            FidelityMatrix::from_fidelities(0.5, 0.5),
            Err(MeasurementError::SingularFidelity(_))
        ));
        assert!(matches!(
            FidelityMatrix::new(0.9, 0.9, 0.2, 0.1),
            Err(MeasurementError::InvalidFidelity(_))
        ));
    }

    #[test]
    fn mapping_decay_reference_values() {
        // k = exp(-193/800) for kappa_f = 1/200, t_evol = 0, tau = 193
        let map = MappingParams::new(193.0, 12.5, 1.0 / 200.0, 0.0).unwrap();
        assert_relative_eq!(map.k_factor(), 0.7856451905372529, epsilon = 1e-12);

        // c2 = 0 passes through unchanged
        let e0 = PureState::basis_ket(vec!["e,0".into(), "g,1".into()], 0).unwrap();
        let mapped = apply_mapping_decay(&e0, &map).unwrap();
        assert_relative_eq!(mapped.amplitudes()[0].re, 1.0);
        assert_eq!(mapped.labels()[0], "e_a,g");

        // equal superposition at k = 0.5 -> amplitudes (1, 0.5)/sqrt(1.25)
        let map = MappingParams::new(4.0 * 200.0 * 2f64.ln(), 12.5, 1.0 / 200.0, 0.0).unwrap();
        assert_relative_eq!(map.k_factor(), 0.5, epsilon = 1e-12);
        let r = 1.0 / 2f64.sqrt();
        let sup = PureState::new(
            vec![Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
            vec!["e,0".into(), "g,1".into()],
        )
        .unwrap();
        let mapped = apply_mapping_decay(&sup, &map).unwrap();
        assert_relative_eq!(mapped.amplitudes()[0].re, 1.0 / 1.25f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(mapped.amplitudes()[1].re, 0.5 / 1.25f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(mapping_survival(&sup, &map), 0.5 + 0.5 * 0.25, epsilon = 1e-12);
    }

    #[test]
    fn unmap_inverts_mapping_on_pure_states() {
        let map = MappingParams::new(193.0, 12.5, 1.0 / 200.0, 0.0).unwrap();
        let k = map.k_factor();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..100 {
            let amps = vec![
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            ];
            let (state, _) =
                PureState::from_unnormalized(amps, vec!["e,0".into(), "g,1".into()]).unwrap();
            let mapped = apply_mapping_decay(&state, &map).unwrap();
            let rho_mapped = DensityMatrix::from_pure(&mapped);
            let corrected = unmap_correction(&rho_mapped, k).unwrap();
            let mut fid = Complex64::ZERO;
            for i in 0..2 {
                for j in 0..2 {
                    fid += state.amplitudes()[i].conj()
                        * corrected.entries()[(i, j)]
                        * state.amplitudes()[j];
                }
            }
            assert!(1.0 - fid.re < 1e-12, "round-trip fidelity deficit {}", 1.0 - fid.re);
        }
    }

    #[test]
    fn unmap_reference_values() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(0.3, 0.0);
        m[(0, 1)] = Complex64::new(0.2, 0.1);
        m[(1, 0)] = Complex64::new(0.2, -0.1);
        m[(1, 1)] = Complex64::new(0.7, 0.0);
        let rho = DensityMatrix::raw(m, mapped_labels()).unwrap();
        let same = unmap_correction(&rho, 1.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((same.entries()[(i, j)] - rho.entries()[(i, j)]).norm() < 1e-15);
            }
        }
        // diag(0.5, 0.5) at k = 0.5 -> diag(0.2, 0.8)
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(1, 1)] = Complex64::new(0.5, 0.0);
        let rho = DensityMatrix::raw(m, mapped_labels()).unwrap();
        let fixed = unmap_correction(&rho, 0.5).unwrap();
        assert_relative_eq!(fixed.entries()[(0, 0)].re, 0.2, epsilon = 1e-12);
        assert_relative_eq!(fixed.entries()[(1, 1)].re, 0.8, epsilon = 1e-12);
        assert!(matches!(unmap_correction(&rho, 0.0), Err(MeasurementError::BadK(_))));
        assert!(matches!(unmap_correction(&rho, 1.5), Err(MeasurementError::BadK(_))));
    }

    #[test]
    fn readout_simulation_reference_cases() {
        let id = FidelityMatrix::identity();
        let counts = simulate_readout(&[1.0, 0.0, 0.0, 0.0], &id, &id, 500, 7).unwrap();
        assert_eq!(counts, [500, 0, 0, 0]);

        // same seed, same counts
        let f = FidelityMatrix::from_fidelities(0.981, 0.901).unwrap();
        let a = simulate_readout(&[0.0, 0.0, 1.0, 0.0], &f, &f, 3000, 42).unwrap();
        let b = simulate_readout(&[0.0, 0.0, 1.0, 0.0], &f, &f, 3000, 42).unwrap();
        assert_eq!(a, b);
        let c = simulate_readout(&[0.0, 0.0, 1.0, 0.0], &f, &f, 3000, 43).unwrap();
        assert_ne!(a, c);

        // p_true = eg: measured eg frequency -> F_e(Q) * F_g(Qa) = 0.901 * 0.981
        let shots = 400_000u64;
        let counts = simulate_readout(&[0.0, 0.0, 1.0, 0.0], &f, &f, shots, 11).unwrap();
        let freq = counts[2] as f64 / shots as f64;
        let expect = 0.901 * 0.981;
        let sigma = (expect * (1.0 - expect) / shots as f64).sqrt();
        assert!(
            (freq - expect).abs() < 4.0 * sigma,
            "eg frequency {freq} vs {expect} (4 sigma = {})",
            4.0 * sigma
        );
        assert!(simulate_readout(&[0.5, 0.5, 0.2, 0.0], &id, &id, 10, 0).is_err());
        assert!(matches!(
            simulate_readout(&[1.0, 0.0, 0.0, 0.0], &id, &id, 0, 0),
            Err(MeasurementError::InvalidShots)
        ));
    }

    #[test]
    fn readout_correction_round_trip() {
        let id = FidelityMatrix::identity();
        let p = [0.1, 0.2, 0.3, 0.4];
        let c = correct_readout(&p, &id, &id).unwrap();
        assert_eq!(c.raw, p);

        let f_q = FidelityMatrix::from_fidelities(0.981, 0.901).unwrap();
        let f_qa = FidelityMatrix::from_fidelities(0.977, 0.902).unwrap();
        let distorted = distort_probabilities(&p, &f_q, &f_qa);
        let c = correct_readout(&distorted, &f_q, &f_qa).unwrap();
        for (got, want) in c.raw.iter().zip(&p) {
            assert!((got - want).abs() < 1e-12);
        }
        // pure eg through the measured confusion matrices comes back to eg
        let distorted = distort_probabilities(&[0.0, 0.0, 1.0, 0.0], &f_q, &f_qa);
        let c = correct_readout(&distorted, &f_q, &f_qa).unwrap();
        assert!((c.raw[2] - 1.0).abs() < 1e-12);
        assert!((c.physical[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn post_project_discards_the_jump_weight() {
        // w |gg><gg| + (1-w) |Psi><Psi| recovers |Psi><Psi| for every w < 1
        let r = 1.0 / 2f64.sqrt();
        let psi =
            [Complex64::ZERO, Complex64::new(r, 0.0), Complex64::new(0.0, -r), Complex64::ZERO];
        for w in [0.0, 0.3, 0.5, 0.9] {
            let mut entries = CMatrix::zeros(4, 4);
            entries[(0, 0)] = Complex64::new(w, 0.0);
            for i in 0..4 {
                for j in 0..4 {
                    entries[(i, j)] += (1.0 - w) * psi[i] * psi[j].conj();
                }
            }
            let rho = DensityMatrix::new(entries, two_qubit_labels()).unwrap();
            let block = post_project(&rho).unwrap();
            assert_relative_eq!(block.entries()[(0, 0)].re, 0.5, epsilon = 1e-12);
            assert_relative_eq!(block.entries()[(1, 1)].re, 0.5, epsilon = 1e-12);
            assert_relative_eq!(block.entries()[(0, 1)].im, 0.5, epsilon = 1e-12);
        }
        // all population decayed: nothing to project onto
        let mut entries = CMatrix::zeros(4, 4);
        entries[(0, 0)] = Complex64::ONE;
        let rho = DensityMatrix::new(entries, two_qubit_labels()).unwrap();
        assert!(matches!(post_project(&rho), Err(MeasurementError::VanishingBlock(_))));
    }

    #[test]
    fn physical_projection_is_idempotent() {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = Complex64::new(0.6, 0.0);
        m[(1, 1)] = Complex64::new(0.5, 0.0);
        m[(2, 2)] = Complex64::new(-0.1, 0.0);
        m[(0, 1)] = Complex64::new(0.2, 0.1);
        m[(1, 0)] = Complex64::new(0.2, -0.1);
        let raw = DensityMatrix::raw(m, two_qubit_labels()).unwrap();
        let proj = project_physical(&raw);
        assert!(proj.is_physical());
        assert!(proj.eigenvalues().iter().all(|&v| v >= -1e-12));
        let again = project_physical(&proj);
        for i in 0..4 {
            for j in 0..4 {
                assert!((proj.entries()[(i, j)] - again.entries()[(i, j)]).norm() < 1e-12);
            }
        }
    }
}
