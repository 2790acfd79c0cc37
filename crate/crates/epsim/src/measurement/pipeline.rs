//! End-to-end simulated measurement of one (params, t) point:
//! evolve → map → tomograph → correct → post-project → unmap → concurrence.

use super::tomography::{
    reconstruct_from_probabilities, setting_probabilities, simulate_tomography,
    tomography_reconstruct, TOMOGRAPHY_SETTINGS,
};
use super::{
    apply_mapping_decay, correct_readout, distort_probabilities, mapping_survival, post_project,
    project_physical, unmap_correction, FidelityMatrix, MappingParams, MeasurementError,
};
use crate::entanglement::{concurrence, two_qubit_labels, DensityMatrix};
use crate::linalg::CMatrix;
use crate::model::{no_jump_probability, no_jump_state, NhParams};
use num_complex::Complex64;

/// Fixed ingredients of a pipeline run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineSettings {
    pub f_q: FidelityMatrix,
    pub f_qa: FidelityMatrix,
    pub mapping: MappingParams,
    /// `None` runs the noise-free pipeline on analytic probabilities.
    pub shots: Option<u64>,
    /// Mix the jump trajectories' |g,g> weight into the pre-tomography
    /// state, exercising the post-projection discard.
    pub include_jump_mixture: bool,
}

/// Recovered state and observables at one (params, t) grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelinePoint {
    /// Post-projected, mapping-corrected 2×2 state in {|e_a,g>, |g_a,e>}
    /// (equivalently the recovered {|e,0>, |g,1>} state).
    pub rho_block: DensityMatrix,
    /// Concurrence of the recovered state.
    pub concurrence: f64,
    /// Recovered conditional |e,0> population.
    pub p_e0: f64,
    /// No-jump weight used for the jump mixture (analytic).
    pub p_nojump: f64,
}

/// Run the full measurement chain once.
pub fn run_pipeline_point(
    params: &NhParams,
    t: f64,
    settings: &PipelineSettings,
    seed: u64,
) -> Result<PipelinePoint, MeasurementError> {
    let psi = no_jump_state(params, t)?;
    let (p_nojump, _) = no_jump_probability(params, t)?;
    let mapping = settings.mapping.at_evolution_time(t)?;
    let mapped = apply_mapping_decay(&psi, &mapping)?;

    // two-qubit state in (Q, Qa) order: |e_a,g> -> 1, |g_a,e> -> 2
    let mut entries = CMatrix::zeros(4, 4);
    let amps = [mapped.amplitudes()[0], mapped.amplitudes()[1]];
    for (bi, &a) in [1usize, 2].iter().zip(&amps) {
        for (bj, &b) in [1usize, 2].iter().zip(&amps) {
            entries[(*bi, *bj)] = a * b.conj();
        }
    }
    if settings.include_jump_mixture {
        let survive = p_nojump * mapping_survival(&psi, &mapping);
        entries *= Complex64::new(survive, 0.0);
        entries[(0, 0)] += Complex64::new(1.0 - survive, 0.0);
    }
    let rho_true = DensityMatrix::new(entries, two_qubit_labels())?;

    let reconstructed = match settings.shots {
        Some(shots) => {
            let counts =
                simulate_tomography(&rho_true, &settings.f_q, &settings.f_qa, shots, seed)?;
            tomography_reconstruct(&counts, &settings.f_q, &settings.f_qa)?
        }
        None => {
            // analytic probability path through the same distort/correct pair
            let mut probabilities = [[0.0; 4]; 9];
            for (idx, &setting) in TOMOGRAPHY_SETTINGS.iter().enumerate() {
                let p_true = setting_probabilities(&rho_true, setting)?;
                let p_meas = distort_probabilities(&p_true, &settings.f_q, &settings.f_qa);
                probabilities[idx] = correct_readout(&p_meas, &settings.f_q, &settings.f_qa)?.raw;
            }
            reconstruct_from_probabilities(&probabilities)?
        }
    };

    let block = post_project(&reconstructed.physical)?;
    let corrected = unmap_correction(&block, mapping.k_factor())?;
    let corrected = project_physical(&corrected);
    let p_e0 = corrected.entries()[(0, 0)].re;

    // embed into {g0, g1, e0, e1} for the concurrence evaluation
    let mut embedded = CMatrix::zeros(4, 4);
    let block_map = [2usize, 1];
    for i in 0..2 {
        for j in 0..2 {
            embedded[(block_map[i], block_map[j])] = corrected.entries()[(i, j)];
        }
    }
    let labels = vec!["g,0".into(), "g,1".into(), "e,0".into(), "e,1".into()];
    let conc = concurrence(&project_physical(&DensityMatrix::raw(embedded, labels)?))?;

    Ok(PipelinePoint { rho_block: corrected, concurrence: conc, p_e0, p_nojump })
}
