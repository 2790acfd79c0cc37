//! Two-qubit state tomography: 9 Pauli-basis settings, linear inversion,
//! physicality projection, and the line-oriented shot-count format.

use super::{
    correct_readout, project_physical, sample_counts, FidelityMatrix, MeasurementError,
};
use crate::entanglement::{two_qubit_labels, DensityMatrix};
use crate::linalg::{kron, CMatrix};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::fmt;

/// Measurement basis of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    fn parse(c: char) -> Option<Self> {
        match c {
            'X' => Some(PauliAxis::X),
            'Y' => Some(PauliAxis::Y),
            'Z' => Some(PauliAxis::Z),
            _ => None,
        }
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// The nine measurement settings in their fixed sampling/serialization order.
pub const TOMOGRAPHY_SETTINGS: [(PauliAxis, PauliAxis); 9] = [
    (PauliAxis::X, PauliAxis::X),
    (PauliAxis::X, PauliAxis::Y),
    (PauliAxis::X, PauliAxis::Z),
    (PauliAxis::Y, PauliAxis::X),
    (PauliAxis::Y, PauliAxis::Y),
    (PauliAxis::Y, PauliAxis::Z),
    (PauliAxis::Z, PauliAxis::X),
    (PauliAxis::Z, PauliAxis::Y),
    (PauliAxis::Z, PauliAxis::Z),
];

/// Outcome counts of one measurement setting over {gg, ge, eg, ee}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SettingCounts {
    pub setting: (PauliAxis, PauliAxis),
    pub counts: [u64; 4],
    pub shots: u64,
}

/// Counts for all nine settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotCounts {
    pub settings: Vec<SettingCounts>,
}

impl ShotCounts {
    fn find(&self, setting: (PauliAxis, PauliAxis)) -> Option<&SettingCounts> {
        self.settings.iter().find(|s| s.setting == setting)
    }
}

/// Single-qubit pre-rotation mapping the measured axis onto z.
fn rotation(axis: PauliAxis) -> CMatrix {
    let r = 1.0 / 2f64.sqrt();
    match axis {
        PauliAxis::Z => CMatrix::identity(2, 2),
        // Hadamard
        PauliAxis::X => CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(r, 0.0),
                Complex64::new(r, 0.0),
                Complex64::new(r, 0.0),
                Complex64::new(-r, 0.0),
            ],
        ),
        // H S†
        PauliAxis::Y => CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(r, 0.0),
                Complex64::new(0.0, -r),
                Complex64::new(r, 0.0),
                Complex64::new(0.0, r),
            ],
        ),
    }
}

/// Outcome probabilities of one setting: diag((u_A ⊗ u_B) rho (u_A ⊗ u_B)†).
pub fn setting_probabilities(
    rho: &DensityMatrix,
    setting: (PauliAxis, PauliAxis),
) -> Result<[f64; 4], MeasurementError> {
    if rho.dim() != 4 {
        return Err(MeasurementError::InvalidProbability(format!(
            "tomography needs a 4x4 state, got {}x{}",
            rho.dim(),
            rho.dim()
        )));
    }
    let u = kron(&rotation(setting.0), &rotation(setting.1));
    let rotated = &u * rho.entries() * u.adjoint();
    let mut p = [0.0; 4];
    for i in 0..4 {
        p[i] = rotated[(i, i)].re.max(0.0);
    }
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    Ok(p)
}

/// Sample all nine settings with one seeded generator (fixed setting order,
/// so a seed fully determines every count).
pub fn simulate_tomography(
    rho: &DensityMatrix,
    f_q: &FidelityMatrix,
    f_qa: &FidelityMatrix,
    shots: u64,
    seed: u64,
) -> Result<ShotCounts, MeasurementError> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut settings = Vec::with_capacity(9);
    for &setting in &TOMOGRAPHY_SETTINGS {
        let p_true = setting_probabilities(rho, setting)?;
        let counts = sample_counts(&p_true, f_q, f_qa, shots, &mut rng)?;
        settings.push(SettingCounts { setting, counts, shots });
    }
    Ok(ShotCounts { settings })
}

/// Raw linear-inversion estimate and its physicality projection.
#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult {
    pub raw: DensityMatrix,
    pub physical: DensityMatrix,
}

fn pauli(axis: Option<PauliAxis>) -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    match axis {
        None => {
            m[(0, 0)] = Complex64::ONE;
            m[(1, 1)] = Complex64::ONE;
        }
        Some(PauliAxis::X) => {
            m[(0, 1)] = Complex64::ONE;
            m[(1, 0)] = Complex64::ONE;
        }
        Some(PauliAxis::Y) => {
            m[(0, 1)] = Complex64::new(0.0, -1.0);
            m[(1, 0)] = Complex64::new(0.0, 1.0);
        }
        Some(PauliAxis::Z) => {
            m[(0, 0)] = Complex64::ONE;
            m[(1, 1)] = Complex64::new(-1.0, 0.0);
        }
    }
    m
}

const AXES: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

/// outcome sign: g -> +1, e -> -1
fn sign(bit: usize) -> f64 {
    1.0 - 2.0 * bit as f64
}

/// Linear inversion from per-setting corrected probabilities (raw, possibly
/// slightly negative) keyed in `TOMOGRAPHY_SETTINGS` order.
pub fn reconstruct_from_probabilities(
    probabilities: &[[f64; 4]; 9],
) -> Result<TomographyResult, MeasurementError> {
    // two-qubit correlators and single-qubit marginals (marginals averaged
    // over the three settings that measure the partner in each basis)
    let mut corr = [[0.0; 3]; 3];
    let mut first = [0.0; 3];
    let mut second = [0.0; 3];
    for (idx, &(a, b)) in TOMOGRAPHY_SETTINGS.iter().enumerate() {
        let p = &probabilities[idx];
        let (ia, ib) = (
            AXES.iter().position(|&x| x == a).unwrap(),
            AXES.iter().position(|&x| x == b).unwrap(),
        );
        for (outcome, &prob) in p.iter().enumerate() {
            let (q, qa) = (outcome / 2, outcome % 2);
            corr[ia][ib] += sign(q) * sign(qa) * prob;
            first[ia] += sign(q) * prob / 3.0;
            second[ib] += sign(qa) * prob / 3.0;
        }
    }
    let mut entries = CMatrix::identity(4, 4) * Complex64::new(0.25, 0.0);
    for (i, &a) in AXES.iter().enumerate() {
        entries += kron(&pauli(Some(a)), &pauli(None)) * Complex64::new(first[i] / 4.0, 0.0);
        entries += kron(&pauli(None), &pauli(Some(a))) * Complex64::new(second[i] / 4.0, 0.0);
        for (j, &b) in AXES.iter().enumerate() {
            entries +=
                kron(&pauli(Some(a)), &pauli(Some(b))) * Complex64::new(corr[i][j] / 4.0, 0.0);
        }
    }
    let raw = DensityMatrix::raw(entries, two_qubit_labels())?;
    let physical = project_physical(&raw);
    Ok(TomographyResult { raw, physical })
}

/// Full reconstruction from shot counts: frequencies, readout correction
/// (raw inverse, uncllipped), linear inversion, physicality projection.
pub fn tomography_reconstruct(
    counts: &ShotCounts,
    f_q: &FidelityMatrix,
    f_qa: &FidelityMatrix,
) -> Result<TomographyResult, MeasurementError> {
    let mut probabilities = [[0.0; 4]; 9];
    for (idx, &setting) in TOMOGRAPHY_SETTINGS.iter().enumerate() {
        let record = counts
            .find(setting)
            .ok_or_else(|| MeasurementError::MissingSetting(format!("{}{}", setting.0, setting.1)))?;
        if record.shots == 0 || record.counts.iter().sum::<u64>() != record.shots {
            return Err(MeasurementError::MalformedRecord(format!(
                "{}{}: counts do not sum to shots",
                setting.0, setting.1
            )));
        }
        let mut freq = [0.0; 4];
        for (i, &c) in record.counts.iter().enumerate() {
            freq[i] = c as f64 / record.shots as f64;
        }
        probabilities[idx] = correct_readout(&freq, f_q, f_qa)?.raw;
    }
    reconstruct_from_probabilities(&probabilities)
}

/// Serialize counts in the line format
/// `setting,outcome_gg,outcome_ge,outcome_eg,outcome_ee,shots`.
pub fn write_shot_counts(counts: &ShotCounts) -> String {
    let mut out = String::from("setting,outcome_gg,outcome_ge,outcome_eg,outcome_ee,shots\n");
    for s in &counts.settings {
        out.push_str(&format!(
            "{}{},{},{},{},{},{}\n",
            s.setting.0, s.setting.1, s.counts[0], s.counts[1], s.counts[2], s.counts[3], s.shots
        ));
    }
    out
}

/// Parse the line format produced by [`write_shot_counts`] (header optional).
pub fn parse_shot_counts(text: &str) -> Result<ShotCounts, MeasurementError> {
    let mut settings = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with("setting,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(MeasurementError::MalformedRecord(line.to_string()));
        }
        let mut chars = fields[0].chars();
        let (a, b) = match (chars.next(), chars.next(), chars.next()) {
            (Some(a), Some(b), None) => (PauliAxis::parse(a), PauliAxis::parse(b)),
            _ => (None, None),
        };
        let (Some(a), Some(b)) = (a, b) else {
            return Err(MeasurementError::MalformedRecord(format!("bad setting {}", fields[0])));
        };
        let mut numbers = [0u64; 5];
        for (slot, field) in numbers.iter_mut().zip(&fields[1..]) {
            *slot = field
                .parse()
                .map_err(|_| MeasurementError::MalformedRecord(line.to_string()))?;
        }
        let counts = [numbers[0], numbers[1], numbers[2], numbers[3]];
        if counts.iter().sum::<u64>() != numbers[4] {
            return Err(MeasurementError::MalformedRecord(format!(
                "{line}: counts do not sum to shots"
            )));
        }
        if settings.iter().any(|s: &SettingCounts| s.setting == (a, b)) {
            return Err(MeasurementError::MalformedRecord(format!("duplicate setting {a}{b}")));
        }
        settings.push(SettingCounts { setting: (a, b), counts, shots: numbers[4] });
    }
    Ok(ShotCounts { settings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PureState;
    use rand::Rng;

    fn random_density(rng: &mut ChaCha12Rng) -> DensityMatrix {
        // mixture of three random pure states
        let mut entries = CMatrix::zeros(4, 4);
        let weights = [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()];
        let total: f64 = weights.iter().sum();
        for &w in &weights {
            let amps: Vec<Complex64> = (0..4)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let (s, _) = PureState::from_unnormalized(amps, two_qubit_labels()).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    entries[(i, j)] += (w / total) * s.amplitudes()[i] * s.amplitudes()[j].conj();
                }
            }
        }
        DensityMatrix::new(entries, two_qubit_labels()).unwrap()
    }

    fn bell() -> DensityMatrix {
        let r = 1.0 / 2f64.sqrt();
        let s = PureState::new(
            vec![Complex64::ZERO, Complex64::new(r, 0.0), Complex64::new(r, 0.0), Complex64::ZERO],
            two_qubit_labels(),
        )
        .unwrap();
        DensityMatrix::from_pure(&s)
    }

    #[test]
    fn exact_probabilities_invert_exactly() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..20 {
            let rho = random_density(&mut rng);
            let mut probs = [[0.0; 4]; 9];
            for (i, &s) in TOMOGRAPHY_SETTINGS.iter().enumerate() {
                probs[i] = setting_probabilities(&rho, s).unwrap();
            }
            let result = reconstruct_from_probabilities(&probs).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        (result.raw.entries()[(i, j)] - rho.entries()[(i, j)]).norm() < 1e-12,
                        "raw mismatch at ({i},{j})"
                    );
                    assert!(
                        (result.physical.entries()[(i, j)] - rho.entries()[(i, j)]).norm() < 1e-9
                    );
                }
            }
        }
    }

    #[test]
    fn finite_shots_recover_bell_state() {
        let rho = bell();
        let f_q = FidelityMatrix::from_fidelities(0.981, 0.901).unwrap();
        let f_qa = FidelityMatrix::from_fidelities(0.977, 0.902).unwrap();
        let mut fidelities = Vec::new();
        for seed in 0..10u64 {
            let counts = simulate_tomography(&rho, &f_q, &f_qa, 3000, seed).unwrap();
            let result = tomography_reconstruct(&counts, &f_q, &f_qa).unwrap();
            // <psi| rho |psi> against the Bell target
            let e = result.physical.entries();
            let fid = 0.5 * (e[(1, 1)].re + e[(2, 2)].re) + e[(1, 2)].re;
            fidelities.push(fid);
        }
        let mean: f64 = fidelities.iter().sum::<f64>() / fidelities.len() as f64;
        assert!(mean >= 0.98, "seed-averaged Bell fidelity {mean}");
    }

    #[test]
    fn shot_count_io_round_trip() {
        let rho = bell();
        let id = FidelityMatrix::identity();
        let counts = simulate_tomography(&rho, &id, &id, 128, 9).unwrap();
        let text = write_shot_counts(&counts);
        assert!(text.starts_with("setting,outcome_gg"));
        let parsed = parse_shot_counts(&text).unwrap();
        assert_eq!(parsed, counts);
        // malformed inputs
        assert!(parse_shot_counts("AB,1,2,3,4,10\n").is_err());
        assert!(parse_shot_counts("XX,1,2,3,4,11\n").is_err());
        assert!(parse_shot_counts("XX,1,2,3\n").is_err());
        assert!(parse_shot_counts("XX,1,2,3,4,10\nXX,1,2,3,4,10\n").is_err());
    }

    #[test]
    fn missing_setting_is_detected() {
        let rho = bell();
        let id = FidelityMatrix::identity();
        let mut counts = simulate_tomography(&rho, &id, &id, 64, 1).unwrap();
        counts.settings.remove(4);
        assert!(matches!(
            tomography_reconstruct(&counts, &id, &id),
            Err(MeasurementError::MissingSetting(_))
        ));
    }
}
