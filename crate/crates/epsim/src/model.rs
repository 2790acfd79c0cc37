//! Closed-form eigensystem and no-jump dynamics of the dissipative
//! qubit-resonator model, plus the two-qubit analog.
//!
//! The non-Hermitian Hamiltonian couples `|e,n-1>` and `|g,n>` with strength
//! `sqrt(n)*Omega` while the anti-Hermitian part encodes the qubit and
//! resonator decay rates. Restricted to the n-excitation subspace this is a
//! complex symmetric 2×2 problem with a closed-form spectrum; everything in
//! this module is evaluated from those closed forms in a limit-safe way so
//! the exceptional point needs no special casing.

use crate::linalg::sinc_c;
use num_complex::Complex64;
use thiserror::Error;

/// Relative threshold below which the two eigenpairs are reported degenerate.
pub const EP_DEGENERACY_RTOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("state vector is not normalizable: norm = {0}")]
    NotNormalizable(f64),
    #[error("normalization violated: |1 - sum |a_i|^2| = {0:e}")]
    NotNormalized(f64),
}

/// Parameters of the dissipative qubit-resonator model.
///
/// `omega` is the coupling strength in rad/ns, `kappa_q`/`kappa_f` the qubit
/// and resonator energy decay rates in 1/ns, `n` the conserved excitation
/// number of the subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NhParams {
    omega: f64,
    kappa_q: f64,
    kappa_f: f64,
    n: u32,
}

impl NhParams {
    pub fn new(omega: f64, kappa_q: f64, kappa_f: f64, n: u32) -> Result<Self, ModelError> {
        if !(omega.is_finite() && kappa_q.is_finite() && kappa_f.is_finite()) {
            return Err(ModelError::InvalidParams("non-finite input".into()));
        }
        if omega < 0.0 || kappa_q < 0.0 || kappa_f < 0.0 {
            return Err(ModelError::InvalidParams(format!(
                "omega, kappa_q, kappa_f must be nonnegative (got {omega}, {kappa_q}, {kappa_f})"
            )));
        }
        if n < 1 {
            return Err(ModelError::InvalidParams("excitation number n must be >= 1".into()));
        }
        Ok(Self { omega, kappa_q, kappa_f, n })
    }

    /// Build parameters from the rescaled coupling `eta = 4 sqrt(n) Omega / |kappa|`.
    ///
    /// Rejected when `kappa_f == kappa_q` (eta is undefined in the
    /// Hermitian-gap regime).
    pub fn from_eta(eta: f64, kappa_q: f64, kappa_f: f64, n: u32) -> Result<Self, ModelError> {
        if kappa_f == kappa_q {
            return Err(ModelError::InvalidParams(
                "eta is undefined for kappa_f == kappa_q (Hermitian-gap regime)".into(),
            ));
        }
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(ModelError::InvalidParams(format!("eta must be >= 0 (got {eta})")));
        }
        let omega = eta * (kappa_f - kappa_q).abs() / (4.0 * (n as f64).sqrt());
        Self::new(omega, kappa_q, kappa_f, n)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn kappa_q(&self) -> f64 {
        self.kappa_q
    }

    pub fn kappa_f(&self) -> f64 {
        self.kappa_f
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Decay-rate difference `kappa = kappa_f - kappa_q`.
    pub fn kappa(&self) -> f64 {
        self.kappa_f - self.kappa_q
    }

    /// Total decay rate `gamma = kappa_f + kappa_q`.
    pub fn gamma(&self) -> f64 {
        self.kappa_f + self.kappa_q
    }

    /// Rescaled coupling `eta = 4 sqrt(n) Omega / |kappa|`.
    ///
    /// `None` when `kappa == 0`: the gap is then always real (Hermitian-gap
    /// regime) and eta-indexed sweeps reject the input.
    pub fn eta(&self) -> Option<f64> {
        let kappa = self.kappa();
        if kappa == 0.0 {
            None
        } else {
            Some(4.0 * (self.n as f64).sqrt() * self.omega / kappa.abs())
        }
    }

    /// Effective coupling on the subspace, `sqrt(n) * Omega`.
    pub fn coupling(&self) -> f64 {
        (self.n as f64).sqrt() * self.omega
    }

    /// Complex energy gap `Delta E_n = 2 sqrt(n Omega^2 - kappa^2/16)`.
    ///
    /// The radicand is real, so the principal branch reduces to: real
    /// nonnegative above the EP, imaginary nonnegative below it, with the
    /// real/imaginary parts exactly zero in the respective regimes.
    pub fn gap(&self) -> Complex64 {
        let s = self.coupling();
        let radicand = s * s - self.kappa() * self.kappa() / 16.0;
        if radicand >= 0.0 {
            Complex64::new(2.0 * radicand.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 2.0 * (-radicand).sqrt())
        }
    }

    /// Mean eigenenergy: half the trace of the subspace Hamiltonian,
    /// `-(i/4)[kappa_q + (2n-1) kappa_f]`. Equals `-i gamma/4` for `n = 1`.
    pub fn mean_energy(&self) -> Complex64 {
        Complex64::new(0.0, -0.25 * (self.kappa_q + (2.0 * self.n as f64 - 1.0) * self.kappa_f))
    }

    /// Basis labels of the n-excitation subspace, `["e,n-1", "g,n"]`.
    pub fn basis_labels(&self) -> Vec<String> {
        vec![format!("e,{}", self.n - 1), format!("g,{}", self.n)]
    }
}

/// Parameters of two decaying qubits with an excitation-swapping coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitNhParams {
    omega: f64,
    kappa_1: f64,
    kappa_2: f64,
}

impl TwoQubitNhParams {
    pub fn new(omega: f64, kappa_1: f64, kappa_2: f64) -> Result<Self, ModelError> {
        if !(omega.is_finite() && kappa_1.is_finite() && kappa_2.is_finite()) {
            return Err(ModelError::InvalidParams("non-finite input".into()));
        }
        if omega < 0.0 || kappa_1 < 0.0 || kappa_2 < 0.0 {
            return Err(ModelError::InvalidParams("rates must be nonnegative".into()));
        }
        Ok(Self { omega, kappa_1, kappa_2 })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn kappa_1(&self) -> f64 {
        self.kappa_1
    }

    pub fn kappa_2(&self) -> f64 {
        self.kappa_2
    }

    /// `kappa = kappa_2 - kappa_1`.
    pub fn kappa(&self) -> f64 {
        self.kappa_2 - self.kappa_1
    }

    pub fn eta(&self) -> Option<f64> {
        let kappa = self.kappa();
        if kappa == 0.0 {
            None
        } else {
            Some(4.0 * self.omega / kappa.abs())
        }
    }

    /// Energy gap `E_g = 2 sqrt(Omega^2 - kappa^2/16)`.
    pub fn gap(&self) -> Complex64 {
        let radicand = self.omega * self.omega - self.kappa() * self.kappa() / 16.0;
        if radicand >= 0.0 {
            Complex64::new(2.0 * radicand.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 2.0 * (-radicand).sqrt())
        }
    }

    pub fn mean_energy(&self) -> Complex64 {
        Complex64::new(0.0, -0.25 * (self.kappa_1 + self.kappa_2))
    }

    pub fn basis_labels(&self) -> Vec<String> {
        vec!["e1,g2".into(), "g1,e2".into()]
    }
}

/// Normalized pure state over an ordered, labeled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    labels: Vec<String>,
}

impl PureState {
    /// Construct from already-normalized amplitudes (1e-12 tolerance).
    pub fn new(amplitudes: Vec<Complex64>, labels: Vec<String>) -> Result<Self, ModelError> {
        if amplitudes.len() != labels.len() {
            return Err(ModelError::InvalidParams(format!(
                "{} amplitudes for {} basis labels",
                amplitudes.len(),
                labels.len()
            )));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let defect = (norm_sqr - 1.0).abs();
        if defect > 1e-12 {
            return Err(ModelError::NotNormalized(defect));
        }
        Ok(Self { amplitudes, labels })
    }

    /// Normalize an arbitrary amplitude vector; returns the state and the
    /// original norm.
    pub fn from_unnormalized(
        amplitudes: Vec<Complex64>,
        labels: Vec<String>,
    ) -> Result<(Self, f64), ModelError> {
        if amplitudes.len() != labels.len() {
            return Err(ModelError::InvalidParams("amplitude/label length mismatch".into()));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(ModelError::NotNormalizable(norm));
        }
        let scaled = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok((Self { amplitudes: scaled, labels }, norm))
    }

    /// Basis ket `|index>`.
    pub fn basis_ket(labels: Vec<String>, index: usize) -> Result<Self, ModelError> {
        if index >= labels.len() {
            return Err(ModelError::InvalidParams(format!(
                "basis index {index} out of range for {} labels",
                labels.len()
            )));
        }
        let mut amplitudes = vec![Complex64::ZERO; labels.len()];
        amplitudes[index] = Complex64::ONE;
        Ok(Self { amplitudes, labels })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Inner product `<self|other>` (no basis check).
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Eigenenergies, gap and right eigenstates of a two-level NH Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub e_plus: Complex64,
    pub e_minus: Complex64,
    pub gap: Complex64,
    pub phi_plus: PureState,
    pub phi_minus: PureState,
    pub degenerate: bool,
}

/// Shared 2×2 eigensystem: H = mean*I + [[i k/4, s], [s, -i k/4]] in an
/// ordered basis (first ket carries the coupling amplitude `s`).
fn two_level_eigen(
    s: f64,
    kappa: f64,
    mean: Complex64,
    gap: Complex64,
    labels: Vec<String>,
    scale: f64,
) -> EigenSystem {
    let half_gap = gap / 2.0;
    let i_k4 = Complex64::new(0.0, -0.25 * kappa);
    // |g,n> coefficients of the two eigenvectors (exact; equals the
    // published E_{n,±} when kappa_q = 0)
    let g_plus = i_k4 + half_gap;
    let g_minus = i_k4 - half_gap;
    let degenerate = gap.norm() < EP_DEGENERACY_RTOL * scale;

    let (phi_plus, phi_minus) = if s == 0.0 && kappa == 0.0 {
        // H is proportional to the identity on the subspace; fix the basis kets
        (
            PureState::basis_ket(labels.clone(), 0).expect("basis ket"),
            PureState::basis_ket(labels.clone(), 1).expect("basis ket"),
        )
    } else {
        (
            eigenvector(s, g_plus, g_minus, labels.clone()),
            eigenvector(s, g_minus, g_plus, labels),
        )
    };

    EigenSystem {
        e_plus: mean + half_gap,
        e_minus: mean - half_gap,
        gap,
        phi_plus,
        phi_minus,
        degenerate,
    }
}

/// Eigenvector for coefficient pair (s, g). When that parametrization
/// vanishes (s = 0 with g = 0, possible only at zero coupling) the
/// equivalent form (-g_other, s) from the second Hamiltonian row is used.
fn eigenvector(s: f64, g: Complex64, g_other: Complex64, labels: Vec<String>) -> PureState {
    let (a, b) = if s > 0.0 || g.norm() > 0.0 {
        (Complex64::new(s, 0.0), g)
    } else {
        (-g_other, Complex64::new(s, 0.0))
    };
    // global phase: leading nonzero amplitude real nonnegative
    let phase_ref = if a.norm() > 0.0 { a } else { b };
    let phase = phase_ref / phase_ref.norm();
    let (a, b) = (a / phase, b / phase);
    PureState::from_unnormalized(vec![a, b], labels)
        .expect("eigenvector amplitudes are nonzero")
        .0
}

/// Eigenenergies and right eigenstates of the qubit-resonator model on the
/// n-excitation subspace.
pub fn eigen_system(params: &NhParams) -> EigenSystem {
    let scale = params.omega.max(params.kappa().abs());
    two_level_eigen(
        params.coupling(),
        params.kappa(),
        params.mean_energy(),
        params.gap(),
        params.basis_labels(),
        scale,
    )
}

/// Concurrence of a pure two-level superposition with amplitudes (a, b):
/// 2|ab| for the normalized state.
fn pure_concurrence(a: Complex64, b: Complex64) -> f64 {
    let denom = a.norm_sqr() + b.norm_sqr();
    if denom == 0.0 {
        return 0.0;
    }
    (2.0 * (a * b).norm() / denom).clamp(0.0, 1.0)
}

/// Concurrences of the two eigenstates, `2 sqrt(n) Omega |g_±| / (|g_±|^2 + n Omega^2)`.
pub fn eigen_concurrence(params: &NhParams) -> (f64, f64) {
    let es = eigen_system(params);
    (
        pure_concurrence(es.phi_plus.amplitudes[0], es.phi_plus.amplitudes[1]),
        pure_concurrence(es.phi_minus.amplitudes[0], es.phi_minus.amplitudes[1]),
    )
}

/// Reduced (gap-factored) amplitudes of the no-jump evolved state on
/// {|e,n-1>, |g,n>}: u on the first ket, v on the second. The common factor
/// Delta E_n has been divided out, which keeps the EP limit finite.
fn no_jump_amplitudes(params: &NhParams, t: f64) -> (Complex64, Complex64) {
    let x = params.gap() * (t / 2.0);
    let sc = sinc_c(x);
    let u = 2.0 * x.cos() + params.kappa() * (t / 2.0) * sc;
    let v = -Complex64::I * 2.0 * params.coupling() * t * sc;
    (u, v)
}

/// Normalized no-jump trajectory state at time `t`, starting from `|e,n-1>`.
pub fn no_jump_state(params: &NhParams, t: f64) -> Result<PureState, ModelError> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(ModelError::InvalidParams(format!("t must be >= 0 (got {t})")));
    }
    let (u, v) = no_jump_amplitudes(params, t);
    Ok(PureState::from_unnormalized(vec![u, v], params.basis_labels())?.0)
}

/// Qubit-resonator concurrence of the no-jump state, sin(2θ) in closed form.
///
/// Agrees with the Wootters concurrence of the state's projector.
pub fn no_jump_concurrence(params: &NhParams, t: f64) -> Result<f64, ModelError> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(ModelError::InvalidParams(format!("t must be >= 0 (got {t})")));
    }
    let (u, v) = no_jump_amplitudes(params, t);
    Ok(pure_concurrence(u, v))
}

/// No-jump survival probability and conditional `|e,n-1>` population.
///
/// `p_nojump` is the squared norm of the unnormalized propagated state;
/// `p_e0` is the `|e,n-1>` population after renormalization.
pub fn no_jump_probability(params: &NhParams, t: f64) -> Result<(f64, f64), ModelError> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(ModelError::InvalidParams(format!("t must be >= 0 (got {t})")));
    }
    let (u, v) = no_jump_amplitudes(params, t);
    let (nu, nv) = (u.norm_sqr(), v.norm_sqr());
    // global decay e^{-i*mean*t} is the only piece not contained in (u, v)/2
    let decay = (-(params.kappa_q + (2.0 * params.n as f64 - 1.0) * params.kappa_f) * t / 2.0).exp();
    let p_nojump = decay * (nu + nv) / 4.0;
    let p_e0 = nu / (nu + nv);
    Ok((p_nojump, p_e0))
}

/// Eigen data of the two-qubit analog, including eigenstate concurrences.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitEigenSystem {
    pub system: EigenSystem,
    pub conc_plus: f64,
    pub conc_minus: f64,
}

/// Eigensystem of two decaying qubits in the single-excitation subspace
/// {|e1,g2>, |g1,e2>}.
pub fn two_qubit_eigen(params: &TwoQubitNhParams) -> TwoQubitEigenSystem {
    let scale = params.omega.max(params.kappa().abs());
    let system = two_level_eigen(
        params.omega,
        params.kappa(),
        params.mean_energy(),
        params.gap(),
        params.basis_labels(),
        scale,
    );
    let conc_plus = pure_concurrence(system.phi_plus.amplitudes[0], system.phi_plus.amplitudes[1]);
    let conc_minus =
        pure_concurrence(system.phi_minus.amplitudes[0], system.phi_minus.amplitudes[1]);
    TwoQubitEigenSystem { system, conc_plus, conc_minus }
}
