//! Numerical propagation under the effective non-Hermitian Hamiltonian and
//! under the full parametrically modulated Hamiltonian, plus the
//! sideband-engineering math connecting the two.
//!
//! The full Hamiltonian, in the interaction picture of the modulated qubit,
//! is `g_r exp(i Delta_r t - i mu sin(nu t)) a† |g><e| + h.c.` with the
//! qubit/resonator decay terms appended; at the first- (second-) order
//! sideband resonance it reduces to an effective swap coupling of strength
//! `J_1(mu) g_r` (`J_2(mu) g_r`).

mod bessel;
mod flux;

pub use bessel::{bessel_j, BESSEL_MAX_ARG};
pub use flux::{qubit_frequency_profile, FluxProfile, FrequencyProfile, Harmonic};

use crate::model::{no_jump_probability, no_jump_state, ModelError, NhParams, PureState};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

/// Relative tolerance of the sideband resonance check.
pub const RESONANCE_RTOL: f64 = 1e-9;
/// Population allowed at the top retained Fock level before the truncation
/// is declared too small.
pub const LEAKAGE_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("bessel_j argument out of range: |{x}| > {BESSEL_MAX_ARG}")]
    BesselOutOfRange { x: f64 },
    #[error("off-resonant parameters: nu = {nu} but the order-{order} sideband requires {required}")]
    OffResonant { nu: f64, required: f64, order: u8 },
    #[error("time step {dt} exceeds the resolvable maximum {max} = 2pi/(20 nu)")]
    StepTooLarge { dt: f64, max: f64 },
    #[error("population {population:e} at the Fock cutoff at t = {t} exceeds {LEAKAGE_THRESHOLD:e}")]
    CutoffLeakage { t: f64, population: f64 },
    #[error("flux excursion {reach} reaches the E_J = 0 kink (|phi_bar| + |phi_tilde| >= 0.5)")]
    FluxTooLarge { reach: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which sideband carries the engineered coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SidebandOrder {
    First,
    Second,
}

impl SidebandOrder {
    pub fn index(&self) -> u32 {
        match self {
            SidebandOrder::First => 1,
            SidebandOrder::Second => 2,
        }
    }
}

/// Parametric-drive description of the modulated qubit-resonator coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationParams {
    g_r: f64,
    delta_r: f64,
    epsilon: f64,
    nu: f64,
    sideband_order: SidebandOrder,
    fock_cutoff: u32,
}

impl ModulationParams {
    /// All frequencies in rad/ns. `fock_cutoff` is the largest photon number
    /// retained (default 3 for single-excitation runs).
    pub fn new(
        g_r: f64,
        delta_r: f64,
        epsilon: f64,
        nu: f64,
        sideband_order: SidebandOrder,
        fock_cutoff: u32,
    ) -> Result<Self, DynamicsError> {
        if !(nu > 0.0) {
            return Err(DynamicsError::InvalidInput(format!("nu must be positive (got {nu})")));
        }
        if !(g_r.is_finite() && delta_r.is_finite() && epsilon.is_finite()) {
            return Err(DynamicsError::InvalidInput("non-finite drive parameter".into()));
        }
        if epsilon < 0.0 {
            return Err(DynamicsError::InvalidInput("epsilon must be nonnegative".into()));
        }
        if fock_cutoff < 1 {
            return Err(DynamicsError::InvalidInput("fock_cutoff must be >= 1".into()));
        }
        Ok(Self { g_r, delta_r, epsilon, nu, sideband_order, fock_cutoff })
    }

    /// Same, with the modulation index `mu = epsilon/nu` given directly.
    pub fn from_mu(
        g_r: f64,
        delta_r: f64,
        mu: f64,
        nu: f64,
        sideband_order: SidebandOrder,
        fock_cutoff: u32,
    ) -> Result<Self, DynamicsError> {
        if !(mu >= 0.0) {
            return Err(DynamicsError::InvalidInput("mu must be nonnegative".into()));
        }
        Self::new(g_r, delta_r, mu * nu, nu, sideband_order, fock_cutoff)
    }

    pub fn g_r(&self) -> f64 {
        self.g_r
    }

    pub fn delta_r(&self) -> f64 {
        self.delta_r
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Modulation index mu = epsilon/nu.
    pub fn mu(&self) -> f64 {
        self.epsilon / self.nu
    }

    pub fn sideband_order(&self) -> SidebandOrder {
        self.sideband_order
    }

    pub fn fock_cutoff(&self) -> u32 {
        self.fock_cutoff
    }

    /// Default integration step 2pi/(40 nu).
    pub fn default_dt(&self) -> f64 {
        std::f64::consts::TAU / (40.0 * self.nu)
    }

    /// Largest step accepted by the integrator, 2pi/(20 nu).
    pub fn max_dt(&self) -> f64 {
        std::f64::consts::TAU / (20.0 * self.nu)
    }
}

/// Effective swap coupling Omega = J_k(mu) * g_r at the order-k sideband
/// resonance (nu = Delta_r for k = 1, nu = Delta_r/2 for k = 2).
pub fn effective_coupling(params: &ModulationParams) -> Result<f64, DynamicsError> {
    let required = match params.sideband_order {
        SidebandOrder::First => params.delta_r,
        SidebandOrder::Second => params.delta_r / 2.0,
    };
    let tol = RESONANCE_RTOL * params.nu.abs().max(required.abs());
    if (params.nu - required).abs() > tol {
        return Err(DynamicsError::OffResonant {
            nu: params.nu,
            required,
            order: params.sideband_order.index() as u8,
        });
    }
    Ok(bessel_j(params.sideband_order.index(), params.mu())? * params.g_r)
}

/// Smallest mu with J_k(mu) = target, searched on the rising flank of J_k.
///
/// The flank tops out at J_1(1.8412) ≈ 0.5819 and J_2(3.0542) ≈ 0.4865;
/// larger targets are rejected.
pub fn invert_bessel_j(order: SidebandOrder, target: f64) -> Result<f64, DynamicsError> {
    let hi = match order {
        SidebandOrder::First => 1.8412,
        SidebandOrder::Second => 3.0542,
    };
    let max = bessel_j(order.index(), hi)?;
    if !(0.0..=1.0).contains(&target) || target > max {
        return Err(DynamicsError::InvalidInput(format!(
            "target coupling ratio {target} outside [0, {max:.4}]"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_j(order.index(), mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Time series of (normalized) states and no-jump weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Strictly increasing sample times (ns).
    pub times: Vec<f64>,
    /// Normalized state at each sample.
    pub states: Vec<PureState>,
    /// Squared norm of the unnormalized propagated state at each sample.
    pub p_nojump: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Unnormalized amplitudes at sample `i` (normalized state scaled back
    /// by the surviving norm).
    pub fn unnormalized_amplitudes(&self, i: usize) -> Vec<Complex64> {
        let scale = self.p_nojump[i].sqrt();
        self.states[i].amplitudes().iter().map(|a| a * scale).collect()
    }
}

fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>, DynamicsError> {
    if !(dt > 0.0) {
        return Err(DynamicsError::InvalidInput(format!("dt must be positive (got {dt})")));
    }
    if !(t_max >= 0.0) {
        return Err(DynamicsError::InvalidInput(format!("t_max must be >= 0 (got {t_max})")));
    }
    let steps = ((t_max / dt) - 1e-9).ceil().max(0.0) as usize;
    Ok((0..=steps).map(|i| i as f64 * dt).collect())
}

/// Propagate under the effective NH Hamiltonian on the n-excitation
/// subspace, evaluating the closed-form propagator at every grid time.
pub fn propagate_effective(
    params: &NhParams,
    t_max: f64,
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    let times = time_grid(t_max, dt)?;
    let mut states = Vec::with_capacity(times.len());
    let mut p_nojump = Vec::with_capacity(times.len());
    for &t in &times {
        states.push(no_jump_state(params, t)?);
        p_nojump.push(no_jump_probability(params, t)?.0);
    }
    Ok(Trajectory { times, states, p_nojump })
}

/// Basis labels of the truncated qubit ⊗ Fock space, `q,m` with q in {g,e}
/// and m = 0..=cutoff (qubit index major).
pub fn full_basis_labels(fock_cutoff: u32) -> Vec<String> {
    let mut labels = Vec::with_capacity(2 * (fock_cutoff as usize + 1));
    for q in ["g", "e"] {
        for m in 0..=fock_cutoff {
            labels.push(format!("{q},{m}"));
        }
    }
    labels
}

/// Index of |q,m> in the truncated product basis.
pub fn full_basis_index(fock_cutoff: u32, qubit_excited: bool, photons: u32) -> usize {
    (qubit_excited as usize) * (fock_cutoff as usize + 1) + photons as usize
}

/// Initial state |e,0> in the truncated product basis.
pub fn excited_vacuum(fock_cutoff: u32) -> PureState {
    PureState::basis_ket(full_basis_labels(fock_cutoff), full_basis_index(fock_cutoff, true, 0))
        .expect("index in range")
}

/// Concurrence carried by the {|e,0>, |g,1>} amplitudes of a full-basis
/// state (exact for states confined to the single-excitation sector).
pub fn single_excitation_concurrence(state: &PureState, fock_cutoff: u32) -> f64 {
    let a = state.amplitudes()[full_basis_index(fock_cutoff, true, 0)];
    let b = state.amplitudes()[full_basis_index(fock_cutoff, false, 1)];
    let denom = a.norm_sqr() + b.norm_sqr();
    if denom == 0.0 {
        0.0
    } else {
        (2.0 * (a * b).norm() / denom).clamp(0.0, 1.0)
    }
}

/// Conditional |e,0> population of a full-basis state.
pub fn conditional_e0_population(state: &PureState, fock_cutoff: u32) -> f64 {
    state.amplitudes()[full_basis_index(fock_cutoff, true, 0)].norm_sqr()
}

struct FullHamiltonian {
    g_r: f64,
    delta_r: f64,
    mu: f64,
    nu: f64,
    kappa_q: f64,
    kappa_f: f64,
    cutoff: usize,
}

impl FullHamiltonian {
    /// out = -i H(t) psi
    fn rhs(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let levels = self.cutoff + 1;
        let phase = Complex64::new(0.0, self.delta_r * t - self.mu * (self.nu * t).sin()).exp();
        for v in out.iter_mut() {
            *v = Complex64::ZERO;
        }
        for m in 0..levels {
            let idx_g = m;
            let idx_e = levels + m;
            // decay diagonals: -i * (-i/2) rate = -(rate/2)
            out[idx_g] -= 0.5 * self.kappa_f * m as f64 * psi[idx_g];
            out[idx_e] -= 0.5 * (self.kappa_q + self.kappa_f * m as f64) * psi[idx_e];
            // drive couples |e,m> <-> |g,m+1>
            if m + 1 < levels {
                let g = self.g_r * ((m + 1) as f64).sqrt();
                let coupling = g * phase;
                out[m + 1] += -Complex64::I * coupling * psi[idx_e];
                out[idx_e] += -Complex64::I * coupling.conj() * psi[m + 1];
            }
        }
    }

    fn rk4_step(&self, t: f64, dt: f64, psi: &mut Vec<Complex64>, scratch: &mut Rk4Scratch) {
        let dim = psi.len();
        self.rhs(t, psi, &mut scratch.k1);
        for i in 0..dim {
            scratch.tmp[i] = psi[i] + 0.5 * dt * scratch.k1[i];
        }
        self.rhs(t + 0.5 * dt, &scratch.tmp, &mut scratch.k2);
        for i in 0..dim {
            scratch.tmp[i] = psi[i] + 0.5 * dt * scratch.k2[i];
        }
        self.rhs(t + 0.5 * dt, &scratch.tmp, &mut scratch.k3);
        for i in 0..dim {
            scratch.tmp[i] = psi[i] + dt * scratch.k3[i];
        }
        self.rhs(t + dt, &scratch.tmp, &mut scratch.k4);
        for i in 0..dim {
            psi[i] += dt / 6.0
                * (scratch.k1[i] + 2.0 * scratch.k2[i] + 2.0 * scratch.k3[i] + scratch.k4[i]);
        }
    }
}

struct Rk4Scratch {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4Scratch {
    fn new(dim: usize) -> Self {
        Self {
            k1: vec![Complex64::ZERO; dim],
            k2: vec![Complex64::ZERO; dim],
            k3: vec![Complex64::ZERO; dim],
            k4: vec![Complex64::ZERO; dim],
            tmp: vec![Complex64::ZERO; dim],
        }
    }
}

fn leakage_check(
    psi: &[Complex64],
    cutoff: usize,
    norm_sqr: f64,
    t: f64,
) -> Result<(), DynamicsError> {
    let levels = cutoff + 1;
    let top = psi[cutoff].norm_sqr() + psi[levels + cutoff].norm_sqr();
    let population = top / norm_sqr.max(1e-300);
    if population > LEAKAGE_THRESHOLD {
        return Err(DynamicsError::CutoffLeakage { t, population });
    }
    Ok(())
}

/// Integrate the full modulated Hamiltonian with fixed-step classical RK4,
/// invoking `observe` at t = 0 and after every step.
fn integrate_full(
    modulation: &ModulationParams,
    decay: (f64, f64),
    psi0: &PureState,
    t_max: f64,
    dt: f64,
    mut observe: impl FnMut(f64, &[Complex64]),
) -> Result<Vec<Complex64>, DynamicsError> {
    let (kappa_q, kappa_f) = decay;
    if kappa_q < 0.0 || kappa_f < 0.0 {
        return Err(DynamicsError::InvalidInput("decay rates must be nonnegative".into()));
    }
    if dt > modulation.max_dt() {
        return Err(DynamicsError::StepTooLarge { dt, max: modulation.max_dt() });
    }
    let cutoff = modulation.fock_cutoff as usize;
    let dim = 2 * (cutoff + 1);
    if psi0.dim() != dim {
        return Err(DynamicsError::InvalidInput(format!(
            "psi0 has dimension {} but the cutoff-{cutoff} space has {dim}",
            psi0.dim()
        )));
    }
    let h = FullHamiltonian {
        g_r: modulation.g_r,
        delta_r: modulation.delta_r,
        mu: modulation.mu(),
        nu: modulation.nu,
        kappa_q,
        kappa_f,
        cutoff,
    };
    let times = time_grid(t_max, dt)?;
    let mut psi: Vec<Complex64> = psi0.amplitudes().to_vec();
    let mut scratch = Rk4Scratch::new(dim);
    observe(0.0, &psi);
    leakage_check(&psi, cutoff, 1.0, 0.0)?;
    for (step, &t) in times.iter().enumerate().skip(1) {
        let t_prev = times[step - 1];
        h.rk4_step(t_prev, t - t_prev, &mut psi, &mut scratch);
        let norm_sqr: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        leakage_check(&psi, cutoff, norm_sqr, t)?;
        observe(t, &psi);
    }
    Ok(psi)
}

/// Propagate `psi0` under the full time-dependent Hamiltonian, recording a
/// sample at every integration step.
pub fn propagate_full(
    modulation: &ModulationParams,
    decay: (f64, f64),
    psi0: &PureState,
    t_max: f64,
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    let labels = full_basis_labels(modulation.fock_cutoff);
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut p_nojump = Vec::new();
    integrate_full(modulation, decay, psi0, t_max, dt, |t, psi| {
        times.push(t);
        let (state, norm) = PureState::from_unnormalized(psi.to_vec(), labels.clone())
            .expect("propagated state has positive norm");
        states.push(state);
        p_nojump.push(norm * norm);
    })?;
    Ok(Trajectory { times, states, p_nojump })
}

/// Result of a (mu, nu) sideband scan: excited-state populations after a
/// fixed modulation duration, row-major with mu as the row axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SidebandScan {
    pub mu_values: Vec<f64>,
    pub nu_values: Vec<f64>,
    /// p_e[i * nu_values.len() + j] for (mu_values[i], nu_values[j]).
    pub p_e: Vec<f64>,
}

impl SidebandScan {
    pub fn get(&self, mu_index: usize, nu_index: usize) -> f64 {
        self.p_e[mu_index * self.nu_values.len() + nu_index]
    }
}

/// Scan the drive grid, propagating |e,0> for `duration` at each point and
/// recording the surviving (norm-weighted) qubit excited-state population.
///
/// Grid points run in parallel; the output layout is deterministic.
pub fn sideband_scan(
    g_r: f64,
    delta_r: f64,
    mu_values: &[f64],
    nu_values: &[f64],
    decay: (f64, f64),
    duration: f64,
    fock_cutoff: u32,
) -> Result<SidebandScan, DynamicsError> {
    if mu_values.is_empty() || nu_values.is_empty() {
        return Err(DynamicsError::InvalidInput("empty scan grid".into()));
    }
    let points: Vec<(usize, usize)> = (0..mu_values.len())
        .flat_map(|i| (0..nu_values.len()).map(move |j| (i, j)))
        .collect();
    let p_e: Result<Vec<f64>, DynamicsError> = points
        .par_iter()
        .map(|&(i, j)| {
            let modulation = ModulationParams::from_mu(
                g_r,
                delta_r,
                mu_values[i],
                nu_values[j],
                SidebandOrder::First,
                fock_cutoff,
            )?;
            let psi0 = excited_vacuum(fock_cutoff);
            let psi = integrate_full(
                &modulation,
                decay,
                &psi0,
                duration,
                modulation.default_dt(),
                |_, _| {},
            )?;
            let levels = fock_cutoff as usize + 1;
            Ok(psi[levels..].iter().map(|c| c.norm_sqr()).sum())
        })
        .collect();
    Ok(SidebandScan { mu_values: mu_values.to_vec(), nu_values: nu_values.to_vec(), p_e: p_e? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::no_jump_concurrence;
    use approx::assert_relative_eq;

    #[test]
    fn effective_coupling_examples() {
        let m = ModulationParams::from_mu(1.0, 4.0, 0.0, 4.0, SidebandOrder::First, 3).unwrap();
        assert_eq!(effective_coupling(&m).unwrap(), 0.0);
        let m = ModulationParams::from_mu(1.0, 4.0, 1.0, 4.0, SidebandOrder::First, 3).unwrap();
        assert_relative_eq!(effective_coupling(&m).unwrap(), 0.4400505857449335, epsilon = 1e-12);
        // Omega = J_2(1) * 2pi*0.041 = 0.029600 rad/ns
        let g_r = std::f64::consts::TAU * 0.041;
        let m = ModulationParams::from_mu(g_r, 4.0, 1.0, 2.0, SidebandOrder::Second, 3).unwrap();
        assert_relative_eq!(effective_coupling(&m).unwrap(), 0.02960035542, epsilon = 1e-9);
        // off resonance rejected
        let m = ModulationParams::from_mu(1.0, 4.0, 1.0, 3.9, SidebandOrder::First, 3).unwrap();
        assert!(matches!(effective_coupling(&m), Err(DynamicsError::OffResonant { .. })));
    }

    #[test]
    fn bessel_inversion_round_trip() {
        for (order, target) in [
            (SidebandOrder::First, 0.024),
            (SidebandOrder::First, 0.43),
            (SidebandOrder::Second, 0.01),
            (SidebandOrder::Second, 0.3),
        ] {
            let mu = invert_bessel_j(order, target).unwrap();
            assert_relative_eq!(bessel_j(order.index(), mu).unwrap(), target, epsilon = 1e-10);
        }
        assert!(invert_bessel_j(SidebandOrder::First, 0.6).is_err());
    }

    #[test]
    fn effective_trajectory_reference_cases() {
        // no decay: unit norm everywhere
        let p = NhParams::new(1.0, 0.0, 0.0, 1).unwrap();
        let traj = propagate_effective(&p, 10.0, 0.25).unwrap();
        assert_eq!(traj.times.len(), 41);
        assert!(traj.p_nojump.iter().all(|&p| (p - 1.0).abs() < 1e-12));

        // bare qubit decay: p(t) = exp(-kappa_q t)
        let p = NhParams::new(0.0, 1.0, 0.0, 1).unwrap();
        let traj = propagate_effective(&p, 5.0, 0.5).unwrap();
        for (t, p_nj) in traj.times.iter().zip(&traj.p_nojump) {
            assert_relative_eq!(*p_nj, (-t).exp(), epsilon = 1e-12);
        }

        // matches the closed-form trajectory ops at every grid point
        let p = NhParams::new(1.25, 0.0, 1.0, 1).unwrap();
        let traj = propagate_effective(&p, 6.0, 0.1).unwrap();
        for (i, &t) in traj.times.iter().enumerate() {
            let (p_nj, _) = no_jump_probability(&p, t).unwrap();
            assert_relative_eq!(traj.p_nojump[i], p_nj, epsilon = 1e-12);
            let s = no_jump_state(&p, t).unwrap();
            let overlap = traj.states[i].inner(&s).norm_sqr();
            assert!(1.0 - overlap < 1e-12);
        }
    }

    #[test]
    fn norm_monotonicity() {
        let p = NhParams::new(0.8, 0.3, 0.6, 1).unwrap();
        let traj = propagate_effective(&p, 20.0, 0.05).unwrap();
        for w in traj.p_nojump.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn full_propagation_bare_decay() {
        // g_r = 0: |e,0> decays at kappa_q, nothing else moves
        let m = ModulationParams::from_mu(0.0, 4.0, 0.5, 4.0, SidebandOrder::First, 3).unwrap();
        let traj =
            propagate_full(&m, (0.04, 0.005), &excited_vacuum(3), 50.0, m.default_dt()).unwrap();
        for (t, p) in traj.times.iter().zip(&traj.p_nojump) {
            assert_relative_eq!(*p, (-0.04 * t).exp(), epsilon = 1e-9);
        }
        let last = traj.states.last().unwrap();
        assert_relative_eq!(conditional_e0_population(last, 3), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn full_propagation_rejects_large_step() {
        let m = ModulationParams::from_mu(0.1, 4.0, 0.5, 4.0, SidebandOrder::First, 3).unwrap();
        let r = propagate_full(&m, (0.0, 0.0), &excited_vacuum(3), 10.0, m.max_dt() * 1.5);
        assert!(matches!(r, Err(DynamicsError::StepTooLarge { .. })));
    }

    #[test]
    fn excitation_conservation() {
        let m = ModulationParams::from_mu(0.08, 4.2, 0.3, 4.2, SidebandOrder::First, 3).unwrap();
        let traj =
            propagate_full(&m, (0.0, 0.005), &excited_vacuum(3), 200.0, m.default_dt()).unwrap();
        let (i_e0, i_g1) = (full_basis_index(3, true, 0), full_basis_index(3, false, 1));
        for state in &traj.states {
            for (idx, amp) in state.amplitudes().iter().enumerate() {
                if idx != i_e0 && idx != i_g1 {
                    assert!(amp.norm_sqr() < 1e-10, "population outside the sector at {idx}");
                }
            }
        }
    }

    #[test]
    fn full_matches_effective_at_first_order_resonance() {
        // weak drive: the n != 1 sideband terms (fast wiggle ~ J0 g_r / nu,
        // level shift ~ (J0 g_r)^2 / Delta_r) stay small against Omega
        let nu = std::f64::consts::TAU * 0.67;
        let g_r = std::f64::consts::TAU * 2.5e-3;
        let kappa_f = 0.005;
        let omega_target = 5.0 * kappa_f / 4.0; // eta = 5
        let mu = invert_bessel_j(SidebandOrder::First, omega_target / g_r).unwrap();
        let m = ModulationParams::from_mu(g_r, nu, mu, nu, SidebandOrder::First, 3).unwrap();
        let omega = effective_coupling(&m).unwrap();
        let eff = NhParams::new(omega, 0.0, kappa_f, 1).unwrap();
        let period = std::f64::consts::TAU / eff.gap().re;
        let t_max = 3.0 * period;
        let traj = propagate_full(&m, (0.0, kappa_f), &excited_vacuum(3), t_max, m.default_dt())
            .unwrap();
        let mut worst = 0.0f64;
        for (i, &t) in traj.times.iter().enumerate() {
            let full = conditional_e0_population(&traj.states[i], 3);
            let (_, effective) = no_jump_probability(&eff, t).unwrap();
            worst = worst.max((full - effective).abs());
        }
        assert!(worst <= 0.05, "max population deviation {worst}");
    }

    #[test]
    fn rk4_convergence_order() {
        let m = ModulationParams::from_mu(0.3, 4.0, 0.8, 4.0, SidebandOrder::First, 3).unwrap();
        let psi0 = excited_vacuum(3);
        // t_max an exact multiple of every step so all runs share the endpoint
        let base_dt = m.max_dt();
        let t_max = 100.0 * base_dt;
        let reference = integrate_full(&m, (0.02, 0.01), &psi0, t_max, base_dt / 16.0, |_, _| {})
            .unwrap();
        let mut errors = Vec::new();
        for divisor in [1.0, 2.0, 4.0] {
            let psi =
                integrate_full(&m, (0.02, 0.01), &psi0, t_max, base_dt / divisor, |_, _| {})
                    .unwrap();
            let err: f64 = psi
                .iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            errors.push(err);
        }
        let order_12 = (errors[0] / errors[1]).log2();
        let order_24 = (errors[1] / errors[2]).log2();
        assert!(order_12 >= 3.7, "empirical order {order_12}");
        assert!(order_24 >= 3.7, "empirical order {order_24}");
    }

    #[test]
    fn sideband_scan_shows_resonance_dip() {
        let delta_r = 4.2;
        let g_r = 0.03 * delta_r;
        let kappa_q = 7e-5;
        let scan = sideband_scan(
            g_r,
            delta_r,
            &[0.6],
            &[delta_r - 0.4, delta_r, delta_r + 0.4],
            (kappa_q, 0.005),
            450.0,
            3,
        )
        .unwrap();
        let on = scan.get(0, 1);
        let off_lo = scan.get(0, 0);
        let off_hi = scan.get(0, 2);
        assert!(on < off_lo - 0.2, "resonant transfer missing: {on} vs {off_lo}");
        assert!(on < off_hi - 0.2);
        // far off resonance the population just rides the qubit decay
        let baseline = (-kappa_q * 450.0f64).exp();
        assert!((off_lo - baseline).abs() < 0.05, "baseline {off_lo} vs {baseline}");
        assert!(matches!(
            sideband_scan(g_r, delta_r, &[], &[1.0], (0.0, 0.0), 10.0, 3),
            Err(DynamicsError::InvalidInput(_))
        ));
    }

    #[test]
    fn full_concurrence_tracks_effective_above_ep() {
        // median residual: concurrence sensitivity diverges at the swap
        // nodes, so isolated spikes there are expected and excluded
        let nu = std::f64::consts::TAU * 0.67;
        let g_r = std::f64::consts::TAU * 2.5e-3;
        let kappa_f = 0.005;
        let mu = invert_bessel_j(SidebandOrder::First, 5.0 * kappa_f / 4.0 / g_r).unwrap();
        let m = ModulationParams::from_mu(g_r, nu, mu, nu, SidebandOrder::First, 3).unwrap();
        let omega = effective_coupling(&m).unwrap();
        let eff = NhParams::new(omega, 0.0, kappa_f, 1).unwrap();
        let t_max = 2.0 * std::f64::consts::TAU / eff.gap().re;
        let traj = propagate_full(&m, (0.0, kappa_f), &excited_vacuum(3), t_max, m.default_dt())
            .unwrap();
        let mut dev: Vec<f64> = traj
            .times
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let c_full = single_excitation_concurrence(&traj.states[i], 3);
                let c_eff = no_jump_concurrence(&eff, t).unwrap();
                (c_full - c_eff).abs()
            })
            .collect();
        dev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = dev[dev.len() / 2];
        let max = dev[dev.len() - 1];
        assert!(median < 0.02, "median concurrence residual {median}");
        assert!(max < 0.2, "max concurrence residual {max}");
    }
}
