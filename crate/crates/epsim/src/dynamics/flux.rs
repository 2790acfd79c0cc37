//! Flux modulation of the qubit frequency and its harmonic content.
//!
//! An external flux `phi_bar + phi_tilde*cos(nu' t)` (in units of the flux
//! quantum) modulates the Josephson energy and hence the qubit transition
//! frequency. The harmonic decomposition of that frequency profile is what
//! feeds the sideband-coupling picture: parked at the sweet spot the
//! dominant harmonic sits at twice the flux modulation frequency.

use super::DynamicsError;

/// Flux-modulation description of the tunable qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxProfile {
    e_j_sum: f64,
    e_c: f64,
    phi_bar: f64,
    phi_tilde: f64,
    nu_prime: f64,
}

impl FluxProfile {
    /// Energies in rad/ns, fluxes in units of the flux quantum.
    ///
    /// Requires |phi_bar| + |phi_tilde| < 0.5 so the |cos| kink (vanishing
    /// Josephson energy) is never crossed.
    pub fn new(
        e_j_sum: f64,
        e_c: f64,
        phi_bar: f64,
        phi_tilde: f64,
        nu_prime: f64,
    ) -> Result<Self, DynamicsError> {
        if !(e_j_sum > 0.0 && e_c > 0.0) {
            return Err(DynamicsError::InvalidInput(
                "Josephson and charging energies must be positive".into(),
            ));
        }
        if !(nu_prime > 0.0) {
            return Err(DynamicsError::InvalidInput("nu_prime must be positive".into()));
        }
        if !(phi_bar.abs() + phi_tilde.abs() < 0.5) {
            return Err(DynamicsError::FluxTooLarge {
                reach: phi_bar.abs() + phi_tilde.abs(),
            });
        }
        Ok(Self { e_j_sum, e_c, phi_bar, phi_tilde, nu_prime })
    }

    pub fn e_j_sum(&self) -> f64 {
        self.e_j_sum
    }

    pub fn e_c(&self) -> f64 {
        self.e_c
    }

    pub fn phi_bar(&self) -> f64 {
        self.phi_bar
    }

    pub fn phi_tilde(&self) -> f64 {
        self.phi_tilde
    }

    pub fn nu_prime(&self) -> f64 {
        self.nu_prime
    }

    /// Instantaneous Josephson energy E_J(t) = E_JΣ |cos(pi * phi_ext(t))|.
    pub fn josephson_energy(&self, t: f64) -> f64 {
        let phi_ext = self.phi_bar + self.phi_tilde * (self.nu_prime * t).cos();
        self.e_j_sum * (std::f64::consts::PI * phi_ext).cos().abs()
    }

    /// Instantaneous qubit frequency sqrt(8 E_c E_J(t)) - E_c.
    pub fn qubit_frequency(&self, t: f64) -> f64 {
        (8.0 * self.e_c * self.josephson_energy(t)).sqrt() - self.e_c
    }
}

/// One harmonic of the modulated qubit frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    /// Harmonic index k (frequency = k * nu_prime).
    pub k: usize,
    /// Angular frequency in rad/ns.
    pub frequency: f64,
    /// Signed cosine coefficient epsilon_k in rad/ns (the drive phase is 0
    /// or pi; the profile is even in t).
    pub amplitude: f64,
}

/// Harmonic decomposition of the modulated qubit frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyProfile {
    /// omega_e(t) over one flux period.
    pub omega_samples: Vec<f64>,
    /// Time-averaged qubit frequency omega_0.
    pub omega_0: f64,
    /// Harmonics k = 1..samples/2.
    pub harmonics: Vec<Harmonic>,
}

impl FrequencyProfile {
    /// Harmonic with the largest |amplitude|.
    pub fn dominant_harmonic(&self) -> Option<&Harmonic> {
        self.harmonics
            .iter()
            .max_by(|a, b| a.amplitude.abs().partial_cmp(&b.amplitude.abs()).unwrap())
    }
}

/// Fourier analysis of omega_e(t) over one flux modulation period.
///
/// `samples` must be a power of two >= 64.
pub fn qubit_frequency_profile(
    flux: &FluxProfile,
    samples: usize,
) -> Result<FrequencyProfile, DynamicsError> {
    if samples < 64 || !samples.is_power_of_two() {
        return Err(DynamicsError::InvalidInput(format!(
            "samples must be a power of two >= 64 (got {samples})"
        )));
    }
    let period = std::f64::consts::TAU / flux.nu_prime();
    let mut omega_samples = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = period * i as f64 / samples as f64;
        if flux.josephson_energy(t) <= 0.0 {
            return Err(DynamicsError::FluxTooLarge {
                reach: flux.phi_bar().abs() + flux.phi_tilde().abs(),
            });
        }
        omega_samples.push(flux.qubit_frequency(t));
    }
    let omega_0 = omega_samples.iter().sum::<f64>() / samples as f64;
    let mut harmonics = Vec::with_capacity(samples / 2 - 1);
    for k in 1..samples / 2 {
        let mut coeff = 0.0;
        for (i, &w) in omega_samples.iter().enumerate() {
            let phase = std::f64::consts::TAU * (k * i) as f64 / samples as f64;
            coeff += (w - omega_0) * phase.cos();
        }
        harmonics.push(Harmonic {
            k,
            frequency: k as f64 * flux.nu_prime(),
            amplitude: 2.0 * coeff / samples as f64,
        });
    }
    Ok(FrequencyProfile { omega_samples, omega_0, harmonics })
}
