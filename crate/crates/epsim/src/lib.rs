//! Simulation and analysis of the exceptional-point entanglement transition
//! in a dissipative qubit-resonator system.
//!
//! The crate is organized around the no-jump (conditional) dynamics generated
//! by a non-Hermitian Hamiltonian on the single-excitation subspace:
//!
//! - [`model`] — closed-form eigensystem, no-jump trajectory state and
//!   entanglement of the qubit-resonator system, plus the two-qubit analog.
//! - [`entanglement`] — concurrence, negativity and partial transposes of
//!   4×4 density matrices.
//! - [`dynamics`] — numerical propagation under the effective and the full
//!   parametrically modulated Hamiltonian; flux-modulation sideband math.
//! - [`measurement`] — simulated state mapping, finite-shot two-qubit
//!   tomography, readout-confusion correction and single-excitation
//!   post-projection.
//! - [`spectro`] — derivative-free least-squares extraction of complex
//!   eigenenergies and eigenstates from density-matrix time series.
//!
//! All quantities use rad/ns for angular frequencies and 1/ns for decay
//! rates. The `epsim` binary exposes the library as reproducible batch
//! commands writing CSV (and optional SVG) artifacts.

pub mod dynamics;
pub mod entanglement;
pub mod linalg;
pub mod measurement;
pub mod model;
pub mod signal;
pub mod spectro;
