//! Elastic scattering observables for repulsive central potentials.
//!
//! The crate computes scattering lengths, forward amplitudes and total cross
//! sections for three potential families (square barrier, inverse-power
//! singular core, Yukawa) under four approximation schemes:
//!
//! * first-order perturbation theory with its Jensen lower bound,
//! * the eikonal (straight-line chord) approximation,
//! * a quantum-mean approximation with a calibrated wave-number parameter,
//! * a unitary approximation whose parameter is fixed by optical-theorem
//!   closure at threshold.
//!
//! Every scheme is validated against exact references: closed-form partial
//! waves for the square barrier, Numerov integration for the Yukawa
//! potential, a closed form for the singular potential, and a Brownian-path
//! Monte Carlo estimate of the underlying path average.
//!
//! Units: lengths are measured in the potential range (Yukawa screening
//! length, barrier radius), wave numbers in its inverse, and the coupling
//! `G` is dimensionless. See [`potentials`] for the family conventions.

pub mod eikonal;
pub mod exact;
pub mod figures;
pub mod numerics;
pub mod path_mc;
pub mod perturbation;
pub mod potentials;
pub mod qma;
pub mod specfun;
pub mod unitary;

pub use potentials::Potential;

#[cfg(doctest)]
mod book;
