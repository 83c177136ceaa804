//! Weak-coupling references: the Born scattering length, the first two
//! terms of the zero-energy phase function, and the Jensen lower bound.
//!
//! Everything here is built from the potential's radial moments. The first
//! phase function has the closed form
//! `Phi_1(r) = -2 [ interior(r)/r + tail(r) ]` (reduced moments), with the
//! analytic derivative `Phi_1'(y) = 2 interior(y) / y^2`; the second-order
//! function is a positive quadratic functional of that derivative. The
//! Jensen bound `2 int r^2 v e^{Phi_1} dr` never exceeds the Born length
//! and never goes negative, and for repulsive potentials it also bounds
//! the exact scattering length from below.

use thiserror::Error;

use crate::numerics::{self, NumericsError, QuadConfig};
use crate::potentials::{Potential, PotentialError};

#[derive(Debug, Error)]
pub enum PerturbationError {
    #[error("{what} = {value} is outside the valid domain")]
    Domain { what: &'static str, value: f64 },
    #[error("{what} diverges for the {family} potential")]
    Divergent {
        family: &'static str,
        what: &'static str,
    },
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// First zero-energy phase function
/// `Phi_1(r) = -2 [ interior(r)/r + tail(r) ]` (reduced moments).
///
/// Not defined for the singular core, whose interior moment diverges.
pub fn phi1_zero_k(pot: &Potential, r: f64) -> Result<f64, PerturbationError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(PerturbationError::Domain { what: "r", value: r });
    }
    let interior = map_singular(pot.reduced_interior(r), "first phase function")?;
    let tail = pot.reduced_tail(r)?;
    Ok(-2.0 * (interior / r + tail))
}

/// Analytic derivative of the first phase function.
fn phi1_derivative(pot: &Potential, y: f64) -> Result<f64, PerturbationError> {
    let interior = map_singular(pot.reduced_interior(y), "first phase function")?;
    Ok(2.0 * interior / (y * y))
}

/// Second zero-energy phase function
/// `Phi_2(r) = (1/r) int_0^r y^2 Phi_1'(y)^2 dy + int_r^inf y Phi_1'(y)^2 dy`.
///
/// Positive, and exactly quadratic in the coupling.
pub fn phi2_zero_k(pot: &Potential, r: f64) -> Result<f64, PerturbationError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(PerturbationError::Domain { what: "r", value: r });
    }
    // Probe the moment once so the singular family fails up front.
    let _ = map_singular(pot.reduced_interior(r), "second phase function")?;
    let cfg = QuadConfig::with_rel_tol(1e-11);
    let dphi = |y: f64| {
        phi1_derivative(pot, y).expect("family checked above")
    };
    let inner = numerics::integrate(|y| y * y * dphi(y).powi(2), 0.0, r, cfg)?;
    let outer = numerics::integrate_to_inf(|y| y * dphi(y).powi(2), r, cfg)?;
    Ok(inner.value / r + outer.value)
}

/// Born scattering length `a_B = 2 int r^2 v(r) dr` (reduced potential).
///
/// Square barrier: `G R^3 / 3`. Yukawa: `2G`. The singular core's integral
/// diverges at the origin.
pub fn born_length(pot: &Potential) -> Result<f64, PerturbationError> {
    match *pot {
        Potential::SquareBarrier { g, radius } => Ok(g * radius.powi(3) / 3.0),
        Potential::Yukawa { g } => Ok(2.0 * g),
        Potential::Singular { .. } => Err(PerturbationError::Divergent {
            family: "singular",
            what: "Born length",
        }),
    }
}

/// Jensen lower bound `2 int r^2 v(r) e^{Phi_1(r)} dr` on the scattering
/// length; it also bounds the Born length from below since `Phi_1 <= 0`.
pub fn jensen_length_bound(pot: &Potential) -> Result<f64, PerturbationError> {
    if pot.coupling() == 0.0 {
        return Ok(0.0);
    }
    let integrand = |r: f64| -> f64 {
        let v = pot.reduced(r).expect("positive radius");
        if v == 0.0 {
            return 0.0;
        }
        let phi = phi1_zero_k(pot, r).expect("family checked by caller");
        r * r * v * phi.exp()
    };
    // Probe Phi_1 once so the singular family errors before quadrature.
    let _ = phi1_zero_k(pot, 1.0)?;
    let cfg = QuadConfig::with_rel_tol(1e-11);
    let q = match pot.support_radius() {
        Some(radius) => numerics::integrate(integrand, 0.0, radius, cfg)?,
        None => numerics::integrate_to_inf(integrand, 0.0, cfg)?,
    };
    Ok(2.0 * q.value)
}

fn map_singular(
    moment: Result<f64, PotentialError>,
    what: &'static str,
) -> Result<f64, PerturbationError> {
    moment.map_err(|e| match e {
        PotentialError::SingularInteriorMoment => PerturbationError::Divergent {
            family: "singular",
            what,
        },
        other => PerturbationError::Potential(other),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn phi1_yukawa_closed_form() {
        // Phi_1(r) = -2G (1 - e^{-r}) / r.
        let pot = Potential::yukawa(1.0).unwrap();
        assert_relative_eq!(
            phi1_zero_k(&pot, 1.0).unwrap(),
            -1.2642411176571153,
            max_relative = 1e-12
        );
        for &r in &[0.3, 2.0, 7.5] {
            assert_relative_eq!(
                phi1_zero_k(&pot, r).unwrap(),
                -2.0 * (1.0 - (-r).exp()) / r,
                max_relative = 1e-12
            );
        }
        // r -> 0: Phi_1 -> -2G.
        assert_relative_eq!(phi1_zero_k(&pot, 1e-8).unwrap(), -2.0, max_relative = 1e-7);
    }

    #[test]
    fn phi1_square_piecewise_form() {
        let pot = Potential::square_barrier(3.0, 1.0).unwrap();
        let g = 3.0;
        // Inside: -(G/2)(R^2 - r^2/3); outside: -G R^3 / (3 r).
        for &r in &[0.2, 0.7, 1.0] {
            assert_relative_eq!(
                phi1_zero_k(&pot, r).unwrap(),
                -(g / 2.0) * (1.0 - r * r / 3.0),
                max_relative = 1e-12
            );
        }
        for &r in &[1.5, 4.0] {
            assert_relative_eq!(
                phi1_zero_k(&pot, r).unwrap(),
                -g / (3.0 * r),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn phi1_matches_its_defining_quadrature() {
        let cfg = QuadConfig::default();
        for pot in [
            Potential::square_barrier(2.0, 1.0).unwrap(),
            Potential::yukawa(1.5).unwrap(),
        ] {
            for &r in &[0.1, 1.0, 5.0] {
                let inner = numerics::integrate(
                    |y| y * y * pot.reduced(y).unwrap(),
                    0.0,
                    r,
                    cfg,
                )
                .unwrap();
                let outer = numerics::integrate_to_inf(
                    |y| y * pot.reduced(y).unwrap(),
                    r,
                    cfg,
                )
                .unwrap();
                let direct = -2.0 * (inner.value / r + outer.value);
                assert_relative_eq!(
                    phi1_zero_k(&pot, r).unwrap(),
                    direct,
                    max_relative = 1e-9,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn phi1_rejects_the_singular_family() {
        let pot = Potential::singular(1.0, 3).unwrap();
        assert!(matches!(
            phi1_zero_k(&pot, 1.0),
            Err(PerturbationError::Divergent { .. })
        ));
    }

    #[test]
    fn phi2_is_positive_and_quadratic_in_the_coupling() {
        let r = 1.3;
        let base = phi2_zero_k(&Potential::yukawa(1.0).unwrap(), r).unwrap();
        assert!(base > 0.0);
        let tripled = phi2_zero_k(&Potential::yukawa(3.0).unwrap(), r).unwrap();
        assert_relative_eq!(tripled, 9.0 * base, max_relative = 1e-9);
        let square = phi2_zero_k(&Potential::square_barrier(2.0, 1.0).unwrap(), 0.8).unwrap();
        assert!(square > 0.0);
    }

    #[test]
    fn phi2_yukawa_reference_value() {
        // Frozen from this quadrature at first computation.
        let pot = Potential::yukawa(1.0).unwrap();
        assert_relative_eq!(
            phi2_zero_k(&pot, 1.0).unwrap(),
            0.6819336947498367,
            max_relative = 1e-9
        );
    }

    #[test]
    fn born_length_closed_forms() {
        let square = Potential::square_barrier(1.0, 1.0).unwrap();
        assert_relative_eq!(born_length(&square).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        let square = Potential::square_barrier(5.0, 2.0).unwrap();
        assert_relative_eq!(born_length(&square).unwrap(), 5.0 * 8.0 / 3.0, max_relative = 1e-15);
        let yukawa = Potential::yukawa(3.5).unwrap();
        assert_relative_eq!(born_length(&yukawa).unwrap(), 7.0, max_relative = 1e-15);
        let singular = Potential::singular(1.0, 2).unwrap();
        assert!(matches!(
            born_length(&singular),
            Err(PerturbationError::Divergent { .. })
        ));
    }

    #[test]
    fn jensen_bound_sits_between_zero_and_born() {
        for &g in &[0.5, 2.0, 10.0] {
            for pot in [
                Potential::square_barrier(g, 1.0).unwrap(),
                Potential::yukawa(g).unwrap(),
            ] {
                let jensen = jensen_length_bound(&pot).unwrap();
                let born = born_length(&pot).unwrap();
                assert!(jensen > 0.0, "jensen({pot}) = {jensen}");
                assert!(jensen < born, "jensen({pot}) = {jensen} vs born {born}");
            }
        }
        assert_eq!(
            jensen_length_bound(&Potential::yukawa(0.0).unwrap()).unwrap(),
            0.0
        );
    }

    #[test]
    fn jensen_bound_stays_below_the_exact_length() {
        // Closed square-barrier length as the exact reference.
        for &g in &[1.0, 5.0, 10.0] {
            let pot = Potential::square_barrier(g, 1.0).unwrap();
            let jensen = jensen_length_bound(&pot).unwrap();
            let exact = crate::exact::square_scattering_length(g, 1.0).unwrap();
            assert!(jensen < exact, "jensen = {jensen} vs exact = {exact} at G={g}");
        }
    }

    #[test]
    fn jensen_bound_approaches_born_at_weak_coupling() {
        let pot = Potential::yukawa(1e-4).unwrap();
        let jensen = jensen_length_bound(&pot).unwrap();
        let born = born_length(&pot).unwrap();
        assert_relative_eq!(jensen, born, max_relative = 1e-3);
    }
}
