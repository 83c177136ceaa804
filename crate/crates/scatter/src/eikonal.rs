//! Straight-line (eikonal) amplitude and cross section.
//!
//! The phase along an impact-parameter chord is `chi(rho) = W(rho)/k` with
//! `W` the reduced chord integral, giving
//!
//! * amplitude: `f(k, theta) = i k int rho J0(k theta rho) [1 - e^{-i chi}] d rho`,
//! * cross section: `sigma = 8 pi int rho sin^2(chi/2) d rho`,
//! * forward imaginary part: `Im f(k,0) = k int rho [1 - cos chi] d rho`,
//!
//! mutually consistent with the optical theorem by construction. The
//! all-angle variant keeps the longitudinal phase structure instead of
//! collapsing the chord: `f = -int rho J0(k rho sin theta) int dz v
//! e^{2 i k z sin^2(theta/2) - i H(rho,z)/k}` with `H(rho, z) = int_z^inf v ds`.
//!
//! The scheme is a large-momentum approximation: every operation rejects
//! k below `EIKONAL_K_MIN`. For the singular core the chord phase blows up
//! at small impact parameter like `rho^{1-2N}`, so its cross section uses
//! the closed form (the defining integral is validated against it in
//! tests after the substitution t = chi(rho)); its angular amplitude is
//! not offered.

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{self, NumericsError, QuadConfig};
use crate::potentials::{Potential, PotentialError};
use crate::specfun::{self, SpecFunError};

/// Smallest momentum the straight-line scheme accepts.
pub const EIKONAL_K_MIN: f64 = 1e-3;

/// Scattering amplitude value f(k, theta) in length units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Error)]
pub enum EikonalError {
    #[error("{what} = {value} is outside the valid domain")]
    Domain { what: &'static str, value: f64 },
    #[error("{what} is not available for the {family} potential")]
    Unsupported {
        family: &'static str,
        what: &'static str,
    },
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

fn check_k(k: f64) -> Result<(), EikonalError> {
    if !(k >= EIKONAL_K_MIN) || !k.is_finite() {
        return Err(EikonalError::Domain { what: "k", value: k });
    }
    Ok(())
}

/// Straight-line amplitude
/// `f = i k int_0^inf rho J0(k theta rho) [1 - e^{-i W(rho)/k}] d rho`.
///
/// Not offered for the singular core (see module docs).
pub fn eikonal_amplitude(
    pot: &Potential,
    k: f64,
    theta: f64,
) -> Result<Amplitude, EikonalError> {
    check_k(k)?;
    if !(0.0..=core::f64::consts::PI).contains(&theta) {
        return Err(EikonalError::Domain { what: "theta", value: theta });
    }
    if matches!(pot, Potential::Singular { .. }) {
        return Err(EikonalError::Unsupported {
            family: "singular",
            what: "eikonal amplitude",
        });
    }
    if pot.coupling() == 0.0 {
        return Ok(Amplitude { re: 0.0, im: 0.0 });
    }
    let omega = k * theta;
    let cfg = QuadConfig::with_rel_tol(1e-9);
    // i k (1 - e^{-i chi}) = k [-sin chi + i (1 - cos chi)].
    let re = numerics::integrate_j0_weighted(
        |rho| {
            let chi = chord_phase(pot, rho, k);
            -k * rho * chi.sin()
        },
        omega,
        cfg,
    )?;
    let im = numerics::integrate_j0_weighted(
        |rho| {
            let chi = chord_phase(pot, rho, k);
            k * rho * (1.0 - chi.cos())
        },
        omega,
        cfg,
    )?;
    Ok(Amplitude {
        re: re.value,
        im: im.value,
    })
}

/// Straight-line cross section `sigma = 8 pi int rho sin^2(W/2k) d rho`.
///
/// The singular core dispatches to its closed form.
pub fn eikonal_cross_section(pot: &Potential, k: f64) -> Result<f64, EikonalError> {
    check_k(k)?;
    if let Potential::Singular { g, n } = *pot {
        return singular_eikonal_sigma(g, n, k);
    }
    if pot.coupling() == 0.0 {
        return Ok(0.0);
    }
    let cfg = QuadConfig::with_rel_tol(1e-10);
    let integrand = |rho: f64| {
        let half = 0.5 * chord_phase(pot, rho, k);
        rho * half.sin().powi(2)
    };
    let q = match pot.support_radius() {
        Some(radius) => numerics::integrate(integrand, 0.0, radius, cfg)?,
        None => numerics::integrate_to_inf(integrand, 0.0, cfg)?,
    };
    Ok(8.0 * core::f64::consts::PI * q.value)
}

/// Forward imaginary part `Im f(k,0) = k int rho [1 - cos(W/k)] d rho`.
pub fn eikonal_forward_im(pot: &Potential, k: f64) -> Result<f64, EikonalError> {
    check_k(k)?;
    if let Potential::Singular { g, n } = *pot {
        // The optical-theorem image of the closed-form cross section.
        return Ok(k * singular_eikonal_sigma(g, n, k)? / (4.0 * core::f64::consts::PI));
    }
    if pot.coupling() == 0.0 {
        return Ok(0.0);
    }
    let cfg = QuadConfig::with_rel_tol(1e-10);
    let integrand = |rho: f64| {
        let chi = chord_phase(pot, rho, k);
        rho * (1.0 - chi.cos())
    };
    let q = match pot.support_radius() {
        Some(radius) => numerics::integrate(integrand, 0.0, radius, cfg)?,
        None => numerics::integrate_to_inf(integrand, 0.0, cfg)?,
    };
    Ok(k * q.value)
}

/// Closed-form singular-core eikonal cross section
/// `sigma = 2 pi (2A)^s Gamma(1-s) cos(pi s / 2)` with `s = 2/(2N-1)` and
/// `2A = (G/k) sqrt(pi) Gamma(N - 1/2) / Gamma(N)`; depends on G and k
/// only through G/k.
pub fn singular_eikonal_sigma(g: f64, n: u32, k: f64) -> Result<f64, EikonalError> {
    let pot = Potential::singular(g, n)?;
    let _ = pot;
    check_k(k)?;
    if g == 0.0 {
        return Ok(0.0);
    }
    let s = 2.0 / (2.0 * n as f64 - 1.0);
    let two_a = (g / k) * crate::potentials::singular_chord_coefficient(n);
    let gamma = specfun::gamma(1.0 - s)?;
    Ok(2.0 * core::f64::consts::PI
        * two_a.powf(s)
        * gamma
        * (core::f64::consts::FRAC_PI_2 * s).cos())
}

/// All-angle amplitude with the longitudinal phase kept:
/// `f = -int rho J0(k rho sin theta) int dz v(sqrt(rho^2+z^2))
/// e^{2 i k z sin^2(theta/2) - i H(rho,z)/k} d rho`, `H(rho,z) = int_z^inf v ds`.
///
/// The inner integral runs on a fixed composite-Simpson grid sized for the
/// longitudinal frequency `2 k sin^2(theta/2)`; adequate for k up to ~20.
pub fn eikonal_amplitude_all_angle(
    pot: &Potential,
    k: f64,
    theta: f64,
) -> Result<Amplitude, EikonalError> {
    check_k(k)?;
    if !(0.0..=core::f64::consts::PI).contains(&theta) {
        return Err(EikonalError::Domain { what: "theta", value: theta });
    }
    if matches!(pot, Potential::Singular { .. }) {
        return Err(EikonalError::Unsupported {
            family: "singular",
            what: "all-angle eikonal amplitude",
        });
    }
    if pot.coupling() == 0.0 {
        return Ok(Amplitude { re: 0.0, im: 0.0 });
    }
    let omega = k * theta.sin();
    let lambda = Complex64::new(0.0, 1.0 / k);
    // The inner Simpson march carries ~1e-8 noise; a tighter outer request
    // would chase it without converging.
    let cfg = QuadConfig::with_rel_tol(1e-7);
    let re = numerics::integrate_j0_weighted(
        |rho| longitudinal_integral(pot, k, theta, lambda, rho).re,
        omega,
        cfg,
    )?;
    let im = numerics::integrate_j0_weighted(
        |rho| longitudinal_integral(pot, k, theta, lambda, rho).im,
        omega,
        cfg,
    )?;
    Ok(Amplitude {
        re: -re.value,
        im: -im.value,
    })
}

/// Reduced chord phase `chi(rho) = W(rho)/k`.
fn chord_phase(pot: &Potential, rho: f64, k: f64) -> f64 {
    pot.reduced_chord(rho).expect("quadrature nodes are interior") / k
}

/// Radius beyond which every supported potential is negligible (the
/// Yukawa tail is below 1e-13 of its scale there).
fn reach_of(pot: &Potential) -> f64 {
    pot.support_radius().unwrap_or(30.0)
}

/// Inner z-integral of the angular amplitude at one impact parameter:
/// `int dz v e^{i freq z - lambda H(rho, z)}` times rho, with `lambda` the
/// complex damping coefficient on the accumulated chord (i/k here; the
/// quantum-mean scheme passes 1/(k_c - ik)).
///
/// Compact families integrate in z directly. The Yukawa integrand peaks at
/// z = 0 with width ~rho, so it is marched in t with z = rho sinh t, where
/// the weight v(r) dz/dt = G e^{-rho cosh t} is smooth at every rho.
pub(crate) fn longitudinal_integral(
    pot: &Potential,
    k: f64,
    theta: f64,
    lambda: Complex64,
    rho: f64,
) -> Complex64 {
    let reach = reach_of(pot);
    if rho >= reach {
        return Complex64::ZERO;
    }
    let freq = 2.0 * k * (0.5 * theta).sin().powi(2);
    match pot.support_radius() {
        Some(edge) => {
            let z_max = (edge * edge - rho * rho).sqrt();
            // The end nodes sit exactly on the barrier edge; the cell lies
            // inside, so sample the interior limit there.
            let v_at = |z: f64| {
                let r = (rho * rho + z * z).sqrt();
                let r = if (r - edge).abs() < 1e-9 * edge.max(1.0) {
                    edge * (1.0 - 1e-9)
                } else {
                    r
                };
                pot.reduced(r).expect("r > 0")
            };
            let rate = freq + lambda.norm() * v_at(0.0);
            let cells = (2.0 * z_max / 0.02)
                .max(24.0 * rate * z_max / core::f64::consts::PI)
                .max(200.0)
                .ceil() as usize;
            rho * phase_march(z_max, cells, freq, lambda, |z| z, v_at)
        }
        None => {
            let t_max = (reach / rho).acosh();
            let w_at = |t: f64| {
                let r = rho * t.cosh();
                pot.reduced(r).expect("r > 0") * rho * t.cosh()
            };
            // Phase rates per unit t: freq z'(t) <= freq reach from the
            // momentum-transfer factor plus |lambda| w from the marched H.
            let rate = freq * reach + lambda.norm() * w_at(0.0);
            let cells = (2.0 * t_max / 0.01)
                .max(24.0 * rate * t_max / core::f64::consts::PI)
                .max(200.0)
                .ceil() as usize;
            rho * phase_march(t_max, cells, freq, lambda, |t| rho * t.sinh(), w_at)
        }
    }
}

/// Simpson march of int w(u) e^{i freq z(u) - lambda H(u)} du over
/// [-u_max, u_max] where H(u) = int_u^{u_max} w ds, accumulated right to
/// left on the same pass; midpoint H values reuse half-cell Simpson rules.
fn phase_march(
    u_max: f64,
    cells: usize,
    freq: f64,
    lambda: Complex64,
    z_of: impl Fn(f64) -> f64,
    w_of: impl Fn(f64) -> f64,
) -> Complex64 {
    let h = 2.0 * u_max / cells as f64;
    let phase_at = |u: f64, big_h: f64| {
        (Complex64::new(0.0, freq * z_of(u)) - lambda * big_h).exp()
    };
    let mut h_right = 0.0_f64;
    let mut total = Complex64::ZERO;
    for i in (0..cells).rev() {
        let u_lo = -u_max + i as f64 * h;
        let u_hi = u_lo + h;
        let u_mid = 0.5 * (u_lo + u_hi);
        let w_lo = w_of(u_lo);
        let w_mid = w_of(u_mid);
        let w_hi = w_of(u_hi);
        let w_q1 = w_of(u_lo + 0.25 * h);
        let w_q3 = w_of(u_lo + 0.75 * h);
        let h_mid = h_right + (h / 12.0) * (w_mid + 4.0 * w_q3 + w_hi);
        let h_lo = h_mid + (h / 12.0) * (w_lo + 4.0 * w_q1 + w_mid);
        let g_lo = w_lo * phase_at(u_lo, h_lo);
        let g_mid = w_mid * phase_at(u_mid, h_mid);
        let g_hi = w_hi * phase_at(u_hi, h_right);
        total += (g_lo + 4.0 * g_mid + g_hi) * (h / 6.0);
        h_right = h_lo;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PI: f64 = core::f64::consts::PI;

    #[test]
    fn rejects_small_momenta() {
        let pot = Potential::yukawa(1.0).unwrap();
        assert!(matches!(
            eikonal_cross_section(&pot, 1e-4),
            Err(EikonalError::Domain { .. })
        ));
        assert!(matches!(
            eikonal_amplitude(&pot, 0.0, 0.0),
            Err(EikonalError::Domain { .. })
        ));
    }

    #[test]
    fn free_potential_scatters_nothing() {
        let pot = Potential::yukawa(0.0).unwrap();
        assert_eq!(eikonal_cross_section(&pot, 1.0).unwrap(), 0.0);
        assert_eq!(eikonal_forward_im(&pot, 1.0).unwrap(), 0.0);
        let f = eikonal_amplitude(&pot, 1.0, 0.3).unwrap();
        assert_eq!((f.re, f.im), (0.0, 0.0));
    }

    #[test]
    fn yukawa_high_momentum_matches_the_born_cross_section() {
        // sigma k^2 -> 4 pi G^2, from int rho K0^2 d rho = 1/2.
        let k = 100.0;
        for &g in &[5.0, 10.0] {
            let pot = Potential::yukawa(g).unwrap();
            let sigma = eikonal_cross_section(&pot, k).unwrap();
            assert_relative_eq!(
                sigma * k * k,
                4.0 * PI * g * g,
                max_relative = 5e-2
            );
        }
    }

    #[test]
    fn optical_theorem_ties_sigma_to_the_forward_amplitude() {
        for &(g, k) in &[(5.0, 100.0), (10.0, 100.0), (2.0, 7.0)] {
            let pot = Potential::yukawa(g).unwrap();
            let sigma = eikonal_cross_section(&pot, k).unwrap();
            let im_f = eikonal_forward_im(&pot, k).unwrap();
            assert!(im_f > 0.0);
            assert_relative_eq!(sigma * k / (4.0 * PI * im_f), 1.0, max_relative = 1e-8);
        }
    }

    #[test]
    fn forward_amplitude_agrees_with_the_dedicated_forward_integral() {
        let pot = Potential::yukawa(1.0).unwrap();
        let f = eikonal_amplitude(&pot, 10.0, 0.0).unwrap();
        let im = eikonal_forward_im(&pot, 10.0).unwrap();
        assert!(f.im > 0.0);
        assert_relative_eq!(f.im, im, max_relative = 1e-7);
    }

    #[test]
    fn square_cross_section_respects_the_black_disk_bound() {
        for &g in &[1.0, 50.0] {
            let pot = Potential::square_barrier(g, 1.0).unwrap();
            let sigma = eikonal_cross_section(&pot, 1.0).unwrap();
            assert!(sigma > 0.0);
            assert!(sigma <= 4.0 * PI, "sigma = {sigma} exceeds 4 pi R^2");
        }
    }

    /// Defining integral of the singular cross section after t = chi(rho):
    /// `sigma = 4 pi s (2A)^s int_0^inf sin^2(t/2) t^{-1-s} dt`.
    fn singular_sigma_by_quadrature(g: f64, n: u32, k: f64) -> f64 {
        let s = 2.0 / (2.0 * n as f64 - 1.0);
        let two_a = (g / k) * crate::potentials::singular_chord_coefficient(n);
        let cfg = QuadConfig::with_rel_tol(1e-9);
        let t_split = 1e4;
        let head = numerics::integrate(
            |t| (0.5 * t).sin().powi(2) * t.powf(-1.0 - s),
            0.0,
            t_split,
            cfg,
        )
        .unwrap()
        .value;
        // Beyond the split, sin^2 averages to 1/2; the oscillatory
        // remainder is O(t^{-2-s}) and negligible at this split.
        let tail = 0.5 * t_split.powf(-s) / s;
        4.0 * PI * s * two_a.powf(s) * (head + tail)
    }

    #[test]
    fn singular_closed_form_matches_its_defining_integral() {
        for &n in &[2u32, 3, 5] {
            for &ratio in &[0.5, 1.0, 2.0] {
                let g = ratio;
                let k = 1.0;
                let closed = singular_eikonal_sigma(g, n, k).unwrap();
                let direct = singular_sigma_by_quadrature(g, n, k);
                assert_relative_eq!(closed, direct, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn singular_cross_section_saturates_at_high_order() {
        // N -> inf: the momentum dependence disappears and sigma -> 2 pi.
        let sigma = singular_eikonal_sigma(1.0, 40, 1.0).unwrap();
        assert_relative_eq!(sigma, 2.0 * PI, max_relative = 3e-2);
        // Scale invariance: sigma depends on G/k only.
        let a = singular_eikonal_sigma(3.0, 4, 1.5).unwrap();
        let b = singular_eikonal_sigma(6.0, 4, 3.0).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn singular_amplitude_is_refused() {
        let pot = Potential::singular(1.0, 3).unwrap();
        assert!(matches!(
            eikonal_amplitude(&pot, 5.0, 0.1),
            Err(EikonalError::Unsupported { .. })
        ));
        // But the cross section dispatches to the closed form.
        let sigma = eikonal_cross_section(&pot, 5.0).unwrap();
        assert_relative_eq!(
            sigma,
            singular_eikonal_sigma(1.0, 3, 5.0).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn all_angle_amplitude_reduces_to_the_chord_form_forward() {
        let pot = Potential::yukawa(1.0).unwrap();
        let all = eikonal_amplitude_all_angle(&pot, 5.0, 0.0).unwrap();
        let chord = eikonal_amplitude(&pot, 5.0, 0.0).unwrap();
        assert_relative_eq!(all.re, chord.re, max_relative = 1e-6, epsilon = 1e-9);
        assert_relative_eq!(all.im, chord.im, max_relative = 1e-6, epsilon = 1e-9);
    }

    #[test]
    fn all_angle_amplitude_square_forward_cross_check() {
        let pot = Potential::square_barrier(2.0, 1.0).unwrap();
        let all = eikonal_amplitude_all_angle(&pot, 3.0, 0.0).unwrap();
        let chord = eikonal_amplitude(&pot, 3.0, 0.0).unwrap();
        assert_relative_eq!(all.re, chord.re, max_relative = 1e-4, epsilon = 1e-7);
        assert_relative_eq!(all.im, chord.im, max_relative = 1e-4, epsilon = 1e-7);
    }

    #[test]
    fn all_angle_amplitude_is_finite_off_forward() {
        let pot = Potential::yukawa(2.0).unwrap();
        let f = eikonal_amplitude_all_angle(&pot, 5.0, 0.7).unwrap();
        assert!(f.re.is_finite() && f.im.is_finite());
        // Scattering off forward must be weaker than forward.
        let fwd = eikonal_amplitude_all_angle(&pot, 5.0, 0.0).unwrap();
        let norm = |a: &Amplitude| a.re * a.re + a.im * a.im;
        assert!(norm(&f) < norm(&fwd));
    }
}
