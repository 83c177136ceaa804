//! Quantum-mean approximation.
//!
//! The transverse spread of the quantum trajectory around the straight
//! classical path damps the Born integrand by the exponential of the tail
//! moment:
//!
//! ```text
//! a(b) = 2 int_0^inf r^2 v(r) e^{-(2/b) T(r)} dr,   T(r) = int_r^inf s v(s) ds
//! ```
//!
//! with `b ~ 1` the spread parameter and `v` the reduced potential. That
//! quadrature is the scheme's definition; the square-barrier and
//! singular-core closed forms are conveniences checked against it.
//!
//! At finite momentum the damping enters through a calibrated scale `k_c`
//! instead of `b`. The angular amplitude replaces the straight-line phase
//! `i H / k` by `H / (k_c - ik)`, and the damped cross section is the
//! chord form evaluated at the effective momentum `sqrt(k_c^2 + k^2)`:
//!
//! ```text
//! sigma(k, k_c) = 8 pi int_0^inf rho sin^2( W(rho) / (2 sqrt(k_c^2 + k^2)) ) d rho.
//! ```
//!
//! `k_c` is fixed by matching a zero-momentum observable to its spread-`b`
//! value: [`calibrate_kc_amplitude`] makes the damped forward amplitude
//! reproduce `a(b)`, and [`calibrate_kc_sigma`] makes `sigma(0, k_c)`
//! reproduce `4 pi a(b)^2`.

use core::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::eikonal::{self, Amplitude, EikonalError};
use crate::numerics::{self, NumericsError, QuadConfig, RootConfig};
use crate::potentials::{Potential, PotentialError};
use crate::specfun::{self, SpecFunError};

/// k_c search window for the calibrations.
const KC_LO: f64 = 1e-3;
const KC_HI: f64 = 1e3;

/// Smallest effective momentum `sqrt(k_c^2 + k^2)` the damped forms
/// resolve; below it the chord phase oscillates too rapidly.
const S_MIN: f64 = 1e-3;

/// Spread parameter and (once calibrated) momentum scale of the scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmaParams {
    pub b: f64,
    pub k_c: Option<f64>,
}

impl Default for QmaParams {
    fn default() -> Self {
        QmaParams { b: 1.0, k_c: None }
    }
}

impl QmaParams {
    pub fn new(b: f64) -> Result<Self, QmaError> {
        check_b(b)?;
        Ok(QmaParams { b, k_c: None })
    }

    pub fn with_kc(mut self, k_c: f64) -> Result<Self, QmaError> {
        if !(k_c > 0.0) || !k_c.is_finite() {
            return Err(QmaError::Domain { what: "k_c", value: k_c });
        }
        self.k_c = Some(k_c);
        Ok(self)
    }
}

/// Which zero-momentum observable fixed `k_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationVariant {
    Amplitude,
    CrossSection,
    Unitary,
}

impl fmt::Display for CalibrationVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CalibrationVariant::Amplitude => write!(f, "amplitude"),
            CalibrationVariant::CrossSection => write!(f, "cross-section"),
            CalibrationVariant::Unitary => write!(f, "unitary"),
        }
    }
}

/// Solved momentum scale with the residual of its defining equation.
#[derive(Debug, Clone, Copy)]
pub struct Calibration {
    pub k_c: f64,
    pub residual: f64,
    pub variant: CalibrationVariant,
}

#[derive(Debug, Error)]
pub enum QmaError {
    #[error("{what} = {value} is outside the valid domain")]
    Domain { what: &'static str, value: f64 },
    #[error("calibration is undefined at zero coupling")]
    DegenerateCalibration,
    #[error(
        "no k_c root in [{lo}, {hi}]; smallest |residual| {closest:.3e} at k_c = {at:.3e}"
    )]
    NoRoot {
        lo: f64,
        hi: f64,
        at: f64,
        closest: f64,
        /// The (k_c, residual) probes of the failed sign scan.
        scan: Vec<(f64, f64)>,
    },
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
    #[error(transparent)]
    Eikonal(#[from] EikonalError),
}

fn check_b(b: f64) -> Result<(), QmaError> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(QmaError::Domain { what: "b", value: b });
    }
    Ok(())
}

/// Scattering length `a(b) = 2 int_0^inf r^2 v(r) e^{-(2/b) T(r)} dr`.
///
/// This quadrature defines the scheme; [`square_qma_length_closed`] and
/// [`singular_qma_length`] are checked against it.
pub fn qma_scattering_length(pot: &Potential, b: f64) -> Result<f64, QmaError> {
    check_b(b)?;
    if pot.coupling() == 0.0 {
        return Ok(0.0);
    }
    let cfg = QuadConfig::with_rel_tol(1e-12);
    let integrand = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let tail = pot.reduced_tail(r).expect("r > 0");
        let damp = (-2.0 * tail / b).exp();
        if damp == 0.0 {
            // Deep inside a singular core the damping underflows before
            // the diverging v(r) overflows; the product is 0, not NaN.
            return 0.0;
        }
        2.0 * r * r * pot.reduced(r).expect("r > 0") * damp
    };
    let q = match pot.support_radius() {
        Some(radius) => numerics::integrate(integrand, 0.0, radius, cfg)?,
        None => numerics::integrate_to_inf(integrand, 0.0, cfg)?,
    };
    Ok(q.value)
}

/// Closed square-barrier length `a = b R [1 - D(sqrt c)/sqrt c]` with
/// `c = G R^2 / (2b)` and `D` the Dawson integral.
///
/// `D(x)/x = (1/2) sqrt(pi/c) e^{-c} Erfi(sqrt c)` in unscaled terms; the
/// Dawson form stays finite at large `c`. Saturates at `bR` as `G` grows.
pub fn square_qma_length_closed(g: f64, radius: f64, b: f64) -> Result<f64, QmaError> {
    check_b(b)?;
    let pot = Potential::square_barrier(g, radius)?;
    let _ = pot;
    if g == 0.0 {
        return Ok(0.0);
    }
    let c = g * radius * radius / (2.0 * b);
    let x = c.sqrt();
    Ok(b * radius * (1.0 - specfun::dawson(x)? / x))
}

/// Closed singular-core length `a = (G/(N-1))^nu b^{1-nu} Gamma(1-nu)`,
/// `nu = 1/(2(N-1))`.
pub fn singular_qma_length(g: f64, n: u32, b: f64) -> Result<f64, QmaError> {
    check_b(b)?;
    let pot = Potential::singular(g, n)?;
    let _ = pot;
    if g == 0.0 {
        return Ok(0.0);
    }
    let nm1 = (n - 1) as f64;
    let nu = 1.0 / (2.0 * nm1);
    Ok((g / nm1).powf(nu) * b.powf(1.0 - nu) * specfun::gamma(1.0 - nu)?)
}

/// Zero-momentum cross section `sigma(0) = 4 pi a(b)^2`.
pub fn qma_sigma_zero(pot: &Potential, b: f64) -> Result<f64, QmaError> {
    let a = qma_scattering_length(pot, b)?;
    Ok(4.0 * core::f64::consts::PI * a * a)
}

/// `M(k_c) = int_0^inf rho [1 - e^{-W(rho)/k_c}] d rho` over the reduced
/// chord `W`. `k_c M(k_c)` is the zero-momentum magnitude of the damped
/// angular amplitude; it grows monotonically from 0 toward the Born length
/// as `k_c -> inf`, which guarantees the amplitude calibration a bracket.
pub(crate) fn damped_chord_moment(pot: &Potential, k_c: f64) -> Result<f64, NumericsError> {
    let cfg = QuadConfig::with_rel_tol(1e-12);
    let integrand = |rho: f64| {
        if rho <= 0.0 {
            return 0.0;
        }
        let w = pot.reduced_chord(rho).expect("rho > 0");
        rho * (-(-w / k_c).exp_m1())
    };
    let q = match pot.support_radius() {
        Some(radius) => numerics::integrate(integrand, 0.0, radius, cfg)?,
        None => numerics::integrate_to_inf(integrand, 0.0, cfg)?,
    };
    Ok(q.value)
}

/// Damped angular amplitude
/// `f(k, theta) = -int rho J0(k rho sin theta) int dz v e^{2ikz sin^2(theta/2) - H/(k_c - ik)} d rho`
/// with `H(rho, z) = int_z^inf v ds`.
///
/// At `k = 0` the exponent is a real damping, so `f` is real and
/// theta-independent; at `k_c = 0` the integrand is exactly the all-angle
/// straight-line form. The singular core is rejected for the same reason
/// as in the straight-line scheme: the chord phase oscillates without
/// bound toward the axis.
pub fn qma_amplitude(
    pot: &Potential,
    k: f64,
    theta: f64,
    k_c: f64,
) -> Result<Amplitude, QmaError> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(QmaError::Domain { what: "k", value: k });
    }
    if !(0.0..=core::f64::consts::PI).contains(&theta) {
        return Err(QmaError::Domain { what: "theta", value: theta });
    }
    if !(k_c >= 0.0) || !k_c.is_finite() {
        return Err(QmaError::Domain { what: "k_c", value: k_c });
    }
    let s = k.hypot(k_c);
    if s < S_MIN {
        return Err(QmaError::Domain {
            what: "sqrt(k_c^2 + k^2)",
            value: s,
        });
    }
    if matches!(pot, Potential::Singular { .. }) {
        return Err(QmaError::Unsupported {
            family: "singular",
            what: "damped angular amplitude",
        });
    }
    if pot.coupling() == 0.0 {
        return Ok(Amplitude { re: 0.0, im: 0.0 });
    }
    let lambda = Complex64::new(k_c / (s * s), k / (s * s));
    let omega = k * theta.sin();
    // Oscillatory inner marches carry ~1e-8 noise; the k = 0 exponent is a
    // pure damping and supports a tighter outer request.
    let cfg = QuadConfig::with_rel_tol(if k == 0.0 { 1e-9 } else { 1e-7 });
    let re = numerics::integrate_j0_weighted(
        |rho| eikonal::longitudinal_integral(pot, k, theta, lambda, rho).re,
        omega,
        cfg,
    )?;
    let im = numerics::integrate_j0_weighted(
        |rho| eikonal::longitudinal_integral(pot, k, theta, lambda, rho).im,
        omega,
        cfg,
    )?;
    Ok(Amplitude {
        re: -re.value,
        im: -im.value,
    })
}

/// Damped cross section
/// `sigma(k, k_c) = 8 pi int rho sin^2( W(rho) / (2 sqrt(k_c^2 + k^2)) ) d rho`.
///
/// The momenta enter only through `s = sqrt(k_c^2 + k^2)`, so the singular
/// family dispatches to its straight-line closed form at `s`.
pub fn qma_sigma(pot: &Potential, k: f64, k_c: f64) -> Result<f64, QmaError> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(QmaError::Domain { what: "k", value: k });
    }
    if !(k_c >= 0.0) || !k_c.is_finite() {
        return Err(QmaError::Domain { what: "k_c", value: k_c });
    }
    let s = k.hypot(k_c);
    if s < S_MIN {
        return Err(QmaError::Domain {
            what: "sqrt(k_c^2 + k^2)",
            value: s,
        });
    }
    if let Potential::Singular { g, n } = *pot {
        return Ok(eikonal::singular_eikonal_sigma(g, n, s)?);
    }
    if pot.coupling() == 0.0 {
        return Ok(0.0);
    }
    let cfg = QuadConfig::with_rel_tol(1e-10);
    let integrand = |rho: f64| {
        if rho <= 0.0 {
            return 0.0;
        }
        let half = pot.reduced_chord(rho).expect("rho > 0") / (2.0 * s);
        rho * half.sin().powi(2)
    };
    let q = match pot.support_radius() {
        Some(radius) => numerics::integrate(integrand, 0.0, radius, cfg)?,
        None => numerics::integrate_to_inf(integrand, 0.0, cfg)?,
    };
    Ok(8.0 * core::f64::consts::PI * q.value)
}

/// Closed square-barrier form of [`qma_sigma`]:
/// `sigma = (pi R^2 / B^2)[1 + 2B^2 - cos 2B - 2B sin 2B]`,
/// `B = G R / (2 sqrt(k_c^2 + k^2))`.
///
/// Valid at any positive effective momentum; small `B` switches to the
/// series `pi R^2 [2B^2 - (4/9) B^4 + (2/45) B^6]` where the direct
/// expression cancels.
pub fn square_qma_sigma_closed(
    g: f64,
    radius: f64,
    k: f64,
    k_c: f64,
) -> Result<f64, QmaError> {
    let pot = Potential::square_barrier(g, radius)?;
    let _ = pot;
    if !(k >= 0.0) || !k.is_finite() {
        return Err(QmaError::Domain { what: "k", value: k });
    }
    if !(k_c >= 0.0) || !k_c.is_finite() {
        return Err(QmaError::Domain { what: "k_c", value: k_c });
    }
    if g == 0.0 {
        return Ok(0.0);
    }
    let s = k.hypot(k_c);
    if s == 0.0 {
        return Err(QmaError::Domain {
            what: "sqrt(k_c^2 + k^2)",
            value: s,
        });
    }
    let area = core::f64::consts::PI * radius * radius;
    let b = g * radius / (2.0 * s);
    if b < 0.01 {
        let b2 = b * b;
        return Ok(area * b2 * (2.0 - 4.0 / 9.0 * b2 + 2.0 / 45.0 * b2 * b2));
    }
    let two_b = 2.0 * b;
    Ok(area / (b * b) * (1.0 + 2.0 * b * b - two_b.cos() - two_b * two_b.sin()))
}

/// Solves `a(b) = k_c M(k_c)`: the damped amplitude at zero momentum
/// reproduces the scattering length.
pub fn calibrate_kc_amplitude(pot: &Potential, b: f64) -> Result<Calibration, QmaError> {
    check_b(b)?;
    if pot.coupling() == 0.0 {
        return Err(QmaError::DegenerateCalibration);
    }
    let target = qma_scattering_length(pot, b)?;
    solve_kc(CalibrationVariant::Amplitude, |k_c| {
        Ok(k_c * damped_chord_moment(pot, k_c)? - target)
    })
}

/// Solves `4 pi a(b)^2 = sigma(0, k_c)`.
///
/// The square family scans its closed cross-section form, which stays
/// exact at small `k_c` where the quadrature oscillates; the equation can
/// genuinely lack a root there (strong coupling pushes the target above
/// the bounded damped cross section), reported as [`QmaError::NoRoot`].
pub fn calibrate_kc_sigma(pot: &Potential, b: f64) -> Result<Calibration, QmaError> {
    check_b(b)?;
    if pot.coupling() == 0.0 {
        return Err(QmaError::DegenerateCalibration);
    }
    let target = qma_sigma_zero(pot, b)?;
    match *pot {
        Potential::SquareBarrier { g, radius } => {
            solve_kc(CalibrationVariant::CrossSection, |k_c| {
                Ok(square_qma_sigma_closed(g, radius, 0.0, k_c)? - target)
            })
        }
        _ => solve_kc(CalibrationVariant::CrossSection, |k_c| {
            Ok(qma_sigma(pot, 0.0, k_c)? - target)
        }),
    }
}

/// Cross section by angular quadrature of the damped amplitude:
/// `sigma(k) = 2 pi int_0^pi sin(theta) |f(k, theta)|^2 d theta`.
pub fn qma_cross_section_from_amplitude(
    pot: &Potential,
    k: f64,
    k_c: f64,
) -> Result<f64, QmaError> {
    if matches!(pot, Potential::Singular { .. }) {
        return Err(QmaError::Unsupported {
            family: "singular",
            what: "damped angular amplitude",
        });
    }
    if pot.coupling() == 0.0 {
        return Ok(0.0);
    }
    let mut pending: Option<QmaError> = None;
    let cfg = QuadConfig::with_rel_tol(1e-6);
    let q = numerics::integrate(
        |theta| {
            if pending.is_some() {
                return 0.0;
            }
            match qma_amplitude(pot, k, theta, k_c) {
                Ok(f) => theta.sin() * (f.re * f.re + f.im * f.im),
                Err(e) => {
                    pending = Some(e);
                    f64::NAN
                }
            }
        },
        0.0,
        core::f64::consts::PI,
        cfg,
    );
    if let Some(e) = pending {
        return Err(e);
    }
    Ok(2.0 * core::f64::consts::PI * q?.value)
}

/// Descending geometric scan over [KC_LO, KC_HI] for the outermost sign
/// change of `f`, refined by Brent. The largest root is the stable branch:
/// past it the residual keeps one sign all the way out.
fn solve_kc(
    variant: CalibrationVariant,
    mut f: impl FnMut(f64) -> Result<f64, QmaError>,
) -> Result<Calibration, QmaError> {
    let mut grid: Vec<f64> = Vec::new();
    let mut k_c = KC_HI;
    while k_c > KC_LO {
        grid.push(k_c);
        k_c *= 0.5;
    }
    grid.push(KC_LO);
    let mut scan: Vec<(f64, f64)> = Vec::with_capacity(grid.len());
    let mut prev: Option<(f64, f64)> = None;
    for &k_c in &grid {
        let val = f(k_c)?;
        scan.push((k_c, val));
        if val == 0.0 {
            return Ok(Calibration { k_c, residual: 0.0, variant });
        }
        if let Some((hi, f_hi)) = prev {
            if (val > 0.0) != (f_hi > 0.0) {
                let mut pending: Option<QmaError> = None;
                let root = numerics::brent(
                    |x| match f(x) {
                        Ok(v) => v,
                        Err(e) => {
                            pending = Some(e);
                            f64::NAN
                        }
                    },
                    k_c,
                    hi,
                    RootConfig::default(),
                );
                if let Some(e) = pending {
                    return Err(e);
                }
                let root = root?;
                return Ok(Calibration {
                    k_c: root.x,
                    residual: root.f_x,
                    variant,
                });
            }
        }
        prev = Some((k_c, val));
    }
    let (at, closest) = scan
        .iter()
        .copied()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("scan is never empty");
    Err(QmaError::NoRoot {
        lo: KC_LO,
        hi: KC_HI,
        at,
        closest,
        scan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PI: f64 = core::f64::consts::PI;

    #[test]
    fn zero_coupling_degenerates_cleanly() {
        let pot = Potential::square_barrier(0.0, 1.0).unwrap();
        assert_eq!(qma_scattering_length(&pot, 1.0).unwrap(), 0.0);
        assert_eq!(square_qma_length_closed(0.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(qma_sigma_zero(&pot, 1.0).unwrap(), 0.0);
        assert_eq!(qma_sigma(&pot, 1.0, 1.0).unwrap(), 0.0);
        let f = qma_amplitude(&pot, 1.0, 0.3, 1.0).unwrap();
        assert_eq!((f.re, f.im), (0.0, 0.0));
        assert!(matches!(
            calibrate_kc_amplitude(&pot, 1.0),
            Err(QmaError::DegenerateCalibration)
        ));
        assert!(matches!(
            calibrate_kc_sigma(&pot, 1.0),
            Err(QmaError::DegenerateCalibration)
        ));
    }

    #[test]
    fn rejects_bad_parameters() {
        let pot = Potential::yukawa(1.0).unwrap();
        assert!(matches!(
            qma_scattering_length(&pot, 0.0),
            Err(QmaError::Domain { what: "b", .. })
        ));
        assert!(QmaParams::new(-1.0).is_err());
        assert!(QmaParams::new(1.0).unwrap().with_kc(0.0).is_err());
        assert!(qma_amplitude(&pot, 1.0, 3.5, 1.0).is_err());
        assert!(qma_sigma(&pot, 0.0, 1e-4).is_err());
    }

    #[test]
    fn square_closed_length_matches_the_defining_quadrature() {
        for &g in &[1.0, 5.0, 10.0] {
            for &b in &[0.8, 1.0] {
                let pot = Potential::square_barrier(g, 1.0).unwrap();
                let quad = qma_scattering_length(&pot, b).unwrap();
                let closed = square_qma_length_closed(g, 1.0, b).unwrap();
                assert_relative_eq!(closed, quad, max_relative = 1e-10);
            }
        }
        // Unit-coupling pin of the closed form.
        assert_relative_eq!(
            square_qma_length_closed(1.0, 1.0, 1.0).unwrap(),
            0.27522154099292367,
            max_relative = 1e-12
        );
    }

    #[test]
    fn square_length_saturates_at_b_times_radius() {
        let b = 0.9;
        let a = square_qma_length_closed(400.0, 1.0, b).unwrap();
        assert!(a < b);
        assert!(a > 0.99 * b);
    }

    #[test]
    fn yukawa_length_reduces_to_born_at_weak_coupling() {
        let g = 1e-5;
        let pot = Potential::yukawa(g).unwrap();
        let a = qma_scattering_length(&pot, 1.0).unwrap();
        assert_relative_eq!(a, 2.0 * g, max_relative = 1e-5);
    }

    #[test]
    fn yukawa_unit_coupling_length_pin() {
        let pot = Potential::yukawa(1.0).unwrap();
        assert_relative_eq!(
            qma_scattering_length(&pot, 1.0).unwrap(),
            1.3192633561695393,
            max_relative = 1e-10
        );
    }

    #[test]
    fn singular_closed_length_matches_the_defining_quadrature() {
        let pot = Potential::singular(2.0, 3).unwrap();
        let quad = qma_scattering_length(&pot, 1.0).unwrap();
        let closed = singular_qma_length(2.0, 3, 1.0).unwrap();
        assert_relative_eq!(closed, quad, max_relative = 1e-8);
        // (2/2)^{1/4} Gamma(3/4) at N = 3, G = 2, b = 1.
        assert_relative_eq!(closed, 1.2254167024651776, max_relative = 1e-12);
    }

    #[test]
    fn singular_profile_pin_and_large_order_limit() {
        // At G = N-1 the coupling factor drops out: a = Gamma(1 - 1/(2(N-1))).
        assert_relative_eq!(
            singular_qma_length(19.0, 20, 1.0).unwrap(),
            1.0158918494060355,
            max_relative = 1e-12
        );
        // Hard-sphere trend: at G = N-1 the length approaches b as the
        // core steepens.
        let b = 2.0;
        assert_relative_eq!(
            singular_qma_length(99.0, 100, b).unwrap(),
            b,
            max_relative = 1e-3
        );
        let gap_20 = (singular_qma_length(19.0, 20, 1.0).unwrap() - 1.0).abs();
        let gap_80 = (singular_qma_length(79.0, 80, 1.0).unwrap() - 1.0).abs();
        assert!(gap_80 < gap_20);
    }

    #[test]
    fn length_is_increasing_in_the_spread() {
        for pot in [
            Potential::square_barrier(5.0, 1.0).unwrap(),
            Potential::yukawa(3.0).unwrap(),
        ] {
            let mut last = 0.0;
            for &b in &[0.5, 0.8, 1.0, 1.5, 2.0] {
                let a = qma_scattering_length(&pot, b).unwrap();
                assert!(a > last, "a({b}) = {a} did not increase");
                last = a;
            }
        }
    }

    #[test]
    fn length_stays_below_the_born_value() {
        for &g in &[0.5, 2.0, 10.0] {
            for pot in [
                Potential::square_barrier(g, 1.0).unwrap(),
                Potential::yukawa(g).unwrap(),
            ] {
                let a = qma_scattering_length(&pot, 1.0).unwrap();
                let born = crate::perturbation::born_length(&pot).unwrap();
                assert!(a < born, "a = {a} vs born = {born} at G = {g}");
            }
        }
    }

    #[test]
    fn square_accuracy_envelope_against_the_exact_length() {
        for i in 0..10 {
            let g = 50.0_f64.powf(i as f64 / 9.0);
            let a = square_qma_length_closed(g, 1.0, 1.0).unwrap();
            let exact = crate::exact::square_scattering_length(g, 1.0).unwrap();
            let ratio = a / exact;
            assert!(
                (ratio - 1.0).abs() <= 0.35,
                "ratio {ratio} out of envelope at G = {g}"
            );
        }
    }

    #[test]
    fn damped_amplitude_is_real_and_isotropic_at_zero_momentum() {
        let pot = Potential::square_barrier(2.0, 1.0).unwrap();
        let forward = qma_amplitude(&pot, 0.0, 0.0, 1.0).unwrap();
        for &theta in &[0.7, 1.9, PI] {
            let f = qma_amplitude(&pot, 0.0, theta, 1.0).unwrap();
            assert_relative_eq!(f.re, forward.re, max_relative = 1e-9);
            assert!(f.im.abs() < 1e-14);
        }
    }

    #[test]
    fn damped_amplitude_matches_the_zero_momentum_closed_reduction() {
        // -f(0,0) = k_c int rho [1 - e^{-W/k_c}] d rho
        //         = (k_c R^2/2)[1 - (2/A^2)(1 - (1+A)e^{-A})], A = G R / k_c.
        let pot = Potential::square_barrier(2.0, 1.0).unwrap();
        let f = qma_amplitude(&pot, 0.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(-f.re, 0.35150146242745952, max_relative = 1e-8);
        assert!(f.im.abs() < 1e-14);
    }

    #[test]
    fn damped_amplitude_reduces_to_the_straight_line_form_without_damping() {
        let pot = Potential::yukawa(1.0).unwrap();
        let (k, theta) = (5.0, 0.4);
        let damped = qma_amplitude(&pot, k, theta, 0.0).unwrap();
        let straight = eikonal::eikonal_amplitude_all_angle(&pot, k, theta).unwrap();
        assert_relative_eq!(damped.re, straight.re, max_relative = 1e-12);
        assert_relative_eq!(damped.im, straight.im, max_relative = 1e-12);
    }

    #[test]
    fn damped_cross_section_closed_form_matches_quadrature() {
        for &(g, k, k_c) in &[(2.0, 1.0, 0.7), (5.0, 0.0, 1.3), (8.0, 2.0, 0.4)] {
            let pot = Potential::square_barrier(g, 1.0).unwrap();
            let quad = qma_sigma(&pot, k, k_c).unwrap();
            let closed = square_qma_sigma_closed(g, 1.0, k, k_c).unwrap();
            assert_relative_eq!(closed, quad, max_relative = 1e-8);
        }
        // Pin of the first case.
        assert_relative_eq!(
            square_qma_sigma_closed(2.0, 1.0, 1.0, 0.7).unwrap(),
            3.628613859782499,
            max_relative = 1e-12
        );
    }

    #[test]
    fn damped_cross_section_approaches_the_straight_line_limit() {
        let pot = Potential::yukawa(5.0).unwrap();
        let k_c = 1.0;
        let k = 20.0 * k_c;
        let damped = qma_sigma(&pot, k, k_c).unwrap();
        let straight = eikonal::eikonal_cross_section(&pot, k).unwrap();
        assert_relative_eq!(damped, straight, max_relative = 0.01);
    }

    #[test]
    fn damped_cross_section_of_the_singular_core_depends_on_s_only() {
        let pot = Potential::singular(1.0, 2).unwrap();
        let s = (0.8_f64 * 0.8 + 1.5 * 1.5).sqrt();
        let via_qma = qma_sigma(&pot, 1.5, 0.8).unwrap();
        let via_eik = eikonal::singular_eikonal_sigma(1.0, 2, s).unwrap();
        assert_relative_eq!(via_qma, via_eik, max_relative = 1e-14);
    }

    #[test]
    fn amplitude_calibration_reproduces_the_length() {
        for pot in [
            Potential::square_barrier(5.0, 1.0).unwrap(),
            Potential::yukawa(5.0).unwrap(),
        ] {
            let cal = calibrate_kc_amplitude(&pot, 1.0).unwrap();
            assert_eq!(cal.variant, CalibrationVariant::Amplitude);
            assert!(cal.k_c > KC_LO && cal.k_c < KC_HI);
            assert!(cal.residual.abs() <= 1e-10, "residual {}", cal.residual);
            let a = qma_scattering_length(&pot, 1.0).unwrap();
            let rhs = cal.k_c * damped_chord_moment(&pot, cal.k_c).unwrap();
            assert_relative_eq!(rhs, a, max_relative = 1e-9);
        }
    }

    #[test]
    fn amplitude_calibration_rhs_is_monotone() {
        let pot = Potential::yukawa(5.0).unwrap();
        let mut last = 0.0;
        for &k_c in &[0.1, 0.3, 1.0, 3.0, 10.0, 100.0] {
            let rhs = k_c * damped_chord_moment(&pot, k_c).unwrap();
            assert!(rhs > last);
            last = rhs;
        }
        // The k_c -> inf limit is the Born length.
        let born = crate::perturbation::born_length(&pot).unwrap();
        assert!(last < born);
        assert_relative_eq!(
            1e4 * damped_chord_moment(&pot, 1e4).unwrap(),
            born,
            max_relative = 1e-3
        );
    }

    #[test]
    fn sigma_calibration_reproduces_the_zero_momentum_cross_section() {
        for pot in [
            Potential::yukawa(5.0).unwrap(),
            Potential::square_barrier(2.0, 1.0).unwrap(),
        ] {
            let cal = calibrate_kc_sigma(&pot, 1.0).unwrap();
            assert_eq!(cal.variant, CalibrationVariant::CrossSection);
            assert!(cal.residual.abs() <= 1e-10, "residual {}", cal.residual);
            let target = qma_sigma_zero(&pot, 1.0).unwrap();
            let sigma = qma_sigma(&pot, 0.0, cal.k_c).unwrap();
            assert_relative_eq!(sigma, target, max_relative = 1e-7);
        }
    }

    #[test]
    fn sigma_calibration_has_no_root_at_strong_square_coupling() {
        // The target 4 pi a(b)^2 exceeds the bounded damped cross section.
        let pot = Potential::square_barrier(15.0, 1.0).unwrap();
        match calibrate_kc_sigma(&pot, 1.0) {
            Err(QmaError::NoRoot { scan, closest, .. }) => {
                assert!(!scan.is_empty());
                assert!(closest < 0.0, "residual never reaches zero from below");
            }
            other => panic!("expected NoRoot, got {other:?}"),
        }
    }

    #[test]
    fn angular_cross_section_collapses_to_the_forward_value_at_zero_momentum() {
        let pot = Potential::square_barrier(2.0, 1.0).unwrap();
        let f = qma_amplitude(&pot, 0.0, 0.0, 1.0).unwrap();
        let sigma = qma_cross_section_from_amplitude(&pot, 0.0, 1.0).unwrap();
        assert_relative_eq!(sigma, 4.0 * PI * f.re * f.re, max_relative = 1e-6);
    }

    #[test]
    fn angular_and_chord_cross_sections_agree_to_leading_accuracy() {
        // The two finite-momentum variants are different approximations;
        // their ratio at G = 5, k = 1 is pinned as a regression value.
        let pot = Potential::square_barrier(5.0, 1.0).unwrap();
        let cal = calibrate_kc_amplitude(&pot, 1.0).unwrap();
        let angular = qma_cross_section_from_amplitude(&pot, 1.0, cal.k_c).unwrap();
        let chord = qma_sigma(&pot, 1.0, cal.k_c).unwrap();
        let ratio = angular / chord;
        assert!((ratio - 1.0).abs() < 0.3, "ratio {ratio}");
        assert_relative_eq!(ratio, 0.8401033445029867, max_relative = 1e-6);
    }
}
