//! Unitary approximation.
//!
//! The forward amplitude keeps the full complex damping of the chord:
//!
//! ```text
//! f(k, 0) = (-k_c + ik) int_0^inf rho [1 - e^{-W(rho)/(k_c - ik)}] d rho
//! ```
//!
//! with `W` the reduced chord integral. Splitting `W/(k_c - ik) =
//! alpha + i beta`, `alpha = W k_c/(k_c^2+k^2)`, `beta = W k/(k_c^2+k^2)`,
//! its imaginary part is
//!
//! ```text
//! Im f(k,0) = int rho { k [1 - e^{-alpha} cos beta] - k_c e^{-alpha} sin beta } d rho,
//! ```
//!
//! nonnegative for every repulsive chord. The scale `k_c` is fixed by
//! imposing the optical theorem at threshold: with `A(k_c) = f(0,0)` and
//! `I(k_c) = lim Im f/k`, the closure `4 pi A^2 = 4 pi I` is solved for
//! `k_c` ([`solve_unitary`]); the cross section is then `4 pi Im f(k,0)/k`
//! with the `k -> 0` limit `4 pi A^2` taken analytically.

use num_complex::Complex64;
use thiserror::Error;

use crate::eikonal::Amplitude;
use crate::numerics::{self, NumericsError, QuadConfig, RootConfig};
use crate::potentials::{Potential, PotentialError};
use crate::qma;
use crate::specfun::SpecFunError;

const KC_LO: f64 = 1e-3;
const KC_HI: f64 = 1e3;

/// Solved closure scale with both sides of its defining equation.
///
/// `a` is the threshold amplitude A(k_c), negative for a repulsive
/// potential; the positive-convention scattering length is `-a`
/// ([`UnitarySolution::reported_length`]). `i0` is the threshold value of
/// `Im f/k`, and `residual = 4 pi (a^2 - i0)` at the solved `k_c`.
#[derive(Debug, Clone)]
pub struct UnitarySolution {
    pub k_c: f64,
    pub a: f64,
    pub i0: f64,
    pub residual: f64,
    /// Every root found in the scanned window, ascending; the smallest
    /// (continuous with the weak-coupling branch) is the one adopted.
    pub candidates: Vec<f64>,
}

impl UnitarySolution {
    /// Scattering length in the positive-a convention.
    pub fn reported_length(&self) -> f64 {
        -self.a
    }
}

#[derive(Debug, Error)]
pub enum UnitaryError {
    #[error("{what} = {value} is outside the valid domain")]
    Domain { what: &'static str, value: f64 },
    #[error("the closure equation is undefined at zero coupling")]
    DegenerateClosure,
    #[error(
        "no closure root in [{lo}, {hi}]; smallest |residual| {closest:.3e} at k_c = {at:.3e}"
    )]
    NoRoot {
        lo: f64,
        hi: f64,
        at: f64,
        closest: f64,
    },
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

fn check_kc(k_c: f64) -> Result<(), UnitaryError> {
    if !(k_c > 0.0) || !k_c.is_finite() {
        return Err(UnitaryError::Domain { what: "k_c", value: k_c });
    }
    Ok(())
}

/// Threshold amplitude `A(k_c) = -k_c int rho [1 - e^{-W/k_c}] d rho`.
pub fn unitary_scattering_length(pot: &Potential, k_c: f64) -> Result<f64, UnitaryError> {
    check_kc(k_c)?;
    if pot.coupling() == 0.0 {
        return Ok(0.0);
    }
    Ok(-k_c * qma::damped_chord_moment(pot, k_c)?)
}

/// Threshold imaginary slope `I(k_c) = int rho [1 - e^{-x}(1+x)] d rho`,
/// `x = W(rho)/k_c`.
pub fn unitary_threshold_im(pot: &Potential, k_c: f64) -> Result<f64, UnitaryError> {
    check_kc(k_c)?;
    if pot.coupling() == 0.0 {
        return Ok(0.0);
    }
    let cfg = QuadConfig::with_rel_tol(1e-12);
    let integrand = |rho: f64| {
        if rho <= 0.0 {
            return 0.0;
        }
        let x = pot.reduced_chord(rho).expect("rho > 0") / k_c;
        // 1 - e^{-x}(1+x), evaluated as a series where the direct form
        // cancels.
        if x < 1e-4 {
            return rho * x * x * (0.5 - x / 3.0 + x * x / 8.0);
        }
        rho * (1.0 - (-x).exp() * (1.0 + x))
    };
    let q = match pot.support_radius() {
        Some(radius) => numerics::integrate(integrand, 0.0, radius, cfg)?,
        None => numerics::integrate_to_inf(integrand, 0.0, cfg)?,
    };
    Ok(q.value)
}

/// Closed square-barrier threshold amplitude
/// `A = -(k_c R^2/2)[1 - (2/D^2)(1 - (1+D)e^{-D})]`, `D = G R / k_c`.
pub fn square_unitary_length_closed(
    g: f64,
    radius: f64,
    k_c: f64,
) -> Result<f64, UnitaryError> {
    let pot = Potential::square_barrier(g, radius)?;
    let _ = pot;
    check_kc(k_c)?;
    if g == 0.0 {
        return Ok(0.0);
    }
    let d = g * radius / k_c;
    Ok(-(k_c * radius * radius / 2.0) * damped_disk_factor(d))
}

/// Closed square-barrier threshold slope
/// `I = R^2 [1/2 - 3/D^2 + e^{-D}(1 + 3/D + 3/D^2)]`, `D = G R / k_c`.
pub fn square_unitary_threshold_closed(
    g: f64,
    radius: f64,
    k_c: f64,
) -> Result<f64, UnitaryError> {
    let pot = Potential::square_barrier(g, radius)?;
    let _ = pot;
    check_kc(k_c)?;
    if g == 0.0 {
        return Ok(0.0);
    }
    let d = g * radius / k_c;
    if d < 0.5 {
        // sum_{m>=2} (-1)^m (m-1)/(m! (m+2)) D^m; the direct form loses
        // all digits to the 3/D^2 cancellation here.
        let mut sum = 0.0;
        let mut pow = d * d;
        let mut fact = 2.0;
        for m in 2..60_u32 {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let term = sign * (m as f64 - 1.0) / (fact * (m as f64 + 2.0)) * pow;
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
            pow *= d;
            fact *= m as f64 + 1.0;
        }
        return Ok(radius * radius * sum);
    }
    let inv = 1.0 / d;
    Ok(radius
        * radius
        * (0.5 - 3.0 * inv * inv + (-d).exp() * (1.0 + 3.0 * inv + 3.0 * inv * inv)))
}

/// `1 - (2/D^2)(1 - (1+D)e^{-D})`, series-summed below D = 0.5 where the
/// direct form cancels.
fn damped_disk_factor(d: f64) -> f64 {
    if d >= 0.5 {
        return 1.0 - (2.0 / (d * d)) * (1.0 - (1.0 + d) * (-d).exp());
    }
    // sum_{m>=3} (-1)^{m+1} 2(m-1)/m! D^{m-2} = 2D/3 - D^2/4 + ...
    let mut sum = 0.0;
    let mut pow = d;
    let mut fact = 6.0;
    for m in 3..60_u32 {
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * 2.0 * (m as f64 - 1.0) / fact * pow;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        pow *= d;
        fact *= m as f64 + 1.0;
    }
    sum
}

/// Forward amplitude `f(k,0) = (-k_c + ik) int rho [1 - e^{-W/(k_c-ik)}] d rho`.
pub fn unitary_forward_amplitude(
    pot: &Potential,
    k: f64,
    k_c: f64,
) -> Result<Amplitude, UnitaryError> {
    check_kc(k_c)?;
    if !(k >= 0.0) || !k.is_finite() {
        return Err(UnitaryError::Domain { what: "k", value: k });
    }
    if pot.coupling() == 0.0 {
        return Ok(Amplitude { re: 0.0, im: 0.0 });
    }
    if k == 0.0 {
        let a = unitary_scattering_length(pot, k_c)?;
        return Ok(Amplitude { re: a, im: 0.0 });
    }
    let denom = k_c * k_c + k * k;
    let cfg = QuadConfig::with_rel_tol(1e-11);
    let moment = |part: fn(Complex64) -> f64| {
        let integrand = move |rho: f64| {
            if rho <= 0.0 {
                return 0.0;
            }
            let w = pot.reduced_chord(rho).expect("rho > 0");
            let alpha = w * k_c / denom;
            let beta = w * k / denom;
            let one_minus = Complex64::new(
                1.0 - (-alpha).exp() * beta.cos(),
                (-alpha).exp() * beta.sin(),
            );
            rho * part(one_minus)
        };
        match pot.support_radius() {
            Some(radius) => numerics::integrate(integrand, 0.0, radius, cfg),
            None => numerics::integrate_to_inf(integrand, 0.0, cfg),
        }
    };
    let m_re = moment(|z| z.re)?.value;
    let m_im = moment(|z| z.im)?.value;
    let f = Complex64::new(-k_c, k) * Complex64::new(m_re, m_im);
    Ok(Amplitude { re: f.re, im: f.im })
}

/// `Im f(k,0) = int rho { k [1 - e^{-alpha} cos beta] - k_c e^{-alpha} sin beta } d rho`.
pub fn unitary_im_f(pot: &Potential, k: f64, k_c: f64) -> Result<f64, UnitaryError> {
    check_kc(k_c)?;
    if !(k > 0.0) || !k.is_finite() {
        return Err(UnitaryError::Domain { what: "k", value: k });
    }
    if pot.coupling() == 0.0 {
        return Ok(0.0);
    }
    let denom = k_c * k_c + k * k;
    let cfg = QuadConfig::with_rel_tol(1e-11);
    let integrand = |rho: f64| {
        if rho <= 0.0 {
            return 0.0;
        }
        let w = pot.reduced_chord(rho).expect("rho > 0");
        let alpha = w * k_c / denom;
        let beta = w * k / denom;
        let damp = (-alpha).exp();
        rho * (k * (1.0 - damp * beta.cos()) - k_c * damp * beta.sin())
    };
    let q = match pot.support_radius() {
        Some(radius) => numerics::integrate(integrand, 0.0, radius, cfg)?,
        None => numerics::integrate_to_inf(integrand, 0.0, cfg)?,
    };
    Ok(q.value)
}

/// Solves the threshold closure `4 pi A(k_c)^2 = 4 pi I(k_c)` for `k_c`.
///
/// The residual `A^2 - I` runs from negative (small `k_c`: `A -> 0` while
/// `I` stays finite) to positive (large `k_c`: `A -> -a_Born` while
/// `I -> 0`), so an ascending factor-2 scan over [1e-3, 1e3] brackets
/// every crossing; each is refined by Brent and the smallest root is
/// adopted for continuity with the weak-coupling branch.
pub fn solve_unitary(pot: &Potential) -> Result<UnitarySolution, UnitaryError> {
    if pot.coupling() == 0.0 {
        return Err(UnitaryError::DegenerateClosure);
    }
    let closure = |k_c: f64| -> Result<f64, UnitaryError> {
        let a = unitary_scattering_length(pot, k_c)?;
        let i0 = unitary_threshold_im(pot, k_c)?;
        Ok(a * a - i0)
    };
    let mut grid: Vec<f64> = Vec::new();
    let mut k_c = KC_LO;
    while k_c < KC_HI {
        grid.push(k_c);
        k_c *= 2.0;
    }
    grid.push(KC_HI);
    let mut candidates: Vec<f64> = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    let mut closest: Option<(f64, f64)> = None;
    for &k_c in &grid {
        let val = closure(k_c)?;
        if closest.is_none_or(|(_, c)| val.abs() < c.abs()) {
            closest = Some((k_c, val));
        }
        if let Some((lo, f_lo)) = prev {
            if val == 0.0 || (val > 0.0) != (f_lo > 0.0) {
                let mut pending: Option<UnitaryError> = None;
                let root = numerics::brent(
                    |x| match closure(x) {
                        Ok(v) => v,
                        Err(e) => {
                            pending = Some(e);
                            f64::NAN
                        }
                    },
                    lo,
                    k_c,
                    RootConfig::default(),
                );
                if let Some(e) = pending {
                    return Err(e);
                }
                candidates.push(root?.x);
            }
        }
        prev = Some((k_c, val));
    }
    let Some(&k_c) = candidates.first() else {
        let (at, closest) = closest.expect("grid is never empty");
        return Err(UnitaryError::NoRoot {
            lo: KC_LO,
            hi: KC_HI,
            at,
            closest,
        });
    };
    let a = unitary_scattering_length(pot, k_c)?;
    let i0 = unitary_threshold_im(pot, k_c)?;
    Ok(UnitarySolution {
        k_c,
        a,
        i0,
        residual: 4.0 * core::f64::consts::PI * (a * a - i0),
        candidates,
    })
}

/// Optical-theorem cross section `sigma(k) = 4 pi Im f(k,0)/k` at the
/// solved scale, with the threshold limit `4 pi A^2` taken analytically.
pub fn unitary_sigma(
    pot: &Potential,
    k: f64,
    solution: &UnitarySolution,
) -> Result<f64, UnitaryError> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(UnitaryError::Domain { what: "k", value: k });
    }
    if pot.coupling() == 0.0 {
        return Ok(0.0);
    }
    if k == 0.0 {
        return Ok(4.0 * core::f64::consts::PI * solution.a * solution.a);
    }
    Ok(4.0 * core::f64::consts::PI * unitary_im_f(pot, k, solution.k_c)? / k)
}
