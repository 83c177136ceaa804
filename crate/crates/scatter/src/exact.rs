//! Exact and converged reference values the approximation schemes are
//! judged against.
//!
//! Three independent references live here:
//!
//! * the square barrier's closed partial-wave solution (phase shifts from
//!   log-derivative matching, plus the closed scattering length),
//! * Numerov radial integration with Richardson extrapolation, used as the
//!   converged baseline for the Yukawa potential,
//! * the closed-form scattering length of the singular core.
//!
//! Sign convention: for a repulsive potential the s-wave phase shift is
//! negative near threshold and the reported scattering length is the
//! positive quantity `a = -lim_{k->0} delta_0(k)/k`; the forward amplitude
//! at threshold is `f(0,0) = -a`.

use thiserror::Error;

use crate::potentials::{Potential, PotentialError};
use crate::specfun;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("{what} = {value} is outside the valid domain")]
    Domain { what: &'static str, value: f64 },
    #[error("invalid radial grid: {reason}")]
    Grid { reason: String },
    #[error("{what} did not converge (last change {last_change:e})")]
    NonConvergent { what: &'static str, last_change: f64 },
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Phase shifts of one momentum, reported on the principal branch.
///
/// `converged` records whether the last computed phase dropped below the
/// cutoff used by the cross-section sum (observables depend on delta only
/// through `sin^2 delta` and `e^{i delta} sin delta`, both invariant under
/// branch shifts by pi).
#[derive(Debug, Clone)]
pub struct PhaseShiftTable {
    pub k: f64,
    pub entries: Vec<(u32, f64)>,
    pub l_max: u32,
    pub converged: bool,
}

/// Partial-wave cross section with the angular momenta actually summed.
#[derive(Debug, Clone, Copy)]
pub struct CrossSection {
    pub sigma: f64,
    pub l_max: u32,
    pub converged: bool,
}

/// Radial grid for the Numerov integrator.
///
/// `match_radius` must lie beyond the reach of the potential (the phase is
/// extracted from free solutions there); `r_max` bounds the second matching
/// point used to separate the two free solutions.
#[derive(Debug, Clone, Copy)]
pub struct RadialGrid {
    pub r_max: f64,
    pub h: f64,
    pub match_radius: f64,
}

impl RadialGrid {
    pub fn new(r_max: f64, h: f64, match_radius: f64) -> Result<Self, ExactError> {
        let grid = RadialGrid {
            r_max,
            h,
            match_radius,
        };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<(), ExactError> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(ExactError::Grid {
                reason: format!("step h = {} must be positive", self.h),
            });
        }
        if !(self.match_radius > 10.0 * self.h) {
            return Err(ExactError::Grid {
                reason: format!(
                    "match radius {} must exceed several steps h = {}",
                    self.match_radius, self.h
                ),
            });
        }
        if !(self.r_max > self.match_radius) {
            return Err(ExactError::Grid {
                reason: format!(
                    "r_max = {} must exceed the match radius {}",
                    self.r_max, self.match_radius
                ),
            });
        }
        Ok(())
    }

    /// Grid suited to the potential's range: the match radius sits where
    /// the Yukawa tail (or any coupling up to G ~ 10^3) is below 1e-14.
    pub fn default_for(pot: &Potential) -> Self {
        match pot.support_radius() {
            Some(radius) => RadialGrid {
                r_max: radius + 6.0,
                h: 0.01,
                match_radius: radius + 1.0,
            },
            None => RadialGrid {
                r_max: 40.0,
                h: 0.01,
                match_radius: 35.0,
            },
        }
    }
}

/// Closed-form square-barrier scattering length
/// `a = R (1 - tanh(sqrt(G) R) / (sqrt(G) R))`.
pub fn square_scattering_length(g: f64, radius: f64) -> Result<f64, ExactError> {
    let pot = Potential::square_barrier(g, radius)?;
    let _ = pot;
    if g == 0.0 {
        return Ok(0.0);
    }
    let x = g.sqrt() * radius;
    Ok(radius * (1.0 - x.tanh() / x))
}

/// Square-barrier phase shift from log-derivative matching at r = R.
///
/// Interior solution: `i_l(kappa r)` with `kappa = sqrt(G - k^2)` below the
/// barrier top, `j_l(kappabar r)` with `kappabar = sqrt(k^2 - G)` above it,
/// and the `r^l` limit exactly at `k^2 = G`. The principal arctan branch is
/// reported.
pub fn square_phase_shift(g: f64, radius: f64, k: f64, l: u32) -> Result<f64, ExactError> {
    let pot = Potential::square_barrier(g, radius)?;
    let _ = pot;
    if !(k > 0.0) || !k.is_finite() {
        return Err(ExactError::Domain { what: "k", value: k });
    }
    if g == 0.0 {
        return Ok(0.0);
    }
    // Interior radial log-derivative at R, kept as a ratio (num/den) so a
    // zero of the interior function cannot blow up the matching formula.
    let diff = g - k * k;
    let (d_num, d_den) = if diff.abs() < 1e-12 * g {
        (l as f64 / radius, 1.0)
    } else if diff > 0.0 {
        let kappa = diff.sqrt();
        let ld = specfun::modified_spherical_i_log_derivative(l, kappa * radius)
            .map_err(|_| ExactError::Domain { what: "kappa*R", value: kappa * radius })?;
        (kappa * ld, 1.0)
    } else {
        let kb = (-diff).sqrt();
        let b = specfun::spherical_bessel_pair(l, kb * radius)
            .map_err(|_| ExactError::Domain { what: "kappabar*R", value: kb * radius })?;
        (kb * b.jp, b.j)
    };
    let ext = specfun::spherical_bessel_pair(l, k * radius)
        .map_err(|_| ExactError::Domain { what: "k*R", value: k * radius })?;
    let num = k * ext.jp * d_den - d_num * ext.j;
    let den = k * ext.yp * d_den - d_num * ext.y;
    Ok((num / den).atan())
}

/// Default relative cutoff ending partial-wave sums for analytic phases.
pub const SQUARE_PHASE_CUTOFF: f64 = 1e-12;

/// Cutoff for Numerov phases: the extraction noise floor sits near 1e-11,
/// so a tighter flag would never be reached while the neglected tail
/// contributes below 1e-15 of the sum.
pub const NUMEROV_PHASE_CUTOFF: f64 = 1e-10;

/// Square-barrier phase shifts up to convergence of the cross-section sum.
pub fn square_phase_table(
    g: f64,
    radius: f64,
    k: f64,
    cutoff: f64,
) -> Result<PhaseShiftTable, ExactError> {
    phase_table(k, cutoff, k * radius, 1200, |l| square_phase_shift(g, radius, k, l))
}

/// Total cross section of the square barrier from the partial-wave sum
/// `sigma = (4 pi / k^2) sum (2l+1) sin^2 delta_l`.
pub fn square_cross_section(g: f64, radius: f64, k: f64) -> Result<CrossSection, ExactError> {
    let table = square_phase_table(g, radius, k, SQUARE_PHASE_CUTOFF)?;
    Ok(cross_section_from_table(&table))
}

/// Closed-form scattering length of the singular core `G / r^{2N}`:
/// `a = (G/(N-1))^{1/(2(N-1))} 2^{-1/(N-1)} Gamma(1-nu)/Gamma(1+nu)` with
/// `nu = 1/(2(N-1))`.
pub fn singular_exact_length(g: f64, n: u32) -> Result<f64, ExactError> {
    let pot = Potential::singular(g, n)?;
    let _ = pot;
    if g == 0.0 {
        return Ok(0.0);
    }
    let nm1 = (n - 1) as f64;
    let nu = 1.0 / (2.0 * nm1);
    let gamma_ratio = specfun::gamma(1.0 - nu).expect("nu < 1")
        / specfun::gamma(1.0 + nu).expect("argument > 1");
    Ok((g / nm1).powf(nu) * 2.0_f64.powf(-1.0 / nm1) * gamma_ratio)
}

/// Numerov phase shift for an arbitrary potential (the converged Yukawa
/// baseline; also usable as a cross-check on the square barrier).
///
/// Integrates `u'' = [l(l+1)/r^2 + 2 m V(r) - k^2] u` outward from
/// `u(h) ~ h^{l+1}`, extracts `tan delta` from two matching radii beyond
/// the potential, and Richardson-extrapolates the step size until two
/// successive extrapolations agree to 1e-8.
pub fn numerov_phase_shift(
    pot: &Potential,
    k: f64,
    l: u32,
    grid: &RadialGrid,
) -> Result<f64, ExactError> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(ExactError::Domain { what: "k", value: k });
    }
    if l > 1000 {
        return Err(ExactError::Domain { what: "l", value: l as f64 });
    }
    grid.validate()?;
    if pot.coupling() == 0.0 {
        return Ok(0.0);
    }
    // Fix the two matching radii once (multiples of the base step, so every
    // halved grid passes through them exactly). The separation aims at an
    // odd multiple of a quarter period, where the extraction is best
    // conditioned.
    let r1 = snap(grid.match_radius, grid.h);
    let span = grid.r_max - r1;
    let quarter = core::f64::consts::FRAC_PI_2 / k;
    let delta_r = if quarter <= span {
        let m = ((span / quarter - 1.0) / 2.0).floor().max(0.0);
        (2.0 * m + 1.0) * quarter
    } else {
        span
    };
    let r2 = snap(r1 + delta_r.max(4.0 * grid.h), grid.h);

    let phase_of = |h: f64| -> f64 {
        let (u1, u2) = numerov_two_point(pot, k, l, h, r1, r2);
        let b1 = specfun::spherical_bessel_pair(l, k * r1).expect("k r1 > 0");
        let b2 = specfun::spherical_bessel_pair(l, k * r2).expect("k r2 > 0");
        let s1 = k * r1 * b1.j;
        let c1 = k * r1 * b1.y;
        let s2 = k * r2 * b2.j;
        let c2 = k * r2 * b2.y;
        // u ~ A [s(r) cos(delta) - c(r) sin(delta)]
        ((u2 * s1 - u1 * s2) / (u2 * c1 - u1 * c2)).atan()
    };
    romberg_halving(grid.h, 1e-8, "numerov phase shift", phase_of)
}

/// Zero-energy Numerov scattering length `a = r - u/u'` read off the
/// linear asymptote through two radii beyond the potential.
pub fn numerov_scattering_length(pot: &Potential, grid: &RadialGrid) -> Result<f64, ExactError> {
    grid.validate()?;
    if pot.coupling() == 0.0 {
        return Ok(0.0);
    }
    let r1 = snap(grid.match_radius, grid.h);
    let length_of = |h: f64| -> f64 {
        // u(r) = c (r - a) outside the potential, so a = r - u/u'. The
        // derivative comes from a local five-point stencil: march roundoff
        // accumulated before the match radius rescales all five values
        // together and cancels in the ratio, unlike a far-point chord.
        let i1 = (r1 / h).round() as usize;
        let probes = [i1 - 2, i1 - 1, i1, i1 + 1, i1 + 2];
        let u = numerov_probe(pot, 0.0, 0, h, &probes);
        let du = (8.0 * (u[3] - u[1]) - (u[4] - u[0])) / (12.0 * h);
        r1 - u[2] / du
    };
    romberg_halving(grid.h, 1e-9, "numerov scattering length", length_of)
}

/// Numerov phase shifts up to convergence of the cross-section sum.
pub fn numerov_phase_table(
    pot: &Potential,
    k: f64,
    grid: &RadialGrid,
) -> Result<PhaseShiftTable, ExactError> {
    // The classical angular-momentum scale for a range-1 potential.
    phase_table(k, NUMEROV_PHASE_CUTOFF, k, 600, |l| {
        numerov_phase_shift(pot, k, l, grid)
    })
}

/// Partial-wave cross section with Numerov phases (Yukawa baseline).
pub fn yukawa_cross_section(
    pot: &Potential,
    k: f64,
    grid: &RadialGrid,
) -> Result<CrossSection, ExactError> {
    let table = numerov_phase_table(pot, k, grid)?;
    Ok(cross_section_from_table(&table))
}

/// Shared partial-wave driver: computes phases until `|delta|` falls below
/// `cutoff` beyond the classical region `l > l_scale + 2`.
fn phase_table(
    k: f64,
    cutoff: f64,
    l_scale: f64,
    l_cap: u32,
    mut phase: impl FnMut(u32) -> Result<f64, ExactError>,
) -> Result<PhaseShiftTable, ExactError> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(ExactError::Domain { what: "k", value: k });
    }
    let mut entries = Vec::new();
    let mut converged = false;
    let mut l = 0u32;
    loop {
        let d = phase(l)?;
        entries.push((l, d));
        if d.abs() < cutoff && (l as f64) > l_scale + 2.0 {
            converged = true;
            break;
        }
        if l >= l_cap {
            break;
        }
        l += 1;
    }
    Ok(PhaseShiftTable {
        k,
        entries,
        l_max: l,
        converged,
    })
}

fn cross_section_from_table(table: &PhaseShiftTable) -> CrossSection {
    let k = table.k;
    let sum: f64 = table
        .entries
        .iter()
        .map(|&(l, d)| (2 * l + 1) as f64 * d.sin().powi(2))
        .sum();
    CrossSection {
        sigma: 4.0 * core::f64::consts::PI / (k * k) * sum,
        l_max: table.l_max,
        converged: table.converged,
    }
}

/// Forward scattering amplitude `f(k, 0) = (1/k) sum (2l+1) e^{i delta}
/// sin delta` from a phase table; returns (Re f, Im f).
pub fn forward_amplitude_from_table(table: &PhaseShiftTable) -> (f64, f64) {
    let mut re = 0.0;
    let mut im = 0.0;
    for &(l, d) in &table.entries {
        let w = (2 * l + 1) as f64;
        re += w * d.cos() * d.sin();
        im += w * d.sin() * d.sin();
    }
    (re / table.k, im / table.k)
}

fn snap(r: f64, h: f64) -> f64 {
    (r / h).round().max(1.0) * h
}

/// March the radial equation and return u at the two (grid-aligned) radii.
fn numerov_two_point(pot: &Potential, k: f64, l: u32, h: f64, r1: f64, r2: f64) -> (f64, f64) {
    let i1 = (r1 / h).round() as usize;
    let i2 = (r2 / h).round() as usize;
    let u = numerov_probe(pot, k, l, h, &[i1, i2]);
    (u[0], u[1])
}

/// March `u'' = f u` outward and collect u at the requested node indices
/// (strictly increasing, all >= 1).
fn numerov_probe(pot: &Potential, k: f64, l: u32, h: f64, probes: &[usize]) -> Vec<f64> {
    // A node landing exactly on a discontinuity of the potential (the
    // square barrier's edge) sees the mean of the one-sided limits; the
    // one-sided value would cost a full order of accuracy.
    let jump = pot.support_radius();
    let coeff = |r: f64| -> f64 {
        match jump {
            Some(edge) if (r - edge).abs() < 0.25 * h => {
                let inner = pot.reduced(edge * (1.0 - 1e-9)).expect("positive radius");
                let outer = pot.reduced(edge * (1.0 + 1e-9)).expect("positive radius");
                inner + outer
            }
            _ => 2.0 * pot.reduced(r).expect("grid radii are positive"),
        }
    };
    let f = |r: f64| -> f64 {
        let centrifugal = if l == 0 {
            0.0
        } else {
            (l * (l + 1)) as f64 / (r * r)
        };
        centrifugal + coeff(r) - k * k
    };
    debug_assert!(probes.windows(2).all(|p| p[0] < p[1]));
    debug_assert!(probes.first().is_some_and(|&i| i >= 1));
    let last = *probes.last().expect("at least one probe");
    let mut out = vec![f64::NAN; probes.len()];
    let mut next_probe = 0usize;
    // Seeds u(h) ~ h^{l+1}: only the ratio matters, so seed with an
    // underflow-safe pair.
    let u_first = 1e-200_f64;
    let mut u_curr = 1e-200 * 2.0_f64.powi(l as i32 + 1);
    let w_first = u_first * (1.0 - h * h * f(h) / 12.0);
    let w_second = u_curr * (1.0 - h * h * f(2.0 * h) / 12.0);
    for (n, u) in [(1usize, u_first), (2, u_curr)] {
        while next_probe < probes.len() && probes[next_probe] == n {
            out[next_probe] = u;
            next_probe += 1;
        }
    }
    // Summed form with Kahan compensation on both accumulators: the plain
    // three-term recurrence rounds `w + tiny` at every step, and that
    // systematic drift grows like 1/h^2, swamping extrapolation below h ~
    // 1e-3. Compensated increments keep the floor near machine precision.
    let mut w = w_second;
    let mut cw = 0.0_f64;
    let mut step = w_second - w_first;
    let mut cs = 0.0_f64;
    let mut n = 2usize;
    while n < last {
        let term = h * h * f(n as f64 * h) * u_curr;
        kahan_add(&mut step, &mut cs, term);
        kahan_add(&mut w, &mut cw, step);
        n += 1;
        u_curr = w / (1.0 - h * h * f(n as f64 * h) / 12.0);
        while next_probe < probes.len() && probes[next_probe] == n {
            out[next_probe] = u_curr;
            next_probe += 1;
        }
        if u_curr.abs() > 1e250 {
            let scale = 1e-250;
            w *= scale;
            cw *= scale;
            step *= scale;
            cs *= scale;
            u_curr *= scale;
            for v in out.iter_mut().take(next_probe) {
                *v *= scale;
            }
        }
    }
    out
}

#[inline]
fn kahan_add(sum: &mut f64, comp: &mut f64, term: f64) {
    let y = term - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

/// Step-halving Romberg extrapolation with the order ladder 2, 3, 4, ...:
/// the marched solution starts from a truncated series, so the leading
/// extraction error is O(h^2), not the integrator's O(h^4). Convergence is
/// judged on successive diagonal entries; phases are aligned mod pi between
/// levels so a value near the branch edge extrapolates cleanly.
fn romberg_halving(
    h0: f64,
    tol: f64,
    what: &'static str,
    mut value_at: impl FnMut(f64) -> f64,
) -> Result<f64, ExactError> {
    const MAX_LEVELS: usize = 7;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut last_change = f64::INFINITY;
    for level in 0..MAX_LEVELS {
        let h = h0 / (1u32 << level) as f64;
        let raw = value_at(h);
        let base = match rows.last() {
            Some(prev) => align_mod_pi(raw, prev[0]),
            None => raw,
        };
        let mut row = vec![base];
        for m in 1..=level {
            let factor = (1u64 << (m + 1)) as f64 - 1.0;
            let refined = row[m - 1] + (row[m - 1] - rows[level - 1][m - 1]) / factor;
            row.push(refined);
        }
        if level >= 2 {
            let diag = row[level];
            let prev_diag = rows[level - 1][level - 1];
            last_change = (diag - prev_diag).abs();
            if last_change <= tol * diag.abs().max(1.0) {
                return Ok(diag);
            }
        }
        rows.push(row);
    }
    Err(ExactError::NonConvergent { what, last_change })
}

fn align_mod_pi(x: f64, reference: f64) -> f64 {
    x - core::f64::consts::PI * ((x - reference) / core::f64::consts::PI).round()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn square_length_closed_form_values() {
        assert_relative_eq!(
            square_scattering_length(1.0, 1.0).unwrap(),
            0.2384058440442351,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            square_scattering_length(10.0, 1.0).unwrap(),
            0.684903417487,
            max_relative = 1e-10
        );
        assert_eq!(square_scattering_length(0.0, 1.0).unwrap(), 0.0);
        // Hard-sphere limit a -> R.
        let a = square_scattering_length(1e6, 1.0).unwrap();
        assert_relative_eq!(a, 1.0 - 1e-3, max_relative = 1e-9);
        // Scale covariance in R: x = sqrt(G) R.
        assert_relative_eq!(
            square_scattering_length(4.0, 2.0).unwrap(),
            2.0 * (1.0 - (4.0_f64).tanh() / 4.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn square_phase_shift_threshold_limit_recovers_the_length() {
        // -delta_0/k -> a with a Richardson step in k.
        for &g in &[1.0, 10.0] {
            let a_closed = square_scattering_length(g, 1.0).unwrap();
            let k1 = 2e-3;
            let k2 = 1e-3;
            let a1 = -square_phase_shift(g, 1.0, k1, 0).unwrap() / k1;
            let a2 = -square_phase_shift(g, 1.0, k2, 0).unwrap() / k2;
            // a(k) = a + c k^2 + ...: eliminate the quadratic term.
            let a_extrap = (4.0 * a2 - a1) / 3.0;
            assert_relative_eq!(a_extrap, a_closed, max_relative = 1e-6);
        }
    }

    #[test]
    fn square_phase_shift_examples_from_the_matching_formula() {
        // G = 10, R = 1, k = 0.01: -delta_0/k within 1e-4 of the length.
        let d = square_phase_shift(10.0, 1.0, 0.01, 0).unwrap();
        assert_relative_eq!(-d / 0.01, 0.684903417487, max_relative = 1e-4);
        // Hard sphere: delta_0 -> -kR up to the penetration depth 1/sqrt(G).
        let d = square_phase_shift(1e6, 1.0, 0.1, 0).unwrap();
        assert_relative_eq!(d, -0.1, epsilon = 1e-3);
        // G = 0 is exactly free.
        assert_eq!(square_phase_shift(0.0, 1.0, 0.3, 2).unwrap(), 0.0);
    }

    #[test]
    fn square_phase_shift_is_continuous_across_the_barrier_top() {
        // k^2 = G switches interior solutions; delta must not jump.
        for l in [0u32, 1, 2] {
            let g = 1.0;
            let k0 = 1.0;
            let dm = square_phase_shift(g, 1.0, k0 - 1e-6, l).unwrap();
            let d0 = square_phase_shift(g, 1.0, k0, l).unwrap();
            let dp = square_phase_shift(g, 1.0, k0 + 1e-6, l).unwrap();
            assert!((dm - d0).abs() < 1e-4, "l={l}: {dm} vs {d0}");
            assert!((dp - d0).abs() < 1e-4, "l={l}: {dp} vs {d0}");
        }
    }

    #[test]
    fn square_cross_section_threshold_and_hard_sphere() {
        // k -> 0: sigma -> 4 pi a^2.
        let a = square_scattering_length(5.0, 1.0).unwrap();
        let cs = square_cross_section(5.0, 1.0, 1e-3).unwrap();
        assert!(cs.converged);
        assert_relative_eq!(
            cs.sigma,
            4.0 * core::f64::consts::PI * a * a,
            max_relative = 1e-2
        );
        // Hard-sphere proxy at kR = 0.01: sigma ~ 4 pi R^2 within 2%.
        let cs = square_cross_section(1e6, 1.0, 0.01).unwrap();
        assert_relative_eq!(
            cs.sigma,
            4.0 * core::f64::consts::PI,
            max_relative = 2e-2
        );
        // G = 0: no scattering.
        let cs = square_cross_section(0.0, 1.0, 1.0).unwrap();
        assert_eq!(cs.sigma, 0.0);
    }

    #[test]
    fn singular_exact_length_closed_form() {
        // N = 2, G = 1: (1)^{1/2} 2^{-1} Gamma(1/2)/Gamma(3/2) = 1 exactly.
        assert_relative_eq!(
            singular_exact_length(1.0, 2).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        // Dimensional scaling a(lambda^{2(N-1)} G) = lambda a(G).
        let n = 4;
        let lambda = 1.7_f64;
        let a1 = singular_exact_length(2.0, n).unwrap();
        let a2 = singular_exact_length(lambda.powi(2 * (n as i32 - 1)) * 2.0, n).unwrap();
        assert_relative_eq!(a2, lambda * a1, max_relative = 1e-12);
        // Hard-sphere trend: a(N) increases toward 1.
        let a20 = singular_exact_length(1.0, 20).unwrap();
        let a40 = singular_exact_length(1.0, 40).unwrap();
        let a90 = singular_exact_length(1.0, 90).unwrap();
        assert!(a20 < a40 && a40 < a90 && a90 < 1.0);
        assert!(1.0 - a90 < 0.03);
        assert_eq!(singular_exact_length(0.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn numerov_matches_square_barrier_closed_forms() {
        // Dual-route check: the ODE integrator against the analytic
        // partial-wave solution, both for the length and a k > 0 phase.
        let pot = Potential::square_barrier(5.0, 1.0).unwrap();
        let grid = RadialGrid::default_for(&pot);
        let a = numerov_scattering_length(&pot, &grid).unwrap();
        assert_relative_eq!(
            a,
            square_scattering_length(5.0, 1.0).unwrap(),
            max_relative = 1e-4
        );
        let d_numerov = numerov_phase_shift(&pot, 0.5, 0, &grid).unwrap();
        let d_closed = square_phase_shift(5.0, 1.0, 0.5, 0).unwrap();
        assert_relative_eq!(d_numerov, d_closed, max_relative = 1e-4);
    }

    #[test]
    fn numerov_yukawa_born_limit_and_monotonicity() {
        // G -> 0: a -> 2G.
        let pot = Potential::yukawa(0.01).unwrap();
        let grid = RadialGrid::default_for(&pot);
        let a = numerov_scattering_length(&pot, &grid).unwrap();
        assert_relative_eq!(a, 0.02, max_relative = 2e-2);
        // Repulsive monotonicity in G.
        let mut prev = 0.0;
        for &g in &[1.0, 2.0, 5.0, 10.0] {
            let pot = Potential::yukawa(g).unwrap();
            let a = numerov_scattering_length(&pot, &grid).unwrap();
            assert!(a > prev, "a({g}) = {a} not increasing");
            prev = a;
        }
    }

    #[test]
    fn numerov_phase_self_convergence_and_free_limit() {
        let pot = Potential::yukawa(1.0).unwrap();
        let grid = RadialGrid::default_for(&pot);
        let d1 = numerov_phase_shift(&pot, 0.5, 0, &grid).unwrap();
        let finer = RadialGrid { h: grid.h / 2.0, ..grid };
        let d2 = numerov_phase_shift(&pot, 0.5, 0, &finer).unwrap();
        assert_relative_eq!(d1, d2, epsilon = 1e-8);
        // G = 0 is exactly free.
        let free = Potential::yukawa(0.0).unwrap();
        assert_eq!(numerov_phase_shift(&free, 0.5, 0, &grid).unwrap(), 0.0);
    }

    #[test]
    fn numerov_phases_decay_with_angular_momentum() {
        let pot = Potential::yukawa(2.0).unwrap();
        let grid = RadialGrid::default_for(&pot);
        let mut prev = f64::INFINITY;
        for l in 10..16 {
            let d = numerov_phase_shift(&pot, 1.0, l, &grid).unwrap().abs();
            assert!(d < prev, "|delta_{l}| = {d} not decreasing");
            prev = d;
        }
    }

    #[test]
    fn yukawa_cross_section_threshold_law() {
        let pot = Potential::yukawa(2.0).unwrap();
        let grid = RadialGrid::default_for(&pot);
        let a = numerov_scattering_length(&pot, &grid).unwrap();
        let cs = yukawa_cross_section(&pot, 1e-2, &grid).unwrap();
        assert!(cs.converged);
        assert!(cs.l_max >= 1);
        assert_relative_eq!(
            cs.sigma,
            4.0 * core::f64::consts::PI * a * a,
            max_relative = 1e-2
        );
    }

    #[test]
    fn forward_amplitude_obeys_the_optical_theorem() {
        let table = square_phase_table(5.0, 1.0, 0.7, SQUARE_PHASE_CUTOFF).unwrap();
        let (_, im_f) = forward_amplitude_from_table(&table);
        let cs = cross_section_from_table(&table);
        assert_relative_eq!(
            cs.sigma,
            4.0 * core::f64::consts::PI / 0.7 * im_f,
            max_relative = 1e-10
        );
    }

    #[test]
    fn grid_validation_rejects_nonsense() {
        assert!(RadialGrid::new(40.0, 0.0, 35.0).is_err());
        assert!(RadialGrid::new(30.0, 0.01, 35.0).is_err());
        assert!(RadialGrid::new(40.0, 0.01, 0.05).is_err());
    }
}
