//! Quadrature and root finding shared by all scheme modules.
//!
//! The workhorse is a globally adaptive Gauss-Kronrod 7/15 rule with an
//! error heap. Semi-infinite integrals go through the rational map
//! `x = a + (1-t)/t`; oscillatory Hankel-type integrals are summed between
//! consecutive zeros of `J0` and accelerated with an Euler transform.
//! Root finding is Brent's method plus a geometric bracket expander used by
//! the calibration routines.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::specfun;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("integrand returned a non-finite value at x = {x}")]
    BadIntegrand { x: f64 },
    #[error("invalid integration interval [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },
    #[error(
        "quadrature did not reach the requested tolerance: value {value}, \
         error estimate {error}, {evals} evaluations"
    )]
    NonConvergent { value: f64, error: f64, evals: usize },
    #[error("root finder called without a sign change: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("no sign change found while expanding the bracket from seed {seed} ({steps} doublings, f stayed {sign})")]
    NoSignChange { seed: f64, steps: usize, sign: &'static str },
    #[error("root finder exceeded {0} iterations")]
    TooManyIterations(usize),
}

/// Tolerances and budget for one adaptive quadrature call.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_evals: 400_000,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadConfig {
            rel_tol,
            ..Default::default()
        }
    }
}

/// Value, error estimate and cost of a quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1]. Odd-index
// abscissae are the embedded Gauss-7 nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One GK15 application on [lo, hi]: (kronrod, |kronrod - gauss|).
fn gk15<F: FnMut(f64) -> f64>(
    f: &mut F,
    lo: f64,
    hi: f64,
) -> Result<(f64, f64), NumericsError> {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut kron = 0.0;
    let mut gauss = 0.0;
    for i in 0..8 {
        let (fa, fb) = if i == 7 {
            let v = f(c);
            if !v.is_finite() {
                return Err(NumericsError::BadIntegrand { x: c });
            }
            (v, 0.0)
        } else {
            let xa = c - h * XGK[i];
            let xb = c + h * XGK[i];
            let va = f(xa);
            if !va.is_finite() {
                return Err(NumericsError::BadIntegrand { x: xa });
            }
            let vb = f(xb);
            if !vb.is_finite() {
                return Err(NumericsError::BadIntegrand { x: xb });
            }
            (va, vb)
        };
        kron += WGK[i] * (fa + fb);
        if i % 2 == 1 {
            // Odd Kronrod indices are the embedded Gauss-7 nodes; the
            // centre (i = 7, fb = 0) maps to the middle Gauss weight.
            gauss += WG[i / 2] * (fa + fb);
        }
    }
    Ok((kron * h, (kron - gauss).abs() * h))
}

#[derive(Debug)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integral of `f` over the finite interval [lo, hi].
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    cfg: QuadConfig,
) -> Result<Quadrature, NumericsError> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(NumericsError::BadInterval { lo, hi });
    }
    if lo == hi {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    let (v, e) = gk15(&mut f, lo, hi)?;
    let mut evals = 15usize;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        lo,
        hi,
        value: v,
        error: e,
    });
    // Segments too narrow to split retire here with their error frozen.
    let mut retired_value = 0.0;
    let mut retired_error = 0.0;
    let mut total_value = v;
    let mut total_error = e;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total_value.abs());
        if total_error <= tol {
            break;
        }
        if evals + 30 > cfg.max_evals {
            return Err(NumericsError::NonConvergent {
                value: total_value,
                error: total_error,
                evals,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        // A segment is unsplittable once its width approaches the floating
        // point spacing of its endpoints (near zero that is the subnormal
        // range, so dyadic chains into an endpoint singularity can run deep).
        let width_floor = f64::EPSILON * worst.lo.abs().max(worst.hi.abs()) + 1e-300;
        if worst.hi - worst.lo < width_floor {
            retired_value += worst.value;
            retired_error += worst.error;
            continue;
        }
        let (v1, e1) = gk15(&mut f, worst.lo, mid)?;
        let (v2, e2) = gk15(&mut f, mid, worst.hi)?;
        evals += 30;
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Segment {
            lo: worst.lo,
            hi: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            lo: mid,
            hi: worst.hi,
            value: v2,
            error: e2,
        });
    }
    // Recompute the totals from the surviving segments to shed the
    // accumulated rounding of the incremental updates.
    let mut value = retired_value;
    let mut error = retired_error;
    for s in heap.iter() {
        value += s.value;
        error += s.error;
    }
    Ok(Quadrature {
        value,
        error,
        evals,
    })
}

/// Adaptive integral of `f` over [a, infinity).
///
/// Uses the rational substitution x = a + (1 - t)/t mapping the tail to
/// t in (0, 1]; the Kronrod nodes are interior, so t = 0 is never sampled.
pub fn integrate_to_inf<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    cfg: QuadConfig,
) -> Result<Quadrature, NumericsError> {
    if !a.is_finite() {
        return Err(NumericsError::BadInterval { lo: a, hi: f64::INFINITY });
    }
    integrate(
        |t| {
            let x = a + (1.0 - t) / t;
            f(x) / (t * t)
        },
        0.0,
        1.0,
        cfg,
    )
}

/// Oscillatory integral `int_0^inf g(rho) J0(omega rho) drho`.
///
/// The caller's `g` must decay eventually (absolutely integrable against a
/// bounded oscillation). The axis is cut at consecutive zeros of
/// `J0(omega rho)`; the partial sums of the resulting alternating-signed
/// segments are accelerated with an Euler transform. `omega = 0` falls back
/// to the plain semi-infinite rule.
pub fn integrate_j0_weighted<F: FnMut(f64) -> f64>(
    mut g: F,
    omega: f64,
    cfg: QuadConfig,
) -> Result<Quadrature, NumericsError> {
    if !(omega >= 0.0) {
        return Err(NumericsError::BadInterval { lo: omega, hi: 0.0 });
    }
    if omega == 0.0 {
        return integrate_to_inf(g, 0.0, cfg);
    }
    let seg_cfg = QuadConfig {
        rel_tol: 0.25 * cfg.rel_tol,
        abs_tol: 0.25 * cfg.abs_tol,
        max_evals: cfg.max_evals,
    };
    let mut evals = 0usize;
    let mut seg_error = 0.0;
    let mut partial = 0.0;
    // Euler table over recent partial sums.
    let mut table: Vec<f64> = Vec::with_capacity(64);
    let mut prev_estimate = f64::NAN;
    let mut calm = 0u32;
    let mut scale = 0.0_f64;
    const MAX_SEGMENTS: usize = 4000;
    for n in 0..MAX_SEGMENTS {
        let lo = if n == 0 { 0.0 } else { j0_zero(n) / omega };
        let hi = j0_zero(n + 1) / omega;
        let q = integrate(|rho| g(rho) * specfun::bessel_j0(omega * rho), lo, hi, seg_cfg)?;
        evals += q.evals;
        seg_error += q.error;
        partial += q.value;
        scale = scale.max(q.value.abs());
        // Fold the new partial sum into the Euler table.
        table.push(partial);
        if table.len() > 24 {
            table.remove(0);
        }
        for i in (0..table.len() - 1).rev() {
            table[i] = 0.5 * (table[i] + table[i + 1]);
        }
        let estimate = table[0];
        let tol = cfg.abs_tol.max(cfg.rel_tol * estimate.abs());
        if n >= 2 {
            let delta = (estimate - prev_estimate).abs();
            if delta <= tol && q.value.abs() <= 10.0 * tol.max(1e-300) * (n as f64) {
                return Ok(Quadrature {
                    value: estimate,
                    error: delta + seg_error,
                    evals,
                });
            }
            if delta <= tol {
                calm += 1;
            } else {
                calm = 0;
            }
            // Three consecutive calm steps: accept even if the raw segment
            // magnitude is still above the floor (slowly decaying g).
            if calm >= 3 {
                return Ok(Quadrature {
                    value: estimate,
                    error: delta + seg_error,
                    evals,
                });
            }
        }
        prev_estimate = estimate;
        if evals > cfg.max_evals {
            return Err(NumericsError::NonConvergent {
                value: estimate,
                error: scale,
                evals,
            });
        }
    }
    Err(NumericsError::NonConvergent {
        value: prev_estimate,
        error: seg_error,
        evals,
    })
}

/// n-th positive zero of J0 (n >= 1), to machine precision.
///
/// McMahon's expansion seeds a Newton step pair using J0' = -J1.
pub(crate) fn j0_zero(n: usize) -> f64 {
    let beta = (n as f64 - 0.25) * core::f64::consts::PI;
    let bi = 1.0 / beta;
    let bi2 = bi * bi;
    let mut z = beta + bi * (0.125 + bi2 * (-31.0 / 384.0 + bi2 * (3779.0 / 15360.0)));
    // Two Newton refinements are enough from the McMahon seed.
    for _ in 0..2 {
        let (j0, j1) = crate::specfun::j0_and_j1(z);
        z += j0 / j1;
    }
    z
}

/// Tolerances for Brent's method.
#[derive(Debug, Clone, Copy)]
pub struct RootConfig {
    pub x_abs_tol: f64,
    pub x_rel_tol: f64,
    pub max_iter: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig {
            x_abs_tol: 1e-14,
            x_rel_tol: 4.0 * f64::EPSILON,
            max_iter: 200,
        }
    }
}

/// Converged root with its residual.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub f_x: f64,
    pub iterations: usize,
}

/// Brent's method on a bracketing interval [lo, hi] with f(lo) f(hi) <= 0.
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    cfg: RootConfig,
) -> Result<Root, NumericsError> {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(Root { x: a, f_x: 0.0, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, f_x: 0.0, iterations: 0 });
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(NumericsError::NotBracketed { lo, hi, f_lo: fa, f_hi: fb });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=cfg.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * cfg.x_abs_tol.max(cfg.x_rel_tol * b.abs());
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(Root { x: b, f_x: fb, iterations: iter });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation, falling back to secant.
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.copysign(xm)
        };
        fb = f(b);
        if !fb.is_finite() {
            return Err(NumericsError::BadIntegrand { x: b });
        }
    }
    Err(NumericsError::TooManyIterations(cfg.max_iter))
}

/// Expand a bracket geometrically around a positive seed until the sign of
/// `f` changes between two consecutive probe points.
///
/// Probes alternate outward: seed*2, seed/2, seed*4, seed/4, ... so the
/// nearest bracket is found first. Fails after `max_doublings` in each
/// direction without a sign change.
pub fn expand_bracket<F: FnMut(f64) -> f64>(
    mut f: F,
    seed: f64,
    max_doublings: usize,
) -> Result<(f64, f64), NumericsError> {
    assert!(seed > 0.0, "bracket expansion needs a positive seed");
    let f0 = f(seed);
    if f0 == 0.0 {
        return Ok((seed, seed));
    }
    let sign = f0 > 0.0;
    let mut up = seed;
    let mut down = seed;
    for _ in 0..max_doublings {
        let next_up = up * 2.0;
        let v = f(next_up);
        if v == 0.0 || (v > 0.0) != sign {
            return Ok((up, next_up));
        }
        up = next_up;
        let next_down = down * 0.5;
        let v = f(next_down);
        if v == 0.0 || (v > 0.0) != sign {
            return Ok((next_down, down));
        }
        down = next_down;
    }
    Err(NumericsError::NoSignChange {
        seed,
        steps: max_doublings,
        sign: if sign { "positive" } else { "negative" },
    })
}

/// Composite Simpson rule with `n` (even) panels.
pub fn composite_simpson<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, n: usize) -> f64 {
    let n = if n.is_multiple_of(2) { n } else { n + 1 };
    let h = (hi - lo) / n as f64;
    let mut sum = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(lo + i as f64 * h);
    }
    sum * h / 3.0
}

/// Simpson nodes and weights on [lo, hi] with `n` (even) panels, for
/// callers that need to attach independent errors to each node.
pub fn simpson_grid(lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let n = if n.is_multiple_of(2) { n } else { n + 1 };
    let h = (hi - lo) / n as f64;
    let mut xs = Vec::with_capacity(n + 1);
    let mut ws = Vec::with_capacity(n + 1);
    for i in 0..=n {
        xs.push(lo + i as f64 * h);
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        ws.push(w * h / 3.0);
    }
    (xs, ws)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive (`n >= 2`).
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "a sweep grid needs at least two points");
    let h = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + i as f64 * h })
        .collect()
}

/// `n` log-spaced points from `lo` to `hi` inclusive (`0 < lo < hi`).
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "a sweep grid needs at least two points");
    assert!(lo > 0.0 && hi > lo, "log spacing needs 0 < lo < hi");
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo * (i as f64 * step).exp() })
        .collect()
}
