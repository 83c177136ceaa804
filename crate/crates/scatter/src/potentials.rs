//! Potential families and their radial moments.
//!
//! Three repulsive central potentials are supported, each parameterised by
//! a dimensionless coupling `G` with lengths in units of the potential
//! range:
//!
//! * square barrier: `V(r) = G` for `r < R`, zero outside,
//! * singular core: `V(r) = G / r^{2N}`,
//! * Yukawa: `V(r) = G e^{-r} / r`.
//!
//! `value` and the moment operations below all refer to this bare `V(r)`.
//! The families carry different mass conventions, however: the square
//! barrier's `G` absorbs `2m`, while the singular and Yukawa couplings are
//! quoted with a single factor of `m`. Scheme formulas therefore consume
//! the `reduced_*` accessors, which return `m V` uniformly, so that the
//! radial equation always reads `u'' = (2 reduced(r) - k^2) u`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun;

#[derive(Debug, Error, PartialEq)]
pub enum PotentialError {
    #[error("coupling G = {g} is not allowed: only repulsive (G >= 0) potentials are supported")]
    NegativeCoupling { g: f64 },
    #[error("barrier radius R = {radius} must be positive and finite")]
    BadRadius { radius: f64 },
    #[error("singular exponent N = {n} must lie in 2..=100")]
    BadExponent { n: u32 },
    #[error("radial argument r = {r} is outside the domain (r > 0 required)")]
    DomainRadius { r: f64 },
    #[error("interior moment of the singular potential diverges at the origin")]
    SingularInteriorMoment,
    #[error("tail moment of the singular potential diverges at the origin")]
    SingularTailMoment,
}

/// A repulsive central potential.
///
/// Construct through [`Potential::square_barrier`], [`Potential::singular`]
/// or [`Potential::yukawa`]; the constructors validate the parameters so a
/// value of this type is always usable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialConfig", into = "PotentialConfig")]
pub enum Potential {
    SquareBarrier { g: f64, radius: f64 },
    Singular { g: f64, n: u32 },
    Yukawa { g: f64 },
}

impl Potential {
    /// Square barrier of height `g` (in `2mV` units) and radius `radius`.
    pub fn square_barrier(g: f64, radius: f64) -> Result<Self, PotentialError> {
        check_coupling(g)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(PotentialError::BadRadius { radius });
        }
        Ok(Potential::SquareBarrier { g, radius })
    }

    /// Singular core `G / r^{2N}` with `2 <= N <= 100`.
    pub fn singular(g: f64, n: u32) -> Result<Self, PotentialError> {
        check_coupling(g)?;
        if !(2..=100).contains(&n) {
            return Err(PotentialError::BadExponent { n });
        }
        Ok(Potential::Singular { g, n })
    }

    /// Yukawa potential `G e^{-r} / r` (screening length is the unit).
    pub fn yukawa(g: f64) -> Result<Self, PotentialError> {
        check_coupling(g)?;
        Ok(Potential::Yukawa { g })
    }

    pub fn coupling(&self) -> f64 {
        match *self {
            Potential::SquareBarrier { g, .. }
            | Potential::Singular { g, .. }
            | Potential::Yukawa { g } => g,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Potential::SquareBarrier { .. } => "square",
            Potential::Singular { .. } => "singular",
            Potential::Yukawa { .. } => "yukawa",
        }
    }

    /// Radius beyond which the potential vanishes identically, if any.
    /// Quadratures use it to replace semi-infinite tails by a hard cutoff.
    pub fn support_radius(&self) -> Option<f64> {
        match *self {
            Potential::SquareBarrier { radius, .. } => Some(radius),
            _ => None,
        }
    }

    /// Ratio between `m V(r)` and `value(r)`: 1/2 for the square barrier
    /// (whose G is quoted as 2mV), 1 for the other families.
    fn kappa(&self) -> f64 {
        match self {
            Potential::SquareBarrier { .. } => 0.5,
            _ => 1.0,
        }
    }

    /// Bare potential `V(r)`.
    pub fn value(&self, r: f64) -> Result<f64, PotentialError> {
        check_radius(r)?;
        Ok(match *self {
            Potential::SquareBarrier { g, radius } => {
                if r < radius {
                    g
                } else {
                    0.0
                }
            }
            Potential::Singular { g, n } => g * r.powi(-2 * n as i32),
            Potential::Yukawa { g } => g * (-r).exp() / r,
        })
    }

    /// First radial moment of the tail, `T(r) = int_r^inf s V(s) ds`.
    ///
    /// Closed forms: `(G/2) max(R^2 - r^2, 0)` (square), `G e^{-r}`
    /// (Yukawa), `G r^{2-2N} / (2N - 2)` (singular). Satisfies
    /// `dT/dr = -r V(r)`. Unlike the pointwise potential the moment is
    /// finite at `r = 0` for the square and Yukawa families, so the
    /// origin is accepted; the singular moment diverges there.
    pub fn tail_moment(&self, r: f64) -> Result<f64, PotentialError> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(PotentialError::DomainRadius { r });
        }
        Ok(match *self {
            Potential::SquareBarrier { g, radius } => {
                0.5 * g * (radius * radius - r * r).max(0.0)
            }
            Potential::Singular { g, n } => {
                if r == 0.0 {
                    return Err(PotentialError::SingularTailMoment);
                }
                g / ((2 * n - 2) as f64) * r.powi(2 - 2 * n as i32)
            }
            Potential::Yukawa { g } => g * (-r).exp(),
        })
    }

    /// Second radial moment of the interior, `int_0^y s^2 V(s) ds`.
    ///
    /// Diverges for the singular family, which reports
    /// [`PotentialError::SingularInteriorMoment`].
    pub fn interior_moment(&self, y: f64) -> Result<f64, PotentialError> {
        check_radius(y)?;
        Ok(match *self {
            Potential::SquareBarrier { g, radius } => {
                let cap = y.min(radius);
                g * cap * cap * cap / 3.0
            }
            Potential::Singular { .. } => return Err(PotentialError::SingularInteriorMoment),
            Potential::Yukawa { g } => {
                // int_0^y s e^{-s} ds = 1 - e^{-y}(1 + y)
                g * (1.0 - (-y).exp() * (1.0 + y))
            }
        })
    }

    /// Straight-line chord integral `Y(rho) = int_{-inf}^{inf}
    /// V(sqrt(rho^2 + z^2)) dz` at impact parameter `rho`.
    ///
    /// Closed forms: `2 G sqrt(R^2 - rho^2)` inside the barrier,
    /// `2 G K0(rho)` (Yukawa),
    /// `G sqrt(pi) Gamma(N - 1/2) / Gamma(N) rho^{1-2N}` (singular).
    pub fn chord_integral(&self, rho: f64) -> Result<f64, PotentialError> {
        check_radius(rho)?;
        Ok(match *self {
            Potential::SquareBarrier { g, radius } => {
                if rho < radius {
                    2.0 * g * (radius * radius - rho * rho).sqrt()
                } else {
                    0.0
                }
            }
            Potential::Singular { g, n } => g * singular_chord_coefficient(n) * rho.powi(1 - 2 * n as i32),
            Potential::Yukawa { g } => {
                2.0 * g
                    * specfun::bessel_k0(rho)
                        .expect("K0 is defined for every rho > 0")
            }
        })
    }

    /// Mass-reduced potential `m V(r)`, the quantity every scheme formula
    /// is written in.
    pub fn reduced(&self, r: f64) -> Result<f64, PotentialError> {
        Ok(self.kappa() * self.value(r)?)
    }

    /// Mass-reduced tail moment `int_r^inf s m V(s) ds`.
    pub fn reduced_tail(&self, r: f64) -> Result<f64, PotentialError> {
        Ok(self.kappa() * self.tail_moment(r)?)
    }

    /// Mass-reduced interior moment `int_0^y s^2 m V(s) ds`.
    pub fn reduced_interior(&self, y: f64) -> Result<f64, PotentialError> {
        Ok(self.kappa() * self.interior_moment(y)?)
    }

    /// Mass-reduced chord integral `m Y(rho)`, the eikonal phase numerator.
    pub fn reduced_chord(&self, rho: f64) -> Result<f64, PotentialError> {
        Ok(self.kappa() * self.chord_integral(rho)?)
    }
}

impl std::fmt::Display for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Potential::SquareBarrier { g, radius } => {
                write!(f, "square barrier (G = {g}, R = {radius})")
            }
            Potential::Singular { g, n } => write!(f, "singular core (G = {g}, N = {n})"),
            Potential::Yukawa { g } => write!(f, "yukawa (G = {g})"),
        }
    }
}

fn check_coupling(g: f64) -> Result<(), PotentialError> {
    if !(g >= 0.0) || !g.is_finite() {
        return Err(PotentialError::NegativeCoupling { g });
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<(), PotentialError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(PotentialError::DomainRadius { r });
    }
    Ok(())
}

/// sqrt(pi) Gamma(N - 1/2) / Gamma(N) for the singular chord integral.
pub(crate) fn singular_chord_coefficient(n: u32) -> f64 {
    let num = specfun::gamma(n as f64 - 0.5).expect("argument in (1.5, 100)");
    let den = specfun::gamma(n as f64).expect("argument in (2, 100)");
    core::f64::consts::PI.sqrt() * num / den
}

/// Wire format for a potential: `{"family": "square" | "singular" |
/// "yukawa", "G": float, "R": float (optional, default 1), "N": int}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialConfig {
    Square {
        #[serde(rename = "G")]
        g: f64,
        #[serde(rename = "R", default = "default_radius")]
        radius: f64,
    },
    Singular {
        #[serde(rename = "G")]
        g: f64,
        #[serde(rename = "N")]
        n: u32,
    },
    Yukawa {
        #[serde(rename = "G")]
        g: f64,
    },
}

fn default_radius() -> f64 {
    1.0
}

impl TryFrom<PotentialConfig> for Potential {
    type Error = PotentialError;

    fn try_from(cfg: PotentialConfig) -> Result<Self, PotentialError> {
        match cfg {
            PotentialConfig::Square { g, radius } => Potential::square_barrier(g, radius),
            PotentialConfig::Singular { g, n } => Potential::singular(g, n),
            PotentialConfig::Yukawa { g } => Potential::yukawa(g),
        }
    }
}

impl From<Potential> for PotentialConfig {
    fn from(p: Potential) -> Self {
        match p {
            Potential::SquareBarrier { g, radius } => PotentialConfig::Square { g, radius },
            Potential::Singular { g, n } => PotentialConfig::Singular { g, n },
            Potential::Yukawa { g } => PotentialConfig::Yukawa { g },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{self, QuadConfig};
    use approx::assert_relative_eq;

    fn families() -> Vec<Potential> {
        vec![
            Potential::square_barrier(2.0, 1.0).unwrap(),
            Potential::singular(1.5, 2).unwrap(),
            Potential::singular(0.8, 5).unwrap(),
            Potential::yukawa(3.0).unwrap(),
        ]
    }

    #[test]
    fn constructors_enforce_parameter_ranges() {
        assert!(Potential::square_barrier(-1.0, 1.0).is_err());
        assert!(Potential::square_barrier(1.0, 0.0).is_err());
        assert!(Potential::square_barrier(1.0, f64::INFINITY).is_err());
        assert!(Potential::singular(1.0, 1).is_err());
        assert!(Potential::singular(1.0, 101).is_err());
        assert!(Potential::yukawa(f64::NAN).is_err());
        // Zero coupling is legal; calibration layers reject it separately.
        assert!(Potential::yukawa(0.0).is_ok());
    }

    #[test]
    fn values_match_the_defining_formulas() {
        let sq = Potential::square_barrier(2.0, 1.0).unwrap();
        assert_eq!(sq.value(0.5).unwrap(), 2.0);
        assert_eq!(sq.value(1.5).unwrap(), 0.0);
        let si = Potential::singular(1.5, 2).unwrap();
        assert_relative_eq!(si.value(2.0).unwrap(), 1.5 / 16.0, max_relative = 1e-15);
        let yu = Potential::yukawa(3.0).unwrap();
        assert_relative_eq!(
            yu.value(1.0).unwrap(),
            3.0 * (-1.0_f64).exp(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn radial_domain_is_strictly_positive() {
        for p in families() {
            assert_eq!(
                p.value(0.0),
                Err(PotentialError::DomainRadius { r: 0.0 })
            );
            assert!(p.value(-1.0).is_err());
            assert!(p.tail_moment(-1.0).is_err());
            assert!(p.chord_integral(0.0).is_err());
            assert!(p.value(f64::NAN).is_err());
        }
    }

    #[test]
    fn tail_moment_admits_the_origin_where_it_is_finite() {
        let sq = Potential::square_barrier(4.0, 1.0).unwrap();
        assert_relative_eq!(sq.tail_moment(0.0).unwrap(), 2.0);
        let yu = Potential::yukawa(3.0).unwrap();
        assert_relative_eq!(yu.tail_moment(0.0).unwrap(), 3.0);
        let si = Potential::singular(1.0, 2).unwrap();
        assert_eq!(si.tail_moment(0.0), Err(PotentialError::SingularTailMoment));
    }

    #[test]
    fn tail_moment_matches_quadrature() {
        for p in families() {
            for &r in &[0.3, 1.0, 2.0] {
                let quad = numerics::integrate_to_inf(
                    |s| s * p.value(s).unwrap(),
                    r,
                    QuadConfig::default(),
                )
                .unwrap();
                assert_relative_eq!(
                    p.tail_moment(r).unwrap(),
                    quad.value,
                    max_relative = 1e-9,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn tail_moment_derivative_is_minus_r_times_value() {
        // dT/dr = -r V(r), probed with a central difference.
        let cases = [
            (Potential::square_barrier(2.0, 1.0).unwrap(), 0.7),
            (Potential::singular(1.5, 3).unwrap(), 1.3),
            (Potential::yukawa(3.0).unwrap(), 0.9),
        ];
        for (p, r) in cases {
            let h = 1e-6;
            let fd = (p.tail_moment(r + h).unwrap() - p.tail_moment(r - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(fd, -r * p.value(r).unwrap(), max_relative = 1e-8);
        }
    }

    #[test]
    fn interior_moment_matches_quadrature() {
        let cases = [
            Potential::square_barrier(2.0, 1.0).unwrap(),
            Potential::yukawa(3.0).unwrap(),
        ];
        for p in cases {
            for &y in &[0.4, 1.0, 3.0] {
                let quad = numerics::integrate(
                    |s| s * s * p.value(s).unwrap(),
                    0.0,
                    y,
                    QuadConfig::default(),
                )
                .unwrap();
                assert_relative_eq!(
                    p.interior_moment(y).unwrap(),
                    quad.value,
                    max_relative = 1e-9
                );
            }
        }
        let si = Potential::singular(1.0, 2).unwrap();
        assert_eq!(
            si.interior_moment(1.0),
            Err(PotentialError::SingularInteriorMoment)
        );
    }

    #[test]
    fn chord_integral_matches_quadrature() {
        for p in families() {
            for &rho in &[0.1, 0.5, 1.0, 2.0, 5.0] {
                let quad = numerics::integrate_to_inf(
                    |z| p.value((rho * rho + z * z).sqrt()).unwrap(),
                    0.0,
                    QuadConfig::default(),
                )
                .unwrap();
                assert_relative_eq!(
                    p.chord_integral(rho).unwrap(),
                    2.0 * quad.value,
                    max_relative = 1e-9,
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn reduced_accessors_apply_the_mass_convention() {
        let sq = Potential::square_barrier(2.0, 1.0).unwrap();
        assert_eq!(sq.reduced(0.5).unwrap(), 1.0);
        assert_eq!(
            sq.reduced_tail(0.5).unwrap(),
            0.5 * sq.tail_moment(0.5).unwrap()
        );
        let yu = Potential::yukawa(3.0).unwrap();
        assert_eq!(yu.reduced(0.5).unwrap(), yu.value(0.5).unwrap());
        assert_eq!(
            yu.reduced_chord(1.0).unwrap(),
            yu.chord_integral(1.0).unwrap()
        );
    }

    #[test]
    fn potential_json_round_trip() {
        let p: Potential =
            serde_json::from_str(r#"{"family":"square","G":2.0,"R":1.5}"#).unwrap();
        assert_eq!(p, Potential::square_barrier(2.0, 1.5).unwrap());
        // R defaults to 1.
        let p: Potential = serde_json::from_str(r#"{"family":"square","G":2.0}"#).unwrap();
        assert_eq!(p, Potential::square_barrier(2.0, 1.0).unwrap());
        let p: Potential =
            serde_json::from_str(r#"{"family":"singular","G":1.0,"N":4}"#).unwrap();
        assert_eq!(p, Potential::singular(1.0, 4).unwrap());
        let p: Potential = serde_json::from_str(r#"{"family":"yukawa","G":5.0}"#).unwrap();
        assert_eq!(p, Potential::yukawa(5.0).unwrap());
        let json = serde_json::to_string(&p).unwrap();
        let back: Potential = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn potential_json_rejects_invalid_input() {
        assert!(serde_json::from_str::<Potential>(r#"{"family":"box","G":1.0}"#).is_err());
        assert!(serde_json::from_str::<Potential>(r#"{"family":"square"}"#).is_err());
        assert!(
            serde_json::from_str::<Potential>(r#"{"family":"square","G":-2.0}"#).is_err()
        );
        assert!(
            serde_json::from_str::<Potential>(r#"{"family":"singular","G":1.0,"N":1}"#)
                .is_err()
        );
        assert!(serde_json::from_str::<Potential>(
            r#"{"family":"yukawa","G":1.0,"R":2.0}"#
        )
        .is_err());
    }
}
