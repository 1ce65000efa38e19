//! Smooth speed-of-propagation models with exact first and second derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Speed and its spatial derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients<T> {
    pub c: T,
    pub c_x: T,
    pub c_y: T,
    pub c_xx: T,
    pub c_xy: T,
    pub c_yy: T,
}

impl<T: Real> Coefficients<T> {
    pub fn grad(&self) -> (T, T) {
        (self.c_x, self.c_y)
    }

    pub fn hess(&self) -> (T, T, T) {
        (self.c_xx, self.c_xy, self.c_yy)
    }

    fn is_finite(&self) -> bool {
        [self.c, self.c_x, self.c_y, self.c_xx, self.c_xy, self.c_yy]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Built-in analytic speed models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MediumKind<T> {
    Constant {
        c0: T,
    },
    /// `c = 1 + a sin(kx x) sin(ky y)`.
    Waveguide {
        amplitude: T,
        kx: T,
        ky: T,
    },
}

impl<T: Real> MediumKind<T> {
    pub fn waveguide_default() -> Self {
        let half_pi = T::FRAC_PI_2();
        MediumKind::Waveguide {
            amplitude: lit(0.2),
            kx: half_pi,
            ky: half_pi,
        }
    }
}

/// Axis-aligned bounding box of the computational domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain<T> {
    pub x: (T, T),
    pub y: (T, T),
}

impl<T: Real> Default for Domain<T> {
    fn default() -> Self {
        Domain {
            x: (lit(-2.0), lit(2.0)),
            y: (lit(0.0), lit(4.0)),
        }
    }
}

impl<T: Real> Domain<T> {
    pub fn contains(&self, x: T, y: T) -> bool {
        x >= self.x.0 && x <= self.x.1 && y >= self.y.0 && y <= self.y.1
    }

    fn check(&self, x: T, y: T) -> Result<()> {
        for (axis, v, (lo, hi)) in [("x", x, self.x), ("y", y, self.y)] {
            if !(v >= lo && v <= hi) {
                return Err(Error::OutsideDomain {
                    axis,
                    value: to_f64(v),
                    min: to_f64(lo),
                    max: to_f64(hi),
                });
            }
        }
        Ok(())
    }
}

/// A speed model restricted to a domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium<T> {
    pub kind: MediumKind<T>,
    pub domain: Domain<T>,
}

impl<T: Real> Medium<T> {
    pub fn new(kind: MediumKind<T>, domain: Domain<T>) -> Result<Self> {
        let medium = Medium { kind, domain };
        medium.validate()?;
        Ok(medium)
    }

    pub fn constant(c0: T) -> Self {
        Medium {
            kind: MediumKind::Constant { c0 },
            domain: Domain::default(),
        }
    }

    pub fn waveguide() -> Self {
        Medium {
            kind: MediumKind::waveguide_default(),
            domain: Domain::default(),
        }
    }

    pub fn with_domain(mut self, domain: Domain<T>) -> Self {
        self.domain = domain;
        self
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, MediumKind::Constant { .. })
    }

    /// Lower and upper bounds of `c` over the whole plane.
    pub fn speed_bounds(&self) -> (T, T) {
        match self.kind {
            MediumKind::Constant { c0 } => (c0, c0),
            MediumKind::Waveguide { amplitude, .. } => {
                let a = amplitude.abs();
                (T::one() - a, T::one() + a)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, _) = self.speed_bounds();
        if !(lo > T::zero()) {
            return Err(Error::Config(format!(
                "medium speed must stay positive, lower bound is {}",
                to_f64(lo)
            )));
        }
        if !(self.domain.x.0 < self.domain.x.1 && self.domain.y.0 < self.domain.y.1) {
            return Err(Error::Config("empty domain box".into()));
        }
        Ok(())
    }

    /// Checked evaluation: errors when the point lies outside the domain.
    pub fn eval(&self, x: T, y: T) -> Result<Coefficients<T>> {
        self.domain.check(x, y)?;
        let coeffs = self.eval_unchecked(x, y);
        if !coeffs.is_finite() {
            return Err(Error::Integration {
                t: f64::NAN,
                reason: format!("non-finite medium at ({}, {})", to_f64(x), to_f64(y)),
            });
        }
        Ok(coeffs)
    }

    /// Analytic evaluation anywhere in the plane. Used inside integrator
    /// stages, which may probe slightly past the domain boundary.
    #[inline]
    pub fn eval_unchecked(&self, x: T, y: T) -> Coefficients<T> {
        match self.kind {
            MediumKind::Constant { c0 } => Coefficients {
                c: c0,
                c_x: T::zero(),
                c_y: T::zero(),
                c_xx: T::zero(),
                c_xy: T::zero(),
                c_yy: T::zero(),
            },
            MediumKind::Waveguide { amplitude, kx, ky } => {
                let (sx, cx) = (kx * x).sin_cos();
                let (sy, cy) = (ky * y).sin_cos();
                Coefficients {
                    c: T::one() + amplitude * sx * sy,
                    c_x: amplitude * kx * cx * sy,
                    c_y: amplitude * ky * sx * cy,
                    c_xx: -amplitude * kx * kx * sx * sy,
                    c_xy: amplitude * kx * ky * cx * cy,
                    c_yy: -amplitude * ky * ky * sx * sy,
                }
            }
        }
    }
}
