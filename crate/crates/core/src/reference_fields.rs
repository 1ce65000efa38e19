//! Reference solutions: geometrical optics by ray fans, exact plane waves,
//! and the exact Helmholtz propagation of Gaussian initial data.

use num_complex::Complex;
use rayon::prelude::*;

use crate::beam_model::find_crossing;
use crate::error::{Error, Result};
use crate::interp::{hermite, monotone_slopes};
use crate::medium::Medium;
use crate::ray_engine::{trace, DynamicData, RayLaunch};
use crate::scalar::{imag_unit, lit, to_f64, Real};
use crate::superposition::{ComplexFieldSamples, SourceCurve};

/// Ray fan parameters for a geometrical-optics solution on `y = y*`.
#[derive(Debug, Clone, PartialEq)]
pub struct GoConfig<T> {
    pub y_star: T,
    pub fan_spacing: T,
    pub s_range: (T, T),
    pub dt: T,
    pub receiver_xs: Vec<T>,
}

/// Travel time and amplitude of the wavefront from a source curve,
/// interpolated onto receivers.
#[derive(Debug, Clone, PartialEq)]
pub struct GoSolution<T> {
    pub receiver_xs: Vec<T>,
    pub phase: Vec<T>,
    pub amplitude: Vec<T>,
    /// Crossing abscissas of the fan rays.
    pub fan_xs: Vec<T>,
}

impl<T: Real> GoSolution<T> {
    /// `A exp(i omega phi)` at the receivers.
    pub fn field(&self, omega: T) -> ComplexFieldSamples<T> {
        let i = imag_unit::<T>();
        let values = self
            .phase
            .iter()
            .zip(&self.amplitude)
            .map(|(&p, &a)| (i * omega * p).exp() * a)
            .collect();
        ComplexFieldSamples {
            xs: self.receiver_xs.clone(),
            values,
        }
    }
}

struct FanRay<T> {
    x: T,
    phase: T,
    slope: T,
    amplitude: T,
}

fn fan_ray<T: Real>(medium: &Medium<T>, source: &SourceCurve<T>, cfg: &GoConfig<T>, s: T) -> Result<Option<FanRay<T>>> {
    let start = source.point(s);
    let c0 = medium.eval(start.0, start.1)?.c;
    let (c_min, _) = medium.speed_bounds();
    let duration = lit::<T>(3.0) * ((cfg.y_star - start.1).abs() + T::one()) / c_min;
    let mut launch = RayLaunch::new(start, source.shot_angle(s), duration, cfg.dt);
    launch.stop_above = Some(cfg.y_star);
    launch.source_param = s;
    // real dynamic data: unit Q and the wavefront curvature of the source
    let data = DynamicData::real(T::one(), source.curvature(s) / c0);
    let tr = trace(medium, &launch, Some(data))?;
    // Q changing sign before the receiver line is a caustic on this ray
    if tr.samples.iter().any(|q| !(q.q.re > T::zero())) {
        return Err(Error::Caustic { s: to_f64(s) });
    }
    let crossing = match find_crossing(&tr, medium, cfg.y_star) {
        Ok(c) => c,
        Err(Error::MissesReceiver { .. }) => return Ok(None),
        Err(Error::BranchJump { .. }) => return Err(Error::Caustic { s: to_f64(s) }),
        Err(e) => return Err(e),
    };
    if !(crossing.sample.q.re > T::zero()) {
        return Err(Error::Caustic { s: to_f64(s) });
    }
    Ok(Some(FanRay {
        x: crossing.x,
        phase: crossing.sample.phase,
        slope: crossing.sample.slowness_x(medium),
        amplitude: crossing.spreading.re,
    }))
}

/// Geometrical-optics field of unit initial amplitude and zero initial
/// phase on `source`. Phase is interpolated with cubic Hermite polynomials
/// using the exact slope `cos(theta) / c` at each fan ray; amplitude with a
/// shape-preserving cubic.
pub fn go_field<T: Real>(medium: &Medium<T>, source: &SourceCurve<T>, cfg: &GoConfig<T>) -> Result<GoSolution<T>> {
    if !(cfg.fan_spacing > T::zero()) || !(cfg.dt > T::zero()) {
        return Err(Error::Config("fan spacing and dt must be positive".into()));
    }
    let j0 = (cfg.s_range.0 / cfg.fan_spacing).ceil().to_i64().unwrap_or(0);
    let j1 = (cfg.s_range.1 / cfg.fan_spacing).floor().to_i64().unwrap_or(-1);
    let params: Vec<T> = (j0..=j1).map(|j| lit::<T>(j as f64) * cfg.fan_spacing).collect();
    let rays: Vec<FanRay<T>> = params
        .par_iter()
        .map(|&s| fan_ray(medium, source, cfg, s))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if rays.len() < 2 {
        return Err(Error::Coverage(
            "fewer than two fan rays reach the receiver line".into(),
        ));
    }
    for (w, s) in rays.windows(2).zip(&params) {
        if !(w[1].x > w[0].x) {
            return Err(Error::Caustic { s: to_f64(*s) });
        }
    }
    let xs: Vec<T> = rays.iter().map(|r| r.x).collect();
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    if let Some(x) = cfg.receiver_xs.iter().find(|&&x| !(x >= lo && x <= hi)) {
        return Err(Error::Coverage(format!(
            "receiver x = {} outside fan crossings [{}, {}]",
            to_f64(*x),
            to_f64(lo),
            to_f64(hi)
        )));
    }
    let phases: Vec<T> = rays.iter().map(|r| r.phase).collect();
    let slopes: Vec<T> = rays.iter().map(|r| r.slope).collect();
    let amps: Vec<T> = rays.iter().map(|r| r.amplitude).collect();
    let amp_slopes = monotone_slopes(&xs, &amps);
    let phase = cfg
        .receiver_xs
        .iter()
        .map(|&x| hermite(&xs, &phases, &slopes, x))
        .collect();
    let amplitude = cfg
        .receiver_xs
        .iter()
        .map(|&x| hermite(&xs, &amps, &amp_slopes, x))
        .collect();
    Ok(GoSolution {
        receiver_xs: cfg.receiver_xs.clone(),
        phase,
        amplitude,
        fan_xs: xs,
    })
}

/// Plane wave `exp(i omega (x cos a + y sin a) / c0)` launched with zero
/// phase from the line through the origin orthogonal to direction `a`.
pub fn exact_plane_wave<T: Real>(c0: T, angle: T, omega: T, y: T, xs: &[T]) -> ComplexFieldSamples<T> {
    let (sn, cs) = angle.sin_cos();
    let i = imag_unit::<T>();
    let values = xs.iter().map(|&x| (i * omega * (x * cs + y * sn) / c0).exp()).collect();
    ComplexFieldSamples {
        xs: xs.to_vec(),
        values,
    }
}

/// `exp(i omega y*)` on `y = y*` for a unit-speed medium and flat source.
pub fn exact_field_constant<T: Real>(omega: T, y_star: T, xs: &[T]) -> ComplexFieldSamples<T> {
    exact_plane_wave(T::one(), T::FRAC_PI_2(), omega, y_star, xs)
}

/// Exact Helmholtz field in a medium of speed `c0` whose trace on the line
/// through `origin` orthogonal to `theta` is `exp(i omega (P0/Q0) xi^2 / 2)`,
/// propagated towards `theta` by its angular spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBeamExact<T> {
    pub c0: T,
    pub omega: T,
    pub q0: Complex<T>,
    pub p0: Complex<T>,
    pub origin: (T, T),
    pub theta: T,
}

impl<T: Real> GaussianBeamExact<T> {
    /// Field at `(x, y)`, which must lie on the propagation side.
    pub fn eval(&self, x: T, y: T, nodes: usize) -> Complex<T> {
        let (sn, cs) = self.theta.sin_cos();
        let (dx, dy) = (x - self.origin.0, y - self.origin.1);
        let xi = dx * sn - dy * cs;
        let zeta = dx * cs + dy * sn;
        let i = imag_unit::<T>();
        let kappa = self.omega / self.c0;
        // g(xi) = exp(-a xi^2 / 2) with Re a > 0
        let a = -i * self.omega * self.p0 / self.q0;
        let inv_a = a.inv();
        let two = lit::<T>(2.0);
        let norm = (Complex::from(two * T::PI()) * inv_a).sqrt();
        // spectrum falls below 1e-17 past k_max
        let k_max = (two * lit::<T>(39.0) / inv_a.re).sqrt();
        let n = nodes + nodes % 2;
        let dk = two * k_max / lit(n as f64);
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in 0..=n {
            let k = -k_max + dk * lit(j as f64);
            let kz2 = kappa * kappa - k * k;
            let kz = if kz2 >= T::zero() {
                Complex::new(kz2.sqrt(), T::zero())
            } else {
                Complex::new(T::zero(), (-kz2).sqrt())
            };
            let weight = norm * (-(inv_a * (k * k / two))).exp();
            let w = if j == 0 || j == n {
                T::one()
            } else if j % 2 == 1 {
                lit(4.0)
            } else {
                two
            };
            acc = acc + weight * (i * (kz * zeta + k * xi)).exp() * w;
        }
        acc * (dk / lit(3.0)) / (two * T::PI())
    }

    pub fn on_line(&self, y: T, xs: &[T], nodes: usize) -> ComplexFieldSamples<T> {
        let values = xs.par_iter().map(|&x| self.eval(x, y, nodes)).collect();
        ComplexFieldSamples {
            xs: xs.to_vec(),
            values,
        }
    }
}
