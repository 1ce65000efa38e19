//! First-order Gaussian beams evaluated on a horizontal receiver line.
//!
//! The phase is expanded to second order and the amplitude to zeroth order
//! around the point where the central ray meets the line.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::medium::Medium;
use crate::ray_engine::{phase_hessian, rhs, AmplitudeBranch, RaySample, RayTrace};
use crate::scalar::{imag_unit, lit, to_f64, Real};

/// Smooth compactly supported cutoff: one on `|r| <= alpha/2`, zero beyond `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff<T> {
    pub alpha: T,
}

impl<T: Real> Cutoff<T> {
    pub fn new(alpha: T) -> Self {
        Cutoff { alpha }
    }

    /// Identically one.
    pub fn none() -> Self {
        Cutoff { alpha: T::infinity() }
    }

    pub fn value(&self, r: T) -> T {
        let r = r.abs();
        let half = self.alpha / lit(2.0);
        if r <= half {
            return T::one();
        }
        if r >= self.alpha {
            return T::zero();
        }
        let z = (r - half) / half;
        let f = |z: T| {
            if z > T::zero() {
                (-T::one() / z).exp()
            } else {
                T::zero()
            }
        };
        let a = f(T::one() - z);
        a / (a + f(z))
    }
}

/// Where a ray meets the receiver line `y = y*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverCrossing<T> {
    pub s: T,
    pub t_cross: T,
    /// Crossing abscissa `X(s)`.
    pub x: T,
    pub sample: RaySample<T>,
    /// Branch-tracked `((c Q(0)) / (c(0) Q))^{1/2}` at the crossing.
    pub spreading: Complex<T>,
}

fn hermite<T: Real>(y0: T, d0: T, y1: T, d1: T, dt: T, tau: T) -> T {
    let u = tau / dt;
    let u2 = u * u;
    let u3 = u2 * u;
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let h00 = two * u3 - three * u2 + T::one();
    let h10 = u3 - two * u2 + u;
    let h01 = -two * u3 + three * u2;
    let h11 = u3 - u2;
    h00 * y0 + h10 * dt * d0 + h01 * y1 + h11 * dt * d1
}

/// Locates the first upward crossing of `y = y*` and interpolates the full
/// ray state there with cubic Hermite polynomials built from the ODE
/// right-hand sides.
pub fn find_crossing<T: Real>(trace: &RayTrace<T>, medium: &Medium<T>, y_star: T) -> Result<ReceiverCrossing<T>> {
    let miss = || Error::MissesReceiver { y_star: to_f64(y_star) };
    let samples = &trace.samples;
    let mut branch = AmplitudeBranch::at_start(trace, medium);
    if samples[0].y == y_star {
        let s0 = samples[0];
        return finish(trace, medium, s0, &mut branch);
    }
    let mut k = None;
    for (i, w) in samples.windows(2).enumerate() {
        branch.advance(&w[0], medium)?;
        if w[0].y <= y_star && w[1].y > y_star {
            k = Some(i);
            break;
        }
    }
    let k = k.ok_or_else(miss)?;
    let (a, b) = (&samples[k], &samples[k + 1]);
    let (sa, sb) = (a.state(), b.state());
    let (fa, fb) = (rhs(medium, &sa), rhs(medium, &sb));
    let dt = b.t - a.t;
    let y_at = |tau: T| hermite(sa[1], fa[1], sb[1], fb[1], dt, tau);

    // bisect until the bracket cannot shrink further
    let (mut lo, mut hi) = (T::zero(), dt);
    for _ in 0..200 {
        let mid = (lo + hi) / lit(2.0);
        if !(mid > lo && mid < hi) {
            break;
        }
        if y_at(mid) <= y_star {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = (lo + hi) / lit(2.0);
    let mut st = sa;
    for i in 0..st.len() {
        st[i] = hermite(sa[i], fa[i], sb[i], fb[i], dt, tau);
    }
    let t = a.t + tau;
    let sample = RaySample {
        t,
        x: st[0],
        y: st[1],
        theta: st[2],
        q: Complex::new(st[3], st[4]),
        p: Complex::new(st[5], st[6]),
        phase: a.phase - a.t + t,
    };
    finish(trace, medium, sample, &mut branch)
}

fn finish<T: Real>(
    trace: &RayTrace<T>,
    medium: &Medium<T>,
    sample: RaySample<T>,
    branch: &mut AmplitudeBranch<T>,
) -> Result<ReceiverCrossing<T>> {
    let k = medium.eval_unchecked(sample.x, sample.y);
    if !(k.c * sample.theta.sin() > T::zero()) {
        return Err(Error::MissesReceiver {
            y_star: to_f64(sample.y),
        });
    }
    let spreading = if trace.dynamic.is_some() {
        branch.advance(&sample, medium)?
    } else {
        Complex::new(T::one(), T::zero())
    };
    Ok(ReceiverCrossing {
        s: trace.source_param,
        t_cross: sample.t,
        x: sample.x,
        sample,
        spreading,
    })
}

/// `eta = 1 / sqrt(omega Im phi_xx)` at the crossing.
pub fn beam_width<T: Real>(omega: T, crossing: &ReceiverCrossing<T>, medium: &Medium<T>) -> Result<T> {
    let im = phase_hessian(&crossing.sample, medium)?.xx.im;
    if !(im > T::zero()) {
        return Err(Error::Degenerate(format!(
            "Im phi_xx = {} at the crossing of s = {}",
            to_f64(im),
            to_f64(crossing.s)
        )));
    }
    Ok(T::one() / (omega * im).sqrt())
}

/// Precomputed per-beam Taylor data; evaluation at a receiver point is a
/// handful of flops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamTaylor<T> {
    pub center: T,
    pub phase: T,
    pub px: T,
    pub phi_xx: Complex<T>,
    pub amp: Complex<T>,
}

impl<T: Real> BeamTaylor<T> {
    pub fn new(crossing: &ReceiverCrossing<T>, medium: &Medium<T>, amp: Complex<T>) -> Result<Self> {
        Ok(BeamTaylor {
            center: crossing.x,
            phase: crossing.sample.phase,
            px: crossing.sample.slowness_x(medium),
            phi_xx: phase_hessian(&crossing.sample, medium)?.xx,
            amp,
        })
    }

    /// Second-order phase `phi~(x)`.
    #[inline]
    pub fn phase_at(&self, x: T) -> Complex<T> {
        let d = x - self.center;
        let half = lit::<T>(0.5);
        self.phi_xx * (half * d * d) + (self.phase + d * self.px)
    }

    #[inline]
    pub fn eval(&self, x: T, omega: T, cutoff: &Cutoff<T>) -> Complex<T> {
        let w = cutoff.value(self.center - x);
        if w == T::zero() {
            return Complex::new(T::zero(), T::zero());
        }
        let e = (imag_unit::<T>() * self.phase_at(x) * omega).exp();
        self.amp * e * w
    }
}

/// Contribution `cutoff(X - x) A exp(i omega phi~(x))` of one beam at `(x, y*)`.
pub fn eval_beam<T: Real>(
    x: T,
    crossing: &ReceiverCrossing<T>,
    medium: &Medium<T>,
    omega: T,
    amp: Complex<T>,
    cutoff: &Cutoff<T>,
) -> Result<Complex<T>> {
    Ok(BeamTaylor::new(crossing, medium, amp)?.eval(x, omega, cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ray_engine::{trace, DynamicData, RayLaunch};
    use std::f64::consts::FRAC_PI_2;

    fn vertical_beam(x0: f64, q0: f64, y_end: f64) -> (Medium<f64>, RayTrace<f64>) {
        let m = Medium::constant(1.0);
        let mut launch = RayLaunch::new((x0, 0.0), FRAC_PI_2, y_end, 1e-3);
        launch.source_param = x0;
        let tr = trace(&m, &launch, Some(DynamicData::beam(q0))).unwrap();
        (m, tr)
    }

    #[test]
    fn cutoff_shape() {
        let c = Cutoff::new(1.0);
        assert_eq!(c.value(0.0), 1.0);
        assert_eq!(c.value(0.5), 1.0);
        assert_eq!(c.value(-0.5), 1.0);
        assert_eq!(c.value(1.0), 0.0);
        assert_eq!(c.value(1.7), 0.0);
        assert!((c.value(0.75) - 0.5_f64).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 0..=100 {
            let v = c.value(0.5 + 0.5 * k as f64 / 100.0);
            assert!(v <= prev);
            prev = v;
        }
        assert_eq!(Cutoff::<f64>::none().value(1e9), 1.0);
    }

    #[test]
    fn vertical_crossing() {
        let (m, tr) = vertical_beam(0.3, 1.0, 2.5);
        let c = find_crossing(&tr, &m, 2.0).unwrap();
        assert!((c.x - 0.3).abs() < 1e-12);
        assert!((c.t_cross - 2.0).abs() < 1e-10);
        assert!((c.sample.y - 2.0).abs() < 1e-10);
        assert!((c.sample.q - Complex::new(1.0, 2.0)).norm() < 1e-10);
    }

    #[test]
    fn crossing_at_start_line() {
        let (m, tr) = vertical_beam(0.0, 1.0, 1.0);
        let c = find_crossing(&tr, &m, 0.0).unwrap();
        assert_eq!(c.t_cross, 0.0);
        assert_eq!(c.spreading, Complex::new(1.0, 0.0));
    }

    #[test]
    fn missing_receiver() {
        let (m, tr) = vertical_beam(0.0, 1.0, 1.0);
        assert!(matches!(find_crossing(&tr, &m, 3.0), Err(Error::MissesReceiver { .. })));
    }

    #[test]
    fn width_closed_form() {
        // eta = ((Q0^2 + y*^2) / (omega Q0))^{1/2} = sqrt(10/100)
        let (m, tr) = vertical_beam(0.0, 1.0, 3.5);
        let c = find_crossing(&tr, &m, 3.0).unwrap();
        let eta = beam_width(100.0, &c, &m).unwrap();
        assert!((eta - 0.316_227_766_016_837_94).abs() < 1e-10);
        let eta4 = beam_width(400.0, &c, &m).unwrap();
        assert!((eta / eta4 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_decay_and_zero_offset() {
        let (m, tr) = vertical_beam(0.1, 1.0, 2.5);
        let c = find_crossing(&tr, &m, 2.0).unwrap();
        let omega = 200.0;
        let amp = c.spreading;
        let eta = beam_width(omega, &c, &m).unwrap();
        let cut = Cutoff::new(1.0);
        let at_center = eval_beam(c.x, &c, &m, omega, amp, &cut).unwrap();
        let expected = amp * (Complex::new(0.0, omega * c.sample.phase)).exp();
        assert!((at_center - expected).norm() < 1e-12);
        for sign in [-1.0, 1.0] {
            let v = eval_beam(c.x + sign * eta, &c, &m, omega, amp, &cut).unwrap();
            assert!((v.norm() / at_center.norm() - (-0.5f64).exp()).abs() < 1e-12);
        }
        assert_eq!(
            eval_beam(c.x + 1.0001, &c, &m, omega, amp, &cut).unwrap(),
            Complex::new(0.0, 0.0)
        );
    }

    #[test]
    fn log_modulus_is_affine_in_squared_offset() {
        let (m, tr) = vertical_beam(0.0, 1.0, 2.5);
        let c = find_crossing(&tr, &m, 2.0).unwrap();
        let omega = 100.0;
        let eta = beam_width(omega, &c, &m).unwrap();
        let cut = Cutoff::new(1.0);
        let f = |d: f64| {
            eval_beam(c.x + d, &c, &m, omega, c.spreading, &cut)
                .unwrap()
                .norm()
                .ln()
        };
        let base = f(0.0);
        for k in 1..50 {
            let d = 0.5 * k as f64 / 50.0;
            let predicted = base - d * d / (2.0 * eta * eta);
            assert!((f(d) - predicted).abs() < 1e-10);
        }
    }

    #[test]
    fn plateau_is_bitwise_identical_to_no_cutoff() {
        let m = Medium::<f64>::waveguide();
        let mut launch = RayLaunch::new((0.3, 0.0), FRAC_PI_2, 3.0, 1e-3);
        launch.stop_above = Some(2.0);
        let tr = trace(&m, &launch, Some(DynamicData::beam(1.0))).unwrap();
        let c = find_crossing(&tr, &m, 2.0).unwrap();
        let cut = Cutoff::new(1.0);
        for k in 0..=40 {
            let x = c.x - 0.5 + k as f64 / 40.0;
            let a = eval_beam(x, &c, &m, 300.0, c.spreading, &cut).unwrap();
            let b = eval_beam(x, &c, &m, 300.0, c.spreading, &Cutoff::none()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn phase_is_real_on_the_ray() {
        let m = Medium::<f64>::waveguide();
        let mut launch = RayLaunch::new((-0.7, 0.0), FRAC_PI_2, 3.0, 1e-3);
        launch.stop_above = Some(1.3);
        let tr = trace(&m, &launch, Some(DynamicData::beam(0.5))).unwrap();
        let c = find_crossing(&tr, &m, 1.3).unwrap();
        let b = BeamTaylor::new(&c, &m, c.spreading).unwrap();
        assert_eq!(b.phase_at(c.x).im, 0.0);
        assert!(beam_width(50.0, &c, &m).unwrap() > 0.0);
    }
}
