//! Central-ray and dynamic ray tracing with a fixed-step classical RK4.
//!
//! The state is `(x, y, theta, Re Q, Im Q, Re P, Im P)`; the kinematic part
//! does not depend on `(P, Q)`, so a central ray traced alone and the same ray
//! traced together with its dynamic data follow identical trajectories.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::medium::Medium;
use crate::scalar::{lit, to_f64, Real};

const STATE: usize = 7;
type State<T> = [T; STATE];

/// Initial data of the dynamic ray tracing system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicData<T> {
    pub q0: Complex<T>,
    pub p0: Complex<T>,
}

impl<T: Real> DynamicData<T> {
    pub fn new(q0: Complex<T>, p0: Complex<T>) -> Self {
        DynamicData { q0, p0 }
    }

    /// `Q0 > 0`, `P0 = i`.
    pub fn beam(q0: T) -> Self {
        DynamicData {
            q0: Complex::new(q0, T::zero()),
            p0: Complex::new(T::zero(), T::one()),
        }
    }

    /// Real data for a geometrical-optics ray tube; `p0 = kappa / c0` sets
    /// the initial wavefront curvature.
    pub fn real(q0: T, p0: T) -> Self {
        DynamicData {
            q0: Complex::new(q0, T::zero()),
            p0: Complex::new(p0, T::zero()),
        }
    }

    /// Non-degenerate Gaussian beam data: `Q0 != 0` and `Im(P0/Q0) > 0`.
    pub fn is_beam(&self) -> bool {
        self.q0.norm_sqr() > T::zero() && (self.p0 / self.q0).im > T::zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySample<T> {
    pub t: T,
    pub x: T,
    pub y: T,
    pub theta: T,
    pub q: Complex<T>,
    pub p: Complex<T>,
    /// Phase on the central ray, `phi(x0) + t`.
    pub phase: T,
}

impl<T: Real> RaySample<T> {
    fn from_state(t: T, phase0: T, s: &State<T>) -> Self {
        RaySample {
            t,
            x: s[0],
            y: s[1],
            theta: s[2],
            q: Complex::new(s[3], s[4]),
            p: Complex::new(s[5], s[6]),
            phase: phase0 + t,
        }
    }

    pub(crate) fn state(&self) -> State<T> {
        [self.x, self.y, self.theta, self.q.re, self.q.im, self.p.re, self.p.im]
    }

    /// `p_x = cos(theta) / c`, the x-component of the phase gradient on the ray.
    pub fn slowness_x(&self, medium: &Medium<T>) -> T {
        self.theta.cos() / medium.eval_unchecked(self.x, self.y).c
    }
}

/// Uniformly sampled ray, possibly truncated where it left the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct RayTrace<T> {
    pub samples: Vec<RaySample<T>>,
    pub dt: T,
    /// Position of the ray's origin on the source curve.
    pub source_param: T,
    /// Travel time at which the ray left the domain, if it did.
    pub exit_time: Option<T>,
    pub dynamic: Option<DynamicData<T>>,
}

impl<T: Real> RayTrace<T> {
    pub fn first(&self) -> &RaySample<T> {
        &self.samples[0]
    }

    pub fn last(&self) -> &RaySample<T> {
        self.samples.last().expect("trace holds at least the initial sample")
    }

    pub fn is_truncated(&self) -> bool {
        self.exit_time.is_some()
    }
}

/// Everything needed to launch one ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayLaunch<T> {
    pub start: (T, T),
    pub theta0: T,
    pub duration: T,
    pub dt: T,
    /// Stop as soon as a sample lies above this height.
    pub stop_above: Option<T>,
    pub source_param: T,
    pub phase0: T,
}

impl<T: Real> RayLaunch<T> {
    pub fn new(start: (T, T), theta0: T, duration: T, dt: T) -> Self {
        RayLaunch {
            start,
            theta0,
            duration,
            dt,
            stop_above: None,
            source_param: T::zero(),
            phase0: T::zero(),
        }
    }
}

#[inline]
pub(crate) fn rhs<T: Real>(medium: &Medium<T>, s: &State<T>) -> State<T> {
    let k = medium.eval_unchecked(s[0], s[1]);
    let (sn, cs) = s[2].sin_cos();
    let two = lit::<T>(2.0);
    let v = (k.c_xx * sn * sn - two * k.c_xy * sn * cs + k.c_yy * cs * cs) / k.c;
    let c2 = k.c * k.c;
    [
        k.c * cs,
        k.c * sn,
        k.c_x * sn - k.c_y * cs,
        c2 * s[5],
        c2 * s[6],
        -v * s[3],
        -v * s[4],
    ]
}

#[inline]
fn axpy<T: Real>(y: &State<T>, a: T, k: &State<T>) -> State<T> {
    let mut out = *y;
    for (o, ki) in out.iter_mut().zip(k) {
        *o = *o + a * *ki;
    }
    out
}

/// Classical RK4 increment `y(t + h) - y(t)`.
#[inline]
pub(crate) fn rk4_increment<T: Real>(medium: &Medium<T>, y: &State<T>, h: T) -> State<T> {
    let half = h / lit(2.0);
    let k1 = rhs(medium, y);
    let k2 = rhs(medium, &axpy(y, half, &k1));
    let k3 = rhs(medium, &axpy(y, half, &k2));
    let k4 = rhs(medium, &axpy(y, h, &k3));
    let sixth = h / lit(6.0);
    let two = lit::<T>(2.0);
    std::array::from_fn(|i| sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
}

/// Running state with compensated accumulation of the RK4 increments, so
/// roundoff does not grow with the number of steps.
struct Accumulator<T> {
    state: State<T>,
    carry: State<T>,
}

impl<T: Real> Accumulator<T> {
    fn new(state: State<T>) -> Self {
        Accumulator {
            state,
            carry: [T::zero(); STATE],
        }
    }

    fn add(&mut self, inc: &State<T>) {
        for ((s, c), &d) in self.state.iter_mut().zip(self.carry.iter_mut()).zip(inc) {
            let y = d - *c;
            let t = *s + y;
            *c = (t - *s) - y;
            *s = t;
        }
    }
}

fn check_beam_positivity<T: Real>(sample: &RaySample<T>) -> Result<()> {
    let ratio = sample.p / sample.q;
    if !(sample.q.norm_sqr() > T::zero()) || !(ratio.im > T::zero()) {
        return Err(Error::InvariantViolation {
            t: to_f64(sample.t),
            value: to_f64(ratio.im),
        });
    }
    Ok(())
}

/// Integrates the coupled central-ray and dynamic system.
///
/// With `dynamic = None` the `(P, Q)` components stay zero.
pub fn trace<T: Real>(
    medium: &Medium<T>,
    launch: &RayLaunch<T>,
    dynamic: Option<DynamicData<T>>,
) -> Result<RayTrace<T>> {
    if !(launch.dt > T::zero()) || !(launch.duration >= launch.dt) {
        return Err(Error::Config(format!(
            "need dt > 0 and duration >= dt, got dt = {}, duration = {}",
            to_f64(launch.dt),
            to_f64(launch.duration)
        )));
    }
    medium.eval(launch.start.0, launch.start.1)?;
    let beam = match dynamic {
        Some(d) => d.is_beam(),
        None => false,
    };
    let d = dynamic.unwrap_or(DynamicData {
        q0: Complex::new(T::zero(), T::zero()),
        p0: Complex::new(T::zero(), T::zero()),
    });
    let state: State<T> = [
        launch.start.0,
        launch.start.1,
        launch.theta0,
        d.q0.re,
        d.q0.im,
        d.p0.re,
        d.p0.im,
    ];
    let steps = (launch.duration / launch.dt).round().to_usize().unwrap_or(1).max(1);

    let mut samples = Vec::with_capacity(steps.min(1 << 16) + 1);
    samples.push(RaySample::from_state(T::zero(), launch.phase0, &state));
    let mut exit_time = None;
    let mut acc = Accumulator::new(state);
    for k in 1..=steps {
        acc.add(&rk4_increment(medium, &acc.state, launch.dt));
        let state = acc.state;
        let t = lit::<T>(k as f64) * launch.dt;
        if state.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration {
                t: to_f64(t),
                reason: "non-finite state".into(),
            });
        }
        if !medium.domain.contains(state[0], state[1]) {
            exit_time = Some(t);
            break;
        }
        let sample = RaySample::from_state(t, launch.phase0, &state);
        if beam {
            check_beam_positivity(&sample)?;
        }
        samples.push(sample);
        if let Some(y_stop) = launch.stop_above {
            if state[1] > y_stop {
                break;
            }
        }
    }
    Ok(RayTrace {
        samples,
        dt: launch.dt,
        source_param: launch.source_param,
        exit_time,
        dynamic,
    })
}

/// Traces the central ray only.
pub fn trace_central<T: Real>(medium: &Medium<T>, start: (T, T), theta0: T, duration: T, dt: T) -> Result<RayTrace<T>> {
    trace(medium, &RayLaunch::new(start, theta0, duration, dt), None)
}

/// Fills `(P, Q)` along an already traced ray, re-running the coupled system
/// from the ray's initial state so `theta(t)` is never interpolated.
pub fn trace_dynamic<T: Real>(
    medium: &Medium<T>,
    ray: &RayTrace<T>,
    q0: Complex<T>,
    p0: Complex<T>,
) -> Result<RayTrace<T>> {
    let data = DynamicData::new(q0, p0);
    if !data.is_beam() {
        return Err(Error::Degenerate(format!(
            "initial data must satisfy Q0 != 0 and Im(P0/Q0) > 0, got Q0 = {}, P0 = {}",
            q0.to_string_lossy(),
            p0.to_string_lossy()
        )));
    }
    let first = ray.first();
    let mut launch = RayLaunch::new((first.x, first.y), first.theta, ray.last().t.max(ray.dt), ray.dt);
    launch.source_param = ray.source_param;
    launch.phase0 = first.phase - first.t;
    trace(medium, &launch, Some(data))
}

trait LossyDisplay {
    fn to_string_lossy(&self) -> String;
}

impl<T: Real> LossyDisplay for Complex<T> {
    fn to_string_lossy(&self) -> String {
        format!("{}{:+}i", to_f64(self.re), to_f64(self.im))
    }
}

/// Complex symmetric 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMatrix2<T> {
    pub xx: Complex<T>,
    pub xy: Complex<T>,
    pub yy: Complex<T>,
}

/// `D^2 phi = H N H^T` at a ray sample, with `H` the rotation by `theta` and
/// `N` built from `P/Q` and the ray-frame speed gradient.
pub fn phase_hessian<T: Real>(sample: &RaySample<T>, medium: &Medium<T>) -> Result<SymMatrix2<T>> {
    if !(sample.q.norm_sqr() > T::zero()) {
        return Err(Error::Degenerate(format!("Q = 0 at t = {}", to_f64(sample.t))));
    }
    let k = medium.eval_unchecked(sample.x, sample.y);
    let (sn, cs) = sample.theta.sin_cos();
    let c1 = sn * k.c_x - cs * k.c_y;
    let c2 = cs * k.c_x + sn * k.c_y;
    let csq = k.c * k.c;
    let n11 = sample.p / sample.q;
    let n12 = Complex::from(-c1 / csq);
    let n22 = Complex::from(-c2 / csq);
    let two = lit::<T>(2.0);
    // rows of H: (sin, cos) and (-cos, sin)
    let xx = n11 * (sn * sn) + n12 * (two * sn * cs) + n22 * (cs * cs);
    let xy = n11 * (-sn * cs) + n12 * (sn * sn - cs * cs) + n22 * (sn * cs);
    let yy = n11 * (cs * cs) - n12 * (two * sn * cs) + n22 * (sn * sn);
    Ok(SymMatrix2 { xx, xy, yy })
}

/// Continuous square-root branch of `(c Q_start) / (c_start Q)` along a ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeBranch<T> {
    c_start: T,
    q_start: Complex<T>,
    arg: T,
}

impl<T: Real> AmplitudeBranch<T> {
    pub fn new(c_start: T, q_start: Complex<T>) -> Self {
        AmplitudeBranch {
            c_start,
            q_start,
            arg: T::zero(),
        }
    }

    pub fn at_start(trace: &RayTrace<T>, medium: &Medium<T>) -> Self {
        let first = trace.first();
        AmplitudeBranch::new(medium.eval_unchecked(first.x, first.y).c, first.q)
    }

    /// Spreading factor `((c Q_start) / (c_start Q))^{1/2}` at `sample`,
    /// continuing the branch from the previously visited sample.
    pub fn advance(&mut self, sample: &RaySample<T>, medium: &Medium<T>) -> Result<Complex<T>> {
        if !(sample.q.norm_sqr() > T::zero()) {
            return Err(Error::Degenerate(format!("Q = 0 at t = {}", to_f64(sample.t))));
        }
        let c = medium.eval_unchecked(sample.x, sample.y).c;
        let ratio = self.q_start * c / (sample.q * self.c_start);
        let pi = T::PI();
        let two_pi = pi + pi;
        let mut jump = ratio.arg() - self.arg;
        jump = jump - two_pi * ((jump + pi) / two_pi).floor();
        if jump.abs() > T::FRAC_PI_2() {
            return Err(Error::BranchJump {
                t: to_f64(sample.t),
                jump: to_f64(jump),
            });
        }
        self.arg = self.arg + jump;
        let half = self.arg / lit(2.0);
        Ok(Complex::from_polar(ratio.norm().sqrt(), half))
    }
}

/// Amplitude `A_start ((c Q(0)) / (c(0) Q))^{1/2}` at every sample of a trace.
pub fn amplitude_on_ray<T: Real>(
    trace: &RayTrace<T>,
    medium: &Medium<T>,
    a_start: Complex<T>,
) -> Result<Vec<Complex<T>>> {
    let mut branch = AmplitudeBranch::at_start(trace, medium);
    trace
        .samples
        .iter()
        .map(|s| branch.advance(s, medium).map(|f| a_start * f))
        .collect()
}
