//! Plane-wave beam bundles and their discrete and finely resolved sums.

use log::warn;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beam_model::{beam_width, find_crossing, BeamTaylor, Cutoff, ReceiverCrossing};
use crate::error::{Error, Result};
use crate::medium::Medium;
use crate::ray_engine::{trace, DynamicData, RayLaunch, RayTrace};
use crate::scalar::{lit, to_f64, Real};

/// Source curve `x0(s)` from which beams are shot orthogonally.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceCurve<T> {
    /// `y0(s) = 0`.
    Flat,
    /// `y0(s) = -1 + sqrt(1 - s^2)`, defined for `|s| < 1`.
    Circle,
    /// `y0(s) = -s^2 / 2`.
    Parabola,
    /// Line through the origin whose normal makes `angle_deg` with the x-axis.
    Oblique { angle_deg: T },
}

impl<T: Real> SourceCurve<T> {
    fn check(&self, s: T) -> Result<()> {
        if let SourceCurve::Circle = self {
            if !(s.abs() < T::one()) {
                return Err(Error::Config(format!(
                    "circle source parameter s = {} outside (-1, 1)",
                    to_f64(s)
                )));
            }
        }
        Ok(())
    }

    fn oblique_angle(angle_deg: T) -> T {
        angle_deg.to_radians()
    }

    pub fn point(&self, s: T) -> (T, T) {
        match *self {
            SourceCurve::Flat => (s, T::zero()),
            SourceCurve::Circle => (s, (T::one() - s * s).sqrt() - T::one()),
            SourceCurve::Parabola => (s, -s * s / lit(2.0)),
            SourceCurve::Oblique { angle_deg } => {
                let (sn, cs) = Self::oblique_angle(angle_deg).sin_cos();
                (s * sn, -s * cs)
            }
        }
    }

    /// `y0'(s)` for graph curves.
    fn slope(&self, s: T) -> T {
        match *self {
            SourceCurve::Flat | SourceCurve::Oblique { .. } => T::zero(),
            SourceCurve::Circle => -s / (T::one() - s * s).sqrt(),
            SourceCurve::Parabola => -s,
        }
    }

    /// `y0''(s)` for graph curves.
    pub fn second_derivative(&self, s: T) -> T {
        match *self {
            SourceCurve::Flat | SourceCurve::Oblique { .. } => T::zero(),
            SourceCurve::Circle => {
                let w = T::one() - s * s;
                -T::one() / (w * w.sqrt())
            }
            SourceCurve::Parabola => -T::one(),
        }
    }

    /// Orthogonal shooting direction `pi/2 + atan(y0'(s))`.
    pub fn shot_angle(&self, s: T) -> T {
        match *self {
            SourceCurve::Oblique { angle_deg } => Self::oblique_angle(angle_deg),
            _ => T::FRAC_PI_2() + self.slope(s).atan(),
        }
    }

    /// Arc length per unit parameter, `(1 + y0'^2)^{1/2}`.
    pub fn arc_factor(&self, s: T) -> T {
        let d1 = self.slope(s);
        (T::one() + d1 * d1).sqrt()
    }

    /// Signed curvature of the curve, positive when orthogonal rays diverge.
    pub fn curvature(&self, s: T) -> T {
        let d1 = self.slope(s);
        let w = T::one() + d1 * d1;
        -self.second_derivative(s) / (w * w.sqrt())
    }
}

/// Parameters of one beam superposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperposConfig<T> {
    pub omega: T,
    pub q0: T,
    pub p0: Complex<T>,
    pub h: T,
    pub s_range: (T, T),
    pub y_star: T,
    pub receiver_xs: Vec<T>,
    pub cutoff: Cutoff<T>,
    pub dt: T,
    /// Trace rays up to this height instead of `y_star` (for field maps).
    pub trace_to: Option<T>,
}

/// Width at `y*` of a beam in a unit-speed medium, used to size padding.
pub fn constant_medium_width<T: Real>(omega: T, q0: T, y_star: T) -> T {
    ((q0 * q0 + y_star * y_star) / (omega * q0)).sqrt()
}

impl<T: Real> SuperposConfig<T> {
    /// Defaults: `P0 = i`, `h = eta0 / 2`, `alpha = 1`, `dt = 1e-3`, and the
    /// source interval padded by `max(alpha, 6 eta(y*))` around the receivers.
    pub fn new(omega: T, q0: T, y_star: T, receiver_xs: Vec<T>) -> Self {
        let mut cfg = SuperposConfig {
            omega,
            q0,
            p0: Complex::new(T::zero(), T::one()),
            h: T::zero(),
            s_range: (T::zero(), T::zero()),
            y_star,
            receiver_xs,
            cutoff: Cutoff::new(T::one()),
            dt: lit(1e-3),
            trace_to: None,
        };
        cfg.h = cfg.eta0() / lit(2.0);
        cfg.s_range = cfg.default_s_range();
        cfg
    }

    /// Initial beam width; `(2 Q0 / omega)^{1/2}` when `P0 = i`.
    pub fn eta0(&self) -> T {
        let b = self.p0 / Complex::from(self.q0);
        (lit::<T>(2.0) / (self.omega * b.im)).sqrt()
    }

    pub fn default_s_range(&self) -> (T, T) {
        let pad = self.default_pad();
        let (lo, hi) = receiver_extent(&self.receiver_xs);
        (lo - pad, hi + pad)
    }

    pub fn default_pad(&self) -> T {
        let eta = constant_medium_width(self.omega, self.q0, self.y_star);
        self.cutoff.alpha.min(T::max_value()).max(lit::<T>(6.0) * eta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > T::zero()) || !(self.q0 > T::zero()) || !(self.h > T::zero()) {
            return Err(Error::Config("omega, Q0 and h must be positive".into()));
        }
        if !DynamicData::new(Complex::from(self.q0), self.p0).is_beam() {
            return Err(Error::Config("Im(P0/Q0) must be positive".into()));
        }
        let eta0 = self.eta0();
        if !(self.h < eta0) {
            return Err(Error::SpacingTooLarge {
                h: to_f64(self.h),
                eta0: to_f64(eta0),
            });
        }
        if !(self.s_range.0 <= self.s_range.1) {
            return Err(Error::Config("empty source interval".into()));
        }
        if !(self.dt > T::zero()) {
            return Err(Error::Config("dt must be positive".into()));
        }
        Ok(())
    }

    /// Source parameters `s_j = j h` inside the source interval.
    pub fn source_params(&self) -> Vec<T> {
        grid_in(self.s_range, self.h)
    }

    /// Initial amplitude `1 / (sqrt(pi omega) eta0)` of every beam.
    pub fn initial_amplitude(&self) -> T {
        T::one() / ((T::PI() * self.omega).sqrt() * self.eta0())
    }
}

fn receiver_extent<T: Real>(xs: &[T]) -> (T, T) {
    let lo = xs.iter().copied().fold(T::infinity(), T::min);
    let hi = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if lo > hi {
        (T::zero(), T::zero())
    } else {
        (lo, hi)
    }
}

fn grid_in<T: Real>(range: (T, T), h: T) -> Vec<T> {
    let j0 = (range.0 / h).ceil().to_i64().unwrap_or(0);
    let j1 = (range.1 / h).floor().to_i64().unwrap_or(-1);
    (j0..=j1).map(|j| lit::<T>(j as f64) * h).collect()
}

/// Duration generous enough for any ray from the curve to reach `y_end`.
fn trace_duration<T: Real>(medium: &Medium<T>, y_start: T, y_end: T) -> T {
    let (c_min, _) = medium.speed_bounds();
    lit::<T>(3.0) * ((y_end - y_start).abs() + T::one()) / c_min
}

#[derive(Debug, Clone, PartialEq)]
pub struct Beam<T> {
    pub s: T,
    /// Kept for the primary bundle, dropped for refined quadrature bundles.
    pub trace: Option<RayTrace<T>>,
    pub crossing: ReceiverCrossing<T>,
    pub initial_amplitude: Complex<T>,
    pub taylor: BeamTaylor<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamBundle<T> {
    pub beams: Vec<Beam<T>>,
    pub config: SuperposConfig<T>,
    pub medium: Medium<T>,
    pub source: SourceCurve<T>,
    /// Beams excluded because their central ray never reached `y*`.
    pub missed: usize,
}

/// Complex field values on a receiver line.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFieldSamples<T> {
    pub xs: Vec<T>,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> ComplexFieldSamples<T> {
    pub fn zeros(xs: Vec<T>) -> Self {
        let values = vec![Complex::new(T::zero(), T::zero()); xs.len()];
        ComplexFieldSamples { xs, values }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max)
    }
}

fn build_beam<T: Real>(
    medium: &Medium<T>,
    config: &SuperposConfig<T>,
    source: &SourceCurve<T>,
    s: T,
    keep_trace: bool,
) -> Result<Option<Beam<T>>> {
    source.check(s)?;
    let start = source.point(s);
    let y_end = config.trace_to.unwrap_or(config.y_star).max(config.y_star);
    let mut launch = RayLaunch::new(
        start,
        source.shot_angle(s),
        trace_duration(medium, start.1, y_end),
        config.dt,
    );
    launch.stop_above = Some(y_end);
    launch.source_param = s;
    let data = DynamicData::new(Complex::from(config.q0), config.p0);
    let tr = trace(medium, &launch, Some(data))?;
    let crossing = match find_crossing(&tr, medium, config.y_star) {
        Ok(c) => c,
        Err(Error::MissesReceiver { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    // neighbouring beams on a curved source see an extra along-ray phase
    // -kappa d^2 / (2 c0); rescale so the bundle reproduces unit data there
    let c0 = medium.eval(start.0, start.1)?.c;
    let bend = Complex::from(T::one()) - config.p0.inv() * (source.curvature(s) * config.q0 / c0);
    let initial_amplitude = bend.sqrt() * (config.initial_amplitude() * source.arc_factor(s));
    let taylor = BeamTaylor::new(&crossing, medium, crossing.spreading * initial_amplitude)?;
    Ok(Some(Beam {
        s,
        trace: keep_trace.then_some(tr),
        crossing,
        initial_amplitude,
        taylor,
    }))
}

fn build_bundle<T: Real>(
    medium: &Medium<T>,
    config: &SuperposConfig<T>,
    source: &SourceCurve<T>,
    keep_traces: bool,
) -> Result<BeamBundle<T>> {
    config.validate()?;
    let params = config.source_params();
    let built: Vec<Option<Beam<T>>> = params
        .par_iter()
        .map(|&s| build_beam(medium, config, source, s, keep_traces))
        .collect::<Result<_>>()?;
    let missed = built.iter().filter(|b| b.is_none()).count();
    if missed > 0 {
        warn!("{missed} beam(s) do not reach the receiver line and were excluded");
    }
    let beams: Vec<Beam<T>> = built.into_iter().flatten().collect();
    for w in beams.windows(2) {
        if !(w[1].crossing.x > w[0].crossing.x) {
            return Err(Error::Caustic { s: to_f64(w[1].s) });
        }
    }
    let bundle = BeamBundle {
        beams,
        config: config.clone(),
        medium: *medium,
        source: *source,
        missed,
    };
    bundle.check_coverage()?;
    Ok(bundle)
}

/// One beam per `s_j = j h`, shot orthogonally from `source`, with initial
/// amplitude `1 / (sqrt(pi omega) eta0)` and zero initial phase. On curved
/// sources the amplitude carries the factor
/// `J(s) (1 - kappa Q0 / (c0 P0))^{1/2}`, which is exactly 1 on straight lines.
pub fn plane_wave_bundle<T: Real>(
    medium: &Medium<T>,
    config: &SuperposConfig<T>,
    source: &SourceCurve<T>,
) -> Result<BeamBundle<T>> {
    build_bundle(medium, config, source, true)
}

impl<T: Real> BeamBundle<T> {
    /// Largest beam width at the receiver line.
    pub fn max_width(&self) -> Result<T> {
        let mut eta = T::zero();
        for b in &self.beams {
            eta = eta.max(beam_width(self.config.omega, &b.crossing, &self.medium)?);
        }
        Ok(eta)
    }

    /// Same beams evaluated at other receivers; re-checks coverage.
    pub fn with_receivers(mut self, xs: Vec<T>) -> Result<Self> {
        self.config.receiver_xs = xs;
        self.check_coverage()?;
        Ok(self)
    }

    /// Every receiver must see all beams that can reach it: the crossings
    /// must extend past the receivers by the cutoff radius or by the
    /// distance where the Gaussian tail drops below 1e-12.
    fn check_coverage(&self) -> Result<()> {
        if self.config.receiver_xs.is_empty() || self.beams.is_empty() {
            return Ok(());
        }
        let tail = lit::<T>(7.5) * self.max_width()?;
        let need = self.config.cutoff.alpha.min(tail);
        let (lo, hi) = receiver_extent(&self.config.receiver_xs);
        let first = self.beams[0].crossing.x;
        let last = self.beams[self.beams.len() - 1].crossing.x;
        if first > lo - need || last < hi + need {
            return Err(Error::Coverage(format!(
                "crossings span [{}, {}] but receivers [{}, {}] need a margin of {}; widen the source interval",
                to_f64(first),
                to_f64(last),
                to_f64(lo),
                to_f64(hi),
                to_f64(need)
            )));
        }
        Ok(())
    }
}

fn sum_beams<T: Real>(beams: &[Beam<T>], config: &SuperposConfig<T>, h: T) -> ComplexFieldSamples<T> {
    let scale = config.omega.sqrt() * h;
    let omega = config.omega;
    let cutoff = config.cutoff;
    // fixed beam order per receiver keeps results independent of worker count
    let values = config
        .receiver_xs
        .par_iter()
        .map(|&x| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for b in beams {
                acc = acc + b.taylor.eval(x, omega, &cutoff);
            }
            acc * scale
        })
        .collect();
    ComplexFieldSamples {
        xs: config.receiver_xs.clone(),
        values,
    }
}

/// `u(x) = omega^{1/2} h sum_j beam_j(x)` at every receiver.
pub fn field_discrete<T: Real>(bundle: &BeamBundle<T>) -> ComplexFieldSamples<T> {
    sum_beams(&bundle.beams, &bundle.config, bundle.config.h)
}

/// The same sum at spacing `h / refine`, with the extra beams traced from
/// scratch. Approximates the superposition integral.
pub fn field_quadrature<T: Real>(bundle: &BeamBundle<T>, refine: usize) -> Result<ComplexFieldSamples<T>> {
    if refine == 0 {
        return Err(Error::Config("refine must be at least 1".into()));
    }
    if refine == 1 {
        return Ok(field_discrete(bundle));
    }
    let mut fine = bundle.config.clone();
    fine.h = bundle.config.h / lit(refine as f64);
    let fine_bundle = build_bundle(&bundle.medium, &fine, &bundle.source, false)?;
    Ok(sum_beams(&fine_bundle.beams, &fine, fine.h))
}

/// Discrete sum evaluated on another horizontal line `y`, re-expanding each
/// beam around its crossing with that line. Needs retained traces that
/// reach `y`.
pub fn field_discrete_at<T: Real>(bundle: &BeamBundle<T>, y: T, xs: &[T]) -> Result<ComplexFieldSamples<T>> {
    let medium = &bundle.medium;
    let mut taylors = Vec::with_capacity(bundle.beams.len());
    for b in &bundle.beams {
        let tr = b
            .trace
            .as_ref()
            .ok_or_else(|| Error::Config("bundle was built without traces".into()))?;
        match find_crossing(tr, medium, y) {
            Ok(c) => taylors.push(BeamTaylor::new(&c, medium, c.spreading * b.initial_amplitude)?),
            Err(Error::MissesReceiver { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    let cfg = &bundle.config;
    let scale = cfg.omega.sqrt() * cfg.h;
    let values = xs
        .par_iter()
        .map(|&x| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for b in &taylors {
                acc = acc + b.eval(x, cfg.omega, &cfg.cutoff);
            }
            acc * scale
        })
        .collect();
    Ok(ComplexFieldSamples {
        xs: xs.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    fn constant_config(omega: f64, y_star: f64) -> SuperposConfig<f64> {
        SuperposConfig::new(omega, 1.0, y_star, linspace(-0.5, 0.5, 101))
    }

    #[test]
    fn initial_width_and_spacing_constraint() {
        let mut cfg = constant_config(100.0, 2.0);
        assert!((cfg.eta0() - 0.141_421_356_237_309_5).abs() < 1e-15);
        assert!((cfg.h - cfg.eta0() / 2.0).abs() < 1e-15);
        cfg.h = 0.15;
        assert!(matches!(
            plane_wave_bundle(&Medium::constant(1.0), &cfg, &SourceCurve::Flat),
            Err(Error::SpacingTooLarge { .. })
        ));
    }

    #[test]
    fn source_grid_is_multiples_of_h() {
        let mut cfg = constant_config(100.0, 2.0);
        cfg.h = 0.25;
        cfg.s_range = (-0.6, 0.5);
        assert_eq!(cfg.source_params(), vec![-0.5, -0.25, 0.0, 0.25, 0.5]);
    }

    #[test]
    fn flat_source_initial_phase_is_gaussian() {
        // phi(x, 0, s) = i (x - s)^2 / (omega eta0^2) on the source line
        let cfg = {
            let mut c = constant_config(100.0, 0.0);
            c.s_range = (-2.0, 2.0);
            c
        };
        let bundle = plane_wave_bundle(&Medium::constant(1.0), &cfg, &SourceCurve::Flat).unwrap();
        let eta0 = cfg.eta0();
        for b in bundle.beams.iter().step_by(7) {
            for dx in [-0.1, 0.0, 0.05, 0.2] {
                let x = b.s + dx;
                let expected = Complex::new(0.0, dx * dx / (cfg.omega * eta0 * eta0));
                assert!((b.taylor.phase_at(x) - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn empty_bundle_gives_zero_field() {
        let mut cfg = constant_config(100.0, 2.0);
        cfg.s_range = (0.01, 0.02);
        cfg.receiver_xs.clear();
        let bundle = plane_wave_bundle(&Medium::constant(1.0), &cfg, &SourceCurve::Flat).unwrap();
        assert!(bundle.beams.is_empty());
        let f = field_discrete(&bundle);
        assert!(f.values.is_empty());
        let mut cfg2 = cfg.clone();
        cfg2.receiver_xs = vec![0.0, 0.3];
        let empty = BeamBundle {
            beams: vec![],
            config: cfg2,
            medium: Medium::constant(1.0),
            source: SourceCurve::Flat,
            missed: 0,
        };
        assert!(field_discrete(&empty)
            .values
            .iter()
            .all(|v| *v == Complex::new(0.0, 0.0)));
    }

    #[test]
    fn refine_one_is_identity() {
        let cfg = constant_config(100.0, 2.0);
        let bundle = plane_wave_bundle(&Medium::constant(1.0), &cfg, &SourceCurve::Flat).unwrap();
        assert_eq!(field_quadrature(&bundle, 1).unwrap(), field_discrete(&bundle));
        assert!(field_quadrature(&bundle, 0).is_err());
    }

    #[test]
    fn linearity_over_disjoint_bundles() {
        let mut cfg = constant_config(200.0, 2.0);
        cfg.s_range = (-2.5, 2.5);
        let m = Medium::<f64>::waveguide().with_domain(crate::medium::Domain {
            x: (-4.0, 4.0),
            y: (0.0, 4.0),
        });
        let bundle = plane_wave_bundle(&m, &cfg, &SourceCurve::Flat).unwrap();
        let whole = field_discrete(&bundle);
        let mid = bundle.beams.len() / 2;
        let mut left = bundle.clone();
        left.beams.truncate(mid);
        let mut right = bundle.clone();
        right.beams.drain(..mid);
        let (l, r) = (field_discrete(&left), field_discrete(&right));
        for ((w, a), b) in whole.values.iter().zip(&l.values).zip(&r.values) {
            assert!((w - (a + b)).norm() < 1e-13);
        }
    }

    #[test]
    fn translation_equivariance_in_constant_medium() {
        let cfg = constant_config(100.0, 2.0);
        let m = Medium::constant(1.0).with_domain(crate::medium::Domain {
            x: (-5.0, 5.0),
            y: (0.0, 4.0),
        });
        let base = field_discrete(&plane_wave_bundle(&m, &cfg, &SourceCurve::Flat).unwrap());
        let mut shifted = cfg.clone();
        let delta = 3.0 * cfg.h;
        shifted.receiver_xs.iter_mut().for_each(|x| *x += delta);
        shifted.s_range = (cfg.s_range.0 + delta, cfg.s_range.1 + delta);
        let moved = field_discrete(&plane_wave_bundle(&m, &shifted, &SourceCurve::Flat).unwrap());
        for (a, b) in base.values.iter().zip(&moved.values) {
            assert!((a.norm() - b.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn curved_sources() {
        let c = SourceCurve::<f64>::Circle;
        assert_eq!(c.point(0.0), (0.0, 0.0));
        assert_eq!(c.second_derivative(0.0), -1.0);
        assert_eq!(c.curvature(0.0), 1.0);
        assert!(c.check(1.0).is_err());
        let p = SourceCurve::<f64>::Parabola;
        assert!((p.shot_angle(0.5) - (std::f64::consts::FRAC_PI_2 + (-0.5f64).atan())).abs() < 1e-15);
        let o = SourceCurve::Oblique { angle_deg: 45.0 };
        assert!((o.shot_angle(3.0) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let (x, y) = o.point(1.0);
        assert!((x - 0.5f64.sqrt()).abs() < 1e-15 && (y + 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn narrow_source_interval_fails_coverage() {
        let mut cfg = constant_config(100.0, 2.0);
        cfg.s_range = (-0.6, 0.6);
        assert!(matches!(
            plane_wave_bundle(&Medium::constant(1.0), &cfg, &SourceCurve::Flat),
            Err(Error::Coverage(_))
        ));
    }
}
