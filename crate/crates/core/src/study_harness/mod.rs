//! Batch studies: convergence in frequency, discretization error, and
//! sweeps over the initial beam parameter, with CSV/JSON/SVG output.

mod config;
mod report;
mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::info;
use num_complex::Complex;
use rayon::prelude::*;

pub use config::{MapGrid, StudyConfig, StudyKind};
pub use report::{fit_slope, ErrorReport, ReportRow, SlopeFit, CSV_HEADER};
pub use svg::{LogLogChart, Series};

use crate::beam_model::{beam_width, find_crossing, BeamTaylor, Cutoff};
use crate::cc_analysis::{error_constants, relative_error, width_vs_q0};
use crate::error::{Error, Result};
use crate::medium::{Medium, MediumKind};
use crate::ray_engine::{trace, DynamicData, RayLaunch};
use crate::reference_fields::{exact_plane_wave, go_field, GaussianBeamExact, GoConfig, GoSolution};
use crate::superposition::{
    field_discrete, field_discrete_at, field_quadrature, plane_wave_bundle, BeamBundle, ComplexFieldSamples,
    SourceCurve, SuperposConfig,
};

type Bundle = BeamBundle<f64>;
type Field = ComplexFieldSamples<f64>;

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn build(
    cfg: &StudyConfig,
    medium: &Medium<f64>,
    omega: f64,
    q0: f64,
    h_fraction: f64,
    s_range: (f64, f64),
) -> Result<Bundle> {
    let mut sc = SuperposConfig::new(omega, q0, cfg.y_star, Vec::new());
    sc.h = h_fraction * sc.eta0();
    sc.cutoff = Cutoff::new(cfg.alpha);
    sc.dt = cfg.dt;
    sc.s_range = s_range;
    sc.trace_to = cfg.map_y.map(|m| m.to.max(m.from));
    plane_wave_bundle(medium, &sc, &cfg.source)
}

/// `max(alpha, 6 eta)` with the widest beam of the bundle.
fn margin(cfg: &StudyConfig, bundle: &Bundle) -> Result<f64> {
    Ok(cfg.alpha.max(6.0 * bundle.max_width()?))
}

fn interior(cfg: &StudyConfig, margin: f64) -> Result<Vec<f64>> {
    let (lo, hi) = (cfg.receiver_window.0 + margin, cfg.receiver_window.1 - margin);
    if !(lo < hi) {
        return Err(Error::Coverage(format!(
            "receiver window [{}, {}] is narrower than twice the margin {margin}",
            cfg.receiver_window.0, cfg.receiver_window.1
        )));
    }
    Ok(linspace(lo, hi, cfg.receivers))
}

/// Width of the beam crossing closest to `x`.
fn width_near(bundle: &Bundle, x: f64) -> Result<f64> {
    let b = bundle
        .beams
        .iter()
        .min_by(|a, b| (a.crossing.x - x).abs().total_cmp(&(b.crossing.x - x).abs()))
        .ok_or_else(|| Error::Coverage("bundle has no beams".into()))?;
    beam_width(bundle.config.omega, &b.crossing, &bundle.medium)
}

/// Reference solution on the receiver line.
pub enum Reference {
    PlaneWave { c0: f64, angle: f64, y: f64 },
    Go(GoSolution<f64>),
}

impl Reference {
    pub fn build(cfg: &StudyConfig, medium: &Medium<f64>, s_range: (f64, f64), xs: &[f64]) -> Result<Self> {
        match (cfg.medium, cfg.source) {
            (MediumKind::Constant { c0 }, SourceCurve::Flat | SourceCurve::Oblique { .. }) => {
                Ok(Reference::PlaneWave {
                    c0,
                    angle: cfg.source.shot_angle(0.0),
                    y: cfg.y_star,
                })
            }
            _ => {
                let go = GoConfig {
                    y_star: cfg.y_star,
                    fan_spacing: cfg.fan_spacing,
                    s_range,
                    dt: cfg.dt,
                    receiver_xs: xs.to_vec(),
                };
                Ok(Reference::Go(go_field(medium, &cfg.source, &go)?))
            }
        }
    }

    pub fn field(&self, omega: f64, xs: &[f64]) -> Field {
        match self {
            Reference::PlaneWave { c0, angle, y } => exact_plane_wave(*c0, *angle, omega, *y, xs),
            Reference::Go(go) => go.field(omega),
        }
    }
}

/// Leading-order relative error when a closed form exists.
fn analytic_prediction(cfg: &StudyConfig, omega: f64, q0: f64) -> Option<f64> {
    match (cfg.medium, cfg.source) {
        (MediumKind::Constant { c0: 1.0 }, SourceCurve::Flat | SourceCurve::Circle | SourceCurve::Parabola) => {
            error_constants(q0, cfg.y_star, omega, cfg.source.second_derivative(0.0))
                .ok()
                .map(|k| relative_error(&k))
        }
        _ => None,
    }
}

fn row(omega: f64, q0: f64, h: f64, eta: f64, approx: &Field, reference: &Field, pred: Option<f64>) -> ReportRow {
    let max_error = approx.max_abs_diff(reference);
    ReportRow {
        omega,
        q0,
        h,
        eta,
        max_error,
        rel_error: max_error / reference.max_abs(),
        analytic_pred: pred,
    }
}

/// Maximum error of the beam sum against the reference field for each
/// frequency, with the fitted log-log slope.
pub fn run_converge_omega(cfg: &StudyConfig) -> Result<ErrorReport> {
    cfg.validate(StudyKind::ConvergeOmega)?;
    if cfg.single_beam {
        return run_single_beam(cfg);
    }
    let q0 = cfg.q0[0];
    let s_range = cfg.source_range(cfg.omegas[0], q0);
    let medium = cfg.medium(s_range)?;
    let bundles: Vec<Bundle> = cfg
        .omegas
        .par_iter()
        .map(|&w| build(cfg, &medium, w, q0, cfg.h_fraction, s_range))
        .collect::<Result<_>>()?;
    let mut m = 0.0f64;
    for b in &bundles {
        m = m.max(margin(cfg, b)?);
    }
    let xs = interior(cfg, m)?;
    let reference = Reference::build(cfg, &medium, s_range, &xs)?;
    let center = 0.5 * (xs[0] + xs[xs.len() - 1]);
    let mut report = ErrorReport::new(StudyKind::ConvergeOmega);
    let mut missed = 0usize;
    for b in bundles {
        let b = b.with_receivers(xs.clone())?;
        let omega = b.config.omega;
        let u = field_discrete(&b);
        let r = reference.field(omega, &xs);
        missed += b.missed;
        let eta = width_near(&b, center)?;
        report.rows.push(row(
            omega,
            q0,
            b.config.h,
            eta,
            &u,
            &r,
            analytic_prediction(cfg, omega, q0),
        ));
        info!(
            "omega = {omega}: max error {:e}",
            report.rows.last().map_or(0.0, |r| r.max_error)
        );
    }
    let pts: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.omega, r.max_error)).collect();
    report.fit = Some(fit_slope(&pts, true)?);
    report.extras.insert("interior_lo".into(), xs[0]);
    report.extras.insert("interior_hi".into(), xs[xs.len() - 1]);
    report.extras.insert("missed_beams".into(), missed as f64);
    Ok(report)
}

/// One isolated beam against the exact propagation of its own initial
/// data in a constant medium.
fn run_single_beam(cfg: &StudyConfig) -> Result<ErrorReport> {
    let MediumKind::Constant { c0 } = cfg.medium else {
        return Err(Error::Config("the single-beam study needs a constant medium".into()));
    };
    let q0 = cfg.q0[0];
    let medium = cfg.medium(cfg.source_range(cfg.omegas[0], q0))?;
    let theta = cfg.beam_angle_deg.to_radians();
    if !(theta.sin() > 0.0) {
        return Err(Error::Config("beam must travel upwards".into()));
    }
    let mut launch = RayLaunch::new((0.0, 0.0), theta, 3.0 * (cfg.y_star + 1.0) / (c0 * theta.sin()), cfg.dt);
    launch.stop_above = Some(cfg.y_star);
    let tr = trace(&medium, &launch, Some(DynamicData::beam(q0)))?;
    let crossing = find_crossing(&tr, &medium, cfg.y_star)?;
    let taylor = BeamTaylor::new(&crossing, &medium, crossing.spreading)?;
    let mut report = ErrorReport::new(StudyKind::ConvergeOmega);
    for &omega in &cfg.omegas {
        let eta = beam_width(omega, &crossing, &medium)?;
        let xs = linspace(crossing.x - 6.0 * eta, crossing.x + 6.0 * eta, cfg.receivers);
        let values = xs.iter().map(|&x| taylor.eval(x, omega, &Cutoff::none())).collect();
        let u = Field { xs: xs.clone(), values };
        let exact = GaussianBeamExact {
            c0,
            omega,
            q0: Complex::from(q0),
            p0: Complex::new(0.0, 1.0),
            origin: (0.0, 0.0),
            theta,
        }
        .on_line(cfg.y_star, &xs, cfg.exact_nodes);
        report.rows.push(row(omega, q0, 0.0, eta, &u, &exact, None));
    }
    let pts: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.omega, r.max_error)).collect();
    report.fit = Some(fit_slope(&pts, true)?);
    report.extras.insert("single_beam".into(), 1.0);
    report.extras.insert("crossing_x".into(), crossing.x);
    Ok(report)
}

/// Discrete sum against a finely resolved sum for each spacing of the
/// sweep at the first configured frequency.
pub fn run_discretize(cfg: &StudyConfig) -> Result<ErrorReport> {
    cfg.validate(StudyKind::Discretize)?;
    let (omega, q0) = (cfg.omegas[0], cfg.q0[0]);
    let s_range = cfg.source_range(omega, q0);
    let medium = cfg.medium(s_range)?;
    let base = build(cfg, &medium, omega, q0, cfg.h_fraction, s_range)?;
    let xs = interior(cfg, margin(cfg, &base)?)?;
    let base = base.with_receivers(xs.clone())?;
    let center = 0.5 * (xs[0] + xs[xs.len() - 1]);
    let eta = width_near(&base, center)?;

    let reference = Reference::build(cfg, &medium, s_range, &xs)?;
    let u_base = field_discrete(&base);
    let taylor_error = u_base.max_abs_diff(&reference.field(omega, &xs));
    let base_disc = u_base.max_abs_diff(&field_quadrature(&base, cfg.refine)?);
    drop(base);

    let mut report = ErrorReport::new(StudyKind::Discretize);
    for &f in &cfg.h_fractions {
        let b = build(cfg, &medium, omega, q0, f, s_range)?.with_receivers(xs.clone())?;
        let u = field_discrete(&b);
        let q = field_quadrature(&b, cfg.refine)?;
        report.rows.push(row(omega, q0, b.config.h, eta, &u, &q, None));
        info!(
            "h = {:e}: discretization error {:e}",
            b.config.h,
            report.rows.last().map_or(0.0, |r| r.max_error)
        );
    }
    for (k, w) in report.rows.windows(2).enumerate() {
        report
            .extras
            .insert(format!("ratio_{}", k + 1), w[1].max_error / w[0].max_error);
    }
    report.extras.insert("taylor_error_default_h".into(), taylor_error);
    report.extras.insert("discretization_error_default_h".into(), base_disc);
    Ok(report)
}

/// Measured and leading-order relative errors across initial beam
/// parameters. The receiver window is kept as the evaluation interval and
/// the source interval is padded per `Q0`.
pub fn run_q0_sweep(cfg: &StudyConfig) -> Result<ErrorReport> {
    cfg.validate(StudyKind::Q0Sweep)?;
    if !matches!(cfg.medium, MediumKind::Constant { .. }) {
        return Err(Error::Config("the Q0 sweep needs a constant medium".into()));
    }
    let omega = cfg.omegas[0];
    let xs = linspace(cfg.receiver_window.0, cfg.receiver_window.1, cfg.receivers);
    let center = 0.5 * (cfg.receiver_window.0 + cfg.receiver_window.1);
    let mut report = ErrorReport::new(StudyKind::Q0Sweep);
    for &q0 in &cfg.q0 {
        let probe = SuperposConfig::new(omega, q0, cfg.y_star, xs.clone());
        let pad = probe.default_pad().max(cfg.alpha) + 1.0;
        let mut s_range = cfg
            .s_range
            .unwrap_or((cfg.receiver_window.0 - pad, cfg.receiver_window.1 + pad));
        if let SourceCurve::Circle = cfg.source {
            s_range = (s_range.0.max(-0.98), s_range.1.min(0.98));
        }
        let medium = cfg.medium(s_range)?;
        let b = build(cfg, &medium, omega, q0, cfg.h_fraction, s_range)?.with_receivers(xs.clone())?;
        let reference = Reference::build(cfg, &medium, s_range, &xs)?;
        let u = field_discrete(&b);
        let eta = width_near(&b, center)?;
        report.rows.push(row(
            omega,
            q0,
            b.config.h,
            eta,
            &u,
            &reference.field(omega, &xs),
            analytic_prediction(cfg, omega, q0),
        ));
    }
    let preds: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter_map(|r| r.analytic_pred.map(|p| (r.q0, p)))
        .collect();
    if preds.len() >= 2 {
        let n = preds.len();
        report
            .extras
            .insert("small_q0_slope".into(), fit_slope(&preds[..2], true)?.slope);
        report
            .extras
            .insert("large_q0_slope".into(), fit_slope(&preds[n - 2..], true)?.slope);
        let peak = preds.iter().fold(preds[0], |a, &p| if p.1 > a.1 { p } else { a });
        report.extras.insert("analytic_peak_q0".into(), peak.0);
    }
    let widths = width_vs_q0(cfg.y_star, omega, &cfg.q0)?;
    report.extras.insert("width_argmin_q0".into(), widths.argmin);
    Ok(report)
}

/// Beam sum and reference on the receiver line, and optionally `|u|` on a
/// stack of horizontal lines.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub beam: Field,
    pub reference: Field,
    pub map: Option<Vec<(f64, Field)>>,
}

pub fn run_field_dump(cfg: &StudyConfig) -> Result<FieldDump> {
    cfg.validate(StudyKind::FieldDump)?;
    let (omega, q0) = (cfg.omegas[0], cfg.q0[0]);
    let s_range = cfg.source_range(omega, q0);
    let medium = cfg.medium(s_range)?;
    let xs = linspace(cfg.receiver_window.0, cfg.receiver_window.1, cfg.receivers);
    let b = build(cfg, &medium, omega, q0, cfg.h_fraction, s_range)?.with_receivers(xs.clone())?;
    let beam = field_discrete(&b);
    let reference = Reference::build(cfg, &medium, s_range, &xs)?.field(omega, &xs);
    let map = match cfg.map_y {
        Some(grid) if grid.count >= 1 => {
            let ys = if grid.count == 1 {
                vec![grid.from]
            } else {
                linspace(grid.from, grid.to, grid.count)
            };
            let mut lines = Vec::with_capacity(ys.len());
            for y in ys {
                lines.push((y, field_discrete_at(&b, y, &xs)?));
            }
            Some(lines)
        }
        _ => None,
    };
    Ok(FieldDump { beam, reference, map })
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

impl FieldDump {
    pub fn line_csv(&self) -> String {
        let mut out = String::from("x,abs_u,arg_u,abs_ref,arg_ref\n");
        for ((x, u), r) in self.beam.xs.iter().zip(&self.beam.values).zip(&self.reference.values) {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt(*x),
                fmt(u.norm()),
                fmt(u.arg()),
                fmt(r.norm()),
                fmt(r.arg())
            );
        }
        out
    }

    pub fn map_csv(&self) -> Option<String> {
        self.map.as_ref().map(|lines| {
            let mut out = String::from("y,x,abs_u\n");
            for (y, f) in lines {
                for (x, u) in f.xs.iter().zip(&f.values) {
                    let _ = writeln!(out, "{},{},{}", fmt(*y), fmt(*x), fmt(u.norm()));
                }
            }
            out
        })
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut written = vec![report::write_file(dir, "field.csv", &self.line_csv())?];
        if let Some(map) = self.map_csv() {
            written.push(report::write_file(dir, "field_map.csv", &map)?);
        }
        Ok(written)
    }
}

/// Runs one study and writes its outputs into `out`.
pub fn run(kind: StudyKind, cfg: &StudyConfig, out: &Path) -> Result<Vec<PathBuf>> {
    match kind {
        StudyKind::ConvergeOmega => run_converge_omega(cfg)?.write(out, cfg.svg),
        StudyKind::Discretize => run_discretize(cfg)?.write(out, cfg.svg),
        StudyKind::Q0Sweep => run_q0_sweep(cfg)?.write(out, cfg.svg),
        StudyKind::FieldDump => run_field_dump(cfg)?.write(out),
    }
}
