//! Property and invariant checks across modules.

#[path = "../tests/common/mod.rs"]
mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use crate::cc_analysis::{d_moment, error_constants, relative_error};
use crate::reference_fields::{exact_field_constant, go_field, GoConfig};
use crate::study_harness::{self, fit_slope, StudyConfig};
use crate::{
    field_discrete, field_quadrature, find_crossing, plane_wave_bundle, trace, trace_central, Cutoff, Domain,
    DynamicData, Medium, MediumKind, RayLaunch, SourceCurve, SuperposConfig,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn waveguide_config() -> StudyConfig {
    StudyConfig {
        medium: MediumKind::waveguide_default(),
        ..StudyConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cutoff_is_even_bounded_and_compact(alpha in 0.1f64..3.0, r in -4.0f64..4.0) {
        let c = Cutoff::new(alpha);
        let v = c.value(r);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(v, c.value(-r));
        if r.abs() <= alpha / 2.0 {
            prop_assert_eq!(v, 1.0);
        }
        if r.abs() >= alpha {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn cutoff_is_monotone_in_distance(alpha in 0.1f64..3.0, a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let c = Cutoff::new(alpha);
        let (near, far) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(c.value(near) >= c.value(far));
    }

    #[test]
    fn beams_stay_nondegenerate_in_waveguide(
        x0 in -1.5f64..1.5,
        y0 in 0.05f64..1.0,
        theta in (PI / 6.0)..(5.0 * PI / 6.0),
        log_q0 in -1.0f64..1.0,
    ) {
        let m = Medium::<f64>::waveguide();
        let tr = trace(&m, &RayLaunch::new((x0, y0), theta, 3.0, 1e-3), Some(DynamicData::beam(10f64.powf(log_q0))));
        prop_assert!(tr.is_ok());
        for s in &tr.unwrap().samples {
            prop_assert!((s.p / s.q).im > 0.0);
        }
    }

    #[test]
    fn constant_medium_dynamics_are_linear(q0 in 0.05f64..20.0, t in 0.1f64..5.0) {
        let m = Medium::constant(1.0).with_domain(Domain { x: (-1.0, 1.0), y: (-1.0, 10.0) });
        let dt = 1e-3;
        let tr = trace(&m, &RayLaunch::new((0.0, 0.0), FRAC_PI_2, (t / dt).round() * dt, dt), Some(DynamicData::beam(q0))).unwrap();
        let s = tr.last();
        prop_assert!((s.q - Complex64::new(q0, s.t)).norm() < 1e-12);
        prop_assert!((s.p - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn speed_matches_medium_to_fourth_order(x0 in -1.0f64..1.0, theta in (PI / 4.0)..(3.0 * PI / 4.0)) {
        let m = Medium::<f64>::waveguide();
        let dt = 1e-3;
        let tr = trace_central(&m, (x0, 0.1), theta, 2.0, dt).unwrap();
        for w in tr.samples.windows(5) {
            // fourth-order central difference of the positions
            let d = |a: f64, b: f64, c: f64, e: f64| (-e + 8.0 * c - 8.0 * b + a) / (12.0 * dt);
            let vx = d(w[0].x, w[1].x, w[3].x, w[4].x);
            let vy = d(w[0].y, w[1].y, w[3].y, w[4].y);
            let c = m.eval_unchecked(w[2].x, w[2].y).c;
            prop_assert!(((vx * vx + vy * vy).sqrt() - c).abs() < 1e-9);
        }
    }

    #[test]
    fn moments_match_quadrature(c1 in -2.0f64..2.0, half_p in 0usize..4) {
        let p = 2 * half_p;
        let d = d_moment(p, c1).unwrap() - common::moment_by_quadrature(p as i32, c1);
        prop_assert!(d.norm() < 1e-9);
        prop_assert_eq!(d_moment(p + 1, c1).unwrap().norm(), 0.0);
    }

    #[test]
    fn power_laws_are_recovered(k in -3.0f64..3.0, scale in 0.01f64..100.0) {
        let pts: Vec<(f64, f64)> = [1.0f64, 2.0, 5.0, 10.0].iter().map(|&x| (x, scale * x.powf(k))).collect();
        let f = fit_slope(&pts, true).unwrap();
        prop_assert!((f.slope - k).abs() < 1e-10);
        prop_assert!(f.residual < 1e-10);
    }

    #[test]
    fn line_error_vanishes_on_source(q0 in 0.01f64..100.0, omega in 10.0f64..1000.0) {
        let k = error_constants(q0, 0.0, omega, 0.0).unwrap();
        prop_assert_eq!(relative_error(&k), 0.0);
    }
}

#[test]
fn phase_is_stationary_along_the_source() {
    // d t(s) / ds = p_x X'(s) at the receiver line for orthogonally shot rays
    let m = Medium::<f64>::waveguide();
    let (y_star, ds) = (2.0, 1e-4);
    let crossing = |s: f64| {
        let mut launch = RayLaunch::new((s, 0.0), FRAC_PI_2, 4.0, 1e-3);
        launch.stop_above = Some(y_star);
        launch.source_param = s;
        let tr = trace(&m, &launch, Some(DynamicData::beam(1.0))).unwrap();
        find_crossing(&tr, &m, y_star).unwrap()
    };
    let mut worst = 0.0f64;
    for s in common::linspace(-1.2, 1.2, 13) {
        let (lo, mid, hi) = (crossing(s - ds), crossing(s), crossing(s + ds));
        let dt_ds = (hi.t_cross - lo.t_cross) / (2.0 * ds);
        let dx_ds = (hi.x - lo.x) / (2.0 * ds);
        worst = worst.max((dt_ds - mid.sample.slowness_x(&m) * dx_ds).abs());
    }
    assert!(worst < 1e-4 * ds, "max residual {worst:e}");
}

#[test]
fn quadrature_is_self_converged() {
    let cfg = StudyConfig::default();
    let s_range = cfg.source_range(100.0, 1.0);
    let medium = cfg.medium(s_range).unwrap();
    let xs = common::linspace(-0.5, 0.5, 101);
    let mut sc = SuperposConfig::new(100.0, 1.0, 2.0, xs);
    sc.s_range = s_range;
    let bundle = plane_wave_bundle(&medium, &sc, &SourceCurve::Flat).unwrap();
    let coarse = field_quadrature(&bundle, 32).unwrap();
    let fine = field_quadrature(&bundle, 64).unwrap();
    let d = coarse.max_abs_diff(&fine);
    assert!(d < 1e-12, "refine 64 vs 32 differ by {d:e}");
}

#[test]
fn go_is_converged_in_fan_spacing() {
    let m = Medium::<f64>::waveguide().with_domain(Domain {
        x: (-5.0, 5.0),
        y: (-1.0, 4.0),
    });
    let xs = common::linspace(-1.0, 1.0, 201);
    let solve = |spacing: f64| {
        let cfg = GoConfig {
            y_star: 2.0,
            fan_spacing: spacing,
            s_range: (-3.0, 3.0),
            dt: 1e-3,
            receiver_xs: xs.clone(),
        };
        go_field(&m, &SourceCurve::Flat, &cfg).unwrap().field(100.0)
    };
    let d = solve(0.005).max_abs_diff(&solve(0.0025));
    assert!(d < 1e-8, "halving the fan spacing changed the field by {d:e}");
}

#[test]
fn go_equals_plane_wave_in_constant_medium() {
    let m = Medium::constant(1.0).with_domain(Domain {
        x: (-5.0, 5.0),
        y: (-1.0, 4.0),
    });
    let xs = common::linspace(-1.0, 1.0, 51);
    let cfg = GoConfig {
        y_star: 2.0,
        fan_spacing: 0.01,
        s_range: (-2.0, 2.0),
        dt: 1e-3,
        receiver_xs: xs.clone(),
    };
    let go = go_field(&m, &SourceCurve::Flat, &cfg).unwrap().field(100.0);
    assert!(go.max_abs_diff(&exact_field_constant(100.0, 2.0, &xs)) < 1e-12);
}

#[test]
fn receiver_grid_doubling_keeps_maxima() {
    for base in [StudyConfig::default(), waveguide_config()] {
        let mut fine = base.clone();
        fine.receivers = 2 * base.receivers;
        let a = study_harness::run_converge_omega(&base).unwrap();
        let b = study_harness::run_converge_omega(&fine).unwrap();
        // maxima at roundoff level carry no grid information
        for (ra, rb) in a.rows.iter().zip(&b.rows).filter(|(r, _)| r.max_error > 1e-11) {
            let change = (rb.max_error / ra.max_error - 1.0).abs();
            assert!(change < 5e-3, "omega {}: change {change:e}", ra.omega);
        }
    }
}

#[test]
fn waveguide_errors_are_insensitive_to_cutoff_radius_at_high_frequency() {
    let base = waveguide_config();
    let mut wide = base.clone();
    wide.alpha = 1.5;
    let a = study_harness::run_converge_omega(&base).unwrap();
    let b = study_harness::run_converge_omega(&wide).unwrap();
    for (ra, rb) in a.rows.iter().zip(&b.rows).filter(|(r, _)| r.omega >= 400.0) {
        let change = (rb.max_error / ra.max_error - 1.0).abs();
        assert!(change < 1e-2, "omega {}: change {change:e}", ra.omega);
    }
    for r in [&a, &b] {
        let slope = r.fit.unwrap().slope;
        assert!((slope + 1.0).abs() <= 0.2, "slope {slope}");
    }
}

#[test]
fn minimum_width_does_not_minimize_error() {
    let (y_star, omega) = (3.0, 100.0);
    let e = |q: f64| relative_error(&error_constants(q, y_star, omega, 0.0).unwrap());
    // the line-case error decreases beyond its interior peak, so Q0 = y* is not optimal
    assert!(e(2.0 * y_star) < e(y_star));
    let grid: Vec<f64> = (-30..=30).map(|k| 10f64.powf(k as f64 / 10.0)).collect();
    let values: Vec<f64> = grid.iter().map(|&q| e(q)).collect();
    let peak = values
        .iter()
        .cloned()
        .enumerate()
        .fold((0, 0.0), |a, (k, v)| if v > a.1 { (k, v) } else { a })
        .0;
    assert!(peak > 0 && peak < grid.len() - 1);
    assert!(values[..=peak].windows(2).all(|w| w[1] > w[0]));
    assert!(values[peak..].windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn single_precision_bundle() {
    let m = Medium::<f32>::constant(1.0).with_domain(Domain {
        x: (-8.0, 8.0),
        y: (-1.0, 3.0),
    });
    let xs: Vec<f32> = (0..21).map(|k| -0.5 + 0.05 * k as f32).collect();
    let mut sc = SuperposConfig::<f32>::new(100.0, 1.0, 2.0, xs);
    sc.dt = 1e-2;
    let bundle = plane_wave_bundle(&m, &sc, &SourceCurve::Flat).unwrap();
    let u = field_discrete(&bundle);
    for v in &u.values {
        assert!((v.norm() - 1.0).abs() < 1e-2, "|u| = {}", v.norm());
    }
}
