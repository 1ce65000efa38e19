//! Reference computations shared by the integration tests. They use only
//! brute-force numerics so they stay independent of the library code.
#![allow(dead_code)]

use num_complex::Complex64;

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// `[phi2, phi3, phi4, a0, a1, a2]` of the unit-speed Taylor system.
pub type TaylorState = [Complex64; 6];

fn taylor_rhs(y: &TaylorState) -> TaylorState {
    let [p2, p3, p4, a0, a1, a2] = *y;
    [
        -p2 * p2,
        -3.0 * p2 * p3,
        -(4.0 * p2 * p4 + 3.0 * p2.powi(4) + 3.0 * p3 * p3),
        -0.5 * p2 * a0,
        -(1.5 * p2 * a1 + 0.5 * p3 * a0),
        -(2.5 * p2 * a2 + 2.0 * p3 * a1 + 0.5 * p4 * a0 + 1.5 * p2.powi(3) * a0),
    ]
}

/// Classical RK4 on the Taylor system from `phi2 = i / Q0`, `A0 = 1`.
/// Returns the state after every step.
pub fn integrate_taylor(q0: f64, t_end: f64, steps: usize) -> Vec<(f64, TaylorState)> {
    let zero = Complex64::new(0.0, 0.0);
    let mut y: TaylorState = [
        Complex64::new(0.0, 1.0 / q0),
        zero,
        zero,
        Complex64::new(1.0, 0.0),
        zero,
        zero,
    ];
    let h = t_end / steps as f64;
    let mut out = vec![(0.0, y)];
    let axpy = |y: &TaylorState, k: &TaylorState, s: f64| -> TaylorState { std::array::from_fn(|i| y[i] + k[i] * s) };
    for n in 1..=steps {
        let k1 = taylor_rhs(&y);
        let k2 = taylor_rhs(&axpy(&y, &k1, 0.5 * h));
        let k3 = taylor_rhs(&axpy(&y, &k2, 0.5 * h));
        let k4 = taylor_rhs(&axpy(&y, &k3, h));
        y = std::array::from_fn(|i| y[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0));
        out.push((n as f64 * h, y));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of a real function.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    // split first so oscillatory integrands cannot fool the initial estimate
    let pieces = 64;
    let w = (b - a) / pieces as f64;
    (0..pieces)
        .map(|k| {
            let (lo, hi) = (a + k as f64 * w, a + (k + 1) as f64 * w);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson_step(&f, lo, hi, fa, fm, fb, whole, tol / pieces as f64, 40)
        })
        .sum()
}

/// `int z^p exp(i c1 z^2 - z^2 / 2) dz` over the real line by quadrature
/// on `[-12, 12]`.
pub fn moment_by_quadrature(p: i32, c1: f64) -> Complex64 {
    let g = |z: f64| Complex64::new(-0.5 * z * z, c1 * z * z).exp() * z.powi(p);
    Complex64::new(
        adaptive_simpson(|z| g(z).re, -12.0, 12.0, 1e-13),
        adaptive_simpson(|z| g(z).im, -12.0, 12.0, 1e-13),
    )
}
