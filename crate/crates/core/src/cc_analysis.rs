//! Constant-coefficient error analysis for beams launched orthogonally from
//! a source curve with `P0 = i` and real `Q0 > 0`, observed at `(0, y*)`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{imag_unit, lit, to_f64, Real};

/// Normal derivatives of phase and amplitude on the central ray, in
/// ray-centred coordinates, at travel time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorCoeffs<T> {
    pub t: T,
    pub phi2: Complex<T>,
    pub phi3: Complex<T>,
    pub phi4: Complex<T>,
    pub a0: Complex<T>,
    pub a1: Complex<T>,
    pub a2: Complex<T>,
}

/// Closed-form solution of the Taylor-coefficient system in a unit-speed
/// medium with `phi2(0) = i / Q0`, `A0(0) = 1` and zero data otherwise.
pub fn taylor_coeffs<T: Real>(t: T, q0: T) -> TaylorCoeffs<T> {
    let i = imag_unit::<T>();
    let w = Complex::new(q0, t);
    let zero = Complex::new(T::zero(), T::zero());
    let sq = q0.sqrt();
    let three = lit::<T>(3.0);
    TaylorCoeffs {
        t,
        phi2: i / w,
        phi3: zero,
        phi4: -(w.powi(4)).inv() * (three * t),
        a0: (Complex::from(q0) / w).sqrt(),
        a1: zero,
        // (Q0 + it)^{5/2} A2 = (3i/2) Q0^{3/2} int_0^t (Q0 + i tau)^{-2} dtau
        a2: i * (three / lit(2.0) * sq * t) / w.powf(lit(3.5)),
    }
}

fn double_factorial(n: usize) -> f64 {
    (1..=n).rev().step_by(2).map(|k| k as f64).product()
}

/// Moment `int z^p exp(i c1 z^2 - z^2 / 2) dz`: zero for odd `p`,
/// `(p-1)!! sqrt(2 pi) (1 - 2 i c1)^{-(p+1)/2}` for even `p <= 8`.
pub fn d_moment<T: Real>(p: usize, c1: T) -> Result<Complex<T>> {
    if p > 8 {
        return Err(Error::MomentOrder(p));
    }
    if p % 2 == 1 {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let n_p = lit::<T>(double_factorial(p.saturating_sub(1))) * (lit::<T>(2.0) * T::PI()).sqrt();
    let base = Complex::new(T::one(), -lit::<T>(2.0) * c1);
    Ok(base.powf(-lit::<T>((p + 1) as f64 / 2.0)) * n_p)
}

/// Leading error constants at `(0, y*)` with the expansion orders `q = 0`,
/// `q_a = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorConstants<T> {
    pub q0: T,
    pub y_star: T,
    pub omega: T,
    pub y0_pp: T,
    pub a1: Complex<T>,
    pub a2: Complex<T>,
    pub b1: Complex<T>,
    pub b2: Complex<T>,
    pub c1: T,
    pub c2: Complex<T>,
    pub sigma: u8,
    pub e11: Complex<T>,
    pub e12: Complex<T>,
    pub e21: Complex<T>,
    pub e22: Complex<T>,
    pub c_star: Complex<T>,
    pub q: u32,
    pub q_star: u32,
    pub q_a: u32,
    /// Beam amplitude `A(0, 0)` on the central ray at the receiver.
    pub amp: Complex<T>,
    /// Beam width `eta(0)` at the receiver.
    pub eta: T,
    /// `m'(0) = (1 - y* y0''(0))^{-1}`.
    pub m_prime: T,
}

/// Order `q*` of the Taylor error for phase order `q`.
pub fn q_star(q: u32) -> u32 {
    2 * (q / 2 + 1)
}

/// Evaluates the error constants for a source curve with `y0'(0) = 0` and
/// curvature `y0''(0)`.
pub fn error_constants<T: Real>(q0: T, y_star: T, omega: T, y0_pp: T) -> Result<ErrorConstants<T>> {
    if !(q0 > T::zero()) || !(omega > T::zero()) {
        return Err(Error::Config("Q0 and omega must be positive".into()));
    }
    let spread = T::one() - y_star * y0_pp;
    if !(spread > T::zero()) {
        return Err(Error::Caustic { s: to_f64(spread) });
    }
    let i = imag_unit::<T>();
    let zero = Complex::new(T::zero(), T::zero());
    let m_prime = spread.recip();
    let dtheta = y0_pp;
    let w = Complex::new(q0, y_star);
    let w2 = w * w;
    let sq = q0.sqrt();
    let r2 = q0 * q0 + y_star * y_star;
    let (two, three, four) = (lit::<T>(2.0), lit::<T>(3.0), lit::<T>(4.0));

    let a2 = i * (Complex::from(three * sq * y_star) - w2 * (two * sq * m_prime * dtheta)) / (w.powf(lit(3.5)) * four);
    let b2 = i * (w2 * (four * m_prime * dtheta) - y_star) * r2 / (w.powi(4) * (lit::<T>(8.0) * q0));
    let c1 = (y_star + r2 * m_prime * dtheta) / (two * q0);
    let amp = (Complex::from(q0) / w).sqrt();
    let eta = (r2 / (omega * q0)).sqrt();

    let e12 = a2 * d_moment(2, c1)? * m_prime;
    let e22 = amp * b2 * d_moment(4, c1)? * m_prime;
    // e12 + e22 = exp(-i omega y*) C*
    let c_star = (i * omega * y_star).exp() * (e12 + e22);
    Ok(ErrorConstants {
        q0,
        y_star,
        omega,
        y0_pp,
        a1: zero,
        a2,
        b1: zero,
        b2,
        c1,
        c2: zero,
        sigma: 1,
        e11: zero,
        e12,
        e21: zero,
        e22,
        c_star,
        q: 0,
        q_star: q_star(0),
        q_a: 0,
        amp,
        eta,
        m_prime,
    })
}

/// Leading relative error `omega^{1/2} eta^3 |C*| |1 - y* y0''|^{1/2}`.
pub fn relative_error<T: Real>(k: &ErrorConstants<T>) -> T {
    let spread = (T::one() - k.y_star * k.y0_pp).abs();
    k.omega.sqrt() * k.eta.powi(3) * k.c_star.norm() * spread.sqrt()
}

/// `|n0|` in `|C*| = |n0| y* Q0^2 / (Q0^2 + y*^2)^{5/2}` for a straight
/// source line, extracted from the assembled constants.
pub fn line_constant<T: Real>() -> T {
    let (q0, y_star) = (T::one(), T::one());
    let k = error_constants(q0, y_star, T::one(), T::zero()).expect("valid line parameters");
    let r2 = q0 * q0 + y_star * y_star;
    k.c_star.norm() * r2.powf(lit(2.5)) / (y_star * q0 * q0)
}

/// Beam width at the receiver over a grid of `Q0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WidthTable<T> {
    pub q0: Vec<T>,
    pub eta: Vec<T>,
    pub argmin: T,
}

pub fn width_vs_q0<T: Real>(y_star: T, omega: T, q0_grid: &[T]) -> Result<WidthTable<T>> {
    if q0_grid.iter().any(|q| !(*q > T::zero())) {
        return Err(Error::Config("Q0 grid must be positive".into()));
    }
    let eta: Vec<T> = q0_grid
        .iter()
        .map(|&q| ((q * q + y_star * y_star) / (omega * q)).sqrt())
        .collect();
    let argmin = q0_grid
        .iter()
        .zip(&eta)
        .fold(
            (T::nan(), T::infinity()),
            |best, (&q, &e)| if e < best.1 { (q, e) } else { best },
        )
        .0;
    Ok(WidthTable {
        q0: q0_grid.to_vec(),
        eta,
        argmin,
    })
}
