//! Piecewise cubic Hermite interpolation on strictly increasing nodes.

use crate::scalar::{lit, Real};

/// Index `i` with `xs[i] <= x <= xs[i + 1]`, clamped to the end intervals.
fn interval<T: Real>(xs: &[T], x: T) -> usize {
    let n = xs.len();
    match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Less)) {
        Ok(i) => i.min(n - 2),
        Err(i) => i.clamp(1, n - 1) - 1,
    }
}

/// Cubic Hermite interpolant through `(xs, ys)` with slopes `ds`.
pub(crate) fn hermite<T: Real>(xs: &[T], ys: &[T], ds: &[T], x: T) -> T {
    debug_assert!(xs.len() >= 2 && xs.len() == ys.len() && ys.len() == ds.len());
    let i = interval(xs, x);
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let h00 = two * t3 - three * t2 + T::one();
    let h10 = t3 - two * t2 + t;
    let h01 = -two * t3 + three * t2;
    let h11 = t3 - t2;
    h00 * ys[i] + h10 * h * ds[i] + h01 * ys[i + 1] + h11 * h * ds[i + 1]
}

/// Derivative of the Lagrange polynomial through `pts` at `x0`.
fn lagrange_derivative<T: Real>(pts: &[(T, T)], x0: T) -> T {
    let mut total = T::zero();
    for (j, &(xj, yj)) in pts.iter().enumerate() {
        let mut denom = T::one();
        for (k, &(xk, _)) in pts.iter().enumerate() {
            if k != j {
                denom = denom * (xj - xk);
            }
        }
        let mut num = T::zero();
        for (m, _) in pts.iter().enumerate() {
            if m == j {
                continue;
            }
            let mut prod = T::one();
            for (k, &(xk, _)) in pts.iter().enumerate() {
                if k != j && k != m {
                    prod = prod * (x0 - xk);
                }
            }
            num = num + prod;
        }
        total = total + yj * num / denom;
    }
    total
}

/// Slopes for a shape-preserving cubic: fourth-order finite-difference
/// estimates, clipped by the Hyman limiter wherever the data are locally
/// monotone. Nodes next to a flat segment get zero slope; at strict local
/// extrema the high-order estimate is kept.
pub(crate) fn monotone_slopes<T: Real>(xs: &[T], ys: &[T]) -> Vec<T> {
    let n = xs.len();
    assert!(n >= 2 && n == ys.len());
    let pts: Vec<(T, T)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    let mut ds: Vec<T> = (0..n)
        .map(|i| {
            let width = 5.min(n);
            let lo = i.saturating_sub(width / 2).min(n - width);
            lagrange_derivative(&pts[lo..lo + width], xs[i])
        })
        .collect();
    let secant = |i: usize| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    let three = lit::<T>(3.0);
    for (i, d) in ds.iter_mut().enumerate() {
        let (left, right) = match i {
            0 => (secant(0), secant(0)),
            _ if i == n - 1 => (secant(n - 2), secant(n - 2)),
            _ => (secant(i - 1), secant(i)),
        };
        if left == T::zero() || right == T::zero() {
            *d = T::zero();
        } else if left * right > T::zero() {
            let sign = left.signum();
            let bound = three * left.abs().min(right.abs());
            *d = sign * (sign * *d).max(T::zero()).min(bound);
        }
    }
    ds
}
