//! Finite-difference derivatives with one Richardson step, used as an
//! oracle for the analytic coefficients.

/// Central-difference estimate of the `order`-th derivative (1, 2 or 3) at `t0`.
pub fn central_difference(f: &dyn Fn(f64) -> f64, t0: f64, h: f64, order: u8) -> f64 {
    match order {
        1 => (f(t0 + h) - f(t0 - h)) / (2.0 * h),
        2 => (f(t0 + h) - 2.0 * f(t0) + f(t0 - h)) / (h * h),
        3 => (f(t0 + 2.0 * h) - 2.0 * f(t0 + h) + 2.0 * f(t0 - h) - f(t0 - 2.0 * h)) / (2.0 * h * h * h),
        _ => panic!("unsupported derivative order {order}"),
    }
}

/// Richardson-extrapolated central difference: `(4 D(h/2) - D(h)) / 3`,
/// cancelling the `h^2` error term.
pub fn richardson(f: &dyn Fn(f64) -> f64, t0: f64, h: f64, order: u8) -> f64 {
    let coarse = central_difference(f, t0, h, order);
    let fine = central_difference(f, t0, 0.5 * h, order);
    (4.0 * fine - coarse) / 3.0
}

/// `|a - b| <= tol * max(1, |a|, |b|)`-style relative gap.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        let f = |t: f64| 2.0 + 3.0 * t - t * t + 0.5 * t.powi(3) + t.powi(5);
        assert!((richardson(&f, 0.0, 1e-2, 1) - 3.0).abs() < 1e-8);
        assert!((richardson(&f, 0.0, 1e-2, 2) + 2.0).abs() < 1e-7);
        assert!((richardson(&f, 0.0, 1e-2, 3) - 3.0).abs() < 1e-6);
    }
}
