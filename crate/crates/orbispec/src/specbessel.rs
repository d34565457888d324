//! The modified Bessel function `K_nu(y)` for purely imaginary order
//! `nu = ir` and for real order `nu = t` with `0 <= t < 1/2` (the
//! small-eigenvalue regime), plus an exponentially scaled variant.
//!
//! Evaluation uses the integral representation
//! `K_ir(y) = int_0^inf exp(-y cosh u) cos(r u) du` (with `cos(ru)`
//! replaced by `cosh(tu)` for real order). After factoring out
//! `exp(-y)`, the integrand `exp(-y(cosh u - 1)) cos(ru)` is even and
//! analytic in a strip, so the trapezoidal rule converges geometrically;
//! the step is shrunk with `r` to pay for the oscillation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum BesselError {
    #[error("argument must be positive, got y = {0}")]
    NonPositiveArgument(f64),
    #[error("real order must lie in [0, 1/2), got t = {0}")]
    OrderOutOfRange(f64),
    #[error("accuracy target unreachable at r = {r}, y = {y}")]
    AccuracyLoss { r: f64, y: f64 },
}

/// Validated envelope of the evaluator: inside these bounds the result
/// carries an absolute error below `1e-12 * max(1, |K|)`.
pub const MAX_SPECTRAL_R: f64 = 15.0;
pub const MAX_ARGUMENT: f64 = 200.0;

/// Spectral parameter of a Laplace eigenvalue `lambda = r^2 + 1/4`,
/// with `r` real for `lambda >= 1/4` and `r = it`, `t` in `[0, 1/2)`,
/// for small eigenvalues `lambda = 1/4 - t^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpectralParam {
    Real(f64),
    Imaginary(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub lambda: f64,
    pub param: SpectralParam,
}

impl SpectralPoint {
    pub fn from_r(r: f64) -> Self {
        assert!(r >= 0.0, "spectral parameter r must be nonnegative");
        Self {
            lambda: r * r + 0.25,
            param: SpectralParam::Real(r),
        }
    }

    pub fn from_t(t: f64) -> Self {
        assert!((0.0..0.5).contains(&t), "imaginary order must be in [0, 1/2)");
        Self {
            lambda: 0.25 - t * t,
            param: SpectralParam::Imaginary(t),
        }
    }

    pub fn from_lambda(lambda: f64) -> Self {
        assert!(lambda >= 0.0);
        if lambda >= 0.25 {
            Self::from_r((lambda - 0.25).sqrt())
        } else {
            Self::from_t((0.25 - lambda).sqrt())
        }
    }

    /// Magnitude of the oscillation parameter (zero for imaginary order).
    fn oscillation(&self) -> f64 {
        match self.param {
            SpectralParam::Real(r) => r,
            SpectralParam::Imaginary(_) => 0.0,
        }
    }
}

fn order_factor(param: SpectralParam, u: f64) -> f64 {
    match param {
        SpectralParam::Real(r) => (r * u).cos(),
        SpectralParam::Imaginary(t) => (t * u).cosh(),
    }
}

/// `K` with the order given by `point`, at argument `y > 0`.
///
/// With `scaled` the value `e^y K(y)` is returned, which avoids
/// underflow for large `y`. Errors are explicit: arguments outside the
/// validated envelope are rejected rather than silently degraded.
pub fn bessel_k(point: &SpectralPoint, y: f64, scaled: bool) -> Result<f64, BesselError> {
    if y <= 0.0 {
        return Err(BesselError::NonPositiveArgument(y));
    }
    if let SpectralParam::Imaginary(t) = point.param {
        if !(0.0..0.5).contains(&t) {
            return Err(BesselError::OrderOutOfRange(t));
        }
    }
    let r = point.oscillation();
    if r > MAX_SPECTRAL_R + 1e-9 || y > MAX_ARGUMENT {
        return Err(BesselError::AccuracyLoss { r, y });
    }

    // Trapezoidal rule on the even analytic integrand
    // g(u) = exp(-y (cosh u - 1)) * order_factor(u).
    // Step: the quadrature error scales like exp(-d (2 pi / h - r)) for a
    // strip half-width d close to pi/2, so keep 2 pi / h - r >= 28.
    let h = (2.0 * std::f64::consts::PI / (r + 28.0)).min(0.25);
    // Truncate once y (cosh u - 1) > 45 (integrand below 3e-20); for real
    // order the cosh(tu) growth (t < 1/2) is absorbed by a small margin.
    let u_max = ((45.0 / y) + 1.0).acosh() + 1.0;
    let steps = (u_max / h).ceil() as usize;
    let mut sum = 0.5 * order_factor(point.param, 0.0); // u = 0 term, g(0) = 1 * cs(0)
    for k in 1..=steps {
        let u = k as f64 * h;
        let g = (-(y * (u.cosh() - 1.0))).exp() * order_factor(point.param, u);
        sum += g;
    }
    let scaled_value = sum * h;
    if scaled {
        Ok(scaled_value)
    } else {
        Ok(scaled_value * (-y).exp())
    }
}

/// Batch evaluation sharing the validation cost (used by the linear
/// system assembly, where thousands of values at a common order are
/// needed).
pub fn bessel_k_batch(
    point: &SpectralPoint,
    ys: &[f64],
    scaled: bool,
) -> Result<Vec<f64>, BesselError> {
    ys.iter().map(|&y| bessel_k(point, y, scaled)).collect()
}

/// Whether `K` at this argument sits close to one of its zeros (only
/// possible in the oscillatory region `y < r`), relative to its local
/// scale. Callers shift `y` when this fires, keeping linear systems
/// well conditioned.
pub fn near_zero(point: &SpectralPoint, y: f64) -> Result<bool, BesselError> {
    let k0 = bessel_k(point, y, true)?.abs();
    let k_lo = bessel_k(point, 0.95 * y, true)?.abs();
    let k_hi = bessel_k(point, 1.05 * y, true)?.abs();
    Ok(k0 < 0.02 * k_lo.max(k_hi).max(1e-300))
}

/// Independent oracle: adaptive Simpson quadrature of the same integral
/// with an unrelated discretization. Slow; used for validation.
pub fn bessel_k_oracle(point: &SpectralPoint, y: f64) -> f64 {
    assert!(y > 0.0);
    let f = |u: f64| (-(y * (u.cosh() - 1.0))).exp() * order_factor(point.param, u);
    let u_max = ((46.0 / y) + 1.0).acosh() + 1.0;
    // split into unit panels to keep the recursion shallow
    let mut total = 0.0;
    let panels = u_max.ceil() as usize;
    let w = u_max / panels as f64;
    for i in 0..panels {
        let a = i as f64 * w;
        total += adaptive_simpson(&f, a, a + w, 1e-15, 40);
    }
    total * (-y).exp()
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    let m = 0.5 * (a + b);
    let whole = simpson(f, a, b);
    let left = simpson(f, a, m);
    let right = simpson(f, m, b);
    if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        adaptive_simpson(f, a, m, tol / 2.0, depth - 1)
            + adaptive_simpson(f, m, b, tol / 2.0, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn k0_at_one() {
        let p = SpectralPoint::from_r(0.0);
        let v = bessel_k(&p, 1.0, false).unwrap();
        assert_abs_diff_eq!(v, 0.4210244382, epsilon = 1e-10);
        assert_abs_diff_eq!(v, bessel_k_oracle(&p, 1.0), epsilon = 1e-12);
    }

    #[test]
    fn imaginary_order_matches_oracle() {
        let p = SpectralPoint::from_t(0.2835);
        let v = bessel_k(&p, 1.0, false).unwrap();
        assert_abs_diff_eq!(v, bessel_k_oracle(&p, 1.0), epsilon = 1e-12);
    }

    #[test]
    fn asymptotic_decay() {
        // K_ir(y) ~ sqrt(pi / 2y) e^{-y} for y -> infinity
        let p = SpectralPoint::from_r(1.0);
        let scaled = bessel_k(&p, 50.0, true).unwrap();
        let asym = (std::f64::consts::PI / 100.0).sqrt();
        assert!((scaled - asym).abs() / asym < 0.02);
    }

    #[test]
    fn oracle_agreement_on_grid() {
        // 100-point grid r in [0, 10], y in [0.1, 50], 1e-10 agreement
        for i in 0..10 {
            let r = i as f64 * 10.0 / 9.0;
            let p = SpectralPoint::from_r(r);
            for j in 0..10 {
                let y = 0.1 + j as f64 * (50.0 - 0.1) / 9.0;
                let v = bessel_k(&p, y, false).unwrap();
                let o = bessel_k_oracle(&p, y);
                assert!(
                    (v - o).abs() < 1e-10,
                    "mismatch at r={r} y={y}: {v} vs {o}"
                );
            }
        }
    }

    #[test]
    fn scaled_consistency() {
        let p = SpectralPoint::from_r(2.5);
        for &y in &[0.3, 1.0, 7.0, 30.0] {
            let u = bessel_k(&p, y, false).unwrap();
            let s = bessel_k(&p, y, true).unwrap();
            assert_abs_diff_eq!(u, s * (-y).exp(), epsilon = 1e-14 * s.abs().max(1.0));
        }
    }

    #[test]
    fn monotone_decay_past_turning_point() {
        let p = SpectralPoint::from_r(3.0);
        let mut prev = f64::INFINITY;
        let mut y = 3.2;
        while y < 40.0 {
            let v = bessel_k(&p, y, false).unwrap();
            assert!(v > 0.0 && v < prev, "not decaying at y={y}");
            prev = v;
            y += 0.5;
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = SpectralPoint::from_r(1.0);
        assert!(matches!(
            bessel_k(&p, -1.0, false),
            Err(BesselError::NonPositiveArgument(_))
        ));
        assert!(matches!(
            bessel_k(&p, 300.0, false),
            Err(BesselError::AccuracyLoss { .. })
        ));
        let far = SpectralPoint::from_r(20.0);
        assert!(matches!(
            bessel_k(&far, 1.0, false),
            Err(BesselError::AccuracyLoss { .. })
        ));
    }

    #[test]
    fn zero_guard_fires_in_oscillatory_region() {
        // K_i5(y) oscillates for y < 5: a sign change between successive
        // samples brackets a zero, near which the guard must fire.
        let p = SpectralPoint::from_r(5.0);
        let mut bracket = None;
        let mut prev = (0.5, bessel_k(&p, 0.5, true).unwrap());
        let mut y = 0.52;
        while y < 4.5 {
            let v = bessel_k(&p, y, true).unwrap();
            if v.signum() != prev.1.signum() {
                bracket = Some((prev.0, y));
                break;
            }
            prev = (y, v);
            y += 0.02;
        }
        let (a, b) = bracket.expect("no zero found for K_i5 below 4.5");
        // bisect to the zero, then check the guard
        let (mut a, mut b) = (a, b);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            let vm = bessel_k(&p, m, true).unwrap();
            if vm.signum() == bessel_k(&p, a, true).unwrap().signum() {
                a = m;
            } else {
                b = m;
            }
        }
        let z = 0.5 * (a + b);
        assert!(near_zero(&p, z).unwrap());
        assert!(!near_zero(&p, 8.0).unwrap());
    }

    #[test]
    fn spectral_point_round_trips() {
        let p = SpectralPoint::from_lambda(2.018365089);
        assert!(matches!(p.param, SpectralParam::Real(_)));
        assert_abs_diff_eq!(p.lambda, 2.018365089, epsilon = 1e-15);
        let q = SpectralPoint::from_lambda(0.169612040);
        match q.param {
            SpectralParam::Imaginary(t) => {
                assert_abs_diff_eq!(0.25 - t * t, 0.169612040, epsilon = 1e-15)
            }
            _ => panic!("expected imaginary parameter below 1/4"),
        }
    }
}
