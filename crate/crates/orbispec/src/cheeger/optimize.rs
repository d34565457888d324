//! Equidistant-offset optimization of a splitting.
//!
//! A separating curve of length `ell` with side areas `a <= b` can be
//! pushed a distance `s` toward the larger side: the boundary length
//! becomes `ell cosh(s)` and the areas `a + ell sinh(s)` and
//! `b - ell sinh(s)`. The quality of the cut is
//! `h(s) = ell cosh(s) / min(a + ell sinh s, b - ell sinh s)`; it is
//! minimized either where the two side ratios balance (equal areas) or
//! at the unconstrained minimizer `sinh s = ell/a` of the small-side
//! ratio, whichever comes first, clipped to the embeddedness bound
//! `d_max`.

/// Ratio on the small side after offsetting by `s`.
fn h_small(ell: f64, a: f64, s: f64) -> f64 {
    ell * s.cosh() / (a + ell * s.sinh())
}

/// Ratio on the large side after offsetting by `s`.
fn h_large(ell: f64, b: f64, s: f64) -> f64 {
    let rem = b - ell * s.sinh();
    if rem <= 0.0 {
        f64::INFINITY
    } else {
        ell * s.cosh() / rem
    }
}

/// Best offset and cut quality for a splitting `(ell, a, b)` with
/// `a <= b`, constrained to `s in [0, d_max]`.
///
/// Returns `(s_star, h0)`.
pub fn equidistant_optimize(ell: f64, a: f64, b: f64, d_max: f64) -> (f64, f64) {
    assert!(ell > 0.0 && a >= 0.0 && b >= a && d_max >= 0.0);
    // balance point: a + ell sinh s = b - ell sinh s
    let s_bal_closed = ((b - a) / (2.0 * ell)).asinh();
    // bisection cross-check on h_small(s) = h_large(s)
    let s_bal = if b - a < 1e-15 {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0f64, s_bal_closed + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h_small(ell, a, mid) > h_large(ell, b, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        debug_assert!((s - s_bal_closed).abs() < 1e-9);
        s
    };
    // unconstrained minimizer of the small-side ratio: sinh s = ell/a
    let s_unc = if a <= 0.0 { f64::INFINITY } else { (ell / a).asinh() };
    let s_star = s_bal.min(s_unc).min(d_max);
    let h0 = h_small(ell, a, s_star).max(h_large(ell, b, s_star));
    (s_star, h0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn equal_areas_stay_on_the_geodesic() {
        let ell = 2.0 * (11f64.sqrt() / 2.0).acosh();
        let (s, h) = equidistant_optimize(ell, PI, PI, 10.0);
        assert_eq!(s, 0.0);
        assert!((h - ell / PI).abs() < 1e-12);
        assert!((h - 0.6953937167).abs() < 1e-9);
    }

    #[test]
    fn one_two_split_balances() {
        // areas (pi, 2*pi), trace sqrt(17)
        let ell = 2.0 * (17f64.sqrt() / 2.0).acosh();
        let (s, h) = equidistant_optimize(ell, PI, 2.0 * PI, 1.28247);
        assert!((s - 0.5524704077).abs() < 1e-8, "s = {s}");
        assert!((h - 0.6635223129).abs() < 1e-8, "h = {h}");
        // balance achieved
        assert!((h_small(ell, PI, s) - h_large(ell, 2.0 * PI, s)).abs() < 1e-9);
        // the small-side ratio alone is minimized later
        assert!(((ell / PI).asinh() - 0.7792738763).abs() < 1e-8);
    }

    #[test]
    fn d_max_clips_the_offset() {
        let ell = 2.0 * (17f64.sqrt() / 2.0).acosh();
        let (s, h) = equidistant_optimize(ell, PI, 2.0 * PI, 0.3);
        assert_eq!(s, 0.3);
        assert!(h > 0.6635223129);
    }

    #[test]
    fn zero_area_side_never_beats_the_horocycle() {
        // folded curves bound a zero-area side; their optimum is coth-like
        // and always at least 1
        for ell in [0.5, 1.92484, 5.0] {
            let (_, h) = equidistant_optimize(ell, 0.0, 2.0 * PI, f64::INFINITY);
            assert!(h >= 1.0, "ell = {ell}, h = {h}");
        }
        // the shortest folded example: doubled cone-point arc
        let ell = 2.0 * (1.5f64).acosh();
        let (_, h) = equidistant_optimize(ell, 0.0, 2.0 * PI, f64::INFINITY);
        assert!((h - 1.1727).abs() < 1e-3, "h = {h}");
    }
}
