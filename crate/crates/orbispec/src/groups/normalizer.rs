//! Arithmetic enumeration of normalizer elements by isometric circle.
//!
//! Every element of `N(Gamma_0(n))` with `n` square-free lies in an
//! Atkin-Lehner coset indexed by a divisor `e | n` and has the shape
//!
//! ```text
//! ( a sqrt(e)        b / sqrt(e)   )
//! ( c (n/e) sqrt(e)  d sqrt(e)     )      with  a d e - b c (n/e) = 1,
//! ```
//!
//! integers `a, b, c, d`. Its isometric circle has center `-d / (c n/e)`
//! and radius `1 / (c (n/e) sqrt(e))`; two elements share a circle exactly
//! when they differ by a left power of the translation `t: z -> z + 1`,
//! so fixing the representative with second-circle center in `(-1/2, 1/2]`
//! enumerates each circle once. `n = 1` degenerates to the modular group.

use super::GroupError;
use crate::qfield::{ExactMatrix, QnElement};
use num_bigint::BigInt;
use num_rational::BigRational;

/// An isometric circle of a group element, with its canonical
/// representative (second-circle center reduced into `(-1/2, 1/2]`).
#[derive(Debug, Clone)]
pub struct Circle {
    /// Exact center on the real axis.
    pub center: BigRational,
    /// Exact radius `(1 / (c (n/e) e)) sqrt(e)`.
    pub radius: QnElement,
    /// Exact squared radius (rational).
    pub radius_sq: BigRational,
    pub center_f: f64,
    pub radius_f: f64,
    /// Canonical representative whose circle this is.
    pub element: ExactMatrix,
    /// Atkin-Lehner divisor of the coset.
    pub e: u64,
}

impl Circle {
    /// Height of the circle above `x`, squared; negative below the axis.
    pub fn height_sq(&self, x: f64) -> f64 {
        let dx = x - self.center_f;
        self.radius_f * self.radius_f - dx * dx
    }

    /// Whether this and `other` are tangent (externally), decided exactly:
    /// `(c1 - c2)^2 = (r1 + r2)^2`, i.e.
    /// `[(c1-c2)^2 - r1^2 - r2^2]^2 = 4 r1^2 r2^2` with the bracket >= 0.
    pub fn tangent_to(&self, other: &Circle) -> bool {
        let dc = &self.center - &other.center;
        let lhs = &dc * &dc - &self.radius_sq - &other.radius_sq;
        if lhs < BigRational::new(BigInt::from(0), BigInt::from(1)) {
            return false;
        }
        let rhs = BigRational::from_integer(BigInt::from(4)) * &self.radius_sq * &other.radius_sq;
        &lhs * &lhs == rhs
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    out.sort_unstable();
    out
}

fn modinv(a: i64, m: i64) -> Option<i64> {
    // extended Euclid
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m))
}

/// All isometric circles of `N(Gamma_0(n))` of radius at least `r_min`,
/// whose center lies within reach of the strip `|x| <= 1/2`. Sorted by
/// center, then radius.
pub fn enumerate_circles(n: u64, r_min: f64) -> Result<Vec<Circle>, GroupError> {
    if n == 0 || !crate::qfield::is_squarefree(n) {
        return Err(GroupError::NonSquarefree(n));
    }
    let mut out = Vec::new();
    for e in divisors(n) {
        let ne = n / e;
        let sqrt_e = (e as f64).sqrt();
        // radius = 1/(c * ne * sqrt(e)) >= r_min
        let c_max = (1.0 / (ne as f64 * sqrt_e * r_min)).floor() as i64;
        for c in 1..=c_max {
            let modulus = c * ne as i64;
            let radius_f = 1.0 / (modulus as f64 * sqrt_e);
            // center -d/modulus must be within radius of the strip
            let d_bound = (modulus as f64 * (0.5 + radius_f)).floor() as i64 + 1;
            for d in -d_bound..=d_bound {
                let center_f = -d as f64 / modulus as f64;
                if center_f.abs() > 0.5 + radius_f + 1e-12 {
                    continue;
                }
                let de = d.checked_mul(e as i64).expect("de overflow");
                let Some(a0) = modinv(de, modulus) else {
                    continue;
                };
                // pick a with a/modulus in (-1/2, 1/2]
                let mut a = a0.rem_euclid(modulus);
                if 2 * a > modulus {
                    a -= modulus;
                }
                let b_num = a
                    .checked_mul(de)
                    .and_then(|x| x.checked_sub(1))
                    .expect("ade overflow");
                debug_assert_eq!(b_num.rem_euclid(modulus), 0);
                let b = b_num / modulus;
                let element = ExactMatrix::new(
                    n,
                    QnElement::sqrt_term(a, 1, e),
                    QnElement::sqrt_term(b, e as i64, e),
                    QnElement::sqrt_term(modulus, 1, e),
                    QnElement::sqrt_term(d, 1, e),
                )
                .map_err(|err| GroupError::Domain(format!("element build: {err}")))?;
                let center = BigRational::new(BigInt::from(-d), BigInt::from(modulus));
                let radius = QnElement::sqrt_term(1, modulus * e as i64, e);
                let radius_sq = BigRational::new(
                    BigInt::from(1),
                    BigInt::from(modulus) * BigInt::from(modulus) * BigInt::from(e),
                );
                out.push(Circle {
                    center,
                    radius,
                    radius_sq,
                    center_f,
                    radius_f,
                    element,
                    e,
                });
            }
        }
    }
    out.sort_by(|p, q| {
        p.center
            .cmp(&q.center)
            .then_with(|| p.radius_sq.cmp(&q.radius_sq))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::IsometryClass;

    #[test]
    fn rejects_non_squarefree() {
        assert_eq!(enumerate_circles(12, 0.1).unwrap_err(), GroupError::NonSquarefree(12));
        assert_eq!(enumerate_circles(0, 0.1).unwrap_err(), GroupError::NonSquarefree(0));
    }

    #[test]
    fn modular_group_circles() {
        // n = 1: circles center -d/c radius 1/c, gcd(c, d) = 1
        let circles = enumerate_circles(1, 0.4).unwrap();
        // radius >= 0.4 leaves c = 1, 2; centers within 0.5 + r
        let unit: Vec<_> = circles.iter().filter(|c| c.radius_f > 0.9).collect();
        assert_eq!(unit.len(), 3); // centers -1, 0, 1
        let s = ExactMatrix::from_integers(1, 0, -1, 1, 0).unwrap();
        let middle = unit.iter().find(|c| c.center_f == 0.0).unwrap();
        assert_eq!(middle.element, s);
    }

    #[test]
    fn level11_has_fricke_circle() {
        let circles = enumerate_circles(11, 0.05).unwrap();
        let fricke = circles
            .iter()
            .find(|c| c.center_f == 0.0 && c.e == 11)
            .unwrap();
        assert!((fricke.radius_f - 1.0 / 11f64.sqrt()).abs() < 1e-15);
        let w = ExactMatrix::new(
            11,
            QnElement::zero(),
            QnElement::sqrt_term(-1, 11, 11),
            QnElement::sqrt_term(1, 1, 11),
            QnElement::zero(),
        )
        .unwrap();
        assert_eq!(fricke.element, w);
        assert_eq!(fricke.element.classify(), IsometryClass::Elliptic { order: Some(2) });
    }

    #[test]
    fn level11_third_circles_are_involutions() {
        // circles at centers +-1/3 radius 1/(3 sqrt 11) pair their own side
        let circles = enumerate_circles(11, 0.05).unwrap();
        for sgn in [-1i64, 1] {
            let c = circles
                .iter()
                .find(|c| {
                    c.center == BigRational::new(BigInt::from(sgn), BigInt::from(3)) && c.e == 11
                })
                .unwrap();
            assert!((c.radius_f - 1.0 / (3.0 * 11f64.sqrt())).abs() < 1e-15);
            let m = c.element.to_f64();
            assert!((m[0][0] + m[1][1]).abs() < 1e-12, "trace zero involution");
        }
    }

    #[test]
    fn determinants_and_dedup() {
        for n in [1u64, 11, 15, 42] {
            let circles = enumerate_circles(n, 0.02).unwrap();
            // ExactMatrix::new verified det = 1 already; check circle uniqueness
            let mut seen = std::collections::HashSet::new();
            for c in &circles {
                assert!(
                    seen.insert((c.center.clone(), c.radius_sq.clone())),
                    "duplicate circle at {} (n = {n})",
                    c.center_f
                );
                // element's isometric circle matches the stored one
                let m = c.element.to_f64();
                // projective normalization may negate the whole matrix
                assert!((-m[1][1] / m[1][0] - c.center_f).abs() < 1e-12);
                assert!((1.0 / m[1][0].abs() - c.radius_f).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tangency_exact() {
        // level-11 rotation subgroup: circles of (10,3;33,10) and
        // (23,8;66,23) are tangent at -1/3
        let a = ExactMatrix::from_integers(11, 10, 3, 33, 10).unwrap();
        let b = ExactMatrix::from_integers(11, 23, 8, 66, 23).unwrap();
        let mk = |m: &ExactMatrix, cen: (i64, i64), modulus: i64| Circle {
            center: BigRational::new(BigInt::from(cen.0), BigInt::from(cen.1)),
            radius: QnElement::from_rational(1, modulus),
            radius_sq: BigRational::new(BigInt::from(1), BigInt::from(modulus * modulus)),
            center_f: cen.0 as f64 / cen.1 as f64,
            radius_f: 1.0 / modulus as f64,
            element: m.clone(),
            e: 1,
        };
        let ca = mk(&a, (-10, 33), 33);
        let cb = mk(&b, (-23, 66), 66);
        assert!(ca.tangent_to(&cb));
        assert!(cb.tangent_to(&ca));
        // and not tangent to the Fricke circle at 0
        let circles = enumerate_circles(11, 0.05).unwrap();
        let fricke = circles.iter().find(|c| c.center_f == 0.0 && c.e == 11).unwrap();
        assert!(!ca.tangent_to(fricke));
    }
}
