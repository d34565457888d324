//! Exact CM (theta-lift) Maass forms at level 17: the eigenvalue ladder
//! `lambda = (pi k / log eta)^2 + 1/4` in the regulator of `Q(sqrt(17))`,
//! and the integer Fourier coefficients of the special `k = 0` form with
//! eigenvalue exactly `1/4`.
//!
//! The `k = 0` form is not square-integrable (its `a_0 y^{1/2}` term
//! diverges logarithmically in L^2); it is flagged as such and excluded
//! from cusp-form counts, but listed in the `(+-)` tables with a marker.

use crate::qfield::QnElement;
use crate::specbessel::SpectralPoint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

/// Level of the (unique) CM-carrying member of the catalog.
pub const CM_LEVEL: u64 = 17;

/// Ladder data: the fundamental unit `eta = 4 + sqrt(17)` and its
/// regulator `log eta`.
#[derive(Debug, Clone)]
pub struct CMParameters {
    pub eta: QnElement,
    pub regulator: f64,
}

impl CMParameters {
    pub fn level17() -> Self {
        let eta = QnElement::new(
            BigRational::from_integer(4.into()),
            BigRational::one(),
            17,
        );
        let regulator = eta.to_real(30).to_f64().unwrap().ln();
        Self { eta, regulator }
    }

    /// Spectral point of the `k`-th rung: `r = pi k / log eta`.
    pub fn spectral_point(&self, k: i64) -> SpectralPoint {
        let r = std::f64::consts::PI * k.abs() as f64 / self.regulator;
        SpectralPoint::from_r(r)
    }
}

/// Coefficients of the `k = 0` CM form: `a_0 = log eta` and exact
/// integers `a_1..a_n` obeying the Hecke relations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CMCoefficientTable {
    pub a0: f64,
    /// `coeffs[i]` is `a_{i+1}`; all values are exact integers.
    pub coeffs: Vec<i64>,
    /// The `k = 0` form is a distributional eigenfunction, not in L^2.
    pub square_integrable: bool,
}

impl CMCoefficientTable {
    pub fn a(&self, n: usize) -> i64 {
        self.coeffs[n - 1]
    }
}

/// Kronecker symbol `(a/b)`, completely multiplicative in `b`.
pub fn kronecker_char(a: i64, b: i64) -> i32 {
    // residue tables for (a/2) and the reciprocity sign
    fn symbol_mod8(x: i64) -> i32 {
        match x.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        }
    }
    let (mut a, mut b) = (a, b);
    if b == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let mut twos = 0;
    while b % 2 == 0 {
        b /= 2;
        twos += 1;
    }
    let mut k: i32 = if twos % 2 == 0 { 1 } else { symbol_mod8(a) };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        let mut twos = 0;
        while a % 2 == 0 {
            a /= 2;
            twos += 1;
        }
        if twos % 2 == 1 {
            k *= symbol_mod8(b);
        }
        // quadratic reciprocity sign: both ~ 3 mod 4
        if a.rem_euclid(4) == 3 && b.rem_euclid(4) == 3 {
            k = -k;
        }
        let r = b.rem_euclid(a);
        b = a;
        a = r;
    }
}

/// Builds the `k`-th CM form at level 17: the spectral point for any
/// `k`, and the exact coefficient table for `k = 0` (coefficients of the
/// `k != 0` rungs are out of scope).
pub fn cm_form(k: i64, n_coeffs: usize) -> (SpectralPoint, Option<CMCoefficientTable>) {
    assert!(n_coeffs >= 1);
    let params = CMParameters::level17();
    let point = params.spectral_point(k);
    if k != 0 {
        return (point, None);
    }

    // smallest-prime-factor sieve
    let n = n_coeffs;
    let mut spf = vec![0usize; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }

    let mut a = vec![0i64; n + 1];
    if n >= 1 {
        a[1] = 1;
    }
    for m in 2..=n {
        let p = spf[m];
        let mut pe = p;
        let mut rest = m / p;
        while rest % p == 0 {
            pe *= p;
            rest /= p;
        }
        if rest > 1 {
            // multiplicative split across coprime parts
            a[m] = a[pe] * a[rest];
        } else {
            // prime power: a_{p^{e+1}} = a_p a_{p^e} - (17/p) a_{p^{e-1}}
            if pe == p {
                a[m] = kronecker_char(CM_LEVEL as i64, p as i64) as i64 + 1;
            } else {
                let chi = kronecker_char(CM_LEVEL as i64, p as i64) as i64;
                a[m] = a[p] * a[pe / p] - chi * a[pe / (p * p)];
            }
        }
    }

    let table = CMCoefficientTable {
        a0: params.regulator,
        coeffs: a[1..].to_vec(),
        square_integrable: false,
    };
    (point, Some(table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_integer::Integer;

    #[test]
    fn kronecker_small_values() {
        assert_eq!(kronecker_char(17, 17), 0);
        assert_eq!(kronecker_char(17, 2), 1); // 17 = 1 mod 8
        assert_eq!(kronecker_char(17, 3), -1);
        assert_eq!(kronecker_char(17, 1), 1);
        assert_eq!(kronecker_char(17, 13), 1); // 13 is a QR mod 17 (8^2 = 64 = 13)
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        // for odd primes p, (17/p) = 17^((p-1)/2) mod p
        for p in [3i64, 5, 7, 11, 13, 19, 23, 29, 31, 37, 41, 43, 47] {
            let mut pow = 1i64;
            for _ in 0..(p - 1) / 2 {
                pow = pow * 17 % p;
            }
            let euler = if pow == 1 { 1 } else { -1 };
            assert_eq!(kronecker_char(17, p) as i64, euler, "p = {p}");
        }
    }

    #[test]
    fn kronecker_multiplicative() {
        for b1 in 1i64..40 {
            for b2 in 1i64..40 {
                assert_eq!(
                    kronecker_char(17, b1 * b2),
                    kronecker_char(17, b1) * kronecker_char(17, b2)
                );
            }
        }
    }

    #[test]
    fn k0_form_basics() {
        let (point, table) = cm_form(0, 20);
        assert_eq!(point.lambda, 0.25);
        let t = table.unwrap();
        assert!(!t.square_integrable);
        assert_abs_diff_eq!(t.a0, (4.0 + 17f64.sqrt()).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(t.a0, 2.09471, epsilon = 1e-5);
        assert_eq!(t.a(1), 1);
        assert_eq!(t.a(2), 2);
        assert_eq!(t.a(3), 0);
        assert_eq!(t.a(4), 3); // a_2 a_2 - (17/2) a_1
        assert_eq!(t.a(17), 1);
    }

    #[test]
    fn ladder_eigenvalues() {
        let params = CMParameters::level17();
        assert_abs_diff_eq!(params.regulator, 2.0947125472611012, epsilon = 1e-13);
        let p1 = params.spectral_point(1);
        let expect = (std::f64::consts::PI / params.regulator).powi(2) + 0.25;
        assert_abs_diff_eq!(p1.lambda, expect, epsilon = 1e-14);
        assert_abs_diff_eq!(p1.lambda, 2.49932, epsilon = 1e-5);
    }

    #[test]
    fn prime_values_in_allowed_set() {
        let (_, table) = cm_form(0, 100);
        let t = table.unwrap();
        for p in [2usize, 3, 5, 7, 11, 13, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97] {
            assert!(t.a(p) == 0 || t.a(p) == 2, "a_{p} = {}", t.a(p));
        }
        assert_eq!(t.a(17), 1);
    }

    #[test]
    fn hecke_identity_exact_to_100() {
        let (_, table) = cm_form(0, 100 * 100);
        let t = table.unwrap();
        for n1 in 1usize..=100 {
            for n2 in 1usize..=100 {
                let mut rhs = 0i64;
                let g = n1.gcd(&n2);
                for l in 1..=g {
                    if g % l == 0 {
                        rhs += kronecker_char(17, l as i64) as i64 * t.a(n1 * n2 / (l * l));
                    }
                }
                assert_eq!(t.a(n1) * t.a(n2), rhs, "Hecke identity at ({n1}, {n2})");
            }
        }
    }

    #[test]
    fn coprime_multiplicativity() {
        let (_, table) = cm_form(0, 400);
        let t = table.unwrap();
        for m in 1usize..=20 {
            for n in 1usize..=20 {
                if m.gcd(&n) == 1 {
                    assert_eq!(t.a(m) * t.a(n), t.a(m * n));
                }
            }
        }
    }
}
