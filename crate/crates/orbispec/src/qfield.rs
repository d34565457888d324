//! Exact arithmetic in real quadratic rings and projective 2x2 matrices.
//!
//! Every group element handled by this crate is a unit-determinant matrix
//! whose entries have the shape `rat + surd*sqrt(m)` for a square-free
//! carrier `m` dividing the level. Elements of the Fricke/Atkin-Lehner
//! cosets of a level-`n` normalizer have all four entries proportional to
//! `sqrt(e)` for a single divisor `e | n`, so sums and products of matrix
//! entries stay representable even though the full field is biquadratic
//! for composite levels. Keeping the carrier per element (rather than
//! fixing it to `n`) is what makes levels like 33 work, where traces such
//! as `4*sqrt(3)` and `sqrt(33)` both occur.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Neg;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QfieldError {
    #[error("carrier mismatch: cannot combine sqrt({0}) with sqrt({1})")]
    CarrierMismatch(u64, u64),
    #[error("product leaves the quadratic ring (carriers {0} and {1})")]
    NotRepresentable(u64, u64),
    #[error("matrix level mismatch: {0} vs {1}")]
    LevelMismatch(u64, u64),
    #[error("entry carrier {carrier} does not divide the level {level}")]
    BadCarrier { carrier: u64, level: u64 },
    #[error("determinant is not 1")]
    BadDeterminant,
    #[error("division by zero element")]
    DivisionByZero,
}

/// Strips the square part of `m`, returning `(s, m0)` with `m = s^2 * m0`
/// and `m0` square-free.
pub fn squarefree_part(m: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut m0 = m;
    let mut d = 2u64;
    while d * d <= m0 {
        while m0 % (d * d) == 0 {
            m0 /= d * d;
            s *= d;
        }
        d += 1;
    }
    (s, m0)
}

pub fn is_squarefree(m: u64) -> bool {
    squarefree_part(m).0 == 1
}

/// An exact element `rat + surd * sqrt(carrier)` of a real quadratic ring.
///
/// Invariants kept by every constructor: `carrier` is square-free, and
/// `carrier == 1` exactly when `surd == 0` (purely rational values carry
/// the trivial tag so equality is structural).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QnElement {
    rat: BigRational,
    surd: BigRational,
    carrier: u64,
}

impl QnElement {
    pub fn new(rat: BigRational, surd: BigRational, carrier: u64) -> Self {
        if surd.is_zero() {
            return Self {
                rat,
                surd,
                carrier: 1,
            };
        }
        let (s, m0) = squarefree_part(carrier);
        if m0 == 1 {
            Self {
                rat: rat + surd * BigRational::from_integer(BigInt::from(s)),
                surd: BigRational::zero(),
                carrier: 1,
            }
        } else {
            Self {
                rat,
                surd: surd * BigRational::from_integer(BigInt::from(s)),
                carrier: m0,
            }
        }
    }

    pub fn from_integer(v: i64) -> Self {
        Self::new(
            BigRational::from_integer(BigInt::from(v)),
            BigRational::zero(),
            1,
        )
    }

    pub fn from_rational(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
            1,
        )
    }

    /// `coeff * sqrt(m)`, normalizing the square part of `m` into `coeff`.
    pub fn sqrt_term(num: i64, den: i64, m: u64) -> Self {
        Self::new(
            BigRational::zero(),
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            m,
        )
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn rat(&self) -> &BigRational {
        &self.rat
    }

    pub fn surd(&self) -> &BigRational {
        &self.surd
    }

    pub fn carrier(&self) -> u64 {
        self.carrier
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.surd.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, QfieldError> {
        if self.surd.is_zero() || other.surd.is_zero() || self.carrier == other.carrier {
            let carrier = if self.surd.is_zero() {
                other.carrier
            } else {
                self.carrier
            };
            Ok(Self::new(
                &self.rat + &other.rat,
                &self.surd + &other.surd,
                carrier,
            ))
        } else {
            Err(QfieldError::CarrierMismatch(self.carrier, other.carrier))
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, QfieldError> {
        self.checked_add(&other.clone().neg())
    }

    /// Exact product. The four cross terms are merged by carrier; the
    /// result must again be of the form `rat + surd*sqrt(m)` for a single
    /// `m`, which holds for all products arising from normalizer cosets.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, QfieldError> {
        // (r1 + s1 se)(r2 + s2 sf) = r1 r2 + s1 s2 se sf + r1 s2 sf + s1 r2 se
        let mut rat = &self.rat * &other.rat;
        let mut surd = BigRational::zero();
        let mut carrier = 1u64;

        let push = |coeff: BigRational,
                        m: u64,
                        rat: &mut BigRational,
                        surd: &mut BigRational,
                        carrier: &mut u64|
         -> Result<(), QfieldError> {
            if coeff.is_zero() {
                return Ok(());
            }
            if m == 1 {
                *rat += coeff;
            } else if carrier == &1 || *carrier == m {
                *surd += coeff;
                *carrier = m;
            } else {
                return Err(QfieldError::NotRepresentable(*carrier, m));
            }
            Ok(())
        };

        if !self.surd.is_zero() && !other.surd.is_zero() {
            let g = self.carrier.gcd(&other.carrier);
            let m = (self.carrier / g) * (other.carrier / g);
            let coeff = &self.surd * &other.surd * BigRational::from_integer(BigInt::from(g));
            push(coeff, m, &mut rat, &mut surd, &mut carrier)?;
        }
        if !other.surd.is_zero() {
            let coeff = &self.rat * &other.surd;
            push(coeff, other.carrier, &mut rat, &mut surd, &mut carrier)?;
        }
        if !self.surd.is_zero() {
            let coeff = &self.surd * &other.rat;
            push(coeff, self.carrier, &mut rat, &mut surd, &mut carrier)?;
        }
        Ok(Self::new(rat, surd, carrier))
    }

    /// Multiplicative inverse via the conjugate.
    pub fn checked_inv(&self) -> Result<Self, QfieldError> {
        if self.is_zero() {
            return Err(QfieldError::DivisionByZero);
        }
        let m = BigRational::from_integer(BigInt::from(self.carrier));
        let norm = &self.rat * &self.rat - &self.surd * &self.surd * m;
        if norm.is_zero() {
            // impossible for square-free carrier > 1 unless zero
            return Err(QfieldError::DivisionByZero);
        }
        Ok(Self::new(
            &self.rat / &norm,
            -(&self.surd / &norm),
            self.carrier,
        ))
    }

    /// Exact sign of `rat + surd*sqrt(carrier)`.
    pub fn sign(&self) -> i32 {
        let sr = rational_sign(&self.rat);
        let ss = rational_sign(&self.surd);
        if ss == 0 {
            return sr;
        }
        if sr == 0 {
            return ss;
        }
        if sr == ss {
            return sr;
        }
        // opposite signs: compare rat^2 against surd^2 * carrier
        let m = BigRational::from_integer(BigInt::from(self.carrier));
        let lhs = &self.rat * &self.rat;
        let rhs = &self.surd * &self.surd * m;
        if lhs > rhs {
            sr
        } else {
            // equality would force rat = surd = 0
            ss
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            self.clone().neg()
        } else {
            self.clone()
        }
    }

    /// Exact comparison against a rational threshold, when representable.
    pub fn cmp_rational(&self, num: i64, den: i64) -> std::cmp::Ordering {
        let t = Self::from_rational(num, den);
        let d = self.checked_sub(&t).expect("rational threshold");
        match d.sign() {
            s if s < 0 => std::cmp::Ordering::Less,
            0 => std::cmp::Ordering::Equal,
            _ => std::cmp::Ordering::Greater,
        }
    }

    /// Decimal approximation accurate to `digits` places after the point.
    pub fn to_real(&self, digits: u32) -> BigRational {
        if self.surd.is_zero() {
            return self.rat.clone();
        }
        // guard digits cover |surd| and the final rounding
        let surd_mag = self.surd.abs().ceil().to_integer().bits() / 3 + 1;
        let k = digits as u64 + 6 + surd_mag;
        let scale = BigInt::from(10u32).pow(k as u32);
        let target = BigInt::from(self.carrier) * &scale * &scale;
        let root = target.sqrt(); // floor sqrt
        let sqrt_m = BigRational::new(root, scale);
        &self.rat + &self.surd * sqrt_m
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.rat.to_f64().unwrap_or(f64::NAN);
        if self.surd.is_zero() {
            return r;
        }
        r + self.surd.to_f64().unwrap_or(f64::NAN) * (self.carrier as f64).sqrt()
    }
}

fn rational_sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl Neg for QnElement {
    type Output = QnElement;
    fn neg(self) -> QnElement {
        QnElement {
            rat: -self.rat,
            surd: -self.surd,
            carrier: self.carrier,
        }
    }
}

impl fmt::Display for QnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            write!(f, "{}", self.rat)
        } else if self.rat.is_zero() {
            write!(f, "{}*sqrt({})", self.surd, self.carrier)
        } else {
            write!(f, "{} + {}*sqrt({})", self.rat, self.surd, self.carrier)
        }
    }
}

/// Serialized form of a single entry: reduced fraction pairs for the
/// rational and surd parts plus the square-free carrier of the surd.
#[derive(Serialize, Deserialize)]
struct QnElementRepr {
    rat: [String; 2],
    surd: [String; 2],
    carrier: u64,
}

impl Serialize for QnElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        QnElementRepr {
            rat: [self.rat.numer().to_string(), self.rat.denom().to_string()],
            surd: [self.surd.numer().to_string(), self.surd.denom().to_string()],
            carrier: self.carrier,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QnElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = QnElementRepr::deserialize(d)?;
        let parse = |v: &str| v.parse::<BigInt>().map_err(D::Error::custom);
        let rat = BigRational::new(parse(&repr.rat[0])?, parse(&repr.rat[1])?);
        let surd = BigRational::new(parse(&repr.surd[0])?, parse(&repr.surd[1])?);
        Ok(QnElement::new(rat, surd, repr.carrier))
    }
}

/// How a unit-determinant isometry acts on the hyperbolic plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsometryClass {
    /// |trace| < 2; `order` is reported when the trace pins it down
    /// (0 -> 2, +-1 -> 3, trace^2 = 2 -> 4, trace^2 = 3 -> 6).
    Elliptic { order: Option<u32> },
    Parabolic,
    Hyperbolic,
}

/// A 2x2 determinant-one matrix over a real quadratic ring, identified
/// with its negation (an element of PSL2). Entries are canonicalized so
/// the first nonzero entry in reading order is positive; equality and
/// hashing are therefore projective.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactMatrix {
    n: u64,
    a: QnElement,
    b: QnElement,
    c: QnElement,
    d: QnElement,
}

impl ExactMatrix {
    pub fn new(
        n: u64,
        a: QnElement,
        b: QnElement,
        c: QnElement,
        d: QnElement,
    ) -> Result<Self, QfieldError> {
        for e in [&a, &b, &c, &d] {
            if e.carrier() != 1 && n % e.carrier() != 0 {
                return Err(QfieldError::BadCarrier {
                    carrier: e.carrier(),
                    level: n,
                });
            }
        }
        let det = a
            .checked_mul(&d)?
            .checked_sub(&b.checked_mul(&c)?)?;
        if det != QnElement::one() {
            return Err(QfieldError::BadDeterminant);
        }
        let mut m = Self { n, a, b, c, d };
        m.canonicalize();
        Ok(m)
    }

    fn canonicalize(&mut self) {
        let sign = [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .map(|e| e.sign())
            .find(|&s| s != 0)
            .unwrap_or(1);
        if sign < 0 {
            self.a = self.a.clone().neg();
            self.b = self.b.clone().neg();
            self.c = self.c.clone().neg();
            self.d = self.d.clone().neg();
        }
    }

    pub fn identity(n: u64) -> Self {
        Self {
            n,
            a: QnElement::one(),
            b: QnElement::zero(),
            c: QnElement::zero(),
            d: QnElement::one(),
        }
    }

    /// Integer matrix in SL2(Z), tagged with level `n`.
    pub fn from_integers(n: u64, a: i64, b: i64, c: i64, d: i64) -> Result<Self, QfieldError> {
        Self::new(
            n,
            QnElement::from_integer(a),
            QnElement::from_integer(b),
            QnElement::from_integer(c),
            QnElement::from_integer(d),
        )
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn entries(&self) -> [&QnElement; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn mat_mul(&self, other: &Self) -> Result<Self, QfieldError> {
        if self.n != other.n {
            return Err(QfieldError::LevelMismatch(self.n, other.n));
        }
        let a = self
            .a
            .checked_mul(&other.a)?
            .checked_add(&self.b.checked_mul(&other.c)?)?;
        let b = self
            .a
            .checked_mul(&other.b)?
            .checked_add(&self.b.checked_mul(&other.d)?)?;
        let c = self
            .c
            .checked_mul(&other.a)?
            .checked_add(&self.d.checked_mul(&other.c)?)?;
        let d = self
            .c
            .checked_mul(&other.b)?
            .checked_add(&self.d.checked_mul(&other.d)?)?;
        let mut m = Self { n: self.n, a, b, c, d };
        m.canonicalize();
        Ok(m)
    }

    pub fn mat_inv(&self) -> Self {
        let mut m = Self {
            n: self.n,
            a: self.d.clone(),
            b: self.b.clone().neg(),
            c: self.c.clone().neg(),
            d: self.a.clone(),
        };
        m.canonicalize();
        m
    }

    pub fn trace(&self) -> Result<QnElement, QfieldError> {
        self.a.checked_add(&self.d)
    }

    pub fn is_identity(&self) -> bool {
        self.b.is_zero()
            && self.c.is_zero()
            && self.a == self.d
            && !self.a.is_zero()
            && self.a.checked_mul(&self.d).map(|p| p == QnElement::one()) == Ok(true)
    }

    /// Whether the diagonal entries agree (projectively). Conjugating such
    /// an element by `z -> -conj(z)` yields an orientation-reversing
    /// involution, i.e. a reflection; these elements generate the rotation
    /// subgroup of the maximal reflection group containing the level's
    /// normalizer.
    pub fn has_equal_diagonal(&self) -> bool {
        self.a == self.d
    }

    pub fn classify(&self) -> IsometryClass {
        let t = self.trace().expect("group element trace");
        // compare t^2 with 4 exactly
        let t2 = t.checked_mul(&t).expect("trace square");
        match t2.cmp_rational(4, 1) {
            std::cmp::Ordering::Greater => IsometryClass::Hyperbolic,
            std::cmp::Ordering::Equal => IsometryClass::Parabolic,
            std::cmp::Ordering::Less => {
                let order = if t.is_zero() {
                    Some(2)
                } else if t.abs() == QnElement::one() {
                    Some(3)
                } else if t2 == QnElement::from_integer(2) {
                    Some(4)
                } else if t2 == QnElement::from_integer(3) {
                    Some(6)
                } else {
                    None
                };
                IsometryClass::Elliptic { order }
            }
        }
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [
            [self.a.to_f64(), self.b.to_f64()],
            [self.c.to_f64(), self.d.to_f64()],
        ]
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}; {}, {}]", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: u64, entries: [(i64, i64, u64); 4]) -> ExactMatrix {
        let [a, b, c, d] = entries.map(|(num, den, m)| {
            if m == 1 {
                QnElement::from_rational(num, den)
            } else {
                QnElement::sqrt_term(num, den, m)
            }
        });
        ExactMatrix::new(n, a, b, c, d).unwrap()
    }

    /// Side-pairing generators of the level-11 normalizer's Ford domain.
    fn m11_generators() -> Vec<ExactMatrix> {
        vec![
            g(11, [(1, 1, 11), (-1, 11, 11), (1, 1, 11), (0, 1, 1)]),
            g(11, [(1, 1, 1), (1, 1, 1), (0, 1, 1), (1, 1, 1)]),
            g(11, [(1, 1, 11), (-6, 11, 11), (2, 1, 11), (-1, 1, 11)]),
            g(11, [(1, 1, 11), (-4, 11, 11), (3, 1, 11), (-1, 1, 11)]),
            g(11, [(2, 1, 11), (-15, 11, 11), (3, 1, 11), (-2, 1, 11)]),
        ]
    }

    #[test]
    fn identity_is_neutral() {
        let gens = m11_generators();
        let id = ExactMatrix::identity(11);
        assert_eq!(id.mat_mul(&gens[0]).unwrap(), gens[0]);
        assert_eq!(gens[0].mat_mul(&id).unwrap(), gens[0]);
    }

    #[test]
    fn product_g1_g2_matches_hand_computation() {
        let gens = m11_generators();
        let p = gens[0].mat_mul(&gens[1]).unwrap();
        // (sqrt(11), (10/11) sqrt(11); sqrt(11), sqrt(11))
        let expect = g(11, [(1, 1, 11), (10, 11, 11), (1, 1, 11), (1, 1, 11)]);
        assert_eq!(p, expect);
    }

    #[test]
    fn determinant_preserved_under_product() {
        let gens = m11_generators();
        // constructor would reject a non-unit determinant
        let p = gens[2].mat_mul(&gens[3]).unwrap();
        let det = p.entries()[0]
            .checked_mul(p.entries()[3])
            .unwrap()
            .checked_sub(&p.entries()[1].checked_mul(p.entries()[2]).unwrap())
            .unwrap();
        assert_eq!(det, QnElement::one());
    }

    #[test]
    fn parabolic_inverse() {
        let t = ExactMatrix::from_integers(11, 1, 1, 0, 1).unwrap();
        let expect = ExactMatrix::from_integers(11, 1, -1, 0, 1).unwrap();
        assert_eq!(t.mat_inv(), expect);
        assert!(ExactMatrix::identity(11).mat_inv().is_identity());
        let gens = m11_generators();
        assert!(gens[0].mat_inv().mat_mul(&gens[0]).unwrap().is_identity());
    }

    #[test]
    fn classification_by_exact_trace() {
        let t = ExactMatrix::from_integers(11, 1, 1, 0, 1).unwrap();
        assert_eq!(t.classify(), IsometryClass::Parabolic);

        let h = ExactMatrix::from_integers(11, 5, -1, 11, -2).unwrap();
        assert_eq!(h.classify(), IsometryClass::Hyperbolic);
        assert_eq!(h.trace().unwrap(), QnElement::from_integer(3));

        let e = g(19, [(0, 1, 1), (-1, 19, 19), (1, 1, 19), (0, 1, 1)]);
        assert_eq!(e.classify(), IsometryClass::Elliptic { order: Some(2) });

        // trace sqrt(11) is hyperbolic
        let gens = m11_generators();
        assert_eq!(gens[0].classify(), IsometryClass::Hyperbolic);
    }

    #[test]
    fn to_real_approximations() {
        let three = QnElement::from_integer(3);
        assert_eq!(three.to_real(10), BigRational::from_integer(3.into()));

        let root11 = QnElement::sqrt_term(1, 1, 11);
        let approx = root11.to_real(10).to_f64().unwrap();
        assert!((approx - 3.3166247903554).abs() < 1e-10);

        // eta = 4 + sqrt(17), the level-17 fundamental unit
        let eta = QnElement::new(
            BigRational::from_integer(4.into()),
            BigRational::one(),
            17,
        );
        let approx = eta.to_real(10).to_f64().unwrap();
        assert!((approx - 8.1231056256177).abs() < 1e-10);
    }

    #[test]
    fn to_real_monotone_in_digits() {
        let x = QnElement::new(
            BigRational::new(7.into(), 3.into()),
            BigRational::new((-2).into(), 5.into()),
            33,
        );
        let exact = x.to_f64();
        for digits in [1u32, 3, 6, 9, 12] {
            let approx = x.to_real(digits).to_f64().unwrap();
            assert!((approx - exact).abs() < 10f64.powi(-(digits as i32)));
        }
    }

    #[test]
    fn mixed_carriers_rejected() {
        let a = QnElement::sqrt_term(1, 1, 3);
        let b = QnElement::sqrt_term(1, 1, 11);
        assert!(a.checked_add(&b).is_err());
        // but the product lands in sqrt(33)
        let p = a.checked_mul(&b).unwrap();
        assert_eq!(p, QnElement::sqrt_term(1, 1, 33));
    }

    #[test]
    fn level_mismatch_rejected() {
        let x = ExactMatrix::from_integers(11, 1, 1, 0, 1).unwrap();
        let y = ExactMatrix::from_integers(19, 1, 1, 0, 1).unwrap();
        assert!(x.mat_mul(&y).is_err());
    }

    #[test]
    fn projective_canonicalization() {
        let m = ExactMatrix::from_integers(5, -1, -1, 0, -1).unwrap();
        let t = ExactMatrix::from_integers(5, 1, 1, 0, 1).unwrap();
        assert_eq!(m, t);
    }

    #[test]
    fn serde_round_trip_is_exact() {
        let gens = m11_generators();
        let long = gens[2]
            .mat_mul(&gens[4])
            .unwrap()
            .mat_mul(&gens[2])
            .unwrap()
            .mat_mul(&gens[3])
            .unwrap();
        let json = serde_json::to_string(&long).unwrap();
        let back: ExactMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(long, back);
    }
}
