//! The index-two character of a normalizer.
//!
//! The rotation subgroup is generated by the elements whose diagonal
//! entries agree projectively ("equal-diagonal" elements). The character
//! with that kernel is `+1` on every equal-diagonal element, which turns
//! each equal-diagonal *word* in the domain generators into a GF(2)
//! parity constraint on the unknown generator signs. Sampling words
//! until the constraint nullspace has dimension one pins the character
//! down; dimension zero would mean the character is trivial.
//!
//! Evaluation at an arbitrary group element `g` moves an interior base
//! point by `g`, pulls it back, and verifies *exactly* that the replayed
//! word composed with `g` is the identity; the character value is then
//! the sign product of the word.

use super::ford::FordDomain;
use super::pullback::{pullback, word_to_matrix};
use super::GroupError;
use crate::hypgeom::{mobius_apply, HPoint};
use crate::qfield::ExactMatrix;

/// Incremental GF(2) row space with full back-substitution, rows as bit
/// masks over at most 127 unknowns.
struct Gf2 {
    /// (pivot bit, row) with each pivot appearing in exactly one row.
    rows: Vec<(u32, u128)>,
}

impl Gf2 {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn reduce(&self, mut r: u128) -> u128 {
        for &(p, row) in &self.rows {
            if r >> p & 1 == 1 {
                r ^= row;
            }
        }
        r
    }

    /// Inserts a constraint; returns true if it increased the rank.
    fn add(&mut self, r: u128) -> bool {
        let r = self.reduce(r);
        if r == 0 {
            return false;
        }
        let p = 127 - r.leading_zeros();
        // keep the basis fully reduced
        for row in &mut self.rows {
            if row.1 >> p & 1 == 1 {
                row.1 ^= r;
            }
        }
        self.rows.push((p, r));
        true
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// The unique nonzero nullspace vector when the nullspace is
    /// one-dimensional over `k` unknowns.
    fn nullvector(&self, k: usize) -> Option<u128> {
        if self.rank() + 1 != k {
            return None;
        }
        let pivots: u128 = self.rows.iter().map(|&(p, _)| 1u128 << p).sum();
        let free = (0..k as u32).find(|&i| pivots >> i & 1 == 0)?;
        let mut v = 1u128 << free;
        for &(p, row) in &self.rows {
            if row >> free & 1 == 1 {
                v |= 1u128 << p;
            }
        }
        Some(v)
    }
}

fn equal_diag_f64(m: &[[f64; 2]; 2]) -> bool {
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(1.0);
    (m[0][0] - m[1][1]).abs() < 1e-6 * scale
}

fn mat_mul_f(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Derives the sign of the index-two character on every visible circle
/// element of a normalizer domain.
pub fn derive_chi0(domain: &FordDomain) -> Result<Vec<i8>, GroupError> {
    let k = domain.circles.len();
    assert!(k <= 120, "GF(2) solver limited to 120 generators");

    // alphabet: circle elements, their inverses, and t^{+-1}; each letter
    // carries the bit of its circle (t contributes nothing)
    struct Letter {
        mat: [[f64; 2]; 2],
        exact: ExactMatrix,
        bit: u128,
    }
    let n = domain.level;
    let t = ExactMatrix::from_integers(n, 1, 1, 0, 1).unwrap();
    let mut alphabet = Vec::new();
    for (i, c) in domain.circles.iter().enumerate() {
        alphabet.push(Letter { mat: c.element.to_f64(), exact: c.element.clone(), bit: 1 << i });
        let inv = c.element.mat_inv();
        alphabet.push(Letter { mat: inv.to_f64(), exact: inv, bit: 1 << i });
    }
    alphabet.push(Letter { mat: t.to_f64(), exact: t.clone(), bit: 0 });
    alphabet.push(Letter { mat: t.mat_inv().to_f64(), exact: t.mat_inv(), bit: 0 });

    let mut system = Gf2::new();
    let consider = |word: &[usize], system: &mut Gf2| -> Result<(), GroupError> {
        let mut m = [[1.0f64, 0.0], [0.0, 1.0]];
        let mut bits = 0u128;
        for &l in word {
            m = mat_mul_f(&alphabet[l].mat, &m);
            bits ^= alphabet[l].bit;
        }
        if !equal_diag_f64(&m) || bits == 0 {
            return Ok(());
        }
        // exact confirmation before using the constraint
        let mut exact = ExactMatrix::identity(n);
        for &l in word {
            exact = alphabet[l]
                .exact
                .mat_mul(&exact)
                .map_err(|e| GroupError::Domain(e.to_string()))?;
        }
        if exact.has_equal_diagonal() {
            system.add(bits);
        }
        Ok(())
    };

    let a = alphabet.len();
    // all words of length <= 2, then length 3, then random longer words
    for i in 0..a {
        consider(&[i], &mut system)?;
    }
    'len2: for i in 0..a {
        for j in 0..a {
            consider(&[i, j], &mut system)?;
            if system.rank() + 1 == k {
                break 'len2;
            }
        }
    }
    if system.rank() + 1 < k {
        'len3: for i in 0..a {
            for j in 0..a {
                for l in 0..a {
                    consider(&[i, j, l], &mut system)?;
                    if system.rank() + 1 == k {
                        break 'len3;
                    }
                }
            }
        }
    }
    if system.rank() + 1 < k {
        // deterministic LCG word sampling
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as usize
        };
        for _ in 0..40_000 {
            let len = 4 + next() % 7;
            let word: Vec<usize> = (0..len).map(|_| next() % a).collect();
            consider(&word, &mut system)?;
            if system.rank() + 1 == k {
                break;
            }
        }
    }

    if system.rank() >= k {
        return Err(GroupError::TrivialCharacter);
    }
    let Some(v) = system.nullvector(k) else {
        return Err(GroupError::CharacterUnderdetermined(k - system.rank()));
    };
    if v == 0 {
        return Err(GroupError::TrivialCharacter);
    }
    Ok((0..k).map(|i| if v >> i & 1 == 1 { -1 } else { 1 }).collect())
}

/// One of the four Maass-form symmetry classes of a catalog level.
///
/// The two symmetry generators are the reflection `x -> -x` of the
/// strip-symmetric domain and any element of the normalizer outside the
/// rotation subgroup ("the involution"). A class assigns a sign to each;
/// the resulting multiplicative character is trivial on the rotation
/// subgroup, so Maass forms on the subgroup split into these four
/// classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SymmetryCharacter {
    /// Sign on the reflection `x -> -x` (`+1`: even, cosine expansion).
    pub reflection: i8,
    /// Sign on the involution generating normalizer / rotation subgroup.
    pub involution: i8,
}

impl SymmetryCharacter {
    pub const ALL: [SymmetryCharacter; 4] = [
        SymmetryCharacter { reflection: 1, involution: 1 },
        SymmetryCharacter { reflection: 1, involution: -1 },
        SymmetryCharacter { reflection: -1, involution: 1 },
        SymmetryCharacter { reflection: -1, involution: -1 },
    ];

    /// The two classes trivial on the full normalizer, whose union is
    /// the discrete spectrum of the normalizer quotient.
    pub const NORMALIZER_CLASSES: [SymmetryCharacter; 2] = [
        SymmetryCharacter { reflection: 1, involution: 1 },
        SymmetryCharacter { reflection: -1, involution: 1 },
    ];

    /// Class label in the `(++)` notation.
    pub fn label(&self) -> &'static str {
        match (self.reflection, self.involution) {
            (1, 1) => "(++)",
            (1, -1) => "(+-)",
            (-1, 1) => "(-+)",
            (-1, -1) => "(--)",
            _ => unreachable!("signs are +-1"),
        }
    }

    /// Parses `++`, `(+-)`, `-+`, ... (parentheses optional).
    pub fn parse(s: &str) -> Option<SymmetryCharacter> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut it = t.chars();
        let sgn = |c: char| match c {
            '+' => Some(1i8),
            '-' => Some(-1i8),
            _ => None,
        };
        let reflection = sgn(it.next()?)?;
        let involution = sgn(it.next()?)?;
        if it.next().is_some() {
            return None;
        }
        Some(SymmetryCharacter { reflection, involution })
    }

    /// Whether the character is trivial on the subgroup `Gamma'` only
    /// (always true) and on the full normalizer (involution sign `+1`).
    pub fn trivial_on_normalizer(&self) -> bool {
        self.involution == 1
    }
}

impl std::fmt::Display for SymmetryCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Evaluates a `{+1, -1}` character (given by its circle signs) at an
/// arbitrary element of the normalizer.
pub fn eval_char(
    domain: &FordDomain,
    signs: &[i8],
    g: &ExactMatrix,
) -> Result<i8, GroupError> {
    let ctx = domain.pull_ctx(Some(signs));
    let top = domain
        .circles
        .iter()
        .map(|c| c.radius_f)
        .fold(0.0f64, f64::max);
    for (x0, y0) in [
        (0.1234567890123, top + 1.337),
        (-0.2718281828459, top + 0.911),
        (0.0314159265358, top + 1.729),
        (0.4142135623730, top + 0.577),
    ] {
        let z0 = HPoint::new(x0, y0);
        let w = mobius_apply(g, z0);
        let Ok(res) = pullback(&ctx, w) else { continue };
        let gamma = word_to_matrix(domain, &res.word)?;
        let total = gamma
            .mat_mul(g)
            .map_err(|e| GroupError::Domain(e.to_string()))?;
        if total.is_identity() {
            return Ok(res.sign);
        }
        // the base point may have landed on a cell boundary; retry
    }
    Err(GroupError::CharacterEval(format!("{g}")))
}

/// Validates an explicit sign assignment (one sign per visible circle)
/// as a character: signs must be `+-1` and every odd-order vertex cycle
/// relation must map to `+1`.
pub fn validate_assignment(domain: &FordDomain, signs: &[i8]) -> Result<(), GroupError> {
    if signs.len() != domain.circles.len() {
        return Err(GroupError::SignLength {
            got: signs.len(),
            want: domain.circles.len(),
        });
    }
    if signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(GroupError::NotHomomorphism("signs must be +1 or -1".into()));
    }
    for cyc in &domain.cycles {
        if cyc.ideal || cyc.order % 2 == 0 {
            continue;
        }
        let mut prod = 1i8;
        for &s in &cyc.sides {
            if let super::ford::SideShape::Arc { circle, .. } = domain.sides[s].shape {
                prod *= signs[circle];
            }
        }
        if prod != 1 {
            return Err(GroupError::NotHomomorphism(format!(
                "odd-order cycle relation (order {}) violated",
                cyc.order
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::ford::build_domain;
    use crate::qfield::QnElement;

    fn q(num: i64, den: i64, m: u64) -> QnElement {
        if m == 1 {
            QnElement::from_rational(num, den)
        } else {
            QnElement::sqrt_term(num, den, m)
        }
    }

    #[test]
    fn level11_character() {
        let d = build_domain(11, None).unwrap();
        let chi = derive_chi0(&d).unwrap();
        assert_eq!(chi.len(), d.circles.len());
        assert!(chi.contains(&-1));
        // the Fricke involution is equal-diagonal, so chi = +1 there
        let fricke = d.circles.iter().position(|c| c.center_f == 0.0).unwrap();
        assert_eq!(chi[fricke], 1);
        // rotation subgroup membership of known elements
        for (mat, expected) in [
            // in the rotation subgroup
            (ExactMatrix::from_integers(11, 10, 3, 33, 10).unwrap(), 1),
            (ExactMatrix::from_integers(11, 23, 8, 66, 23).unwrap(), 1),
            (
                ExactMatrix::new(11, q(0, 1, 1), q(-1, 11, 11), q(1, 1, 11), q(0, 1, 1)).unwrap(),
                1,
            ),
            (
                ExactMatrix::new(11, q(1, 1, 11), q(5, 11, 11), q(2, 1, 11), q(1, 1, 11)).unwrap(),
                1,
            ),
            // t * fricke is a product of two kernel elements
            (
                ExactMatrix::new(11, q(1, 1, 11), q(-1, 11, 11), q(1, 1, 11), q(0, 1, 1)).unwrap(),
                1,
            ),
            // the trace-zero involution over -1/3 is not in the kernel
            (
                ExactMatrix::new(11, q(-1, 1, 11), q(-4, 11, 11), q(3, 1, 11), q(1, 1, 11)).unwrap(),
                -1,
            ),
            // and neither is its product with a kernel element
            (
                ExactMatrix::new(11, q(-1, 1, 11), q(-4, 11, 11), q(3, 1, 11), q(1, 1, 11))
                    .unwrap()
                    .mat_mul(&ExactMatrix::from_integers(11, 10, 3, 33, 10).unwrap())
                    .unwrap(),
                -1,
            ),
        ] {
            assert_eq!(eval_char(&d, &chi, &mat).unwrap(), expected, "{mat}");
        }
    }

    #[test]
    fn character_multiplicative_on_products() {
        let d = build_domain(19, None).unwrap();
        let chi = derive_chi0(&d).unwrap();
        let g1 = &d.circles[0].element;
        let g2 = &d.circles[d.circles.len() / 2].element;
        let prod = g1.mat_mul(g2).unwrap();
        let lhs = eval_char(&d, &chi, &prod).unwrap();
        let rhs = eval_char(&d, &chi, g1).unwrap() * eval_char(&d, &chi, g2).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn symmetry_character_labels_round_trip() {
        for c in SymmetryCharacter::ALL {
            assert_eq!(SymmetryCharacter::parse(c.label()), Some(c));
            // multiplicative: the product of two classes is a class
            let prod = SymmetryCharacter {
                reflection: c.reflection * c.reflection,
                involution: c.involution * c.involution,
            };
            assert_eq!(prod.label(), "(++)");
        }
        assert_eq!(
            SymmetryCharacter::parse("-+"),
            Some(SymmetryCharacter { reflection: -1, involution: 1 })
        );
        assert_eq!(SymmetryCharacter::parse("(+*)"), None);
        assert!(SymmetryCharacter::NORMALIZER_CLASSES
            .iter()
            .all(|c| c.trivial_on_normalizer()));
    }

    #[test]
    fn trivial_assignment_is_valid_but_rejected_upstream() {
        let d = build_domain(11, None).unwrap();
        let all_plus = vec![1i8; d.circles.len()];
        // a valid homomorphism (the trivial one)
        validate_assignment(&d, &all_plus).unwrap();
        // wrong length rejected
        assert!(matches!(
            validate_assignment(&d, &[1]),
            Err(GroupError::SignLength { .. })
        ));
    }
}
