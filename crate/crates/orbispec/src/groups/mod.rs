//! Fuchsian groups of the catalog: normalizers `N(Gamma_0(n))` for
//! square-free `n`, their index-two rotation subgroups, Ford fundamental
//! domains, signatures, point pullback, covering sets, and the symmetry
//! characters that define the four Maass-form classes.

pub mod catalog;
pub mod character;
pub mod covering;
pub mod ford;
pub mod normalizer;
pub mod pullback;

use crate::qfield::ExactMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use character::SymmetryCharacter;
pub use covering::{covering_set, verify_covering, CoveringElement, CoveringOptions};
pub use ford::{EnvelopeArc, FordDomain, Side, SideShape, Vertex, VertexCycle};
pub use normalizer::{enumerate_circles, Circle};
pub use pullback::{pullback, word_to_matrix, PullResult, PullStep};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("level {0} is not square-free")]
    NonSquarefree(u64),
    #[error("Ford domain construction failed: {0}")]
    Domain(String),
    #[error("character is trivial (kernel equals the whole group)")]
    TrivialCharacter,
    #[error("character undetermined after sampling (nullspace dimension {0})")]
    CharacterUnderdetermined(usize),
    #[error("sign assignment is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("sign assignment must fix the translation generator")]
    TranslationSign,
    #[error("sign vector length {got} does not match {want} generators")]
    SignLength { got: usize, want: usize },
    #[error("pullback iteration cap exceeded")]
    PullbackCap,
    #[error("covering-set size cap exceeded")]
    CoveringCap,
    #[error("character evaluation failed for {0}")]
    CharacterEval(String),
    #[error("unsupported group kind for this operation")]
    UnsupportedKind,
}

/// Which quotient a presentation or domain describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    Normalizer,
    IndexTwoSubgroup,
    Custom,
}

/// Orbifold signature: genus, cusp count, cone orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signature {
    pub genus: i64,
    pub cusps: usize,
    pub cone_orders: Vec<u32>,
}

impl Signature {
    /// Gauss-Bonnet coarea
    /// `2 pi (2g - 2 + t + sum_i (1 - 1/m_i))`.
    pub fn coarea(&self) -> f64 {
        let cones: f64 = self
            .cone_orders
            .iter()
            .map(|&m| 1.0 - 1.0 / m as f64)
            .sum();
        2.0 * std::f64::consts::PI
            * (2.0 * self.genus as f64 - 2.0 + self.cusps as f64 + cones)
    }
}

/// A group given by labeled exact generators.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub level: u64,
    pub kind: GroupKind,
    /// Metadata carried from the catalog, never computed here.
    pub congruence: bool,
    pub generators: Vec<(String, ExactMatrix)>,
}

/// A catalog surface: presentation plus its Ford domain. For
/// normalizers, `chi0` stores the sign of the index-two character on
/// each visible circle element (the translation generator always has
/// sign `+1`).
#[derive(Debug, Clone)]
pub struct OrbifoldGroup {
    pub level: u64,
    pub kind: GroupKind,
    pub congruence: bool,
    pub domain: FordDomain,
    pub chi0: Option<Vec<i8>>,
    pub presentation: GroupPresentation,
}

impl OrbifoldGroup {
    /// The maximal group `N(Gamma_0(n))` for square-free `n`.
    pub fn normalizer(n: u64) -> Result<Self, GroupError> {
        if !crate::qfield::is_squarefree(n) || n == 0 {
            return Err(GroupError::NonSquarefree(n));
        }
        let domain = ford::build_domain(n, None)?;
        let presentation = presentation_from_domain(&domain, GroupKind::Normalizer, true);
        Ok(Self {
            level: n,
            kind: GroupKind::Normalizer,
            congruence: true,
            domain,
            chi0: None,
            presentation,
        })
    }

    /// Like [`OrbifoldGroup::normalizer`], with the index-two character
    /// derived and cached (needed for subgroup builds and for Maass-form
    /// symmetry classes).
    pub fn normalizer_with_character(n: u64) -> Result<Self, GroupError> {
        let mut g = Self::normalizer(n)?;
        g.chi0 = Some(character::derive_chi0(&g.domain)?);
        Ok(g)
    }

    /// The index-two subgroup cut out by a `{+1, -1}` character.
    ///
    /// With `signs = None`, the built-in rotation-subgroup character is
    /// derived automatically. An explicit assignment is validated as a
    /// homomorphism (against the vertex-cycle relations) and rejected if
    /// trivial.
    pub fn index_two(n: u64, signs: Option<&[i8]>, congruence: bool) -> Result<Self, GroupError> {
        let parent = Self::normalizer_with_character(n)?;
        let circle_signs = match signs {
            None => parent.chi0.clone().unwrap(),
            Some(s) => {
                character::validate_assignment(&parent.domain, s)?;
                s.to_vec()
            }
        };
        if circle_signs.iter().all(|&s| s == 1) {
            return Err(GroupError::TrivialCharacter);
        }
        let domain = ford::build_domain(n, Some((&parent.domain, &circle_signs)))?;
        let presentation = presentation_from_domain(&domain, GroupKind::IndexTwoSubgroup, congruence);
        Ok(Self {
            level: n,
            kind: GroupKind::IndexTwoSubgroup,
            congruence,
            domain,
            chi0: None,
            presentation,
        })
    }
}

fn presentation_from_domain(
    domain: &FordDomain,
    kind: GroupKind,
    congruence: bool,
) -> GroupPresentation {
    let mut generators = vec![(
        "t".to_string(),
        ExactMatrix::from_integers(domain.level, 1, 1, 0, 1).unwrap(),
    )];
    for (i, c) in domain.circles.iter().enumerate() {
        generators.push((format!("g{}", i + 1), c.element.clone()));
    }
    GroupPresentation {
        level: domain.level,
        kind,
        congruence,
        generators,
    }
}
