//! Reference spectral data for the catalog levels: the smallest
//! eigenvalue of each symmetry class, eigenvalue counts below 200, the
//! complete low-lying level-19 lists, and the Buser-Cheeger comparison
//! rows built from them.
//!
//! These values serve as an independent check for the scans and as the
//! `lambda_1` input of the Buser-Cheeger report.

use crate::groups::{GroupKind, SymmetryCharacter};
use serde::{Deserialize, Serialize};

/// Classes in canonical order: `(++), (+-), (-+), (--)`.
pub const CLASS_ORDER: [SymmetryCharacter; 4] = SymmetryCharacter::ALL;

fn class_index(class: SymmetryCharacter) -> usize {
    CLASS_ORDER
        .iter()
        .position(|c| *c == class)
        .expect("class is one of the four")
}

/// Smallest eigenvalue of each class, `None` where the class has no
/// discrete spectrum in the computed range (levels 33 and 42 have an
/// empty `(+-)` class).
pub fn first_eigenvalues(level: u64) -> Option<[Option<f64>; 4]> {
    Some(match level {
        11 => [
            Some(6.41822455110),
            Some(0.24456267323),
            Some(9.06024545639),
            Some(10.00253800339),
        ],
        15 => [
            Some(10.62011651411),
            Some(3.56777601683),
            Some(5.82589930819),
            Some(9.42106297240),
        ],
        17 => [
            Some(3.67134534972),
            Some(0.25),
            Some(4.12297031172),
            Some(6.24399453828),
        ],
        19 => [
            Some(2.01836508907),
            Some(0.16961204041),
            Some(5.52623821363),
            Some(5.62364409573),
        ],
        22 => [
            Some(3.24185004329),
            Some(0.23828308162),
            Some(4.93732929346),
            Some(5.81410275753),
        ],
        26 => [
            Some(2.14598046442),
            Some(0.21588714472),
            Some(4.46353001031),
            Some(5.05501819375),
        ],
        33 => [
            Some(2.24813673858),
            None,
            Some(2.67134067803),
            Some(4.83385807583),
        ],
        42 => [
            Some(1.87318457587),
            None,
            Some(2.92045953841),
            Some(4.43972502521),
        ],
        55 => [
            Some(0.68768162820),
            Some(0.14843098682),
            Some(2.76461871050),
            Some(3.30378314566),
        ],
        66 => [
            Some(0.62303205749),
            Some(0.15286533999),
            Some(2.67134067803),
            Some(3.43082014307),
        ],
        _ => return None,
    })
}

/// Smallest eigenvalue of one class.
pub fn first_eigenvalue(level: u64, class: SymmetryCharacter) -> Option<f64> {
    first_eigenvalues(level)?[class_index(class)]
}

/// Eigenvalue counts below 200 per class.
pub fn counts_below_200(level: u64) -> Option<[usize; 4]> {
    Some(match level {
        11 => [37, 1, 38, 38],
        15 => [36, 37, 38, 38],
        17 => [63, 58, 63, 60],
        19 => [71, 1, 68, 68],
        22 => [60, 1, 61, 61],
        26 => [74, 1, 72, 72],
        33 => [86, 0, 84, 84],
        42 => [85, 0, 83, 83],
        55 => [140, 1, 128, 127],
        66 => [138, 1, 129, 128],
        _ => return None,
    })
}

/// Whether the `(+-)` class of the level contains infinitely many
/// eigenvalues (`Some(true)`: the rotation subgroup is congruence), at
/// most one (`Some(false)`), or the level is unknown.
pub fn odd_involution_class_is_infinite(level: u64) -> Option<bool> {
    crate::groups::catalog::is_catalog_level(level)
        .then(|| crate::groups::catalog::CONGRUENCE_SUBGROUP_LEVELS.contains(&level))
}

/// Complete level-19 eigenvalue lists per class below ~31.
pub fn level19_class_list(class: SymmetryCharacter) -> &'static [f64] {
    match class_index(class) {
        0 => &[
            2.018365089,
            5.178444802,
            8.183549674,
            9.893410725,
            16.96819424,
            18.55690731,
            18.59544749,
            21.32460096,
            24.00366338,
            30.96013885,
        ],
        1 => &[0.169612040],
        2 => &[
            5.526238214,
            10.44255994,
            11.98729193,
            17.09642816,
            19.89417157,
            23.09408224,
            27.31732822,
            30.03293145,
            31.23572386,
        ],
        3 => &[
            5.623644096,
            11.09994133,
            13.34726954,
            19.16508797,
            21.71327432,
            24.65978283,
            28.16059477,
            30.44847115,
        ],
        _ => unreachable!(),
    }
}

/// Smallest discrete eigenvalue of a catalog quotient. The normalizer
/// quotient carries the involution-even classes; the rotation-subgroup
/// quotient carries all four.
pub fn lambda1(level: u64, kind: GroupKind) -> Option<f64> {
    let heads = first_eigenvalues(level)?;
    let picks: &[usize] = match kind {
        GroupKind::Normalizer => &[0, 2],
        GroupKind::IndexTwoSubgroup => &[0, 1, 2, 3],
        GroupKind::Custom => return None,
    };
    picks
        .iter()
        .filter_map(|&i| heads[i])
        .min_by(f64::total_cmp)
}

/// One row of the Buser-Cheeger comparison: the Cheeger lower bound
/// `h^2/4 <= lambda_1` always holds; the Buser-type upper bound
/// `lambda_1 <= 2h + 10h^2` (valid for closed surfaces) can fail on
/// these cusped orbifold quotients and is flagged when it does.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuserRow {
    pub surface: String,
    pub h: f64,
    pub lambda1: f64,
    /// `h^2 / 4`.
    pub cheeger_lower: f64,
    /// `2h + 10h^2`.
    pub buser_upper: f64,
    /// True when `h^2/4 <= lambda_1` holds (it must).
    pub lower_ok: bool,
    /// True when `lambda_1 > 2h + 10h^2`, i.e. the closed-surface Buser
    /// inequality fails here.
    pub buser_violated: bool,
}

pub fn buser_row(surface: &str, h: f64, lambda1: f64) -> BuserRow {
    let cheeger_lower = h * h / 4.0;
    let buser_upper = 2.0 * h + 10.0 * h * h;
    BuserRow {
        surface: surface.to_string(),
        h,
        lambda1,
        cheeger_lower,
        buser_upper,
        lower_ok: cheeger_lower <= lambda1 + 1e-12,
        buser_violated: lambda1 > buser_upper,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_cover_the_catalog() {
        for level in crate::groups::catalog::LEVELS {
            let heads = first_eigenvalues(level).unwrap();
            let counts = counts_below_200(level).unwrap();
            for (head, count) in heads.iter().zip(counts) {
                // an empty class must also count zero below 200
                assert_eq!(head.is_some(), count > 0, "level {level}");
            }
        }
        assert!(first_eigenvalues(13).is_none());
    }

    #[test]
    fn level19_lists_start_at_the_class_heads() {
        for class in CLASS_ORDER {
            let head = first_eigenvalue(19, class).unwrap();
            let list = level19_class_list(class);
            assert!((list[0] - head).abs() < 1e-7);
            assert!(list.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn lambda1_matches_the_known_buser_flags() {
        // rotation quotient of level 15: lambda_1 = 3.5678 exceeds
        // 2h + 10h^2 at h = 0.4987...
        let l1 = lambda1(15, GroupKind::IndexTwoSubgroup).unwrap();
        let row = buser_row("N15", 0.4987276868, l1);
        assert!(row.lower_ok && row.buser_violated);
        // level 42 rotation quotient: the (+-) class is empty and the
        // minimum comes from (++)
        let l1 = lambda1(42, GroupKind::IndexTwoSubgroup).unwrap();
        assert!((l1 - 1.87318457587).abs() < 1e-10);
        let row = buser_row("N42", 0.3284062093, l1);
        assert!(row.lower_ok && row.buser_violated);
        // the rotation quotient of level 11 is not flagged: its small
        // (+-) eigenvalue sits far below the Buser-type upper bound
        let l1 = lambda1(11, GroupKind::IndexTwoSubgroup).unwrap();
        assert!((l1 - 0.24456267323).abs() < 1e-10);
        let row = buser_row("N11", 0.3063489625, l1);
        assert!(row.lower_ok && !row.buser_violated);
    }
}
