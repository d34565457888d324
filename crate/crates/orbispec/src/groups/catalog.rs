//! The ten catalog levels and named surface lookup.
//!
//! For each square-free `n` in the catalog, `M<n>` denotes the quotient
//! by the full normalizer `N(Gamma_0(n))` and `N<n>` the quotient by its
//! index-two rotation subgroup. The normalizers are always congruence;
//! among the rotation subgroups only the `n = 15` and `n = 17` examples
//! are.

use super::{GroupError, OrbifoldGroup};

pub const LEVELS: [u64; 10] = [11, 15, 17, 19, 22, 26, 33, 42, 55, 66];

/// Levels whose rotation subgroup is a congruence group.
pub const CONGRUENCE_SUBGROUP_LEVELS: [u64; 2] = [15, 17];

/// Expected normalizer coarea as a multiple of pi (cross-check data).
pub fn normalizer_area_multiple(n: u64) -> Option<f64> {
    match n {
        11 | 15 => Some(2.0),
        17 | 22 => Some(3.0),
        19 => Some(10.0 / 3.0),
        26 => Some(3.5),
        33 | 42 => Some(4.0),
        55 | 66 => Some(6.0),
        _ => None,
    }
}

pub fn is_catalog_level(n: u64) -> bool {
    LEVELS.contains(&n)
}

/// Parses a catalog surface name (`M11`, `N42`, ...), case-insensitive.
pub fn parse_name(name: &str) -> Option<(char, u64)> {
    let name = name.trim();
    let mut chars = name.chars();
    let kind = chars.next()?.to_ascii_uppercase();
    if kind != 'M' && kind != 'N' {
        return None;
    }
    let level: u64 = chars.as_str().parse().ok()?;
    Some((kind, level))
}

/// Builds a named catalog surface.
pub fn lookup(name: &str) -> Result<OrbifoldGroup, GroupError> {
    let Some((kind, level)) = parse_name(name) else {
        return Err(GroupError::Domain(format!("unknown surface name '{name}'")));
    };
    if !is_catalog_level(level) {
        // still allow any square-free level; non-square-free errors out
        if !crate::qfield::is_squarefree(level) || level == 0 {
            return Err(GroupError::NonSquarefree(level));
        }
    }
    match kind {
        'M' => OrbifoldGroup::normalizer_with_character(level),
        'N' => OrbifoldGroup::index_two(
            level,
            None,
            CONGRUENCE_SUBGROUP_LEVELS.contains(&level),
        ),
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!(parse_name("M11"), Some(('M', 11)));
        assert_eq!(parse_name("n66"), Some(('N', 66)));
        assert_eq!(parse_name("X11"), None);
        assert_eq!(parse_name("M"), None);
    }

    #[test]
    fn rejects_non_squarefree_level() {
        assert_eq!(lookup("M12").unwrap_err(), GroupError::NonSquarefree(12));
    }

    #[test]
    fn catalog_metadata() {
        assert!(is_catalog_level(55));
        assert!(!is_catalog_level(13));
        for n in LEVELS {
            assert!(normalizer_area_multiple(n).is_some());
        }
    }

    #[test]
    fn m11_lookup_has_character_and_known_kernel_generators() {
        use crate::groups::character::eval_char;
        use crate::qfield::{ExactMatrix, QnElement};
        let g = lookup("M11").unwrap();
        assert!(g.congruence);
        let chi = g.chi0.as_ref().unwrap();
        let q = |num: i64, den: i64| QnElement::sqrt_term(num, den, 11);
        let r = |num: i64, den: i64| QnElement::from_rational(num, den);
        // known generators of the rotation subgroup: all must map to +1
        let gens = [
            ExactMatrix::from_integers(11, 1, 1, 0, 1).unwrap(),
            ExactMatrix::new(11, r(0, 1), q(-1, 11), q(1, 1), r(0, 1)).unwrap(),
            ExactMatrix::new(11, q(1, 1), q(5, 11), q(2, 1), q(1, 1)).unwrap(),
            ExactMatrix::from_integers(11, 10, 3, 33, 10).unwrap(),
            ExactMatrix::from_integers(11, 23, 8, 66, 23).unwrap(),
        ];
        for m in &gens {
            assert_eq!(eval_char(&g.domain, chi, m).unwrap(), 1, "{m}");
        }
    }

    #[test]
    fn m19_lookup_kernel_and_nonkernel_elements() {
        use crate::groups::character::eval_char;
        use crate::qfield::{ExactMatrix, QnElement};
        let g = lookup("M19").unwrap();
        let chi = g.chi0.as_ref().unwrap();
        let q = |num: i64, den: i64| QnElement::sqrt_term(num, den, 19);
        let r = |num: i64, den: i64| QnElement::from_rational(num, den);
        let kernel = [
            ExactMatrix::from_integers(19, 1, 1, 0, 1).unwrap(),
            ExactMatrix::new(19, q(1, 1), q(9, 19), q(2, 1), q(1, 1)).unwrap(),
            ExactMatrix::new(19, q(1, 1), q(6, 19), q(3, 1), q(1, 1)).unwrap(),
            ExactMatrix::from_integers(19, 39, 10, 152, 39).unwrap(),
            ExactMatrix::from_integers(19, 37, 9, 152, 37).unwrap(),
            ExactMatrix::new(19, q(7, 1), q(31, 19), q(30, 1), q(7, 1)).unwrap(),
            ExactMatrix::new(19, r(0, 1), q(-1, 19), q(1, 1), r(0, 1)).unwrap(),
        ];
        for m in &kernel {
            assert_eq!(eval_char(&g.domain, chi, m).unwrap(), 1, "{m}");
        }
        // an involution outside the rotation subgroup
        let outside = ExactMatrix::new(19, q(-1, 1), q(-5, 19), q(4, 1), q(1, 1)).unwrap();
        assert_eq!(eval_char(&g.domain, chi, &outside).unwrap(), -1);
    }

    #[test]
    fn n11_doubles_area_and_has_four_cone_points() {
        let m = lookup("M11").unwrap();
        let n = lookup("N11").unwrap();
        assert!(!n.congruence);
        assert!((n.domain.area - 2.0 * m.domain.area).abs() < 1e-9);
        assert_eq!(n.domain.signature.genus, 0);
        assert_eq!(n.domain.signature.cusps, 2);
        assert_eq!(n.domain.signature.cone_orders, vec![2, 2, 2, 2]);
    }

    #[test]
    fn subgroup_areas_double_across_catalog() {
        for name in ["15", "17", "22"] {
            let m = lookup(&format!("M{name}")).unwrap();
            let n = lookup(&format!("N{name}")).unwrap();
            assert!(
                (n.domain.area - 2.0 * m.domain.area).abs() < 1e-9,
                "level {name}: {} vs {}",
                n.domain.area,
                m.domain.area
            );
            assert_eq!(n.domain.signature.cusps >= 1, true);
        }
        assert!(lookup("N15").unwrap().congruence);
        assert!(lookup("N17").unwrap().congruence);
        assert!(!lookup("N22").unwrap().congruence);
    }
}
