//! Enumeration of closed-geodesic classes up to a length bound.
//!
//! Every closed geodesic of length at most `b` has a lift whose axis
//! passes within `b/2` of any point of the domain interior, so all such
//! classes appear among products `g h^{-1}` of elements of a covering
//! set of radius `b/2` (plus margin). Conjugates and inverses of one
//! class produce the same chord set in the domain, so classes are
//! deduplicated by the canonical chord fingerprint, and powers of a
//! primitive class are recognized by an identical fingerprint with a
//! longer length (only the shortest representative is kept).

use super::chords::{chord_walk, ClassGeometry};
use super::CheegerError;
use crate::groups::covering::CoveringElement;
use crate::groups::ford::FordDomain;
use crate::groups::pullback::PullCtx;
use crate::qfield::ExactMatrix;

/// A hyperbolic conjugacy class with its domain geometry.
#[derive(Debug, Clone)]
pub struct GeodesicClass {
    pub witness: ExactMatrix,
    /// |trace| as a float.
    pub trace_abs: f64,
    /// Human-readable exact trace for audit output.
    pub trace_label: String,
    pub length: f64,
    pub geometry: ClassGeometry,
}

/// A class whose chord decomposition failed (typically an axis running
/// through a vertex or along an edge of the tessellation); it carries
/// enough data to decide whether the failure matters.
#[derive(Debug, Clone)]
pub struct FailedClass {
    pub trace_label: String,
    pub length: f64,
    pub reason: String,
}

/// Enumerates the hyperbolic classes with translation length at most
/// `bound` from pair products over a covering set, sorted by length.
/// Classes that cannot be walked are reported separately rather than
/// aborting the enumeration.
pub fn enumerate_classes(
    domain: &FordDomain,
    ctx: &PullCtx,
    covering: &[CoveringElement],
    bound: f64,
) -> Result<(Vec<GeodesicClass>, Vec<FailedClass>), CheegerError> {
    let tr_max = 2.0 * (bound / 2.0).cosh() + 1e-9;

    // candidate matrices g_j g_i^{-1}, deduplicated projectively
    let mut seen_mats = std::collections::HashSet::new();
    let mut candidates: Vec<ExactMatrix> = Vec::new();
    let mut push = |m: ExactMatrix| -> Result<(), CheegerError> {
        let f = m.to_f64();
        let tr = f[0][0] + f[1][1];
        if tr.abs() <= 2.0 + 1e-9 || tr.abs() > tr_max {
            return Ok(());
        }
        let key: Vec<i64> = f
            .iter()
            .flatten()
            .map(|&x| (x * 1e9).round() as i64)
            .collect();
        if seen_mats.insert(key) {
            candidates.push(m);
        }
        Ok(())
    };
    for (i, a) in covering.iter().enumerate() {
        push(a.mat.clone())?;
        let a_inv = a.mat.mat_inv();
        for b in covering.iter().skip(i + 1) {
            let prod = b
                .mat
                .mat_mul(&a_inv)
                .map_err(|e| CheegerError::Algorithm(e.to_string()))?;
            push(prod)?;
        }
    }

    // walk each candidate and deduplicate by chord fingerprint
    let mut by_fingerprint: std::collections::HashMap<Vec<[i64; 4]>, GeodesicClass> =
        std::collections::HashMap::new();
    let mut failed: Vec<FailedClass> = Vec::new();
    let mut failed_seen = std::collections::HashSet::new();
    for m in candidates {
        let tr = m
            .trace()
            .map_err(|e| CheegerError::Algorithm(e.to_string()))?;
        let trf = tr.to_f64().abs();
        if trf <= 2.0 + 1e-9 {
            continue;
        }
        let ell = 2.0 * (trf / 2.0).acosh();
        if ell > bound + 1e-9 {
            continue;
        }
        let geometry = match chord_walk(domain, ctx, &m.to_f64(), ell) {
            Ok(g) => g,
            Err(e) => {
                if failed_seen.insert(((trf * 1e9).round() as i64, e.to_string())) {
                    failed.push(FailedClass {
                        trace_label: format!("{tr}"),
                        length: ell,
                        reason: e.to_string(),
                    });
                }
                continue;
            }
        };
        let entry = by_fingerprint.entry(geometry.fingerprint.clone());
        use std::collections::hash_map::Entry;
        match entry {
            Entry::Vacant(v) => {
                v.insert(GeodesicClass {
                    trace_label: format!("{tr}"),
                    witness: m,
                    trace_abs: trf,
                    length: ell,
                    geometry,
                });
            }
            Entry::Occupied(mut o) => {
                if ell < o.get().length - 1e-9 {
                    o.insert(GeodesicClass {
                        trace_label: format!("{tr}"),
                        witness: m,
                        trace_abs: trf,
                        length: ell,
                        geometry,
                    });
                }
            }
        }
    }
    let mut out: Vec<GeodesicClass> = by_fingerprint.into_values().collect();
    out.sort_by(|a, b| {
        a.length
            .partial_cmp(&b.length)
            .unwrap()
            .then_with(|| a.trace_label.cmp(&b.trace_label))
    });
    Ok((out, failed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::covering::{covering_set, CoveringOptions};
    use crate::groups::ford::build_domain;

    #[test]
    fn shortest_classes_of_level_11() {
        let d = build_domain(11, None).unwrap();
        let ctx = d.pull_ctx(None);
        let bound = 2.5;
        let cov = covering_set(&d, None, bound / 2.0 + 0.1, &CoveringOptions::default())
            .unwrap();
        let (classes, failed) = enumerate_classes(&d, &ctx, &cov, bound).unwrap();
        assert!(!classes.is_empty());
        assert!(failed.is_empty(), "failed walks: {:?}", failed);
        // shortest: the folded trace-3 class, then the trace-sqrt(11)
        // separating class
        assert!((classes[0].trace_abs - 3.0).abs() < 1e-9);
        assert!(classes[0].geometry.folded);
        let l11 = 2.0 * (11f64.sqrt() / 2.0).acosh();
        let found = classes
            .iter()
            .find(|c| (c.length - l11).abs() < 1e-9)
            .expect("trace sqrt(11) class present");
        assert!(!found.geometry.folded);
        // no duplicate fingerprints
        let mut fps: Vec<_> = classes.iter().map(|c| c.geometry.fingerprint.clone()).collect();
        fps.sort();
        fps.dedup();
        assert_eq!(fps.len(), classes.len());
    }
}
