//! Covering sets of domain translates.
//!
//! For a geodesic-length budget `2 rho`, every closed geodesic of length
//! at most `2 rho` on the quotient passes through some point of the
//! truncated domain `F'` (the domain cut at the height-1 horocycle and
//! with horoball neighborhoods removed at the real cusps; a closed
//! geodesic cannot stay inside a horoball), and then stays within the
//! `rho`-neighborhood `N_rho(F')`. The set of group elements whose
//! translates meet `N_rho(F')` is gathered by a breadth-first search
//! over words in the side-pairing generators, pruning cells whose
//! sampled distance to `F'` exceeds the radius plus a safety margin.
//!
//! The margin absorbs the sampling gaps of the point net; `verify_covering`
//! spot-checks the result on fresh sample points, and the geodesic
//! enumeration downstream is cross-validated against independently known
//! geodesic lists.

use super::ford::FordDomain;
use super::pullback::pullback;
use super::GroupError;
use crate::hypgeom::{geodesic_step, hyp_distance, mobius_apply_real, HPoint};
use crate::qfield::ExactMatrix;
use std::collections::HashSet;

#[derive(Debug, Clone)]
pub struct CoveringElement {
    pub mat: ExactMatrix,
    pub mat_f: [[f64; 2]; 2],
    /// Character sign when signs were attached, else +1.
    pub sign: i8,
}

#[derive(Debug, Clone, Copy)]
pub struct CoveringOptions {
    /// Target hyperbolic spacing of the `F'` point net.
    pub net_step: f64,
    /// Safety margin added to the radius in the pruning test; must exceed
    /// twice the worst net gap.
    pub margin: f64,
    /// Cap on the breadth-first search size.
    pub cap: usize,
}

impl Default for CoveringOptions {
    fn default() -> Self {
        Self {
            net_step: 0.3,
            margin: 0.9,
            cap: 100_000,
        }
    }
}

fn quantize(mat: &[[f64; 2]; 2]) -> [i64; 4] {
    let flat = [mat[0][0], mat[0][1], mat[1][0], mat[1][1]];
    let sgn = flat
        .iter()
        .find(|v| v.abs() > 1e-8)
        .map(|v| v.signum())
        .unwrap_or(1.0);
    flat.map(|v| (v * sgn * 1e6).round() as i64)
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

/// Horoball exclusions: `(cusp x, horodisk diameter)` for the real cusps.
fn real_cusp_disks(domain: &FordDomain) -> Vec<(f64, f64)> {
    let mut disks = Vec::new();
    for v in &domain.vertices {
        if v.ideal && v.y == 0.0 {
            // diameter: the smaller adjacent circle's radius keeps the
            // horoball well inside the two tangent circles
            let adj = domain
                .circles
                .iter()
                .filter(|c| ((v.x - c.center_f).abs() - c.radius_f).abs() < 1e-9)
                .map(|c| c.radius_f)
                .fold(f64::INFINITY, f64::min);
            if adj.is_finite() {
                disks.push((v.x, adj));
            }
        }
    }
    disks
}

/// A point net of `F'` with roughly uniform hyperbolic spacing, covering
/// the boundary (floor, verticals, top horocycle, cusp horodisk arcs)
/// and the interior.
fn truncated_domain_net(domain: &FordDomain, step: f64) -> Vec<HPoint> {
    let disks = real_cusp_disks(domain);
    // height of the excluded horodisks at x (0 when outside all disks)
    let horocut = |x: f64| -> f64 {
        disks
            .iter()
            .map(|&(cx, d)| {
                let dx = x - cx;
                let r = d / 2.0;
                if dx.abs() >= r {
                    0.0
                } else {
                    r + (r * r - dx * dx).sqrt()
                }
            })
            .fold(0.0f64, f64::max)
    };
    let floor = |x: f64| -> f64 { domain.floor_height(x).max(horocut(x)) };

    let mut pts = Vec::new();
    // interior + floor + top: adaptive columns
    let mut x = -0.5;
    while x <= 0.5 + 1e-12 {
        let y_lo = (floor(x) + 1e-9).min(1.0);
        pts.push(HPoint::new(x, y_lo));
        let mut y = y_lo;
        while y < 1.0 {
            y = (y * (1.0 + step)).min(1.0);
            pts.push(HPoint::new(x, y));
        }
        // hyperbolic x-spacing ~ step at the column floor
        x += (step * y_lo).clamp(1e-3, step);
    }
    pts
}

/// Collects the group elements whose domain translates cover
/// `N_radius(F')`, by breadth-first search over generator words.
pub fn covering_set(
    domain: &FordDomain,
    signs: Option<&[i8]>,
    radius: f64,
    opts: &CoveringOptions,
) -> Result<Vec<CoveringElement>, GroupError> {
    let n = domain.level;
    let t = ExactMatrix::from_integers(n, 1, 1, 0, 1)
        .map_err(|e| GroupError::Domain(e.to_string()))?;
    // generator alphabet: t^{+-1} and the circle elements with inverses
    let mut gens: Vec<(ExactMatrix, i8)> = vec![(t.clone(), 1), (t.mat_inv(), 1)];
    for (i, c) in domain.circles.iter().enumerate() {
        let s = signs.map(|s| s[i]).unwrap_or(1);
        gens.push((c.element.clone(), s));
        gens.push((c.element.mat_inv(), s));
    }
    let gens_f: Vec<[[f64; 2]; 2]> = gens.iter().map(|(g, _)| g.to_f64()).collect();

    let net = truncated_domain_net(domain, opts.net_step);
    let keep_radius = radius + opts.margin;
    // pruning test: sampled distance from the translated net to the net
    let keep = |mat: &[[f64; 2]; 2]| -> bool {
        let moved: Vec<HPoint> = net.iter().map(|&p| mobius_apply_real(mat, p)).collect();
        let mut best = f64::INFINITY;
        for &p in &moved {
            if p.y > 40.0 {
                continue; // far up the cusp; the y <= 1 part decides
            }
            for &q in &net {
                let d = hyp_distance(p, q);
                if d < best {
                    best = d;
                    if best <= keep_radius {
                        return true;
                    }
                }
            }
        }
        false
    };

    // breadth-first search with backpointers for exact reconstruction
    struct Node {
        mat_f: [[f64; 2]; 2],
        parent: usize,
        gen: usize,
        sign: i8,
    }
    let id = [[1.0f64, 0.0], [0.0, 1.0]];
    let mut nodes = vec![Node { mat_f: id, parent: usize::MAX, gen: usize::MAX, sign: 1 }];
    let mut seen: HashSet<[i64; 4]> = HashSet::new();
    seen.insert(quantize(&id));
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        // candidate children of this level, deduplicated up front
        let mut cands: Vec<(usize, usize, [[f64; 2]; 2], i8)> = Vec::new();
        for &ni in &frontier {
            for (gi, gf) in gens_f.iter().enumerate() {
                let child = mat_mul_f(&nodes[ni].mat_f, gf);
                let key = quantize(&child);
                if seen.insert(key) {
                    cands.push((ni, gi, child, nodes[ni].sign * gens[gi].1));
                }
            }
        }
        let kept: Vec<bool> = crate::parallel::par_map(&cands, |c| keep(&c.2));
        frontier = Vec::new();
        for (c, k) in cands.into_iter().zip(kept) {
            if !k {
                continue;
            }
            nodes.push(Node { mat_f: c.2, parent: c.0, gen: c.1, sign: c.3 });
            frontier.push(nodes.len() - 1);
            if nodes.len() > opts.cap {
                return Err(GroupError::CoveringCap);
            }
        }
    }

    // exact reconstruction along the backpointer chains, projective dedup
    let mut exact_seen = HashSet::new();
    let mut out = Vec::new();
    for i in 0..nodes.len() {
        let mut word = Vec::new();
        let mut j = i;
        while nodes[j].parent != usize::MAX {
            word.push(nodes[j].gen);
            j = nodes[j].parent;
        }
        let mut mat = ExactMatrix::identity(n);
        for &gi in word.iter().rev() {
            mat = mat
                .mat_mul(&gens[gi].0)
                .map_err(|e| GroupError::Domain(e.to_string()))?;
        }
        if exact_seen.insert(mat.clone()) {
            out.push(CoveringElement { mat_f: mat.to_f64(), mat, sign: nodes[i].sign });
        }
    }
    // deterministic order, identity first
    out.sort_by(|p, q| {
        let ip = p.mat.is_identity();
        let iq = q.mat.is_identity();
        iq.cmp(&ip).then_with(|| {
            let tp = (p.mat_f[0][0] + p.mat_f[1][1]).abs();
            let tq = (q.mat_f[0][0] + q.mat_f[1][1]).abs();
            tp.partial_cmp(&tq)
                .unwrap()
                .then_with(|| p.mat_f[0][0].partial_cmp(&q.mat_f[0][0]).unwrap())
                .then_with(|| p.mat_f[0][1].partial_cmp(&q.mat_f[0][1]).unwrap())
                .then_with(|| p.mat_f[1][0].partial_cmp(&q.mat_f[1][0]).unwrap())
        })
    });
    Ok(out)
}

/// Spot check: fresh pseudo-random points of `N_radius(F')` must pull
/// back to an element of the set. Returns the number of failures.
pub fn verify_covering(
    domain: &FordDomain,
    set: &[CoveringElement],
    radius: f64,
    samples: usize,
) -> Result<usize, GroupError> {
    let ctx = domain.pull_ctx(None);
    // pullback returns the word gamma* with gamma* z in F, so the cell of
    // z is gamma = (gamma*)^{-1}
    let keys: HashSet<[i64; 4]> = set
        .iter()
        .map(|e| {
            let m = &e.mat_f;
            quantize(&[[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]])
        })
        .collect();
    let mut state = 0x9E3779B97F4A7C15u64;
    let mut unit = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut failures = 0;
    for _ in 0..samples {
        let x = unit() - 0.5;
        let env = domain.floor_height(x);
        let y = env + (1.0 - env).max(1e-3) * unit();
        let theta = 2.0 * std::f64::consts::PI * unit();
        let rho = radius * unit();
        let w = geodesic_step(HPoint::new(x, y.min(1.0)), theta, rho);
        let res = pullback(&ctx, w)?;
        if !keys.contains(&quantize(&res.mat)) {
            failures += 1;
        }
    }
    Ok(failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::ford::build_domain;

    #[test]
    fn covering_contains_identity_and_generators() {
        let d = build_domain(11, None).unwrap();
        let set = covering_set(&d, None, 1.1, &CoveringOptions::default()).unwrap();
        assert!(set[0].mat.is_identity());
        // all side-pairing elements translate F to a neighbor, so they
        // must appear at radius 1.1 (cells touch along sides)
        for c in &d.circles {
            assert!(
                set.iter().any(|e| e.mat == c.element || e.mat == c.element.mat_inv()),
                "missing generator {}",
                c.element
            );
        }
    }

    #[test]
    fn covering_monotone_in_radius() {
        let d = build_domain(11, None).unwrap();
        let small = covering_set(&d, None, 0.5, &CoveringOptions::default()).unwrap();
        let large = covering_set(&d, None, 1.1, &CoveringOptions::default()).unwrap();
        let large_set: std::collections::HashSet<_> =
            large.iter().map(|e| e.mat.clone()).collect();
        for e in &small {
            assert!(large_set.contains(&e.mat));
        }
        assert!(large.len() >= small.len());
    }

    #[test]
    fn verify_covering_passes() {
        let d = build_domain(11, None).unwrap();
        let set = covering_set(&d, None, 1.1, &CoveringOptions::default()).unwrap();
        let failures = verify_covering(&d, &set, 1.1, 400).unwrap();
        assert_eq!(failures, 0);
    }

    #[test]
    fn signed_covering_tracks_character() {
        let d = build_domain(11, None).unwrap();
        let chi = crate::groups::character::derive_chi0(&d).unwrap();
        let set = covering_set(&d, Some(&chi), 1.0, &CoveringOptions::default()).unwrap();
        for e in set.iter().take(12) {
            let direct = crate::groups::character::eval_char(&d, &chi, &e.mat).unwrap();
            assert_eq!(direct, e.sign, "{}", e.mat);
        }
    }
}
