//! Point pullback into a Ford domain.
//!
//! Repeatedly translate `x` into `[-1/2, 1/2]` and, while the point lies
//! strictly below the envelope (inside the isometric circle owning the
//! floor arc at `x`), apply that circle's element. Every circle
//! application strictly increases `y`, so the loop terminates with the
//! point inside the domain; the applied word (and, when character signs
//! are attached, its sign) is recorded so the translating group element
//! can be reconstructed exactly.

use super::ford::FordDomain;
use super::GroupError;
use crate::hypgeom::HPoint;
use crate::qfield::ExactMatrix;

const MAX_STEPS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PullStep {
    /// `z -> z + k` was applied.
    Translate(i64),
    /// The element of `circles[i]` was applied.
    Circle(usize),
}

#[derive(Debug, Clone)]
pub struct PullResult {
    /// The pulled-back point, in the closed domain.
    pub z: HPoint,
    /// Steps in application order; the full map is `g_m ... g_1`.
    pub word: Vec<PullStep>,
    /// Product of character signs over the word (`+1` if no signs given).
    pub sign: i8,
    /// f64 matrix of the applied map.
    pub mat: [[f64; 2]; 2],
}

/// Precomputed f64 data for fast repeated pullbacks.
pub struct PullCtx {
    /// Per-arc: (x_hi, center, radius^2, matrix, circle index, sign).
    arcs: Vec<ArcF>,
}

struct ArcF {
    x_hi: f64,
    center: f64,
    radius_sq: f64,
    mat: [[f64; 2]; 2],
    circle: usize,
    sign: i8,
}

impl FordDomain {
    /// Builds a pullback context; `signs` (per circle) enables character
    /// tracking.
    pub fn pull_ctx(&self, signs: Option<&[i8]>) -> PullCtx {
        let arcs = self
            .arcs
            .iter()
            .map(|a| {
                let c = &self.circles[a.circle];
                ArcF {
                    x_hi: a.x_hi,
                    center: c.center_f,
                    radius_sq: c.radius_f * c.radius_f,
                    mat: c.element.to_f64(),
                    circle: a.circle,
                    sign: signs.map(|s| s[a.circle]).unwrap_or(1),
                }
            })
            .collect();
        PullCtx { arcs }
    }
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

/// Pulls `z` back into the domain.
pub fn pullback(ctx: &PullCtx, z: HPoint) -> Result<PullResult, GroupError> {
    let (mut x, mut y) = (z.x, z.y);
    let mut word = Vec::new();
    let mut sign = 1i8;
    let mut mat = [[1.0f64, 0.0], [0.0, 1.0]];
    for _ in 0..MAX_STEPS {
        let k = x.round();
        if k != 0.0 {
            x -= k;
            word.push(PullStep::Translate(-k as i64));
            mat = mat_mul_f(&[[1.0, -k], [0.0, 1.0]], &mat);
        }
        // the floor arc at x
        let idx = ctx
            .arcs
            .partition_point(|a| a.x_hi < x)
            .min(ctx.arcs.len() - 1);
        let a = &ctx.arcs[idx];
        let dx = x - a.center;
        let d2 = dx * dx + y * y;
        if d2 >= a.radius_sq * (1.0 - 1e-13) {
            return Ok(PullResult { z: HPoint::new(x, y), word, sign, mat });
        }
        // apply the circle element
        let m = &a.mat;
        let den_re = m[1][0] * x + m[1][1];
        let den_im = m[1][0] * y;
        let den2 = den_re * den_re + den_im * den_im;
        let num_re = m[0][0] * x + m[0][1];
        let num_im = m[0][0] * y;
        x = (num_re * den_re + num_im * den_im) / den2;
        y = (num_im * den_re - num_re * den_im) / den2;
        word.push(PullStep::Circle(a.circle));
        sign *= a.sign;
        mat = mat_mul_f(m, &mat);
    }
    Err(GroupError::PullbackCap)
}

/// Exact matrix of a pullback word: the product `g_m ... g_1` of the
/// applied steps.
pub fn word_to_matrix(domain: &FordDomain, word: &[PullStep]) -> Result<ExactMatrix, GroupError> {
    let n = domain.level;
    let mut acc = ExactMatrix::identity(n);
    for step in word {
        let g = match *step {
            PullStep::Translate(k) => ExactMatrix::from_integers(n, 1, k, 0, 1)
                .map_err(|e| GroupError::Domain(e.to_string()))?,
            PullStep::Circle(i) => domain.circles[i].element.clone(),
        };
        acc = g
            .mat_mul(&acc)
            .map_err(|e| GroupError::Domain(e.to_string()))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::ford::build_domain;
    use crate::hypgeom::mobius_apply;

    #[test]
    fn pullback_fixes_interior_points() {
        let d = build_domain(11, None).unwrap();
        let ctx = d.pull_ctx(None);
        let z = HPoint::new(0.123, 1.4);
        let r = pullback(&ctx, z).unwrap();
        assert!(r.word.is_empty());
        assert_eq!(r.z, z);
    }

    #[test]
    fn pullback_lands_in_domain_and_word_replays() {
        let d = build_domain(11, None).unwrap();
        let ctx = d.pull_ctx(None);
        for (x, y) in [(3.7, 0.02), (-1.9, 0.007), (0.49, 0.001), (0.0, 0.004)] {
            let z = HPoint::new(x, y);
            let r = pullback(&ctx, z).unwrap();
            assert!(d.contains(r.z, 1e-9), "({x}, {y}) -> ({}, {})", r.z.x, r.z.y);
            assert!(r.z.y >= y);
            // exact replay agrees with the f64 image
            let g = word_to_matrix(&d, &r.word).unwrap();
            let w = mobius_apply(&g, z);
            assert!((w.x - r.z.x).abs() < 1e-8 && (w.y - r.z.y).abs() < 1e-8);
        }
    }

    #[test]
    fn pullback_idempotent() {
        let d = build_domain(17, None).unwrap();
        let ctx = d.pull_ctx(None);
        for k in 0..50 {
            let z = HPoint::new(-3.0 + 0.13 * k as f64, 0.01 + 0.002 * k as f64);
            let r1 = pullback(&ctx, z).unwrap();
            let r2 = pullback(&ctx, r1.z).unwrap();
            assert!(r2.word.is_empty(), "second pullback must be trivial");
        }
    }
}
