//! Maass cusp form eigenvalues by collocation (Hejhal's algorithm),
//! split over the four symmetry classes of a catalog level.
//!
//! For a level `n` of the catalog the rotation-subgroup quotient carries
//! two commuting order-two symmetries: the reflection `z -> -conj(z)`
//! and the involution that generates the degree-two extension up to the
//! full normalizer. The discrete spectrum splits into four classes
//! labeled by the two signs, e.g. `(+-)` for reflection-even,
//! involution-odd. A class is computed on the normalizer's Ford domain:
//! the reflection sign picks cosine or sine expansions and the
//! involution sign picks the trivial or the index-two character, which
//! the point pullback tracks word by word.
//!
//! Eigenvalues are located by solving the collocation system at two
//! heights independently and scanning for parameters where the two
//! coefficient vectors agree; agreement at an isolated parameter, stable
//! under a third height, certifies an eigenvalue to the scan tolerance.

pub mod cache;
pub mod reference;
mod system;

pub use cache::{scan_cached, SpectrumCache};
pub use system::{truncation, zeroth_term, CoefficientSolve};

use crate::groups::pullback::PullCtx;
use crate::groups::{GroupError, GroupKind, OrbifoldGroup, SymmetryCharacter};
use crate::parallel::par_map;
use crate::specbessel::{near_zero, BesselError, SpectralParam, SpectralPoint};
use serde::{Deserialize, Serialize};
use system::{sample_horocycle, solve_coefficients, Samples};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HejhalError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Bessel(#[from] BesselError),
    #[error("eigenvalue scans need the normalizer quotient with its index-two character")]
    NeedNormalizer,
    #[error("spectral window [{0}, {1}] is empty")]
    BadWindow(f64, f64),
    #[error("linear solve failed: {0}")]
    Solve(String),
    #[error("cache I/O failed: {0}")]
    Cache(String),
}

/// Tunable parameters of the scan. The defaults locate catalog
/// eigenvalues to a few units in the ninth decimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HejhalConfig {
    /// Relative truncation target for the Fourier expansions.
    pub eps: f64,
    /// Grid step in `lambda` for the coarse scan.
    pub grid_step: f64,
    /// Bisection tolerance in `lambda` for the refinement.
    pub lambda_tol: f64,
    /// Largest two-height coefficient mismatch accepted as an eigenvalue.
    pub accept_mismatch: f64,
    /// How many leading coefficients to keep on reported eigenvalues.
    pub max_coeffs: usize,
}

impl Default for HejhalConfig {
    fn default() -> Self {
        Self {
            eps: 1e-8,
            grid_step: 0.01,
            lambda_tol: 1e-9,
            accept_mismatch: 1e-5,
            max_coeffs: 12,
        }
    }
}

/// A located eigenvalue with its certified data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub lambda: f64,
    /// `r` (real) or `t` (imaginary order, `lambda < 1/4`).
    pub param: SpectralParam,
    /// Leading expansion coefficients `a_0, a_1, ...` in the
    /// normalization `a_1 = 1` (or `a_2 = 1` when flagged).
    pub coefficients: Vec<f64>,
    /// Largest difference between the two independent height solves over
    /// the test coefficients.
    pub mismatch: f64,
    /// True when the solve had to renormalize to `a_2 = 1`.
    pub renormalized: bool,
}

/// Scans `(lambda_lo, lambda_hi]` for eigenvalues of the class.
///
/// `group` must be a normalizer quotient built with its character (the
/// catalog `M<n>` surfaces); involution-odd classes are computed with
/// that character, the quotient spectrum itself is the union of the two
/// involution-even classes.
pub fn scan(
    group: &OrbifoldGroup,
    class: SymmetryCharacter,
    lambda_lo: f64,
    lambda_hi: f64,
    cfg: &HejhalConfig,
) -> Result<Vec<Eigenvalue>, HejhalError> {
    let engine = Engine::new(group, class, lambda_hi, cfg, Tweak::default())?;
    engine.scan(lambda_lo, lambda_hi)
}

/// Re-locates a single eigenvalue near `lambda_approx` in a small
/// window, returning the refined value.
pub fn refine(
    group: &OrbifoldGroup,
    class: SymmetryCharacter,
    lambda_approx: f64,
    cfg: &HejhalConfig,
) -> Result<Option<Eigenvalue>, HejhalError> {
    let half = 2.5 * cfg.grid_step;
    let lo = (lambda_approx - half).max(1e-4);
    let hi = lambda_approx + half;
    let engine = Engine::new(group, class, hi, cfg, Tweak::default())?;
    let found = engine.scan(lo, hi)?;
    Ok(found
        .into_iter()
        .min_by(|a, b| {
            (a.lambda - lambda_approx)
                .abs()
                .total_cmp(&(b.lambda - lambda_approx).abs())
        }))
}

/// Outcome of an independent stability re-solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Stability {
    pub lambda: f64,
    /// Value from the perturbed solve (truncation + 5, heights scaled by
    /// 0.95).
    pub lambda_alt: f64,
    pub delta: f64,
    pub stable: bool,
}

/// Re-locates `lambda` with a larger truncation and perturbed sampling
/// heights; the eigenvalue is declared stable when both runs agree to
/// `100 * lambda_tol`.
pub fn stability_check(
    group: &OrbifoldGroup,
    class: SymmetryCharacter,
    lambda: f64,
    cfg: &HejhalConfig,
) -> Result<Stability, HejhalError> {
    let base = refine(group, class, lambda, cfg)?;
    let half = 2.5 * cfg.grid_step;
    let lo = (lambda - half).max(1e-4);
    let hi = lambda + half;
    let engine = Engine::new(group, class, hi, cfg, Tweak { extra_t0: 5, y_scale: 0.95 })?;
    let alt = engine
        .scan(lo, hi)?
        .into_iter()
        .min_by(|a, b| {
            (a.lambda - lambda).abs().total_cmp(&(b.lambda - lambda).abs())
        });
    match (base, alt) {
        (Some(b), Some(a)) => {
            let delta = (b.lambda - a.lambda).abs();
            Ok(Stability {
                lambda: b.lambda,
                lambda_alt: a.lambda,
                delta,
                stable: delta < 100.0 * cfg.lambda_tol,
            })
        }
        (b, a) => Ok(Stability {
            lambda: b.map(|e| e.lambda).unwrap_or(f64::NAN),
            lambda_alt: a.map(|e| e.lambda).unwrap_or(f64::NAN),
            delta: f64::INFINITY,
            stable: false,
        }),
    }
}

/// One point of a scan profile (for diagnostics and plotting): the
/// tracked coefficient gap and the full mismatch at one `lambda`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub lambda: f64,
    pub gap: f64,
    pub mismatch: f64,
    pub a0: f64,
}

/// Evaluates the two-height solve on a uniform grid without any root
/// finding; useful to inspect how sharply eigenvalues are resolved.
pub fn mismatch_profile(
    group: &OrbifoldGroup,
    class: SymmetryCharacter,
    lambda_lo: f64,
    lambda_hi: f64,
    n: usize,
    cfg: &HejhalConfig,
) -> Result<Vec<ProfilePoint>, HejhalError> {
    let engine = Engine::new(group, class, lambda_hi, cfg, Tweak::default())?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let l = lambda_lo + (lambda_hi - lambda_lo) * i as f64 / (n - 1).max(1) as f64;
        let e = engine.evaluate(l.max(1e-4))?;
        out.push(ProfilePoint { lambda: l, gap: e.g, mismatch: e.mismatch, a0: e.c1[0] });
    }
    Ok(out)
}

/// Perturbation applied to the system shape (for stability re-solves).
#[derive(Debug, Clone, Copy)]
struct Tweak {
    extra_t0: usize,
    y_scale: f64,
}

impl Default for Tweak {
    fn default() -> Self {
        Self { extra_t0: 0, y_scale: 1.0 }
    }
}

/// Number of guard shifts precomputed per base height.
const SHIFTS: usize = 8;
/// Each guard shift lowers the height by this fraction of `y0`.
const SHIFT_FRAC: f64 = 0.02;

struct Engine {
    class: SymmetryCharacter,
    cfg: HejhalConfig,
    t0: usize,
    /// Ladders of pre-pulled sample sets for the two solve heights and
    /// the stability height; index `k` is the `k`-th guard shift.
    ladders: [Vec<Samples>; 3],
}

impl Engine {
    fn new(
        group: &OrbifoldGroup,
        class: SymmetryCharacter,
        lambda_hi: f64,
        cfg: &HejhalConfig,
        tweak: Tweak,
    ) -> Result<Self, HejhalError> {
        if group.kind != GroupKind::Normalizer {
            return Err(HejhalError::NeedNormalizer);
        }
        let signs = if class.involution < 0 {
            Some(group.chi0.as_ref().ok_or(HejhalError::NeedNormalizer)?.as_slice())
        } else {
            None
        };
        let ctx: PullCtx = group.domain.pull_ctx(signs);
        let y0 = group.domain.y0;
        let r_max = (lambda_hi - 0.25).max(0.0).sqrt();
        let t0 = (truncation(cfg.eps, r_max, y0) + tweak.extra_t0).max(8);
        // sampling heights, each with a ladder of guard shifts
        let bases = [0.85 * y0, 0.7 * y0, 0.775 * y0].map(|b| b * tweak.y_scale);
        let y_min = bases[1] - (SHIFTS as f64) * SHIFT_FRAC * y0;
        // the sampled expansions live at the sampling height, so the
        // alias-free condition needs the truncation there
        let t_samp = truncation(cfg.eps, r_max, y_min.max(0.25 * y0));
        let q = (t_samp + t0) / 2 + 2;
        let mut ladders: [Vec<Samples>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (ladder, base) in ladders.iter_mut().zip(bases) {
            for k in 0..SHIFTS {
                let y = base - k as f64 * SHIFT_FRAC * y0;
                ladder.push(sample_horocycle(&ctx, y, q)?);
            }
        }
        Ok(Self { class, cfg: cfg.clone(), t0, ladders })
    }

    fn reflection_even(&self) -> bool {
        self.class.reflection > 0
    }

    /// Guard: reject a height whose diagonal carries a near-zero of `K`
    /// (possible only for real spectral parameter, in the oscillatory
    /// region) or of the zeroth-mode factor.
    fn height_ok(&self, point: &SpectralPoint, y: f64) -> Result<bool, HejhalError> {
        let SpectralParam::Real(r) = point.param else {
            return Ok(true);
        };
        if self.reflection_even() && (r * y.ln()).cos().abs() < 0.05 {
            return Ok(false);
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        let m_max = ((r / (two_pi * y)).floor() as usize).min(self.t0);
        for m in 1..=m_max {
            if near_zero(point, two_pi * m as f64 * y)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn pick_height(&self, ladder: usize, point: &SpectralPoint) -> Result<&Samples, HejhalError> {
        for s in &self.ladders[ladder] {
            if self.height_ok(point, s.y)? {
                return Ok(s);
            }
        }
        Ok(self.ladders[ladder].last().unwrap())
    }

    /// Solves at the two primary heights with a consistent normalization
    /// column. Returns the two coefficient vectors and the column used.
    fn solve_pair(
        &self,
        point: &SpectralPoint,
    ) -> Result<(Vec<f64>, Vec<f64>, usize), HejhalError> {
        let s1 = self.pick_height(0, point)?;
        let s2 = self.pick_height(1, point)?;
        let even = self.reflection_even();
        let c1 = solve_coefficients(point, s1, even, self.t0, 1)?;
        let huge = c1.coeffs.iter().any(|c| !c.is_finite() || c.abs() > 1e8);
        let norm_col = if huge { 2 } else { 1 };
        let c1 = if huge {
            solve_coefficients(point, s1, even, self.t0, 2)?
        } else {
            c1
        };
        let c2 = solve_coefficients(point, s2, even, self.t0, norm_col)?;
        Ok((c1.coeffs, c2.coeffs, norm_col))
    }

    /// Tracking statistic for sign-change detection and the mismatch.
    fn evaluate(&self, lambda: f64) -> Result<GridEval, HejhalError> {
        let point = SpectralPoint::from_lambda(lambda);
        let (c1, c2, norm_col) = self.solve_pair(&point)?;
        let gidx = norm_col + 1;
        let g = c1[gidx] - c2[gidx];
        let mut mismatch = 0.0f64;
        for m in (norm_col + 1)..=(norm_col + 4).min(self.t0) {
            mismatch = mismatch.max((c1[m] - c2[m]).abs());
        }
        Ok(GridEval { lambda, g, mismatch, c1, norm_col })
    }

    fn scan(&self, lambda_lo: f64, lambda_hi: f64) -> Result<Vec<Eigenvalue>, HejhalError> {
        if !(lambda_hi > lambda_lo) || lambda_hi <= 0.0 {
            return Err(HejhalError::BadWindow(lambda_lo, lambda_hi));
        }
        let lo = lambda_lo.max(1e-4);
        // grid, with lambda = 1/4 pinned exactly when inside (the
        // parameter switches from imaginary to real there, and the
        // catalog contains an eigenvalue exactly at 1/4). Below 1/4 the
        // coefficient gap has extremely narrow sign notches (the small
        // eigenvalues resolve over a width of ~1e-4), so that segment is
        // sampled ten times finer.
        let mut grid: Vec<f64> = Vec::new();
        let mut l = lo;
        while l < lambda_hi {
            grid.push(l);
            let step = if l < 0.25 { self.cfg.grid_step / 10.0 } else { self.cfg.grid_step };
            l += step;
        }
        grid.push(lambda_hi);
        if lo < 0.25 && 0.25 < lambda_hi {
            grid.push(0.25);
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup_by(|a, b| (*a - *b).abs() < 1e-13);

        let evals: Vec<Result<GridEval, HejhalError>> =
            par_map(&grid, |&l| self.evaluate(l));
        let mut es: Vec<GridEval> = Vec::with_capacity(evals.len());
        for e in evals {
            es.push(e?);
        }

        let mut found: Vec<Eigenvalue> = Vec::new();
        // primary detector: sign changes of the tracked coefficient gap
        for i in 0..es.len().saturating_sub(1) {
            let (a, b) = (&es[i], &es[i + 1]);
            if !a.g.is_finite() || !b.g.is_finite() || a.g.signum() == b.g.signum() {
                continue;
            }
            if let Some(ev) = self.bisect(a.lambda, a.g, b.lambda, b.g)? {
                found.push(ev);
            }
        }
        // fallback detector: an isolated mismatch dip without a tracked
        // sign change (a double root of the gap). Below lambda = 1/4 the
        // dips are so narrow that the grid only sees their shoulders, so
        // there a pronounced dip relative to its neighbors is refined
        // even when its value is still far from the acceptance level.
        for i in 1..es.len().saturating_sub(1) {
            let narrow_dip = es[i].lambda < 0.25
                && es[i].mismatch < 0.5
                && es[i].mismatch < 0.5 * es[i - 1].mismatch.min(es[i + 1].mismatch);
            if (es[i].mismatch < 1e-3 || narrow_dip)
                && es[i].mismatch < es[i - 1].mismatch
                && es[i].mismatch < es[i + 1].mismatch
            {
                if let Some(ev) =
                    self.golden_refine(es[i - 1].lambda, es[i + 1].lambda)?
                {
                    found.push(ev);
                }
            }
        }
        found.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        found.dedup_by(|a, b| {
            if (a.lambda - b.lambda).abs() < 1e-4 {
                if a.mismatch < b.mismatch {
                    std::mem::swap(a, b);
                }
                true
            } else {
                false
            }
        });
        Ok(found)
    }

    fn bisect(
        &self,
        mut la: f64,
        mut ga: f64,
        mut lb: f64,
        _gb: f64,
    ) -> Result<Option<Eigenvalue>, HejhalError> {
        for _ in 0..80 {
            if lb - la < self.cfg.lambda_tol {
                break;
            }
            let lm = 0.5 * (la + lb);
            let em = self.evaluate(lm)?;
            if em.g.signum() == ga.signum() {
                la = lm;
                ga = em.g;
            } else {
                lb = lm;
            }
        }
        let lambda = 0.5 * (la + lb);
        self.certify(lambda)
    }

    fn golden_refine(&self, mut lo: f64, mut hi: f64) -> Result<Option<Eigenvalue>, HejhalError> {
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let mut f1 = self.evaluate(x1)?.mismatch;
        let mut f2 = self.evaluate(x2)?.mismatch;
        for _ in 0..120 {
            if hi - lo < self.cfg.lambda_tol {
                break;
            }
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = self.evaluate(x1)?.mismatch;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = self.evaluate(x2)?.mismatch;
            }
        }
        self.certify(0.5 * (lo + hi))
    }

    /// Final acceptance at a candidate: the two-height mismatch must be
    /// small and the solution must persist at the third, independent
    /// height.
    fn certify(&self, lambda: f64) -> Result<Option<Eigenvalue>, HejhalError> {
        let ev = self.evaluate(lambda)?;
        if !(ev.mismatch < self.cfg.accept_mismatch) {
            return Ok(None);
        }
        let point = SpectralPoint::from_lambda(lambda);
        let s3 = self.pick_height(2, &point)?;
        let c3 = solve_coefficients(
            &point,
            s3,
            self.reflection_even(),
            self.t0,
            ev.norm_col,
        )?;
        let mut m3 = 0.0f64;
        for m in (ev.norm_col + 1)..=(ev.norm_col + 4).min(self.t0) {
            m3 = m3.max((ev.c1[m] - c3.coeffs[m]).abs());
        }
        if !(m3 < 10.0 * self.cfg.accept_mismatch) {
            return Ok(None);
        }
        // A cusp form above lambda = 1/4 has no constant term; a solve
        // that agrees across heights but carries a sizable zeroth
        // coefficient has locked onto the continuous-spectrum phase (the
        // Eisenstein constant term oscillates through zero in r and the
        // free a_0 column can absorb it at discrete parameters). The
        // exemptions are r near 0, where lambda = 1/4 forms legitimately
        // carry a constant term, and the small-eigenvalue segment.
        if let SpectralParam::Real(r) = point.param {
            if r > 0.02 && self.reflection_even() {
                let scale = ev.c1.iter().fold(1.0f64, |m, c| m.max(c.abs()));
                if ev.c1[0].abs() > 1e-3 * scale {
                    return Ok(None);
                }
            }
        }
        let keep = self.cfg.max_coeffs.min(ev.c1.len());
        Ok(Some(Eigenvalue {
            lambda,
            param: point.param,
            coefficients: ev.c1[..keep].to_vec(),
            mismatch: ev.mismatch,
            renormalized: ev.norm_col == 2,
        }))
    }
}

struct GridEval {
    lambda: f64,
    g: f64,
    mismatch: f64,
    c1: Vec<f64>,
    norm_col: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::catalog::lookup;

    #[test]
    fn rejects_subgroup_quotients_and_bad_windows() {
        let n11 = lookup("N11").unwrap();
        let class = SymmetryCharacter::parse("++").unwrap();
        assert!(matches!(
            scan(&n11, class, 1.0, 2.0, &HejhalConfig::default()),
            Err(HejhalError::NeedNormalizer)
        ));
        let m11 = lookup("M11").unwrap();
        assert!(matches!(
            scan(&m11, class, 2.0, 1.0, &HejhalConfig::default()),
            Err(HejhalError::BadWindow(_, _))
        ));
    }

    #[test]
    fn empty_window_finds_nothing() {
        // level 11, class (++): first eigenvalue is above 6, so a scan of
        // [4.5, 5.5] must come back empty
        let m11 = lookup("M11").unwrap();
        let class = SymmetryCharacter::parse("++").unwrap();
        let found = scan(&m11, class, 4.5, 5.5, &HejhalConfig::default()).unwrap();
        assert!(found.is_empty(), "found: {:?}", found);
    }

    #[test]
    fn locates_the_first_even_eigenvalue_of_level_19() {
        let m19 = lookup("M19").unwrap();
        let class = SymmetryCharacter::parse("++").unwrap();
        let found = scan(&m19, class, 1.5, 2.5, &HejhalConfig::default()).unwrap();
        assert_eq!(found.len(), 1, "found: {:?}", found);
        assert!(
            (found[0].lambda - 2.01836508907).abs() < 1e-6,
            "lambda = {}",
            found[0].lambda
        );
        assert!(!found[0].renormalized);
    }
}
