//! Linear-system core of the eigenvalue solver: truncation bounds,
//! horocycle sampling, assembly of the central collocation matrix, and
//! the normalized least-squares coefficient solve.
//!
//! A Maass form in one of the four symmetry classes has the expansion
//! `f(x + iy) = a_0 c_0(y) + sum_{n >= 1} a_n sqrt(y) K_nu(2 pi n y)
//! cs(2 pi n x)` with `cs = cos` for reflection-even classes and `sin`
//! for reflection-odd ones. Sampling a horocycle below the fundamental
//! domain, pulling each sample back with the group (which multiplies the
//! value by the involution character sign), and matching the finite
//! Fourier transform of both expansions yields a homogeneous linear
//! system in the coefficients; its nontrivial solvability detects
//! eigenvalues.

use crate::groups::pullback::{pullback, PullCtx};
use crate::groups::GroupError;
use crate::hypgeom::HPoint;
use crate::specbessel::{bessel_k, BesselError, SpectralParam, SpectralPoint};
use nalgebra::{DMatrix, DVector};

use super::HejhalError;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Arguments beyond this are dropped from the assembly: `K` there is
/// below `1e-60`, far under every row scale in use.
const ARG_CUTOFF: f64 = 140.0;

/// Smallest `T` such that the Fourier tail beyond `T` at height `y` is
/// below `eps` relative to the leading term, together with the
/// oscillatory floor `T >= r / (2 pi y)` (below it `K_ir` has not yet
/// entered its decaying regime).
pub fn truncation(eps: f64, r: f64, y: f64) -> usize {
    let mut t = ((r / (TWO_PI * y)).ceil() as usize).max(4);
    let lead = (-TWO_PI * y).exp();
    while (-TWO_PI * (t as f64) * y).exp() / (t as f64).sqrt() >= eps * lead {
        t += 1;
        if t > 4000 {
            break;
        }
    }
    t
}

/// Zeroth Fourier mode carried by the system. For `lambda >= 1/4` the
/// square-integrable-at-worst solution `sqrt(y) cos(r ln y)` is kept (it
/// vanishes from every genuine cusp form but carries the constant term
/// of the eigenvalue-1/4 CM forms); for `lambda < 1/4` the decaying
/// solution `y^{1/2 - t}` is the only one in `L^2`.
pub fn zeroth_term(point: &SpectralPoint, y: f64) -> f64 {
    match point.param {
        SpectralParam::Real(r) => y.sqrt() * (r * y.ln()).cos(),
        SpectralParam::Imaginary(t) => y.powf(0.5 - t),
    }
}

/// Pullbacks of one horocycle of samples.
#[derive(Debug, Clone)]
pub(crate) struct Samples {
    pub y: f64,
    /// Sample abscissas `x_j = (j + 1/2) / (2Q)`.
    pub xs: Vec<f64>,
    pub xstar: Vec<f64>,
    pub ystar: Vec<f64>,
    /// Involution character sign of the pullback word.
    pub sign: Vec<f64>,
}

/// Pulls the `q` samples of the horocycle at height `y` back into the
/// domain.
pub(crate) fn sample_horocycle(
    ctx: &PullCtx,
    y: f64,
    q: usize,
) -> Result<Samples, GroupError> {
    let mut s = Samples {
        y,
        xs: Vec::with_capacity(q),
        xstar: Vec::with_capacity(q),
        ystar: Vec::with_capacity(q),
        sign: Vec::with_capacity(q),
    };
    for j in 0..q {
        let x = (j as f64 + 0.5) / (2.0 * q as f64);
        let res = pullback(ctx, HPoint::new(x, y))?;
        s.xs.push(x);
        s.xstar.push(res.z.x);
        s.ystar.push(res.z.y);
        s.sign.push(res.sign as f64);
    }
    Ok(s)
}

fn cs(reflection_even: bool, u: f64) -> f64 {
    if reflection_even {
        u.cos()
    } else {
        u.sin()
    }
}

/// Assembles the `(t0 + 1) x (t0 + 1)` collocation matrix `V` at one
/// height: `V a = 0` for the true coefficient vector, up to the
/// truncation error. Reflection-odd classes pin `a_0 = 0` through a unit
/// row.
pub(crate) fn assemble(
    point: &SpectralPoint,
    samples: &Samples,
    reflection_even: bool,
    t0: usize,
) -> Result<DMatrix<f64>, BesselError> {
    let n1 = t0 + 1;
    let q = samples.xs.len();
    let y = samples.y;
    let mut v = DMatrix::<f64>::zeros(n1, n1);

    // diagonal: the expansion evaluated directly at height y
    v[(0, 0)] = if reflection_even {
        zeroth_term(point, y)
    } else {
        1.0 // pins a_0 = 0
    };
    for m in 1..=t0 {
        let arg = TWO_PI * m as f64 * y;
        v[(m, m)] = if arg > ARG_CUTOFF {
            0.0
        } else {
            y.sqrt() * bessel_k(point, arg, false)?
        };
    }

    // collocation part: subtract the discrete Fourier transform of the
    // pulled-back expansion. Row m carries the factor (2 - delta_{m0})/Q
    // from inverting the transform on the symmetric 2Q-point grid.
    let start = if reflection_even { 0 } else { 1 };
    let mut colfac = vec![0.0f64; n1];
    let mut rowfac = vec![0.0f64; n1];
    for j in 0..q {
        let ys = samples.ystar[j];
        let xs = samples.xstar[j];
        let sgn = samples.sign[j];
        let root = ys.sqrt();
        if reflection_even {
            colfac[0] = sgn * zeroth_term(point, ys);
        }
        for n in 1..=t0 {
            let arg = TWO_PI * n as f64 * ys;
            if arg > ARG_CUTOFF {
                // increasing in n: the rest of the column factors vanish
                for c in colfac.iter_mut().take(t0 + 1).skip(n) {
                    *c = 0.0;
                }
                break;
            }
            colfac[n] =
                sgn * root * bessel_k(point, arg, false)? * cs(reflection_even, TWO_PI * n as f64 * xs);
        }
        let x = samples.xs[j];
        for (m, rf) in rowfac.iter_mut().enumerate().take(t0 + 1) {
            let fac = if m == 0 { 1.0 } else { 2.0 } / q as f64;
            *rf = fac * cs(reflection_even, TWO_PI * m as f64 * x);
        }
        for m in start..=t0 {
            if rowfac[m] == 0.0 {
                continue;
            }
            for n in start..=t0 {
                v[(m, n)] -= rowfac[m] * colfac[n];
            }
        }
    }
    if !reflection_even {
        // clear the collocated part of the pinning row and column
        for k in 1..=t0 {
            v[(0, k)] = 0.0;
            v[(k, 0)] = 0.0;
        }
        v[(0, 0)] = 1.0;
    }
    Ok(v)
}

/// Solves `V a = 0` under the normalization `a[norm_col] = 1`: the
/// normalized column moves to the right-hand side and the rest is a
/// row-equilibrated least-squares solve. Returns the full coefficient
/// vector.
pub(crate) fn solve_normalized(
    v: &DMatrix<f64>,
    norm_col: usize,
) -> Result<Vec<f64>, HejhalError> {
    let n = v.nrows();
    let mut a = DMatrix::<f64>::zeros(n, n - 1);
    let mut b = DVector::<f64>::zeros(n);
    for m in 0..n {
        let mut scale = 0.0f64;
        for c in 0..n {
            scale = scale.max(v[(m, c)].abs());
        }
        if scale == 0.0 {
            scale = 1.0;
        }
        let mut k = 0;
        for c in 0..n {
            if c == norm_col {
                b[m] = -v[(m, c)] / scale;
            } else {
                a[(m, k)] = v[(m, c)] / scale;
                k += 1;
            }
        }
    }
    let svd = a.svd(true, true);
    let x = svd
        .solve(&b, 1e-13)
        .map_err(|e| HejhalError::Solve(e.to_string()))?;
    let mut coeffs = vec![0.0f64; n];
    let mut k = 0;
    for c in 0..n {
        if c == norm_col {
            coeffs[c] = 1.0;
        } else {
            coeffs[c] = x[k];
            k += 1;
        }
    }
    Ok(coeffs)
}

/// Coefficients at one height under a given normalization column.
#[derive(Debug, Clone)]
pub struct CoefficientSolve {
    pub coeffs: Vec<f64>,
    /// Which coefficient was pinned to 1 (normally `a_1`; `a_2` when the
    /// `a_1`-normalized solve blew up because `a_1` nearly vanishes).
    pub norm_col: usize,
}

/// Solves at one height with the `a_1 = 1` normalization, falling back
/// to `a_2 = 1` when the result is wildly large.
pub(crate) fn solve_coefficients(
    point: &SpectralPoint,
    samples: &Samples,
    reflection_even: bool,
    t0: usize,
    norm_col: usize,
) -> Result<CoefficientSolve, HejhalError> {
    let v = assemble(point, samples, reflection_even, t0)?;
    let coeffs = solve_normalized(&v, norm_col)?;
    Ok(CoefficientSolve { coeffs, norm_col })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::ford::build_domain;

    #[test]
    fn truncation_grows_as_height_shrinks() {
        let a = truncation(1e-8, 0.0, 0.2);
        let b = truncation(1e-8, 0.0, 0.1);
        assert!(b > a);
        // oscillatory floor kicks in for large r
        let c = truncation(1e-8, 12.0, 0.2);
        assert!(c as f64 >= 12.0 / (TWO_PI * 0.2));
    }

    #[test]
    fn horocycle_samples_pull_into_the_domain() {
        let d = build_domain(11, None).unwrap();
        let ctx = d.pull_ctx(None);
        let y = 0.5 * d.y0;
        let s = sample_horocycle(&ctx, y, 20).unwrap();
        for j in 0..20 {
            assert!(d.contains(HPoint::new(s.xstar[j], s.ystar[j]), 1e-9));
            assert!(s.ystar[j] >= y - 1e-12);
            assert_eq!(s.sign[j], 1.0, "trivial character must give sign 1");
        }
    }

    #[test]
    fn solve_normalized_recovers_a_known_kernel_vector() {
        // V with kernel vector (1, 2, -3): rows orthogonal to it
        let v = DMatrix::from_row_slice(
            3,
            3,
            &[2.0, -1.0, 0.0, 3.0, 0.0, 1.0, 1.0, 1.0, 1.0],
        );
        let c = solve_normalized(&v, 0).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12);
        assert!((c[1] - 2.0).abs() < 1e-10);
        assert!((c[2] + 3.0).abs() < 1e-10);
    }
}
