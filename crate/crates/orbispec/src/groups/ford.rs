//! Ford fundamental domains.
//!
//! The domain is the part of the strip `|x| <= 1/2` above the upper
//! envelope of the group's isometric circles. Comparing two circle
//! heights squared, `r^2 - (x - c)^2`, the quadratic terms cancel, so the
//! envelope is the upper envelope of the *lines* `(r^2 - c^2) + 2 c x`
//! and is computed exactly over the rationals with the usual convex-hull
//! sweep. Envelope breakpoint heights are rational; a breakpoint of
//! height exactly zero is an ideal vertex (a cusp on the real line),
//! certified by the exact circle tangency test.

use super::normalizer::{enumerate_circles, Circle};
use super::{GroupError, GroupKind, Signature};
use crate::hypgeom::{mobius_apply, HPoint};
use crate::qfield::ExactMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

const TOL_MATCH: f64 = 1e-7;
const TOL_AREA: f64 = 1e-9;

/// One maximal arc of the floor envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeArc {
    pub x_lo: f64,
    pub x_hi: f64,
    /// Index into [`FordDomain::circles`].
    pub circle: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SideShape {
    LeftVertical,
    RightVertical,
    Arc { circle: usize, x_lo: f64, x_hi: f64 },
}

#[derive(Debug, Clone)]
pub struct Side {
    pub shape: SideShape,
    /// Element mapping this side onto its partner.
    pub pairing: ExactMatrix,
    pub partner: usize,
    /// Vertex where the boundary walk enters the side.
    pub v_start: usize,
    /// Vertex where the walk leaves it.
    pub v_end: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Vertex {
    pub x: f64,
    /// `f64::INFINITY` at the cusp at infinity.
    pub y: f64,
    pub ideal: bool,
    /// Interior angle of the domain at this vertex (0 when ideal).
    pub angle: f64,
}

#[derive(Debug, Clone)]
pub struct VertexCycle {
    pub vertices: Vec<usize>,
    pub sides: Vec<usize>,
    pub angle_sum: f64,
    /// Cone order: 1 for a regular cycle, 0 for an ideal cycle.
    pub order: u32,
    pub ideal: bool,
    pub transformation: ExactMatrix,
}

/// A cone point of the quotient with all of its lifts on the domain
/// boundary.
#[derive(Debug, Clone)]
pub struct ConePoint {
    pub order: u32,
    pub lifts: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct FordDomain {
    pub level: u64,
    pub kind: GroupKind,
    /// Circles visible on the envelope (one entry per circle).
    pub circles: Vec<Circle>,
    /// Floor arcs, left to right, covering `[-1/2, 1/2]` up to ideal
    /// tangency points.
    pub arcs: Vec<EnvelopeArc>,
    /// Boundary sides in walk order: left vertical, floor arcs, right
    /// vertical. Self-paired arcs are split at their top.
    pub sides: Vec<Side>,
    pub vertices: Vec<Vertex>,
    pub cycles: Vec<VertexCycle>,
    pub signature: Signature,
    /// Hyperbolic area by Gauss-Bonnet over the polygon; agrees with
    /// `signature.coarea()` to 1e-9.
    pub area: f64,
    /// Smallest height of a non-ideal boundary vertex.
    pub y0: f64,
    pub cone_points: Vec<ConePoint>,
    /// `t` followed by the visible circle elements.
    pub generators: Vec<ExactMatrix>,
}

impl FordDomain {
    /// Envelope height below `x` (after reduction into the strip); zero
    /// only at ideal tangency points.
    pub fn floor_height(&self, x: f64) -> f64 {
        let mut x = x - x.round();
        if x < -0.5 {
            x += 1.0;
        }
        let mut best = 0.0f64;
        for arc in &self.arcs {
            let h2 = self.circles[arc.circle].height_sq(x);
            if h2 > best {
                best = h2;
            }
        }
        best.sqrt()
    }

    /// Whether `z` lies in the closed domain (up to `tol`).
    pub fn contains(&self, z: HPoint, tol: f64) -> bool {
        z.x.abs() <= 0.5 + tol && z.y >= self.floor_height(z.x) - tol
    }
}

/// Builds the Ford domain of `N(Gamma_0(n))`, or of the index-two
/// subgroup selected by a character when `subgroup` supplies the parent
/// domain together with the character sign of each parent circle.
pub fn build_domain(
    n: u64,
    subgroup: Option<(&FordDomain, &[i8])>,
) -> Result<FordDomain, GroupError> {
    let mut r_min = 0.5 / (n as f64).max(2.0);
    let mut last_err = GroupError::Domain("empty".into());
    for _ in 0..8 {
        match try_build(n, r_min, subgroup) {
            Ok(d) => return Ok(d),
            Err(GroupError::Domain(msg)) if msg.starts_with("incomplete") => {
                last_err = GroupError::Domain(msg);
                r_min /= 4.0;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

fn try_build(
    n: u64,
    r_min: f64,
    subgroup: Option<(&FordDomain, &[i8])>,
) -> Result<FordDomain, GroupError> {
    let mut circles = enumerate_circles(n, r_min)?;
    let kind = if let Some((parent, signs)) = subgroup {
        circles = filter_by_character(circles, parent, signs)?;
        GroupKind::IndexTwoSubgroup
    } else {
        GroupKind::Normalizer
    };
    let (visible, arcs, breaks) = envelope(&circles)?;

    // completeness: every positive envelope minimum must exceed the
    // enumeration cutoff, otherwise a circle below the cutoff could still
    // be visible (arc heights are concave, so minima sit at breakpoints
    // and corners)
    for b in &breaks {
        if !b.ideal && b.y < r_min {
            return Err(GroupError::Domain(format!(
                "incomplete envelope: breakpoint height {} below cutoff {}",
                b.y, r_min
            )));
        }
    }
    for (arc_idx, x) in [(0usize, -0.5f64), (arcs.len() - 1, 0.5)] {
        let h2 = visible[arcs[arc_idx].circle].height_sq(x);
        if h2 > 0.0 && h2.sqrt() < r_min {
            return Err(GroupError::Domain(format!(
                "incomplete envelope: corner height {} below cutoff {r_min}",
                h2.sqrt()
            )));
        }
    }

    assemble(n, kind, visible, arcs, breaks)
}

fn filter_by_character(
    circles: Vec<Circle>,
    parent: &FordDomain,
    signs: &[i8],
) -> Result<Vec<Circle>, GroupError> {
    let evals = crate::parallel::par_map(&circles, |c| {
        super::character::eval_char(parent, signs, &c.element)
    });
    let mut kept = Vec::new();
    for (c, ev) in circles.into_iter().zip(evals) {
        if ev? == 1 {
            kept.push(c);
        }
    }
    Ok(kept)
}

/// An envelope breakpoint between two consecutive floor arcs.
struct Breakpoint {
    x: f64,
    y: f64,
    ideal: bool,
}

/// Exact upper envelope. Returns the visible circles, the floor arcs
/// (indices into the visible list), and the breakpoints between
/// consecutive arcs (`arcs.len() - 1` of them).
#[allow(clippy::type_complexity)]
fn envelope(
    circles: &[Circle],
) -> Result<(Vec<Circle>, Vec<EnvelopeArc>, Vec<Breakpoint>), GroupError> {
    if circles.is_empty() {
        return Err(GroupError::Domain("incomplete envelope: no circles".into()));
    }
    // lines l_i(x) = (r^2 - c^2) + 2 c x; envelope height^2 = max_i l_i - x^2
    struct Line {
        m: BigRational, // 2c
        b: BigRational, // r^2 - c^2
        idx: usize,
    }
    let mut lines: Vec<Line> = circles
        .iter()
        .enumerate()
        .map(|(idx, c)| Line {
            m: &c.center + &c.center,
            b: &c.radius_sq - &c.center * &c.center,
            idx,
        })
        .collect();
    lines.sort_by(|p, q| p.m.cmp(&q.m).then_with(|| q.b.cmp(&p.b)));
    lines.dedup_by(|next, prev| next.m == prev.m); // keep max intercept per slope

    // upper hull over increasing slope
    let mut hull: Vec<Line> = Vec::new();
    for l in lines {
        while hull.len() >= 2 {
            let l1 = &hull[hull.len() - 2];
            let l2 = &hull[hull.len() - 1];
            // l2 redundant iff (b2 - b1)(m3 - m1) <= (m2 - m1)(b3 - b1)
            let lhs = (&l2.b - &l1.b) * (&l.m - &l1.m);
            let rhs = (&l2.m - &l1.m) * (&l.b - &l1.b);
            if lhs <= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }

    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let neg_half = -half.clone();
    let mut cut_x: Vec<BigRational> = Vec::with_capacity(hull.len() + 1);
    cut_x.push(neg_half.clone());
    for k in 0..hull.len() - 1 {
        let x = (&hull[k].b - &hull[k + 1].b) / (&hull[k + 1].m - &hull[k].m);
        cut_x.push(x);
    }
    cut_x.push(half.clone());

    let mut visible: Vec<Circle> = Vec::new();
    let mut arcs: Vec<EnvelopeArc> = Vec::new();
    let mut breaks: Vec<Breakpoint> = Vec::new();
    let mut remap = vec![usize::MAX; circles.len()];

    for (k, line) in hull.iter().enumerate() {
        let lo = cut_x[k].clone().max(neg_half.clone());
        let hi = cut_x[k + 1].clone().min(half.clone());
        if lo >= hi {
            continue;
        }
        // exact height^2 at the segment ends
        let h2 = |x: &BigRational| -> BigRational { &line.b + &line.m * x - x * x };
        for x in [&lo, &hi] {
            let v = h2(x);
            if v.is_negative() {
                return Err(GroupError::Domain(format!(
                    "incomplete envelope: negative height^2 at x = {}",
                    x.to_f64().unwrap_or(f64::NAN)
                )));
            }
            // an exact zero in the strip interior must be a certified
            // tangency between the adjacent circles
            let interior = *x != neg_half && *x != half;
            if v.is_zero() && interior {
                let right = if x == &hi && k + 1 < hull.len() {
                    Some(&circles[hull[k + 1].idx])
                } else if x == &lo && k > 0 {
                    Some(&circles[hull[k - 1].idx])
                } else {
                    None
                };
                let a = &circles[line.idx];
                if !right.map(|b| a.tangent_to(b)).unwrap_or(false) {
                    return Err(GroupError::Domain(
                        "zero breakpoint without exact tangency".into(),
                    ));
                }
            }
        }
        if remap[line.idx] == usize::MAX {
            remap[line.idx] = visible.len();
            visible.push(circles[line.idx].clone());
        }
        let x_lo = lo.to_f64().unwrap();
        let x_hi = hi.to_f64().unwrap();
        if !arcs.is_empty() {
            let y2 = h2(&lo);
            breaks.push(Breakpoint {
                x: x_lo,
                y: y2.to_f64().unwrap().max(0.0).sqrt(),
                ideal: y2.is_zero(),
            });
        }
        arcs.push(EnvelopeArc { x_lo, x_hi, circle: remap[line.idx] });
    }
    if arcs.is_empty() {
        return Err(GroupError::Domain("incomplete envelope: no arcs".into()));
    }
    Ok((visible, arcs, breaks))
}

fn assemble(
    n: u64,
    kind: GroupKind,
    circles: Vec<Circle>,
    arcs: Vec<EnvelopeArc>,
    breaks: Vec<Breakpoint>,
) -> Result<FordDomain, GroupError> {
    let t = ExactMatrix::from_integers(n, 1, 1, 0, 1)
        .map_err(|e| GroupError::Domain(e.to_string()))?;
    let t_inv = t.mat_inv();

    let height_at = |circle: usize, x: f64| -> f64 { circles[circle].height_sq(x).max(0.0).sqrt() };
    let h_left = height_at(arcs[0].circle, -0.5);
    let h_right = height_at(arcs.last().unwrap().circle, 0.5);

    // vertices: infinity, corner_L, floor vertices left-to-right, corner_R
    let mut vertices = vec![
        Vertex { x: 0.0, y: f64::INFINITY, ideal: true, angle: 0.0 },
        Vertex { x: -0.5, y: h_left, ideal: h_left == 0.0, angle: 0.0 },
    ];

    struct FloorSide {
        circle: usize,
        x_lo: f64,
        x_hi: f64,
        v_start: usize,
        v_end: usize,
    }
    let mut floor: Vec<FloorSide> = Vec::new();
    let mut left_vertex = 1usize;
    for (k, arc) in arcs.iter().enumerate() {
        // a trace-zero canonical element folds its circle at the top; the
        // side is split there when the top is interior to the arc
        let elem = &circles[arc.circle].element;
        let trace_zero = elem
            .trace()
            .map_err(|e| GroupError::Domain(e.to_string()))?
            .is_zero();
        let c = circles[arc.circle].center_f;
        let split = trace_zero && arc.x_lo + 1e-12 < c && c < arc.x_hi - 1e-12;

        let right_vertex = if k + 1 < arcs.len() {
            let b = &breaks[k];
            vertices.push(Vertex { x: b.x, y: b.y, ideal: b.ideal, angle: 0.0 });
            vertices.len() - 1
        } else {
            vertices.push(Vertex { x: 0.5, y: h_right, ideal: h_right == 0.0, angle: 0.0 });
            vertices.len() - 1
        };
        if split {
            let top = Vertex {
                x: c,
                y: circles[arc.circle].radius_f,
                ideal: false,
                angle: 0.0,
            };
            // keep floor vertices in left-to-right order
            vertices.insert(right_vertex, top);
            let top_idx = right_vertex;
            let right_vertex = vertices.len() - 1;
            floor.push(FloorSide { circle: arc.circle, x_lo: arc.x_lo, x_hi: c, v_start: left_vertex, v_end: top_idx });
            floor.push(FloorSide { circle: arc.circle, x_lo: c, x_hi: arc.x_hi, v_start: top_idx, v_end: right_vertex });
            left_vertex = right_vertex;
        } else {
            floor.push(FloorSide { circle: arc.circle, x_lo: arc.x_lo, x_hi: arc.x_hi, v_start: left_vertex, v_end: right_vertex });
            left_vertex = right_vertex;
        }
    }
    let corner_r = left_vertex;

    // sides in walk order
    let n_sides = floor.len() + 2;
    let mut sides: Vec<Side> = Vec::with_capacity(n_sides);
    sides.push(Side {
        shape: SideShape::LeftVertical,
        pairing: t.clone(),
        partner: n_sides - 1,
        v_start: 0,
        v_end: 1,
    });
    for f in &floor {
        sides.push(Side {
            shape: SideShape::Arc { circle: f.circle, x_lo: f.x_lo, x_hi: f.x_hi },
            pairing: circles[f.circle].element.clone(),
            partner: usize::MAX,
            v_start: f.v_start,
            v_end: f.v_end,
        });
    }
    sides.push(Side {
        shape: SideShape::RightVertical,
        pairing: t_inv.clone(),
        partner: 0,
        v_start: corner_r,
        v_end: 0,
    });

    // resolve arc partners by mapping endpoints; allow a final translation
    // when the image arc lands in a neighboring strip copy
    let endpoint_image = |s: &Side, g: &ExactMatrix, start: bool| -> f64 {
        match s.shape {
            SideShape::Arc { circle, x_lo, x_hi } => {
                let x = if start { x_lo } else { x_hi };
                let y = height_at(circle, x);
                if y > 0.0 {
                    mobius_apply(g, HPoint::new(x, y)).x
                } else {
                    // ideal tangency endpoint: image is the real boundary
                    // image (the pole cannot occur on the isometric circle)
                    mobius_boundary(&g.to_f64(), x).unwrap_or(f64::INFINITY)
                }
            }
            _ => unreachable!(),
        }
    };
    for i in 1..n_sides - 1 {
        let g = sides[i].pairing.clone();
        let p_lo = endpoint_image(&sides[i], &g, true);
        let p_hi = endpoint_image(&sides[i], &g, false);
        let (lo_x, hi_x) = if p_lo <= p_hi { (p_lo, p_hi) } else { (p_hi, p_lo) };
        let mut matched = None;
        'shift: for shift in [0i64, -1, 1] {
            for (j, side) in sides.iter().enumerate().take(n_sides - 1).skip(1) {
                if let SideShape::Arc { x_lo, x_hi, .. } = side.shape {
                    if (x_lo - (lo_x + shift as f64)).abs() < TOL_MATCH
                        && (x_hi - (hi_x + shift as f64)).abs() < TOL_MATCH
                    {
                        matched = Some((j, shift));
                        break 'shift;
                    }
                }
            }
        }
        let (j, shift) = matched.ok_or_else(|| {
            GroupError::Domain(format!(
                "no partner side for arc {i} (image [{lo_x}, {hi_x}])"
            ))
        })?;
        if shift != 0 {
            let tk = if shift == -1 { &t_inv } else { &t };
            sides[i].pairing = tk
                .mat_mul(&g)
                .map_err(|e| GroupError::Domain(e.to_string()))?;
        }
        sides[i].partner = j;
    }
    // involutivity and inverse consistency (replace the partner's pairing
    // by the exact inverse, then verify it still matches)
    for i in 1..n_sides - 1 {
        let j = sides[i].partner;
        if sides[j].partner != i {
            return Err(GroupError::Domain(format!(
                "pairing not involutive at sides {i}, {j}"
            )));
        }
        if j > i {
            sides[j].pairing = sides[i].pairing.mat_inv();
        } else if j == i {
            // an arc genuinely fixed as a set must be folded by an
            // involution, which only happens after a top split
            let sq = sides[i]
                .pairing
                .mat_mul(&sides[i].pairing)
                .map_err(|e| GroupError::Domain(e.to_string()))?;
            if !sq.is_identity() {
                return Err(GroupError::Domain(format!(
                    "side {i} maps to itself under a non-involution"
                )));
            }
        }
    }

    // sampled side-pairing validation: interior points of each side land
    // on the partner side
    for i in 1..n_sides - 1 {
        let (circle, x_lo, x_hi) = match sides[i].shape {
            SideShape::Arc { circle, x_lo, x_hi } => (circle, x_lo, x_hi),
            _ => unreachable!(),
        };
        let j = sides[i].partner;
        let (pc, p_lo, p_hi) = match sides[j].shape {
            SideShape::Arc { circle, x_lo, x_hi } => (circle, x_lo, x_hi),
            _ => unreachable!(),
        };
        for k in 0..5 {
            let x = x_lo + (x_hi - x_lo) * (k as f64 + 0.5) / 5.0;
            let z = HPoint::new(x, height_at(circle, x));
            let w = mobius_apply(&sides[i].pairing, z);
            let on_circle = ((w.x - circles[pc].center_f).powi(2) + w.y * w.y
                - circles[pc].radius_f * circles[pc].radius_f)
                .abs();
            if on_circle > 1e-9 || w.x < p_lo - 1e-9 || w.x > p_hi + 1e-9 {
                return Err(GroupError::Domain(format!(
                    "side {i} does not map onto side {j} (x = {x})"
                )));
            }
        }
    }

    // interior angles from walk tangents (interior of the domain on the
    // left of the walk)
    let walk_dir = |s: &Side, at_start: bool| -> (f64, f64) {
        match s.shape {
            SideShape::LeftVertical => (0.0, -1.0),
            SideShape::RightVertical => (0.0, 1.0),
            SideShape::Arc { circle, x_lo, x_hi } => {
                let x = if at_start { x_lo } else { x_hi };
                let y = height_at(circle, x);
                let c = circles[circle].center_f;
                let norm = (y * y + (c - x) * (c - x)).sqrt();
                (y / norm, (c - x) / norm)
            }
        }
    };
    for v in 1..vertices.len() {
        if vertices[v].ideal {
            continue;
        }
        let inc = sides
            .iter()
            .position(|s| s.v_end == v)
            .ok_or_else(|| GroupError::Domain("vertex without incoming side".into()))?;
        let out = sides
            .iter()
            .position(|s| s.v_start == v)
            .ok_or_else(|| GroupError::Domain("vertex without outgoing side".into()))?;
        let u = walk_dir(&sides[inc], false);
        let w = walk_dir(&sides[out], true);
        let turn = (u.0 * w.1 - u.1 * w.0).atan2(u.0 * w.0 + u.1 * w.1);
        vertices[v].angle = std::f64::consts::PI - turn;
    }

    // Gauss-Bonnet area of the geodesic polygon
    let angle_total: f64 = vertices.iter().map(|v| v.angle).sum();
    let area = (vertices.len() as f64 - 2.0) * std::f64::consts::PI - angle_total;

    let cycles = trace_cycles(&sides, &vertices)?;

    let mut cone_orders: Vec<u32> = cycles
        .iter()
        .filter(|c| c.order >= 2)
        .map(|c| c.order)
        .collect();
    cone_orders.sort_unstable();
    let cusps = cycles.iter().filter(|c| c.ideal).count();
    let n_pairs = n_sides / 2;
    // V - E + F = 2 - 2g with F = 1
    let euler_rhs = 1 + n_pairs as i64 - cycles.len() as i64;
    if euler_rhs % 2 != 0 {
        return Err(GroupError::Domain("odd Euler characteristic defect".into()));
    }
    let genus = euler_rhs / 2;
    let signature = Signature { genus, cusps, cone_orders };
    let coarea = signature.coarea();
    if (area - coarea).abs() > TOL_AREA * (1.0 + area.abs()) {
        return Err(GroupError::Domain(format!(
            "area mismatch: polygon {area}, signature {coarea}"
        )));
    }

    let cone_points = cycles
        .iter()
        .filter(|c| c.order >= 2)
        .map(|c| {
            let mut lifts: Vec<(f64, f64)> = c
                .vertices
                .iter()
                .map(|&v| (vertices[v].x, vertices[v].y))
                .collect();
            lifts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            lifts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
            ConePoint { order: c.order, lifts }
        })
        .collect();

    let y0 = vertices
        .iter()
        .filter(|v| !v.ideal)
        .map(|v| v.y)
        .fold(f64::INFINITY, f64::min);

    let mut generators = vec![t];
    generators.extend(circles.iter().map(|c| c.element.clone()));

    Ok(FordDomain {
        level: n,
        kind,
        circles,
        arcs,
        sides,
        vertices,
        cycles,
        signature,
        area,
        y0,
        cone_points,
        generators,
    })
}

/// Follows vertex cycles through the side pairings and classifies each
/// as regular, a cone point of some order, or ideal (a cusp).
fn trace_cycles(sides: &[Side], vertices: &[Vertex]) -> Result<Vec<VertexCycle>, GroupError> {
    let n = sides.len();
    let level = sides[0].pairing.level();
    let image_of = |g: &ExactMatrix, v: usize| -> Result<usize, GroupError> {
        let m = g.to_f64();
        let target: (f64, f64) = if vertices[v].y.is_infinite() {
            if m[1][0].abs() < 1e-12 {
                (0.0, f64::INFINITY)
            } else {
                (m[0][0] / m[1][0], 0.0)
            }
        } else if vertices[v].ideal {
            match mobius_boundary(&m, vertices[v].x) {
                Some(x) => (x, 0.0),
                None => (0.0, f64::INFINITY),
            }
        } else {
            let w = mobius_apply(g, HPoint::new(vertices[v].x, vertices[v].y));
            (w.x, w.y)
        };
        vertices
            .iter()
            .position(|u| {
                if target.1.is_infinite() || u.y.is_infinite() {
                    target.1.is_infinite() && u.y.is_infinite()
                } else {
                    (u.x - target.0).abs() < TOL_MATCH && (u.y - target.1).abs() < TOL_MATCH
                }
            })
            .ok_or_else(|| {
                GroupError::Domain(format!(
                    "vertex image ({}, {}) is not a vertex",
                    target.0, target.1
                ))
            })
    };

    let mut seen = std::collections::HashSet::new();
    let mut cycles = Vec::new();
    for s0 in 0..n {
        for &v0 in &[sides[s0].v_start, sides[s0].v_end] {
            if seen.contains(&(v0, s0)) {
                continue;
            }
            seen.insert((v0, s0));
            let mut cyc_vertices = vec![v0];
            let mut cyc_sides = vec![s0];
            let mut angle_sum = vertices[v0].angle;
            let mut transform = ExactMatrix::identity(level);
            let (mut v, mut s) = (v0, s0);
            loop {
                let g = &sides[s].pairing;
                transform = g
                    .mat_mul(&transform)
                    .map_err(|e| GroupError::Domain(e.to_string()))?;
                let w = image_of(g, v)?;
                let sp = sides[s].partner;
                if sides[sp].v_start != w && sides[sp].v_end != w {
                    return Err(GroupError::Domain(
                        "vertex image is not an endpoint of the partner side".into(),
                    ));
                }
                // departing side: the other incidence at w
                let next = (0..n)
                    .flat_map(|j| [(j, sides[j].v_start), (j, sides[j].v_end)])
                    .find(|&(j, u)| u == w && j != sp)
                    .map(|(j, _)| j)
                    .unwrap_or(sp);
                // the arrival incidence (w, sp) is consumed by this cycle
                seen.insert((w, sp));
                if (w, next) == (v0, s0) {
                    break;
                }
                seen.insert((w, next));
                cyc_vertices.push(w);
                cyc_sides.push(next);
                angle_sum += vertices[w].angle;
                (v, s) = (w, next);
                if cyc_sides.len() > 4 * n {
                    return Err(GroupError::Domain("vertex cycle does not close".into()));
                }
            }
            let ideal = cyc_vertices.iter().any(|&u| vertices[u].ideal);
            if ideal && !cyc_vertices.iter().all(|&u| vertices[u].ideal) {
                return Err(GroupError::Domain("mixed ideal/finite vertex cycle".into()));
            }
            let order = if ideal {
                let tr = transform
                    .trace()
                    .map_err(|e| GroupError::Domain(e.to_string()))?;
                let t2 = tr
                    .checked_mul(&tr)
                    .map_err(|e| GroupError::Domain(e.to_string()))?;
                if t2.cmp_rational(4, 1) != std::cmp::Ordering::Equal {
                    return Err(GroupError::Domain(
                        "ideal cycle transformation is not parabolic".into(),
                    ));
                }
                0
            } else {
                let two_pi = 2.0 * std::f64::consts::PI;
                let m = (two_pi / angle_sum).round();
                if m < 0.5 || (two_pi / angle_sum - m).abs() > 1e-6 * m {
                    return Err(GroupError::Domain(format!(
                        "cycle angle sum {angle_sum} is not 2 pi / integer"
                    )));
                }
                let m = m as u32;
                // exact seal: transformation^m = identity in PSL2
                let mut pw = ExactMatrix::identity(level);
                for _ in 0..m {
                    pw = pw
                        .mat_mul(&transform)
                        .map_err(|e| GroupError::Domain(e.to_string()))?;
                }
                if !pw.is_identity() {
                    return Err(GroupError::Domain(format!(
                        "cycle transformation^{m} is not the identity"
                    )));
                }
                m
            };
            cycles.push(VertexCycle {
                vertices: cyc_vertices,
                sides: cyc_sides,
                angle_sum,
                order,
                ideal,
                transformation: transform,
            });
        }
    }
    Ok(cycles)
}

/// Image of a real boundary point under an f64 matrix; `None` at the pole.
fn mobius_boundary(m: &[[f64; 2]; 2], x: f64) -> Option<f64> {
    let den = m[1][0] * x + m[1][1];
    if den.abs() < 1e-12 {
        None
    } else {
        Some((m[0][0] * x + m[0][1]) / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn modular_group_domain() {
        let d = build_domain(1, None).unwrap();
        assert_abs_diff_eq!(d.area, PI / 3.0, epsilon = 1e-12);
        assert_eq!(
            d.signature,
            Signature { genus: 0, cusps: 1, cone_orders: vec![2, 3] }
        );
        assert_eq!(d.sides.len(), 4); // two verticals + split unit circle
        assert_abs_diff_eq!(d.y0, 3f64.sqrt() / 2.0, epsilon = 1e-12);
        // the top of the unit circle is the order-2 cone point
        let cone2 = d.cone_points.iter().find(|c| c.order == 2).unwrap();
        assert_abs_diff_eq!(cone2.lifts[0].0, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cone2.lifts[0].1, 1.0, epsilon = 1e-12);
        // corners are the order-3 point
        let cone3 = d.cone_points.iter().find(|c| c.order == 3).unwrap();
        assert_eq!(cone3.lifts.len(), 2);
    }

    #[test]
    fn level11_normalizer_domain() {
        let d = build_domain(11, None).unwrap();
        assert_abs_diff_eq!(d.area, 2.0 * PI, epsilon = 1e-10);
        assert_eq!(d.signature.genus, 0);
        assert_eq!(d.signature.cusps, 1);
        assert_eq!(d.signature.cone_orders, vec![2, 2, 2, 2]);
        assert!(d.y0 > 0.05 && d.y0 < 0.4, "y0 = {}", d.y0);
        // envelope: circles at 0, +-1/3, +-1/2
        assert_eq!(d.circles.len(), 5);
    }

    #[test]
    fn catalog_normalizer_areas() {
        for (n, mult) in [
            (11u64, 2.0),
            (15, 2.0),
            (17, 3.0),
            (19, 10.0 / 3.0),
            (22, 3.0),
            (26, 3.5),
            (33, 4.0),
            (42, 4.0),
            (55, 6.0),
            (66, 6.0),
        ] {
            let d = build_domain(n, None).unwrap();
            assert_abs_diff_eq!(d.area, mult * PI, epsilon = 1e-9);
            assert_eq!(d.signature.cusps, 1, "level {n}");
            assert_eq!(d.signature.genus, 0, "level {n}");
        }
    }

    #[test]
    fn floor_height_matches_envelope() {
        let d = build_domain(17, None).unwrap();
        for k in 0..200 {
            let x = -0.5 + k as f64 / 199.0;
            let h = d.floor_height(x);
            for c in &d.circles {
                assert!(c.height_sq(x) <= h * h + 1e-12);
            }
        }
    }
}
