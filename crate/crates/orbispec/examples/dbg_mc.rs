// Independent check of splitting areas: for each vertical line x = const,
// the hyperbolic measure of the cusp side is computed exactly in y from
// the crossing parities against the chord system; integration over x by
// midpoint rule.
use orbispec::cheeger::chords::chord_walk;
use orbispec::groups::covering::{covering_set, CoveringOptions};
use orbispec::groups::ford::build_domain;
use orbispec::hypgeom::Geodesic;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let level: u64 = args[1].parse().unwrap();
    let tr2: f64 = args[2].parse().unwrap(); // squared trace
    let nx: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(2_000_000);
    let target = tr2.sqrt();
    let d = build_domain(level, None).unwrap();
    let ctx = d.pull_ctx(None);
    let cov = covering_set(&d, None, 2.85, &CoveringOptions::default()).unwrap();
    let mut found: Vec<(f64, f64, f64, f64, f64)> = Vec::new(); // c, r, thlo, thhi
    'outer: for (i, a) in cov.iter().enumerate() {
        let a_inv = a.mat.mat_inv();
        for b in cov.iter().skip(i) {
            let prod = if i == 0 { b.mat.clone() } else { b.mat.mat_mul(&a_inv).unwrap() };
            let f = prod.to_f64();
            let tr = f[0][0] + f[1][1];
            if (tr.abs() - target).abs() > 1e-9 {
                continue;
            }
            let ell = 2.0 * (tr.abs() / 2.0).acosh();
            let Ok(g) = chord_walk(&d, &ctx, &f, ell) else { continue };
            if g.folded || g.boundary {
                continue;
            }
            for ch in &g.chords {
                let Geodesic::Arc { center, radius } = ch.geodesic() else { panic!() };
                found.push((center, radius, ch.th_lo, ch.th_hi, ell));
            }
            break 'outer;
        }
    }
    eprintln!("chords: {:?}", found);
    let mut side_a = 0.0f64; // cusp side
    let mut side_b = 0.0f64;
    for i in 0..nx {
        let x = -0.5 + (i as f64 + 0.5) / nx as f64;
        let f = d.floor_height(x);
        let mut ys: Vec<f64> = Vec::new();
        for &(c, r, lo, hi, _) in &found {
            if (x - c).abs() >= r {
                continue;
            }
            let y = (r * r - (x - c) * (x - c)).sqrt();
            let th = y.atan2(x - c);
            if th > lo + 1e-12 && th < hi - 1e-12 && y > f {
                ys.push(y);
            }
        }
        ys.sort_by(|a, b| b.partial_cmp(a).unwrap()); // descending
        // walk down from infinity
        let mut prev_inv = 0.0; // 1/y at the top (y = inf)
        let mut parity = 0usize;
        for &y in &ys {
            let mass = 1.0 / y - prev_inv;
            if parity % 2 == 0 {
                side_a += mass;
            } else {
                side_b += mass;
            }
            prev_inv = 1.0 / y;
            parity += 1;
        }
        let mass = 1.0 / f - prev_inv;
        if parity % 2 == 0 {
            side_a += mass;
        } else {
            side_b += mass;
        }
    }
    let dx = 1.0 / nx as f64;
    side_a *= dx;
    side_b *= dx;
    eprintln!(
        "cusp side = {:.6} ({:.4} pi)   other side = {:.6} ({:.4} pi)   total = {:.6} (domain {:.6})",
        side_a,
        side_a / std::f64::consts::PI,
        side_b,
        side_b / std::f64::consts::PI,
        side_a + side_b,
        d.area
    );
}
