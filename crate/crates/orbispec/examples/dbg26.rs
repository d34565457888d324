use orbispec::cheeger::chords::{axis_of, chord_walk, geodesic_distance};
use orbispec::cheeger::splitting::splitting_test;
use orbispec::groups::covering::{covering_set, CoveringOptions};
use orbispec::groups::ford::build_domain;

fn main() {
    let d = build_domain(26, None).unwrap();
    let ctx = d.pull_ctx(None);
    eprintln!("area={} cone points:", d.area);
    for cp in &d.cone_points {
        eprintln!("  order={} lifts={:?}", cp.order, cp.lifts);
    }
    let cov = covering_set(&d, None, 4.096 / 2.0 + 0.35, &CoveringOptions::default()).unwrap();
    let target = 50f64.sqrt();
    let mut seen = std::collections::HashSet::new();
    for (i, a) in cov.iter().enumerate() {
        let a_inv = a.mat.mat_inv();
        for b in cov.iter().skip(i) {
            let prod = if i == 0 { b.mat.clone() } else { b.mat.mat_mul(&a_inv).unwrap() };
            let f = prod.to_f64();
            let tr = f[0][0] + f[1][1];
            if (tr.abs() - target).abs() > 1e-9 {
                continue;
            }
            let ell = 2.0 * (tr.abs() / 2.0).acosh();
            let g = match chord_walk(&d, &ctx, &f, ell) {
                Ok(g) => g,
                Err(e) => {
                    eprintln!("walk failed: {e}");
                    continue;
                }
            };
            let key = g.fingerprint.clone();
            if !seen.insert(key) {
                continue;
            }
            eprintln!(
                "class tr={tr:.6} ell={ell:.6} folded={} boundary={} axis={:?}",
                g.folded,
                g.boundary,
                axis_of(&f)
            );
            for (ch, m) in g.chords.iter().zip(&g.mults) {
                eprintln!(
                    "  chord mult={m} geo={:?} th=[{:.6},{:.6}] len={:.6}",
                    ch.geodesic(),
                    ch.th_lo,
                    ch.th_hi,
                    ch.len
                );
                // distance to each cone point lift
                for cp in &d.cone_points {
                    for &(x, y) in &cp.lifts {
                        let z = orbispec::hypgeom::HPoint::new(x, y.max(1e-12));
                        let dd = ch.geodesic().distance_to(z);
                        if dd < 0.3 {
                            eprintln!("    cone lift ({x:.6},{y:.6}) order {} at dist {dd:.6}", cp.order);
                        }
                    }
                }
            }
            if g.folded || g.boundary {
                continue;
            }
            let refs: Vec<_> = g.chords.iter().collect();
            match splitting_test(&d, &refs) {
                Ok(Some(s)) => eprintln!("  splits: small={} large={}", s.area_small, s.area_large),
                Ok(None) => eprintln!("  does not separate"),
                Err(e) => eprintln!("  splitting error: {e}"),
            }
        }
    }
}
// appended: not used
