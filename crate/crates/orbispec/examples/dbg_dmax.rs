use orbispec::cheeger::chords::{chord_walk, geodesic_distance};
use orbispec::groups::covering::{covering_set, CoveringOptions};
use orbispec::groups::ford::build_domain;
use orbispec::hypgeom::Geodesic;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let level: u64 = args[1].parse().unwrap();
    let target: f64 = args[2].parse::<f64>().unwrap().sqrt();
    let d = build_domain(level, None).unwrap();
    let ctx = d.pull_ctx(None);
    let cov = covering_set(&d, None, 2.5, &CoveringOptions::default()).unwrap();
    let mut done = false;
    for (i, a) in cov.iter().enumerate() {
        if done {
            break;
        }
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
            let base: Vec<Geodesic> = g.chords.iter().map(|c| c.geodesic()).collect();
            eprintln!("level {level} tr {tr:.4} chords {}", base.len());
            // fold events per cone point
            for cp in &d.cone_points {
                let mut dmin = f64::INFINITY;
                for &(x, y) in &cp.lifts {
                    for dx in [-1.0, 0.0, 1.0] {
                        let z = orbispec::hypgeom::HPoint::new(x + dx, y.max(1e-12));
                        for gg in &base {
                            let dd = gg.distance_to(z);
                            if dd > 1e-9 {
                                dmin = dmin.min(dd);
                            }
                        }
                    }
                }
                eprintln!("  cone order {} dist {:.6}", cp.order, dmin);
            }
            // collisions with side-pairing images
            let mut images: Vec<(usize, Geodesic)> = Vec::new();
            for (si, side) in d.sides.iter().enumerate() {
                let gm = side.pairing.to_f64();
                for bb in &base {
                    images.push((si, bb.transform(&gm)));
                }
            }
            for (bi, a2) in base.iter().enumerate() {
                for (bj, b2) in base.iter().enumerate().skip(bi + 1) {
                    eprintln!(
                        "  half base[{bi}]-base[{bj}]: {:.6}",
                        geodesic_distance(a2, b2) / 2.0
                    );
                }
                for (si, im) in &images {
                    let dd = geodesic_distance(a2, im) / 2.0;
                    if dd < 1.5 {
                        eprintln!("  half base[{bi}]-side{si}-image: {:.6} ({im:?})", dd);
                    }
                }
            }
            done = true;
            break;
        }
    }
}
