use orbispec::cheeger::chords::{axis_of, chord_walk};
use orbispec::groups::covering::{covering_set, CoveringOptions};
use orbispec::groups::ford::build_domain;

fn main() {
    let d = build_domain(33, None).unwrap();
    let ctx = d.pull_ctx(None);
    for bound in [1.6f64, 2.56, 4.096, 6.5536] {
        eprintln!("== bound {bound}");
        let cov = covering_set(&d, None, bound / 2.0 + 0.35, &CoveringOptions::default())
            .unwrap();
        let tr_max = 2.0 * (bound / 2.0).cosh() + 1e-9;
        let mut seen = std::collections::HashSet::new();
        let mut fails = 0;
        for (i, a) in cov.iter().enumerate() {
            let a_inv = a.mat.mat_inv();
            for b in cov.iter().skip(i) {
                let prod = if i == 0 {
                    b.mat.clone()
                } else {
                    b.mat.mat_mul(&a_inv).unwrap()
                };
                let f = prod.to_f64();
                let tr = f[0][0] + f[1][1];
                if tr.abs() <= 2.0 + 1e-9 || tr.abs() > tr_max {
                    continue;
                }
                let key: Vec<i64> = f.iter().flatten().map(|&x| (x * 1e9).round() as i64).collect();
                if !seen.insert(key) {
                    continue;
                }
                let ell = 2.0 * (tr.abs() / 2.0).acosh();
                if ell > bound + 1e-9 {
                    continue;
                }
                match chord_walk(&d, &ctx, &f, ell) {
                    Ok(_) => {}
                    Err(e) => {
                        fails += 1;
                        if fails <= 5 {
                            let ax = axis_of(&f);
                            eprintln!(
                                "FAIL tr={tr:.6} ell={ell:.6} axis={ax:?} m={f:?}: {e}"
                            );
                        }
                    }
                }
            }
        }
        eprintln!("   fails: {fails}");
        if fails > 0 {
            break;
        }
    }
}
