use orbispec::cheeger::cheeger_run;
use orbispec::groups::catalog::lookup;

fn main() {
    let golden = [
        ("M11", 0.6953937167), ("N11", 0.3063489625),
        ("M15", 0.8145483069), ("N15", 0.4987276868),
        ("M17", 0.6635223129), ("N17", 0.3740665682),
        ("M19", 0.6723651854), ("N19", 0.1838093775),
        ("M22", 0.7173331137), ("N22", 0.2794671455),
        ("M26", 0.7193479855), ("N26", 0.2395432676),
        ("M33", 0.7406216020), ("N33", 0.4072741535),
        ("M42", 0.7710859236), ("N42", 0.3284062093),
        ("M55", 0.4853806317), ("N55", 0.2042326417),
        ("M66", 0.4726065780), ("N66", 0.2189374728),
    ];
    let mut fails = 0;
    for (name, h_ref) in golden {
        let t0 = std::time::Instant::now();
        let res = lookup(name).and_then(|g| {
            cheeger_run(&g.domain, name).map_err(|e| {
                orbispec::groups::GroupError::Domain(format!("{e}"))
            })
        });
        match res {
            Ok(rep) => {
                let ok = (rep.h - h_ref).abs() < 1e-5;
                if !ok { fails += 1; }
                let tr = rep.best.as_ref().map(|b| b.traces.join(",")).unwrap_or_default();
                println!(
                    "{name}: h={:.10} ref={:.10} {} s*={:.6} dmax={:.4} bound={:.3} steps={} cov={} cls={} tr=[{tr}] [{:.1}s]",
                    rep.h, h_ref, if ok { "OK" } else { "FAIL" },
                    rep.best.as_ref().map(|b| b.s_star).unwrap_or(f64::NAN),
                    rep.best.as_ref().map(|b| b.d_max).unwrap_or(f64::NAN),
                    rep.state.final_bound, rep.state.deepening_steps,
                    rep.state.covering_size, rep.state.classes_examined,
                    t0.elapsed().as_secs_f64()
                );
            }
            Err(e) => {
                fails += 1;
                println!("{name}: ERROR {e} [{:.1}s]", t0.elapsed().as_secs_f64());
            }
        }
    }
    println!("fails: {fails}");
}
