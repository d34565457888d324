use orbispec::groups::ford::build_domain;

fn main() {
    let d = build_domain(42, None).unwrap();
    eprintln!("area={} y0={}", d.area, d.y0);
    for (i, a) in d.arcs.iter().enumerate() {
        let c = &d.circles[a.circle];
        eprintln!(
            "arc {i}: circle={} x=[{:.6},{:.6}] center={:.6} r={:.6}",
            a.circle, a.x_lo, a.x_hi, c.center_f, c.radius_f
        );
    }
    // the failing chord endpoints
    let (cen, r) = (0.5f64, 0.243975);
    let th_hi = 2.921605f64;
    let x = cen + r * th_hi.cos();
    let y = r * th_hi.sin();
    eprintln!("chord0 left endpoint: x={x:.9} y={y:.9}");
    for (i, a) in d.arcs.iter().enumerate() {
        if x >= a.x_lo - 1e-9 && x <= a.x_hi + 1e-9 {
            let c = &d.circles[a.circle];
            let h2 = c.radius_f * c.radius_f - (x - c.center_f) * (x - c.center_f);
            let h = h2.max(0.0).sqrt();
            eprintln!("  in x-range of arc {i} (circle {}), circle height there={h:.9}", a.circle);
        }
    }
    eprintln!("floor height at x: {:.9}", d.floor_height(x));
}
