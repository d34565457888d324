use orbispec::groups::catalog::lookup;
use orbispec::groups::SymmetryCharacter;
use orbispec::hejhal::{scan, HejhalConfig};
use std::time::Instant;

fn main() {
    let cfg = HejhalConfig::default();
    let cases: Vec<(&str, &str, f64, f64)> = vec![
        ("M11", "+-", 0.0, 1.0),
        ("M17", "+-", 0.1, 0.5),
        ("M55", "+-", 0.0, 1.0),
        ("M19", "+-", 0.0, 1.0),
        ("M19", "++", 0.5, 9.0),
        ("M19", "-+", 4.0, 12.0),
        ("M19", "--", 4.0, 12.0),
    ];
    for (name, cls, lo, hi) in cases {
        let g = lookup(name).unwrap();
        let class = SymmetryCharacter::parse(cls).unwrap();
        let t = Instant::now();
        match scan(&g, class, lo, hi, &cfg) {
            Ok(evs) => {
                let ls: Vec<String> =
                    evs.iter().map(|e| format!("{:.9} (mm {:.1e})", e.lambda, e.mismatch)).collect();
                println!("{name} ({cls}) [{lo},{hi}]: {} [{:.1}s]", ls.join(", "), t.elapsed().as_secs_f64());
            }
            Err(e) => println!("{name} ({cls}) [{lo},{hi}]: ERROR {e} [{:.1}s]", t.elapsed().as_secs_f64()),
        }
    }
}
