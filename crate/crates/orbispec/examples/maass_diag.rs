use orbispec::groups::catalog::lookup;
use orbispec::groups::SymmetryCharacter;
use orbispec::hejhal::{mismatch_profile, HejhalConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let name = &args[1];
    let cls = &args[2];
    let lo: f64 = args[3].parse().unwrap();
    let hi: f64 = args[4].parse().unwrap();
    let n: usize = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(41);
    let g = lookup(name).unwrap();
    let class = SymmetryCharacter::parse(cls).unwrap();
    let mut cfg = HejhalConfig::default();
    if let Some(eps) = args.get(6).and_then(|s| s.parse().ok()) {
        cfg.eps = eps;
    }
    let prof = mismatch_profile(&g, class, lo, hi, n, &cfg).unwrap();
    for p in prof {
        println!(
            "lambda={:.6} gap={:+.6e} mismatch={:.6e} a0={:+.6e}",
            p.lambda, p.gap, p.mismatch, p.a0
        );
    }
}
