//! Command-line frontend: catalog access, Cheeger and Maass runs,
//! deterministic CSV/JSON/SVG artifacts, and the Buser-Cheeger report.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use orbispec::cheeger::{self, chords, optimize, splitting};
use orbispec::groups::catalog;
use orbispec::groups::pullback::PullStep;
use orbispec::groups::{GroupKind, OrbifoldGroup, SymmetryCharacter};
use orbispec::hejhal::{self, reference, HejhalConfig};
use orbispec::{cmforms, specbessel};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "orbispec", version, about = "Cheeger constants and Maass spectra of the catalog orbifolds")]
struct Cli {
    /// Write a run manifest (command, parameters, output hashes) here.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Ignore and do not write the eigenvalue cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Eigenvalue cache directory (overrides ORBISPEC_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fundamental domain inspection and export.
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
    /// Cheeger constant computation and splitting verification.
    Cheeger {
        #[command(subcommand)]
        cmd: CheegerCmd,
    },
    /// Maass cusp form eigenvalue scans.
    Maass {
        #[command(subcommand)]
        cmd: MaassCmd,
    },
    /// Level-17 CM forms: eigenvalue ladder and exact coefficients.
    Cmform(CmformArgs),
    /// Cross-module comparison reports.
    Report {
        #[command(subcommand)]
        cmd: ReportCmd,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Print signature, area, and domain statistics of a catalog group.
    Info {
        #[arg(long)]
        group: String,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Export the Ford domain as SVG (one path per side).
    ExportSvg {
        #[arg(long)]
        group: String,
        #[arg(long)]
        out: PathBuf,
        /// Overlay the axis of a matrix "a,b,c,d" (repeatable).
        #[arg(long = "axis")]
        axes: Vec<String>,
    },
}

#[derive(Subcommand)]
enum CheegerCmd {
    /// Run the full deepening search for the Cheeger constant.
    Run {
        #[arg(long)]
        group: String,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check a candidate splitting given as generator words.
    Verify {
        #[arg(long)]
        group: String,
        /// JSON file {"words": [["t1","c0",...], ...]}: "tk" is the
        /// translation by k, "ci" the i-th circle generator.
        #[arg(long)]
        splitting: PathBuf,
    },
}

#[derive(Args)]
struct MaassWindow {
    #[arg(long)]
    level: u64,
    /// Symmetry class: ++, +-, -+ or --.
    #[arg(long, allow_hyphen_values = true)]
    class: String,
    #[arg(long, default_value_t = 0.0)]
    lambda_min: f64,
    #[arg(long)]
    lambda_max: f64,
}

#[derive(Subcommand)]
enum MaassCmd {
    /// Scan a window for eigenvalues of one symmetry class.
    Scan {
        #[command(flatten)]
        window: MaassWindow,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Refine a single eigenvalue near a given value.
    Refine {
        #[arg(long)]
        level: u64,
        #[arg(long, allow_hyphen_values = true)]
        class: String,
        #[arg(long)]
        lambda: f64,
    },
    /// Four-class eigenvalue table up to a cutoff (one column per class).
    Table {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        lambda_max: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CmformArgs {
    /// Ladder index; k = 0 is the base form with exact coefficients.
    #[arg(long, default_value_t = 0)]
    k: i64,
    /// Number of coefficients to emit for k = 0.
    #[arg(long, default_value_t = 30)]
    coeffs: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ReportCmd {
    /// Compare h^2/4 <= lambda_1 <= 2h + 10h^2 across surfaces.
    BuserCheeger {
        /// Restrict to these surfaces (repeatable; default: whole catalog).
        #[arg(long = "surface")]
        surfaces: Vec<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Failure modes with their process exit codes.
enum CliError {
    /// Invalid level, class, or input file: exit 2.
    Invalid(String),
    /// A computation cap was exceeded: exit 3.
    Caps(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Other(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let argv: Vec<String> = std::env::args().collect();
    let mut outputs: Vec<PathBuf> = Vec::new();
    let result = run(&cli, &mut outputs);
    let code = match &result {
        Ok(()) => 0u8,
        Err(CliError::Invalid(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(CliError::Caps(m)) => {
            eprintln!("error: computation cap exceeded: {m} (partial artifacts, if any, are unverified)");
            3
        }
        Err(CliError::Other(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    if let Some(path) = &cli.manifest {
        if let Err(e) = write_manifest(path, &argv, &outputs, started) {
            eprintln!("error: failed to write manifest: {e:#}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code)
}

#[derive(Serialize)]
struct ManifestOutput {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    parameters: Vec<String>,
    source: String,
    outputs: Vec<ManifestOutput>,
    version: String,
    wall_time_ms: u128,
}

fn write_manifest(
    path: &Path,
    argv: &[String],
    outputs: &[PathBuf],
    started: Instant,
) -> anyhow::Result<()> {
    let mut outs = Vec::new();
    for p in outputs {
        let data = std::fs::read(p).with_context(|| format!("reading {}", p.display()))?;
        outs.push(ManifestOutput {
            path: p.display().to_string(),
            sha256: hex::encode(Sha256::digest(&data)),
        });
    }
    let manifest = RunManifest {
        command: argv.first().cloned().unwrap_or_default(),
        parameters: argv.iter().skip(1).cloned().collect(),
        source: "catalog".into(),
        outputs: outs,
        version: env!("CARGO_PKG_VERSION").into(),
        wall_time_ms: started.elapsed().as_millis(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

fn run(cli: &Cli, outputs: &mut Vec<PathBuf>) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Group { cmd } => match cmd {
            GroupCmd::Info { group, json } => group_info(group, json.as_deref(), outputs),
            GroupCmd::ExportSvg { group, out, axes } => export_svg(group, out, axes, outputs),
        },
        Cmd::Cheeger { cmd } => match cmd {
            CheegerCmd::Run { group, json, csv } => {
                cheeger_run_cmd(group, json.as_deref(), csv.as_deref(), outputs)
            }
            CheegerCmd::Verify { group, splitting } => cheeger_verify_cmd(group, splitting),
        },
        Cmd::Maass { cmd } => match cmd {
            MaassCmd::Scan { window, csv, json } => {
                maass_scan_cmd(cli, window, csv.as_deref(), json.as_deref(), outputs)
            }
            MaassCmd::Refine { level, class, lambda } => {
                maass_refine_cmd(*level, class, *lambda)
            }
            MaassCmd::Table { level, lambda_max, csv } => {
                maass_table_cmd(cli, *level, *lambda_max, csv.as_deref(), outputs)
            }
        },
        Cmd::Cmform(args) => cmform_cmd(args, outputs),
        Cmd::Report { cmd } => match cmd {
            ReportCmd::BuserCheeger { surfaces, csv } => {
                buser_cheeger_cmd(surfaces, csv.as_deref(), outputs)
            }
        },
    }
}

fn lookup_group(spec: &str) -> Result<OrbifoldGroup, CliError> {
    let name = spec.strip_prefix("catalog:").unwrap_or(spec);
    catalog::lookup(name).map_err(|e| CliError::Invalid(format!("group {spec}: {e}")))
}

fn parse_class(s: &str) -> Result<SymmetryCharacter, CliError> {
    SymmetryCharacter::parse(s)
        .ok_or_else(|| CliError::Invalid(format!("class {s}: expected ++, +-, -+ or --")))
}

fn catalog_level(level: u64) -> Result<(), CliError> {
    if catalog::is_catalog_level(level) {
        Ok(())
    } else {
        Err(CliError::Invalid(format!("level {level} is not in the catalog")))
    }
}

fn kind_label(kind: GroupKind) -> &'static str {
    match kind {
        GroupKind::Normalizer => "normalizer",
        GroupKind::IndexTwoSubgroup => "index-two-subgroup",
        GroupKind::Custom => "custom",
    }
}

fn write_output(path: &Path, text: &str, outputs: &mut Vec<PathBuf>) -> Result<(), CliError> {
    std::fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::from)?;
    outputs.push(path.to_path_buf());
    Ok(())
}

// ---------------------------------------------------------------- group

fn group_info(
    spec: &str,
    json: Option<&Path>,
    outputs: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let g = lookup_group(spec)?;
    let d = &g.domain;
    println!("group        {spec}");
    println!("level        {}", g.level);
    println!("kind         {}", kind_label(g.kind));
    println!("congruence   {}", g.congruence);
    println!("area         {:.6} ({:.6} pi)", d.area, d.area / std::f64::consts::PI);
    println!(
        "signature    genus {}, cusps {}, cone orders {:?}",
        d.signature.genus, d.signature.cusps, d.signature.cone_orders
    );
    println!("sides        {}", d.sides.len());
    println!("vertices     {}", d.vertices.len());
    println!("generators   {}", d.generators.len());
    println!("floor y0     {:.6}", d.y0);
    if let Some(path) = json {
        #[derive(Serialize)]
        struct Info<'a> {
            level: u64,
            kind: &'a str,
            congruence: bool,
            area: f64,
            signature: &'a orbispec::groups::Signature,
            sides: usize,
            vertices: usize,
            generators: usize,
            y0: f64,
        }
        let info = Info {
            level: g.level,
            kind: kind_label(g.kind),
            congruence: g.congruence,
            area: d.area,
            signature: &d.signature,
            sides: d.sides.len(),
            vertices: d.vertices.len(),
            generators: d.generators.len(),
            y0: d.y0,
        };
        let text = serde_json::to_string_pretty(&info).map_err(anyhow::Error::from)?;
        write_output(path, &text, outputs)?;
    }
    Ok(())
}

/// Maps half-plane coordinates to the SVG viewport.
fn svg_xy(x: f64, y: f64) -> (f64, f64) {
    (400.0 + 600.0 * x, 560.0 - 500.0 * y)
}

fn export_svg(
    spec: &str,
    out: &Path,
    axes: &[String],
    outputs: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    use orbispec::groups::SideShape;
    let g = lookup_group(spec)?;
    let d = &g.domain;
    let y_top = 1.0f64;
    let mut svg = String::new();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">"
    )
    .unwrap();
    writeln!(svg, "<!-- Ford domain of {spec} -->").unwrap();
    for side in &d.sides {
        match &side.shape {
            SideShape::LeftVertical | SideShape::RightVertical => {
                let x = if matches!(side.shape, SideShape::LeftVertical) { -0.5 } else { 0.5 };
                let y_lo = d.floor_height(x);
                let (x1, y1) = svg_xy(x, y_top);
                let (x2, y2) = svg_xy(x, y_lo);
                writeln!(
                    svg,
                    "<path class=\"side\" d=\"M {x1:.3} {y1:.3} L {x2:.3} {y2:.3}\" stroke=\"black\" fill=\"none\"/>"
                )
                .unwrap();
            }
            SideShape::Arc { circle, x_lo, x_hi } => {
                let c = &d.circles[*circle];
                let y_at = |x: f64| {
                    let dx: f64 = x - c.center_f;
                    (c.radius_f * c.radius_f - dx * dx).max(0.0).sqrt()
                };
                let (x1, y1) = svg_xy(*x_lo, y_at(*x_lo));
                let (x2, y2) = svg_xy(*x_hi, y_at(*x_hi));
                let r = 600.0 * c.radius_f;
                writeln!(
                    svg,
                    "<path class=\"side\" d=\"M {x1:.3} {y1:.3} A {r:.3} {r:.3} 0 0 1 {x2:.3} {y2:.3}\" stroke=\"black\" fill=\"none\"/>"
                )
                .unwrap();
            }
        }
    }
    for axis in axes {
        let nums: Vec<f64> = axis
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Invalid(format!("axis {axis}: expected a,b,c,d")))?;
        if nums.len() != 4 {
            return Err(CliError::Invalid(format!("axis {axis}: expected 4 entries")));
        }
        let m = [[nums[0], nums[1]], [nums[2], nums[3]]];
        let (c, r) = chords::axis_of(&m)
            .map_err(|e| CliError::Invalid(format!("axis {axis}: {e}")))?;
        let (x1, y1) = svg_xy(c - r, 0.0);
        let (x2, y2) = svg_xy(c + r, 0.0);
        let rs = 600.0 * r;
        writeln!(
            svg,
            "<path class=\"axis\" d=\"M {x1:.3} {y1:.3} A {rs:.3} {rs:.3} 0 0 0 {x2:.3} {y2:.3}\" stroke=\"red\" fill=\"none\"/>"
        )
        .unwrap();
    }
    writeln!(svg, "</svg>").unwrap();
    write_output(out, &svg, outputs)?;
    println!(
        "wrote {} ({} side paths, {} axis overlays)",
        out.display(),
        d.sides.len(),
        axes.len()
    );
    Ok(())
}

// -------------------------------------------------------------- cheeger

#[derive(Serialize)]
struct CheegerJson<'a> {
    level: u64,
    group_kind: &'a str,
    h: f64,
    realizing_elements: Vec<&'a orbispec::qfield::ExactMatrix>,
    s_star: Option<f64>,
    areas: Option<(f64, f64)>,
    audit: &'a [cheeger::AuditEntry],
}

fn map_cheeger_err(e: cheeger::CheegerError) -> CliError {
    let msg = e.to_string();
    if msg.contains("could improve") || msg.contains("deepening failed") {
        CliError::Caps(msg)
    } else {
        CliError::Other(anyhow::anyhow!(msg))
    }
}

fn cheeger_run_cmd(
    spec: &str,
    json: Option<&Path>,
    csv: Option<&Path>,
    outputs: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let g = lookup_group(spec)?;
    let report = cheeger::cheeger_run(&g.domain, spec).map_err(map_cheeger_err)?;
    println!("group    {spec}");
    println!("area     {:.6}", report.area);
    println!("h        {:.6}", report.h);
    if let Some(best) = &report.best {
        println!("traces   {}", best.traces.join(" + "));
        println!("lengths  geodesic {:.6}, boundary {:.6}", best.geodesic_length, best.boundary_length);
        println!("areas    {:.6} / {:.6}", best.area_small, best.area_large);
        println!("s*       {:.6} (d_max {:.6})", best.s_star, best.d_max);
    } else {
        println!("realized by the horocycle baseline (no splitting beats ratio 1)");
    }
    for a in &report.audit {
        println!("audit    trace {:<12} len {:>8.6}  {:<16} {}", a.trace, a.length, a.kind, a.decision);
    }
    if let Some(path) = json {
        let doc = CheegerJson {
            level: report.level,
            group_kind: kind_label(g.kind),
            h: report.h,
            realizing_elements: report
                .best
                .as_ref()
                .map(|b| b.elements.iter().collect())
                .unwrap_or_default(),
            s_star: report.best.as_ref().map(|b| b.s_star),
            areas: report.best.as_ref().map(|b| (b.area_small, b.area_large)),
            audit: &report.audit,
        };
        let text = serde_json::to_string_pretty(&doc).map_err(anyhow::Error::from)?;
        write_output(path, &text, outputs)?;
    }
    if let Some(path) = csv {
        let name = spec.strip_prefix("catalog:").unwrap_or(spec);
        let (h_m, h_n) = match g.kind {
            GroupKind::IndexTwoSubgroup => (String::new(), format!("{:.6}", report.h)),
            _ => (format!("{:.6}", report.h), String::new()),
        };
        let text = format!("level,group,h_M,h_N\n{},{},{},{}\n", report.level, name, h_m, h_n);
        write_output(path, &text, outputs)?;
    }
    Ok(())
}

fn parse_word(tokens: &[String]) -> Result<Vec<PullStep>, CliError> {
    let mut steps = Vec::new();
    for t in tokens {
        let step = if let Some(k) = t.strip_prefix('t') {
            k.parse::<i64>().ok().map(PullStep::Translate)
        } else if let Some(i) = t.strip_prefix('c') {
            i.parse::<usize>().ok().map(PullStep::Circle)
        } else {
            None
        };
        steps.push(step.ok_or_else(|| {
            CliError::Invalid(format!("word token {t}: expected t<k> or c<i>"))
        })?);
    }
    Ok(steps)
}

fn cheeger_verify_cmd(spec: &str, splitting: &Path) -> Result<(), CliError> {
    #[derive(serde::Deserialize)]
    struct Input {
        words: Vec<Vec<String>>,
    }
    let g = lookup_group(spec)?;
    let d = &g.domain;
    let text = std::fs::read_to_string(splitting)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", splitting.display())))?;
    let input: Input = serde_json::from_str(&text)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", splitting.display())))?;
    if input.words.is_empty() {
        return Err(CliError::Invalid("no words given".into()));
    }
    let ctx = d.pull_ctx(None);
    let mut all_chords: Vec<chords::Chord> = Vec::new();
    let mut total_len = 0.0;
    for (i, tokens) in input.words.iter().enumerate() {
        let word = parse_word(tokens)?;
        let m = orbispec::groups::word_to_matrix(d, &word)
            .map_err(|e| CliError::Invalid(format!("word {i}: {e}")))?;
        let f = m.to_f64();
        let tr = (f[0][0] + f[1][1]).abs();
        if tr <= 2.0 + 1e-9 {
            return Err(CliError::Invalid(format!("word {i} is not hyperbolic (|trace| = {tr:.6})")));
        }
        let ell = 2.0 * (tr / 2.0).acosh();
        let geom = chords::chord_walk(d, &ctx, &f, ell)
            .map_err(|e| CliError::Invalid(format!("word {i}: {e}")))?;
        if geom.folded {
            println!("word {i}: folded through cone points; bounds zero area");
            return Ok(());
        }
        if geom.boundary {
            println!("word {i}: runs along the tessellation skeleton; cannot separate");
            return Ok(());
        }
        total_len += ell;
        all_chords.extend(geom.chords);
    }
    for i in 0..all_chords.len() {
        for j in i + 1..all_chords.len() {
            if chords::geodesics_cross(&all_chords[i].geodesic(), &all_chords[j].geodesic()) {
                println!("not simple: components {i} and {j} cross");
                return Ok(());
            }
        }
    }
    let refs: Vec<&chords::Chord> = all_chords.iter().collect();
    let split = splitting::splitting_test(d, &refs).map_err(map_cheeger_err)?;
    match split {
        None => println!("embedded but non-separating"),
        Some(s) => {
            let d_max = cheeger::embeddedness_bound(d, &refs);
            let (s_star, h0) =
                optimize::equidistant_optimize(total_len, s.area_small, s.area_large, d_max);
            println!("separating: areas {:.6} / {:.6}", s.area_small, s.area_large);
            println!("length   {:.6}", total_len);
            println!("s*       {:.6} (d_max {:.6})", s_star, d_max);
            println!("ratio    {:.6}", h0);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- maass

fn cache_dir(cli: &Cli) -> Option<PathBuf> {
    if cli.no_cache {
        return None;
    }
    cli.cache_dir
        .clone()
        .or_else(|| std::env::var_os("ORBISPEC_CACHE_DIR").map(PathBuf::from))
}

fn check_spectral_cap(lambda_max: f64) -> Result<(), CliError> {
    let r_cap = specbessel::MAX_SPECTRAL_R;
    let cap = 0.25 + r_cap * r_cap;
    if lambda_max > cap {
        return Err(CliError::Caps(format!(
            "lambda_max {lambda_max} needs spectral parameter above the Bessel cap r = {r_cap} (lambda <= {cap})"
        )));
    }
    Ok(())
}

fn map_hejhal_err(e: hejhal::HejhalError) -> CliError {
    match &e {
        hejhal::HejhalError::NeedNormalizer | hejhal::HejhalError::BadWindow(_, _) => {
            CliError::Invalid(e.to_string())
        }
        hejhal::HejhalError::Bessel(_) => CliError::Caps(e.to_string()),
        _ => CliError::Other(anyhow::anyhow!(e.to_string())),
    }
}

/// The spectrum of each quotient lives on the normalizer domain; scans
/// take the level, not an M/N name.
fn scan_class(
    cli: &Cli,
    level: u64,
    class: SymmetryCharacter,
    lo: f64,
    hi: f64,
) -> Result<Vec<hejhal::Eigenvalue>, CliError> {
    catalog_level(level)?;
    check_spectral_cap(hi)?;
    let g = catalog::lookup(&format!("M{level}"))
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let cfg = HejhalConfig::default();
    let dir = cache_dir(cli);
    hejhal::scan_cached(&g, class, lo, hi, &cfg, dir.as_deref()).map_err(map_hejhal_err)
}

fn maass_scan_cmd(
    cli: &Cli,
    w: &MaassWindow,
    csv: Option<&Path>,
    json: Option<&Path>,
    outputs: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let class = parse_class(&w.class)?;
    let evs = scan_class(cli, w.level, class, w.lambda_min, w.lambda_max)?;
    println!(
        "level {} class {} window ({}, {}]: {} eigenvalue(s)",
        w.level,
        class.label(),
        w.lambda_min,
        w.lambda_max,
        evs.len()
    );
    for e in &evs {
        println!("{:.9}  (mismatch {:.1e})", e.lambda, e.mismatch);
    }
    if let Some(path) = csv {
        let mut text = String::from("level,class,lambda,mismatch\n");
        for e in &evs {
            writeln!(text, "{},{},{:.9},{:.3e}", w.level, class.label(), e.lambda, e.mismatch)
                .unwrap();
        }
        write_output(path, &text, outputs)?;
    }
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&evs).map_err(anyhow::Error::from)?;
        write_output(path, &text, outputs)?;
    }
    Ok(())
}

fn maass_refine_cmd(level: u64, class: &str, lambda: f64) -> Result<(), CliError> {
    catalog_level(level)?;
    let class = parse_class(class)?;
    check_spectral_cap(lambda + 0.1)?;
    let g = catalog::lookup(&format!("M{level}"))
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let cfg = HejhalConfig::default();
    match hejhal::refine(&g, class, lambda, &cfg).map_err(map_hejhal_err)? {
        Some(e) => {
            println!("{:.9}  (mismatch {:.1e})", e.lambda, e.mismatch);
            for (i, c) in e.coefficients.iter().enumerate().take(6) {
                println!("a_{i} = {c:.9}");
            }
            Ok(())
        }
        None => {
            println!("no eigenvalue certified near {lambda}");
            Ok(())
        }
    }
}

fn maass_table_cmd(
    cli: &Cli,
    level: u64,
    lambda_max: f64,
    csv: Option<&Path>,
    outputs: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for class in SymmetryCharacter::ALL {
        let evs = scan_class(cli, level, class, 0.0, lambda_max)?;
        columns.push(evs.iter().map(|e| e.lambda).collect());
    }
    let rows = columns.iter().map(Vec::len).max().unwrap_or(0);
    let labels: Vec<&str> = SymmetryCharacter::ALL.iter().map(|c| c.label()).collect();
    println!("level {level} eigenvalues up to {lambda_max} (one column per class)");
    println!("{:>14} {:>14} {:>14} {:>14}", labels[0], labels[1], labels[2], labels[3]);
    let mut text = format!("index,{},{},{},{}\n", labels[0], labels[1], labels[2], labels[3]);
    for r in 0..rows {
        let cell = |c: &Vec<f64>| c.get(r).map(|l| format!("{l:.9}")).unwrap_or_default();
        println!(
            "{:>14} {:>14} {:>14} {:>14}",
            cell(&columns[0]),
            cell(&columns[1]),
            cell(&columns[2]),
            cell(&columns[3])
        );
        writeln!(
            text,
            "{},{},{},{},{}",
            r + 1,
            cell(&columns[0]),
            cell(&columns[1]),
            cell(&columns[2]),
            cell(&columns[3])
        )
        .unwrap();
    }
    if let Some(path) = csv {
        write_output(path, &text, outputs)?;
    }
    Ok(())
}

// --------------------------------------------------------------- cmform

fn cmform_cmd(args: &CmformArgs, outputs: &mut Vec<PathBuf>) -> Result<(), CliError> {
    if args.coeffs == 0 {
        return Err(CliError::Invalid("--coeffs must be at least 1".into()));
    }
    let (point, table) = cmforms::cm_form(args.k, args.coeffs);
    println!("level {} CM form, ladder index k = {}", cmforms::CM_LEVEL, args.k);
    println!("lambda = {:.9}", point.lambda);
    if let Some(t) = &table {
        println!("first coefficients (exact integers):");
        for n in 1..=args.coeffs.min(12) {
            println!("a({n}) = {}", t.a(n));
        }
        if let Some(path) = args.csv.as_deref() {
            let mut text = String::from("n,a_n\n");
            for n in 1..=args.coeffs {
                writeln!(text, "{n},{}", t.a(n)).unwrap();
            }
            write_output(path, &text, outputs)?;
        }
    }
    Ok(())
}

// --------------------------------------------------------------- report

fn buser_cheeger_cmd(
    surfaces: &[String],
    csv: Option<&Path>,
    outputs: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    let names: Vec<String> = if surfaces.is_empty() {
        catalog::LEVELS
            .iter()
            .flat_map(|n| [format!("M{n}"), format!("N{n}")])
            .collect()
    } else {
        surfaces.to_vec()
    };
    let mut rows: Vec<reference::BuserRow> = Vec::new();
    for name in &names {
        let g = lookup_group(name)?;
        let lambda1 = reference::lambda1(g.level, g.kind)
            .ok_or_else(|| CliError::Invalid(format!("no spectral data for {name}")))?;
        let report = cheeger::cheeger_run(&g.domain, name).map_err(map_cheeger_err)?;
        rows.push(reference::buser_row(name, report.h, lambda1));
    }
    println!(
        "{:<6} {:>9} {:>10} {:>10} {:>11} {:>9} {:>9}",
        "surface", "h", "lambda_1", "h^2/4", "2h+10h^2", "lower_ok", "buser"
    );
    let mut text =
        String::from("surface,h,lambda_1,cheeger_lower,buser_upper,lower_ok,buser_violated\n");
    for r in &rows {
        println!(
            "{:<6} {:>9.6} {:>10.5} {:>10.6} {:>11.6} {:>9} {:>9}",
            r.surface,
            r.h,
            r.lambda1,
            r.cheeger_lower,
            r.buser_upper,
            r.lower_ok,
            if r.buser_violated { "VIOLATED" } else { "holds" }
        );
        writeln!(
            text,
            "{},{:.6},{:.9},{:.6},{:.6},{},{}",
            r.surface, r.h, r.lambda1, r.cheeger_lower, r.buser_upper, r.lower_ok, r.buser_violated
        )
        .unwrap();
    }
    if let Some(path) = csv {
        write_output(path, &text, outputs)?;
    }
    Ok(())
}
