use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use sectoral::analyze::{analyze, AnalyzeError, SAMPLE_COUNT, SAMPLE_HALF_WIDTH};
use sectoral::criterion::{schatten_integral_probe, CriterionError};
use sectoral::discretize::{assemble_p, make_grid, AssembledOperator, DiscretizeError};
use sectoral::model::{dilate, optimal_alpha, validate_hypotheses, Family, ModelError, OperatorSpec, SampleBox};
use sectoral::output::{
    eigenvalues_csv, field_of_values_csv, pseudospectrum_csv, singular_values_csv, svg_contour, svg_polygon,
    svg_scatter, Manifest,
};
use sectoral::spectra::{
    decay_fit, eigenvalues, field_of_values_boundary, mark_converged, pseudospectrum, resolvent_singular_values,
    Rectangle, SpectraError,
};
use sectoral::verify::{run_all, run_criterion, Shared, VerifyReport, DEFAULT_SEED};

type C64 = Complex64;

#[derive(Parser)]
#[command(
    name = "sectoral",
    version,
    about = "Schatten-class and completeness verdicts for sectorial magnetic Schrodinger operators"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hypotheses, threshold, sector and completeness verdict.
    Analyze(Common),
    /// All eigenvalues of the discretized operator.
    Spectrum(Common),
    /// Resolvent singular values and their decay exponent.
    Svd(Common),
    /// Field-of-values boundary.
    Numrange(Common),
    /// Smallest singular value of `P - z` on a rectangle.
    Pseudo(Common),
    /// Complex dilation of the spec; defaults to the optimal angle for the dilated model.
    Dilate {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
    },
    /// The acceptance suite.
    Verify {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated criterion numbers; all when omitted.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Half-width of the computational box.
    #[arg(long = "box")]
    half_width: Option<f64>,
    /// Grid points per axis.
    #[arg(long)]
    n: Option<usize>,
    /// Resolvent shift as `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    shift: Option<String>,
    /// Exponent for the quadrature probe.
    #[arg(long)]
    p: Option<f64>,
    /// Number of field-of-values angles.
    #[arg(long)]
    angles: Option<usize>,
    /// Pseudospectrum nodes per side.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    plot: bool,
    /// Also discretize during `analyze`.
    #[arg(long)]
    empirical: bool,
}

/// Bad input: exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A computation stopped early; partial files are already in the manifest.
#[derive(Debug)]
struct Partial(String);

impl std::fmt::Display for Partial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Partial {}

struct AcceptanceFailed;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Run settings after flags, the spec file's `run` object and defaults.
#[derive(Debug, Clone)]
struct Config {
    half_width: f64,
    n: usize,
    shift: Option<C64>,
    p: Option<f64>,
    angles: usize,
    grid: usize,
    seed: u64,
}

impl Config {
    fn to_json(&self, lambda_shift: C64) -> Value {
        let s = self.shift.unwrap_or(lambda_shift);
        json!({
            "box": self.half_width,
            "n": self.n,
            "shift": [s.re, s.im],
            "p": self.p,
            "angles": self.angles,
            "grid": self.grid,
            "seed": self.seed,
        })
    }
}

fn parse_shift(s: &str) -> Result<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| {
        t.parse::<f64>()
            .map_err(|_| usage(format!("bad shift component {t:?}")))
    };
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(usage(format!("shift must be re,im; got {s:?}"))),
    }
}

fn load(c: &Common) -> Result<(OperatorSpec<f64>, Config)> {
    let text = fs::read_to_string(&c.spec).with_context(|| format!("reading {}", c.spec.display()))?;
    let mut value: Value = serde_json::from_str(&text).map_err(|e| ModelError::Json(e.to_string()))?;
    let run = value
        .as_object_mut()
        .and_then(|o| o.remove("run"))
        .unwrap_or(Value::Null);
    let spec = OperatorSpec::<f64>::from_json_str(&value.to_string())?;

    let field = |k: &str| run.get(k).filter(|v| !v.is_null());
    let as_f64 = |k: &str| -> Result<Option<f64>> {
        field(k)
            .map(|v| v.as_f64().ok_or_else(|| usage(format!("run.{k} must be a number"))))
            .transpose()
    };
    let as_usize = |k: &str| -> Result<Option<usize>> {
        field(k)
            .map(|v| {
                v.as_u64()
                    .map(|x| x as usize)
                    .ok_or_else(|| usage(format!("run.{k} must be a non-negative integer")))
            })
            .transpose()
    };
    let file_shift = match field("shift") {
        None => None,
        Some(Value::Array(a)) if a.len() == 2 => match (a[0].as_f64(), a[1].as_f64()) {
            (Some(re), Some(im)) => Some(C64::new(re, im)),
            _ => return Err(usage("run.shift must be [re, im]")),
        },
        Some(Value::String(s)) => Some(parse_shift(s)?),
        Some(_) => return Err(usage("run.shift must be [re, im]")),
    };

    let one_d = spec.dimension() == 1;
    let cfg = Config {
        half_width: c
            .half_width
            .or(as_f64("box")?)
            .unwrap_or(if one_d { 10.0 } else { 6.0 }),
        n: c.n.or(as_usize("n")?).unwrap_or(if one_d { 400 } else { 24 }),
        shift: c.shift.as_deref().map(parse_shift).transpose()?.or(file_shift),
        p: c.p.or(as_f64("p")?),
        angles: c.angles.or(as_usize("angles")?).unwrap_or(128),
        grid: c.grid.or(as_usize("grid")?).unwrap_or(40),
        seed: c.seed.or(field("seed").and_then(Value::as_u64)).unwrap_or(DEFAULT_SEED),
    };
    if !(cfg.half_width.is_finite() && cfg.half_width > 0.0) {
        return Err(usage(format!("box must be positive, got {}", cfg.half_width)));
    }
    if cfg.n < 3 {
        return Err(usage(format!("n must be at least 3, got {}", cfg.n)));
    }
    if cfg.angles < 64 {
        return Err(usage(format!("at least 64 angles are needed, got {}", cfg.angles)));
    }
    if !(2..=sectoral::spectra::MAX_PSEUDO_NODES).contains(&cfg.grid) {
        return Err(usage(format!(
            "grid must lie in 2..={}, got {}",
            sectoral::spectra::MAX_PSEUDO_NODES,
            cfg.grid
        )));
    }
    if let Some(s) = cfg.shift {
        if !(s.re.is_finite() && s.im.is_finite()) {
            return Err(usage("shift must be finite"));
        }
    }
    if let Some(p) = cfg.p {
        if !(p.is_finite() && p > spec.dimension() as f64 / 2.0) {
            return Err(usage(format!("p must exceed d/2, got {p}")));
        }
    }
    Ok((spec, cfg))
}

/// `-(1 + lambda*)`, the shift used when none is given.
fn default_shift(spec: &OperatorSpec<f64>) -> Result<C64> {
    let h = validate_hypotheses(spec, &SampleBox::for_spec(spec, SAMPLE_HALF_WIDTH), SAMPLE_COUNT)?;
    Ok(C64::new(-(1.0 + h.lambda_star_estimate.max(0.0)), 0.0))
}

fn out_dir(p: &Path) -> Result<&Path> {
    fs::create_dir_all(p).with_context(|| format!("creating {}", p.display()))?;
    Ok(p)
}

fn manifest_for(spec: &OperatorSpec<f64>, cfg: &Config, command: &str) -> Result<Manifest> {
    let mut config = cfg.to_json(default_shift(spec)?);
    config["command"] = json!(command);
    Ok(Manifest::new(config, Some(spec.spec_hash())))
}

fn operator(spec: &OperatorSpec<f64>, cfg: &Config, n: usize) -> Result<AssembledOperator<f64>> {
    let grid = make_grid(spec, cfg.half_width, n)?;
    Ok(assemble_p(spec, &grid)?)
}

fn json_bytes<T: serde::Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(v)?;
    b.push(b'\n');
    Ok(b)
}

fn cmd_analyze(c: &Common) -> Result<()> {
    let (spec, cfg) = load(c)?;
    let dir = out_dir(&c.out)?;
    let mut m = manifest_for(&spec, &cfg, "analyze")?;
    let report = analyze(&spec)?;
    let mut extra = serde_json::Map::new();
    if let Some(p) = cfg.p {
        let probe = schatten_integral_probe(&spec, p, 16)?;
        extra.insert("probe".into(), serde_json::to_value(&probe)?);
    }
    let mut doc = serde_json::to_value(&report)?;
    if let Value::Object(o) = &mut doc {
        o.extend(extra);
    }
    m.emit(dir, "analysis.json", "analysis", &json_bytes(&doc)?, false)?;
    println!(
        "p_crit = {}  sector = [{:.6}, {:.6}]  verdict = {}",
        report.p_crit,
        report.sector.theta_min,
        report.sector.theta_max,
        serde_json::to_value(report.verdict)?.as_str().unwrap_or("?")
    );
    if c.empirical {
        let op = operator(&spec, &cfg, cfg.n)?;
        let shift = cfg.shift.unwrap_or(default_shift(&spec)?);
        let mu = resolvent_singular_values(&op, shift)?;
        let mut csv = Vec::new();
        singular_values_csv(&mu, &mut csv)?;
        m.emit(dir, "singular_values.csv", "singular_values", &csv, false)?;
        match decay_fit(&mu, None) {
            Ok(fit) => {
                println!("empirical p = {:.4}", fit.p_estimate);
                m.emit(dir, "decay.json", "decay_fit", &json_bytes(&fit)?, false)?;
            }
            Err(e) => eprintln!("decay fit skipped: {e}"),
        }
    }
    m.write(dir)?;
    Ok(())
}

fn cmd_spectrum(c: &Common) -> Result<()> {
    let (spec, cfg) = load(c)?;
    let dir = out_dir(&c.out)?;
    let mut m = manifest_for(&spec, &cfg, "spectrum")?;
    let op = operator(&spec, &cfg, cfg.n)?;
    let mut r = match eigenvalues(&op) {
        Ok(r) => r,
        Err(SpectraError::EigNoConverge { routine, info, partial }) => {
            let mut csv = b"re,im,converged\n".to_vec();
            for z in &partial {
                csv.extend(format!("{:?},{:?},false\n", z.re, z.im).into_bytes());
            }
            m.emit(dir, "eigenvalues.csv", "eigenvalues", &csv, true)?;
            m.write(dir)?;
            return Err(Partial(format!(
                "{routine} did not converge (info {info}); partial spectrum written"
            ))
            .into());
        }
        Err(e) => return Err(e.into()),
    };
    // agreement with half the resolution marks the trustworthy part
    let coarse_n = (cfg.n / 2).max(3);
    if let Ok(coarse) = operator(&spec, &cfg, coarse_n).and_then(|op| Ok(eigenvalues(&op)?)) {
        mark_converged(&mut r, &coarse, 1e-3);
    }
    let mut csv = Vec::new();
    eigenvalues_csv(&r, &mut csv)?;
    m.emit(dir, "eigenvalues.csv", "eigenvalues", &csv, false)?;
    let summary = json!({
        "dimension": r.eigenvalues.len(),
        "converged": r.converged.iter().filter(|&&c| c).count(),
        "backward_error_bound": r.backward_error_bound,
        "matrix_norm": r.matrix_norm,
        "accepted": r.accepted(),
        "coarse_n": coarse_n,
    });
    m.emit(dir, "spectrum.json", "summary", &json_bytes(&summary)?, false)?;
    if c.plot {
        let pts: Vec<C64> = r
            .eigenvalues
            .iter()
            .zip(&r.converged)
            .filter(|(_, &c)| c)
            .map(|(z, _)| *z)
            .collect();
        m.emit(
            dir,
            "eigenvalues.svg",
            "plot",
            svg_scatter("converged eigenvalues", &pts).as_bytes(),
            false,
        )?;
    }
    m.write(dir)?;
    if let Some(z) = r.eigenvalues.first() {
        println!(
            "lowest eigenvalue {:.8} {:+.8}i; {} of {} converged",
            z.re,
            z.im,
            summary["converged"],
            r.eigenvalues.len()
        );
    }
    Ok(())
}

fn cmd_svd(c: &Common) -> Result<()> {
    let (spec, cfg) = load(c)?;
    let dir = out_dir(&c.out)?;
    let mut m = manifest_for(&spec, &cfg, "svd")?;
    let shift = cfg.shift.unwrap_or(default_shift(&spec)?);
    let mu = resolvent_singular_values(&operator(&spec, &cfg, cfg.n)?, shift)?;
    let mut csv = Vec::new();
    singular_values_csv(&mu, &mut csv)?;
    m.emit(dir, "singular_values.csv", "singular_values", &csv, false)?;
    match decay_fit(&mu, None) {
        Ok(fit) => {
            println!("decay exponent p = {:.4} (slope {:.4})", fit.p_estimate, fit.slope);
            m.emit(dir, "decay.json", "decay_fit", &json_bytes(&fit)?, false)?;
        }
        Err(e) => eprintln!("decay fit skipped: {e}"),
    }
    if c.plot {
        let pts: Vec<C64> = mu
            .iter()
            .enumerate()
            .map(|(k, v)| C64::new(((k + 1) as f64).ln(), v.ln()))
            .collect();
        m.emit(
            dir,
            "singular_values.svg",
            "plot",
            svg_scatter("log mu_n vs log n", &pts).as_bytes(),
            false,
        )?;
    }
    m.write(dir)?;
    Ok(())
}

fn cmd_numrange(c: &Common) -> Result<()> {
    let (spec, cfg) = load(c)?;
    let dir = out_dir(&c.out)?;
    let mut m = manifest_for(&spec, &cfg, "numrange")?;
    let vertex = cfg.shift.unwrap_or(C64::new(0.0, 0.0));
    let f = field_of_values_boundary(&operator(&spec, &cfg, cfg.n)?, cfg.angles, vertex)?;
    let mut csv = Vec::new();
    field_of_values_csv(&f, &mut csv)?;
    m.emit(dir, "field_of_values.csv", "field_of_values", &csv, false)?;
    m.emit(dir, "sector.json", "sector", &json_bytes(&f.sector)?, false)?;
    match &f.sector {
        Some(s) => println!("enclosing sector at {vertex}: [{:.6}, {:.6}]", s.theta_min, s.theta_max),
        None => println!("no enclosing sector at {vertex}"),
    }
    if c.plot {
        m.emit(
            dir,
            "field_of_values.svg",
            "plot",
            svg_polygon("field of values", &f.boundary_points).as_bytes(),
            false,
        )?;
    }
    m.write(dir)?;
    Ok(())
}

fn cmd_pseudo(c: &Common) -> Result<()> {
    let (spec, cfg) = load(c)?;
    let dir = out_dir(&c.out)?;
    let mut m = manifest_for(&spec, &cfg, "pseudo")?;
    let op = operator(&spec, &cfg, cfg.n)?;
    // frame the ten eigenvalues of smallest modulus
    let ev = eigenvalues(&op)?;
    let low = &ev.eigenvalues[..ev.eigenvalues.len().min(10)];
    let (mut x0, mut x1, mut y0, mut y1) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for z in low {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    let pad = 0.25 * (x1 - x0).max(y1 - y0).max(1.0);
    let rect = Rectangle {
        re_min: x0 - pad,
        re_max: x1 + pad,
        im_min: y0 - pad,
        im_max: y1 + pad,
    };
    let g = pseudospectrum(&op, rect, cfg.grid, cfg.grid)?;
    let mut csv = Vec::new();
    pseudospectrum_csv(&g, &mut csv)?;
    m.emit(dir, "pseudospectrum.csv", "pseudospectrum", &csv, false)?;
    if c.plot {
        m.emit(
            dir,
            "pseudospectrum.svg",
            "plot",
            svg_contour("log10 sigma_min(P - z)", &g).as_bytes(),
            false,
        )?;
    }
    m.write(dir)?;
    println!("{} x {} nodes written", cfg.grid, cfg.grid);
    Ok(())
}

fn cmd_dilate(c: &Common, alpha: Option<f64>) -> Result<()> {
    let (spec, cfg) = load(c)?;
    let dir = out_dir(&c.out)?;
    let mut m = manifest_for(&spec, &cfg, "dilate")?;
    let alpha = match (alpha, spec.family()) {
        (Some(a), _) => a,
        (None, Some(&Family::DilatedModel { m, k, alpha })) => optimal_alpha::<f64>(m, k)? - alpha,
        (None, _) => return Err(usage("--alpha is required outside the dilated model")),
    };
    let d = dilate(&spec, alpha)?;
    let mut text = d.to_json_string().into_bytes();
    text.push(b'\n');
    m.config["alpha"] = json!(alpha);
    m.emit(dir, "dilated_spec.json", "spec", &text, false)?;
    m.write(dir)?;
    println!("dilated by alpha = {alpha:.12}; angles {:?}", d.angles());
    Ok(())
}

fn cmd_verify(out: &Path, seed: Option<u64>, criteria: &[u32]) -> Result<std::result::Result<(), AcceptanceFailed>> {
    let dir = out_dir(out)?;
    let seed = seed.unwrap_or(DEFAULT_SEED);
    let print = |c: &sectoral::verify::CriterionOutcome| {
        println!(
            "{} {:02} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.detail
        )
    };
    let report = if criteria.is_empty() {
        run_all(seed, print)
    } else {
        if let Some(bad) = criteria.iter().find(|&&id| !(1..=10).contains(&id)) {
            return Err(usage(format!("no criterion {bad}")));
        }
        let shared = Shared::default();
        let list: Vec<_> = criteria
            .iter()
            .map(|&id| {
                let c = run_criterion(id, seed, &shared);
                print(&c);
                c
            })
            .collect();
        let passed = list.iter().filter(|c| c.passed).count();
        VerifyReport {
            seed,
            passed,
            failed: list.len() - passed,
            criteria: list,
        }
    };
    let mut m = Manifest::new(json!({ "command": "verify", "seed": seed, "criteria": criteria }), None);
    m.emit(dir, "report.json", "report", report.to_json().as_bytes(), false)?;
    m.emit(dir, "junit.xml", "junit", report.to_junit().as_bytes(), false)?;
    m.write(dir)?;
    println!("{} passed, {} failed", report.passed, report.failed);
    Ok(if report.all_passed() {
        Ok(())
    } else {
        Err(AcceptanceFailed)
    })
}

/// 2 for bad input, 3 for numerical budget or convergence trouble.
fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<Usage>() || cause.is::<ModelError>() {
            return 2;
        }
        if cause.is::<Partial>() {
            return 3;
        }
        if let Some(d) = cause.downcast_ref::<DiscretizeError>() {
            return match d {
                DiscretizeError::Budget { .. } => 3,
                _ => 2,
            };
        }
        if let Some(s) = cause.downcast_ref::<SpectraError>() {
            return match s {
                SpectraError::Discretize(DiscretizeError::Model(_) | DiscretizeError::Parameter(_)) => 2,
                SpectraError::Parameter(_) => 2,
                _ => 3,
            };
        }
        if let Some(a) = cause.downcast_ref::<AnalyzeError>() {
            return match a {
                AnalyzeError::Model(_) => 2,
                AnalyzeError::Criterion(CriterionError::SignatureInvalid) => 2,
                _ => 3,
            };
        }
        if cause.is::<CriterionError>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("SECTORAL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            sectoral::set_threads(n);
        }
    }
    let cli = Cli::parse();
    let r = match &cli.cmd {
        Cmd::Analyze(c) => cmd_analyze(c),
        Cmd::Spectrum(c) => cmd_spectrum(c),
        Cmd::Svd(c) => cmd_svd(c),
        Cmd::Numrange(c) => cmd_numrange(c),
        Cmd::Pseudo(c) => cmd_pseudo(c),
        Cmd::Dilate { common, alpha } => cmd_dilate(common, *alpha),
        Cmd::Verify { out, seed, criteria } => match cmd_verify(out, *seed, criteria) {
            Ok(Ok(())) => Ok(()),
            Ok(Err(AcceptanceFailed)) => return ExitCode::from(4),
            Err(e) => Err(e),
        },
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
