//! The acceptance suite: ten end-to-end criteria with their oracles.
//!
//! Reports contain no timings, so identical runs give identical bytes.

pub mod oracles;

use std::cell::OnceCell;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};
use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analyze::{analyze, SAMPLE_COUNT, SAMPLE_HALF_WIDTH};
use crate::criterion::{
    dilated_threshold, eq49_check, schatten_integral_probe, schatten_threshold, xi_integral_constant,
    CompletenessOutcome, ConvergenceClass,
};
use crate::discretize::{
    assemble_form, assemble_p, assemble_selfadjoint, make_grid, make_grid_anisotropic, Axis, CMatrix, Grid,
    MagneticGradient, SelfadjointVariant,
};
use crate::model::{
    dilate, growth_signature, optimal_alpha, validate_hypotheses, DomainKind, Family, OperatorSpec, SampleBox,
    ScalarField, VectorField,
};
use crate::output::{eigenvalues_csv, sha256_hex, Manifest};
use crate::rational::Rational;
use crate::spectra::{
    coercivity_check, coercivity_matrices, decay_fit, decay_fit_window, default_window, eigen_comparison, eigenvalues,
    eigenvalues_matrix, field_of_values_boundary, laxmilgram_bound_check, resolvent_singular_values,
    resolvent_singular_values_matrix,
};

pub const DEFAULT_SEED: u64 = 0x5EC7_0A11;

/// 2D box for the dilated-model decay runs: `[-8, 8] x [-12, 12]`.
pub const DILATED_BOX: [f64; 2] = [8.0, 12.0];
pub const DILATED_POINTS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub criteria: Vec<CriterionOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// JUnit-style XML, one test case per criterion.
    pub fn to_junit(&self) -> String {
        let esc = |s: &str| {
            s.replace('&', "&amp;")
                .replace('<', "&lt;")
                .replace('>', "&gt;")
                .replace('"', "&quot;")
        };
        let mut x = String::new();
        let _ = writeln!(x, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            x,
            r#"<testsuite name="acceptance" tests="{}" failures="{}">"#,
            self.criteria.len(),
            self.failed
        );
        for c in &self.criteria {
            let name = esc(&format!("{:02} {}", c.id, c.name));
            if c.passed {
                let _ = writeln!(x, r#"  <testcase classname="acceptance" name="{name}"/>"#);
            } else {
                let _ = writeln!(x, r#"  <testcase classname="acceptance" name="{name}">"#);
                let _ = writeln!(x, r#"    <failure message="{}"/>"#, esc(&c.detail));
                let _ = writeln!(x, "  </testcase>");
            }
        }
        x.push_str("</testsuite>\n");
        x
    }
}

type Check = Result<String, String>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn spec(f: Family<f64>) -> OperatorSpec<f64> {
    OperatorSpec::from_family(f).expect("catalog family builds")
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn lambda_star(s: &OperatorSpec<f64>) -> Result<f64, String> {
    let h = validate_hypotheses(s, &SampleBox::for_spec(s, SAMPLE_HALF_WIDTH), SAMPLE_COUNT).map_err(e)?;
    Ok(h.lambda_star_estimate.max(0.0))
}

/// Expensive 2D results shared between criteria.
#[derive(Default)]
pub struct Shared {
    dilated_p: OnceCell<Result<(Vec<f64>, f64), String>>,
}

impl Shared {
    /// Resolvent singular values of the undilated model `(m, k) = (2, 1)` on
    /// the 60 x 60 grid at shift `-(1 + lambda*)`, and the shift.
    fn dilated_p(&self) -> Result<(Vec<f64>, f64), String> {
        self.dilated_p
            .get_or_init(|| {
                let s = spec(Family::dilated(2, 1));
                let shift = -(1.0 + lambda_star(&s)?);
                let g = dilated_grid(&s)?;
                let op = assemble_p(&s, &g).map_err(e)?;
                let mu = resolvent_singular_values(&op, Complex64::new(shift, 0.0)).map_err(e)?;
                Ok((mu, shift))
            })
            .clone()
    }
}

fn dilated_grid(s: &OperatorSpec<f64>) -> Result<Grid<f64>, String> {
    make_grid_anisotropic(s, &DILATED_BOX, &[DILATED_POINTS, DILATED_POINTS]).map_err(e)
}

pub fn criterion_names() -> [&'static str; 10] {
    [
        "threshold formulas",
        "quadrature probe consistency",
        "completeness table",
        "eigenvalue oracles",
        "decay exponents",
        "schatten transfer shadow",
        "sector containment",
        "inequality chains",
        "exact identities",
        "reproducibility",
    ]
}

/// Runs one criterion by number (1-based).
pub fn run_criterion(id: u32, seed: u64, shared: &Shared) -> CriterionOutcome {
    let t = Instant::now();
    let r = match id {
        1 => c1_thresholds(),
        2 => c2_probe(),
        3 => c3_completeness(),
        4 => c4_eigen_oracles(),
        5 => c5_decay(shared),
        6 => c6_transfer(shared),
        7 => c7_sectors(),
        8 => c8_inequalities(seed),
        9 => c9_identities(),
        10 => c10_reproducibility(seed),
        _ => Err(format!("no criterion {id}")),
    };
    let (passed, detail) = match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionOutcome {
        id,
        name: criterion_names().get(id as usize - 1).unwrap_or(&"unknown").to_string(),
        passed,
        detail,
        seconds: t.elapsed().as_secs_f64(),
    }
}

pub fn run_all(seed: u64, mut on_result: impl FnMut(&CriterionOutcome)) -> VerifyReport {
    let shared = Shared::default();
    let criteria: Vec<CriterionOutcome> = (1..=10)
        .map(|id| {
            let c = run_criterion(id, seed, &shared);
            on_result(&c);
            c
        })
        .collect();
    let passed = criteria.iter().filter(|c| c.passed).count();
    VerifyReport {
        seed,
        passed,
        failed: criteria.len() - passed,
        criteria,
    }
}

fn c1_thresholds() -> Check {
    let mut n = 0;
    for alpha in [1, 2, 3, 4, 6] {
        let s = spec(Family::oscillator(0.0, alpha as f64));
        let got = schatten_threshold(&growth_signature(&s), 1, s.domain()).map_err(e)?;
        let want = Rational::new(1, 2) + Rational::new(1, alpha);
        if got != want {
            return Err(format!("alpha = {alpha}: {got} != {want}"));
        }
        n += 1;
    }
    for k in 1..=3u32 {
        let s = spec(Family::Holomorphic2d { n: k });
        let got = schatten_threshold(&growth_signature(&s), 2, s.domain()).map_err(e)?;
        let want = Rational::new(i64::from(k) + 2, i64::from(k));
        if got != want {
            return Err(format!("holomorphic n = {k}: {got} != {want}"));
        }
        n += 1;
    }
    for m in 2..=6u32 {
        for k in 1..=6u32 {
            let (mi, ki) = (i64::from(m), i64::from(k));
            let want = Rational::new((2 * ki + 1) * mi - 1, 2 * ki * (mi - 1));
            let closed = dilated_threshold(m, k).map_err(e)?;
            let s = spec(Family::dilated(m, k));
            let from_sig = schatten_threshold(&growth_signature(&s), 2, s.domain()).map_err(e)?;
            if closed != want || from_sig != want {
                return Err(format!("(m, k) = ({m}, {k}): {closed} / {from_sig} != {want}"));
            }
            n += 1;
        }
    }
    Ok(format!("{n} exact rational thresholds reproduced"))
}

fn c2_probe() -> Check {
    let mut out = Vec::new();
    for alpha in [2.0, 4.0] {
        let s = spec(Family::oscillator(0.0, alpha));
        let p = 0.5 + 1.0 / alpha;
        let above = schatten_integral_probe(&s, p + 0.2, 16).map_err(e)?.convergence_class;
        let below = schatten_integral_probe(&s, p - 0.2, 16).map_err(e)?.convergence_class;
        if above != Some(ConvergenceClass::Convergent) || below != Some(ConvergenceClass::Divergent) {
            return Err(format!("alpha = {alpha}: {above:?} above, {below:?} below p = {p}"));
        }
        out.push(format!("alpha={alpha}"));
    }
    Ok(format!("convergent above, divergent below for {}", out.join(", ")))
}

fn c3_completeness() -> Check {
    let verdict = |f: Family<f64>| -> Result<CompletenessOutcome, String> { Ok(analyze(&spec(f)).map_err(e)?.verdict) };
    use CompletenessOutcome::*;
    let two_thirds = 2.0 * PI / 3.0;
    let cases: Vec<(String, Family<f64>, CompletenessOutcome)> = vec![
        (
            "airy below".into(),
            Family::AiryHalfLine {
                theta: two_thirds - 0.05,
                alpha: 1.0,
            },
            CompleteSpan,
        ),
        (
            "airy above".into(),
            Family::AiryHalfLine {
                theta: two_thirds + 0.05,
                alpha: 1.0,
            },
            Inconclusive,
        ),
        (
            "half-plane below".into(),
            Family::HalfPlaneModel {
                theta: FRAC_PI_3 - 0.05,
                n: 1,
            },
            CompleteSpan,
        ),
        (
            "half-plane above".into(),
            Family::HalfPlaneModel {
                theta: FRAC_PI_3 + 0.05,
                n: 1,
            },
            Inconclusive,
        ),
        ("sign-changing alpha=3".into(), sign_changing(3.0), CompleteSpan),
        ("sign-changing alpha=2".into(), sign_changing(2.0), Inconclusive),
    ];
    for (name, f, want) in cases {
        let got = verdict(f)?;
        if got != want {
            return Err(format!("{name}: {got:?}, expected {want:?}"));
        }
    }
    for m in 2..=6 {
        for k in 1..=6 {
            let got = verdict(Family::dilated(m, k))?;
            if got != InfiniteDiscreteSpectrumViaDilation {
                return Err(format!("dilated ({m}, {k}): {got:?}"));
            }
        }
    }
    Ok("6 boundary cases and 30 dilated models as expected".into())
}

fn sign_changing(alpha: f64) -> Family<f64> {
    Family::Oscillator1d {
        theta: FRAC_PI_2,
        alpha,
        c: 1.0,
        sign_changing: true,
        beta1: Complex64::new(0.0, 0.0),
        beta2: Complex64::new(0.0, 0.0),
    }
}

fn free_laplacian() -> OperatorSpec<f64> {
    OperatorSpec::new(
        1,
        DomainKind::FullSpace,
        vec![0.0],
        VectorField::zero(1),
        ScalarField::zero(1),
        ScalarField::zero(1),
        None,
    )
    .expect("free Laplacian is valid")
}

fn c4_eigen_oracles() -> Check {
    let mut worst = Vec::new();
    // Dirichlet Laplacian on (0, pi)
    let s = free_laplacian();
    let g = Grid::new(vec![Axis {
        lower: 0.0,
        upper: PI,
        n: 2000,
    }])
    .map_err(e)?;
    let ev = eigenvalues(&assemble_p(&s, &g).map_err(e)?).map_err(e)?;
    let mut r = 0.0_f64;
    for k in 1..=5 {
        r = r.max(rel(ev.eigenvalues[k - 1].norm(), (k * k) as f64));
    }
    if r > 1e-4 {
        return Err(format!("Laplacian relative error {r:.2e}"));
    }
    worst.push(format!("laplacian {r:.1e}"));

    let s = spec(Family::harmonic());
    let ev = eigenvalues(&assemble_p(&s, &make_grid(&s, 12.0, 1200).map_err(e)?).map_err(e)?).map_err(e)?;
    let mut r = 0.0_f64;
    for k in 0..5 {
        r = r.max(rel(ev.eigenvalues[k].norm(), (2 * k + 1) as f64));
    }
    if r > 1e-3 {
        return Err(format!("harmonic oscillator relative error {r:.2e}"));
    }
    worst.push(format!("harmonic {r:.1e}"));

    let s = spec(Family::AiryHalfLine {
        theta: FRAC_PI_2,
        alpha: 1.0,
    });
    let ev = eigenvalues(&assemble_p(&s, &make_grid(&s, 30.0, 3000).map_err(e)?).map_err(e)?).map_err(e)?;
    let zeros = oracles::airy_zeros(3);
    let mut r = 0.0_f64;
    for (k, a) in zeros.iter().enumerate() {
        let want = Complex64::from_polar(a.abs(), FRAC_PI_3);
        r = r.max((ev.eigenvalues[k] - want).norm() / want.norm());
    }
    if r > 1e-3 {
        return Err(format!("complex Airy relative error {r:.2e}"));
    }
    worst.push(format!("airy {r:.1e}"));

    let s = spec(Family::complex_cubic());
    let ev = eigenvalues(&assemble_p(&s, &make_grid(&s, 14.0, 2000).map_err(e)?).map_err(e)?).map_err(e)?;
    let want = oracles::cubic_ground_state();
    let r = (ev.eigenvalues[0] - want).norm() / want.norm();
    if r > 1e-3 {
        return Err(format!("complex cubic {} vs {want}: {r:.2e}", ev.eigenvalues[0]));
    }
    worst.push(format!("cubic {r:.1e}"));
    Ok(format!("max relative errors: {}", worst.join(", ")))
}

/// Resolvent decay fit of `P` at shift -1 with the grid doubled.
fn fit_1d(f: Family<f64>, half_width: f64, n: usize) -> Result<crate::spectra::DecayFit<f64>, String> {
    let s = spec(f);
    let shift = Complex64::new(-(1.0 + lambda_star(&s)?), 0.0);
    let run = |n| -> Result<Vec<f64>, String> {
        let op = assemble_p(&s, &make_grid(&s, half_width, n).map_err(e)?).map_err(e)?;
        resolvent_singular_values(&op, shift).map_err(e)
    };
    let coarse = run(n)?;
    let fine = run(2 * n)?;
    decay_fit_window(&coarse, default_window(coarse.len()), Some(&fine)).map_err(e)
}

fn c5_decay(shared: &Shared) -> Check {
    let ho = fit_1d(Family::harmonic(), 30.0, 2000)?;
    let quartic = fit_1d(Family::oscillator(0.0, 4.0), 12.0, 2000)?;
    let (mu, shift) = shared.dilated_p()?;
    let dil = decay_fit(&mu, None).map_err(e)?;
    let detail = format!(
        "harmonic p={:.4} (converged {}), quartic p={:.4} (converged {}), dilated 2D p={:.4} at shift {shift}",
        ho.p_estimate, ho.grid_converged, quartic.p_estimate, quartic.grid_converged, dil.p_estimate
    );
    let ok = (0.9..=1.1).contains(&ho.p_estimate)
        && ho.grid_converged
        && (0.64..=0.86).contains(&quartic.p_estimate)
        && quartic.grid_converged
        && (2.0..=3.0).contains(&dil.p_estimate);
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c6_transfer(shared: &Shared) -> Check {
    // complex cubic, L = 14, n = 2000
    let s = spec(Family::complex_cubic());
    let g = make_grid(&s, 14.0, 2000).map_err(e)?;
    let shift = Complex64::new(-(1.0 + lambda_star(&s)?), 0.0);
    let mp = resolvent_singular_values(&assemble_p(&s, &g).map_err(e)?, shift).map_err(e)?;
    let ms = resolvent_singular_values(
        &assemble_selfadjoint(&s, &g, SelfadjointVariant::AbsV).map_err(e)?,
        shift,
    )
    .map_err(e)?;
    let (pp, ps) = (
        decay_fit(&mp, None).map_err(e)?.p_estimate,
        decay_fit(&ms, None).map_err(e)?.p_estimate,
    );

    let d = spec(Family::dilated(2, 1));
    let (mu, dshift) = shared.dilated_p()?;
    let sa = assemble_selfadjoint(&d, &dilated_grid(&d)?, SelfadjointVariant::AbsV).map_err(e)?;
    let mus = resolvent_singular_values_matrix(&sa.matrix, true, Complex64::new(dshift, 0.0)).map_err(e)?;
    let (dp, ds) = (
        decay_fit(&mu, None).map_err(e)?.p_estimate,
        decay_fit(&mus, None).map_err(e)?.p_estimate,
    );
    let detail = format!(
        "cubic P {pp:.4} vs |V| {ps:.4} ({:.1}%), dilated P {dp:.4} vs |V| {ds:.4} ({:.1}%)",
        100.0 * rel(pp, ps),
        100.0 * rel(dp, ds)
    );
    if rel(pp, ps) <= 0.15 && rel(dp, ds) <= 0.15 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c7_sectors() -> Check {
    let tol = 0.02;
    let s = spec(Family::oscillator(FRAC_PI_3, 2.0));
    let op = assemble_p(&s, &make_grid(&s, 8.0, 400).map_err(e)?).map_err(e)?;
    let f = field_of_values_boundary(&op, 128, Complex64::new(0.0, 0.0)).map_err(e)?;
    let (lo1, hi1) = arg_range(&f.boundary_points);
    if lo1 < -tol || hi1 > FRAC_PI_3 + tol {
        return Err(format!("oscillator boundary spans [{lo1:.4}, {hi1:.4}]"));
    }

    let alpha: f64 = optimal_alpha(2, 1).map_err(e)?;
    let d = dilate(&spec(Family::dilated(2, 1)), alpha).map_err(e)?;
    let mut op = assemble_p(&d, &make_grid(&d, 6.0, 24).map_err(e)?).map_err(e)?;
    let rot = Complex64::from_polar(1.0, -2.0 * alpha);
    op.matrix.mapv_inplace(|z| z * rot);
    let f = field_of_values_boundary(&op, 64, Complex64::new(0.0, 0.0)).map_err(e)?;
    let (lo2, hi2) = arg_range(&f.boundary_points);
    let top = 3.0 * PI / 8.0;
    if lo2 < -tol || hi2 > top + tol {
        return Err(format!("dilated boundary spans [{lo2:.4}, {hi2:.4}]"));
    }
    Ok(format!(
        "oscillator args [{lo1:.4}, {hi1:.4}] within [0, pi/3]; dilated args [{lo2:.4}, {hi2:.4}] within [0, 3pi/8]"
    ))
}

fn arg_range(points: &[Complex64]) -> (f64, f64) {
    points
        .iter()
        .map(|z| z.arg())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), t| (a.min(t), b.max(t)))
}

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMatrix<f64> {
    CMatrix::from_shape_fn((n, n), |_| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    })
}

/// Form matrix, multiplier diagonal, weight and gradient on a grid.
fn form_parts(
    s: &OperatorSpec<f64>,
    g: &Grid<f64>,
    gamma: f64,
) -> Result<(CMatrix<f64>, Vec<f64>, Vec<f64>, MagneticGradient<f64>), String> {
    let (f, phi) = assemble_form(s, g, gamma).map_err(e)?;
    let w = crate::discretize::weight_diagonal(s, g).map_err(e)?;
    let grad = MagneticGradient::new(s, g).map_err(e)?;
    let phid = (0..g.dof()).map(|i| phi.matrix[(i, i)].re).collect();
    Ok((f.matrix, phid, w, grad))
}

fn diag(v: &[f64]) -> CMatrix<f64> {
    let n = v.len();
    CMatrix::from_shape_fn((n, n), |(i, j)| Complex64::new(if i == j { v[i] } else { 0.0 }, 0.0))
}

fn catalog() -> Vec<Family<f64>> {
    vec![
        Family::harmonic(),
        Family::oscillator(FRAC_PI_3, 2.0),
        Family::complex_cubic(),
        Family::AiryHalfLine {
            theta: FRAC_PI_2,
            alpha: 1.0,
        },
        Family::Holomorphic2d { n: 1 },
        Family::dilated(2, 1),
        Family::HalfPlaneModel { theta: PI / 4.0, n: 1 },
    ]
}

fn c8_inequalities(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..50 {
        let n = 6 + t % 10;
        let a = random_matrix(n, &mut rng);
        let mut phi = random_matrix(n, &mut rng);
        let norm = crate::spectra::singular_values(&phi, false).map_err(e)?[0];
        let scale = rng.random::<f64>() / norm;
        phi.mapv_inplace(|z| z * scale);
        let r = laxmilgram_bound_check(&a, &phi, 200, seed.wrapping_add(t as u64)).map_err(e)?;
        if !r.holds {
            return Err(format!(
                "random matrix {t}: sigma_min {} < {}",
                r.sigma_min,
                r.alpha_emp / (1.0 + r.phi_norm)
            ));
        }
    }
    for f in catalog() {
        let s = spec(f);
        let g = if s.dimension() == 1 {
            make_grid(&s, 8.0, 200)
        } else {
            make_grid(&s, 4.0, 12)
        }
        .map_err(e)?;
        let (fm, phi, _, _) = form_parts(&s, &g, 1.0 + lambda_star(&s)?)?;
        let r = laxmilgram_bound_check(&fm, &diag(&phi), 200, seed).map_err(e)?;
        if !r.holds {
            return Err(format!("{}: chain fails", s.family().map_or("custom", |f| f.tag())));
        }
    }

    let mut notes = vec!["lax-milgram chain holds on 50 random and 7 catalog forms".to_string()];
    let coercivity = |s: &OperatorSpec<f64>, l: f64, n: usize| -> Result<f64, String> {
        let g = make_grid(s, l, n).map_err(e)?;
        let (f, phi, w, grad) = form_parts(s, &g, 1.0 + lambda_star(s)?)?;
        let input = coercivity_matrices(&f, &phi, &w, &grad).map_err(e)?;
        let r = coercivity_check(&input, 200, seed).map_err(e)?;
        if r.counterexample || !r.constant.is_finite() {
            return Err(format!("degenerate denominator at n = {n}"));
        }
        Ok(r.constant)
    };
    let stable = |a: f64, b: f64| a.is_finite() && b.is_finite() && rel(b, a) <= 0.2;
    let cubic = spec(Family::complex_cubic());
    let dil = spec(Family::dilated(2, 1));
    let (c1, c2) = (coercivity(&cubic, 8.0, 400)?, coercivity(&cubic, 8.0, 800)?);
    let (d1, d2) = (coercivity(&dil, 6.0, 16)?, coercivity(&dil, 6.0, 32)?);
    notes.push(format!("coercivity cubic {c1:.4}->{c2:.4}, dilated {d1:.4}->{d2:.4}"));
    if !stable(c1, c2) || !stable(d1, d2) {
        return Err(notes.join("; "));
    }

    let comparison = |s: &OperatorSpec<f64>, l: f64, n: usize, v| -> Result<(f64, f64), String> {
        let g = make_grid(s, l, n).map_err(e)?;
        let p = assemble_p(s, &g).map_err(e)?;
        let sa = assemble_selfadjoint(s, &g, v).map_err(e)?;
        let shift = Complex64::new(-(1.0 + lambda_star(s)?), 0.0);
        let c = eigen_comparison(&sa.matrix, &p.matrix, shift).map_err(e)?;
        Ok((c.sup_nu_over_mu, c.sup_mu_over_nu))
    };
    let (a1, a2) = (
        comparison(&cubic, 14.0, 1000, SelfadjointVariant::AbsV)?,
        comparison(&cubic, 14.0, 2000, SelfadjointVariant::AbsV)?,
    );
    let (b1, b2) = (
        comparison(&dil, 6.0, 16, SelfadjointVariant::Weight)?,
        comparison(&dil, 6.0, 32, SelfadjointVariant::Weight)?,
    );
    notes.push(format!(
        "comparison sups cubic ({:.4}, {:.4})->({:.4}, {:.4}), dilated ({:.4}, {:.4})->({:.4}, {:.4})",
        a1.0, a1.1, a2.0, a2.1, b1.0, b1.1, b2.0, b2.1
    ));
    if stable(a1.0, a2.0) && stable(a1.1, a2.1) && stable(b1.0, b2.0) && stable(b1.1, b2.1) {
        Ok(notes.join("; "))
    } else {
        Err(notes.join("; "))
    }
}

fn c9_identities() -> Check {
    let mut worst = 0.0_f64;
    for d in [1usize, 2] {
        for p in [0.8, 1.0, 2.0, 3.0] {
            if p <= d as f64 / 2.0 {
                continue;
            }
            let c: f64 = xi_integral_constant(p, d).map_err(e)?;
            worst = worst.max(rel(c, oracles::xi_integral_numeric(p, d)));
        }
    }
    if worst > 1e-6 {
        return Err(format!("xi-integral relative error {worst:.2e}"));
    }
    for m in 2..=10 {
        for k in 1..=10 {
            if !eq49_check(m, k).map_err(e)? {
                return Err(format!("angle condition fails at ({m}, {k})"));
            }
        }
    }
    let a: f64 = optimal_alpha(2, 1).map_err(e)?;
    if (a + PI / 16.0).abs() > 1e-14 {
        return Err(format!("optimal angle {a}"));
    }

    // the dilation must produce -e^{2i a} d_x^2 - e^{-2ima}(d_y - i x^m/m)^2 + e^{i(2kma + pi/2)} y^{2k}
    let mut bookkeeping = 0.0_f64;
    let mut literal_x = 0.0_f64;
    let mut literal_rest = 0.0_f64;
    for m in 2..=6u32 {
        for k in 1..=6u32 {
            let a: f64 = optimal_alpha(m, k).map_err(e)?;
            let s = dilate(&spec(Family::dilated(m, k)), a).map_err(e)?;
            let (mf, kf) = (f64::from(m), f64::from(k));
            let x_coef = Complex64::from_polar(1.0, 2.0 * s.angles()[0]);
            let y_coef = Complex64::from_polar(1.0, 2.0 * s.angles()[1]);
            let v_coef = s.v1().terms()[0].coeff();
            bookkeeping = bookkeeping
                .max((x_coef - Complex64::from_polar(1.0, 2.0 * a)).norm())
                .max((y_coef - Complex64::from_polar(1.0, -2.0 * mf * a)).norm())
                .max((v_coef - Complex64::from_polar(1.0, 2.0 * kf * mf * a + FRAC_PI_2)).norm());
            // coefficients as printed for A_alpha in the model statement
            let printed_x = Complex64::from_polar(1.0, -PI / (mf * (kf + 1.0)));
            let printed_yv = Complex64::from_polar(1.0, PI / (2.0 * (kf + 1.0)));
            literal_x = literal_x.max((x_coef - printed_x).norm());
            literal_rest = literal_rest
                .max((y_coef - printed_yv).norm())
                .max((v_coef - printed_yv).norm());
        }
    }
    let detail = format!(
        "xi max rel err {worst:.1e}; angle condition on 2..10 x 1..10; optimal angle -pi/16; \
         dilation bookkeeping {bookkeeping:.1e}; printed model y/potential {literal_rest:.1e}, x {literal_x:.2e}"
    );
    if bookkeeping <= 1e-14 && literal_rest <= 1e-14 && literal_x <= 1e-14 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// A small pipeline whose every artifact is hashed into a manifest.
fn pipeline_digest(seed: u64) -> Result<String, String> {
    let mut manifest = Manifest::new(serde_json::json!({ "seed": seed }), None);
    let mut files = Vec::new();
    for f in catalog() {
        let r = analyze(&spec(f)).map_err(e)?;
        files.push((
            format!("{}.json", r.family.clone().unwrap_or_default()),
            serde_json::to_vec_pretty(&r).map_err(e)?,
        ));
    }
    let s = spec(Family::complex_cubic());
    let g = make_grid(&s, 10.0, 300).map_err(e)?;
    let ev = eigenvalues(&assemble_p(&s, &g).map_err(e)?).map_err(e)?;
    let mut csv = Vec::new();
    eigenvalues_csv(&ev, &mut csv).map_err(e)?;
    files.push(("eigenvalues.csv".into(), csv));
    let (f, phi, w, grad) = form_parts(&s, &g, 1.0)?;
    let r = coercivity_check(&coercivity_matrices(&f, &phi, &w, &grad).map_err(e)?, 200, seed).map_err(e)?;
    files.push(("coercivity.json".into(), serde_json::to_vec_pretty(&r).map_err(e)?));
    let h = eigenvalues_matrix(&f, false).map_err(e)?;
    files.push(("form.json".into(), serde_json::to_vec(&h.eigenvalues).map_err(e)?));
    for (name, bytes) in &files {
        manifest.files.push(crate::output::ManifestEntry {
            path: name.clone(),
            kind: "artifact".into(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
            partial: false,
        });
    }
    Ok(manifest.to_json())
}

fn c10_reproducibility(seed: u64) -> Check {
    let a = pipeline_digest(seed)?;
    let b = pipeline_digest(seed)?;
    let other = pipeline_digest(seed.wrapping_add(1))?;
    if a != b {
        return Err("two identical runs produced different manifests".into());
    }
    if a == other {
        return Err("seed override did not change the sampled artifacts".into());
    }
    Ok(format!(
        "manifest {} reproduced byte for byte",
        &sha256_hex(a.as_bytes())[..16]
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_criteria_pass() {
        let shared = Shared::default();
        for id in [1, 2, 3, 9] {
            let c = run_criterion(id, DEFAULT_SEED, &shared);
            if id == 9 {
                // the printed x coefficient differs from the dilation by a factor 2 in the phase
                assert!(!c.passed, "{}", c.detail);
                assert!(c.detail.contains("bookkeeping 0.0e0"), "{}", c.detail);
            } else {
                assert!(c.passed, "{}: {}", c.id, c.detail);
            }
        }
    }

    #[test]
    fn junit_escapes_details() {
        let r = VerifyReport {
            seed: 1,
            passed: 0,
            failed: 1,
            criteria: vec![CriterionOutcome {
                id: 1,
                name: "x".into(),
                passed: false,
                detail: "a < b & \"c\"".into(),
                seconds: 0.0,
            }],
        };
        let x = r.to_junit();
        assert!(x.contains("a &lt; b &amp; &quot;c&quot;"));
    }
}
