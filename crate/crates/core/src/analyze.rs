//! End-to-end symbolic analysis of one operator: hypotheses, threshold,
//! sector and completeness verdict.

use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::criterion::{
    analytic_sector, completeness_verdict, dilated_threshold, eq49_check, no_dilation_condition,
    schatten_integral_probe, schatten_threshold, CompletenessOutcome, ConvergenceClass, CriterionError, PCrit,
    SchattenMethod, Sector,
};
use crate::discretize::{assemble_p, make_grid, DiscretizeError};
use crate::model::{
    dilate, growth_signature, optimal_alpha, validate_hypotheses, Family, GrowthSignature, HypothesisReport,
    ModelError, OperatorSpec, SampleBox,
};
use crate::spectra::{field_of_values_matrix, SpectraError};

/// Half-width of the hypothesis sampling box.
pub const SAMPLE_HALF_WIDTH: f64 = 8.0;
pub const SAMPLE_COUNT: usize = 400;

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Criterion(#[from] CriterionError),
    #[error(transparent)]
    Discretize(#[from] DiscretizeError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorSource {
    Analytic,
    /// Field-of-values boundary of a small discretization.
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilationInfo {
    pub used: bool,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilatedModelInfo {
    pub m: u32,
    pub k: u32,
    pub optimal_alpha: f64,
    pub eq49: bool,
    pub no_dilation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub family: Option<String>,
    pub spec_hash: String,
    pub p_crit: PCrit,
    pub method: SchattenMethod,
    pub sector: Sector<f64>,
    pub sector_source: SectorSource,
    pub verdict: CompletenessOutcome,
    pub margin: f64,
    pub p_used: f64,
    pub dilation: DilationInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dilated_model: Option<DilatedModelInfo>,
    pub signature: GrowthSignature<f64>,
    pub hypotheses: HypothesisReport<f64>,
    pub notes: Vec<String>,
}

/// Threshold from the growth signature, or by bisection on the quadrature
/// probe when the signature is unusable.
fn threshold(spec: &OperatorSpec<f64>, sig: &GrowthSignature<f64>) -> Result<(PCrit, SchattenMethod), AnalyzeError> {
    if let Some(&Family::DilatedModel { m, k, .. }) = spec.family() {
        return Ok((dilated_threshold(m, k)?.into(), SchattenMethod::Symbolic));
    }
    match schatten_threshold(sig, spec.dimension(), spec.domain()) {
        Ok(p) => Ok((p.into(), SchattenMethod::Symbolic)),
        Err(CriterionError::SignatureInvalid | CriterionError::IrrationalExponent(_)) => {
            Ok((PCrit::Approx(probe_threshold(spec)?), SchattenMethod::Quadrature))
        }
        Err(e) => Err(e.into()),
    }
}

fn probe_threshold(spec: &OperatorSpec<f64>) -> Result<f64, AnalyzeError> {
    let half_d = spec.dimension() as f64 / 2.0;
    let converges = |p: f64| -> Result<bool, AnalyzeError> {
        Ok(schatten_integral_probe(spec, p, 16)?.convergence_class == Some(ConvergenceClass::Convergent))
    };
    let mut lo = half_d;
    let mut hi = half_d + 1.0;
    while !converges(hi)? {
        lo = hi;
        hi += hi - half_d;
        if hi > 64.0 {
            return Err(CriterionError::SignatureInvalid.into());
        }
    }
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        if converges(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sector of `P + lambda_star` from the field of values of a coarse grid.
fn numeric_sector(spec: &OperatorSpec<f64>, lambda_star: f64) -> Result<Sector<f64>, AnalyzeError> {
    let grid = match spec.dimension() {
        1 => make_grid(spec, 10.0, 400)?,
        _ => make_grid(spec, 6.0, 24)?,
    };
    let op = assemble_p(spec, &grid)?;
    let fov = field_of_values_matrix(&op.matrix, 128, Complex::new(-lambda_star, 0.0))?;
    let mut s = fov.sector.ok_or(CriterionError::NoAnalyticSector)?;
    s.vertex = Complex::new(0.0, 0.0);
    s.shift = lambda_star;
    Ok(s)
}

pub fn analyze(spec: &OperatorSpec<f64>) -> Result<AnalysisReport, AnalyzeError> {
    let mut notes = Vec::new();
    let hyp = validate_hypotheses(spec, &SampleBox::for_spec(spec, SAMPLE_HALF_WIDTH), SAMPLE_COUNT)?;
    let lambda_star = hyp.lambda_star_estimate.max(0.0);

    // the dilated model is always analyzed at its optimal angle
    let (work, dilation, dilated_model) = match spec.family() {
        Some(&Family::DilatedModel { m, k, alpha }) => {
            let opt: f64 = optimal_alpha(m, k)?;
            let d = dilate(spec, opt - alpha)?;
            let info = DilatedModelInfo {
                m,
                k,
                optimal_alpha: opt,
                eq49: eq49_check(m, k)?,
                no_dilation: no_dilation_condition(m, k)?,
            };
            (d, DilationInfo { used: true, alpha: opt }, Some(info))
        }
        _ => (
            spec.clone(),
            DilationInfo {
                used: false,
                alpha: 0.0,
            },
            None,
        ),
    };

    let sig = growth_signature(&work);
    let (p_crit, method) = threshold(&work, &sig)?;
    let (sector, sector_source) = match analytic_sector(&work) {
        Ok(s) => (s, SectorSource::Analytic),
        Err(CriterionError::NoAnalyticSector) => (numeric_sector(&work, lambda_star)?, SectorSource::Numeric),
        Err(e) => return Err(e.into()),
    };
    let verdict = completeness_verdict(p_crit.value(), &sector, dilation.used)?;
    if let Some(&Family::Holomorphic2d { n }) = spec.family() {
        notes.push(format!(
            "completeness holds on sub-sector domains of opening below pi/{}",
            n + 2
        ));
    }
    if !hyp.eq5_proper || !hyp.eq4_relative_growth_ok {
        notes.push("sampled hypotheses not all satisfied; verdict is conditional".into());
    }
    Ok(AnalysisReport {
        family: spec.family().map(|f| f.tag().to_string()),
        spec_hash: spec.spec_hash(),
        p_crit,
        method,
        sector,
        sector_source,
        verdict: verdict.outcome,
        margin: verdict.margin,
        p_used: verdict.p_used,
        dilation,
        dilated_model,
        signature: sig,
        hypotheses: hyp,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn airy_half_line_is_complete_below_two_thirds_pi() {
        let s = OperatorSpec::from_family(Family::AiryHalfLine {
            theta: PI / 2.0,
            alpha: 1.0,
        })
        .unwrap();
        let r = analyze(&s).unwrap();
        assert_eq!(r.p_crit.exact(), Some(crate::rational::Rational::new(3, 2)));
        assert_eq!(r.verdict, CompletenessOutcome::CompleteSpan);
    }

    #[test]
    fn dilated_model_report() {
        let s = OperatorSpec::from_family(Family::dilated(2, 1)).unwrap();
        let r = analyze(&s).unwrap();
        assert_eq!(r.p_crit.exact(), Some(crate::rational::Rational::new(5, 2)));
        assert_eq!(r.verdict, CompletenessOutcome::InfiniteDiscreteSpectrumViaDilation);
        assert!((r.sector.theta_max - 3.0 * PI / 8.0).abs() < 1e-14);
        assert!(r.dilation.used);
        let info = r.dilated_model.unwrap();
        assert!(info.eq49 && !info.no_dilation);
    }

    #[test]
    fn custom_operator_uses_numeric_sector() {
        let s = OperatorSpec::from_family(Family::oscillator(PI / 3.0, 2.0))
            .unwrap()
            .without_family();
        let r = analyze(&s).unwrap();
        assert_eq!(r.sector_source, SectorSource::Numeric);
        assert!(r.sector.theta_min > -0.05 && r.sector.theta_max < PI / 3.0 + 0.05);
    }
}
