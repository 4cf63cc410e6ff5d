use std::ops::RangeInclusive;

use serde::Serialize;

use super::{LinalgReal, SpectraError};
use crate::scalar::Real;

/// Relative slope change allowed between a grid and its refinement.
pub const SLOPE_TOLERANCE: f64 = 0.05;

/// Least-squares fit of `log mu_n` against `log n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit<T> {
    pub slope: T,
    pub intercept: T,
    pub p_estimate: T,
    /// 1-based indices `n` that entered the fit.
    pub window: RangeInclusive<usize>,
    pub residual_rms: T,
    pub refined_slope: Option<T>,
    pub grid_converged: bool,
}

/// `[10, floor(len / 4)]`.
pub fn default_window(len: usize) -> RangeInclusive<usize> {
    10..=len / 4
}

fn line<T: Real>(values: &[T], window: &RangeInclusive<usize>) -> Result<(T, T, T), SpectraError> {
    let (lo, hi) = (*window.start(), *window.end());
    if lo < 1 || hi > values.len() || hi < lo + 1 {
        return Err(SpectraError::Window(format!(
            "[{lo}, {hi}] with {} values",
            values.len()
        )));
    }
    let mut pts = Vec::with_capacity(hi - lo + 1);
    for n in lo..=hi {
        let v = values[n - 1];
        if !(v > T::zero()) || !v.is_finite() {
            return Err(SpectraError::Window(format!("value {n} is {v}, not positive")));
        }
        pts.push((T::lit(n as f64).ln(), v.ln()));
    }
    let k = T::lit(pts.len() as f64);
    let mx = pts.iter().map(|p| p.0).sum::<T>() / k;
    let my = pts.iter().map(|p| p.1).sum::<T>() / k;
    let sxx = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<T>();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (pts
        .iter()
        .map(|p| {
            let r = p.1 - intercept - slope * p.0;
            r * r
        })
        .sum::<T>()
        / k)
        .sqrt();
    Ok((slope, intercept, rms))
}

/// Fit over the default window; `refined` are the values from the doubled grid.
pub fn decay_fit<T: LinalgReal>(values: &[T], refined: Option<&[T]>) -> Result<DecayFit<T>, SpectraError> {
    if values.len() < 100 {
        return Err(SpectraError::Window(format!(
            "{} values, need at least 100",
            values.len()
        )));
    }
    decay_fit_window(values, default_window(values.len()), refined)
}

/// Fit over an explicit window; the refined grid uses the same window.
pub fn decay_fit_window<T: LinalgReal>(
    values: &[T],
    window: RangeInclusive<usize>,
    refined: Option<&[T]>,
) -> Result<DecayFit<T>, SpectraError> {
    let (slope, intercept, residual_rms) = line(values, &window)?;
    let refined_slope = match refined {
        Some(r) => Some(line(r, &window)?.0),
        None => None,
    };
    let grid_converged = refined_slope.is_some_and(|s2| (slope - s2).abs() < T::lit(SLOPE_TOLERANCE) * s2.abs());
    Ok(DecayFit {
        slope,
        intercept,
        p_estimate: -T::one() / slope,
        window,
        residual_rms,
        refined_slope,
        grid_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let v: Vec<f64> = (1..=400).map(|n| (n as f64).powf(-2.0)).collect();
        let f = decay_fit(&v, Some(&v)).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-10 * 2.0);
        assert!((f.p_estimate - 0.5).abs() < 1e-10);
        assert!(f.residual_rms < 1e-12);
        assert!(f.grid_converged);
        assert_eq!(f.window, 10..=100);
    }

    #[test]
    fn short_input_rejected() {
        let v = vec![1.0_f64; 50];
        assert!(matches!(decay_fit(&v, None), Err(SpectraError::Window(_))));
    }
}
