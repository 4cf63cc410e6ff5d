use serde::{Deserialize, Serialize};

use super::growth::growth_signature;
use super::spec::{DomainKind, OperatorSpec};
use super::ModelError;
use crate::scalar::Real;

/// Axis-aligned box `[lower_i, upper_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBox<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Real> SampleBox<T> {
    /// `[-L, L]^d`, with `[0, L]` on the last axis of a half space.
    pub fn for_spec(spec: &OperatorSpec<T>, half_width: T) -> Self {
        let d = spec.dimension();
        let mut lower = vec![-half_width; d];
        if spec.domain() == DomainKind::HalfSpace {
            lower[d - 1] = T::zero();
        }
        SampleBox {
            lower,
            upper: vec![half_width; d],
        }
    }

    fn radius(&self) -> T {
        self.lower
            .iter()
            .chain(&self.upper)
            .fold(T::zero(), |r, v| r.max(v.abs()))
    }

    /// Tensor grid with `ceil(n^{1/d})` points per axis, endpoints included.
    pub fn tensor_points(&self, n: usize) -> Vec<Vec<T>> {
        let d = self.lower.len();
        let q = ((n as f64).powf(1.0 / d as f64) - 1e-9).ceil().max(2.0) as usize;
        let axis = |i: usize| -> Vec<T> {
            (0..q)
                .map(|j| self.lower[i] + (self.upper[i] - self.lower[i]) * T::lit(j as f64 / (q - 1) as f64))
                .collect()
        };
        let axes: Vec<Vec<T>> = (0..d).map(axis).collect();
        let mut out = Vec::with_capacity(q.pow(d as u32));
        let mut idx = vec![0usize; d];
        'outer: loop {
            out.push(idx.iter().enumerate().map(|(i, &j)| axes[i][j]).collect());
            for ax in 0..d {
                idx[ax] += 1;
                if idx[ax] < q {
                    continue 'outer;
                }
                idx[ax] = 0;
            }
            break;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eq4Method {
    Symbolic,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport<T> {
    /// `-min Re V1` over the samples.
    pub lambda_star_estimate: T,
    /// `max (|grad V1| + max_kl |grad B_kl|) / m`; infinite if a derivative does not exist.
    pub eq2_ratio_sup: T,
    pub eq4_relative_growth_ok: bool,
    pub eq4_method: Eq4Method,
    pub eq5_proper: bool,
    pub sample_count: usize,
    pub sample_box: SampleBox<T>,
    pub notes: Vec<String>,
}

fn ray_directions<T: Real>(spec: &OperatorSpec<T>) -> Vec<Vec<T>> {
    let d = spec.dimension();
    let mut dirs: Vec<Vec<T>> = if d == 1 {
        vec![vec![T::one()], vec![-T::one()]]
    } else {
        (0..8)
            .map(|j| {
                let t = T::FRAC_PI_4() * T::lit(j as f64);
                vec![t.cos(), t.sin()]
            })
            .collect()
    };
    if spec.domain() == DomainKind::HalfSpace {
        dirs.retain(|u| u[d - 1] >= -T::lit(1e-12));
    }
    dirs
}

fn scaled<T: Real>(u: &[T], r: T) -> Vec<T> {
    u.iter().map(|&c| c * r).collect()
}

pub fn validate_hypotheses<T: Real>(
    spec: &OperatorSpec<T>,
    sample_box: &SampleBox<T>,
    n_samples: usize,
) -> Result<HypothesisReport<T>, ModelError> {
    if n_samples < 100 {
        return Err(ModelError::Parameter(format!("n_samples = {n_samples} must be >= 100")));
    }
    let d = spec.dimension();
    if sample_box.lower.len() != d || sample_box.upper.len() != d {
        return Err(ModelError::Dimension {
            expected: d,
            got: sample_box.lower.len(),
        });
    }
    let points = sample_box.tensor_points(n_samples);
    let mut notes = Vec::new();

    let mut min_re = T::infinity();
    for x in &points {
        min_re = min_re.min(spec.v1().eval(x)?.re);
    }
    let lambda_star_estimate = -min_re;

    let eq2_ratio_sup = match spec.derived() {
        Ok(der) => {
            let mut sup = T::zero();
            for x in &points {
                let gv: T = der
                    .grad_v1
                    .iter()
                    .map(|g| g.eval_unchecked(x).norm_sqr())
                    .sum::<T>()
                    .sqrt();
                let gb = der
                    .grad_b
                    .iter()
                    .map(|(_, _, g)| g.iter().map(|f| f.eval_unchecked(x).norm_sqr()).sum::<T>().sqrt())
                    .fold(T::zero(), T::max);
                sup = sup.max((gv + gb) / spec.weight_m(x)?);
            }
            sup
        }
        Err(e) => {
            notes.push(format!("gradient bound: {e}"));
            T::infinity()
        }
    };

    let radius = sample_box.radius().max(T::one());
    let dirs = ray_directions(spec);
    let radii: Vec<T> = (0..=3).map(|j| radius * T::lit(2f64.powi(j))).collect();

    // V2 must be small relative to m
    let sig = growth_signature(spec);
    let symbolic = spec.v2().terms().iter().all(|t| {
        let mut weighted = T::zero();
        for (i, &e) in t.exponents().iter().enumerate() {
            if e > T::zero() {
                if sig.gammas[i] <= T::zero() {
                    return false;
                }
                weighted += e / sig.gammas[i];
            }
        }
        weighted < T::one()
    });
    let (eq4_relative_growth_ok, eq4_method) = if symbolic {
        (true, Eq4Method::Symbolic)
    } else {
        let mut ratios = Vec::with_capacity(radii.len());
        for &r in &radii {
            let mut worst = T::zero();
            for u in &dirs {
                let x = scaled(u, r);
                worst = worst.max(spec.v2().eval(&x)?.norm() / spec.weight_m(&x)?);
            }
            ratios.push(worst);
        }
        let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
        let tiny = *ratios.last().unwrap() <= T::lit(1e-6);
        notes.push("V2 growth: symbolic degree test failed, sampled ratio trend used".into());
        (decreasing || tiny, Eq4Method::Sampled)
    };

    // m must grow along every sampled ray, up to 4x the box
    let mut prev = T::neg_infinity();
    let mut eq5_proper = true;
    for &r in &radii[..3] {
        let mut least = T::infinity();
        for u in &dirs {
            least = least.min(spec.weight_m(&scaled(u, r))?);
        }
        if !(least > prev * (T::one() + T::lit(1e-9))) {
            eq5_proper = false;
        }
        prev = least;
    }

    Ok(HypothesisReport {
        lambda_star_estimate,
        eq2_ratio_sup,
        eq4_relative_growth_ok,
        eq4_method,
        eq5_proper,
        sample_count: points.len(),
        sample_box: sample_box.clone(),
        notes,
    })
}
