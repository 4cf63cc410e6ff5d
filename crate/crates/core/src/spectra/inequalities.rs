//! Matrix-level checks of the coercivity estimate, the generalized
//! Lax-Milgram chain and the two-sided eigenvalue comparison.

use std::ops::RangeInclusive;

use num_complex::Complex;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{operator_singular_values, singular_values, to_buffer, LinalgReal, SpectraError};
use crate::discretize::{CMatrix, MagneticGradient};

/// Denominators at or below this count as degenerate.
const DEGENERATE: f64 = 1e-14;
const TOP_CANDIDATES: usize = 5;
const ASCENT_STEPS: usize = 50;

/// Matrices of the ratio `N(u) / (|Im <Fu, phi u>| + |Re <Fu, u>|)` with
/// `N = D_A^* D_A + W`, all in the plain coefficient inner product.
#[derive(Debug, Clone)]
pub struct CoercivityInput<T> {
    pub form: CMatrix<T>,
    pub phi: Vec<T>,
    pub numerator: CMatrix<T>,
}

/// Builds the numerator `D_A^* D_A + diag(W)` next to the form and multiplier.
pub fn coercivity_matrices<T: LinalgReal>(
    form: &CMatrix<T>,
    phi: &[T],
    weight: &[T],
    grad: &MagneticGradient<T>,
) -> Result<CoercivityInput<T>, SpectraError> {
    let n = form.nrows();
    if phi.len() != n || weight.len() != n || grad.dof != n {
        return Err(SpectraError::Parameter(
            "form, multiplier, weight and gradient live on different grids".into(),
        ));
    }
    let ones = vec![Complex::from(T::one()); grad.dimension];
    let mut num = grad.weighted_gram(&ones);
    for (i, &w) in weight.iter().enumerate() {
        num[(i, i)] += w;
    }
    Ok(CoercivityInput {
        form: form.clone(),
        phi: phi.to_vec(),
        numerator: num,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoercivityResult<T> {
    /// Exact supremum of the ratio from the dual eigenvalue problem.
    pub constant: T,
    /// Best ratio found by the randomized search; a lower bound of `constant`.
    pub sampled_constant: T,
    /// Maximizing corner weights `(c_im, c_re)` of the dual problem.
    pub dual_weights: (T, T),
    pub trials: usize,
    pub seed: u64,
    pub counterexample: bool,
}

fn matvec<T: LinalgReal>(m: &CMatrix<T>, u: &[Complex<T>]) -> Vec<Complex<T>> {
    m.rows()
        .into_iter()
        .map(|row| row.iter().zip(u).fold(Complex::zero(), |s, (a, b)| s + a * b))
        .collect()
}

fn dot<T: LinalgReal>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    u.iter().zip(v).fold(Complex::zero(), |s, (a, b)| s + a.conj() * b)
}

fn random_vector<T: LinalgReal>(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex<T>> {
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect()
}

/// Hermitian parts entering the denominator: `G = Im`-part of `phi F`
/// and `H = (F + F^*) / 2`.
fn denominator_parts<T: LinalgReal>(input: &CoercivityInput<T>) -> (CMatrix<T>, CMatrix<T>) {
    let f = &input.form;
    let n = f.nrows();
    let half = T::lit(0.5);
    let i = Complex::<T>::i();
    let g = CMatrix::from_shape_fn((n, n), |(r, c)| {
        (f[(r, c)] * input.phi[r] - f[(c, r)].conj() * input.phi[c]) * (-i * half)
    });
    let h = CMatrix::from_shape_fn((n, n), |(r, c)| (f[(r, c)] + f[(c, r)].conj()) * half);
    (g, h)
}

struct Sampler<T> {
    num: CMatrix<T>,
    g: CMatrix<T>,
    h: CMatrix<T>,
}

impl<T: LinalgReal> Sampler<T> {
    /// Ratio, and its ascent direction.
    fn ratio(&self, u: &[Complex<T>]) -> (T, T, Vec<Complex<T>>) {
        let nu = matvec(&self.num, u);
        let gu = matvec(&self.g, u);
        let hu = matvec(&self.h, u);
        let n = dot(u, &nu).re;
        let a = dot(u, &gu).re;
        let b = dot(u, &hu).re;
        let den = a.abs() + b.abs();
        let r = n / den;
        let (sa, sb) = (a.signum(), b.signum());
        let dir = (0..u.len()).map(|k| nu[k] - (gu[k] * sa + hu[k] * sb) * r).collect();
        (r, den / dot(u, u).re, dir)
    }

    fn ascend(&self, mut u: Vec<Complex<T>>) -> (T, T) {
        let (mut r, mut den, mut dir) = self.ratio(&u);
        let mut step = T::lit(0.1);
        for _ in 0..ASCENT_STEPS {
            let gn = dir.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            let un = u.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if !(gn > T::zero()) {
                break;
            }
            let scale = step * un / gn;
            let trial: Vec<Complex<T>> = u.iter().zip(&dir).map(|(a, d)| a + d * scale).collect();
            let (r2, den2, dir2) = self.ratio(&trial);
            if r2 > r {
                u = trial;
                r = r2;
                den = den2;
                dir = dir2;
                step = step * T::lit(1.5);
            } else {
                step = step * T::lit(0.5);
            }
        }
        (r, den)
    }
}

/// Reduced pencil `L^{-1} X L^{-*}` for the denominator parts, `N = L L^*`.
struct Dual<T> {
    n: usize,
    g: Vec<Complex<T>>,
    h: Vec<Complex<T>>,
}

impl<T: LinalgReal> Dual<T> {
    fn new(num: &CMatrix<T>, g: &CMatrix<T>, h: &CMatrix<T>) -> Result<Self, SpectraError> {
        let n = num.nrows();
        let mut l = to_buffer(num);
        T::cholesky(n, &mut l)?;
        let mut gb = to_buffer(g);
        let mut hb = to_buffer(h);
        T::reduce_generalized(n, &mut gb, &l)?;
        T::reduce_generalized(n, &mut hb, &l)?;
        Ok(Dual { n, g: gb, h: hb })
    }

    /// Lowest eigenvalue of `c.0 G + c.1 H` in the reduced pencil and its
    /// gradient in `c`.
    fn eval(&self, c: (T, T)) -> Result<(T, (T, T)), SpectraError> {
        let n = self.n;
        let mut buf: Vec<Complex<T>> = self.g.iter().zip(&self.h).map(|(a, b)| a * c.0 + b * c.1).collect();
        let (w, vecs) = T::eigenpairs_hermitian_range(n, &mut buf, 1, 1, true)?;
        // back to the column-major eigenvector the routine computed
        let z: Vec<Complex<T>> = vecs[0].iter().map(|x| x.conj()).collect();
        Ok((w[0], (quad_lower(&self.g, &z, n), quad_lower(&self.h, &z, n))))
    }
}

/// `z^* X z` for a Hermitian `X` stored in the column-major lower triangle.
fn quad_lower<T: LinalgReal>(x: &[Complex<T>], z: &[Complex<T>], n: usize) -> T {
    let mut s = T::zero();
    for j in 0..n {
        s += x[j * n + j].re * z[j].norm_sqr();
        for i in j + 1..n {
            s += (z[i].conj() * x[j * n + i] * z[j]).re * T::lit(2.0);
        }
    }
    s
}

/// Maximizes the concave function `c -> lambda_min(c)` on one edge of the
/// square by bisection on the directional derivative, with tangent-line bounds.
fn maximize_edge<T: LinalgReal>(
    dual: &Dual<T>,
    a: (T, T),
    b: (T, T),
    best: &mut (T, (T, T)),
) -> Result<(), SpectraError> {
    let at = |s: T| (a.0 + (b.0 - a.0) * s, a.1 + (b.1 - a.1) * s);
    let slope = |gr: (T, T)| gr.0 * (b.0 - a.0) + gr.1 * (b.1 - a.1);
    let (mut lo, mut hi) = (T::zero(), T::one());
    let (ga, gra) = dual.eval(a)?;
    let (gb, grb) = dual.eval(b)?;
    let (mut glo, mut dlo) = (ga, slope(gra));
    let (mut ghi, mut dhi) = (gb, slope(grb));
    for (v, c) in [(ga, a), (gb, b)] {
        if v > best.0 {
            *best = (v, c);
        }
    }
    let tol = T::lit(1e-9);
    for _ in 0..60 {
        // the two tangent lines cross above the concave graph
        let bound = if dlo > dhi {
            let s = ((ghi - glo) + dlo * lo - dhi * hi) / (dlo - dhi);
            glo + dlo * (s.max(lo).min(hi) - lo)
        } else {
            glo.max(ghi)
        };
        if bound <= best.0 + tol * best.0.abs().max(T::lit(1e-300)) || dlo <= T::zero() || dhi >= T::zero() {
            break;
        }
        let mid = (lo + hi) * T::lit(0.5);
        let (gm, grm) = dual.eval(at(mid))?;
        if gm > best.0 {
            *best = (gm, at(mid));
        }
        let dm = slope(grm);
        if dm > T::zero() {
            lo = mid;
            glo = gm;
            dlo = dm;
        } else {
            hi = mid;
            ghi = gm;
            dhi = dm;
        }
    }
    Ok(())
}

/// Supremum over `u` of `N(u) / (|Im <Fu, phi u>| + |Re <Fu, u>|)`.
///
/// The exact value is `1 / max_c lambda_min(c_1 G + c_2 H, N)` over the
/// boundary of `[-1, 1]^2`; the randomized search with gradient refinement of
/// the best candidates runs alongside and is reported as a lower bound.
pub fn coercivity_check<T: LinalgReal>(
    input: &CoercivityInput<T>,
    trials: usize,
    seed: u64,
) -> Result<CoercivityResult<T>, SpectraError> {
    if trials < 200 {
        return Err(SpectraError::Parameter(format!("{trials} trials, need at least 200")));
    }
    let n = input.form.nrows();
    let (g, h) = denominator_parts(input);
    let dual = Dual::new(&input.numerator, &g, &h)?;
    let one = T::one();
    let corners = [(one, -one), (one, one), (-one, one), (-one, -one)];
    let mut best = (T::neg_infinity(), (T::zero(), T::zero()));
    for k in 0..4 {
        maximize_edge(&dual, corners[k], corners[(k + 1) % 4], &mut best)?;
    }

    let sampler = Sampler {
        num: input.numerator.clone(),
        g,
        h,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scored: Vec<(T, T, Vec<Complex<T>>)> = (0..trials)
        .map(|_| {
            let u = random_vector(n, &mut rng);
            let (r, den, _) = sampler.ratio(&u);
            (r, den, u)
        })
        .collect();
    let mut degenerate = scored.iter().any(|s| !(s.1 > T::lit(DEGENERATE)));
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut sampled = scored.first().map_or(T::zero(), |s| s.0);
    for (_, _, u) in scored.into_iter().take(TOP_CANDIDATES) {
        let (r, den) = sampler.ascend(u);
        degenerate |= !(den > T::lit(DEGENERATE));
        sampled = sampled.max(r);
    }
    let counterexample = degenerate || !(best.0 > T::lit(DEGENERATE));
    Ok(CoercivityResult {
        constant: if counterexample {
            T::infinity()
        } else {
            T::one() / best.0
        },
        sampled_constant: sampled,
        dual_weights: best.1,
        trials,
        seed,
        counterexample,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaxMilgramCheck<T> {
    pub alpha_emp: T,
    pub sigma_min: T,
    pub phi_norm: T,
    pub holds: bool,
}

/// `sigma_min(A) >= alpha_emp / (1 + ||phi||)`, where `alpha_emp` is the
/// smallest `|<Au,u>| + |<Au, phi u>|` over unit samples. The samples are
/// random plus the lowest right singular vector of `A`, which is where the
/// infimum of the left side tends to sit.
pub fn laxmilgram_bound_check<T: LinalgReal>(
    a: &CMatrix<T>,
    phi: &CMatrix<T>,
    samples: usize,
    seed: u64,
) -> Result<LaxMilgramCheck<T>, SpectraError> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n || phi.dim() != (n, n) {
        return Err(SpectraError::Parameter("A and phi must be square and matched".into()));
    }
    let value = |u: &[Complex<T>]| {
        let au = matvec(a, u);
        let pu = matvec(phi, u);
        let nn = dot(u, u).re;
        (dot(u, &au).norm() + dot(&pu, &au).norm()) / nn
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alpha = T::infinity();
    for _ in 0..samples {
        alpha = alpha.min(value(&random_vector(n, &mut rng)));
    }
    let aha = CMatrix::from_shape_fn((n, n), |(i, j)| {
        (0..n).fold(Complex::zero(), |s, k| s + a[(k, i)].conj() * a[(k, j)])
    });
    let mut buf = to_buffer(&aha);
    let (_, vecs) = T::eigenpairs_hermitian_range(n, &mut buf, 1, 1, true)?;
    alpha = alpha.min(value(&vecs[0]));
    let s = singular_values(a, false)?;
    let sigma_min = *s.last().unwrap();
    let phi_norm = singular_values(phi, false)?[0];
    // the singular vector carries an error of order eps ||A||
    let slack = T::lit(1e-10) * T::one().max(s[0]);
    Ok(LaxMilgramCheck {
        alpha_emp: alpha,
        sigma_min,
        phi_norm,
        holds: sigma_min >= alpha / (T::one() + phi_norm) - slack,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenComparison<T> {
    /// Eigenvalues of the selfadjoint operator, ascending.
    pub nu: Vec<T>,
    /// Singular values of `P - shift`, ascending.
    pub mu: Vec<T>,
    pub window: RangeInclusive<usize>,
    /// `nu_n / (1 + mu_n)` over the window.
    pub nu_over_mu: Vec<T>,
    /// `mu_n / (1 + nu_n)` over the window.
    pub mu_over_nu: Vec<T>,
    pub sup_nu_over_mu: T,
    pub sup_mu_over_nu: T,
}

/// Two-sided comparison of `nu_n = eig(S)` and `mu_n = sv(P - shift)` over
/// `n in [1, N/4]`.
pub fn eigen_comparison<T: LinalgReal>(
    s: &CMatrix<T>,
    p: &CMatrix<T>,
    shift: Complex<T>,
) -> Result<EigenComparison<T>, SpectraError> {
    let n = s.nrows();
    if p.dim() != (n, n) || s.ncols() != n {
        return Err(SpectraError::Parameter("S and P are on different grids".into()));
    }
    let hi = n / 4;
    if hi < 1 {
        return Err(SpectraError::Window(format!("{n} unknowns leave no window")));
    }
    let mut nu: Vec<T> = super::eigenvalues_matrix(s, true)?
        .eigenvalues
        .into_iter()
        .map(|z| z.re)
        .collect();
    nu.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mu = operator_singular_values(p, false, shift)?;
    let nu_over_mu: Vec<T> = (0..hi).map(|k| nu[k] / (T::one() + mu[k])).collect();
    let mu_over_nu: Vec<T> = (0..hi).map(|k| mu[k] / (T::one() + nu[k])).collect();
    let sup = |v: &[T]| v.iter().fold(T::neg_infinity(), |m, &x| m.max(x));
    Ok(EigenComparison {
        sup_nu_over_mu: sup(&nu_over_mu),
        sup_mu_over_nu: sup(&mu_over_nu),
        nu,
        mu,
        window: 1..=hi,
        nu_over_mu,
        mu_over_nu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[Complex<f64>]) -> CMatrix<f64> {
        let n = v.len();
        CMatrix::from_shape_fn((n, n), |(i, j)| if i == j { v[i] } else { Complex::zero() })
    }

    #[test]
    fn identity_chain() {
        let a = diag(&[Complex::from(1.0); 4]);
        let phi = CMatrix::zeros((4, 4));
        let r = laxmilgram_bound_check(&a, &phi, 200, 1).unwrap();
        assert!((r.alpha_emp - 1.0).abs() < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn rotation_pair_chain() {
        let i = Complex::i();
        let a = diag(&[i, -i]);
        let phi = diag(&[Complex::from(1.0), Complex::from(-1.0)]);
        let r = laxmilgram_bound_check(&a, &phi, 500, 2).unwrap();
        assert!(r.alpha_emp >= 1.0 - 1e-12);
        assert!((r.sigma_min - 1.0).abs() < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn dual_matches_sampling_on_small_problem() {
        let n = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = CMatrix::from_shape_fn((n, n), |(i, j)| {
            let z: Vec<Complex<f64>> = random_vector(1, &mut rng);
            z[0] * 0.2
                + if i == j {
                    Complex::new(2.0 + i as f64, 1.0)
                } else {
                    Complex::zero()
                }
        });
        let phi: Vec<f64> = (0..n).map(|k| (k as f64 - 2.0) / 3.0).collect();
        let num = CMatrix::from_shape_fn((n, n), |(i, j)| {
            Complex::from(if i == j {
                3.0
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            })
        });
        let input = CoercivityInput {
            form: f,
            phi,
            numerator: num,
        };
        let r = coercivity_check(&input, 400, 3).unwrap();
        assert!(!r.counterexample);
        assert!(r.sampled_constant <= r.constant * (1.0 + 1e-9));
        assert!(
            r.sampled_constant >= 0.9 * r.constant,
            "{} vs {}",
            r.sampled_constant,
            r.constant
        );
    }
}
