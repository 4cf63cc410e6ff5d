//! Polynomial-type fields: monomials in `x_i^e`, `|x_i|^e` and `sign(x_i)|x_i|^e`.

use std::cmp::Ordering;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::scalar::{is_finite_complex, Real};

/// How a single coordinate enters a monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    /// `x^e`, `e` a nonnegative integer.
    Power,
    /// `|x|^e`.
    Abs,
    /// `sign(x) |x|^e`, the odd extension of `|x|^e`.
    SignedAbs,
}

fn is_integer<T: Real>(e: T) -> bool {
    e == e.round()
}

fn is_even_integer<T: Real>(e: T) -> bool {
    is_integer(e) && (e / T::lit(2.0)) == (e / T::lit(2.0)).round()
}

/// Rewrites `(kind, e)` into the simplest equivalent kind, so that equal
/// functions share one representation.
fn normalize_kind<T: Real>(kind: FactorKind, e: T) -> FactorKind {
    match kind {
        FactorKind::Power => FactorKind::Power,
        FactorKind::Abs if is_even_integer(e) => FactorKind::Power,
        FactorKind::SignedAbs if is_integer(e) && !is_even_integer(e) => FactorKind::Power,
        k => k,
    }
}

fn eval_factor<T: Real>(x: T, e: T, kind: FactorKind) -> T {
    match kind {
        FactorKind::Power => {
            let n = e.to_i32().unwrap_or(0);
            x.powi(n)
        }
        FactorKind::Abs => x.abs().powf(e),
        FactorKind::SignedAbs => {
            if x == T::zero() {
                T::zero()
            } else {
                x.signum() * x.abs().powf(e)
            }
        }
    }
}

/// One monomial `coeff * prod_i factor_i(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialTerm<T: Real> {
    coeff: Complex<T>,
    exponents: Vec<T>,
    kinds: Vec<FactorKind>,
}

impl<T: Real> MonomialTerm<T> {
    /// Builds a term from per-coordinate exponents and abs flags.
    ///
    /// A non-integer exponent must carry the abs flag.
    pub fn new(coeff: Complex<T>, exponents: Vec<T>, abs_flags: Vec<bool>) -> Result<Self, ModelError> {
        let kinds = abs_flags
            .iter()
            .map(|&a| if a { FactorKind::Abs } else { FactorKind::Power })
            .collect();
        Self::with_kinds(coeff, exponents, kinds)
    }

    pub fn with_kinds(coeff: Complex<T>, exponents: Vec<T>, kinds: Vec<FactorKind>) -> Result<Self, ModelError> {
        if exponents.len() != kinds.len() {
            return Err(ModelError::InvalidTerm(format!(
                "{} exponents but {} factor kinds",
                exponents.len(),
                kinds.len()
            )));
        }
        if !is_finite_complex(coeff) {
            return Err(ModelError::NonFinite("term coefficient".into()));
        }
        let mut out = Vec::with_capacity(kinds.len());
        for (&e, &k) in exponents.iter().zip(&kinds) {
            if !e.is_finite() || e < T::zero() {
                return Err(ModelError::InvalidTerm(format!("exponent {e} must be finite and >= 0")));
            }
            if k == FactorKind::Power && !is_integer(e) {
                return Err(ModelError::InvalidTerm(format!(
                    "non-integer exponent {e} needs the abs flag"
                )));
            }
            out.push(normalize_kind(k, e));
        }
        Ok(MonomialTerm {
            coeff,
            exponents,
            kinds: out,
        })
    }

    /// `coeff * x_axis^e` in dimension `dim`.
    pub fn axis(coeff: Complex<T>, dim: usize, axis: usize, e: T, kind: FactorKind) -> Result<Self, ModelError> {
        let mut exponents = vec![T::zero(); dim];
        let mut kinds = vec![FactorKind::Power; dim];
        exponents[axis] = e;
        kinds[axis] = kind;
        Self::with_kinds(coeff, exponents, kinds)
    }

    pub fn constant(coeff: Complex<T>, dim: usize) -> Self {
        MonomialTerm {
            coeff,
            exponents: vec![T::zero(); dim],
            kinds: vec![FactorKind::Power; dim],
        }
    }

    pub fn coeff(&self) -> Complex<T> {
        self.coeff
    }

    pub fn exponents(&self) -> &[T] {
        &self.exponents
    }

    pub fn kinds(&self) -> &[FactorKind] {
        &self.kinds
    }

    pub fn abs_flags(&self) -> Vec<bool> {
        self.kinds.iter().map(|&k| k != FactorKind::Power).collect()
    }

    pub fn dimension(&self) -> usize {
        self.exponents.len()
    }

    pub fn eval(&self, x: &[T]) -> Complex<T> {
        let mut prod = T::one();
        for ((&xi, &e), &k) in x.iter().zip(&self.exponents).zip(&self.kinds) {
            prod *= eval_factor(xi, e, k);
        }
        self.coeff * prod
    }

    /// Exact derivative along `axis`; `None` when it vanishes identically.
    pub fn derivative(&self, axis: usize) -> Result<Option<Self>, ModelError> {
        let e = self.exponents[axis];
        let kind = self.kinds[axis];
        if e == T::zero() {
            return match kind {
                FactorKind::SignedAbs => Err(ModelError::NonDifferentiable {
                    axis,
                    exponent: e.to_f64_lossy(),
                }),
                _ => Ok(None),
            };
        }
        let new_kind = match kind {
            FactorKind::Power => FactorKind::Power,
            FactorKind::Abs | FactorKind::SignedAbs => {
                if e < T::one() {
                    return Err(ModelError::NonDifferentiable {
                        axis,
                        exponent: e.to_f64_lossy(),
                    });
                }
                if kind == FactorKind::Abs {
                    FactorKind::SignedAbs
                } else {
                    FactorKind::Abs
                }
            }
        };
        let mut exponents = self.exponents.clone();
        let mut kinds = self.kinds.clone();
        exponents[axis] = e - T::one();
        kinds[axis] = normalize_kind(new_kind, exponents[axis]);
        Ok(Some(MonomialTerm {
            coeff: self.coeff * e,
            exponents,
            kinds,
        }))
    }

    /// Whether the term only depends on `axis`.
    pub fn is_axis_term(&self, axis: usize) -> bool {
        self.exponents
            .iter()
            .enumerate()
            .all(|(i, &e)| i == axis || e == T::zero())
    }

    fn same_monomial(&self, other: &Self) -> bool {
        self.exponents == other.exponents && self.kinds == other.kinds
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.exponents.iter().zip(&other.exponents) {
            match a.partial_cmp(b).unwrap_or(Ordering::Equal) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.kinds.cmp(&other.kinds)
    }

    pub fn cast<U: Real>(&self) -> MonomialTerm<U> {
        MonomialTerm {
            coeff: crate::scalar::cast_complex(self.coeff),
            exponents: self.exponents.iter().map(|&e| crate::scalar::cast(e)).collect(),
            kinds: self.kinds.clone(),
        }
    }
}

/// Finite sum of monomials on `R^d`, kept in canonical order
/// (lexicographic in the exponents, like terms merged, zeros dropped).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T: Real> {
    dimension: usize,
    terms: Vec<MonomialTerm<T>>,
}

impl<T: Real> ScalarField<T> {
    pub fn zero(dimension: usize) -> Self {
        ScalarField {
            dimension,
            terms: Vec::new(),
        }
    }

    pub fn new(dimension: usize, terms: Vec<MonomialTerm<T>>) -> Result<Self, ModelError> {
        for t in &terms {
            if t.dimension() != dimension {
                return Err(ModelError::Dimension {
                    expected: dimension,
                    got: t.dimension(),
                });
            }
        }
        Ok(Self::canonical(dimension, terms))
    }

    pub fn constant(dimension: usize, c: Complex<T>) -> Self {
        Self::canonical(dimension, vec![MonomialTerm::constant(c, dimension)])
    }

    fn canonical(dimension: usize, mut terms: Vec<MonomialTerm<T>>) -> Self {
        terms.sort_by(|a, b| a.canonical_cmp(b));
        let mut merged: Vec<MonomialTerm<T>> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.same_monomial(&t) => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        ScalarField {
            dimension,
            terms: merged,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> &[MonomialTerm<T>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every coefficient has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.im == T::zero())
    }

    pub fn check_point(&self, x: &[T]) -> Result<(), ModelError> {
        if x.len() != self.dimension {
            return Err(ModelError::Dimension {
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[T]) -> Result<Complex<T>, ModelError> {
        self.check_point(x)?;
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the dimension check, for hot loops over a grid
    /// whose dimension was validated once.
    pub fn eval_unchecked(&self, x: &[T]) -> Complex<T> {
        self.terms.iter().fold(Complex::zero(), |acc, t| acc + t.eval(x))
    }

    pub fn partial(&self, axis: usize) -> Result<Self, ModelError> {
        if axis >= self.dimension {
            return Err(ModelError::Dimension {
                expected: self.dimension,
                got: axis + 1,
            });
        }
        let mut out = Vec::new();
        for t in &self.terms {
            if let Some(d) = t.derivative(axis)? {
                out.push(d);
            }
        }
        Ok(Self::canonical(self.dimension, out))
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| MonomialTerm {
                coeff: t.coeff * c,
                ..t.clone()
            })
            .collect();
        Self::canonical(self.dimension, terms)
    }

    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| MonomialTerm {
                coeff: -t.coeff,
                ..t.clone()
            })
            .collect();
        ScalarField {
            dimension: self.dimension,
            terms,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ModelError> {
        if other.dimension != self.dimension {
            return Err(ModelError::Dimension {
                expected: self.dimension,
                got: other.dimension,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self::canonical(self.dimension, terms))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ModelError> {
        self.add(&other.neg())
    }

    /// Largest exponent carried by a term along `axis` (0 when none).
    pub fn max_exponent(&self, axis: usize) -> T {
        self.terms.iter().map(|t| t.exponents[axis]).fold(T::zero(), T::max)
    }

    /// Leading behaviour of the field restricted to the `axis` half-line
    /// `t * direction * e_axis`, `t -> +inf`: returns `(exponent, |coefficient|)`
    /// of the dominant surviving monomial, if any.
    pub fn axis_leading(&self, axis: usize, direction: T) -> Option<(T, T)> {
        let mut exps: Vec<T> = self
            .terms
            .iter()
            .filter(|t| t.is_axis_term(axis))
            .map(|t| t.exponents[axis])
            .collect();
        exps.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        exps.dedup();
        for e in exps {
            let c: Complex<T> = self
                .terms
                .iter()
                .filter(|t| t.is_axis_term(axis) && t.exponents[axis] == e)
                .map(|t| t.coeff * eval_factor(direction, e, t.kinds[axis]))
                .fold(Complex::zero(), |a, b| a + b);
            if !c.is_zero() {
                return Some((e, c.norm()));
            }
        }
        None
    }

    pub fn cast<U: Real>(&self) -> ScalarField<U> {
        ScalarField::canonical(self.dimension, self.terms.iter().map(|t| t.cast()).collect())
    }
}

/// Real vector potential `A = (A_1, ..., A_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField<T: Real> {
    components: Vec<ScalarField<T>>,
}

impl<T: Real> VectorField<T> {
    pub fn new(components: Vec<ScalarField<T>>) -> Result<Self, ModelError> {
        let d = components.len();
        for (k, c) in components.iter().enumerate() {
            if c.dimension() != d {
                return Err(ModelError::Dimension {
                    expected: d,
                    got: c.dimension(),
                });
            }
            if !c.is_real() {
                return Err(ModelError::InvalidSpec(format!(
                    "magnetic potential component A_{} has a complex coefficient",
                    k + 1
                )));
            }
        }
        Ok(VectorField { components })
    }

    pub fn zero(dimension: usize) -> Self {
        VectorField {
            components: (0..dimension).map(|_| ScalarField::zero(dimension)).collect(),
        }
    }

    pub fn components(&self) -> &[ScalarField<T>] {
        &self.components
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(ScalarField::is_zero)
    }

    pub fn cast<U: Real>(&self) -> VectorField<U> {
        VectorField {
            components: self.components.iter().map(|c| c.cast()).collect(),
        }
    }
}

/// `d x d` matrix of fields, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMatrix<T: Real> {
    dimension: usize,
    entries: Vec<ScalarField<T>>,
}

impl<T: Real> FieldMatrix<T> {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entry(&self, j: usize, k: usize) -> &ScalarField<T> {
        &self.entries[j * self.dimension + k]
    }

    /// Upper-triangle entries `(j, k, B_jk)` with `j < k`.
    pub fn upper(&self) -> impl Iterator<Item = (usize, usize, &ScalarField<T>)> {
        let d = self.dimension;
        (0..d).flat_map(move |j| (j + 1..d).map(move |k| (j, k, self.entry(j, k))))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ScalarField::is_zero)
    }

    pub fn is_antisymmetric(&self) -> bool {
        let d = self.dimension;
        (0..d).all(|j| self.entry(j, j).is_zero() && (0..d).all(|k| *self.entry(j, k) == self.entry(k, j).neg()))
    }
}

/// Magnetic field matrix `B_jk = d_k A_j - d_j A_k`, by exact differentiation.
pub fn magnetic_matrix<T: Real>(a: &VectorField<T>) -> Result<FieldMatrix<T>, ModelError> {
    let d = a.dimension();
    let mut entries = vec![ScalarField::zero(d); d * d];
    for j in 0..d {
        for k in j + 1..d {
            let bjk = a.components[j].partial(k)?.sub(&a.components[k].partial(j)?)?;
            entries[k * d + j] = bjk.neg();
            entries[j * d + k] = bjk;
        }
    }
    Ok(FieldMatrix { dimension: d, entries })
}

/// Evaluates a field at `x`.
pub fn eval_field<T: Real>(field: &ScalarField<T>, x: &[T]) -> Result<Complex<T>, ModelError> {
    field.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn monomial_evaluation() {
        let f = ScalarField::new(1, vec![MonomialTerm::new(c(1.0, 0.0), vec![3.0], vec![false]).unwrap()]).unwrap();
        assert_eq!(f.eval(&[2.0]).unwrap(), c(8.0, 0.0));
    }

    #[test]
    fn abs_power_evaluation() {
        let f = ScalarField::new(1, vec![MonomialTerm::new(c(0.0, 1.0), vec![1.5], vec![true]).unwrap()]).unwrap();
        let v = f.eval(&[-4.0]).unwrap();
        assert!((v - c(0.0, 8.0)).norm() < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let f = ScalarField::<f64>::zero(2);
        assert!(matches!(
            f.eval(&[1.0]),
            Err(ModelError::Dimension { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn non_integer_power_needs_abs_flag() {
        assert!(MonomialTerm::new(c(1.0, 0.0), vec![1.5], vec![false]).is_err());
        assert!(MonomialTerm::new(c(1.0, 0.0), vec![-1.0], vec![true]).is_err());
    }

    #[test]
    fn like_terms_merge_and_cancel() {
        let t = MonomialTerm::new(c(1.0, 0.0), vec![2.0], vec![false]).unwrap();
        let u = MonomialTerm::new(c(-1.0, 0.0), vec![2.0], vec![true]).unwrap();
        // |x|^2 normalizes to x^2, so the two cancel
        let f = ScalarField::new(1, vec![t, u]).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn derivative_of_abs_power_is_odd() {
        let t = MonomialTerm::new(c(1.0, 0.0), vec![2.5], vec![true]).unwrap();
        let f = ScalarField::new(1, vec![t]).unwrap();
        let df = f.partial(0).unwrap();
        let v = df.eval(&[-4.0]).unwrap();
        assert!((v.re + 2.5 * 8.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_below_one_is_rejected() {
        let t = MonomialTerm::new(c(1.0, 0.0), vec![0.5], vec![true]).unwrap();
        let f = ScalarField::new(1, vec![t]).unwrap();
        assert!(matches!(f.partial(0), Err(ModelError::NonDifferentiable { .. })));
    }

    #[test]
    fn curl_of_zero_potential_vanishes() {
        let b = magnetic_matrix(&VectorField::<f64>::zero(2)).unwrap();
        assert!(b.is_zero());
    }

    #[test]
    fn curl_of_power_gauge() {
        // A = (0, x^m/m) -> B_12 = -x^(m-1)
        for m in 2..6 {
            let a2 = ScalarField::new(
                2,
                vec![MonomialTerm::new(c(1.0 / m as f64, 0.0), vec![m as f64, 0.0], vec![false, false]).unwrap()],
            )
            .unwrap();
            let a = VectorField::new(vec![ScalarField::zero(2), a2]).unwrap();
            let b = magnetic_matrix(&a).unwrap();
            assert!(b.is_antisymmetric());
            for &(x, y) in &[(1.3, -0.2), (-2.0, 5.0)] {
                let v = b.entry(0, 1).eval(&[x, y]).unwrap();
                assert!((v.re + f64::powi(x, m - 1)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn axis_leading_sees_cancellation() {
        // x^3 + |x|^3 vanishes on the negative half-axis
        let f = ScalarField::new(
            1,
            vec![
                MonomialTerm::new(c(1.0, 0.0), vec![3.0], vec![false]).unwrap(),
                MonomialTerm::new(c(1.0, 0.0), vec![3.0], vec![true]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(f.axis_leading(0, 1.0), Some((3.0, 2.0)));
        assert_eq!(f.axis_leading(0, -1.0), None);
        let _ = PI;
    }
}
