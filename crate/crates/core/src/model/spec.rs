use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::family::Family;
use super::field::{magnetic_matrix, FieldMatrix, ScalarField, VectorField};
use super::ModelError;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    FullSpace,
    /// `x_d > 0`.
    HalfSpace,
}

/// Operator `sum_k e^{2i alpha_k}(-d_{A_k}^2) + V1 + V2` on a full or half space.
///
/// Immutable once built; the magnetic matrix is derived at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec<T: Real> {
    dimension: usize,
    domain: DomainKind,
    angles: Vec<T>,
    a: VectorField<T>,
    v1: ScalarField<T>,
    v2: ScalarField<T>,
    family: Option<Family<T>>,
    b: FieldMatrix<T>,
}

/// Exact first derivatives needed by the hypothesis checks and the assembly.
#[derive(Debug, Clone)]
pub struct DerivedFields<T: Real> {
    /// `d_i V1`.
    pub grad_v1: Vec<ScalarField<T>>,
    /// `(j, k, [d_i B_jk])` for `j < k`.
    pub grad_b: Vec<(usize, usize, Vec<ScalarField<T>>)>,
    /// `d_k A_k`.
    pub div_parts: Vec<ScalarField<T>>,
}

impl<T: Real> OperatorSpec<T> {
    pub fn new(
        dimension: usize,
        domain: DomainKind,
        angles: Vec<T>,
        a: VectorField<T>,
        v1: ScalarField<T>,
        v2: ScalarField<T>,
        family: Option<Family<T>>,
    ) -> Result<Self, ModelError> {
        if !(1..=2).contains(&dimension) {
            return Err(ModelError::InvalidSpec(format!(
                "dimension {dimension} not in {{1, 2}}"
            )));
        }
        for (what, got) in [
            ("angles", angles.len()),
            ("A", a.dimension()),
            ("V1", v1.dimension()),
            ("V2", v2.dimension()),
        ] {
            if got != dimension {
                return Err(ModelError::InvalidSpec(format!(
                    "{what} has dimension {got}, operator has {dimension}"
                )));
            }
        }
        let quarter = T::FRAC_PI_4();
        for (k, &al) in angles.iter().enumerate() {
            if !al.is_finite() || al.abs() >= quarter {
                return Err(ModelError::InvalidSpec(format!(
                    "angle alpha_{} = {al} outside (-pi/4, pi/4)",
                    k + 1
                )));
            }
        }
        let b = magnetic_matrix(&a)?;
        let spec = OperatorSpec {
            dimension,
            domain,
            angles,
            a,
            v1,
            v2,
            family,
            b,
        };
        if let Some(f) = &spec.family {
            let regen = f.build()?;
            if !spec.same_fields(&regen) {
                return Err(ModelError::InvalidSpec(format!(
                    "fields do not match the {} family parameters",
                    f.tag()
                )));
            }
        }
        Ok(spec)
    }

    pub(crate) fn from_parts_unchecked(
        domain: DomainKind,
        angles: Vec<T>,
        a: VectorField<T>,
        v1: ScalarField<T>,
        v2: ScalarField<T>,
        family: Option<Family<T>>,
    ) -> Result<Self, ModelError> {
        let b = magnetic_matrix(&a)?;
        Ok(OperatorSpec {
            dimension: angles.len(),
            domain,
            angles,
            a,
            v1,
            v2,
            family,
            b,
        })
    }

    /// Builds the spec of a cataloged family.
    pub fn from_family(family: Family<T>) -> Result<Self, ModelError> {
        let s = family.build()?;
        let quarter = T::FRAC_PI_4();
        if s.angles.iter().any(|a| a.abs() >= quarter) {
            return Err(ModelError::InvalidSpec("family angles outside (-pi/4, pi/4)".into()));
        }
        Ok(s)
    }

    fn same_fields(&self, other: &Self) -> bool {
        let tol = T::lit(64.0) * T::epsilon();
        let close_field = |f: &ScalarField<T>, g: &ScalarField<T>| {
            f.terms().len() == g.terms().len()
                && f.terms().iter().zip(g.terms()).all(|(s, t)| {
                    s.exponents() == t.exponents()
                        && s.kinds() == t.kinds()
                        && (s.coeff() - t.coeff()).norm() <= tol * T::one().max(t.coeff().norm())
                })
        };
        self.dimension == other.dimension
            && self.domain == other.domain
            && self
                .angles
                .iter()
                .zip(&other.angles)
                .all(|(a, b)| (*a - *b).abs() <= tol)
            && self
                .a
                .components()
                .iter()
                .zip(other.a.components())
                .all(|(f, g)| close_field(f, g))
            && close_field(&self.v1, &other.v1)
            && close_field(&self.v2, &other.v2)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn domain(&self) -> DomainKind {
        self.domain
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn a(&self) -> &VectorField<T> {
        &self.a
    }

    pub fn v1(&self) -> &ScalarField<T> {
        &self.v1
    }

    pub fn v2(&self) -> &ScalarField<T> {
        &self.v2
    }

    pub fn family(&self) -> Option<&Family<T>> {
        self.family.as_ref()
    }

    pub fn magnetic(&self) -> &FieldMatrix<T> {
        &self.b
    }

    /// `K = min_k cos(2 alpha_k)`.
    pub fn coercivity_k(&self) -> T {
        self.angles.iter().map(|&a| (a + a).cos()).fold(T::infinity(), T::min)
    }

    /// `V1(x) + V2(x)`.
    pub fn potential(&self, x: &[T]) -> Result<Complex<T>, ModelError> {
        Ok(self.v1.eval(x)? + self.v2.eval(x)?)
    }

    /// `|B(x)|^2 = sum_{j<k} B_jk(x)^2`.
    pub fn magnetic_norm_sqr(&self, x: &[T]) -> Result<T, ModelError> {
        let mut s = T::zero();
        for (_, _, f) in self.b.upper() {
            s += f.eval(x)?.norm_sqr();
        }
        Ok(s)
    }

    pub fn weight_m(&self, x: &[T]) -> Result<T, ModelError> {
        let v = self.v1.eval(x)?.norm_sqr();
        Ok((v + self.magnetic_norm_sqr(x)? + T::one()).sqrt())
    }

    /// Is `x` inside the (closed) domain?
    pub fn contains(&self, x: &[T]) -> bool {
        match self.domain {
            DomainKind::FullSpace => true,
            DomainKind::HalfSpace => x.last().is_some_and(|&t| t >= T::zero()),
        }
    }

    pub fn derived(&self) -> Result<DerivedFields<T>, ModelError> {
        let d = self.dimension;
        let grad_v1 = (0..d).map(|i| self.v1.partial(i)).collect::<Result<Vec<_>, _>>()?;
        let mut grad_b = Vec::new();
        for (j, k, f) in self.b.upper() {
            let g = (0..d).map(|i| f.partial(i)).collect::<Result<Vec<_>, _>>()?;
            grad_b.push((j, k, g));
        }
        let div_parts = (0..d)
            .map(|k| self.a.components()[k].partial(k))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DerivedFields {
            grad_v1,
            grad_b,
            div_parts,
        })
    }

    /// `d_k A_k` for each axis, the only derivatives the assembly needs.
    pub fn derived_for_assembly(&self) -> Result<Vec<ScalarField<T>>, ModelError> {
        (0..self.dimension).map(|k| self.a.components()[k].partial(k)).collect()
    }

    /// Same operator with the family tag dropped (treated as custom).
    pub fn without_family(&self) -> Self {
        OperatorSpec {
            family: None,
            ..self.clone()
        }
    }

    pub fn cast<U: Real>(&self) -> OperatorSpec<U> {
        OperatorSpec {
            dimension: self.dimension,
            domain: self.domain,
            angles: self.angles.iter().map(|&a| crate::scalar::cast(a)).collect(),
            a: self.a.cast(),
            v1: self.v1.cast(),
            v2: self.v2.cast(),
            family: self.family.as_ref().map(Family::cast),
            b: magnetic_matrix(&self.a.cast()).expect("casting preserves differentiability"),
        }
    }
}
