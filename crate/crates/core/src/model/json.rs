//! On-disk spec format. Terms are written in canonical order, so equal
//! operators serialize to identical bytes.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::family::Family;
use super::field::{FactorKind, MonomialTerm, ScalarField, VectorField};
use super::spec::{DomainKind, OperatorSpec};
use super::ModelError;
use crate::scalar::{cast, cast_complex, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRepr {
    pub re: f64,
    pub im: f64,
    pub exponents: Vec<f64>,
    pub abs: Vec<bool>,
    /// Marks `sign(x)|x|^e` factors; omitted when all false.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<Vec<bool>>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyRepr {
    Oscillator1d {
        theta: f64,
        alpha: f64,
        #[serde(default = "one")]
        c: f64,
        #[serde(default)]
        sign_changing: bool,
        #[serde(default)]
        beta1: Complex<f64>,
        #[serde(default)]
        beta2: Complex<f64>,
    },
    AiryHalfLine {
        theta: f64,
        #[serde(default = "one")]
        alpha: f64,
    },
    Holomorphic2d {
        n: u32,
    },
    DilatedModel {
        m: u32,
        k: u32,
        #[serde(default)]
        alpha: f64,
    },
    HalfPlaneModel {
        theta: f64,
        n: u32,
    },
    Custom,
}

/// JSON spec file. With a `family`, omitted fields are regenerated from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<f64>>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<TermRepr>>>,
    #[serde(rename = "V1", default, skip_serializing_if = "Option::is_none")]
    pub v1: Option<Vec<TermRepr>>,
    #[serde(rename = "V2", default, skip_serializing_if = "Option::is_none")]
    pub v2: Option<Vec<TermRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyRepr>,
}

fn term_to_repr<T: Real>(t: &MonomialTerm<T>) -> TermRepr {
    let signed: Vec<bool> = t.kinds().iter().map(|&k| k == FactorKind::SignedAbs).collect();
    TermRepr {
        re: t.coeff().re.to_f64_lossy(),
        im: t.coeff().im.to_f64_lossy(),
        exponents: t.exponents().iter().map(|e| e.to_f64_lossy()).collect(),
        abs: t.abs_flags(),
        sign: signed.iter().any(|&s| s).then_some(signed),
    }
}

fn field_to_repr<T: Real>(f: &ScalarField<T>) -> Vec<TermRepr> {
    f.terms().iter().map(term_to_repr).collect()
}

fn repr_to_field<T: Real>(dim: usize, terms: &[TermRepr]) -> Result<ScalarField<T>, ModelError> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if t.abs.len() != t.exponents.len() {
            return Err(ModelError::Json(format!(
                "term has {} exponents but {} abs flags",
                t.exponents.len(),
                t.abs.len()
            )));
        }
        let sign = t.sign.clone().unwrap_or_else(|| vec![false; t.abs.len()]);
        if sign.len() != t.abs.len() {
            return Err(ModelError::Json("sign flags do not match exponents".into()));
        }
        let kinds = t
            .abs
            .iter()
            .zip(&sign)
            .map(|(&a, &s)| match (a, s) {
                (_, true) => FactorKind::SignedAbs,
                (true, false) => FactorKind::Abs,
                (false, false) => FactorKind::Power,
            })
            .collect();
        let coeff = Complex::new(T::lit(t.re), T::lit(t.im));
        out.push(MonomialTerm::with_kinds(
            coeff,
            t.exponents.iter().map(|&e| T::lit(e)).collect(),
            kinds,
        )?);
    }
    ScalarField::new(dim, out)
}

fn family_to_repr<T: Real>(f: &Family<T>) -> FamilyRepr {
    match *f {
        Family::Oscillator1d {
            theta,
            alpha,
            c,
            sign_changing,
            beta1,
            beta2,
        } => FamilyRepr::Oscillator1d {
            theta: theta.to_f64_lossy(),
            alpha: alpha.to_f64_lossy(),
            c: c.to_f64_lossy(),
            sign_changing,
            beta1: cast_complex(beta1),
            beta2: cast_complex(beta2),
        },
        Family::AiryHalfLine { theta, alpha } => FamilyRepr::AiryHalfLine {
            theta: theta.to_f64_lossy(),
            alpha: alpha.to_f64_lossy(),
        },
        Family::Holomorphic2d { n } => FamilyRepr::Holomorphic2d { n },
        Family::DilatedModel { m, k, alpha } => FamilyRepr::DilatedModel {
            m,
            k,
            alpha: alpha.to_f64_lossy(),
        },
        Family::HalfPlaneModel { theta, n } => FamilyRepr::HalfPlaneModel {
            theta: theta.to_f64_lossy(),
            n,
        },
    }
}

fn repr_to_family<T: Real>(f: &FamilyRepr) -> Option<Family<T>> {
    Some(match *f {
        FamilyRepr::Oscillator1d {
            theta,
            alpha,
            c,
            sign_changing,
            beta1,
            beta2,
        } => Family::Oscillator1d {
            theta: T::lit(theta),
            alpha: T::lit(alpha),
            c: T::lit(c),
            sign_changing,
            beta1: cast_complex(beta1),
            beta2: cast_complex(beta2),
        },
        FamilyRepr::AiryHalfLine { theta, alpha } => Family::AiryHalfLine {
            theta: T::lit(theta),
            alpha: T::lit(alpha),
        },
        FamilyRepr::Holomorphic2d { n } => Family::Holomorphic2d { n },
        FamilyRepr::DilatedModel { m, k, alpha } => Family::DilatedModel {
            m,
            k,
            alpha: T::lit(alpha),
        },
        FamilyRepr::HalfPlaneModel { theta, n } => Family::HalfPlaneModel {
            theta: T::lit(theta),
            n,
        },
        FamilyRepr::Custom => return None,
    })
}

impl<T: Real> OperatorSpec<T> {
    pub fn to_spec_file(&self) -> SpecFile {
        SpecFile {
            dimension: Some(self.dimension()),
            domain: Some(self.domain()),
            angles: Some(self.angles().iter().map(|&a| cast(a)).collect()),
            a: Some(self.a().components().iter().map(field_to_repr).collect()),
            v1: Some(field_to_repr(self.v1())),
            v2: Some(field_to_repr(self.v2())),
            family: self.family().map(family_to_repr),
        }
    }

    pub fn from_spec_file(file: &SpecFile) -> Result<Self, ModelError> {
        let family = file.family.as_ref().and_then(repr_to_family::<T>);
        let regen = family.clone().map(OperatorSpec::from_family).transpose()?;
        let dimension = file
            .dimension
            .or(regen.as_ref().map(OperatorSpec::dimension))
            .ok_or_else(|| ModelError::Json("missing \"dimension\"".into()))?;
        let domain = file
            .domain
            .or(regen.as_ref().map(OperatorSpec::domain))
            .unwrap_or(DomainKind::FullSpace);
        let angles = match (&file.angles, &regen) {
            (Some(a), _) => a.iter().map(|&v| T::lit(v)).collect(),
            (None, Some(r)) => r.angles().to_vec(),
            (None, None) => vec![T::zero(); dimension],
        };
        let a = match (&file.a, &regen) {
            (Some(comps), _) => {
                if comps.len() != dimension {
                    return Err(ModelError::Json(format!(
                        "\"A\" has {} components, dimension is {dimension}",
                        comps.len()
                    )));
                }
                VectorField::new(
                    comps
                        .iter()
                        .map(|c| repr_to_field(dimension, c))
                        .collect::<Result<_, _>>()?,
                )?
            }
            (None, Some(r)) => r.a().clone(),
            (None, None) => VectorField::zero(dimension),
        };
        let pick = |f: &Option<Vec<TermRepr>>, from: Option<&ScalarField<T>>| match (f, from) {
            (Some(t), _) => repr_to_field(dimension, t),
            (None, Some(r)) => Ok(r.clone()),
            (None, None) => Ok(ScalarField::zero(dimension)),
        };
        let v1 = pick(&file.v1, regen.as_ref().map(OperatorSpec::v1))?;
        let v2 = pick(&file.v2, regen.as_ref().map(OperatorSpec::v2))?;
        OperatorSpec::new(dimension, domain, angles, a, v1, v2, family)
    }

    pub fn from_json_str(s: &str) -> Result<Self, ModelError> {
        let file: SpecFile = serde_json::from_str(s).map_err(|e| ModelError::Json(e.to_string()))?;
        Self::from_spec_file(&file)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec_file()).expect("spec file is always serializable")
    }

    /// SHA-256 of the canonical compact serialization, hex encoded.
    pub fn spec_hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.to_spec_file()).expect("spec file is always serializable");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_every_family() {
        let fams = vec![
            Family::<f64>::harmonic(),
            Family::complex_cubic(),
            Family::oscillator(0.4, 2.5),
            Family::AiryHalfLine {
                theta: std::f64::consts::FRAC_PI_2,
                alpha: 1.0,
            },
            Family::Holomorphic2d { n: 2 },
            Family::DilatedModel {
                m: 3,
                k: 2,
                alpha: -0.02,
            },
            Family::HalfPlaneModel { theta: 1.0, n: 1 },
        ];
        for f in fams {
            let s = OperatorSpec::from_family(f).unwrap();
            let json = s.to_json_string();
            let back = OperatorSpec::<f64>::from_json_str(&json).unwrap();
            assert_eq!(back, s);
            assert_eq!(back.spec_hash(), s.spec_hash());
        }
    }

    #[test]
    fn family_only_file_regenerates_fields() {
        let s = OperatorSpec::<f64>::from_json_str(r#"{"family": {"tag": "dilated_model", "m": 2, "k": 1}}"#).unwrap();
        assert_eq!(s.dimension(), 2);
        assert_eq!(s.a().components()[1].terms().len(), 1);
    }

    #[test]
    fn mismatched_family_is_rejected() {
        let s = OperatorSpec::from_family(Family::<f64>::harmonic()).unwrap();
        let mut file = s.to_spec_file();
        file.v1.as_mut().unwrap()[0].re = 3.0;
        assert!(matches!(
            OperatorSpec::<f64>::from_spec_file(&file),
            Err(ModelError::InvalidSpec(_))
        ));
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(OperatorSpec::<f64>::from_json_str(r#"{"dimension": 1, "bogus": 2}"#).is_err());
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let json = r#"{"dimension": 1, "V1": [
            {"re": 1, "im": 0, "exponents": [4], "abs": [false]},
            {"re": 2, "im": 0, "exponents": [2], "abs": [false]}]}"#;
        let s = OperatorSpec::<f64>::from_json_str(json).unwrap();
        let out = s.to_spec_file();
        let exps: Vec<f64> = out.v1.unwrap().iter().map(|t| t.exponents[0]).collect();
        assert_eq!(exps, vec![2.0, 4.0]);
    }
}
