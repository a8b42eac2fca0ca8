//! JSON form of a decomposition: classes with parts in the polynomial JSON
//! format and `h` monomials as part-index lists with exact coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{MultilinearPolynomial, PolyJson};
use crate::scalar::Scalar;
use crate::structure::{Class, Decomposition, HTerm, LoopRecord, Part};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartJson {
    pub poly: PolyJson,
    pub norm_sq: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HTermJson {
    pub parts: Vec<usize>,
    pub coeff: String,
    /// Coefficient with respect to the unit parts (informational).
    pub unit_coeff: f64,
    pub source_degree: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassJson {
    pub degree: usize,
    pub m: u32,
    pub parts: Vec<PartJson>,
    pub terms: Vec<HTermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub nvars: usize,
    pub constant: String,
    pub original_norm: f64,
    pub classes: Vec<ClassJson>,
    #[serde(default)]
    pub loops: Vec<LoopRecord>,
}

fn lit<S: Scalar>(s: &str) -> Result<S> {
    S::parse_literal(s).ok_or_else(|| Error::Parse { line: 0, msg: format!("bad coefficient '{s}'") })
}

impl<S: Scalar> Decomposition<S> {
    pub fn to_json(&self) -> DecompositionJson {
        DecompositionJson {
            nvars: self.nvars,
            constant: self.constant.to_literal(),
            original_norm: self.original_norm,
            classes: self
                .classes
                .iter()
                .map(|c| ClassJson {
                    degree: c.degree,
                    m: c.m,
                    parts: c
                        .parts
                        .iter()
                        .map(|p| PartJson { poly: p.poly.to_json(), norm_sq: p.norm_sq.to_literal() })
                        .collect(),
                    terms: c
                        .terms
                        .iter()
                        .map(|t| HTermJson {
                            parts: t.parts.clone(),
                            coeff: t.coeff.to_literal(),
                            unit_coeff: t.coeff.approx()
                                * t.parts.iter().map(|&j| c.parts[j].norm_sq.approx()).product::<f64>().sqrt(),
                            source_degree: t.source_degree,
                        })
                        .collect(),
                })
                .collect(),
            loops: self.loops.clone(),
        }
    }

    pub fn from_json(j: &DecompositionJson) -> Result<Self> {
        let mut classes = Vec::with_capacity(j.classes.len());
        for c in &j.classes {
            let mut parts = Vec::with_capacity(c.parts.len());
            for p in &c.parts {
                parts.push(Part { poly: MultilinearPolynomial::from_json(&p.poly)?, norm_sq: lit(&p.norm_sq)? });
            }
            let mut terms = Vec::with_capacity(c.terms.len());
            for t in &c.terms {
                terms.push(HTerm { parts: t.parts.clone(), coeff: lit(&t.coeff)?, source_degree: t.source_degree });
            }
            classes.push(Class { degree: c.degree, m: c.m, parts, terms });
        }
        Ok(Self {
            nvars: j.nvars,
            constant: lit(&j.constant)?,
            classes,
            loops: j.loops.clone(),
            original_norm: j.original_norm,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("decomposition serializes")
    }

    pub fn parse_json(src: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(src)?)
    }
}
