//! Text and JSON polynomial formats.
//!
//! Text: one term per line, `coeff * x<i> * x<j> ...`, `#` starts a comment,
//! `x<i>^<a>` is accepted for general polynomials, and an optional
//! `nvars <n>` line fixes the variable count (otherwise `max index + 1`).
//! Indices are zero-based.
//!
//! JSON: `{"nvars": n, "terms": [{"vars": [...], "coeff": "3/4"}]}`. A
//! repeated index in `vars` denotes a power and is rejected for the
//! multilinear type.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{GeneralPolynomial, Monomial, MultilinearPolynomial, PowerProduct};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffLiteral {
    Text(String),
    Number(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub vars: Vec<u32>,
    pub coeff: CoeffLiteral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub nvars: usize,
    pub terms: Vec<TermJson>,
}

fn parse_coeff<S: Scalar>(c: &CoeffLiteral, line: usize) -> Result<S> {
    match c {
        CoeffLiteral::Text(s) => S::parse_literal(s),
        CoeffLiteral::Number(x) => {
            // Numbers go through their shortest decimal form, so 0.1 stays 1/10 in exact mode.
            S::parse_literal(&format!("{x:?}"))
        }
    }
    .ok_or_else(|| Error::Parse { line, msg: format!("bad coefficient {c:?}") })
}

impl<S: Scalar> MultilinearPolynomial<S> {
    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            nvars: self.nvars(),
            terms: self
                .terms()
                .map(|(m, c)| TermJson { vars: m.vars().to_vec(), coeff: CoeffLiteral::Text(c.to_literal()) })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for (k, t) in j.terms.iter().enumerate() {
            terms.push((Monomial::new(t.vars.iter().copied())?, parse_coeff(&t.coeff, k + 1)?));
        }
        Self::from_terms(j.nvars, terms)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("nvars {}\n", self.nvars());
        for (m, c) in self.terms() {
            out.push_str(&c.to_literal());
            for v in m.vars() {
                out.push_str(&format!(" * x{v}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_text(src: &str) -> Result<Self> {
        let (nvars, terms) = parse_text_terms::<S>(src)?;
        let mut out = Vec::with_capacity(terms.len());
        for (line, vars, c) in terms {
            let m = Monomial::new(vars.iter().copied()).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
            out.push((m, c));
        }
        let nvars = nvars.unwrap_or_else(|| infer_nvars(out.iter().flat_map(|(m, _)| m.vars().iter().copied())));
        Self::from_terms(nvars, out)
    }

    /// Parses JSON (if the input starts with `{`) or text.
    pub fn parse_any(src: &str) -> Result<Self> {
        if src.trim_start().starts_with('{') {
            Self::from_json(&serde_json::from_str(src)?)
        } else {
            Self::parse_text(src)
        }
    }
}

impl<S: Scalar> GeneralPolynomial<S> {
    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            nvars: self.nvars(),
            terms: self
                .terms()
                .map(|(m, c)| TermJson {
                    vars: m.factors().iter().flat_map(|&(v, e)| std::iter::repeat_n(v, e as usize)).collect(),
                    coeff: CoeffLiteral::Text(c.to_literal()),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for (k, t) in j.terms.iter().enumerate() {
            terms.push((PowerProduct::new(t.vars.iter().map(|&v| (v, 1))), parse_coeff(&t.coeff, k + 1)?));
        }
        Self::from_terms(j.nvars, terms)
    }

    pub fn parse_text(src: &str) -> Result<Self> {
        let (nvars, terms) = parse_text_terms::<S>(src)?;
        let nvars = nvars.unwrap_or_else(|| infer_nvars(terms.iter().flat_map(|(_, v, _)| v.iter().copied())));
        Self::from_terms(
            nvars,
            terms.into_iter().map(|(_, vars, c)| (PowerProduct::new(vars.into_iter().map(|v| (v, 1))), c)),
        )
    }

    pub fn parse_any(src: &str) -> Result<Self> {
        if src.trim_start().starts_with('{') {
            Self::from_json(&serde_json::from_str(src)?)
        } else {
            Self::parse_text(src)
        }
    }
}

fn infer_nvars(vars: impl Iterator<Item = u32>) -> usize {
    vars.max().map_or(0, |v| v as usize + 1)
}

type TextTerm<S> = (usize, Vec<u32>, S);

/// Returns the optional `nvars` directive and `(line, vars-with-repeats, coeff)`.
fn parse_text_terms<S: Scalar>(src: &str) -> Result<(Option<usize>, Vec<TextTerm<S>>)> {
    let mut nvars = None;
    let mut terms = Vec::new();
    for (k, raw) in src.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("nvars") {
            let rest = rest.trim().trim_start_matches('=').trim();
            let n = rest.parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("bad nvars '{rest}'") })?;
            nvars = Some(n);
            continue;
        }
        let mut coeff = S::one();
        let mut vars = Vec::new();
        for (pos, tok) in body.split('*').map(str::trim).enumerate() {
            if tok.is_empty() {
                return Err(Error::Parse { line, msg: "empty factor".into() });
            }
            if let Some(var) = tok.strip_prefix('x') {
                let (idx, pow) = match var.split_once('^') {
                    Some((i, p)) => (i, p.trim().parse::<u32>().map_err(|_| Error::Parse { line, msg: format!("bad exponent in '{tok}'") })?),
                    None => (var, 1),
                };
                let idx = idx
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse { line, msg: format!("bad variable '{tok}'") })?;
                vars.extend(std::iter::repeat_n(idx, pow as usize));
            } else if pos == 0 {
                coeff = S::parse_literal(tok).ok_or_else(|| Error::Parse { line, msg: format!("bad coefficient '{tok}'") })?;
            } else {
                return Err(Error::Parse { line, msg: format!("unexpected token '{tok}'") });
            }
        }
        terms.push((line, vars, coeff));
    }
    Ok((nvars, terms))
}
