use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::battery::monomials_of_degree;
use crate::error::{invalid, Result};
use crate::krand::{FieldSpec, GAUSSIAN_MIN_FIELD};
use crate::poly::{GeneralPolynomial, Monomial, MultilinearPolynomial, PolyJson};
use crate::rng::{domain, substream};

/// Fewest samples per point accepted by the harness.
pub const MIN_SAMPLES: u64 = 1000;

/// Named polynomial families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    /// `x_0 x_1 ... x_{d-1}`.
    Product { d: usize },
    /// `prod_{i<d} (sum_{j<width} x_{i,j}) / width^{d/2}` on `d * width` variables.
    HardProduct { d: usize, width: usize },
    /// Unit-norm homogeneous polynomial with `terms` random monomials of degree
    /// `degree` and Gaussian coefficients.
    Random { nvars: usize, degree: usize, terms: usize, seed: u64 },
}

impl Generator {
    pub fn name(&self) -> String {
        match *self {
            Generator::Product { d } => format!("product_d{d}"),
            Generator::HardProduct { d, width } => format!("hard_product_d{d}_w{width}"),
            Generator::Random { nvars, degree, terms, seed } => format!("random_n{nvars}_d{degree}_t{terms}_s{seed}"),
        }
    }

    pub fn build(&self) -> Result<MultilinearPolynomial<f64>> {
        match *self {
            Generator::Product { d } => {
                if d == 0 {
                    return Err(invalid("product needs d >= 1"));
                }
                MultilinearPolynomial::from_index_terms(d, [((0..d as u32).collect::<Vec<_>>(), 1.0)])
            }
            Generator::HardProduct { d, width } => hard_product(d, width),
            Generator::Random { nvars, degree, terms, seed } => {
                let all = monomials_of_degree(nvars, degree);
                if degree == 0 || terms == 0 || terms > all.len() {
                    return Err(invalid(format!(
                        "random generator needs 1 <= terms <= C({nvars},{degree}) and degree >= 1"
                    )));
                }
                let mut rng = substream(seed, domain::BATTERY, u64::MAX);
                let picks = sample(&mut rng, all.len(), terms).into_vec();
                let mut p = MultilinearPolynomial::zero(nvars);
                for i in picks {
                    let c: f64 = StandardNormal.sample(&mut rng);
                    p.add_term(all[i].clone(), c);
                }
                let norm = p.norm_sq().sqrt();
                Ok(p.scale(&(1.0 / norm)))
            }
        }
    }
}

/// `prod_{i<d} (sum_{j<width} x_{i*width+j}) / width^{d/2}`.
pub fn hard_product(d: usize, width: usize) -> Result<MultilinearPolynomial<f64>> {
    if d == 0 || width == 0 {
        return Err(invalid("hard product needs d >= 1 and width >= 1"));
    }
    let n = d * width;
    let scale = (width as f64).powf(-(d as f64) / 2.0);
    let mut p = MultilinearPolynomial::constant(n, scale);
    for i in 0..d {
        let block = MultilinearPolynomial::from_terms(
            n,
            (0..width).map(|j| (Monomial::var((i * width + j) as u32), 1.0)),
        )?;
        p = p.mul_disjoint(&block)?;
    }
    Ok(p)
}

/// Where a polynomial comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolySource {
    File {
        file: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    Inline {
        inline: PolyJson,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    Generator(Generator),
}

/// A resolved polynomial with its report name.
#[derive(Debug, Clone)]
pub struct NamedPoly {
    pub name: String,
    pub poly: GeneralPolynomial<f64>,
}

impl PolySource {
    pub fn resolve(&self, index: usize, base: &Path) -> Result<NamedPoly> {
        match self {
            PolySource::File { file, name } => {
                let path = if file.is_absolute() { file.clone() } else { base.join(file) };
                let src = std::fs::read_to_string(&path)?;
                let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
                Ok(NamedPoly {
                    name: name.clone().or(stem).unwrap_or_else(|| format!("poly{index}")),
                    poly: GeneralPolynomial::parse_any(&src)?,
                })
            }
            PolySource::Inline { inline, name } => Ok(NamedPoly {
                name: name.clone().unwrap_or_else(|| format!("inline{index}")),
                poly: GeneralPolynomial::from_json(inline)?,
            }),
            PolySource::Generator(g) => Ok(NamedPoly { name: g.name(), poly: (&g.build()?).into() }),
        }
    }
}

/// Family compared against the iid Gaussian baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerTemplate {
    /// `k`-wise independent Gaussians over `field`; `k` comes from `k_list`.
    Kwise { field: FieldSpec },
    /// A second independent iid stream (control run).
    Iid,
}

impl Default for SamplerTemplate {
    fn default() -> Self {
        SamplerTemplate::Kwise { field: FieldSpec::Prime(65537) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub polynomials: Vec<PolySource>,
    pub k_list: Vec<usize>,
    #[serde(default)]
    pub sampler: SamplerTemplate,
    pub samples: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eps_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Directory that relative polynomial paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn parse(src: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(src)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::parse(&std::fs::read_to_string(path)?)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.polynomials.is_empty() {
            return Err(invalid("config lists no polynomials"));
        }
        if self.k_list.is_empty() {
            return Err(invalid("k_list is empty"));
        }
        if self.k_list[0] == 0 || self.k_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("k_list must be positive and strictly ascending"));
        }
        if self.samples < MIN_SAMPLES {
            return Err(invalid(format!("samples must be at least {MIN_SAMPLES}")));
        }
        if let SamplerTemplate::Kwise { field } = self.sampler {
            if field.size() < GAUSSIAN_MIN_FIELD {
                return Err(invalid(format!("gaussian k-wise families need a field of size >= {GAUSSIAN_MIN_FIELD}")));
            }
        }
        for (name, grid) in [("eps_grid", &self.eps_grid), ("delta_grid", &self.delta_grid)] {
            if grid.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
                return Err(invalid(format!("{name} entries must be positive")));
            }
        }
        Ok(())
    }

    pub fn resolve_polynomials(&self) -> Result<Vec<NamedPoly>> {
        let mut out: Vec<NamedPoly> =
            self.polynomials.iter().enumerate().map(|(i, s)| s.resolve(i, &self.base_dir)).collect::<Result<_>>()?;
        // Disambiguate repeated names by position.
        let names: Vec<String> = out.iter().map(|p| p.name.clone()).collect();
        for (i, p) in out.iter_mut().enumerate() {
            if names.iter().filter(|n| **n == p.name).count() > 1 {
                p.name = format!("{}_{i}", p.name);
            }
            p.name = sanitize(&p.name);
        }
        Ok(out)
    }

    /// SHA-256 of the canonical JSON form (field order fixed, `seed` included).
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "polynomials": [
            {"generator": "product", "d": 2},
            {"generator": "hard_product", "d": 2, "width": 3},
            {"generator": "random", "nvars": 5, "degree": 2, "terms": 4, "seed": 9},
            {"inline": {"nvars": 2, "terms": [{"vars": [0, 1], "coeff": "1/2"}]}, "name": "half"}
        ],
        "k_list": [2, 4, 8],
        "sampler": {"family": "kwise", "field": {"prime": 65537}},
        "samples": 20000,
        "seed": 7
    }"#;

    #[test]
    fn parses_all_sources() {
        let cfg = ExperimentConfig::parse(SAMPLE).unwrap();
        let polys = cfg.resolve_polynomials().unwrap();
        let names: Vec<&str> = polys.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["product_d2", "hard_product_d2_w3", "random_n5_d2_t4_s9", "half"]);
        assert_eq!(polys[1].poly.nvars(), 6);
        assert_eq!(polys[1].poly.terms().len(), 9);
        let r = polys[2].poly.to_multilinear().unwrap();
        assert!((r.norm_sq() - 1.0).abs() < 1e-12);
        assert!(r.is_homogeneous());
    }

    #[test]
    fn hard_product_has_unit_norm() {
        let p = hard_product(3, 4).unwrap();
        assert!((p.norm_sq() - 1.0).abs() < 1e-12);
        assert_eq!(p.num_terms(), 64);
        let x: Vec<f64> = (0..12).map(|i| i as f64 * 0.1).collect();
        let s: Vec<f64> = (0..3).map(|b| x[b * 4..b * 4 + 4].iter().sum()).collect();
        let direct = s.iter().product::<f64>() / 8.0;
        assert!((p.evaluate(&x).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut v: serde_json::Value = serde_json::from_str(SAMPLE).unwrap();
        v["k_list"] = serde_json::json!([4, 2]);
        assert!(ExperimentConfig::parse(&v.to_string()).is_err());
        v["k_list"] = serde_json::json!([2]);
        v["samples"] = serde_json::json!(10);
        assert!(ExperimentConfig::parse(&v.to_string()).is_err());
        v["samples"] = serde_json::json!(5000);
        v["sampler"] = serde_json::json!({"family": "kwise", "field": {"prime": 101}});
        assert!(ExperimentConfig::parse(&v.to_string()).is_err());
        v["sampler"] = serde_json::json!({"family": "iid"});
        v["bogus"] = serde_json::json!(1);
        assert!(ExperimentConfig::parse(&v.to_string()).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::parse(SAMPLE).unwrap();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = Some(8);
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
