use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{invalid, Result};
use crate::fool::config::{ExperimentConfig, SamplerTemplate};
use crate::fool::sign::sign_expectation;
use crate::krand::{IidSampler, KWiseSampler, KWiseSpec, Target};
use crate::rng::mix;
use crate::stats::{Estimate, Z99};

pub const FOOL_CSV_HEADER: &str = "k,estimate,stderr,baseline,fooling_error,ci_lo,ci_hi";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub k: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub baseline: f64,
    pub fooling_error: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl CurveRow {
    fn new(k: usize, e: &Estimate, base: &Estimate) -> Self {
        let hw = Z99 * (e.std_error.powi(2) + base.std_error.powi(2)).sqrt();
        let err = (e.estimate - base.estimate).abs();
        Self {
            k,
            estimate: e.estimate,
            stderr: e.std_error,
            baseline: base.estimate,
            fooling_error: err,
            ci_lo: (err - hw).max(0.0),
            ci_hi: err + hw,
        }
    }

    /// Half-width of the 99% interval around the signed difference.
    pub fn half_width(&self) -> f64 {
        self.ci_hi - self.fooling_error
    }
}

/// Fooling-error curve of one polynomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyCurve {
    pub name: String,
    pub nvars: usize,
    pub degree: usize,
    pub terms: usize,
    pub baseline: Estimate,
    pub rows: Vec<CurveRow>,
    /// Some `k` were skipped because the sample budget ran out.
    pub partial: bool,
}

impl PolyCurve {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{FOOL_CSV_HEADER}\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.k, r.estimate, r.stderr, r.baseline, r.fooling_error, r.ci_lo, r.ci_hi
            ));
        }
        out
    }

    /// Consecutive pairs `(k_j, k_{j+1})` whose intervals show an increase:
    /// the lower end at `k_{j+1}` exceeds the upper end at `k_j`.
    pub fn trend_violations(&self) -> Vec<(usize, usize)> {
        self.rows.windows(2).filter(|w| w[1].ci_lo > w[0].ci_hi).map(|w| (w[0].k, w[1].k)).collect()
    }

    /// Fooling error is non-increasing in `k` within the 99% intervals.
    pub fn trend_non_increasing(&self) -> bool {
        self.trend_violations().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config_hash: String,
    pub seed: u64,
    pub samples: u64,
    pub sampler: SamplerTemplate,
    pub k_list: Vec<usize>,
    pub curves: Vec<PolyCurve>,
    pub partial: bool,
}

#[derive(Serialize)]
struct SidecarCurve<'a> {
    name: &'a str,
    file: String,
    nvars: usize,
    degree: usize,
    terms: usize,
    baseline: f64,
    baseline_stderr: f64,
    trend_non_increasing: bool,
    partial: bool,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    config_hash: &'a str,
    seed: u64,
    samples: u64,
    ci_level: f64,
    sampler: SamplerTemplate,
    k_list: &'a [usize],
    partial: bool,
    curves: Vec<SidecarCurve<'a>>,
}

impl ExperimentReport {
    /// CSV path of each curve: `out` itself for a single polynomial,
    /// `<stem>_<name>.<ext>` next to it otherwise.
    pub fn csv_paths(&self, out: &Path) -> Vec<PathBuf> {
        if self.curves.len() == 1 {
            return vec![out.to_path_buf()];
        }
        let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "fool".into());
        let ext = out.extension().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
        self.curves.iter().map(|c| out.with_file_name(format!("{stem}_{}.{ext}", c.name))).collect()
    }

    pub fn sidecar_path(out: &Path) -> PathBuf {
        out.with_extension("json")
    }

    pub fn sidecar_json(&self, out: &Path) -> String {
        let paths = self.csv_paths(out);
        let side = Sidecar {
            config_hash: &self.config_hash,
            seed: self.seed,
            samples: self.samples,
            ci_level: 0.99,
            sampler: self.sampler,
            k_list: &self.k_list,
            partial: self.partial,
            curves: self
                .curves
                .iter()
                .zip(&paths)
                .map(|(c, p)| SidecarCurve {
                    name: &c.name,
                    file: p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
                    nvars: c.nvars,
                    degree: c.degree,
                    terms: c.terms,
                    baseline: c.baseline.estimate,
                    baseline_stderr: c.baseline.std_error,
                    trend_non_increasing: c.trend_non_increasing(),
                    partial: c.partial,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&side).expect("sidecar serializes") + "\n"
    }

    /// Writes one CSV per polynomial plus the JSON sidecar; returns every path written.
    pub fn write(&self, out: &Path) -> Result<Vec<PathBuf>> {
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut written = Vec::new();
        for (c, p) in self.curves.iter().zip(self.csv_paths(out)) {
            std::fs::write(&p, c.to_csv())?;
            written.push(p);
        }
        let side = Self::sidecar_path(out);
        std::fs::write(&side, self.sidecar_json(out))?;
        written.push(side);
        Ok(written)
    }
}

/// Seed of polynomial `index` under master seed `seed`.
pub fn poly_seed(seed: u64, index: usize) -> u64 {
    mix(seed, index as u64 + 1)
}

/// Fooling-error curves with the budget from the environment.
pub fn fooling_curve(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    fooling_curve_with(cfg, Budget::from_env())
}

/// For each polynomial: the iid baseline `E[sgn p(Y)]` (batch 0) and, for each
/// `k`, `E[sgn p(X)]` under the `k`-wise family (batch `k`). Work is counted as
/// samples times monomial factors; once it would pass `budget` the remaining
/// cells are skipped and the report is flagged partial.
pub fn fooling_curve_with(cfg: &ExperimentConfig, budget: Budget) -> Result<ExperimentReport> {
    cfg.validate()?;
    let seed = cfg.seed.ok_or_else(|| invalid("config has no seed"))?;
    let polys = cfg.resolve_polynomials()?;
    let mut spent: u128 = 0;
    let mut curves = Vec::with_capacity(polys.len());
    for (j, np) in polys.iter().enumerate() {
        let n = np.poly.nvars();
        let compiled = np.poly.compile();
        let cost = cfg.samples as u128 * np.poly.terms().map(|(m, _)| m.degree() as u128 + 1).sum::<u128>().max(1);
        let ps = poly_seed(seed, j);
        let mut curve = PolyCurve {
            name: np.name.clone(),
            nvars: n,
            degree: np.poly.degree(),
            terms: np.poly.terms().len(),
            baseline: Estimate { estimate: f64::NAN, std_error: f64::NAN, samples: 0 },
            rows: Vec::new(),
            partial: false,
        };
        if spent + cost > budget.max_ops {
            curve.partial = true;
            curves.push(curve);
            continue;
        }
        spent += cost;
        curve.baseline = sign_expectation(&compiled, &IidSampler::new(n, ps, 0), cfg.samples)?;
        for &k in &cfg.k_list {
            if spent + cost > budget.max_ops {
                curve.partial = true;
                break;
            }
            spent += cost;
            let e = match cfg.sampler {
                SamplerTemplate::Kwise { field } => {
                    let spec = KWiseSpec { k, field, n, target: Target::Gaussian };
                    sign_expectation(&compiled, &KWiseSampler::new(spec, ps, k as u64)?, cfg.samples)?
                }
                SamplerTemplate::Iid => sign_expectation(&compiled, &IidSampler::new(n, ps, k as u64), cfg.samples)?,
            };
            curve.rows.push(CurveRow::new(k, &e, &curve.baseline));
        }
        curves.push(curve);
    }
    let partial = curves.iter().any(|c| c.partial);
    Ok(ExperimentReport {
        config_hash: cfg.hash(),
        seed,
        samples: cfg.samples,
        sampler: cfg.sampler,
        k_list: cfg.k_list.clone(),
        curves,
        partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fool::config::{Generator, PolySource};
    use crate::krand::normal_cdf;

    fn config(polys: Vec<PolySource>, k_list: Vec<usize>, sampler: SamplerTemplate, samples: u64) -> ExperimentConfig {
        ExperimentConfig {
            polynomials: polys,
            k_list,
            sampler,
            samples,
            seed: Some(11),
            eps_grid: vec![],
            delta_grid: vec![],
            output: None,
            base_dir: PathBuf::new(),
        }
    }

    #[test]
    fn linear_forms_are_fooled() {
        // A homogeneous linear form under a sign-symmetric family has
        // E[sgn] = 0 once k = 2. With a threshold, pairwise independence pins
        // only the variance of the form, so the check uses k >= n, where the
        // family is fully independent up to discretization.
        let linear = crate::poly::MultilinearPolynomial::from_index_terms(
            3,
            [(vec![0], 0.6), (vec![1], -0.48), (vec![2], 0.64)],
        )
        .unwrap();
        let affine = linear.add(&crate::poly::MultilinearPolynomial::constant(3, 0.3)).unwrap();
        let cfg = config(
            vec![
                PolySource::Inline { inline: linear.to_json(), name: Some("linear".into()) },
                PolySource::Inline { inline: affine.to_json(), name: Some("affine".into()) },
            ],
            vec![2, 3],
            SamplerTemplate::default(),
            200_000,
        );
        let rep = fooling_curve_with(&cfg, Budget::new(u128::MAX)).unwrap();
        let (lin, aff) = (&rep.curves[0], &rep.curves[1]);
        assert!(lin.rows.iter().all(|r| r.ci_lo == 0.0), "{:?}", lin.rows);
        let exact = 2.0 * normal_cdf(0.3) - 1.0;
        assert!((aff.baseline.estimate - exact).abs() < 4.0 * aff.baseline.std_error);
        assert_eq!(aff.rows[1].ci_lo, 0.0, "{:?}", aff.rows[1]);
    }

    #[test]
    fn iid_control_is_within_ci() {
        // 100 control runs; the 99% interval should cover 0 in at least 95.
        let mut covered = 0;
        for s in 0..100 {
            let mut cfg = config(
                vec![PolySource::Generator(Generator::Product { d: 2 })],
                vec![1],
                SamplerTemplate::Iid,
                2000,
            );
            cfg.seed = Some(1000 + s);
            let rep = fooling_curve_with(&cfg, Budget::new(u128::MAX)).unwrap();
            if rep.curves[0].rows[0].ci_lo == 0.0 {
                covered += 1;
            }
        }
        assert!(covered >= 95, "covered {covered}");
    }

    #[test]
    fn budget_truncates() {
        let cfg = config(
            vec![PolySource::Generator(Generator::Product { d: 2 })],
            vec![2, 4, 8],
            SamplerTemplate::default(),
            1000,
        );
        // Each cell costs 1000 * 3.
        let rep = fooling_curve_with(&cfg, Budget::new(9000)).unwrap();
        assert!(rep.partial);
        assert_eq!(rep.curves[0].rows.len(), 2);
        let rep = fooling_curve_with(&cfg, Budget::new(12000)).unwrap();
        assert!(!rep.partial);
    }

    #[test]
    fn outputs_are_reproducible() {
        let cfg = config(
            vec![
                PolySource::Generator(Generator::Product { d: 2 }),
                PolySource::Generator(Generator::HardProduct { d: 2, width: 2 }),
            ],
            vec![2, 4],
            SamplerTemplate::default(),
            5000,
        );
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.csv");
        let a = fooling_curve(&cfg).unwrap();
        let paths = a.write(&out).unwrap();
        assert_eq!(paths.len(), 3);
        assert!(paths[0].ends_with("run_product_d2.csv"));
        let first: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
        let b = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(|| fooling_curve(&cfg).unwrap());
        b.write(&out).unwrap();
        let second: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
        assert_eq!(first, second);
        let text = String::from_utf8(first[0].clone()).unwrap();
        assert!(text.starts_with(FOOL_CSV_HEADER));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn trend_detects_increase() {
        let base = Estimate { estimate: 0.0, std_error: 0.001, samples: 1 };
        let mk = |k, e| CurveRow::new(k, &Estimate { estimate: e, std_error: 0.001, samples: 1 }, &base);
        let mut c = PolyCurve {
            name: "t".into(),
            nvars: 1,
            degree: 1,
            terms: 1,
            baseline: base,
            rows: vec![mk(2, 0.1), mk(4, 0.05), mk(8, 0.051)],
            partial: false,
        };
        assert!(c.trend_non_increasing());
        c.rows.push(mk(16, 0.2));
        assert_eq!(c.trend_violations(), vec![(8, 16)]);
    }
}
