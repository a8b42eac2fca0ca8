use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ptf_fool::battery::{unit_battery, BatteryOptions};
use ptf_fool::budget::Budget;
use ptf_fool::fool::{
    anticoncentration_curve, bernoulli_comparison_study, fooling_curve, log_grid, ExperimentConfig,
};
use ptf_fool::krand::{
    correlated_expand, multilinearization_exceedance, sample_iid, sample_kwise, FieldSpec, IidSampler, KWiseSpec, Target,
};
use ptf_fool::moments::{empirical_moment, m_ell, wick_moment, SearchMode, SearchOptions};
use ptf_fool::mollify::{parameter_schedule, verify_mollifier, ScheduleMode, MOLLIFIER_CSV_HEADER};
use ptf_fool::poly::{multilinearize, GeneralPolynomial, MultilinearPolynomial};
use ptf_fool::structure::{
    decompose, default_schedule, verify_decomposition, DecomposeOptions, Decomposition, VerifyConstants,
};
use ptf_fool::{ExactPoly, Rational, Scalar};
use clap::ValueEnum;
use serde_json::json;

use crate::args::*;
use crate::Failure;

type Outcome = Result<String, Failure>;

pub fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Moments(a) => moments(a),
        Command::Mell(a) => mell(a),
        Command::Decompose(a) => decompose_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Mollifier(a) => mollifier(a),
        Command::Schedule(a) => schedule(a),
        Command::Sample(a) => sample(a),
        Command::Multilinearize(a) => multilinearize_cmd(a),
        Command::Fool(a) => fool(a),
        Command::Anticoncentration(a) => anticoncentration(a),
        Command::BernoulliCompare(a) => bernoulli(a),
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

/// The given seed, or a fresh one that is announced on stderr.
fn seed_of(common: &Common) -> u64 {
    common.seed.unwrap_or_else(|| {
        let s: u64 = rand::random();
        eprintln!("seed: {s}");
        s
    })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn read_poly<S: Scalar>(path: &Path) -> Result<MultilinearPolynomial<S>, Failure> {
    MultilinearPolynomial::parse_any(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn read_general<S: Scalar>(path: &Path) -> Result<GeneralPolynomial<S>, Failure> {
    GeneralPolynomial::parse_any(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

/// Writes `content` to `--out`, or to stdout when it is absent.
fn emit(common: &Common, content: &str) -> Result<(), Failure> {
    match &common.out {
        Some(p) => write_file(p, content),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    fs::write(path, content).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn target_of(common: &Common) -> String {
    common.out.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "stdout".into())
}

fn search_mode(s: Split) -> SearchMode {
    match s {
        Split::Exhaustive => SearchMode::Exhaustive,
        Split::Alternating => SearchMode::Alternating,
    }
}

fn moments(a: &MomentsArgs) -> Outcome {
    if a.k.is_empty() {
        return Err(invalid("--k needs at least one order"));
    }
    let seed = a.samples.map(|_| seed_of(&a.common));
    let (values, compiled, nvars) = match a.mode {
        Arithmetic::Exact => {
            let p: ExactPoly = read_poly(&a.poly)?;
            let v = a
                .k
                .iter()
                .map(|&k| wick_moment(&p, k).map(|m| (m.to_literal(), m.approx())))
                .collect::<Result<Vec<_>, _>>()?;
            (v, p.compile(), p.nvars())
        }
        Arithmetic::Float => {
            let p: MultilinearPolynomial<f64> = read_poly(&a.poly)?;
            let v = a
                .k
                .iter()
                .map(|&k| wick_moment(&p, k).map(|m| (m.to_literal(), m)))
                .collect::<Result<Vec<_>, _>>()?;
            (v, p.compile(), p.nvars())
        }
    };
    let mut csv = String::from(if seed.is_some() { "k,exact,float,mc,mc_stderr\n" } else { "k,exact,float\n" });
    for (&k, (lit, x)) in a.k.iter().zip(&values) {
        csv.push_str(&format!("{k},{lit},{x:e}"));
        if let (Some(n), Some(s)) = (a.samples, seed) {
            let est = empirical_moment(&compiled, &IidSampler::new(nvars, s, k as u64), k, n)?;
            csv.push_str(&format!(",{:e},{:e}", est.estimate, est.std_error));
        }
        csv.push('\n');
    }
    emit(&a.common, &csv)?;
    let shown: Vec<String> = a.k.iter().zip(&values).map(|(k, (lit, x))| format!("E[p^{k}] = {lit} ({x:e})")).collect();
    Ok(shown.join("; "))
}

fn mell(a: &MellArgs) -> Outcome {
    let p: MultilinearPolynomial<f64> = read_poly(&a.poly)?;
    let seed = seed_of(&a.common);
    let ells: Vec<usize> = if a.k.is_empty() { (1..=p.degree().max(1)).collect() } else { a.k.clone() };
    let opts = SearchOptions { mode: search_mode(a.mode), seed, ..Default::default() };
    let mut rows = Vec::new();
    for &ell in &ells {
        let est = m_ell(&p, ell, &opts)?;
        rows.push(json!({
            "ell": est.ell,
            "value": est.value,
            "correlation": est.correlation,
            "certified": est.certified,
            "witness": {
                "sets": est.witness.sets,
                "degrees": est.witness.degrees,
                "factors": est.witness.factors.iter().map(|f| f.to_json()).collect::<Vec<_>>(),
            },
        }));
    }
    let doc = json!({ "seed": seed, "mode": a.mode.to_possible_value().map(|v| v.get_name().to_string()), "estimates": rows });
    emit(&a.common, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    let shown: Vec<String> =
        rows.iter().map(|r| format!("M_{} = {}", r["ell"], r["value"].as_f64().unwrap_or(f64::NAN))).collect();
    Ok(shown.join("; "))
}

fn decompose_cmd(a: &DecomposeArgs) -> Outcome {
    let p: ExactPoly = read_poly(&a.poly)?;
    let seed = seed_of(&a.common);
    let d = p.degree().max(1);
    let schedule = if a.m.is_empty() { default_schedule(4, d) } else { a.m.clone() };
    let mut opts = DecomposeOptions::new(schedule);
    opts.search.mode = search_mode(a.mode);
    opts.search.seed = seed;
    let dec = decompose(&p, &opts)?;
    emit(&a.common, &(dec.to_json_string() + "\n"))?;
    let parts: usize = dec.part_counts().iter().sum();
    let mut summary = format!("{} classes, {parts} parts -> {}", dec.classes.len(), target_of(&a.common));
    if a.verify {
        let report = verify_decomposition(&dec, &p, VerifyConstants::for_degree(d), Budget::from_env());
        let csv = report.to_csv();
        match &a.common.out {
            Some(out) => {
                let path = verify_path(out);
                write_file(&path, &csv)?;
                summary.push_str(&format!("; verifier -> {}", path.display()));
            }
            None => eprint!("{csv}"),
        }
        if !report.passed() {
            return Err(Failure::Assertion(format!("verifier rejected the decomposition ({summary})")));
        }
        summary.push_str("; verifier passed");
    }
    Ok(summary)
}

fn verify_path(out: &Path) -> PathBuf {
    out.with_extension("verify.csv")
}

fn verify(a: &VerifyArgs) -> Outcome {
    let p: ExactPoly = read_poly(&a.poly)?;
    let dec = Decomposition::<Rational>::parse_json(&read(&a.config)?)
        .map_err(|e| invalid(format!("{}: {e}", a.config.display())))?;
    let report = verify_decomposition(&dec, &p, VerifyConstants::for_degree(p.degree().max(1)), Budget::from_env());
    emit(&a.common, &report.to_csv())?;
    let failed: Vec<&str> = report.rows.iter().filter(|r| !r.pass).map(|r| r.conclusion.as_str()).collect();
    if failed.is_empty() {
        Ok(format!("all {} checks passed -> {}", report.rows.len(), target_of(&a.common)))
    } else {
        Err(Failure::Assertion(format!("failed: {}", failed.join(", "))))
    }
}

fn mollifier(a: &MollifierArgs) -> Outcome {
    if a.c.is_empty() {
        return Err(invalid("--c needs at least one value"));
    }
    let mut csv = format!("c,{MOLLIFIER_CSV_HEADER}\n");
    let mut failed = Vec::new();
    for &c in &a.c {
        let report = verify_mollifier(c, a.n, a.k, &a.d)?;
        for r in &report.rows {
            csv.push_str(&format!("{c},{},{:.10e},{:.10e},{}\n", r.property, r.measured, r.bound, r.pass));
            if !r.pass {
                failed.push(format!("{} at C={c}", r.property));
            }
        }
    }
    emit(&a.common, &csv)?;
    if failed.is_empty() {
        Ok(format!("mollifier n={}: all properties hold -> {}", a.n, target_of(&a.common)))
    } else {
        Err(Failure::Assertion(failed.join(", ")))
    }
}

fn schedule(a: &ScheduleArgs) -> Outcome {
    let mode = match a.mode {
        ScheduleModeArg::PaperExact => ScheduleMode::PaperExact,
        ScheduleModeArg::Desk => ScheduleMode::Desk,
    };
    let s = parameter_schedule(a.d, a.eps, mode)?;
    emit(&a.common, &(s.to_json() + "\n"))?;
    let v = s.violations();
    if !v.is_empty() {
        return Err(Failure::Assertion(v.join("; ")));
    }
    Ok(format!("d={} eps={} k={} -> {}", a.d, a.eps, s.k, target_of(&a.common)))
}

fn parse_field(s: &str) -> Result<FieldSpec, Failure> {
    let (kind, val) = s.split_once(':').ok_or_else(|| invalid(format!("bad field `{s}` (expected prime:P or binary:B)")))?;
    let v: u32 = val.parse().map_err(|_| invalid(format!("bad field size `{val}`")))?;
    match kind {
        "prime" => Ok(FieldSpec::Prime(v)),
        "binary" => Ok(FieldSpec::Binary(v)),
        _ => Err(invalid(format!("bad field kind `{kind}` (expected prime or binary)"))),
    }
}

fn sample(a: &SampleArgs) -> Outcome {
    let field = parse_field(&a.field)?;
    let count = usize::try_from(a.samples).map_err(|_| invalid("--samples too large"))?;
    if a.n == 0 || count == 0 {
        return Err(invalid("--n and --samples must be positive"));
    }
    if a.copies.is_some_and(|c| c < 2) {
        return Err(invalid("--copies must be at least 2"));
    }
    let seed = seed_of(&a.common);
    let mut batch = match a.mode {
        Family::Iid => sample_iid(a.n, seed, count),
        Family::Kwise => {
            let target = match a.target {
                TargetArg::Gaussian => Target::Gaussian,
                TargetArg::Sign => Target::Sign,
            };
            sample_kwise(KWiseSpec { k: a.k, field, n: a.n, target }, seed, count)?
        }
    };
    if let Some(c) = a.copies {
        batch = correlated_expand(&batch, c, seed)?;
    }
    match &a.common.out {
        Some(p) if p.extension().is_some_and(|e| e == "bin") => batch.write_binary(p)?,
        Some(p) => {
            let f = fs::File::create(p).map_err(|e| invalid(format!("{}: {e}", p.display())))?;
            let mut w = std::io::BufWriter::new(f);
            batch.write_csv(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = std::io::BufWriter::new(std::io::stdout().lock());
            batch.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(format!("{} x {} samples -> {}", batch.rows, batch.cols, target_of(&a.common)))
}

fn multilinearize_cmd(a: &MultilinearizeArgs) -> Outcome {
    let p: GeneralPolynomial<f64> = read_general(&a.poly)?;
    if a.copies < 2 {
        return Err(invalid("--copies must be at least 2"));
    }
    if a.verify && !(a.delta > 0.0 && a.delta < 1.0) {
        return Err(invalid("--delta must lie in (0, 1)"));
    }
    let split = multilinearize(&p, a.copies)?;
    let terms: Vec<_> = split
        .basis_terms()
        .map(|(c, factors)| {
            json!({
                "coeff": c,
                "factors": factors.iter().map(|&(v, m)| json!({ "var": v, "e": m })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut doc = json!({
        "nvars": split.base_nvars(),
        "copies": split.copies(),
        "split_nvars": split.nvars(),
        "basis": "elementary_symmetric",
        "terms": terms,
    });
    let mut summary = format!("{} basis terms over {} split variables", terms_len(&doc), split.nvars());
    let mut failure = None;
    if a.verify {
        let seed = seed_of(&a.common);
        let est = multilinearization_exceedance(&p, a.copies, a.delta, a.samples, seed)?;
        doc["verify"] = json!({
            "delta": a.delta,
            "samples": a.samples,
            "seed": seed,
            "exceedance": est.estimate,
            "stderr": est.std_error,
        });
        summary.push_str(&format!("; Pr(|p - p_delta| > {}) = {:.4}", a.delta, est.estimate));
        if est.estimate >= a.delta {
            failure = Some(format!("exceedance {} is not below delta {}", est.estimate, a.delta));
        }
    }
    emit(&a.common, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    match failure {
        Some(f) => Err(Failure::Assertion(f)),
        None => Ok(summary),
    }
}

fn terms_len(doc: &serde_json::Value) -> usize {
    doc["terms"].as_array().map_or(0, Vec::len)
}

fn fool(a: &FoolArgs) -> Outcome {
    let mut cfg = ExperimentConfig::load(&a.config).map_err(|e| invalid(format!("{}: {e}", a.config.display())))?;
    if let Some(n) = a.samples {
        cfg.samples = n;
    }
    if a.common.seed.is_some() || cfg.seed.is_none() {
        cfg.seed = Some(seed_of(&a.common));
    }
    cfg.validate()?;
    let out = a.common.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("fool.csv"));
    let report = fooling_curve(&cfg)?;
    let written = report.write(&out)?;
    let mut summary = format!(
        "{} curve(s), k in {:?} -> {}",
        report.curves.len(),
        cfg.k_list,
        written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", "),
    );
    if report.partial {
        summary.push_str("; PARTIAL: budget exceeded");
    }
    Ok(summary)
}

fn anticoncentration(a: &AntiArgs) -> Outcome {
    let p: ExactPoly = read_poly(&a.poly)?;
    let seed = seed_of(&a.common);
    let grid = if a.eps.is_empty() { log_grid(1e-4, 1e-1, 13) } else { a.eps.clone() };
    let report = anticoncentration_curve(&p, &grid, a.samples, seed)?;
    if let Some(w) = &report.warning {
        eprintln!("warning: {w}");
    }
    emit(&a.common, &report.to_csv())?;
    let mut summary = format!("d={} fitted exponent {:.4} -> {}", report.degree, report.exponent, target_of(&a.common));
    if report.flagged {
        summary.push_str(&format!("; FLAGGED: below (1/d)(1 - 0.25) = {:.4}", 0.75 / report.degree.max(1) as f64));
    }
    Ok(summary)
}

fn bernoulli(a: &BernoulliArgs) -> Outcome {
    let battery: Vec<ExactPoly> = if a.poly.is_empty() {
        let opts = BatteryOptions {
            size: a.size,
            max_vars: a.nvars,
            max_degree: a.degree,
            homogeneous: true,
            seed: seed_of(&a.common),
            ..Default::default()
        };
        unit_battery(&opts)
    } else {
        a.poly.iter().map(|p| read_poly(p)).collect::<Result<_, _>>()?
    };
    let study = bernoulli_comparison_study(&battery, &a.k, Budget::from_env())?;
    emit(&a.common, &study.to_csv())?;
    let summary =
        format!("{} polynomials, {} rows, max ratio {:.6} -> {}", battery.len(), study.rows.len(), study.max_ratio, target_of(&a.common));
    if study.all_certified {
        Ok(summary)
    } else {
        Err(Failure::Assertion(format!("some ratios exceed 1 ({summary})")))
    }
}
