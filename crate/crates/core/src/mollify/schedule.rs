use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleMode {
    /// Symbolic magnitudes: exponents of `1/eps`, constants depending on `d` omitted.
    PaperExact,
    /// Small concrete values satisfying the ordering constraints only.
    Desk,
}

impl std::str::FromStr for ScheduleMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "paper-exact" => Ok(Self::PaperExact),
            "desk" => Ok(Self::Desk),
            _ => Err(invalid(format!("unknown schedule mode `{s}` (expected paper-exact or desk)"))),
        }
    }
}

/// Per-class parameters. In paper-exact mode `c` and `m` hold exponents of
/// `1/eps` and `b` holds the power of `log(1/eps)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub class: usize,
    pub b: f64,
    pub c: f64,
    pub m: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSchedule {
    pub d: usize,
    pub eps: f64,
    pub mode: ScheduleMode,
    pub classes: Vec<ClassParams>,
    /// Concrete `k` (desk) or exponent of `1/eps` (paper-exact).
    pub k: u64,
    pub paper_scale: bool,
}

impl ParameterSchedule {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    /// Violated constraints, empty when the schedule is consistent.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.classes.len() != self.d {
            out.push(format!("expected {} classes, got {}", self.d, self.classes.len()));
        }
        for w in self.classes.windows(2) {
            if w[1].c < w[0].c {
                out.push(format!("C not nondecreasing at class {}", w[1].class));
            }
            if w[1].m < w[0].m {
                out.push(format!("m not nondecreasing at class {}", w[1].class));
            }
        }
        let max_m = self.classes.iter().map(|c| c.m).max().unwrap_or(0);
        match self.mode {
            ScheduleMode::Desk => {
                let log_term = log_budget(self.d, self.eps);
                for c in &self.classes {
                    if (c.m as f64) < c.b * c.b {
                        out.push(format!("class {}: m < B^2", c.class));
                    }
                    if (c.m as f64) < log_term {
                        out.push(format!("class {}: m < log(2^d/eps)", c.class));
                    }
                    if c.m % 2 != 0 {
                        out.push(format!("class {}: m is odd", c.class));
                    }
                }
                for w in self.classes.windows(2) {
                    if w[1].c <= w[0].c {
                        out.push(format!("C not increasing at class {}", w[1].class));
                    }
                }
                if self.k != self.d as u64 * max_m {
                    out.push("k != d * max m".into());
                }
            }
            ScheduleMode::PaperExact => {
                let d = self.d as u64;
                for c in &self.classes {
                    let seven = 7u64.pow(c.class as u32);
                    if c.c != (seven * d) as f64 || c.m != 3 * seven * d {
                        out.push(format!("class {}: exponents off", c.class));
                    }
                }
                if self.k != 4 * d * 7u64.pow(self.d as u32) {
                    out.push("k exponent != 4 d 7^d".into());
                }
            }
        }
        out
    }
}

fn log_budget(d: usize, eps: f64) -> f64 {
    d as f64 * std::f64::consts::LN_2 - eps.ln()
}

pub fn parameter_schedule(d: usize, eps: f64, mode: ScheduleMode) -> Result<ParameterSchedule> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(invalid("eps must lie in (0, 1/2)"));
    }
    if d < 1 {
        return Err(invalid("d must be at least 1"));
    }
    if d > 12 {
        return Err(invalid("d above 12 overflows the schedule"));
    }
    let classes: Vec<ClassParams>;
    let k;
    match mode {
        ScheduleMode::PaperExact => {
            let d64 = d as u64;
            classes = (1..=d)
                .map(|i| {
                    let seven = 7u64.pow(i as u32);
                    ClassParams { class: i, b: 0.5, c: (seven * d64) as f64, m: 3 * seven * d64 }
                })
                .collect();
            k = 4 * d64 * 7u64.pow(d as u32);
        }
        ScheduleMode::Desk => {
            let log_term = log_budget(d, eps);
            let b = log_term.sqrt().ceil().max(2.0);
            classes = (1..=d)
                .map(|i| {
                    let need = (b * b).max(log_term).ceil() as u64;
                    let even = need + need % 2;
                    ClassParams { class: i, b, c: (1u64 << i) as f64, m: even.max(1 << (i + 2)) }
                })
                .collect();
            k = d as u64 * classes.iter().map(|c| c.m).max().unwrap_or(0);
        }
    }
    Ok(ParameterSchedule { d, eps, mode, classes, k, paper_scale: mode == ScheduleMode::PaperExact })
}
