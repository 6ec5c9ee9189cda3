//! Verification report records and their JSON / CSV / table renderings.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{format_full, format_sig6, ExtReal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// The quantities a check compared. Fields that do not apply are `null`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Quantities {
    #[serde(rename = "H")]
    pub h: Option<ExtReal>,
    #[serde(rename = "I")]
    pub i: Option<ExtReal>,
    #[serde(rename = "F")]
    pub f: Option<f64>,
    #[serde(rename = "W")]
    pub w: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub rho: String,
    pub mu: Option<String>,
    pub quantities: Quantities,
    pub margins: Vec<ExtReal>,
    pub verdict: Verdict,
    pub case: String,
    /// Not serialized: reports must be byte-identical across runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl Check {
    pub fn new(name: impl Into<String>, rho: impl Into<String>, case: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            rho: rho.into(),
            mu: None,
            quantities: Quantities::default(),
            margins: Vec::new(),
            verdict: Verdict::Pass,
            case: case.into(),
            wall_time: Duration::ZERO,
        }
    }

    pub fn with_mu(mut self, mu: impl Into<String>) -> Self {
        self.mu = Some(mu.into());
        self
    }

    pub fn with_quantities(mut self, q: Quantities) -> Self {
        self.quantities = q;
        self
    }

    pub fn with_margins(mut self, margins: impl IntoIterator<Item = f64>) -> Self {
        self.margins = margins.into_iter().map(ExtReal).collect();
        self
    }

    pub fn with_verdict(mut self, ok: bool) -> Self {
        self.verdict = Verdict::from_bool(ok);
        self
    }

    pub fn timed(mut self, wall_time: Duration) -> Self {
        self.wall_time = wall_time;
        self
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        self.name = format!("{prefix}{}", self.name);
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl VerificationReport {
    /// Sorts the checks by name, then by inputs, and tallies the summary.
    pub fn new(suite: impl Into<String>, seed: u64, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| {
            a.name
                .cmp(&b.name)
                .then_with(|| a.rho.cmp(&b.rho))
                .then_with(|| a.mu.cmp(&b.mu))
        });
        let passed = checks.iter().filter(|c| c.verdict.is_pass()).count();
        let summary = Summary {
            total: checks.len(),
            passed,
            failed: checks.len() - passed,
        };
        VerificationReport {
            suite: suite.into(),
            seed,
            checks,
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.verdict.is_pass())
    }

    pub fn total_wall_time(&self) -> Duration {
        self.checks.iter().map(|c| c.wall_time).sum()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config {
            field: "report".into(),
            message: e.to_string(),
        })
    }

    /// One row per check; margins are `;`-separated.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "rho", "mu", "H", "I", "F", "W", "margins", "verdict", "case"])
            .expect("in-memory write");
        let ext = |x: Option<ExtReal>| x.map_or(String::new(), |v| format_full(v.0));
        let num = |x: Option<f64>| x.map_or(String::new(), format_full);
        for c in &self.checks {
            let margins: Vec<String> = c.margins.iter().map(|m| format_full(m.0)).collect();
            w.write_record([
                c.name.as_str(),
                c.rho.as_str(),
                c.mu.as_deref().unwrap_or(""),
                &ext(c.quantities.h),
                &ext(c.quantities.i),
                &num(c.quantities.f),
                &num(c.quantities.w),
                &margins.join(";"),
                if c.verdict.is_pass() { "pass" } else { "fail" },
                c.case.as_str(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }

    /// Human-readable listing, 6 significant digits. Measure specs are
    /// abbreviated.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "suite {}  seed {}", self.suite, self.seed);
        let _ = writeln!(
            out,
            "{:<48} {:<28} {:>12} {:>12} {:>12} {:>12} {:>12}  {:<7} case",
            "name", "rho", "H", "I", "F", "W", "min margin", "verdict"
        );
        let ext = |x: Option<ExtReal>| x.map_or("-".to_string(), |v| format_sig6(v.0));
        let num = |x: Option<f64>| x.map_or("-".to_string(), format_sig6);
        for c in &self.checks {
            let min_margin = c
                .margins
                .iter()
                .map(|m| m.0)
                .fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |a| a.min(m))));
            let _ = writeln!(
                out,
                "{:<48} {:<28} {:>12} {:>12} {:>12} {:>12} {:>12}  {:<7} {}",
                abbreviate(&c.name, 48),
                abbreviate(&c.rho, 28),
                ext(c.quantities.h),
                ext(c.quantities.i),
                num(c.quantities.f),
                num(c.quantities.w),
                num(min_margin),
                if c.verdict.is_pass() { "pass" } else { "FAIL" },
                c.case
            );
        }
        let _ = writeln!(
            out,
            "total {}  passed {}  failed {}",
            self.summary.total, self.summary.passed, self.summary.failed
        );
        out
    }
}

fn abbreviate(s: &str, width: usize) -> String {
    if s.chars().count() <= width {
        s.to_string()
    } else {
        let head: String = s.chars().take(width - 3).collect();
        format!("{head}...")
    }
}

/// `a − b` for extended reals, with `∞ − ∞` read as zero slack.
pub(crate) fn slack(a: f64, b: f64) -> f64 {
    if a.is_infinite() && a == b {
        0.0
    } else {
        a - b
    }
}
