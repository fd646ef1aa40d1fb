//! Check results and suite reports.

use std::time::Instant;

use serde::Serialize;

use crate::error::Error;
use crate::numerics::C64;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// The identity under test.
    pub paper_eq: String,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
    /// Exploratory checks are reported but excluded from the global flag.
    pub gating: bool,
    pub wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
}

impl Environment {
    pub fn current() -> Environment {
        Environment { version: env!("CARGO_PKG_VERSION"), os: std::env::consts::OS, arch: std::env::consts::ARCH }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub instance: String,
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub environment: Environment,
    pub pass: bool,
}

impl Report {
    pub fn new(instance: &str, suite: &str, checks: Vec<CheckResult>) -> Report {
        let pass = checks.iter().filter(|c| c.gating).all(|c| c.pass);
        Report { instance: instance.into(), suite: suite.into(), checks, environment: Environment::current(), pass }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.gating && !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Collects checks, timing each from the previous one.
pub struct Recorder {
    pub checks: Vec<CheckResult>,
    last: Instant,
    tol_override: Option<f64>,
    gating: bool,
}

impl Recorder {
    pub fn new(tol_override: Option<f64>) -> Recorder {
        Recorder { checks: Vec::new(), last: Instant::now(), tol_override, gating: true }
    }

    /// Following checks are exploratory until [`Recorder::gating`] is called.
    pub fn exploratory(&mut self) {
        self.gating = false;
    }

    pub fn gating(&mut self) {
        self.gating = true;
    }

    fn elapsed(&mut self) -> f64 {
        let now = Instant::now();
        let ms = (now - self.last).as_secs_f64() * 1e3;
        self.last = now;
        ms
    }

    fn tol(&self, tol: f64) -> f64 {
        match self.tol_override {
            Some(t) if self.gating => t,
            _ => tol,
        }
    }

    /// Error relative to `|rhs|` (absolute when `rhs = 0`).
    pub fn rel(&mut self, name: impl Into<String>, eq: &str, lhs: C64, rhs: C64, tol: f64) {
        let scale = if rhs.norm() > 0.0 { rhs.norm() } else { 1.0 };
        self.scaled(name, eq, lhs, rhs, tol, scale);
    }

    /// Error relative to a given natural scale.
    pub fn scaled(&mut self, name: impl Into<String>, eq: &str, lhs: C64, rhs: C64, tol: f64, scale: f64) {
        let abs_err = (lhs - rhs).norm();
        let rel_err = abs_err / scale.max(f64::MIN_POSITIVE);
        let tol = self.tol(tol);
        let pass = rel_err <= tol;
        let wall_ms = self.elapsed();
        self.checks.push(CheckResult {
            name: name.into(),
            paper_eq: eq.into(),
            lhs: pair(lhs),
            rhs: pair(rhs),
            abs_err,
            rel_err,
            tol,
            pass,
            gating: self.gating,
            wall_ms,
            error: None,
        });
    }

    /// A check that holds when `value > 0`.
    pub fn positive(&mut self, name: impl Into<String>, eq: &str, value: f64) {
        let err = if value > 0.0 { 0.0 } else { value.abs().max(f64::MIN_POSITIVE) };
        let wall_ms = self.elapsed();
        self.checks.push(CheckResult {
            name: name.into(),
            paper_eq: eq.into(),
            lhs: [value, 0.0],
            rhs: [0.0, 0.0],
            abs_err: err,
            rel_err: err,
            tol: 0.0,
            pass: value > 0.0,
            gating: self.gating,
            wall_ms,
            error: None,
        });
    }

    /// A check that could not be evaluated.
    pub fn failed(&mut self, name: impl Into<String>, eq: &str, err: &Error) {
        let wall_ms = self.elapsed();
        self.checks.push(CheckResult {
            name: name.into(),
            paper_eq: eq.into(),
            lhs: [f64::NAN; 2],
            rhs: [f64::NAN; 2],
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            tol: f64::NAN,
            pass: false,
            gating: self.gating,
            wall_ms,
            error: Some(err.to_string()),
        });
    }
}
