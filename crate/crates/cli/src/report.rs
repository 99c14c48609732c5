//! Machine-readable run reports.
//!
//! JSON output is fully determined by the run configuration and seed: field
//! order is fixed by the struct definitions, floats serialize with their
//! shortest round-trip representation, and volatile data (wall time) is kept
//! out of the serialized form (it is printed on the human-readable summary
//! only). Complex numbers serialize as `{"re": ..., "im": ...}`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct CxJson {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for CxJson {
    fn from(z: C64) -> Self {
        CxJson { re: z.re, im: z.im }
    }
}

impl From<CxJson> for C64 {
    fn from(z: CxJson) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Named scalar input recorded with a check.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NamedInput {
    pub name: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckRecord {
    pub id: String,
    pub inputs: Vec<NamedInput>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Summary {
    pub pass_count: usize,
    pub fail_count: usize,
    pub worst_residual: f64,
    pub worst_check: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub tool: String,
    pub command: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, seed: u64, checks: Vec<CheckRecord>) -> Self {
        let pass_count = checks.iter().filter(|c| c.pass).count();
        let fail_count = checks.len() - pass_count;
        let (worst_residual, worst_check) = checks
            .iter()
            .max_by(|a, b| {
                (a.residual / a.tolerance)
                    .partial_cmp(&(b.residual / b.tolerance))
                    .unwrap()
            })
            .map(|c| (c.residual, c.id.clone()))
            .unwrap_or((0.0, String::new()));
        Report {
            tool: "rtoda".into(),
            command: command.into(),
            seed,
            checks,
            summary: Summary {
                pass_count,
                fail_count,
                worst_residual,
                worst_check,
            },
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.fail_count == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// CSV rendering: header plus one row per check.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,residual,tolerance,pass\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{:e},{:e},{}\n",
                c.id, c.residual, c.tolerance, c.pass
            ));
        }
        out
    }

    /// Human-readable summary table with wall time (stdout only, never in
    /// the serialized report).
    pub fn print_table(&self, wall_seconds: f64) {
        println!("{:<44} {:>12} {:>10} {:>6}", "check", "residual", "tol", "pass");
        for c in &self.checks {
            println!(
                "{:<44} {:>12.3e} {:>10.1e} {:>6}",
                c.id,
                c.residual,
                c.tolerance,
                if c.pass { "ok" } else { "FAIL" }
            );
        }
        println!(
            "-- {} passed, {} failed, worst residual {:.3e} ({}) in {:.2}s",
            self.summary.pass_count,
            self.summary.fail_count,
            self.summary.worst_residual,
            self.summary.worst_check,
            wall_seconds
        );
    }
}

/// Builder for check records with shared input bookkeeping.
pub fn check(id: String, inputs: Vec<NamedInput>, residual: f64, tolerance: f64) -> CheckRecord {
    CheckRecord {
        id,
        inputs,
        residual,
        tolerance,
        pass: residual < tolerance,
    }
}

pub fn named(name: &str, z: C64) -> NamedInput {
    NamedInput {
        name: name.into(),
        re: z.re,
        im: z.im,
    }
}

pub fn named_re(name: &str, x: f64) -> NamedInput {
    NamedInput {
        name: name.into(),
        re: x,
        im: 0.0,
    }
}
