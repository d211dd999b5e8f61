//! Verification suites: every documented example and invariant of the core
//! library, run as independent cases and merged into one JSON report.

mod amp;
mod cli;
mod en;
mod flow;
mod gr;
mod u;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

/// Every operation a full run must exercise.
pub const ALL_OPS: &[&str] = &[
    "plucker",
    "classify_positivity",
    "cauchy_binet",
    "sample_point",
    "verify_flow_axioms",
    "time_to_radius",
    "time_to_boundary",
    "retract_to_ball",
    "extend_from_ball",
    "build_operators",
    "tau_eigensystem",
    "x0_plucker",
    "chart_embed",
    "chart_invert",
    "flow_chart",
    "flow_grassmann",
    "shift_plucker_expansion",
    "a_flow",
    "b_coords",
    "classify_u_positivity",
    "sample_v_tnn",
    "build_spec",
    "amplituhedron_map",
    "chart_project",
    "flow_m",
    "cyclic_polytope_oracle",
    "enumerate_nc",
    "kreweras",
    "a_sigma",
    "sigma_prime",
    "ud_apply",
    "verify_lemma_ud",
    "phi_apply",
    "h_subspace",
    "response_matrix",
    "xn_search",
    "run_verify_suite",
    "trajectory_export",
    "io_codec",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Gr,
    Flow,
    U,
    Amp,
    En,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Gr => "gr",
            Suite::Flow => "flow",
            Suite::U => "u",
            Suite::Amp => "amp",
            Suite::En => "en",
            Suite::All => "all",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        [Suite::Gr, Suite::Flow, Suite::U, Suite::Amp, Suite::En, Suite::All]
            .into_iter()
            .find(|s| s.name() == name)
    }

    /// Operations the suite is expected to cover.
    pub fn ops(self) -> Vec<&'static str> {
        match self {
            Suite::Gr => ALL_OPS[..4].iter().chain(&ALL_OPS[9..17]).copied().collect(),
            Suite::Flow => ALL_OPS[4..9].to_vec(),
            Suite::U => ALL_OPS[17..21].to_vec(),
            Suite::Amp => ALL_OPS[21..26].to_vec(),
            Suite::En => ALL_OPS[26..36].to_vec(),
            Suite::All => ALL_OPS.to_vec(),
        }
    }

    fn cases(self) -> Vec<Case> {
        match self {
            Suite::Gr => gr::cases(),
            Suite::Flow => flow::cases(),
            Suite::U => u::cases(),
            Suite::Amp => amp::cases(),
            Suite::En => en::cases(),
            Suite::All => [gr::cases(), flow::cases(), u::cases(), amp::cases(), en::cases(), cli::cases()].concat(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Float tolerance; `None` uses 1e-9.
    pub tol: Option<f64>,
    /// Size cap for exhaustive loops; `None` uses each suite's default.
    pub n: Option<usize>,
}

/// What a case sees of the configuration.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub seed: u64,
    pub tol: f64,
    pub n: Option<usize>,
}

impl Ctx {
    /// The size cap, or `default` when none was given.
    pub fn cap(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }
}

/// One failed comparison.
#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub inputs: Value,
    pub expected: Value,
    pub got: Value,
    pub tolerance: Option<f64>,
}

impl From<tnnball_core::Error> for Mismatch {
    fn from(e: tnnball_core::Error) -> Self {
        Mismatch {
            inputs: Value::Null,
            expected: json!("no error"),
            got: json!({ "error": e.to_string() }),
            tolerance: None,
        }
    }
}

pub type Check = Result<(), Mismatch>;

pub fn ensure(ok: bool, inputs: Value, expected: impl Serialize, got: impl Serialize, tol: Option<f64>) -> Check {
    if ok {
        Ok(())
    } else {
        Err(Mismatch {
            inputs,
            expected: json!(expected),
            got: json!(got),
            tolerance: tol,
        })
    }
}

pub fn close(inputs: Value, expected: f64, got: f64, tol: f64) -> Check {
    ensure((expected - got).abs() <= tol, inputs, expected, got, Some(tol))
}

/// Fails unless `worst <= tol`; `worst` is reported as `got`.
pub fn bounded(inputs: Value, worst: f64, tol: f64) -> Check {
    ensure(worst <= tol, inputs, json!({ "max_error_at_most": tol }), worst, Some(tol))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[derive(Clone, Copy)]
pub struct Case {
    pub id: &'static str,
    pub ops: &'static [&'static str],
    pub run: fn(&Ctx) -> Check,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub id: String,
    pub inputs: Value,
    pub expected: Value,
    pub got: Value,
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Coverage {
    pub ops: Vec<String>,
    pub missing: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub tol: f64,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<Failure>,
    pub coverage: Coverage,
    /// Seconds; the only field that varies between identical runs.
    pub wall_time: f64,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

fn panic_message(e: Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| e.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

/// Runs every case of `suite` in parallel; failures come back sorted by case id.
pub fn run_verify_suite(suite: Suite, config: &VerifyConfig) -> VerifyReport {
    let start = Instant::now();
    let ctx = Ctx {
        seed: config.seed,
        tol: config.tol.unwrap_or(1e-9),
        n: config.n,
    };
    let cases = suite.cases();
    let outcomes: Vec<(&'static str, Check)> = cases
        .par_iter()
        .map(|case| {
            let result = catch_unwind(AssertUnwindSafe(|| (case.run)(&ctx))).unwrap_or_else(|e| {
                Err(Mismatch {
                    inputs: Value::Null,
                    expected: json!("no panic"),
                    got: json!({ "panic": panic_message(e) }),
                    tolerance: None,
                })
            });
            (case.id, result)
        })
        .collect();

    let mut failures: Vec<Failure> = outcomes
        .into_iter()
        .filter_map(|(id, r)| r.err().map(|m| (id, m)))
        .map(|(id, m)| Failure {
            id: id.to_string(),
            inputs: m.inputs,
            expected: m.expected,
            got: m.got,
            tolerance: m.tolerance,
        })
        .collect();
    failures.sort_by(|a, b| a.id.cmp(&b.id));

    let mut exercised: Vec<String> = cases.iter().flat_map(|c| c.ops.iter().map(|s| s.to_string())).collect();
    if suite == Suite::All {
        exercised.push("run_verify_suite".into());
    }
    exercised.sort();
    exercised.dedup();
    let missing: Vec<String> = suite
        .ops()
        .into_iter()
        .filter(|op| !exercised.iter().any(|e| e == op))
        .map(String::from)
        .collect();
    if !missing.is_empty() {
        failures.push(Failure {
            id: "coverage".into(),
            inputs: json!({ "suite": suite.name() }),
            expected: json!([]),
            got: json!(missing),
            tolerance: None,
        });
    }

    let failed = failures.iter().filter(|f| f.id != "coverage").count();
    VerifyReport {
        suite: suite.name().into(),
        seed: ctx.seed,
        tol: ctx.tol,
        cases: cases.len(),
        passed: cases.len() - failed,
        failures,
        coverage: Coverage { ops: exercised, missing },
        wall_time: start.elapsed().as_secs_f64(),
    }
}
