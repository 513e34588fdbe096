//! Seeded property suites for the closure, implication and inclusion
//! theorems of E-Orlicz theory.
//!
//! Every suite is a pure function of its seed, case count and tolerance
//! configuration. A case whose hypothesis fails is skipped and counted, never
//! reported as a theorem failure.

mod chain;
mod closure;
mod gen;
mod inclusion;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{stratified_t_samples, ClassifyError, EClass, ToleranceConfig};
use crate::expr::ExprError;
use crate::measure::{MeasureError, SampledFn, Space};
use crate::norms::NormError;

pub use chain::{check_chain, check_non_reversal};
pub use closure::{check_closure, ClosureOp};
pub use gen::{
    gen_any, gen_in_class, gen_young, FamilyDescriptor, GeneratedPair, MapFamily, MapU, PhiFamily, Piece, Sigma,
    TFactor, DRAW_BUDGET,
};
pub use inclusion::{check_inclusion, InclusionMode, INCLUSION_FAMILIES};

/// Domain of generated (Φ, E) pairs.
pub const GEN_OMEGA: (f64, f64) = (-1.0, 1.0);
/// Classifier t-samples per generated pair.
pub const SUITE_T_SAMPLES: usize = 9;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("no {class} pair found within {budget} draws for seed {seed}")]
    BudgetExhausted { class: EClass, seed: u64, budget: usize },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseFailure {
    pub seed: u64,
    pub theorem: String,
    pub witness: serde_json::Value,
}

/// Outcome of one suite. `cases_passed + failures.len() == cases_run`;
/// skipped cases (failed hypotheses) are counted apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases_run: usize,
    pub cases_passed: usize,
    pub failures: Vec<CaseFailure>,
    pub skipped: usize,
    pub diagnostics: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>) -> SuiteReport {
        SuiteReport {
            suite: suite.into(),
            cases_run: 0,
            cases_passed: 0,
            failures: Vec::new(),
            skipped: 0,
            diagnostics: Vec::new(),
        }
    }

    pub fn pass(&mut self) {
        self.cases_run += 1;
        self.cases_passed += 1;
    }

    pub fn fail(&mut self, seed: u64, theorem: impl Into<String>, witness: serde_json::Value) {
        self.cases_run += 1;
        self.failures.push(CaseFailure {
            seed,
            theorem: theorem.into(),
            witness,
        });
    }

    /// Records one case from a list of violated conclusions.
    pub fn record(&mut self, seed: u64, theorem: &str, violations: Vec<serde_json::Value>) {
        if violations.is_empty() {
            self.pass();
        } else {
            self.fail(seed, theorem, serde_json::Value::Array(violations));
        }
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn diagnostic(&mut self, text: impl Into<String>) {
        self.diagnostics.push(text.into());
    }

    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Independent per-case seed derived from a suite seed.
pub fn case_seed(seed: u64, case: usize) -> u64 {
    // splitmix64 finaliser
    let mut z = seed ^ (case as u64).wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The t-samples every generated pair is classified at.
pub fn suite_t_samples(omega: (f64, f64)) -> Vec<f64> {
    stratified_t_samples(omega.0, omega.1, SUITE_T_SAMPLES)
}

/// Tolerances used by the suites: the defaults with `SUITE_T_SAMPLES`.
pub fn suite_tolerances() -> ToleranceConfig {
    ToleranceConfig::default().with_t_samples(SUITE_T_SAMPLES)
}

/// Test functions for the norm suites, sampled on [0, 1] with 257 nodes:
/// three constants, t, t², an oscillation, a step and a spike.
pub fn test_functions() -> Vec<(&'static str, SampledFn)> {
    let space = Space::interval(0.0, 1.0, 257).expect("valid grid");
    let defs: [(&'static str, fn(f64) -> f64); 8] = [
        ("const_0.5", |_| 0.5),
        ("const_1", |_| 1.0),
        ("const_2", |_| 2.0),
        ("t", |t| t),
        ("t^2", |t| t * t),
        ("abs(sin(10t))+0.1", |t| (10.0 * t).sin().abs() + 0.1),
        ("step", |t| if t <= 0.5 { 1.0 } else { 0.0 }),
        ("spike", |t| (1.0 - 50.0 * (t - 0.5).abs()).max(0.0)),
    ];
    defs.iter()
        .map(|&(name, f)| (name, SampledFn::from_fn(space.clone(), f).expect("finite samples")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..100).map(|i| case_seed(7, i)).collect();
        let mut b = a.clone();
        b.sort();
        b.dedup();
        assert_eq!(b.len(), 100);
        assert_eq!(a[3], case_seed(7, 3));
        assert_ne!(case_seed(7, 0), case_seed(8, 0));
    }

    #[test]
    fn report_bookkeeping() {
        let mut r = SuiteReport::new("x");
        r.pass();
        r.skip();
        r.record(3, "thm", vec![serde_json::json!({"a": 1})]);
        r.record(4, "thm", vec![]);
        assert_eq!(r.cases_run, 3);
        assert_eq!(r.cases_passed + r.failures.len(), r.cases_run);
        assert_eq!(r.skipped, 1);
        assert!(!r.all_passed());
    }

    #[test]
    fn test_function_shapes() {
        let fs = test_functions();
        assert_eq!(fs.len(), 8);
        let step = &fs[6].1;
        assert_eq!(step.values()[0], 1.0);
        assert_eq!(*step.values().last().unwrap(), 0.0);
        assert_eq!(fs[7].1.max_value(), 1.0);
    }
}
