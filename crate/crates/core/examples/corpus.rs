//! The built-in worked examples and how each one fares.

use eorlicz::classify::ToleranceConfig;
use eorlicz::corpus::{corpus_entries, run_corpus};

fn main() {
    for e in corpus_entries() {
        println!("{:<36} Φ = {}  E = ({}, {})  Ω = [{}, {}]", e.id, e.phi.body, e.map.e_t, e.map.e_u, e.omega.0, e.omega.1);
    }
    let report = run_corpus(&ToleranceConfig::default());
    for d in &report.diagnostics {
        println!("{d}");
    }
    for f in &report.failures {
        println!("mismatch in {}: {}", f.theorem, f.witness);
    }
    println!("{}/{} entries reproduce", report.cases_passed, report.cases_run);
}
