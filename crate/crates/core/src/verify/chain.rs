use std::collections::BTreeMap;

use serde_json::json;

use super::gen::gen_any;
use super::{case_seed, suite_t_samples, SuiteReport, VerifyError, GEN_OMEGA};
use crate::classify::{classify, stratified_t_samples, EClass, ToleranceConfig};
use crate::corpus::corpus_entries;

/// Asserts e_n ⇒ e_strong_young ⇒ e_orlicz ⇒ e_young on `cases` pairs from
/// the unrestricted generator, most of which are not E-Young.
pub fn check_chain(seed: u64, cases: usize, tols: &ToleranceConfig) -> Result<SuiteReport, VerifyError> {
    let mut report = SuiteReport::new("chain");
    let mut patterns: BTreeMap<&'static str, usize> = BTreeMap::new();
    for i in 0..cases {
        let s = case_seed(seed, i);
        let pair = gen_any(s);
        let c = pair.composed();
        let r = match classify(&c, &suite_t_samples(GEN_OMEGA), tols) {
            Ok(r) => r,
            Err(e) => {
                // An undefined composition has no verdicts to chain.
                report.skip();
                report.diagnostic(format!("seed {s}: {c} not classifiable: {e}"));
                continue;
            }
        };
        let v = r.verdicts;
        let strongest = if v.e_n {
            "e_n"
        } else if v.e_strong_young {
            "e_strong_young"
        } else if v.e_orlicz {
            "e_orlicz"
        } else if v.e_young {
            "e_young"
        } else {
            "none"
        };
        *patterns.entry(strongest).or_default() += 1;
        let violations = if r.chain_consistent {
            vec![]
        } else {
            vec![json!({ "composition": c.to_string(), "verdicts": v })]
        };
        report.record(s, "chain.e_n⇒e_strong_young⇒e_orlicz⇒e_young", violations);
    }
    let summary: Vec<String> = patterns.iter().map(|(k, n)| format!("{k}: {n}")).collect();
    report.diagnostic(format!("strongest class reached: {}", summary.join(", ")));
    Ok(report)
}

/// Counterexamples for each reverse arrow: `(corpus id, class that holds,
/// stronger class that fails)`.
pub const NON_REVERSALS: [(&str, EClass, EClass); 3] = [
    ("exponential_constant_map", EClass::EStrongYoung, EClass::EN),
    ("flat_then_linear", EClass::EOrlicz, EClass::EStrongYoung),
    ("log_blowup_at_one", EClass::EYoung, EClass::EOrlicz),
];

/// Each counterexample breaks exactly its reverse arrow: the weaker class
/// holds, the next stronger one does not.
pub fn check_non_reversal(tols: &ToleranceConfig) -> Result<SuiteReport, VerifyError> {
    let mut report = SuiteReport::new("chain.non_reversal");
    let entries = corpus_entries();
    for (i, (id, holds, fails)) in NON_REVERSALS.iter().enumerate() {
        let entry = entries.iter().find(|e| e.id == *id).expect("counterexample is in the corpus");
        let ts = stratified_t_samples(entry.omega.0, entry.omega.1, tols.t_samples);
        let r = classify(&entry.composed(), &ts, tols)?;
        let ok = r.chain_consistent && r.verdicts.get(*holds) && !r.verdicts.get(*fails);
        let violations = if ok {
            vec![]
        } else {
            vec![json!({ "entry": id, "verdicts": r.verdicts })]
        };
        report.record(i as u64, &format!("{}⇏{}", holds.name(), fails.name()), violations);
    }
    Ok(report)
}
