//! Worked examples of E-Orlicz theory with their expected verdicts.
//!
//! The built-in entries live in `data/corpus.json`, in the same shape as CLI
//! input (`phi`, `map_t`, `map_u`, `omega`), so the file can be copied and
//! extended and then loaded with [`load_corpus`].

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::classify::{
    classify, raw_classify, stratified_t_samples, Axiom, ClassReport, ClassVerdicts, ComposedPhi, EClass, PhiSpec,
    PlaneMap, ToleranceConfig, Verdict,
};
use crate::expr::{parse_expr, Bindings, ExprError, Var};
use crate::ext_real::ExtReal;
use crate::measure::{SampledFn, Space};
use crate::norms::{compute_norm, NormKind, NormSpec, YoungComposition};
use crate::verify::SuiteReport;

const BUILTIN: &str = include_str!("../data/corpus.json");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("entry {id}: {field}: {source}")]
    Expr {
        id: String,
        field: &'static str,
        source: ExprError,
    },
    #[error("entry {id}: omega [{a}, {b}] is not a nonempty interval")]
    Omega { id: String, a: f64, b: f64 },
    #[error("entry {id}: expected verdicts break the class chain")]
    Chain { id: String },
}

/// Expected class verdicts; `None` means the entry makes no claim.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ExpectedVerdicts {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_n: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_young: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_strong_young: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_orlicz: Option<bool>,
}

impl ExpectedVerdicts {
    pub fn get(&self, class: EClass) -> Option<bool> {
        match class {
            EClass::EN => self.e_n,
            EClass::EYoung => self.e_young,
            EClass::EStrongYoung => self.e_strong_young,
            EClass::EOrlicz => self.e_orlicz,
        }
    }

    /// No claimed member of a class whose implied weaker class is claimed false.
    pub fn respects_chain(&self) -> bool {
        let order = [EClass::EN, EClass::EStrongYoung, EClass::EOrlicz, EClass::EYoung];
        order.iter().enumerate().all(|(i, &strong)| {
            self.get(strong) != Some(true) || order[i + 1..].iter().all(|&weak| self.get(weak) != Some(false))
        })
    }

    fn mismatches(&self, actual: &ClassVerdicts) -> Vec<(EClass, bool)> {
        EClass::ALL
            .into_iter()
            .filter_map(|c| self.get(c).filter(|&want| want != actual.get(c)).map(|want| (c, want)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// φE = Φ∘E.
    Composed,
    /// Φ with the identity map.
    Raw,
}

/// A named quantity the classifier must reproduce. Values are expressions
/// in t, compared within `tol·max(1, |expected|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExpectedWitness {
    UPhi {
        side: Side,
        value: String,
        tol: f64,
    },
    APhi {
        side: Side,
        value: String,
        tol: f64,
    },
    LeftLimitAtU {
        side: Side,
        value: String,
        tol: f64,
    },
    /// The axiom fails at some sampled t in `t_range` (default: all of Ω),
    /// and every such failure carries the stated witness value and u.
    AxiomFails {
        side: Side,
        axiom: Axiom,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<String>,
        #[serde(default)]
        tol: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_range: Option<(f64, f64)>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub composed: ExpectedVerdicts,
    #[serde(default)]
    pub raw: ExpectedVerdicts,
    #[serde(default)]
    pub witnesses: Vec<ExpectedWitness>,
}

/// A norm of `f_expr` sampled on Ω, with the expected value as an
/// expression and a relative tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormCheck {
    pub kind: NormKind,
    pub f_expr: String,
    pub nodes: usize,
    #[serde(default)]
    pub weak: bool,
    pub value: String,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EntryFile {
    id: String,
    phi: String,
    map_t: String,
    map_u: String,
    omega: (f64, f64),
    expected: Expected,
    #[serde(default)]
    norms: Vec<NormCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusEntry {
    pub id: String,
    pub phi: PhiSpec,
    pub map: PlaneMap,
    pub omega: (f64, f64),
    pub expected: Expected,
    pub norms: Vec<NormCheck>,
}

impl CorpusEntry {
    pub fn composed(&self) -> ComposedPhi {
        ComposedPhi::new(self.phi.clone(), self.map.clone())
    }

    fn from_file(e: EntryFile) -> Result<CorpusEntry, CorpusError> {
        let expr_err = |field| {
            let id = e.id.clone();
            move |source| CorpusError::Expr { id, field, source }
        };
        let phi = PhiSpec::parse(&e.phi).map_err(expr_err("phi"))?;
        let map = PlaneMap::parse(&e.map_t, &e.map_u).map_err(expr_err("map"))?;
        let (a, b) = e.omega;
        if !(a < b && a.is_finite() && b.is_finite()) {
            return Err(CorpusError::Omega { id: e.id, a, b });
        }
        if !(e.expected.composed.respects_chain() && e.expected.raw.respects_chain()) {
            return Err(CorpusError::Chain { id: e.id });
        }
        for w in &e.expected.witnesses {
            let value = match w {
                ExpectedWitness::UPhi { value, .. }
                | ExpectedWitness::APhi { value, .. }
                | ExpectedWitness::LeftLimitAtU { value, .. } => Some(value),
                ExpectedWitness::AxiomFails { value, .. } => value.as_ref(),
            };
            if let Some(v) = value {
                parse_expr(v, &[Var::T]).map_err(expr_err("witness value"))?;
            }
        }
        for n in &e.norms {
            parse_expr(&n.f_expr, &[Var::T]).map_err(expr_err("f_expr"))?;
            parse_expr(&n.value, &[]).map_err(expr_err("norm value"))?;
        }
        Ok(CorpusEntry {
            id: e.id,
            phi,
            map,
            omega: e.omega,
            expected: e.expected,
            norms: e.norms,
        })
    }
}

/// Parses a corpus file. Every expression is checked at load time.
pub fn load_corpus(json: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let files: Vec<EntryFile> = serde_json::from_str(json)?;
    files.into_iter().map(CorpusEntry::from_file).collect()
}

/// The built-in worked examples.
pub fn corpus_entries() -> Vec<CorpusEntry> {
    load_corpus(BUILTIN).expect("built-in corpus is valid")
}

/// Classifies every built-in entry, composed and raw, at `tols.t_samples`
/// stratified points of its Ω, and compares verdicts, witnesses and norms.
pub fn run_corpus(tols: &ToleranceConfig) -> SuiteReport {
    run_entries(&corpus_entries(), tols)
}

pub fn run_entries(entries: &[CorpusEntry], tols: &ToleranceConfig) -> SuiteReport {
    let mut report = SuiteReport::new("corpus");
    for (i, entry) in entries.iter().enumerate() {
        let (violations, summary) = check_entry(entry, tols);
        report.diagnostic(summary);
        report.record(i as u64, &entry.id, violations);
    }
    report
}

fn check_entry(entry: &CorpusEntry, tols: &ToleranceConfig) -> (Vec<serde_json::Value>, String) {
    let ts = stratified_t_samples(entry.omega.0, entry.omega.1, tols.t_samples);
    let composed = classify(&entry.composed(), &ts, tols);
    let raw = raw_classify(&entry.phi, &ts, tols);
    let mut violations = Vec::new();
    let mut summary = format!("{}:", entry.id);
    for (side, result, expected) in [
        (Side::Composed, &composed, &entry.expected.composed),
        (Side::Raw, &raw, &entry.expected.raw),
    ] {
        match result {
            Ok(r) => {
                summary.push_str(&format!(" {}={}", side_name(side), verdict_string(&r.verdicts)));
                if side == Side::Composed && !r.chain_consistent {
                    violations.push(json!({ "side": side, "chain_broken": r.verdicts }));
                }
                for (class, want) in expected.mismatches(&r.verdicts) {
                    let why = r.failure(class).map(|f| json!(f));
                    violations.push(json!({
                        "side": side, "class": class, "expected": want, "got": !want, "evidence": why,
                    }));
                }
            }
            Err(e) => violations.push(json!({ "side": side, "error": e.to_string() })),
        }
    }
    for w in &entry.expected.witnesses {
        let report = match witness_side(w) {
            Side::Composed => &composed,
            Side::Raw => &raw,
        };
        if let Ok(r) = report {
            if let Some(v) = check_witness(w, r, entry.omega) {
                violations.push(v);
            }
        }
    }
    for n in &entry.norms {
        if let Some(v) = check_norm(n, entry, &ts, tols) {
            violations.push(v);
        }
    }
    (violations, summary)
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Composed => "composed",
        Side::Raw => "raw",
    }
}

fn verdict_string(v: &ClassVerdicts) -> String {
    let held: Vec<&str> = EClass::ALL.into_iter().filter(|c| v.get(*c)).map(EClass::name).collect();
    format!("[{}]", held.join(","))
}

fn witness_side(w: &ExpectedWitness) -> Side {
    match w {
        ExpectedWitness::UPhi { side, .. }
        | ExpectedWitness::APhi { side, .. }
        | ExpectedWitness::LeftLimitAtU { side, .. }
        | ExpectedWitness::AxiomFails { side, .. } => *side,
    }
}

fn value_at(text: &str, t: f64) -> ExtReal {
    parse_expr(text, &[Var::T])
        .and_then(|e| e.eval(&Bindings::new().with(Var::T, t)))
        .unwrap_or(ExtReal::Undefined)
}

fn close(got: ExtReal, want: ExtReal, tol: f64) -> bool {
    match (got.finite(), want.finite()) {
        (Some(a), Some(b)) => (a - b).abs() <= tol * b.abs().max(1.0),
        _ => got == want,
    }
}

fn check_witness(w: &ExpectedWitness, r: &ClassReport, omega: (f64, f64)) -> Option<serde_json::Value> {
    let profile_values = |text: &str, tol: f64, pick: &dyn Fn(&crate::classify::AxiomProfile) -> Option<ExtReal>| {
        let bad: Vec<_> = r
            .profiles
            .iter()
            .filter_map(|p| {
                let want = value_at(text, p.t);
                match pick(p) {
                    Some(got) if close(got, want, tol) => None,
                    got => Some(json!({ "t": p.t, "got": got, "expected": want })),
                }
            })
            .collect();
        (!bad.is_empty()).then(|| json!({ "witness": w, "mismatches": bad }))
    };
    match w {
        ExpectedWitness::UPhi { value, tol, .. } => profile_values(value, *tol, &|p| Some(p.u_phi)),
        ExpectedWitness::APhi { value, tol, .. } => profile_values(value, *tol, &|p| Some(p.a_phi)),
        ExpectedWitness::LeftLimitAtU { value, tol, .. } => profile_values(value, *tol, &|p| p.left_limit_at_u),
        ExpectedWitness::AxiomFails {
            axiom,
            value,
            tol,
            u,
            t_range,
            ..
        } => {
            let (lo, hi) = t_range.unwrap_or(omega);
            let failing: Vec<_> = r
                .profiles
                .iter()
                .filter(|p| p.t >= lo && p.t <= hi && p.get(*axiom).verdict == Verdict::Fail)
                .collect();
            if failing.is_empty() {
                return Some(json!({ "witness": w, "error": "axiom does not fail in range" }));
            }
            let bad: Vec<_> = failing
                .iter()
                .filter_map(|p| {
                    let wit = p.get(*axiom).witness.as_ref()?;
                    let value_ok = value.as_ref().map_or(true, |v| close(wit.value(), value_at(v, p.t), *tol));
                    let u_ok = u.map_or(true, |u| (wit.u() - u).abs() <= tol * u.abs().max(1.0));
                    (!(value_ok && u_ok)).then(|| json!({ "t": p.t, "got": wit }))
                })
                .collect();
            (!bad.is_empty()).then(|| json!({ "witness": w, "mismatches": bad }))
        }
    }
}

fn check_norm(n: &NormCheck, entry: &CorpusEntry, ts: &[f64], tols: &ToleranceConfig) -> Option<serde_json::Value> {
    let want = value_at(&n.value, 0.0);
    let result = (|| -> Result<ExtReal, String> {
        let space = Space::interval(entry.omega.0, entry.omega.1, n.nodes).map_err(|e| e.to_string())?;
        let f_expr = parse_expr(&n.f_expr, &[Var::T]).map_err(|e| e.to_string())?;
        let f = SampledFn::from_expr(space, &f_expr).map_err(|e| e.to_string())?;
        let c = YoungComposition::checked(entry.composed(), ts, tols).map_err(|e| e.to_string())?;
        let spec = NormSpec::new(n.kind).weak(n.weak);
        Ok(compute_norm(&f, &c, &spec).map_err(|e| e.to_string())?.value)
    })();
    match result {
        Ok(got) if close(got, want, n.tol) => None,
        Ok(got) => Some(json!({ "norm": n, "got": got, "expected": want })),
        Err(e) => Some(json!({ "norm": n, "error": e })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_corpus_loads() {
        let entries = corpus_entries();
        assert_eq!(entries.len(), 13);
        let mut ids: Vec<&str> = entries.iter().map(|e| e.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 13);
    }

    #[test]
    fn chain_breaking_expectations_are_rejected() {
        let bad = r#"[{"id": "x", "phi": "u^2", "map_t": "t", "map_u": "u", "omega": [0, 1],
            "expected": {"composed": {"e_n": true, "e_young": false}}}]"#;
        assert!(matches!(load_corpus(bad), Err(CorpusError::Chain { .. })));
    }

    #[test]
    fn bad_expressions_name_the_field() {
        let bad = r#"[{"id": "x", "phi": "u^", "map_t": "t", "map_u": "u", "omega": [0, 1],
            "expected": {"composed": {}}}]"#;
        let err = load_corpus(bad).unwrap_err().to_string();
        assert!(err.contains("phi"), "{err}");
    }

    #[test]
    fn a_user_entry_runs() {
        let json = r#"[{"id": "square", "phi": "u^2", "map_t": "t", "map_u": "2*u", "omega": [0, 1],
            "expected": {"composed": {"e_n": true}, "witnesses": [
                {"kind": "u_phi", "side": "composed", "value": "inf", "tol": 0}]},
            "norms": [{"kind": "luxemburg", "f_expr": "1", "nodes": 65, "value": "2", "tol": 1e-9}]}]"#;
        let r = run_entries(&load_corpus(json).unwrap(), &ToleranceConfig::default().with_t_samples(5));
        assert!(r.all_passed(), "{:?}", r.failures);
    }
}
