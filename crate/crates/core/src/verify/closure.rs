use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::gen::{gen_in_class, gen_linear_pair, gen_map_pair, gen_phi_for_map, MapPair};
use super::{case_seed, rng, suite_t_samples, SuiteReport, VerifyError, GEN_OMEGA};
use crate::classify::{classify, u_mid, ComposedPhi, EClass, PhiSpec, PlaneMap, ToleranceConfig};
use crate::expr::{BinaryOp, Expr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureOp {
    Sum,
    Scale,
    MaxPhi,
    MapSum,
    MapScale,
    MapCompose,
    MapMax,
    MapMin,
    UniformLimit,
}

impl ClosureOp {
    pub const ALL: [ClosureOp; 9] = [
        ClosureOp::Sum,
        ClosureOp::Scale,
        ClosureOp::MaxPhi,
        ClosureOp::MapSum,
        ClosureOp::MapScale,
        ClosureOp::MapCompose,
        ClosureOp::MapMax,
        ClosureOp::MapMin,
        ClosureOp::UniformLimit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClosureOp::Sum => "sum",
            ClosureOp::Scale => "scale",
            ClosureOp::MaxPhi => "max_phi",
            ClosureOp::MapSum => "map_sum",
            ClosureOp::MapScale => "map_scale",
            ClosureOp::MapCompose => "map_compose",
            ClosureOp::MapMax => "map_max",
            ClosureOp::MapMin => "map_min",
            ClosureOp::UniformLimit => "uniform_limit",
        }
    }

    pub fn from_name(name: &str) -> Option<ClosureOp> {
        ClosureOp::ALL.into_iter().find(|op| op.name() == name)
    }
}

/// Index of the uniform-limit sequence at which Φ_n is tested.
const LIMIT_N: f64 = 1e6;
/// Relative closeness of Φ_n∘E_n to Φ∘E required on the compact u-range.
const LIMIT_CLOSENESS: f64 = 1e-4;

/// Compositions a case must keep in the class, or `None` when the case
/// hypothesis fails.
struct Case {
    results: Vec<(&'static str, ComposedPhi)>,
    /// Instance used for the c = 0 edge diagnostic.
    zero_edge: Option<ComposedPhi>,
    limit_deviation: Option<f64>,
}

/// Applies `op` to generated members of `class` and asserts the result is
/// still a member, over `cases` seeded cases. Scalings use c > 0; c = 0 is
/// reported as a diagnostic.
pub fn check_closure(
    class: EClass,
    op: ClosureOp,
    seed: u64,
    cases: usize,
    tols: &ToleranceConfig,
) -> Result<SuiteReport, VerifyError> {
    let mut report = SuiteReport::new(format!("closure.{}.{}", class.name(), op.name()));
    let theorem = format!("{}.closed_under_{}", class.name(), op.name());
    let mut zero_edge = None;
    let mut worst_deviation: f64 = 0.0;
    let mut budget_misses = 0;
    for i in 0..cases {
        let s = case_seed(seed, i);
        let case = match build_case(class, op, s, tols) {
            Ok(Some(case)) => case,
            Ok(None) => {
                report.skip();
                continue;
            }
            Err(VerifyError::BudgetExhausted { .. }) => {
                budget_misses += 1;
                report.skip();
                continue;
            }
            Err(e) => return Err(e),
        };
        if zero_edge.is_none() {
            zero_edge = case.zero_edge;
        }
        if let Some(d) = case.limit_deviation {
            worst_deviation = worst_deviation.max(d);
        }
        let mut violations = Vec::new();
        for (label, c) in &case.results {
            match classify(c, &suite_t_samples(GEN_OMEGA), tols) {
                Ok(r) if r.verdicts.get(class) => {}
                Ok(r) => violations.push(json!({
                    "result": label,
                    "composition": c.to_string(),
                    "phi_e": c.expr().to_string(),
                    "failure": r.failure(class),
                })),
                Err(e) => violations.push(json!({
                    "result": label,
                    "composition": c.to_string(),
                    "error": e.to_string(),
                })),
            }
        }
        report.record(s, &theorem, violations);
    }
    if budget_misses > 0 {
        report.diagnostic(format!("{budget_misses} cases skipped: generator budget exhausted"));
    }
    if let Some(c) = zero_edge {
        report.diagnostic(zero_edge_note(class, &c, tols));
    }
    if op == ClosureOp::UniformLimit && report.cases_run > 0 {
        report.diagnostic(format!(
            "max relative deviation |Φ_n∘E_n − Φ∘E| / (1 + |Φ∘E|) at n = {LIMIT_N:e} on u ∈ [0, 16]: {worst_deviation:.3e}"
        ));
    }
    Ok(report)
}

fn zero_edge_note(class: EClass, c: &ComposedPhi, tols: &ToleranceConfig) -> String {
    match classify(c, &suite_t_samples(GEN_OMEGA), tols) {
        Ok(r) if r.verdicts.get(class) => format!("c = 0 edge: {c} is {} (unexpected)", class.name()),
        Ok(r) => {
            let axiom = r.failure(class).map_or("?".to_string(), |f| f.axiom.name().to_string());
            format!(
                "c = 0 edge: {c} fails {axiom}, so the zero function is not {}; definitional edge, not gated",
                class.name()
            )
        }
        Err(e) => format!("c = 0 edge: {c} could not be classified: {e}"),
    }
}

fn with_phi(phi: Expr, map: &PlaneMap) -> ComposedPhi {
    ComposedPhi::new(PhiSpec::new(phi), map.clone())
}

fn scale_factor(seed: u64) -> f64 {
    let c: f64 = rng(seed ^ 0x5ca1e).gen_range(0.05..=5.0);
    (c * 1e4).round() / 1e4
}

fn componentwise(op: BinaryOp, a: &PlaneMap, b: &PlaneMap) -> PlaneMap {
    PlaneMap::new(
        Expr::binary(op, a.e_t.clone(), b.e_t.clone()),
        Expr::binary(op, a.e_u.clone(), b.e_u.clone()),
    )
}

fn scaled_map(c: f64, m: &PlaneMap) -> PlaneMap {
    PlaneMap::new(Expr::constant(c) * m.e_t.clone(), Expr::constant(c) * m.e_u.clone())
}

fn build_case(class: EClass, op: ClosureOp, s: u64, tols: &ToleranceConfig) -> Result<Option<Case>, VerifyError> {
    let plain = |results: Vec<(&'static str, ComposedPhi)>| Case {
        results,
        zero_edge: None,
        limit_deviation: None,
    };
    let case = match op {
        ClosureOp::Sum | ClosureOp::MaxPhi => {
            let p1 = gen_in_class(class, s, tols)?;
            let p2 = gen_phi_for_map(class, p1.family.map, s ^ 0x2, tols)?;
            let (a, b) = (p1.phi.body.clone(), p2.phi.body.clone());
            let combined = if op == ClosureOp::Sum {
                a + b
            } else {
                Expr::binary(BinaryOp::Max, a, b)
            };
            plain(vec![(op.name(), with_phi(combined, &p1.map))])
        }
        ClosureOp::Scale => {
            let p = gen_in_class(class, s, tols)?;
            let c = scale_factor(s);
            Case {
                results: vec![("c·Φ", with_phi(Expr::constant(c) * p.phi.body.clone(), &p.map))],
                zero_edge: Some(with_phi(Expr::constant(0.0) * p.phi.body.clone(), &p.map)),
                limit_deviation: None,
            }
        }
        ClosureOp::MapSum | ClosureOp::MapScale | ClosureOp::MapCompose => {
            let pair = gen_linear_pair(class, s, tols)?;
            let [m1, m2] = pair.maps.map(|m| m.map());
            match op {
                ClosureOp::MapSum => plain(vec![(
                    "E1 + E2",
                    pair.composed_with(componentwise(BinaryOp::Add, &m1, &m2)),
                )]),
                ClosureOp::MapScale => {
                    let c = scale_factor(s);
                    Case {
                        results: vec![("c·E1", pair.composed_with(scaled_map(c, &m1)))],
                        zero_edge: Some(pair.composed_with(scaled_map(0.0, &m1))),
                        limit_deviation: None,
                    }
                }
                _ => plain(vec![
                    ("E1∘E2", pair.composed_with(m1.compose(&m2))),
                    ("E2∘E1", pair.composed_with(m2.compose(&m1))),
                ]),
            }
        }
        ClosureOp::MapMax | ClosureOp::MapMin => {
            let pair: MapPair = gen_map_pair(class, s, tols)?;
            let [m1, m2] = pair.maps.map(|m| m.map());
            let (label, bop) = if op == ClosureOp::MapMax {
                ("max(E1, E2)", BinaryOp::Max)
            } else {
                ("min(E1, E2)", BinaryOp::Min)
            };
            plain(vec![(label, pair.composed_with(componentwise(bop, &m1, &m2)))])
        }
        ClosureOp::UniformLimit => return uniform_limit_case(class, s, tols),
    };
    Ok(Some(case))
}

/// Φ_n = Φ + Ψ/n composed with E_n = (σ(t), (α + 1/n)·u): members of the
/// class converging uniformly on u ∈ [0, 16] to Φ∘E.
fn uniform_limit_case(class: EClass, s: u64, tols: &ToleranceConfig) -> Result<Option<Case>, VerifyError> {
    let p = gen_in_class(class, s, tols)?;
    let psi = gen_phi_for_map(class, p.family.map, s ^ 0x3, tols)?;
    let mut map_n = p.family.map;
    map_n.alpha += 1.0 / LIMIT_N;
    let phi_n = p.phi.body.clone() + Expr::constant(1.0 / LIMIT_N) * psi.phi.body.clone();
    let c_n = with_phi(phi_n, &map_n.map());
    let limit = p.composed();

    if !super::gen::in_class(&c_n, class, tols) {
        return Ok(None);
    }
    let mut deviation: f64 = 0.0;
    for t in suite_t_samples(GEN_OMEGA) {
        for u in u_mid() {
            let (a, b) = (c_n.eval(t, u)?, limit.eval(t, u)?);
            match (a.finite(), b.finite()) {
                (Some(a), Some(b)) => deviation = deviation.max((a - b).abs() / (1.0 + b.abs())),
                _ if a == b => {}
                _ => deviation = f64::INFINITY,
            }
        }
    }
    if deviation > LIMIT_CLOSENESS {
        return Ok(None);
    }
    Ok(Some(Case {
        results: vec![("lim Φ_n∘E_n", limit)],
        zero_edge: None,
        limit_deviation: Some(deviation),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::suite_tolerances;

    #[test]
    fn op_names_round_trip() {
        for op in ClosureOp::ALL {
            assert_eq!(ClosureOp::from_name(op.name()), Some(op));
        }
    }

    #[test]
    fn young_sum_suite_passes() {
        let r = check_closure(EClass::EYoung, ClosureOp::Sum, 11, 4, &suite_tolerances()).unwrap();
        assert_eq!(r.cases_run + r.skipped, 4);
        assert!(r.all_passed(), "{:?}", r.failures);
    }

    #[test]
    fn scale_reports_zero_edge() {
        let r = check_closure(EClass::EYoung, ClosureOp::Scale, 3, 2, &suite_tolerances()).unwrap();
        assert!(r.all_passed());
        assert!(r.diagnostics.iter().any(|d| d.contains("c = 0") && d.contains("limit_value_inf")), "{:?}", r.diagnostics);
    }
}
