use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::gen::{in_class, FamilyDescriptor, MapFamily, MapU, PhiFamily, Sigma, TFactor};
use super::{case_seed, rng, test_functions, SuiteReport, VerifyError};
use crate::classify::{merged_lattice, stratified_t_samples, ComposedPhi, EClass, PhiSpec, PlaneMap, ToleranceConfig};
use crate::ext_real::ExtReal;
use crate::measure::SampledFn;
use crate::norms::{compute_norm, NormKind, NormSpec, YoungComposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InclusionMode {
    /// One Φ, nondecreasing in both arguments, with maps E₁ ≤ E₂.
    MapMono,
    /// One map, with Φ₁∘E ≤ Φ₂∘E.
    PhiMono,
}

impl InclusionMode {
    pub const ALL: [InclusionMode; 2] = [InclusionMode::MapMono, InclusionMode::PhiMono];

    pub fn name(self) -> &'static str {
        match self {
            InclusionMode::MapMono => "map_mono",
            InclusionMode::PhiMono => "phi_mono",
        }
    }
}

pub const INCLUSION_FAMILIES: [NormKind; 5] = NormKind::ALL;
/// Domain of the test functions.
const OMEGA: (f64, f64) = (0.0, 1.0);
const SLACK: f64 = 1e-8;
const WEAK_PROBES: usize = 9;

/// The smaller and the larger composition of one case.
struct Instance {
    small: ComposedPhi,
    large: ComposedPhi,
    family: serde_json::Value,
}

/// Asserts, for every test function and norm family, that the norm under the
/// smaller composition is at most the norm under the larger one, within
/// `1e-8·(1 + value)`. With `weak_cross`, compositions are t-independent and
/// weak norms under the smaller composition are also bounded by strong norms
/// under the larger one; the reverse ratios are reported as diagnostics.
pub fn check_inclusion(
    mode: InclusionMode,
    weak_cross: bool,
    seed: u64,
    cases: usize,
    tols: &ToleranceConfig,
) -> Result<SuiteReport, VerifyError> {
    let name = if weak_cross {
        format!("inclusion.{}.weak_cross", mode.name())
    } else {
        format!("inclusion.{}", mode.name())
    };
    let mut report = SuiteReport::new(name);
    let fns = test_functions();
    let probes = stratified_t_samples(OMEGA.0, OMEGA.1, WEAK_PROBES);
    let mut check_ts: Vec<f64> = fns[0].1.space().nodes().to_vec();
    check_ts.extend(&probes);
    let mut reverse_ratio = [1.0f64; 4];

    for i in 0..cases {
        let s = case_seed(seed, i);
        let mut r = rng(s);
        let inst = match mode {
            InclusionMode::MapMono => map_instance(&mut r, weak_cross, &check_ts),
            InclusionMode::PhiMono => phi_instance(&mut r, weak_cross, &check_ts),
        };
        let Some(inst) = inst else {
            report.skip();
            continue;
        };
        if !(in_class(&inst.small, EClass::EYoung, tols) && in_class(&inst.large, EClass::EYoung, tols)) {
            report.skip();
            continue;
        }
        let small = YoungComposition::trusted(inst.small.clone()).with_t_probes(probes.clone());
        let large = YoungComposition::trusted(inst.large.clone()).with_t_probes(probes.clone());
        let mut violations = Vec::new();
        for (fname, f) in &fns {
            let mut strong = Vec::with_capacity(INCLUSION_FAMILIES.len());
            for kind in INCLUSION_FAMILIES {
                let spec = NormSpec::new(kind);
                let n1 = norm(f, &small, &spec);
                let n2 = norm(f, &large, &spec);
                if let Some(v) = ordering_violation(&n1, &n2) {
                    violations.push(json!({ "f": fname, "family": kind.name(), "detail": v }));
                }
                strong.push((kind, n1, n2));
            }
            if weak_cross {
                let weak_lux = strong[1].1.clone();
                for (k, (kind, strong1, strong2)) in strong.iter().filter(|s| s.0 != NormKind::Weak).enumerate() {
                    let weak1 = if *kind == NormKind::Luxemburg {
                        weak_lux.clone()
                    } else {
                        norm(f, &small, &NormSpec::new(*kind).weak(true))
                    };
                    if let Some(v) = ordering_violation(&weak1, strong2) {
                        violations.push(json!({ "f": fname, "family": kind.name(), "weak_cross": v }));
                    }
                    if let (Ok(w), Ok(s)) = (&weak1, strong1) {
                        if *w > 0.0 && w.is_finite() && s.is_finite() {
                            reverse_ratio[k] = reverse_ratio[k].max(s / w);
                        }
                    }
                }
            }
        }
        if !violations.is_empty() {
            violations.insert(0, inst.family);
        }
        report.record(s, &format!("inclusion.{}", mode.name()), violations);
    }
    if weak_cross {
        for (k, kind) in ["luxemburg", "sobolev", "morrey", "lorentz"].iter().enumerate() {
            report.diagnostic(format!(
                "{kind}: max strong/weak ratio {:.6} (compact-case reverse bound, not gated)",
                reverse_ratio[k]
            ));
        }
    }
    Ok(report)
}

fn norm(f: &SampledFn, c: &YoungComposition, spec: &NormSpec) -> Result<f64, String> {
    compute_norm(f, c, spec).map(|r| r.value.to_f64()).map_err(|e| e.to_string())
}

fn ordering_violation(n1: &Result<f64, String>, n2: &Result<f64, String>) -> Option<serde_json::Value> {
    match (n1, n2) {
        (Ok(a), Ok(b)) => {
            if *b == f64::INFINITY || *a <= b + SLACK * (1.0 + b) {
                None
            } else {
                Some(json!({ "smaller": a, "larger": b }))
            }
        }
        (a, b) => Some(json!({ "smaller": format!("{a:?}"), "larger": format!("{b:?}") })),
    }
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn draw_phi(r: &mut ChaCha8Rng, t_independent: bool) -> PhiFamily {
    let coef = |r: &mut ChaCha8Rng| if r.gen_bool(0.25) { 0.0 } else { round4(r.gen_range(0.1..=3.0)) };
    let mut a = coef(r);
    let b = coef(r);
    if a == 0.0 && b == 0.0 {
        a = 1.0;
    }
    let factor = |r: &mut ChaCha8Rng| {
        if t_independent {
            TFactor::One
        } else {
            TFactor::ALL[r.gen_range(0..4)]
        }
    };
    let (g, h) = (factor(r), factor(r));
    PhiFamily::Standard {
        a,
        g,
        p: round4(r.gen_range(1.0..=4.0)),
        b,
        h,
        q: round4(r.gen_range(0.01..=2.0)),
    }
}

fn draw_map(r: &mut ChaCha8Rng) -> MapFamily {
    MapFamily {
        sigma: Sigma::ALL[r.gen_range(0..Sigma::ALL.len())],
        shift: 0.0,
        alpha: round4(r.gen_range(0.2..=3.0)),
        u: MapU::Linear,
    }
}

fn compose(phi: &PhiSpec, map: &PlaneMap) -> ComposedPhi {
    ComposedPhi::new(phi.clone(), map.clone())
}

/// Φ with E₁ and a perturbed E₂; the hypothesis E₁ ≤ E₂ and the
/// monotonicity of Φ are checked, not assumed.
fn map_instance(r: &mut ChaCha8Rng, weak_cross: bool, ts: &[f64]) -> Option<Instance> {
    let phi_family = draw_phi(r, weak_cross);
    let m1 = draw_map(r);
    let mut m2 = m1;
    m2.shift = if r.gen_bool(0.3) { 0.0 } else { round4(r.gen_range(-0.2..=0.5)) };
    m2.alpha = round4(m1.alpha * r.gen_range(0.5..=2.0));
    if r.gen_bool(0.2) {
        m2.sigma = Sigma::ALL[r.gen_range(0..Sigma::ALL.len())];
    }
    let phi = phi_family.phi();
    let (e1, e2) = (m1.map(), m2.map());
    let lattice = merged_lattice();

    // E₁ ≤ E₂ componentwise; collect the first coordinates Φ will see.
    let mut firsts = Vec::new();
    for &t in ts {
        for &u in &lattice {
            let (a1, b1) = e1.eval(t, u).ok()?;
            let (a2, b2) = e2.eval(t, u).ok()?;
            if !(a1 <= a2 && b1 <= b2) {
                return None;
            }
        }
        firsts.push(e1.eval(t, 0.0).ok()?.0.finite()?);
        firsts.push(e2.eval(t, 0.0).ok()?.0.finite()?);
    }
    firsts.sort_by(f64::total_cmp);
    firsts.dedup();
    if !nondecreasing_in_both(&phi, &firsts, &lattice) {
        return None;
    }
    Some(Instance {
        small: compose(&phi, &e1),
        large: compose(&phi, &e2),
        family: json!({ "phi": phi_family, "e1": m1, "e2": m2 }),
    })
}

fn nondecreasing_in_both(phi: &PhiSpec, ts: &[f64], us: &[f64]) -> bool {
    let c = ComposedPhi::raw(phi.clone());
    let grid: Option<Vec<Vec<ExtReal>>> = ts
        .iter()
        .map(|&t| us.iter().map(|&u| c.eval(t, u).ok()).collect())
        .collect();
    let Some(grid) = grid else { return false };
    let rows_ok = grid.iter().all(|row| row.windows(2).all(|w| w[0] <= w[1]));
    let cols_ok = (0..us.len()).all(|j| grid.windows(2).all(|w| w[0][j] <= w[1][j]));
    rows_ok && cols_ok
}

/// Φ₁ and either Φ₁ + Ψ or κ·Φ₁ under one map; the hypothesis Φ₁∘E ≤ Φ₂∘E
/// is checked on the evaluation points.
fn phi_instance(r: &mut ChaCha8Rng, weak_cross: bool, ts: &[f64]) -> Option<Instance> {
    let f1 = draw_phi(r, weak_cross);
    let map = draw_map(r);
    let (phi1, e) = (f1.phi(), map.map());
    let (phi2, second) = if r.gen_bool(0.8) {
        let f2 = draw_phi(r, weak_cross);
        (PhiSpec::new(phi1.body.clone() + f2.phi().body), json!({ "plus": f2 }))
    } else {
        let kappa = round4(r.gen_range(0.5..=2.0));
        (
            PhiSpec::new(crate::expr::Expr::constant(kappa) * phi1.body.clone()),
            json!({ "times": kappa }),
        )
    };
    let (small, large) = (compose(&phi1, &e), compose(&phi2, &e));
    for &t in ts {
        for u in merged_lattice() {
            let (a, b) = (small.eval(t, u).ok()?, large.eval(t, u).ok()?);
            if !(a <= b) {
                return None;
            }
        }
    }
    Some(Instance {
        small,
        large,
        family: json!({ "phi1": FamilyDescriptor { phi: f1, map }, "phi2": second }),
    })
}
