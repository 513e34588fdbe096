//! Numerical classification of compositions Φ∘E into the E-N, E-Young,
//! E-strong Young and E-Orlicz classes.
//!
//! Every axiom is checked on fixed u-lattices at each sampled t; a class
//! holds when all of its axioms pass at every sample.

mod lattice;
mod profile;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse_expr, Bindings, EvalTrace, Expr, ExprError, Program, Var};
use crate::ext_real::ExtReal;

pub use lattice::{merged_lattice, refined_mid_grid, u_large, u_mid, u_small};
pub use profile::axiom_profile;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("composition is undefined at t = {t}, u = {u}")]
    Undefined { t: f64, u: f64 },
    #[error("no t samples given")]
    NoSamples,
    #[error("expressions may only use t and u: {0}")]
    Expr(#[from] ExprError),
}

/// The function Φ(t, u).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhiSpec {
    pub body: Expr,
}

impl PhiSpec {
    pub fn new(body: Expr) -> PhiSpec {
        PhiSpec { body }
    }

    pub fn parse(text: &str) -> Result<PhiSpec, ExprError> {
        Ok(PhiSpec::new(parse_expr(text, &[Var::T, Var::U])?))
    }
}

/// The plane map E(t, u) = (e_t, e_u).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneMap {
    pub e_t: Expr,
    pub e_u: Expr,
}

impl PlaneMap {
    pub fn new(e_t: Expr, e_u: Expr) -> PlaneMap {
        PlaneMap { e_t, e_u }
    }

    pub fn identity() -> PlaneMap {
        PlaneMap::new(Expr::Var(Var::T), Expr::Var(Var::U))
    }

    pub fn parse(e_t: &str, e_u: &str) -> Result<PlaneMap, ExprError> {
        let vars = [Var::T, Var::U];
        Ok(PlaneMap::new(parse_expr(e_t, &vars)?, parse_expr(e_u, &vars)?))
    }

    /// `self ∘ inner`, i.e. (t, u) ↦ self(inner(t, u)).
    pub fn compose(&self, inner: &PlaneMap) -> PlaneMap {
        let sub = |e: &Expr| e.substitute(&|v| inner.coordinate(v));
        PlaneMap::new(sub(&self.e_t), sub(&self.e_u))
    }

    fn coordinate(&self, v: Var) -> Option<Expr> {
        match v {
            Var::T => Some(self.e_t.clone()),
            Var::U => Some(self.e_u.clone()),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64, u: f64) -> Result<(ExtReal, ExtReal), ExprError> {
        let b = Bindings::tu(t, u);
        Ok((self.e_t.eval(&b)?, self.e_u.eval(&b)?))
    }
}

/// φE(t, u) := Φ(E(t, u)), kept both as its parts and as one substituted
/// expression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ComposedParts", from = "ComposedParts")]
pub struct ComposedPhi {
    phi: PhiSpec,
    map: PlaneMap,
    composed: Program,
    t_independent: bool,
}

#[derive(Serialize, Deserialize)]
struct ComposedParts {
    phi: PhiSpec,
    map: PlaneMap,
}

impl From<ComposedPhi> for ComposedParts {
    fn from(c: ComposedPhi) -> Self {
        ComposedParts { phi: c.phi, map: c.map }
    }
}

impl From<ComposedParts> for ComposedPhi {
    fn from(p: ComposedParts) -> Self {
        ComposedPhi::new(p.phi, p.map)
    }
}

impl ComposedPhi {
    pub fn new(phi: PhiSpec, map: PlaneMap) -> ComposedPhi {
        let composed = phi.body.substitute(&|v| map.coordinate(v));
        let t_independent = !composed.free_vars().contains(&Var::T);
        ComposedPhi {
            phi,
            map,
            composed: Program::new(&composed),
            t_independent,
        }
    }

    /// Φ with the identity map.
    pub fn raw(phi: PhiSpec) -> ComposedPhi {
        ComposedPhi::new(phi, PlaneMap::identity())
    }

    pub fn parse(phi: &str, e_t: &str, e_u: &str) -> Result<ComposedPhi, ExprError> {
        Ok(ComposedPhi::new(PhiSpec::parse(phi)?, PlaneMap::parse(e_t, e_u)?))
    }

    pub fn phi(&self) -> &PhiSpec {
        &self.phi
    }

    pub fn map(&self) -> &PlaneMap {
        &self.map
    }

    pub fn expr(&self) -> &Expr {
        self.composed.expr()
    }

    /// True when φE does not depend on t at all.
    pub fn is_t_independent(&self) -> bool {
        self.t_independent
    }

    pub fn eval(&self, t: f64, u: f64) -> Result<ExtReal, ExprError> {
        self.composed.eval(&Bindings::tu(t, u), &mut EvalTrace::default())
    }

    pub fn eval_traced(&self, t: f64, u: f64, trace: &mut EvalTrace) -> Result<ExtReal, ExprError> {
        self.composed.eval(&Bindings::tu(t, u), trace)
    }
}

impl fmt::Display for ComposedPhi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Φ = {}, E = ({}, {})", self.phi.body, self.map.e_t, self.map.e_u)
    }
}

/// Numerical thresholds of the classifier. Serialized verbatim in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    pub t_samples: usize,
    pub convex_slack: f64,
    pub convex_random_probes: usize,
    pub probe_seed: u64,
    pub even_tol: f64,
    pub limit_tail: usize,
    /// φE(u)/u at u = 4^-24 must fall below this fraction of its value at u = 1.
    pub ratio_zero_threshold: f64,
    /// φE(u)/u at u = 4^24 must exceed this multiple of its first positive
    /// value on the large lattice.
    pub ratio_inf_threshold: f64,
    pub value_zero_threshold: f64,
    pub value_inf_threshold: f64,
    pub trend_slack: f64,
    pub jump_factor: f64,
    pub jump_floor: f64,
    pub continuity_refine: usize,
    pub seam_tol: f64,
    pub max_seams: usize,
    pub right_continuity_tol: f64,
    pub vanish_tol: f64,
    pub positivity_floor_exponent: i32,
    pub bisection_rel_tol: f64,
    pub left_limit_terms: i32,
    pub left_limit_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            t_samples: 33,
            convex_slack: 1e-9,
            convex_random_probes: 64,
            probe_seed: 0x5eed,
            even_tol: 1e-9,
            limit_tail: 8,
            ratio_zero_threshold: 1e-6,
            ratio_inf_threshold: 1e6,
            value_zero_threshold: 1e-6,
            value_inf_threshold: 1e6,
            trend_slack: 1e-9,
            jump_factor: 1e3,
            jump_floor: 1e-9,
            continuity_refine: 8,
            seam_tol: 1e-6,
            max_seams: 32,
            right_continuity_tol: 2.5e-7,
            vanish_tol: 5e-7,
            positivity_floor_exponent: 12,
            bisection_rel_tol: 1e-12,
            left_limit_terms: 16,
            left_limit_tol: 1e-6,
        }
    }
}

impl ToleranceConfig {
    pub fn with_t_samples(mut self, n: usize) -> Self {
        self.t_samples = n;
        self
    }
}

/// `n` stratified points `a + (b-a)(i+θ)/n` with θ = (√5-1)/2, so the
/// samples avoid the endpoints and the center of the interval.
pub fn stratified_t_samples(a: f64, b: f64, n: usize) -> Vec<f64> {
    let theta = (5f64.sqrt() - 1.0) / 2.0;
    (0..n)
        .map(|i| a + (b - a) * (i as f64 + theta) / n as f64)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    ConvexInU,
    EvenInU,
    ContinuousInU,
    VanishAtZero,
    StrictZeroIff,
    PositiveOnPositives,
    NonnegativeOnPositives,
    LimitRatioZero,
    LimitRatioInf,
    LimitValueZero,
    LimitValueInf,
    LeftContinuousAtU,
}

impl Axiom {
    pub const ALL: [Axiom; 12] = [
        Axiom::ConvexInU,
        Axiom::EvenInU,
        Axiom::ContinuousInU,
        Axiom::VanishAtZero,
        Axiom::StrictZeroIff,
        Axiom::PositiveOnPositives,
        Axiom::NonnegativeOnPositives,
        Axiom::LimitRatioZero,
        Axiom::LimitRatioInf,
        Axiom::LimitValueZero,
        Axiom::LimitValueInf,
        Axiom::LeftContinuousAtU,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::ConvexInU => "convex_in_u",
            Axiom::EvenInU => "even_in_u",
            Axiom::ContinuousInU => "continuous_in_u",
            Axiom::VanishAtZero => "vanish_at_zero",
            Axiom::StrictZeroIff => "strict_zero_iff",
            Axiom::PositiveOnPositives => "positive_on_positives",
            Axiom::NonnegativeOnPositives => "nonnegative_on_positives",
            Axiom::LimitRatioZero => "limit_ratio_zero",
            Axiom::LimitRatioInf => "limit_ratio_inf",
            Axiom::LimitValueZero => "limit_value_zero",
            Axiom::LimitValueInf => "limit_value_inf",
            Axiom::LeftContinuousAtU => "left_continuous_at_U",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Point { t: f64, u: f64, value: ExtReal },
    Sequence { t: f64, u: Vec<f64>, values: Vec<ExtReal> },
}

impl Witness {
    pub fn t(&self) -> f64 {
        match self {
            Witness::Point { t, .. } | Witness::Sequence { t, .. } => *t,
        }
    }

    /// The single point value, or the last entry of a sequence.
    pub fn value(&self) -> ExtReal {
        match self {
            Witness::Point { value, .. } => *value,
            Witness::Sequence { values, .. } => values.last().copied().unwrap_or(ExtReal::Undefined),
        }
    }

    pub fn u(&self) -> f64 {
        match self {
            Witness::Point { u, .. } => *u,
            Witness::Sequence { u, .. } => u.last().copied().unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomRecord {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl AxiomRecord {
    pub fn pass() -> Self {
        AxiomRecord {
            verdict: Verdict::Pass,
            witness: None,
            note: None,
        }
    }

    pub fn fail(witness: Witness, note: impl Into<String>) -> Self {
        AxiomRecord {
            verdict: Verdict::Fail,
            witness: Some(witness),
            note: Some(note.into()),
        }
    }

    pub fn unknown(witness: Witness, note: impl Into<String>) -> Self {
        AxiomRecord {
            verdict: Verdict::Unknown,
            witness: Some(witness),
            note: Some(note.into()),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Where E sent a nonnegative u to a negative second coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeViolation {
    pub t: f64,
    pub u: f64,
    pub e_u: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomProfile {
    pub t: f64,
    pub convex_in_u: AxiomRecord,
    pub even_in_u: AxiomRecord,
    pub continuous_in_u: AxiomRecord,
    pub vanish_at_zero: AxiomRecord,
    pub strict_zero_iff: AxiomRecord,
    pub positive_on_positives: AxiomRecord,
    pub nonnegative_on_positives: AxiomRecord,
    pub limit_ratio_zero: AxiomRecord,
    pub limit_ratio_inf: AxiomRecord,
    pub limit_value_zero: AxiomRecord,
    pub limit_value_inf: AxiomRecord,
    #[serde(rename = "left_continuous_at_U")]
    pub left_continuous_at_u: AxiomRecord,
    pub u_phi: ExtReal,
    pub a_phi: ExtReal,
    /// Left limit of φE at a finite U_Φ.
    pub left_limit_at_u: Option<ExtReal>,
    pub scale: f64,
    pub range_violation: Option<RangeViolation>,
}

impl AxiomProfile {
    pub fn get(&self, axiom: Axiom) -> &AxiomRecord {
        match axiom {
            Axiom::ConvexInU => &self.convex_in_u,
            Axiom::EvenInU => &self.even_in_u,
            Axiom::ContinuousInU => &self.continuous_in_u,
            Axiom::VanishAtZero => &self.vanish_at_zero,
            Axiom::StrictZeroIff => &self.strict_zero_iff,
            Axiom::PositiveOnPositives => &self.positive_on_positives,
            Axiom::NonnegativeOnPositives => &self.nonnegative_on_positives,
            Axiom::LimitRatioZero => &self.limit_ratio_zero,
            Axiom::LimitRatioInf => &self.limit_ratio_inf,
            Axiom::LimitValueZero => &self.limit_value_zero,
            Axiom::LimitValueInf => &self.limit_value_inf,
            Axiom::LeftContinuousAtU => &self.left_continuous_at_u,
        }
    }

    fn with_t(&self, t: f64) -> AxiomProfile {
        let mut p = self.clone();
        p.t = t;
        for axiom in Axiom::ALL {
            if let Some(w) = p.record_mut(axiom).witness.as_mut() {
                match w {
                    Witness::Point { t: wt, .. } | Witness::Sequence { t: wt, .. } => *wt = t,
                }
            }
        }
        if let Some(r) = p.range_violation.as_mut() {
            r.t = t;
        }
        p
    }

    fn record_mut(&mut self, axiom: Axiom) -> &mut AxiomRecord {
        match axiom {
            Axiom::ConvexInU => &mut self.convex_in_u,
            Axiom::EvenInU => &mut self.even_in_u,
            Axiom::ContinuousInU => &mut self.continuous_in_u,
            Axiom::VanishAtZero => &mut self.vanish_at_zero,
            Axiom::StrictZeroIff => &mut self.strict_zero_iff,
            Axiom::PositiveOnPositives => &mut self.positive_on_positives,
            Axiom::NonnegativeOnPositives => &mut self.nonnegative_on_positives,
            Axiom::LimitRatioZero => &mut self.limit_ratio_zero,
            Axiom::LimitRatioInf => &mut self.limit_ratio_inf,
            Axiom::LimitValueZero => &mut self.limit_value_zero,
            Axiom::LimitValueInf => &mut self.limit_value_inf,
            Axiom::LeftContinuousAtU => &mut self.left_continuous_at_u,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EClass {
    EN,
    EYoung,
    EStrongYoung,
    EOrlicz,
}

impl EClass {
    pub const ALL: [EClass; 4] = [EClass::EN, EClass::EYoung, EClass::EStrongYoung, EClass::EOrlicz];

    /// Axioms that must pass at every sampled t. E-Orlicz uses
    /// nonnegativity instead of strict positivity, so that functions
    /// vanishing on an initial interval qualify.
    pub fn axioms(self) -> &'static [Axiom] {
        match self {
            EClass::EN => &[
                Axiom::EvenInU,
                Axiom::ContinuousInU,
                Axiom::ConvexInU,
                Axiom::PositiveOnPositives,
                Axiom::LimitRatioZero,
                Axiom::LimitRatioInf,
            ],
            EClass::EYoung => &[
                Axiom::ConvexInU,
                Axiom::VanishAtZero,
                Axiom::LimitValueZero,
                Axiom::LimitValueInf,
            ],
            EClass::EStrongYoung => &[
                Axiom::ConvexInU,
                Axiom::ContinuousInU,
                Axiom::StrictZeroIff,
                Axiom::LimitValueInf,
            ],
            EClass::EOrlicz => &[
                Axiom::ConvexInU,
                Axiom::VanishAtZero,
                Axiom::NonnegativeOnPositives,
                Axiom::LimitValueInf,
                Axiom::LeftContinuousAtU,
            ],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EClass::EN => "e_n",
            EClass::EYoung => "e_young",
            EClass::EStrongYoung => "e_strong_young",
            EClass::EOrlicz => "e_orlicz",
        }
    }

    pub fn from_name(name: &str) -> Option<EClass> {
        EClass::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn holds_for(self, profile: &AxiomProfile) -> bool {
        self.axioms().iter().all(|a| profile.get(*a).passed())
    }
}

impl fmt::Display for EClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassVerdicts {
    pub e_n: bool,
    pub e_young: bool,
    pub e_strong_young: bool,
    pub e_orlicz: bool,
}

impl ClassVerdicts {
    pub fn get(&self, class: EClass) -> bool {
        match class {
            EClass::EN => self.e_n,
            EClass::EYoung => self.e_young,
            EClass::EStrongYoung => self.e_strong_young,
            EClass::EOrlicz => self.e_orlicz,
        }
    }

    /// e_n ⇒ e_strong_young ⇒ e_orlicz ⇒ e_young.
    pub fn chain_consistent(&self) -> bool {
        (!self.e_n || self.e_strong_young)
            && (!self.e_strong_young || self.e_orlicz)
            && (!self.e_orlicz || self.e_young)
    }
}

/// First axiom violation explaining a negative class verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFailure {
    pub class: EClass,
    pub t: f64,
    pub axiom: Axiom,
    pub record: AxiomRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub profiles: Vec<AxiomProfile>,
    pub verdicts: ClassVerdicts,
    pub chain_consistent: bool,
    pub failures: Vec<ClassFailure>,
}

impl ClassReport {
    pub fn from_profiles(profiles: Vec<AxiomProfile>) -> ClassReport {
        let holds = |c: EClass| profiles.iter().all(|p| c.holds_for(p));
        let verdicts = ClassVerdicts {
            e_n: holds(EClass::EN),
            e_young: holds(EClass::EYoung),
            e_strong_young: holds(EClass::EStrongYoung),
            e_orlicz: holds(EClass::EOrlicz),
        };
        let mut failures = Vec::new();
        for class in EClass::ALL {
            'search: for p in &profiles {
                for &axiom in class.axioms() {
                    let rec = p.get(axiom);
                    if !rec.passed() {
                        failures.push(ClassFailure {
                            class,
                            t: p.t,
                            axiom,
                            record: rec.clone(),
                        });
                        break 'search;
                    }
                }
            }
        }
        ClassReport {
            chain_consistent: verdicts.chain_consistent(),
            profiles,
            verdicts,
            failures,
        }
    }

    pub fn failure(&self, class: EClass) -> Option<&ClassFailure> {
        self.failures.iter().find(|f| f.class == class)
    }

    /// All failing records of one axiom across the sampled t.
    pub fn failing(&self, axiom: Axiom) -> impl Iterator<Item = &AxiomProfile> + '_ {
        self.profiles.iter().filter(move |p| !p.get(axiom).passed())
    }
}

/// Classifies `c` at every t in `t_samples`.
pub fn classify(c: &ComposedPhi, t_samples: &[f64], tols: &ToleranceConfig) -> Result<ClassReport, ClassifyError> {
    if t_samples.is_empty() {
        return Err(ClassifyError::NoSamples);
    }
    let profiles = if c.is_t_independent() {
        let base = axiom_profile(c, t_samples[0], tols)?;
        t_samples.iter().map(|&t| base.with_t(t)).collect()
    } else {
        t_samples
            .iter()
            .map(|&t| axiom_profile(c, t, tols))
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(ClassReport::from_profiles(profiles))
}

/// Classifies Φ itself, with E the identity map.
pub fn raw_classify(phi: &PhiSpec, t_samples: &[f64], tols: &ToleranceConfig) -> Result<ClassReport, ClassifyError> {
    classify(&ComposedPhi::raw(phi.clone()), t_samples, tols)
}
