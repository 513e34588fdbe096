//! E-Orlicz-type norms of sampled functions, each computed as
//! `inf{λ > 0 : Q(λ) ≤ 1}` by monotone bisection.

mod lorentz;
mod morrey;
mod orlicz;
mod sobolev;
mod solver;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{classify, stratified_t_samples, ClassFailure, ClassifyError, ComposedPhi, EClass, ToleranceConfig};
use crate::expr::{Bindings, Expr, ExprError, Var};
use crate::ext_real::ExtReal;
use crate::measure::{MeasureError, SampledFn};

pub use lorentz::{lorentz_norm, LorentzConfig, LorentzWeight};
pub use morrey::{morrey_norm, MorreyConfig};
pub use orlicz::{luxemburg_norm, weak_orlicz_norm};
pub use sobolev::{finite_difference, sobolev_norm, SobolevConfig};
pub use solver::{solve_monotone, NormResult, LAMBDA_MAX, LAMBDA_MIN, MAX_ITER, REL_TOL};

#[derive(Debug, Error)]
pub enum NormError {
    #[error("composition is not E-Young ({} fails at t = {})", .0.axiom, .0.t)]
    NotYoung(Box<ClassFailure>),
    #[error(
        "norm quantity is not nonincreasing in λ: Q({lambda_lo}) = {q_lo} < Q({lambda_hi}) = {q_hi}; \
         the composition is not nondecreasing in u"
    )]
    NonMonotone {
        lambda_lo: f64,
        q_lo: ExtReal,
        lambda_hi: f64,
        q_hi: ExtReal,
    },
    #[error("norm quantity is undefined at λ = {lambda}")]
    UndefinedQuantity { lambda: f64 },
    #[error("composition is undefined at t = {t}, u = {u}")]
    Undefined { t: f64, u: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// A composition admitted as a norm generator: E-Young, so the norm
/// quantities are monotone in λ.
#[derive(Debug, Clone, PartialEq)]
pub struct YoungComposition {
    phi: ComposedPhi,
    t_probes: Option<Vec<f64>>,
}

impl YoungComposition {
    pub const DEFAULT_T_PROBES: usize = 33;

    /// Classifies `phi` at `t_samples` and accepts it only if it is E-Young.
    pub fn checked(phi: ComposedPhi, t_samples: &[f64], tols: &ToleranceConfig) -> Result<Self, NormError> {
        let report = classify(&phi, t_samples, tols)?;
        if let Some(f) = report.failure(EClass::EYoung) {
            return Err(NormError::NotYoung(Box::new(f.clone())));
        }
        Ok(YoungComposition { phi, t_probes: None })
    }

    /// Skips classification. The solvers still reject non-monotone quantities.
    pub fn trusted(phi: ComposedPhi) -> Self {
        YoungComposition { phi, t_probes: None }
    }

    /// Points over which weak norms take their sup in t.
    pub fn with_t_probes(mut self, t_probes: Vec<f64>) -> Self {
        self.t_probes = Some(t_probes);
        self
    }

    pub fn composed(&self) -> &ComposedPhi {
        &self.phi
    }

    fn probes_for(&self, f: &SampledFn) -> Vec<f64> {
        if self.phi.is_t_independent() {
            let (a, _) = f.space().bounds();
            return vec![a];
        }
        match &self.t_probes {
            Some(p) => p.clone(),
            None => {
                let (a, b) = f.space().bounds();
                if a < b {
                    stratified_t_samples(a, b, Self::DEFAULT_T_PROBES)
                } else {
                    vec![a]
                }
            }
        }
    }

    /// φE(t, u); undefined values are errors.
    pub(crate) fn at(&self, t: f64, u: f64) -> Result<ExtReal, NormError> {
        let v = self.phi.eval(t, u)?;
        if v.is_undefined() {
            return Err(NormError::Undefined { t, u });
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Luxemburg,
    Weak,
    Sobolev,
    Morrey,
    Lorentz,
}

impl NormKind {
    pub const ALL: [NormKind; 5] = [
        NormKind::Luxemburg,
        NormKind::Weak,
        NormKind::Sobolev,
        NormKind::Morrey,
        NormKind::Lorentz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NormKind::Luxemburg => "luxemburg",
            NormKind::Weak => "weak",
            NormKind::Sobolev => "sobolev",
            NormKind::Morrey => "morrey",
            NormKind::Lorentz => "lorentz",
        }
    }
}

/// Configuration for any norm family, with per-family defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub kind: NormKind,
    pub weak: bool,
    pub sobolev: SobolevConfig,
    pub morrey: Option<MorreyConfig>,
    pub lorentz: LorentzConfig,
}

impl NormSpec {
    pub fn new(kind: NormKind) -> NormSpec {
        NormSpec {
            kind,
            weak: false,
            sobolev: SobolevConfig::default(),
            morrey: None,
            lorentz: LorentzConfig::default(),
        }
    }

    pub fn weak(mut self, weak: bool) -> NormSpec {
        self.weak = weak;
        self
    }
}

/// Dispatches to the family named by `spec.kind`.
pub fn compute_norm(f: &SampledFn, c: &YoungComposition, spec: &NormSpec) -> Result<NormResult, NormError> {
    match spec.kind {
        NormKind::Luxemburg => {
            if spec.weak {
                weak_orlicz_norm(f, c)
            } else {
                luxemburg_norm(f, c)
            }
        }
        NormKind::Weak => weak_orlicz_norm(f, c),
        NormKind::Sobolev => sobolev_norm(f, c, &spec.sobolev, spec.weak),
        NormKind::Morrey => {
            let cfg = match &spec.morrey {
                Some(cfg) => cfg.clone(),
                None => MorreyConfig::default_for(f.space()),
            };
            morrey_norm(f, c, &cfg, spec.weak)
        }
        NormKind::Lorentz => lorentz_norm(f, c, &spec.lorentz, spec.weak),
    }
}

pub(crate) fn eval_in(expr: &Expr, var: Var, x: f64) -> Result<ExtReal, ExprError> {
    expr.eval(&Bindings::new().with(var, x))
}
