use serde::{Deserialize, Serialize};

use super::orlicz::{weak_threshold, Cells, LevelMasses, ProbeMax};
use super::solver::{solve_monotone, NormResult};
use super::{eval_in, NormError, YoungComposition};
use crate::classify::stratified_t_samples;
use crate::expr::{Expr, Var};
use crate::ext_real::ExtReal;
use crate::measure::{SampledFn, Space};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorreyConfig {
    /// The ball weight φ(r), an expression in `r`.
    pub phi_weight: Expr,
    pub centers: Vec<f64>,
    pub radii: Vec<f64>,
}

impl MorreyConfig {
    pub const DEFAULT_CENTERS: usize = 33;
    pub const DEFAULT_RADII: i32 = 9;

    /// 33 stratified centers over the space, radii μ(Ω)·2^-j for j = 0..8
    /// and φ(r) = 1/r.
    pub fn default_for(space: &Space) -> MorreyConfig {
        let (a, b) = space.bounds();
        let total = space.total_measure();
        MorreyConfig {
            phi_weight: Expr::parse("1/r").expect("valid literal"),
            centers: stratified_t_samples(a, b, Self::DEFAULT_CENTERS),
            radii: (0..Self::DEFAULT_RADII).map(|j| total * 2f64.powi(-j)).collect(),
        }
    }

    fn weight(&self, r: f64) -> Result<f64, NormError> {
        match eval_in(&self.phi_weight, Var::R, r)?.finite() {
            Some(w) if w > 0.0 => Ok(w),
            _ => Err(NormError::Config(format!("ball weight φ(r) must be finite and positive, r = {r}"))),
        }
    }

    /// Almost-monotonicity of φ(r) and φ(r)·r on the radii, up to factor 2.
    pub fn warnings(&self) -> Result<Vec<String>, NormError> {
        let mut radii = self.radii.clone();
        radii.sort_by(f64::total_cmp);
        let weights = radii.iter().map(|&r| self.weight(r)).collect::<Result<Vec<_>, _>>()?;
        let mut out = Vec::new();
        'outer: for i in 0..radii.len() {
            for j in i + 1..radii.len() {
                if weights[j] > 2.0 * weights[i] {
                    out.push(format!(
                        "φ(r) is not almost decreasing: φ({}) = {} > 2·φ({})",
                        radii[j], weights[j], radii[i]
                    ));
                    break 'outer;
                }
            }
        }
        'outer: for i in 0..radii.len() {
            for j in i + 1..radii.len() {
                if weights[i] * radii[i] > 2.0 * weights[j] * radii[j] {
                    out.push(format!(
                        "φ(r)·r is not almost increasing between r = {} and r = {}",
                        radii[i], radii[j]
                    ));
                    break 'outer;
                }
            }
        }
        Ok(out)
    }
}

/// `sup_B inf{λ : (1/(|B|φ(r))) ∫_B φE(t, |f|/λ) dμ ≤ 1}` over balls
/// `B(a, r) = {t : |t - a| < r}`; with `weak`, the ball integral becomes
/// `sup_u φE·m(B, f/λ, u)`.
pub fn morrey_norm(f: &SampledFn, c: &YoungComposition, cfg: &MorreyConfig, weak: bool) -> Result<NormResult, NormError> {
    if cfg.centers.is_empty() || cfg.radii.is_empty() {
        return Err(NormError::Config("Morrey norm needs centers and radii".into()));
    }
    if cfg.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(NormError::Config("radii must be positive".into()));
    }
    let warnings = cfg.warnings()?;
    let probe_max = ProbeMax::new(c, c.probes_for(f));

    let mut best: Option<NormResult> = None;
    let mut evals = 0;
    let mut any_ball = false;
    for &a in &cfg.centers {
        for &r in &cfg.radii {
            let cells = Cells::select(f, |t| (t - a).abs() < r);
            let mu = cells.measure();
            if mu <= 0.0 {
                continue;
            }
            any_ball = true;
            if cells.is_zero() {
                continue;
            }
            let prefactor = 1.0 / (mu * cfg.weight(r)?);
            let current = best.as_ref().map_or(0.0, NormResult::to_f64);
            let solved = if weak {
                let (r, n) = weak_threshold(&probe_max, &LevelMasses::new(&cells), prefactor, current)?;
                evals += n;
                r
            } else {
                let quantity = |lambda: f64| -> Result<ExtReal, NormError> {
                    Ok(ExtReal::Finite(prefactor) * cells.integral(c, lambda)?)
                };
                // A ball whose predicate already holds at the current maximum
                // cannot raise it.
                evals += (current > 0.0) as usize;
                if current > 0.0 && quantity(current)? <= ExtReal::ONE {
                    None
                } else {
                    let r = solve_monotone(quantity)?;
                    evals += r.predicate_evals;
                    Some(r)
                }
            };
            let Some(r) = solved else { continue };
            if r.value.is_pos_inf() {
                let mut out = NormResult::infinite(evals);
                out.warnings = warnings;
                return Ok(out);
            }
            if best.as_ref().is_none_or(|b| r.value > b.value) {
                best = Some(r);
            }
        }
    }
    if !any_ball {
        return Err(NormError::Config("every ball has zero measure".into()));
    }
    let mut out = best.unwrap_or_else(NormResult::zero);
    out.predicate_evals = evals;
    out.warnings = warnings;
    Ok(out)
}
