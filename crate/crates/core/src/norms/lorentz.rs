use serde::{Deserialize, Serialize};

use super::solver::{solve_monotone, NormResult};
use super::{NormError, YoungComposition};
use crate::expr::Expr;
use crate::ext_real::ExtReal;
use crate::measure::{rearrange, SampledFn, WeightTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LorentzWeight {
    /// Integrate against ω(s); with ω ≡ 1 this reduces to the Luxemburg norm.
    #[default]
    Omega,
    /// Integrate against W(s) = ∫_0^s ω.
    CumulativeW,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzConfig {
    pub omega: Expr,
    pub integrand_weight: LorentzWeight,
}

impl Default for LorentzConfig {
    fn default() -> Self {
        LorentzConfig {
            omega: Expr::constant(1.0),
            integrand_weight: LorentzWeight::Omega,
        }
    }
}

/// Strong: `inf{λ : ∫_0^{μ(Ω)} φE(s, f*(s)/λ) w(s) ds ≤ 1}` with the midpoint
/// rule on each step of f*. Weak: `inf{λ : sup_s φE(s, f*(s)/λ) W(s) ≤ 1}`
/// over step ends and midpoints.
pub fn lorentz_norm(f: &SampledFn, c: &YoungComposition, cfg: &LorentzConfig, weak: bool) -> Result<NormResult, NormError> {
    let total = f.space().total_measure();
    let table = WeightTable::new(&cfg.omega, total, WeightTable::DEFAULT_RESOLUTION)?;
    if f.is_zero() {
        return Ok(NormResult::zero());
    }
    let star = rearrange(f);

    if weak {
        // (s, level, W(s)) at the right end and the midpoint of each step.
        let mut points = Vec::new();
        for (s0, s1, level) in star.pieces() {
            let mid = 0.5 * (s0 + s1);
            points.push((mid, level, table.cumulative(mid)));
            points.push((s1, level, table.cumulative(s1)));
        }
        return solve_monotone(|lambda| {
            let mut sup = ExtReal::ZERO;
            for &(s, level, w) in &points {
                if w > 0.0 {
                    sup = sup.max(c.at(s, level / lambda)? * ExtReal::Finite(w));
                }
            }
            Ok(sup)
        });
    }

    let mut pieces = Vec::new();
    for (s0, s1, level) in star.pieces() {
        let mid = 0.5 * (s0 + s1);
        let w = match cfg.integrand_weight {
            LorentzWeight::Omega => table.omega(mid)?,
            LorentzWeight::CumulativeW => table.cumulative(mid),
        };
        pieces.push((mid, level, (s1 - s0) * w));
    }
    solve_monotone(|lambda| {
        let mut sum = ExtReal::ZERO;
        for &(s, level, w) in &pieces {
            if w == 0.0 {
                continue;
            }
            let term = c.at(s, level / lambda)?;
            if term.is_pos_inf() {
                return Ok(ExtReal::PosInf);
            }
            sum = sum + ExtReal::Finite(w) * term;
        }
        Ok(sum)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::ComposedPhi;
    use crate::measure::Space;
    use crate::norms::luxemburg_norm;

    fn square() -> YoungComposition {
        YoungComposition::trusted(ComposedPhi::parse("u^2", "t", "u").unwrap())
    }

    fn unit_fn(f: impl Fn(f64) -> f64) -> SampledFn {
        SampledFn::from_fn(Space::interval(0.0, 1.0, 257).unwrap(), f).unwrap()
    }

    #[test]
    fn unit_weight_reduces_to_luxemburg() {
        let f = unit_fn(|t| t);
        let l = lorentz_norm(&f, &square(), &LorentzConfig::default(), false).unwrap().to_f64();
        let x = luxemburg_norm(&f, &square()).unwrap().to_f64();
        assert!((l - x).abs() < 1e-9 * x, "{l} {x}");
        assert!((l - (1.0f64 / 3.0).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn weak_of_constant_one() {
        let r = lorentz_norm(&unit_fn(|_| 1.0), &square(), &LorentzConfig::default(), true).unwrap();
        assert!((r.to_f64() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn literal_cumulative_weight_differs() {
        let f = unit_fn(|_| 1.0);
        let cfg = LorentzConfig {
            integrand_weight: LorentzWeight::CumulativeW,
            ..LorentzConfig::default()
        };
        // ∫_0^1 s ds / λ² = 1 gives λ = √(1/2).
        let r = lorentz_norm(&f, &square(), &cfg, false).unwrap().to_f64();
        assert!((r - 0.5f64.sqrt()).abs() < 1e-6, "{r}");
    }

    #[test]
    fn zero_and_negative_weight() {
        let z = unit_fn(|_| 0.0);
        assert_eq!(lorentz_norm(&z, &square(), &LorentzConfig::default(), false).unwrap().value, ExtReal::ZERO);
        let bad = LorentzConfig {
            omega: Expr::parse("s - 0.5").unwrap(),
            ..LorentzConfig::default()
        };
        assert!(lorentz_norm(&unit_fn(|t| t), &square(), &bad, false).is_err());
    }
}
