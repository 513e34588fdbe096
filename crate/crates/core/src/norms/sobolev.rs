use serde::{Deserialize, Serialize};

use super::orlicz::{luxemburg_norm, weak_orlicz_norm};
use super::solver::NormResult;
use super::{NormError, YoungComposition};
use crate::ext_real::ExtReal;
use crate::measure::SampledFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SobolevConfig {
    /// Highest derivative order, at most 2.
    pub k: usize,
}

impl Default for SobolevConfig {
    fn default() -> Self {
        SobolevConfig { k: 1 }
    }
}

/// Second-order accurate derivative of uniformly spaced samples, with
/// one-sided stencils at both ends. `order` is 0, 1 or 2.
pub fn finite_difference(values: &[f64], h: f64, order: usize) -> Vec<f64> {
    let n = values.len();
    let f = values;
    match order {
        0 => f.to_vec(),
        1 => (0..n)
            .map(|i| {
                if i == 0 {
                    (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
                } else if i == n - 1 {
                    (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h)
                } else {
                    (f[i + 1] - f[i - 1]) / (2.0 * h)
                }
            })
            .collect(),
        2 => (0..n)
            .map(|i| {
                if i == 0 {
                    (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h)
                } else if i == n - 1 {
                    (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h)
                } else {
                    (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h)
                }
            })
            .collect(),
        _ => panic!("derivative order {order} not supported"),
    }
}

/// `Σ_{j ≤ k} ‖D^j f‖`, each term a Luxemburg norm, or a weak norm when
/// `weak` is set.
pub fn sobolev_norm(f: &SampledFn, c: &YoungComposition, cfg: &SobolevConfig, weak: bool) -> Result<NormResult, NormError> {
    if cfg.k > 2 {
        return Err(NormError::Config(format!("Sobolev order {} exceeds 2", cfg.k)));
    }
    let h = f
        .space()
        .spacing()
        .ok_or_else(|| NormError::Config("Sobolev norms need an interval grid".into()))?;
    let needed = 2 * cfg.k + 3;
    if f.space().len() < needed {
        return Err(NormError::Config(format!(
            "Sobolev order {} needs at least {needed} nodes, got {}",
            cfg.k,
            f.space().len()
        )));
    }
    let mut total = NormResult::zero();
    for order in 0..=cfg.k {
        let d = f.with_values(finite_difference(f.values(), h, order))?;
        let r = if weak {
            weak_orlicz_norm(&d, c)?
        } else {
            luxemburg_norm(&d, c)?
        };
        total.value = total.value + r.value;
        total.bracket.0 += r.bracket.0;
        total.bracket.1 += r.bracket.1;
        total.iterations += r.iterations;
        total.predicate_evals += r.predicate_evals;
        if total.value == ExtReal::PosInf {
            break;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::ComposedPhi;
    use crate::measure::Space;

    #[test]
    fn stencils_are_exact_for_quadratics() {
        let h = 0.1;
        let f: Vec<f64> = (0..8).map(|i| (i as f64 * h).powi(2)).collect();
        let d1 = finite_difference(&f, h, 1);
        let d2 = finite_difference(&f, h, 2);
        for (i, (a, b)) in d1.iter().zip(&d2).enumerate() {
            assert!((a - 2.0 * i as f64 * h).abs() < 1e-10);
            assert!((b - 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn identity_first_order() {
        let f = SampledFn::from_fn(Space::interval(0.0, 1.0, 257).unwrap(), |t| t).unwrap();
        let c = YoungComposition::trusted(ComposedPhi::parse("u^2", "t", "u").unwrap());
        let r = sobolev_norm(&f, &c, &SobolevConfig { k: 1 }, false).unwrap();
        assert!((r.to_f64() - ((1.0f64 / 3.0).sqrt() + 1.0)).abs() < 1e-4);
        let k0 = sobolev_norm(&f, &c, &SobolevConfig { k: 0 }, false).unwrap();
        assert_eq!(k0.value, luxemburg_norm(&f, &c).unwrap().value);
    }

    #[test]
    fn constants_have_no_derivative_terms() {
        let f = SampledFn::from_fn(Space::interval(0.0, 1.0, 65).unwrap(), |_| 3.0).unwrap();
        let c = YoungComposition::trusted(ComposedPhi::parse("u^2", "t", "u").unwrap());
        let r = sobolev_norm(&f, &c, &SobolevConfig { k: 2 }, false).unwrap();
        assert!((r.to_f64() - 3.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_short_or_irregular_grids() {
        let c = YoungComposition::trusted(ComposedPhi::parse("u^2", "t", "u").unwrap());
        let short = SampledFn::from_fn(Space::interval(0.0, 1.0, 5).unwrap(), |t| t).unwrap();
        assert!(sobolev_norm(&short, &c, &SobolevConfig { k: 2 }, false).is_err());
        let disc = SampledFn::new(
            Space::discrete(vec![0.0, 1.0, 3.0, 4.0, 6.0], vec![1.0; 5]).unwrap(),
            vec![1.0; 5],
        )
        .unwrap();
        assert!(sobolev_norm(&disc, &c, &SobolevConfig { k: 1 }, false).is_err());
    }
}
