use serde::{Deserialize, Serialize};

use super::NormError;
use crate::ext_real::ExtReal;

pub const LAMBDA_MIN: f64 = 1e-300;
pub const LAMBDA_MAX: f64 = 1e300;
pub const REL_TOL: f64 = 1e-10;
pub const MAX_ITER: usize = 200;
const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: ExtReal,
    /// Final `(λ_lo, λ_hi)`: the predicate fails at λ_lo and holds at λ_hi.
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub predicate_evals: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl NormResult {
    pub fn zero() -> NormResult {
        NormResult {
            value: ExtReal::ZERO,
            bracket: (0.0, 0.0),
            iterations: 0,
            predicate_evals: 0,
            warnings: Vec::new(),
        }
    }

    pub fn infinite(evals: usize) -> NormResult {
        NormResult {
            value: ExtReal::PosInf,
            bracket: (LAMBDA_MAX, f64::INFINITY),
            iterations: 0,
            predicate_evals: evals,
            warnings: Vec::new(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

/// Evaluated `(λ, Q(λ))` pairs, kept sorted by λ, used to assert that Q is
/// nonincreasing in λ.
struct History {
    points: Vec<(f64, ExtReal)>,
}

impl History {
    fn insert(&mut self, lambda: f64, q: ExtReal) -> Result<(), NormError> {
        let pos = self.points.partition_point(|p| p.0 < lambda);
        if pos > 0 {
            check_order(self.points[pos - 1], (lambda, q))?;
        }
        if pos < self.points.len() {
            check_order((lambda, q), self.points[pos])?;
        }
        self.points.insert(pos, (lambda, q));
        Ok(())
    }
}

fn check_order(small: (f64, ExtReal), big: (f64, ExtReal)) -> Result<(), NormError> {
    let (q_small, q_big) = (small.1, big.1);
    let slack = MONOTONE_SLACK * q_small.finite().map_or(0.0, f64::abs).max(q_big.finite().map_or(0.0, f64::abs));
    let ok = matches!(
        q_big.partial_cmp(&(q_small + ExtReal::Finite(slack))),
        Some(std::cmp::Ordering::Less | std::cmp::Ordering::Equal)
    );
    if ok {
        Ok(())
    } else {
        Err(NormError::NonMonotone {
            lambda_lo: small.0,
            q_lo: q_small,
            lambda_hi: big.0,
            q_hi: q_big,
        })
    }
}

fn holds(q: ExtReal) -> bool {
    q <= ExtReal::ONE
}

/// `inf{λ > 0 : Q(λ) ≤ 1}` for a quantity Q nonincreasing in λ.
///
/// Brackets from λ = 1 by halving or doubling, then bisects until
/// `λ_hi - λ_lo ≤ 1e-10·λ_hi`.
pub fn solve_monotone(mut q: impl FnMut(f64) -> Result<ExtReal, NormError>) -> Result<NormResult, NormError> {
    let mut history = History { points: Vec::new() };
    let mut evals = 0;
    let mut eval = |lambda: f64, history: &mut History| -> Result<bool, NormError> {
        let v = q(lambda)?;
        if v.is_undefined() {
            return Err(NormError::UndefinedQuantity { lambda });
        }
        evals += 1;
        history.insert(lambda, v)?;
        Ok(holds(v))
    };

    let (mut lo, mut hi);
    if eval(1.0, &mut history)? {
        hi = 1.0;
        loop {
            let next = hi / 2.0;
            if next < LAMBDA_MIN {
                let evals = history.points.len();
                return Ok(NormResult {
                    value: ExtReal::ZERO,
                    bracket: (0.0, hi),
                    iterations: 0,
                    predicate_evals: evals,
                    warnings: Vec::new(),
                });
            }
            if eval(next, &mut history)? {
                hi = next;
            } else {
                lo = next;
                break;
            }
        }
    } else {
        lo = 1.0;
        loop {
            let next = lo * 2.0;
            if next > LAMBDA_MAX {
                return Ok(NormResult::infinite(history.points.len()));
            }
            if eval(next, &mut history)? {
                hi = next;
                break;
            }
            lo = next;
        }
    }

    let mut iterations = 0;
    while hi - lo > REL_TOL * hi && iterations < MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(mid, &mut history)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let predicate_evals = history.points.len();
    Ok(NormResult {
        value: ExtReal::Finite(hi),
        bracket: (lo, hi),
        iterations,
        predicate_evals,
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_threshold() {
        // Q(λ) = (2/λ)^2 ≤ 1 iff λ ≥ 2.
        let r = solve_monotone(|l| Ok(ExtReal::Finite((2.0 / l).powi(2)))).unwrap();
        assert!((r.to_f64() - 2.0).abs() < 1e-9);
        assert!(r.bracket.1 - r.bracket.0 <= 1e-10 * r.bracket.1);
        assert!(r.predicate_evals > r.iterations);
    }

    #[test]
    fn tiny_and_huge_thresholds() {
        let r = solve_monotone(|l| Ok(ExtReal::Finite(1e-5 / l))).unwrap();
        assert!((r.to_f64() / 1e-5 - 1.0).abs() < 1e-9);
        let r = solve_monotone(|l| Ok(ExtReal::Finite(1e7 / l))).unwrap();
        assert!((r.to_f64() / 1e7 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn never_and_always() {
        assert_eq!(solve_monotone(|_| Ok(ExtReal::PosInf)).unwrap().value, ExtReal::PosInf);
        assert_eq!(solve_monotone(|_| Ok(ExtReal::ZERO)).unwrap().value, ExtReal::ZERO);
    }

    #[test]
    fn jump_in_quantity_still_converges() {
        let r = solve_monotone(|l| Ok(if l < 3.0 { ExtReal::PosInf } else { ExtReal::Finite(0.5) })).unwrap();
        assert!((r.to_f64() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn increasing_quantity_is_rejected() {
        let err = solve_monotone(|l| Ok(ExtReal::Finite(l))).unwrap_err();
        assert!(matches!(err, NormError::NonMonotone { .. }));
    }
}
