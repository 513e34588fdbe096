use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lattice::{merged_lattice, refined_mid_grid, u_large, u_small};
use super::{AxiomProfile, AxiomRecord, ClassifyError, ComposedPhi, RangeViolation, ToleranceConfig, Witness};
use crate::expr::EvalTrace;
use crate::ext_real::ExtReal;

#[derive(Debug, Clone, Copy)]
struct Pt {
    u: f64,
    v: ExtReal,
    overflow: bool,
    sig: u64,
}

impl Pt {
    /// Infinite without having overflowed from finite intermediate values.
    fn genuinely_infinite(&self) -> bool {
        self.v.is_infinite() && !self.overflow
    }

    fn genuinely_pos_inf(&self) -> bool {
        self.v.is_pos_inf() && !self.overflow
    }
}

struct Probe<'a> {
    c: &'a ComposedPhi,
    t: f64,
}

impl Probe<'_> {
    fn at(&self, u: f64) -> Result<Pt, ClassifyError> {
        let mut tr = EvalTrace::default();
        let v = self.c.eval_traced(self.t, u, &mut tr)?;
        if v.is_undefined() {
            return Err(ClassifyError::Undefined { t: self.t, u });
        }
        Ok(Pt {
            u,
            v,
            overflow: tr.overflow,
            sig: tr.branch_sig,
        })
    }

    fn point(&self, p: &Pt) -> Witness {
        Witness::Point {
            t: self.t,
            u: p.u,
            value: p.v,
        }
    }

    fn sequence(&self, pts: &[Pt], values: Vec<ExtReal>) -> Witness {
        Witness::Sequence {
            t: self.t,
            u: pts.iter().map(|p| p.u).collect(),
            values,
        }
    }
}

fn mag(x: ExtReal) -> f64 {
    x.finite().map_or(0.0, f64::abs)
}

/// `a ≤ b + slack` in the extended reals; undefined comparisons fail.
fn le_with_slack(a: ExtReal, b: ExtReal, slack: f64) -> bool {
    matches!(
        a.partial_cmp(&(b + ExtReal::Finite(slack))),
        Some(std::cmp::Ordering::Less | std::cmp::Ordering::Equal)
    )
}

/// Chord test for `u0 < u1 < u2`: φ(u1) lies below the secant.
fn chord_ok(p0: &Pt, p1: &Pt, p2: &Pt, slack: f64) -> bool {
    let w2 = (p1.u - p0.u) / (p2.u - p0.u);
    let w0 = 1.0 - w2;
    let chord = ExtReal::Finite(w0) * p0.v + ExtReal::Finite(w2) * p2.v;
    let s = slack * (1.0 + mag(p0.v).max(mag(p1.v)).max(mag(p2.v)));
    le_with_slack(p1.v, chord, s)
}

/// Nonincreasing (`decreasing = true`) or nondecreasing within relative slack.
fn monotone(values: &[ExtReal], decreasing: bool, slack: f64) -> bool {
    values.windows(2).all(|w| {
        let (prev, next) = if decreasing { (w[1], w[0]) } else { (w[0], w[1]) };
        // want prev ≤ next
        le_with_slack(prev, next, slack * mag(prev).max(mag(next)))
    })
}

fn snap_12_digits(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Axiom-by-axiom evidence for φE(t, ·) on the canonical lattices.
pub fn axiom_profile(c: &ComposedPhi, t: f64, tols: &ToleranceConfig) -> Result<AxiomProfile, ClassifyError> {
    let probe = Probe { c, t };
    let lattice = merged_lattice();
    let pts = lattice.iter().map(|&u| probe.at(u)).collect::<Result<Vec<_>, _>>()?;
    let at_u = |u: f64| pts.iter().find(|p| p.u == u).copied();

    let small: Vec<Pt> = u_small().into_iter().map(|u| at_u(u).unwrap()).collect();
    let large: Vec<Pt> = u_large().into_iter().map(|u| at_u(u).unwrap()).collect();
    let zero = pts[0];

    let scale = small
        .iter()
        .find(|p| p.v.is_finite())
        .map_or(1.0, |p| mag(p.v).max(1.0));

    let range_violation = range_violation(c, t, &lattice)?;

    let convex_in_u = convexity(&probe, &pts, tols)?;
    let even_in_u = evenness(&probe, &pts, tols);
    let continuous_in_u = continuity(&probe, &pts, scale, tols)?;

    let vanish_at_zero = if zero.v.is_finite() && mag(zero.v) <= tols.vanish_tol * scale {
        AxiomRecord::pass()
    } else {
        AxiomRecord::fail(probe.point(&zero), "φE(t, 0) is not zero")
    };

    let floor = 4f64.powi(-tols.positivity_floor_exponent);
    let positive_bad = pts[1..].iter().find(|p| {
        let strictly = p.u >= floor;
        if strictly {
            !(p.v > ExtReal::ZERO)
        } else {
            !(p.v >= ExtReal::ZERO)
        }
    });
    let positive_on_positives = match positive_bad {
        None => AxiomRecord::pass(),
        Some(p) => AxiomRecord::fail(probe.point(p), "φE(t, u) is not positive for some u > 0"),
    };
    let nonnegative_on_positives = match pts[1..].iter().find(|p| !(p.v >= ExtReal::ZERO)) {
        None => AxiomRecord::pass(),
        Some(p) => AxiomRecord::fail(probe.point(p), "φE(t, u) < 0 for some u > 0"),
    };
    let strict_zero_iff = if !vanish_at_zero.passed() {
        AxiomRecord::fail(probe.point(&zero), "φE(t, 0) ≠ 0")
    } else if !positive_on_positives.passed() {
        let last_nonpositive = pts[1..].iter().rev().find(|p| !(p.v > ExtReal::ZERO)).unwrap();
        AxiomRecord::fail(probe.point(last_nonpositive), "φE(t, u) = 0 (or below) at some u > 0")
    } else {
        AxiomRecord::pass()
    };

    let tail = tols.limit_tail.min(small.len());
    let small_tail = &small[small.len() - tail..];
    let large_tail = &large[large.len() - tail..];

    let ratio = |p: &Pt| p.v / ExtReal::Finite(p.u);
    // Both ratio limits are measured against a reference ratio, so positive
    // scalings of Φ or of E leave the verdicts unchanged.
    let ratio_at_one = match ratio(&small[0]).finite() {
        Some(r) if r.abs() > 0.0 => r.abs(),
        Some(_) => 1.0,
        None => f64::INFINITY,
    };
    let zero_ratios: Vec<ExtReal> = small_tail.iter().map(|p| ratio(p).abs()).collect();
    let final_zero_ratio = *zero_ratios.last().unwrap();
    let limit_ratio_zero = if monotone(&zero_ratios, true, tols.trend_slack)
        && final_zero_ratio < ExtReal::Finite(tols.ratio_zero_threshold * ratio_at_one)
    {
        AxiomRecord::pass()
    } else {
        let raw: Vec<ExtReal> = small_tail.iter().map(ratio).collect();
        AxiomRecord::fail(probe.sequence(small_tail, raw), "φE(t, u)/u does not tend to 0 as u → 0+")
    };

    let inf_ratios: Vec<ExtReal> = large_tail.iter().map(ratio).collect();
    let first_positive = large.iter().map(ratio).find(|r| r.is_finite() && *r > ExtReal::ZERO);
    let limit_ratio_inf = if monotone(&inf_ratios, false, tols.trend_slack)
        && first_positive.is_some_and(|r0| *inf_ratios.last().unwrap() > ExtReal::Finite(tols.ratio_inf_threshold) * r0)
    {
        AxiomRecord::pass()
    } else {
        AxiomRecord::fail(probe.sequence(large_tail, inf_ratios), "φE(t, u)/u does not tend to ∞ as u → ∞")
    };

    let small_values: Vec<ExtReal> = small_tail.iter().map(|p| p.v).collect();
    let limit_value_zero = if small_values
        .iter()
        .all(|v| v.abs() < ExtReal::Finite(tols.value_zero_threshold * scale))
    {
        AxiomRecord::pass()
    } else {
        AxiomRecord::fail(probe.sequence(small_tail, small_values), "φE(t, u) does not tend to 0 as u → 0+")
    };

    let large_values: Vec<ExtReal> = large_tail.iter().map(|p| p.v).collect();
    let limit_value_inf = if monotone(&large_values, false, tols.trend_slack)
        && *large_values.last().unwrap() > ExtReal::Finite(tols.value_inf_threshold)
    {
        AxiomRecord::pass()
    } else {
        AxiomRecord::fail(probe.sequence(large_tail, large_values), "φE(t, u) does not tend to ∞ as u → ∞")
    };

    let u_phi = finiteness_threshold(&probe, &pts, tols)?;
    let (left_continuous_at_u, left_limit_at_u) = left_continuity(&probe, u_phi, tols)?;
    let a_phi = positivity_threshold(&probe, &pts, tols)?;

    Ok(AxiomProfile {
        t,
        convex_in_u,
        even_in_u,
        continuous_in_u,
        vanish_at_zero,
        strict_zero_iff,
        positive_on_positives,
        nonnegative_on_positives,
        limit_ratio_zero,
        limit_ratio_inf,
        limit_value_zero,
        limit_value_inf,
        left_continuous_at_u,
        u_phi,
        a_phi,
        left_limit_at_u,
        scale,
        range_violation,
    })
}

fn range_violation(c: &ComposedPhi, t: f64, lattice: &[f64]) -> Result<Option<RangeViolation>, ClassifyError> {
    for &u in lattice {
        let (_, e_u) = c.map().eval(t, u)?;
        if !(e_u >= ExtReal::ZERO) {
            return Ok(Some(RangeViolation { t, u, e_u }));
        }
    }
    Ok(None)
}

fn convexity(probe: &Probe, pts: &[Pt], tols: &ToleranceConfig) -> Result<AxiomRecord, ClassifyError> {
    let slack = tols.convex_slack;
    let fail = |p: &Pt, what: &str| Ok(AxiomRecord::fail(probe.point(p), format!("φE(t, ·) lies above a {what}")));

    for w in pts.windows(3) {
        if !chord_ok(&w[0], &w[1], &w[2], slack) {
            return fail(&w[1], "secant of neighbouring lattice points");
        }
    }
    for w in pts.windows(2) {
        let mid = probe.at(0.5 * (w[0].u + w[1].u))?;
        if mid.u > w[0].u && mid.u < w[1].u && !chord_ok(&w[0], &mid, &w[1], slack) {
            return fail(&mid, "midpoint secant");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(tols.probe_seed ^ probe.t.to_bits());
    for k in 0..tols.convex_random_probes {
        let (x, y) = if k % 2 == 0 {
            (rng.gen_range(0.0..16.0), rng.gen_range(0.0..16.0))
        } else {
            (4f64.powf(rng.gen_range(-24.0..24.0)), 4f64.powf(rng.gen_range(-24.0..24.0)))
        };
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        let lambda: f64 = rng.gen_range(0.01..0.99);
        let z = lambda * lo + (1.0 - lambda) * hi;
        if !(lo < z && z < hi) {
            continue;
        }
        let (p0, p1, p2) = (probe.at(lo)?, probe.at(z)?, probe.at(hi)?);
        if !chord_ok(&p0, &p1, &p2, slack) {
            return fail(&p1, "random secant");
        }
    }
    Ok(AxiomRecord::pass())
}

fn evenness(probe: &Probe, pts: &[Pt], tols: &ToleranceConfig) -> AxiomRecord {
    for p in &pts[1..] {
        let mirrored = probe.c.eval(probe.t, -p.u);
        let witness = Witness::Point {
            t: probe.t,
            u: -p.u,
            value: mirrored.as_ref().copied().unwrap_or(ExtReal::Undefined),
        };
        let m = match mirrored {
            Ok(v) if !v.is_undefined() => v,
            _ => return AxiomRecord::unknown(witness, "φE(t, -u) is undefined"),
        };
        let same = if m.is_infinite() || p.v.is_infinite() {
            m == p.v
        } else {
            (m.to_f64() - p.v.to_f64()).abs() <= tols.even_tol * (1.0 + mag(m).max(mag(p.v)))
        };
        if !same {
            return AxiomRecord::fail(witness, "φE(t, -u) ≠ φE(t, u)");
        }
    }
    AxiomRecord::pass()
}

fn continuity(probe: &Probe, pts: &[Pt], scale: f64, tols: &ToleranceConfig) -> Result<AxiomRecord, ClassifyError> {
    if let Some(p) = pts.iter().find(|p| p.genuinely_infinite()) {
        return Ok(AxiomRecord::fail(probe.point(p), "φE(t, ·) is infinite at a finite u"));
    }

    let zero = pts[0];
    let tiny = pts[1];
    let gap = tiny.v - zero.v;
    if !(gap.is_finite() && gap.abs().to_f64() <= tols.right_continuity_tol * scale) {
        return Ok(AxiomRecord::fail(probe.point(&tiny), "φE(t, ·) is not right-continuous at 0"));
    }

    let grid = refined_mid_grid(tols.continuity_refine)
        .into_iter()
        .map(|u| probe.at(u))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(p) = grid.iter().find(|p| p.genuinely_infinite()) {
        return Ok(AxiomRecord::fail(probe.point(p), "φE(t, ·) is infinite at a finite u"));
    }
    let diffs: Vec<Option<f64>> = grid
        .windows(2)
        .map(|w| {
            if w[0].overflow || w[1].overflow {
                None
            } else {
                (w[1].v - w[0].v).finite().map(f64::abs)
            }
        })
        .collect();
    for i in 0..diffs.len() {
        let Some(d) = diffs[i] else { continue };
        let left = if i > 0 { diffs[i - 1] } else { None };
        let right = diffs.get(i + 1).copied().flatten();
        let neighbour = left.unwrap_or(0.0).max(right.unwrap_or(0.0));
        let level = 1.0 + mag(grid[i].v).max(mag(grid[i + 1].v));
        if d > tols.jump_factor * neighbour && d > tols.jump_floor * level && (left.is_some() || right.is_some()) {
            return Ok(AxiomRecord::fail(probe.point(&grid[i + 1]), "jump between neighbouring grid points"));
        }
    }

    // Seams of piecewise definitions, located by changes of branch signature.
    let mut all: Vec<Pt> = pts.iter().copied().chain(grid).collect();
    all.sort_by(|a, b| a.u.total_cmp(&b.u));
    all.dedup_by(|a, b| a.u == b.u);
    let mut seams = 0;
    for w in all.windows(2) {
        if w[0].sig == w[1].sig {
            continue;
        }
        seams += 1;
        if seams > tols.max_seams {
            break;
        }
        let (mut lo, mut hi) = (w[0], w[1]);
        for _ in 0..200 {
            let mid_u = 0.5 * (lo.u + hi.u);
            if mid_u <= lo.u || mid_u >= hi.u {
                break;
            }
            let mid = probe.at(mid_u)?;
            if mid.sig == lo.sig {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if lo.overflow || hi.overflow {
            continue;
        }
        if lo.genuinely_infinite() || hi.genuinely_infinite() {
            let p = if lo.genuinely_infinite() { lo } else { hi };
            return Ok(AxiomRecord::fail(probe.point(&p), "φE(t, ·) is infinite at a finite u"));
        }
        let jump = (hi.v - lo.v).abs().to_f64();
        if jump > tols.seam_tol * (1.0 + mag(lo.v).max(mag(hi.v))) {
            return Ok(AxiomRecord::fail(probe.point(&hi), "jump across a piecewise seam"));
        }
    }
    Ok(AxiomRecord::pass())
}

/// U_Φ by bisection on "genuinely +∞" between lattice neighbours.
fn finiteness_threshold(probe: &Probe, pts: &[Pt], tols: &ToleranceConfig) -> Result<ExtReal, ClassifyError> {
    let Some(j) = pts.iter().position(Pt::genuinely_pos_inf) else {
        return Ok(ExtReal::PosInf);
    };
    if j == 0 {
        return Ok(ExtReal::ZERO);
    }
    let (mut lo, mut hi) = (pts[j - 1].u, pts[j].u);
    for _ in 0..200 {
        if hi - lo <= tols.bisection_rel_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if probe.at(mid)?.genuinely_pos_inf() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ExtReal::Finite(hi))
}

/// a_Φ by bisection on φE > 0 between lattice neighbours.
fn positivity_threshold(probe: &Probe, pts: &[Pt], tols: &ToleranceConfig) -> Result<ExtReal, ClassifyError> {
    let positive = |p: &Pt| p.v > ExtReal::ZERO;
    let Some(j) = pts[1..].iter().position(positive).map(|j| j + 1) else {
        return Ok(ExtReal::PosInf);
    };
    if j == 1 {
        return Ok(ExtReal::ZERO);
    }
    let (mut lo, mut hi) = (pts[j - 1].u, pts[j].u);
    for _ in 0..200 {
        if hi - lo <= tols.bisection_rel_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if positive(&probe.at(mid)?) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ExtReal::Finite(hi))
}

/// Compares φE(U_Φ) with the limit along u_k = U_Φ(1 - 4^-k).
fn left_continuity(
    probe: &Probe,
    u_phi: ExtReal,
    tols: &ToleranceConfig,
) -> Result<(AxiomRecord, Option<ExtReal>), ClassifyError> {
    let Some(big_u) = u_phi.finite().filter(|u| *u > 0.0) else {
        return Ok((AxiomRecord::pass(), None));
    };
    let seq = (1..=tols.left_limit_terms.max(2))
        .map(|k| probe.at(big_u * (1.0 - 4f64.powi(-k))))
        .collect::<Result<Vec<_>, _>>()?;
    let last = seq[seq.len() - 1];
    let prev = seq[seq.len() - 2];
    let limit_finite = !last.overflow
        && (last.v - prev.v)
            .finite()
            .is_some_and(|d| d.abs() < tols.left_limit_tol * (1.0 + mag(last.v)))
        && mag(last.v) < 1e300;
    let limit = if limit_finite { last.v } else { ExtReal::PosInf };

    let at_u = probe.at(snap_12_digits(big_u))?;
    let witness = Witness::Point {
        t: probe.t,
        u: big_u,
        value: limit,
    };
    let record = if at_u.genuinely_pos_inf() {
        if limit_finite {
            AxiomRecord::fail(witness, "finite left limit at U_Φ where φE = +∞")
        } else {
            AxiomRecord::pass()
        }
    } else if limit_finite && (at_u.v - limit).abs() <= ExtReal::Finite(tols.left_limit_tol * (1.0 + mag(limit))) {
        AxiomRecord::pass()
    } else {
        AxiomRecord::fail(witness, "left limit at U_Φ differs from φE(U_Φ)")
    };
    Ok((record, Some(limit)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::Verdict;

    fn profile(phi: &str, et: &str, eu: &str, t: f64) -> AxiomProfile {
        let c = ComposedPhi::parse(phi, et, eu).unwrap();
        axiom_profile(&c, t, &ToleranceConfig::default()).unwrap()
    }

    #[test]
    fn abs_t_times_square_passes_n_axioms() {
        let p = profile("t*u^2", "abs(t)", "u", -2.0);
        for rec in [&p.convex_in_u, &p.even_in_u, &p.limit_ratio_zero, &p.limit_ratio_inf, &p.continuous_in_u] {
            assert!(rec.passed(), "{rec:?}");
        }
    }

    #[test]
    fn exponential_ratio_tends_to_one() {
        let p = profile("exp(u*t)-1", "1", "u", 0.0);
        assert_eq!(p.limit_ratio_zero.verdict, Verdict::Fail);
        let r = p.limit_ratio_zero.witness.as_ref().unwrap().value().to_f64();
        assert!((r - 1.0).abs() < 1e-6, "{r}");
        assert!(p.limit_value_inf.passed() && p.continuous_in_u.passed());
        assert_eq!(p.u_phi, ExtReal::PosInf);
    }

    #[test]
    fn jump_to_infinity_is_not_left_continuous() {
        let p = profile("if(u < 1, -ln(u + abs(t)^(1/2) + 1), inf)", "u^2", "u", 0.5);
        assert!((p.u_phi.to_f64() - 1.0).abs() < 1e-10);
        assert_eq!(p.left_continuous_at_u.verdict, Verdict::Fail);
        let l = p.left_limit_at_u.unwrap().to_f64();
        assert!((l + 3f64.ln()).abs() < 1e-6, "{l}");
        assert!(p.convex_in_u.passed() && p.vanish_at_zero.passed());
        assert!(p.limit_value_zero.passed() && p.limit_value_inf.passed());
        assert!(!p.continuous_in_u.passed());
    }

    #[test]
    fn flat_start_gives_positivity_threshold() {
        let p = profile("if(u < 1, u - abs(t), u + abs(t) - 2)", "u", "u", 0.3);
        assert!((p.a_phi.to_f64() - 1.0).abs() < 1e-10, "{:?}", p.a_phi);
        assert!(!p.strict_zero_iff.passed());
        assert_eq!(p.strict_zero_iff.witness.as_ref().unwrap().u(), 1.0);
        assert!(p.nonnegative_on_positives.passed() && p.convex_in_u.passed());
    }

    #[test]
    fn step_is_discontinuous() {
        let p = profile("if(u < 2, u, u + 1)", "t", "u", 0.0);
        assert!(!p.continuous_in_u.passed());
        let q = profile("max(0, u - 1)", "t", "u", 0.0);
        assert!(q.continuous_in_u.passed());
    }

    #[test]
    fn undefined_mirror_is_unknown_evenness() {
        let p = profile("sqrt(u)^3", "t", "u", 0.0);
        assert_eq!(p.even_in_u.verdict, Verdict::Unknown);
    }

    #[test]
    fn negative_map_range_is_reported() {
        let p = profile("u^2", "t", "u - 1", 0.0);
        assert!(p.range_violation.is_some());
        assert!(profile("u^2", "t", "u", 0.0).range_violation.is_none());
    }

    #[test]
    fn overflow_is_not_a_finiteness_threshold() {
        let p = profile("exp(u) - 1", "t", "u", 0.0);
        assert_eq!(p.u_phi, ExtReal::PosInf);
        assert!(p.left_continuous_at_u.passed());
    }
}
