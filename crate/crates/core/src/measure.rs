//! Finite measure spaces: uniform interval grids with trapezoid cells, or
//! weighted discrete points.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Bindings, Expr, ExprError, Var};
use crate::ext_real::ExtReal;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("invalid interval [{a}, {b}] with {n} nodes (need a < b, at least 3 nodes)")]
    BadInterval { a: f64, b: f64, n: usize },
    #[error("discrete space: {0}")]
    BadDiscrete(String),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("value at node {index} (t = {t}) is not finite")]
    NonFiniteValue { index: usize, t: f64 },
    #[error("integrand is undefined at node {index} (t = {t})")]
    UndefinedIntegrand { index: usize, t: f64 },
    #[error("weight function is negative or undefined at s = {s}")]
    BadWeight { s: f64 },
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    Interval { a: f64, b: f64, n_nodes: usize },
    Discrete { points: Vec<f64>, weights: Vec<f64> },
}

/// A finite measure space with its nodes and per-node cell measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SpaceKind", try_from = "SpaceKind")]
pub struct Space {
    kind: SpaceKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    total: f64,
}

impl From<Space> for SpaceKind {
    fn from(s: Space) -> SpaceKind {
        s.kind
    }
}

impl TryFrom<SpaceKind> for Space {
    type Error = MeasureError;
    fn try_from(kind: SpaceKind) -> Result<Space, MeasureError> {
        match kind {
            SpaceKind::Interval { a, b, n_nodes } => Space::interval(a, b, n_nodes),
            SpaceKind::Discrete { points, weights } => Space::discrete(points, weights),
        }
    }
}

impl Space {
    /// Uniform grid `t_i = a + i(b-a)/(n-1)`; interior cells have width h,
    /// the two endpoint cells h/2.
    pub fn interval(a: f64, b: f64, n_nodes: usize) -> Result<Space, MeasureError> {
        if !(a.is_finite() && b.is_finite() && a < b && n_nodes >= 3) {
            return Err(MeasureError::BadInterval { a, b, n: n_nodes });
        }
        let h = (b - a) / (n_nodes - 1) as f64;
        let nodes: Vec<f64> = (0..n_nodes)
            .map(|i| if i == n_nodes - 1 { b } else { a + i as f64 * h })
            .collect();
        let mut weights = vec![h; n_nodes];
        weights[0] = h / 2.0;
        weights[n_nodes - 1] = h / 2.0;
        Ok(Space {
            kind: SpaceKind::Interval { a, b, n_nodes },
            nodes,
            weights,
            total: b - a,
        })
    }

    pub fn discrete(points: Vec<f64>, weights: Vec<f64>) -> Result<Space, MeasureError> {
        if points.is_empty() {
            return Err(MeasureError::BadDiscrete("no points".into()));
        }
        if points.len() != weights.len() {
            return Err(MeasureError::LengthMismatch {
                expected: points.len(),
                got: weights.len(),
            });
        }
        if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MeasureError::BadDiscrete("points must be finite and strictly increasing".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(MeasureError::BadDiscrete("weights must be finite and nonnegative".into()));
        }
        let total = weights.iter().sum();
        Ok(Space {
            kind: SpaceKind::Discrete {
                points: points.clone(),
                weights: weights.clone(),
            },
            nodes: points,
            weights,
            total,
        })
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Cell measure (quadrature weight) of each node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        self.total
    }

    /// Grid spacing of an interval space.
    pub fn spacing(&self) -> Option<f64> {
        match self.kind {
            SpaceKind::Interval { a, b, n_nodes } => Some((b - a) / (n_nodes - 1) as f64),
            SpaceKind::Discrete { .. } => None,
        }
    }

    /// Smallest and largest node.
    pub fn bounds(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    /// Largest single cell measure, the resolution of superlevel-set measures.
    pub fn max_cell(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }
}

/// Quadrature of node values. `+∞` at a positively weighted node gives `+∞`.
pub fn integrate(space: &Space, integrand: &[ExtReal]) -> Result<ExtReal, MeasureError> {
    if integrand.len() != space.len() {
        return Err(MeasureError::LengthMismatch {
            expected: space.len(),
            got: integrand.len(),
        });
    }
    // Interval grids sum with unit weights and scale by h once, which keeps
    // constants exact.
    let (unit, factor): (Vec<f64>, f64) = match space.spacing() {
        Some(h) => (space.weights().iter().map(|w| w / h).collect(), h),
        None => (space.weights().to_vec(), 1.0),
    };
    let mut sum = 0.0;
    let mut pos_inf = false;
    let mut neg_inf = false;
    for (i, (&w, &v)) in unit.iter().zip(integrand).enumerate() {
        if w == 0.0 {
            continue;
        }
        match v {
            ExtReal::Finite(x) => sum += w * x,
            ExtReal::PosInf => pos_inf = true,
            ExtReal::NegInf => neg_inf = true,
            ExtReal::Undefined => {
                return Err(MeasureError::UndefinedIntegrand {
                    index: i,
                    t: space.nodes()[i],
                })
            }
        }
    }
    Ok(match (pos_inf, neg_inf) {
        (true, true) => ExtReal::Undefined,
        (true, false) => ExtReal::PosInf,
        (false, true) => ExtReal::NegInf,
        (false, false) => ExtReal::from_f64(sum * factor),
    })
}

/// Nonnegative samples `|f(t_i)|` of a function on a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFn {
    space: Space,
    values: Vec<f64>,
}

impl SampledFn {
    /// Stores absolute values; rejects non-finite samples.
    pub fn new(space: Space, values: Vec<f64>) -> Result<SampledFn, MeasureError> {
        if values.len() != space.len() {
            return Err(MeasureError::LengthMismatch {
                expected: space.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(MeasureError::NonFiniteValue {
                index: i,
                t: space.nodes()[i],
            });
        }
        let values = values.into_iter().map(f64::abs).collect();
        Ok(SampledFn { space, values })
    }

    pub fn from_fn(space: Space, f: impl Fn(f64) -> f64) -> Result<SampledFn, MeasureError> {
        let values = space.nodes().iter().map(|&t| f(t)).collect();
        SampledFn::new(space, values)
    }

    /// Samples an expression in `t` at every node.
    pub fn from_expr(space: Space, expr: &Expr) -> Result<SampledFn, MeasureError> {
        let mut values = Vec::with_capacity(space.len());
        for (i, &t) in space.nodes().iter().enumerate() {
            match expr.eval(&Bindings::new().with(Var::T, t))?.finite() {
                Some(v) => values.push(v),
                None => return Err(MeasureError::NonFiniteValue { index: i, t }),
            }
        }
        SampledFn::new(space, values)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<SampledFn, MeasureError> {
        SampledFn::from_csv_reader(std::fs::File::open(path)?)
    }

    /// Reads `t,value` rows (header optional). Uniformly spaced `t` becomes
    /// an interval grid, anything else a discrete space with midpoint cells.
    pub fn from_csv_reader(reader: impl Read) -> Result<SampledFn, MeasureError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut ts = Vec::new();
        let mut vs = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| MeasureError::Csv(e.to_string()))?;
            if record.len() != 2 {
                return Err(MeasureError::Csv(format!(
                    "line {}: expected 2 columns, found {}",
                    line + 1,
                    record.len()
                )));
            }
            let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
            match parsed {
                (Ok(t), Ok(v)) => {
                    ts.push(t);
                    vs.push(v);
                }
                _ if line == 0 => continue,
                _ => return Err(MeasureError::Csv(format!("line {}: not a number", line + 1))),
            }
        }
        if ts.len() < 2 {
            return Err(MeasureError::Csv("need at least two rows".into()));
        }
        if ts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MeasureError::Csv("t column must be strictly increasing".into()));
        }
        let n = ts.len();
        let (a, b) = (ts[0], ts[n - 1]);
        let h = (b - a) / (n - 1) as f64;
        let uniform = ts
            .iter()
            .enumerate()
            .all(|(i, &t)| (t - (a + i as f64 * h)).abs() <= 1e-9 * (b - a).abs().max(h));
        let space = if uniform && n >= 3 {
            Space::interval(a, b, n)?
        } else {
            let weights = (0..n)
                .map(|i| {
                    let lo = if i == 0 { ts[0] } else { 0.5 * (ts[i - 1] + ts[i]) };
                    let hi = if i == n - 1 { ts[n - 1] } else { 0.5 * (ts[i] + ts[i + 1]) };
                    hi - lo
                })
                .collect();
            Space::discrete(ts, weights)?
        };
        SampledFn::new(space, vs)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, alpha: f64) -> SampledFn {
        SampledFn {
            space: self.space.clone(),
            values: self.values.iter().map(|v| (alpha * v).abs()).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<SampledFn, MeasureError> {
        SampledFn::new(self.space.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// Same space, new samples.
    pub fn with_values(&self, values: Vec<f64>) -> Result<SampledFn, MeasureError> {
        SampledFn::new(self.space.clone(), values)
    }
}

/// `μ{t : |f(t)| > u}` with node-cell attribution.
pub fn distribution(f: &SampledFn, u: f64) -> f64 {
    f.values
        .iter()
        .zip(f.space.weights())
        .filter(|(v, _)| **v > u)
        .map(|(_, w)| w)
        .sum()
}

/// `μ{t : |f(t)| ≥ u}`.
pub fn distribution_ge(f: &SampledFn, u: f64) -> f64 {
    f.values
        .iter()
        .zip(f.space.weights())
        .filter(|(v, _)| **v >= u)
        .map(|(_, w)| w)
        .sum()
}

/// Decreasing rearrangement as a step function: `f*(s) = levels[k]` for
/// `s` in `(breakpoints[k-1], breakpoints[k]]`, with `breakpoints[-1] = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangedFn {
    pub breakpoints: Vec<f64>,
    pub levels: Vec<f64>,
}

impl RearrangedFn {
    pub fn total_measure(&self) -> f64 {
        self.breakpoints.last().copied().unwrap_or(0.0)
    }

    /// `f*(s)`; zero beyond the total measure.
    pub fn value_at(&self, s: f64) -> f64 {
        if self.levels.is_empty() {
            return 0.0;
        }
        if s <= 0.0 {
            return self.levels[0];
        }
        let k = self.breakpoints.partition_point(|&b| b < s);
        self.levels.get(k).copied().unwrap_or(0.0)
    }

    /// `|{s : f*(s) > u}|`.
    pub fn measure_above(&self, u: f64) -> f64 {
        let k = self.levels.partition_point(|&l| l > u);
        if k == 0 {
            0.0
        } else {
            self.breakpoints[k - 1]
        }
    }

    /// Pieces as `(start, end, level)`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let starts = std::iter::once(0.0).chain(self.breakpoints.iter().copied());
        starts
            .zip(self.breakpoints.iter().copied())
            .zip(self.levels.iter().copied())
            .map(|((s0, s1), l)| (s0, s1, l))
    }
}

pub fn rearrange(f: &SampledFn) -> RearrangedFn {
    let mut cells: Vec<(f64, f64)> = f
        .values
        .iter()
        .copied()
        .zip(f.space.weights().iter().copied())
        .filter(|&(_, w)| w > 0.0)
        .collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut breakpoints: Vec<f64> = Vec::new();
    let mut levels: Vec<f64> = Vec::new();
    let mut acc = 0.0;
    for (v, w) in cells {
        acc += w;
        if levels.last() == Some(&v) {
            *breakpoints.last_mut().unwrap() = acc;
        } else {
            levels.push(v);
            breakpoints.push(acc);
        }
    }
    RearrangedFn { breakpoints, levels }
}

/// Samples of a weight `ω(s)` on `[0, upper]` with its trapezoid primitive `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    omega: Expr,
    grid: Vec<f64>,
    cumulative: Vec<f64>,
}

impl WeightTable {
    pub const DEFAULT_RESOLUTION: usize = 1024;

    pub fn new(omega: &Expr, upper: f64, resolution: usize) -> Result<WeightTable, MeasureError> {
        let n = resolution.max(1);
        let h = upper / n as f64;
        let grid: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let mut samples = Vec::with_capacity(grid.len());
        for &s in &grid[1..] {
            samples.push(eval_weight(omega, s)?);
        }
        let mut cumulative = vec![0.0; grid.len()];
        cumulative[1] = match eval_weight(omega, 0.0) {
            Ok(w0) => 0.5 * h * (w0 + samples[0]),
            // An integrable singularity at 0, e.g. s^(1/p - 1).
            Err(MeasureError::BadWeight { .. }) => singular_first_cell(omega, h)?,
            Err(e) => return Err(e),
        };
        for i in 2..grid.len() {
            cumulative[i] = cumulative[i - 1] + 0.5 * h * (samples[i - 2] + samples[i - 1]);
        }
        Ok(WeightTable {
            omega: omega.clone(),
            grid,
            cumulative,
        })
    }

    pub fn upper(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn omega(&self, s: f64) -> Result<f64, MeasureError> {
        eval_weight(&self.omega, s)
    }

    /// `W(s)`, linearly interpolated between table points.
    pub fn cumulative(&self, s: f64) -> f64 {
        let n = self.grid.len() - 1;
        let upper = self.upper();
        if s <= 0.0 || upper <= 0.0 {
            return 0.0;
        }
        if s >= upper {
            return self.cumulative[n];
        }
        let x = s / upper * n as f64;
        let i = (x.floor() as usize).min(n - 1);
        let frac = x - i as f64;
        self.cumulative[i] + frac * (self.cumulative[i + 1] - self.cumulative[i])
    }
}

fn eval_weight(omega: &Expr, s: f64) -> Result<f64, MeasureError> {
    match omega.eval(&Bindings::new().with(Var::S, s))?.finite() {
        Some(w) if w >= 0.0 => Ok(w),
        _ => Err(MeasureError::BadWeight { s }),
    }
}

/// `∫_0^h ω` for ω infinite at 0: 3-point Gauss-Legendre on the dyadic
/// cells [h/2^(k+1), h/2^k], k < 64. Power singularities look the same on
/// every dyadic cell, so the relative error does not grow towards 0.
fn singular_first_cell(omega: &Expr, h: f64) -> Result<f64, MeasureError> {
    let x = (0.6f64).sqrt();
    let rule = [(-x, 5.0 / 9.0), (0.0, 8.0 / 9.0), (x, 5.0 / 9.0)];
    let mut total = 0.0;
    let mut hi = h;
    for _ in 0..64 {
        let (lo, half) = (hi / 2.0, hi / 4.0);
        for (node, weight) in rule {
            total += half * weight * eval_weight(omega, lo + half * (1.0 + node))?;
        }
        hi = lo;
    }
    Ok(total)
}

/// `W(upper) = ∫_0^upper ω(s) ds` by the trapezoid rule on `resolution` cells.
pub fn cumulative_weight(omega: &Expr, upper: f64, resolution: usize) -> Result<f64, MeasureError> {
    Ok(WeightTable::new(omega, upper, resolution)?.cumulative(upper))
}
