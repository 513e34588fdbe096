use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{rng, suite_t_samples, VerifyError, GEN_OMEGA};
use crate::classify::{classify, ComposedPhi, EClass, PhiSpec, PlaneMap, ToleranceConfig};

/// Rejection budget of the class generators.
pub const DRAW_BUDGET: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TFactor {
    One,
    Abs,
    Square,
    OnePlusSquare,
}

impl TFactor {
    pub const ALL: [TFactor; 4] = [TFactor::One, TFactor::Abs, TFactor::Square, TFactor::OnePlusSquare];

    fn text(self) -> &'static str {
        match self {
            TFactor::One => "1",
            TFactor::Abs => "abs(t)",
            TFactor::Square => "t^2",
            TFactor::OnePlusSquare => "(1 + t^2)",
        }
    }
}

/// First coordinate σ(t) of a generated map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sigma {
    Zero,
    T,
    Abs,
    Square,
    OnePlusSquare,
}

impl Sigma {
    pub const ALL: [Sigma; 5] = [Sigma::Zero, Sigma::T, Sigma::Abs, Sigma::Square, Sigma::OnePlusSquare];

    fn text(self) -> &'static str {
        match self {
            Sigma::Zero => "0",
            Sigma::T => "t",
            Sigma::Abs => "abs(t)",
            Sigma::Square => "t^2",
            Sigma::OnePlusSquare => "1 + t^2",
        }
    }
}

/// Second coordinate of a generated map, before the slope α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapU {
    /// u
    Linear,
    /// |u|, equal to u on [0, ∞) and even
    Abs,
    /// |u|^r
    AbsPower(f64),
}

/// E(t, u) = (σ(t) + shift, α·ψ(u)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapFamily {
    pub sigma: Sigma,
    pub shift: f64,
    pub alpha: f64,
    pub u: MapU,
}

impl MapFamily {
    pub fn map(&self) -> PlaneMap {
        let e_t = if self.shift == 0.0 {
            self.sigma.text().to_string()
        } else {
            format!("{} + {}", self.sigma.text(), self.shift)
        };
        let e_u = match self.u {
            MapU::Linear => format!("{}*u", self.alpha),
            MapU::Abs => format!("{}*abs(u)", self.alpha),
            MapU::AbsPower(r) => format!("{}*abs(u)^{}", self.alpha, r),
        };
        PlaneMap::parse(&e_t, &e_u).expect("generated map parses")
    }
}

/// How a generated Φ is cut off in u.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Piece {
    Whole,
    /// Φ = 0 for u < κ
    FlatBelow(f64),
    /// Φ = +∞ for u ≥ κ
    InfiniteFrom(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiFamily {
    /// a·g(t)·u^p + b·h(t)·(e^{qu} − 1)
    Standard {
        a: f64,
        g: TFactor,
        p: f64,
        b: f64,
        h: TFactor,
        q: f64,
    },
    /// a·g(t)·|u|^p + b·h(t)·(cosh(qu) − 1), even in u
    Symmetric {
        a: f64,
        g: TFactor,
        p: f64,
        b: f64,
        h: TFactor,
        q: f64,
    },
    /// a·t + b·u
    Linear { a: f64, b: f64 },
    /// Signed coefficients, any exponent in (0, 4], a t-offset and a cut;
    /// mostly not E-Young.
    Wild {
        a: f64,
        g: TFactor,
        p: f64,
        b: f64,
        h: TFactor,
        q: f64,
        offset: f64,
        piece: Piece,
    },
}

impl PhiFamily {
    pub fn text(&self) -> String {
        let two_terms = |a: f64, g: TFactor, power: String, b: f64, h: TFactor, growth: String| {
            let mut terms = Vec::new();
            if a != 0.0 {
                terms.push(coef_term(a, g, &power));
            }
            if b != 0.0 {
                terms.push(coef_term(b, h, &growth));
            }
            terms
        };
        let terms = match *self {
            PhiFamily::Standard { a, g, p, b, h, q } => {
                two_terms(a, g, format!("u^{p}"), b, h, format!("(exp({q}*u) - 1)"))
            }
            PhiFamily::Symmetric { a, g, p, b, h, q } => {
                two_terms(a, g, format!("abs(u)^{p}"), b, h, format!("(cosh({q}*u) - 1)"))
            }
            PhiFamily::Linear { a, b } => {
                let mut terms = Vec::new();
                if a != 0.0 {
                    terms.push(format!("{a}*t"));
                }
                if b != 0.0 {
                    terms.push(format!("{b}*u"));
                }
                terms
            }
            PhiFamily::Wild {
                a,
                g,
                p,
                b,
                h,
                q,
                offset,
                piece,
            } => {
                let mut terms = two_terms(a, g, format!("u^{p}"), b, h, format!("(exp({q}*u) - 1)"));
                if offset != 0.0 {
                    terms.push(format!("{offset}*t"));
                }
                let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                return match piece {
                    Piece::Whole => body,
                    Piece::FlatBelow(k) => format!("if(u < {k}, 0, {body})"),
                    Piece::InfiniteFrom(k) => format!("if(u < {k}, {body}, inf)"),
                };
            }
        };
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }

    pub fn phi(&self) -> PhiSpec {
        PhiSpec::parse(&self.text()).expect("generated Φ parses")
    }
}

fn coef_term(c: f64, factor: TFactor, rest: &str) -> String {
    match factor {
        TFactor::One => format!("{c}*{rest}"),
        f => format!("{c}*{}*{rest}", f.text()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub phi: PhiFamily,
    pub map: MapFamily,
}

/// A generated (Φ, E) with the draw that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedPair {
    pub phi: PhiSpec,
    pub map: PlaneMap,
    pub seed: u64,
    pub family: FamilyDescriptor,
}

impl GeneratedPair {
    fn new(seed: u64, family: FamilyDescriptor) -> GeneratedPair {
        GeneratedPair {
            phi: family.phi.phi(),
            map: family.map.map(),
            seed,
            family,
        }
    }

    pub fn composed(&self) -> ComposedPhi {
        ComposedPhi::new(self.phi.clone(), self.map.clone())
    }
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, items: &[T]) -> T {
    items[rng.gen_range(0..items.len())]
}

/// 0 with probability 1/4, otherwise in [0.1, 3].
fn coefficient(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.25) {
        0.0
    } else {
        round4(rng.gen_range(0.1..=3.0))
    }
}

fn draw_phi(rng: &mut ChaCha8Rng, symmetric: bool) -> PhiFamily {
    let mut a = coefficient(rng);
    let b = coefficient(rng);
    if a == 0.0 && b == 0.0 {
        a = 1.0;
    }
    let (g, h) = (pick(rng, &TFactor::ALL), pick(rng, &TFactor::ALL));
    let p = round4(rng.gen_range(1.0..=4.0));
    let q = round4(rng.gen_range(0.01..=2.0));
    if symmetric {
        PhiFamily::Symmetric { a, g, p, b, h, q }
    } else {
        PhiFamily::Standard { a, g, p, b, h, q }
    }
}

fn draw_map(rng: &mut ChaCha8Rng, u: MapU) -> MapFamily {
    MapFamily {
        sigma: pick(rng, &Sigma::ALL),
        shift: 0.0,
        alpha: round4(rng.gen_range(0.2..=3.0)),
        u,
    }
}

/// The map shape used for a class: E-N needs maps that keep φE even.
pub(crate) fn map_u_for(class: EClass) -> MapU {
    if class == EClass::EN {
        MapU::Abs
    } else {
        MapU::Linear
    }
}

pub(crate) fn in_class(c: &ComposedPhi, class: EClass, tols: &ToleranceConfig) -> bool {
    classify(c, &suite_t_samples(GEN_OMEGA), tols).is_ok_and(|r| r.verdicts.get(class))
}

fn exhausted(class: EClass, seed: u64) -> VerifyError {
    VerifyError::BudgetExhausted {
        class,
        seed,
        budget: DRAW_BUDGET,
    }
}

/// A pair from the generator family that classifies into `class` on
/// `GEN_OMEGA`, by rejection sampling. Deterministic in `seed`.
pub fn gen_in_class(class: EClass, seed: u64, tols: &ToleranceConfig) -> Result<GeneratedPair, VerifyError> {
    let mut rng = rng(seed);
    for _ in 0..DRAW_BUDGET {
        let family = FamilyDescriptor {
            phi: draw_phi(&mut rng, class == EClass::EN),
            map: draw_map(&mut rng, map_u_for(class)),
        };
        let pair = GeneratedPair::new(seed, family);
        if in_class(&pair.composed(), class, tols) {
            return Ok(pair);
        }
    }
    Err(exhausted(class, seed))
}

/// Φ(t, u) = g(t)·u^p + h(t)·(e^{qu} − 1) with E(t, u) = (σ(t), α·u),
/// classified E-Young.
pub fn gen_young(seed: u64, tols: &ToleranceConfig) -> Result<GeneratedPair, VerifyError> {
    gen_in_class(EClass::EYoung, seed, tols)
}

/// A second Φ in `class` for a given map.
pub(crate) fn gen_phi_for_map(
    class: EClass,
    map: MapFamily,
    seed: u64,
    tols: &ToleranceConfig,
) -> Result<GeneratedPair, VerifyError> {
    let mut rng = rng(seed);
    for _ in 0..DRAW_BUDGET {
        let family = FamilyDescriptor {
            phi: draw_phi(&mut rng, class == EClass::EN),
            map,
        };
        let pair = GeneratedPair::new(seed, family);
        if in_class(&pair.composed(), class, tols) {
            return Ok(pair);
        }
    }
    Err(exhausted(class, seed))
}

/// One Φ with two maps, Φ∘E₁ and Φ∘E₂ both in `class`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct MapPair {
    pub phi: PhiFamily,
    pub maps: [MapFamily; 2],
}

impl MapPair {
    pub fn composed_with(&self, map: PlaneMap) -> ComposedPhi {
        ComposedPhi::new(self.phi.phi(), map)
    }
}

fn gen_map_pair_with(
    class: EClass,
    seed: u64,
    tols: &ToleranceConfig,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> MapPair,
) -> Result<MapPair, VerifyError> {
    let mut rng = rng(seed);
    for _ in 0..DRAW_BUDGET {
        let pair = draw(&mut rng);
        if pair.maps.iter().all(|m| in_class(&pair.composed_with(m.map()), class, tols)) {
            return Ok(pair);
        }
    }
    Err(exhausted(class, seed))
}

/// Φ(t, u) = a·t + b·u (b > 0) with maps (σ(t), α·|u|^r).
pub(crate) fn gen_linear_pair(class: EClass, seed: u64, tols: &ToleranceConfig) -> Result<MapPair, VerifyError> {
    gen_map_pair_with(class, seed, tols, |rng| {
        let a = if rng.gen_bool(0.5) {
            0.0
        } else {
            round4(rng.gen_range(-2.0..=2.0))
        };
        let b = round4(rng.gen_range(0.1..=3.0));
        let map = |rng: &mut ChaCha8Rng| {
            let u = if rng.gen_bool(0.3) {
                MapU::Abs
            } else {
                MapU::AbsPower(round4(rng.gen_range(1.0..=3.0)))
            };
            draw_map(rng, u)
        };
        MapPair {
            phi: PhiFamily::Linear { a, b },
            maps: [map(rng), map(rng)],
        }
    })
}

/// A family Φ with two family maps of the shape used for `class`.
pub(crate) fn gen_map_pair(class: EClass, seed: u64, tols: &ToleranceConfig) -> Result<MapPair, VerifyError> {
    gen_map_pair_with(class, seed, tols, |rng| MapPair {
        phi: draw_phi(rng, class == EClass::EN),
        maps: [draw_map(rng, map_u_for(class)), draw_map(rng, map_u_for(class))],
    })
}

/// Any pair, without classification: half from the class family, half from
/// a wild family (signed coefficients, concave powers, offsets, cuts).
pub fn gen_any(seed: u64) -> GeneratedPair {
    let mut rng = rng(seed);
    let u = pick(&mut rng, &[MapU::Linear, MapU::Abs, MapU::AbsPower(2.0)]);
    let phi = if rng.gen_bool(0.5) {
        let symmetric = rng.gen_bool(0.5);
        draw_phi(&mut rng, symmetric)
    } else {
        let signed = |rng: &mut ChaCha8Rng| {
            if rng.gen_bool(0.2) {
                0.0
            } else {
                round4(rng.gen_range(-2.0..=3.0))
            }
        };
        let (a, b) = (signed(&mut rng), signed(&mut rng));
        let (g, h) = (pick(&mut rng, &TFactor::ALL), pick(&mut rng, &TFactor::ALL));
        let p = round4(rng.gen_range(0.05..=4.0));
        let q = round4(rng.gen_range(0.01..=2.0));
        let offset = if rng.gen_bool(0.6) {
            0.0
        } else {
            round4(rng.gen_range(-1.0..=1.0))
        };
        let kappa = round4(rng.gen_range(0.1..=3.0));
        let piece = pick(
            &mut rng,
            &[Piece::Whole, Piece::Whole, Piece::FlatBelow(kappa), Piece::InfiniteFrom(kappa)],
        );
        PhiFamily::Wild {
            a,
            g,
            p,
            b,
            h,
            q,
            offset,
            piece,
        }
    };
    let map = draw_map(&mut rng, u);
    GeneratedPair::new(seed, FamilyDescriptor { phi, map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::suite_tolerances;

    #[test]
    fn young_generator_is_deterministic_and_young() {
        let tols = suite_tolerances();
        let a = gen_young(1, &tols).unwrap();
        let b = gen_young(1, &tols).unwrap();
        assert_eq!(a, b);
        assert!(in_class(&a.composed(), EClass::EYoung, &tols));
        assert_ne!(gen_young(2, &tols).unwrap().family, a.family);
    }

    #[test]
    fn n_generator_yields_even_compositions() {
        let tols = suite_tolerances();
        for seed in 0..3 {
            let p = gen_in_class(EClass::EN, seed, &tols).unwrap();
            assert!(matches!(p.family.phi, PhiFamily::Symmetric { .. }));
            let c = p.composed();
            assert_eq!(c.eval(0.3, 1.7).unwrap(), c.eval(0.3, -1.7).unwrap());
        }
    }

    #[test]
    fn texts_parse_and_skip_zero_terms() {
        let f = PhiFamily::Standard {
            a: 0.0,
            g: TFactor::Abs,
            p: 2.0,
            b: 1.5,
            h: TFactor::One,
            q: 0.5,
        };
        assert_eq!(f.text(), "1.5*(exp(0.5*u) - 1)");
        let w = PhiFamily::Wild {
            a: -1.0,
            g: TFactor::Square,
            p: 0.5,
            b: 0.0,
            h: TFactor::One,
            q: 1.0,
            offset: 0.25,
            piece: Piece::InfiniteFrom(2.0),
        };
        assert_eq!(w.text(), "if(u < 2, -1*t^2*u^0.5 + 0.25*t, inf)");
        w.phi();
        let m = MapFamily {
            sigma: Sigma::OnePlusSquare,
            shift: 0.5,
            alpha: 2.0,
            u: MapU::AbsPower(1.5),
        };
        assert_eq!(m.map().e_u.to_string(), "(2.0 * (abs(u) ^ 1.5))");
    }

    #[test]
    fn linear_pairs_classify_with_both_maps() {
        let tols = suite_tolerances();
        let p = gen_linear_pair(EClass::EYoung, 5, &tols).unwrap();
        assert!(matches!(p.phi, PhiFamily::Linear { .. }));
        for m in &p.maps {
            assert!(in_class(&p.composed_with(m.map()), EClass::EYoung, &tols));
        }
    }

    #[test]
    fn any_generator_covers_rejects() {
        let tols = suite_tolerances();
        let young = (0..40).filter(|&s| in_class(&gen_any(s).composed(), EClass::EYoung, &tols)).count();
        assert!(young > 0 && young < 40, "{young}");
    }
}
