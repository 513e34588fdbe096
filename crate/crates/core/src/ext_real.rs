//! Extended real numbers `ℝ ∪ {+∞, −∞}` plus an explicit `Undefined` value.
//!
//! Arithmetic follows measure-theory conventions: `0 · ±∞ = 0`, `∞ − ∞` is
//! undefined, `ln 0 = −∞`, `exp(−∞) = 0`. Division by zero is undefined for
//! every numerator. `Undefined` is absorbing.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    /// Always a finite, non-NaN `f64`.
    Finite(f64),
    PosInf,
    NegInf,
    Undefined,
}

pub use ExtReal::{NegInf, PosInf, Undefined};

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);
    pub const ONE: ExtReal = ExtReal::Finite(1.0);

    /// Converts an `f64`, mapping `±inf` to the infinities and NaN to `Undefined`.
    pub fn from_f64(x: f64) -> Self {
        if x.is_nan() {
            Undefined
        } else if x == f64::INFINITY {
            PosInf
        } else if x == f64::NEG_INFINITY {
            NegInf
        } else {
            ExtReal::Finite(x)
        }
    }

    /// `f64` view: infinities map to `±inf`, `Undefined` to NaN.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            PosInf => f64::INFINITY,
            NegInf => f64::NEG_INFINITY,
            Undefined => f64::NAN,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, PosInf | NegInf)
    }

    pub fn is_undefined(self) -> bool {
        matches!(self, Undefined)
    }

    pub fn is_pos_inf(self) -> bool {
        matches!(self, PosInf)
    }

    pub fn is_zero(self) -> bool {
        matches!(self, ExtReal::Finite(x) if x == 0.0)
    }

    /// Sign as -1, 0, 1; `None` for `Undefined`.
    fn signum(self) -> Option<i8> {
        match self {
            ExtReal::Finite(x) if x > 0.0 => Some(1),
            ExtReal::Finite(x) if x < 0.0 => Some(-1),
            ExtReal::Finite(_) => Some(0),
            PosInf => Some(1),
            NegInf => Some(-1),
            Undefined => None,
        }
    }

    fn inf_with_sign(sign: i8) -> Self {
        if sign >= 0 {
            PosInf
        } else {
            NegInf
        }
    }

    pub fn abs(self) -> Self {
        match self {
            ExtReal::Finite(x) => ExtReal::Finite(x.abs()),
            PosInf | NegInf => PosInf,
            Undefined => Undefined,
        }
    }

    pub fn exp(self) -> Self {
        match self {
            ExtReal::Finite(x) => ExtReal::from_f64(x.exp()),
            PosInf => PosInf,
            NegInf => ExtReal::ZERO,
            Undefined => Undefined,
        }
    }

    pub fn ln(self) -> Self {
        match self {
            ExtReal::Finite(x) if x > 0.0 => ExtReal::Finite(x.ln()),
            ExtReal::Finite(x) if x == 0.0 => NegInf,
            PosInf => PosInf,
            _ => Undefined,
        }
    }

    pub fn sqrt(self) -> Self {
        match self {
            ExtReal::Finite(x) if x >= 0.0 => ExtReal::Finite(x.sqrt()),
            PosInf => PosInf,
            _ => Undefined,
        }
    }

    pub fn cosh(self) -> Self {
        match self {
            ExtReal::Finite(x) => ExtReal::from_f64(x.cosh()),
            PosInf | NegInf => PosInf,
            Undefined => Undefined,
        }
    }

    /// `self ^ exponent`. Negative bases need an integer exponent;
    /// `0 ^ negative = +∞`.
    pub fn pow(self, exponent: ExtReal) -> Self {
        use ExtReal::Finite;
        match (self, exponent) {
            (Undefined, _) | (_, Undefined) => Undefined,
            (_, Finite(e)) if e == 0.0 => ExtReal::ONE,
            (Finite(b), Finite(e)) => {
                if b < 0.0 && e.fract() != 0.0 {
                    Undefined
                } else if e == 1.0 {
                    Finite(b)
                } else if e == 2.0 {
                    ExtReal::from_f64(b * b)
                } else if e.fract() == 0.0 && e.abs() <= 8.0 && b != 0.0 {
                    ExtReal::from_f64(b.powi(e as i32))
                } else {
                    ExtReal::from_f64(b.powf(e))
                }
            }
            (PosInf, Finite(e)) => {
                if e > 0.0 {
                    PosInf
                } else {
                    ExtReal::ZERO
                }
            }
            (NegInf, Finite(e)) => {
                if e.fract() != 0.0 {
                    Undefined
                } else if e < 0.0 {
                    ExtReal::ZERO
                } else if (e % 2.0) == 0.0 {
                    PosInf
                } else {
                    NegInf
                }
            }
            (base, PosInf) => match base {
                Finite(b) if b.abs() < 1.0 => ExtReal::ZERO,
                Finite(b) if b == 1.0 => ExtReal::ONE,
                Finite(b) if b > 1.0 => PosInf,
                PosInf => PosInf,
                _ => Undefined,
            },
            (base, NegInf) => match base {
                Finite(b) if b == 0.0 => PosInf,
                Finite(b) if b > 0.0 && b < 1.0 => PosInf,
                Finite(b) if b == 1.0 => ExtReal::ONE,
                Finite(b) if b > 1.0 => ExtReal::ZERO,
                PosInf => ExtReal::ZERO,
                _ => Undefined,
            },
        }
    }

    pub fn min(self, other: ExtReal) -> Self {
        match self.partial_cmp(&other) {
            Some(Ordering::Greater) => other,
            Some(_) => self,
            None => Undefined,
        }
    }

    pub fn max(self, other: ExtReal) -> Self {
        match self.partial_cmp(&other) {
            Some(Ordering::Less) => other,
            Some(_) => self,
            None => Undefined,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::from_f64(x)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtReal::Finite;
        match (*self, *other) {
            (Undefined, _) | (_, Undefined) => None,
            (Finite(a), Finite(b)) => a.partial_cmp(&b),
            (PosInf, PosInf) | (NegInf, NegInf) => Some(Ordering::Equal),
            (PosInf, _) | (_, NegInf) => Some(Ordering::Greater),
            (NegInf, _) | (_, PosInf) => Some(Ordering::Less),
        }
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        match self {
            ExtReal::Finite(x) => ExtReal::Finite(-x),
            PosInf => NegInf,
            NegInf => PosInf,
            Undefined => Undefined,
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        use ExtReal::Finite;
        match (self, rhs) {
            (Undefined, _) | (_, Undefined) => Undefined,
            (Finite(a), Finite(b)) => ExtReal::from_f64(a + b),
            (PosInf, NegInf) | (NegInf, PosInf) => Undefined,
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
        }
    }
}

impl Sub for ExtReal {
    type Output = ExtReal;
    fn sub(self, rhs: ExtReal) -> ExtReal {
        self + (-rhs)
    }
}

impl Mul for ExtReal {
    type Output = ExtReal;
    fn mul(self, rhs: ExtReal) -> ExtReal {
        use ExtReal::Finite;
        match (self, rhs) {
            (Undefined, _) | (_, Undefined) => Undefined,
            (Finite(a), Finite(b)) => ExtReal::from_f64(a * b),
            // 0 · ±∞ = 0
            (a, b) if a.is_zero() || b.is_zero() => ExtReal::ZERO,
            (a, b) => {
                let s = a.signum().unwrap_or(0) * b.signum().unwrap_or(0);
                ExtReal::inf_with_sign(s)
            }
        }
    }
}

impl Div for ExtReal {
    type Output = ExtReal;
    fn div(self, rhs: ExtReal) -> ExtReal {
        use ExtReal::Finite;
        match (self, rhs) {
            (Undefined, _) | (_, Undefined) => Undefined,
            (_, b) if b.is_zero() => Undefined,
            (Finite(a), Finite(b)) => ExtReal::from_f64(a / b),
            (Finite(_), PosInf | NegInf) => ExtReal::ZERO,
            (PosInf | NegInf, PosInf | NegInf) => Undefined,
            (a, b) => {
                let s = a.signum().unwrap_or(0) * b.signum().unwrap_or(0);
                ExtReal::inf_with_sign(s)
            }
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            PosInf => f.write_str("inf"),
            NegInf => f.write_str("-inf"),
            Undefined => f.write_str("undefined"),
        }
    }
}

// JSON has no infinities: finite values serialize as numbers, the rest as strings.
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => serializer.serialize_f64(*x),
            other => serializer.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(x) => Ok(ExtReal::from_f64(x)),
            Repr::Text(s) => match s.as_str() {
                "inf" | "+inf" => Ok(PosInf),
                "-inf" => Ok(NegInf),
                "undefined" => Ok(Undefined),
                other => other
                    .parse::<f64>()
                    .map(ExtReal::from_f64)
                    .map_err(serde::de::Error::custom),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const F: fn(f64) -> ExtReal = ExtReal::Finite;

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(F(0.0) * PosInf, F(0.0));
        assert_eq!(NegInf * F(0.0), F(0.0));
    }

    #[test]
    fn infinity_absorbs_finite_addition() {
        assert_eq!(F(-3.0) + PosInf, PosInf);
        assert_eq!(PosInf + NegInf, Undefined);
        assert_eq!(PosInf - PosInf, Undefined);
    }

    #[test]
    fn division_by_zero_is_undefined() {
        assert_eq!(F(1.0) / F(0.0), Undefined);
        assert_eq!(F(0.0) / F(0.0), Undefined);
        assert_eq!(PosInf / F(0.0), Undefined);
        assert_eq!(F(2.0) / PosInf, F(0.0));
    }

    #[test]
    fn transcendental_edge_values() {
        assert_eq!(F(0.0).ln(), NegInf);
        assert_eq!(NegInf.exp(), F(0.0));
        assert_eq!(PosInf.exp(), PosInf);
        assert_eq!(F(-1.0).ln(), Undefined);
        assert_eq!(F(-1.0).sqrt(), Undefined);
        assert_eq!(F(1000.0).exp(), PosInf);
    }

    #[test]
    fn pow_rules() {
        assert_eq!(F(-2.0).pow(F(2.0)), F(4.0));
        assert_eq!(F(-2.0).pow(F(0.5)), Undefined);
        assert_eq!(F(0.0).pow(F(-1.0)), PosInf);
        assert_eq!(NegInf.pow(F(2.0)), PosInf);
        assert_eq!(PosInf.pow(F(-1.0)), F(0.0));
    }

    #[test]
    fn undefined_is_absorbing() {
        for x in [F(1.0), PosInf, NegInf, F(0.0)] {
            assert!((x + Undefined).is_undefined());
            assert!((Undefined * x).is_undefined());
            assert!(x.max(Undefined).is_undefined());
        }
    }

    #[test]
    fn serde_uses_strings_for_non_finite() {
        let s = serde_json::to_string(&vec![F(1.5), PosInf, NegInf, Undefined]).unwrap();
        assert_eq!(s, r#"[1.5,"inf","-inf","undefined"]"#);
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[1], PosInf);
        assert!(back[3].is_undefined());
    }
}
