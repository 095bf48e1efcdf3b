//! Scalar abstraction and extended reals.
//!
//! All core math is generic over a floating-point scalar so the same
//! code runs at `f32` or `f64` precision. Distances over possibly-empty
//! obstacle sets live in the extended real line, so infinities are a
//! tagged value rather than a sentinel magnitude.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use serde::de;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Floating-point scalar usable throughout the crate: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + fmt::Debug
    + fmt::Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + fmt::Debug
        + fmt::Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into the working scalar type.
pub fn cast<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 value representable in scalar type")
}

/// Finite and strictly positive; NaN and infinities fail, which is what
/// config validation wants.
pub fn is_positive_finite<T: Scalar>(x: T) -> bool {
    x.is_finite() && x > T::zero()
}

/// An extended real: finite value, `+inf`, or `-inf`.
///
/// Minimum distances to empty sets and out-of-range quantiles produce
/// infinities that must compare and combine exactly in constraint
/// checks, so they are kept symbolic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T: Scalar> ExtReal<T> {
    pub fn finite(value: T) -> Self {
        ExtReal::Finite(value)
    }

    pub fn zero() -> Self {
        ExtReal::Finite(T::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite_value(&self) -> Option<T> {
        match self {
            ExtReal::Finite(v) => Some(*v),
            _ => None,
        }
    }

    /// Adds a finite scalar; infinities absorb the addition.
    pub fn add_scalar(self, rhs: T) -> Self {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v + rhs),
            other => other,
        }
    }

    /// `[self - rhs]₊` on the extended line.
    ///
    /// The indeterminate `∞ - ∞` is defined as 0, matching the
    /// convention that two empty observations carry no error.
    pub fn sub_clamped(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtReal::PosInf, ExtReal::PosInf) => ExtReal::zero(),
            (ExtReal::NegInf, ExtReal::NegInf) => ExtReal::zero(),
            (ExtReal::PosInf, _) => ExtReal::PosInf,
            (_, ExtReal::PosInf) => ExtReal::zero(),
            (ExtReal::NegInf, _) => ExtReal::zero(),
            (_, ExtReal::NegInf) => ExtReal::PosInf,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                ExtReal::Finite((a - b).max(T::zero()))
            }
        }
    }

    /// Total order; panics on NaN, which no operation in this crate produces.
    pub fn total_order(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).expect("NaN has no place in an ExtReal")
    }
}

impl<T: Scalar> PartialOrd for ExtReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Some(Ordering::Equal),
            (NegInf, _) => Some(Ordering::Less),
            (_, NegInf) => Some(Ordering::Greater),
            (PosInf, _) => Some(Ordering::Greater),
            (_, PosInf) => Some(Ordering::Less),
            (Finite(a), Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl<T: Scalar> fmt::Display for ExtReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::PosInf => write!(f, "inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
        }
    }
}

impl<T: Scalar> FromStr for ExtReal<T> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "+inf" => Ok(ExtReal::PosInf),
            "-inf" => Ok(ExtReal::NegInf),
            other => other
                .parse::<f64>()
                .map(|v| ExtReal::Finite(cast(v)))
                .map_err(|e| format!("invalid extended real {other:?}: {e}")),
        }
    }
}

impl<T: Serialize> Serialize for ExtReal<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => v.serialize(serializer),
            ExtReal::PosInf => serializer.serialize_str("inf"),
            ExtReal::NegInf => serializer.serialize_str("-inf"),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ExtRealRepr<T> {
    Finite(T),
    Tagged(String),
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for ExtReal<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match ExtRealRepr::<T>::deserialize(deserializer)? {
            ExtRealRepr::Finite(v) => Ok(ExtReal::Finite(v)),
            ExtRealRepr::Tagged(s) => match s.as_str() {
                "inf" | "+inf" => Ok(ExtReal::PosInf),
                "-inf" => Ok(ExtReal::NegInf),
                other => Err(de::Error::custom(format!(
                    "expected a number or \"inf\"/\"-inf\", found {other:?}"
                ))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_spans_the_extended_line() {
        let lo: ExtReal<f64> = ExtReal::NegInf;
        let mid = ExtReal::finite(3.0);
        let hi: ExtReal<f64> = ExtReal::PosInf;
        assert!(lo < mid && mid < hi);
        assert_eq!(hi.total_order(&hi), Ordering::Equal);
        assert!(hi >= hi);
    }

    #[test]
    fn sub_clamped_conventions() {
        let inf: ExtReal<f64> = ExtReal::PosInf;
        let two = ExtReal::finite(2.0);
        let five = ExtReal::finite(5.0);
        assert_eq!(inf.sub_clamped(inf), ExtReal::zero());
        assert_eq!(inf.sub_clamped(two), ExtReal::PosInf);
        assert_eq!(two.sub_clamped(inf), ExtReal::zero());
        assert_eq!(five.sub_clamped(two), ExtReal::finite(3.0));
        assert_eq!(two.sub_clamped(five), ExtReal::zero());
    }

    #[test]
    fn add_scalar_absorbs_into_infinity() {
        let inf: ExtReal<f64> = ExtReal::PosInf;
        assert_eq!(inf.add_scalar(0.3), ExtReal::PosInf);
        assert_eq!(ExtReal::finite(1.0).add_scalar(0.5), ExtReal::finite(1.5));
        let ninf: ExtReal<f64> = ExtReal::NegInf;
        assert_eq!(ninf.add_scalar(0.3), ExtReal::NegInf);
    }

    #[test]
    fn serde_round_trip() {
        let values: Vec<ExtReal<f64>> =
            vec![ExtReal::NegInf, ExtReal::finite(0.125), ExtReal::PosInf];
        let json = serde_json::to_string(&values).unwrap();
        assert_eq!(json, r#"["-inf",0.125,"inf"]"#);
        let back: Vec<ExtReal<f64>> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, values);
    }
}
