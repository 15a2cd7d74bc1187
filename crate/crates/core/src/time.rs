//! Exact time scalars.
//!
//! Every mechanism in this crate only ever compares times, but the misreport
//! harness inserts new times between existing ones. Times are therefore exact
//! rationals: a midpoint never collides with an existing event by rounding.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num};

/// An exact, totally ordered time value.
///
/// Implemented for [`num_rational::Ratio`] over any primitive or big integer.
/// The textual form is `"p"` for integral values and `"p/q"` otherwise, always
/// in lowest terms with a positive denominator.
pub trait Time:
    Num + Clone + Ord + Debug + Display + FromStr + Send + Sync + 'static
{
    fn from_int(value: i64) -> Self;

    /// Exact `(self + other) / 2`.
    fn midpoint(&self, other: &Self) -> Self {
        let two = Self::one() + Self::one();
        (self.clone() + other.clone()) / two
    }

    /// Exact `self + (other - self) * num / den`.
    fn lerp(&self, other: &Self, num: i64, den: i64) -> Self {
        let span = other.clone() - self.clone();
        self.clone() + span * Self::from_int(num) / Self::from_int(den)
    }

    fn parse_time(text: &str) -> Option<Self> {
        Self::from_str(text.trim()).ok()
    }
}

impl<I> Time for Ratio<I>
where
    I: Integer + Clone + FromPrimitive + FromStr + Display + Debug + Send + Sync + 'static,
{
    fn from_int(value: i64) -> Self {
        Ratio::from_integer(I::from_i64(value).expect("time integer out of range"))
    }
}

/// Serde adapter storing a [`Time`] as its canonical string.
pub mod as_string {
    use super::Time;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Time, S: Serializer>(value: &T, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(value)
    }

    pub fn deserialize<'de, T: Time, D: Deserializer<'de>>(de: D) -> Result<T, D::Error> {
        let text = String::deserialize(de)?;
        T::parse_time(&text).ok_or_else(|| D::Error::custom(format!("invalid time {text:?}")))
    }
}

/// Serde adapter for optional times.
pub mod opt_as_string {
    use super::Time;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Time, S: Serializer>(value: &Option<T>, ser: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => ser.collect_str(v),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, T: Time, D: Deserializer<'de>>(de: D) -> Result<Option<T>, D::Error> {
        match Option::<String>::deserialize(de)? {
            None => Ok(None),
            Some(text) => T::parse_time(&text)
                .map(Some)
                .ok_or_else(|| D::Error::custom(format!("invalid time {text:?}"))),
        }
    }
}
