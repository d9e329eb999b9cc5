//! Exact rationals and their `"p/q"` string encoding.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

pub type Rational = num_rational::BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: impl Into<BigInt>) -> Rational {
    Rational::from_integer(value.into())
}

pub fn pow(base: &Rational, exp: usize) -> Rational {
    num_traits::pow(base.clone(), exp)
}

pub fn abs(value: &Rational) -> Rational {
    value.abs()
}

/// Smallest rational approximation helper for reports; never used for
/// verification.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Converts a finite `f64` into the exact rational it denotes.
pub fn from_f64(value: f64) -> Option<Rational> {
    Rational::from_float(value)
}

pub fn to_string(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => text.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Serde adapter: `#[serde(with = "crate::rational::serde_str")]`.
pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).ok_or_else(|| serde::de::Error::custom(format!("bad rational {text:?}")))
    }
}

pub mod serde_opt_str {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_some(&to_string(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse(&t).ok_or_else(|| serde::de::Error::custom(format!("bad rational {t:?}"))))
            .transpose()
    }
}

pub mod serde_vec_str {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&to_string(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse(t).ok_or_else(|| serde::de::Error::custom(format!("bad rational {t:?}"))))
            .collect()
    }
}

pub fn is_nonnegative(value: &Rational) -> bool {
    !value.is_negative()
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        for r in [rat(3, 7), rat(-5, 10), int(4), zero()] {
            assert_eq!(parse(&to_string(&r)), Some(r));
        }
        assert_eq!(to_string(&rat(2, 4)), "1/2");
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse(" 6 / 8 "), Some(rat(3, 4)));
    }
}
