//! Bit-exact text rendering of `f64` in C99 `%a` style (`0x1.8p+1`) and a
//! parser that accepts either that form or an ordinary decimal literal.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Formats a finite or non-finite `f64` as a hexadecimal float literal.
pub fn to_hex(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let mut mantissa = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 && mantissa == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_bits == 0 {
        (0, -1022)
    } else {
        (1, exp_bits - 1023)
    };
    let mut digits = 13;
    while digits > 0 && mantissa & 0xf == 0 {
        mantissa >>= 4;
        digits -= 1;
    }
    if digits == 0 {
        format!("{sign}0x{lead}p{exp:+}")
    } else {
        format!("{sign}0x{lead}.{mantissa:0digits$x}p{exp:+}")
    }
}

/// Parses a hexadecimal float literal produced by [`to_hex`] (or any
/// `[-]0xH.HHHp[+-]E` literal whose value is exactly representable).
pub fn from_hex(s: &str) -> Result<f64> {
    let bad = || Error::Invalid(format!("malformed hex float {s:?}"));
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    match t {
        "inf" => return Ok(if neg { f64::NEG_INFINITY } else { f64::INFINITY }),
        "nan" => return Ok(f64::NAN),
        _ => {}
    }
    let body = t
        .strip_prefix("0x")
        .or_else(|| t.strip_prefix("0X"))
        .ok_or_else(bad)?;
    let (mant, exp) = body.split_once(['p', 'P']).ok_or_else(bad)?;
    let exp: i32 = exp.parse().map_err(|_| bad())?;
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() || frac_part.len() > 13 {
        return Err(bad());
    }
    let int_val = u64::from_str_radix(int_part, 16).map_err(|_| bad())?;
    let frac_val = if frac_part.is_empty() {
        0
    } else {
        u64::from_str_radix(frac_part, 16).map_err(|_| bad())?
    };
    let frac_bits = 4 * frac_part.len() as i32;
    // int_val·2^frac_bits + frac_val fits in 57 bits for the literals we emit.
    let scaled = (int_val << frac_bits) | frac_val;
    if scaled >> 53 != 0 {
        return Err(bad());
    }
    let v = scaled as f64 * 2f64.powi(exp - frac_bits);
    // powi of very negative exponents underflows in two steps; redo exactly.
    let v = if v == 0.0 && scaled != 0 {
        let mut x = scaled as f64;
        let mut e = exp - frac_bits;
        while e < -1000 {
            x *= 2f64.powi(-1000);
            e += 1000;
        }
        x * 2f64.powi(e)
    } else {
        v
    };
    Ok(if neg { -v } else { v })
}

/// Parses either a hex float (`0x...`) or a decimal literal.
pub fn parse_float(s: &str) -> Result<f64> {
    let t = s.trim();
    let lower = t.trim_start_matches(['-', '+']);
    if lower.starts_with("0x") || lower.starts_with("0X") {
        from_hex(t)
    } else {
        t.parse::<f64>()
            .map_err(|_| Error::Invalid(format!("not a number: {s:?}")))
    }
}

/// An `f64` serialized as `{"hex": "0x1.8p+1", "decimal": 3.0}`. The hex
/// text is authoritative when reading; a bare number or string also parses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexF64(pub f64);

#[derive(Serialize, Deserialize)]
struct HexRepr {
    hex: String,
    decimal: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum HexInput {
    Repr { hex: String },
    Text(String),
    Number(f64),
}

impl Serialize for HexF64 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HexRepr { hex: to_hex(self.0), decimal: self.0 }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HexF64 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = match HexInput::deserialize(d)? {
            HexInput::Repr { hex } | HexInput::Text(hex) => parse_float(&hex).map_err(serde::de::Error::custom)?,
            HexInput::Number(x) => x,
        };
        Ok(HexF64(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_renderings() {
        assert_eq!(to_hex(1.0), "0x1p+0");
        assert_eq!(to_hex(3.0), "0x1.8p+1");
        assert_eq!(to_hex(-0.5), "-0x1p-1");
        assert_eq!(to_hex(0.0), "0x0p+0");
        assert_eq!(to_hex(0.1), "0x1.999999999999ap-4");
        assert_eq!(from_hex("0x1.999999999999ap-4").unwrap(), 0.1);
    }

    #[test]
    fn parse_float_accepts_both_forms() {
        assert_eq!(parse_float("2.5").unwrap(), 2.5);
        assert_eq!(parse_float("0x1.4p+1").unwrap(), 2.5);
        assert!(parse_float("abc").is_err());
        assert!(from_hex("0x1.8").is_err());
    }

    proptest! {
        #[test]
        fn round_trips_bit_exactly(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let back = from_hex(&to_hex(v)).unwrap();
            prop_assert_eq!(back.to_bits(), v.to_bits());
        }
    }
}
