//! Exact non-negative action costs.

use std::fmt;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// A non-negative rational cost, stored exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cost(Ratio<i64>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CostError {
    #[error("malformed cost literal `{0}`")]
    Malformed(String),
    #[error("negative cost `{0}`")]
    Negative(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl Cost {
    pub const ZERO: Cost = Cost(Ratio::new_raw(0, 1));
    pub const ONE: Cost = Cost(Ratio::new_raw(1, 1));

    pub fn integer(value: u32) -> Self {
        Cost(Ratio::from_integer(i64::from(value)))
    }

    /// Builds `numer / denom`, rejecting negative values and zero denominators.
    pub fn ratio(numer: i64, denom: i64) -> Result<Self, CostError> {
        if denom == 0 {
            return Err(CostError::ZeroDenominator(format!("{numer}/{denom}")));
        }
        let r = Ratio::new(numer, denom);
        if r.is_negative() {
            return Err(CostError::Negative(r.to_string()));
        }
        Ok(Cost(r))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Difference that saturates at zero; costs never go negative.
    pub fn saturating_sub(self, rhs: Cost) -> Cost {
        if rhs >= self {
            Cost::ZERO
        } else {
            Cost(self.0 - rhs.0)
        }
    }

    pub fn sum<'a>(costs: impl IntoIterator<Item = &'a Cost>) -> Cost {
        costs.into_iter().fold(Cost::ZERO, |acc, c| acc + *c)
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        self.0 += rhs.0;
    }
}

impl Sub for Cost {
    type Output = Cost;
    /// Panics in debug builds if the result would be negative.
    fn sub(self, rhs: Cost) -> Cost {
        debug_assert!(self >= rhs, "cost subtraction underflow");
        Cost(self.0 - rhs.0)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Cost {
    type Err = CostError;

    /// Accepts integers (`3`), fractions (`3/2`) and finite decimals (`1.5`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || CostError::Malformed(s.to_string());
        if let Some((n, d)) = t.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            return Cost::ratio(n, d);
        }
        if let Some((int, frac)) = t.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 12 {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let int_part: i64 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            let scale = 10i64.pow(frac.len() as u32);
            let frac_part: i64 = frac.parse().map_err(|_| bad())?;
            let mut numer = int_part.abs().checked_mul(scale).ok_or_else(bad)? + frac_part;
            if negative || int_part < 0 {
                numer = -numer;
            }
            return Cost::ratio(numer, scale);
        }
        let n: i64 = t.parse().map_err(|_| bad())?;
        Cost::ratio(n, 1)
    }
}

impl Serialize for Cost {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!("3".parse::<Cost>().unwrap(), Cost::integer(3));
        assert_eq!("3/2".parse::<Cost>().unwrap(), Cost::ratio(3, 2).unwrap());
        assert_eq!("1.5".parse::<Cost>().unwrap(), Cost::ratio(3, 2).unwrap());
        assert_eq!("6/4".parse::<Cost>().unwrap(), Cost::ratio(3, 2).unwrap());
        assert_eq!("0.25".parse::<Cost>().unwrap(), Cost::ratio(1, 4).unwrap());
    }

    #[test]
    fn rejects_negative_and_garbage() {
        assert!(matches!("-1".parse::<Cost>(), Err(CostError::Negative(_))));
        assert!(matches!("-0.5".parse::<Cost>(), Err(CostError::Negative(_))));
        assert!(matches!("1/0".parse::<Cost>(), Err(CostError::ZeroDenominator(_))));
        assert!("abc".parse::<Cost>().is_err());
        assert!("1.".parse::<Cost>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for c in [Cost::ZERO, Cost::integer(7), Cost::ratio(1, 3).unwrap()] {
            assert_eq!(c.to_string().parse::<Cost>().unwrap(), c);
        }
        assert_eq!(Cost::ratio(3, 2).unwrap().to_string(), "3/2");
    }

    #[test]
    fn saturating_sub_clamps() {
        assert_eq!(Cost::integer(2).saturating_sub(Cost::integer(5)), Cost::ZERO);
        assert_eq!(Cost::integer(5).saturating_sub(Cost::integer(2)), Cost::integer(3));
    }
}
