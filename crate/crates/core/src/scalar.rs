//! Numeric scalars for the interval constructions.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Num;
use std::fmt::{Debug, Display};

/// Ordered field elements used for interval endpoints.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Display {
    /// Arithmetic is exact, so equality tests are meaningful.
    const EXACT: bool;

    fn from_ratio(p: i64, q: i64) -> Self;

    /// `p/q` for rationals, decimal for floats.
    fn fraction_string(&self) -> String;

    fn from_int(k: i64) -> Self {
        Self::from_ratio(k, 1)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }
    fn fraction_string(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    fn from_ratio(p: i64, q: i64) -> Self {
        (p as f64 / q as f64) as f32
    }
    fn fraction_string(&self) -> String {
        self.to_string()
    }
}

impl Scalar for Ratio<i64> {
    const EXACT: bool = true;
    fn from_ratio(p: i64, q: i64) -> Self {
        Ratio::new(p, q)
    }
    fn fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn from_ratio(p: i64, q: i64) -> Self {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }
    fn fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

/// Parses `p/q` or an integer into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            if q == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(p.trim().parse().ok()?, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions() {
        assert_eq!(BigRational::from_ratio(2, 6).fraction_string(), "1/3");
        assert_eq!(Ratio::<i64>::from_int(1).fraction_string(), "1/1");
        assert_eq!(parse_rational("4/12"), Some(BigRational::from_ratio(1, 3)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
