use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in lowest terms with positive denominator.
pub type Scalar = BigRational;

pub fn scalar_is_integer(x: &Scalar) -> bool {
    x.denom().is_one()
}

/// Parses `"a"` or `"a/b"`, rejecting zero denominators.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let num: BigInt = num
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {num:?}")))?;
    let den: BigInt = den
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {den:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(num, den))
}

pub(crate) fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

#[cfg(test)]
pub(crate) fn ratio(a: i64, b: i64) -> Scalar {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}
