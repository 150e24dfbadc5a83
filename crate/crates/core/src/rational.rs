//! Text form of exact values: always `p/q`, even for integers (`1/1`, `0/1`).

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::ExactRational;

pub fn format_rational(r: &ExactRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<ExactRational> {
    let bad = || Error::domain(format!("not a rational \"p/q\": {s:?}"));
    let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
    let p: BigInt = p.trim().parse().map_err(|_| bad())?;
    let q: BigInt = q.trim().parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(ExactRational::new(p, q))
}
