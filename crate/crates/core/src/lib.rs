//! Exact-arithmetic kernels and desk-scale verifiers for inhomogeneous
//! Diophantine approximation: approximation sets with exact rational
//! interval unions, certified real constants, irrational-rotation
//! discrepancy, divisor-sum moment bounds, and Chung-Erdos lower bounds.

pub mod approxfun;
pub mod arith;
pub mod bounds;
pub mod experiments;
pub mod fx;
pub mod intervals;
pub mod realnum;
pub mod rotation;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A comparison could not be decided within the precision cap.
    #[error("indeterminate at precision: {0}")]
    IndeterminateAtPrecision(String),
    /// A requested scan exceeds the configured sieve or budget limits.
    #[error("range exceeded: {0}")]
    RangeExceeded(String),
    /// All event measures vanish; the Chung-Erdos ratio is undefined.
    #[error("all event measures are zero")]
    ZeroMass,
    /// An approximation function required to be non-increasing is not.
    #[error("approximation function increases at q={0}")]
    NotMonotone(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Convenience: exact rational from an integer pair.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Sum a list of exact rationals with balanced-tree reduction, which keeps
/// intermediate denominators near the subtree lcm instead of the full lcm.
pub fn sum_rationals(mut v: Vec<BigRational>) -> BigRational {
    use num_traits::Zero;
    if v.is_empty() {
        return BigRational::zero();
    }
    while v.len() > 1 {
        let mut next = Vec::with_capacity(v.len() / 2 + 1);
        let mut it = v.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a + b),
                None => next.push(a),
            }
        }
        v = next;
    }
    v.pop().unwrap()
}
