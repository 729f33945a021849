use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type the whole crate is generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + FromStr
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts a literal. Every `f64` is representable (possibly rounded) in
    /// both implementors, so this never fails.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable")
    }

    fn from_count(count: usize) -> Self {
        Self::from_usize(count).expect("count representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `floor(fraction * n)`, robust to representation error such as `0.29 * 100`.
pub(crate) fn floor_count<T: Scalar>(fraction: T, n: usize) -> usize {
    let raw = fraction.to_f64_lossy() * n as f64;
    let k = (raw + 1e-9 * raw.abs().max(1.0)).floor();
    if k <= 0.0 {
        0
    } else {
        (k as usize).min(n)
    }
}
