use crate::Scalar;

/// Smallest denominator used when the time term would make it non-positive.
pub const ARR_DENOMINATOR_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrScore<T> {
    pub value: T,
    /// The denominator was non-positive and got clamped.
    pub clamped: bool,
}

/// `(perf_p / perf_q) / (1 + acc_d * ln(time_p / time_q))`. All inputs are
/// expected to be positive.
pub fn arr_score<T: Scalar>(perf_p: T, perf_q: T, time_p: T, time_q: T, acc_d: T) -> ArrScore<T> {
    let mut denom = T::one() + acc_d * (time_p / time_q).ln();
    let clamped = denom.is_nan() || denom <= T::zero();
    if clamped {
        denom = T::lit(ARR_DENOMINATOR_FLOOR);
    }
    ArrScore { value: perf_p / perf_q / denom, clamped }
}
