//! Exact arc weights with an absorbing infinity.

/// Arc weight. Finite values are plain unsigned integers, `INF` marks a
/// forbidden arc.
pub type Weight = u64;

/// Forbidden arc sentinel. Absorbing under [`wadd`].
pub const INF: Weight = u64::MAX;

/// Largest finite weight accepted from external input. Keeps sums of up to
/// 2^20 terms well below `INF`, so saturation can never masquerade as a
/// legitimate forbidden arc.
pub const MAX_FINITE: Weight = 1 << 40;

/// True for every weight except `INF`.
#[inline]
pub fn is_finite(w: Weight) -> bool {
    w != INF
}

/// Adds two weights, with `INF` absorbing.
#[inline]
pub fn wadd(a: Weight, b: Weight) -> Weight {
    if a == INF || b == INF {
        INF
    } else {
        a + b
    }
}

/// Sums a sequence of weights, with `INF` absorbing.
pub fn wsum<I: IntoIterator<Item = Weight>>(ws: I) -> Weight {
    ws.into_iter().fold(0, wadd)
}
