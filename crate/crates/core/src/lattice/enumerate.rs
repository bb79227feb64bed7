//! Exhaustive enumeration of small triangulations with their Gibbs weights.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{Forest, Triangulation};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const ENUM_MAX_LEVELS: usize = 3;
pub const ENUM_MAX_WIDTH: usize = 5;

/// Number of ways to fill a strip with `lower` vertices below and `upper`
/// above: the weak compositions of `upper` into `lower` parts.
pub fn strip_count(lower: usize, upper: usize) -> u64 {
    binomial((lower + upper - 1) as u64, (lower - 1) as u64)
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// All forests of `levels` levels whose level sizes are at most `width_cap`.
pub fn enumerate_forests(levels: usize, width_cap: usize) -> Result<Vec<Forest>> {
    if levels > ENUM_MAX_LEVELS {
        return Err(Error::GuardExceeded { what: "enumerated levels", limit: ENUM_MAX_LEVELS, got: levels });
    }
    if width_cap > ENUM_MAX_WIDTH {
        return Err(Error::GuardExceeded { what: "enumerated width", limit: ENUM_MAX_WIDTH, got: width_cap });
    }
    if width_cap == 0 {
        return Err(Error::InvalidArgument("width cap must be positive".into()));
    }
    let mut out = Vec::new();
    let mut stack = Vec::new();
    extend(levels, width_cap, 1, &mut stack, &mut out);
    Ok(out)
}

fn extend(levels: usize, cap: usize, width: usize, stack: &mut Vec<Vec<usize>>, out: &mut Vec<Forest>) {
    if stack.len() == levels {
        out.push(Forest::new(stack.clone()).expect("enumerated forests are valid"));
        return;
    }
    for next in 1..=cap {
        for comp in compositions(next, width) {
            stack.push(comp);
            extend(levels, cap, next, stack, out);
            stack.pop();
        }
    }
}

/// Weak compositions of `total` into `parts` parts, in lexicographic order.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All triangulations of `levels` levels with widths at most `width_cap`,
/// each with the unnormalized weight `exp(-mu F(T))`. Requires `mu >= ln 2`.
pub fn enumerate_triangulations<T: Real>(levels: usize, width_cap: usize, mu: T) -> Result<Vec<(Triangulation, T)>> {
    if mu.partial_cmp(&T::LN_2()).is_none_or(|o| o.is_lt()) {
        return Err(Error::InvalidArgument(format!("mu = {mu:?} is below ln 2")));
    }
    Ok(enumerate_forests(levels, width_cap)?
        .iter()
        .map(|f| {
            let t = Triangulation::from_forest(f);
            let w = (-mu * T::from_u64(t.triangle_count() as u64)).exp();
            (t, w)
        })
        .collect())
}

/// Exact weights `2^{-F(T)}` of the critical measure.
pub fn critical_weights(triangulations: &[Triangulation]) -> Vec<BigRational> {
    triangulations
        .iter()
        .map(|t| {
            let den = BigInt::one() << t.triangle_count();
            BigRational::new(BigInt::one(), den)
        })
        .collect()
}
