//! Scalar abstractions.
//!
//! The branching-process laws and the critical Gibbs weights are rational, so
//! the code that evaluates them only asks for field operations ([`Scalar`]).
//! Anything that needs `exp` or `tanh` asks for [`Real`] instead.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FloatConst, Num};

/// A field element usable for probabilities: `f32`, `f64` or an exact rational.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync + 'static {
    fn from_u64(n: u64) -> Self;

    fn half() -> Self {
        Self::one() / Self::from_u64(2)
    }

    /// `self^exp` by repeated squaring.
    fn powu(&self, exp: u64) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }
}

/// Floating point scalar with transcendental functions.
pub trait Real: Scalar + Float + FloatConst {
    fn from_f64(x: f64) -> Self;
}

impl Scalar for f32 {
    fn from_u64(n: u64) -> Self {
        n as f32
    }
}

impl Scalar for f64 {
    fn from_u64(n: u64) -> Self {
        n as f64
    }
}

impl Real for f32 {
    fn from_f64(x: f64) -> Self {
        x as f32
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
}

impl Scalar for Ratio<i64> {
    fn from_u64(n: u64) -> Self {
        Ratio::from_integer(i64::try_from(n).expect("integer fits in i64"))
    }
}

impl Scalar for Ratio<i128> {
    fn from_u64(n: u64) -> Self {
        Ratio::from_integer(i128::from(n))
    }
}

impl Scalar for BigRational {
    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}
