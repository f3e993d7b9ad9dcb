use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, Signed};

/// Exact signed coefficient ring used throughout the crate.
///
/// Implemented for every type that behaves like a signed integer or an exact
/// rational: `BigInt` (the default), `i64`/`i128` for fast small cases, and
/// `BigRational`. Fixed-width types overflow past their range, so
/// anything beyond desk-scale `n` should stay on `BigInt`.
pub trait Scalar:
    Num + Signed + FromPrimitive + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Num + Signed + FromPrimitive + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
}

/// Lifts a machine-sized count into the scalar ring.
pub(crate) fn lift<T: Scalar>(x: usize) -> T {
    T::from_usize(x).expect("count does not fit the scalar type")
}

pub(crate) fn factorial<T: Scalar>(n: usize) -> T {
    (2..=n).fold(T::one(), |acc, k| acc * lift::<T>(k))
}
