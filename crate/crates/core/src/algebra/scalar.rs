//! Coefficient field abstraction.
//!
//! Every exact structure in [`crate::algebra`] is generic over a [`Scalar`],
//! an exact field element. The crate root fixes the concrete choice
//! [`crate::Q`] (arbitrary-precision rationals).

use std::fmt;
use std::hash::Hash;

use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// An exact field element usable as a polynomial coefficient.
///
/// Floating point types do not qualify (they are neither `Ord` nor `Hash`),
/// which keeps inexact arithmetic out of the symbolic layer.
pub trait Scalar:
    Num + Signed + Clone + Ord + Hash + fmt::Debug + fmt::Display + FromPrimitive + ToPrimitive
    + Send + Sync + 'static
{
    fn int(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("integer fits the scalar field")
    }

    /// Lossy conversion used only by the numeric layer.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Num
        + Signed
        + Clone
        + Ord
        + Hash
        + fmt::Debug
        + fmt::Display
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// Multiplicative inverse; panics on zero like integer division does.
pub(crate) fn inv<C: Scalar>(c: &C) -> C {
    assert!(!c.is_zero(), "inverse of zero scalar");
    C::one() / c.clone()
}
