//! Scalar abstraction shared by the formula modules.
//!
//! The closed-form invariants only need field operations and ordering, so the
//! product formulas, the slope-limit function and polynomial interpolation are
//! written once over [`Scalar`] and instantiated at [`crate::Rational`] for
//! exact work and at `f64` for quick numerics.

use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, Signed};

pub trait Scalar: Num + Signed + Clone + PartialOrd + FromPrimitive + Debug {
    /// The integer `n` embedded in the scalar type.
    fn int(n: i64) -> Self {
        Self::from_i64(n).expect("every scalar type embeds i64")
    }

    /// The exact quotient `num / den`.
    fn ratio(num: i64, den: i64) -> Self {
        Self::int(num) / Self::int(den)
    }
}

impl<T> Scalar for T where T: Num + Signed + Clone + PartialOrd + FromPrimitive + Debug {}
