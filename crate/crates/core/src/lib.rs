//! Exact invariants for Chern-slope geography of branched-cover surfaces.
//!
//! * [`numtheory`]: Hirzebruch-Jung expansions, Dedekind sums by two routes,
//!   and the correction `c(q, p) = 12 s(q, p) + l(q, p)`.
//! * [`ru_family`]: point counts, log Chern numbers, `c2`, partial `c1^2`,
//!   the limit slope `lambda` and the polarization `Gamma_p` of the family `X_p`.
//! * [`bounds`]: brute-force verification of the lower-bound inequalities.
//! * [`product`]: invariants of complete intersections in `X x Y`.
//! * [`slope_search`]: certificates for target slopes in `(1, 3)`.
//! * [`cli`]: the `slopeforge` command-line front end.
//!
//! The formula modules are generic over [`Scalar`]; the aliases below fix the
//! exact instantiation used throughout.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod exact;
pub mod numtheory;
pub mod poly;
pub mod product;
pub mod ru_family;
pub mod scalar;
pub mod slope_search;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Arbitrary-precision integer.
pub type Integer = num_bigint::BigInt;
/// Arbitrary-precision rational; the default scalar.
pub type Rational = num_rational::BigRational;

pub type ExactSurface = product::PolarizedSurface<Rational>;
pub type FloatSurface = product::PolarizedSurface<f64>;
pub type ExactProduct = product::ProductInvariants<Rational>;
pub type FloatProduct = product::ProductInvariants<f64>;
pub type ExactPolynomial = poly::Polynomial<Rational>;
