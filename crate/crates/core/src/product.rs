//! Invariants of the complete-intersection surface `S` cut out of `X x Y` by
//! two general sections of `p^*(Gamma) (x) q^*(B)`.
//!
//! Inputs are bare numbers. Whether they come from real surfaces with nef
//! canonical class and the right bundles is the caller's business; see
//! [`sanity_warnings`] for the few things that can be checked numerically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ru_family::{ChernOfX, GammaInvariants};
use crate::scalar::Scalar;
use crate::Rational;

/// Chern data of a surface together with one line bundle on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizedSurface<T> {
    pub c1sq: T,
    pub c2: T,
    pub chi: T,
    /// Self-intersection of the bundle.
    pub bundle_sq: T,
    /// Intersection of the bundle with the canonical class.
    pub bundle_dot_k: T,
}

impl<T: Scalar> PolarizedSurface<T> {
    pub fn new(c1sq: T, c2: T, chi: T, bundle_sq: T, bundle_dot_k: T) -> Self {
        Self { c1sq, c2, chi, bundle_sq, bundle_dot_k }
    }

    /// Noether's formula `c1^2 + c2 = 12 chi`.
    pub fn satisfies_noether(&self) -> bool {
        self.c1sq.clone() + self.c2.clone() == T::int(12) * self.chi.clone()
    }

    pub fn slope(&self) -> Option<T> {
        (!self.c2.is_zero()).then(|| self.c1sq.clone() / self.c2.clone())
    }

    /// Parses `c1sq,c2,chi,bundle_sq,bundle_dot_k`.
    pub fn from_slice(values: &[T]) -> Result<Self> {
        match values {
            [c1sq, c2, chi, sq, dk] => {
                Ok(Self::new(c1sq.clone(), c2.clone(), chi.clone(), sq.clone(), dk.clone()))
            }
            _ => Err(Error::domain(format!(
                "expected 5 invariants (c1sq,c2,chi,bundle_sq,bundle_dot_k), got {}",
                values.len()
            ))),
        }
    }
}

impl PolarizedSurface<Rational> {
    /// `X_p` polarized by `Gamma_p`. Uses the partial `c1^2` unless a residual
    /// was supplied, and takes `chi` from Noether.
    pub fn from_family(x: &ChernOfX, gamma: &GammaInvariants) -> Self {
        let c1sq = x.c1sq_best().clone();
        let c2 = Rational::from_integer(x.c2_exact.clone());
        let chi = (&c1sq + &c2) / Rational::from_integer(12.into());
        Self::new(
            c1sq,
            c2,
            chi,
            Rational::from_integer(gamma.gamma_sq.clone()),
            Rational::from_integer(gamma.gamma_dot_k.clone()),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductInvariants<T> {
    pub c1sq_s: T,
    pub c2_s: T,
    pub chi_s: T,
    /// `c(Gamma, B)`.
    pub coupling: T,
    /// Degree of `S -> X`, equal to `B^2`.
    pub deg_to_x: T,
    /// Degree of `S -> Y`, equal to `Gamma^2`.
    pub deg_to_y: T,
}

impl<T: Scalar> ProductInvariants<T> {
    pub fn slope(&self) -> Option<T> {
        (!self.c2_s.is_zero()).then(|| self.c1sq_s.clone() / self.c2_s.clone())
    }
}

/// `c(Gamma, B) = 7/2 G^2 B^2 + 3/2 (G.K_X) B^2 + 3/2 (B.K_Y) G^2 + 1/2 (G.K_X)(B.K_Y)`.
pub fn coupling<T: Scalar>(xs: &PolarizedSurface<T>, ys: &PolarizedSurface<T>) -> T {
    let (g2, gk) = (xs.bundle_sq.clone(), xs.bundle_dot_k.clone());
    let (b2, bk) = (ys.bundle_sq.clone(), ys.bundle_dot_k.clone());
    T::ratio(7, 2) * g2.clone() * b2.clone()
        + T::ratio(3, 2) * gk.clone() * b2
        + T::ratio(3, 2) * bk.clone() * g2
        + T::ratio(1, 2) * gk * bk
}

pub fn product_invariants<T: Scalar>(
    xs: &PolarizedSurface<T>,
    ys: &PolarizedSurface<T>,
) -> ProductInvariants<T> {
    let c = coupling(xs, ys);
    let g2 = xs.bundle_sq.clone();
    let b2 = ys.bundle_sq.clone();
    let g2b2 = g2.clone() * b2.clone();
    let c1sq_s = xs.c1sq.clone() * b2.clone() + ys.c1sq.clone() * g2.clone()
        + T::int(8) * c.clone()
        - T::int(4) * g2b2.clone();
    let c2_s = xs.c2.clone() * b2.clone() + ys.c2.clone() * g2.clone()
        + T::int(4) * c.clone()
        + T::int(4) * g2b2;
    let chi_s = xs.chi.clone() * b2.clone() + ys.chi.clone() * g2.clone() + c.clone();
    ProductInvariants { c1sq_s, c2_s, chi_s, coupling: c, deg_to_x: b2, deg_to_y: g2 }
}

/// `K_S^2` expanded from `K_S ~ p^*(K_X + 2 Gamma) + q^*(K_Y + 2B)`, taking the
/// inputs' `c1sq` as `K^2`. Agrees with `c1sq_s` of [`product_invariants`].
pub fn canonical_square<T: Scalar>(xs: &PolarizedSurface<T>, ys: &PolarizedSurface<T>) -> T {
    let (g2, gk) = (xs.bundle_sq.clone(), xs.bundle_dot_k.clone());
    let (b2, bk) = (ys.bundle_sq.clone(), ys.bundle_dot_k.clone());
    xs.c1sq.clone() * b2.clone()
        + ys.c1sq.clone() * g2.clone()
        + T::int(24) * g2.clone() * b2.clone()
        + T::int(12) * (gk.clone() * b2 + bk.clone() * g2)
        + T::int(4) * gk * bk
}

/// Numeric red flags: a non-positive bundle square, or a factor violating
/// Noether. An empty list does not certify geometric validity.
pub fn sanity_warnings<T: Scalar>(xs: &PolarizedSurface<T>, ys: &PolarizedSurface<T>) -> Vec<String> {
    let mut out = Vec::new();
    for (name, s) in [("X", xs), ("Y", ys)] {
        if s.bundle_sq <= T::zero() {
            out.push(format!("{name}: bundle square {:?} is not positive", s.bundle_sq));
        }
        if !s.satisfies_noether() {
            out.push(format!("{name}: c1sq + c2 != 12 chi"));
        }
    }
    out
}

/// Slopes `c1^2(S_p) / c2(S_p)` along a family of `(X_p, Gamma_p)` paired with a
/// fixed `(Y, B)`.
pub fn product_slope_sequence(
    family: &[(ChernOfX, GammaInvariants)],
    ys: &PolarizedSurface<Rational>,
) -> Result<Vec<Rational>> {
    if family.is_empty() {
        return Err(Error::domain("family is empty"));
    }
    family
        .iter()
        .map(|(x, g)| {
            let xs = PolarizedSurface::from_family(x, g);
            product_invariants(&xs, ys).slope().ok_or_else(|| {
                Error::domain(format!("c2(S) vanishes at p={}", x.params.p))
            })
        })
        .collect()
}
