//! Choosing family parameters whose limit slope hits a target `r` in `(1, 3)`.
//!
//! Floating point appears only while locating the root of `lambda(x) = r` and
//! proposing candidate ratios. Every number placed in a certificate is
//! recomputed exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int, serde_rational, to_f64};
use crate::ru_family::{chern_x, slope_limit, RUParams};
use crate::Rational;

pub const TOOL_VERSION: &str = concat!("slopeforge ", env!("CARGO_PKG_VERSION"));

/// Smallest admissible `d`: `2d >= 3` forces `d = 2`.
pub const DEFAULT_D: u64 = 2;

fn lambda(x: &Rational) -> Rational {
    slope_limit(x).expect("x is non-negative")
}

fn check_interior(r: &Rational) -> Result<()> {
    if *r < int(1) || *r > int(3) {
        return Err(Error::domain(format!("target slope {r} lies outside [1, 3]")));
    }
    if *r == int(1) {
        return Err(Error::Boundary {
            reason: "r = 1 is only reached in the limit x -> 0".into(),
            advice: "take alpha = 1 and let beta grow".into(),
        });
    }
    if *r == int(3) {
        return Err(Error::Boundary {
            reason: "r = 3 is only reached in the limit x -> infinity".into(),
            advice: "take beta = 1 and let alpha grow".into(),
        });
    }
    Ok(())
}

/// The unique `x > 0` with `lambda(x) = r`, for `1 < r < 3`.
///
/// With `y = x^2` the equation is `(27 - 9r) y^2 + 48 (1 - r) y + 8 (1 - r) = 0`.
pub fn solve_lambda(r: &Rational) -> Result<f64> {
    check_interior(r)?;
    let lead = int(27) - int(9) * r;
    let constant = int(8) * (int(1) - r);
    // Leading coefficient positive and constant negative: the roots have
    // opposite signs, so exactly one is positive.
    if !(lead.is_positive() && constant.is_negative()) {
        return Err(Error::Verification(format!(
            "quadratic in x^2 has no unique positive root at r={r}"
        )));
    }
    let rf = to_f64(r);
    let a = 27.0 - 9.0 * rf;
    let b = 48.0 * (1.0 - rf);
    let c = 8.0 * (1.0 - rf);
    // -b > 0, so the positive root is a sum of positives.
    let y = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
    Ok(y.sqrt())
}

/// Continued-fraction convergents `h/k` of a non-negative rational.
fn convergents(x: &Rational) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::new();
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    while !den.is_zero() {
        let (a, rem) = num.div_mod_floor(&den);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        out.push((h.clone(), k.clone()));
        num = std::mem::replace(&mut den, rem);
    }
    out
}

/// Simplest rational (least denominator) in the closed interval `[lo, hi]`,
/// `0 <= lo <= hi`.
fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    let fl = lo.floor();
    if fl == *lo {
        return fl;
    }
    if &fl + int(1) <= *hi {
        return fl + int(1);
    }
    // Same integer part: recurse on the reciprocals of the fractional parts.
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

fn to_pair(x: &Rational) -> Result<(u64, u64)> {
    match (x.numer().to_u64(), x.denom().to_u64()) {
        (Some(a), Some(b)) if a > 0 => Ok((a, b)),
        _ => Err(Error::domain(format!("ratio {x} does not fit positive 64-bit parameters"))),
    }
}

/// First convergent `alpha/beta` of `x_star` (smallest denominator) with
/// `|lambda(alpha/beta) - target| <= tol`, falling back to exact bisection and
/// the simplest rational in the resulting interval when the float's
/// convergents run out.
fn approximate_for_target(x_star: f64, target: &Rational, tol: &Rational) -> Result<(u64, u64)> {
    if !x_star.is_finite() || x_star <= 0.0 {
        return Err(Error::domain(format!("x* must be positive and finite, got {x_star}")));
    }
    if !tol.is_positive() {
        return Err(Error::domain("tolerance must be positive"));
    }
    let x = Rational::from_float(x_star).expect("finite float");
    for (h, k) in convergents(&x) {
        if h.is_zero() {
            continue;
        }
        let q = Rational::new(h, k);
        if (lambda(&q) - target).abs() <= *tol {
            return to_pair(&q);
        }
    }
    to_pair(&bisect_for_target(target, tol))
}

fn bisect_for_target(target: &Rational, tol: &Rational) -> Rational {
    let (low_ok, high_ok) = (target - tol, target + tol);
    let mut lo = int(0);
    let mut hi = int(1);
    while lambda(&hi) < *target {
        if lambda(&hi) >= low_ok {
            return hi;
        }
        lo = hi.clone();
        hi *= int(2);
    }
    // lambda(lo) < target <= lambda(hi); shrink until both ends are in band.
    while lambda(&lo) < low_ok || lambda(&hi) > high_ok {
        let mid = (&lo + &hi) / int(2);
        if lambda(&mid) < *target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    simplest_between(&lo, &hi)
}

/// Positive coprime `(alpha, beta)` with `|lambda(alpha/beta) - lambda(x*)| <= tol`,
/// where `lambda(x*)` is evaluated exactly at the binary value of `x_star`.
pub fn approximate_ratio(x_star: f64, tol: &Rational) -> Result<(u64, u64)> {
    let x = Rational::from_float(x_star)
        .filter(|x| x.is_positive())
        .ok_or_else(|| Error::domain(format!("x* must be positive and finite, got {x_star}")))?;
    approximate_for_target(x_star, &lambda(&x), tol)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeCertificate {
    #[serde(with = "serde_rational")]
    pub target_r: Rational,
    pub x_star: f64,
    pub alpha: u64,
    pub beta: u64,
    #[serde(with = "serde_rational")]
    pub asymptotic_slope: Rational,
    #[serde(with = "serde_rational")]
    pub asymptotic_error: Rational,
    pub witness_p: u64,
    /// `c1sq_partial / c2_exact` of `X_p` at `witness_p`.
    #[serde(with = "serde_rational")]
    pub witness_slope: Rational,
    /// Set when the witness slope omits the `(1/p) sum A_j^2` term.
    pub residual_note: bool,
    pub tool_version: String,
}

/// Builds a certificate for target `r`; `d` defaults to [`DEFAULT_D`].
pub fn seek_slope(r: &Rational, tol: &Rational, witness_p: u64, d: Option<u64>) -> Result<SlopeCertificate> {
    if !tol.is_positive() {
        return Err(Error::domain("tolerance must be positive"));
    }
    let x_star = solve_lambda(r)?;
    let (alpha, beta) = approximate_for_target(x_star, r, tol)?;
    let params = RUParams::new(witness_p, alpha, beta, d.unwrap_or(DEFAULT_D))?;

    let asymptotic_slope = lambda(&Rational::new(alpha.into(), beta.into()));
    let asymptotic_error = (&asymptotic_slope - r).abs();
    if asymptotic_error > *tol || asymptotic_slope < int(1) || asymptotic_slope > int(3) {
        return Err(Error::Verification(format!(
            "certificate for r={r} failed exact re-check: lambda({alpha}/{beta}) = {asymptotic_slope}"
        )));
    }
    let witness = chern_x(&params, None);
    Ok(SlopeCertificate {
        target_r: r.clone(),
        x_star,
        alpha,
        beta,
        asymptotic_slope,
        asymptotic_error,
        witness_p,
        witness_slope: witness.slope_partial(),
        residual_note: witness.residual_omitted,
        tool_version: TOOL_VERSION.to_string(),
    })
}

/// How `d` is chosen for each sampled prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DRule {
    /// `d = 2`.
    #[default]
    Smallest,
    Fixed(u64),
    /// `d = floor(p / 2)`.
    Largest,
}

impl DRule {
    pub fn pick(&self, p: u64) -> u64 {
        match *self {
            DRule::Smallest => DEFAULT_D,
            DRule::Fixed(d) => d,
            DRule::Largest => p / 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityRow {
    pub alpha: u64,
    pub beta: u64,
    pub p: u64,
    pub d: u64,
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    #[serde(with = "serde_rational")]
    pub witness_slope: Rational,
    #[serde(with = "serde_rational")]
    pub abs_difference: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedSample {
    pub alpha: u64,
    pub beta: u64,
    pub p: u64,
    pub d: u64,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityTable {
    pub rows: Vec<DensityRow>,
    pub skipped: Vec<SkippedSample>,
}

/// Limit and finite-`p` slopes over a grid of ratios `alpha/beta` and a list
/// of primes, ordered by `(alpha, beta, p)`.
pub fn density_sample(grid: &[(u64, u64)], primes: &[u64], d_rule: DRule) -> Result<DensityTable> {
    if grid.is_empty() {
        return Err(Error::domain("ratio grid is empty"));
    }
    if primes.is_empty() {
        return Err(Error::domain("prime list is empty"));
    }
    if grid.iter().any(|&(a, b)| a == 0 || b == 0) {
        return Err(Error::domain("grid ratios need positive alpha and beta"));
    }
    let mut grid = grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();

    let jobs: Vec<(u64, u64, u64)> = grid
        .iter()
        .flat_map(|&(a, b)| primes.iter().map(move |&p| (a, b, p)))
        .collect();
    let results: Vec<std::result::Result<DensityRow, SkippedSample>> = jobs
        .par_iter()
        .map(|&(alpha, beta, p)| {
            let d = d_rule.pick(p);
            let params = RUParams::new(p, alpha, beta, d).map_err(|e| SkippedSample {
                alpha,
                beta,
                p,
                d,
                reason: e.to_string(),
            })?;
            let lam = lambda(&Rational::new(alpha.into(), beta.into()));
            let witness_slope = chern_x(&params, None).slope_partial();
            Ok(DensityRow {
                alpha,
                beta,
                p,
                d,
                abs_difference: (&witness_slope - &lam).abs(),
                lambda: lam,
                witness_slope,
            })
        })
        .collect();

    let mut table = DensityTable::default();
    for r in results {
        match r {
            Ok(row) => table.rows.push(row),
            Err(skip) => {
                log::warn!(
                    "skipping alpha={} beta={} p={} d={}: {}",
                    skip.alpha, skip.beta, skip.p, skip.d, skip.reason
                );
                table.skipped.push(skip);
            }
        }
    }
    Ok(table)
}
