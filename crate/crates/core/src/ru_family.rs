//! Invariants of the branched-cover family `X_p` built from the parameters
//! `(p, alpha, beta, d)`.
//!
//! The branch divisor uses multiplicities `1` on `E_0, E_1` and on the first
//! `d` lines, `p - 1` on `E_zeta, E_inf` and on the remaining `d` lines, so
//! only the singularity types `1/p(1, p-1)` and `1/p(1, 1)` occur at the
//! two-points of the arrangement.
//!
//! `c1^2(X_p)` also contains `(1/p) sum_j A_j^2`, which is not determined by
//! the closed forms implemented here. It can be supplied as a residual; when
//! absent, every `c1^2` output is the partial value and is flagged as such.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{serde_bigint, serde_opt_bigint, serde_opt_rational, serde_rational};
use crate::numtheory::is_prime;
use crate::poly::{interpolate, Polynomial};
use crate::scalar::Scalar;
use crate::Rational;

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RUParams {
    pub p: u64,
    pub alpha: u64,
    pub beta: u64,
    pub d: u64,
    /// Set when the parameters were not validated against the geometric
    /// constraints; the formulas are then evaluated as plain polynomials.
    #[serde(default)]
    pub formal: bool,
}

impl RUParams {
    /// Validated parameters: `p >= 5` prime, `alpha, beta >= 1`, `3 <= 2d <= p`.
    pub fn new(p: u64, alpha: u64, beta: u64, d: u64) -> Result<Self> {
        if p < 5 || !is_prime(p) {
            return Err(Error::domain(format!("p={p} must be a prime >= 5")));
        }
        if alpha == 0 || beta == 0 {
            return Err(Error::domain("alpha and beta must be positive"));
        }
        if 2 * d < 3 || 2 * d > p {
            return Err(Error::domain(format!("need 3 <= 2d <= p, got d={d}, p={p}")));
        }
        Ok(Self { p, alpha, beta, d, formal: false })
    }

    /// Unvalidated parameters for evaluating the formulas as polynomials,
    /// e.g. at non-prime `p`. Only positivity is enforced.
    pub fn formal(p: u64, alpha: u64, beta: u64, d: u64) -> Result<Self> {
        if p == 0 || alpha == 0 || beta == 0 || d == 0 {
            return Err(Error::domain("formal parameters must be positive"));
        }
        Ok(Self { p, alpha, beta, d, formal: true })
    }

    /// `n = 3 alpha p`.
    pub fn n(&self) -> BigInt {
        big(3 * self.alpha) * big(self.p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPointCounts {
    #[serde(with = "serde_bigint")]
    pub t2: BigInt,
    /// Two-points of type `1/p(1, p-1)`.
    #[serde(with = "serde_bigint")]
    pub t21: BigInt,
    /// Two-points of type `1/p(1, 1)`.
    #[serde(with = "serde_bigint")]
    pub t22: BigInt,
}

pub fn two_point_counts(params: &RUParams) -> TwoPointCounts {
    let (p, a, b, d) = (big(params.p), big(params.alpha), big(params.beta), big(params.d));
    let p2 = &p * &p;
    let p4 = &p2 * &p2;
    let (a2, b2) = (&a * &a, &b * &b);
    let b4 = &b2 * &b2;
    let d2 = &d * &d;

    let t2 = 108 * &a2 * &b2 * &p4 + 18 * &b4 * &p4 + 72 * &d * &a2 * &p2 - 25 * &d
        + 24 * &d * &b2 * &p2
        + 2 * &d2;
    let t21 = 6 * &b4 * &p4 + 36 * &a2 * &b2 * &p4 + 36 * &d * &a2 * &p2 - 13 * &d
        + 12 * &d * &b2 * &p2
        + &d2;
    let t22 = 12 * &b4 * &p4 + 72 * &a2 * &b2 * &p4 + 36 * &d * &a2 * &p2 - 12 * &d
        + 12 * &d * &b2 * &p2
        + &d2;
    TwoPointCounts { t2, t21, t22 }
}

/// Log Chern numbers `(c1bar^2, c2bar)` of the branch arrangement.
pub fn log_chern(params: &RUParams) -> (BigInt, BigInt) {
    let t2 = two_point_counts(params).t2;
    let n = params.n();
    let n4 = &n * &n * &n * &n;
    let d = big(params.d);
    let c1sq = &n4 + 2 * &t2 - 10 * &d - 48;
    // 3 | n, so n^4 / 3 is exact.
    let c2 = n4 / 3 + &t2 - 4 * &d - 12;
    (c1sq, c2)
}

/// `sum_j (g(A_j) - 1)` over the branch components: elliptic members add 0,
/// the 12 rational curves of `N` and the `2d` lines add -1 each.
pub fn genus_sum(params: &RUParams) -> BigInt {
    -big(12 + 2 * params.d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernOfX {
    pub params: RUParams,
    pub counts: TwoPointCounts,
    #[serde(with = "serde_bigint")]
    pub log_c1sq: BigInt,
    #[serde(with = "serde_bigint")]
    pub log_c2: BigInt,
    #[serde(with = "serde_bigint")]
    pub genus_sum: BigInt,
    #[serde(with = "serde_bigint")]
    pub c2_exact: BigInt,
    /// `c1^2` without the `(1/p) sum A_j^2` term.
    #[serde(with = "serde_rational")]
    pub c1sq_partial: Rational,
    #[serde(with = "serde_opt_bigint")]
    pub residual_asq: Option<BigInt>,
    /// Full `c1^2`, present only when the residual was supplied.
    #[serde(with = "serde_opt_rational")]
    pub c1sq: Option<Rational>,
    pub residual_omitted: bool,
}

impl ChernOfX {
    /// The best available `c1^2`: full when the residual is known, else partial.
    pub fn c1sq_best(&self) -> &Rational {
        self.c1sq.as_ref().unwrap_or(&self.c1sq_partial)
    }

    /// `c1sq_partial / c2_exact`.
    pub fn slope_partial(&self) -> Rational {
        &self.c1sq_partial / Rational::from_integer(self.c2_exact.clone())
    }

    pub fn slope_best(&self) -> Rational {
        self.c1sq_best() / Rational::from_integer(self.c2_exact.clone())
    }
}

pub fn chern_x(params: &RUParams, residual_asq: Option<BigInt>) -> ChernOfX {
    let counts = two_point_counts(params);
    let (log_c1sq, log_c2) = log_chern(params);
    let genus_sum = genus_sum(params);
    let p = big(params.p);
    let ramification = &counts.t2 + 2 * &genus_sum;

    // sum l(q_ij, p) A_i.A_j with l(p-1, p) = p - 1 and l(1, p) = 1.
    let length_correction = (&p - 1) * &counts.t21 + &counts.t22;
    let c2_exact = &p * &log_c2 - &ramification + length_correction;

    // sum c(q_ij, p) A_i.A_j with c(p-1, p) = (2p-2)/p and c(1, p) = (p^2-2p+2)/p.
    let c_correction = Rational::new(
        (2 * &p - 2) * &counts.t21 + (&p * &p - 2 * &p + 2) * &counts.t22,
        p.clone(),
    );
    let c1sq_partial =
        Rational::from_integer(&p * &log_c1sq - 2 * &ramification) - c_correction;

    let c1sq = residual_asq
        .as_ref()
        .map(|r| &c1sq_partial + Rational::new(r.clone(), p.clone()));
    ChernOfX {
        params: *params,
        counts,
        log_c1sq,
        log_c2,
        genus_sum,
        c2_exact,
        c1sq_partial,
        residual_omitted: residual_asq.is_none(),
        residual_asq,
        c1sq,
    }
}

/// Evaluates [`chern_x`] over many parameter sets in parallel; the output
/// order matches the input order.
pub fn chern_sweep(params: &[RUParams]) -> Vec<ChernOfX> {
    params.par_iter().map(|p| chern_x(p, None)).collect()
}

/// Coefficients of `p^5` in `(c1^2(X_p), c2(X_p))`.
pub fn leading_coefficients(alpha: u64, beta: u64) -> Result<(BigInt, BigInt)> {
    if alpha == 0 || beta == 0 {
        return Err(Error::domain("alpha and beta must be positive"));
    }
    let (a2, b2) = (big(alpha * alpha), big(beta * beta));
    let mixed = 144 * &a2 * &b2;
    let b4 = 24 * &b2 * &b2;
    let a4 = &a2 * &a2;
    Ok((81 * &a4 + &mixed + &b4, 27 * a4 + mixed + b4))
}

/// Limit slope `lambda(x) = (27x^4 + 48x^2 + 8) / (9x^4 + 48x^2 + 8)` for
/// `x = alpha / beta >= 0`. Exact when `T` is exact.
pub fn slope_limit<T: Scalar>(x: &T) -> Result<T> {
    if x.is_negative() {
        return Err(Error::domain(format!("lambda needs x >= 0, got {x:?}")));
    }
    let y = x.clone() * x.clone();
    let y2 = y.clone() * y.clone();
    let common = T::int(48) * y + T::int(8);
    Ok((T::int(27) * y2.clone() + common.clone()) / (T::int(9) * y2 + common))
}

/// `lim_{x -> inf} lambda(x)`.
pub fn slope_limit_at_infinity<T: Scalar>() -> T {
    T::int(3)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaInvariants {
    /// `Gamma_p^2`.
    #[serde(with = "serde_bigint")]
    pub gamma_sq: BigInt,
    /// `Gamma_p . K_{X_p}`.
    #[serde(with = "serde_bigint")]
    pub gamma_dot_k: BigInt,
}

/// Invariants of the pull-back of a general line, which meets the branch
/// divisor in `2d + 36 alpha^2 p^2 - 12 + 12 beta^2 p^2` points.
pub fn gamma_invariants(params: &RUParams) -> GammaInvariants {
    let (p, a, b, d) = (big(params.p), big(params.alpha), big(params.beta), big(params.d));
    let p2 = &p * &p;
    let branch_points = 2 * &d + 36 * &a * &a * &p2 - 12 + 12 * &b * &b * &p2;
    GammaInvariants {
        gamma_sq: p.clone(),
        gamma_dot_k: -3 * &p + (&p - 1) * branch_points,
    }
}

/// Exact interpolation of the family's Chern numbers as polynomials in `p`.
#[derive(Clone, Debug)]
pub struct PolynomialFit {
    pub primes: Vec<u64>,
    /// `c2(X_p)` as a polynomial in `p`.
    pub c2: Polynomial<Rational>,
    /// `p * c1sq_partial(X_p)` as a polynomial in `p`.
    pub scaled_c1sq: Polynomial<Rational>,
}

impl PolynomialFit {
    /// Recovered coefficients of `p^5` in `(c1^2, c2)`.
    pub fn leading(&self) -> (Rational, Rational) {
        (self.scaled_c1sq.coeff(6), self.c2.coeff(5))
    }
}

/// Samples the family at `primes` and interpolates. Uses every sample, so
/// more than 7 primes over-determines the fit and the excess degree must
/// vanish for the polynomial structure to hold.
pub fn fit_in_p(alpha: u64, beta: u64, d: u64, primes: &[u64]) -> Result<PolynomialFit> {
    if primes.len() < 7 {
        return Err(Error::domain("need at least 7 sample primes for a degree-6 fit"));
    }
    let mut c2_pts = Vec::with_capacity(primes.len());
    let mut c1_pts = Vec::with_capacity(primes.len());
    for &p in primes {
        let x = chern_x(&RUParams::new(p, alpha, beta, d)?, None);
        let pr = Rational::from_integer(big(p));
        c2_pts.push((pr.clone(), Rational::from_integer(x.c2_exact)));
        c1_pts.push((pr.clone(), x.c1sq_partial * pr));
    }
    Ok(PolynomialFit {
        primes: primes.to_vec(),
        c2: interpolate(&c2_pts)?,
        scaled_c1sq: interpolate(&c1_pts)?,
    })
}

/// Deviation of finite-`p` slopes from the limit `lambda(alpha/beta)`.
#[derive(Clone, Debug)]
pub struct ConvergenceProfile {
    pub limit: Rational,
    /// `(p, slope, |slope - limit|)` per prime.
    pub points: Vec<(u64, Rational, Rational)>,
    /// Observed `max p * |slope - limit|`.
    pub scaled_bound: Rational,
}

pub fn convergence_profile(alpha: u64, beta: u64, d: u64, primes: &[u64]) -> Result<ConvergenceProfile> {
    let limit = slope_limit(&Rational::new(big(alpha), big(beta)))?;
    let mut points = Vec::with_capacity(primes.len());
    let mut scaled_bound = Rational::zero();
    for &p in primes {
        let slope = chern_x(&RUParams::new(p, alpha, beta, d)?, None).slope_partial();
        let dev = (&slope - &limit).abs();
        let scaled = &dev * Rational::from_integer(big(p));
        if scaled > scaled_bound {
            scaled_bound = scaled;
        }
        points.push((p, slope, dev));
    }
    Ok(ConvergenceProfile { limit, points, scaled_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::numtheory::primes_between;

    fn base() -> RUParams {
        RUParams::new(5, 1, 1, 2).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(RUParams::new(4, 1, 1, 2).is_err());
        assert!(RUParams::new(3, 1, 1, 1).is_err());
        assert!(RUParams::new(9, 1, 1, 2).is_err());
        assert!(RUParams::new(5, 0, 1, 2).is_err());
        assert!(RUParams::new(5, 1, 1, 1).is_err());
        assert!(RUParams::new(5, 1, 1, 3).is_err());
        assert!(RUParams::new(7, 1, 1, 3).is_ok());
        let f = RUParams::formal(9, 1, 1, 7).unwrap();
        assert!(f.formal);
        assert!(RUParams::formal(0, 1, 1, 1).is_err());
    }

    #[test]
    fn counts_at_smallest_prime() {
        let c = two_point_counts(&base());
        assert_eq!(c.t2, big(83508));
        assert_eq!(c.t21, big(28628));
        assert_eq!(c.t22, big(54880));
    }

    #[test]
    fn log_chern_at_smallest_prime() {
        assert_eq!(log_chern(&base()), (big(217573), big(100363)));
    }

    #[test]
    fn chern_at_smallest_prime() {
        let x = chern_x(&base(), None);
        assert_eq!(x.c2_exact, big(587731));
        assert_eq!(x.c1sq_partial, rat(3442581, 5));
        assert_eq!(x.genus_sum, BigInt::from(-16));
        assert!(x.residual_omitted);
        assert!(x.c1sq.is_none());
    }

    #[test]
    fn residual_is_added_over_p() {
        let x = chern_x(&base(), Some(BigInt::from(-4)));
        assert!(!x.residual_omitted);
        assert_eq!(x.c1sq.clone().unwrap(), rat(3442581 - 4, 5));
        assert_eq!(x.c1sq_best(), &rat(3442577, 5));
        let zero = chern_x(&base(), Some(big(0)));
        assert_eq!(zero.c1sq.unwrap(), zero.c1sq_partial);
    }

    #[test]
    fn leading_coefficient_values() {
        assert_eq!(leading_coefficients(1, 1).unwrap(), (big(249), big(195)));
        assert_eq!(leading_coefficients(2, 1).unwrap(), (big(1896), big(1032)));
        assert!(leading_coefficients(0, 1).is_err());
        let (c1, c2) = leading_coefficients(3, 2).unwrap();
        let (k1, k2) = leading_coefficients(9, 6).unwrap();
        assert_eq!(k1, &c1 * 81);
        assert_eq!(k2, &c2 * 81);
    }

    #[test]
    fn lambda_values() {
        assert_eq!(slope_limit(&int(0)).unwrap(), int(1));
        assert_eq!(slope_limit(&int(1)).unwrap(), rat(83, 65));
        assert_eq!(slope_limit(&int(2)).unwrap(), rat(79, 43));
        assert_eq!(slope_limit_at_infinity::<Rational>(), int(3));
        assert!(slope_limit(&rat(-1, 2)).is_err());
        assert!(slope_limit(&-0.5f64).is_err());
        assert!((slope_limit(&1e6f64).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn lambda_is_increasing_into_one_three() {
        let mut prev = slope_limit(&int(0)).unwrap();
        for k in 1..=2000 {
            let v = slope_limit(&rat(k, 20)).unwrap();
            assert!(v > prev, "not increasing at x={k}/20");
            assert!(v >= int(1) && v <= int(3));
            prev = v;
        }
    }

    #[test]
    fn gamma_at_smallest_prime() {
        let g = gamma_invariants(&base());
        assert_eq!(g.gamma_sq, big(5));
        assert_eq!(g.gamma_dot_k, big(4753));
    }

    #[test]
    fn sweep_positivity_and_bmy_on_log_numbers() {
        for p in primes_between(5, 60) {
            for alpha in 1..4 {
                for beta in 1..4 {
                    for d in 2..=p / 2 {
                        let params = RUParams::new(p, alpha, beta, d).unwrap();
                        let x = chern_x(&params, None);
                        assert!(x.c2_exact.is_positive());
                        assert!(x.log_c1sq <= 3 * &x.log_c2);
                        assert!(gamma_invariants(&params).gamma_dot_k.is_positive());
                        let c = &x.counts;
                        assert_eq!(&c.t21 + &c.t22, c.t2);
                    }
                }
            }
        }
    }

    #[test]
    fn sweep_preserves_order() {
        let params: Vec<RUParams> = primes_between(5, 40)
            .into_iter()
            .map(|p| RUParams::new(p, 1, 2, 2).unwrap())
            .collect();
        let out = chern_sweep(&params);
        for (x, p) in out.iter().zip(&params) {
            assert_eq!(&x.params, p);
            assert_eq!(x, &chern_x(p, None));
        }
    }

    #[test]
    fn c2_is_quintic_in_p() {
        let primes = primes_between(5, 37);
        let fit = fit_in_p(1, 2, 2, &primes).unwrap();
        assert_eq!(fit.c2.degree(), Some(5));
        assert_eq!(fit.scaled_c1sq.degree(), Some(6));
        let (c1, c2) = leading_coefficients(1, 2).unwrap();
        assert_eq!(fit.leading(), (Rational::from_integer(c1), Rational::from_integer(c2)));
        assert!(fit_in_p(1, 1, 2, &primes[..6]).is_err());
    }

    #[test]
    fn slopes_approach_lambda() {
        let profile = convergence_profile(1, 1, 2, &[101, 503, 1009]).unwrap();
        assert_eq!(profile.limit, rat(83, 65));
        let devs: Vec<&Rational> = profile.points.iter().map(|(_, _, d)| d).collect();
        assert!(devs[0] > devs[1] && devs[1] > devs[2]);
        assert!(profile.scaled_bound < int(1));
    }

    #[test]
    fn json_record_round_trips() {
        let x = chern_x(&base(), Some(big(12)));
        let text = serde_json::to_string(&x).unwrap();
        assert!(text.contains("\"residual_omitted\":false"));
        assert!(text.contains("\"c1sq_partial\":\"3442581/5\""));
        let back: ChernOfX = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
    }
}
