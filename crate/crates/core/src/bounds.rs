//! Brute-force checks of the lower-bound analysis for generalized
//! multiplicity schemes `(1, a, b, c)` with `1 + a + b + c = m p`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int, rat, serde_rational};
use crate::numtheory::{hj_expand, is_prime, mod_inverse, reduce_mod, DedekindTable};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiplicityScheme {
    pub p: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub m: u64,
}

impl MultiplicityScheme {
    pub fn new(p: u64, a: u64, b: u64, c: u64) -> Result<Self> {
        if p < 5 || !is_prime(p) {
            return Err(Error::domain(format!("p={p} must be a prime >= 5")));
        }
        if [a, b, c].iter().any(|&x| x == 0 || x >= p) {
            return Err(Error::domain(format!("need 0 < a, b, c < p, got ({a}, {b}, {c})")));
        }
        let total = 1 + a + b + c;
        if total != p && total != 2 * p {
            return Err(Error::domain(format!("1 + a + b + c = {total} is neither p nor 2p")));
        }
        Ok(Self { p, a, b, c, m: total / p })
    }

    /// The six reduced arguments `-a, -b, -c, -b/a, -c/a, -c/b` in `1..p`.
    pub fn arguments(&self) -> [u64; 6] {
        let p = self.p;
        let inv_a = mod_inverse(self.a, p).expect("a is a unit mod p");
        let inv_b = mod_inverse(self.b, p).expect("b is a unit mod p");
        let neg = |x: u64| reduce_mod(-(x as i64), p);
        let mul = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
        [
            neg(self.a),
            neg(self.b),
            neg(self.c),
            neg(mul(self.b, inv_a)),
            neg(mul(self.c, inv_a)),
            neg(mul(self.c, inv_b)),
        ]
    }
}

/// Every ordered `(a, b, c)` with `0 < a, b, c < p` and `1 + a + b + c` in
/// `{p, 2p}`, sorted by `m` and then lexicographically.
pub fn enumerate_schemes(p: u64) -> Result<Vec<MultiplicityScheme>> {
    if p < 5 || !is_prime(p) {
        return Err(Error::domain(format!("p={p} must be a prime >= 5")));
    }
    let mut out = Vec::new();
    for m in 1..=2 {
        let target = m * p - 1;
        for a in 1..p {
            for b in 1..p {
                if a + b >= target {
                    break;
                }
                let c = target - a - b;
                if c < p {
                    out.push(MultiplicityScheme { p, a, b, c, m });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeSums {
    pub arguments: [u64; 6],
    #[serde(with = "serde_rational")]
    pub s: Rational,
    pub l: u64,
    #[serde(with = "serde_rational")]
    pub c: Rational,
}

pub fn scheme_sums(scheme: &MultiplicityScheme) -> Result<SchemeSums> {
    let table = DedekindTable::new(scheme.p)?;
    Ok(scheme_sums_with(&table, scheme))
}

/// [`scheme_sums`] reading `s` and `l` from a precomputed table for `p`.
pub fn scheme_sums_with(table: &DedekindTable, scheme: &MultiplicityScheme) -> SchemeSums {
    let (arguments, twelve_p_s, l) = integer_sums(table, scheme);
    let p = scheme.p as i64;
    SchemeSums {
        arguments,
        s: Rational::new(twelve_p_s.into(), (12 * p).into()),
        l,
        c: Rational::new((twelve_p_s + p * l as i64).into(), p.into()),
    }
}

/// `(arguments, 12 p S, L)`.
fn integer_sums(table: &DedekindTable, scheme: &MultiplicityScheme) -> ([u64; 6], i64, u64) {
    debug_assert_eq!(table.modulus(), scheme.p);
    let arguments = scheme.arguments();
    let twelve_p_s = arguments.iter().map(|&q| table.twelve_p_s(q)).sum();
    let l = arguments.iter().map(|&q| table.l(q) as u64).sum();
    (arguments, twelve_p_s, l)
}

/// `lim_{x->0} c1^2/c2 = (12 - C/p) / (6 + L/p)`.
pub fn limit_slope_x0(scheme: &MultiplicityScheme) -> Result<Rational> {
    Ok(limit_from_sums(scheme.p, &scheme_sums(scheme)?))
}

fn limit_from_sums(p: u64, sums: &SchemeSums) -> Rational {
    let p = int(p as i64);
    (int(12) - &sums.c / &p) / (int(6) + int(sums.l as i64) / p)
}

/// `3p + 3 - 6/p`.
pub fn lomaschico_bound(p: u64) -> Rational {
    let p = p as i64;
    int(3 * p + 3) - rat(6, p)
}

/// One line of the scheme report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeRow {
    pub p: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub m: u64,
    #[serde(rename = "S", with = "serde_rational")]
    pub s_sum: Rational,
    #[serde(rename = "L")]
    pub l_sum: u64,
    #[serde(rename = "C", with = "serde_rational")]
    pub c_sum: Rational,
    #[serde(with = "serde_rational")]
    pub six_s_plus_l: Rational,
    #[serde(with = "serde_rational")]
    pub bound: Rational,
    #[serde(with = "serde_rational")]
    pub slack: Rational,
    #[serde(with = "serde_rational")]
    pub limit_slope: Rational,
}

impl SchemeRow {
    pub fn scheme(&self) -> MultiplicityScheme {
        MultiplicityScheme { p: self.p, a: self.a, b: self.b, c: self.c, m: self.m }
    }

    /// `limit_slope >= 1 - 1/p`.
    pub fn limit_bound_holds(&self) -> bool {
        self.limit_slope >= int(1) - rat(1, self.p as i64)
    }
}

pub fn scheme_row(table: &DedekindTable, scheme: &MultiplicityScheme) -> SchemeRow {
    let (_, twelve_p_s, l) = integer_sums(table, scheme);
    let p = scheme.p as i64;
    let l_i = l as i64;
    // Scaled by 2p: 2p (6S + L) = 12pS + 2pL and 2p (3p + 3 - 6/p) = 6p^2 + 6p - 12.
    let scaled_lhs = twelve_p_s + 2 * p * l_i;
    let scaled_bound = 6 * p * p + 6 * p - 12;
    // p C = 12pS + pL, and the limit is (12p^2 - pC) / (p (6p + L)).
    let p_c = twelve_p_s + p * l_i;
    let frac = |num: i64, den: i64| Rational::new(num.into(), den.into());
    SchemeRow {
        p: scheme.p,
        a: scheme.a,
        b: scheme.b,
        c: scheme.c,
        m: scheme.m,
        s_sum: frac(twelve_p_s, 12 * p),
        l_sum: l,
        c_sum: frac(p_c, p),
        six_s_plus_l: frac(scaled_lhs, 2 * p),
        bound: frac(scaled_bound, 2 * p),
        slack: frac(scaled_bound - scaled_lhs, 2 * p),
        limit_slope: frac(12 * p * p - p_c, p * (6 * p + l_i)),
    }
}

#[derive(Clone, Debug)]
pub struct LomaschicoReport {
    pub p_max: u64,
    pub primes: Vec<u64>,
    /// All rows, ascending in `p` then in enumeration order.
    pub rows: Vec<SchemeRow>,
}

impl LomaschicoReport {
    pub fn violations(&self) -> impl Iterator<Item = &SchemeRow> {
        self.rows.iter().filter(|r| r.slack < int(0))
    }

    pub fn limit_violations(&self) -> impl Iterator<Item = &SchemeRow> {
        self.rows.iter().filter(|r| !r.limit_bound_holds())
    }

    /// Row with the least slack; first in report order on ties.
    pub fn min_slack(&self) -> Option<&SchemeRow> {
        self.rows.iter().reduce(|best, r| if r.slack < best.slack { r } else { best })
    }

    /// Empirical minimizer of the limit slope for each prime.
    pub fn min_limit_per_prime(&self) -> Vec<&SchemeRow> {
        self.primes
            .iter()
            .filter_map(|&p| {
                self.rows
                    .iter()
                    .filter(|r| r.p == p)
                    .reduce(|best, r| if r.limit_slope < best.limit_slope { r } else { best })
            })
            .collect()
    }

    pub fn is_clean(&self) -> bool {
        self.violations().next().is_none() && self.limit_violations().next().is_none()
    }

    /// Turns the first counterexample, if any, into an error.
    pub fn check(&self) -> Result<()> {
        if let Some(r) = self.violations().next() {
            return Err(Error::Verification(format!(
                "6S+L={} exceeds {} at p={} (a,b,c)=({},{},{})",
                r.six_s_plus_l, r.bound, r.p, r.a, r.b, r.c
            )));
        }
        if let Some(r) = self.limit_violations().next() {
            return Err(Error::Verification(format!(
                "limit slope {} below 1-1/p at p={} (a,b,c)=({},{},{})",
                r.limit_slope, r.p, r.a, r.b, r.c
            )));
        }
        Ok(())
    }
}

/// Checks `6S + L <= 3p + 3 - 6/p` and `limit_slope >= 1 - 1/p` for every
/// scheme at every prime `5 <= p <= p_max`.
pub fn verify_lomaschico(p_max: u64) -> Result<LomaschicoReport> {
    if p_max < 5 {
        return Err(Error::domain(format!("p_max={p_max} must be at least 5")));
    }
    let primes: Vec<u64> = (5..=p_max).filter(|&p| is_prime(p)).collect();
    let per_prime: Vec<Vec<SchemeRow>> = primes
        .par_iter()
        .map(|&p| {
            let table = DedekindTable::new(p)?;
            Ok(enumerate_schemes(p)?.iter().map(|s| scheme_row(&table, s)).collect())
        })
        .collect::<Result<_>>()?;
    Ok(LomaschicoReport { p_max, primes, rows: per_prime.into_iter().flatten().collect() })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub p: u64,
    pub q: u64,
    pub length: usize,
    /// `sum (ei - 1)`.
    pub excess: u64,
    pub bound: u64,
    pub slack: i64,
}

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub p_max: u64,
    pub rows: Vec<LemmaRow>,
}

impl LemmaReport {
    pub fn violations(&self) -> impl Iterator<Item = &LemmaRow> {
        self.rows.iter().filter(|r| r.slack < 0)
    }

    pub fn equality_count(&self) -> usize {
        self.rows.iter().filter(|r| r.slack == 0).count()
    }

    pub fn is_clean(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn check(&self) -> Result<()> {
        match self.violations().next() {
            Some(r) => Err(Error::Verification(format!(
                "sum(e_i - 1)={} exceeds p-1={} at (q,p)=({},{})",
                r.excess, r.bound, r.q, r.p
            ))),
            None => Ok(()),
        }
    }
}

/// Checks `sum (ei - 1) <= p - 1` over every coprime `0 < q < p <= p_max`.
pub fn verify_lemma_behavior(p_max: u64) -> Result<LemmaReport> {
    if p_max < 2 {
        return Err(Error::domain(format!("p_max={p_max} must be at least 2")));
    }
    let per_p: Vec<Vec<LemmaRow>> = (2..=p_max)
        .into_par_iter()
        .map(|p| {
            (1..p)
                .filter(|&q| num_integer::gcd(q, p) == 1)
                .map(|q| {
                    let e = hj_expand(p, q)?;
                    let excess = e.excess();
                    Ok(LemmaRow {
                        p,
                        q,
                        length: e.len(),
                        excess,
                        bound: p - 1,
                        slack: (p - 1) as i64 - excess as i64,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(LemmaReport { p_max, rows: per_p.into_iter().flatten().collect() })
}
