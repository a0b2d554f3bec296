//! Hirzebruch-Jung continued fractions and Dedekind sums.
//!
//! Everything here is exact. Dedekind sums are available through two
//! unrelated routes, the sawtooth sum [`dedekind_sum`] and the continued
//! fraction formula [`dedekind_sum_hj`], which are kept side by side so each
//! can check the other.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{serde_rational, int};
use crate::Rational;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes in `lo..=hi`, ascending.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Representative of `x mod p` in `0..p`.
pub fn reduce_mod(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

fn check_pair(q: u64, p: u64) -> Result<()> {
    if q == 0 || q >= p {
        return Err(Error::domain(format!("need 0 < q < p, got q={q}, p={p}")));
    }
    if q.gcd(&p) != 1 {
        return Err(Error::domain(format!("q={q} and p={p} are not coprime")));
    }
    Ok(())
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::domain(format!("p={p} is not prime")))
    }
}

/// Negative-regular continued fraction `p/q = e1 - 1/(e2 - 1/(... - 1/el))`
/// with every `ei >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HJExpansion {
    pub p: u64,
    pub q: u64,
    pub terms: Vec<u64>,
}

impl HJExpansion {
    /// Length `l(q, p)` of the expansion.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `sum (ei - 1)`.
    pub fn excess(&self) -> u64 {
        self.terms.iter().map(|e| e - 1).sum()
    }

    /// Folds the bracket back into a rational.
    pub fn evaluate(&self) -> Rational {
        let mut terms = self.terms.iter().rev();
        let last = terms.next().expect("expansion has at least one term");
        terms.fold(int(*last as i64), |acc, &e| int(e as i64) - acc.recip())
    }
}

pub fn hj_expand(p: u64, q: u64) -> Result<HJExpansion> {
    check_pair(q, p)?;
    let mut terms = Vec::new();
    let (mut num, mut den) = (p, q);
    // p/q = e - r/q with e = ceil(p/q); continue with q/r until r = 0.
    while den != 0 {
        let e = num.div_ceil(den);
        terms.push(e);
        let rem = e * den - num;
        num = den;
        den = rem;
    }
    Ok(HJExpansion { p, q, terms })
}

pub fn hj_length(p: u64, q: u64) -> Result<usize> {
    hj_expand(p, q).map(|e| e.len())
}

/// Inverse of `q` modulo `p` in `1..p`.
pub fn mod_inverse(q: u64, p: u64) -> Result<u64> {
    if p < 2 || q.is_multiple_of(p) {
        return Err(Error::domain(format!("{q} is not invertible modulo {p}")));
    }
    let g = (q as i128).extended_gcd(&(p as i128));
    if g.gcd != 1 {
        return Err(Error::domain(format!("{q} is not invertible modulo {p}")));
    }
    Ok(g.x.rem_euclid(p as i128) as u64)
}

/// `s(q, p) = sum_{k=1}^{p-1} ((k/p)) ((kq/p))` from the sawtooth definition,
/// `((x)) = x - floor(x) - 1/2` off the integers and `0` on them.
pub fn dedekind_sum(q: u64, p: u64) -> Result<Rational> {
    check_pair(q, p)?;
    // Neither k/p nor kq/p is an integer for 0 < k < p, so
    // ((k/p))((kq/p)) = (2k - p)(2r - p) / (4p^2) with r = kq mod p.
    let (pi, qi) = (p as i128, q as i128);
    let total: i128 = (1..pi)
        .map(|k| (2 * k - pi) * (2 * ((k * qi) % pi) - pi))
        .sum();
    Ok(Rational::new(BigInt::from(total), BigInt::from(4 * pi * pi)))
}

/// `s(q, p)` from the continued fraction of `p/q`:
/// `12 s(q, p) = (q + q') / p + sum (ei - 3)` where `q q' = 1 mod p`.
///
/// The identity holds for every coprime pair, so `p` need not be prime.
pub fn dedekind_sum_hj(q: u64, p: u64) -> Result<Rational> {
    let expansion = hj_expand(p, q)?;
    let q_inv = mod_inverse(q, p)?;
    Ok(twelve_s_from_parts(q, q_inv, p, &expansion) / int(12))
}

fn twelve_s_from_parts(q: u64, q_inv: u64, p: u64, expansion: &HJExpansion) -> Rational {
    let tail: i64 = expansion.terms.iter().map(|&e| e as i64 - 3).sum();
    Rational::new(BigInt::from(q + q_inv), BigInt::from(p)) + int(tail)
}

/// `c(q, p) = 12 s(q, p) + l(q, p)` for prime `p`.
pub fn c_qp(q: u64, p: u64) -> Result<Rational> {
    check_prime(p)?;
    Ok(dedekind_record(q, p)?.c)
}

/// Everything known about a pair `(q, p)` in one record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DedekindRecord {
    pub q: u64,
    pub p: u64,
    #[serde(with = "serde_rational")]
    pub s: Rational,
    pub l: usize,
    #[serde(with = "serde_rational")]
    pub c: Rational,
    pub q_inv: u64,
    pub terms: Vec<u64>,
}

pub fn dedekind_record(q: u64, p: u64) -> Result<DedekindRecord> {
    let expansion = hj_expand(p, q)?;
    let q_inv = mod_inverse(q, p)?;
    let twelve_s = twelve_s_from_parts(q, q_inv, p, &expansion);
    let l = expansion.len();
    Ok(DedekindRecord {
        q,
        p,
        s: &twelve_s / int(12),
        l,
        c: twelve_s + int(l as i64),
        q_inv,
        terms: expansion.terms,
    })
}

/// `s(q, p)` and `l(q, p)` for every `q` in `1..p`, indexed by `q`.
///
/// For prime `p`, `12 p s(q, p)` is an integer; the table stores it so that
/// sums over many arguments stay in machine integers.
#[derive(Clone, Debug)]
pub struct DedekindTable {
    p: u64,
    twelve_p_s: Vec<i64>,
    l: Vec<usize>,
}

impl DedekindTable {
    pub fn new(p: u64) -> Result<Self> {
        check_prime(p)?;
        let mut twelve_p_s = vec![0];
        let mut l = vec![0];
        for q in 1..p {
            let expansion = hj_expand(p, q)?;
            let q_inv = mod_inverse(q, p)?;
            let tail: i64 = expansion.terms.iter().map(|&e| e as i64 - 3).sum();
            twelve_p_s.push((q + q_inv) as i64 + p as i64 * tail);
            l.push(expansion.len());
        }
        Ok(Self { p, twelve_p_s, l })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// `12 p s(q, p)`.
    pub fn twelve_p_s(&self, q: u64) -> i64 {
        self.twelve_p_s[q as usize]
    }

    pub fn s(&self, q: u64) -> Rational {
        Rational::new(BigInt::from(self.twelve_p_s(q)), BigInt::from(12 * self.p))
    }

    pub fn l(&self, q: u64) -> usize {
        self.l[q as usize]
    }

    pub fn c(&self, q: u64) -> Rational {
        self.s(q) * int(12) + int(self.l(q) as i64)
    }
}
