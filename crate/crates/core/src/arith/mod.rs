//! Exact number-theoretic primitives.

pub mod cyclotomic;
pub mod linalg;
pub mod sl2;

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Serialises rationals through their canonical `p/q` string.
pub mod serde_rational {
    use serde::{Serialize, Serializer};

    use super::{format_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        format_rational(r).serialize(s)
    }

    pub mod map {
        use std::collections::BTreeMap;

        use serde::ser::SerializeMap;
        use serde::Serializer;

        use super::super::{format_rational, Rational};

        pub fn serialize<S: Serializer>(m: &BTreeMap<u64, Rational>, s: S) -> Result<S::Ok, S::Error> {
            let mut map = s.serialize_map(Some(m.len()))?;
            for (k, v) in m {
                map.serialize_entry(&k.to_string(), &format_rational(v))?;
            }
            map.end()
        }
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::Serializer;

        use super::super::{format_rational, Rational};

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format_rational(r))?;
            }
            seq.end()
        }
    }
}

static BERNOULLI: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();

/// Bernoulli number `B_k` for even `k >= 0` (`B_2 = 1/6`, `B_4 = -1/30`).
///
/// Values come from the recurrence `sum_{j<=n} C(n+1, j) B_j = 0` and are
/// memoised process-wide.
pub fn bernoulli(k: i64) -> Result<Rational> {
    if k < 0 || k % 2 != 0 {
        return Err(Error::domain(format!("bernoulli needs an even k >= 0, got {k}")));
    }
    let k = k as usize;
    let table = BERNOULLI.get_or_init(|| Mutex::new(vec![Rational::one()]));
    let mut table = table.lock().expect("bernoulli table poisoned");
    while table.len() <= k {
        let n = table.len();
        // B_n = -1/(n+1) * sum_{j<n} C(n+1, j) B_j
        let mut acc = Rational::zero();
        let mut binom = BigInt::one();
        for (j, b) in table.iter().enumerate() {
            acc += b * Rational::from_integer(binom.clone());
            binom = binom * BigInt::from(n + 1 - j) / BigInt::from(j + 1);
        }
        let next = -acc / Rational::from_integer(BigInt::from(n + 1));
        table.push(next);
    }
    Ok(table[k].clone())
}

/// Divisor power sum `sigma_power(n) = sum_{d | n} d^power`.
pub fn sigma(power: u32, n: i64) -> Result<BigInt> {
    if n <= 0 {
        return Err(Error::domain(format!("sigma needs n >= 1, got {n}")));
    }
    Ok(divisors(n as u64)
        .into_iter()
        .map(|d| num_traits::pow(BigInt::from(d), power as usize))
        .sum())
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n > 0, "divisors of zero");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Prime factorisation as `(p, e)` pairs in increasing order of `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// Writes `n = p^m`. `n = 1` is reported as `(1, 0)`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n == 0 {
        return None;
    }
    if n == 1 {
        return Some((1, 0));
    }
    match factorize(n).as_slice() {
        [(p, m)] => Some((*p, *m)),
        _ => None,
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Index of `Gamma0(N)` in `SL2(Z)`: `N * prod_{p | N} (1 + 1/p)`.
pub fn gamma0_index(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p + 1))
}

/// Least nonnegative residue of `x` modulo `m > 0`.
pub fn mod_floor(x: &BigInt, m: u64) -> u64 {
    let m = BigInt::from(m);
    let r = x.mod_floor(&m);
    debug_assert!(!r.is_negative());
    r.try_into().expect("residue fits in u64")
}
