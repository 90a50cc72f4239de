//! Sum-of-orders bound for elements of `P_k(p^m)` and its sampled check.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{cusp_reps, orders_at_all_cusps, Cusp};
use crate::arith::linalg::{solve, LinearSolution};
use crate::arith::{divisors, gcd, prime_power, rat, rat_int, Rational};
use crate::eisenstein::{EisensteinElement, MembershipTag};
use crate::error::{Error, Result};

/// Strict upper bound on the total order of an element of `P_k(N)`,
/// `N = p^m`: 1 for `N = 1`, 4 for `N = 4`, otherwise the number of cusps
/// `p^{[(m-1)/2]} (p^{(m-1) - 2[(m-1)/2]} + 1)`.
pub fn theorem_bound(n: u64) -> Result<u64> {
    let (p, m) = prime_power(n).ok_or_else(|| Error::domain(format!("level {n} is not a prime power")))?;
    Ok(match (n, m) {
        (1, _) => 1,
        (4, _) => 4,
        _ => {
            let half = (m - 1) / 2;
            p.pow(half) * (p.pow((m - 1) - 2 * half) + 1)
        }
    })
}

/// Largest order allowed at a single cusp.
fn per_cusp_bound(n: u64, cusp: &Cusp) -> u64 {
    if n == 4 && cusp.c() == 2 {
        2
    } else {
        1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspOrder {
    pub cusp: String,
    pub order: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaingenReport {
    pub element: EisensteinElement,
    pub weight: u32,
    pub level: u64,
    pub orders: Vec<CuspOrder>,
    pub total: u64,
    pub bound: u64,
    pub holds: bool,
    /// One entry per violated assertion; empty when `holds`.
    pub violations: Vec<String>,
}

/// Computes the order at every cusp of an element of `P_k(p^m)` and checks
/// the total bound and the per-cusp bounds.
pub fn check_maingen_bound(f: &EisensteinElement) -> Result<MaingenReport> {
    let tag = f.classify()?;
    if tag != MembershipTag::InP {
        return Err(Error::domain(format!("{f} is {tag}, not in_P")));
    }
    let n = f.level();
    let bound = theorem_bound(n)?;
    let orders = orders_at_all_cusps(f)?;
    let total: u64 = orders.iter().map(|(_, o)| o).sum();
    let mut violations = Vec::new();
    if total >= bound {
        violations.push(format!("total order {total} is not below {bound}"));
    }
    for (cusp, o) in &orders {
        let cap = per_cusp_bound(n, cusp);
        if *o > cap {
            violations.push(format!("order {o} at {cusp} exceeds {cap}"));
        }
    }
    Ok(MaingenReport {
        element: f.clone(),
        weight: f.weight(),
        level: n,
        orders: orders
            .into_iter()
            .map(|(c, order)| CuspOrder {
                cusp: c.to_string(),
                order,
            })
            .collect(),
        total,
        bound,
        holds: violations.is_empty(),
        violations,
    })
}

/// Constant term of `E_k(tz)` at `cusp`, up to the common factor `-B_k/(2k)`.
fn constant_row(k: u32, cusp: &Cusp, ts: &[u64]) -> Vec<Rational> {
    ts.iter()
        .map(|&t| num_traits::pow(rat(gcd(t, cusp.c()) as i64, t as i64), k as usize))
        .collect()
}

/// Draws a random element of `P_k(N)`, `N` a prime power.
///
/// Coefficients start as integers in `[-9, 9]`. About half of the draws also
/// force the constant term at a random cusp to vanish, so that positive
/// orders actually occur. A weight-2 draw is projected onto the weight-2
/// constraint by solving for some coefficients.
pub fn sample_p_element(k: u32, n: u64, rng: &mut impl Rng) -> Result<EisensteinElement> {
    prime_power(n).ok_or_else(|| Error::domain(format!("level {n} is not a prime power")))?;
    let ts = divisors(n);
    let reps = cusp_reps(n);
    for _ in 0..10_000 {
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        if k == 2 {
            rows.push(ts.iter().map(|&t| rat(1, t as i64)).collect());
        }
        // forcing needs a free coefficient left over
        if rng.random_bool(0.5) && rows.len() + 1 < ts.len() {
            let cusp = &reps[rng.random_range(0..reps.len())];
            rows.push(constant_row(k, cusp, &ts));
        }
        let mut r: Vec<Rational> = (0..ts.len()).map(|_| rat_int(rng.random_range(-9..=9))).collect();
        if !rows.is_empty() {
            let unknowns: Vec<usize> = sample(rng, ts.len(), rows.len()).into_vec();
            let a: Vec<Vec<Rational>> = rows.iter().map(|row| unknowns.iter().map(|&j| row[j].clone()).collect()).collect();
            let b: Vec<Rational> = rows
                .iter()
                .map(|row| {
                    -row.iter()
                        .enumerate()
                        .filter(|(j, _)| !unknowns.contains(j))
                        .map(|(j, x)| x * &r[j])
                        .sum::<Rational>()
                })
                .collect();
            let LinearSolution::Unique(x) = solve(&a, &b) else { continue };
            for (&j, v) in unknowns.iter().zip(x) {
                r[j] = v;
            }
        }
        let f = EisensteinElement::new(k, n, ts.iter().copied().zip(r))?;
        if f.classify()? == MembershipTag::InP {
            return Ok(f);
        }
    }
    Err(Error::domain(format!("could not sample an element of P_{k}({n})")))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaingenCase {
    pub weight: u32,
    pub level: u64,
    pub samples: usize,
    pub bound: u64,
    pub max_total: u64,
    pub max_order: u64,
    /// Number of samples with some positive order.
    pub with_zeros: usize,
    pub counterexamples: Vec<MaingenReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaingenSuiteReport {
    pub seed: u64,
    pub cases: Vec<MaingenCase>,
    pub holds: bool,
}

/// Checks the bound on `samples` random elements for every `(k, N)`. Each
/// case has its own generator derived from `seed`, so results do not depend
/// on scheduling.
pub fn maingen_suite(levels: &[u64], weights: &[u32], samples: usize, seed: u64) -> Result<MaingenSuiteReport> {
    let pairs: Vec<(u32, u64)> = weights
        .iter()
        .flat_map(|&k| levels.iter().map(move |&n| (k, n)))
        .collect();
    let mut cases: Vec<MaingenCase> = pairs
        .into_par_iter()
        .map(|(k, n)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((k as u64) << 40) ^ n.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let elements: Vec<EisensteinElement> =
                (0..samples).map(|_| sample_p_element(k, n, &mut rng)).collect::<Result<_>>()?;
            let reports: Vec<MaingenReport> = elements.par_iter().map(check_maingen_bound).collect::<Result<_>>()?;
            Ok(MaingenCase {
                weight: k,
                level: n,
                samples,
                bound: theorem_bound(n)?,
                max_total: reports.iter().map(|r| r.total).max().unwrap_or(0),
                max_order: reports
                    .iter()
                    .flat_map(|r| r.orders.iter().map(|o| o.order))
                    .max()
                    .unwrap_or(0),
                with_zeros: reports.iter().filter(|r| r.total > 0).count(),
                counterexamples: reports.into_iter().filter(|r| !r.holds).collect(),
            })
        })
        .collect::<Result<_>>()?;
    cases.sort_by_key(|c| (c.weight, c.level));
    let holds = cases.iter().all(|c| c.counterexamples.is_empty());
    Ok(MaingenSuiteReport { seed, cases, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        assert_eq!(theorem_bound(1).unwrap(), 1);
        assert_eq!(theorem_bound(4).unwrap(), 4);
        assert_eq!(theorem_bound(2).unwrap(), 2);
        assert_eq!(theorem_bound(9).unwrap(), 4);
        assert_eq!(theorem_bound(16).unwrap(), 6);
        assert_eq!(theorem_bound(32).unwrap(), 8);
        assert!(theorem_bound(12).is_err());
    }

    #[test]
    fn jacobi_element_report() {
        let f = EisensteinElement::new(2, 4, [(1, rat_int(8)), (4, rat_int(-32))]).unwrap();
        let r = check_maingen_bound(&f).unwrap();
        let orders: Vec<u64> = r.orders.iter().map(|o| o.order).collect();
        assert_eq!(orders, [0, 1, 0]);
        assert_eq!(r.total, 1);
        assert!(r.holds);
        let not_p = EisensteinElement::new(4, 4, [(1, rat_int(1))]).unwrap();
        assert!(check_maingen_bound(&not_p).is_err());
    }

    #[test]
    fn sampler_is_deterministic_and_in_p() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x = sample_p_element(2, 9, &mut a).unwrap();
            let y = sample_p_element(2, 9, &mut b).unwrap();
            assert_eq!(x, y);
            assert_eq!(x.classify().unwrap(), MembershipTag::InP);
        }
    }

    #[test]
    fn small_suite_holds() {
        let r = maingen_suite(&[2, 4, 9], &[2, 4], 10, 1).unwrap();
        assert!(r.holds, "{:?}", r.cases);
        assert!(r.cases.iter().any(|c| c.with_zeros > 0));
    }
}
