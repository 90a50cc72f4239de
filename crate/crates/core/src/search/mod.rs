//! Classification of eta quotients lying in `E_k(p^m)`.
//!
//! An eta quotient of level `p^m` is determined by its orders at the `m + 1`
//! cusp denominators `p^i`, because the order map is invertible. Elements of
//! `P_k(p^m)` have order at most 1 at every cusp (at most 2 at `1/2` when
//! `p^m = 4`), and the orders of a weight-`k` quotient add up to
//! `(k/12) [SL2(Z) : Gamma0(p^m)]`. Orders lie in `(1/24) Z`, so the candidate
//! order vectors form a finite grid; inverting the order map on each grid
//! point and matching the surviving quotients against `E_k(p^m)` finds all of
//! them.

pub mod dual;
pub mod second;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::linalg::{inverse, Matrix};
use crate::arith::{euler_phi, gamma0_index, gcd, is_prime, lcm, rat_int, Rational};
use crate::cusps::term_exponent_step;
use crate::eisenstein::{match_eta, match_precision, sturm_bound, EisensteinElement, MembershipTag};
use crate::error::{Error, Result};
use crate::eta::EtaQuotient;

pub use dual::{antiderivative, dual_pairs_prime_power, DualPair, DualPairEntry, DualPairsReport};
pub use second::{
    classify_second_derivatives_level4, second_derivative_ratio, verify_second_derivatives, SecondDerivReport, SecondDerivSolution,
};

/// The `(m+1) x (m+1)` matrix sending `(r_{p^j})_j` to the orders at the
/// cusps with denominator `p^i`.
pub fn order_matrix(p: u64, m: u32) -> Result<Matrix> {
    Ok(order_matrix_24(p, m)?
        .into_iter()
        .map(|row| row.into_iter().map(|x| rat_int(x as i64) / rat_int(24)).collect())
        .collect())
}

/// 24 times [`order_matrix`]; its entries are integers.
fn order_matrix_24(p: u64, m: u32) -> Result<Vec<Vec<u64>>> {
    let n = p.pow(m);
    (0..=m)
        .map(|i| (0..=m).map(|j| term_exponent_step(p.pow(j), p.pow(i), n)).collect())
        .collect()
}

/// Integer form `(B, D)` of the inverse order map: `r = B u / D` for orders
/// `u` in units of `1/24`.
fn inverse_order_map(p: u64, m: u32) -> Result<(Vec<Vec<i128>>, i128)> {
    let a: Matrix = order_matrix_24(p, m)?
        .into_iter()
        .map(|row| row.into_iter().map(|x| rat_int(x as i64)).collect())
        .collect();
    let inv = inverse(&a).ok_or_else(|| Error::domain(format!("order matrix for {p}^{m} is singular")))?;
    let d = inv
        .iter()
        .flatten()
        .fold(1u64, |acc, x| lcm(acc, x.denom().to_u64().expect("small denominator")));
    let b = inv
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| (x * rat_int(d as i64)).to_integer().to_i128().expect("small entry"))
                .collect()
        })
        .collect();
    Ok((b, d as i128))
}

/// Number of cusps of `Gamma0(p^m)` with denominator `p^i`.
fn multiplicity(p: u64, m: u32, i: u32) -> u64 {
    euler_phi(gcd(p.pow(i), p.pow(m - i)))
}

/// Per-cusp order cap in units of `1/24`.
fn order_cap(n: u64, c: u64) -> u64 {
    if n == 4 && c == 2 {
        48
    } else {
        24
    }
}

/// All `u` with `0 <= u_i <= cap_i` and `sum mult_i u_i = total`.
fn order_grid(mult: &[u64], cap: &[u64], total: u64) -> Vec<Vec<u64>> {
    fn rec(i: usize, mult: &[u64], cap: &[u64], left: u64, max_rest: &[u64], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == mult.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for u in 0..=cap[i] {
            let used = mult[i] * u;
            if used > left {
                break;
            }
            if left - used > max_rest[i + 1] {
                continue;
            }
            cur.push(u);
            rec(i + 1, mult, cap, left - used, max_rest, cur, out);
            cur.pop();
        }
    }
    let mut max_rest = vec![0u64; mult.len() + 1];
    for i in (0..mult.len()).rev() {
        max_rest[i] = max_rest[i + 1] + mult[i] * cap[i];
    }
    let mut out = Vec::new();
    rec(0, mult, cap, total, &max_rest, &mut Vec::new(), &mut out);
    out
}

/// A certified equality between an eta quotient and an Eisenstein element.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchPair {
    pub eta: EtaQuotient,
    pub eisenstein: EisensteinElement,
    /// Coefficients compared, `q^0 .. q^{bound-1}`.
    pub bound: i64,
    /// Whether the quotient is not of the form `g(dz)` with `d > 1`.
    pub primitive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub k: u32,
    pub p: u64,
    pub m: u32,
    pub level: u64,
    /// Sturm bound of weight `k` and level `p^m`.
    pub sturm: u64,
    pub candidates: usize,
    pub pairs: Vec<SearchPair>,
}

/// Exponent vector over the divisors of the level, used as the sort key.
fn exponent_key(f: &EtaQuotient) -> Vec<i64> {
    crate::arith::divisors(f.level()).into_iter().map(|t| f.exponent(t)).collect()
}

/// All eta quotients of level `p^m` lying in `P_k(p^m)`.
pub fn enumerate_eta_in_e(k: u32, p: u64, m: u32) -> Result<SearchResult> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::domain(format!("weight must be even and >= 2, got {k}")));
    }
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let n = p.pow(m);
    let mult: Vec<u64> = (0..=m).map(|i| multiplicity(p, m, i)).collect();
    let cap: Vec<u64> = (0..=m).map(|i| order_cap(n, p.pow(i))).collect();
    // (k/12) * index, in units of 1/24
    let total = 2 * k as u64 * gamma0_index(n);
    let (b, d) = inverse_order_map(p, m)?;
    let grid = order_grid(&mult, &cap, total);
    let candidates = grid.len();
    let prec = match_precision(k, n);
    let mut pairs: Vec<SearchPair> = grid
        .into_par_iter()
        .filter_map(|u| {
            let mut r = Vec::with_capacity(u.len());
            for row in &b {
                let s: i128 = row.iter().zip(&u).map(|(x, &y)| x * y as i128).sum();
                if s % d != 0 {
                    return None;
                }
                r.push((s / d) as i64);
            }
            let f = EtaQuotient::new(n, (0..=m).map(|j| p.pow(j)).zip(r)).ok()?;
            if !f.modularity().is_holomorphic_form() {
                return None;
            }
            Some(f)
        })
        .map(|f| {
            let Some(e) = match_eta(&f)? else { return Ok(None) };
            if e.classify()? != MembershipTag::InP {
                return Ok(None);
            }
            let primitive = f.is_primitive();
            Ok(Some(SearchPair {
                eta: f,
                eisenstein: e,
                bound: prec,
                primitive,
            }))
        })
        .filter_map(|x: Result<Option<SearchPair>>| x.transpose())
        .collect::<Result<_>>()?;
    pairs.sort_by_key(|x| exponent_key(&x.eta));
    Ok(SearchResult {
        k,
        p,
        m,
        level: n,
        sturm: sturm_bound(k, n),
        candidates,
        pairs,
    })
}

fn quotient(e: &[(u64, i64)]) -> EtaQuotient {
    EtaQuotient::from_exponents(e.iter().copied()).expect("fixed quotient")
}

/// The weight-2 list as printed, in print order.
pub fn printed_weight2_list() -> Vec<EtaQuotient> {
    [
        &[(1, 8), (1, -4)][..],
        &[(4, 8), (2, -4)],
        &[(2, 20), (1, -8), (4, -8)],
        &[(1, 4), (4, 10), (2, -6), (8, -4)],
        &[(2, 10), (8, 4), (1, -4), (4, -6)],
        &[(2, 6), (4, 6), (1, -4), (8, -4)],
        &[(1, 4), (8, 4), (2, -2), (4, -2)],
        &[(3, 10), (1, -3), (9, -3)],
        &[(1, 2), (4, 8), (8, 1), (2, -5), (16, -2)],
        &[(2, 1), (4, 8), (16, 2), (1, -2), (8, -5)],
        &[(2, 1), (4, 6), (8, 1), (1, -2), (16, -2)],
        &[(1, 2), (4, 10), (16, 2), (2, -5), (8, -5)],
    ]
    .iter()
    .map(|e| quotient(e))
    .collect()
}

/// The weight-4 list as printed.
pub fn printed_weight4_list() -> Vec<EtaQuotient> {
    [
        &[(2, 16), (1, -8)][..],
        &[(2, 40), (1, -16), (4, -16)],
        &[(1, 8), (4, 8), (2, -8)],
        &[(1, 16), (2, -8)],
    ]
    .iter()
    .map(|e| quotient(e))
    .collect()
}

/// `(k, p, m)` for which quotients exist.
pub const NONEMPTY_CASES: [(u32, u64, u32); 6] = [(2, 2, 2), (2, 2, 3), (2, 3, 2), (2, 2, 4), (4, 2, 1), (4, 2, 2)];

/// Expected counts for [`NONEMPTY_CASES`].
pub const EXPECTED_COUNTS: [usize; 6] = [3, 4, 1, 4, 2, 2];

/// `(k, p^m)` pairs shown to contain no quotient, written as `(k, p, m)`.
pub const EXCLUDED_CASES: [(u32, u64, u32); 13] = [
    (2, 2, 0),
    (4, 2, 0),
    (6, 2, 0),
    (8, 2, 0),
    (10, 2, 0),
    (2, 2, 1),
    (6, 2, 1),
    (6, 2, 2),
    (2, 3, 1),
    (4, 3, 1),
    (2, 5, 1),
    (2, 5, 2),
    (2, 7, 1),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ListedQuotient {
    pub eta: EtaQuotient,
    pub eisenstein: EisensteinElement,
    pub primitive: bool,
    /// Position in the printed list when the exponents agree verbatim.
    pub printed_index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    pub level: u64,
    /// Printed entry, when the discrepancy concerns one.
    pub printed: Option<String>,
    /// Certified quotient found by the search.
    pub found: Option<ListedQuotient>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseCount {
    pub k: u32,
    pub level: u64,
    pub expected: usize,
    pub found: usize,
    pub primitive: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorollaryReport {
    pub counts: Vec<CaseCount>,
    pub weight2: Vec<ListedQuotient>,
    pub weight4: Vec<ListedQuotient>,
    pub excluded: Vec<CaseCount>,
    /// Printed weight-2 entries reproduced verbatim.
    pub weight2_verbatim: usize,
    /// Printed weight-2 entries reproduced verbatim by a primitive quotient.
    pub weight2_verbatim_primitive: usize,
    pub weight4_exact: bool,
    pub discrepancies: Vec<Discrepancy>,
    pub holds: bool,
}

fn listed(results: &[SearchResult], printed: &[EtaQuotient]) -> Vec<ListedQuotient> {
    results
        .iter()
        .flat_map(|r| r.pairs.iter())
        .map(|pair| ListedQuotient {
            eta: pair.eta.clone(),
            eisenstein: pair.eisenstein.clone(),
            primitive: pair.primitive,
            printed_index: printed.iter().position(|q| q.exponents() == pair.eta.exponents()),
        })
        .collect()
}

/// Runs the search on every nonempty and every excluded case and compares
/// the results with the printed lists.
pub fn verify_corollary_lists() -> Result<CorollaryReport> {
    let results: Vec<SearchResult> = NONEMPTY_CASES
        .par_iter()
        .map(|&(k, p, m)| enumerate_eta_in_e(k, p, m))
        .collect::<Result<_>>()?;
    let excluded_results: Vec<SearchResult> = EXCLUDED_CASES
        .par_iter()
        .map(|&(k, p, m)| enumerate_eta_in_e(k, p, m))
        .collect::<Result<_>>()?;

    let counts: Vec<CaseCount> = results
        .iter()
        .zip(EXPECTED_COUNTS)
        .map(|(r, expected)| CaseCount {
            k: r.k,
            level: r.level,
            expected,
            found: r.pairs.len(),
            primitive: r.pairs.iter().filter(|x| x.primitive).count(),
        })
        .collect();
    let excluded: Vec<CaseCount> = excluded_results
        .iter()
        .map(|r| CaseCount {
            k: r.k,
            level: r.level,
            expected: 0,
            found: r.pairs.len(),
            primitive: r.pairs.iter().filter(|x| x.primitive).count(),
        })
        .collect();

    let (w2, w4): (Vec<SearchResult>, Vec<SearchResult>) = results.into_iter().partition(|r| r.k == 2);
    let printed2 = printed_weight2_list();
    let printed4 = printed_weight4_list();
    let weight2 = listed(&w2, &printed2);
    let weight4 = listed(&w4, &printed4);

    let mut discrepancies = Vec::new();
    let unmatched_printed: Vec<(usize, &EtaQuotient)> = printed2
        .iter()
        .enumerate()
        .filter(|(i, _)| !weight2.iter().any(|x| x.printed_index == Some(*i)))
        .collect();
    let mut unmatched_found = weight2.iter().filter(|x| x.printed_index.is_none());
    for (i, q) in unmatched_printed {
        let found = unmatched_found.next().cloned();
        discrepancies.push(Discrepancy {
            level: found.as_ref().map_or(q.level(), |c| c.eisenstein.level()),
            printed: Some(q.to_string()),
            note: match &found {
                Some(c) => format!("printed entry {} is not in the search result; certified in its place: {}", i + 1, c.eta),
                None => format!("printed entry {} is not in the search result", i + 1),
            },
            found,
        });
    }
    for x in unmatched_found {
        discrepancies.push(Discrepancy {
            level: x.eisenstein.level(),
            printed: None,
            note: format!("{} is certified but not printed", x.eta),
            found: Some(x.clone()),
        });
    }
    for x in weight2.iter().filter(|x| !x.primitive) {
        if let Some(i) = x.printed_index {
            discrepancies.push(Discrepancy {
                level: x.eisenstein.level(),
                printed: Some(x.eta.to_string()),
                note: format!(
                    "printed entry {} is in P_2({}) but is not a primitive eta quotient",
                    i + 1,
                    x.eisenstein.level()
                ),
                found: Some(x.clone()),
            });
        }
    }
    discrepancies.sort_by(|a, b| a.note.cmp(&b.note));

    let weight2_verbatim = weight2.iter().filter(|x| x.printed_index.is_some()).count();
    let weight2_verbatim_primitive = weight2.iter().filter(|x| x.printed_index.is_some() && x.primitive).count();
    let weight4_exact = weight4.len() == printed4.len() && weight4.iter().all(|x| x.printed_index.is_some());
    let holds = counts.iter().chain(&excluded).all(|c| c.found == c.expected)
        && weight4_exact
        && discrepancies.iter().all(|d| d.found.is_some() && d.level == 4);
    Ok(CorollaryReport {
        counts,
        weight2,
        weight4,
        excluded,
        weight2_verbatim,
        weight2_verbatim_primitive,
        weight4_exact,
        discrepancies,
        holds,
    })
}

/// The sixteen classified quotients with their Eisenstein forms.
pub fn classified_pairs() -> Result<Vec<SearchPair>> {
    let results: Vec<SearchResult> = NONEMPTY_CASES
        .par_iter()
        .map(|&(k, p, m)| enumerate_eta_in_e(k, p, m))
        .collect::<Result<_>>()?;
    Ok(results.into_iter().flat_map(|r| r.pairs).collect())
}

/// Whether two Eisenstein elements agree as series on `q^0 .. q^{prec-1}`.
pub fn certify_equal(eta: &EtaQuotient, e: &EisensteinElement, prec: i64) -> Result<bool> {
    let lhs = eta.expansion(prec)?;
    let rhs = e.expansion(prec)?;
    Ok(lhs.first_mismatch(&rhs)?.is_none())
}

/// Rational `x` with `x = c * y` for every coordinate, if one exists.
pub(crate) fn proportional(x: &[Rational], y: &[Rational]) -> Option<Rational> {
    let (i, y0) = y.iter().enumerate().find(|(_, v)| !v.is_zero())?;
    let c = &x[i] / y0;
    (!c.is_zero() && x.iter().zip(y).all(|(a, b)| *a == &c * b)).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::linalg::determinant;

    #[test]
    fn order_matrices_are_invertible() {
        for p in [2u64, 3, 5, 7] {
            for m in 0..=5u32 {
                assert!(!determinant(&order_matrix(p, m).unwrap()).is_zero(), "p={p} m={m}");
            }
        }
    }

    #[test]
    fn order_matrix_matches_eta_orders() {
        let a = order_matrix(2, 2).unwrap();
        let f = EtaQuotient::new(4, [(1, -8), (2, 20), (4, -8)]).unwrap();
        for (i, c) in [1u64, 2, 4].into_iter().enumerate() {
            let o: Rational = a[i]
                .iter()
                .zip([-8i64, 20, -8])
                .map(|(x, r)| x * rat_int(r))
                .sum();
            assert_eq!(o, f.order_at_denominator(c).unwrap());
        }
    }

    #[test]
    fn grid_enumeration() {
        let g = order_grid(&[1, 1, 1], &[24, 48, 24], 24);
        assert!(g.iter().all(|u| u.iter().sum::<u64>() == 24));
        assert_eq!(g.len(), (0..=24u64).map(|a| 24 - a + 1).sum::<u64>() as usize);
        assert!(order_grid(&[1], &[24], 30).is_empty());
    }

    #[test]
    fn level_four_weight_two() {
        let r = enumerate_eta_in_e(2, 2, 2).unwrap();
        let found: Vec<String> = r.pairs.iter().map(|x| x.eta.to_string()).collect();
        assert_eq!(found.len(), 3);
        assert!(found.contains(&"eta(1)^-8*eta(2)^20*eta(4)^-8".to_string()));
        assert!(found.contains(&"eta(2)^-4*eta(4)^8".to_string()));
        assert!(found.contains(&"eta(1)^8*eta(2)^-4".to_string()));
    }

    #[test]
    fn level_two_cases() {
        assert!(enumerate_eta_in_e(2, 2, 1).unwrap().pairs.is_empty());
        let r = enumerate_eta_in_e(4, 2, 1).unwrap();
        let found: Vec<String> = r.pairs.iter().map(|x| x.eta.to_string()).collect();
        assert_eq!(found, ["eta(1)^-8*eta(2)^16", "eta(1)^16*eta(2)^-8"]);
    }

    #[test]
    fn proportionality() {
        let x = [rat_int(4), rat_int(-4), rat_int(0)];
        let y = [rat_int(1), rat_int(-1), rat_int(0)];
        assert_eq!(proportional(&x, &y), Some(rat_int(4)));
        assert_eq!(proportional(&y, &[rat_int(1), rat_int(1), rat_int(0)]), None);
        assert_eq!(proportional(&[rat_int(0), rat_int(0), rat_int(0)], &y), None);
    }
}
