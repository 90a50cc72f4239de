//! Product-to-sum and convolution identities checked as exact truncated
//! series identities.

use rayon::prelude::*;
use serde::Serialize;

use super::{e_k_series, sturm_bound};
use crate::arith::{format_rational, rat, rat_int, Rational};
use crate::error::Result;
use crate::eta::EtaQuotient;
use crate::qseries::QSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityStatus {
    Ok,
    Mismatch,
    /// Exact check impossible; the identity carries an unspecified error term.
    AsymptoticOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub weight: u32,
    pub level: u64,
    /// Sturm bound for the weight and level.
    pub bound: u64,
    /// Coefficients compared: exponents `0 .. prec`.
    pub prec: i64,
    pub status: IdentityStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<String>,
    /// Difference of constant terms, reported for the asymptotic identities.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant_term_discrepancy: Option<String>,
}

fn e(k: u32, t: u64, prec: i64) -> Result<QSeries> {
    e_k_series(k, prec)?.substitute(t)?.truncate(prec)
}

fn d(x: QSeries) -> QSeries {
    x.ramanujan_d()
}

fn lin(terms: Vec<(Rational, QSeries)>) -> Result<QSeries> {
    let mut it = terms.into_iter();
    let (c, s) = it.next().expect("nonempty combination");
    let mut acc = s.scale_by(&c);
    for (c, s) in it {
        acc = acc.add(&s.scale_by(&c))?;
    }
    Ok(acc)
}

fn eta(level: u64, e: &[(u64, i64)]) -> EtaQuotient {
    EtaQuotient::new(level, e.iter().copied()).expect("fixed quotient")
}

type Sides = Result<(QSeries, QSeries)>;

struct Identity {
    name: &'static str,
    weight: u32,
    level: u64,
    sides: fn(i64) -> Sides,
}

fn e2_squared(p: i64) -> Sides {
    let lhs = e(2, 1, p)?.mul(&e(2, 1, p)?)?;
    let rhs = lin(vec![(rat(5, 12), e(4, 1, p)?), (rat(-1, 2), d(e(2, 1, p)?))])?;
    Ok((lhs, rhs))
}

fn e2_times_e2_2z(p: i64) -> Sides {
    let lhs = e(2, 1, p)?.mul(&e(2, 2, p)?)?;
    let rhs = lin(vec![
        (rat(1, 12), e(4, 1, p)?),
        (rat(1, 3), e(4, 2, p)?),
        (rat(-1, 8), d(e(2, 1, p)?)),
        (rat(-1, 4), d(e(2, 2, p)?)),
    ])?;
    Ok((lhs, rhs))
}

fn e2_times_e2_4z(p: i64) -> Sides {
    let lhs = e(2, 1, p)?.mul(&e(2, 4, p)?)?;
    let rhs = lin(vec![
        (rat(1, 48), e(4, 1, p)?),
        (rat(1, 16), e(4, 2, p)?),
        (rat(1, 3), e(4, 4, p)?),
        (rat(-1, 16), d(e(2, 1, p)?)),
        (rat(-1, 4), d(e(2, 4, p)?)),
    ])?;
    Ok((lhs, rhs))
}

fn e2_2z_squared(p: i64) -> Sides {
    let lhs = e(2, 2, p)?.mul(&e(2, 2, p)?)?;
    let rhs = lin(vec![(rat(5, 12), e(4, 2, p)?), (rat(-1, 4), d(e(2, 2, p)?))])?;
    Ok((lhs, rhs))
}

fn e2_4z_squared(p: i64) -> Sides {
    let lhs = e(2, 4, p)?.mul(&e(2, 4, p)?)?;
    let rhs = lin(vec![(rat(5, 12), e(4, 4, p)?), (rat(-1, 8), d(e(2, 4, p)?))])?;
    Ok((lhs, rhs))
}

fn e2_2z_times_e2_4z(p: i64) -> Sides {
    let lhs = e(2, 2, p)?.mul(&e(2, 4, p)?)?;
    let rhs = lin(vec![
        (rat(1, 12), e(4, 2, p)?),
        (rat(1, 3), e(4, 4, p)?),
        (rat(-1, 16), d(e(2, 2, p)?)),
        (rat(-1, 8), d(e(2, 4, p)?)),
    ])?;
    Ok((lhs, rhs))
}

fn jacobi_four_squares(p: i64) -> Sides {
    let lhs = eta(4, &[(1, -8), (2, 20), (4, -8)]).expansion(p)?;
    let rhs = lin(vec![(rat_int(8), e(2, 1, p)?), (rat_int(-32), e(2, 4, p)?)])?;
    Ok((lhs, rhs))
}

fn williams_level12(p: i64) -> Sides {
    let lhs = eta(12, &[(1, -2), (2, 2), (3, -2), (4, 4), (6, 6), (12, -4)]).expansion(p)?;
    let rhs = lin(vec![
        (rat_int(2), e(2, 1, p)?),
        (rat_int(-3), e(2, 2, p)?),
        (rat_int(4), e(2, 4, p)?),
        (rat_int(9), e(2, 6, p)?),
        (rat_int(-36), e(2, 12, p)?),
    ])?;
    Ok((lhs, rhs))
}

fn differential_level4(p: i64) -> Sides {
    let lhs = d(eta(4, &[(1, -8), (4, 8)]).expansion(p)?);
    let rhs = eta(2, &[(1, -16), (2, 20)]).expansion(p)?;
    Ok((lhs, rhs))
}

fn differential_level12(p: i64) -> Sides {
    let lhs = d(eta(12, &[(1, -4), (2, 3), (4, -2), (6, -3), (12, 6)]).expansion(p)?);
    let rhs = eta(12, &[(1, -6), (2, 5), (3, -2), (4, 2), (6, 3), (12, 2)])
        .expansion(p)?
        .scale_by(&rat_int(2));
    Ok((lhs, rhs))
}

const IDENTITIES: &[Identity] = &[
    Identity { name: "e2_squared", weight: 4, level: 1, sides: e2_squared },
    Identity { name: "e2_times_e2_2z", weight: 4, level: 2, sides: e2_times_e2_2z },
    Identity { name: "e2_times_e2_4z", weight: 4, level: 4, sides: e2_times_e2_4z },
    Identity { name: "e2_2z_squared", weight: 4, level: 2, sides: e2_2z_squared },
    Identity { name: "e2_4z_squared", weight: 4, level: 4, sides: e2_4z_squared },
    Identity { name: "e2_2z_times_e2_4z", weight: 4, level: 4, sides: e2_2z_times_e2_4z },
    Identity { name: "jacobi_four_squares", weight: 2, level: 4, sides: jacobi_four_squares },
    Identity { name: "williams_level12", weight: 2, level: 12, sides: williams_level12 },
    Identity { name: "differential_level4", weight: 2, level: 4, sides: differential_level4 },
    Identity { name: "differential_level12", weight: 2, level: 12, sides: differential_level12 },
];

/// Names of the exactly checkable identities.
pub fn identity_names() -> Vec<&'static str> {
    IDENTITIES.iter().map(|i| i.name).collect()
}

/// Coefficients compared for an identity: `max(requested, 2 * Sturm + 1)`
/// with a default request of 50.
fn effective_prec(requested: Option<i64>, bound: u64) -> i64 {
    requested.unwrap_or(50).max(2 * bound as i64 + 1)
}

fn check(id: &Identity, requested: Option<i64>) -> Result<IdentityReport> {
    let bound = sturm_bound(id.weight, id.level);
    let prec = effective_prec(requested, bound);
    let (lhs, rhs) = (id.sides)(prec)?;
    let mismatch = lhs.first_mismatch(&rhs)?;
    Ok(IdentityReport {
        identity: id.name.to_string(),
        weight: id.weight,
        level: id.level,
        bound,
        prec,
        status: if mismatch.is_none() { IdentityStatus::Ok } else { IdentityStatus::Mismatch },
        first_mismatch: mismatch.map(|e| format_rational(&e)),
        constant_term_discrepancy: None,
    })
}

/// Ramanujan's `theta^{4k}` display with its printed Eisenstein part. The
/// remainder term is not exact, so only the constant terms are compared.
fn ramanujan_mordell(k: u32, requested: Option<i64>) -> Result<IdentityReport> {
    let weight = 2 * k;
    let bound = sturm_bound(weight, 4);
    let prec = effective_prec(requested, bound);
    let theta = EtaQuotient::new(4, [(1, -2), (2, 5), (4, -2)])?;
    let lhs = theta.power(4 * k as i64).expansion(prec)?;
    let b = crate::arith::bernoulli(weight as i64)?;
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let denom = rat_int((1i64 << weight) - 1);
    let lead = rat_int(-2 * k as i64) / b;
    let rhs = lin(vec![
        (&lead * rat_int(sign) / &denom, e(weight, 1, prec)?),
        (&lead * rat_int(-(sign + 1)) / &denom, e(weight, 2, prec)?),
        (&lead * rat_int(1i64 << weight) / &denom, e(weight, 4, prec)?),
    ])?;
    let c_lhs = lhs.coeff(0).expect("constant term known");
    let c_rhs = rhs.coeff(0).expect("constant term known");
    Ok(IdentityReport {
        identity: format!("ramanujan_mordell_theta{}", 4 * k),
        weight,
        level: 4,
        bound,
        prec,
        status: IdentityStatus::AsymptoticOnly,
        first_mismatch: lhs.first_mismatch(&rhs)?.map(|e| format_rational(&e)),
        constant_term_discrepancy: Some(format_rational(&(c_lhs - c_rhs))),
    })
}

/// Runs every identity, in parallel, and returns reports sorted by name.
pub fn verify_identities(prec: Option<i64>) -> Result<Vec<IdentityReport>> {
    let mut reports: Vec<IdentityReport> = IDENTITIES
        .par_iter()
        .map(|id| check(id, prec))
        .chain([1u32, 2].into_par_iter().map(|k| ramanujan_mordell(k, prec)))
        .collect::<Result<_>>()?;
    reports.sort_by(|a, b| a.identity.cmp(&b.identity));
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_exact_identities_hold() {
        let reports = verify_identities(Some(50)).unwrap();
        assert_eq!(reports.len(), IDENTITIES.len() + 2);
        for r in &reports {
            if r.status != IdentityStatus::AsymptoticOnly {
                assert_eq!(r.status, IdentityStatus::Ok, "{}", r.identity);
                assert!(r.prec > 2 * r.bound as i64);
            }
        }
    }

    #[test]
    fn ramanujan_mordell_constant_terms_differ_by_one_half() {
        for k in [1, 2] {
            let r = ramanujan_mordell(k, None).unwrap();
            assert_eq!(r.constant_term_discrepancy.as_deref(), Some("1/2"));
        }
    }

    #[test]
    fn williams_constant_term() {
        let (lhs, rhs) = williams_level12(3).unwrap();
        assert_eq!(lhs.coeff(0), Some(rat_int(1)));
        assert_eq!(rhs.coeff(0), Some(rat_int(1)));
        assert_eq!(rat_int(2 - 3 + 4 + 9 - 36) * rat(-1, 24), rat_int(1));
    }

    #[test]
    fn a_wrong_identity_is_reported() {
        let lhs = e(2, 1, 20).unwrap().mul(&e(2, 1, 20).unwrap()).unwrap();
        let rhs = lin(vec![(rat(5, 12), e(4, 1, 20).unwrap()), (rat(1, 2), d(e(2, 1, 20).unwrap()))]).unwrap();
        assert_eq!(lhs.first_mismatch(&rhs).unwrap(), Some(rat_int(1)));
    }

    #[test]
    fn prec_floor_is_twice_sturm() {
        assert_eq!(effective_prec(Some(3), 4), 9);
        assert_eq!(effective_prec(None, 2), 50);
        assert_eq!(effective_prec(Some(60), 2), 60);
    }
}
