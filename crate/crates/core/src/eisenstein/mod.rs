//! Eisenstein series `E_k` and the spaces spanned by `E_k(tz)`, `t | N`.

pub mod identities;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::linalg::{solve, LinearSolution};
use crate::arith::{bernoulli, divisors, format_rational, gamma0_index, lcm, prime_power, rat, sigma, Rational};
use crate::error::{Error, Result};
use crate::eta::EtaQuotient;
use crate::parse;
use crate::qseries::{QSeries, ETA_SCALE};

pub use identities::{verify_identities, IdentityReport, IdentityStatus};

/// Constant term `-B_k / (2k)` of `E_k`.
pub fn constant_term(k: u32) -> Result<Rational> {
    let b = bernoulli(k as i64)?;
    Ok(-b / rat(2 * k as i64, 1))
}

fn check_weight(k: u32) -> Result<()> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::domain(format!("weight must be even and >= 2, got {k}")));
    }
    Ok(())
}

/// `E_k = -B_k/(2k) + sum sigma_{k-1}(n) q^n`, known modulo `q^prec`.
pub fn e_k_series(k: u32, prec: i64) -> Result<QSeries> {
    combination_series(k, &BTreeMap::from([(1, Rational::one())]), prec)
}

/// `sum_t c_t E_k(tz)` in integral powers of `q`, known modulo `q^prec`.
fn combination_series(k: u32, coeffs: &BTreeMap<u64, Rational>, prec: i64) -> Result<QSeries> {
    check_weight(k)?;
    if prec < 1 {
        return Err(Error::PrecisionExhausted(format!("precision q^{prec} is empty")));
    }
    let len = prec as usize;
    let mut out = vec![Rational::zero(); len];
    let total: Rational = coeffs.values().sum();
    out[0] = constant_term(k)? * total;
    let sig: Vec<Rational> = (0..len)
        .map(|n| {
            if n == 0 {
                Ok(Rational::zero())
            } else {
                sigma(k - 1, n as i64).map(Rational::from_integer)
            }
        })
        .collect::<Result<_>>()?;
    for (&t, c) in coeffs {
        let t = t as usize;
        let mut n = t;
        while n < len {
            out[n] += c * &sig[n / t];
            n += t;
        }
    }
    QSeries::new(1, 0, out)
}

/// `floor(k * [SL2(Z) : Gamma0(N)] / 12)`.
pub fn sturm_bound(k: u32, n: u64) -> u64 {
    k as u64 * gamma0_index(n) / 12
}

/// Where an element of `E_k(p^m)` sits relative to lower levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MembershipTag {
    #[serde(rename = "in_P")]
    InP,
    #[serde(rename = "in_O_lower_level")]
    InOLowerLevel,
    #[serde(rename = "in_O_rescaled")]
    InORescaled,
    #[serde(rename = "zero")]
    Zero,
}

impl fmt::Display for MembershipTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MembershipTag::InP => "in_P",
            MembershipTag::InOLowerLevel => "in_O_lower_level",
            MembershipTag::InORescaled => "in_O_rescaled",
            MembershipTag::Zero => "zero",
        })
    }
}

/// `sum_{t | N} r_t E_k(tz)` with rational `r_t`. For `k = 2` the
/// coefficients satisfy `sum r_t / t = 0`, which makes the element modular.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EisensteinElement {
    weight: u32,
    level: u64,
    coeffs: BTreeMap<u64, Rational>,
}

impl EisensteinElement {
    pub fn new(weight: u32, level: u64, coeffs: impl IntoIterator<Item = (u64, Rational)>) -> Result<Self> {
        check_weight(weight)?;
        if level == 0 {
            return Err(Error::domain("level must be positive"));
        }
        let mut map: BTreeMap<u64, Rational> = BTreeMap::new();
        for (t, r) in coeffs {
            if t == 0 || level % t != 0 {
                return Err(Error::domain(format!("E{weight}({t}) does not divide level {level}")));
            }
            *map.entry(t).or_insert_with(Rational::zero) += r;
        }
        map.retain(|_, r| !r.is_zero());
        if weight == 2 {
            let s: Rational = map.iter().map(|(&t, r)| r / rat(t as i64, 1)).sum();
            if !s.is_zero() {
                return Err(Error::domain(format!(
                    "weight 2 coefficients must satisfy sum r_t/t = 0, got {}",
                    format_rational(&s)
                )));
            }
        }
        Ok(EisensteinElement {
            weight,
            level,
            coeffs: map,
        })
    }

    /// Level taken as the lcm of the support when `level` is `None`.
    pub fn parse_with_level(s: &str, level: Option<u64>) -> Result<Self> {
        let (k, terms) = parse::eisenstein_terms(s)?;
        let level = level.unwrap_or_else(|| terms.iter().fold(1, |acc, (t, _)| lcm(acc, *t)));
        Self::new(k, level, terms)
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Nonzero coefficients keyed by `t`.
    pub fn coeffs(&self) -> &BTreeMap<u64, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, t: u64) -> Rational {
        self.coeffs.get(&t).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn at_level(&self, level: u64) -> Result<Self> {
        if level % self.level != 0 {
            return Err(Error::domain(format!("{level} is not a multiple of {}", self.level)));
        }
        Self::new(self.weight, level, self.coeffs.clone())
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        EisensteinElement {
            weight: self.weight,
            level: self.level,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&t, r)| (t, r * c))
                .filter(|(_, r)| !r.is_zero())
                .collect(),
        }
    }

    /// `f(t0 z)` at level `N t0`.
    pub fn rescale(&self, t0: u64) -> Result<Self> {
        Self::new(self.weight, self.level * t0, self.coeffs.iter().map(|(&t, r)| (t * t0, r.clone())))
    }

    /// `q`-expansion at infinity, known modulo `q^prec`.
    pub fn expansion(&self, prec: i64) -> Result<QSeries> {
        combination_series(self.weight, &self.coeffs, prec)
    }

    pub fn classify(&self) -> Result<MembershipTag> {
        if prime_power(self.level).is_none() {
            return Err(Error::domain(format!("level {} is not a prime power", self.level)));
        }
        Ok(if self.is_zero() {
            MembershipTag::Zero
        } else if self.coeff(self.level).is_zero() {
            MembershipTag::InOLowerLevel
        } else if self.coeff(1).is_zero() {
            MembershipTag::InORescaled
        } else {
            MembershipTag::InP
        })
    }

    /// Ratio `c` with `self = c * other`, if one exists and `other != 0`.
    pub fn ratio_to(&self, other: &Self) -> Option<Rational> {
        if self.weight != other.weight || other.is_zero() {
            return None;
        }
        let (t0, r0) = other.coeffs.iter().next()?;
        let c = self.coeff(*t0) / r0;
        let keys: std::collections::BTreeSet<u64> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.into_iter()
            .all(|t| self.coeff(t) == &c * other.coeff(t))
            .then_some(c)
    }
}

impl fmt::Display for EisensteinElement {
    /// `8*E2(1)-32*E2(4)`; the zero element renders as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_combination(f, self.weight, &self.coeffs)
    }
}

fn fmt_combination(f: &mut fmt::Formatter<'_>, k: u32, coeffs: &BTreeMap<u64, Rational>) -> fmt::Result {
    if coeffs.is_empty() {
        return f.write_str("0");
    }
    for (i, (t, r)) in coeffs.iter().enumerate() {
        let sign = if r.is_negative() {
            "-"
        } else if i == 0 {
            ""
        } else {
            "+"
        };
        write!(f, "{sign}{}*E{k}({t})", format_rational(&r.abs()))?;
    }
    Ok(())
}

impl FromStr for EisensteinElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with_level(s, None)
    }
}

impl Serialize for EisensteinElement {
    /// `{weight, level, coeffs: {t: "p/q"}}`.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: BTreeMap<String, String> =
            self.coeffs.iter().map(|(t, r)| (t.to_string(), format_rational(r))).collect();
        let mut st = s.serialize_struct("EisensteinElement", 3)?;
        st.serialize_field("weight", &self.weight)?;
        st.serialize_field("level", &self.level)?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

/// A weight-2 combination `sum c_t E_2(tz)` without the modularity
/// constraint, as produced by logarithmic derivatives of eta quotients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E2Combination {
    level: u64,
    coeffs: BTreeMap<u64, Rational>,
}

impl E2Combination {
    pub fn new(level: u64, coeffs: impl IntoIterator<Item = (u64, Rational)>) -> Self {
        let mut map: BTreeMap<u64, Rational> = BTreeMap::new();
        for (t, c) in coeffs {
            *map.entry(t).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        E2Combination { level, coeffs: map }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coeffs(&self) -> &BTreeMap<u64, Rational> {
        &self.coeffs
    }

    /// Whether `sum c_t / t = 0`, i.e. the combination lies in `E_2(N)`.
    pub fn in_e2(&self) -> bool {
        self.coeffs
            .iter()
            .map(|(&t, c)| c / rat(t as i64, 1))
            .sum::<Rational>()
            .is_zero()
    }

    pub fn to_element(&self) -> Result<EisensteinElement> {
        EisensteinElement::new(2, self.level, self.coeffs.clone())
    }

    pub fn expansion(&self, prec: i64) -> Result<QSeries> {
        combination_series(2, &self.coeffs, prec)
    }
}

impl fmt::Display for E2Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_combination(f, 2, &self.coeffs)
    }
}

/// Number of `q`-coefficients used when matching an eta quotient of weight
/// `k` and level `N` against `E_k(N)`.
pub fn match_precision(k: u32, n: u64) -> i64 {
    (2 * sturm_bound(k, n)).max(n) as i64 + 1
}

/// Writes a holomorphic eta quotient of even weight `k >= 2` as an element
/// of `E_k(N)` if it is one.
///
/// The coefficients come from exact elimination on the first
/// [`match_precision`] coefficients, which reach twice the Sturm bound, so a
/// returned element is certified equal to the quotient.
pub fn match_eta(g: &EtaQuotient) -> Result<Option<EisensteinElement>> {
    let report = g.modularity();
    if !report.is_holomorphic_form() {
        return Err(Error::domain(format!("{g} is not a holomorphic modular form on Gamma0({})", g.level())));
    }
    let w = g.weight();
    let k = w.to_integer();
    if k < BigInt::from(2) {
        return Err(Error::domain(format!("{g} has weight {w} < 2")));
    }
    let k: u32 = (&k).try_into().map_err(|_| Error::domain("weight out of range"))?;
    let n = g.level();
    let prec = match_precision(k, n);
    let target = g.expansion(prec)?;
    let ts = divisors(n);
    let columns: Vec<QSeries> = ts
        .iter()
        .map(|&t| combination_series(k, &BTreeMap::from([(t, Rational::one())]), prec))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for e in 0..prec {
        rows.push(columns.iter().map(|c| c.coeffs()[e as usize].clone()).collect());
        rhs.push(target.coeff(e * ETA_SCALE as i64).expect("within precision"));
    }
    if k == 2 {
        rows.push(ts.iter().map(|&t| rat(1, t as i64)).collect());
        rhs.push(Rational::zero());
    }
    match solve(&rows, &rhs) {
        LinearSolution::Unique(x) => {
            let element = EisensteinElement::new(k, n, ts.iter().copied().zip(x))?;
            let lhs = element.expansion(prec)?;
            Ok(lhs.first_mismatch(&target)?.is_none().then_some(element))
        }
        LinearSolution::Inconsistent => Ok(None),
        LinearSolution::Underdetermined => Err(Error::PrecisionExhausted(format!(
            "{prec} coefficients do not determine a combination for {g}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;

    fn el(k: u32, n: u64, c: &[(u64, i64)]) -> EisensteinElement {
        EisensteinElement::new(k, n, c.iter().map(|&(t, r)| (t, rat_int(r)))).unwrap()
    }

    fn eta(level: u64, e: &[(u64, i64)]) -> EtaQuotient {
        EtaQuotient::new(level, e.iter().copied()).unwrap()
    }

    /// `sigma_{k-1}` by trial division, independent of the divisor helper.
    fn sigma_naive(p: u32, n: i64) -> i64 {
        (1..=n).filter(|d| n % d == 0).map(|d| d.pow(p)).sum()
    }

    #[test]
    fn e_k_leading_terms() {
        let e2 = e_k_series(2, 5).unwrap();
        let want = [rat(-1, 24), rat_int(1), rat_int(3), rat_int(4), rat_int(7)];
        assert_eq!(e2.coeffs(), &want);
        let e4 = e_k_series(4, 4).unwrap();
        assert_eq!(e4.coeffs(), &[rat(1, 240), rat_int(1), rat_int(9), rat_int(28)]);
        for k in [2u32, 4, 6, 8] {
            let s = e_k_series(k, 40).unwrap();
            for n in 1..40 {
                assert_eq!(s.coeffs()[n as usize], rat_int(sigma_naive(k - 1, n)));
            }
        }
        assert!(e_k_series(3, 4).is_err());
    }

    #[test]
    fn element_expansions() {
        let f = el(2, 4, &[(1, 8), (4, -32)]);
        let s = f.expansion(5).unwrap();
        assert_eq!(s.coeffs(), &[rat_int(1), rat_int(8), rat_int(24), rat_int(32), rat_int(24)]);
        let f = el(2, 2, &[(1, 1), (2, -2)]);
        let s = f.expansion(5).unwrap();
        assert_eq!(s.coeffs(), &[rat(1, 24), rat_int(1), rat_int(1), rat_int(4), rat_int(1)]);
        let f = el(4, 2, &[(1, 1), (2, -1)]);
        let s = f.expansion(4).unwrap();
        assert_eq!(s.coeffs(), &[rat_int(0), rat_int(1), rat_int(8), rat_int(28)]);
        let g = eta(2, &[(1, -8), (2, 16)]).expansion(30).unwrap();
        assert_eq!(f.expansion(30).unwrap().first_mismatch(&g).unwrap(), None);
    }

    #[test]
    fn weight_two_constraint() {
        let bad = EisensteinElement::new(2, 2, [(1, rat_int(1))]);
        assert!(matches!(bad, Err(Error::Domain(_))));
        assert!(EisensteinElement::new(4, 2, [(1, rat_int(1))]).is_ok());
        assert!(EisensteinElement::new(4, 2, [(3, rat_int(1))]).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(el(2, 4, &[(1, 8), (4, -32)]).classify().unwrap(), MembershipTag::InP);
        assert_eq!(el(2, 4, &[(2, 1), (4, -2)]).classify().unwrap(), MembershipTag::InORescaled);
        assert_eq!(el(4, 4, &[(1, 1), (2, -1)]).classify().unwrap(), MembershipTag::InOLowerLevel);
        assert_eq!(el(4, 4, &[]).classify().unwrap(), MembershipTag::Zero);
        assert!(el(4, 6, &[(1, 1)]).classify().is_err());
        assert_eq!(serde_json::to_string(&MembershipTag::InP).unwrap(), "\"in_P\"");
    }

    #[test]
    fn sturm_bounds() {
        assert_eq!(sturm_bound(2, 4), 1);
        assert_eq!(sturm_bound(4, 4), 2);
        assert_eq!(sturm_bound(2, 12), 4);
        assert_eq!(sturm_bound(12, 1), 1);
    }

    #[test]
    fn match_known_quotients() {
        let m = match_eta(&eta(4, &[(1, -8), (2, 20), (4, -8)])).unwrap().unwrap();
        assert_eq!(m, el(2, 4, &[(1, 8), (4, -32)]));
        let m = match_eta(&eta(4, &[(1, 8), (2, -4)])).unwrap().unwrap();
        assert_eq!(m, el(2, 4, &[(1, -8), (2, 48), (4, -64)]));
        let m = match_eta(&eta(2, &[(1, -8), (2, 16)])).unwrap().unwrap();
        assert_eq!(m, el(4, 2, &[(1, 1), (2, -1)]));
        let m = match_eta(&eta(4, &[(2, -4), (4, 8)])).unwrap().unwrap();
        assert_eq!(m, el(2, 4, &[(1, 1), (2, -3), (4, 2)]));
    }

    #[test]
    fn match_rejects_cusp_forms_and_non_forms() {
        // eta(z)^2 eta(11z)^2 is a cusp form of weight 2
        assert_eq!(match_eta(&eta(11, &[(1, 2), (11, 2)])).unwrap(), None);
        // Delta is a cusp form of weight 12
        assert_eq!(match_eta(&eta(1, &[(1, 24)])).unwrap(), None);
        assert!(match_eta(&eta(9, &[(1, -3), (9, 3)])).is_err());
    }

    #[test]
    fn match_inverts_expansion() {
        for f in [el(2, 4, &[(1, 8), (4, -32)]), el(4, 2, &[(1, 1), (2, -1)])] {
            let _ = f.expansion(10).unwrap();
        }
        let g = eta(9, &[(1, -3), (3, 10), (9, -3)]);
        let m = match_eta(&g).unwrap().unwrap();
        let s = m.expansion(40).unwrap();
        assert_eq!(s.first_mismatch(&g.expansion(40).unwrap()).unwrap(), None);
    }

    #[test]
    fn text_forms() {
        let f: EisensteinElement = "8*E2(1)-32*E2(4)".parse().unwrap();
        assert_eq!(f.level(), 4);
        assert_eq!(f.to_string(), "8*E2(1)-32*E2(4)");
        let g = EisensteinElement::parse_with_level("E4(1) - 1/3*E4(2)", Some(8)).unwrap();
        assert_eq!(g.to_string(), "1*E4(1)-1/3*E4(2)");
        assert_eq!(g.level(), 8);
        assert_eq!(
            serde_json::to_string(&f).unwrap(),
            r#"{"weight":2,"level":4,"coeffs":{"1":"8","4":"-32"}}"#
        );
        assert_eq!(f.ratio_to(&el(2, 4, &[(1, 1), (4, -4)])), Some(rat_int(8)));
        assert_eq!(f.ratio_to(&el(2, 4, &[(1, 2), (2, -4)])), None);
    }
}
