//! Eta quotients `prod_{t | N} eta(tz)^{r_t}`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{divisors, euler_phi, gcd, lcm, prime_power, rat, serde_rational, Rational};
use crate::eisenstein::E2Combination;
use crate::error::{Error, Result};
use crate::parse;
use crate::qseries::{eta_series, QSeries, ETA_SCALE};

/// An eta quotient of a fixed level. The level is carried explicitly and may
/// be any multiple of the lcm of the support.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EtaQuotient {
    level: u64,
    exponents: BTreeMap<u64, i64>,
}

impl EtaQuotient {
    pub fn new(level: u64, exponents: impl IntoIterator<Item = (u64, i64)>) -> Result<Self> {
        if level == 0 {
            return Err(Error::domain("level must be positive"));
        }
        let mut map = BTreeMap::new();
        for (t, r) in exponents {
            if t == 0 || level % t != 0 {
                return Err(Error::domain(format!("eta({t}) does not divide level {level}")));
            }
            *map.entry(t).or_insert(0) += r;
        }
        map.retain(|_, r| *r != 0);
        Ok(EtaQuotient { level, exponents: map })
    }

    /// Quotient whose level is the lcm of its support.
    pub fn from_exponents(exponents: impl IntoIterator<Item = (u64, i64)>) -> Result<Self> {
        let terms: Vec<(u64, i64)> = exponents.into_iter().collect();
        let level = terms.iter().filter(|(_, r)| *r != 0).fold(1, |acc, (t, _)| lcm(acc, *t));
        if terms.iter().any(|(t, _)| *t == 0) {
            return Err(Error::domain("eta(0) is not defined"));
        }
        Self::new(level, terms)
    }

    pub fn parse_with_level(s: &str, level: Option<u64>) -> Result<Self> {
        let terms = parse::eta_terms(s)?;
        match level {
            Some(n) => Self::new(n, terms),
            None => Self::from_exponents(terms),
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Nonzero exponents keyed by `t`.
    pub fn exponents(&self) -> &BTreeMap<u64, i64> {
        &self.exponents
    }

    pub fn exponent(&self, t: u64) -> i64 {
        self.exponents.get(&t).copied().unwrap_or(0)
    }

    /// Same quotient regarded at a multiple of its level.
    pub fn at_level(&self, level: u64) -> Result<Self> {
        if level % self.level != 0 {
            return Err(Error::domain(format!("{level} is not a multiple of {}", self.level)));
        }
        Self::new(level, self.exponents.clone())
    }

    /// `(sum r_t) / 2`.
    pub fn weight(&self) -> Rational {
        rat(self.exponents.values().sum(), 2)
    }

    /// Exponent of the leading `q` power in `1/24` units: `sum t r_t`.
    pub fn offset(&self) -> i64 {
        self.exponents.iter().map(|(&t, &r)| t as i64 * r).sum()
    }

    /// Exact expansion at infinity, known modulo `q^prec`.
    pub fn expansion(&self, prec: i64) -> Result<QSeries> {
        let prec_units = prec * ETA_SCALE as i64;
        let offset = self.offset();
        if prec_units <= offset {
            return Err(Error::PrecisionExhausted(format!(
                "precision q^{prec} does not exceed the offset q^({offset}/24)"
            )));
        }
        // relative length needed beyond the leading power
        let rel = Integer::div_ceil(&(prec_units - offset), &(ETA_SCALE as i64)) + 1;
        let eta = eta_series(rel)?;
        let mut acc: QSeries = QSeries::one(ETA_SCALE, rel * ETA_SCALE as i64)?;
        for (&t, &r) in &self.exponents {
            let factor = eta.substitute(t)?.pow(r)?;
            acc = acc.mul(&factor)?;
        }
        acc.truncate(prec_units)
    }

    /// Order at any cusp `a/c` in the local variable `q_{c,N}`:
    /// `N / (24 gcd(c^2, N)) * sum_t gcd(c, t)^2 r_t / t`.
    pub fn order_at_denominator(&self, c: u64) -> Result<Rational> {
        let n = self.level;
        if c == 0 || n % c != 0 {
            return Err(Error::domain(format!("{c} does not divide level {n}")));
        }
        let sum: Rational = self
            .exponents
            .iter()
            .map(|(&t, &r)| {
                let g = gcd(c, t) as i64;
                rat(g * g * r, t as i64)
            })
            .sum();
        Ok(sum * rat(n as i64, 24 * gcd(c * c, n) as i64))
    }

    /// Sum of orders over all cusps of `Gamma0(p^m)`.
    pub fn total_cusp_order(&self) -> Result<Rational> {
        if prime_power(self.level).is_none() {
            return Err(Error::domain(format!("level {} is not a prime power", self.level)));
        }
        divisors(self.level)
            .into_iter()
            .map(|c| {
                let mult = cusps_with_denominator(self.level, c);
                Ok(self.order_at_denominator(c)? * rat(mult as i64, 1))
            })
            .sum()
    }

    /// Newman/Ligozat criteria for membership in `M_k(Gamma0(N))` with trivial
    /// character, plus holomorphy at every cusp.
    pub fn modularity(&self) -> ModularityReport {
        let n = self.level;
        let mut conditions = Vec::new();
        let sum_t: i64 = self.offset();
        conditions.push(Condition::new("sum t*r_t = 0 mod 24", sum_t.rem_euclid(24) == 0));
        let sum_nt: i64 = self.exponents.iter().map(|(&t, &r)| (n / t) as i64 * r).sum();
        conditions.push(Condition::new("sum (N/t)*r_t = 0 mod 24", sum_nt.rem_euclid(24) == 0));
        let weight = self.weight();
        let even_weight = weight.is_integer() && weight.numer().is_even();
        conditions.push(Condition::new("even integral weight", even_weight));
        conditions.push(Condition::new("prod t^r_t is a rational square", self.character_is_trivial()));

        let order_map: BTreeMap<u64, Rational> = divisors(n)
            .into_iter()
            .map(|c| (c, self.order_at_denominator(c).expect("c divides N")))
            .collect();
        let holomorphic = order_map.values().all(|o| !o.is_negative());
        ModularityReport {
            holomorphic_at_cusps: holomorphic,
            order_map,
            conditions,
        }
    }

    fn character_is_trivial(&self) -> bool {
        // prod t^{r_t} is a square in Q iff prod t^{|r_t|} is a square in Z
        let mut product = BigInt::from(1);
        for (&t, &r) in &self.exponents {
            product *= num_traits::pow(BigInt::from(t), r.unsigned_abs() as usize);
        }
        let root = product.sqrt();
        &root * &root == product
    }

    /// `f(t0 z)` at level `N t0`.
    pub fn rescale(&self, t0: u64) -> Result<Self> {
        if t0 == 0 {
            return Err(Error::domain("rescaling by 0"));
        }
        Self::new(self.level * t0, self.exponents.iter().map(|(&t, &r)| (t * t0, r)))
    }

    /// `f^l`.
    pub fn power(&self, l: i64) -> Self {
        EtaQuotient {
            level: self.level,
            exponents: self
                .exponents
                .iter()
                .map(|(&t, &r)| (t, r * l))
                .filter(|(_, r)| *r != 0)
                .collect(),
        }
    }

    /// Product at the lcm of the two levels.
    pub fn product(&self, other: &Self) -> Self {
        let level = lcm(self.level, other.level);
        Self::new(
            level,
            self.exponents
                .iter()
                .chain(&other.exponents)
                .map(|(&t, &r)| (t, r)),
        )
        .expect("support divides lcm of levels")
    }

    /// False iff `f(z) = g(dz)` for an eta quotient `g` and some `d > 1`.
    pub fn is_primitive(&self) -> bool {
        self.exponents.keys().fold(0u64, |acc, &t| gcd(acc, t)) == 1
    }

    /// `D(f)/f = -sum_t t r_t E_2(tz)`.
    pub fn log_derivative(&self) -> E2Combination {
        E2Combination::new(
            self.level,
            self.exponents
                .iter()
                .map(|(&t, &r)| (t, rat(-(t as i64) * r, 1))),
        )
    }
}

/// Number of inequivalent cusps of `Gamma0(N)` with denominator `c`.
pub fn cusps_with_denominator(n: u64, c: u64) -> u64 {
    euler_phi(gcd(c, n / c))
}

impl fmt::Display for EtaQuotient {
    /// Canonical form `eta(1)^a*eta(2)^b`, `1` for the empty product.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .exponents
            .iter()
            .map(|(t, r)| format!("eta({t})^{r}"))
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl FromStr for EtaQuotient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with_level(s, None)
    }
}

impl Serialize for EtaQuotient {
    /// `{level, exponents: {t: r_t}}`.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let exps: BTreeMap<String, i64> = self.exponents.iter().map(|(t, r)| (t.to_string(), *r)).collect();
        let mut st = s.serialize_struct("EtaQuotient", 2)?;
        st.serialize_field("level", &self.level)?;
        st.serialize_field("exponents", &exps)?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub satisfied: bool,
}

impl Condition {
    fn new(name: &str, satisfied: bool) -> Self {
        Condition {
            name: name.to_string(),
            satisfied,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModularityReport {
    pub holomorphic_at_cusps: bool,
    /// Order at the cusps with denominator `c`, one entry per divisor of `N`.
    #[serde(serialize_with = "serde_rational::map::serialize")]
    pub order_map: BTreeMap<u64, Rational>,
    pub conditions: Vec<Condition>,
}

impl ModularityReport {
    /// Modular function of even weight on `Gamma0(N)` with trivial character.
    pub fn is_modular(&self) -> bool {
        self.conditions.iter().all(|c| c.satisfied)
    }

    /// Holomorphic modular form with trivial character.
    pub fn is_holomorphic_form(&self) -> bool {
        self.is_modular() && self.holomorphic_at_cusps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;
    use crate::qseries::Valuation;
    use proptest::prelude::*;

    fn eta(level: u64, e: &[(u64, i64)]) -> EtaQuotient {
        EtaQuotient::new(level, e.iter().copied()).unwrap()
    }

    fn jacobi() -> EtaQuotient {
        eta(4, &[(1, -8), (2, 20), (4, -8)])
    }

    #[test]
    fn weights() {
        assert_eq!(jacobi().weight(), rat_int(2));
        assert_eq!(eta(2, &[(1, -4), (2, 2)]).weight(), rat_int(-1));
        assert_eq!(eta(1, &[]).weight(), rat_int(0));
    }

    #[test]
    fn jacobi_expansion_counts_four_squares() {
        let s = jacobi().expansion(8).unwrap();
        assert_eq!(s.offset(), 0);
        // r_4(n) = 8 sigma(n) - 32 sigma(n/4)
        let expected = [1, 8, 24, 32, 24, 48, 96, 64];
        for (n, c) in expected.iter().enumerate() {
            assert_eq!(s.coeff(24 * n as i64), Some(rat_int(*c)));
        }
    }

    #[test]
    fn expansion_offsets() {
        let s = eta(4, &[(2, -4), (4, 8)]).expansion(5).unwrap();
        assert_eq!(s.valuation(), Valuation::At(24));
        let one = eta(1, &[]).expansion(3).unwrap();
        assert_eq!(one.terms().count(), 1);
        assert!(matches!(eta(1, &[(1, 48)]).expansion(2), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn orders_of_jacobi_quotient() {
        let f = jacobi();
        assert_eq!(f.order_at_denominator(2).unwrap(), rat_int(1));
        assert_eq!(f.order_at_denominator(1).unwrap(), rat_int(0));
        assert_eq!(f.order_at_denominator(4).unwrap(), rat_int(0));
        assert!(f.order_at_denominator(3).is_err());
    }

    #[test]
    fn total_orders() {
        assert_eq!(jacobi().total_cusp_order().unwrap(), rat_int(1));
        assert_eq!(eta(2, &[(1, -8), (2, 16)]).total_cusp_order().unwrap(), rat_int(1));
        assert_eq!(eta(1, &[]).total_cusp_order().unwrap(), rat_int(0));
        assert!(eta(6, &[(1, 1)]).total_cusp_order().is_err());
    }

    #[test]
    fn modularity_examples() {
        let r = jacobi().modularity();
        assert!(r.is_holomorphic_form());
        let r = eta(9, &[(1, -3), (9, 3)]).modularity();
        assert!(r.is_modular());
        assert!(!r.holomorphic_at_cusps);
        assert_eq!(r.order_map[&1], rat_int(-1));
        assert_eq!(r.order_map[&3], rat_int(0));
        assert_eq!(r.order_map[&9], rat_int(1));
        let r = eta(1, &[(1, 1)]).modularity();
        assert!(!r.conditions[0].satisfied);
        assert!(!r.is_modular());
    }

    #[test]
    fn rescale_power_primitivity() {
        let f = eta(1, &[(1, -2)]);
        assert_eq!(f.rescale(2).unwrap(), eta(2, &[(2, -2)]));
        assert!(!eta(2, &[(2, -2)]).is_primitive());
        assert!(eta(2, &[(1, -4), (2, 2)]).is_primitive());
        assert_eq!(f.power(3), eta(1, &[(1, -6)]));
    }

    #[test]
    fn log_derivative_coefficients() {
        let ld = eta(4, &[(1, -8), (4, 8)]).log_derivative();
        assert_eq!(ld.coeffs().get(&1), Some(&rat_int(8)));
        assert_eq!(ld.coeffs().get(&4), Some(&rat_int(-32)));
        assert!(ld.in_e2());
        let ld = eta(1, &[(1, -2)]).log_derivative();
        assert_eq!(ld.coeffs().get(&1), Some(&rat_int(2)));
        assert!(!ld.in_e2());
        let ld = eta(9, &[(1, -3), (9, 3)]).log_derivative();
        assert_eq!(ld.coeffs().get(&9), Some(&rat_int(-27)));
    }

    #[test]
    fn text_and_json() {
        let f: EtaQuotient = "eta(1)^-8*eta(2)^20*eta(4)^-8".parse().unwrap();
        assert_eq!(f, jacobi());
        assert_eq!(f.to_string(), "eta(1)^-8*eta(2)^20*eta(4)^-8");
        assert_eq!(
            serde_json::to_string(&f).unwrap(),
            r#"{"level":4,"exponents":{"1":-8,"2":20,"4":-8}}"#
        );
        assert!(EtaQuotient::parse_with_level("eta(3)^2", Some(4)).is_err());
    }

    fn arb_quotient() -> impl Strategy<Value = EtaQuotient> {
        (prop_oneof![Just(2u64), Just(4), Just(8), Just(9), Just(12)], proptest::collection::vec(-6i64..=6, 6))
            .prop_map(|(n, r)| EtaQuotient::new(n, divisors(n).into_iter().zip(r)).unwrap())
    }

    proptest! {
        #[test]
        fn valuation_matches_order_at_infinity(f in arb_quotient()) {
            let offset = f.offset();
            let prec = offset.div_euclid(24) + 3;
            let s = f.expansion(prec).unwrap();
            let order = f.order_at_denominator(f.level()).unwrap();
            prop_assert_eq!(s.valuation(), Valuation::At(offset));
            prop_assert_eq!(order * rat_int(24), rat_int(offset));
        }

        #[test]
        fn d_of_expansion_is_expansion_times_log_derivative(f in arb_quotient()) {
            let prec = f.offset().div_euclid(24) + 12;
            let s = f.expansion(prec).unwrap();
            let ld = f.log_derivative().expansion(prec).unwrap();
            let lhs = s.ramanujan_d();
            let rhs = s.mul(&ld).unwrap();
            prop_assert_eq!(lhs.first_mismatch(&rhs).unwrap(), None);
        }

        #[test]
        fn rescale_is_substitution(f in arb_quotient(), t0 in 1u64..4) {
            let prec = f.offset().div_euclid(24) + 6;
            let lhs = f.rescale(t0).unwrap().expansion(prec * t0 as i64).unwrap();
            let rhs = f.expansion(prec).unwrap().substitute(t0).unwrap();
            prop_assert_eq!(lhs.first_mismatch(&rhs).unwrap(), None);
        }

        #[test]
        fn valence_identity_for_holomorphic_forms(f in arb_quotient()) {
            let (p, m) = match prime_power(f.level()) { Some(pm) => pm, None => return Ok(()) };
            let report = f.modularity();
            prop_assume!(report.is_holomorphic_form());
            let k = f.weight();
            let expected = k / rat_int(12) * rat_int((p.pow(m) + p.pow(m - 1)) as i64);
            prop_assert_eq!(f.total_cusp_order().unwrap(), expected);
        }
    }

    #[test]
    fn valence_identity_exhaustive_small() {
        // every exponent vector with |r_t| <= 4 at level 4
        let mut checked = 0;
        for r1 in -4..=4 {
            for r2 in -4..=4 {
                for r4 in -4..=4 {
                    let f = eta(4, &[(1, r1), (2, r2), (4, r4)]);
                    let k = f.weight();
                    let expected = k / rat_int(12) * rat_int(6);
                    assert_eq!(f.total_cusp_order().unwrap(), expected);
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 729);
    }

    #[test]
    fn hash_is_consistent() {
        use std::collections::HashSet;
        let set: HashSet<EtaQuotient> = [jacobi(), jacobi()].into_iter().collect();
        assert_eq!(set.len(), 1);
    }
}
