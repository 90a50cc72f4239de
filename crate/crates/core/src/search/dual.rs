//! Eta quotients whose derivative is an eta quotient.
//!
//! If `g = sum_t c_t E_2(tz)` lies in `E_2(N)`, then `f = prod eta(tz)^{r_t}`
//! with `r_t = -c_t / t` satisfies `D(f)/f = g` by the logarithmic derivative
//! of eta. When some `r_t` is fractional, `f^l` for the least `l` clearing the
//! denominators has `D(f^l) = l f^l g`.

use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use super::{classified_pairs, quotient};
use crate::arith::{format_rational, rat_int, Rational};
use crate::eisenstein::{match_eta, EisensteinElement};
use crate::error::{Error, Result};
use crate::eta::EtaQuotient;

/// `(f, g)` of weights `(0, 2)` with `D(f) = scalar * g`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualPair {
    pub f: EtaQuotient,
    pub g: EtaQuotient,
    pub scalar: i64,
    /// The weight-2 quotient in `E_2(N)` that induced the pair.
    pub source: EtaQuotient,
    pub eisenstein: EisensteinElement,
}

/// Full `q`-steps beyond the leading exponent used to certify a pair.
pub const DUAL_CERTIFY_STEPS: i64 = 100;

/// Antiderivative of the weight-2 quotient `g`, as a dual pair.
pub fn antiderivative(g: &EtaQuotient) -> Result<DualPair> {
    let e = match match_eta(g) {
        Ok(Some(e)) if e.weight() == 2 => e,
        Ok(_) | Err(Error::Domain(_)) => {
            return Err(Error::domain(format!("{g} is not in E_2({})", g.level())));
        }
        Err(err) => return Err(err),
    };
    let r: Vec<(u64, Rational)> = e
        .coeffs()
        .iter()
        .map(|(&t, c)| (t, -c / rat_int(t as i64)))
        .collect();
    let l = r
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
    let scalar = l.to_i64().ok_or_else(|| Error::domain("antiderivative exponent overflow"))?;
    let exps: Vec<(u64, i64)> = r
        .iter()
        .map(|(t, x)| {
            let v = (x * rat_int(scalar)).to_integer();
            (*t, v.to_i64().expect("small exponent"))
        })
        .collect();
    let f = EtaQuotient::new(g.level(), exps)?;
    let derivative = f.product(g);
    Ok(DualPair {
        f,
        g: derivative,
        scalar,
        source: g.clone(),
        eisenstein: e,
    })
}

impl DualPair {
    /// First exponent (a power of `q`) where `D(f)` and `scalar * g` differ,
    /// comparing `steps` full powers of `q` beyond the leading exponent.
    pub fn first_mismatch(&self, steps: i64) -> Result<Option<Rational>> {
        let lead = self.f.offset().min(self.g.offset()).div_euclid(24);
        let prec = lead + steps + 1;
        let lhs = self.f.expansion(prec)?.ramanujan_d();
        let rhs = self.g.expansion(prec)?.scale_by(&rat_int(self.scalar));
        lhs.first_mismatch(&rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualPairEntry {
    pub pair: DualPair,
    pub certified_steps: i64,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<String>,
    /// Position in the printed list of antiderivatives when `f` agrees with it.
    pub printed_index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualPairsReport {
    pub pairs: Vec<DualPairEntry>,
    pub count: usize,
    pub printed_matched: usize,
    pub holds: bool,
}

/// The printed antiderivatives, in print order.
pub fn printed_dual_list() -> Vec<EtaQuotient> {
    [
        &[(1, 8), (4, 16), (2, -24)][..],
        &[(2, 3), (1, -2), (4, -1)],
        &[(4, 8), (1, -8)],
        &[(1, 4), (4, 2), (8, 4), (2, -10)],
        &[(4, 5), (1, -2), (2, -1), (8, -2)],
        &[(2, 2), (8, 4), (1, -4), (4, -2)],
        &[(2, 7), (8, 2), (1, -2), (4, -7)],
        &[(9, 3), (1, -3)],
        &[(1, 2), (4, 2), (16, 2), (2, -5), (8, -1)],
        &[(2, 1), (8, 5), (1, -2), (4, -2), (16, -2)],
        &[(2, 1), (16, 2), (1, -2), (8, -1)],
        &[(2, 5), (16, 2), (1, -2), (8, -5)],
    ]
    .iter()
    .map(|e| quotient(e))
    .collect()
}

/// Antiderivatives of the twelve weight-2 quotients of prime power level,
/// each certified through [`DUAL_CERTIFY_STEPS`] powers of `q`.
pub fn dual_pairs_prime_power() -> Result<DualPairsReport> {
    let sources: Vec<EtaQuotient> = classified_pairs()?
        .into_iter()
        .filter(|x| x.eisenstein.weight() == 2)
        .map(|x| x.eta)
        .collect();
    let printed = printed_dual_list();
    let pairs: Vec<DualPairEntry> = sources
        .par_iter()
        .map(|g| {
            let pair = antiderivative(g)?;
            let mismatch = pair.first_mismatch(DUAL_CERTIFY_STEPS)?;
            let printed_index = printed.iter().position(|q| q.exponents() == pair.f.exponents());
            Ok(DualPairEntry {
                certified_steps: DUAL_CERTIFY_STEPS,
                certified: mismatch.is_none(),
                first_mismatch: mismatch.map(|m| format_rational(&m)),
                printed_index,
                pair,
            })
        })
        .collect::<Result<_>>()?;
    let count = pairs.len();
    let printed_matched = pairs.iter().filter(|p| p.printed_index.is_some()).count();
    let holds = count == printed.len() && printed_matched == printed.len() && pairs.iter().all(|p| p.certified);
    Ok(DualPairsReport {
        pairs,
        count,
        printed_matched,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eta(level: u64, e: &[(u64, i64)]) -> EtaQuotient {
        EtaQuotient::new(level, e.iter().copied()).unwrap()
    }

    #[test]
    fn jacobi_antiderivative() {
        let pair = antiderivative(&eta(4, &[(1, -8), (2, 20), (4, -8)])).unwrap();
        assert_eq!(pair.f, eta(4, &[(1, -8), (4, 8)]));
        assert_eq!(pair.scalar, 1);
        assert_eq!(pair.g.exponents(), eta(2, &[(1, -16), (2, 20)]).exponents());
        assert_eq!(pair.first_mismatch(30).unwrap(), None);
    }

    #[test]
    fn level_nine_antiderivative() {
        let pair = antiderivative(&eta(9, &[(1, -3), (3, 10), (9, -3)])).unwrap();
        assert_eq!(pair.f.exponents(), eta(9, &[(1, -3), (9, 3)]).exponents());
        assert_eq!(pair.first_mismatch(30).unwrap(), None);
    }

    #[test]
    fn fractional_exponents_are_cleared() {
        let pair = antiderivative(&eta(4, &[(2, -4), (4, 8)])).unwrap();
        assert_eq!(pair.scalar, 2);
        assert_eq!(pair.f.exponents(), eta(4, &[(1, -2), (2, 3), (4, -1)]).exponents());
        assert_eq!(pair.first_mismatch(30).unwrap(), None);
    }

    #[test]
    fn non_members_are_rejected() {
        assert!(matches!(antiderivative(&eta(2, &[(1, -8), (2, 16)])), Err(Error::Domain(_))));
        assert!(matches!(antiderivative(&eta(9, &[(1, -3), (9, 3)])), Err(Error::Domain(_))));
    }
}
