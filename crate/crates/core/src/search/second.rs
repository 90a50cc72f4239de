//! Weight `-1` eta quotients of level 4 whose second derivative is again an
//! eta quotient.
//!
//! For `f = eta^{r_1}(z) eta^{r_2}(2z) eta^{r_4}(4z)` with
//! `r_1 + r_2 + r_4 = -2`, the quotient `D^2(f)/f` equals
//! `s_1 E_4(z) + s_2 E_4(2z) + s_4 E_4(4z)` with `s` quadratic in `r`. So
//! `D^2(f)` is an eta quotient exactly when that combination is a multiple
//! of a weight-4 eta quotient in `E_4(4)`.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use super::{proportional, quotient};
use crate::arith::{format_rational, rat, rat_int, serde_rational, Rational};
use crate::eisenstein::{match_eta, EisensteinElement};
use crate::error::{Error, Result};
use crate::eta::EtaQuotient;

/// `(s_1, s_2, s_4)` for `r = (r_1, r_2, r_4)` with `r_1 + r_2 + r_4 = -2`.
///
/// Expanding `D(L) + L^2` for `L = -sum t r_t E_2(tz)` with the convolution
/// identities gives, besides the other terms, `(1/6) r_1 r_4` in `s_1`: the
/// cross term `8 r_1 r_4 E_2(z) E_2(4z)` contributes `(1/48) * 8` there.
pub fn second_derivative_ratio(r: [i64; 3]) -> Result<[Rational; 3]> {
    let [r1, r2, r4] = r;
    if r1 + r2 + r4 != -2 {
        return Err(Error::domain(format!("exponents {r:?} do not sum to -2")));
    }
    let (r1, r2, r4) = (rat_int(r1), rat_int(r2), rat_int(r4));
    let s1 = rat(5, 12) * &r1 * &r1 + rat(1, 3) * &r1 * &r2 + rat(1, 6) * &r1 * &r4;
    let s2 = rat(5, 3) * &r2 * &r2 + rat(4, 3) * &r1 * &r2 + rat(1, 2) * &r1 * &r4 + rat(4, 3) * &r2 * &r4;
    let s4 = rat(20, 3) * &r4 * &r4 + rat(8, 3) * &r1 * &r4 + rat(16, 3) * &r2 * &r4;
    Ok([s1, s2, s4])
}

/// `eta^{r_1}(z) eta^{r_2}(2z) eta^{r_4}(4z)` as a level-4 quotient.
pub fn level4_quotient(r: [i64; 3]) -> Result<EtaQuotient> {
    EtaQuotient::new(4, [(1, r[0]), (2, r[1]), (4, r[2])])
}

/// The weight-4 eta quotients of level dividing 4 lying in `E_4(4)`, with
/// their Eisenstein forms at level 4.
pub fn second_derivative_targets() -> Result<Vec<(EtaQuotient, EisensteinElement)>> {
    let targets = [
        &[(2, 16), (1, -8)][..],
        &[(1, 16), (2, -8)],
        &[(4, 16), (2, -8)],
        &[(2, 16), (4, -8)],
        &[(2, 40), (1, -16), (4, -16)],
        &[(1, 8), (4, 8), (2, -8)],
    ];
    targets
        .iter()
        .map(|e| {
            let g = quotient(e).at_level(4)?;
            let m = match_eta(&g)?.ok_or_else(|| Error::domain(format!("{g} is not in E_4(4)")))?;
            Ok((g, m))
        })
        .collect()
}

/// Exponents of `eta^2(2z)/eta^4(z)`.
pub const SECOND_DERIVATIVE_SEED: [i64; 3] = [-4, 2, 0];

/// Maps on level-4 exponent vectors that preserve "`D^2(f)` is a multiple of
/// an eta quotient": `f(2z)`, the Fricke involutions `W_4` and (on level 2)
/// `W_2`, and `f(z + 1/2)`, which sends `eta(z)` to a multiple of
/// `eta^3(2z)/(eta(z) eta(4z))`. `W_N` commutes with `D^2` on weight `-1`.
fn symmetry_moves(r: [i64; 3]) -> Vec<(&'static str, [i64; 3])> {
    let [r1, r2, r4] = r;
    let mut out = vec![("W_4", [r4, r2, r1]), ("z -> z + 1/2", [-r1, r2 + 3 * r1, r4 - r1])];
    if r4 == 0 {
        out.push(("z -> 2z", [0, r1, r2]));
        out.push(("W_2", [r2, r1, 0]));
    }
    out
}

/// Exponent vectors reachable from `seed` by [`symmetry_moves`] inside
/// `|r_i| <= radius`, each with the shortest sequence of moves.
pub fn symmetry_orbit(seed: [i64; 3], radius: i64) -> BTreeMap<[i64; 3], Vec<&'static str>> {
    let mut seen = BTreeMap::from([(seed, Vec::new())]);
    let mut queue = VecDeque::from([seed]);
    while let Some(r) = queue.pop_front() {
        let path = seen[&r].clone();
        for (name, next) in symmetry_moves(r) {
            if next.iter().all(|x| x.abs() <= radius) && !seen.contains_key(&next) {
                let mut p = path.clone();
                p.push(name);
                seen.insert(next, p);
                queue.push_back(next);
            }
        }
    }
    seen
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SecondDerivSolution {
    pub r: [i64; 3],
    #[serde(with = "serde_rational::vec")]
    pub s: Vec<Rational>,
    pub f: EtaQuotient,
    pub target: EtaQuotient,
    /// `c` with `D^2(f) = c * f * target`.
    #[serde(with = "serde_rational")]
    pub scalar: Rational,
    /// The eta quotient `f * target`.
    pub second_derivative: EtaQuotient,
    pub primitive: bool,
    /// `f` is `eta^2(2z)/eta^4(z)` or its image under `z -> 2z`.
    pub trivial_extension: bool,
    /// Moves taking `eta^2(2z)/eta^4(z)` to `f`, when `f` is in its orbit.
    pub relation: Option<Vec<&'static str>>,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<String>,
}

/// Full `q`-steps beyond the leading exponent used to certify a solution.
pub const SECOND_CERTIFY_STEPS: i64 = 100;

/// Largest `|r_i|` searched.
pub const SECOND_SEARCH_RADIUS: i64 = 60;

/// First power of `q` where `D^2(f)` and `c * f * target` differ.
pub fn second_derivative_mismatch(f: &EtaQuotient, target: &EtaQuotient, c: &Rational, steps: i64) -> Result<Option<Rational>> {
    let h = f.product(target);
    let lead = f.offset().min(h.offset()).div_euclid(24);
    let prec = lead + steps + 1;
    let lhs = f.expansion(prec)?.ramanujan_d().ramanujan_d();
    let rhs = h.expansion(prec)?.scale_by(c);
    lhs.first_mismatch(&rhs)
}

/// All `r` with `|r_i| <= 60` and `r_1 + r_2 + r_4 = -2` for which
/// `D^2(f)` is a nonzero multiple of an eta quotient, each certified through
/// [`SECOND_CERTIFY_STEPS`] powers of `q`.
pub fn classify_second_derivatives_level4() -> Result<Vec<SecondDerivSolution>> {
    let targets = second_derivative_targets()?;
    let t_vecs: Vec<[Rational; 3]> = targets
        .iter()
        .map(|(_, e)| [e.coeff(1), e.coeff(2), e.coeff(4)])
        .collect();
    let rr = SECOND_SEARCH_RADIUS;
    let mut hits: Vec<([i64; 3], [Rational; 3], usize, Rational)> = (-rr..=rr)
        .into_par_iter()
        .flat_map_iter(|r1| (-rr..=rr).map(move |r2| [r1, r2, -2 - r1 - r2]))
        .filter(|r| r[2].abs() <= rr)
        .filter_map(|r| {
            let s = second_derivative_ratio(r).expect("sum is -2");
            t_vecs
                .iter()
                .enumerate()
                .find_map(|(i, t)| proportional(&s, t).map(|c| (i, c)))
                .map(|(i, c)| (r, s, i, c))
        })
        .collect();
    hits.sort_by(|a, b| a.0.cmp(&b.0));
    let orbit = symmetry_orbit(SECOND_DERIVATIVE_SEED, rr);
    hits.into_par_iter()
        .map(|(r, s, i, c)| {
            let f = level4_quotient(r)?;
            let target = targets[i].0.clone();
            let mismatch = second_derivative_mismatch(&f, &target, &c, SECOND_CERTIFY_STEPS)?;
            Ok(SecondDerivSolution {
                r,
                s: s.to_vec(),
                primitive: f.is_primitive(),
                trivial_extension: r == SECOND_DERIVATIVE_SEED || r == [0, -4, 2],
                relation: orbit.get(&r).cloned(),
                second_derivative: f.product(&target),
                f,
                target,
                scalar: c,
                certified: mismatch.is_none(),
                first_mismatch: mismatch.map(|m| format_rational(&m)),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SecondDerivReport {
    pub solutions: Vec<SecondDerivSolution>,
    /// `D^2(eta^2(2z)/eta^4(z)) = 4 eta^18(2z)/eta^12(z)` through
    /// [`SECOND_CERTIFY_STEPS`] powers of `q`.
    pub known_identity_certified: bool,
    pub all_certified: bool,
    /// Every solution lies in the orbit of `eta^2(2z)/eta^4(z)` under
    /// [`symmetry_orbit`].
    pub all_in_orbit: bool,
    /// Solutions that are not `eta^2(2z)/eta^4(z)` or its image under `z -> 2z`.
    pub beyond_rescaling: usize,
    /// Uniqueness up to `f(tz)`: no solution beyond rescaling.
    pub holds: bool,
}

/// Runs the classification and checks it against uniqueness up to `f(tz)`.
pub fn verify_second_derivatives() -> Result<SecondDerivReport> {
    let solutions = classify_second_derivatives_level4()?;
    let f = level4_quotient(SECOND_DERIVATIVE_SEED)?;
    let target = EtaQuotient::new(4, [(1, -8), (2, 16)])?;
    let known_identity_certified = second_derivative_mismatch(&f, &target, &rat_int(4), SECOND_CERTIFY_STEPS)?.is_none();
    let all_certified = solutions.iter().all(|x| x.certified);
    let all_in_orbit = solutions.iter().all(|x| x.relation.is_some());
    let beyond_rescaling = solutions.iter().filter(|x| !x.trivial_extension).count();
    Ok(SecondDerivReport {
        holds: known_identity_certified && all_certified && beyond_rescaling == 0,
        solutions,
        known_identity_certified,
        all_certified,
        all_in_orbit,
        beyond_rescaling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::e_k_series;
    use crate::qseries::QSeries;
    use proptest::prelude::*;

    /// `f * sum s_t E_4(tz)` computed from scratch.
    fn rhs_series(r: [i64; 3], s: &[Rational; 3], prec: i64) -> QSeries {
        let f = level4_quotient(r).unwrap().expansion(prec).unwrap();
        let e4 = e_k_series(4, prec + 1).unwrap();
        let mut sum = e4.scale_by(&s[0]);
        for (t, c) in [(2u64, &s[1]), (4, &s[2])] {
            sum = sum.add(&e4.substitute(t).unwrap().scale_by(c)).unwrap();
        }
        f.mul(&sum).unwrap()
    }

    #[test]
    fn ratio_of_known_solution() {
        let s = second_derivative_ratio([-4, 2, 0]).unwrap();
        assert_eq!(s, [rat_int(4), rat_int(-4), rat_int(0)]);
        let s = second_derivative_ratio([0, -4, 2]).unwrap();
        assert_eq!(s, [rat_int(0), rat_int(16), rat_int(-16)]);
        assert_eq!(second_derivative_ratio([0, -2, 0]).unwrap(), [rat_int(0), rat(20, 3), rat_int(0)]);
        assert_eq!(second_derivative_ratio([-2, 0, 0]).unwrap(), [rat(5, 3), rat_int(0), rat_int(0)]);
        // the r_1 r_4 term of s_1
        assert_eq!(second_derivative_ratio([1, 0, -3]).unwrap()[0], rat(5, 12) - rat(1, 2));
        assert!(second_derivative_ratio([1, 1, 1]).is_err());
    }

    #[test]
    fn known_second_derivative() {
        let f = level4_quotient([-4, 2, 0]).unwrap();
        let target = EtaQuotient::new(4, [(1, -8), (2, 16)]).unwrap();
        assert_eq!(second_derivative_mismatch(&f, &target, &rat_int(4), 40).unwrap(), None);
        assert_eq!(f.product(&target).exponents(), EtaQuotient::new(2, [(1, -12), (2, 18)]).unwrap().exponents());
    }

    #[test]
    fn classification_contains_known_solutions() {
        let sols = classify_second_derivatives_level4().unwrap();
        assert!(sols.iter().all(|x| x.certified));
        let rs: Vec<[i64; 3]> = sols.iter().map(|x| x.r).collect();
        assert!(rs.contains(&[-4, 2, 0]));
        assert!(rs.contains(&[0, -4, 2]));
        let orbit: Vec<[i64; 3]> = symmetry_orbit(SECOND_DERIVATIVE_SEED, SECOND_SEARCH_RADIUS).into_keys().collect();
        assert_eq!(rs, orbit);
        assert_eq!(sols.iter().filter(|x| x.trivial_extension).count(), 2);
    }

    #[test]
    fn orbit_of_the_seed() {
        let orbit = symmetry_orbit(SECOND_DERIVATIVE_SEED, 60);
        let rs: Vec<[i64; 3]> = orbit.keys().copied().collect();
        assert_eq!(rs, [[-4, 2, 0], [-2, 2, -2], [0, -4, 2], [0, 2, -4], [2, -4, 0], [4, -10, 4]]);
        assert_eq!(orbit[&[4, -10, 4]], ["z -> z + 1/2"]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn ratio_matches_series(r1 in -12i64..=12, r2 in -12i64..=12) {
            let r = [r1, r2, -2 - r1 - r2];
            let s = second_derivative_ratio(r).unwrap();
            let f = level4_quotient(r).unwrap();
            let prec = f.offset().div_euclid(24) + 20;
            let lhs = f.expansion(prec).unwrap().ramanujan_d().ramanujan_d();
            prop_assert_eq!(lhs.first_mismatch(&rhs_series(r, &s, prec)).unwrap(), None);
        }
    }
}
