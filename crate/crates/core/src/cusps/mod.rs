//! Cusps of `Gamma0(N)` and expansions of Eisenstein elements at them.
//!
//! At the cusp `a/c` with completion `M = (a b; c d)`, the term `E_k(tz)`
//! contributes
//! `sum_n a_n(c, t) omega^n q_{c,N}^{n gcd(t,c)^2 N / (t gcd(c^2, N))}`
//! to `(cz + d)^{-k} f(Mz)`, where `q_{c,N}` is the width-normalised local
//! variable, `a_n(c, t) = (gcd(t,c)/t)^k sigma_{k-1}(n)` (the constant term
//! uses `-B_k/(2k)`) and `omega = exp(-2 pi i gcd(t,c) d f / t)` with `f`
//! from [`efgh_complete`]. For `k = 2` the non-holomorphic parts cancel because
//! of the constraint built into [`EisensteinElement`].

pub mod maingen;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::cyclotomic::{field_degree, CycNumber};
use crate::arith::sl2::{efgh_complete, sl2_complete, Sl2Matrix};
use crate::arith::{divisors, gcd, lcm, mod_floor, rat, sigma, Rational};
use crate::eisenstein::{constant_term, sturm_bound, EisensteinElement};
use crate::error::{Error, Result};
use crate::qseries::{QSeries, Valuation};

pub use maingen::{check_maingen_bound, maingen_suite, sample_p_element, theorem_bound, MaingenReport, MaingenSuiteReport};

/// A cusp `a/c` of `Gamma0(N)` together with a completion `(a b; c d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cusp {
    a: i64,
    c: u64,
    level: u64,
    completion: Sl2Matrix,
}

impl Cusp {
    pub fn new(a: i64, c: u64, level: u64) -> Result<Self> {
        if level == 0 || c == 0 || level % c != 0 {
            return Err(Error::domain(format!("denominator {c} does not divide level {level}")));
        }
        let completion = sl2_complete(&BigInt::from(a), &BigInt::from(c))?;
        Ok(Cusp { a, c, level, completion })
    }

    /// `a/c`, with `c` a positive divisor of the level.
    pub fn parse(s: &str, level: u64) -> Result<Self> {
        let (a, c) = s
            .split_once('/')
            .ok_or_else(|| Error::parse(s.trim(), "expected a cusp a/c"))?;
        let a: i64 = a.trim().parse().map_err(|_| Error::parse(a.trim(), "expected an integer numerator"))?;
        let c: u64 = c.trim().parse().map_err(|_| Error::parse(c.trim(), "expected a positive denominator"))?;
        Self::new(a, c, level)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// `N / gcd(c^2, N)`.
    pub fn width(&self) -> u64 {
        self.level / gcd(self.c * self.c, self.level)
    }

    pub fn completion(&self) -> &Sl2Matrix {
        &self.completion
    }

    /// The same cusp with completion `M T^s`.
    pub fn shifted(&self, s: i64) -> Self {
        Cusp {
            completion: self.completion.shifted(s),
            ..self.clone()
        }
    }

    /// `(c, a mod gcd(c, N/c))`; equal keys mean `Gamma0(N)`-equivalent cusps.
    pub fn class_key(&self) -> (u64, u64) {
        let m = gcd(self.c, self.level / self.c);
        (self.c, mod_floor(&BigInt::from(self.a), m))
    }

    pub fn is_equivalent(&self, other: &Self) -> bool {
        self.level == other.level && self.class_key() == other.class_key()
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.c)
    }
}

/// One representative per class, sorted by `(c, a)`. Numerators are the least
/// positive integers coprime to `c` in each unit class modulo `gcd(c, N/c)`.
pub fn cusp_reps(n: u64) -> Vec<Cusp> {
    let mut out = Vec::new();
    for c in divisors(n) {
        let m = gcd(c, n / c);
        for u in 0..m {
            if gcd(u, m) != 1 {
                continue;
            }
            let a = (0..)
                .map(|i| u + i * m)
                .find(|&a| a > 0 && gcd(a, c) == 1)
                .expect("a unit class always contains integers coprime to c");
            out.push(Cusp::new(a as i64, c, n).expect("c divides n"));
        }
    }
    out.sort_by_key(|x| (x.c, x.a));
    out
}

/// Exponent of the `n = 1` term of `E_k(tz)` at a cusp with denominator `c`,
/// in units of `q_{c,N}`: `gcd(t,c)^2 N / (t gcd(c^2, N))`.
pub fn term_exponent_step(t: u64, c: u64, n: u64) -> Result<u64> {
    let g = gcd(t, c);
    let num = g * g * n;
    let den = t * gcd(c * c, n);
    if num % den != 0 {
        return Err(Error::domain(format!("exponent step for t={t}, c={c}, N={n} is not integral")));
    }
    Ok(num / den)
}

/// Per-term data of a cusp expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct CuspTerm {
    pub t: u64,
    /// Exponent increment per `n`, in `q_{c,N}` units.
    pub step: u64,
    /// `(gcd(t,c)/t)^k`.
    pub prefactor: Rational,
    /// `omega_{M,t}`.
    pub omega: CycNumber,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CuspExpansion {
    pub cusp: Cusp,
    /// Series in `q_{c,N}` with coefficients in `Q(zeta_L)`.
    pub series: QSeries<CycNumber>,
    /// `L = lcm_t t / gcd(t, c)` over the support.
    pub cyclotomic_order: u64,
    pub terms: Vec<CuspTerm>,
}

impl CuspExpansion {
    pub fn valuation(&self) -> Valuation {
        self.series.valuation()
    }

    /// Order of vanishing and the coefficient there.
    pub fn leading(&self) -> Option<(u64, CycNumber)> {
        match self.valuation() {
            Valuation::At(e) => Some((e as u64, self.series.coeff(e).expect("below precision"))),
            Valuation::ZeroToPrecision => None,
        }
    }
}

/// Machine form of an order computation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuspOrderReport {
    pub cusp: String,
    pub width: u64,
    pub order: u64,
    pub leading_coeff: String,
}

impl CuspOrderReport {
    pub fn from_expansion(x: &CuspExpansion) -> Result<Self> {
        let (order, lead) = x.leading().ok_or_else(|| {
            Error::PrecisionExhausted(format!("no nonzero coefficient below q^{} at {}", x.series.prec(), x.cusp))
        })?;
        Ok(CuspOrderReport {
            cusp: x.cusp.to_string(),
            width: x.cusp.width(),
            order,
            leading_coeff: lead.canonical().to_string(),
        })
    }
}

/// Default number of local coefficients for order computations.
pub fn default_order_prec(k: u32, n: u64) -> i64 {
    sturm_bound(k, n) as i64 + 10
}

/// Expansion from raw coefficients. The weight-2 constraint is not checked
/// here, so callers handling single `E_2(tz)` terms get the holomorphic part.
pub(crate) fn raw_expansion(
    k: u32,
    coeffs: &BTreeMap<u64, Rational>,
    cusp: &Cusp,
    prec: i64,
    efgh_shift: &dyn Fn(u64) -> i64,
) -> Result<CuspExpansion> {
    if prec < 1 {
        return Err(Error::PrecisionExhausted(format!("precision q^{prec} is empty")));
    }
    let n = cusp.level;
    let c = cusp.c;
    let a = BigInt::from(cusp.a);
    let c_big = BigInt::from(c);
    let d = &cusp.completion.d;
    let order = coeffs.keys().fold(1, |acc, &t| lcm(acc, t / gcd(t, c)));
    let len = prec as usize;
    let mut acc = vec![vec![Rational::zero(); order as usize]; len];
    let c0 = constant_term(k)?;
    let mut sig: Vec<Rational> = vec![Rational::zero()];
    let mut terms = Vec::new();
    for (&t, r) in coeffs {
        if n % t != 0 {
            return Err(Error::domain(format!("E{k}({t}) does not live at level {n}")));
        }
        let g = gcd(t, c);
        let step = term_exponent_step(t, c, n)?;
        let prefactor = num_traits::pow(rat(g as i64, t as i64), k as usize);
        let root = t / g;
        let j = if c % t == 0 {
            0
        } else {
            let x = efgh_complete(t, &a, &c_big)?.shifted(efgh_shift(t));
            mod_floor(&(-(d * &x.f)), root)
        };
        let jl = j * (order / root);
        terms.push(CuspTerm {
            t,
            step,
            prefactor: prefactor.clone(),
            omega: CycNumber::root_of_unity(root, j as i64),
        });
        let scaled = r * &prefactor;
        let mut m = 0usize;
        while (m as u64 * step) < prec as u64 {
            while sig.len() <= m {
                let next = sigma(k - 1, sig.len() as i64)?;
                sig.push(Rational::from_integer(next));
            }
            let an = if m == 0 { &c0 } else { &sig[m] };
            let pos = ((m as u64 * jl) % order) as usize;
            acc[m * step as usize][pos] += &scaled * an;
            m += 1;
        }
    }
    let coeffs: Vec<CycNumber> = acc.into_iter().map(|v| CycNumber::from_coeffs(order, v)).collect();
    Ok(CuspExpansion {
        cusp: cusp.clone(),
        series: QSeries::new(1, 0, coeffs)?,
        cyclotomic_order: order,
        terms,
    })
}

fn lift_to_cusp_level(f: &EisensteinElement, cusp: &Cusp) -> Result<EisensteinElement> {
    if cusp.level % f.level() != 0 {
        return Err(Error::domain(format!(
            "element of level {} at a cusp of Gamma0({})",
            f.level(),
            cusp.level
        )));
    }
    f.at_level(cusp.level)
}

/// Expansion of `f` at `cusp` in `q_{c,N}`, known modulo `q_{c,N}^prec`.
pub fn expansion_at_cusp(f: &EisensteinElement, cusp: &Cusp, prec: i64) -> Result<CuspExpansion> {
    expansion_at_cusp_with(f, cusp, prec, &|_| 0)
}

/// As [`expansion_at_cusp`], replacing the `(f, h)` completion for the term
/// `E_k(tz)` by its shift `(f + e u, h + g u)` with `u = efgh_shift(t)`.
pub fn expansion_at_cusp_with(
    f: &EisensteinElement,
    cusp: &Cusp,
    prec: i64,
    efgh_shift: &dyn Fn(u64) -> i64,
) -> Result<CuspExpansion> {
    let f = lift_to_cusp_level(f, cusp)?;
    raw_expansion(f.weight(), f.coeffs(), cusp, prec, efgh_shift)
}

/// Order of vanishing of `f != 0` at `cusp` in the local variable `q_{c,N}`.
/// `prec` defaults to the Sturm bound plus 10.
pub fn order_at_cusp(f: &EisensteinElement, cusp: &Cusp, prec: Option<i64>) -> Result<u64> {
    order_at_cusp_with(f, cusp, prec, &|_| 0)
}

pub fn order_at_cusp_with(
    f: &EisensteinElement,
    cusp: &Cusp,
    prec: Option<i64>,
    efgh_shift: &dyn Fn(u64) -> i64,
) -> Result<u64> {
    if f.is_zero() {
        return Err(Error::domain("the zero element has no order"));
    }
    let prec = prec.unwrap_or_else(|| default_order_prec(f.weight(), cusp.level));
    let x = expansion_at_cusp_with(f, cusp, prec, efgh_shift)?;
    match x.valuation() {
        Valuation::At(e) => Ok(e as u64),
        Valuation::ZeroToPrecision => Err(Error::PrecisionExhausted(format!(
            "{f} vanishes at {cusp} through q^{prec}"
        ))),
    }
}

/// Orders at every representative of `cusp_reps(N)`, computed in parallel.
pub fn orders_at_all_cusps(f: &EisensteinElement) -> Result<Vec<(Cusp, u64)>> {
    cusp_reps(f.level())
        .into_par_iter()
        .map(|cusp| order_at_cusp(f, &cusp, None).map(|o| (cusp, o)))
        .collect()
}

/// Basis of the rational coefficient vectors `(r_t)_{t | N}` whose expansion
/// at `cusp` vanishes through `q_{c,N}^max_exponent`; for `k = 2` the weight-2
/// constraint is imposed as well.
pub fn vanishing_subspace(k: u32, cusp: &Cusp, max_exponent: u64) -> Result<Vec<Vec<Rational>>> {
    let n = cusp.level;
    let ts = divisors(n);
    let prec = max_exponent as i64 + 1;
    let order = ts.iter().fold(1, |acc, &t| lcm(acc, t / gcd(t, cusp.c)));
    let deg = field_degree(order) as usize;
    let columns: Vec<CuspExpansion> = ts
        .iter()
        .map(|&t| raw_expansion(k, &BTreeMap::from([(t, Rational::one())]), cusp, prec, &|_| 0))
        .collect::<Result<_>>()?;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for e in 0..prec {
        let coords: Vec<Vec<Rational>> = columns
            .iter()
            .map(|col| {
                let mut v = col.series.coeff(e).expect("below precision").lift(order).reduced();
                v.resize(deg, Rational::zero());
                v
            })
            .collect();
        for i in 0..deg {
            rows.push(coords.iter().map(|v| v[i].clone()).collect());
        }
    }
    if k == 2 {
        rows.push(ts.iter().map(|&t| rat(1, t as i64)).collect());
    }
    Ok(crate::arith::linalg::nullspace(&rows, ts.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;
    use crate::eta::EtaQuotient;
    use proptest::prelude::*;

    fn el(k: u32, n: u64, c: &[(u64, i64)]) -> EisensteinElement {
        EisensteinElement::new(k, n, c.iter().map(|&(t, r)| (t, rat_int(r)))).unwrap()
    }

    fn names(n: u64) -> Vec<String> {
        cusp_reps(n).iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn representatives() {
        assert_eq!(names(4), ["1/1", "1/2", "1/4"]);
        assert_eq!(names(1), ["1/1"]);
        assert_eq!(cusp_reps(16).len(), 6);
        assert_eq!(names(9), ["1/1", "1/3", "2/3", "1/9"]);
        for (p, m) in [(2u64, 1u32), (2, 3), (2, 5), (3, 2), (3, 3), (5, 2), (7, 2)] {
            let half = (m - 1) / 2;
            let expected = p.pow(half) * (p.pow((m - 1) - 2 * half) + 1);
            assert_eq!(cusp_reps(p.pow(m)).len() as u64, expected);
        }
        let reps = cusp_reps(36);
        for (i, x) in reps.iter().enumerate() {
            for y in &reps[i + 1..] {
                assert!(!x.is_equivalent(y));
            }
        }
    }

    #[test]
    fn widths_and_parsing() {
        let c = Cusp::parse("1/2", 4).unwrap();
        assert_eq!(c.width(), 1);
        assert_eq!(Cusp::parse("1/1", 4).unwrap().width(), 4);
        assert_eq!(Cusp::parse("1/3", 18).unwrap().width(), 2);
        assert!(Cusp::parse("1/3", 4).is_err());
        assert!(Cusp::parse("2/4", 4).is_err());
        assert!(matches!(Cusp::parse("x/2", 4), Err(Error::Parse { .. })));
    }

    #[test]
    fn jacobi_orders() {
        let f = el(2, 4, &[(1, 8), (4, -32)]);
        let orders: Vec<u64> = orders_at_all_cusps(&f).unwrap().into_iter().map(|(_, o)| o).collect();
        assert_eq!(orders, [0, 1, 0]);
        let g = el(2, 4, &[(1, -8), (2, 48), (4, -64)]);
        let total: u64 = orders_at_all_cusps(&g).unwrap().into_iter().map(|(_, o)| o).sum();
        assert_eq!(total, 1);
    }

    #[test]
    fn constant_term_at_one() {
        let f = el(4, 4, &[(4, 1)]);
        let x = expansion_at_cusp(&f, &Cusp::new(1, 1, 4).unwrap(), 3).unwrap();
        let c0 = x.series.coeff(0).unwrap().as_rational().unwrap();
        assert_eq!(c0, num_traits::pow(rat(1, 4), 4) * rat(1, 240));
        let e4 = el(4, 1, &[(1, 1)]);
        assert_eq!(order_at_cusp(&e4, &Cusp::new(1, 1, 1).unwrap(), None).unwrap(), 0);
        let x = expansion_at_cusp(&el(2, 4, &[(1, 8), (4, -32)]), &Cusp::new(1, 4, 4).unwrap(), 4).unwrap();
        assert_eq!(x.valuation(), Valuation::At(0));
    }

    #[test]
    fn divisible_terms_have_trivial_root_of_unity() {
        let f = el(4, 8, &[(2, 1)]);
        let x = expansion_at_cusp(&f, &Cusp::new(1, 4, 8).unwrap(), 6).unwrap();
        assert_eq!(x.terms[0].omega, CycNumber::one());
        assert!(x.series.terms().all(|(_, c)| c.as_rational().is_some()));
    }

    #[test]
    fn zero_element_has_no_order() {
        let z = el(4, 4, &[]);
        assert!(order_at_cusp(&z, &cusp_reps(4)[0], None).is_err());
    }

    /// The four cases for the `n = 1` exponent at level `p^m`.
    fn case_table(p: u64, m: u32, i: u32, j: u32) -> u64 {
        let twice_i = 2 * i;
        match (i >= j, twice_i >= m) {
            (true, true) => p.pow(j),
            (false, true) => p.pow(2 * i - j),
            (true, false) => p.pow(m + j - 2 * i),
            (false, false) => p.pow(m - j),
        }
    }

    #[test]
    fn prime_power_exponent_table() {
        for p in [2u64, 3] {
            for m in 0..=5u32 {
                for i in 0..=m {
                    for j in 0..=m {
                        let got = term_exponent_step(p.pow(j), p.pow(i), p.pow(m)).unwrap();
                        assert_eq!(got, case_table(p, m, i, j), "p={p} m={m} i={i} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn eta_orders_agree_with_cusp_expansion() {
        let cases = [
            EtaQuotient::new(4, [(1, -8), (2, 20), (4, -8)]).unwrap(),
            EtaQuotient::new(9, [(1, -3), (3, 10), (9, -3)]).unwrap(),
            EtaQuotient::new(2, [(1, -8), (2, 16)]).unwrap(),
        ];
        for g in cases {
            let f = crate::eisenstein::match_eta(&g).unwrap().unwrap();
            for cusp in cusp_reps(g.level()) {
                let o = order_at_cusp(&f, &cusp, None).unwrap();
                assert_eq!(rat_int(o as i64), g.order_at_denominator(cusp.c()).unwrap(), "{g} at {cusp}");
            }
        }
    }

    #[test]
    fn vanishing_beyond_one_forces_lower_level_or_rescaling() {
        for (n, k) in [(8u64, 2u32), (9, 4), (16, 2), (25, 2), (27, 4)] {
            for cusp in cusp_reps(n) {
                let ns = vanishing_subspace(k, &cusp, 1).unwrap();
                let r1_zero = ns.iter().all(|v| v[0].is_zero());
                let rn_zero = ns.iter().all(|v| v.last().unwrap().is_zero());
                assert!(r1_zero || rn_zero, "N={n} k={k} cusp {cusp}");
            }
        }
        let ns = vanishing_subspace(2, &Cusp::new(1, 2, 4).unwrap(), 2).unwrap();
        assert!(ns.iter().all(|v| v[0].is_zero() || v[2].is_zero()));
    }

    proptest! {
        #[test]
        fn orders_do_not_depend_on_completions(
            s in -20i64..20,
            u in proptest::collection::vec(-20i64..20, 6),
            idx in 0usize..6,
            r in proptest::collection::vec(-5i64..=5, 5),
        ) {
            let n = 16u64;
            let reps = cusp_reps(n);
            let cusp = &reps[idx % reps.len()];
            let ts = divisors(n);
            let mut coeffs: Vec<(u64, Rational)> = ts.iter().skip(1).zip(&r).map(|(&t, &x)| (t, rat_int(x))).collect();
            let s1: Rational = coeffs.iter().map(|(t, x)| x / rat_int(*t as i64)).sum();
            coeffs.push((1, -s1));
            let f = EisensteinElement::new(2, n, coeffs).unwrap();
            prop_assume!(!f.is_zero());
            let base = order_at_cusp(&f, cusp, None).unwrap();
            let shift = |t: u64| u[divisors(n).iter().position(|&x| x == t).unwrap() % u.len()];
            let other = order_at_cusp_with(&f, &cusp.shifted(s), None, &shift).unwrap();
            prop_assert_eq!(base, other);
        }
    }
}
