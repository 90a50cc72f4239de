//! Truncated series in fractional powers of `q`.
//!
//! A [`QSeries`] with scale `s` has exponents measured in units of `q^{1/s}`.
//! Its nonzero terms sit on one lattice `offset + s*Z`, i.e. the series is
//! `q^{offset/s}` times an ordinary power series in `q`, which is exactly the
//! shape of eta quotients (`s = 24`) and of cusp expansions (`s = 1`).
//! The series is known modulo `q^{prec/s}`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::arith::cyclotomic::CycNumber;
use crate::arith::{format_rational, lcm, Rational};
use crate::error::{Error, Result};

/// Largest scale reachable through lcm alignment.
pub const MAX_SCALE: u64 = 1 << 24;

/// Exponent units used for eta quotients and Eisenstein series at infinity.
pub const ETA_SCALE: u64 = 24;

/// Coefficient ring of a [`QSeries`].
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(r: &Rational) -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn scaled(&self, r: &Rational) -> Self;
    /// Multiplicative inverse when the element is a unit.
    fn inverse(&self) -> Option<Self>;

    fn add_product(&mut self, a: &Self, b: &Self) {
        *self = self.plus(&a.times(b));
    }

    /// Used for rendering `a - b` instead of `a + -b`.
    fn is_negative(&self) -> bool {
        false
    }
}

impl Coefficient for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scaled(&self, r: &Rational) -> Self {
        self * r
    }
    fn inverse(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl Coefficient for CycNumber {
    fn zero() -> Self {
        CycNumber::zero()
    }
    fn one() -> Self {
        CycNumber::one()
    }
    fn is_zero(&self) -> bool {
        CycNumber::is_zero(self)
    }
    fn from_rational(r: &Rational) -> Self {
        CycNumber::from_rational(r.clone())
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn scaled(&self, r: &Rational) -> Self {
        self.scale(r)
    }
    fn inverse(&self) -> Option<Self> {
        CycNumber::inverse(self)
    }
}

/// Order of a series at its expansion point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    /// Least exponent (in `1/scale` units) with a nonzero coefficient.
    At(i64),
    /// Every known coefficient vanishes.
    ZeroToPrecision,
}

fn lattice_len(offset: i64, prec: i64, scale: u64) -> usize {
    if prec <= offset {
        0
    } else {
        ((prec - offset) as u64).div_ceil(scale) as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QSeries<C: Coefficient = Rational> {
    scale: u64,
    offset: i64,
    prec: i64,
    coeffs: Vec<C>,
}

impl<C: Coefficient> QSeries<C> {
    /// `sum_i coeffs[i] q^{(offset + i*scale)/scale}`, known up to the last
    /// listed coefficient.
    pub fn new(scale: u64, offset: i64, coeffs: Vec<C>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::PrecisionExhausted("series without known coefficients".into()));
        }
        let prec = offset + (coeffs.len() as u64 * scale) as i64;
        Self::with_prec(scale, offset, prec, coeffs)
    }

    /// Like [`QSeries::new`] with an explicit precision bound `prec`; the
    /// coefficient vector must cover exactly the lattice points below it.
    pub fn with_prec(scale: u64, offset: i64, prec: i64, coeffs: Vec<C>) -> Result<Self> {
        if scale == 0 || scale > MAX_SCALE {
            return Err(Error::ScaleMismatch(format!("scale {scale} out of range")));
        }
        if prec <= offset {
            return Err(Error::PrecisionExhausted(format!(
                "precision {prec} does not exceed offset {offset}"
            )));
        }
        let len = lattice_len(offset, prec, scale);
        if coeffs.len() != len {
            return Err(Error::domain(format!(
                "expected {len} coefficients below {prec}, got {}",
                coeffs.len()
            )));
        }
        Ok(QSeries {
            scale,
            offset,
            prec,
            coeffs,
        })
    }

    pub fn from_fn(scale: u64, offset: i64, prec: i64, mut f: impl FnMut(usize) -> C) -> Result<Self> {
        let len = lattice_len(offset, prec, scale);
        Self::with_prec(scale, offset, prec, (0..len).map(&mut f).collect())
    }

    pub fn zero(scale: u64, offset: i64, prec: i64) -> Result<Self> {
        Self::from_fn(scale, offset, prec, |_| C::zero())
    }

    /// The constant `1`, known below `q^{prec/scale}`.
    pub fn one(scale: u64, prec: i64) -> Result<Self> {
        Self::from_fn(scale, 0, prec, |i| if i == 0 { C::one() } else { C::zero() })
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// Lowest stored exponent, in `1/scale` units.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// The series is known modulo `q^{prec/scale}`.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Coefficients at exponents `offset, offset + scale, ...`.
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Known range as a rational power of `q`.
    pub fn prec_q(&self) -> Rational {
        Rational::new(BigInt::from(self.prec), BigInt::from(self.scale))
    }

    /// Coefficient of `q^{exponent/scale}`, `None` beyond the precision.
    pub fn coeff(&self, exponent: i64) -> Option<C> {
        if exponent >= self.prec {
            return None;
        }
        let delta = exponent - self.offset;
        if delta < 0 || delta % self.scale as i64 != 0 {
            return Some(C::zero());
        }
        Some(self.coeffs[(delta / self.scale as i64) as usize].clone())
    }

    /// Nonzero terms as `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.offset + (i as u64 * self.scale) as i64, c))
    }

    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> QSeries<D> {
        QSeries {
            scale: self.scale,
            offset: self.offset,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Re-expresses exponents in units of `1/new_scale`.
    pub fn to_scale(&self, new_scale: u64) -> Result<Self> {
        if new_scale % self.scale != 0 {
            return Err(Error::ScaleMismatch(format!(
                "{new_scale} is not a multiple of {}",
                self.scale
            )));
        }
        if new_scale > MAX_SCALE {
            return Err(Error::ScaleMismatch(format!("scale {new_scale} exceeds {MAX_SCALE}")));
        }
        let factor = (new_scale / self.scale) as i64;
        Ok(QSeries {
            scale: new_scale,
            offset: self.offset * factor,
            prec: self.prec * factor,
            coeffs: self.coeffs.clone(),
        })
    }

    fn aligned(&self, other: &Self) -> Result<(Self, Self)> {
        if self.scale == other.scale {
            return Ok((self.clone(), other.clone()));
        }
        let l = lcm(self.scale, other.scale);
        Ok((self.to_scale(l)?, other.to_scale(l)?))
    }

    /// Drops knowledge at and beyond `q^{prec/scale}`.
    pub fn truncate(&self, prec: i64) -> Result<Self> {
        if prec >= self.prec {
            return Ok(self.clone());
        }
        let len = lattice_len(self.offset, prec, self.scale);
        Self::with_prec(self.scale, self.offset, prec, self.coeffs[..len].to_vec())
    }

    /// Multiplication by `q^{units/scale}`.
    pub fn shift(&self, units: i64) -> Self {
        QSeries {
            scale: self.scale,
            offset: self.offset + units,
            prec: self.prec + units,
            coeffs: self.coeffs.clone(),
        }
    }

    /// The substitution `q -> q^t`.
    pub fn substitute(&self, t: u64) -> Result<Self> {
        if t == 0 {
            return Err(Error::domain("substitution q -> q^0"));
        }
        let ti = t as i64;
        let (offset, prec) = (self.offset * ti, self.prec * ti);
        let len = lattice_len(offset, prec, self.scale);
        let mut coeffs = vec![C::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * t as usize] = c.clone();
        }
        Self::with_prec(self.scale, offset, prec, coeffs)
    }

    pub fn neg(&self) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(C::negated).collect(),
            ..self.clone()
        }
    }

    pub fn scale_by(&self, r: &Rational) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| c.scaled(r)).collect(),
            ..self.clone()
        }
    }

    pub fn mul_coeff(&self, r: &C) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| c.times(r)).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, subtract: bool) -> Result<Self> {
        let (x, y) = self.aligned(other)?;
        let s = x.scale as i64;
        if (x.offset - y.offset).rem_euclid(s) != 0 {
            return Err(Error::ScaleMismatch(format!(
                "exponent lattices {}+{}Z and {}+{}Z differ",
                x.offset, s, y.offset, s
            )));
        }
        let offset = x.offset.min(y.offset);
        let prec = x.prec.min(y.prec);
        let len = lattice_len(offset, prec, x.scale);
        let mut coeffs = vec![C::zero(); len];
        for (src, negate) in [(&x, false), (&y, subtract)] {
            let start = ((src.offset - offset) / s) as usize;
            for (i, c) in src.coeffs.iter().enumerate() {
                let Some(slot) = coeffs.get_mut(start + i) else { break };
                *slot = if negate { slot.minus(c) } else { slot.plus(c) };
            }
        }
        Self::with_prec(x.scale, offset, prec, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (x, y) = self.aligned(other)?;
        let offset = x.offset + y.offset;
        let prec = (x.offset + y.prec).min(y.offset + x.prec);
        let len = lattice_len(offset, prec, x.scale);
        let mut coeffs = vec![C::zero(); len];
        for (i, a) in x.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    coeffs[i + j].add_product(a, b);
                }
            }
        }
        Self::with_prec(x.scale, offset, prec, coeffs)
    }

    pub fn valuation(&self) -> Valuation {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(i) => Valuation::At(self.offset + (i as u64 * self.scale) as i64),
            None => Valuation::ZeroToPrecision,
        }
    }

    /// Multiplicative inverse; the lowest nonzero coefficient must be a unit.
    /// Relative precision is preserved.
    pub fn inverse(&self) -> Result<Self> {
        let Some(v) = self.coeffs.iter().position(|c| !c.is_zero()) else {
            return Err(Error::DivisionByNonunit("series is zero to known precision".into()));
        };
        let lead_inv = self.coeffs[v].inverse().ok_or_else(|| {
            Error::DivisionByNonunit(format!("leading coefficient {} is not a unit", self.coeffs[v]))
        })?;
        let a = &self.coeffs[v..];
        let n = a.len();
        let mut b: Vec<C> = Vec::with_capacity(n);
        b.push(lead_inv.clone());
        for k in 1..n {
            let mut acc = C::zero();
            for i in 1..=k {
                if !a[i].is_zero() {
                    acc.add_product(&a[i], &b[k - i]);
                }
            }
            b.push(acc.times(&lead_inv).negated());
        }
        let low = self.offset + (v as u64 * self.scale) as i64;
        Self::with_prec(self.scale, -low, -low + (self.prec - low), b)
    }

    /// Integer power by binary exponentiation; negative exponents go through
    /// [`QSeries::inverse`].
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            let rel = self.prec - self.offset;
            return Self::one(self.scale, rel);
        }
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut base = base;
        let mut acc: Option<Self> = None;
        loop {
            if n & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            n >>= 1;
            if n == 0 {
                break;
            }
            base = base.mul(&base)?;
        }
        Ok(acc.expect("nonzero exponent"))
    }

    /// The operator `D = q d/dq`: the coefficient at `q^{e/scale}` is
    /// multiplied by `e/scale`.
    pub fn ramanujan_d(&self) -> Self {
        let scale = BigInt::from(self.scale);
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let e = self.offset + (i as u64 * self.scale) as i64;
                c.scaled(&Rational::new(BigInt::from(e), scale.clone()))
            })
            .collect();
        QSeries {
            coeffs,
            ..self.clone()
        }
    }

    /// Compares two series on their common known range and returns the first
    /// exponent (as a power of `q`) where they differ.
    pub fn first_mismatch(&self, other: &Self) -> Result<Option<Rational>> {
        let (x, y) = self.aligned(other)?;
        let prec = x.prec.min(y.prec);
        let mut diff: BTreeMap<i64, (C, C)> = BTreeMap::new();
        for (e, c) in x.terms().filter(|(e, _)| *e < prec) {
            diff.entry(e).or_insert_with(|| (C::zero(), C::zero())).0 = c.clone();
        }
        for (e, c) in y.terms().filter(|(e, _)| *e < prec) {
            diff.entry(e).or_insert_with(|| (C::zero(), C::zero())).1 = c.clone();
        }
        Ok(diff
            .into_iter()
            .find(|(_, (a, b))| a != b)
            .map(|(e, _)| Rational::new(BigInt::from(e), BigInt::from(x.scale))))
    }

    /// Known range shared with `other`, as a power of `q`.
    pub fn common_prec(&self, other: &Self) -> Rational {
        self.prec_q().min(other.prec_q())
    }
}

impl QSeries<Rational> {
    pub fn to_cyclotomic(&self) -> QSeries<CycNumber> {
        self.map(|c| CycNumber::from_rational(c.clone()))
    }

    /// Machine form: `[numerator, denominator, exponent-numerator]` for each
    /// nonzero term; exponents are in `1/scale` units.
    pub fn to_json_triples(&self) -> Value {
        Value::Array(
            self.terms()
                .map(|(e, c)| Value::Array(vec![bigint_json(c.numer()), bigint_json(c.denom()), Value::from(e)]))
                .collect(),
        )
    }
}

/// JSON integer when it fits in 64 bits, decimal string otherwise.
pub(crate) fn bigint_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(x.to_string()),
    }
}

impl<C: Coefficient> fmt::Display for QSeries<C> {
    /// `c0 + c1*q^(a/24) + ... + O(q^(p/24))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let (sep, c) = match (first, c.is_negative()) {
                (true, true) => ("-", c.negated()),
                (true, false) => ("", c.clone()),
                (false, true) => (" - ", c.negated()),
                (false, false) => (" + ", c.clone()),
            };
            let text = c.to_string();
            let text = if text.contains(' ') { format!("[{text}]") } else { text };
            if e == 0 {
                write!(f, "{sep}{text}")?;
            } else {
                write!(f, "{sep}{text}*q^({e}/{})", self.scale)?;
            }
            first = false;
        }
        let sep = if first { "" } else { " + " };
        write!(f, "{sep}O(q^({}/{}))", self.prec, self.scale)
    }
}

/// `eta(z) = q^{1/24} prod_{n>=1} (1 - q^n)`, known modulo `q^prec`, from
/// Euler's pentagonal number theorem.
pub fn eta_series(prec: i64) -> Result<QSeries> {
    if prec < 1 {
        return Err(Error::domain(format!("eta series needs prec >= 1, got {prec}")));
    }
    let n = prec as usize;
    let mut coeffs = vec![<Rational as Zero>::zero(); n];
    for sign_k in [1i64, -1] {
        let mut k = if sign_k == 1 { 0 } else { 1 };
        loop {
            let kk = sign_k * k;
            let g = (kk * (3 * kk - 1) / 2) as usize;
            if g >= n {
                break;
            }
            coeffs[g] = if k % 2 == 0 { <Rational as One>::one() } else { -<Rational as One>::one() };
            k += 1;
        }
    }
    QSeries::with_prec(ETA_SCALE, 1, prec * ETA_SCALE as i64, coeffs)
}

/// Formats a rational coefficient for reports.
pub fn render_rational(r: &Rational) -> String {
    format_rational(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};
    use proptest::prelude::*;

    fn series(scale: u64, offset: i64, coeffs: &[i64]) -> QSeries {
        QSeries::new(scale, offset, coeffs.iter().map(|&c| rat_int(c)).collect()).unwrap()
    }

    /// prod_{n>=1} (1 - q^n) by repeated multiplication with binomials.
    fn naive_euler_product(n: usize) -> Vec<i64> {
        let mut p = vec![0i64; n];
        p[0] = 1;
        for k in 1..n {
            for i in (k..n).rev() {
                p[i] -= p[i - k];
            }
        }
        p
    }

    #[test]
    fn ring_examples() {
        let x = series(1, 0, &[1, 1, 0, 0]);
        let y = series(1, 0, &[1, -1, 0, 0]);
        assert_eq!(x.mul(&y).unwrap(), series(1, 0, &[1, 0, -1, 0]));
        let q = series(24, 1, &[1, 0]);
        let q2 = q.mul(&q).unwrap();
        assert_eq!(q2.offset(), 2);
        assert_eq!(q2.coeff(2), Some(rat_int(1)));
    }

    #[test]
    fn pow_examples() {
        let x = series(1, 0, &[1, 1, 0, 0, 0]);
        assert_eq!(x.pow(0).unwrap(), series(1, 0, &[1, 0, 0, 0, 0]));
        let geo = series(1, 0, &[1, -1, 0, 0, 0]).pow(-1).unwrap();
        assert_eq!(geo, series(1, 0, &[1, 1, 1, 1, 1]));
        let eta = eta_series(30).unwrap();
        let one = eta.pow(4).unwrap().mul(&eta.pow(-4).unwrap()).unwrap();
        assert_eq!(one.valuation(), Valuation::At(0));
        assert!(one.terms().all(|(e, c)| e == 0 && *c == rat_int(1)));
        let one = eta.pow(2).unwrap().mul(&eta.pow(-2).unwrap()).unwrap();
        assert!(one.terms().all(|(e, c)| e == 0 && *c == rat_int(1)));
    }

    #[test]
    fn division_by_nonunit_is_reported() {
        let zero = QSeries::<Rational>::zero(1, 0, 5).unwrap();
        assert!(matches!(zero.pow(-1), Err(Error::DivisionByNonunit(_))));
        let cyc = QSeries::new(1, 0, vec![CycNumber::from_coeffs(2, vec![rat_int(1), rat_int(1)])]).unwrap();
        assert!(matches!(cyc.inverse(), Err(Error::DivisionByNonunit(_))));
    }

    #[test]
    fn d_examples() {
        let one = QSeries::<Rational>::one(24, 240).unwrap();
        assert!(one.ramanujan_d().terms().next().is_none());
        let q = series(24, 1, &[1]);
        assert_eq!(q.ramanujan_d().coeff(1), Some(rat(1, 24)));
    }

    #[test]
    fn eta_series_leading_terms() {
        let eta = eta_series(21).unwrap();
        assert_eq!(eta.offset(), 1);
        let expected = naive_euler_product(21);
        for (i, c) in expected.iter().enumerate() {
            assert_eq!(eta.coeff(1 + 24 * i as i64), Some(rat_int(*c)), "q^{i}");
        }
        // pentagonal gap
        assert_eq!(eta.coeff(1 + 24 * 3), Some(rat_int(0)));
        assert_eq!(&expected[..16], &[1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1, 0, 0, -1]);
    }

    #[test]
    fn eta_series_matches_naive_product_to_500() {
        let eta = eta_series(500).unwrap();
        let naive = naive_euler_product(500);
        for (i, c) in naive.iter().enumerate() {
            assert_eq!(eta.coeffs()[i], rat_int(*c));
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(series(1, 0, &[1, 8, 24]).valuation(), Valuation::At(0));
        assert_eq!(series(1, 2, &[1, 1]).valuation(), Valuation::At(2));
        assert_eq!(QSeries::<Rational>::zero(1, 0, 4).unwrap().valuation(), Valuation::ZeroToPrecision);
    }

    #[test]
    fn precision_follows_min_rule() {
        let x = series(1, 0, &[1, 1, 1, 1, 1, 1]);
        let y = series(1, 2, &[1, 1]);
        let p = x.mul(&y).unwrap();
        assert_eq!((p.offset(), p.prec()), (2, 4));
        let s = x.add(&y).unwrap();
        assert_eq!((s.offset(), s.prec()), (0, 4));
        assert!(series(24, 1, &[1]).add(&series(24, 0, &[1])).is_err());
    }

    #[test]
    fn text_and_json_forms() {
        let x = series(24, 0, &[1, -8, 0, 3]);
        assert_eq!(x.to_string(), "1 - 8*q^(24/24) + 3*q^(72/24) + O(q^(96/24))");
        assert_eq!(x.to_json_triples().to_string(), "[[1,1,0],[-8,1,24],[3,1,72]]");
    }

    fn arb_series() -> impl Strategy<Value = QSeries> {
        (0i64..3, proptest::collection::vec(-4i64..=4, 1..10))
            .prop_map(|(off, c)| series(1, off, &c))
    }

    fn arb_unit_series() -> impl Strategy<Value = QSeries> {
        (prop_oneof![Just(1i64), Just(-1), Just(2)], proptest::collection::vec(-3i64..=3, 0..8)).prop_map(
            |(lead, rest)| {
                let mut c = vec![lead];
                c.extend(rest);
                series(1, 0, &c)
            },
        )
    }

    proptest! {
        #[test]
        fn ring_axioms(x in arb_series(), y in arb_series(), z in arb_series()) {
            let lhs = x.mul(&y).unwrap().mul(&z).unwrap();
            let rhs = x.mul(&y.mul(&z).unwrap()).unwrap();
            prop_assert_eq!(lhs.first_mismatch(&rhs).unwrap(), None);
            let lhs = x.mul(&y.add(&z).unwrap()).unwrap();
            let rhs = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
            prop_assert_eq!(lhs.first_mismatch(&rhs).unwrap(), None);
            let comm = x.mul(&y).unwrap().first_mismatch(&y.mul(&x).unwrap()).unwrap();
            prop_assert_eq!(comm, None);
        }

        #[test]
        fn d_is_a_derivation(x in arb_series(), y in arb_series(), shift in -30i64..30) {
            let x = x.to_scale(24).unwrap().shift(shift);
            let y = y.to_scale(24).unwrap();
            let lhs = x.mul(&y).unwrap().ramanujan_d();
            let rhs = x.ramanujan_d().mul(&y).unwrap().add(&x.mul(&y.ramanujan_d()).unwrap()).unwrap();
            prop_assert_eq!(lhs.first_mismatch(&rhs).unwrap(), None);
        }

        #[test]
        fn pow_is_additive_in_the_exponent(x in arb_unit_series(), a in -4i64..5, b in -4i64..5) {
            let lhs = x.pow(a + b).unwrap();
            let rhs = x.pow(a).unwrap().mul(&x.pow(b).unwrap()).unwrap();
            prop_assert_eq!(lhs.first_mismatch(&rhs).unwrap(), None);
        }
    }
}
