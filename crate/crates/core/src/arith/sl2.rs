//! Integer matrix completions used by cusp expansions.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Matrix {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Sl2Matrix {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let m = Sl2Matrix { a, b, c, d };
        if m.det() != BigInt::one() {
            return Err(Error::domain(format!("{m} has determinant {}", m.det())));
        }
        Ok(m)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// Another completion of the same first column: right multiplication by
    /// `T^s`.
    pub fn shifted(&self, s: i64) -> Self {
        let s = BigInt::from(s);
        Sl2Matrix {
            a: self.a.clone(),
            b: &self.b + &self.a * &s,
            c: self.c.clone(),
            d: &self.d + &self.c * &s,
        }
    }
}

impl fmt::Display for Sl2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// Solves `x*v - u*y = 1` for coprime `x, y`, taking `u` as the least
/// nonnegative solution modulo `|x|` (or `u = -y, v = 0` when `x = 0`).
fn complete_column(x: &BigInt, y: &BigInt) -> Result<(BigInt, BigInt)> {
    if !x.gcd(y).is_one() {
        return Err(Error::domain(format!("gcd({x}, {y}) != 1")));
    }
    if x.is_zero() {
        // y = +-1
        return Ok((-y, BigInt::zero()));
    }
    let modulus = x.abs();
    // u = -y^{-1} mod |x|
    let ext = y.mod_floor(&modulus).extended_gcd(&modulus);
    let inv = ext.x.mod_floor(&modulus);
    let u = (-inv).mod_floor(&modulus);
    let num = BigInt::one() + &u * y;
    debug_assert!((&num % x).is_zero());
    let v = num / x;
    Ok((u, v))
}

/// Completes `(a, c)` with `gcd(a, c) = 1` to `(a b; c d)` in `SL2(Z)`.
///
/// `b` is the least nonnegative residue modulo `|a|` that works; for `a = 0`
/// the completion is `(0 -c; c 0)`.
pub fn sl2_complete(a: &BigInt, c: &BigInt) -> Result<Sl2Matrix> {
    let (b, d) = complete_column(a, c)?;
    Sl2Matrix::new(a.clone(), b, c.clone(), d)
}

/// The matrix `(e f; g h)` with `e = a t / gcd(t, c)`, `g = c / gcd(t, c)` and
/// `e h - f g = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EfghCompletion {
    pub e: BigInt,
    pub f: BigInt,
    pub g: BigInt,
    pub h: BigInt,
}

impl EfghCompletion {
    /// Another valid `(f, h)`: `(f + e u, h + g u)`.
    pub fn shifted(&self, u: i64) -> Self {
        let u = BigInt::from(u);
        EfghCompletion {
            e: self.e.clone(),
            f: &self.f + &self.e * &u,
            g: self.g.clone(),
            h: &self.h + &self.g * &u,
        }
    }

    pub fn det(&self) -> BigInt {
        &self.e * &self.h - &self.f * &self.g
    }
}

pub fn efgh_complete(t: u64, a: &BigInt, c: &BigInt) -> Result<EfghCompletion> {
    if t == 0 {
        return Err(Error::domain("efgh completion needs t >= 1"));
    }
    if !a.gcd(c).is_one() {
        return Err(Error::domain(format!("gcd({a}, {c}) != 1")));
    }
    let t = BigInt::from(t);
    let g_t = t.gcd(c);
    let e = a * &t / &g_t;
    let g = c / &g_t;
    let (f, h) = complete_column(&e, &g)?;
    Ok(EfghCompletion { e, f, g, h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn entries(m: &Sl2Matrix) -> [i64; 4] {
        [&m.a, &m.b, &m.c, &m.d].map(|x| i64::try_from(x).unwrap())
    }

    #[test]
    fn sl2_examples() {
        assert_eq!(entries(&sl2_complete(&big(1), &big(2)).unwrap()), [1, 0, 2, 1]);
        assert_eq!(entries(&sl2_complete(&big(1), &big(0)).unwrap()), [1, 0, 0, 1]);
        let m = sl2_complete(&big(3), &big(4)).unwrap();
        assert_eq!((m.a.clone(), m.c.clone()), (big(3), big(4)));
        assert_eq!(m.det(), big(1));
        assert_eq!(entries(&sl2_complete(&big(0), &big(1)).unwrap()), [0, -1, 1, 0]);
        assert!(sl2_complete(&big(2), &big(4)).is_err());
    }

    #[test]
    fn efgh_examples() {
        let x = efgh_complete(4, &big(1), &big(2)).unwrap();
        assert_eq!((x.e.clone(), x.g.clone()), (big(2), big(1)));
        assert_eq!(big(2) * &x.h - &x.f, big(1));

        let x = efgh_complete(1, &big(1), &big(1)).unwrap();
        assert_eq!([x.e, x.f, x.g, x.h], [big(1), big(0), big(1), big(1)]);

        let x = efgh_complete(2, &big(1), &big(2)).unwrap();
        assert_eq!((x.e.clone(), x.g.clone()), (big(1), big(1)));
        assert_eq!(&x.h - &x.f, big(1));
    }

    proptest! {
        #[test]
        fn completions_have_unit_determinant(a in -500i64..500, c in -500i64..500, t in 1u64..200) {
            let (a, c) = (big(a), big(c));
            prop_assume!(a.gcd(&c).is_one());
            let m = sl2_complete(&a, &c).unwrap();
            prop_assert_eq!(m.det(), big(1));
            prop_assert_eq!(m.shifted(7).det(), big(1));
            let x = efgh_complete(t, &a, &c).unwrap();
            prop_assert_eq!(x.det(), big(1));
            prop_assert_eq!(x.shifted(-3).det(), big(1));
            let g_t = BigInt::from(t).gcd(&c);
            prop_assert_eq!(&x.g * &g_t, c);
        }
    }
}
