//! Exact elements of cyclotomic fields `Q(zeta_L)`.
//!
//! Elements are stored in the group-ring basis `{zeta^j : 0 <= j < L}`, which
//! is not a field basis: several coefficient vectors name the same number.
//! Zero testing reduces modulo the cyclotomic polynomial `Phi_L`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{divisors, euler_phi, format_rational, lcm, prime_power, Rational};

static CYCLOTOMIC: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();

/// Coefficients (lowest degree first) of the `n`-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<BigInt>> {
    assert!(n > 0, "cyclotomic polynomial of order 0");
    let cache = CYCLOTOMIC.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("cyclotomic cache poisoned").get(&n) {
        return p.clone();
    }
    let poly = Arc::new(compute_cyclotomic(n));
    cache
        .lock()
        .expect("cyclotomic cache poisoned")
        .insert(n, poly.clone());
    poly
}

fn compute_cyclotomic(n: u64) -> Vec<BigInt> {
    if n == 1 {
        return vec![-BigInt::one(), BigInt::one()];
    }
    if let Some((p, s)) = prime_power(n) {
        // Phi_{p^s}(x) = sum_{0 <= u < p} x^{u p^{s-1}}
        let step = (n / p) as usize;
        let mut out = vec![BigInt::zero(); step * (p as usize - 1) + 1];
        for u in 0..p as usize {
            out[u * step] = BigInt::one();
        }
        debug_assert!(s >= 1);
        return out;
    }
    // x^n - 1 divided by Phi_d for every proper divisor d
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d == n {
            continue;
        }
        num = exact_div_monic(&num, &cyclotomic_polynomial(d));
    }
    num
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dc) in den.iter().enumerate() {
            rem[i + j] -= &c * dc;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// Remainder of `a` modulo a monic integer polynomial.
fn rem_monic(a: &[Rational], m: &[BigInt]) -> Vec<Rational> {
    let deg = m.len() - 1;
    let mut r = a.to_vec();
    for i in (deg..r.len()).rev() {
        if r[i].is_zero() {
            continue;
        }
        let c = r[i].clone();
        for (j, mc) in m.iter().enumerate() {
            if !mc.is_zero() {
                r[i - deg + j] -= &c * Rational::from_integer(mc.clone());
            }
        }
    }
    r.truncate(deg);
    r.resize(deg, Rational::zero());
    r
}

fn trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![], r);
    }
    let lead = b[db].clone();
    let mut q = vec![Rational::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bc) in b.iter().enumerate() {
            r[i + j] -= &c * bc;
        }
        q[i] = c;
    }
    trim(&mut r);
    (q, r)
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let mut out: Vec<Rational> = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
            x - y
        })
        .collect();
    trim(&mut out);
    out
}

/// An element `sum_j c_j zeta_L^j` of `Q(zeta_L)`, `zeta_L = exp(2 pi i / L)`.
#[derive(Clone, Debug)]
pub struct CycNumber {
    order: u64,
    coeffs: Vec<Rational>,
}

impl CycNumber {
    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        CycNumber {
            order: 1,
            coeffs: vec![r],
        }
    }

    /// `zeta_L^j`, with `j` taken modulo `L`.
    pub fn root_of_unity(order: u64, j: i64) -> Self {
        assert!(order > 0, "root of unity of order 0");
        let mut coeffs = vec![Rational::zero(); order as usize];
        coeffs[j.rem_euclid(order as i64) as usize] = Rational::one();
        CycNumber { order, coeffs }
    }

    /// Builds `sum_j coeffs[j] zeta_L^j`; `coeffs` is padded or folded to length `L`.
    pub fn from_coeffs(order: u64, coeffs: Vec<Rational>) -> Self {
        assert!(order > 0, "cyclotomic order 0");
        let mut folded = vec![Rational::zero(); order as usize];
        for (j, c) in coeffs.into_iter().enumerate() {
            folded[j % order as usize] += c;
        }
        CycNumber {
            order,
            coeffs: folded,
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Re-expresses the element in `Q(zeta_M)` for a multiple `M` of the order.
    pub fn lift(&self, order: u64) -> Self {
        assert!(order % self.order == 0, "{order} is not a multiple of {}", self.order);
        if order == self.order {
            return self.clone();
        }
        let step = (order / self.order) as usize;
        let mut coeffs = vec![Rational::zero(); order as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[j * step] = c.clone();
        }
        CycNumber { order, coeffs }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let l = lcm(self.order, other.order);
        (self.lift(l), other.lift(l))
    }

    /// Coordinates in the power basis `1, zeta, ..., zeta^{phi(L)-1}`: the
    /// remainder of `sum c_j x^j` modulo `Phi_L`.
    pub fn reduced(&self) -> Vec<Rational> {
        rem_monic(&self.coeffs, &cyclotomic_polynomial(self.order))
    }

    /// Exact zero test by divisibility by `Phi_L`.
    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(Zero::is_zero) {
            return true;
        }
        self.reduced().iter().all(Zero::is_zero)
    }

    /// The same number written with power-basis coordinates.
    pub fn canonical(&self) -> Self {
        CycNumber::from_coeffs(self.order, self.reduced())
    }

    /// Returns the rational value when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        let red = self.reduced();
        if red.iter().skip(1).all(Zero::is_zero) {
            Some(red.first().cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut a, b) = self.aligned(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (mut a, b) = self.aligned(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x -= y;
        }
        a
    }

    pub fn neg(&self) -> Self {
        CycNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.order == 1 {
            return other.scale(&self.coeffs[0]);
        }
        if other.order == 1 {
            return self.scale(&other.coeffs[0]);
        }
        let (a, b) = self.aligned(other);
        let l = a.order as usize;
        let mut coeffs = vec![Rational::zero(); l];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    coeffs[(i + j) % l] += x * y;
                }
            }
        }
        CycNumber {
            order: a.order,
            coeffs,
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CycNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        let mut a = self.reduced();
        trim(&mut a);
        if a.is_empty() {
            return None;
        }
        let modulus: Vec<Rational> = cyclotomic_polynomial(self.order)
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect();
        // extended Euclid tracking the cofactor of `a` only
        let (mut r0, mut r1) = (modulus, a);
        let (mut s0, mut s1): (Vec<Rational>, Vec<Rational>) = (vec![], vec![Rational::one()]);
        while r1.len() > 1 {
            let (q, r) = poly_divrem(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r1 is a nonzero constant because Phi_L is irreducible
        let c = r1[0].clone();
        let inv: Vec<Rational> = s1.iter().map(|x| x / &c).collect();
        Some(CycNumber::from_coeffs(self.order, inv))
    }

    /// Floating point value `(re, im)`; only for sanity checks and display.
    pub fn approximate(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        let l = self.order as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (j, c)| {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let angle = 2.0 * std::f64::consts::PI * j as f64 / l;
            (re + v * angle.cos(), im + v * angle.sin())
        })
    }
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl From<Rational> for CycNumber {
    fn from(r: Rational) -> Self {
        CycNumber::from_rational(r)
    }
}

impl fmt::Display for CycNumber {
    /// Power-basis rendering `(p/q)*z_L^j + ...`, identical for equal numbers of
    /// equal order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let red = self.reduced();
        let terms: Vec<String> = red
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                if j == 0 {
                    format!("({})", format_rational(c))
                } else {
                    format!("({})*z{}^{}", format_rational(c), self.order, j)
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Degree of `Q(zeta_L)` over `Q`.
pub fn field_degree(order: u64) -> u64 {
    euler_phi(order)
}
