//! Laurent polynomials in the quantum parameter `v` with rational coefficients.
//!
//! Everything downstream (quantum integers, structure constants, transition
//! matrices) lives in `Q[v, v^-1]` or its fraction field, so this type is the
//! workhorse of the crate.  Exponents are `i64`, coefficients are exact
//! rationals, and the zero coefficient is never stored: two values are equal
//! iff their coefficient maps are equal.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::HallError;

/// Exact scalar used throughout: arbitrary-precision rational.
pub type Coeff = BigRational;

/// Convenience: `BigRational` from an `i64`.
pub fn rat(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

/// Convenience: `BigRational` `n/d`, `d != 0`.
pub fn ratio(n: i64, d: i64) -> Coeff {
    assert!(d != 0, "zero denominator");
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A Laurent polynomial `sum c_e v^e` with `c_e` in `Q`.
///
/// Invariant: no entry of `coeffs` is zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, Coeff>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::term(0, rat(1))
    }

    /// The variable `v`.
    pub fn v() -> Self {
        LaurentPoly::term(1, rat(1))
    }

    /// `q = v^2`.
    pub fn q() -> Self {
        LaurentPoly::term(2, rat(1))
    }

    /// The monomial `c v^e` (empty if `c = 0`).
    pub fn term(exp: i64, c: Coeff) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exp, c);
        }
        LaurentPoly { coeffs }
    }

    /// Integer constant.
    pub fn int(n: i64) -> Self {
        LaurentPoly::term(0, rat(n))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeff(0).is_one()
    }

    /// Coefficient of `v^e` (zero if absent).
    pub fn coeff(&self, exp: i64) -> Coeff {
        self.coeffs.get(&exp).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Iterator over `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (&i64, &Coeff)> {
        self.coeffs.iter()
    }

    /// Smallest exponent with nonzero coefficient, if any.
    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Largest exponent with nonzero coefficient, if any.
    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    fn insert_add(&mut self, exp: i64, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&exp) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.coeffs.remove(&exp);
                }
            }
            None => {
                self.coeffs.insert(exp, c);
            }
        }
    }

    /// Multiply by the monomial `c v^e` in place.
    pub fn scale(&self, c: &Coeff, exp: i64) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, a)| (e + exp, a * c))
                .collect(),
        }
    }

    /// Multiply by `v^e`.
    pub fn shift(&self, exp: i64) -> Self {
        self.scale(&rat(1), exp)
    }

    /// The bar involution `v -> v^-1`.
    pub fn bar(&self) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// `self^n` for `n >= 0`.
    pub fn pow(&self, n: u32) -> Self {
        let mut acc = LaurentPoly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }

    /// Substitute `v -> v^k` (`k` may be negative; `k = -1` is `bar`).
    pub fn subst_power(&self, k: i64) -> Self {
        assert!(k != 0, "substitution v -> v^0 is not injective");
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (e * k, c.clone())).collect(),
        }
    }

    /// Evaluate at a rational value of `v` (nonzero if negative exponents occur).
    pub fn eval(&self, x: &Coeff) -> Coeff {
        let mut acc = Coeff::zero();
        for (e, c) in &self.coeffs {
            let p = if *e >= 0 {
                pow_rat(x, *e as u64)
            } else {
                assert!(!x.is_zero(), "evaluating negative exponent at 0");
                pow_rat(x, (-*e) as u64).recip()
            };
            acc += c * p;
        }
        acc
    }

    /// True if every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    /// True if the polynomial lies in `v^-1 Z[v^-1]`: integer coefficients,
    /// all exponents strictly negative.
    pub fn in_vinv_zvinv(&self) -> bool {
        self.is_integral() && self.coeffs.keys().all(|e| *e < 0)
    }

    /// True if symmetric under bar.
    pub fn is_bar_invariant(&self) -> bool {
        *self == self.bar()
    }

    /// JSON object `{"exp": "coeff", ...}` with decimal strings on both sides.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (e, c) in &self.coeffs {
            map.insert(e.to_string(), Value::String(coeff_string(c)));
        }
        Value::Object(map)
    }

    pub fn from_json(value: &Value) -> Result<Self, HallError> {
        let obj = value
            .as_object()
            .ok_or_else(|| HallError::Json("Laurent polynomial must be a JSON object".into()))?;
        let mut poly = LaurentPoly::zero();
        for (k, v) in obj {
            let exp: i64 = k
                .parse()
                .map_err(|_| HallError::Json(format!("bad exponent key {k:?}")))?;
            let s = v
                .as_str()
                .ok_or_else(|| HallError::Json(format!("coefficient for {k} must be a string")))?;
            let c = parse_coeff(s)?;
            if c.is_zero() {
                return Err(HallError::Json(format!("explicit zero coefficient at {k}")));
            }
            if poly.coeffs.insert(exp, c).is_some() {
                return Err(HallError::Json(format!("duplicate exponent {k}")));
            }
        }
        Ok(poly)
    }
}

fn pow_rat(x: &Coeff, n: u64) -> Coeff {
    let mut acc = Coeff::one();
    let mut base = x.clone();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc *= &base;
        }
        base = base.clone() * &base;
        n >>= 1;
    }
    acc
}

/// Render a rational as `"a"` or `"a/b"` in lowest terms.
pub fn coeff_string(c: &Coeff) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Parse `"a"` or `"a/b"`.
pub fn parse_coeff(s: &str) -> Result<Coeff, HallError> {
    let mk = |_| HallError::Json(format!("bad rational literal {s:?}"));
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(mk)?;
            Ok(BigRational::from_integer(n))
        }
        Some((a, b)) => {
            let n: BigInt = a.parse().map_err(mk)?;
            let d: BigInt = b.parse().map_err(mk)?;
            if d.is_zero() {
                return Err(HallError::Json(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(n, d))
        }
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentPoly {
    /// Human-readable form, highest exponent first: `v^2 + 2 - v^-2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = abs.is_one() && *e != 0;
            if !unit_coeff {
                write!(f, "{}", coeff_string(&abs))?;
            }
            match *e {
                0 => {}
                1 => write!(f, "v")?,
                _ => write!(f, "v^{e}")?,
            }
        }
        Ok(())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.insert_add(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.insert_add(*e, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                out.insert_add(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$method(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.coeffs {
            self.insert_add(*e, c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.coeffs {
            self.insert_add(*e, -c.clone());
        }
    }
}

impl MulAssign<&LaurentPoly> for LaurentPoly {
    fn mul_assign(&mut self, rhs: &LaurentPoly) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_are_never_stored() {
        let p = &LaurentPoly::v() - &LaurentPoly::v();
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
        let q = LaurentPoly::term(5, rat(0));
        assert!(q.is_zero());
    }

    #[test]
    fn arithmetic_basics() {
        let v = LaurentPoly::v();
        let vinv = v.bar();
        // (v + v^-1)^2 = v^2 + 2 + v^-2
        let s = &v + &vinv;
        let sq = &s * &s;
        assert_eq!(sq.coeff(2), rat(1));
        assert_eq!(sq.coeff(0), rat(2));
        assert_eq!(sq.coeff(-2), rat(1));
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(sq.to_string(), "v^2 + 2 + v^-2");
    }

    #[test]
    fn bar_is_an_involution() {
        let p = LaurentPoly::term(3, rat(2)) + LaurentPoly::term(-1, ratio(1, 2));
        assert_eq!(p.bar().bar(), p);
        assert!(!p.is_bar_invariant());
        let s = &LaurentPoly::v() + &LaurentPoly::v().bar();
        assert!(s.is_bar_invariant());
    }

    #[test]
    fn pow_and_subst() {
        let v = LaurentPoly::v();
        assert_eq!(v.pow(7), LaurentPoly::term(7, rat(1)));
        assert_eq!(v.pow(0), LaurentPoly::one());
        let p = &LaurentPoly::q() + &LaurentPoly::one();
        // q(v) with v -> v^-1 gives v^-2 + 1
        assert_eq!(p.subst_power(-1), p.bar());
    }

    #[test]
    fn eval_matches_horner_by_hand() {
        // p = v^2 - 3 + 2 v^-1 at v = 2: 4 - 3 + 1 = 2
        let p = LaurentPoly::term(2, rat(1)) + LaurentPoly::int(-3) + LaurentPoly::term(-1, rat(2));
        assert_eq!(p.eval(&rat(2)), rat(2));
    }

    #[test]
    fn json_round_trip() {
        let p = LaurentPoly::term(-2, rat(1)) + LaurentPoly::int(3) + LaurentPoly::term(4, ratio(-7, 2));
        let j = p.to_json();
        assert_eq!(j["-2"], "1");
        assert_eq!(j["0"], "3");
        assert_eq!(j["4"], "-7/2");
        let back = LaurentPoly::from_json(&j).unwrap();
        assert_eq!(back, p);
        // zero polynomial is the empty object
        assert_eq!(LaurentPoly::zero().to_json(), serde_json::json!({}));
    }

    #[test]
    fn json_rejects_malformed_input() {
        for bad in [
            serde_json::json!({"x": "1"}),
            serde_json::json!({"0": "1/0"}),
            serde_json::json!({"0": "0"}),
            serde_json::json!(["not", "an", "object"]),
        ] {
            assert!(LaurentPoly::from_json(&bad).is_err(), "accepted {bad}");
        }
    }

    #[test]
    fn display_is_readable() {
        let p = LaurentPoly::term(1, rat(-1)) + LaurentPoly::int(1);
        assert_eq!(p.to_string(), "-v + 1");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert_eq!(LaurentPoly::int(-2).to_string(), "-2");
    }
}
