//! Rational functions in `v`, kept in a canonical reduced form.
//!
//! A value is stored as `num / den` where `den` is an ordinary monic
//! polynomial in `v` with nonzero constant term (so all `v`-power content
//! lives in the Laurent numerator) and the ordinary part of `num` is coprime
//! to `den` in `Q[v]`.  With that normal form, equality is structural, and
//! "no pole at infinity" style conditions read straight off the degrees.

use crate::error::{HallError, Result};
use crate::laurent::{Coeff, LaurentPoly};
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Dense ordinary polynomial, ascending degree, no trailing zeros.
type Dense = Vec<Coeff>;

fn trim(mut p: Dense) -> Dense {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

/// Remainder of `a` by `b` (`b` nonzero).
fn dense_rem(a: &Dense, b: &Dense) -> Dense {
    assert!(!b.is_empty());
    let mut r = a.clone();
    let lead = b.last().unwrap();
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let factor = r.last().unwrap() / lead;
        for (j, cb) in b.iter().enumerate() {
            let t = &factor * cb;
            r[k + j] -= t;
        }
        r = trim(r);
        if r.is_empty() {
            break;
        }
        // degree strictly dropped; loop condition handles termination
    }
    r
}

/// Exact quotient `a / b`; panics if the division is not exact.
fn dense_divexact(a: &Dense, b: &Dense) -> Dense {
    assert!(!b.is_empty());
    if a.is_empty() {
        return Vec::new();
    }
    assert!(a.len() >= b.len(), "inexact polynomial division");
    let mut r = a.clone();
    let mut q = vec![Coeff::zero(); a.len() - b.len() + 1];
    let lead = b.last().unwrap();
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let factor = r.last().unwrap() / lead;
        q[k] = factor.clone();
        for (j, cb) in b.iter().enumerate() {
            let t = &factor * cb;
            r[k + j] -= t;
        }
        r = trim(r);
        if r.is_empty() {
            break;
        }
    }
    assert!(r.is_empty(), "inexact polynomial division");
    trim(q)
}

/// Monic gcd in `Q[v]`.
fn dense_gcd(a: &Dense, b: &Dense) -> Dense {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = dense_rem(&a, &b);
        a = b;
        b = r;
    }
    if a.is_empty() {
        return a;
    }
    let lead = a.last().unwrap().clone();
    a.iter_mut().for_each(|c| *c = &*c / &lead);
    a
}

/// Split a nonzero Laurent polynomial as `v^shift * (ordinary poly with
/// nonzero constant term)`.
fn split(p: &LaurentPoly) -> (i64, Dense) {
    let lo = p.min_exp().expect("split of zero polynomial");
    let hi = p.max_exp().unwrap();
    let mut dense = vec![Coeff::zero(); (hi - lo + 1) as usize];
    for (e, c) in p.iter() {
        dense[(e - lo) as usize] = c.clone();
    }
    (lo, dense)
}

fn join(shift: i64, dense: &Dense) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    for (i, c) in dense.iter().enumerate() {
        out = out + LaurentPoly::term(shift + i as i64, c.clone());
    }
    out
}

/// A reduced rational function `num / den`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        RationalFunction { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    pub fn from_laurent(p: LaurentPoly) -> Self {
        RationalFunction { num: p, den: LaurentPoly::one() }
    }

    pub fn int(n: i64) -> Self {
        Self::from_laurent(LaurentPoly::int(n))
    }

    /// Build `num / den`, reducing to canonical form.  `den` must be nonzero.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "division by zero rational function");
        if num.is_zero() {
            return Self::zero();
        }
        let (ns, mut n) = split(&num);
        let (ds, mut d) = split(&den);
        let g = dense_gcd(&n, &d);
        if g.len() > 1 {
            n = dense_divexact(&n, &g);
            d = dense_divexact(&d, &g);
        }
        // make the denominator monic
        let lead = d.last().unwrap().clone();
        if !lead.is_one() {
            d.iter_mut().for_each(|c| *c = &*c / &lead);
            n.iter_mut().for_each(|c| *c = &*c / &lead);
        }
        RationalFunction { num: join(ns - ds, &n), den: join(0, &d) }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// If the value is actually a Laurent polynomial, return it.
    pub fn as_laurent(&self) -> Option<&LaurentPoly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverting zero");
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    /// `v -> v^-1` on the whole function.
    pub fn bar(&self) -> Self {
        RationalFunction::new(self.num.bar(), self.den.bar())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = RationalFunction::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Degree at infinity of the numerator minus that of the denominator.
    /// Negative iff the function vanishes at `v = infinity`.  `None` for zero.
    pub fn degree_at_infinity(&self) -> Option<i64> {
        let n = self.num.max_exp()?;
        let d = self.den.max_exp().unwrap_or(0);
        Some(n - d)
    }

    /// True if the expansion at `v = infinity` lies in `v^-1 Q[[v^-1]]`,
    /// i.e. the function vanishes there.
    pub fn vanishes_at_infinity(&self) -> bool {
        match self.degree_at_infinity() {
            None => true,
            Some(d) => d < 0,
        }
    }

    /// Evaluate at a rational `v`-value where the denominator is nonzero.
    pub fn eval(&self, x: &Coeff) -> Result<Coeff> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(HallError::Usage(format!("denominator vanishes at v = {x}")));
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn to_json(&self) -> Value {
        json!({ "num": self.num.to_json(), "den": self.den.to_json() })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| HallError::Json("rational function must be a JSON object".into()))?;
        let num = LaurentPoly::from_json(
            obj.get("num").ok_or_else(|| HallError::Json("missing \"num\"".into()))?,
        )?;
        let den = LaurentPoly::from_json(
            obj.get("den").ok_or_else(|| HallError::Json("missing \"den\"".into()))?,
        )?;
        if den.is_zero() {
            return Err(HallError::Json("zero denominator".into()));
        }
        Ok(RationalFunction::new(num, den))
    }
}

/// `f` and `g` agree modulo `v^-1 Q[[v^-1]]`: their difference, expanded as a
/// power series at `v = infinity`, has no constant or positive-degree terms.
pub fn congruent_mod_vinv(f: &RationalFunction, g: &RationalFunction) -> bool {
    (f - g).vanishes_at_infinity()
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        assert!(!rhs.is_zero(), "division by zero rational function");
        RationalFunction::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: &RationalFunction) -> RationalFunction {
                (&self).$method(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}
