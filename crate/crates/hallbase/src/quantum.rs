//! Quantum integers, factorials and binomials, plus specialization of exact
//! expressions at `v = sqrt(q)`.
//!
//! The balanced convention is used throughout: `[n] = (v^n - v^-n)/(v - v^-1)`,
//! so `[2] = v + v^-1` and every `[n]` is bar-invariant.  The `gauss_*`
//! functions are the one-sided integer versions `1 + q + ... + q^(n-1)` used
//! for counting over a finite field with `q` elements.

use crate::error::{HallError, Result};
use crate::laurent::{Coeff, LaurentPoly};
use crate::ratfun::RationalFunction;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Balanced quantum integer `[n] = v^(n-1) + v^(n-3) + ... + v^(1-n)`.
/// Odd in `n`: `[-n] = -[n]`.
pub fn qint(n: i64) -> LaurentPoly {
    if n == 0 {
        return LaurentPoly::zero();
    }
    if n < 0 {
        return -&qint(-n);
    }
    let mut p = LaurentPoly::zero();
    let mut e = n - 1;
    while e >= 1 - n {
        p = p + LaurentPoly::term(e, crate::laurent::rat(1));
        e -= 2;
    }
    p
}

/// `[n]! = [1][2]...[n]`.
pub fn qfac(n: u32) -> LaurentPoly {
    let mut p = LaurentPoly::one();
    for k in 1..=n {
        p = &p * &qint(k as i64);
    }
    p
}

/// Balanced quantum binomial; always a bar-invariant Laurent polynomial with
/// nonnegative integer coefficients.
pub fn qbinom(n: u32, k: u32) -> LaurentPoly {
    if k > n {
        return LaurentPoly::zero();
    }
    let f = RationalFunction::new(qfac(n), &qfac(k) * &qfac(n - k));
    f.as_laurent()
        .expect("quantum binomial is a Laurent polynomial")
        .clone()
}

/// One-sided `q`-integer `1 + q + ... + q^(n-1)` as an exact integer.
pub fn gauss_int(n: u32, q: u64) -> BigUint {
    let q = BigUint::from(q);
    let mut acc = BigUint::zero();
    let mut pw = BigUint::one();
    for _ in 0..n {
        acc += &pw;
        pw *= &q;
    }
    acc
}

/// `[n]_q! = prod gauss_int(k, q)`.
pub fn gauss_fac(n: u32, q: u64) -> BigUint {
    let mut acc = BigUint::one();
    for k in 1..=n {
        acc *= gauss_int(k, q);
    }
    acc
}

/// Number of `k`-dimensional subspaces of an `n`-dimensional space over the
/// field with `q` elements.
pub fn gauss_binom(n: u32, k: u32, q: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    // product formula with exact division at each step
    let mut acc = BigUint::one();
    let q = BigUint::from(q);
    for i in 0..k {
        let num = q.pow(n - i) - BigUint::one();
        let den = q.pow(i + 1) - BigUint::one();
        acc = acc * num / den;
    }
    acc
}

/// Exact integer square root test.
fn exact_sqrt(q: u64) -> Option<u64> {
    let s = (q as f64).sqrt().round() as u64;
    for c in s.saturating_sub(1)..=s + 1 {
        if c * c == q {
            return Some(c);
        }
    }
    None
}

/// An element of `Q(sqrt(q))` written `rational + surd * sqrt(q)`.
///
/// When `q` is a perfect square the surd part is folded into the rational
/// part, so equality of values is structural equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtVal {
    pub q: u64,
    pub rational: Coeff,
    pub surd: Coeff,
}

impl SqrtVal {
    pub fn new(q: u64, rational: Coeff, surd: Coeff) -> Self {
        assert!(q >= 2, "field size must be at least 2");
        let mut val = SqrtVal { q, rational, surd };
        if let Some(s) = exact_sqrt(q) {
            val.rational += &val.surd * BigRational::from_integer(BigInt::from(s));
            val.surd = Coeff::zero();
        }
        val
    }

    pub fn zero(q: u64) -> Self {
        SqrtVal::new(q, Coeff::zero(), Coeff::zero())
    }

    pub fn one(q: u64) -> Self {
        SqrtVal::new(q, Coeff::one(), Coeff::zero())
    }

    pub fn from_int(q: u64, n: &BigInt) -> Self {
        SqrtVal::new(q, BigRational::from_integer(n.clone()), Coeff::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }

    /// The pair `(rational, surd)`.
    pub fn pair(&self) -> (Coeff, Coeff) {
        (self.rational.clone(), self.surd.clone())
    }

    pub fn add(&self, other: &SqrtVal) -> SqrtVal {
        assert_eq!(self.q, other.q);
        SqrtVal::new(
            self.q,
            &self.rational + &other.rational,
            &self.surd + &other.surd,
        )
    }

    pub fn sub(&self, other: &SqrtVal) -> SqrtVal {
        assert_eq!(self.q, other.q);
        SqrtVal::new(
            self.q,
            &self.rational - &other.rational,
            &self.surd - &other.surd,
        )
    }

    pub fn mul(&self, other: &SqrtVal) -> SqrtVal {
        assert_eq!(self.q, other.q);
        let q = BigRational::from_integer(BigInt::from(self.q));
        // (a + b s)(c + d s) = (ac + bd q) + (ad + bc) s, s^2 = q
        SqrtVal::new(
            self.q,
            &(&self.rational * &other.rational) + &(&self.surd * &other.surd * &q),
            &(&self.rational * &other.surd) + &(&self.surd * &other.rational),
        )
    }

    pub fn inv(&self) -> Result<SqrtVal> {
        // 1/(a + b s) = (a - b s)/(a^2 - b^2 q)
        let q = BigRational::from_integer(BigInt::from(self.q));
        let norm = &(&self.rational * &self.rational) - &(&self.surd * &self.surd * &q);
        if norm.is_zero() {
            return Err(HallError::Usage(format!(
                "value vanishes at v = sqrt({})",
                self.q
            )));
        }
        Ok(SqrtVal::new(
            self.q,
            &self.rational / &norm,
            -&self.surd / &norm,
        ))
    }

    /// If the surd part is zero, the plain rational value.
    pub fn as_rational(&self) -> Option<&Coeff> {
        if self.surd.is_zero() {
            Some(&self.rational)
        } else {
            None
        }
    }
}

/// `v^e` at `v = sqrt(q)`: `q^(e div 2) * sqrt(q)^(e mod 2)`.
pub fn v_power(e: i64, q: u64) -> SqrtVal {
    let k = e.div_euclid(2);
    let r = e.rem_euclid(2);
    let qk = if k >= 0 {
        BigRational::from_integer(BigInt::from(q).pow(k as u32))
    } else {
        BigRational::from_integer(BigInt::from(q).pow((-k) as u32)).recip()
    };
    if r == 0 {
        SqrtVal::new(q, qk, Coeff::zero())
    } else {
        SqrtVal::new(q, Coeff::zero(), qk)
    }
}

/// Evaluate a Laurent polynomial at `v = sqrt(q)`.
pub fn specialize_laurent(p: &LaurentPoly, q: u64) -> SqrtVal {
    let mut acc = SqrtVal::zero(q);
    for (e, c) in p.iter() {
        let mut t = v_power(*e, q);
        t.rational *= c;
        t.surd *= c;
        acc = acc.add(&t);
    }
    acc
}

/// Evaluate a rational function at `v = sqrt(q)`.  Errors if the denominator
/// vanishes there (it never does for denominators built from quantum
/// integers, since `sqrt(q) > 1`).
pub fn specialize_sqrt(f: &RationalFunction, q: u64) -> Result<SqrtVal> {
    let num = specialize_laurent(f.numerator(), q);
    let den = specialize_laurent(f.denominator(), q);
    Ok(num.mul(&den.inv()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::{rat, ratio};

    #[test]
    fn small_quantum_integers() {
        assert!(qint(0).is_zero());
        assert_eq!(qint(1), LaurentPoly::one());
        assert_eq!(qint(2), LaurentPoly::v() + LaurentPoly::v().bar());
        let three = LaurentPoly::term(2, rat(1)) + LaurentPoly::one() + LaurentPoly::term(-2, rat(1));
        assert_eq!(qint(3), three);
        assert_eq!(qint(-2), -&qint(2));
    }

    #[test]
    fn quantum_binomials() {
        assert_eq!(qbinom(4, 2).to_string(), "v^4 + v^2 + 2 + v^-2 + v^-4");
        assert_eq!(qbinom(5, 0), LaurentPoly::one());
        assert_eq!(qbinom(3, 5), LaurentPoly::zero());
        for n in 0..=12u32 {
            for k in 0..=n {
                let b = qbinom(n, k);
                assert_eq!(b, qbinom(n, n - k), "symmetry at ({n},{k})");
                assert!(b.is_bar_invariant(), "bar invariance at ({n},{k})");
                assert!(b.is_integral(), "integrality at ({n},{k})");
            }
        }
    }

    #[test]
    fn quantum_pascal() {
        // [n k] = v^(n-k) [n-1 k-1] + v^(-k) [n-1 k]
        for n in 1..=8u32 {
            for k in 1..=n {
                let lhs = qbinom(n, k);
                let rhs = qbinom(n - 1, k - 1).shift((n - k) as i64)
                    + qbinom(n - 1, k).shift(-(k as i64));
                assert_eq!(lhs, rhs, "Pascal at ({n},{k})");
            }
        }
    }

    #[test]
    fn gaussian_counts() {
        assert_eq!(gauss_int(3, 2), BigUint::from(7u32));
        assert_eq!(gauss_fac(3, 2), BigUint::from(21u32));
        // lines in F_2^4: 15; planes in F_2^4: 35
        assert_eq!(gauss_binom(4, 1, 2), BigUint::from(15u32));
        assert_eq!(gauss_binom(4, 2, 2), BigUint::from(35u32));
        // the balanced and one-sided versions agree up to a power of v
        for n in 1..=5u32 {
            for k in 0..=n {
                let balanced = specialize_laurent(&qbinom(n, k), 3);
                let shift = v_power((k * (n - k)) as i64, 3);
                let one_sided = SqrtVal::from_int(3, &BigInt::from(gauss_binom(n, k, 3)));
                assert_eq!(balanced.mul(&shift), one_sided, "at ({n},{k})");
            }
        }
    }

    #[test]
    fn specialization_examples() {
        // v^2 at q=3 is 3
        let f = RationalFunction::from_laurent(LaurentPoly::q());
        assert_eq!(specialize_sqrt(&f, 3).unwrap().pair(), (rat(3), rat(0)));
        // [2] at q=2: sqrt(2) + 1/sqrt(2) = (3/2) sqrt(2)
        let f = RationalFunction::from_laurent(qint(2));
        assert_eq!(specialize_sqrt(&f, 2).unwrap().pair(), (rat(0), ratio(3, 2)));
        // [2] at q=4: 2 + 1/2 = 5/2, surd part folded away
        assert_eq!(specialize_sqrt(&f, 4).unwrap().pair(), (ratio(5, 2), rat(0)));
        // rational function: 1/(v^2-1) at q=2 is 1
        let g = RationalFunction::new(
            LaurentPoly::one(),
            LaurentPoly::q() - LaurentPoly::one(),
        );
        assert_eq!(specialize_sqrt(&g, 2).unwrap().pair(), (rat(1), rat(0)));
    }

    #[test]
    fn specialization_is_a_ring_map() {
        let f = RationalFunction::new(qint(3), qint(2));
        let g = RationalFunction::from_laurent(
            LaurentPoly::term(-1, rat(5)) + LaurentPoly::one(),
        );
        for q in [2u64, 3, 4, 5, 9] {
            let fg = specialize_sqrt(&(&f * &g), q).unwrap();
            let f_times_g = specialize_sqrt(&f, q)
                .unwrap()
                .mul(&specialize_sqrt(&g, q).unwrap());
            assert_eq!(fg, f_times_g, "multiplicative at q={q}");
            let sum = specialize_sqrt(&(&f + &g), q).unwrap();
            let f_plus_g = specialize_sqrt(&f, q)
                .unwrap()
                .add(&specialize_sqrt(&g, q).unwrap());
            assert_eq!(sum, f_plus_g, "additive at q={q}");
        }
    }

    #[test]
    fn surd_arithmetic() {
        // (1 + sqrt(2))(1 - sqrt(2)) = -1
        let a = SqrtVal::new(2, rat(1), rat(1));
        let b = SqrtVal::new(2, rat(1), rat(-1));
        assert_eq!(a.mul(&b), SqrtVal::new(2, rat(-1), rat(0)));
        // inverse: 1/(1 + sqrt(2)) = sqrt(2) - 1
        assert_eq!(a.inv().unwrap(), SqrtVal::new(2, rat(-1), rat(1)));
        // perfect square folds: sqrt(9) = 3
        let c = SqrtVal::new(9, rat(0), rat(1));
        assert_eq!(c.pair(), (rat(3), rat(0)));
    }
}
