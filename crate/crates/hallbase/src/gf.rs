//! Small finite fields, table-driven.
//!
//! Supported sizes are the prime powers up to 16.  Extension fields use fixed
//! monic moduli so that element encodings are stable across runs: elements
//! are base-`p` digit strings read as polynomial coefficients, so `0` and `1`
//! are always the additive and multiplicative units.
//!
//! Moduli: `x^2+x+1` for 4, `x^3+x+1` for 8, `x^2+1` for 9, `x^4+x+1` for 16.

use crate::error::{HallError, Result};
use std::sync::Arc;

/// Field sizes the oracle can enumerate over.
pub const SUPPORTED_Q: [u64; 10] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16];

/// Multiplication, addition and inversion tables for one finite field.
#[derive(Debug)]
pub struct Field {
    pub q: u64,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

fn modulus_for(q: u64) -> Option<(u64, Vec<u64>)> {
    // (p, coefficients of the modulus, ascending, leading 1 included)
    match q {
        4 => Some((2, vec![1, 1, 1])),
        8 => Some((2, vec![1, 1, 0, 1])),
        9 => Some((3, vec![1, 0, 1])),
        16 => Some((2, vec![1, 1, 0, 0, 1])),
        _ => None,
    }
}

/// Digits of `x` base `p`, least significant first, padded to `deg`.
fn digits(x: u64, p: u64, deg: usize) -> Vec<u64> {
    let mut out = vec![0; deg];
    let mut x = x;
    for d in out.iter_mut() {
        *d = x % p;
        x /= p;
    }
    out
}

fn undigits(ds: &[u64], p: u64) -> u64 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

impl Field {
    pub fn new(q: u64) -> Result<Arc<Field>> {
        if !SUPPORTED_Q.contains(&q) {
            return Err(HallError::Usage(format!(
                "unsupported field size {q}; supported: {SUPPORTED_Q:?}"
            )));
        }
        let n = q as usize;
        let mut add = vec![0u8; n * n];
        let mut mul = vec![0u8; n * n];
        let mut neg = vec![0u8; n];
        let mut inv = vec![0u8; n];
        match modulus_for(q) {
            None => {
                // prime field
                for a in 0..q {
                    neg[a as usize] = ((q - a) % q) as u8;
                    for b in 0..q {
                        add[(a * q + b) as usize] = ((a + b) % q) as u8;
                        mul[(a * q + b) as usize] = ((a * b) % q) as u8;
                    }
                }
            }
            Some((p, modulus)) => {
                let deg = modulus.len() - 1;
                for a in 0..q {
                    let da = digits(a, p, deg);
                    let negd: Vec<u64> = da.iter().map(|&x| (p - x) % p).collect();
                    neg[a as usize] = undigits(&negd, p) as u8;
                    for b in 0..q {
                        let db = digits(b, p, deg);
                        let sum: Vec<u64> =
                            da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                        add[(a * q + b) as usize] = undigits(&sum, p) as u8;
                        // polynomial product reduced by the modulus
                        let mut prod = vec![0u64; 2 * deg - 1];
                        for (i, &x) in da.iter().enumerate() {
                            for (j, &y) in db.iter().enumerate() {
                                prod[i + j] = (prod[i + j] + x * y) % p;
                            }
                        }
                        for k in (deg..prod.len()).rev() {
                            let c = prod[k];
                            if c != 0 {
                                prod[k] = 0;
                                for (t, &m) in modulus.iter().enumerate().take(deg) {
                                    let idx = k - deg + t;
                                    prod[idx] = (prod[idx] + c * (p - m) % p) % p;
                                }
                            }
                        }
                        mul[(a * q + b) as usize] = undigits(&prod[..deg], p) as u8;
                    }
                }
            }
        }
        // inverses by scanning the multiplication table
        for a in 1..n {
            for b in 1..n {
                if mul[a * n + b] == 1 {
                    inv[a] = b as u8;
                    break;
                }
            }
            debug_assert!(inv[a] != 0, "no inverse for {a} in F_{q}");
        }
        Ok(Arc::new(Field { q, add, mul, neg, inv }))
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "inverting zero");
        self.inv[a as usize]
    }

    #[inline]
    pub fn div(&self, a: u8, b: u8) -> u8 {
        self.mul(a, self.inv(b))
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.q as u8
    }

    /// Monic irreducible polynomials of degree `d`, each as ascending
    /// coefficients (constant first, leading 1 last).  Used to enumerate the
    /// closed points of the affine line.
    pub fn monic_irreducibles(&self, d: u32) -> Vec<Vec<u8>> {
        let n = self.q as usize;
        // monic polys of degree d: q^d choices of lower coefficients
        let count = n.pow(d);
        let mut out = Vec::new();
        'next: for code in 0..count {
            let mut coeffs = Vec::with_capacity(d as usize + 1);
            let mut c = code;
            for _ in 0..d {
                coeffs.push((c % n) as u8);
                c /= n;
            }
            coeffs.push(1);
            // trial division by all monic polys of smaller positive degree
            for div_deg in 1..=d / 2 {
                let dcount = n.pow(div_deg);
                for dcode in 0..dcount {
                    let mut dv = Vec::with_capacity(div_deg as usize + 1);
                    let mut x = dcode;
                    for _ in 0..div_deg {
                        dv.push((x % n) as u8);
                        x /= n;
                    }
                    dv.push(1);
                    if self.poly_rem(&coeffs, &dv).iter().all(|&c| c == 0) {
                        continue 'next;
                    }
                }
            }
            out.push(coeffs);
        }
        out
    }

    /// Remainder of `a` divided by monic `b`, ascending coefficients.
    fn poly_rem(&self, a: &[u8], b: &[u8]) -> Vec<u8> {
        let mut r: Vec<u8> = a.to_vec();
        let db = b.len() - 1;
        while r.len() > db {
            let lead = *r.last().unwrap();
            if lead != 0 {
                let k = r.len() - 1 - db;
                for (t, &bc) in b.iter().enumerate() {
                    r[k + t] = self.sub(r[k + t], self.mul(lead, bc));
                }
            }
            r.pop();
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_by_exhaustion() {
        for &q in &SUPPORTED_Q {
            let f = Field::new(q).unwrap();
            let n = q as u8;
            for a in 0..n {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.mul(a, 0), 0);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1, "inverse in F_{q} of {a}");
                }
                for b in 0..n {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..n {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_prime_subfield() {
        // in F_9, x -> x^3 must fix exactly 0, 1, 2
        let f = Field::new(9).unwrap();
        let mut fixed = Vec::new();
        for a in 0..9u8 {
            let cube = f.mul(a, f.mul(a, a));
            if cube == a {
                fixed.push(a);
            }
        }
        assert_eq!(fixed, vec![0, 1, 2]);
    }

    #[test]
    fn multiplicative_group_is_cyclic_of_order_q_minus_1() {
        for &q in &[4u64, 8, 9, 16] {
            let f = Field::new(q).unwrap();
            for a in 1..q as u8 {
                let mut pow = 1u8;
                let mut order = 0;
                loop {
                    pow = f.mul(pow, a);
                    order += 1;
                    if pow == 1 {
                        break;
                    }
                }
                assert_eq!((q - 1) % order, 0, "element order divides q-1 in F_{q}");
            }
        }
    }

    #[test]
    fn irreducible_counts_match_necklace_numbers() {
        // number of monic irreducibles of degree d over F_q:
        // (1/d) sum_{e | d} mu(d/e) q^e
        let expected = |q: u64, d: u64| -> u64 {
            let mobius = |n: u64| -> i64 {
                match n {
                    1 => 1,
                    2 | 3 => -1,
                    4 => 0,
                    6 => 1,
                    _ => unreachable!(),
                }
            };
            let mut total = 0i64;
            for e in 1..=d {
                if d % e == 0 {
                    total += mobius(d / e) * (q.pow(e as u32) as i64);
                }
            }
            (total / d as i64) as u64
        };
        for &q in &[2u64, 3, 4] {
            let f = Field::new(q).unwrap();
            for d in 1..=3u32 {
                assert_eq!(
                    f.monic_irreducibles(d).len() as u64,
                    expected(q, d as u64),
                    "irreducible count over F_{q} degree {d}"
                );
            }
        }
    }

    #[test]
    fn rejects_unsupported_sizes() {
        assert!(Field::new(6).is_err());
        assert!(Field::new(17).is_err());
        assert!(Field::new(1).is_err());
    }
}
