//! Symmetric function expansions over the complete homogeneous basis.
//!
//! Everything here is classical bookkeeping with exact rational
//! coefficients: an expression is a finite combination of products
//! `h_lambda = h_{lambda_1} h_{lambda_2} ...` indexed by partitions.
//! Schur functions enter through the Jacobi-Trudi determinant, power sums
//! through Newton's identity, and Kostka numbers by counting semistandard
//! tableaux.  The imaginary part of the composition algebra is a
//! polynomial ring on the degree-wise sums of regular classes, so these
//! expansions transport to it verbatim.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::laurent::Coeff;
use crate::partitions::{partitions_of, Partition};

/// A linear combination of products of complete homogeneous functions,
/// keyed by the partition of factor degrees.
pub type HExpr = BTreeMap<Partition, Coeff>;

pub fn h_unit() -> HExpr {
    BTreeMap::from([(Partition::empty(), Coeff::from_integer(1.into()))])
}

pub fn h_single(la: &Partition) -> HExpr {
    BTreeMap::from([(la.clone(), Coeff::from_integer(1.into()))])
}

pub fn add_term(expr: &mut HExpr, la: Partition, c: &Coeff) {
    if c.is_zero() {
        return;
    }
    let entry = expr.entry(la).or_insert_with(Coeff::zero);
    *entry += c;
    if entry.is_zero() {
        let keys: Vec<Partition> =
            expr.iter().filter(|(_, v)| v.is_zero()).map(|(k, _)| k.clone()).collect();
        for k in keys {
            expr.remove(&k);
        }
    }
}

pub fn h_add(a: &HExpr, b: &HExpr) -> HExpr {
    let mut out = a.clone();
    for (la, c) in b {
        add_term(&mut out, la.clone(), c);
    }
    out
}

pub fn h_scale(a: &HExpr, c: &Coeff) -> HExpr {
    if c.is_zero() {
        return HExpr::new();
    }
    a.iter().map(|(la, x)| (la.clone(), x * c)).collect()
}

/// Product: `h_lambda h_mu = h_{lambda union mu}`.
pub fn h_mul(a: &HExpr, b: &HExpr) -> HExpr {
    let mut out = HExpr::new();
    for (la, x) in a {
        for (mu, y) in b {
            let mut parts = la.parts().to_vec();
            parts.extend_from_slice(mu.parts());
            add_term(&mut out, Partition::new(parts), &(x * y));
        }
    }
    out
}

/// The Schur function by the Jacobi-Trudi determinant
/// `s_lambda = det(h_{lambda_i - i + j})` with `h_0 = 1` and `h_{<0} = 0`.
pub fn schur_in_h(la: &Partition) -> HExpr {
    let l = la.len();
    if l == 0 {
        return h_unit();
    }
    let mut out = HExpr::new();
    let mut cols: Vec<usize> = (0..l).collect();
    permute(&mut cols, 0, 1, &mut |perm, sign| {
        let mut degrees = Vec::new();
        for (i, &j) in perm.iter().enumerate() {
            let d = la.parts()[i] as i64 - i as i64 + j as i64;
            if d < 0 {
                return;
            }
            if d > 0 {
                degrees.push(d as u32);
            }
        }
        add_term(&mut out, Partition::new(degrees), &Coeff::from_integer(sign.into()));
    });
    out
}

fn permute(items: &mut Vec<usize>, k: usize, sign: i32, f: &mut impl FnMut(&[usize], i32)) {
    if k == items.len() {
        f(items, sign);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        let s = if i == k { sign } else { -sign };
        permute(items, k + 1, s, f);
        items.swap(k, i);
    }
}

/// The power sum via Newton's identity
/// `p_n = n h_n - sum_{k=1}^{n-1} h_k p_{n-k}`.
pub fn newton_p_in_h(n: u32) -> HExpr {
    assert!(n >= 1, "power sums start at p_1");
    let mut p: Vec<HExpr> = vec![h_unit()]; // p[0] unused placeholder
    for m in 1..=n {
        let mut expr = h_scale(&h_single(&Partition::new(vec![m])), &Coeff::from_integer(m.into()));
        for k in 1..m {
            let t = h_mul(&h_single(&Partition::new(vec![k])), &p[(m - k) as usize]);
            expr = h_add(&expr, &h_scale(&t, &Coeff::from_integer((-1).into())));
        }
        p.push(expr);
    }
    p.pop().unwrap()
}

/// `p_w = prod p_{w_i}`.
pub fn power_in_h(w: &Partition) -> HExpr {
    let mut out = h_unit();
    for &part in w.parts() {
        out = h_mul(&out, &newton_p_in_h(part));
    }
    out
}

/// Kostka number: semistandard tableaux of shape `la` and content `mu`,
/// counted by peeling the largest entry as a horizontal strip.
pub fn kostka(la: &Partition, mu: &Partition) -> BigUint {
    if la.size() != mu.size() {
        return BigUint::zero();
    }
    if mu.is_empty() {
        return BigUint::from(1u32);
    }
    let mut mu_rest = mu.parts().to_vec();
    let last = mu_rest.pop().unwrap();
    let mut total = BigUint::zero();
    for nu in strip_predecessors(la, last) {
        total += kostka(&nu, &Partition::new(mu_rest.clone()));
    }
    total
}

/// Partitions `nu` with `la / nu` a horizontal strip of the given size.
fn strip_predecessors(la: &Partition, size: u32) -> Vec<Partition> {
    let l = la.len();
    let mut out = Vec::new();
    let mut nu = vec![0u32; l];
    fn rec(la: &[u32], row: usize, left: u32, nu: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if row == la.len() {
            if left == 0 {
                out.push(Partition::new(nu.clone()));
            }
            return;
        }
        // nu_row ranges over [max(la_{row+1}, la_row - left) ..= la_row]
        let next = if row + 1 < la.len() { la[row + 1] } else { 0 };
        let low = next.max(la[row].saturating_sub(left));
        for x in low..=la[row] {
            nu[row] = x;
            rec(la, row + 1, left - (la[row] - x), nu, out);
        }
    }
    rec(la.parts(), 0, size, &mut nu, &mut out);
    out
}

/// The expansion `h_mu = sum_la c_la s_la`, obtained by inverting the
/// Jacobi-Trudi expansions; classically `c_la` is the Kostka number
/// `K_{la mu}` (checked against the tableau count in the tests).
pub fn h_in_schur(mu: &Partition) -> BTreeMap<Partition, Coeff> {
    let n = mu.size();
    // lex-descending is a linear extension of dominance, so the matrix of
    // schur_in_h rows is unitriangular in this order
    let mut index = partitions_of(n);
    index.sort_by(|a, b| b.cmp(a));
    let pos: BTreeMap<&Partition, usize> = index.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let rows: Vec<HExpr> = index.iter().map(schur_in_h).collect();
    // back-substitute: coefficient of s_la in h_mu
    let mut out: Vec<Coeff> = vec![Coeff::zero(); index.len()];
    let mut residual: Vec<Coeff> = vec![Coeff::zero(); index.len()];
    residual[pos[mu]] = Coeff::from_integer(1.into());
    for i in (0..index.len()).rev() {
        let c = residual[i].clone();
        if c.is_zero() {
            continue;
        }
        out[i] = c.clone();
        for (la, x) in &rows[i] {
            residual[pos[la]] -= &c * x;
        }
    }
    let mut map = BTreeMap::new();
    for (i, c) in out.into_iter().enumerate() {
        if !c.is_zero() {
            map.insert(index[i].clone(), c);
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    fn int(n: i64) -> Coeff {
        Coeff::from_integer(n.into())
    }

    #[test]
    fn schur_of_a_row_is_complete_homogeneous() {
        for n in 1..=5 {
            assert_eq!(schur_in_h(&p(&[n])), h_single(&p(&[n])));
        }
    }

    #[test]
    fn schur_determinant_examples() {
        let s11 = schur_in_h(&p(&[1, 1]));
        assert_eq!(s11, BTreeMap::from([(p(&[1, 1]), int(1)), (p(&[2]), int(-1))]));
        let s21 = schur_in_h(&p(&[2, 1]));
        assert_eq!(s21, BTreeMap::from([(p(&[2, 1]), int(1)), (p(&[3]), int(-1))]));
        let s111 = schur_in_h(&p(&[1, 1, 1]));
        assert_eq!(
            s111,
            BTreeMap::from([(p(&[1, 1, 1]), int(1)), (p(&[2, 1]), int(-2)), (p(&[3]), int(1))])
        );
    }

    #[test]
    fn newton_identity_examples() {
        assert_eq!(newton_p_in_h(1), h_single(&p(&[1])));
        assert_eq!(
            newton_p_in_h(2),
            BTreeMap::from([(p(&[2]), int(2)), (p(&[1, 1]), int(-1))])
        );
        assert_eq!(
            newton_p_in_h(3),
            BTreeMap::from([(p(&[3]), int(3)), (p(&[2, 1]), int(-3)), (p(&[1, 1, 1]), int(1))])
        );
    }

    #[test]
    fn power_products_multiply_the_newton_images() {
        let direct = power_in_h(&p(&[2, 1]));
        let product = h_mul(&newton_p_in_h(2), &newton_p_in_h(1));
        assert_eq!(direct, product);
    }

    #[test]
    fn kostka_examples() {
        assert_eq!(kostka(&p(&[2, 1]), &p(&[1, 1, 1])), BigUint::from(2u32));
        assert_eq!(kostka(&p(&[2, 2]), &p(&[2, 1, 1])), BigUint::from(1u32));
        assert_eq!(kostka(&p(&[2, 2]), &p(&[1, 1, 1, 1])), BigUint::from(2u32));
        assert_eq!(kostka(&p(&[3, 1]), &p(&[2, 1, 1])), BigUint::from(2u32));
        assert_eq!(kostka(&p(&[1, 1]), &p(&[2])), BigUint::zero());
    }

    #[test]
    fn kostka_is_unitriangular_for_dominance() {
        for n in 1..=5 {
            for la in partitions_of(n) {
                assert!(kostka(&la, &la).is_one(), "K({la:?},{la:?})");
                assert!(kostka(&p(&[n]), &la).is_one());
                for mu in partitions_of(n) {
                    let k = kostka(&la, &mu);
                    let dominates = mu.dominated_by(&la) == Some(true);
                    assert_eq!(!k.is_zero(), dominates, "K({la:?},{mu:?}) = {k}");
                }
            }
        }
    }

    #[test]
    fn h_in_schur_coefficients_are_kostka_numbers() {
        for n in 1..=5 {
            for mu in partitions_of(n) {
                let expansion = h_in_schur(&mu);
                for la in partitions_of(n) {
                    let got = expansion.get(&la).cloned().unwrap_or_else(Coeff::zero);
                    let want = Coeff::from_integer(kostka(&la, &mu).into());
                    assert_eq!(got, want, "coefficient of s_{la:?} in h_{mu:?}");
                }
            }
        }
    }

    #[test]
    fn schur_then_kostka_recovers_h() {
        // substituting the Jacobi-Trudi expansions into h = sum K s gives
        // back the single h term
        for n in 1..=5 {
            for mu in partitions_of(n) {
                let mut acc = HExpr::new();
                for (la, c) in h_in_schur(&mu) {
                    acc = h_add(&acc, &h_scale(&schur_in_h(&la), &c));
                }
                assert_eq!(acc, h_single(&mu));
            }
        }
    }

    #[test]
    fn z_weights_sum_to_one() {
        for n in 1..=6u32 {
            let mut total = Coeff::zero();
            for w in partitions_of(n) {
                total += Coeff::new(1.into(), num_bigint::BigInt::from(w.z()));
            }
            assert!(total.is_one(), "sum of 1/z over partitions of {n}");
        }
    }
}
