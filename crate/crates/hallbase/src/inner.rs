//! The symmetric bilinear form of the composition algebra.
//!
//! On bracket elements the form is diagonal: a class pairs with itself to
//! `v^{2 dim End} / |Aut|`, automorphism counts taken as polynomials in
//! `q = v^2`.  Everything else here unwinds that formula.  Regular classes
//! of dimension `n delta` are grouped into strata (a multiset of closed
//! points of the projective line with a Jordan type at each); all three
//! stratum invariants (class count, `dim End`, `|Aut|`) are polynomials in
//! `q`, and the pairing of two products of the degree sums `E_{k delta}`
//! is a sum over strata of filtration counts.  The weight-space Gram
//! matrices factor over the preprojective, imaginary and preinjective
//! blocks of a PBW index.
//!
//! On top of the form sit the orthogonalized imaginary generators (equal to
//! the Newton power-sum image of the degree sums, which the tests verify
//! rather than assume), the Schur-type product basis, and the transition
//! data of the bar-invariant family over that basis, which the command line
//! exposes as `canonical-prime`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::canonical::{build_transition, weight_indices, TransitionData};
use crate::element::AlgebraElement;
use crate::error::{HallError, Result};
use crate::kronecker::{geometric_cmp, Dim, PBWIndex};
use crate::laurent::{rat, Coeff, LaurentPoly};
use crate::oracle::{aut_order_poly, ClassLabel, IndecLabel};
use crate::partitions::{partitions_of, Partition};
use crate::quantum::qbinom;
use crate::ratfun::RationalFunction;
use crate::straighten::monomial_of_index;
use crate::symfunc::{self, HExpr};

/// Largest imaginary degree `n` the stratum machinery accepts.
pub const MAX_IMAGINARY_DEGREE: u32 = 5;

/// Largest total weight `d1 + d2` the weight-space forms accept.
pub const MAX_WEIGHT: u32 = 8;

fn qpow(k: i64) -> LaurentPoly {
    LaurentPoly::term(2 * k, rat(1))
}

/// Gaussian binomial as a polynomial in `q = v^2` with constant term 1.
fn gauss_poly(n: u32, k: u32) -> LaurentPoly {
    qbinom(n, k).shift((k * (n - k)) as i64)
}

fn moebius(mut n: u32) -> i64 {
    let mut out = 1i64;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            out = -out;
        }
        p += 1;
    }
    if n > 1 {
        out = -out;
    }
    out
}

/// Number of closed points of the projective line with a given residue
/// degree, as a polynomial in `q = v^2`: `q + 1` in degree one and the
/// necklace count `(1/e) sum_{d | e} mu(e/d) q^d` beyond.
pub fn point_count(e: u32) -> LaurentPoly {
    assert!(e >= 1, "residue degrees start at 1");
    if e == 1 {
        return LaurentPoly::q() + LaurentPoly::one();
    }
    let mut acc = LaurentPoly::zero();
    for d in 1..=e {
        if e % d == 0 {
            let m = moebius(e / d);
            if m != 0 {
                acc = acc + LaurentPoly::term(2 * d as i64, rat(m));
            }
        }
    }
    acc.scale(&Coeff::new(BigInt::one(), BigInt::from(e)), 0)
}

/// Automorphism count of the nilpotent module of one point with Jordan
/// type `la`, over the residue field of size `q = v^2`:
/// `q^{sum conj_i^2} prod_k prod_{j=1..mult_k} (1 - q^{-j})`.
pub fn aut_partition(la: &Partition) -> LaurentPoly {
    let exp: i64 = la.conjugate().parts().iter().map(|&c| (c as i64) * (c as i64)).sum();
    let mut acc = LaurentPoly::term(2 * exp, rat(1));
    let mut distinct = la.parts().to_vec();
    distinct.dedup();
    for part in distinct {
        for j in 1..=la.multiplicity(part) {
            acc = &acc * &(LaurentPoly::one() - LaurentPoly::term(-2 * j as i64, rat(1)));
        }
    }
    acc
}

/// Number of submodules of type `mu` inside the nilpotent point module of
/// type `la`, as a polynomial in `q = v^2`: the classical product over the
/// conjugate columns,
/// `prod_i q^{mu'_{i+1} (la'_i - mu'_i)} binom(la'_i - mu'_{i+1}, mu'_i - mu'_{i+1})_q`.
pub fn submodule_count(la: &Partition, mu: &Partition) -> LaurentPoly {
    let lc = la.conjugate();
    let mc = mu.conjugate();
    let col = |p: &Partition, i: usize| -> i64 { p.parts().get(i).map(|&x| x as i64).unwrap_or(0) };
    let mut acc = LaurentPoly::one();
    for i in 0..lc.len().max(mc.len()) {
        let l_i = col(&lc, i);
        let m_i = col(&mc, i);
        let m_next = col(&mc, i + 1);
        if m_i > l_i {
            return LaurentPoly::zero();
        }
        let b = gauss_poly((l_i - m_next) as u32, (m_i - m_next) as u32);
        acc = &acc * &b.shift(2 * m_next * (l_i - m_i));
    }
    acc
}

/// Filtrations of the point module of type `la` with prescribed layer
/// lengths, quotient-most layer first.
pub fn filtration_count(la: &Partition, sizes: &[u32]) -> LaurentPoly {
    match sizes.split_first() {
        None => {
            if la.is_empty() {
                LaurentPoly::one()
            } else {
                LaurentPoly::zero()
            }
        }
        Some((&top, rest)) => {
            if top > la.size() {
                return LaurentPoly::zero();
            }
            let mut acc = LaurentPoly::zero();
            for mu in partitions_of(la.size() - top) {
                let a = submodule_count(la, &mu);
                if !a.is_zero() {
                    acc = acc + &a * &filtration_count(&mu, rest);
                }
            }
            acc
        }
    }
}

/// A stratum of regular classes: finitely many distinct closed points with
/// a nonempty Jordan type at each, recorded as `(residue degree, type) ->
/// number of distinct points carrying exactly that type`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    points: BTreeMap<(u32, Partition), u32>,
}

impl Stratum {
    /// `n` such that every module of the stratum has dimension `n delta`.
    pub fn degree(&self) -> u32 {
        self.points.iter().map(|((e, la), &m)| e * la.size() * m).sum()
    }

    /// Number of classes in the stratum, as a polynomial in `q = v^2`:
    /// per residue degree a falling factorial of the point count, divided
    /// by the permutations of points carrying equal types.
    pub fn class_count(&self) -> LaurentPoly {
        let mut by_degree: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for ((e, _), &m) in &self.points {
            by_degree.entry(*e).or_default().push(m);
        }
        let mut acc = LaurentPoly::one();
        for (e, mults) in by_degree {
            let n_e = point_count(e);
            let total: u32 = mults.iter().sum();
            for i in 0..total {
                acc = &acc * &(n_e.clone() - LaurentPoly::int(i as i64));
            }
            let mut denom = BigInt::one();
            for m in mults {
                for j in 1..=m {
                    denom *= BigInt::from(j);
                }
            }
            acc = acc.scale(&Coeff::new(BigInt::one(), denom), 0);
        }
        acc
    }

    /// `dim End` of any module in the stratum: types at distinct points do
    /// not interact, and one point of degree `e` contributes `e` times the
    /// sum of its squared conjugate columns.
    pub fn end_dim(&self) -> i64 {
        self.points
            .iter()
            .map(|((e, la), &m)| {
                let sq: i64 = la.conjugate().parts().iter().map(|&c| (c as i64) * (c as i64)).sum();
                *e as i64 * sq * m as i64
            })
            .sum()
    }

    /// `|Aut|` of any module in the stratum, as a polynomial in `q = v^2`.
    pub fn aut(&self) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        for ((e, la), &m) in &self.points {
            let a = aut_partition(la).subst_power(*e as i64);
            for _ in 0..m {
                acc = &acc * &a;
            }
        }
        acc
    }
}

/// All strata of regular classes of dimension `n delta`.
pub fn strata(n: u32) -> Vec<Stratum> {
    let mut letters = Vec::new();
    for e in 1..=n.max(1) {
        for s in 1..=(n / e) {
            for la in partitions_of(s) {
                letters.push((e, la));
            }
        }
    }
    fn rec(
        letters: &[(u32, Partition)],
        i: usize,
        left: u32,
        current: &mut BTreeMap<(u32, Partition), u32>,
        out: &mut Vec<Stratum>,
    ) {
        if left == 0 {
            out.push(Stratum { points: current.clone() });
            return;
        }
        if i == letters.len() {
            return;
        }
        let (e, la) = &letters[i];
        let w = e * la.size();
        for m in 0..=(left / w) {
            if m > 0 {
                current.insert((*e, la.clone()), m);
            }
            rec(letters, i + 1, left - m * w, current, out);
            if m > 0 {
                current.remove(&(*e, la.clone()));
            }
        }
    }
    let mut out = Vec::new();
    rec(&letters, 0, n, &mut BTreeMap::new(), &mut out);
    out
}

/// Number of filtrations of a stratum module with layer dimensions
/// `w_i delta`, quotient-most first, as a polynomial in `q = v^2`.
/// A filtration decomposes over the points, so this sums, over all ways to
/// split each layer across the points, the product of the per-point
/// filtration counts in the residue field of the point.
pub fn stratum_filtrations(stratum: &Stratum, w: &Partition) -> LaurentPoly {
    let mut pts: Vec<(u32, &Partition)> = Vec::new();
    for ((e, la), &m) in &stratum.points {
        for _ in 0..m {
            pts.push((*e, la));
        }
    }
    fn columns(total: u32, e: u32, rem: &[u32]) -> Vec<Vec<u32>> {
        fn rec(total: u32, e: u32, rem: &[u32], i: usize, col: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i == rem.len() {
                if total == 0 {
                    out.push(col.clone());
                }
                return;
            }
            for d in 0..=total.min(rem[i] / e) {
                col.push(d);
                rec(total - d, e, rem, i + 1, col, out);
                col.pop();
            }
        }
        let mut out = Vec::new();
        rec(total, e, rem, 0, &mut Vec::new(), &mut out);
        out
    }
    fn rec(pts: &[(u32, &Partition)], t: usize, rem: &mut Vec<u32>) -> LaurentPoly {
        if t == pts.len() {
            return if rem.iter().all(|&r| r == 0) {
                LaurentPoly::one()
            } else {
                LaurentPoly::zero()
            };
        }
        let (e, la) = pts[t];
        let mut acc = LaurentPoly::zero();
        for col in columns(la.size(), e, rem) {
            let f = filtration_count(la, &col).subst_power(e as i64);
            if f.is_zero() {
                continue;
            }
            for (i, &d) in col.iter().enumerate() {
                rem[i] -= e * d;
            }
            let rest = rec(pts, t + 1, rem);
            for (i, &d) in col.iter().enumerate() {
                rem[i] += e * d;
            }
            if !rest.is_zero() {
                acc = acc + &f * &rest;
            }
        }
        acc
    }
    let mut rem = w.parts().to_vec();
    rec(&pts, 0, &mut rem)
}

/// One Gram block: a fixed ordered index list and the symmetric matrix of
/// pairings of the attached elements.
pub struct GramBlock<I> {
    pub indices: Vec<I>,
    pub entries: Vec<Vec<RationalFunction>>,
}

impl<I: PartialEq> GramBlock<I> {
    pub fn entry(&self, a: &I, b: &I) -> Option<&RationalFunction> {
        let i = self.indices.iter().position(|x| x == a)?;
        let j = self.indices.iter().position(|x| x == b)?;
        Some(&self.entries[i][j])
    }
}

/// Gram matrix of the products `E_{w delta}` over the partitions of `n`,
/// lexicographically descending.  Both arguments expand over the regular
/// classes with filtration-count coefficients, and classes pair only with
/// themselves, so each entry is a sum over strata of
/// `count * filtrations(w) * filtrations(w') / |Aut|`.
pub fn imaginary_gram(n: u32) -> Result<GramBlock<Partition>> {
    if n > MAX_IMAGINARY_DEGREE {
        return Err(HallError::Budget(format!(
            "imaginary Gram blocks stop at degree {MAX_IMAGINARY_DEGREE}, got {n}"
        )));
    }
    let mut indices = partitions_of(n);
    indices.sort_by(|a, b| b.cmp(a));
    let strata = strata(n);
    let data: Vec<(LaurentPoly, LaurentPoly, Vec<LaurentPoly>)> = strata
        .iter()
        .map(|s| {
            let counts = indices.iter().map(|w| stratum_filtrations(s, w)).collect();
            (s.class_count(), s.aut(), counts)
        })
        .collect();
    let k = indices.len();
    let mut entries = vec![vec![RationalFunction::zero(); k]; k];
    for i in 0..k {
        for j in i..k {
            let mut acc = RationalFunction::zero();
            for (count, aut, filt) in &data {
                let num = &(count * &filt[i]) * &filt[j];
                if !num.is_zero() {
                    acc = &acc + &RationalFunction::new(num, aut.clone());
                }
            }
            entries[i][j] = acc.clone();
            entries[j][i] = acc;
        }
    }
    Ok(GramBlock { indices, entries })
}

/// An element of the imaginary subalgebra in the `E_{w delta}` coordinates.
pub type ImagElement = BTreeMap<Partition, RationalFunction>;

/// Transport an `h`-expression along `h_k -> E_{k delta}`.
pub fn imaginary_from_h(expr: &HExpr) -> ImagElement {
    expr.iter()
        .map(|(w, c)| {
            (w.clone(), RationalFunction::from_laurent(LaurentPoly::term(0, c.clone())))
        })
        .collect()
}

/// Pair two imaginary elements; components of different degrees are
/// orthogonal, so only shared degrees contribute.
pub fn imaginary_pair(x: &ImagElement, y: &ImagElement) -> Result<RationalFunction> {
    let mut by_degree: BTreeMap<u32, (ImagElement, ImagElement)> = BTreeMap::new();
    for (w, c) in x {
        by_degree.entry(w.size()).or_default().0.insert(w.clone(), c.clone());
    }
    for (w, c) in y {
        by_degree.entry(w.size()).or_default().1.insert(w.clone(), c.clone());
    }
    let mut acc = RationalFunction::zero();
    for (n, (xs, ys)) in by_degree {
        if xs.is_empty() || ys.is_empty() {
            continue;
        }
        let gram = imaginary_gram(n)?;
        for (w, a) in &xs {
            for (w2, b) in &ys {
                let g = gram.entry(w, w2).expect("partition outside its Gram block");
                acc = &acc + &(&(a * b) * g);
            }
        }
    }
    Ok(acc)
}

fn solve_linear(
    mut a: Vec<Vec<RationalFunction>>,
    mut b: Vec<RationalFunction>,
) -> Result<Vec<RationalFunction>> {
    let n = b.len();
    for step in 0..n {
        let pivot = (step..n)
            .find(|&r| !a[r][step].is_zero())
            .ok_or_else(|| HallError::Invariant("singular Gram system".into()))?;
        a.swap(step, pivot);
        b.swap(step, pivot);
        let inv = &RationalFunction::one() / &a[step][step];
        for c in &mut a[step] {
            *c = &*c * &inv;
        }
        b[step] = &b[step] * &inv;
        for r in 0..n {
            if r == step || a[r][step].is_zero() {
                continue;
            }
            let f = a[r][step].clone();
            for c in 0..n {
                let t = &f * &a[step][c];
                a[r][c] = &a[r][c] - &t;
            }
            let t = &f * &b[step];
            b[r] = &b[r] - &t;
        }
    }
    Ok(b)
}

/// The orthogonalized imaginary generator: the unique element
/// `E_{n delta} + sum_{w != (n)} c_w E_{w delta}` orthogonal to every
/// `E_{w' delta}` with `w'` a proper partition of `n`.
pub fn orthogonal_generator(n: u32) -> Result<ImagElement> {
    assert!(n >= 1, "orthogonal generators start at degree 1");
    let gram = imaginary_gram(n)?;
    let top = Partition::new(vec![n]);
    let others: Vec<usize> =
        (0..gram.indices.len()).filter(|&i| gram.indices[i] != top).collect();
    let t = gram.indices.iter().position(|w| *w == top).expect("row partition missing");
    let a: Vec<Vec<RationalFunction>> = others
        .iter()
        .map(|&i| others.iter().map(|&j| gram.entries[i][j].clone()).collect())
        .collect();
    let b: Vec<RationalFunction> = others.iter().map(|&j| -&gram.entries[t][j]).collect();
    let c = solve_linear(a, b)?;
    let mut out = ImagElement::new();
    out.insert(top, RationalFunction::one());
    for (k, &i) in others.iter().enumerate() {
        if !c[k].is_zero() {
            out.insert(gram.indices[i].clone(), c[k].clone());
        }
    }
    Ok(out)
}

/// The Newton route to the same element: the image of `p_n / n` under
/// `h_k -> E_{k delta}`.  Agreement with `orthogonal_generator` is a
/// theorem, and the tests check it rather than assume it.
pub fn newton_generator(n: u32) -> ImagElement {
    let p = symfunc::newton_p_in_h(n);
    imaginary_from_h(&symfunc::h_scale(&p, &Coeff::new(BigInt::one(), BigInt::from(n))))
}

/// The power-sum product `prod_i p_{w_i}` under `h_k -> E_{k delta}`.
pub fn power_product(w: &Partition) -> ImagElement {
    imaginary_from_h(&symfunc::power_in_h(w))
}

/// Self-pairing of a pure preprojective or preinjective bracket:
/// `v^{2 dim End} / |Aut|` with the automorphism count taken from the
/// class label, in the variable `q = v^2`.
fn bracket_self_pairing(part: &BTreeMap<u32, u32>, preinjective: bool) -> RationalFunction {
    if part.is_empty() {
        return RationalFunction::one();
    }
    let mut idx = PBWIndex::unit();
    if preinjective {
        idx.prei = part.clone();
    } else {
        idx.prep = part.clone();
    }
    let end = idx.end_dim();
    let label: ClassLabel = part
        .iter()
        .map(|(&n, &m)| {
            (if preinjective { IndecLabel::Prei(n) } else { IndecLabel::Prep(n) }, m)
        })
        .collect();
    let aut = aut_order_poly(&label, end as u32).subst_power(2);
    RationalFunction::new(qpow(end), aut)
}

/// Gram matrix of one weight space of the PBW basis, over the canonical
/// index order of the weight.  The form factors over the three blocks of
/// an index, so an entry vanishes unless both real parts agree exactly.
pub fn weight_gram(d: Dim) -> Result<GramBlock<PBWIndex>> {
    if d.total() > MAX_WEIGHT {
        return Err(HallError::Budget(format!(
            "weight Gram blocks stop at total weight {MAX_WEIGHT}, got {}",
            d.total()
        )));
    }
    let indices = weight_indices(d);
    let mut imag: BTreeMap<u32, GramBlock<Partition>> = BTreeMap::new();
    for c in &indices {
        let n = c.im.size();
        if !imag.contains_key(&n) {
            imag.insert(n, imaginary_gram(n)?);
        }
    }
    let real: Vec<RationalFunction> = indices
        .iter()
        .map(|c| &bracket_self_pairing(&c.prep, false) * &bracket_self_pairing(&c.prei, true))
        .collect();
    let k = indices.len();
    let mut entries = vec![vec![RationalFunction::zero(); k]; k];
    for i in 0..k {
        for j in i..k {
            let (a, b) = (&indices[i], &indices[j]);
            if a.prep != b.prep || a.prei != b.prei {
                continue;
            }
            let g = imag[&a.im.size()]
                .entry(&a.im, &b.im)
                .expect("partition outside its Gram block");
            let value = &real[i] * g;
            entries[i][j] = value.clone();
            entries[j][i] = value;
        }
    }
    Ok(GramBlock { indices, entries })
}

/// Pair two algebra elements through the weight-space Gram blocks; terms of
/// different weights are orthogonal.
pub fn inner_product(x: &AlgebraElement, y: &AlgebraElement) -> Result<RationalFunction> {
    type Terms = Vec<(PBWIndex, RationalFunction)>;
    let mut by_weight: BTreeMap<(u32, u32), (Terms, Terms)> = BTreeMap::new();
    for (c, a) in x.iter() {
        let d = c.weight();
        by_weight.entry((d.0, d.1)).or_default().0.push((c.clone(), a.clone()));
    }
    for (c, a) in y.iter() {
        let d = c.weight();
        by_weight.entry((d.0, d.1)).or_default().1.push((c.clone(), a.clone()));
    }
    let mut acc = RationalFunction::zero();
    for ((d1, d2), (xs, ys)) in by_weight {
        if xs.is_empty() || ys.is_empty() {
            continue;
        }
        let gram = weight_gram(Dim(d1, d2))?;
        for (c, a) in &xs {
            for (c2, b) in &ys {
                let g = gram.entry(c, c2).expect("index outside its weight block");
                if !g.is_zero() {
                    acc = &acc + &(&(a * b) * g);
                }
            }
        }
    }
    Ok(acc)
}

/// The Schur-type product basis element of an index: the imaginary block
/// `E_{w delta}` replaced by the Schur expansion of `w`, real blocks kept.
pub fn schur_index_element(c: &PBWIndex) -> AlgebraElement {
    let mut out = AlgebraElement::zero();
    for (mu, coeff) in symfunc::schur_in_h(&c.im) {
        let idx = PBWIndex { prep: c.prep.clone(), im: mu, prei: c.prei.clone() };
        out.add_term(idx, &RationalFunction::from_laurent(LaurentPoly::term(0, coeff)));
    }
    out
}

/// Rewrite PBW coordinates over the Schur-type product basis.  Within each
/// pair of real blocks this is the inverse substitution, whose coefficients
/// are Kostka numbers.
pub fn schur_coordinates(x: &AlgebraElement) -> BTreeMap<PBWIndex, RationalFunction> {
    let mut out: BTreeMap<PBWIndex, RationalFunction> = BTreeMap::new();
    for (c, coeff) in x.iter() {
        for (la, k) in symfunc::h_in_schur(&c.im) {
            let idx = PBWIndex { prep: c.prep.clone(), im: la, prei: c.prei.clone() };
            let add = coeff * &RationalFunction::from_laurent(LaurentPoly::term(0, k));
            let entry = out.entry(idx).or_insert_with(RationalFunction::zero);
            *entry = &*entry + &add;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// One weight space of the orthogonal canonical family (the command line's
/// `canonical-prime`): the transition data of the bar-invariant monomials
/// over the Schur-type product basis, solved with the same triangular
/// machinery as the PBW-based family.
pub struct OrthogonalBlock {
    pub dim: Dim,
    pub indices: Vec<PBWIndex>,
    pub data: TransitionData,
}

impl OrthogonalBlock {
    pub fn new(d: Dim) -> Result<Self> {
        if d.total() > MAX_WEIGHT {
            return Err(HallError::Budget(format!(
                "orthogonal canonical blocks stop at total weight {MAX_WEIGHT}, got {}",
                d.total()
            )));
        }
        let indices = weight_indices(d);
        let data = build_transition(
            &indices,
            |c| Ok(schur_coordinates(&monomial_of_index(c)?)),
            geometric_cmp,
        )?;
        Ok(OrthogonalBlock { dim: d, indices, data })
    }

    /// The Schur-type basis elements of this weight, in PBW coordinates.
    pub fn schur_elements(&self) -> Vec<AlgebraElement> {
        self.indices.iter().map(schur_index_element).collect()
    }

    /// The orthogonal canonical elements, in PBW coordinates.
    pub fn canonical_elements(&self) -> Vec<AlgebraElement> {
        let schur = self.schur_elements();
        self.data
            .zeta
            .iter()
            .map(|row| {
                let mut e = AlgebraElement::zero();
                for (j, z) in row.iter().enumerate() {
                    if z.is_zero() {
                        continue;
                    }
                    for (idx, coeff) in schur[j].iter() {
                        e.add_term(idx.clone(), &(coeff * &RationalFunction::from_laurent(z.clone())));
                    }
                }
                e
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use num_traits::{ToPrimitive, Zero};

    use crate::canonical::WeightBlock;
    use crate::gf::Field;
    use crate::kronecker::euler_form;
    use crate::linalg::{express_in_basis, subspaces, Mat};
    use crate::oracle::{Oracle, Quiver};
    use crate::ratfun::congruent_mod_vinv;
    use crate::straighten::{basis_element, multiply};

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    fn int(n: i64) -> Coeff {
        Coeff::from_integer(n.into())
    }

    fn rf_const(c: Coeff) -> RationalFunction {
        RationalFunction::from_laurent(LaurentPoly::term(0, c))
    }

    /// Evaluate a Laurent polynomial at `v = sqrt(q)`, returning the pair
    /// `(a, b)` with value `a + b sqrt(q)`.
    fn pair_eval(f: &LaurentPoly, q: u64) -> (Coeff, Coeff) {
        let qq = int(q as i64);
        let at = |t: i64| -> Coeff {
            let mut acc = int(1);
            for _ in 0..t.abs() {
                acc *= &qq;
            }
            if t < 0 {
                acc.recip()
            } else {
                acc
            }
        };
        let mut a = Coeff::zero();
        let mut b = Coeff::zero();
        for (&e, c) in f.iter() {
            if e % 2 == 0 {
                a += c * &at(e / 2);
            } else {
                b += c * &at((e - 1) / 2);
            }
        }
        (a, b)
    }

    /// Evaluate a rational function of `q = v^2` at a field size.
    fn rf_q(f: &RationalFunction, q: u64) -> Coeff {
        let (a, b) = pair_eval(f.numerator(), q);
        let (c, d) = pair_eval(f.denominator(), q);
        // (a + b s) / (c + d s) with s^2 = q, rationalized
        let qq = int(q as i64);
        let den = &c * &c - &(&qq * &d) * &d;
        assert!(!den.is_zero(), "denominator vanishes at q={q}");
        let re = (&a * &c - &(&qq * &b) * &d) / &den;
        let im = (&b * &c - &a * &d) / &den;
        assert!(im.is_zero(), "value of {f} at q={q} is irrational");
        re
    }

    fn eval_q(f: &LaurentPoly, q: u64) -> Coeff {
        let (a, b) = pair_eval(f, q);
        assert!(b.is_zero(), "odd powers of v in {f}");
        a
    }

    #[test]
    fn point_counts_match_the_projective_line() {
        let q = LaurentPoly::q();
        assert_eq!(point_count(1), q.clone() + LaurentPoly::one());
        // degree e points <-> Galois orbits of size e
        assert_eq!(eval_q(&point_count(2), 2), int(1));
        assert_eq!(eval_q(&point_count(3), 2), int(2));
        assert_eq!(eval_q(&point_count(4), 2), int(3));
        assert_eq!(eval_q(&point_count(2), 3), int(3));
        assert_eq!(eval_q(&point_count(3), 3), int(8));
        assert_eq!(eval_q(&point_count(4), 3), int(18));
    }

    #[test]
    fn nilpotent_automorphism_counts_match_brute_force() {
        // |Aut| of the module (F_q^n, J_la) = invertible matrices commuting
        // with the Jordan form
        for (q, max) in [(2u64, 4u32), (3, 3)] {
            let f = Field::new(q).unwrap();
            for n in 1..=max {
                for la in partitions_of(n) {
                    let j = jordan_mat(&f, &la);
                    let mut count = 0u64;
                    let dim = (n * n) as u32;
                    for code in 0..q.pow(dim) {
                        let m = matrix_from_code(&f, n as usize, code);
                        if m.rank() == n as usize && m.matmul(&j) == j.matmul(&m) {
                            count += 1;
                        }
                    }
                    assert_eq!(
                        eval_q(&aut_partition(&la), q),
                        int(count as i64),
                        "aut of {la:?} over F_{q}"
                    );
                }
            }
        }
    }

    #[test]
    fn submodule_counts_match_invariant_subspace_enumeration() {
        for (q, max) in [(2u64, 4u32), (3, 3)] {
            let f = Field::new(q).unwrap();
            for n in 1..=max {
                for la in partitions_of(n) {
                    let j = jordan_mat(&f, &la);
                    let mut found: BTreeMap<Partition, u64> = BTreeMap::new();
                    for k in 0..=n as usize {
                        for basis in subspaces(&f, n as usize, k) {
                            if let Some(mu) = invariant_type(&j, &basis) {
                                *found.entry(mu).or_insert(0) += 1;
                            }
                        }
                    }
                    for s in 0..=n {
                        for mu in partitions_of(s) {
                            let want = found.get(&mu).copied().unwrap_or(0);
                            assert_eq!(
                                eval_q(&submodule_count(&la, &mu), q),
                                int(want as i64),
                                "submodules of type {mu:?} in {la:?} over F_{q}"
                            );
                        }
                    }
                }
            }
        }
    }

    fn jordan_mat(f: &Arc<Field>, la: &Partition) -> Mat {
        let n = la.size() as usize;
        let mut rows = vec![vec![0u8; n]; n];
        let mut base = 0;
        for &part in la.parts() {
            for i in 0..(part as usize - 1) {
                rows[base + i][base + i + 1] = 1;
            }
            base += part as usize;
        }
        Mat::from_rows(f.clone(), rows, n)
    }

    fn matrix_from_code(f: &Arc<Field>, n: usize, mut code: u64) -> Mat {
        let q = f.q;
        let mut rows = vec![vec![0u8; n]; n];
        for row in rows.iter_mut() {
            for entry in row.iter_mut() {
                *entry = (code % q) as u8;
                code /= q;
            }
        }
        Mat::from_rows(f.clone(), rows, n)
    }

    /// Jordan type of the restriction of `j` to the row space of `basis`,
    /// or None if the subspace is not invariant.
    fn invariant_type(j: &Mat, basis: &Mat) -> Option<Partition> {
        let k = basis.rows;
        let n = basis.cols;
        if k == 0 {
            return Some(Partition::empty());
        }
        let mut image_rows = Vec::with_capacity(k);
        for i in 0..k {
            image_rows.push(j.apply(basis.row(i)));
        }
        let image = Mat::from_rows(basis.f.clone(), image_rows, n);
        if basis.vstack(&image).rank() != k {
            return None;
        }
        // coordinates of the images: a k x k matrix of the restriction
        let mut cols = Mat::zero(basis.f.clone(), n, k);
        for i in 0..k {
            for (r, &x) in image.row(i).iter().enumerate() {
                cols.set(r, i, x);
            }
        }
        let rest = express_in_basis(&cols, basis);
        let mut ranks = vec![k];
        let mut pw = rest.clone();
        while ranks[ranks.len() - 1] > 0 {
            ranks.push(pw.rank());
            pw = pw.matmul(&rest);
        }
        let cols: Vec<u32> = ranks
            .windows(2)
            .map(|w| (w[0] - w[1]) as u32)
            .filter(|&c| c > 0)
            .collect();
        Some(Partition::new(cols).conjugate())
    }

    #[test]
    fn filtration_count_closed_cases() {
        let q = LaurentPoly::q();
        assert_eq!(filtration_count(&p(&[1, 1]), &[1, 1]), q.clone() + LaurentPoly::one());
        assert_eq!(filtration_count(&p(&[2]), &[1, 1]), LaurentPoly::one());
        assert_eq!(
            filtration_count(&p(&[2, 1]), &[1, 1, 1]),
            &LaurentPoly::int(2) * &q + LaurentPoly::one()
        );
        assert_eq!(filtration_count(&p(&[2]), &[2]), LaurentPoly::one());
        // a single full-length layer is the module itself
        assert_eq!(filtration_count(&p(&[1, 1]), &[2]), LaurentPoly::one());
        assert_eq!(filtration_count(&p(&[1, 1]), &[3]), LaurentPoly::zero());
    }

    #[test]
    fn strata_of_small_degrees() {
        assert_eq!(strata(1).len(), 1);
        let s2 = strata(2);
        assert_eq!(s2.len(), 4);
        // class counts sum to the number of regular classes
        let oracle = Oracle::default();
        for (n, want_over_f2) in [(1u32, 3i64), (2, 10), (3, 27)] {
            let total: Coeff = strata(n)
                .iter()
                .map(|s| {
                    assert_eq!(s.degree(), n);
                    eval_q(&s.class_count(), 2)
                })
                .sum();
            assert_eq!(total, int(want_over_f2));
            let table = oracle.table(Quiver::Kronecker, &[n, n], 2).unwrap();
            assert_eq!(table.regular_classes().len(), want_over_f2 as usize);
        }
    }

    #[test]
    fn delta_pairing_is_the_point_count_over_the_automorphisms() {
        let gram = imaginary_gram(1).unwrap();
        let want = RationalFunction::new(
            LaurentPoly::q() + LaurentPoly::one(),
            LaurentPoly::q() - LaurentPoly::one(),
        );
        assert_eq!(gram.entries[0][0], want);
    }

    /// Expand `E_{w_1 delta} * ... * E_{w_t delta}` over the classes of one
    /// finite field, as plain Hall products of the regular class sums
    /// (`E_{k delta}` is `v^{-2k}` times the sum, and the twist between
    /// imaginary blocks vanishes).  Returns integer coordinates of the
    /// unscaled product of sums.
    fn regular_product_coords(
        oracle: &Oracle,
        q: u64,
        w: &[u32],
    ) -> BTreeMap<usize, u64> {
        let first = oracle.table(Quiver::Kronecker, &[w[0], w[0]], q).unwrap();
        let mut dims = [w[0], w[0]];
        let mut coords: BTreeMap<usize, u64> = first.regular_classes().iter().map(|&i| (i, 1)).collect();
        for &k in &w[1..] {
            let sub = oracle.table(Quiver::Kronecker, &[k, k], q).unwrap();
            let new_dims = [dims[0] + k, dims[1] + k];
            let table = oracle.table(Quiver::Kronecker, &new_dims, q).unwrap();
            let mut next: BTreeMap<usize, u64> = BTreeMap::new();
            for l in table.regular_classes() {
                let mut total = 0u64;
                for (&m, &c) in &coords {
                    for n in sub.regular_classes() {
                        let g = oracle
                            .hall_number(
                                Quiver::Kronecker,
                                q,
                                (&new_dims[..], l),
                                (&dims[..], m),
                                (&[k, k][..], n),
                            )
                            .unwrap();
                        total += c * g;
                    }
                }
                if total > 0 {
                    next.insert(l, total);
                }
            }
            dims = new_dims;
            coords = next;
        }
        coords
    }

    #[test]
    fn imaginary_gram_matches_the_finite_field_oracle() {
        let oracle = Oracle::default();
        for (q, max) in [(2u64, 3u32), (3, 2)] {
            for n in 1..=max {
                let gram = imaginary_gram(n).unwrap();
                let words: Vec<&Partition> = gram.indices.iter().collect();
                let table = oracle.table(Quiver::Kronecker, &[n, n], q).unwrap();
                let coords: Vec<BTreeMap<usize, u64>> =
                    words.iter().map(|w| regular_product_coords(&oracle, q, w.parts())).collect();
                let qn = {
                    let mut acc = int(1);
                    for _ in 0..(2 * n) {
                        acc *= &int(q as i64);
                    }
                    acc
                };
                for i in 0..words.len() {
                    for j in 0..words.len() {
                        // (R_w, R_w') = sum_L x_L y_L q^{2n} / |Aut L|
                        let mut direct = Coeff::zero();
                        for (l, a) in &coords[i] {
                            if let Some(b) = coords[j].get(l) {
                                let aut = table.classes[*l].aut.clone();
                                let aut = Coeff::from_integer(BigInt::from(aut));
                                direct += &(&int((a * b) as i64) * &qn) / &aut;
                            }
                        }
                        // E_w = v^{-2n} R_w on both sides; the two scalings
                        // multiply to v^{-4n} = q^{-2n}, one factor of qn
                        let want = &direct / &qn;
                        assert_eq!(
                            rf_q(&gram.entries[i][j], q),
                            want,
                            "({:?}, {:?}) over F_{q}",
                            words[i],
                            words[j]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn diagonal_pairings_are_unital_to_leading_order() {
        for n in 1..=4u32 {
            let gram = imaginary_gram(n).unwrap();
            let i = gram.indices.iter().position(|w| *w == p(&[n])).unwrap();
            assert!(
                congruent_mod_vinv(&gram.entries[i][i], &RationalFunction::one()),
                "(E_{n}d, E_{n}d) = {}",
                gram.entries[i][i]
            );
        }
    }

    #[test]
    fn orthogonalization_agrees_with_newtons_identity() {
        assert_eq!(
            orthogonal_generator(2).unwrap(),
            ImagElement::from([
                (p(&[2]), RationalFunction::one()),
                (p(&[1, 1]), rf_const(Coeff::new((-1).into(), 2.into()))),
            ])
        );
        for n in 1..=4 {
            assert_eq!(orthogonal_generator(n).unwrap(), newton_generator(n), "degree {n}");
        }
    }

    #[test]
    fn orthogonal_generators_pair_as_reciprocal_degrees() {
        for n in 1..=4u32 {
            let e = orthogonal_generator(n).unwrap();
            // exact orthogonality against every proper product
            for w in partitions_of(n) {
                if w == p(&[n]) {
                    continue;
                }
                let single: ImagElement = [(w.clone(), RationalFunction::one())].into();
                assert!(
                    imaginary_pair(&e, &single).unwrap().is_zero(),
                    "(E'_{n}, E_{w:?})"
                );
            }
            let self_pair = imaginary_pair(&e, &e).unwrap();
            let want = rf_const(Coeff::new(BigInt::one(), BigInt::from(n)));
            assert!(
                congruent_mod_vinv(&self_pair, &want),
                "(E'_{n}, E'_{n}) = {self_pair}"
            );
        }
    }

    #[test]
    fn power_sum_gram_is_diagonal_with_cycle_weights() {
        for n in 1..=4u32 {
            for w in partitions_of(n) {
                let pw = power_product(&w);
                for w2 in partitions_of(n) {
                    let pair = imaginary_pair(&pw, &power_product(&w2)).unwrap();
                    let want = if w == w2 {
                        rf_const(Coeff::from_integer(BigInt::from(w.z())))
                    } else {
                        RationalFunction::zero()
                    };
                    assert!(
                        congruent_mod_vinv(&pair, &want),
                        "(P_{w:?}, P_{w2:?}) = {pair}"
                    );
                }
            }
        }
    }

    #[test]
    fn real_bracket_pairings() {
        // (E_1, E_1) = q / (q - 1)
        let single = bracket_self_pairing(&BTreeMap::from([(0, 1)]), false);
        assert_eq!(
            single,
            RationalFunction::new(LaurentPoly::q(), LaurentPoly::q() - LaurentPoly::one())
        );
        // the double: v^8 / ((v^4 - 1)(v^4 - v^2))
        let double = bracket_self_pairing(&BTreeMap::from([(0, 2)]), false);
        let v4 = LaurentPoly::term(4, rat(1));
        assert_eq!(
            double,
            RationalFunction::new(
                LaurentPoly::term(8, rat(1)),
                &(v4.clone() - LaurentPoly::one()) * &(v4 - LaurentPoly::q())
            )
        );
        // mirror symmetry
        assert_eq!(bracket_self_pairing(&BTreeMap::from([(1, 1)]), true), {
            let mut idx = PBWIndex::unit();
            idx.prep = BTreeMap::from([(1, 1)]);
            let end = idx.end_dim();
            RationalFunction::new(
                qpow(end),
                aut_order_poly(&BTreeMap::from([(IndecLabel::Prep(1), 1)]), end as u32)
                    .subst_power(2),
            )
        });
    }

    #[test]
    fn real_end_and_aut_match_the_oracle_tables() {
        let oracle = Oracle::default();
        for q in [2u64, 3] {
            for dims in [[2, 1], [1, 2], [3, 1], [1, 3], [3, 2]] {
                let table = oracle.table(Quiver::Kronecker, &dims, q).unwrap();
                for class in &table.classes {
                    let mut prep: BTreeMap<u32, u32> = BTreeMap::new();
                    let mut prei: BTreeMap<u32, u32> = BTreeMap::new();
                    let mut pure = true;
                    for (l, &m) in &class.label {
                        match l {
                            IndecLabel::Prep(n) => {
                                prep.insert(*n, m);
                            }
                            IndecLabel::Prei(n) => {
                                prei.insert(*n, m);
                            }
                            _ => pure = false,
                        }
                    }
                    if !pure {
                        continue;
                    }
                    let idx = PBWIndex { prep, im: Partition::empty(), prei };
                    // end_dim of the table is measured by solving actual
                    // Hom systems over the field
                    assert_eq!(
                        idx.end_dim(),
                        class.end_dim as i64,
                        "End of {idx} over F_{q}"
                    );
                    let pairing =
                        &bracket_self_pairing(&idx.prep, false) * &bracket_self_pairing(&idx.prei, true);
                    // denominator at q is |Aut|; the numerator is q^End
                    let aut = Coeff::from_integer(BigInt::from(class.aut.clone()));
                    let mut qe = int(1);
                    for _ in 0..class.end_dim {
                        qe *= &int(q as i64);
                    }
                    assert_eq!(rf_q(&pairing, q), &qe / &aut, "pairing of {idx} over F_{q}");
                }
            }
        }
    }

    /// `u`-coordinates of a PBW basis element over one finite field, as
    /// pairs `a + b sqrt(q)`: the bracket of each real block, the scaled
    /// regular sums, folded with the twist `v^(<dim x, dim y>)`.
    fn u_coords(
        oracle: &Oracle,
        q: u64,
        c: &PBWIndex,
    ) -> (Vec<u32>, BTreeMap<usize, (Coeff, Coeff)>) {
        type Pair = (Coeff, Coeff);
        let pair_mul = |x: &Pair, y: &Pair| -> Pair {
            (
                &(&x.0 * &y.0) + &(&int(q as i64) * &(&x.1 * &y.1)),
                &(&x.0 * &y.1) + &(&x.1 * &y.0),
            )
        };
        let vpow = |e: i64| -> Pair {
            let q_half = |t: i64| -> Coeff {
                let mut acc = int(1);
                for _ in 0..t.abs() {
                    acc *= &int(q as i64);
                }
                if t < 0 {
                    acc.recip()
                } else {
                    acc
                }
            };
            if e % 2 == 0 {
                (q_half(e / 2), Coeff::zero())
            } else {
                (Coeff::zero(), q_half((e - (e.rem_euclid(2))) / 2))
            }
        };
        // factors: bracket of the preprojective block, one regular sum per
        // imaginary part, bracket of the preinjective block
        struct Factor {
            dims: Vec<u32>,
            coords: BTreeMap<usize, (Coeff, Coeff)>,
        }
        let mut factors: Vec<Factor> = Vec::new();
        let real_factor = |part: &BTreeMap<u32, u32>, preinjective: bool| -> Option<Factor> {
            if part.is_empty() {
                return None;
            }
            let mut idx = PBWIndex::unit();
            let label: ClassLabel = part
                .iter()
                .map(|(&n, &m)| {
                    (if preinjective { IndecLabel::Prei(n) } else { IndecLabel::Prep(n) }, m)
                })
                .collect();
            if preinjective {
                idx.prei = part.clone();
            } else {
                idx.prep = part.clone();
            }
            let d = idx.weight();
            let dims = vec![d.0, d.1];
            let table = oracle.table(Quiver::Kronecker, &dims, q).unwrap();
            let class = table.find_label(&label).unwrap();
            let e = idx.end_dim() - (d.0 + d.1) as i64;
            Some(Factor { dims, coords: BTreeMap::from([(class, vpow(e))]) })
        };
        if let Some(f) = real_factor(&c.prep, false) {
            factors.push(f);
        }
        for &k in c.im.parts() {
            let dims = vec![k, k];
            let table = oracle.table(Quiver::Kronecker, &dims, q).unwrap();
            let scale = vpow(-2 * k as i64);
            let coords = table.regular_classes().iter().map(|&i| (i, scale.clone())).collect();
            factors.push(Factor { dims, coords });
        }
        if let Some(f) = real_factor(&c.prei, true) {
            factors.push(f);
        }
        let mut acc = factors.remove(0);
        for f in factors {
            let twist = vpow(euler_form(
                Dim(acc.dims[0], acc.dims[1]),
                Dim(f.dims[0], f.dims[1]),
            ));
            let new_dims = vec![acc.dims[0] + f.dims[0], acc.dims[1] + f.dims[1]];
            let table = oracle.table(Quiver::Kronecker, &new_dims, q).unwrap();
            let mut next: BTreeMap<usize, (Coeff, Coeff)> = BTreeMap::new();
            for l in 0..table.classes.len() {
                let mut total = (Coeff::zero(), Coeff::zero());
                for (m, cm) in &acc.coords {
                    for (n, cn) in &f.coords {
                        let g = oracle
                            .hall_number(
                                Quiver::Kronecker,
                                q,
                                (new_dims.as_slice(), l),
                                (acc.dims.as_slice(), *m),
                                (f.dims.as_slice(), *n),
                            )
                            .unwrap();
                        if g > 0 {
                            let t = pair_mul(cm, cn);
                            total.0 += &t.0 * &int(g as i64);
                            total.1 += &t.1 * &int(g as i64);
                        }
                    }
                }
                let scaled = pair_mul(&total, &twist);
                if !scaled.0.is_zero() || !scaled.1.is_zero() {
                    next.insert(l, scaled);
                }
            }
            acc = Factor { dims: new_dims, coords: next };
        }
        (acc.dims, acc.coords)
    }

    #[test]
    fn weight_gram_factorization_matches_the_oracle() {
        let oracle = Oracle::default();
        for q in [2u64, 3] {
            for d in [Dim(1, 1), Dim(2, 1), Dim(2, 2)] {
                let gram = weight_gram(d).unwrap();
                let table = oracle.table(Quiver::Kronecker, &[d.0, d.1], q).unwrap();
                let coords: Vec<BTreeMap<usize, (Coeff, Coeff)>> = gram
                    .indices
                    .iter()
                    .map(|c| {
                        let (dims, coords) = u_coords(&oracle, q, c);
                        assert_eq!(dims, vec![d.0, d.1]);
                        coords
                    })
                    .collect();
                let mut qd = int(1);
                for _ in 0..d.total() {
                    qd *= &int(q as i64);
                }
                for i in 0..gram.indices.len() {
                    for j in 0..gram.indices.len() {
                        // (x, y) = sum_L x_L y_L q^{dim} / |Aut L|
                        let mut re = Coeff::zero();
                        let mut irr = Coeff::zero();
                        for (l, a) in &coords[i] {
                            if let Some(b) = coords[j].get(l) {
                                let aut = Coeff::from_integer(BigInt::from(
                                    table.classes[*l].aut.clone(),
                                ));
                                let scale = &qd / &aut;
                                re += &(&(&a.0 * &b.0) + &(&int(q as i64) * &(&a.1 * &b.1))) * &scale;
                                irr += &(&(&a.0 * &b.1) + &(&a.1 * &b.0)) * &scale;
                            }
                        }
                        assert!(
                            irr.is_zero(),
                            "({}, {}) over F_{q} has an irrational part",
                            gram.indices[i],
                            gram.indices[j]
                        );
                        assert_eq!(
                            rf_q(&gram.entries[i][j], q),
                            re,
                            "({}, {}) over F_{q}",
                            gram.indices[i],
                            gram.indices[j]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn inner_product_splits_over_weights() {
        let e1 = basis_element(&PBWIndex::single_prep(0));
        let ed = basis_element(&PBWIndex::single_imag(p(&[1])));
        let mixed = &e1 + &ed;
        assert_eq!(
            inner_product(&mixed, &e1).unwrap(),
            inner_product(&e1, &e1).unwrap()
        );
        assert_eq!(
            inner_product(&mixed, &mixed).unwrap(),
            &inner_product(&e1, &e1).unwrap() + &inner_product(&ed, &ed).unwrap()
        );
    }

    #[test]
    fn imaginary_blocks_commute() {
        for m in 1..=2u32 {
            for n in m..=3u32 {
                let a = basis_element(&PBWIndex::single_imag(p(&[m])));
                let b = basis_element(&PBWIndex::single_imag(p(&[n])));
                let ab = multiply(&a, &b).unwrap();
                let ba = multiply(&b, &a).unwrap();
                let mut parts = vec![n, m];
                parts.sort_by(|x, y| y.cmp(x));
                assert_eq!(ab, ba);
                assert_eq!(ab, basis_element(&PBWIndex::single_imag(Partition::new(parts))));
            }
        }
    }

    #[test]
    fn schur_coordinates_invert_the_schur_elements() {
        for d in [Dim(2, 2), Dim(3, 2)] {
            for c in weight_indices(d) {
                let e = schur_index_element(&c);
                let back = schur_coordinates(&e);
                assert_eq!(back, BTreeMap::from([(c.clone(), RationalFunction::one())]));
                // coefficients of a plain PBW element are Kostka numbers
                let coords = schur_coordinates(&basis_element(&c));
                for (idx, coeff) in &coords {
                    let k = symfunc::kostka(&idx.im, &c.im);
                    assert_eq!(
                        coeff,
                        &rf_const(Coeff::from_integer(BigInt::from(k))),
                        "Kostka coefficient at {idx}"
                    );
                }
            }
        }
    }

    #[test]
    fn orthogonal_block_at_the_fundamental_weight() {
        let block = OrthogonalBlock::new(Dim(1, 1)).unwrap();
        let reference = WeightBlock::new(Dim(1, 1)).unwrap();
        assert_eq!(block.canonical_elements(), reference.canonical_elements());
    }

    #[test]
    fn orthogonal_canonical_elements_have_unit_gram() {
        for d in [Dim(2, 1), Dim(2, 2)] {
            let block = OrthogonalBlock::new(d).unwrap();
            // transition rows stay in the closure lattice
            for (i, row) in block.data.zeta.iter().enumerate() {
                for (j, z) in row.iter().enumerate() {
                    if i != j && !z.is_zero() {
                        assert!(z.in_vinv_zvinv(), "zeta[{i}][{j}] = {z}");
                    }
                }
            }
            let schur = block.schur_elements();
            let canonical = block.canonical_elements();
            for family in [&schur, &canonical] {
                for i in 0..family.len() {
                    for j in 0..family.len() {
                        let pair = inner_product(&family[i], &family[j]).unwrap();
                        let want = if i == j {
                            RationalFunction::one()
                        } else {
                            RationalFunction::zero()
                        };
                        assert!(
                            congruent_mod_vinv(&pair, &want),
                            "Gram at {d:?} ({i}, {j}) = {pair}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn budget_errors_are_reported() {
        assert!(matches!(imaginary_gram(6), Err(HallError::Budget(_))));
        assert!(matches!(weight_gram(Dim(5, 4)), Err(HallError::Budget(_))));
        assert!(matches!(OrthogonalBlock::new(Dim(5, 4)), Err(HallError::Budget(_))));
    }

    #[test]
    fn aut_partition_leading_term_is_the_endomorphism_dimension() {
        for n in 1..=5u32 {
            for la in partitions_of(n) {
                let a = aut_partition(&la);
                let sq: i64 =
                    la.conjugate().parts().iter().map(|&c| (c as i64) * (c as i64)).sum();
                assert_eq!(a.max_exp(), Some(2 * sq));
                assert!(a.is_integral(), "a_{la:?} = {a}");
                // value at q = 2 is a positive integer
                let v = eval_q(&a, 2);
                assert!(v.is_integer() && v > Coeff::zero());
                let _ = v.to_integer().to_u64().unwrap();
            }
        }
    }
}
