//! The multiplication engine: normal-orders products of PBW generators.
//!
//! Elements are linear combinations of PBW indices.  A product is computed
//! by concatenating the generator words of the two indices and rewriting the
//! leftmost out-of-order pair until every word is normal: preprojectives in
//! increasing root order, then imaginary generators with weakly decreasing
//! multiple of delta, then preinjectives in decreasing order.  The rewriting
//! rules are the quantum commutation relations of the algebra; the
//! coefficients of the preprojective-preprojective (and dually
//! preinjective-preinjective) rule are derived once from finite-field Hall
//! numbers and cached.
//!
//! Divided powers are expanded to single letters on the way in (dividing by
//! the quantum factorials) and recollected on the way out, so all rules only
//! ever see single generators.

use crate::element::AlgebraElement;
use crate::error::Result;
use crate::kronecker::{Dim, PBWIndex};
use crate::laurent::LaurentPoly;
use crate::oracle::Oracle;
use crate::partitions::Partition;
use crate::quantum::{qfac, qint};
use crate::ratfun::RationalFunction;
use once_cell::sync::Lazy;
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

/// A single PBW generator: `P(n) = E_{(n+1,n)}`, `D(k) = E_{k delta}`,
/// `I(n) = E_{(n,n+1)}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Gen {
    P(u32),
    D(u32),
    I(u32),
}

type Word = Vec<Gen>;

static ORACLE: Lazy<Oracle> = Lazy::new(Oracle::default);
static A_COEFF: Lazy<Mutex<HashMap<(u32, u32), LaurentPoly>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));
static TILDE: Lazy<Mutex<HashMap<u32, Vec<(LaurentPoly, Vec<u32>)>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));
static PAIR_CACHE: Lazy<Mutex<HashMap<(PBWIndex, PBWIndex), AlgebraElement>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Straightening coefficient `a_h^{(r)}`: the coefficient of
/// `E_{(m+h+1,m+h)} * E_{(n-h+1,n-h)}` in `E_{(n+1,n)} * E_{(m+1,m)}` for
/// `r = n - m > 0`.  Derived from Hall numbers at the minimal instance
/// `(n, m) = (r, 0)`: the products on both sides are single classes
/// `M_h = P_{r-h} + P_h`, so `a_h` is a twist times the ratio of two Hall
/// polynomials in `q = v^2`.
pub fn a_coeff(r: u32, h: u32) -> Result<LaurentPoly> {
    assert!(r >= 1 && h <= r / 2);
    if let Some(p) = A_COEFF.lock().unwrap().get(&(r, h)) {
        return Ok(p.clone());
    }
    let l_parts = (r - h, h);
    let top = ORACLE.prep_pair_hall_poly(l_parts, r, 0)?;
    let bot = ORACLE.prep_pair_hall_poly(l_parts, h, r - h)?;
    let ratio = RationalFunction::new(top.subst_power(2), bot.subst_power(2));
    let poly = ratio
        .as_laurent()
        .ok_or_else(|| {
            crate::error::HallError::Invariant(format!(
                "straightening coefficient a_{h}^{r} is not a Laurent polynomial"
            ))
        })?
        .shift(-2 * (r as i64 - h as i64));
    A_COEFF.lock().unwrap().insert((r, h), poly.clone());
    Ok(poly)
}

/// `E~_{n delta}` expanded in products of the `E_{k delta}`: a list of
/// `(coefficient, parts)` pairs where `parts` multiplies left to right.
/// From inverting `E_{k delta} = (1/[k]) sum_s v^{s-k} E~_{s delta} *
/// E_{(k-s) delta}`.
fn tilde_expansion(n: u32) -> Vec<(LaurentPoly, Vec<u32>)> {
    assert!(n >= 1);
    if let Some(t) = TILDE.lock().unwrap().get(&n) {
        return t.clone();
    }
    let mut terms: Vec<(LaurentPoly, Vec<u32>)> = vec![(qint(n as i64), vec![n])];
    for s in 1..n {
        let vpow = LaurentPoly::term(s as i64 - n as i64, crate::laurent::rat(-1));
        for (c, w) in tilde_expansion(s) {
            let mut word = w.clone();
            word.push(n - s);
            terms.push((&vpow * &c, word));
        }
    }
    TILDE.lock().unwrap().insert(n, terms.clone());
    terms
}

fn is_violation(x: Gen, y: Gen) -> bool {
    match (x, y) {
        (Gen::P(a), Gen::P(b)) => a > b,
        (Gen::D(_), Gen::P(_)) => true,
        (Gen::I(_), Gen::P(_)) => true,
        (Gen::I(_), Gen::D(_)) => true,
        (Gen::D(j), Gen::D(k)) => j < k,
        (Gen::I(a), Gen::I(b)) => a < b,
        _ => false,
    }
}

/// Rewrite one out-of-order pair into a combination of words.
fn rewrite_pair(x: Gen, y: Gen) -> Result<Vec<(LaurentPoly, Word)>> {
    let mut out = Vec::new();
    match (x, y) {
        (Gen::P(a), Gen::P(b)) => {
            let r = a - b;
            for h in 0..=r / 2 {
                out.push((a_coeff(r, h)?, vec![Gen::P(b + h), Gen::P(a - h)]));
            }
        }
        (Gen::D(k), Gen::P(m)) => {
            for j in 0..=k {
                let mut w = vec![Gen::P(m + k - j)];
                if j > 0 {
                    w.push(Gen::D(j));
                }
                out.push((qint((k + 1 - j) as i64), w));
            }
        }
        (Gen::I(m), Gen::D(n)) => {
            for j in 0..=n {
                let mut w = Vec::new();
                if j > 0 {
                    w.push(Gen::D(j));
                }
                w.push(Gen::I(m + n - j));
                out.push((qint((n + 1 - j) as i64), w));
            }
        }
        (Gen::I(r), Gen::P(s)) => {
            for (c, parts) in tilde_expansion(r + s + 1) {
                out.push((c, parts.into_iter().map(Gen::D).collect()));
            }
            out.push((
                LaurentPoly::term(-2, crate::laurent::rat(1)),
                vec![Gen::P(s), Gen::I(r)],
            ));
        }
        (Gen::D(j), Gen::D(k)) => {
            debug_assert!(j < k);
            out.push((LaurentPoly::one(), vec![Gen::D(k), Gen::D(j)]));
        }
        (Gen::I(a), Gen::I(b)) => {
            let r = b - a;
            for h in 0..=r / 2 {
                out.push((a_coeff(r, h)?, vec![Gen::I(b - h), Gen::I(a + h)]));
            }
        }
        _ => unreachable!("not a violation"),
    }
    Ok(out)
}

fn first_violation(w: &[Gen]) -> Option<usize> {
    (0..w.len().saturating_sub(1)).find(|&i| is_violation(w[i], w[i + 1]))
}

/// Fold a normal word into its PBW index.  Repeated real letters become
/// divided powers, contributing a quantum factorial (`E^s = [s]! E^{(s)}`).
fn collapse(word: &[Gen]) -> (PBWIndex, LaurentPoly) {
    let mut prep: BTreeMap<u32, u32> = BTreeMap::new();
    let mut parts: Vec<u32> = Vec::new();
    let mut prei: BTreeMap<u32, u32> = BTreeMap::new();
    for g in word {
        match *g {
            Gen::P(n) => *prep.entry(n).or_insert(0) += 1,
            Gen::D(k) => parts.push(k),
            Gen::I(n) => *prei.entry(n).or_insert(0) += 1,
        }
    }
    let mut factor = LaurentPoly::one();
    for &s in prep.values().chain(prei.values()) {
        factor = &factor * &qfac(s);
    }
    let idx = PBWIndex { prep, im: Partition::new(parts), prei };
    (idx, factor)
}

/// The generator word of a PBW index, with the divided-power normalization
/// factor `1 / prod [s]!` its expansion into single letters carries.
fn letters_of(c: &PBWIndex) -> (Word, RationalFunction) {
    let mut word = Vec::new();
    let mut den = LaurentPoly::one();
    for (&n, &s) in &c.prep {
        for _ in 0..s {
            word.push(Gen::P(n));
        }
        den = &den * &qfac(s);
    }
    for &k in c.im.parts() {
        word.push(Gen::D(k));
    }
    for (&n, &t) in c.prei.iter().rev() {
        for _ in 0..t {
            word.push(Gen::I(n));
        }
        den = &den * &qfac(t);
    }
    (word, RationalFunction::new(LaurentPoly::one(), den))
}

/// Normal-order a single word and accumulate the result.
fn normalize_word(coeff: &RationalFunction, word: Word, out: &mut AlgebraElement) -> Result<()> {
    let mut pending: HashMap<Word, RationalFunction> = HashMap::new();
    pending.insert(word, coeff.clone());
    while !pending.is_empty() {
        let mut next: HashMap<Word, RationalFunction> = HashMap::new();
        for (w, c) in pending {
            if c.is_zero() {
                continue;
            }
            match first_violation(&w) {
                None => {
                    let (idx, factor) = collapse(&w);
                    out.add_term(idx, &(&c * &RationalFunction::from_laurent(factor)));
                }
                Some(i) => {
                    for (rc, frag) in rewrite_pair(w[i], w[i + 1])? {
                        let mut nw = Vec::with_capacity(w.len() + frag.len());
                        nw.extend_from_slice(&w[..i]);
                        nw.extend_from_slice(&frag);
                        nw.extend_from_slice(&w[i + 2..]);
                        let nc = &c * &RationalFunction::from_laurent(rc);
                        match next.get_mut(&nw) {
                            Some(acc) => *acc = &*acc + &nc,
                            None => {
                                next.insert(nw, nc);
                            }
                        }
                    }
                }
            }
        }
        pending = next;
    }
    Ok(())
}

/// The basis element `E^c` itself (a single term).
pub fn basis_element(c: &PBWIndex) -> AlgebraElement {
    AlgebraElement::term(c.clone(), RationalFunction::one())
}

/// Product of two PBW indices, memoized.
fn pair_product(x: &PBWIndex, y: &PBWIndex) -> Result<AlgebraElement> {
    if x.is_unit() {
        return Ok(basis_element(y));
    }
    if y.is_unit() {
        return Ok(basis_element(x));
    }
    let key = (x.clone(), y.clone());
    if let Some(e) = PAIR_CACHE.lock().unwrap().get(&key) {
        return Ok(e.clone());
    }
    let (wx, cx) = letters_of(x);
    let (wy, cy) = letters_of(y);
    let mut word = wx;
    word.extend_from_slice(&wy);
    let mut out = AlgebraElement::zero();
    normalize_word(&(&cx * &cy), word, &mut out)?;
    PAIR_CACHE.lock().unwrap().insert(key, out.clone());
    Ok(out)
}

/// Multiply two elements in the twisted algebra, returning PBW normal form.
pub fn multiply(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    let mut out = AlgebraElement::zero();
    for (ix, cx) in x.iter() {
        for (iy, cy) in y.iter() {
            let prod = pair_product(ix, iy)?;
            let c = &(cx * cy);
            for (iz, cz) in prod.iter() {
                out.add_term(iz.clone(), &(c * cz));
            }
        }
    }
    Ok(out)
}

/// `E~_{n delta}` as an element (imaginary block only).
pub fn e_tilde(n: u32) -> Result<AlgebraElement> {
    let mut out = AlgebraElement::zero();
    for (c, parts) in tilde_expansion(n) {
        let word: Word = parts.into_iter().map(Gen::D).collect();
        normalize_word(&RationalFunction::from_laurent(c), word, &mut out)?;
    }
    Ok(out)
}

/// The defining monomial `E(d) = E_2^{(d2)} * E_1^{(d1)}`: divided powers of
/// the two Chevalley generators.  Bar-invariant by construction.
pub fn monomial_e(d: Dim) -> Result<AlgebraElement> {
    let mut word = Vec::with_capacity((d.0 + d.1) as usize);
    for _ in 0..d.1 {
        word.push(Gen::I(0));
    }
    for _ in 0..d.0 {
        word.push(Gen::P(0));
    }
    let den = &qfac(d.1) * &qfac(d.0);
    let mut out = AlgebraElement::zero();
    normalize_word(
        &RationalFunction::new(LaurentPoly::one(), den),
        word,
        &mut out,
    )?;
    Ok(out)
}

/// The monomial attached to a PBW index: the ordered product (preprojective
/// roots ascending, imaginary parts, preinjective roots descending) of the
/// defining monomials of its scaled summand dimensions.
pub fn monomial_of_index(c: &PBWIndex) -> Result<AlgebraElement> {
    let mut out = AlgebraElement::one();
    let push = |d: Dim, out: &mut AlgebraElement| -> Result<()> {
        let m = monomial_e(d)?;
        *out = multiply(out, &m)?;
        Ok(())
    };
    for (&n, &s) in &c.prep {
        push(Dim(s * (n + 1), s * n), &mut out)?;
    }
    for &k in c.im.parts() {
        push(Dim(k, k), &mut out)?;
    }
    for (&n, &t) in c.prei.iter().rev() {
        push(Dim(t * n, t * (n + 1)), &mut out)?;
    }
    Ok(out)
}

/// Generator helpers for examples and the command line.
pub fn gen_element(g: Gen) -> AlgebraElement {
    let idx = match g {
        Gen::P(n) => PBWIndex::single_prep(n),
        Gen::D(k) => PBWIndex::single_imag(Partition::new(vec![k])),
        Gen::I(n) => PBWIndex::single_prei(n),
    };
    basis_element(&idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::rat;
    use crate::quantum::qbinom;

    fn e1() -> AlgebraElement {
        gen_element(Gen::P(0))
    }

    fn e2() -> AlgebraElement {
        gen_element(Gen::I(0))
    }

    fn rf(s: &str) -> RationalFunction {
        // tiny helper for expected coefficients like "v^-2"
        match s {
            "1" => RationalFunction::one(),
            "v^2" => RationalFunction::from_laurent(LaurentPoly::term(2, rat(1))),
            "v^-2" => RationalFunction::from_laurent(LaurentPoly::term(-2, rat(1))),
            _ => panic!("unknown shorthand"),
        }
    }

    #[test]
    fn derived_straightening_coefficients() {
        assert_eq!(a_coeff(1, 0).unwrap().to_string(), "v^2");
        assert_eq!(a_coeff(2, 0).unwrap().to_string(), "v^2");
        assert_eq!(a_coeff(2, 1).unwrap().to_string(), "v^2 - 1");
        assert_eq!(a_coeff(3, 0).unwrap().to_string(), "v^2");
        assert_eq!(a_coeff(3, 1).unwrap().to_string(), "v^4 - 1");
    }

    #[test]
    fn chevalley_products() {
        // E2 * E1 = E_delta + v^-2 E^(P0 I0)
        let p = multiply(&e2(), &e1()).unwrap();
        assert_eq!(p.num_terms(), 2);
        let delta_idx = PBWIndex::single_imag(Partition::new(vec![1]));
        let split_idx = PBWIndex {
            prep: BTreeMap::from([(0, 1)]),
            im: Partition::new(vec![]),
            prei: BTreeMap::from([(0, 1)]),
        };
        assert_eq!(p.coeff(&delta_idx), rf("1"));
        assert_eq!(p.coeff(&split_idx), rf("v^-2"));
        // E1 * E2 is already normal
        let q = multiply(&e1(), &e2()).unwrap();
        assert_eq!(q.num_terms(), 1);
        assert_eq!(q.coeff(&split_idx), rf("1"));
        // E1 * E1 = [2] E1^(2)
        let sq = multiply(&e1(), &e1()).unwrap();
        let idx2 = PBWIndex { prep: BTreeMap::from([(0, 2)]), ..Default::default() };
        assert_eq!(sq.num_terms(), 1);
        assert_eq!(
            sq.coeff(&idx2),
            RationalFunction::from_laurent(qint(2))
        );
    }

    #[test]
    fn divided_power_merge() {
        // E^(2) * E^(3) = qbinom(5,2) E^(5)
        let a = basis_element(&PBWIndex { prep: BTreeMap::from([(0, 2)]), ..Default::default() });
        let b = basis_element(&PBWIndex { prep: BTreeMap::from([(0, 3)]), ..Default::default() });
        let p = multiply(&a, &b).unwrap();
        assert_eq!(p.num_terms(), 1);
        assert_eq!(
            p.coeff(&PBWIndex { prep: BTreeMap::from([(0, 5)]), ..Default::default() }),
            RationalFunction::from_laurent(qbinom(5, 2))
        );
    }

    #[test]
    fn lemma_3_8_shape() {
        // E_(2,1) * E1 = v^2 E1 * E_(2,1) = v^2 E^(P0 P1)
        let p21 = gen_element(Gen::P(1));
        let p = multiply(&p21, &e1()).unwrap();
        let expected_idx = PBWIndex {
            prep: BTreeMap::from([(0, 1), (1, 1)]),
            im: Partition::new(vec![]),
            prei: BTreeMap::new(),
        };
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.coeff(&expected_idx), rf("v^2"));
    }

    #[test]
    fn lemma_3_12_shape() {
        // E_delta * E1 = [2] E^(P1) + E^(P0, im=(1))
        let d = gen_element(Gen::D(1));
        let p = multiply(&d, &e1()).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(
            p.coeff(&PBWIndex::single_prep(1)),
            RationalFunction::from_laurent(qint(2))
        );
        let mixed = PBWIndex {
            prep: BTreeMap::from([(0, 1)]),
            im: Partition::new(vec![1]),
            prei: BTreeMap::new(),
        };
        assert_eq!(p.coeff(&mixed), rf("1"));
    }

    #[test]
    fn e_tilde_expansions() {
        // E~_delta = E_delta
        let t1 = e_tilde(1).unwrap();
        assert_eq!(t1.num_terms(), 1);
        assert_eq!(
            t1.coeff(&PBWIndex::single_imag(Partition::new(vec![1]))),
            RationalFunction::one()
        );
        // E~_2delta = [2] E_2delta - v^-1 E_delta^2
        let t2 = e_tilde(2).unwrap();
        assert_eq!(
            t2.coeff(&PBWIndex::single_imag(Partition::new(vec![2]))),
            RationalFunction::from_laurent(qint(2))
        );
        assert_eq!(
            t2.coeff(&PBWIndex::single_imag(Partition::new(vec![1, 1]))),
            RationalFunction::from_laurent(LaurentPoly::term(-1, rat(-1)))
        );
    }

    #[test]
    fn monomials_are_bar_invariant_and_triangular() {
        // E(1,1) = E_delta + v^-2 E^(P0 I0); integral and bar-invariant as a
        // whole only in the basis-free sense, so just check the expansion
        let m = monomial_e(Dim(1, 1)).unwrap();
        assert_eq!(m.num_terms(), 2);
        // E(2,1): leading term E^(P1), unit coefficient
        let m21 = monomial_e(Dim(2, 1)).unwrap();
        assert_eq!(m21.coeff(&PBWIndex::single_prep(1)), rf("1"));
        // all coefficients integral
        for (_, c) in m21.iter() {
            assert!(c.as_laurent().map(|l| l.is_integral()).unwrap_or(false));
        }
    }

    #[test]
    fn monomial_of_index_examples() {
        // c = {im=(1)}: the monomial is E(1,1)
        let c = PBWIndex::single_imag(Partition::new(vec![1]));
        assert_eq!(
            monomial_of_index(&c).unwrap(),
            monomial_e(Dim(1, 1)).unwrap()
        );
        // c = {prep={0:1}, prei={0:1}}: E1 * E2 = E^c exactly
        let c2 = PBWIndex {
            prep: BTreeMap::from([(0, 1)]),
            im: Partition::new(vec![]),
            prei: BTreeMap::from([(0, 1)]),
        };
        let m = monomial_of_index(&c2).unwrap();
        assert_eq!(m, basis_element(&c2));
    }

    #[test]
    fn associativity_samples() {
        let gens = [
            gen_element(Gen::P(0)),
            gen_element(Gen::I(0)),
            gen_element(Gen::D(1)),
            gen_element(Gen::P(1)),
            gen_element(Gen::I(1)),
        ];
        for a in &gens {
            for b in &gens {
                for c in &gens {
                    let left = multiply(&multiply(a, b).unwrap(), c).unwrap();
                    let right = multiply(a, &multiply(b, c).unwrap()).unwrap();
                    assert_eq!(left, right);
                }
            }
        }
    }

    #[test]
    fn products_stay_integral() {
        let gens = [
            gen_element(Gen::P(0)),
            gen_element(Gen::P(1)),
            gen_element(Gen::D(1)),
            gen_element(Gen::D(2)),
            gen_element(Gen::I(0)),
            gen_element(Gen::I(1)),
        ];
        for a in &gens {
            for b in &gens {
                let p = multiply(a, b).unwrap();
                for (_, c) in p.iter() {
                    let l = c.as_laurent().expect("structure constant not Laurent");
                    assert!(l.is_integral(), "non-integral structure constant");
                }
            }
        }
    }

    #[test]
    fn weight_homogeneity() {
        let x = multiply(&gen_element(Gen::I(1)), &gen_element(Gen::P(1))).unwrap();
        assert_eq!(x.weight(), Some(Dim(3, 3)));
    }
}
