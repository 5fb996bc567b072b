//! The composition algebra of a tube: nilpotent representations of a
//! cyclic quiver.
//!
//! Vertices are `0..rank` with arrows `i -> i+1` mod `rank`; `S_i[l]` is
//! the uniserial with top `S_i` and length `l`, so its composition factors
//! read `i, i+1, ..., i+l-1` downward.  Isomorphism classes are tuples of
//! partitions, one per vertex, holding the lengths of the parts with that
//! top.  On top of that sit the generic-extension monoid, distinguished
//! words, the monomial basis `m^(w)`, the PBW basis `E_pi` over the
//! aperiodic classes, and the block handed to the canonical solver.
//!
//! Structure constants for right multiplication by a bundle `e S_j` come
//! from a closed socle-strip rule: a submodule isomorphic to `e S_j` is an
//! `e`-dimensional subspace of the span of the socles lying at vertex `j`,
//! the automorphism group acts through the parabolic of the
//! length-descending filtration on that span, and the orbit count is the
//! standard filtered-subspace product of Gaussian binomials.  The rule is
//! validated against brute-force submodule enumeration over small fields
//! in the tests before anything downstream trusts it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::canonical::{build_transition, TransitionData};
use crate::error::{HallError, Result};
use crate::laurent::{Coeff, LaurentPoly};
use crate::oracle::{ClassLabel, IndecLabel, Oracle, Quiver};
use crate::partitions::Partition;
use crate::quantum::qbinom;
use crate::ratfun::RationalFunction;

/// Gaussian binomial as a polynomial in `q = v^2`: the balanced quantum
/// binomial shifted back to nonnegative powers.
fn gauss_poly(n: u32, k: u32) -> LaurentPoly {
    qbinom(n, k).shift((k as i64) * (n as i64 - k as i64))
}

/// An isomorphism class of nilpotent cyclic-quiver representations: one
/// partition per vertex, listing the lengths of the parts with that top.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multipartition {
    rank: u32,
    parts: Vec<Partition>,
}

impl Multipartition {
    pub fn new(rank: u32, parts: Vec<Partition>) -> Result<Self> {
        if rank < 2 {
            return Err(HallError::Usage("tube rank must be at least 2".into()));
        }
        if parts.len() != rank as usize {
            return Err(HallError::Usage(format!(
                "expected {rank} partitions, got {}",
                parts.len()
            )));
        }
        Ok(Multipartition { rank, parts })
    }

    pub fn empty(rank: u32) -> Result<Self> {
        Multipartition::new(rank, vec![Partition::empty(); rank as usize])
    }

    /// `e` copies of the simple at vertex `j`.
    pub fn semisimple(rank: u32, j: u32, e: u32) -> Result<Self> {
        let mut parts = vec![Partition::empty(); rank as usize];
        if j >= rank {
            return Err(HallError::Usage(format!("vertex {j} out of range for rank {rank}")));
        }
        parts[j as usize] = Partition::new(vec![1; e as usize]);
        Multipartition::new(rank, parts)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn parts(&self) -> &[Partition] {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_empty())
    }

    /// The summands `(top, len)`, one entry per part.
    pub fn segments(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for (i, p) in self.parts.iter().enumerate() {
            for &l in p.parts() {
                out.push((i as u32, l));
            }
        }
        out
    }

    pub fn dim_vector(&self) -> Vec<u32> {
        let n = self.rank as usize;
        let mut d = vec![0u32; n];
        for (top, len) in self.segments() {
            for t in 0..len {
                d[((top + t) % self.rank) as usize] += 1;
            }
        }
        d
    }

    pub fn total_dim(&self) -> u32 {
        self.parts.iter().map(|p| p.parts().iter().sum::<u32>()).sum()
    }

    /// No residual `Z/rank`-symmetry: for every part length some vertex
    /// misses it.
    pub fn is_aperiodic(&self) -> bool {
        let mut lengths: Vec<u32> = self.segments().iter().map(|&(_, l)| l).collect();
        lengths.sort_unstable();
        lengths.dedup();
        lengths.iter().all(|&l| {
            self.parts.iter().any(|p| !p.parts().contains(&l))
        })
    }

    /// If the class is `e` simples at a single vertex `j`, return `(j, e)`.
    pub fn as_simple_bundle(&self) -> Option<(u32, u32)> {
        let mut seen = None;
        for (i, p) in self.parts.iter().enumerate() {
            if p.is_empty() {
                continue;
            }
            if p.parts().iter().any(|&l| l != 1) || seen.is_some() {
                return None;
            }
            seen = Some((i as u32, p.parts().len() as u32));
        }
        seen
    }

    pub fn class_label(&self) -> ClassLabel {
        let mut label = ClassLabel::new();
        for (top, len) in self.segments() {
            *label.entry(IndecLabel::Cyc { top, len }).or_insert(0) += 1;
        }
        label
    }

    pub fn from_label(rank: u32, label: &ClassLabel) -> Result<Self> {
        let mut parts = vec![Vec::new(); rank as usize];
        for (l, &m) in label {
            match l {
                IndecLabel::Cyc { top, len } if *top < rank => {
                    for _ in 0..m {
                        parts[*top as usize].push(*len);
                    }
                }
                _ => {
                    return Err(HallError::Invariant(format!(
                        "class label {:?} is not a rank-{rank} tube class",
                        l
                    )))
                }
            }
        }
        Multipartition::new(rank, parts.into_iter().map(Partition::new).collect())
    }

    pub fn to_json(&self) -> Value {
        let parts: Vec<Value> = self
            .parts
            .iter()
            .map(|p| Value::from(p.parts().to_vec()))
            .collect();
        json!({ "rank": self.rank, "parts": parts })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let rank = value
            .get("rank")
            .and_then(Value::as_u64)
            .ok_or_else(|| HallError::Json("multipartition needs a \"rank\" number".into()))?;
        let parts = value
            .get("parts")
            .and_then(Value::as_array)
            .ok_or_else(|| HallError::Json("multipartition needs a \"parts\" array".into()))?;
        let mut out = Vec::new();
        for p in parts {
            let arr = p
                .as_array()
                .ok_or_else(|| HallError::Json("each component must be an array".into()))?;
            let mut v = Vec::new();
            for x in arr {
                v.push(
                    x.as_u64()
                        .ok_or_else(|| HallError::Json("parts must be positive integers".into()))?
                        as u32,
                );
            }
            out.push(Partition::new(v));
        }
        Multipartition::new(rank as u32, out).map_err(|e| HallError::Json(e.to_string()))
    }
}

impl fmt::Display for Multipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "(")?;
            for (k, l) in p.parts().iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{l}")?;
            }
            write!(f, ")")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Multipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A word in tight form: letters `(vertex, exponent)` with consecutive
/// vertices distinct.  The attached monomial is the product of divided
/// generator powers, one factor per letter, so tightness is part of the
/// meaning and is rejected rather than normalized away.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    rank: u32,
    letters: Vec<(u32, u32)>,
}

impl Word {
    pub fn new(rank: u32, letters: Vec<(u32, u32)>) -> Result<Self> {
        for (k, &(j, e)) in letters.iter().enumerate() {
            if j >= rank {
                return Err(HallError::Usage(format!("vertex {j} out of range for rank {rank}")));
            }
            if e == 0 {
                return Err(HallError::Usage("word exponents must be positive".into()));
            }
            if k > 0 && letters[k - 1].0 == j {
                return Err(HallError::Usage(
                    "word is not tight: consecutive letters share a vertex".into(),
                ));
            }
        }
        Ok(Word { rank, letters })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn letters(&self) -> &[(u32, u32)] {
        &self.letters
    }

    pub fn dim_vector(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.rank as usize];
        for &(j, e) in &self.letters {
            d[j as usize] += e;
        }
        d
    }

    /// JSON `{"rank": 2, "letters": [[0, 2], [1, 1]]}`.
    pub fn to_json(&self) -> Value {
        let letters: Vec<Value> = self.letters.iter().map(|&(j, e)| json!([j, e])).collect();
        json!({ "rank": self.rank, "letters": letters })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let rank = value
            .get("rank")
            .and_then(Value::as_u64)
            .ok_or_else(|| HallError::Json("word needs a \"rank\" number".into()))?;
        let letters = value
            .get("letters")
            .and_then(Value::as_array)
            .ok_or_else(|| HallError::Json("word needs a \"letters\" array".into()))?;
        let mut out = Vec::new();
        for l in letters {
            let pair = l.as_array().filter(|a| a.len() == 2).and_then(|a| {
                Some((a[0].as_u64()? as u32, a[1].as_u64()? as u32))
            });
            out.push(pair.ok_or_else(|| {
                HallError::Json("each letter must be a [vertex, exponent] pair".into())
            })?);
        }
        Word::new(rank as u32, out).map_err(|e| HallError::Json(e.to_string()))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "(empty)");
        }
        for (k, &(j, e)) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            if e == 1 {
                write!(f, "{j}")?;
            } else {
                write!(f, "{j}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An element of the tube algebra in the normalized `<M(lambda)>` basis.
#[derive(Clone, PartialEq, Eq)]
pub struct TubeElement {
    rank: u32,
    terms: BTreeMap<Multipartition, RationalFunction>,
}

impl TubeElement {
    pub fn zero(rank: u32) -> Self {
        TubeElement { rank, terms: BTreeMap::new() }
    }

    /// The unit: the class of the zero module with coefficient one.
    pub fn one(rank: u32) -> Result<Self> {
        let mut e = TubeElement::zero(rank);
        e.add_term(Multipartition::empty(rank)?, &RationalFunction::one());
        Ok(e)
    }

    pub fn term(index: Multipartition, coeff: &RationalFunction) -> Self {
        let mut e = TubeElement::zero(index.rank());
        e.add_term(index, coeff);
        e
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, index: &Multipartition) -> RationalFunction {
        self.terms.get(index).cloned().unwrap_or_else(RationalFunction::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Multipartition, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, index: Multipartition, coeff: &RationalFunction) {
        if coeff.is_zero() {
            return;
        }
        debug_assert_eq!(index.rank(), self.rank);
        let entry = self.terms.entry(index);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = &*o.get() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        if c.is_zero() {
            return TubeElement::zero(self.rank);
        }
        let terms = self.terms.iter().map(|(i, x)| (i.clone(), x * c)).collect();
        TubeElement { rank: self.rank, terms }
    }

    /// Common dimension vector of the support, if the element is nonzero
    /// and homogeneous.
    pub fn weight(&self) -> Option<Vec<u32>> {
        let mut it = self.terms.keys();
        let first = it.next()?.dim_vector();
        if it.all(|i| i.dim_vector() == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(i, c)| json!({ "index": i.to_json(), "coeff": c.to_json() }))
            .collect();
        json!({ "rank": self.rank, "terms": terms })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let rank = value
            .get("rank")
            .and_then(Value::as_u64)
            .ok_or_else(|| HallError::Json("tube element needs a \"rank\" number".into()))?;
        let terms = value
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| HallError::Json("tube element needs a \"terms\" array".into()))?;
        let mut out = TubeElement::zero(rank as u32);
        for t in terms {
            let index = Multipartition::from_json(
                t.get("index").ok_or_else(|| HallError::Json("term missing \"index\"".into()))?,
            )?;
            let coeff = RationalFunction::from_json(
                t.get("coeff").ok_or_else(|| HallError::Json("term missing \"coeff\"".into()))?,
            )?;
            out.add_term(index, &coeff);
        }
        Ok(out)
    }
}

impl std::ops::Sub for &TubeElement {
    type Output = TubeElement;
    fn sub(self, other: &TubeElement) -> TubeElement {
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(i.clone(), &(-c.clone()));
        }
        out
    }
}

impl fmt::Debug for TubeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for TubeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (i, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})<{i}>")?;
        }
        Ok(())
    }
}

/// Rank of an integer matrix by exact rational elimination.
fn int_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let mut rank = 0;
    let cols = rows.first().map_or(0, Vec::len);
    let mut col = 0;
    while col < cols && rank < rows.len() {
        if let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) {
            rows.swap(rank, p);
            let pivot = rows[rank][col].clone();
            for r in (rank + 1)..rows.len() {
                if rows[r][col].is_zero() {
                    continue;
                }
                let factor = &rows[r][col] / &pivot;
                for c in col..cols {
                    let s = &rows[rank][c] * &factor;
                    rows[r][c] = &rows[r][c] - &s;
                }
            }
            rank += 1;
        }
        col += 1;
    }
    rank
}

struct Mem {
    hom: HashMap<(u32, u32, u32, u32), u32>,
    end: HashMap<Multipartition, i64>,
    words: HashMap<Multipartition, Word>,
}

/// One tube: the rank, a finite-field oracle for generic extensions, and
/// insert-only caches for Hom dimensions and distinguished words.
pub struct Tube {
    rank: u32,
    oracle: Oracle,
    mem: Mutex<Mem>,
}

impl Tube {
    pub fn new(rank: u32) -> Result<Self> {
        if rank < 2 {
            return Err(HallError::Usage("tube rank must be at least 2".into()));
        }
        Ok(Tube {
            rank,
            oracle: Oracle::default(),
            mem: Mutex::new(Mem { hom: HashMap::new(), end: HashMap::new(), words: HashMap::new() }),
        })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn quiver(&self) -> Quiver {
        Quiver::Cyclic(self.rank)
    }

    /// `dim Hom(S_i[a], S_j[b])` by exact linear algebra: unknowns are the
    /// vertex components of an intertwiner between the integral path
    /// models, constraints come from the square over each arrow.  The
    /// result is field independent because the models are.
    pub fn indec_hom(&self, (i, a): (u32, u32), (j, b): (u32, u32)) -> u32 {
        let key = (i, a, j, b);
        if let Some(&d) = self.mem.lock().unwrap().hom.get(&key) {
            return d;
        }
        let n = self.rank;
        // unknown z[s][t]: coefficient of the map sending source position t
        // to target position s; only same-vertex pairs are allowed
        let mut vars = Vec::new();
        let mut var_of = HashMap::new();
        for t in 0..a {
            for s in 0..b {
                if (i + t) % n == (j + s) % n {
                    var_of.insert((s, t), vars.len());
                    vars.push((s, t));
                }
            }
        }
        // square over the arrow out of position t: f(x t) = x f(t)
        let mut rows: Vec<Vec<BigRational>> = Vec::new();
        let zero = BigRational::zero();
        let one = BigRational::from_integer(1.into());
        for t in 0..a {
            for s2 in 0..b {
                if (i + t + 1) % n != (j + s2) % n {
                    continue;
                }
                // coefficient of target position s2 in f(t+1) - x f(t)
                let mut row = vec![zero.clone(); vars.len()];
                let mut nonzero = false;
                if t + 1 < a {
                    if let Some(&v) = var_of.get(&(s2, t + 1)) {
                        row[v] = one.clone();
                        nonzero = true;
                    }
                }
                if s2 >= 1 {
                    if let Some(&v) = var_of.get(&(s2 - 1, t)) {
                        row[v] = &row[v] - &one;
                        nonzero = true;
                    }
                }
                if nonzero {
                    rows.push(row);
                }
            }
        }
        let d = vars.len() - int_rank(rows);
        self.mem.lock().unwrap().hom.insert(key, d as u32);
        d as u32
    }

    /// `dim Hom(M(mu), M(la))` by additivity over the summands.
    pub fn dim_hom(&self, mu: &Multipartition, la: &Multipartition) -> u32 {
        let mut total = 0;
        for x in mu.segments() {
            for y in la.segments() {
                total += self.indec_hom(x, y);
            }
        }
        total
    }

    pub fn end_dim(&self, pi: &Multipartition) -> i64 {
        if let Some(&e) = self.mem.lock().unwrap().end.get(pi) {
            return e;
        }
        let e = self.dim_hom(pi, pi) as i64;
        self.mem.lock().unwrap().end.insert(pi.clone(), e);
        e
    }

    /// Hom dimensions from every uniserial test module up to the total
    /// length; these determine the class and cut out the degeneration
    /// order.
    fn hom_vector(&self, pi: &Multipartition, max_len: u32) -> Vec<u32> {
        let mut out = Vec::new();
        for v in 0..self.rank {
            for l in 1..=max_len {
                let mut d = 0;
                for y in pi.segments() {
                    d += self.indec_hom((v, l), y);
                }
                out.push(d);
            }
        }
        out
    }

    /// The degeneration order: `Less` means strictly more degenerate
    /// (smaller orbit), detected by Hom dimensions against the uniserial
    /// test modules.  Different dimension vectors are incomparable.
    pub fn cmp(&self, mu: &Multipartition, la: &Multipartition) -> Option<Ordering> {
        if mu.dim_vector() != la.dim_vector() {
            return None;
        }
        if mu == la {
            return Some(Ordering::Equal);
        }
        let max_len = mu.total_dim();
        let a = self.hom_vector(mu, max_len);
        let b = self.hom_vector(la, max_len);
        let mut le = true; // some hom of mu strictly above: mu can be below la
        let mut ge = true;
        for (x, y) in a.iter().zip(&b) {
            if x < y {
                le = false;
            }
            if x > y {
                ge = false;
            }
        }
        match (le, ge) {
            (true, true) => None, // equal hom vectors on distinct classes: never happens
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }

    /// `deg_leq(mu, la)`: is `mu` a degeneration of `la`?
    pub fn deg_leq(&self, mu: &Multipartition, la: &Multipartition) -> Result<bool> {
        if mu.dim_vector() != la.dim_vector() {
            return Err(HallError::Usage(
                "degeneration order compares classes of equal dimension vector".into(),
            ));
        }
        Ok(matches!(self.cmp(mu, la), Some(Ordering::Less | Ordering::Equal)))
    }

    /// All classes `L` with a submodule isomorphic to `e S_j` and quotient
    /// `M(m)`, together with the Hall polynomial `g^L_{M, eS_j}` as a
    /// polynomial in `q = v^2`.
    ///
    /// A part of `m` can grow by one socle box exactly when its socle sits
    /// at vertex `j-1`; all such parts of one length are isomorphic, so a
    /// candidate is a choice of how many parts of each length to extend
    /// plus how many fresh simples to insert.
    pub fn socle_additions(
        &self,
        m: &Multipartition,
        j: u32,
        e: u32,
    ) -> Result<Vec<(Multipartition, LaurentPoly)>> {
        if j >= self.rank {
            return Err(HallError::Usage(format!(
                "vertex {j} out of range for rank {}",
                self.rank
            )));
        }
        // extendable groups: length -> available count
        let mut groups: BTreeMap<u32, u32> = BTreeMap::new();
        for (top, len) in m.segments() {
            if (top + len) % self.rank == j {
                *groups.entry(len).or_insert(0) += 1;
            }
        }
        let lens: Vec<u32> = groups.keys().copied().collect();
        let mut out = Vec::new();
        // choice[k] = parts of length lens[k] extended; rest are new simples
        let mut choice = vec![0u32; lens.len()];
        loop {
            let used: u32 = choice.iter().sum();
            if used <= e {
                let fresh = e - used;
                let l = self.apply_addition(m, j, &lens, &choice, fresh)?;
                let mut profile: BTreeMap<u32, u32> = BTreeMap::new();
                for (k, &c) in choice.iter().enumerate() {
                    if c > 0 {
                        profile.insert(lens[k] + 1, c);
                    }
                }
                if fresh > 0 {
                    profile.insert(1, fresh);
                }
                let g = self.socle_strip_coeff(&l, j, &profile);
                debug_assert!(!g.is_zero());
                out.push((l, g));
            }
            // next choice vector
            let mut k = 0;
            loop {
                if k == choice.len() {
                    return Ok(out);
                }
                if choice[k] < groups[&lens[k]] {
                    choice[k] += 1;
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }

    fn apply_addition(
        &self,
        m: &Multipartition,
        j: u32,
        lens: &[u32],
        choice: &[u32],
        fresh: u32,
    ) -> Result<Multipartition> {
        let mut parts: Vec<Vec<u32>> =
            m.parts().iter().map(|p| p.parts().to_vec()).collect();
        for (k, &c) in choice.iter().enumerate() {
            let len = lens[k];
            let top = ((j + self.rank - len % self.rank) % self.rank) as usize;
            let mut left = c;
            for x in parts[top].iter_mut() {
                if *x == len && left > 0 {
                    *x += 1;
                    left -= 1;
                }
            }
            debug_assert_eq!(left, 0);
        }
        for _ in 0..fresh {
            parts[j as usize].push(1);
        }
        Multipartition::new(self.rank, parts.into_iter().map(Partition::new).collect())
    }

    /// The count of `e`-dimensional submodule spaces inside the vertex-`j`
    /// socle span of `L` with the given removal profile (length in `L` ->
    /// number of parts shortened): Gaussian binomials per length group
    /// times the lifting freedom into longer parts.
    fn socle_strip_coeff(&self, l: &Multipartition, j: u32, profile: &BTreeMap<u32, u32>) -> LaurentPoly {
        let mut avail: BTreeMap<u32, u32> = BTreeMap::new();
        for (top, len) in l.segments() {
            if (top + len) % self.rank == (j + 1) % self.rank {
                // socle at vertex j
                *avail.entry(len).or_insert(0) += 1;
            }
        }
        let mut coeff = LaurentPoly::one();
        let mut exp: i64 = 0;
        let lens: Vec<u32> = avail.keys().copied().collect();
        for (a_pos, &la) in lens.iter().enumerate() {
            let k_l = avail[&la];
            let d_l = profile.get(&la).copied().unwrap_or(0);
            if d_l > k_l {
                return LaurentPoly::zero();
            }
            coeff = &coeff * &gauss_poly(k_l, d_l);
            for &lb in &lens[a_pos + 1..] {
                let k_b = avail[&lb];
                let d_b = profile.get(&lb).copied().unwrap_or(0);
                exp += d_l as i64 * (k_b - d_b) as i64;
            }
        }
        for (len, _) in profile {
            debug_assert!(avail.contains_key(len));
        }
        coeff.shift(2 * exp)
    }

    /// Submodule classes `W` of `l` with quotient `e S_j` (top strips): the
    /// mirror of `socle_additions`, used when peeling candidate
    /// distinguished words.  Coefficients are not needed there.
    fn top_removals(&self, l: &Multipartition, j: u32) -> Vec<(u32, Multipartition)> {
        let mut groups: BTreeMap<u32, u32> = BTreeMap::new();
        for (top, len) in l.segments() {
            if top == j {
                *groups.entry(len).or_insert(0) += 1;
            }
        }
        let lens: Vec<u32> = groups.keys().copied().collect();
        let mut out = Vec::new();
        let mut choice = vec![0u32; lens.len()];
        loop {
            let e: u32 = choice.iter().sum();
            if e > 0 {
                let mut parts: Vec<Vec<u32>> =
                    l.parts().iter().map(|p| p.parts().to_vec()).collect();
                for (k, &c) in choice.iter().enumerate() {
                    let len = lens[k];
                    let mut left = c;
                    parts[j as usize].retain(|&x| {
                        if x == len && left > 0 {
                            left -= 1;
                            false
                        } else {
                            true
                        }
                    });
                    if len > 1 {
                        let new_top = ((j + 1) % self.rank) as usize;
                        for _ in 0..c {
                            parts[new_top].push(len - 1);
                        }
                    }
                }
                let w = Multipartition::new(
                    self.rank,
                    parts.into_iter().map(Partition::new).collect(),
                )
                .expect("rank preserved");
                out.push((e, w));
            }
            let mut k = 0;
            loop {
                if k == choice.len() {
                    return out;
                }
                if choice[k] < groups[&lens[k]] {
                    choice[k] += 1;
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }

    /// Generic extension of `a` by `b` (`b` on the submodule side): the
    /// unique extension class with minimal endomorphism dimension.
    ///
    /// For a simple bundle the candidates are the socle strips and no
    /// field is involved; otherwise candidates are found by submodule
    /// enumeration over one small field, which is enough because the
    /// support of the Hall product is field independent here.
    pub fn generic_ext(&self, a: &Multipartition, b: &Multipartition) -> Result<Multipartition> {
        self.generic_ext_at(a, b, 2)
    }

    pub fn generic_ext_at(&self, a: &Multipartition, b: &Multipartition, q: u64) -> Result<Multipartition> {
        if a.rank() != self.rank || b.rank() != self.rank {
            return Err(HallError::Usage("rank mismatch in generic extension".into()));
        }
        if b.is_zero() {
            return Ok(a.clone());
        }
        if a.is_zero() {
            return Ok(b.clone());
        }
        let candidates: Vec<Multipartition> = if let Some((j, e)) = b.as_simple_bundle() {
            self.socle_additions(a, j, e)?.into_iter().map(|(l, _)| l).collect()
        } else {
            let quiver = self.quiver();
            let da = a.dim_vector();
            let db = b.dim_vector();
            let dl: Vec<u32> = da.iter().zip(&db).map(|(x, y)| x + y).collect();
            let ta = self.oracle.table(quiver, &da, q)?;
            let tb = self.oracle.table(quiver, &db, q)?;
            let tl = self.oracle.table(quiver, &dl, q)?;
            let ia = ta.find_label(&a.class_label()).ok_or_else(|| {
                HallError::Invariant(format!("class {a} missing from its table"))
            })?;
            let ib = tb.find_label(&b.class_label()).ok_or_else(|| {
                HallError::Invariant(format!("class {b} missing from its table"))
            })?;
            let mut found = Vec::new();
            for il in 0..tl.len() {
                let g = self.oracle.hall_number(quiver, q, (&dl, il), (&da, ia), (&db, ib))?;
                if g > 0 {
                    found.push(Multipartition::from_label(self.rank, &tl.classes[il].label)?);
                }
            }
            found
        };
        let best = candidates
            .iter()
            .map(|l| (self.end_dim(l), l))
            .min_by_key(|&(e, _)| e)
            .ok_or_else(|| HallError::Invariant("extension has no candidates".into()))?;
        let ties = candidates.iter().filter(|l| self.end_dim(l) == best.0).count();
        if ties != 1 {
            return Err(HallError::Invariant(format!(
                "generic extension of {a} by {b} is not unique at minimal End"
            )));
        }
        Ok(best.1.clone())
    }

    /// `wp(w)`: the iterated generic extension of the letters.
    pub fn wp(&self, w: &Word) -> Result<Multipartition> {
        let mut acc = Multipartition::empty(self.rank)?;
        for &(j, e) in w.letters() {
            let letter = Multipartition::semisimple(self.rank, j, e)?;
            acc = self.generic_ext(&acc, &letter)?;
        }
        Ok(acc)
    }

    /// The filtration-count polynomials of a word: coefficient of `u_la`
    /// in the untwisted product of the letter bundles, as a polynomial in
    /// `q = v^2`.
    pub fn filtration_poly(&self, w: &Word) -> Result<BTreeMap<Multipartition, LaurentPoly>> {
        let mut acc: BTreeMap<Multipartition, LaurentPoly> = BTreeMap::new();
        acc.insert(Multipartition::empty(self.rank)?, LaurentPoly::one());
        for &(j, e) in w.letters() {
            let mut next: BTreeMap<Multipartition, LaurentPoly> = BTreeMap::new();
            for (m, c) in &acc {
                for (l, g) in self.socle_additions(m, j, e)? {
                    let t = (c * &g) + next.get(&l).cloned().unwrap_or_else(LaurentPoly::zero);
                    if t.is_zero() {
                        next.remove(&l);
                    } else {
                        next.insert(l, t);
                    }
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// The monomial of a word: the twisted product of divided generator
    /// powers `E_j^{(e)} = <e S_j>`, expanded in the `<M(lambda)>` basis.
    pub fn monomial(&self, w: &Word) -> Result<TubeElement> {
        let mut acc = TubeElement::one(self.rank)?;
        for &(j, e) in w.letters() {
            acc = self.mul_bundle(&acc, j, e)?;
        }
        Ok(acc)
    }

    /// Right multiplication by `<e S_j>` in the twisted algebra.
    pub fn mul_bundle(&self, x: &TubeElement, j: u32, e: u32) -> Result<TubeElement> {
        let quiver = self.quiver();
        let mut ssdim = vec![0u32; self.rank as usize];
        ssdim[j as usize] = e;
        let mut out = TubeElement::zero(self.rank);
        for (m, c) in x.iter() {
            let em = self.end_dim(m);
            let twist = quiver.euler(&m.dim_vector(), &ssdim);
            for (l, g) in self.socle_additions(m, j, e)? {
                let el = self.end_dim(&l);
                let exp = em - el + (e as i64) * (e as i64) + twist;
                let factor = RationalFunction::from_laurent(g.shift(exp));
                out.add_term(l, &(c * &factor));
            }
        }
        Ok(out)
    }

    /// The distinguished word of an aperiodic class: a tight word whose
    /// filtration count is identically one.  Found by peeling top layers
    /// (full layers first, then all top strips), verified exactly, and
    /// cached so the section is deterministic.
    pub fn distinguished_word(&self, pi: &Multipartition) -> Result<Word> {
        if !pi.is_aperiodic() {
            return Err(HallError::Usage(format!(
                "distinguished words exist only for aperiodic classes, got {pi}"
            )));
        }
        if let Some(w) = self.mem.lock().unwrap().words.get(pi) {
            return Ok(w.clone());
        }
        let mut prefix = Vec::new();
        let found = self
            .peel(pi, pi, &mut prefix, true)?
            .map(Ok)
            .unwrap_or_else(|| {
                let mut prefix = Vec::new();
                self.peel(pi, pi, &mut prefix, false)?.ok_or_else(|| {
                    HallError::Invariant(format!("no distinguished word found for {pi}"))
                })
            })?;
        self.mem.lock().unwrap().words.insert(pi.clone(), found.clone());
        Ok(found)
    }

    fn peel(
        &self,
        target: &Multipartition,
        current: &Multipartition,
        prefix: &mut Vec<(u32, u32)>,
        full_only: bool,
    ) -> Result<Option<Word>> {
        if current.is_zero() {
            let w = Word::new(self.rank, prefix.clone())?;
            if self.wp(&w)? == *target {
                let filt = self.filtration_poly(&w)?;
                if filt.get(target).is_some_and(LaurentPoly::is_one) {
                    return Ok(Some(w));
                }
            }
            return Ok(None);
        }
        let last = prefix.last().map(|&(j, _)| j);
        for j in 0..self.rank {
            if last == Some(j) {
                continue;
            }
            let moves = self.top_removals(current, j);
            if moves.is_empty() {
                continue;
            }
            let full: u32 = current.parts()[j as usize].parts().len() as u32;
            for (e, rest) in &moves {
                if full_only && *e != full {
                    continue;
                }
                prefix.push((j, *e));
                let hit = self.peel(target, rest, prefix, full_only)?;
                prefix.pop();
                if hit.is_some() {
                    return Ok(hit);
                }
            }
        }
        Ok(None)
    }

    /// All classes of one dimension vector.
    pub fn classes_of_dim(&self, dim: &[u32]) -> Result<Vec<Multipartition>> {
        if dim.len() != self.rank as usize {
            return Err(HallError::Usage(format!(
                "dimension vector must have {} entries",
                self.rank
            )));
        }
        let total: u32 = dim.iter().sum();
        let mut segs = Vec::new();
        for top in 0..self.rank {
            for len in 1..=total {
                let mp = Multipartition::new(
                    self.rank,
                    (0..self.rank)
                        .map(|i| {
                            if i == top {
                                Partition::new(vec![len])
                            } else {
                                Partition::empty()
                            }
                        })
                        .collect(),
                )?;
                let d = mp.dim_vector();
                if d.iter().zip(dim).all(|(a, b)| a <= b) {
                    segs.push(((top, len), d));
                }
            }
        }
        let mut out = Vec::new();
        let mut chosen: Vec<(u32, u32)> = Vec::new();
        fn rec(
            rank: u32,
            segs: &[((u32, u32), Vec<u32>)],
            k: usize,
            remaining: &mut Vec<u32>,
            chosen: &mut Vec<(u32, u32)>,
            out: &mut Vec<Multipartition>,
        ) {
            if remaining.iter().all(|&x| x == 0) {
                let mut parts = vec![Vec::new(); rank as usize];
                for &(top, len) in chosen.iter() {
                    parts[top as usize].push(len);
                }
                out.push(
                    Multipartition::new(rank, parts.into_iter().map(Partition::new).collect())
                        .expect("constructed with matching rank"),
                );
                return;
            }
            if k == segs.len() {
                return;
            }
            let (seg, d) = &segs[k];
            let max = remaining
                .iter()
                .zip(d)
                .filter(|&(_, &x)| x > 0)
                .map(|(&r, &x)| r / x)
                .min()
                .unwrap_or(0);
            for count in 0..=max {
                for _ in 0..count {
                    for (r, x) in remaining.iter_mut().zip(d) {
                        *r -= x;
                    }
                    chosen.push(*seg);
                }
                rec(rank, segs, k + 1, remaining, chosen, out);
                for _ in 0..count {
                    for (r, x) in remaining.iter_mut().zip(d) {
                        *r += x;
                    }
                    chosen.pop();
                }
            }
        }
        let mut remaining = dim.to_vec();
        rec(self.rank, &segs, 0, &mut remaining, &mut chosen, &mut out);
        out.sort();
        Ok(out)
    }

    pub fn aperiodic_of_dim(&self, dim: &[u32]) -> Result<Vec<Multipartition>> {
        Ok(self.classes_of_dim(dim)?.into_iter().filter(Multipartition::is_aperiodic).collect())
    }

    /// The aperiodic classes of one weight in the linear extension used
    /// everywhere: endomorphism dimension descending (most degenerate
    /// first), ties broken by the structural order.
    pub fn sorted_aperiodic(&self, dim: &[u32]) -> Result<Vec<Multipartition>> {
        let mut idx = self.aperiodic_of_dim(dim)?;
        idx.sort_by(|a, b| self.end_dim(b).cmp(&self.end_dim(a)).then_with(|| a.cmp(b)));
        Ok(idx)
    }

    /// One weight space of the tube composition algebra, solved: the PBW
    /// elements, the monomial transition matrix, and the canonical basis.
    pub fn block(&self, dim: &[u32]) -> Result<TubeBlock> {
        let indices = self.sorted_aperiodic(dim)?;
        let mut words = Vec::new();
        let mut pbw: Vec<TubeElement> = Vec::new();
        let mut rows: Vec<BTreeMap<Multipartition, RationalFunction>> = Vec::new();
        for (i, pi) in indices.iter().enumerate() {
            let w = self.distinguished_word(pi)?;
            let m = self.monomial(&w)?;
            let filt = self.filtration_poly(&w)?;
            if !filt.get(pi).is_some_and(LaurentPoly::is_one) {
                return Err(HallError::Invariant(format!(
                    "cached word {w} for {pi} lost the unit filtration count"
                )));
            }
            let e_pi = self.end_dim(pi);
            let mut e = m.clone();
            for k in 0..i {
                let la = &indices[k];
                if self.cmp(la, pi) != Some(Ordering::Less) {
                    continue;
                }
                let Some(g) = filt.get(la) else { continue };
                let coeff = RationalFunction::from_laurent(g.shift(e_pi - self.end_dim(la)));
                e = &e - &pbw[k].scale(&coeff);
            }
            self.check_pbw_support(pi, &e, &indices[..i])?;
            pbw.push(e);
            words.push(w);
            // monomial coordinates over the PBW family: the bracket-basis
            // coefficient at an aperiodic class belongs to that class's
            // PBW element alone
            let mut row = BTreeMap::new();
            let mut residual = m;
            for (k, la) in indices.iter().enumerate().take(i + 1) {
                let c = residual.coeff(la);
                if c.is_zero() {
                    continue;
                }
                residual = &residual - &pbw[k].scale(&c);
                row.insert(la.clone(), c);
            }
            if !residual.is_zero() {
                return Err(HallError::Invariant(format!(
                    "monomial for {pi} does not lie in the span of the PBW family: {residual}"
                )));
            }
            rows.push(row);
        }
        let pos: HashMap<&Multipartition, usize> =
            indices.iter().enumerate().map(|(k, p)| (p, k)).collect();
        let data = build_transition(
            &indices,
            |c| Ok(rows[pos[c]].clone()),
            |a, b| self.cmp(a, b),
        )?;
        Ok(TubeBlock { rank: self.rank, dim: dim.to_vec(), indices, words, pbw, data })
    }

    fn check_pbw_support(
        &self,
        pi: &Multipartition,
        e: &TubeElement,
        earlier: &[Multipartition],
    ) -> Result<()> {
        for (la, c) in e.iter() {
            if la == pi {
                if !c.is_one() {
                    return Err(HallError::Invariant(format!(
                        "PBW element of {pi} is not monic: leading coefficient {c}"
                    )));
                }
                continue;
            }
            if la.is_aperiodic() {
                // would be an earlier index; triangularity failed
                let _ = earlier;
                return Err(HallError::Invariant(format!(
                    "PBW element of {pi} has aperiodic support at {la}"
                )));
            }
            if self.cmp(la, pi) != Some(Ordering::Less) {
                return Err(HallError::Invariant(format!(
                    "PBW element of {pi} has support at {la}, not a degeneration of it"
                )));
            }
            let ok = c.as_laurent().map(LaurentPoly::is_integral).unwrap_or(false);
            if !ok {
                return Err(HallError::Invariant(format!(
                    "PBW element of {pi} has non-integral coefficient {c} at {la}"
                )));
            }
        }
        Ok(())
    }
}

/// One solved weight space: aperiodic indices in linear-extension order,
/// their distinguished words, PBW elements in the bracket basis, and the
/// transition matrices.
pub struct TubeBlock {
    pub rank: u32,
    pub dim: Vec<u32>,
    pub indices: Vec<Multipartition>,
    pub words: Vec<Word>,
    pub pbw: Vec<TubeElement>,
    pub data: TransitionData,
}

impl TubeBlock {
    /// JSON with every component of the solved block, so a cached block
    /// restores without touching the oracle.
    pub fn to_json(&self) -> Value {
        json!({
            "rank": self.rank,
            "dim": self.dim,
            "indices": self.indices.iter().map(Multipartition::to_json).collect::<Vec<_>>(),
            "words": self.words.iter().map(Word::to_json).collect::<Vec<_>>(),
            "pbw": self.pbw.iter().map(TubeElement::to_json).collect::<Vec<_>>(),
            "data": self.data.to_json(),
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let rank = value
            .get("rank")
            .and_then(Value::as_u64)
            .ok_or_else(|| HallError::Json("tube block needs a \"rank\" number".into()))?
            as u32;
        let dim = value
            .get("dim")
            .and_then(Value::as_array)
            .ok_or_else(|| HallError::Json("tube block needs a \"dim\" array".into()))?
            .iter()
            .map(|x| {
                x.as_u64()
                    .map(|d| d as u32)
                    .ok_or_else(|| HallError::Json("dimensions must be integers".into()))
            })
            .collect::<Result<Vec<u32>>>()?;
        let list = |name: &str| -> Result<&Vec<Value>> {
            value
                .get(name)
                .and_then(Value::as_array)
                .ok_or_else(|| HallError::Json(format!("tube block needs a {name:?} array")))
        };
        let indices =
            list("indices")?.iter().map(Multipartition::from_json).collect::<Result<Vec<_>>>()?;
        let words = list("words")?.iter().map(Word::from_json).collect::<Result<Vec<_>>>()?;
        let pbw = list("pbw")?.iter().map(TubeElement::from_json).collect::<Result<Vec<_>>>()?;
        let data = TransitionData::from_json(
            value.get("data").ok_or_else(|| HallError::Json("tube block needs \"data\"".into()))?,
        )?;
        if indices.len() != data.size() || words.len() != indices.len() || pbw.len() != indices.len()
        {
            return Err(HallError::Json("tube block components disagree in size".into()));
        }
        Ok(TubeBlock { rank, dim, indices, words, pbw, data })
    }

    /// The canonical elements in the bracket basis, in index order.
    pub fn canonical_elements(&self) -> Vec<TubeElement> {
        self.data
            .zeta
            .iter()
            .map(|row| {
                let mut e = TubeElement::zero(self.rank);
                for (k, z) in row.iter().enumerate() {
                    if z.is_zero() {
                        continue;
                    }
                    let c = RationalFunction::from_laurent(z.clone());
                    e = &e - &self.pbw[k].scale(&(-c));
                }
                e
            })
            .collect()
    }
}
