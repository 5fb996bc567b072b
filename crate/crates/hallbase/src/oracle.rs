//! Finite-field ground truth.
//!
//! Everything here is brute force on purpose: representations of the
//! Kronecker quiver (and of cyclic quivers, for the tube computations) are
//! concrete matrices over a small field, submodules are enumerated subspace
//! by subspace, and Hall numbers are literal counts.  The symbolic side of
//! the crate is validated against these counts; nothing here depends on the
//! straightening rules it is meant to check.
//!
//! Conventions: `hall_number(L, M, N)` counts submodules `W` of `L` with
//! `W = N` and `L/W = M` up to isomorphism, so in the Hall product
//! `u_M u_N = sum_L g^L_{MN} u_L` the left factor is the quotient side.

use crate::error::{HallError, Result};
use crate::gf::Field;
use crate::linalg::{express_in_basis, reduce_modulo, subspaces, subspaces_containing, Mat};
use crate::quantum::SqrtVal;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

/// The two quiver shapes the oracle understands.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Quiver {
    /// Two vertices, two arrows from vertex 1 to vertex 0 (so a dimension
    /// vector `(d1, d2)` puts `d1` at the target vertex).
    Kronecker,
    /// `n` vertices `0..n`, arrows `i -> i+1 mod n`; representations are
    /// required to be nilpotent around the cycle.
    Cyclic(u32),
}

impl Quiver {
    pub fn vertices(&self) -> usize {
        match *self {
            Quiver::Kronecker => 2,
            Quiver::Cyclic(n) => n as usize,
        }
    }

    /// Arrows as `(source, target)` vertex indices.
    pub fn arrows(&self) -> Vec<(usize, usize)> {
        match *self {
            Quiver::Kronecker => vec![(1, 0), (1, 0)],
            Quiver::Cyclic(n) => (0..n as usize).map(|i| (i, (i + 1) % n as usize)).collect(),
        }
    }

    /// Euler form of the quiver: `<a,b> = sum a_i b_i - sum over arrows
    /// a_source b_target`.
    pub fn euler(&self, a: &[u32], b: &[u32]) -> i64 {
        let mut total: i64 = a.iter().zip(b).map(|(&x, &y)| x as i64 * y as i64).sum();
        for (s, t) in self.arrows() {
            total -= a[s] as i64 * b[t] as i64;
        }
        total
    }
}

/// A concrete representation: one matrix per arrow, entries in `F_q`.
#[derive(Clone, Debug)]
pub struct Rep {
    pub quiver: Quiver,
    pub f: Arc<Field>,
    pub dims: Vec<u32>,
    /// `maps[k]` realizes the `k`-th arrow, shape `dims[target] x dims[source]`.
    pub maps: Vec<Mat>,
}

impl Rep {
    pub fn zero(quiver: Quiver, f: Arc<Field>) -> Rep {
        let n = quiver.vertices();
        let maps = quiver
            .arrows()
            .iter()
            .map(|_| Mat::zero(f.clone(), 0, 0))
            .collect();
        Rep { quiver, f, dims: vec![0; n], maps }
    }

    pub fn total_dim(&self) -> u32 {
        self.dims.iter().sum()
    }

    pub fn direct_sum(&self, other: &Rep) -> Rep {
        assert_eq!(self.quiver, other.quiver);
        assert_eq!(self.f.q, other.f.q);
        let dims: Vec<u32> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let maps = self
            .quiver
            .arrows()
            .iter()
            .enumerate()
            .map(|(k, &(s, t))| {
                let (a, b) = (&self.maps[k], &other.maps[k]);
                Mat::from_fn(
                    self.f.clone(),
                    dims[t] as usize,
                    dims[s] as usize,
                    |i, j| {
                        let (rt, ct) = (self.dims[t] as usize, self.dims[s] as usize);
                        if i < rt && j < ct {
                            a.get(i, j)
                        } else if i >= rt && j >= ct {
                            b.get(i - rt, j - ct)
                        } else {
                            0
                        }
                    },
                )
            })
            .collect();
        Rep { quiver: self.quiver, f: self.f.clone(), dims, maps }
    }

    /// For cyclic quivers: is the composite around the cycle nilpotent?
    pub fn is_nilpotent(&self) -> bool {
        match self.quiver {
            Quiver::Kronecker => true,
            Quiver::Cyclic(n) => {
                let d0 = self.dims[0] as usize;
                let mut comp = Mat::identity(self.f.clone(), d0);
                for k in 0..n as usize {
                    comp = self.maps[k].matmul(&comp);
                }
                // comp: V_0 -> V_0; nilpotent iff comp^d0 = 0
                let mut pw = comp.clone();
                for _ in 1..d0 {
                    pw = comp.matmul(&pw);
                }
                d0 == 0 || pw.is_zero()
            }
        }
    }
}

/// `dim Hom(x, y)` by solving the intertwiner equations.
pub fn hom_dim(x: &Rep, y: &Rep) -> usize {
    assert_eq!(x.quiver, y.quiver);
    assert_eq!(x.f.q, y.f.q);
    let f = &x.f;
    let nv = x.quiver.vertices();
    // unknowns: f_v of shape y.dims[v] x x.dims[v], flattened vertex by vertex
    let offsets: Vec<usize> = {
        let mut off = vec![0usize; nv + 1];
        for v in 0..nv {
            off[v + 1] = off[v] + (y.dims[v] * x.dims[v]) as usize;
        }
        off
    };
    let unknowns = offsets[nv];
    if unknowns == 0 {
        return 0;
    }
    let arrows = x.quiver.arrows();
    let total_rows: usize = arrows
        .iter()
        .map(|&(s, t)| (y.dims[t] * x.dims[s]) as usize)
        .sum();
    let mut sys = Mat::zero(f.clone(), total_rows, unknowns);
    let mut row = 0;
    for (k, &(s, t)) in arrows.iter().enumerate() {
        let xa = &x.maps[k];
        let ya = &y.maps[k];
        // equation (i, j): sum_k f_t[i,k] X[k,j] - sum_k Y[i,k] f_s[k,j] = 0
        for i in 0..y.dims[t] as usize {
            for j in 0..x.dims[s] as usize {
                for kk in 0..x.dims[t] as usize {
                    let col = offsets[t] + i * x.dims[t] as usize + kk;
                    let cur = sys.get(row, col);
                    sys.set(row, col, f.add(cur, xa.get(kk, j)));
                }
                for kk in 0..y.dims[s] as usize {
                    let col = offsets[s] + kk * x.dims[s] as usize + j;
                    let cur = sys.get(row, col);
                    sys.set(row, col, f.sub(cur, ya.get(i, kk)));
                }
                row += 1;
            }
        }
    }
    unknowns - sys.rank()
}

/// Label of one indecomposable.
///
/// Kronecker regulars are points of the projective line: `RegFin` carries a
/// monic irreducible polynomial (ascending coefficients, the affine chart)
/// and `RegInf` is the point at infinity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum IndecLabel {
    Prep(u32),
    RegInf { len: u32 },
    RegFin { poly: Vec<u8>, len: u32 },
    Prei(u32),
    /// Cyclic quiver: length-`len` indecomposable with top `S_top`.
    Cyc { top: u32, len: u32 },
}

impl IndecLabel {
    pub fn dim(&self, quiver: Quiver) -> Vec<u32> {
        match (self, quiver) {
            (IndecLabel::Prep(n), Quiver::Kronecker) => vec![n + 1, *n],
            (IndecLabel::Prei(n), Quiver::Kronecker) => vec![*n, n + 1],
            (IndecLabel::RegInf { len }, Quiver::Kronecker) => vec![*len, *len],
            (IndecLabel::RegFin { poly, len }, Quiver::Kronecker) => {
                let m = (poly.len() as u32 - 1) * len;
                vec![m, m]
            }
            (IndecLabel::Cyc { top, len }, Quiver::Cyclic(n)) => {
                let mut d = vec![0u32; n as usize];
                for t in 0..*len {
                    d[((top + t) % n) as usize] += 1;
                }
                d
            }
            _ => panic!("label does not belong to this quiver"),
        }
    }

    /// Degree of the residue division ring of the local endomorphism ring
    /// (`End / rad = F_{q^e}`).
    pub fn residue_degree(&self) -> u32 {
        match self {
            IndecLabel::RegFin { poly, .. } => poly.len() as u32 - 1,
            _ => 1,
        }
    }

    pub fn build(&self, quiver: Quiver, f: &Arc<Field>) -> Rep {
        match (self, quiver) {
            (IndecLabel::Prep(n), Quiver::Kronecker) => {
                let n = *n as usize;
                let a = Mat::from_fn(f.clone(), n + 1, n, |i, j| u8::from(i == j));
                let b = Mat::from_fn(f.clone(), n + 1, n, |i, j| u8::from(i == j + 1));
                Rep { quiver, f: f.clone(), dims: vec![n as u32 + 1, n as u32], maps: vec![a, b] }
            }
            (IndecLabel::Prei(n), Quiver::Kronecker) => {
                let n = *n as usize;
                let a = Mat::from_fn(f.clone(), n, n + 1, |i, j| u8::from(i == j));
                let b = Mat::from_fn(f.clone(), n, n + 1, |i, j| u8::from(i + 1 == j));
                Rep { quiver, f: f.clone(), dims: vec![n as u32, n as u32 + 1], maps: vec![a, b] }
            }
            (IndecLabel::RegInf { len }, Quiver::Kronecker) => {
                let l = *len as usize;
                let a = Mat::from_fn(f.clone(), l, l, |i, j| u8::from(i == j + 1));
                let b = Mat::identity(f.clone(), l);
                Rep { quiver, f: f.clone(), dims: vec![l as u32, l as u32], maps: vec![a, b] }
            }
            (IndecLabel::RegFin { poly, len }, Quiver::Kronecker) => {
                // A = identity, B = companion matrix of poly^len
                let pl = poly_power(f, poly, *len);
                let m = pl.len() - 1;
                let mut b = Mat::zero(f.clone(), m, m);
                for j in 0..m - 1 {
                    b.set(j + 1, j, 1);
                }
                for i in 0..m {
                    b.set(i, m - 1, f.neg(pl[i]));
                }
                let a = Mat::identity(f.clone(), m);
                Rep { quiver, f: f.clone(), dims: vec![m as u32, m as u32], maps: vec![a, b] }
            }
            (IndecLabel::Cyc { top, len }, Quiver::Cyclic(n)) => {
                let dims = self.dim(quiver);
                // basis at vertex v: path positions t with (top+t) % n == v, ascending
                let pos_at: Vec<Vec<u32>> = (0..n)
                    .map(|v| (0..*len).filter(|t| (top + t) % n == v).collect())
                    .collect();
                let maps = (0..n as usize)
                    .map(|v| {
                        let w = (v + 1) % n as usize;
                        let mut m =
                            Mat::zero(f.clone(), dims[w] as usize, dims[v] as usize);
                        for (col, &t) in pos_at[v].iter().enumerate() {
                            if t + 1 < *len {
                                let row = pos_at[w].iter().position(|&u| u == t + 1).unwrap();
                                m.set(row, col, 1);
                            }
                        }
                        m
                    })
                    .collect();
                Rep { quiver, f: f.clone(), dims, maps }
            }
            _ => panic!("label does not belong to this quiver"),
        }
    }
}

fn poly_power(f: &Arc<Field>, poly: &[u8], len: u32) -> Vec<u8> {
    let mut acc = vec![1u8];
    for _ in 0..len {
        let mut next = vec![0u8; acc.len() + poly.len() - 1];
        for (i, &a) in acc.iter().enumerate() {
            for (j, &b) in poly.iter().enumerate() {
                next[i + j] = f.add(next[i + j], f.mul(a, b));
            }
        }
        acc = next;
    }
    acc
}

/// Multiset of indecomposable labels: the isomorphism class of a module.
pub type ClassLabel = BTreeMap<IndecLabel, u32>;

/// Pretty name for a class, e.g. `P0 + R(x+1;2) + I1`.
pub fn label_name(label: &ClassLabel) -> String {
    if label.is_empty() {
        return "0".into();
    }
    let one = |l: &IndecLabel| -> String {
        match l {
            IndecLabel::Prep(n) => format!("P{n}"),
            IndecLabel::Prei(n) => format!("I{n}"),
            IndecLabel::RegInf { len } => format!("R(inf;{len})"),
            IndecLabel::RegFin { poly, len } => {
                let mut terms = Vec::new();
                for (e, &c) in poly.iter().enumerate().rev() {
                    if c == 0 {
                        continue;
                    }
                    let coeff = if c == 1 && e > 0 { String::new() } else { c.to_string() };
                    match e {
                        0 => terms.push(coeff),
                        1 => terms.push(format!("{coeff}x")),
                        _ => terms.push(format!("{coeff}x^{e}")),
                    }
                }
                format!("R({};{len})", terms.join("+"))
            }
            IndecLabel::Cyc { top, len } => format!("S{top}[{len}]"),
        }
    };
    label
        .iter()
        .map(|(l, &m)| if m == 1 { one(l) } else { format!("{}^{m}", one(l)) })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// One isomorphism class with its model representation and invariants.
pub struct ClassInfo {
    pub label: ClassLabel,
    pub rep: Rep,
    pub end_dim: u32,
    pub aut: BigUint,
    pub fingerprint: Vec<u32>,
}

/// All isomorphism classes of one dimension vector over one field, with a
/// fingerprint table for classifying arbitrary representations.
pub struct ClassTable {
    pub quiver: Quiver,
    pub f: Arc<Field>,
    pub dims: Vec<u32>,
    pub classes: Vec<ClassInfo>,
    test_set: Vec<Rep>,
    // a small subset of test indices that already separates all classes;
    // classify_rep only solves Hom systems against these
    key_idx: Vec<usize>,
    by_key: HashMap<Vec<u32>, usize>,
}

impl ClassTable {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Index of the class whose label is `label`.
    pub fn find_label(&self, label: &ClassLabel) -> Option<usize> {
        self.classes.iter().position(|c| &c.label == label)
    }

    /// Classify an arbitrary representation of the table's dimension vector.
    pub fn classify_rep(&self, rep: &Rep) -> Result<usize> {
        let fp: Vec<u32> =
            self.key_idx.iter().map(|&i| hom_dim(&self.test_set[i], rep) as u32).collect();
        self.by_key.get(&fp).copied().ok_or_else(|| {
            HallError::Invariant(format!(
                "representation of dimension {:?} matches no isomorphism class",
                rep.dims
            ))
        })
    }

    /// Classes whose modules are regular (Kronecker: no preprojective or
    /// preinjective summands).
    pub fn regular_classes(&self) -> Vec<usize> {
        self.classes
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                c.label.keys().all(|l| {
                    matches!(l, IndecLabel::RegInf { .. } | IndecLabel::RegFin { .. })
                })
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// `|GL_d(F_Q)| = prod (Q^d - Q^i)`.
pub fn gl_order(d: u32, q_pow: &BigUint) -> BigUint {
    let qd = pow_big(q_pow, d);
    let mut acc = BigUint::one();
    let mut qi = BigUint::one();
    for _ in 0..d {
        acc *= &qd - &qi;
        qi *= q_pow;
    }
    acc
}

fn pow_big(b: &BigUint, e: u32) -> BigUint {
    let mut acc = BigUint::one();
    for _ in 0..e {
        acc *= b;
    }
    acc
}

/// `|Aut M|` from the class label: `q^(dim End - sum m_i^2 e_i) * prod
/// |GL_{m_i}(F_{q^{e_i}})|`.
pub fn aut_order_from_label(label: &ClassLabel, end_dim: u32, q: u64) -> BigUint {
    let qb = BigUint::from(q);
    let mut exp = end_dim as i64;
    let mut acc = BigUint::one();
    for (l, &m) in label {
        let e = l.residue_degree();
        exp -= (m as i64) * (m as i64) * e as i64;
        acc *= gl_order(m, &pow_big(&qb, e));
    }
    assert!(exp >= 0, "radical exponent must be nonnegative");
    acc * pow_big(&qb, exp as u32)
}

/// Automorphism order as a polynomial in the field size, for classes whose
/// label is field independent (all of ours are, once the multiset of residue
/// degrees and lengths is fixed).  The variable of the returned polynomial
/// is the field size, not `v`.
pub fn aut_order_poly(label: &ClassLabel, end_dim: u32) -> crate::laurent::LaurentPoly {
    use crate::laurent::{rat, LaurentPoly};
    let mut exp = end_dim as i64;
    let mut acc = LaurentPoly::one();
    for (l, &m) in label {
        let e = l.residue_degree() as i64;
        exp -= (m as i64) * (m as i64) * e;
        // |GL_m(Q^e)| = prod_{i<m} (Q^(e m) - Q^(e i))
        for i in 0..m as i64 {
            let term = LaurentPoly::term(e * m as i64, rat(1)) - LaurentPoly::term(e * i, rat(1));
            acc = &acc * &term;
        }
    }
    assert!(exp >= 0);
    acc.shift(exp)
}

/// Map `(quotient class, submodule class) -> count` for the submodules of a
/// fixed `L` with a fixed submodule dimension vector.
pub type SplitMap = HashMap<(usize, usize), u64>;

/// The oracle: caches class tables and submodule counts, enforces budgets.
pub struct Oracle {
    budget: u64,
    tables: Mutex<HashMap<(Quiver, Vec<u32>, u64), Arc<ClassTable>>>,
    splits: Mutex<HashMap<(Quiver, Vec<u32>, u64, usize, Vec<u32>), Arc<SplitMap>>>,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle::new(1 << 20)
    }
}

impl Oracle {
    pub fn new(budget: u64) -> Self {
        Oracle {
            budget,
            tables: Mutex::new(HashMap::new()),
            splits: Mutex::new(HashMap::new()),
        }
    }

    /// The class table for one dimension vector, built on first use.
    ///
    /// Construction is synthetic (Krull-Schmidt multisets of indecomposable
    /// models) and is certified two ways: Hom fingerprints must distinguish
    /// all classes, and for the Kronecker quiver the orbit sizes must sum to
    /// the number of points of the representation variety.
    pub fn table(&self, quiver: Quiver, dims: &[u32], q: u64) -> Result<Arc<ClassTable>> {
        let key = (quiver, dims.to_vec(), q);
        if let Some(t) = self.tables.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let table = Arc::new(build_table(quiver, dims, q)?);
        self.tables.lock().unwrap().insert(key, table.clone());
        Ok(table)
    }

    /// Submodule splittings of class `l_idx` (of dimension `dims`) by
    /// submodule dimension `sub_dims`: map `(quotient, sub) -> count`.
    pub fn splits(
        &self,
        quiver: Quiver,
        dims: &[u32],
        q: u64,
        l_idx: usize,
        sub_dims: &[u32],
    ) -> Result<Arc<SplitMap>> {
        let key = (quiver, dims.to_vec(), q, l_idx, sub_dims.to_vec());
        if let Some(s) = self.splits.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let table = self.table(quiver, dims, q)?;
        let quot_dims: Vec<u32> = dims.iter().zip(sub_dims).map(|(a, b)| a - b).collect();
        let sub_table = self.table(quiver, sub_dims, q)?;
        let quot_table = self.table(quiver, &quot_dims, q)?;
        let map = enumerate_splits(
            &table.classes[l_idx].rep,
            sub_dims,
            &sub_table,
            &quot_table,
            self.budget,
        )?;
        let arc = Arc::new(map);
        self.splits.lock().unwrap().insert(key, arc.clone());
        Ok(arc)
    }

    /// `g^L_{MN}`: submodules of `L` isomorphic to `N` with quotient `M`.
    pub fn hall_number(
        &self,
        quiver: Quiver,
        q: u64,
        l: (&[u32], usize),
        m: (&[u32], usize),
        n: (&[u32], usize),
    ) -> Result<u64> {
        let sum: Vec<u32> = m.0.iter().zip(n.0).map(|(a, b)| a + b).collect();
        if sum.as_slice() != l.0 {
            return Err(HallError::Usage(
                "hall_number: dim M + dim N must equal dim L".into(),
            ));
        }
        let map = self.splits(quiver, l.0, q, l.1, n.0)?;
        Ok(map.get(&(m.1, n.1)).copied().unwrap_or(0))
    }
}

fn build_table(quiver: Quiver, dims: &[u32], q: u64) -> Result<ClassTable> {
    let f = Field::new(q)?;
    let indecs = indec_labels_within(quiver, dims, &f);
    // all multisets of indecomposables with total dimension = dims
    let mut labels = Vec::new();
    let mut current: Vec<(IndecLabel, u32)> = Vec::new();
    enumerate_multisets(quiver, &indecs, 0, dims.to_vec(), &mut current, &mut labels);
    labels.sort();

    let test_set: Vec<Rep> = indecs.iter().map(|l| l.build(quiver, &f)).collect();
    let mut classes: Vec<ClassInfo> = Vec::with_capacity(labels.len());
    let mut by_fingerprint = HashMap::new();
    for label in labels {
        let mut rep = Rep::zero(quiver, f.clone());
        for (l, &m) in &label {
            let model = l.build(quiver, &f);
            for _ in 0..m {
                rep = rep.direct_sum(&model);
            }
        }
        debug_assert!(rep.is_nilpotent());
        let fingerprint: Vec<u32> = test_set.iter().map(|t| hom_dim(t, &rep) as u32).collect();
        let end_dim = hom_dim(&rep, &rep) as u32;
        let aut = aut_order_from_label(&label, end_dim, q);
        let idx = classes.len();
        if let Some(other) = by_fingerprint.insert(fingerprint.clone(), idx) {
            return Err(HallError::Invariant(format!(
                "Hom fingerprints fail to distinguish classes {} and {} of dimension {:?} over F_{}",
                label_name(&label),
                label_name(&classes[other].label),
                dims,
                q
            )));
        }
        classes.push(ClassInfo { label, rep, end_dim, aut, fingerprint });
    }

    // completeness certificate for the Kronecker quiver: orbits partition
    // the representation variety, so sum |G| / |Aut| = q^(2 d1 d2)
    if quiver == Quiver::Kronecker {
        let qb = BigUint::from(q);
        let g_order = gl_order(dims[0], &qb) * gl_order(dims[1], &qb);
        let mut mass = BigUint::zero();
        for c in &classes {
            let (orbit, rem) = num_integer::Integer::div_rem(&g_order, &c.aut);
            if !rem.is_zero() {
                return Err(HallError::Invariant(format!(
                    "automorphism count of {} does not divide the group order",
                    label_name(&c.label)
                )));
            }
            mass += orbit;
        }
        let expected = pow_big(&qb, 2 * dims[0] * dims[1]);
        if mass != expected {
            return Err(HallError::Invariant(format!(
                "class list of dimension {:?} over F_{} is not complete: mass {} != {}",
                dims, q, mass, expected
            )));
        }
    }

    // greedy separating subset of the test set, cheapest Hom systems first:
    // refine the one-block partition until every class sits alone
    let mut order: Vec<usize> = (0..test_set.len()).collect();
    order.sort_by_key(|&i| test_set[i].total_dim());
    let mut key_idx = Vec::new();
    let mut parts: Vec<Vec<usize>> = vec![(0..classes.len()).collect()];
    for t in order {
        if parts.iter().all(|p| p.len() == 1) {
            break;
        }
        let mut next = Vec::with_capacity(parts.len());
        let mut split_any = false;
        for p in &parts {
            if p.len() == 1 {
                next.push(p.clone());
                continue;
            }
            let mut by_val: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for &c in p {
                by_val.entry(classes[c].fingerprint[t]).or_default().push(c);
            }
            if by_val.len() > 1 {
                split_any = true;
            }
            next.extend(by_val.into_values());
        }
        if split_any {
            key_idx.push(t);
            parts = next;
        }
    }
    // full fingerprints are pairwise distinct, so exhausting the test set
    // always reaches singletons
    debug_assert!(parts.iter().all(|p| p.len() == 1));
    let by_key: HashMap<Vec<u32>, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (key_idx.iter().map(|&t| c.fingerprint[t]).collect(), i))
        .collect();

    Ok(ClassTable { quiver, f, dims: dims.to_vec(), classes, test_set, key_idx, by_key })
}

/// Indecomposable labels whose dimension vector fits componentwise in `dims`.
fn indec_labels_within(quiver: Quiver, dims: &[u32], f: &Arc<Field>) -> Vec<IndecLabel> {
    let mut out = Vec::new();
    match quiver {
        Quiver::Kronecker => {
            let (d1, d2) = (dims[0], dims[1]);
            let mut n = 0;
            while n + 1 <= d1 && n <= d2 {
                out.push(IndecLabel::Prep(n));
                n += 1;
            }
            let rmax = d1.min(d2);
            for l in 1..=rmax {
                out.push(IndecLabel::RegInf { len: l });
            }
            for e in 1..=rmax {
                for poly in f.monic_irreducibles(e) {
                    for l in 1..=rmax / e {
                        out.push(IndecLabel::RegFin { poly: poly.clone(), len: l });
                    }
                }
            }
            let mut n = 0;
            while n <= d1 && n + 1 <= d2 {
                out.push(IndecLabel::Prei(n));
                n += 1;
            }
        }
        Quiver::Cyclic(nv) => {
            let total: u32 = dims.iter().sum();
            for top in 0..nv {
                for len in 1..=total {
                    let l = IndecLabel::Cyc { top, len };
                    if l.dim(quiver).iter().zip(dims).all(|(a, b)| a <= b) {
                        out.push(l);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

fn enumerate_multisets(
    quiver: Quiver,
    indecs: &[IndecLabel],
    from: usize,
    remaining: Vec<u32>,
    current: &mut Vec<(IndecLabel, u32)>,
    out: &mut Vec<ClassLabel>,
) {
    if remaining.iter().all(|&d| d == 0) {
        out.push(current.iter().cloned().collect());
        return;
    }
    for i in from..indecs.len() {
        let d = indecs[i].dim(quiver);
        if d.iter().zip(&remaining).all(|(a, b)| a <= b) {
            let next: Vec<u32> = remaining.iter().zip(&d).map(|(r, x)| r - x).collect();
            match current.last_mut() {
                Some((l, m)) if *l == indecs[i] => *m += 1,
                _ => current.push((indecs[i].clone(), 1)),
            }
            enumerate_multisets(quiver, indecs, i, next, current, out);
            match current.last_mut() {
                Some((_, m)) if *m > 1 => *m -= 1,
                _ => {
                    current.pop();
                }
            }
        }
    }
}

/// Enumerate all submodules of `l_rep` with dimension vector `sub_dims`,
/// classify each submodule and quotient, and tally.
fn enumerate_splits(
    l_rep: &Rep,
    sub_dims: &[u32],
    sub_table: &ClassTable,
    quot_table: &ClassTable,
    budget: u64,
) -> Result<SplitMap> {
    let mut out = SplitMap::new();
    enumerate_splits_by(l_rep, sub_dims, budget, &mut |sub, quot| {
        let sidx = sub_table.classify_rep(sub)?;
        let qidx = quot_table.classify_rep(quot)?;
        *out.entry((qidx, sidx)).or_insert(0) += 1;
        Ok(())
    })?;
    Ok(out)
}

/// Core submodule walk: calls `visit(sub, quot)` once per stable subspace
/// tuple.  The budget caps the number of subspace candidates examined, which
/// the pruning usually keeps far below the hypothetical product of
/// per-vertex subspace counts.
pub fn enumerate_splits_by(
    l_rep: &Rep,
    sub_dims: &[u32],
    budget: u64,
    visit: &mut impl FnMut(&Rep, &Rep) -> Result<()>,
) -> Result<()> {
    let quiver = l_rep.quiver;
    let nv = quiver.vertices();
    let arrows = quiver.arrows();

    for v in 0..nv {
        if sub_dims[v] > l_rep.dims[v] {
            return Ok(());
        }
    }

    // order of processing: vertex 0 has no incoming arrow from an earlier
    // vertex for cyclic quivers; for Kronecker process the source vertex 1
    // first so the target can be constrained
    let order: Vec<usize> = match quiver {
        Quiver::Kronecker => vec![1, 0],
        Quiver::Cyclic(n) => (0..n as usize).collect(),
    };

    let mut visited = 0u64;
    let mut chosen: Vec<Option<Mat>> = vec![None; nv];
    choose_vertex(
        l_rep,
        sub_dims,
        &order,
        0,
        &mut chosen,
        &arrows,
        budget,
        &mut visited,
        &mut |ws| {
            let (sub, quot) = split_rep(l_rep, ws);
            visit(&sub, &quot)
        },
    )
}

#[allow(clippy::too_many_arguments)]
fn choose_vertex(
    l_rep: &Rep,
    sub_dims: &[u32],
    order: &[usize],
    pos: usize,
    chosen: &mut Vec<Option<Mat>>,
    arrows: &[(usize, usize)],
    budget: u64,
    visited: &mut u64,
    emit: &mut impl FnMut(&[Option<Mat>]) -> Result<()>,
) -> Result<()> {
    if pos == order.len() {
        // verify arrows whose source was chosen after their target
        for (k, &(s, t)) in arrows.iter().enumerate() {
            let sp = order.iter().position(|&v| v == s).unwrap();
            let tp = order.iter().position(|&v| v == t).unwrap();
            if sp >= tp {
                let ws = chosen[s].as_ref().unwrap();
                let wt = chosen[t].as_ref().unwrap();
                let mut wt_r = wt.clone();
                let piv = wt_r.rref_in_place();
                for i in 0..ws.rows {
                    let img = l_rep.maps[k].apply(ws.row(i));
                    if !crate::linalg::contains_vector(&wt_r, &piv, &img) {
                        return Ok(());
                    }
                }
            }
        }
        return emit(chosen);
    }
    let v = order[pos];
    let n = l_rep.dims[v] as usize;
    let k = sub_dims[v] as usize;
    // lower bound: images of already-chosen source spaces along arrows into v
    let mut lower_rows: Vec<Vec<u8>> = Vec::new();
    for (a, &(s, t)) in arrows.iter().enumerate() {
        if t == v {
            if let Some(ws) = &chosen[s] {
                for i in 0..ws.rows {
                    lower_rows.push(l_rep.maps[a].apply(ws.row(i)));
                }
            }
        }
    }
    let lower = Mat::from_rows(l_rep.f.clone(), lower_rows, n).row_space();
    if lower.rows > k {
        return Ok(());
    }
    let candidates = if lower.rows == 0 {
        subspaces(&l_rep.f, n, k)
    } else {
        subspaces_containing(&lower, k)
    };
    *visited += candidates.len() as u64;
    if *visited > budget {
        return Err(HallError::Budget(format!(
            "submodule enumeration exceeded the budget of {budget} subspace candidates"
        )));
    }
    for w in candidates {
        chosen[v] = Some(w);
        choose_vertex(
            l_rep, sub_dims, order, pos + 1, chosen, arrows, budget, visited, emit,
        )?;
    }
    chosen[v] = None;
    Ok(())
}

/// Build the submodule and quotient representations for a chosen tuple of
/// subspaces (each an RREF basis).
fn split_rep(l_rep: &Rep, ws: &[Option<Mat>]) -> (Rep, Rep) {
    let quiver = l_rep.quiver;
    let f = &l_rep.f;
    let nv = quiver.vertices();
    let arrows = quiver.arrows();

    let bases: Vec<&Mat> = ws.iter().map(|w| w.as_ref().unwrap()).collect();
    let mut pivots = Vec::with_capacity(nv);
    for b in &bases {
        let mut c = (*b).clone();
        let p = c.rref_in_place();
        pivots.push(p);
    }
    let sub_dims: Vec<u32> = bases.iter().map(|b| b.rows as u32).collect();
    let quot_dims: Vec<u32> = (0..nv)
        .map(|v| l_rep.dims[v] - sub_dims[v])
        .collect();

    let mut sub_maps = Vec::with_capacity(arrows.len());
    let mut quot_maps = Vec::with_capacity(arrows.len());
    for (k, &(s, t)) in arrows.iter().enumerate() {
        let x = &l_rep.maps[k];
        // submodule: express images of the sub-basis of V_s in the sub-basis of V_t
        let img_cols = Mat::from_fn(
            f.clone(),
            l_rep.dims[t] as usize,
            sub_dims[s] as usize,
            |i, j| {
                let col = x.apply(bases[s].row(j));
                col[i]
            },
        );
        sub_maps.push(express_in_basis(&img_cols, bases[t]));
        // quotient: non-pivot coordinates are the quotient basis
        let co_s: Vec<usize> = (0..l_rep.dims[s] as usize)
            .filter(|c| !pivots[s].contains(c))
            .collect();
        let co_t: Vec<usize> = (0..l_rep.dims[t] as usize)
            .filter(|c| !pivots[t].contains(c))
            .collect();
        let mut qm = Mat::zero(f.clone(), quot_dims[t] as usize, quot_dims[s] as usize);
        for (col, &cs) in co_s.iter().enumerate() {
            let mut e = vec![0u8; l_rep.dims[s] as usize];
            e[cs] = 1;
            let mut y = x.apply(&e);
            reduce_modulo(&mut y, bases[t], &pivots[t]);
            for (row, &ct) in co_t.iter().enumerate() {
                qm.set(row, col, y[ct]);
            }
        }
        quot_maps.push(qm);
    }
    let sub = Rep { quiver, f: f.clone(), dims: sub_dims, maps: sub_maps };
    let quot = Rep { quiver, f: f.clone(), dims: quot_dims, maps: quot_maps };
    (sub, quot)
}

/// Count submodules whose sub and quotient both have trivial endomorphism
/// rings.  At a real-root dimension vector the exceptional module is the
/// unique indecomposable and the only class with `dim End = 1` (every
/// decomposable of that dimension has extra endomorphisms), so when both
/// `sub_dims` and the complementary dimension are real roots this counts
/// exactly the Hall number of the corresponding exceptional pair.
pub fn count_exceptional_splits(l_rep: &Rep, sub_dims: &[u32], budget: u64) -> Result<u64> {
    let mut count = 0u64;
    enumerate_splits_by(l_rep, sub_dims, budget, &mut |sub, quot| {
        if hom_dim(sub, sub) == 1 && hom_dim(quot, quot) == 1 {
            count += 1;
        }
        Ok(())
    })?;
    Ok(count)
}

impl Oracle {
    /// The Hall number `g^{P_x + P_y}_{P_a, P_b}` (quotient `P_a`, submodule
    /// `P_b`) as a polynomial in the field size, interpolated from exact
    /// counts.  The degree is bounded by `dim End (P_x + P_y)`; two extra
    /// sample points double-check the bound.
    pub fn prep_pair_hall_poly(
        &self,
        l_parts: (u32, u32),
        quot: u32,
        sub: u32,
    ) -> Result<crate::laurent::LaurentPoly> {
        let (x, y) = l_parts;
        let dl = [x + y + 2, x + y];
        if quot + sub != x + y {
            return Err(HallError::Usage(
                "prep_pair_hall_poly: weight of quotient + sub must match L".into(),
            ));
        }
        // dim End (P_x + P_y) = 2 + dim Hom(P_x, P_y) + dim Hom(P_y, P_x)
        let hom = |a: u32, b: u32| (b as i64 - a as i64 + 1).max(0) as usize;
        let deg = 2 + hom(x, y) + hom(y, x);
        let points: Vec<(u64, num_bigint::BigInt)> = crate::gf::SUPPORTED_Q
            .iter()
            .take(deg + 3)
            .map(|&q| {
                let f = Field::new(q)?;
                let l = IndecLabel::Prep(x)
                    .build(Quiver::Kronecker, &f)
                    .direct_sum(&IndecLabel::Prep(y).build(Quiver::Kronecker, &f));
                debug_assert_eq!(l.dims, dl);
                let g = count_exceptional_splits(&l, &[sub + 1, sub], self.budget)?;
                Ok((q, num_bigint::BigInt::from(g)))
            })
            .collect::<Result<_>>()?;
        crate::interp::fit_int_poly(&points, deg)
    }
}

/// A vector in the specialized Hall algebra at one field size: a linear
/// combination of isomorphism classes with coefficients in `Q(sqrt(q))`.
/// Keys are `(dimension vector, class index)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UVec {
    pub quiver: Quiver,
    pub q: u64,
    pub terms: BTreeMap<(Vec<u32>, usize), SqrtVal>,
}

impl UVec {
    pub fn zero(quiver: Quiver, q: u64) -> Self {
        UVec { quiver, q, terms: BTreeMap::new() }
    }

    pub fn single(quiver: Quiver, q: u64, dims: Vec<u32>, idx: usize, c: SqrtVal) -> Self {
        let mut v = UVec::zero(quiver, q);
        v.add_term(dims, idx, &c);
        v
    }

    pub fn add_term(&mut self, dims: Vec<u32>, idx: usize, c: &SqrtVal) {
        if c.is_zero() {
            return;
        }
        let key = (dims, idx);
        let cur = self
            .terms
            .get(&key)
            .cloned()
            .unwrap_or_else(|| SqrtVal::zero(self.q));
        let next = cur.add(c);
        if next.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, next);
        }
    }

    pub fn add(&self, other: &UVec) -> UVec {
        let mut out = self.clone();
        for ((d, i), c) in &other.terms {
            out.add_term(d.clone(), *i, c);
        }
        out
    }

    pub fn sub(&self, other: &UVec) -> UVec {
        let mut out = self.clone();
        for ((d, i), c) in &other.terms {
            out.add_term(d.clone(), *i, &SqrtVal::zero(self.q).sub(c));
        }
        out
    }

    pub fn scale(&self, c: &SqrtVal) -> UVec {
        let mut out = UVec::zero(self.quiver, self.q);
        for ((d, i), a) in &self.terms {
            out.add_term(d.clone(), *i, &a.mul(c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Keep only terms whose class satisfies the predicate (e.g. the
    /// projection onto the span of regular classes).
    pub fn filter_classes(
        &self,
        oracle: &Oracle,
        mut keep: impl FnMut(&ClassInfo) -> bool,
    ) -> Result<UVec> {
        let mut out = UVec::zero(self.quiver, self.q);
        for ((d, i), c) in &self.terms {
            let table = oracle.table(self.quiver, d, self.q)?;
            if keep(&table.classes[*i]) {
                out.add_term(d.clone(), *i, c);
            }
        }
        Ok(out)
    }
}

impl Oracle {
    /// Hall product of two class vectors.  With `twisted` the product picks
    /// up `v^<dim M, dim N>` per term pair (`v = sqrt(q)`), giving the
    /// twisted algebra; without it this is the plain counting product.
    pub fn umul(&self, x: &UVec, y: &UVec, twisted: bool) -> Result<UVec> {
        assert_eq!(x.quiver, y.quiver);
        assert_eq!(x.q, y.q);
        let quiver = x.quiver;
        let q = x.q;
        let mut out = UVec::zero(quiver, q);
        for ((dm, mi), cm) in &x.terms {
            for ((dn, ni), cn) in &y.terms {
                let mut coeff = cm.mul(cn);
                if twisted {
                    let e = quiver.euler(dm, dn);
                    coeff = coeff.mul(&crate::quantum::v_power(e, q));
                }
                let dl: Vec<u32> = dm.iter().zip(dn).map(|(a, b)| a + b).collect();
                let l_table = self.table(quiver, &dl, q)?;
                for l_idx in 0..l_table.len() {
                    let splits = self.splits(quiver, &dl, q, l_idx, dn)?;
                    if let Some(&g) = splits.get(&(*mi, *ni)) {
                        let gval = SqrtVal::from_int(q, &g.into());
                        out.add_term(dl.clone(), l_idx, &coeff.mul(&gval));
                    }
                }
            }
        }
        Ok(out)
    }

    /// The class vector of a single class with coefficient 1.
    pub fn u_class(&self, quiver: Quiver, q: u64, dims: &[u32], idx: usize) -> UVec {
        UVec::single(quiver, q, dims.to_vec(), idx, SqrtVal::one(q))
    }

    /// `<M> = v^(-dim M + dim End M) u_M` for the class `idx`.
    pub fn bracket_class(
        &self,
        quiver: Quiver,
        q: u64,
        dims: &[u32],
        idx: usize,
    ) -> Result<UVec> {
        let table = self.table(quiver, dims, q)?;
        let c = &table.classes[idx];
        let e = c.end_dim as i64 - c.rep.total_dim() as i64;
        Ok(UVec::single(
            quiver,
            q,
            dims.to_vec(),
            idx,
            crate::quantum::v_power(e, q),
        ))
    }

    /// `<M>` for the module with the given label.
    pub fn bracket_label(&self, q: u64, label: &ClassLabel, quiver: Quiver) -> Result<UVec> {
        let mut dims = vec![0u32; quiver.vertices()];
        for (l, &m) in label {
            for (v, d) in l.dim(quiver).iter().enumerate() {
                dims[v] += d * m;
            }
        }
        let table = self.table(quiver, &dims, q)?;
        let idx = table.find_label(label).ok_or_else(|| {
            HallError::Invariant(format!("class {} missing from its table", label_name(label)))
        })?;
        self.bracket_class(quiver, q, &dims, idx)
    }

    /// `E_{k delta}` specialized: `v^(-2k)` times the sum of all regular
    /// classes of dimension `(k, k)`.
    pub fn e_delta_uvec(&self, k: u32, q: u64) -> Result<UVec> {
        let table = self.table(Quiver::Kronecker, &[k, k], q)?;
        let mut out = UVec::zero(Quiver::Kronecker, q);
        let c = crate::quantum::v_power(-2 * k as i64, q);
        for idx in table.regular_classes() {
            out.add_term(vec![k, k], idx, &c);
        }
        Ok(out)
    }

    /// `R_{k delta}`: the plain sum of all regular classes of weight `(k,k)`.
    pub fn r_delta_uvec(&self, k: u32, q: u64) -> Result<UVec> {
        let table = self.table(Quiver::Kronecker, &[k, k], q)?;
        let mut out = UVec::zero(Quiver::Kronecker, q);
        for idx in table.regular_classes() {
            out.add_term(vec![k, k], idx, &SqrtVal::one(q));
        }
        Ok(out)
    }

    /// The specialization of a PBW basis element at `v = sqrt(q)`: the
    /// preprojective block is a single bracketed class, each imaginary part
    /// expands through `E_{k delta}`, the preinjective block is again a
    /// single class, and the blocks multiply in the twisted algebra.
    pub fn specialize_index(&self, c: &crate::kronecker::PBWIndex, q: u64) -> Result<UVec> {
        let quiver = Quiver::Kronecker;
        let mut acc: Option<UVec> = None;
        let push = |x: UVec, acc: &mut Option<UVec>| -> Result<()> {
            *acc = Some(match acc.take() {
                None => x,
                Some(a) => self.umul(&a, &x, true)?,
            });
            Ok(())
        };
        if !c.prep.is_empty() {
            let label: ClassLabel =
                c.prep.iter().map(|(&n, &m)| (IndecLabel::Prep(n), m)).collect();
            push(self.bracket_label(q, &label, quiver)?, &mut acc)?;
        }
        for &k in c.im.parts() {
            push(self.e_delta_uvec(k, q)?, &mut acc)?;
        }
        if !c.prei.is_empty() {
            let label: ClassLabel =
                c.prei.iter().map(|(&n, &m)| (IndecLabel::Prei(n), m)).collect();
            push(self.bracket_label(q, &label, quiver)?, &mut acc)?;
        }
        Ok(acc.unwrap_or_else(|| {
            UVec::single(quiver, q, vec![0, 0], 0, SqrtVal::one(q))
        }))
    }

    /// Specialize a whole element: coefficients at `v = sqrt(q)`, indices as
    /// in `specialize_index`.
    pub fn specialize_element(
        &self,
        x: &crate::element::AlgebraElement,
        q: u64,
    ) -> Result<UVec> {
        let mut out = UVec::zero(Quiver::Kronecker, q);
        for (idx, coeff) in x.iter() {
            let c = crate::quantum::specialize_sqrt(coeff, q)?;
            let spec = self.specialize_index(idx, q)?;
            out = out.add(&spec.scale(&c));
        }
        Ok(out)
    }
}
