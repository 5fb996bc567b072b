//! Canonical bases via bar-invariant monomials.
//!
//! Take a weight space with PBW basis `{E^c}` and the attached monomial
//! family `{m^c}` (ordered products of divided generator powers, hence
//! fixed by the bar involution).  Writing `m^c = sum_{c'} H^c_{c'} E^{c'}`
//! gives a unitriangular matrix `H` over `Z[v, v^{-1}]` with respect to the
//! degeneration order on indices.  The bar involution then acts on PBW
//! coordinates through `Omega = bar(H)^{-1} H`, and the canonical basis is
//! the unique unitriangular `zeta` with strictly lower entries in
//! `v^{-1} Z[v^{-1}]` satisfying `zeta = bar(zeta) Omega` (row convention).
//!
//! The solver is shared: the tube and the orthogonalized families feed it
//! their own index sets, expansions and partial orders.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Display;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::element::AlgebraElement;
use crate::error::{HallError, Result};
use crate::kronecker::{enumerate_indices, geometric_cmp, Dim, PBWIndex};
use crate::laurent::LaurentPoly;
use crate::ratfun::RationalFunction;
use crate::straighten::monomial_of_index;

/// Transition matrices of one weight space, all square of the same size and
/// indexed by a fixed linear extension of the degeneration order (most
/// degenerate index first).  Rows expand the new family in the old one:
/// `h[i] = m^{c_i}` in PBW coordinates, `zeta[i] = E'^{c_i}` likewise.
pub struct TransitionData {
    pub h: Vec<Vec<LaurentPoly>>,
    pub omega: Vec<Vec<LaurentPoly>>,
    pub zeta: Vec<Vec<LaurentPoly>>,
}

impl TransitionData {
    pub fn size(&self) -> usize {
        self.h.len()
    }

    /// JSON `{"h": [[...]], "omega": [[...]], "zeta": [[...]]}` with each
    /// entry a Laurent polynomial object.
    pub fn to_json(&self) -> Value {
        let mat = |m: &Vec<Vec<LaurentPoly>>| -> Value {
            m.iter()
                .map(|row| row.iter().map(LaurentPoly::to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>()
                .into()
        };
        json!({ "h": mat(&self.h), "omega": mat(&self.omega), "zeta": mat(&self.zeta) })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let mat = |name: &str| -> Result<Vec<Vec<LaurentPoly>>> {
            let rows = value
                .get(name)
                .and_then(Value::as_array)
                .ok_or_else(|| HallError::Json(format!("transition data missing {name:?}")))?;
            rows.iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| HallError::Json(format!("row of {name:?} is not an array")))?
                        .iter()
                        .map(LaurentPoly::from_json)
                        .collect()
                })
                .collect()
        };
        let (h, omega, zeta) = (mat("h")?, mat("omega")?, mat("zeta")?);
        let n = h.len();
        let square = |m: &Vec<Vec<LaurentPoly>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if !(square(&h) && square(&omega) && square(&zeta)) {
            return Err(HallError::Json("transition matrices must be square and equal-sized".into()));
        }
        Ok(TransitionData { h, omega, zeta })
    }
}

/// Solve `x - bar(x) = r` for `x` in `v^{-1} Q[v^{-1}]`.
///
/// Writing `r = sum_{k>0} a_k (v^{-k} - v^k)` forces `x = sum a_k v^{-k}`;
/// a nonzero constant term, or a failure of bar-antisymmetry, means the bar
/// matrix was not actually an involution and the input data is corrupt.
fn solve_bar_difference(r: &LaurentPoly) -> Result<LaurentPoly> {
    if !(r.bar() + r.clone()).is_zero() {
        return Err(HallError::Invariant(format!(
            "bar-difference equation with non-antisymmetric right side {r}"
        )));
    }
    if !r.coeff(0).is_zero() {
        return Err(HallError::Invariant(format!(
            "bar-difference equation with nonzero constant term in {r}"
        )));
    }
    let mut x = LaurentPoly::zero();
    for (&e, c) in r.iter() {
        if e < 0 {
            x = x + LaurentPoly::term(e, c.clone());
        }
    }
    Ok(x)
}

/// Build the transition data of one weight space.
///
/// `indices` must list the space's basis indices in a linear extension of
/// the partial order `less` (most degenerate first); `expand` returns the
/// PBW coordinates of the bar-invariant monomial attached to an index.  The
/// solver checks triangularity of both `H` and `Omega` against `less`
/// itself, so a support pair the order cannot compare is a hard error, not
/// a silently tolerated fluke of the linear extension.
pub fn build_transition<I, E, L>(indices: &[I], mut expand: E, less: L) -> Result<TransitionData>
where
    I: Ord + Display,
    E: FnMut(&I) -> Result<BTreeMap<I, RationalFunction>>,
    L: Fn(&I, &I) -> Option<Ordering>,
{
    let n = indices.len();
    let pos: BTreeMap<&I, usize> = indices.iter().zip(0..).collect();

    let mut h = vec![vec![LaurentPoly::zero(); n]; n];
    for (i, c) in indices.iter().enumerate() {
        for (c2, coeff) in expand(c)? {
            let j = *pos.get(&c2).ok_or_else(|| {
                HallError::Invariant(format!("monomial for {c} leaves the weight space at {c2}"))
            })?;
            h[i][j] = coeff.as_laurent().cloned().ok_or_else(|| {
                HallError::Invariant(format!(
                    "monomial for {c} has non-Laurent coordinate {coeff} at {c2}"
                ))
            })?;
        }
    }
    check_triangular(&h, indices, &less, "monomial")?;

    // Omega = bar(H)^{-1} H by forward substitution: bar(H) is again
    // unitriangular, so row i of Omega is H[i] minus the already known
    // rows weighted by bar(H[i]).
    let mut omega = h.clone();
    for i in 0..n {
        for k in 0..i {
            let w = h[i][k].bar();
            if w.is_zero() {
                continue;
            }
            for j in 0..=k {
                let t = &w * &omega[k][j];
                omega[i][j] = std::mem::take(&mut omega[i][j]) - t;
            }
        }
    }
    check_triangular(&omega, indices, &less, "bar matrix")?;

    // zeta row by row, each row solved downward from the diagonal.  The
    // entry at (i, j) satisfies  zeta_ij - bar(zeta_ij) = r  with
    // r = sum_{j < k <= i} omega[k][j] bar(zeta_ik).
    let mut zeta = vec![vec![LaurentPoly::zero(); n]; n];
    for i in 0..n {
        zeta[i][i] = LaurentPoly::one();
        for j in (0..i).rev() {
            let mut r = LaurentPoly::zero();
            for k in (j + 1)..=i {
                r = r + &omega[k][j] * &zeta[i][k].bar();
            }
            zeta[i][j] = solve_bar_difference(&r).map_err(|e| {
                HallError::Invariant(format!(
                    "canonical row {} at column {}: {e}",
                    indices[i], indices[j]
                ))
            })?;
        }
    }

    Ok(TransitionData { h, omega, zeta })
}

fn check_triangular<I, L>(m: &[Vec<LaurentPoly>], indices: &[I], less: &L, what: &str) -> Result<()>
where
    I: Display,
    L: Fn(&I, &I) -> Option<Ordering>,
{
    for (i, row) in m.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            if entry.is_zero() {
                continue;
            }
            if i == j {
                if !entry.is_one() {
                    return Err(HallError::Invariant(format!(
                        "{what} at {} is not monic: diagonal entry {entry}",
                        indices[i]
                    )));
                }
                continue;
            }
            if less(&indices[j], &indices[i]) != Some(Ordering::Less) {
                return Err(HallError::Invariant(format!(
                    "{what} for {} has support at {}, which is not a degeneration of it",
                    indices[i], indices[j]
                )));
            }
        }
    }
    Ok(())
}

/// A full weight space of the Kronecker algebra: its PBW indices in the
/// canonical linear extension and the transition matrices over them.
pub struct WeightBlock {
    pub dim: Dim,
    pub indices: Vec<PBWIndex>,
    pub data: TransitionData,
}

/// The linear extension used for Kronecker weight spaces: orbit dimension
/// ascending, then partitions lexicographically descending (dominance-larger
/// first, matching the reversed dominance inside the degeneration order),
/// then the real parts.  Deterministic, so transition matrices are stable
/// across runs.
pub fn index_order(a: &PBWIndex, b: &PBWIndex) -> Ordering {
    a.orbit_dim()
        .cmp(&b.orbit_dim())
        .then_with(|| b.im.cmp(&a.im))
        .then_with(|| a.prep.cmp(&b.prep))
        .then_with(|| a.prei.cmp(&b.prei))
}

/// Sorted PBW indices of one weight.
pub fn weight_indices(d: Dim) -> Vec<PBWIndex> {
    let mut idx = enumerate_indices(d);
    idx.sort_by(index_order);
    idx
}

impl WeightBlock {
    /// Build the transition data of the weight `d` from the divided-power
    /// monomial family.
    pub fn new(d: Dim) -> Result<Self> {
        let indices = weight_indices(d);
        let data = build_transition(
            &indices,
            |c| {
                let m = monomial_of_index(c)?;
                Ok(m.iter()
                    .map(|(idx, coeff)| (idx.clone(), coeff.clone()))
                    .collect())
            },
            geometric_cmp,
        )?;
        Ok(WeightBlock { dim: d, indices, data })
    }

    /// The canonical basis elements of this weight, in index order.
    pub fn canonical_elements(&self) -> Vec<AlgebraElement> {
        self.data
            .zeta
            .iter()
            .map(|row| {
                let mut e = AlgebraElement::zero();
                for (j, z) in row.iter().enumerate() {
                    if !z.is_zero() {
                        e.add_term(self.indices[j].clone(), &RationalFunction::from_laurent(z.clone()));
                    }
                }
                e
            })
            .collect()
    }

    /// The canonical element attached to one index of this weight.
    pub fn canonical_element(&self, c: &PBWIndex) -> Option<AlgebraElement> {
        let i = self.indices.iter().position(|x| x == c)?;
        Some(self.canonical_elements().swap_remove(i))
    }
}
