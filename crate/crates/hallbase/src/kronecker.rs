//! Root combinatorics of the Kronecker quiver.
//!
//! The quiver has two vertices and two parallel arrows from vertex 2 to
//! vertex 1.  Dimension vectors are written `(d1, d2)`.  The positive real
//! roots are `(n+1, n)` (preprojective) and `(n, n+1)` (preinjective); the
//! imaginary roots are the multiples of `delta = (1, 1)`.  Indecomposables
//! are ordered
//!
//! ```text
//! (1,0) < (2,1) < (3,2) < ... < regular < ... < (2,3) < (1,2) < (0,1)
//! ```
//!
//! and a PBW index records the multiplicity of each real root together with
//! a partition for the regular (imaginary) block.

use crate::error::{HallError, Result};
use crate::partitions::{partitions_of, Partition};
use serde_json::{json, Map, Value};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Sub};

/// Dimension vector `(d1, d2)` of a Kronecker representation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Dim(pub u32, pub u32);

impl Dim {
    pub fn zero() -> Self {
        Dim(0, 0)
    }

    pub fn delta() -> Self {
        Dim(1, 1)
    }

    pub fn total(&self) -> u32 {
        self.0 + self.1
    }

    pub fn is_zero(&self) -> bool {
        self.0 == 0 && self.1 == 0
    }

    /// Componentwise `<=`.
    pub fn fits_in(&self, other: &Dim) -> bool {
        self.0 <= other.0 && self.1 <= other.1
    }

    pub fn scale(&self, k: u32) -> Dim {
        Dim(self.0 * k, self.1 * k)
    }

    /// Parse `"a,b"`.
    pub fn parse(s: &str) -> Result<Dim> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 2 {
            return Err(HallError::Usage(format!(
                "dimension vector must be \"a,b\", got {s:?}"
            )));
        }
        let a = parts[0]
            .trim()
            .parse()
            .map_err(|_| HallError::Usage(format!("bad dimension component {:?}", parts[0])))?;
        let b = parts[1]
            .trim()
            .parse()
            .map_err(|_| HallError::Usage(format!("bad dimension component {:?}", parts[1])))?;
        Ok(Dim(a, b))
    }
}

impl Add for Dim {
    type Output = Dim;
    fn add(self, rhs: Dim) -> Dim {
        Dim(self.0 + rhs.0, self.1 + rhs.1)
    }
}

impl Sub for Dim {
    type Output = Dim;
    fn sub(self, rhs: Dim) -> Dim {
        assert!(rhs.fits_in(&self), "dimension vector subtraction underflow");
        Dim(self.0 - rhs.0, self.1 - rhs.1)
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

/// Euler form `<a, b> = a1 b1 + a2 b2 - 2 a2 b1` of the Kronecker quiver
/// (two arrows from vertex 2 to vertex 1).
pub fn euler_form(a: Dim, b: Dim) -> i64 {
    let (a1, a2) = (a.0 as i64, a.1 as i64);
    let (b1, b2) = (b.0 as i64, b.1 as i64);
    a1 * b1 + a2 * b2 - 2 * a2 * b1
}

/// Symmetrized Euler form.
pub fn symmetric_form(a: Dim, b: Dim) -> i64 {
    euler_form(a, b) + euler_form(b, a)
}

/// Dimension vector of the preprojective root `(n+1, n)`; `prep_root(0)` is
/// the simple projective.
pub fn prep_root(n: u32) -> Dim {
    Dim(n + 1, n)
}

/// Dimension vector of the preinjective root `(n, n+1)`; `prei_root(0)` is
/// the simple injective.
pub fn prei_root(n: u32) -> Dim {
    Dim(n, n + 1)
}

/// `dim Hom` between indecomposables named by their position in the
/// Auslander-Reiten order.  `Prep(n)` is `(n+1,n)`, `Prei(n)` is `(n,n+1)`,
/// `Reg(l)` a regular indecomposable of quasi-length `l` over a degree-one
/// point of the projective line.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Indec {
    Prep(u32),
    Reg(u32),
    Prei(u32),
}

impl Indec {
    pub fn dim(&self) -> Dim {
        match *self {
            Indec::Prep(n) => prep_root(n),
            Indec::Reg(l) => Dim(l, l),
            Indec::Prei(n) => prei_root(n),
        }
    }
}

/// `dim Hom(x, y)` for indecomposables, with regulars taken in distinct
/// homogeneous tubes when both arguments are regular (the generic
/// configuration); `same_tube` selects the same-tube value instead.
pub fn dim_hom_indec(x: Indec, y: Indec, same_tube: bool) -> i64 {
    use Indec::*;
    match (x, y) {
        (Prep(a), Prep(b)) => 0.max(b as i64 - a as i64 + 1),
        (Prei(a), Prei(b)) => 0.max(a as i64 - b as i64 + 1),
        // no maps from right to left in the AR order
        (Reg(_), Prep(_)) | (Prei(_), Prep(_)) | (Prei(_), Reg(_)) => 0,
        // left to right: Ext vanishes, so Hom dimension is the Euler form
        (Prep(_), Reg(_)) | (Prep(_), Prei(_)) | (Reg(_), Prei(_)) => {
            euler_form(x.dim(), y.dim())
        }
        (Reg(a), Reg(b)) => {
            if same_tube {
                a.min(b) as i64
            } else {
                0
            }
        }
    }
}

/// Index of a PBW basis element: multiplicities of preprojective and
/// preinjective roots plus a partition for the imaginary block.
///
/// The empty index denotes the unit.  Maps never store zero multiplicities.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PBWIndex {
    /// `n -> multiplicity` of the root `(n+1, n)`.
    pub prep: BTreeMap<u32, u32>,
    /// Partition `w`: the imaginary block is the product of `E_{w_i delta}`.
    pub im: Partition,
    /// `n -> multiplicity` of the root `(n, n+1)`.
    pub prei: BTreeMap<u32, u32>,
}

impl PBWIndex {
    pub fn unit() -> Self {
        PBWIndex::default()
    }

    pub fn is_unit(&self) -> bool {
        self.prep.is_empty() && self.im.is_empty() && self.prei.is_empty()
    }

    pub fn single_prep(n: u32) -> Self {
        PBWIndex { prep: BTreeMap::from([(n, 1)]), ..Default::default() }
    }

    pub fn single_prei(n: u32) -> Self {
        PBWIndex { prei: BTreeMap::from([(n, 1)]), ..Default::default() }
    }

    pub fn single_imag(w: Partition) -> Self {
        PBWIndex { im: w, ..Default::default() }
    }

    pub fn normalize(mut self) -> Self {
        self.prep.retain(|_, m| *m > 0);
        self.prei.retain(|_, m| *m > 0);
        self
    }

    pub fn weight(&self) -> Dim {
        let mut d = Dim::zero();
        for (&n, &m) in &self.prep {
            d = d + prep_root(n).scale(m);
        }
        d = d + Dim::delta().scale(self.im.size());
        for (&n, &m) in &self.prei {
            d = d + prei_root(n).scale(m);
        }
        d
    }

    pub fn is_real_only(&self) -> bool {
        self.im.is_empty()
    }

    /// The summands of the associated generic module, with multiplicity, in
    /// the Auslander-Reiten order.  Imaginary parts land in pairwise distinct
    /// homogeneous tubes.
    pub fn summands(&self) -> Vec<(Indec, u32)> {
        let mut out: Vec<(Indec, u32)> = Vec::new();
        for (&n, &m) in &self.prep {
            out.push((Indec::Prep(n), m));
        }
        for &l in self.im.parts() {
            out.push((Indec::Reg(l), 1));
        }
        for (&n, &m) in self.prei.iter().rev() {
            out.push((Indec::Prei(n), m));
        }
        out
    }

    /// `dim End` of the generic module attached to the index.
    ///
    /// Regular summands sit in pairwise distinct homogeneous tubes, so two
    /// distinct regular parts never map to each other.
    pub fn end_dim(&self) -> i64 {
        let summands = self.summands();
        let mut total = 0i64;
        for (i, &(x, mx)) in summands.iter().enumerate() {
            for (j, &(y, my)) in summands.iter().enumerate() {
                let same_tube = i == j;
                let h = match (x, y) {
                    (Indec::Reg(_), Indec::Reg(_)) => dim_hom_indec(x, y, same_tube),
                    _ => dim_hom_indec(x, y, false),
                };
                total += mx as i64 * my as i64 * h;
            }
        }
        total
    }

    /// Orbit dimension of the generic module inside the representation
    /// variety: `dim E_d - dim End + <d, d>` with `dim E_d = 2 d1 d2`.
    pub fn orbit_dim(&self) -> i64 {
        let d = self.weight();
        2 * d.0 as i64 * d.1 as i64 - self.end_dim() + euler_form(d, d)
    }

    pub fn to_json(&self) -> Value {
        let mult_map = |m: &BTreeMap<u32, u32>| {
            let mut obj = Map::new();
            for (&n, &mult) in m {
                obj.insert(n.to_string(), Value::from(mult));
            }
            Value::Object(obj)
        };
        json!({
            "prep": mult_map(&self.prep),
            "im": self.im.to_json(),
            "prei": mult_map(&self.prei),
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| HallError::Json("PBW index must be a JSON object".into()))?;
        let read_map = |key: &str| -> Result<BTreeMap<u32, u32>> {
            let m = obj
                .get(key)
                .and_then(Value::as_object)
                .ok_or_else(|| HallError::Json(format!("missing multiplicity map {key:?}")))?;
            let mut out = BTreeMap::new();
            for (k, v) in m {
                let n: u32 = k
                    .parse()
                    .map_err(|_| HallError::Json(format!("bad root index {k:?}")))?;
                let mult = v
                    .as_u64()
                    .filter(|&x| x > 0 && x <= u32::MAX as u64)
                    .ok_or_else(|| HallError::Json(format!("bad multiplicity {v}")))?;
                out.insert(n, mult as u32);
            }
            Ok(out)
        };
        Ok(PBWIndex {
            prep: read_map("prep")?,
            im: Partition::from_json(
                obj.get("im").ok_or_else(|| HallError::Json("missing \"im\"".into()))?,
            )?,
            prei: read_map("prei")?,
        })
    }

    /// Canonical text form matching the CLI shorthand: `P0^2 D(2,1) I1`;
    /// the unit index prints as `1`.
    pub fn shorthand(&self) -> String {
        let mut pieces = Vec::new();
        for (&n, &m) in &self.prep {
            pieces.push(if m == 1 { format!("P{n}") } else { format!("P{n}^{m}") });
        }
        if !self.im.is_empty() {
            let parts: Vec<String> = self.im.parts().iter().map(u32::to_string).collect();
            pieces.push(format!("D({})", parts.join(",")));
        }
        for (&n, &m) in self.prei.iter().rev() {
            pieces.push(if m == 1 { format!("I{n}") } else { format!("I{n}^{m}") });
        }
        if pieces.is_empty() {
            "1".into()
        } else {
            pieces.join(" ")
        }
    }
}

impl fmt::Debug for PBWIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.shorthand())
    }
}

impl fmt::Display for PBWIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.shorthand())
    }
}

/// All PBW indices of weight `d`, sorted by the structural order on
/// `PBWIndex` (deterministic across runs).
pub fn enumerate_indices(d: Dim) -> Vec<PBWIndex> {
    let mut out = Vec::new();
    let mut preps = Vec::new();
    enumerate_real(d, 0, true, &mut preps, &mut |prep, rest| {
        let mut preis = Vec::new();
        enumerate_real(rest, 0, false, &mut preis, &mut |prei, rem| {
            if rem.0 == rem.1 {
                for w in partitions_of(rem.0) {
                    out.push(PBWIndex {
                        prep: prep.iter().cloned().collect(),
                        im: w,
                        prei: prei.iter().cloned().collect(),
                    });
                }
            }
        });
    });
    out.sort();
    out
}

/// Recursively choose multiplicities for real roots `(n+1,n)` or `(n,n+1)`
/// starting at index `from`, never exceeding `d`, and hand each choice with
/// its leftover weight to `emit`.
fn enumerate_real(
    d: Dim,
    from: u32,
    prep: bool,
    chosen: &mut Vec<(u32, u32)>,
    emit: &mut impl FnMut(&[(u32, u32)], Dim),
) {
    emit(chosen, d);
    let mut n = from;
    loop {
        let root = if prep { prep_root(n) } else { prei_root(n) };
        if !root.fits_in(&d) {
            break;
        }
        let mut rest = d;
        let mut mult = 0;
        while root.fits_in(&rest) {
            rest = rest - root;
            mult += 1;
            chosen.push((n, mult));
            enumerate_real(rest, n + 1, prep, chosen, emit);
            chosen.pop();
        }
        n += 1;
    }
}

/// The geometric order on PBW indices of one weight: smaller orbit dimension
/// means smaller index.  Ties between distinct indices are broken by
/// dominance on the imaginary partition when everything else agrees (the
/// index with the dominance-larger partition is the smaller one); any other
/// tie is incomparable.
pub fn geometric_cmp(a: &PBWIndex, b: &PBWIndex) -> Option<Ordering> {
    if a.weight() != b.weight() {
        return None;
    }
    if a == b {
        return Some(Ordering::Equal);
    }
    match a.orbit_dim().cmp(&b.orbit_dim()) {
        Ordering::Less => Some(Ordering::Less),
        Ordering::Greater => Some(Ordering::Greater),
        Ordering::Equal => {
            if a.prep == b.prep && a.prei == b.prei {
                // same real parts, same orbit dimension: compare partitions,
                // reversing dominance
                a.im.dominance_cmp(&b.im).map(Ordering::reverse)
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_form_on_roots() {
        let a1 = Dim(1, 0);
        let a2 = Dim(0, 1);
        let delta = Dim::delta();
        assert_eq!(euler_form(a1, a1), 1);
        assert_eq!(euler_form(a2, a2), 1);
        assert_eq!(euler_form(a1, a2), 0);
        assert_eq!(euler_form(a2, a1), -2);
        assert_eq!(euler_form(delta, delta), 0);
        assert_eq!(euler_form(delta, a1), -1);
        assert_eq!(euler_form(a1, delta), 1);
        assert_eq!(euler_form(delta, a2), 1);
        assert_eq!(euler_form(a2, delta), -1);
    }

    #[test]
    fn hom_dimensions_between_indecomposables() {
        use Indec::*;
        // within the preprojective chain
        assert_eq!(dim_hom_indec(Prep(0), Prep(2), false), 3);
        assert_eq!(dim_hom_indec(Prep(2), Prep(0), false), 0);
        assert_eq!(dim_hom_indec(Prep(1), Prep(1), false), 1);
        // within the preinjective chain (mirror image)
        assert_eq!(dim_hom_indec(Prei(2), Prei(0), false), 3);
        assert_eq!(dim_hom_indec(Prei(0), Prei(2), false), 0);
        // across: Hom(P(a), I(b)) has dimension a + b
        assert_eq!(dim_hom_indec(Prep(0), Prei(0), false), 0);
        assert_eq!(dim_hom_indec(Prep(1), Prei(2), false), 3);
        // regular to the sides
        assert_eq!(dim_hom_indec(Prep(3), Reg(2), false), 2);
        assert_eq!(dim_hom_indec(Reg(2), Prei(3), false), 2);
        assert_eq!(dim_hom_indec(Reg(2), Prep(3), false), 0);
        // regulars in distinct vs the same homogeneous tube
        assert_eq!(dim_hom_indec(Reg(2), Reg(3), false), 0);
        assert_eq!(dim_hom_indec(Reg(2), Reg(3), true), 2);
    }

    #[test]
    fn end_and_orbit_dimensions() {
        // simple projective: End = k, orbit is a point
        let p0 = PBWIndex::single_prep(0);
        assert_eq!(p0.end_dim(), 1);
        assert_eq!(p0.orbit_dim(), 0);
        // S1 + S2: the zero representation of (1,1), orbit dimension 0
        let mut split = PBWIndex::single_prep(0);
        split.prei.insert(0, 1);
        assert_eq!(split.weight(), Dim(1, 1));
        assert_eq!(split.end_dim(), 2);
        assert_eq!(split.orbit_dim(), 0);
        // generic regular of weight delta: orbit dimension 1
        let reg = PBWIndex::single_imag(Partition::new(vec![1]));
        assert_eq!(reg.end_dim(), 1);
        assert_eq!(reg.orbit_dim(), 1);
        // weight 2*delta: all imaginary indices have End of dimension 2
        let r2 = PBWIndex::single_imag(Partition::new(vec![2]));
        let r11 = PBWIndex::single_imag(Partition::new(vec![1, 1]));
        assert_eq!(r2.end_dim(), 2);
        assert_eq!(r11.end_dim(), 2);
        assert_eq!(r2.orbit_dim(), r11.orbit_dim());
        // P1 = (2,1): indecomposable, End = k, orbit dim 4 - 1 + 1
        let p1 = PBWIndex::single_prep(1);
        assert_eq!(p1.end_dim(), 1);
        assert_eq!(p1.orbit_dim(), 4);
    }

    #[test]
    fn index_enumeration_counts() {
        // weight (1,1): P0*I0 and D(1)
        assert_eq!(enumerate_indices(Dim(1, 1)).len(), 2);
        // weight (2,1): P1, P0^2*I0, P0*D(1)
        let idx21 = enumerate_indices(Dim(2, 1));
        assert_eq!(idx21.len(), 3);
        // weight (2,2): P0^2 I0^2, P0 D(1) I0, P0 I1, P1 I0, D(2), D(1,1)
        assert_eq!(enumerate_indices(Dim(2, 2)).len(), 6);
        for d in [Dim(1, 1), Dim(2, 2), Dim(3, 2), Dim(4, 3)] {
            for c in enumerate_indices(d) {
                assert_eq!(c.weight(), d, "index {c} has wrong weight");
            }
        }
        // weight 0: just the unit
        let unit = enumerate_indices(Dim::zero());
        assert_eq!(unit.len(), 1);
        assert!(unit[0].is_unit());
    }

    #[test]
    fn geometric_order_basics() {
        // weight (1,1): split < regular
        let split = PBWIndex {
            prep: BTreeMap::from([(0, 1)]),
            im: Partition::empty(),
            prei: BTreeMap::from([(0, 1)]),
        };
        let reg = PBWIndex::single_imag(Partition::new(vec![1]));
        assert_eq!(geometric_cmp(&split, &reg), Some(Ordering::Less));
        assert_eq!(geometric_cmp(&reg, &split), Some(Ordering::Greater));
        assert_eq!(geometric_cmp(&reg, &reg), Some(Ordering::Equal));
        // different weights are incomparable
        assert_eq!(geometric_cmp(&PBWIndex::single_prep(0), &reg), None);
        // same orbit dimension, partitions compared by reversed dominance
        let r2 = PBWIndex::single_imag(Partition::new(vec![2]));
        let r11 = PBWIndex::single_imag(Partition::new(vec![1, 1]));
        assert_eq!(geometric_cmp(&r2, &r11), Some(Ordering::Less));
    }

    #[test]
    fn shorthand_and_json() {
        let mut c = PBWIndex::single_prep(0);
        c.prep.insert(0, 2);
        c.im = Partition::new(vec![2, 1]);
        c.prei.insert(1, 1);
        c.prei.insert(0, 3);
        assert_eq!(c.shorthand(), "P0^2 D(2,1) I1 I0^3");
        let back = PBWIndex::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(PBWIndex::unit().shorthand(), "1");
        assert_eq!(c.weight(), Dim(6, 8));
    }
}
