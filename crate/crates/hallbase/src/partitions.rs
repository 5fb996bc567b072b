//! Integer partitions: dominance order, conjugation, and the combinatorial
//! quantities attached to nilpotent Jordan types.

use crate::error::{HallError, Result};
use num_bigint::BigUint;
use num_traits::One;
use serde_json::Value;
use std::cmp::Ordering;
use std::fmt;

/// A partition: weakly decreasing positive parts.  The empty partition is
/// allowed and denotes the zero module / the unit index.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition::default()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    /// Sum of the parts.
    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Multiplicity of `k` as a part.
    pub fn multiplicity(&self, k: u32) -> usize {
        self.parts.iter().filter(|&&p| p == k).count()
    }

    /// True if some part equals `k`.
    pub fn contains_part(&self, k: u32) -> bool {
        self.parts.contains(&k)
    }

    pub fn conjugate(&self) -> Partition {
        if self.parts.is_empty() {
            return Partition::empty();
        }
        let max = self.parts[0];
        let parts = (1..=max)
            .map(|j| self.parts.iter().filter(|&&p| p >= j).count() as u32)
            .collect();
        Partition { parts }
    }

    /// `n(lambda) = sum (i-1) lambda_i` (rows indexed from 1).
    pub fn n_stat(&self) -> u64 {
        self.parts
            .iter()
            .enumerate()
            .map(|(i, &p)| i as u64 * p as u64)
            .sum()
    }

    /// `z_lambda = prod_k k^(m_k) m_k!`, the centralizer order of a
    /// permutation of cycle type `lambda`.
    pub fn z(&self) -> BigUint {
        let mut acc = BigUint::one();
        let mut i = 0;
        while i < self.parts.len() {
            let k = self.parts[i];
            let mut m = 0u32;
            while i < self.parts.len() && self.parts[i] == k {
                m += 1;
                i += 1;
            }
            acc *= BigUint::from(k).pow(m);
            for j in 2..=m {
                acc *= BigUint::from(j);
            }
        }
        acc
    }

    /// Dominance: `self <= other`, i.e. every prefix sum of `self` is at most
    /// the corresponding prefix sum of `other`.  Only meaningful for equal
    /// sizes; returns `None` when comparing partitions of different numbers.
    pub fn dominated_by(&self, other: &Partition) -> Option<bool> {
        if self.size() != other.size() {
            return None;
        }
        let mut a = 0u64;
        let mut b = 0u64;
        let rows = self.parts.len().max(other.parts.len());
        for i in 0..rows {
            a += *self.parts.get(i).unwrap_or(&0) as u64;
            b += *other.parts.get(i).unwrap_or(&0) as u64;
            if a > b {
                return Some(false);
            }
        }
        Some(true)
    }

    /// Strict dominance comparison as a partial order on partitions of one
    /// number: `Some(Less)` when strictly dominated, `None` when incomparable.
    pub fn dominance_cmp(&self, other: &Partition) -> Option<Ordering> {
        if self == other {
            return Some(Ordering::Equal);
        }
        match (self.dominated_by(other), other.dominated_by(self)) {
            (Some(true), _) => Some(Ordering::Less),
            (_, Some(true)) => Some(Ordering::Greater),
            _ => None,
        }
    }

    /// JSON array of parts, e.g. `[2,1]`.
    pub fn to_json(&self) -> Value {
        Value::Array(self.parts.iter().map(|&p| Value::from(p)).collect())
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let arr = value
            .as_array()
            .ok_or_else(|| HallError::Json("partition must be a JSON array".into()))?;
        let mut parts = Vec::with_capacity(arr.len());
        let mut prev = u32::MAX;
        for v in arr {
            let p = v
                .as_u64()
                .filter(|&p| p > 0 && p <= u32::MAX as u64)
                .ok_or_else(|| HallError::Json(format!("bad partition part {v}")))?
                as u32;
            if p > prev {
                return Err(HallError::Json("partition parts must be weakly decreasing".into()));
            }
            prev = p;
            parts.push(p);
        }
        Ok(Partition { parts })
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Partition {
    /// `(3,1,1)`; the empty partition prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `n`, in descending lexicographic order (so `[n]` first,
/// `[1,...,1]` last).
pub fn partitions_of(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { parts: current.clone() });
            return;
        }
        let top = max_part.min(remaining);
        for p in (1..=top).rev() {
            current.push(p);
            rec(remaining - p, p, current, out);
            current.pop();
        }
    }
    rec(n, n, &mut current, &mut out);
    out
}
