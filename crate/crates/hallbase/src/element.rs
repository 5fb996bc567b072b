//! Linear combinations of PBW basis elements with rational-function
//! coefficients.
//!
//! This is a plain container: the multiplication that rewrites products into
//! the PBW normal form lives in [`crate::straighten`].

use crate::error::{HallError, Result};
use crate::kronecker::{Dim, PBWIndex};
use crate::laurent::LaurentPoly;
use crate::ratfun::RationalFunction;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// An element of the algebra written in the PBW basis.
///
/// Invariant: no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct AlgebraElement {
    terms: BTreeMap<PBWIndex, RationalFunction>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    /// The unit of the algebra.
    pub fn one() -> Self {
        AlgebraElement::term(PBWIndex::unit(), RationalFunction::one())
    }

    pub fn term(index: PBWIndex, coeff: RationalFunction) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(index, coeff);
        }
        AlgebraElement { terms }
    }

    /// Single PBW basis element with coefficient one.
    pub fn basis(index: PBWIndex) -> Self {
        AlgebraElement::term(index, RationalFunction::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, index: &PBWIndex) -> RationalFunction {
        self.terms.get(index).cloned().unwrap_or_else(RationalFunction::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PBWIndex, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn indices(&self) -> impl Iterator<Item = &PBWIndex> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, index: PBWIndex, coeff: &RationalFunction) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&index) {
            Some(c) => {
                let s = &*c + coeff;
                if s.is_zero() {
                    self.terms.remove(&index);
                } else {
                    *c = s;
                }
            }
            None => {
                self.terms.insert(index, coeff.clone());
            }
        }
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        if c.is_zero() {
            return AlgebraElement::zero();
        }
        AlgebraElement {
            terms: self.terms.iter().map(|(i, a)| (i.clone(), a * c)).collect(),
        }
    }

    pub fn scale_laurent(&self, c: &LaurentPoly) -> Self {
        self.scale(&RationalFunction::from_laurent(c.clone()))
    }

    /// If every term has the same weight, that weight (the zero element is
    /// homogeneous of every weight, reported as `None`).
    pub fn weight(&self) -> Option<Dim> {
        let mut it = self.terms.keys();
        let first = it.next()?.weight();
        it.all(|i| i.weight() == first).then_some(first)
    }

    /// True if every coefficient is a Laurent polynomial with integer
    /// coefficients (membership in the integral form).
    pub fn is_integral(&self) -> bool {
        self.terms
            .values()
            .all(|c| c.as_laurent().map_or(false, LaurentPoly::is_integral))
    }

    /// JSON `{"terms": [{"index": ..., "coeff": ...}, ...]}` sorted by index.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(i, c)| json!({ "index": i.to_json(), "coeff": c.to_json() }))
            .collect();
        json!({ "terms": terms })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let terms = value
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| HallError::Json("element must have a \"terms\" array".into()))?;
        let mut out = AlgebraElement::zero();
        for t in terms {
            let index = PBWIndex::from_json(
                t.get("index").ok_or_else(|| HallError::Json("term missing \"index\"".into()))?,
            )?;
            let coeff = RationalFunction::from_json(
                t.get("coeff").ok_or_else(|| HallError::Json("term missing \"coeff\"".into()))?,
            )?;
            if out.terms.contains_key(&index) {
                return Err(HallError::Json(format!("duplicate index {index}")));
            }
            out.add_term(index, &coeff);
        }
        Ok(out)
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (i, c) in &rhs.terms {
            out.add_term(i.clone(), c);
        }
        out
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (i, c) in &rhs.terms {
            out.add_term(i.clone(), &(-c));
        }
        out
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement {
            terms: self.terms.iter().map(|(i, c)| (i.clone(), -c)).collect(),
        }
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: AlgebraElement) -> AlgebraElement {
        &self + &rhs
    }
}

impl Sub for AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: AlgebraElement) -> AlgebraElement {
        &self - &rhs
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (i, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, "  +  ")?;
            }
            if c.is_one() {
                write!(f, "[{i}]")?;
            } else {
                write!(f, "({c}) [{i}]")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
