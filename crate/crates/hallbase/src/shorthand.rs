//! Parser for the element shorthand used on the command line.
//!
//! An expression is a sequence of factors, separated by `*` or just by
//! whitespace (so the printed form of a [`PBWIndex`] parses back):
//!
//! ```text
//! P0^2 * D(2,1) * I1
//! ```
//!
//! Factors:
//!
//! * `P<n>` and `I<n>`: the preprojective root `(n+1, n)` resp. the
//!   preinjective root `(n, n+1)`.  `^k` takes the k-th divided power,
//!   which is the same element as the bracket of the k-fold direct sum.
//! * `D(w1,...,wt)`: the product of the commuting imaginary generators
//!   `E_{wi delta}`, one for each listed part.
//! * `1`: the unit.
//!
//! Factors multiply left to right in the twisted algebra, so any word in
//! the generators is legal; [`evaluate`] hands products that are out of
//! Auslander-Reiten order to the straightening layer.

use crate::element::AlgebraElement;
use crate::error::{HallError, Result};
use crate::kronecker::{Dim, PBWIndex};
use crate::partitions::Partition;
use crate::straighten::multiply;

/// Byte cursor with 1-based positions in error messages.
struct Scanner<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner { text, pos: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_spaces(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn fail(&self, what: &str) -> HallError {
        let found = match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of input".into(),
        };
        HallError::Usage(format!(
            "shorthand: expected {what} at position {}, found {found}",
            self.pos + 1
        ))
    }

    fn number(&mut self) -> Result<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == start {
            return Err(self.fail("a number"));
        }
        self.text[start..self.pos].parse().map_err(|_| {
            HallError::Usage(format!(
                "shorthand: number out of range at position {}",
                start + 1
            ))
        })
    }
}

/// One atomic factor.  `^0` is the empty divided power, hence the unit.
fn factor(sc: &mut Scanner) -> Result<PBWIndex> {
    match sc.peek() {
        Some('1') => {
            sc.bump();
            Ok(PBWIndex::unit())
        }
        Some(side @ ('P' | 'I')) => {
            sc.bump();
            let n = sc.number()?;
            let mut m = 1;
            if sc.peek() == Some('^') {
                sc.bump();
                m = sc.number()?;
            }
            let mut c = PBWIndex::unit();
            if m > 0 {
                if side == 'P' {
                    c.prep.insert(n, m);
                } else {
                    c.prei.insert(n, m);
                }
            }
            Ok(c)
        }
        Some('D') => {
            sc.bump();
            if sc.peek() != Some('(') {
                return Err(sc.fail("'(' after D"));
            }
            sc.bump();
            let mut parts = Vec::new();
            loop {
                sc.skip_spaces();
                let at = sc.pos;
                let w = sc.number()?;
                if w == 0 {
                    return Err(HallError::Usage(format!(
                        "shorthand: imaginary parts must be positive (position {})",
                        at + 1
                    )));
                }
                parts.push(w);
                sc.skip_spaces();
                match sc.peek() {
                    Some(',') => {
                        sc.bump();
                    }
                    Some(')') => {
                        sc.bump();
                        break;
                    }
                    _ => return Err(sc.fail("',' or ')'")),
                }
            }
            Ok(PBWIndex::single_imag(Partition::new(parts)))
        }
        _ => Err(sc.fail("a factor (P<n>, I<n>, D(...), or 1)")),
    }
}

/// Parse an expression into its sequence of atomic factors, left to right.
pub fn parse_factors(input: &str) -> Result<Vec<PBWIndex>> {
    let mut sc = Scanner::new(input);
    sc.skip_spaces();
    if sc.peek().is_none() {
        return Err(HallError::Usage("shorthand: empty expression".into()));
    }
    let mut out = vec![factor(&mut sc)?];
    loop {
        sc.skip_spaces();
        match sc.peek() {
            None => break,
            Some('*') => {
                sc.bump();
                sc.skip_spaces();
                out.push(factor(&mut sc)?);
            }
            Some('P' | 'I' | 'D' | '1') => out.push(factor(&mut sc)?),
            _ => return Err(sc.fail("'*' or a factor")),
        }
    }
    Ok(out)
}

/// Parse and evaluate an expression in the twisted algebra.
pub fn evaluate(input: &str) -> Result<AlgebraElement> {
    let mut acc = AlgebraElement::one();
    for c in parse_factors(input)? {
        acc = multiply(&acc, &AlgebraElement::basis(c))?;
    }
    Ok(acc)
}

/// Parse a comma-separated list of vertex dimensions, as in `--dim 2,1,1`.
pub fn parse_dims(input: &str) -> Result<Vec<u32>> {
    input
        .split(',')
        .map(|p| {
            p.trim().parse::<u32>().map_err(|_| {
                HallError::Usage(format!("bad dimension entry {:?} in {input:?}", p.trim()))
            })
        })
        .collect()
}

/// Parse a Kronecker dimension vector `"d1,d2"`.
pub fn parse_dim(input: &str) -> Result<Dim> {
    match parse_dims(input)?[..] {
        [a, b] => Ok(Dim(a, b)),
        ref d => Err(HallError::Usage(format!(
            "expected two comma-separated dimensions, got {}",
            d.len()
        ))),
    }
}
