//! Exact polynomial interpolation for counting functions.
//!
//! Hall numbers over `F_q` are values of integer polynomials in `q` with
//! known degree bounds.  We fit with Lagrange interpolation on `deg + 1`
//! sample points and require every remaining sample to match the fit, so a
//! wrong degree bound fails loudly instead of producing a bogus polynomial.

use crate::error::{HallError, Result};
use crate::laurent::{Coeff, LaurentPoly};
use num_bigint::BigInt;
use num_traits::Zero;

/// Fit a polynomial (in one variable, here the field size) of degree at most
/// `deg` through integer-valued points.  Uses the first `deg + 1` points for
/// the fit; all further points must lie on the curve, and all coefficients
/// must come out integral.
pub fn fit_int_poly(points: &[(u64, BigInt)], deg: usize) -> Result<LaurentPoly> {
    if points.len() < deg + 2 {
        return Err(HallError::Usage(format!(
            "interpolation of degree {deg} wants at least {} points for a consistency check, got {}",
            deg + 2,
            points.len()
        )));
    }
    let fit_pts = &points[..deg + 1];
    let mut acc = LaurentPoly::zero();
    for (i, (xi, yi)) in fit_pts.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        // y_i * prod_{j != i} (x - x_j) / (x_i - x_j)
        let mut num = LaurentPoly::int(1);
        let mut den = Coeff::from_integer(1.into());
        for (j, (xj, _)) in fit_pts.iter().enumerate() {
            if i == j {
                continue;
            }
            num = &num
                * &(LaurentPoly::term(1, Coeff::from_integer(1.into()))
                    - LaurentPoly::int(*xj as i64));
            den *= Coeff::from_integer(BigInt::from(*xi as i64 - *xj as i64));
        }
        let scale = Coeff::from_integer(yi.clone()) / den;
        acc += &num.scale(&scale, 0);
    }
    for (x, y) in &points[deg + 1..] {
        let at = acc.eval(&Coeff::from_integer(BigInt::from(*x)));
        if &at != &Coeff::from_integer(y.clone()) {
            return Err(HallError::Invariant(format!(
                "degree bound {deg} is wrong: fit predicts {at} at {x}, counted {y}"
            )));
        }
    }
    if !acc.is_integral() {
        return Err(HallError::Invariant(
            "interpolated counting polynomial has non-integer coefficients".into(),
        ));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::rat;

    fn pts(f: impl Fn(u64) -> i64, xs: &[u64]) -> Vec<(u64, BigInt)> {
        xs.iter().map(|&x| (x, BigInt::from(f(x)))).collect()
    }

    #[test]
    fn fits_quadratics() {
        let p = fit_int_poly(&pts(|q| (q * q + q + 1) as i64, &[2, 3, 4, 5, 7]), 2).unwrap();
        assert_eq!(p.coeff(2), rat(1));
        assert_eq!(p.coeff(1), rat(1));
        assert_eq!(p.coeff(0), rat(1));
        assert_eq!(p.num_terms(), 3);
    }

    #[test]
    fn rejects_wrong_degree_bound() {
        let err = fit_int_poly(&pts(|q| (q * q * q) as i64, &[2, 3, 4, 5]), 2).unwrap_err();
        assert!(matches!(err, HallError::Invariant(_)));
    }

    #[test]
    fn wants_a_checking_point() {
        let err = fit_int_poly(&pts(|q| q as i64, &[2, 3]), 1).unwrap_err();
        assert!(matches!(err, HallError::Usage(_)));
    }
}
