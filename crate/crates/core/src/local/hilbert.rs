use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::place::Place;
use crate::arith::{legendre, split_p};

/// Integer in the same square class as a nonzero rational.
fn integral_rep(a: &BigRational) -> BigInt {
    a.numer() * a.denom()
}

fn mod8(u: &BigInt) -> u8 {
    u.mod_floor(&BigInt::from(8)).to_u8().unwrap()
}

/// Hilbert symbol (a, b)_v for nonzero rationals.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, v: Place) -> i8 {
    assert!(!a.is_zero() && !b.is_zero(), "Hilbert symbol of zero");
    let a = integral_rep(a);
    let b = integral_rep(b);
    hilbert_symbol_int(&a, &b, v)
}

pub fn hilbert_symbol_int(a: &BigInt, b: &BigInt, v: Place) -> i8 {
    match v {
        Place::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (alpha, u) = split_p(a, 2);
            let (beta, w) = split_p(b, 2);
            let (u, w) = (mod8(&u), mod8(&w));
            let eps = |x: u8| ((x - 1) / 2) as i64 % 2;
            let omega = |x: u8| if x == 3 || x == 5 { 1 } else { 0 };
            let e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (alpha, u) = split_p(a, p);
            let (beta, w) = split_p(b, p);
            let mut s = 1i32;
            if (alpha * beta) % 2 != 0 && ((p - 1) / 2) % 2 == 1 {
                s = -s;
            }
            if beta % 2 != 0 {
                s *= legendre(&u, p);
            }
            if alpha % 2 != 0 {
                s *= legendre(&w, p);
            }
            s as i8
        }
    }
}

/// Product of (d_i, d_j)_v over i < j.
pub fn hasse_invariant(d: &[BigRational], v: Place) -> i8 {
    let mut h = 1i8;
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            h *= hilbert_symbol(&d[i], &d[j], v);
        }
    }
    h
}

/// Whether a nonzero rational is a square in the completion at `v`.
pub fn is_local_square(a: &BigRational, v: Place) -> bool {
    let a = integral_rep(a);
    match v {
        Place::Infinity => a.is_positive(),
        Place::Prime(p) => {
            let (e, u) = split_p(&a, p);
            if e % 2 != 0 {
                return false;
            }
            if p == 2 {
                mod8(&u) == 1
            } else {
                legendre(&u, p) == 1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn h(a: i64, b: i64, v: Place) -> i8 {
        hilbert_symbol(&rat(a), &rat(b), v)
    }

    #[test]
    fn documented_values() {
        for v in [Place::Infinity, Place::Prime(2), Place::Prime(3), Place::Prime(7)] {
            assert_eq!(h(1, -13, v), 1);
        }
        assert_eq!(h(-1, -1, Place::Prime(2)), -1);
        assert_eq!(h(2, 3, Place::Prime(3)), -1);
        assert_eq!(h(-1, -1, Place::Infinity), -1);
        assert_eq!(h(-1, -1, Place::Prime(3)), 1);
    }

    #[test]
    fn hasse_values() {
        assert_eq!(hasse_invariant(&vec![rat(1); 4], Place::Prime(5)), 1);
        assert_eq!(hasse_invariant(&[rat(-1), rat(-1)], Place::Prime(2)), -1);
    }

    #[test]
    fn rational_arguments() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(hilbert_symbol(&half, &rat(3), Place::Prime(3)), h(2, 3, Place::Prime(3)));
    }

    #[test]
    fn local_squares() {
        assert!(is_local_square(&rat(17), Place::Prime(2)));
        assert!(!is_local_square(&rat(7), Place::Prime(2)));
        assert!(is_local_square(&rat(-7), Place::Prime(2)));
        assert!(is_local_square(&rat(4), Place::Prime(3)));
        assert!(!is_local_square(&rat(3), Place::Prime(3)));
        assert!(!is_local_square(&rat(-1), Place::Infinity));
    }
}
