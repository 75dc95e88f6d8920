use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::enumerate::{find_representations, lll_reduce, Enumerator, Order};
use crate::error::{Error, Result};
use crate::exact::linalg::{rational_inverse, rational_to_int, require_positive_definite};
use crate::exact::{det, GramMatrix, IntMatrix};

/// Cheap isometry invariants: determinant, minimum and the number of
/// minimal vectors up to sign.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Fingerprint {
    #[serde(serialize_with = "crate::report::ser_big")]
    pub det: BigInt,
    #[serde(serialize_with = "crate::report::ser_big")]
    pub minimum: BigInt,
    pub minimal_vectors: usize,
}

pub fn fingerprint(s: &GramMatrix) -> Result<Fingerprint> {
    let e = Enumerator::new(s)?;
    let minimum = e.minimum();
    let mut count = 0;
    let _ = e.for_each(&minimum, Order::Ascending, |_, q| {
        if *q == minimum {
            count += 1;
        }
        ControlFlow::Continue(())
    });
    Ok(Fingerprint { det: det(s), minimum, minimal_vectors: count })
}

/// A unimodular U with t(U) S1 U = S2, if the forms are isometric.
pub fn is_isometric(s1: &GramMatrix, s2: &GramMatrix) -> Result<Option<IntMatrix>> {
    if s1.rank() != s2.rank() {
        return Err(Error::RankViolation { target: s1.rank(), ambient: s2.rank() });
    }
    require_positive_definite(s1)?;
    require_positive_definite(s2)?;
    if fingerprint(s1)? != fingerprint(s2)? {
        return Ok(None);
    }
    is_isometric_unchecked(s1, s2)
}

/// Isometry search without the fingerprint filter; callers that already
/// compared fingerprints use this directly.
pub(crate) fn is_isometric_unchecked(s1: &GramMatrix, s2: &GramMatrix) -> Result<Option<IntMatrix>> {
    // map a reduced basis of S1 into S2: t(X) S2 X = t(U1) S1 U1
    let (r1, u1) = lll_reduce(s1)?;
    let Some(emb) = find_representations(s2, &r1, &BigInt::one(), Some(1))?.into_iter().next() else {
        return Ok(None);
    };
    // equal determinants force X to be unimodular
    let x_inv = rational_to_int(&rational_inverse(&emb.x)?).expect("unimodular");
    let u = &u1 * &x_inv;
    debug_assert_eq!(&s1.congruent(&u), s2);
    debug_assert!(crate::exact::det_square(&u).abs().is_one());
    Ok(Some(u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_examples() {
        let s = GramMatrix::from_rows(&[[3, 1, 0], [1, 4, 1], [0, 1, 5]]).unwrap();
        let u = is_isometric(&s, &s).unwrap().unwrap();
        assert_eq!(s.congruent(&u), s);
        let v = IntMatrix::from_rows(&[[1, 2, -1], [0, 1, 3], [0, 0, 1]]).unwrap();
        let s2 = s.congruent(&v);
        let u = is_isometric(&s, &s2).unwrap().unwrap();
        assert_eq!(s.congruent(&u), s2);
        let a = GramMatrix::from_rows(&[[2, 1], [1, 1]]).unwrap();
        let u = is_isometric(&a, &GramMatrix::identity(2)).unwrap().unwrap();
        assert_eq!(a.congruent(&u), GramMatrix::identity(2));
    }

    #[test]
    fn non_isometric() {
        let e8 = GramMatrix::e8();
        assert!(is_isometric(&e8, &GramMatrix::identity(8)).unwrap().is_none());
        let a = GramMatrix::diagonal(&[1, 6]);
        let b = GramMatrix::diagonal(&[2, 3]);
        assert!(is_isometric(&a, &b).unwrap().is_none());
        // the backtracking alone also rejects them
        assert!(is_isometric_unchecked(&a, &b).unwrap().is_none());
        assert!(is_isometric_unchecked(&b, &a).unwrap().is_none());
        assert!(matches!(
            is_isometric(&a, &GramMatrix::identity(3)),
            Err(Error::RankViolation { .. })
        ));
    }
}
