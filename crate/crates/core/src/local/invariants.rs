use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::hilbert::{hasse_invariant, hilbert_symbol, is_local_square};
use super::place::Place;
use crate::arith::{int_rat, prime_divisors, split_p, squarefree_class};
use crate::error::{Error, Result};
use crate::exact::{det, diagonalize_over_q, GramMatrix};

/// Isometry invariants of a nonsingular rational quadratic space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpaceInvariants {
    pub rank: usize,
    /// Squarefree representative of the determinant modulo squares.
    #[serde(serialize_with = "crate::report::ser_big")]
    pub det_class: BigInt,
    /// Hasse invariant at every place where it may be nontrivial;
    /// absent places carry +1.
    pub hasse: BTreeMap<Place, i8>,
    /// (positive, negative) inertia at the real place.
    pub signature: (usize, usize),
}

impl SpaceInvariants {
    pub fn from_diagonal(d: &[BigRational]) -> SpaceInvariants {
        assert!(d.iter().all(|x| !x.is_zero()), "diagonal entries must be nonzero");
        let mut primes: BTreeSet<u64> = BTreeSet::from([2]);
        for x in d {
            primes.extend(prime_divisors(x.numer()));
            primes.extend(prime_divisors(x.denom()));
        }
        let mut hasse = BTreeMap::new();
        hasse.insert(Place::Infinity, hasse_invariant(d, Place::Infinity));
        for p in primes {
            hasse.insert(Place::Prime(p), hasse_invariant(d, Place::Prime(p)));
        }
        let det: BigRational = d.iter().product();
        let positive = d.iter().filter(|x| x.is_positive()).count();
        SpaceInvariants {
            rank: d.len(),
            det_class: squarefree_class(&det),
            hasse,
            signature: (positive, d.len() - positive),
        }
    }

    pub fn hasse_at(&self, v: Place) -> i8 {
        self.hasse.get(&v).copied().unwrap_or(1)
    }

    pub fn det_rational(&self) -> BigRational {
        int_rat(&self.det_class)
    }

    /// Places where some invariant can be nontrivial: infinity, 2 and the
    /// primes dividing the determinant class or carrying a stored symbol.
    pub fn relevant_places(&self) -> Vec<Place> {
        let mut places: BTreeSet<Place> = self.hasse.keys().copied().collect();
        places.insert(Place::Prime(2));
        places.insert(Place::Infinity);
        places.extend(prime_divisors(&self.det_class).into_iter().map(Place::Prime));
        places.into_iter().collect()
    }

    /// The orthogonal sum of two spaces.
    pub fn orthogonal_sum(&self, other: &SpaceInvariants) -> SpaceInvariants {
        let places: BTreeSet<Place> =
            self.relevant_places().into_iter().chain(other.relevant_places()).collect();
        let (d1, d2) = (self.det_rational(), other.det_rational());
        let hasse = places
            .into_iter()
            .map(|v| {
                let mut h = self.hasse_at(v) * other.hasse_at(v);
                if self.rank > 0 && other.rank > 0 {
                    h *= hilbert_symbol(&d1, &d2, v);
                }
                (v, h)
            })
            .collect();
        SpaceInvariants {
            rank: self.rank + other.rank,
            det_class: squarefree_class(&(d1 * d2)),
            hasse,
            signature: (self.signature.0 + other.signature.0, self.signature.1 + other.signature.1),
        }
    }

    /// Whether the determinants agree in Q_v^* / squares.
    pub fn same_local_det(&self, other: &SpaceInvariants, v: Place) -> bool {
        is_local_square(&(self.det_rational() * other.det_rational()), v)
    }

    /// Local isometry of the completions at `v`.
    pub fn locally_isometric(&self, other: &SpaceInvariants, v: Place) -> bool {
        match v {
            Place::Infinity => self.signature == other.signature,
            Place::Prime(_) => {
                self.rank == other.rank
                    && self.same_local_det(other, v)
                    && self.hasse_at(v) == other.hasse_at(v)
            }
        }
    }
}

pub fn space_invariants(s: &GramMatrix) -> Result<SpaceInvariants> {
    if det(s).is_zero() {
        return Err(Error::Singular);
    }
    let d = diagonalize_over_q(s)?;
    Ok(SpaceInvariants::from_diagonal(&d))
}

/// Invariants valid at the single place `v`, without factoring any entry.
/// The determinant class is replaced by a small integer in the same square
/// class of the completion, so only comparisons at `v` are meaningful.
pub fn space_invariants_at(s: &GramMatrix, v: Place) -> Result<SpaceInvariants> {
    if det(s).is_zero() {
        return Err(Error::Singular);
    }
    let d = diagonalize_over_q(s)?;
    let prod: BigRational = d.iter().product();
    let prod = prod.numer() * prod.denom();
    let det_class = match v {
        Place::Infinity => BigInt::from(prod.signum()),
        Place::Prime(p) => {
            // units are classified by their residue mod p (odd p) or mod 8
            let (a, u) = split_p(&prod, p);
            let r = u.mod_floor(&BigInt::from(8 * p));
            if a % 2 == 0 { r } else { r * p }
        }
    };
    let positive = d.iter().filter(|x| x.is_positive()).count();
    Ok(SpaceInvariants {
        rank: d.len(),
        det_class,
        hasse: BTreeMap::from([(v, hasse_invariant(&d, v))]),
        signature: (positive, d.len() - positive),
    })
}

/// Classical isotropy criterion for the completion at `v`.
pub fn is_isotropic(inv: &SpaceInvariants, v: Place) -> bool {
    let Place::Prime(_) = v else {
        return inv.signature.0 > 0 && inv.signature.1 > 0;
    };
    let det = inv.det_rational();
    let minus_one = -BigRational::from_integer(1.into());
    match inv.rank {
        0 | 1 => false,
        2 => is_local_square(&-det, v),
        3 => inv.hasse_at(v) != -hilbert_symbol(&minus_one, &-det, v),
        4 => !(is_local_square(&det, v) && inv.hasse_at(v) == -hilbert_symbol(&minus_one, &minus_one, v)),
        _ => true,
    }
}

/// Whether a space with the given rank, determinant and Hasse invariant at
/// the finite place `v` exists.
fn local_space_exists(rank: usize, det: &BigRational, hasse: i8, v: Place) -> bool {
    match rank {
        0 => is_local_square(det, v) && hasse == 1,
        1 => hasse == 1,
        2 => !is_local_square(&-det.clone(), v) || hasse == 1,
        _ => true,
    }
}

/// Whether `target` embeds isometrically into `ambient` over the completion
/// at `v`. Reduces to the existence of the orthogonal complement, whose
/// invariants are forced by Witt cancellation.
pub fn space_represents(target: &SpaceInvariants, ambient: &SpaceInvariants, v: Place) -> Result<bool> {
    if target.rank > ambient.rank {
        return Err(Error::RankViolation { target: target.rank, ambient: ambient.rank });
    }
    if let Place::Infinity = v {
        return Ok(target.signature.0 <= ambient.signature.0 && target.signature.1 <= ambient.signature.1);
    }
    let (dt, da) = (target.det_rational(), ambient.det_rational());
    let dw = &da * &dt;
    let rank = ambient.rank - target.rank;
    let mut hw = ambient.hasse_at(v) * target.hasse_at(v);
    if rank > 0 && target.rank > 0 {
        hw *= hilbert_symbol(&dt, &dw, v);
    }
    Ok(local_space_exists(rank, &dw, hw, v))
}

/// Invariants of the orthogonal complement of a nondegenerate subspace with
/// invariants `sub` inside `ambient`, determined at the place `v` only.
pub fn complement_invariants_at(sub: &SpaceInvariants, ambient: &SpaceInvariants, v: Place) -> Result<SpaceInvariants> {
    if sub.rank > ambient.rank {
        return Err(Error::RankViolation { target: sub.rank, ambient: ambient.rank });
    }
    let (dt, da) = (sub.det_rational(), ambient.det_rational());
    let dw = &da * &dt;
    let mut hw = ambient.hasse_at(v) * sub.hasse_at(v);
    if sub.rank > 0 && ambient.rank > sub.rank {
        hw *= hilbert_symbol(&dt, &dw, v);
    }
    let signature = (
        ambient.signature.0.saturating_sub(sub.signature.0),
        ambient.signature.1.saturating_sub(sub.signature.1),
    );
    let mut hasse = BTreeMap::new();
    hasse.insert(v, hw);
    Ok(SpaceInvariants {
        rank: ambient.rank - sub.rank,
        det_class: squarefree_class(&dw),
        hasse,
        signature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn inv(d: &[i64]) -> SpaceInvariants {
        space_invariants(&GramMatrix::diagonal(d)).unwrap()
    }

    #[test]
    fn documented_invariants() {
        let i4 = inv(&[1, 1, 1, 1]);
        assert_eq!(i4.rank, 4);
        assert_eq!(i4.det_class, BigInt::from(1));
        assert!(i4.hasse.values().all(|&h| h == 1));
        assert_eq!(i4.signature, (4, 0));
        let h = inv(&[1, -1]);
        assert_eq!(h.det_class, BigInt::from(-1));
        assert_eq!(h.signature, (1, 1));
        assert_eq!(inv(&[1, 1, 1]).hasse_at(Place::Prime(2)), 1);
    }

    #[test]
    fn singular_rejected() {
        assert_eq!(space_invariants(&GramMatrix::diagonal(&[1, 0])), Err(Error::Singular));
    }

    #[test]
    fn single_place_invariants_agree() {
        let forms = [
            GramMatrix::diagonal(&[1, 1, 1]),
            GramMatrix::diagonal(&[3, 5, 7, 11]),
            GramMatrix::diagonal(&[-2, 6, 1_000_003 * 12]),
            GramMatrix::diagonal(&[18, 50]),
        ];
        for s in &forms {
            let full = space_invariants(s).unwrap();
            for v in [Place::Infinity, Place::Prime(2), Place::Prime(3), Place::Prime(5), Place::Prime(1_000_003)] {
                let local = space_invariants_at(s, v).unwrap();
                assert!(full.locally_isometric(&local, v), "{s:?} at {v}");
                assert_eq!(is_isotropic(&full, v), is_isotropic(&local, v));
            }
        }
    }

    #[test]
    fn isotropy_examples() {
        for v in [Place::Infinity, Place::Prime(2), Place::Prime(3), Place::Prime(5)] {
            assert!(is_isotropic(&inv(&[1, -1]), v));
        }
        assert!(!is_isotropic(&inv(&[1, 1, 1, 1]), Place::Prime(2)));
        assert!(is_isotropic(&inv(&[1, 1, 1, 1]), Place::Prime(3)));
        assert!(is_isotropic(&inv(&[1, 1, 1]), Place::Prime(3)));
        assert!(!is_isotropic(&inv(&[1, 1, 1]), Place::Prime(2)));
        assert!(!is_isotropic(&inv(&[1, 1, 1, 1, 1]), Place::Infinity));
        assert!(is_isotropic(&inv(&[1, 1, 1, 1, 1]), Place::Prime(2)));
        assert!(!is_isotropic(&inv(&[7]), Place::Prime(7)));
    }

    #[test]
    fn representation_of_spaces() {
        let two = Place::Prime(2);
        // 7 is not a sum of three squares even 2-adically
        assert!(!space_represents(&inv(&[7]), &inv(&[1, 1, 1]), two).unwrap());
        assert!(space_represents(&inv(&[7]), &inv(&[1, 1, 1, 1]), two).unwrap());
        assert!(space_represents(&inv(&[3]), &inv(&[1, 1, 1]), two).unwrap());
        for t in [1, 2, 3, 6, 7, 15, 30] {
            for p in [2, 3, 5, 7] {
                assert!(space_represents(&inv(&[t]), &inv(&[1, 2, 3, 5, 7]), Place::Prime(p)).unwrap());
            }
        }
        assert!(!space_represents(&inv(&[1]), &inv(&[-1]), Place::Infinity).unwrap());
        assert!(matches!(
            space_represents(&inv(&[1, 1]), &inv(&[1]), two),
            Err(Error::RankViolation { .. })
        ));
    }

    #[test]
    fn orthogonal_sum_matches_direct() {
        let a = inv(&[3, -5]);
        let b = inv(&[7, 2, -1]);
        let direct = inv(&[3, -5, 7, 2, -1]);
        let sum = a.orthogonal_sum(&b);
        for v in direct.relevant_places() {
            assert_eq!(sum.hasse_at(v), direct.hasse_at(v), "at {v}");
        }
        assert_eq!(sum.det_class, direct.det_class);
        assert_eq!(sum.signature, direct.signature);
    }

    #[test]
    fn complement_by_cancellation() {
        let ambient = inv(&[1, 1, 1, 1, 1]);
        let sub = inv(&[1, 1]);
        let c = complement_invariants_at(&sub, &ambient, Place::Prime(2)).unwrap();
        assert!(!is_isotropic(&c, Place::Prime(2)));
        let direct = SpaceInvariants::from_diagonal(&[rat(1), rat(1), rat(1)]);
        assert_eq!(c.hasse_at(Place::Prime(2)), direct.hasse_at(Place::Prime(2)));
    }
}
