//! Isometry testing, spinor norms, Kneser neighbors and class enumeration.

mod isometry;
mod neighbors;

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

pub use isometry::{fingerprint, is_isometric, Fingerprint};
pub use neighbors::p_neighbors;

use crate::arith::{prime_divisors, squarefree_class};
use crate::enumerate::{find_representations, Embedding};
use crate::error::{Error, Result};
use crate::exact::linalg::require_positive_definite;
use crate::exact::{det, GramMatrix};
use crate::local::jordan_decomposition;

/// A rational square class, stored as its squarefree representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SpinorNormClass {
    #[serde(serialize_with = "crate::report::ser_big")]
    pub value: BigInt,
}

impl SpinorNormClass {
    pub fn of(q: &BigInt) -> Self {
        SpinorNormClass { value: squarefree_class(&BigRational::from_integer(q.clone())) }
    }

    /// Spinor norms multiply along products of reflections.
    pub fn mul(&self, other: &SpinorNormClass) -> SpinorNormClass {
        SpinorNormClass::of(&(&self.value * &other.value))
    }
}

/// Spinor norm of the reflection in v: the square class of Q(v).
pub fn spinor_norm_reflection(s: &GramMatrix, v: &[BigInt]) -> Result<SpinorNormClass> {
    if v.len() != s.rank() {
        return Err(Error::Shape);
    }
    let q = s.norm(v);
    if q.is_zero() {
        return Err(Error::Invalid("reflection in an isotropic vector".into()));
    }
    Ok(SpinorNormClass::of(&q))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenusRecord {
    pub seed: GramMatrix,
    pub prime_used: u64,
    /// Further neighbor primes used in the closure, if any.
    pub extra_primes: Vec<u64>,
    pub classes: Vec<GramMatrix>,
    pub fingerprints: Vec<Fingerprint>,
    /// Neighbor-graph edges (from, to, prime) between class indices.
    pub edges: Vec<(usize, usize, u64)>,
    pub complete: bool,
}

impl GenusRecord {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

/// Breadth-first neighbor closure from S at prime p. The closure is the
/// part of the genus reachable by p-neighbor steps (the spinor genus
/// component); `complete` is false if the class cap was hit.
pub fn enumerate_genus(s: &GramMatrix, p: u64, class_cap: usize) -> Result<GenusRecord> {
    enumerate_genus_with_primes(s, &[p], class_cap)
}

/// As `enumerate_genus`, taking neighbor steps at every listed prime, which
/// can reach classes of further spinor genera.
pub fn enumerate_genus_with_primes(s: &GramMatrix, primes: &[u64], class_cap: usize) -> Result<GenusRecord> {
    require_positive_definite(s)?;
    let Some((&first, extra)) = primes.split_first() else {
        return Err(Error::Invalid("no neighbor prime given".into()));
    };
    for &p in primes {
        neighbors::check_neighbor_prime(s, p)?;
    }
    let check_primes: BTreeSet<u64> = std::iter::once(2)
        .chain(primes.iter().copied())
        .chain(prime_divisors(&det(s)))
        .collect();
    let symbols = |g: &GramMatrix| -> Result<Vec<_>> {
        check_primes.iter().map(|&q| Ok(jordan_decomposition(g, q)?.symbol())).collect()
    };
    let seed_symbols = symbols(s)?;
    let seed = crate::enumerate::lll_reduce(s)?.0;
    let mut classes = neighbors::ClassList::new();
    classes.insert(fingerprint(&seed)?, seed)?;
    let mut edges = BTreeSet::new();
    let mut queue = VecDeque::from([0usize]);
    let mut complete = true;
    'bfs: while let Some(i) = queue.pop_front() {
        let current = classes.classes[i].1.clone();
        for &p in primes {
            let found = neighbors::neighbor_classes(&current, p)?;
            for (fp, g) in found.classes {
                assert_eq!(det(&g), det(s), "neighbors preserve the determinant");
                assert_eq!(symbols(&g)?, seed_symbols, "neighbors stay in the genus");
                let j = match classes.find(&fp, &g)? {
                    Some(j) => j,
                    None if classes.classes.len() >= class_cap => {
                        complete = false;
                        break 'bfs;
                    }
                    None => {
                        let (j, _) = classes.insert(fp, g)?;
                        queue.push_back(j);
                        j
                    }
                };
                edges.insert((i, j, p));
            }
        }
    }
    let (fingerprints, classes) = classes.classes.into_iter().unzip();
    Ok(GenusRecord {
        seed: s.clone(),
        prime_used: first,
        extra_primes: extra.to_vec(),
        classes,
        fingerprints,
        edges: edges.into_iter().collect(),
        complete,
    })
}

/// For each class of a complete genus record, a representation of T with
/// imprimitivity dividing c, if one exists.
pub fn represented_by_all_classes(g: &GenusRecord, t: &GramMatrix, c: &BigInt) -> Result<Vec<Option<Embedding>>> {
    if !g.complete {
        return Err(Error::IncompleteGenus);
    }
    g.classes
        .iter()
        .map(|s| Ok(find_representations(s, t, c, Some(1))?.into_iter().next()))
        .collect()
}

/// Removes embeddings equivalent under automorphisms of the target:
/// X and gX (g in Aut(S)) are identified. Only practical for forms with
/// small automorphism groups.
pub fn dedupe_by_automorphisms(s: &GramMatrix, embeddings: Vec<Embedding>) -> Result<Vec<Embedding>> {
    let auts: Vec<_> = find_representations(s, s, &BigInt::from(1), None)?.into_iter().map(|e| e.x).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for e in embeddings {
        let key = auts
            .iter()
            .flat_map(|g| {
                let y = g * &e.x;
                let neg: Vec<BigInt> = y.entries().iter().map(|v| -v).collect();
                [y.entries().to_vec(), neg]
            })
            .min()
            .expect("identity is an automorphism");
        if seen.insert(key) {
            out.push(e);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn spinor_norms() {
        let v = |x: &[i64]| crate::exact::matrix::big_vec(x);
        let class = |s: &GramMatrix, x: &[i64]| spinor_norm_reflection(s, &v(x)).unwrap().value;
        assert_eq!(class(&GramMatrix::identity(2), &[1, 0]), BigInt::from(1));
        assert_eq!(class(&GramMatrix::diagonal(&[2, 3]), &[1, 0]), BigInt::from(2));
        assert_eq!(class(&GramMatrix::identity(3), &[1, 1, 0]), BigInt::from(2));
        assert_eq!(class(&GramMatrix::identity(3), &[2, 0, 0]), BigInt::from(1));
        let h = GramMatrix::from_rows(&[[0, 1], [1, 0]]).unwrap();
        assert!(spinor_norm_reflection(&h, &v(&[1, 0])).is_err());
        let a = SpinorNormClass::of(&BigInt::from(6));
        let b = SpinorNormClass::of(&BigInt::from(10));
        assert_eq!(a.mul(&b).value, BigInt::from(15));
    }

    #[test]
    fn small_genera() {
        for n in 2..=5 {
            let g = enumerate_genus(&GramMatrix::identity(n), 3, 10).unwrap();
            assert!(g.complete);
            assert_eq!(g.class_count(), 1, "I{n}");
        }
    }

    #[test]
    fn per_class_representations() {
        let one = BigInt::one();
        let g = enumerate_genus(&GramMatrix::identity(4), 3, 10).unwrap();
        let r = represented_by_all_classes(&g, &GramMatrix::diagonal(&[2]), &one).unwrap();
        assert!(r.iter().all(Option::is_some));
        let g = enumerate_genus(&GramMatrix::identity(3), 5, 10).unwrap();
        let r = represented_by_all_classes(&g, &GramMatrix::diagonal(&[7]), &BigInt::from(7)).unwrap();
        assert!(r.iter().all(Option::is_none));
        let mut partial = g.clone();
        partial.complete = false;
        assert_eq!(
            represented_by_all_classes(&partial, &GramMatrix::diagonal(&[1]), &one),
            Err(Error::IncompleteGenus)
        );
    }

    #[test]
    fn automorphism_dedupe() {
        let s = GramMatrix::identity(2);
        let all = find_representations(&s, &GramMatrix::diagonal(&[5]), &BigInt::one(), None).unwrap();
        assert_eq!(all.len(), 4);
        assert_eq!(dedupe_by_automorphisms(&s, all).unwrap().len(), 1);
    }
}
