//! Integral superlattices of small index that are locally primitively
//! represented.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::fincke_pohst::Enumerator;
use crate::error::Result;
use crate::exact::linalg::{rational_inverse, rational_to_int, require_positive_definite};
use crate::exact::{GramMatrix, IntMatrix};
use crate::local_reps::{represents_locally_everywhere, summarize, LocalStatus};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Superlattice {
    pub gram: GramMatrix,
    /// Coordinates of the basis of M in the basis of M'.
    pub inclusion: IntMatrix,
    pub index: u64,
}

fn divisors(k: u64) -> Vec<u64> {
    (1..=k).filter(|d| k % d == 0).collect()
}

/// Lower triangular column-HNF matrices with the given diagonal.
fn hnf_with_diagonal(diag: &[u64], f: &mut impl FnMut(&IntMatrix) -> bool) -> bool {
    let m = diag.len();
    let slots: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
    let mut l = IntMatrix::zeros(m, m);
    for (i, &d) in diag.iter().enumerate() {
        l[(i, i)] = BigInt::from(d);
    }
    fn rec(l: &mut IntMatrix, slots: &[(usize, usize)], diag: &[u64], f: &mut impl FnMut(&IntMatrix) -> bool) -> bool {
        let Some((&(i, j), rest)) = slots.split_first() else {
            return f(l);
        };
        for v in 0..diag[i] {
            l[(i, j)] = BigInt::from(v);
            if !rec(l, rest, diag, f) {
                return false;
            }
        }
        l[(i, j)] = BigInt::zero();
        true
    }
    rec(&mut l, &slots, diag, f)
}

fn diagonals(m: usize, k: u64, product: u64) -> Vec<Vec<u64>> {
    if m == 0 {
        return if product == 1 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for d in divisors(k) {
        if product % d == 0 {
            for mut rest in diagonals(m - 1, k, product / d) {
                rest.insert(0, d);
                out.push(rest);
            }
        }
    }
    out
}

/// Superlattices M' of M with [M' : M] = k: M' = (1/k) L for lattices
/// k Z^m <= L <= Z^m of index k^(m-1), in coordinates of M.
pub fn superlattices_of_index(t: &GramMatrix, k: u64, f: &mut impl FnMut(Superlattice) -> bool) {
    let m = t.rank();
    let kb = BigInt::from(k);
    let k2 = &kb * &kb;
    let product = k.pow(m.saturating_sub(1) as u32);
    for diag in diagonals(m, k, product) {
        let go_on = hnf_with_diagonal(&diag, &mut |l| {
            let inv = rational_inverse(l).expect("nonsingular");
            let scaled: Vec<Vec<_>> = inv.iter().map(|r| r.iter().map(|x| x * num_rational::BigRational::from_integer(kb.clone())).collect()).collect();
            let Some(inclusion) = rational_to_int(&scaled) else {
                return true;
            };
            let g = t.congruent(l);
            if g.as_matrix().entries().iter().any(|x| !x.is_multiple_of(&k2)) {
                return true;
            }
            let rows: Vec<Vec<BigInt>> = g.as_matrix().to_rows().into_iter().map(|r| r.into_iter().map(|x| x / &k2).collect()).collect();
            let gram = GramMatrix::new(IntMatrix::from_big_rows(rows).expect("square")).expect("symmetric");
            f(Superlattice { gram, inclusion, index: k })
        });
        if !go_on {
            return;
        }
    }
}

/// First integral superlattice M' of M, by increasing index up to
/// `index_bound`, with minimum at least `c1` and locally everywhere
/// primitively represented by S. Undecided local answers are skipped.
pub fn search_primitive_superlattice(
    s: &GramMatrix,
    m: &GramMatrix,
    c1: &BigInt,
    index_bound: u64,
) -> Result<Option<Superlattice>> {
    require_positive_definite(m)?;
    let one = BigInt::one();
    let mut found = None;
    let mut err = None;
    for k in 1..=index_bound {
        superlattices_of_index(m, k, &mut |cand| {
            let check = || -> Result<bool> {
                if Enumerator::new(&cand.gram)?.minimum() < *c1 {
                    return Ok(false);
                }
                let certs = represents_locally_everywhere(s, &cand.gram, &one)?;
                Ok(summarize(&certs) == LocalStatus::Representable)
            };
            match check() {
                Ok(true) => {
                    found = Some(cand);
                    false
                }
                Ok(false) => true,
                Err(e) => {
                    err = Some(e);
                    false
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}
