//! Kneser p-neighbors at an odd prime not dividing the determinant.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::isometry::{fingerprint, is_isometric_unchecked, Fingerprint};
use crate::arith::{check_prime, mod_inverse};
use crate::enumerate::lll_reduce;
use crate::error::{Error, Result};
use crate::exact::linalg::{column_hnf, require_positive_definite};
use crate::exact::{det, GramMatrix, IntMatrix};

pub(crate) fn check_neighbor_prime(s: &GramMatrix, p: u64) -> Result<()> {
    check_prime(p)?;
    if p == 2 || det(s).is_multiple_of(&BigInt::from(p)) {
        return Err(Error::UnsupportedNeighborPrime(p));
    }
    Ok(())
}

/// Representatives x of the lines of F_p^n (first nonzero entry 1) with
/// Q(x) = 0 mod p.
fn isotropic_lines(s: &GramMatrix, p: u64) -> Vec<Vec<i64>> {
    let n = s.rank();
    let pi = p as i64;
    let sm: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| s.get(i, j).mod_floor(&BigInt::from(p)).to_i64().unwrap()).collect())
        .collect();
    let mut out = Vec::new();
    for lead in 0..n {
        let free = n - lead - 1;
        let total = (p as u128).pow(free as u32);
        for code in 0..total {
            let mut x = vec![0i64; n];
            x[lead] = 1;
            let mut c = code;
            for xi in x.iter_mut().skip(lead + 1) {
                *xi = (c % p as u128) as i64;
                c /= p as u128;
            }
            let q: i64 = (0..n).map(|i| (0..n).map(|j| sm[i][j] * x[i] % pi * x[j]).sum::<i64>() % pi).sum();
            if q.rem_euclid(pi) == 0 {
                out.push(x);
            }
        }
    }
    out
}

/// The p-neighbor of S along the isotropic line spanned by x.
fn neighbor(s: &GramMatrix, x: &[i64], p: u64) -> GramMatrix {
    let n = s.rank();
    let pb = BigInt::from(p);
    let p2 = &pb * &pb;
    let mut x: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
    let sx = |x: &[BigInt]| -> Vec<BigInt> {
        (0..n).map(|i| (0..n).map(|j| s.get(i, j) * &x[j]).sum()).collect()
    };
    // make Q(x) = 0 mod p^2 by x += p * lambda * e_k
    let v = sx(&x);
    let k = (0..n).find(|&i| !v[i].is_multiple_of(&pb)).expect("p does not divide det S");
    let q = s.norm(&x);
    if !q.is_multiple_of(&p2) {
        let inv = mod_inverse(&(&v[k] * 2u32), &pb).expect("unit");
        let lambda = (-(&q / &pb) * inv).mod_floor(&pb);
        x[k] += &pb * lambda;
    }
    let v = sx(&x);
    debug_assert!(s.norm(&x).is_multiple_of(&p2));
    // generators of p * N: p * {y : B(x, y) = 0 mod p} and x
    let inv_k = mod_inverse(&v[k].mod_floor(&pb), &pb).expect("unit");
    let mut gens: Vec<Vec<BigInt>> = Vec::with_capacity(2 * n + 1);
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = &pb * &pb;
        gens.push(e);
        if i != k {
            let mut y = vec![BigInt::zero(); n];
            y[i] = pb.clone();
            y[k] = -(&v[i] * &inv_k).mod_floor(&pb) * &pb;
            gens.push(y);
        }
    }
    gens.push(x);
    let basis = column_hnf(&IntMatrix::from_columns(n, &gens));
    assert_eq!(basis.cols(), n);
    let g = s.congruent(&basis);
    let rows: Vec<Vec<BigInt>> = g
        .as_matrix()
        .to_rows()
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|e| {
                    assert!(e.is_multiple_of(&p2), "neighbor Gram must be integral");
                    e / &p2
                })
                .collect()
        })
        .collect();
    let gram = GramMatrix::new(IntMatrix::from_big_rows(rows).unwrap()).unwrap();
    lll_reduce(&gram).expect("positive definite").0
}

/// Sorted, isometry-deduplicated list of (fingerprint, form).
pub(crate) struct ClassList {
    pub classes: Vec<(Fingerprint, GramMatrix)>,
}

impl ClassList {
    pub fn new() -> Self {
        ClassList { classes: Vec::new() }
    }

    /// Index of the class isometric to `g`, if present.
    pub fn find(&self, fp: &Fingerprint, g: &GramMatrix) -> Result<Option<usize>> {
        for (i, (f, h)) in self.classes.iter().enumerate() {
            if f == fp && (h == g || is_isometric_unchecked(h, g)?.is_some()) {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    pub fn insert(&mut self, fp: Fingerprint, g: GramMatrix) -> Result<(usize, bool)> {
        if let Some(i) = self.find(&fp, &g)? {
            return Ok((i, false));
        }
        self.classes.push((fp, g));
        Ok((self.classes.len() - 1, true))
    }
}

/// All p-neighbors of S, deduplicated up to isometry, LLL-reduced.
pub fn p_neighbors(s: &GramMatrix, p: u64) -> Result<Vec<GramMatrix>> {
    require_positive_definite(s)?;
    check_neighbor_prime(s, p)?;
    Ok(neighbor_classes(s, p)?.classes.into_iter().map(|(_, g)| g).collect())
}

pub(crate) fn neighbor_classes(s: &GramMatrix, p: u64) -> Result<ClassList> {
    let lines = isotropic_lines(s, p);
    let mut remaining: Vec<(Fingerprint, GramMatrix)> = lines
        .par_iter()
        .map(|x| {
            let g = neighbor(s, x, p);
            Ok((fingerprint(&g)?, g))
        })
        .collect::<Result<_>>()?;
    // peel off one class at a time, testing the rest against it in parallel
    let mut list = ClassList::new();
    while !remaining.is_empty() {
        let (fp, g) = remaining.remove(0);
        remaining = remaining
            .into_par_iter()
            .map(|(f, h)| {
                let same = f == fp && (h == g || is_isometric_unchecked(&g, &h)?.is_some());
                Ok((!same).then_some((f, h)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        list.classes.push((fp, g));
    }
    Ok(list)
}
