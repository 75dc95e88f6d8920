//! Jordan splittings of integral lattices over Z_p.
//!
//! The elimination runs over the localization Z_(p) inside Q, so every
//! transformation is exact; only the reported unit blocks are truncated
//! modulo p^k.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{check_prime, int_rat, ord_p, pow_u64, reduce_p_integral};
use crate::error::{Error, Result};
use crate::exact::linalg::to_rational;
use crate::exact::{det, GramMatrix, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JordanComponent {
    /// The component is p^scale times a unimodular lattice.
    pub scale: i64,
    pub rank: usize,
    /// Unimodular Gram matrix, entries reduced modulo p^precision.
    pub unit_block: GramMatrix,
    /// For p = 2: whether the unit block is even. `None` at odd primes.
    pub even: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JordanSplitting {
    pub prime: u64,
    pub precision: u32,
    pub components: Vec<JordanComponent>,
}

/// Coarse local symbol used for genus consistency checks: for odd p it is
/// the complete invariant (scale, rank, Legendre symbol of the unit
/// determinant); at 2 it records (scale, rank, parity type) only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LocalSymbol(pub Vec<(i64, usize, i8)>);

impl JordanSplitting {
    pub fn reassemble(&self) -> GramMatrix {
        let blocks: Vec<GramMatrix> = self
            .components
            .iter()
            .map(|c| c.unit_block.scaled(&pow_u64(self.prime, c.scale as u32)))
            .collect();
        GramMatrix::block_diagonal(&blocks)
    }

    pub fn symbol(&self) -> LocalSymbol {
        let p = self.prime;
        LocalSymbol(
            self.components
                .iter()
                .map(|c| {
                    let tag = match c.even {
                        Some(even) => i8::from(even),
                        None => crate::arith::legendre(&det(&c.unit_block), p) as i8,
                    };
                    (c.scale, c.rank, tag)
                })
                .collect(),
        )
    }
}

struct Block {
    scale: i64,
    entries: Vec<Vec<BigRational>>,
}

fn ord(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        None
    } else {
        Some(ord_p(x, p).expect("prime checked"))
    }
}

/// e_dst += k e_src as a congruence on the whole matrix.
fn add(a: &mut [Vec<BigRational>], dst: usize, src: usize, k: &BigRational) {
    if k.is_zero() {
        return;
    }
    for row in a.iter_mut() {
        let t = &row[src] * k;
        row[dst] += t;
    }
    let src_row = a[src].clone();
    for (x, y) in a[dst].iter_mut().zip(src_row) {
        *x += y * k;
    }
}

pub fn jordan_decomposition(s: &GramMatrix, p: u64) -> Result<JordanSplitting> {
    check_prime(p)?;
    let d = det(s);
    if d.is_zero() {
        return Err(Error::Singular);
    }
    let det_ord = ord_p(&int_rat(&d), p)?;
    let precision = det_ord as u32 + 3;
    let mut a = to_rational(s.as_matrix());
    let mut remaining: Vec<usize> = (0..s.rank()).collect();
    let mut blocks: Vec<Block> = Vec::new();

    while !remaining.is_empty() {
        let mut min: Option<(i64, usize, usize)> = None;
        for (ii, &i) in remaining.iter().enumerate() {
            for &j in &remaining[ii..] {
                if let Some(v) = ord(&a[i][j], p) {
                    // prefer diagonal entries at equal valuation
                    let better = match min {
                        None => true,
                        Some((mv, mi, mj)) => v < mv || (v == mv && i == j && mi != mj),
                    };
                    if better {
                        min = Some((v, i, j));
                    }
                }
            }
        }
        let (v, i, j) = min.ok_or(Error::Singular)?;
        if i != j && p != 2 {
            // a_ii + 2 a_ij + a_jj has valuation exactly v since 2 is a unit
            add(&mut a, i, j, &BigRational::one());
        }
        if i == j || p != 2 {
            let piv = a[i][i].clone();
            for &k in &remaining {
                if k != i && !a[k][i].is_zero() {
                    let f = -(&a[k][i] / &piv);
                    add(&mut a, k, i, &f);
                }
            }
            blocks.push(Block { scale: v, entries: vec![vec![piv]] });
            remaining.retain(|&k| k != i);
        } else {
            // dyadic 2x2 block [[2a, b], [b, 2c]] * 2^v with ord(b) = v minimal
            let (aii, aij, ajj) = (a[i][i].clone(), a[i][j].clone(), a[j][j].clone());
            let det2 = &aii * &ajj - &aij * &aij;
            for &k in &remaining {
                if k == i || k == j {
                    continue;
                }
                let (x, y) = (a[k][i].clone(), a[k][j].clone());
                if x.is_zero() && y.is_zero() {
                    continue;
                }
                // (c1, c2) = (x, y) B^{-1}
                let c1 = (&x * &ajj - &y * &aij) / &det2;
                let c2 = (&y * &aii - &x * &aij) / &det2;
                add(&mut a, k, i, &-c1);
                add(&mut a, k, j, &-c2);
            }
            blocks.push(Block { scale: v, entries: vec![vec![aii, aij.clone()], vec![aij, ajj]] });
            remaining.retain(|&k| k != i && k != j);
        }
    }

    let modulus = pow_u64(p, precision);
    let mut components: Vec<JordanComponent> = Vec::new();
    blocks.sort_by_key(|b| b.scale);
    for group in blocks.chunk_by(|x, y| x.scale == y.scale) {
        let scale = group[0].scale;
        let unit = BigRational::from_integer(pow_u64(p, scale as u32));
        let reduced: Vec<GramMatrix> = group
            .iter()
            .map(|b| {
                let k = b.entries.len();
                let mut m = IntMatrix::zeros(k, k);
                for r in 0..k {
                    for c in 0..k {
                        m[(r, c)] = reduce_p_integral(&(&b.entries[r][c] / &unit), &modulus);
                    }
                }
                GramMatrix::new(m).expect("blocks are symmetric")
            })
            .collect();
        let unit_block = GramMatrix::block_diagonal(&reduced);
        let even = (p == 2).then(|| (0..unit_block.rank()).all(|t| unit_block.get(t, t).is_even()));
        components.push(JordanComponent { scale, rank: unit_block.rank(), unit_block, even });
    }
    let total: i64 = components.iter().map(|c| c.scale * c.rank as i64).sum();
    assert_eq!(total, det_ord, "Jordan scales must account for the determinant valuation");
    Ok(JordanSplitting { prime: p, precision, components })
}

/// Convenience: the unit-block determinant as an integer modulo p^precision.
pub fn unit_det(c: &JordanComponent, p: u64, precision: u32) -> BigInt {
    det(&c.unit_block).mod_floor(&pow_u64(p, precision))
}
