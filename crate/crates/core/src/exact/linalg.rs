use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::matrix::{GramMatrix, IntMatrix};
use super::smith::smith_normal_form;
use crate::error::{Error, Result};

/// Fraction-free (Bareiss) determinant of a square integer matrix.
pub fn det_square(m: &IntMatrix) -> BigInt {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn det(s: &GramMatrix) -> BigInt {
    det_square(s.as_matrix())
}

/// Leading principal minors D_1, ..., D_n. Stops early (shorter output) at
/// the first vanishing minor.
pub fn leading_minors(s: &GramMatrix) -> Vec<BigInt> {
    let n = s.rank();
    let mut a = s.as_matrix().to_rows();
    let mut prev = BigInt::one();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if a[k][k].is_zero() {
            out.push(BigInt::zero());
            return out;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
        out.push(prev.clone());
    }
    out
}

/// Sylvester's criterion.
pub fn is_positive_definite(s: &GramMatrix) -> bool {
    let minors = leading_minors(s);
    minors.len() == s.rank() && minors.iter().all(Signed::is_positive)
}

pub fn require_positive_definite(s: &GramMatrix) -> Result<()> {
    if is_positive_definite(s) {
        Ok(())
    } else {
        Err(Error::NotPositiveDefinite)
    }
}

/// Column Hermite normal form: a basis of the lattice spanned by the columns,
/// in lower echelon form with positive pivots and reduced entries left of
/// each pivot. Zero columns are dropped.
pub fn column_hnf(gens: &IntMatrix) -> IntMatrix {
    let mut a = gens.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivot_col = 0;
    for r in 0..rows {
        if pivot_col == cols {
            break;
        }
        // gcd-combine all entries of row r in columns >= pivot_col
        loop {
            let nz: Vec<usize> = (pivot_col..cols).filter(|&j| !a[(r, j)].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let best = *nz.iter().min_by_key(|&&j| a[(r, j)].abs()).unwrap();
            a.swap_cols(pivot_col, best);
            let mut done = true;
            for j in pivot_col + 1..cols {
                if a[(r, j)].is_zero() {
                    continue;
                }
                let q = a[(r, j)].div_floor(&a[(r, pivot_col)]);
                a.add_col_multiple(j, pivot_col, &-q);
                if !a[(r, j)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[(r, pivot_col)].is_zero() {
            continue;
        }
        if a[(r, pivot_col)].is_negative() {
            a.negate_col(pivot_col);
        }
        for j in 0..pivot_col {
            let q = a[(r, j)].div_floor(&a[(r, pivot_col)]);
            a.add_col_multiple(j, pivot_col, &-q);
        }
        pivot_col += 1;
    }
    a.select_columns(0..pivot_col)
}

pub fn column_rank(b: &IntMatrix) -> usize {
    smith_normal_form(b).rank()
}

/// Basis of the saturation (Q-span of the columns intersected with Z^n).
pub fn saturate(b: &IntMatrix) -> Result<IntMatrix> {
    let snf = smith_normal_form(b);
    let r = snf.rank();
    if r < b.cols() {
        return Err(Error::RankDeficient);
    }
    Ok(column_hnf(&snf.u_inv.select_columns(0..r)))
}

/// Integer kernel {v in Z^c : A v = 0} of an r x c matrix, as columns.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    column_hnf(&snf.v.select_columns(r..a.cols()))
}

/// Basis of {v in Z^n : B^t S v = 0}, which is automatically saturated.
pub fn orthogonal_complement(s: &GramMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if b.rows() != s.rank() {
        return Err(Error::Shape);
    }
    if det(&s.congruent(b)).is_zero() {
        return Err(Error::DegenerateSubspace);
    }
    let a = &b.transpose() * s.as_matrix();
    Ok(integer_kernel(&a))
}

/// Dense rational matrix used for the few places needing field arithmetic.
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn to_rational(m: &IntMatrix) -> RatMatrix {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect()
}

/// Inverse of a nonsingular square integer matrix over Q.
pub fn rational_inverse(m: &IntMatrix) -> Result<RatMatrix> {
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::Shape);
    }
    let mut a = to_rational(m);
    let mut inv: RatMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(Error::Singular)?;
        a.swap(k, p);
        inv.swap(k, p);
        let piv = a[k][k].clone();
        for j in 0..n {
            a[k][j] = &a[k][j] / &piv;
            inv[k][j] = &inv[k][j] / &piv;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in 0..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
                let t = &f * &inv[k][j];
                inv[i][j] -= t;
            }
        }
    }
    Ok(inv)
}

pub fn rat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let (n, k) = (a.len(), b.len());
    let c = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..c)
                .map(|j| (0..k).fold(BigRational::zero(), |acc, l| acc + &a[i][l] * &b[l][j]))
                .collect()
        })
        .collect()
}

pub fn rat_transpose(a: &RatMatrix) -> RatMatrix {
    let c = a.first().map_or(0, Vec::len);
    (0..c).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Converts a rational matrix with integral entries back to integers.
pub fn rational_to_int(a: &RatMatrix) -> Option<IntMatrix> {
    let rows: Option<Vec<Vec<BigInt>>> = a
        .iter()
        .map(|r| r.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect())
        .collect();
    IntMatrix::from_big_rows(rows?).ok()
}

/// Rational congruence diagonalization: returns `(d, P)` with
/// `P^t S P = diag(d)` and all `d_i` nonzero.
pub fn diagonalize_over_q_with_transform(s: &GramMatrix) -> Result<(Vec<BigRational>, RatMatrix)> {
    let n = s.rank();
    let mut a = to_rational(s.as_matrix());
    let mut p: RatMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    // congruence by elementary column op col[dst] += k col[src] (and the row twin)
    let add = |a: &mut RatMatrix, p: &mut RatMatrix, dst: usize, src: usize, k: &BigRational| {
        for row in a.iter_mut() {
            let t = &row[src] * k;
            row[dst] += t;
        }
        let src_row = a[src].clone();
        for (x, y) in a[dst].iter_mut().zip(src_row) {
            *x += y * k;
        }
        for row in p.iter_mut() {
            let t = &row[src] * k;
            row[dst] += t;
        }
    };
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                a.swap(k, i);
                for row in a.iter_mut() {
                    row.swap(k, i);
                }
                for row in p.iter_mut() {
                    row.swap(k, i);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // x_k = u + v, x_j = u - v: the new diagonal entry is 2 a_kj
                add(&mut a, &mut p, k, j, &BigRational::one());
                let minus_half = -(BigRational::one() / BigRational::from_integer(BigInt::from(2)));
                add(&mut a, &mut p, j, k, &minus_half);
            } else {
                return Err(Error::Singular);
            }
        }
        if a[k][k].is_zero() {
            return Err(Error::Singular);
        }
        let piv = a[k][k].clone();
        for j in k + 1..n {
            if a[k][j].is_zero() {
                continue;
            }
            let f = -(&a[k][j] / &piv);
            add(&mut a, &mut p, j, k, &f);
        }
    }
    let d: Vec<BigRational> = (0..n).map(|i| a[i][i].clone()).collect();
    if d.iter().any(Zero::is_zero) {
        return Err(Error::Singular);
    }
    Ok((d, p))
}

pub fn diagonalize_over_q(s: &GramMatrix) -> Result<Vec<BigRational>> {
    Ok(diagonalize_over_q_with_transform(s)?.0)
}

/// Integer vector dot product.
pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}
