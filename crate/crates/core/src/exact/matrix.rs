use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape);
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.as_ref().len() != c {
                return Err(Error::Shape);
            }
            data.extend(row.as_ref().iter().map(|&x| BigInt::from(x)));
        }
        Ok(IntMatrix { rows: r, cols: c, data })
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape);
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Builds an n x k matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(n, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), n);
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn column_vector(v: &[i64]) -> Self {
        let data = v.iter().map(|&x| BigInt::from(x)).collect();
        IntMatrix { rows: v.len(), cols: 1, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Columns `range` as a new matrix.
    pub fn select_columns(&self, cols: impl IntoIterator<Item = usize>) -> Self {
        let cols: Vec<usize> = cols.into_iter().collect();
        let mut m = Self::zeros(self.rows, cols.len());
        for (jj, &j) in cols.iter().enumerate() {
            for i in 0..self.rows {
                m[(i, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Horizontal concatenation.
    pub fn hconcat(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += k * col[src]
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    /// Entries as i64 if all fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        use num_traits::ToPrimitive;
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * &rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Matrices serialize as arrays of rows of decimal strings.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            self.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let rows = super::io::rows_from_json(&v).map_err(serde::de::Error::custom)?;
        IntMatrix::from_big_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// Gram matrix of a lattice: an integral symmetric matrix S with Q(x) = x^t S x.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GramMatrix {
    m: IntMatrix,
}

impl GramMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        if m.rows != m.cols || m.rows == 0 {
            return Err(Error::Shape);
        }
        for i in 0..m.rows {
            for j in 0..i {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
        }
        Ok(GramMatrix { m })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        GramMatrix { m: IntMatrix::identity(n) }
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let mut m = IntMatrix::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = BigInt::from(x);
        }
        GramMatrix { m }
    }

    pub fn diagonal_big(d: &[BigInt]) -> Self {
        let mut m = IntMatrix::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        GramMatrix { m }
    }

    /// Gram matrix of the E8 root lattice in the Bourbaki-ordered Cartan basis.
    pub fn e8() -> Self {
        let mut rows = [[0i64; 8]; 8];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 2;
        }
        // chain 1-3-4-5-6-7-8 with node 2 attached to node 4
        let edges = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
        for (a, b) in edges {
            rows[a][b] = -1;
            rows[b][a] = -1;
        }
        Self::from_rows(&rows).expect("E8 Gram is symmetric")
    }

    pub fn rank(&self) -> usize {
        self.m.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.m[(i, j)]
    }

    pub fn as_matrix(&self) -> &IntMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.m
    }

    /// x^t S y
    pub fn bilinear(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let n = self.rank();
        let mut acc = BigInt::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            let mut row = BigInt::zero();
            for j in 0..n {
                if !y[j].is_zero() {
                    row += &self.m[(i, j)] * &y[j];
                }
            }
            acc += &x[i] * row;
        }
        acc
    }

    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.bilinear(x, x)
    }

    /// t(B) S B for an n x k matrix B.
    pub fn congruent(&self, b: &IntMatrix) -> GramMatrix {
        let sb = &self.m * b;
        let g = &b.transpose() * &sb;
        GramMatrix { m: g }
    }

    /// Orthogonal sum of the given forms.
    pub fn block_diagonal(blocks: &[GramMatrix]) -> GramMatrix {
        let n: usize = blocks.iter().map(GramMatrix::rank).sum();
        let mut m = IntMatrix::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rank() {
                for j in 0..b.rank() {
                    m[(off + i, off + j)] = b.get(i, j).clone();
                }
            }
            off += b.rank();
        }
        GramMatrix { m }
    }

    pub fn scaled(&self, k: &BigInt) -> GramMatrix {
        let data = self.m.data.iter().map(|x| x * k).collect();
        GramMatrix { m: IntMatrix { rows: self.m.rows, cols: self.m.cols, data } }
    }

    pub fn is_even(&self) -> bool {
        use num_integer::Integer;
        (0..self.rank()).all(|i| self.get(i, i).is_even())
    }

    pub fn diagonal_entries(&self) -> Vec<BigInt> {
        (0..self.rank()).map(|i| self.get(i, i).clone()).collect()
    }
}

impl fmt::Debug for GramMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gram{:?}", self.m)
    }
}

impl fmt::Display for GramMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.rank())?;
        write!(f, "{}", self.m)
    }
}

impl Serialize for GramMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GramMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = IntMatrix::deserialize(d)?;
        GramMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

pub fn big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric() {
        assert_eq!(GramMatrix::from_rows(&[[1, 2], [3, 4]]), Err(Error::NotSymmetric(1, 0)));
        assert_eq!(GramMatrix::from_rows(&[vec![1, 2], vec![2]]), Err(Error::Shape));
    }

    #[test]
    fn congruence_and_norms() {
        let s = GramMatrix::from_rows(&[[2, 1], [1, 2]]).unwrap();
        let u = IntMatrix::from_rows(&[[1, 1], [0, 1]]).unwrap();
        let t = s.congruent(&u);
        assert_eq!(t, GramMatrix::from_rows(&[[2, 3], [3, 6]]).unwrap());
        assert_eq!(s.norm(&big_vec(&[1, -1])), BigInt::from(2));
    }

    #[test]
    fn e8_is_even_and_symmetric() {
        let e8 = GramMatrix::e8();
        assert!(e8.is_even());
        assert_eq!(e8.rank(), 8);
    }
}
