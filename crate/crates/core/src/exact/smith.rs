use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::matrix::IntMatrix;

/// Smith normal form `U X V = diag(divisors)` with unimodular `U`, `V`.
#[derive(Clone, Debug, Serialize)]
pub struct SmithForm {
    /// d_1 | d_2 | ... ; trailing zeros for rank-deficient input.
    #[serde(serialize_with = "crate::report::ser_big_vec")]
    pub divisors: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    #[serde(skip)]
    pub u_inv: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.divisors.iter().take_while(|d| !d.is_zero()).count()
    }

    /// The diagonal matrix U X V, materialized.
    pub fn diagonal(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.u.rows(), self.v.rows());
        for (i, x) in self.divisors.iter().enumerate() {
            d[(i, i)] = x.clone();
        }
        d
    }
}

struct Reducer {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
}

impl Reducer {
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_row_multiple(dst, src, k);
        self.u.add_row_multiple(dst, src, k);
        self.u_inv.add_col_multiple(src, dst, &-k);
    }

    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_col_multiple(dst, src, k);
        self.v.add_col_multiple(dst, src, k);
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                if best.map_or(true, |(bi, bj)| x.abs() < self.a[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn step(&mut self, t: usize) -> bool {
        let Some((i0, j0)) = self.min_entry(t) else {
            return false;
        };
        self.swap_rows(t, i0);
        self.swap_cols(t, j0);
        loop {
            let mut dirty = false;
            for i in t + 1..self.a.rows() {
                if self.a[(i, t)].is_zero() {
                    continue;
                }
                let q = self.a[(i, t)].div_floor(&self.a[(t, t)]);
                self.add_row(i, t, &-q);
                if !self.a[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..self.a.cols() {
                if self.a[(t, j)].is_zero() {
                    continue;
                }
                let q = self.a[(t, j)].div_floor(&self.a[(t, t)]);
                self.add_col(j, t, &-q);
                if !self.a[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // move the smallest remainder in row/column t onto the pivot
                let mut best = (t, t);
                for i in t + 1..self.a.rows() {
                    let x = &self.a[(i, t)];
                    if !x.is_zero() && x.abs() < self.a[best].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..self.a.cols() {
                    let x = &self.a[(t, j)];
                    if !x.is_zero() && x.abs() < self.a[best].abs() {
                        best = (t, j);
                    }
                }
                self.swap_rows(t, best.0);
                self.swap_cols(t, best.1);
                continue;
            }
            // divisibility of the remaining block
            let p = self.a[(t, t)].clone();
            let bad = (t + 1..self.a.rows())
                .flat_map(|i| (t + 1..self.a.cols()).map(move |j| (i, j)))
                .find(|&(i, j)| !self.a[(i, j)].is_multiple_of(&p));
            match bad {
                Some((i, _)) => self.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if self.a[(t, t)].is_negative() {
            self.negate_row(t);
        }
        true
    }
}

pub fn smith_normal_form(x: &IntMatrix) -> SmithForm {
    let (r, c) = (x.rows(), x.cols());
    let mut red = Reducer {
        a: x.clone(),
        u: IntMatrix::identity(r),
        u_inv: IntMatrix::identity(r),
        v: IntMatrix::identity(c),
    };
    let k = r.min(c);
    for t in 0..k {
        if !red.step(t) {
            break;
        }
    }
    let divisors = (0..k).map(|i| red.a[(i, i)].clone()).collect();
    SmithForm { divisors, u: red.u, v: red.v, u_inv: red.u_inv }
}

/// Elementary divisors only.
pub fn elementary_divisors(x: &IntMatrix) -> Vec<BigInt> {
    smith_normal_form(x).divisors
}
