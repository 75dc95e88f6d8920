//! Global representations t(X) S X = T by column-wise backtracking.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::fincke_pohst::{Enumerator, Order};
use crate::error::{Error, Result};
use crate::exact::linalg::{integer_kernel, rational_inverse, require_positive_definite, saturate};
use crate::exact::{smith_normal_form, GramMatrix, IntMatrix};

/// A representation of the lattice with Gram `source` by the lattice with
/// Gram `target`, given by the n x m matrix `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Embedding {
    pub x: IntMatrix,
    #[serde(skip)]
    pub source: GramMatrix,
    #[serde(skip)]
    pub target: GramMatrix,
    #[serde(serialize_with = "crate::report::ser_big_vec")]
    pub elementary_divisors: Vec<BigInt>,
    #[serde(serialize_with = "crate::report::ser_big")]
    pub imprimitivity_bound: BigInt,
}

impl Embedding {
    /// Verifies `t(X) S X = T` exactly and computes the divisor data.
    pub fn new(target: &GramMatrix, source: &GramMatrix, x: IntMatrix) -> Result<Embedding> {
        if x.rows() != target.rank() || x.cols() != source.rank() {
            return Err(Error::Shape);
        }
        if target.congruent(&x) != *source {
            return Err(Error::Invalid("t(X) S X differs from the source Gram matrix".into()));
        }
        let snf = smith_normal_form(&x);
        if snf.rank() < x.cols() {
            return Err(Error::RankDeficient);
        }
        let bound = snf.divisors.last().cloned().unwrap_or_else(BigInt::one);
        Ok(Embedding {
            x,
            source: source.clone(),
            target: target.clone(),
            elementary_divisors: snf.divisors,
            imprimitivity_bound: bound,
        })
    }

    pub fn is_primitive(&self) -> bool {
        self.imprimitivity_bound.is_one()
    }

    /// Re-checks the defining identity.
    pub fn verify(&self) -> bool {
        self.target.congruent(&self.x) == self.source
    }
}

/// Largest elementary divisor of X: the exponent of saturation / image.
pub fn imprimitivity_bound(e: &Embedding) -> Result<BigInt> {
    let snf = smith_normal_form(&e.x);
    if snf.rank() < e.x.cols() {
        return Err(Error::RankDeficient);
    }
    Ok(snf.divisors.last().cloned().unwrap_or_else(BigInt::one))
}

/// Smallest c with c * (saturation) inside the column lattice of X,
/// computed from the coordinates of X in a saturation basis.
pub fn saturation_exponent(x: &IntMatrix) -> Result<BigInt> {
    let sat = saturate(x)?;
    // X = sat * C; solve column by column through the rows where sat is
    // invertible (its column HNF has pivots on an m x m minor)
    let m = x.cols();
    let pivots: Vec<usize> = {
        let mut rows = Vec::new();
        let mut col = 0;
        for r in 0..sat.rows() {
            if col < m && !sat[(r, col)].is_zero() {
                rows.push(r);
                col += 1;
            }
        }
        rows
    };
    let square = |a: &IntMatrix| {
        IntMatrix::from_big_rows(pivots.iter().map(|&r| a.row(r).to_vec()).collect()).unwrap()
    };
    let inv = rational_inverse(&square(&sat))?;
    let xs = square(x);
    // C = sat_P^{-1} X_P, and c must clear the denominators of C^{-1}
    let c: Vec<Vec<num_rational::BigRational>> = crate::exact::linalg::rat_mul(
        &inv,
        &crate::exact::linalg::to_rational(&xs),
    );
    let c_int = crate::exact::linalg::rational_to_int(&c).ok_or(Error::Invalid("non-integral coordinates".into()))?;
    let c_inv = rational_inverse(&c_int)?;
    Ok(c_inv.iter().flatten().fold(BigInt::one(), |acc, q| acc.lcm(q.denom())))
}

/// Backtracking over the remaining columns of X. Columns `0..fixed.len()`
/// are prescribed; each further column k ranges over vectors of norm
/// T_kk with the required inner products against earlier columns.
pub(crate) struct ColumnSearch<'a> {
    pub enumerator: &'a Enumerator,
    pub target: &'a GramMatrix,
    pub source: &'a GramMatrix,
    /// Only accept X whose elementary divisors all divide this.
    pub divisor_bound: Option<&'a BigInt>,
    /// Fix the sign of the first free column when nothing is prescribed.
    pub canonical_sign: bool,
}

impl ColumnSearch<'_> {
    pub fn run<F>(&self, fixed: Vec<Vec<BigInt>>, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Vec<BigInt>]) -> ControlFlow<()>,
    {
        let mut cols = fixed;
        let mut images: Vec<Vec<BigInt>> = cols.iter().map(|c| self.s_times(c)).collect();
        self.step(&mut cols, &mut images, f)
    }

    fn s_times(&self, v: &[BigInt]) -> Vec<BigInt> {
        let s = self.target.as_matrix();
        (0..s.rows()).map(|i| s.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    fn divisors_ok(&self, cols: &[Vec<BigInt>]) -> bool {
        let Some(c) = self.divisor_bound else {
            return true;
        };
        let x = IntMatrix::from_columns(self.target.rank(), cols);
        let snf = smith_normal_form(&x);
        snf.rank() == cols.len() && snf.divisors.iter().all(|d| c.is_multiple_of(d))
    }

    fn step<F>(&self, cols: &mut Vec<Vec<BigInt>>, images: &mut Vec<Vec<BigInt>>, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Vec<BigInt>]) -> ControlFlow<()>,
    {
        let k = cols.len();
        if k == self.source.rank() {
            return f(cols);
        }
        let norm = self.source.get(k, k).clone();
        if k == 0 {
            return self.enumerator.for_each(&norm, Order::OutsideIn, |v, q| {
                if *q != norm {
                    return ControlFlow::Continue(());
                }
                self.descend(cols, images, v.to_vec(), f)?;
                if self.canonical_sign {
                    return ControlFlow::Continue(());
                }
                self.descend(cols, images, v.iter().map(|x| -x).collect(), f)
            });
        }
        let wanted: Vec<BigInt> = (0..k).map(|j| self.source.get(j, k).clone()).collect();
        let fixed = images.clone();
        self.for_each_candidate(&fixed, &wanted, &norm, |col| self.descend(cols, images, col, f))
    }

    fn descend<F>(&self, cols: &mut Vec<Vec<BigInt>>, images: &mut Vec<Vec<BigInt>>, col: Vec<BigInt>, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Vec<BigInt>]) -> ControlFlow<()>,
    {
        cols.push(col);
        let mut r = ControlFlow::Continue(());
        if self.divisors_ok(cols) {
            images.push(self.s_times(&cols[cols.len() - 1]));
            r = self.step(cols, images, f);
            images.pop();
        }
        cols.pop();
        r
    }

    /// Calls `f` on every v with Q(v) = norm and (S x_j) . v = wanted_j.
    /// These are the t = 1 points of the lattice {(v, t) : (S x_j) . v =
    /// t wanted_j}, so only that lattice of rank n - k + 1 is enumerated,
    /// not the whole ellipsoid.
    fn for_each_candidate<F>(&self, images: &[Vec<BigInt>], wanted: &[BigInt], norm: &BigInt, mut f: F) -> ControlFlow<()>
    where
        F: FnMut(Vec<BigInt>) -> ControlFlow<()>,
    {
        let n = self.target.rank();
        let homogeneous = wanted.iter().all(Zero::is_zero);
        let rows = images
            .iter()
            .zip(wanted)
            .map(|(img, w)| {
                let mut row = img.clone();
                if !homogeneous {
                    row.push(-w);
                }
                row
            })
            .collect();
        let kernel = integer_kernel(&IntMatrix::from_big_rows(rows).expect("rows of equal length"));
        if kernel.cols() == 0 {
            return ControlFlow::Continue(());
        }
        // with wanted != 0 the t coordinate is determined by v, so the
        // projection to v is injective and the restricted form is definite
        let b = IntMatrix::from_big_rows((0..n).map(|i| kernel.row(i).to_vec()).collect()).expect("rows of equal length");
        let sub = Enumerator::new(&self.target.congruent(&b)).expect("restriction of a definite form");
        let apply = |row: &[BigInt], y: &[BigInt]| -> BigInt { row.iter().zip(y).map(|(a, c)| a * c).sum() };
        sub.for_each(norm, Order::OutsideIn, |y, q| {
            if q != norm {
                return ControlFlow::Continue(());
            }
            let v: Vec<BigInt> = (0..n).map(|i| apply(b.row(i), y)).collect();
            if homogeneous {
                // orthogonal to everything fixed, so both signs qualify
                let neg = v.iter().map(|x| -x).collect();
                f(v)?;
                return f(neg);
            }
            let t = apply(kernel.row(n), y);
            if t.is_one() {
                f(v)
            } else if (-t).is_one() {
                f(v.iter().map(|x| -x).collect())
            } else {
                ControlFlow::Continue(())
            }
        })
    }
}

fn check_pair(s: &GramMatrix, t: &GramMatrix) -> Result<()> {
    require_positive_definite(s)?;
    require_positive_definite(t)?;
    if t.rank() > s.rank() {
        return Err(Error::RankViolation { target: t.rank(), ambient: s.rank() });
    }
    Ok(())
}

/// All (or up to `limit`) X with t(X) S X = T whose elementary divisors
/// divide `c`, one representative per {X, -X}.
pub fn find_representations(s: &GramMatrix, t: &GramMatrix, c: &BigInt, limit: Option<usize>) -> Result<Vec<Embedding>> {
    let e = Enumerator::new(s)?;
    find_representations_with(&e, t, c, limit)
}

pub fn find_representations_with(e: &Enumerator, t: &GramMatrix, c: &BigInt, limit: Option<usize>) -> Result<Vec<Embedding>> {
    let s = e.gram();
    check_pair(s, t)?;
    let search = ColumnSearch { enumerator: e, target: s, source: t, divisor_bound: Some(c), canonical_sign: true };
    let mut out = Vec::new();
    let mut err = None;
    let _ = search.run(Vec::new(), &mut |cols| {
        match Embedding::new(s, t, IntMatrix::from_columns(s.rank(), cols)) {
            Ok(emb) => out.push(emb),
            Err(e) => {
                err = Some(e);
                return ControlFlow::Break(());
            }
        }
        if limit.is_some_and(|l| out.len() >= l) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

pub fn is_represented(s: &GramMatrix, t: &GramMatrix, c: &BigInt) -> Result<Option<Embedding>> {
    Ok(find_representations(s, t, c, Some(1))?.into_iter().next())
}
