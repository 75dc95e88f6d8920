//! Exact Fincke-Pohst enumeration.
//!
//! With d_i the leading principal minors of the reduced Gram matrix and
//! lambda_ji = d_{i+1} mu_ji the integral Gram-Schmidt coefficients,
//!
//!   Q(x) = sum_i y_i^2 / (d_i d_{i+1}),  y_i = d_{i+1} x_i + sum_{j>i} lambda_ji x_j,
//!
//! so after scaling by L = lcm(d_i d_{i+1}) every pruning test is an integer
//! comparison. The kernel is generic over the integer type; a machine-word
//! instantiation is used when a priori bounds rule out overflow.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::lll::{gram_schmidt, lll_reduce};
use crate::error::Result;
use crate::exact::linalg::leading_minors;
use crate::exact::{GramMatrix, IntMatrix};

/// Visiting order of the candidates at each level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// Ascending coordinate values.
    Ascending,
    /// Largest contributions first; finds vectors of a prescribed large norm
    /// quickly.
    OutsideIn,
}

/// Precomputed enumeration data for a positive definite form.
#[derive(Clone, Debug)]
pub struct Enumerator {
    gram: GramMatrix,
    reduced: GramMatrix,
    /// Columns: the reduced basis in original coordinates.
    basis: IntMatrix,
    d: Vec<BigInt>,
    lambda: Vec<Vec<BigInt>>,
    weights: Vec<BigInt>,
    scale: BigInt,
    adj_diag_max: BigInt,
}

impl Enumerator {
    pub fn new(s: &GramMatrix) -> Result<Self> {
        let (reduced, basis) = lll_reduce(s)?;
        let n = s.rank();
        let mut d = vec![BigInt::one()];
        d.extend(leading_minors(&reduced));
        let (_, mu) = gram_schmidt(&reduced.as_matrix().to_rows());
        let mut lambda = vec![vec![BigInt::zero(); n]; n];
        for j in 0..n {
            for i in 0..j {
                let l = &mu[j][i] * num_rational::BigRational::from_integer(d[i + 1].clone());
                debug_assert!(l.is_integer());
                lambda[j][i] = l.to_integer();
            }
        }
        let prods: Vec<BigInt> = (0..n).map(|i| &d[i] * &d[i + 1]).collect();
        let scale = prods.iter().fold(BigInt::one(), |acc, x| acc.lcm(x));
        let weights = prods.iter().map(|p| &scale / p).collect();
        // |x_i|^2 <= bound * (S^-1)_ii, with (S^-1)_ii = adj_ii / det
        let det = d[n].clone();
        let adj_diag_max = (0..n)
            .map(|i| {
                let minor = reduced.as_matrix().select_columns((0..n).filter(|&c| c != i));
                let rows: Vec<Vec<BigInt>> = (0..n)
                    .filter(|&r| r != i)
                    .map(|r| minor.row(r).to_vec())
                    .collect();
                if rows.is_empty() {
                    return BigInt::one();
                }
                crate::exact::det_square(&IntMatrix::from_big_rows(rows).unwrap())
            })
            .max()
            .unwrap_or_else(BigInt::one);
        let adj_diag_max = (adj_diag_max + &det - 1u32) / &det + 1u32;
        Ok(Enumerator { gram: s.clone(), reduced, basis, d, lambda, weights, scale, adj_diag_max })
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn reduced(&self) -> &GramMatrix {
        &self.reduced
    }

    pub fn reduced_basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// Calls `f(x, Q(x))` for every nonzero `x` (original coordinates) with
    /// `Q(x) <= bound`, one representative per `{x, -x}`, canonicalized so
    /// the first nonzero coordinate is positive.
    pub fn for_each<F>(&self, bound: &BigInt, order: Order, mut f: F) -> ControlFlow<()>
    where
        F: FnMut(&[BigInt], &BigInt) -> ControlFlow<()>,
    {
        if !bound.is_positive() {
            return ControlFlow::Continue(());
        }
        let n = self.d.len() - 1;
        let budget = &self.scale * bound;
        let x_max = (bound * &self.adj_diag_max).sqrt() + 1u32;
        let lam_max = self.lambda.iter().flatten().map(|l| l.abs()).max().unwrap_or_default();
        let d_max = self.d.iter().max().cloned().unwrap_or_default();
        let coeff = lam_max.max(d_max) * BigInt::from(n + 1);
        let small = budget.bits() < 100 && (coeff * &x_max).bits() < 100;
        let mut emit = |xr: &[BigInt], norm_scaled: BigInt| {
            let mut v: Vec<BigInt> = (0..n)
                .map(|r| (0..n).map(|c| &self.basis[(r, c)] * &xr[c]).sum())
                .collect();
            if v.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
                for x in v.iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            let norm = norm_scaled / &self.scale;
            debug_assert_eq!(norm, self.gram.norm(&v));
            f(&v, &norm)
        };
        if small {
            let cast = |x: &BigInt| x.to_i128().expect("bounded");
            let data = Kernel {
                d: self.d.iter().map(cast).collect(),
                lambda: self.lambda.iter().map(|r| r.iter().map(cast).collect()).collect(),
                weights: self.weights.iter().map(cast).collect(),
            };
            data.run(cast(&budget), order, &mut |x: &[i128], s: i128| {
                let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
                emit(&xb, BigInt::from(s))
            })
        } else {
            let data = Kernel { d: self.d.clone(), lambda: self.lambda.clone(), weights: self.weights.clone() };
            data.run(budget, order, &mut |x: &[BigInt], s: BigInt| emit(x, s))
        }
    }

    /// All vectors (up to sign) with `Q(x) = t`.
    pub fn vectors_of_norm(&self, t: &BigInt) -> Vec<Vec<BigInt>> {
        let mut out = Vec::new();
        let _ = self.for_each(t, Order::Ascending, |v, q| {
            if q == t {
                out.push(v.to_vec());
            }
            ControlFlow::Continue(())
        });
        out.sort();
        out
    }

    /// All vectors (up to sign) with `0 < Q(x) <= bound`, with their norms.
    pub fn short_vectors(&self, bound: &BigInt) -> Vec<(Vec<BigInt>, BigInt)> {
        let mut out = Vec::new();
        let _ = self.for_each(bound, Order::Ascending, |v, q| {
            out.push((v.to_vec(), q.clone()));
            ControlFlow::Continue(())
        });
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// The minimum: the smallest diagonal entry of the reduced form bounds
    /// it from above, so one enumeration at that bound suffices.
    pub fn minimum(&self) -> BigInt {
        let n = self.reduced.rank();
        let bound = (0..n).map(|i| self.reduced.get(i, i).clone()).min().expect("rank > 0");
        let mut best = bound.clone();
        let _ = self.for_each(&bound, Order::Ascending, |_, q| {
            if *q < best {
                best = q.clone();
            }
            ControlFlow::Continue(())
        });
        best
    }
}

struct Kernel<T> {
    d: Vec<T>,
    lambda: Vec<Vec<T>>,
    weights: Vec<T>,
}

impl<T> Kernel<T>
where
    T: Integer + Signed + Roots + Clone,
{
    fn run<F>(&self, budget: T, order: Order, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[T], T) -> ControlFlow<()>,
    {
        let n = self.d.len() - 1;
        let mut x = vec![T::zero(); n];
        self.level(n - 1, budget.clone(), &budget, &mut x, true, order, f)
    }

    #[allow(clippy::too_many_arguments)]
    fn level<F>(
        &self,
        i: usize,
        rem: T,
        budget: &T,
        x: &mut [T],
        all_zero_above: bool,
        order: Order,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[T], T) -> ControlFlow<()>,
    {
        let n = x.len();
        let mut s = T::zero();
        for j in i + 1..n {
            if !x[j].is_zero() {
                s = s + self.lambda[j][i].clone() * x[j].clone();
            }
        }
        let di = &self.d[i + 1];
        let w = &self.weights[i];
        let r = (rem.clone() / w.clone()).sqrt();
        // d_i x + s in [-r, r]
        let lo = div_ceil(&(-r.clone() - s.clone()), di);
        let hi = (r - s.clone()).div_floor(di);
        let mut lo = lo;
        if all_zero_above && lo < T::zero() {
            lo = T::zero();
        }
        if lo > hi {
            return ControlFlow::Continue(());
        }
        let visit = |xi: T, x: &mut [T], f: &mut F| -> ControlFlow<()> {
            let y = di.clone() * xi.clone() + s.clone();
            let used = w.clone() * y.clone() * y;
            if used > rem {
                return ControlFlow::Continue(());
            }
            let left = rem.clone() - used;
            x[i] = xi.clone();
            let zero_here = all_zero_above && xi.is_zero();
            let out = if i == 0 {
                if zero_here {
                    ControlFlow::Continue(())
                } else {
                    f(x, budget.clone() - left)
                }
            } else {
                self.level(i - 1, left, budget, x, zero_here, order, f)
            };
            x[i] = T::zero();
            out
        };
        match order {
            Order::Ascending => {
                let mut xi = lo;
                while xi <= hi {
                    visit(xi.clone(), x, f)?;
                    xi = xi + T::one();
                }
            }
            Order::OutsideIn => {
                let (mut a, mut b) = (lo, hi);
                let mut take_low = true;
                while a <= b {
                    // alternate by distance of y from zero
                    let ya = (di.clone() * a.clone() + s.clone()).abs();
                    let yb = (di.clone() * b.clone() + s.clone()).abs();
                    let pick_low = if ya == yb { take_low } else { ya > yb };
                    take_low = !take_low;
                    if pick_low {
                        visit(a.clone(), x, f)?;
                        a = a + T::one();
                    } else {
                        visit(b.clone(), x, f)?;
                        b = b - T::one();
                    }
                }
            }
        }
        ControlFlow::Continue(())
    }
}

fn div_ceil<T: Integer + Clone>(a: &T, b: &T) -> T {
    let (q, r) = a.div_mod_floor(b);
    if r.is_zero() {
        q
    } else {
        q + T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(s: &GramMatrix, t: i64) -> usize {
        Enumerator::new(s).unwrap().vectors_of_norm(&BigInt::from(t)).len()
    }

    #[test]
    fn documented_counts() {
        assert_eq!(count(&GramMatrix::identity(2), 1), 2);
        assert_eq!(count(&GramMatrix::identity(4), 2), 12);
        assert_eq!(count(&GramMatrix::e8(), 2), 120);
        assert_eq!(count(&GramMatrix::e8(), 4), 1080);
    }

    #[test]
    fn minima() {
        let m = |s: &GramMatrix| Enumerator::new(s).unwrap().minimum();
        assert_eq!(m(&GramMatrix::identity(6)), BigInt::from(1));
        assert_eq!(m(&GramMatrix::e8()), BigInt::from(2));
        assert_eq!(m(&GramMatrix::diagonal(&[5, 7])), BigInt::from(5));
    }

    #[test]
    fn outputs_are_canonical_and_exact() {
        let s = GramMatrix::from_rows(&[[3, 1, 1], [1, 4, -1], [1, -1, 5]]).unwrap();
        let e = Enumerator::new(&s).unwrap();
        let vs = e.short_vectors(&BigInt::from(12));
        for (v, q) in &vs {
            assert_eq!(&s.norm(v), q);
            assert!(v.iter().find(|x| !x.is_zero()).unwrap().is_positive());
        }
        let mut keys: Vec<_> = vs.iter().map(|(v, _)| v.clone()).collect();
        keys.dedup();
        assert_eq!(keys.len(), vs.len());
    }

    #[test]
    fn early_exit_outside_in() {
        let e = Enumerator::new(&GramMatrix::identity(8)).unwrap();
        let mut found = None;
        let _ = e.for_each(&BigInt::from(40), Order::OutsideIn, |v, q| {
            if *q == BigInt::from(40) {
                found = Some(v.to_vec());
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        let v = found.unwrap();
        assert_eq!(GramMatrix::identity(8).norm(&v), BigInt::from(40));
    }
}
