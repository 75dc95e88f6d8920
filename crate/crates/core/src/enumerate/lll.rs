//! LLL reduction of a positive definite Gram matrix in exact integer
//! arithmetic, delta = 3/4.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::exact::linalg::require_positive_definite;
use crate::exact::{GramMatrix, IntMatrix};

/// Gram-Schmidt squared norms `b` and coefficients `mu` of a Gram matrix.
pub(crate) fn gram_schmidt(g: &[Vec<BigInt>]) -> (Vec<BigRational>, Vec<Vec<BigRational>>) {
    let n = g.len();
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut b = vec![BigRational::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut acc = BigRational::from_integer(g[i][j].clone());
            for l in 0..j {
                acc -= &mu[j][l] * &mu[i][l] * &b[l];
            }
            mu[i][j] = acc / &b[j];
        }
        let mut acc = BigRational::from_integer(g[i][i].clone());
        for l in 0..i {
            acc -= &mu[i][l] * &mu[i][l] * &b[l];
        }
        b[i] = acc;
        mu[i][i] = BigRational::one();
    }
    (b, mu)
}

/// Nearest integer to a / b (b > 0), ties toward +infinity.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    (a * 2u32 + b).div_floor(&(b * 2u32))
}

/// Integral LLL on a Gram matrix (all quantities are the integers
/// d_i = det of the leading i x i block and lambda_ij = d_j mu_ij).
/// Indices are 1-based internally, with d[0] = 1.
struct State {
    g: Vec<Vec<BigInt>>,
    u: IntMatrix,
    d: Vec<BigInt>,
    lambda: Vec<Vec<BigInt>>,
}

impl State {
    /// b_k -= q b_l on the Gram matrix and the transform (0-based).
    fn sub_multiple(&mut self, k: usize, l: usize, q: &BigInt) {
        let n = self.g.len();
        let mq = -q;
        self.u.add_col_multiple(k, l, &mq);
        for r in 0..n {
            let t = &self.g[r][l] * &mq;
            self.g[r][k] += t;
        }
        for c in 0..n {
            let t = &self.g[l][c] * &mq;
            self.g[k][c] += t;
        }
    }

    fn red(&mut self, k: usize, l: usize) {
        let (lam, dl) = (&self.lambda[k][l], &self.d[l]);
        if (lam * 2u32).magnitude() <= dl.magnitude() {
            return;
        }
        let q = round_div(lam, dl);
        self.sub_multiple(k - 1, l - 1, &q);
        self.lambda[k][l] -= &q * &self.d[l];
        for i in 1..l {
            let t = &q * &self.lambda[l][i];
            self.lambda[k][i] -= t;
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.u.swap_cols(k - 1, k - 2);
        self.g.swap(k - 1, k - 2);
        for row in self.g.iter_mut() {
            row.swap(k - 1, k - 2);
        }
        for j in 1..k - 1 {
            let t = std::mem::take(&mut self.lambda[k][j]);
            self.lambda[k][j] = std::mem::replace(&mut self.lambda[k - 1][j], t);
        }
        let lam = self.lambda[k][k - 1].clone();
        let b = (&self.d[k - 2] * &self.d[k] + &lam * &lam) / &self.d[k - 1];
        for i in k + 1..=kmax {
            let t = self.lambda[i][k].clone();
            self.lambda[i][k] = (&self.d[k] * &self.lambda[i][k - 1] - &lam * &t) / &self.d[k - 1];
            self.lambda[i][k - 1] = (&b * &t + &lam * &self.lambda[i][k]) / &self.d[k];
        }
        self.d[k - 1] = b;
    }
}

/// Returns `(S', U)` with `S' = U^t S U` LLL-reduced (delta = 3/4) and `U`
/// unimodular.
pub fn lll_reduce(s: &GramMatrix) -> Result<(GramMatrix, IntMatrix)> {
    require_positive_definite(s)?;
    let n = s.rank();
    let mut st = State {
        g: s.as_matrix().to_rows(),
        u: IntMatrix::identity(n),
        d: vec![BigInt::zero(); n + 1],
        lambda: vec![vec![BigInt::zero(); n + 1]; n + 1],
    };
    st.d[0] = BigInt::one();
    st.d[1] = st.g[0][0].clone();
    let (mut k, mut kmax) = (2, 1);
    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = st.g[k - 1][j - 1].clone();
                for i in 1..j {
                    u = (&st.d[i] * u - &st.lambda[k][i] * &st.lambda[j][i]) / &st.d[i - 1];
                }
                if j < k {
                    st.lambda[k][j] = u;
                } else {
                    st.d[k] = u;
                }
            }
        }
        loop {
            st.red(k, k - 1);
            // Lovasz: 4 d_k d_{k-2} >= 3 d_{k-1}^2 - 4 lambda^2
            let lhs = &st.d[k] * &st.d[k - 2] * 4u32;
            let rhs = &st.d[k - 1] * &st.d[k - 1] * 3u32 - &st.lambda[k][k - 1] * &st.lambda[k][k - 1] * 4u32;
            if lhs < rhs {
                st.swap(k, kmax);
                k = (k - 1).max(2);
            } else {
                for l in (1..k - 1).rev() {
                    st.red(k, l);
                }
                k += 1;
                break;
            }
        }
    }
    let reduced = GramMatrix::new(IntMatrix::from_big_rows(st.g)?)?;
    Ok((reduced, st.u))
}
