//! Independent brute-force oracles and random instance generators shared by
//! the integration tests. Everything here uses machine integers and naive
//! algorithms, none of the library's machinery.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use quadform::{GramMatrix, IntMatrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Mat = Vec<Vec<i64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gram(m: &Mat) -> GramMatrix {
    GramMatrix::from_rows(m).unwrap()
}

pub fn int_matrix(m: &Mat) -> IntMatrix {
    IntMatrix::from_rows(m).unwrap()
}

pub fn to_mat(m: &IntMatrix) -> Mat {
    m.to_i64_rows().unwrap()
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Determinant by cofactor expansion along the first row.
pub fn det_cofactor(m: &Mat) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Mat = m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] as i128 * det_cofactor(&minor)
        })
        .sum()
}

fn principal(m: &Mat, k: usize) -> Mat {
    m[..k].iter().map(|r| r[..k].to_vec()).collect()
}

/// Positive definiteness by Sylvester's criterion.
pub fn is_pd_oracle(m: &Mat) -> bool {
    (1..=m.len()).all(|k| det_cofactor(&principal(m, k)) > 0)
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize, lo: i64, hi: i64) -> Mat {
    let mut m = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = rng.gen_range(lo..=hi);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

pub fn random_pd(rng: &mut impl Rng, n: usize, lo: i64, hi: i64) -> Mat {
    loop {
        let m = random_symmetric(rng, n, lo, hi);
        if is_pd_oracle(&m) {
            return m;
        }
    }
}

/// Diagonally dominant (hence positive definite) with off-diagonal
/// entries in [-r, r].
pub fn random_dominant(rng: &mut impl Rng, n: usize, r: i64) -> Mat {
    let mut m = random_symmetric(rng, n, -r, r);
    for i in 0..n {
        let off: i64 = (0..n).filter(|&j| j != i).map(|j| m[i][j].abs()).sum();
        m[i][i] = off + rng.gen_range(1..=r.max(1));
    }
    m
}

/// Random unimodular matrix with entries bounded by `r`, built from
/// elementary operations.
pub fn random_unimodular(rng: &mut impl Rng, n: usize, r: i64) -> Mat {
    let mut u: Mat = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    for _ in 0..3 * n {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a == b {
            if rng.gen_bool(0.3) {
                u.iter_mut().for_each(|row| row[a] = -row[a]);
            }
            continue;
        }
        let k = rng.gen_range(-1..=1);
        let next: Mat = u.iter().map(|row| {
            let mut row = row.clone();
            row[a] += k * row[b];
            row
        }).collect();
        if next.iter().flatten().all(|x| x.abs() <= r) {
            u = next;
        }
    }
    u
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    (0..a.len()).map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

pub fn transpose(a: &Mat) -> Mat {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// t(X) S X.
pub fn congruent(s: &Mat, x: &Mat) -> Mat {
    mat_mul(&transpose(x), &mat_mul(s, x))
}

pub fn ord(x: i128, p: i128) -> u32 {
    assert!(x != 0);
    let mut x = x;
    let mut k = 0;
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    k
}

/// Valuation of x mod p^k, capped at k.
fn ord_mod(x: i128, p: i128, k: u32) -> u32 {
    let q = p.pow(k);
    let x = x.rem_euclid(q);
    if x == 0 {
        k
    } else {
        ord(x, p)
    }
}

/// t is a sum of three squares iff it is not of the form 4^a (8b + 7).
pub fn three_squares(t: u64) -> bool {
    let mut t = t;
    while t > 0 && t % 4 == 0 {
        t /= 4;
    }
    t % 8 != 7
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// All k x k minors of an r x c matrix.
pub fn minors(m: &Mat, k: usize) -> Vec<i128> {
    let (r, c) = (m.len(), m[0].len());
    let mut out = Vec::new();
    for rows in combinations(r, k) {
        for cols in combinations(c, k) {
            let sub: Mat = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j]).collect()).collect();
            out.push(det_cofactor(&sub));
        }
    }
    out
}

/// gcd of all k x k minors.
pub fn minor_gcd(m: &Mat, k: usize) -> i128 {
    minors(m, k).into_iter().fold(0i128, |g, x| g.gcd(&x))
}

/// Nonzero vectors up to sign (first nonzero coordinate positive) with
/// norm at most `bound`, by scanning the box |x_i| <= sqrt(bound (S^-1)_ii).
pub fn box_vectors(s: &Mat, bound: i64) -> Vec<(Vec<i64>, i64)> {
    let n = s.len();
    let det = det_cofactor(s);
    let radius: Vec<i64> = (0..n)
        .map(|i| {
            let minor: Mat = (0..n).filter(|&r| r != i).map(|r| (0..n).filter(|&c| c != i).map(|c| s[r][c]).collect()).collect();
            let adj = det_cofactor(&minor);
            ((bound as i128 * adj) / det).sqrt() as i64
        })
        .collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = radius.iter().map(|r| -r).collect();
    loop {
        let norm: i64 = (0..n).map(|i| (0..n).map(|j| s[i][j] * x[i] * x[j]).sum::<i64>()).sum();
        let first = x.iter().find(|&&v| v != 0);
        if norm <= bound && first.is_some_and(|&v| v > 0) {
            out.push((x.clone(), norm));
        }
        let mut i = 0;
        while i < n && x[i] == radius[i] {
            x[i] = -radius[i];
            i += 1;
        }
        if i == n {
            break;
        }
        x[i] += 1;
    }
    out.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    out
}

/// Depth-first search for a primitive zero of f modulo p^k, k <= max_level,
/// accepted once `accept(x, k)` holds. Level-1 candidates are normalized so
/// the first coordinate that is a unit equals 1.
fn primitive_zero_search(
    dim: usize,
    p: i128,
    max_level: u32,
    f: &dyn Fn(&[i128]) -> i128,
    accept: &dyn Fn(&[i128], u32) -> bool,
) -> bool {
    fn rec(
        x: &mut Vec<i128>,
        k: u32,
        p: i128,
        max_level: u32,
        f: &dyn Fn(&[i128]) -> i128,
        accept: &dyn Fn(&[i128], u32) -> bool,
    ) -> bool {
        if accept(x, k) {
            return true;
        }
        if k == max_level {
            return false;
        }
        let step = p.pow(k);
        let modulus = step * p;
        let dim = x.len();
        let total = p.pow(dim as u32);
        for code in 0..total {
            let mut y = x.clone();
            let mut c = code;
            for yi in y.iter_mut() {
                *yi += (c % p) * step;
                c /= p;
            }
            if k == 0 {
                // projective normalization at level 1
                match y.iter().find(|&&v| v != 0) {
                    Some(&1) => {}
                    _ => continue,
                }
            }
            if f(&y).rem_euclid(modulus) != 0 {
                continue;
            }
            if rec(&mut y, k + 1, p, max_level, f, accept) {
                return true;
            }
        }
        false
    }
    rec(&mut vec![0; dim], 0, p, max_level, f, accept)
}

/// Hilbert symbol (a, b)_p from solvability of z^2 = a x^2 + b y^2: a
/// primitive zero modulo p^k whose gradient has valuation v with
/// 2v + 1 <= k lifts by Hensel, and every p-adic zero yields one with
/// k = 3 + 2 max(ord a, ord b) once squares of p are removed.
pub fn hilbert_oracle(a: i64, b: i64, p: i64) -> i8 {
    let p = p as i128;
    let strip = |mut x: i128| {
        while x % (p * p) == 0 {
            x /= p * p;
        }
        x
    };
    let (a, b) = (strip(a as i128), strip(b as i128));
    let k = 3 + 2 * ord(a, p).max(ord(b, p));
    let f = move |x: &[i128]| a * x[0] * x[0] + b * x[1] * x[1] - x[2] * x[2];
    let accept = move |x: &[i128], level: u32| {
        if level == 0 {
            return false;
        }
        let v = [2 * a * x[0], 2 * b * x[1], 2 * x[2]].iter().map(|&g| ord_mod(g, p, level)).min().unwrap();
        2 * v < level
    };
    if primitive_zero_search(3, p, k, &f, &accept) {
        1
    } else {
        -1
    }
}

/// Isotropy of the nonsingular form S over Q_p by primitive zero search; a
/// primitive zero has gradient valuation at most ord 2 + ord det S.
pub fn isotropic_oracle(s: &Mat, p: i64) -> bool {
    let p = p as i128;
    let n = s.len();
    let delta = (p == 2) as u32;
    let k = 2 * (delta + ord(det_cofactor(s), p)) + 1;
    let sm: Vec<Vec<i128>> = s.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let sm2 = sm.clone();
    let f = move |x: &[i128]| (0..n).map(|i| (0..n).map(|j| sm[i][j] * x[i] * x[j]).sum::<i128>()).sum::<i128>();
    let accept = move |x: &[i128], level: u32| {
        if level == 0 {
            return false;
        }
        let v = (0..n)
            .map(|i| ord_mod(2 * (0..n).map(|j| sm2[i][j] * x[j]).sum::<i128>(), p, level))
            .min()
            .unwrap();
        2 * v < level
    };
    primitive_zero_search(n, p, k, &f, &accept)
}

/// Existence of X over Z_p with t(X) S X = T and all elementary divisors
/// dividing c, by digit-wise exhaustive search.
///
/// A solution X mod p^k lifts (Newton on the symmetric system) when
/// k > 2(e + ord 2), where p^e is the gcd of the m x m minors of t(X) S;
/// the corrections are divisible by p^(k - e - ord 2), so all minors of X,
/// hence its elementary divisors, are unchanged once k - e - ord 2 exceeds
/// their valuations. Since e <= ord det T and the minor valuations of an
/// admissible X are at most m ord c, every Z_p solution is detected by
/// level 2(ord 2 + ord det T) + 2 m ord c + 1; two further levels are
/// searched for margin.
pub fn local_rep_oracle(s: &Mat, t: &Mat, p: i64, c: i64) -> bool {
    let p = p as i128;
    let (n, m) = (s.len(), t.len());
    let delta = (p == 2) as u32;
    let kappa = ord(c as i128, p);
    let max_level = 2 * (delta + ord(det_cofactor(t), p)) + 2 * m as u32 * kappa + 3;
    let s: Vec<Vec<i128>> = s.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let t: Vec<Vec<i128>> = t.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let ctx = LocalCtx { s, t, p, n, m, delta, kappa, max_level };
    // columns of X, each of length n
    let mut x = vec![vec![0i128; n]; m];
    ctx.level(&mut x, 0)
}

struct LocalCtx {
    s: Vec<Vec<i128>>,
    t: Vec<Vec<i128>>,
    p: i128,
    n: usize,
    m: usize,
    delta: u32,
    kappa: u32,
    max_level: u32,
}

impl LocalCtx {
    fn bilinear(&self, a: &[i128], b: &[i128]) -> i128 {
        (0..self.n).map(|i| (0..self.n).map(|j| self.s[i][j] * a[i] * b[j]).sum::<i128>()).sum()
    }

    fn as_mat(rows: &[Vec<i128>]) -> Mat {
        rows.iter().map(|r| r.iter().map(|&v| v as i64).collect()).collect()
    }

    /// Minor valuations (capped at k) of X, i.e. v_i = ord of the gcd of
    /// the i x i minors, for i = 1..m.
    fn minor_valuations(&self, x: &[Vec<i128>], k: u32) -> Vec<u32> {
        let xm = transpose(&Self::as_mat(x));
        (1..=self.m).map(|i| minors(&xm, i).into_iter().map(|d| ord_mod(d, self.p, k)).min().unwrap()).collect()
    }

    fn accept(&self, x: &[Vec<i128>], k: u32) -> bool {
        let v = self.minor_valuations(x, k);
        let vm = v[self.m - 1];
        let vprev = if self.m >= 2 { v[self.m - 2] } else { 0 };
        if vm >= k || vm - vprev > self.kappa {
            return false;
        }
        // A = t(X) S, m x n
        let a: Mat = x
            .iter()
            .map(|col| {
                (0..self.n).map(|j| ((0..self.n).map(|i| col[i] * self.s[i][j]).sum::<i128>()) as i64).collect()
            })
            .collect();
        let e = minors(&a, self.m).into_iter().map(|d| ord_mod(d, self.p, k)).min().unwrap();
        e < k && k > 2 * (e + self.delta) && k > vm + e + self.delta
    }

    fn prune(&self, x: &[Vec<i128>], k: u32) -> bool {
        let v = self.minor_valuations(x, k);
        if v[0] > self.kappa {
            return true;
        }
        if self.m >= 2 {
            let (vm, vprev) = (v[self.m - 1], v[self.m - 2]);
            if vprev < k && vm - vprev > self.kappa {
                return true;
            }
        }
        false
    }

    fn level(&self, x: &mut Vec<Vec<i128>>, k: u32) -> bool {
        if k > 0 && self.accept(x, k) {
            return true;
        }
        if k == self.max_level || (k > 0 && self.prune(x, k)) {
            return false;
        }
        self.column(x, k, 0)
    }

    /// Chooses digit k of column j, checking the Gram entries (i, j),
    /// i <= j, modulo p^(k+1).
    fn column(&self, x: &mut Vec<Vec<i128>>, k: u32, j: usize) -> bool {
        if j == self.m {
            return self.level(x, k + 1);
        }
        let step = self.p.pow(k);
        let modulus = step * self.p;
        let base = x[j].clone();
        for code in 0..self.p.pow(self.n as u32) {
            let mut c = code;
            for (xi, b) in x[j].iter_mut().zip(&base) {
                *xi = b + (c % self.p) * step;
                c /= self.p;
            }
            let ok = (0..=j).all(|i| (self.bilinear(&x[i], &x[j]) - self.t[i][j]).rem_euclid(modulus) == 0);
            if ok && self.column(x, k, j + 1) {
                return true;
            }
        }
        x[j] = base;
        false
    }
}

/// A random instance from the soundness class: n <= 4, m <= 2,
/// S entries in [-4, 4], T entries in [0, 6], p in {2, 3, 5}, c in {1, 2}.
pub fn soundness_instance(rng: &mut impl Rng) -> (Mat, Mat, i64, i64) {
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=n.min(2));
    let s = random_pd(rng, n, -4, 4);
    let t = random_pd(rng, m, 0, 6);
    let p = [2, 3, 5][rng.gen_range(0..3)];
    let c = rng.gen_range(1..=2);
    (s, t, p, c)
}

/// Random positive definite S with n <= 5 and entries bounded by 12, mixing
/// rejection-sampled matrices and Gram matrices of random small bases.
pub fn random_enum_form(rng: &mut impl Rng) -> Mat {
    loop {
        let n = rng.gen_range(1..=5);
        let s = if n <= 3 && rng.gen_bool(0.5) {
            random_pd(rng, n, -12, 12)
        } else {
            let b: Mat = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect()).collect();
            if det_cofactor(&b) == 0 {
                continue;
            }
            congruent(&vec_identity(n), &b)
        };
        if s.iter().flatten().all(|x| x.abs() <= 12) {
            return s;
        }
    }
}

pub fn vec_identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect()
}

pub fn lib_vectors(report: &quadform::enumerate::ShortVectorReport) -> Vec<(Vec<i64>, i64)> {
    let to = |x: &BigInt| i64::try_from(x).unwrap();
    let mut v: Vec<_> = report.vectors.iter().map(|(x, q)| (x.iter().map(to).collect(), to(q))).collect();
    v.sort_by(|a: &(Vec<i64>, i64), b| (a.1, &a.0).cmp(&(b.1, &b.0)));
    v
}
