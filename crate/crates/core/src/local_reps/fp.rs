//! Affine linear systems over F_p.

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut base, mut e, mut r) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, base, p);
        }
        base = mul(base, base, p);
        e >>= 1;
    }
    r
}

fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Solution set `x0 + span(basis)` of `A x = b` over F_p.
#[derive(Clone, Debug)]
pub(crate) struct AffineSpace {
    pub x0: Vec<u64>,
    pub basis: Vec<Vec<u64>>,
    pub p: u64,
}

impl AffineSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Calls `f` on every point; stops early on `false`.
    pub fn for_each(&self, mut f: impl FnMut(&[u64]) -> bool) {
        let p = self.p;
        let mut z = vec![0u64; self.dim()];
        let mut x = self.x0.clone();
        loop {
            if !f(&x) {
                return;
            }
            // odometer step, updating x incrementally
            let mut l = 0;
            loop {
                if l == z.len() {
                    return;
                }
                z[l] += 1;
                for (xi, bi) in x.iter_mut().zip(&self.basis[l]) {
                    *xi = (*xi + bi) % p;
                }
                if z[l] < p {
                    break;
                }
                z[l] = 0;
                l += 1;
            }
        }
    }
}

/// Solves `rows * x = rhs` over F_p with `nvars` unknowns.
pub(crate) fn solve(mut rows: Vec<Vec<u64>>, mut rhs: Vec<u64>, nvars: usize, p: u64) -> Option<AffineSpace> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..nvars {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] % p != 0) else {
            continue;
        };
        rows.swap(r, k);
        rhs.swap(r, k);
        let inv = inv_mod(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = mul(*x, inv, p);
        }
        rhs[r] = mul(rhs[r], inv, p);
        for k in 0..rows.len() {
            if k == r || rows[k][c] % p == 0 {
                continue;
            }
            let f = rows[k][c] % p;
            for c2 in 0..nvars {
                let t = mul(f, rows[r][c2], p);
                rows[k][c2] = (rows[k][c2] % p + p - t) % p;
            }
            rhs[k] = (rhs[k] % p + p - mul(f, rhs[r], p)) % p;
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    if rhs[r..].iter().any(|&b| b % p != 0) {
        return None;
    }
    let mut x0 = vec![0u64; nvars];
    for (i, &c) in pivots.iter().enumerate() {
        x0[c] = rhs[i] % p;
    }
    let mut basis = Vec::new();
    for free in (0..nvars).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u64; nvars];
        v[free] = 1;
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = (p - rows[i][free] % p) % p;
        }
        basis.push(v);
    }
    Some(AffineSpace { x0, basis, p })
}

/// Rank of a list of vectors over F_p.
pub(crate) fn rank(vectors: &[Vec<u64>], p: u64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let n = vectors[0].len();
    let zeros = vec![0; vectors.len()];
    // rank of the matrix with these rows
    solve(vectors.to_vec(), zeros, n, p).map_or(0, |s| n - s.dim())
}
