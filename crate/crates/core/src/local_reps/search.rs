//! Representations over Z_p by digit-wise lifting.
//!
//! A node at level k is X mod p^k with t(X) S X = T mod p^k (at p = 2 the
//! diagonal is tracked mod 2^(k+1), which X mod 2^k determines). Passing
//! from level k to k + 1 is a linear system over F_p in the next digit.
//! Once k > 2(a + ord_p 2), where p^a is the largest elementary divisor of
//! t(X) S, Newton's iteration X += A^+ E / 2 converges to an exact Z_p
//! solution; since a <= ord_p det T the tree has bounded depth, so an
//! exhausted tree is a proof of non-representability.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::fp;
use crate::arith::{check_prime, ord_int, pow_u64, reduce_p_integral};
use crate::error::{Error, Result};
use crate::exact::{det, smith_normal_form, GramMatrix, IntMatrix};
use crate::local::{space_invariants, space_represents, Place};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalStatus {
    Representable,
    NotRepresentable,
    /// The node budget ran out before the search tree was exhausted.
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalRepCertificate {
    pub prime: Place,
    pub status: LocalStatus,
    /// The witness is a solution modulo p^precision.
    pub precision: u32,
    /// a + ord_p 2 for the witness; precision > 2 * margin.
    pub margin: u32,
    pub witness: Option<IntMatrix>,
    pub elementary_divisor_valuations: Vec<u32>,
    pub reason: String,
    pub nodes: u64,
}

impl LocalRepCertificate {
    pub fn is_representable(&self) -> bool {
        self.status == LocalStatus::Representable
    }

    fn verdict(prime: Place, status: LocalStatus, reason: &str, nodes: u64) -> Self {
        LocalRepCertificate {
            prime,
            status,
            precision: 0,
            margin: 0,
            witness: None,
            elementary_divisor_valuations: Vec::new(),
            reason: reason.to_string(),
            nodes,
        }
    }

    pub(crate) fn at_infinity(representable: bool) -> Self {
        let (status, reason) = if representable {
            (LocalStatus::Representable, "signature")
        } else {
            (LocalStatus::NotRepresentable, "signature")
        };
        Self::verdict(Place::Infinity, status, reason, 0)
    }

    /// Independently re-checks a positive certificate: the congruence, the
    /// margin inequality and the divisor bound.
    pub fn verify(&self, s: &GramMatrix, t: &GramMatrix, c: &BigInt) -> bool {
        let (Place::Prime(p), Some(x)) = (self.prime, &self.witness) else {
            return self.status != LocalStatus::Representable || self.prime == Place::Infinity;
        };
        if self.precision <= 2 * self.margin {
            return false;
        }
        let modulus = pow_u64(p, self.precision);
        let g = s.congruent(x);
        let congruent = (0..t.rank())
            .all(|i| (0..t.rank()).all(|j| (t.get(i, j) - g.get(i, j)).is_multiple_of(&modulus)));
        let Some(vals) = divisor_valuations(x, p, self.precision) else {
            return false;
        };
        let kappa = ord_int(c, p).unwrap_or(i64::MAX) as u32;
        congruent && vals == self.elementary_divisor_valuations && vals.iter().all(|&v| v <= kappa)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub node_budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { node_budget: 2_000_000 }
    }
}

/// p-adic valuations of the elementary divisors of `x`, provided all are
/// below `cap` (otherwise they are not determined modulo p^cap).
fn divisor_valuations(x: &IntMatrix, p: u64, cap: u32) -> Option<Vec<u32>> {
    let snf = smith_normal_form(x);
    if snf.rank() < x.cols().min(x.rows()) {
        return None;
    }
    let mut vals = Vec::new();
    for d in &snf.divisors {
        let v = ord_int(d, p).ok()? as u32;
        if v >= cap {
            return None;
        }
        vals.push(v);
    }
    vals.sort_unstable();
    Some(vals)
}

fn valuation(x: &BigInt, p: u64) -> u32 {
    ord_int(x, p).map_or(u32::MAX, |v| v as u32)
}

enum Stop {
    Found(IntMatrix),
    Budget,
}

struct Search<'a> {
    p: u64,
    delta: u32,
    kappa: u32,
    max_level: u32,
    s: &'a GramMatrix,
    t: &'a GramMatrix,
    n: usize,
    m: usize,
    /// S reduced mod p (mod 4 at p = 2), for the level-one search.
    s_small: Vec<Vec<i128>>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn tick(&mut self) -> ControlFlow<Stop> {
        self.nodes += 1;
        if self.nodes > self.budget {
            ControlFlow::Break(Stop::Budget)
        } else {
            ControlFlow::Continue(())
        }
    }

    fn small_mod(&self) -> i128 {
        if self.p == 2 {
            4
        } else {
            self.p as i128
        }
    }

    /// Level one: columns of X mod p chosen left to right.
    fn base(&mut self, cols: &mut Vec<Vec<u64>>) -> ControlFlow<Stop> {
        let (p, n, j) = (self.p, self.n, cols.len());
        if j == self.m {
            let x = IntMatrix::from_columns(n, &cols.iter().map(|c| c.iter().map(|&v| BigInt::from(v)).collect()).collect::<Vec<_>>());
            return self.node(1, x);
        }
        let pi = p as i128;
        let rows: Vec<Vec<u64>> = cols
            .iter()
            .map(|x| {
                (0..n)
                    .map(|r| {
                        let v: i128 = (0..n).map(|c| self.s_small[r][c] * x[c] as i128).sum();
                        v.rem_euclid(pi) as u64
                    })
                    .collect()
            })
            .collect();
        let rhs: Vec<u64> = (0..j).map(|i| self.t.get(i, j).mod_floor(&BigInt::from(p)).to_u64().unwrap()).collect();
        let Some(space) = fp::solve(rows, rhs, n, p) else {
            return ControlFlow::Continue(());
        };
        let md = self.small_mod();
        let want = self.t.get(j, j).mod_floor(&BigInt::from(md)).to_i128().unwrap();
        let mut result = ControlFlow::Continue(());
        space.for_each(|x| {
            if let ControlFlow::Break(b) = self.tick() {
                result = ControlFlow::Break(b);
                return false;
            }
            let q: i128 = (0..n)
                .map(|a| (0..n).map(|b| self.s_small[a][b] * x[a] as i128 * x[b] as i128).sum::<i128>())
                .sum();
            if q.rem_euclid(md) != want {
                return true;
            }
            if self.kappa == 0 && !cols.is_empty() {
                let mut all = cols.clone();
                all.push(x.to_vec());
                if fp::rank(&all, p) < all.len() {
                    return true;
                }
            } else if self.kappa == 0 && x.iter().all(|&v| v == 0) {
                return true;
            }
            cols.push(x.to_vec());
            let r = self.base(cols);
            cols.pop();
            if r.is_break() {
                result = r;
                return false;
            }
            true
        });
        result
    }

    /// Largest elementary divisor exponent of t(X) S, if below `k`.
    fn defect(&self, x: &IntMatrix, k: u32) -> Option<u32> {
        let a = &x.transpose() * self.s.as_matrix();
        divisor_valuations(&a, self.p, k).map(|v| v.into_iter().max().unwrap_or(0))
    }

    fn node(&mut self, k: u32, x: IntMatrix) -> ControlFlow<Stop> {
        self.tick()?;
        if k == self.kappa + 1 {
            match divisor_valuations(&x, self.p, k) {
                Some(v) if v.iter().all(|&e| e <= self.kappa) => {}
                _ => return ControlFlow::Continue(()),
            }
        }
        if k > self.kappa {
            if let Some(a) = self.defect(&x, k) {
                if k > 2 * (a + self.delta) && k > self.kappa + a + self.delta {
                    return ControlFlow::Break(Stop::Found(x));
                }
            }
        }
        if k >= self.max_level {
            return ControlFlow::Continue(());
        }
        let (p, n, m) = (self.p, self.n, self.m);
        let pb = BigInt::from(p);
        let pk = pow_u64(p, k);
        let sx = self.s.as_matrix() * &x;
        let g = &x.transpose() * &sx;
        let nvars = n * m;
        let var = |r: usize, j: usize| r + n * j;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..m {
            for j in i..m {
                let e = self.t.get(i, j) - &g[(i, j)];
                let mut row = vec![0u64; nvars];
                let add = |row: &mut Vec<u64>, idx: usize, v: &BigInt| {
                    let v = v.mod_floor(&pb).to_u64().unwrap();
                    row[idx] = (row[idx] + v) % p;
                };
                let scale = if p == 2 && i == j { &pk * 2u32 } else { pk.clone() };
                debug_assert!(e.is_multiple_of(&scale));
                for r in 0..n {
                    add(&mut row, var(r, j), &sx[(r, i)]);
                    if p == 2 && i == j {
                        if k == 1 {
                            add(&mut row, var(r, i), self.s.get(r, r));
                        }
                    } else {
                        add(&mut row, var(r, i), &sx[(r, j)]);
                    }
                }
                rows.push(row);
                rhs.push((e / scale).mod_floor(&pb).to_u64().unwrap());
            }
        }
        let Some(space) = fp::solve(rows, rhs, nvars, p) else {
            return ControlFlow::Continue(());
        };
        let mut result = ControlFlow::Continue(());
        space.for_each(|y| {
            let mut next = x.clone();
            for r in 0..n {
                for j in 0..m {
                    next[(r, j)] += &pk * y[var(r, j)];
                }
            }
            let out = self.node(k + 1, next);
            if out.is_break() {
                result = out;
                return false;
            }
            true
        });
        result
    }
}

/// Newton iteration X += A^+ (T - t(X) S X) / 2 with A = t(X) S, until the
/// congruence holds modulo p^precision. Entries are kept reduced.
fn newton(s: &GramMatrix, t: &GramMatrix, x: IntMatrix, p: u64, precision: u32) -> IntMatrix {
    let modulus = pow_u64(p, precision);
    let (n, m) = (x.rows(), x.cols());
    let mut x = x;
    for _ in 0..4 * precision + 8 {
        let g = s.congruent(&x);
        let e: Vec<Vec<BigInt>> = (0..m).map(|i| (0..m).map(|j| t.get(i, j) - g.get(i, j)).collect()).collect();
        if e.iter().flatten().all(|v| v.is_multiple_of(&modulus)) {
            return x;
        }
        let a = &x.transpose() * s.as_matrix();
        let snf = smith_normal_form(&a);
        // A^+ = V D^+ U
        let mut plus = vec![vec![BigRational::zero(); m]; n];
        for r in 0..n {
            for c in 0..m {
                let mut acc = BigRational::zero();
                for (l, d) in snf.divisors.iter().enumerate().take(m) {
                    if snf.v[(r, l)].is_zero() || snf.u[(l, c)].is_zero() {
                        continue;
                    }
                    acc += BigRational::new(&snf.v[(r, l)] * &snf.u[(l, c)], d.clone());
                }
                plus[r][c] = acc;
            }
        }
        let two = BigRational::from_integer(BigInt::from(2));
        for r in 0..n {
            for c in 0..m {
                let z: BigRational = (0..m)
                    .map(|l| &plus[r][l] * BigRational::from_integer(e[l][c].clone()))
                    .fold(BigRational::zero(), |acc, v| acc + v)
                    / &two;
                let v = BigRational::from_integer(x[(r, c)].clone()) + z;
                x[(r, c)] = reduce_p_integral(&v, &modulus);
            }
        }
    }
    unreachable!("Newton iteration must converge above the lifting threshold")
}

fn validate(s: &GramMatrix, t: &GramMatrix, p: u64, c: &BigInt) -> Result<()> {
    check_prime(p)?;
    if c <= &BigInt::zero() {
        return Err(Error::Invalid("the imprimitivity bound c must be positive".into()));
    }
    if t.rank() > s.rank() {
        return Err(Error::RankViolation { target: t.rank(), ambient: s.rank() });
    }
    if det(s).is_zero() || det(t).is_zero() {
        return Err(Error::Singular);
    }
    Ok(())
}

pub fn represents_over_zp(s: &GramMatrix, t: &GramMatrix, p: u64, c: &BigInt) -> Result<LocalRepCertificate> {
    represents_over_zp_with(s, t, p, c, &SearchOptions::default())
}

pub fn represents_over_zp_with(
    s: &GramMatrix,
    t: &GramMatrix,
    p: u64,
    c: &BigInt,
    opts: &SearchOptions,
) -> Result<LocalRepCertificate> {
    validate(s, t, p, c)?;
    let place = Place::Prime(p);
    if t.rank() == 0 {
        let mut cert = LocalRepCertificate::verdict(place, LocalStatus::Representable, "empty target", 0);
        cert.witness = Some(IntMatrix::zeros(s.rank(), 0));
        cert.precision = 1;
        return Ok(cert);
    }
    if !space_represents(&space_invariants(t)?, &space_invariants(s)?, place)? {
        return Ok(LocalRepCertificate::verdict(
            place,
            LocalStatus::NotRepresentable,
            "the quadratic space over Q_p does not represent the target",
            0,
        ));
    }
    let delta = u32::from(p == 2);
    let d = valuation(&det(t), p);
    let ds = valuation(&det(s), p);
    let oc = valuation(c, p);
    let kappa = oc.min(d / 2);
    let precision = 2 * (delta + ds + d + 2 * oc) + 1;
    let max_level = (2 * (d + delta) + 1).max(kappa + d + delta + 1).max(kappa + 1);
    let md: i128 = if p == 2 { 4 } else { p as i128 };
    let s_small = (0..s.rank())
        .map(|r| (0..s.rank()).map(|c| s.get(r, c).mod_floor(&BigInt::from(md)).to_i128().unwrap()).collect())
        .collect();
    let mut search = Search {
        p,
        delta,
        kappa,
        max_level,
        s,
        t,
        n: s.rank(),
        m: t.rank(),
        s_small,
        nodes: 0,
        budget: opts.node_budget,
    };
    let outcome = search.base(&mut Vec::new());
    let nodes = search.nodes;
    match outcome {
        ControlFlow::Continue(()) => Ok(LocalRepCertificate::verdict(
            place,
            LocalStatus::NotRepresentable,
            "search tree exhausted",
            nodes,
        )),
        ControlFlow::Break(Stop::Budget) => {
            let mut cert = LocalRepCertificate::verdict(place, LocalStatus::Undecided, "node budget exhausted", nodes);
            cert.precision = precision;
            Ok(cert)
        }
        ControlFlow::Break(Stop::Found(x)) => {
            let w = newton(s, t, x, p, precision);
            let margin = search.defect(&w, precision).expect("defect is stable under lifting") + delta;
            let vals = divisor_valuations(&w, p, precision).expect("divisors are stable under lifting");
            Ok(LocalRepCertificate {
                prime: place,
                status: LocalStatus::Representable,
                precision,
                margin,
                witness: Some(w),
                elementary_divisor_valuations: vals,
                reason: "lifted witness".to_string(),
                nodes,
            })
        }
    }
}
