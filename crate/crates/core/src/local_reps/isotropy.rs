use num_traits::Zero;

use super::search::LocalRepCertificate;
use crate::arith::{check_prime, ord_int};
use crate::error::{Error, Result};
use crate::exact::{det, orthogonal_complement, GramMatrix, IntMatrix};
use crate::local::{complement_invariants_at, is_isotropic, space_invariants_at, Place};

/// A representation of the sublattice at q: exact, or a p-adic witness.
#[derive(Clone, Copy, Debug)]
pub enum ComplementWitness<'a> {
    Exact(&'a IntMatrix),
    Certificate(&'a LocalRepCertificate),
}

/// Whether the orthogonal complement of the column span of the witness is
/// isotropic over Q_q.
pub fn complement_isotropic_at_q(s: &GramMatrix, w: ComplementWitness<'_>, q: u64) -> Result<bool> {
    check_prime(q)?;
    let v = Place::Prime(q);
    match w {
        ComplementWitness::Exact(x) => {
            if x.rows() != s.rank() {
                return Err(Error::Shape);
            }
            let g = s.congruent(x);
            if det(&g).is_zero() {
                return Err(Error::DegenerateSubspace);
            }
            if x.cols() == s.rank() {
                return Ok(false);
            }
            let c = orthogonal_complement(s, x)?;
            Ok(is_isotropic(&space_invariants_at(&s.congruent(&c), v)?, v))
        }
        ComplementWitness::Certificate(cert) => {
            if cert.prime != v {
                return Err(Error::Invalid(format!("certificate is for {} not {v}", cert.prime)));
            }
            let x = cert.witness.as_ref().ok_or_else(|| Error::Invalid("certificate carries no witness".into()))?;
            // the witness Gram is congruent to T modulo q^N with N above the
            // lifting threshold, so it has the invariants of T over Z_q
            let g = s.congruent(x);
            if det(&g).is_zero() {
                return Err(Error::DegenerateSubspace);
            }
            if x.cols() == s.rank() {
                return Ok(false);
            }
            let w = complement_invariants_at(&space_invariants_at(&g, v)?, &space_invariants_at(s, v)?, v)?;
            Ok(is_isotropic(&w, v))
        }
    }
}

/// Cases where the isotropy condition needs no computation: a complement
/// of rank at least 5, or unimodular S and T at an odd q with a complement
/// of rank at least 3. At q = 2 the unimodular clause is not valid (the
/// complement of I2 in I5 is I3, anisotropic over Q_2).
pub fn auto_isotropy_shortcut(s: &GramMatrix, t: &GramMatrix, q: u64) -> bool {
    let (n, m) = (s.rank(), t.rank());
    if m + 5 <= n {
        return true;
    }
    let unit = |g: &GramMatrix| ord_int(&det(g), q).is_ok_and(|v| v == 0);
    q != 2 && n >= m + 3 && unit(s) && unit(t)
}
