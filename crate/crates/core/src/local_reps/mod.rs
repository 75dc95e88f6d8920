//! Lattice representations over the p-adic integers, and the isotropy
//! condition on orthogonal complements.

mod fp;
mod isotropy;
mod search;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

pub use isotropy::{auto_isotropy_shortcut, complement_isotropic_at_q, ComplementWitness};
pub use search::{represents_over_zp, represents_over_zp_with, LocalRepCertificate, LocalStatus, SearchOptions};

use crate::arith::{is_prime, prime_divisors};
use crate::error::{Error, Result};
use crate::exact::linalg::require_positive_definite;
use crate::exact::{det, GramMatrix};
use crate::local::{is_local_square, Place};

pub type LocalCertificates = BTreeMap<Place, LocalRepCertificate>;

/// Certificates at infinity and at every prime where the answer is not
/// forced by unimodularity: 2 and the primes dividing c det S det T.
pub fn represents_locally_everywhere(s: &GramMatrix, t: &GramMatrix, c: &BigInt) -> Result<LocalCertificates> {
    represents_locally_everywhere_with(s, t, c, &SearchOptions::default())
}

pub fn represents_locally_everywhere_with(
    s: &GramMatrix,
    t: &GramMatrix,
    c: &BigInt,
    opts: &SearchOptions,
) -> Result<LocalCertificates> {
    require_positive_definite(s)?;
    require_positive_definite(t)?;
    if t.rank() > s.rank() {
        return Err(Error::RankViolation { target: t.rank(), ambient: s.rank() });
    }
    let (ds, dt) = (det(s), det(t));
    let mut primes: BTreeSet<u64> = BTreeSet::from([2]);
    primes.extend(prime_divisors(&(c * &ds * &dt)));
    if t.rank() == s.rank() {
        // outside the bad set the ratio is a unit and must be a square;
        // if it is not a rational square some such prime detects it
        let ratio = BigRational::new(dt.clone(), ds.clone());
        if let Some(p) = nonsquare_witness_prime(&ratio, &primes) {
            primes.insert(p);
        }
    }
    let certs: Vec<Result<LocalRepCertificate>> =
        primes.par_iter().map(|&p| represents_over_zp_with(s, t, p, c, opts)).collect();
    let mut out = BTreeMap::new();
    for cert in certs {
        let cert = cert?;
        out.insert(cert.prime, cert);
    }
    out.insert(Place::Infinity, LocalRepCertificate::at_infinity(true));
    Ok(out)
}

/// Smallest prime outside `exclude` at which a positive rational is not a
/// local square, or `None` if it is a rational square.
fn nonsquare_witness_prime(r: &BigRational, exclude: &BTreeSet<u64>) -> Option<u64> {
    let (num, den) = (r.numer().sqrt(), r.denom().sqrt());
    if &(&num * &num) == r.numer() && &(&den * &den) == r.denom() {
        return None;
    }
    (3u64..).filter(|&p| is_prime(p) && !exclude.contains(&p)).find(|&p| !is_local_square(r, Place::Prime(p)))
}

/// Overall verdict: not representable if any place fails, undecided if
/// some place is undecided, representable otherwise.
pub fn summarize(certs: &LocalCertificates) -> LocalStatus {
    let statuses: Vec<LocalStatus> = certs.values().map(|c| c.status).collect();
    if statuses.contains(&LocalStatus::NotRepresentable) {
        LocalStatus::NotRepresentable
    } else if statuses.contains(&LocalStatus::Undecided) {
        LocalStatus::Undecided
    } else {
        LocalStatus::Representable
    }
}

/// Places where the certificate is negative.
pub fn failing_places(certs: &LocalCertificates) -> Vec<Place> {
    certs.iter().filter(|(_, c)| c.status == LocalStatus::NotRepresentable).map(|(p, _)| *p).collect()
}
