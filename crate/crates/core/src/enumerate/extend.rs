//! Extending a representation of R to a lattice M containing R.

use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::fincke_pohst::Enumerator;
use super::represent::{ColumnSearch, Embedding};
use crate::error::{Error, Result};
use crate::exact::{smith_normal_form, GramMatrix, IntMatrix};

/// Searches for tau: M -> Lambda with tau restricted to R equal to sigma.
///
/// `glue` holds the coordinates of the basis of R in the basis of M (one
/// column per generator of R). With U G V = D the Smith form of the glue,
/// the first r columns of Y U^-1 are forced to be X_R V D^-1; the rest are
/// searched with the Gram matrix t(U^-1) T_M U^-1.
pub fn extend_representation(
    s: &GramMatrix,
    sigma: &Embedding,
    t_m: &GramMatrix,
    glue: &IntMatrix,
) -> Result<Option<Embedding>> {
    let (n, m, r) = (s.rank(), t_m.rank(), sigma.source.rank());
    if sigma.target != *s {
        return Err(Error::InconsistentGlue("sigma does not map into the given lattice".into()));
    }
    if glue.rows() != m || glue.cols() != r {
        return Err(Error::InconsistentGlue(format!("glue must be {m} x {r}")));
    }
    if t_m.congruent(glue) != sigma.source {
        return Err(Error::InconsistentGlue("t(G) T_M G differs from the Gram matrix of R".into()));
    }
    let snf = smith_normal_form(glue);
    if snf.rank() < r {
        return Err(Error::InconsistentGlue("glue columns are dependent".into()));
    }
    let xv = &sigma.x * &snf.v;
    let mut fixed = Vec::with_capacity(m);
    for (l, d) in snf.divisors.iter().enumerate() {
        let col = xv.column(l);
        if col.iter().any(|x| !x.is_multiple_of(d)) {
            return Ok(None);
        }
        fixed.push(col.iter().map(|x| x / d).collect::<Vec<BigInt>>());
    }
    let t_prime = t_m.congruent(&snf.u_inv);
    let enumerator = Enumerator::new(s)?;
    let search = ColumnSearch {
        enumerator: &enumerator,
        target: s,
        source: &t_prime,
        divisor_bound: None,
        canonical_sign: false,
    };
    let mut found = None;
    let _ = search.run(fixed, &mut |cols| {
        found = Some(IntMatrix::from_columns(n, cols));
        ControlFlow::Break(())
    });
    let Some(y_prime) = found else {
        return Ok(None);
    };
    let y = &y_prime * &snf.u;
    debug_assert!((&y * glue).entries().iter().zip(sigma.x.entries()).all(|(a, b)| (a - b).is_zero()));
    Embedding::new(s, t_m, y).map(Some)
}
