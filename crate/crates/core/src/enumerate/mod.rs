//! Exact enumeration: LLL, short vectors, global representations.

mod extend;
pub mod fincke_pohst;
pub mod lll;
pub mod represent;
mod superlattice;

use num_bigint::BigInt;
use serde::Serialize;

pub use extend::extend_representation;
pub use fincke_pohst::{Enumerator, Order};
pub use lll::lll_reduce;
pub use represent::{
    find_representations, find_representations_with, imprimitivity_bound, is_represented, saturation_exponent,
    Embedding,
};
pub use superlattice::{search_primitive_superlattice, superlattices_of_index, Superlattice};

use crate::error::{Error, Result};
use crate::exact::GramMatrix;

/// Vectors up to sign, each stored once with its norm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShortVectorReport {
    #[serde(serialize_with = "crate::report::ser_big")]
    pub bound: BigInt,
    #[serde(serialize_with = "ser_vectors")]
    pub vectors: Vec<(Vec<BigInt>, BigInt)>,
    #[serde(serialize_with = "ser_opt")]
    pub minimum: Option<BigInt>,
}

fn ser_vectors<S: serde::Serializer>(v: &[(Vec<BigInt>, BigInt)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (x, q) in v {
        let entry = serde_json::json!({
            "norm": q.to_string(),
            "x": x.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        });
        seq.serialize_element(&entry)?;
    }
    seq.end()
}

fn ser_opt<S: serde::Serializer>(v: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

impl ShortVectorReport {
    fn new(bound: BigInt, vectors: Vec<(Vec<BigInt>, BigInt)>) -> Self {
        let minimum = vectors.iter().map(|(_, q)| q).min().cloned();
        ShortVectorReport { bound, vectors, minimum }
    }

    /// One line per vector: the norm followed by the coordinates.
    pub fn to_csv(&self) -> Result<String> {
        let n = self.vectors.first().map_or(0, |(x, _)| x.len());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["norm".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        let io = |e: csv::Error| Error::Invalid(e.to_string());
        w.write_record(&header).map_err(io)?;
        for (x, q) in &self.vectors {
            let mut rec = vec![q.to_string()];
            rec.extend(x.iter().map(|e| e.to_string()));
            w.write_record(&rec).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub fn lattice_minimum(s: &GramMatrix) -> Result<BigInt> {
    Ok(Enumerator::new(s)?.minimum())
}

/// All vectors with 0 < Q(x) <= bound.
pub fn short_vectors(s: &GramMatrix, bound: &BigInt) -> Result<ShortVectorReport> {
    Ok(ShortVectorReport::new(bound.clone(), Enumerator::new(s)?.short_vectors(bound)))
}

/// All vectors with Q(x) = t.
pub fn vectors_of_norm(s: &GramMatrix, t: &BigInt) -> Result<ShortVectorReport> {
    let vs = Enumerator::new(s)?.vectors_of_norm(t);
    Ok(ShortVectorReport::new(t.clone(), vs.into_iter().map(|v| (v, t.clone())).collect()))
}
