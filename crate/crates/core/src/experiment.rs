//! Hypothesis checks for the local-global representation theorem on concrete
//! data, family scans estimating the constant C, and report emission.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{check_prime, ord_int};
use crate::enumerate::{find_representations, lattice_minimum, Embedding};
use crate::error::{Error, Result};
use crate::exact::linalg::require_positive_definite;
use crate::exact::{det, GramMatrix, IntMatrix};
use crate::genus::{enumerate_genus, represented_by_all_classes};
use crate::local::Place;
use crate::local_reps::{
    auto_isotropy_shortcut, complement_isotropic_at_q, represents_locally_everywhere, represents_over_zp, summarize,
    ComplementWitness, LocalCertificates, LocalRepCertificate, LocalStatus,
};
use crate::report::SCHEMA_VERSION;

/// Number of global witnesses inspected when looking for the smallest
/// imprimitivity bound.
pub const WITNESS_LIMIT: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsotropyMethod {
    /// m <= n - 5: every complement has rank at least 5.
    RankShortcut,
    /// n - m >= 3 with det S and det T units at q.
    UnitShortcut,
    /// Invariants of the complement of a local witness at q.
    Complement,
    /// No local witness at q, so the complement is undefined.
    NotEvaluated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropyCheck {
    pub method: IsotropyMethod,
    pub isotropic: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionI {
    pub holds: bool,
    pub local_status: LocalStatus,
    pub places: LocalCertificates,
    /// The certificate at q when q is not among the checked places.
    pub certificate_at_q: LocalRepCertificate,
    pub isotropy: IsotropyCheck,
}

/// ord_q(det T) <= j.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionII {
    pub holds: bool,
    pub valuation: u32,
    pub j: u32,
}

/// mu(T) > C.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionIII {
    pub holds: bool,
    #[serde(with = "crate::report::big")]
    pub minimum: BigInt,
    #[serde(with = "crate::report::big")]
    pub threshold: BigInt,
}

/// An exact global representation X with t(X) S X = T.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub x: IntMatrix,
    #[serde(with = "crate::report::big_vec")]
    pub elementary_divisors: Vec<BigInt>,
    #[serde(with = "crate::report::big")]
    pub imprimitivity_bound: BigInt,
}

impl From<Embedding> for Witness {
    fn from(e: Embedding) -> Self {
        Witness { x: e.x, elementary_divisors: e.elementary_divisors, imprimitivity_bound: e.imprimitivity_bound }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub schema_version: u32,
    pub s: GramMatrix,
    pub t: GramMatrix,
    pub q: u64,
    #[serde(with = "crate::report::big")]
    pub c: BigInt,
    /// m <= n - 3.
    pub rank_check: bool,
    pub condition_i: ConditionI,
    pub condition_ii: ConditionII,
    pub condition_iii: ConditionIII,
    pub globally_represented: bool,
    /// The witness of least imprimitivity among those examined.
    pub witness: Option<Witness>,
    pub witnesses_examined: usize,
}

impl HypothesisReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.rank_check && self.condition_i.holds && self.condition_ii.holds && self.condition_iii.holds
    }

    /// True iff the stored witness satisfies t(X) S X = T exactly with
    /// imprimitivity dividing c.
    pub fn witness_verifies(&self) -> bool {
        let Some(w) = &self.witness else {
            return false;
        };
        match Embedding::new(&self.s, &self.t, w.x.clone()) {
            Ok(e) => (&self.c % &e.imprimitivity_bound).is_zero() && e.imprimitivity_bound == w.imprimitivity_bound,
            Err(_) => false,
        }
    }
}

fn valuation(x: &BigInt, q: u64) -> Result<u32> {
    Ok(ord_int(x, q)? as u32)
}

fn validate(s: &GramMatrix, t: &GramMatrix, q: u64, c: &BigInt) -> Result<()> {
    check_prime(q)?;
    require_positive_definite(s)?;
    require_positive_definite(t)?;
    if !c.is_positive() {
        return Err(Error::Invalid("imprimitivity bound c must be positive".into()));
    }
    if t.rank() > s.rank() {
        return Err(Error::RankViolation { target: t.rank(), ambient: s.rank() });
    }
    Ok(())
}

/// Condition (i): local representability everywhere with bound c, and an
/// isotropic complement at q.
fn condition_i(s: &GramMatrix, t: &GramMatrix, q: u64, c: &BigInt) -> Result<ConditionI> {
    let places = represents_locally_everywhere(s, t, c)?;
    let certificate_at_q = match places.get(&Place::Prime(q)) {
        Some(cert) => cert.clone(),
        None => represents_over_zp(s, t, q, c)?,
    };
    let mut local_status = summarize(&places);
    if local_status == LocalStatus::Representable {
        local_status = certificate_at_q.status;
    }
    let (n, m) = (s.rank(), t.rank());
    let isotropy = if m + 5 <= n {
        IsotropyCheck { method: IsotropyMethod::RankShortcut, isotropic: Some(true) }
    } else if auto_isotropy_shortcut(s, t, q) {
        IsotropyCheck { method: IsotropyMethod::UnitShortcut, isotropic: Some(true) }
    } else if certificate_at_q.is_representable() && m < n {
        let iso = complement_isotropic_at_q(s, ComplementWitness::Certificate(&certificate_at_q), q)?;
        IsotropyCheck { method: IsotropyMethod::Complement, isotropic: Some(iso) }
    } else if certificate_at_q.is_representable() {
        // a zero-dimensional complement is anisotropic
        IsotropyCheck { method: IsotropyMethod::Complement, isotropic: Some(false) }
    } else {
        IsotropyCheck { method: IsotropyMethod::NotEvaluated, isotropic: None }
    };
    let holds = local_status == LocalStatus::Representable && isotropy.isotropic == Some(true);
    Ok(ConditionI { holds, local_status, places, certificate_at_q, isotropy })
}

fn condition_ii(t: &GramMatrix, q: u64, j: u32) -> Result<ConditionII> {
    let valuation = valuation(&det(t), q)?;
    Ok(ConditionII { holds: valuation <= j, valuation, j })
}

/// Evaluates the hypotheses of the theorem on (S, T, q, j, c, C) and looks
/// for a global representation. The report states facts only.
pub fn check_theorem_hypotheses(
    s: &GramMatrix,
    t: &GramMatrix,
    q: u64,
    j: u32,
    c: &BigInt,
    threshold: &BigInt,
) -> Result<HypothesisReport> {
    validate(s, t, q, c)?;
    let condition_i = condition_i(s, t, q, c)?;
    let condition_ii = condition_ii(t, q, j)?;
    let minimum = lattice_minimum(t)?;
    let condition_iii = ConditionIII { holds: &minimum > threshold, minimum, threshold: threshold.clone() };
    let found = find_representations(s, t, c, Some(WITNESS_LIMIT))?;
    let witnesses_examined = found.len();
    let witness = found.into_iter().min_by(|a, b| a.imprimitivity_bound.cmp(&b.imprimitivity_bound)).map(Witness::from);
    let report = HypothesisReport {
        schema_version: SCHEMA_VERSION,
        s: s.clone(),
        t: t.clone(),
        q,
        c: c.clone(),
        rank_check: t.rank() + 3 <= s.rank(),
        condition_i,
        condition_ii,
        condition_iii,
        globally_represented: witness.is_some(),
        witness,
        witnesses_examined,
    };
    assert!(!report.globally_represented || report.witness_verifies(), "stored witness must verify");
    Ok(report)
}

/// A family of target forms, enumerated in a fixed order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// (t) for 1 <= t <= bound.
    Unary { bound: u64 },
    /// diag(a, b) for 1 <= a <= b <= bound, ordered by (a, b).
    Diagonal2 { bound: u64 },
}

impl Family {
    pub fn len(&self) -> usize {
        match *self {
            Family::Unary { bound } => bound as usize,
            Family::Diagonal2 { bound } => (bound * (bound + 1) / 2) as usize,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn members(&self) -> Vec<GramMatrix> {
        match *self {
            Family::Unary { bound } => (1..=bound as i64).map(|t| GramMatrix::diagonal(&[t])).collect(),
            Family::Diagonal2 { bound } => (1..=bound as i64)
                .flat_map(|a| (a..=bound as i64).map(move |b| GramMatrix::diagonal(&[a, b])))
                .collect(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Unary { bound } => write!(f, "unary:{bound}"),
            Family::Diagonal2 { bound } => write!(f, "diag2:{bound}"),
        }
    }
}

/// Parses `unary:B` or `diag2:B`.
impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        let (kind, bound) = s.split_once(':').ok_or_else(|| Error::Parse(format!("bad family `{s}`")))?;
        let bound: u64 = bound.parse().map_err(|_| Error::Parse(format!("bad family bound `{bound}`")))?;
        match kind {
            "unary" => Ok(Family::Unary { bound }),
            "diag2" => Ok(Family::Diagonal2 { bound }),
            _ => Err(Error::Parse(format!("unknown family `{kind}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanOptions {
    pub q: u64,
    pub j: u32,
    pub c: BigInt,
    pub neighbor_prime: u64,
    pub class_cap: usize,
    /// Index of the first family member to process (resume token).
    pub offset: usize,
    /// Maximum number of members per call; `None` processes the rest.
    pub max_rows: Option<usize>,
}

impl ScanOptions {
    pub fn new(q: u64, j: u32, c: BigInt, neighbor_prime: u64) -> Self {
        ScanOptions { q, j, c, neighbor_prime, class_cap: 64, offset: 0, max_rows: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub target: GramMatrix,
    #[serde(with = "crate::report::big")]
    pub det: BigInt,
    #[serde(with = "crate::report::big")]
    pub mu: BigInt,
    pub local_status: LocalStatus,
    /// Condition (i): local everywhere and an isotropic complement at q.
    pub local_ok: bool,
    pub condition_ii: bool,
    pub classes_total: usize,
    /// Classes representing the target; only computed when (i) and (ii)
    /// hold.
    pub classes_representing: Option<usize>,
    pub exception: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanResult {
    pub schema_version: u32,
    pub family: Family,
    pub s: GramMatrix,
    pub q: u64,
    pub j: u32,
    #[serde(with = "crate::report::big")]
    pub c: BigInt,
    pub neighbor_prime: u64,
    pub classes_total: usize,
    pub offset: usize,
    pub rows: Vec<ScanRow>,
    /// Largest minimum among exceptions, 0 if there are none; `None` if no
    /// row passed conditions (i) and (ii). Empirical, not the theorem's C.
    #[serde(with = "crate::report::opt_big")]
    pub empirical_c: Option<BigInt>,
    /// Indices into `rows`.
    pub exceptions: Vec<usize>,
    /// Offset to resume from when the family was not exhausted.
    pub next_offset: Option<usize>,
}

fn scan_row(s: &GramMatrix, t: GramMatrix, genus: &crate::genus::GenusRecord, opts: &ScanOptions) -> Result<ScanRow> {
    let cond_i = condition_i(s, &t, opts.q, &opts.c)?;
    let cond_ii = condition_ii(&t, opts.q, opts.j)?;
    let classes_representing = if cond_i.holds && cond_ii.holds {
        Some(represented_by_all_classes(genus, &t, &opts.c)?.iter().filter(|r| r.is_some()).count())
    } else {
        None
    };
    let classes_total = genus.class_count();
    Ok(ScanRow {
        det: det(&t),
        mu: lattice_minimum(&t)?,
        local_status: cond_i.local_status,
        local_ok: cond_i.holds,
        condition_ii: cond_ii.holds,
        classes_total,
        classes_representing,
        exception: classes_representing.is_some_and(|k| k < classes_total),
        target: t,
    })
}

/// Runs the hypothesis pipeline over a family of targets against every
/// class of the neighbor closure of S. Deterministic: rows follow the family
/// order regardless of scheduling.
pub fn scan_family(s: &GramMatrix, family: Family, opts: &ScanOptions) -> Result<ScanResult> {
    check_prime(opts.q)?;
    if !opts.c.is_positive() {
        return Err(Error::Invalid("imprimitivity bound c must be positive".into()));
    }
    let genus = enumerate_genus(s, opts.neighbor_prime, opts.class_cap)?;
    if !genus.complete {
        return Err(Error::IncompleteGenus);
    }
    let members = family.members();
    let start = opts.offset.min(members.len());
    let end = opts.max_rows.map_or(members.len(), |k| (start + k).min(members.len()));
    let rows: Vec<ScanRow> = members[start..end]
        .par_iter()
        .map(|t| scan_row(s, t.clone(), &genus, opts))
        .collect::<Result<_>>()?;
    let exceptions: Vec<usize> = rows.iter().enumerate().filter(|(_, r)| r.exception).map(|(i, _)| i).collect();
    let empirical_c = if rows.iter().any(|r| r.classes_representing.is_some()) {
        Some(exceptions.iter().map(|&i| rows[i].mu.clone()).max().unwrap_or_else(BigInt::zero))
    } else {
        None
    };
    Ok(ScanResult {
        schema_version: SCHEMA_VERSION,
        family,
        s: s.clone(),
        q: opts.q,
        j: opts.j,
        c: opts.c.clone(),
        neighbor_prime: opts.neighbor_prime,
        classes_total: genus.class_count(),
        offset: start,
        rows,
        empirical_c,
        exceptions,
        next_offset: (end < members.len()).then_some(end),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

pub enum Report<'a> {
    Hypothesis(&'a HypothesisReport),
    Scan(&'a ScanResult),
}

pub const SCAN_CSV_HEADER: [&str; 6] = ["det", "mu", "local_ok", "classes_total", "classes_representing", "exception"];

fn scan_csv(r: &ScanResult) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Invalid(e.to_string());
    w.write_record(SCAN_CSV_HEADER).map_err(io)?;
    for row in &r.rows {
        w.write_record([
            row.det.to_string(),
            row.mu.to_string(),
            row.local_ok.to_string(),
            row.classes_total.to_string(),
            row.classes_representing.map_or(String::new(), |k| k.to_string()),
            row.exception.to_string(),
        ])
        .map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Invalid(e.to_string()))
}

/// Serializes a report. CSV is defined for scan results only.
pub fn report_emit(report: Report<'_>, format: &str) -> Result<Vec<u8>> {
    let format: Format = format.parse()?;
    let json = |v: serde_json::Result<Vec<u8>>| v.map_err(|e| Error::Invalid(e.to_string()));
    match (report, format) {
        (Report::Hypothesis(h), Format::Json) => json(serde_json::to_vec_pretty(h)),
        (Report::Scan(r), Format::Json) => json(serde_json::to_vec_pretty(r)),
        (Report::Scan(r), Format::Csv) => scan_csv(r),
        (Report::Hypothesis(_), Format::Csv) => {
            Err(Error::Invalid("csv output is only defined for scan results".into()))
        }
    }
}
