use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;

use quadform::enumerate::{
    extend_representation, find_representations, lattice_minimum, short_vectors, Embedding,
};
use quadform::exact::io::{read_gram, read_matrix};
use quadform::experiment::{check_theorem_hypotheses, report_emit, scan_family, Family, Format, Report, ScanOptions};
use quadform::genus::enumerate_genus_with_primes;
use quadform::local::{jordan_decomposition, space_invariants};
use quadform::local_reps::{
    auto_isotropy_shortcut, complement_isotropic_at_q, represents_locally_everywhere, represents_over_zp, summarize,
    ComplementWitness, LocalStatus,
};
use quadform::{Error, GramMatrix};

const CHECK_HELP: &str = "\
Evaluates the hypotheses of the local-global theorem for representing T by S
and searches for a global representation.

  rank check      m <= n - 3
  condition (i)   T is represented by S over every Z_p with elementary
                  divisors dividing c, and the orthogonal complement of a
                  local representation at q is isotropic (automatic when
                  m <= n - 5, or when n - m >= 3 and det S, det T are q-units)
  condition (ii)  ord_q(det T) <= j
  condition (iii) mu(T) > C

Condition (ii) is the valuation form ord_q(det T) <= j. The divisibility
form \"q^j does not divide det T\" is ord_q(det T) <= j - 1, so to test it pass
-j one less than intended.

Exit status: 0 if every hypothesis holds and a representation was found,
1 otherwise, 2 on input errors, 3 if a local certificate is undecided.";

#[derive(Parser)]
#[command(name = "quadform", version, about = "Exact local-global tools for positive definite integral quadratic forms")]
struct Cli {
    /// Output format: json or csv (csv only for tabular results).
    #[arg(long, global = true, default_value = "json")]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Gram {
    /// Gram matrix file of the ambient lattice S.
    #[arg(long)]
    gram: PathBuf,
}

#[derive(Args)]
struct Pair {
    #[command(flatten)]
    gram: Gram,
    /// Gram matrix file of the target lattice T.
    #[arg(long)]
    target: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Rational invariants of the quadratic space: rank, signature,
    /// determinant class, Hasse symbols.
    Invariants {
        #[command(flatten)]
        gram: Gram,
    },
    /// Jordan decomposition over Z_p.
    Jordan {
        #[command(flatten)]
        gram: Gram,
        #[arg(short, long)]
        prime: u64,
    },
    /// Local representability of T by S with imprimitivity dividing c, at one
    /// prime or at every place.
    Localrep {
        #[command(flatten)]
        pair: Pair,
        #[arg(short, long)]
        prime: Option<u64>,
        #[arg(short, default_value = "1")]
        c: BigInt,
    },
    /// Isotropy of the orthogonal complement of a representation of T at q.
    Isotropy {
        #[command(flatten)]
        pair: Pair,
        #[arg(short)]
        q: u64,
        #[arg(short, default_value = "1")]
        c: BigInt,
        /// Exact representation matrix X; otherwise a local witness is used.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Lattice minimum, or all vectors up to a norm bound.
    Minimum {
        #[command(flatten)]
        gram: Gram,
        #[arg(long)]
        bound: Option<BigInt>,
    },
    /// Global representations X with t(X) S X = T and imprimitivity dividing c.
    Represent {
        #[command(flatten)]
        pair: Pair,
        #[arg(short, default_value = "1")]
        c: BigInt,
        #[arg(long, default_value = "1")]
        limit: usize,
    },
    /// Extends a representation X of R = t(G) T G to one of T.
    Extend {
        #[command(flatten)]
        pair: Pair,
        /// Coordinates of a basis of R in the basis of the target (m x r).
        #[arg(long)]
        glue: PathBuf,
        /// The representation of R (n x r).
        #[arg(long)]
        sigma: PathBuf,
    },
    /// Class enumeration by neighbor steps. With one prime the closure is the
    /// spinor genus component reachable from S; further primes may reach
    /// other spinor genera.
    Genus {
        #[command(flatten)]
        gram: Gram,
        /// Neighbor prime; repeat to close under several primes.
        #[arg(short, long = "prime", default_value = "3")]
        primes: Vec<u64>,
        #[arg(long, default_value = "64")]
        cap: usize,
    },
    /// Checks the hypotheses of the local-global theorem.
    #[command(long_about = CHECK_HELP)]
    Check {
        #[command(flatten)]
        pair: Pair,
        #[arg(short)]
        q: u64,
        #[arg(short, default_value = "0")]
        j: u32,
        #[arg(short, default_value = "1")]
        c: BigInt,
        /// The threshold C of condition (iii).
        #[arg(long = "threshold", short = 'C', default_value = "0")]
        threshold: BigInt,
    },
    /// Runs the hypothesis pipeline over a family of targets against all
    /// classes of the genus of S and reports exceptions. Condition (ii) is
    /// ord_q(det T) <= j (see `check --help`).
    Scan {
        #[command(flatten)]
        gram: Gram,
        /// unary:B for (t), t <= B; diag2:B for diag(a, b), a <= b <= B.
        #[arg(long)]
        family: Family,
        #[arg(short)]
        q: u64,
        #[arg(short, default_value = "0")]
        j: u32,
        #[arg(short, default_value = "1")]
        c: BigInt,
        #[arg(long, default_value = "3")]
        neighbor_prime: u64,
        #[arg(long, default_value = "64")]
        class_cap: usize,
        /// Resume token from a previous partial scan.
        #[arg(long, default_value = "0")]
        offset: usize,
        #[arg(long)]
        max_rows: Option<usize>,
    },
}

/// Exit statuses.
const NEGATIVE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const UNDECIDED: u8 = 3;

fn status_code(s: LocalStatus) -> u8 {
    match s {
        LocalStatus::Representable => 0,
        LocalStatus::NotRepresentable => NEGATIVE,
        LocalStatus::Undecided => UNDECIDED,
    }
}

fn json<T: Serialize>(v: &T) -> Result<Vec<u8>, Error> {
    serde_json::to_vec_pretty(v).map_err(|e| Error::Invalid(e.to_string()))
}

fn pair(p: &Pair) -> Result<(GramMatrix, GramMatrix), Error> {
    Ok((read_gram(&p.gram.gram)?, read_gram(&p.target)?))
}

fn run(cli: Cli) -> Result<(Vec<u8>, u8), Error> {
    let format: Format = cli.format.parse()?;
    let json_only = || match format {
        Format::Json => Ok(()),
        Format::Csv => Err(Error::Invalid("csv output is not available for this command".into())),
    };
    match cli.command {
        Command::Invariants { gram } => {
            json_only()?;
            Ok((json(&space_invariants(&read_gram(&gram.gram)?)?)?, 0))
        }
        Command::Jordan { gram, prime } => {
            json_only()?;
            Ok((json(&jordan_decomposition(&read_gram(&gram.gram)?, prime)?)?, 0))
        }
        Command::Localrep { pair: p, prime, c } => {
            json_only()?;
            let (s, t) = pair(&p)?;
            match prime {
                Some(prime) => {
                    let cert = represents_over_zp(&s, &t, prime, &c)?;
                    Ok((json(&cert)?, status_code(cert.status)))
                }
                None => {
                    let certs = represents_locally_everywhere(&s, &t, &c)?;
                    Ok((json(&certs)?, status_code(summarize(&certs))))
                }
            }
        }
        Command::Isotropy { pair: p, q, c, witness } => {
            json_only()?;
            let (s, t) = pair(&p)?;
            let (method, isotropic) = match witness {
                Some(path) => {
                    let x = read_matrix(&path)?;
                    Embedding::new(&s, &t, x.clone())?;
                    ("exact", complement_isotropic_at_q(&s, ComplementWitness::Exact(&x), q)?)
                }
                None if auto_isotropy_shortcut(&s, &t, q) => ("shortcut", true),
                None => {
                    let cert = represents_over_zp(&s, &t, q, &c)?;
                    if !cert.is_representable() {
                        let out = serde_json::json!({ "method": "certificate", "isotropic": null, "certificate": cert });
                        return Ok((json(&out)?, status_code(cert.status)));
                    }
                    ("certificate", complement_isotropic_at_q(&s, ComplementWitness::Certificate(&cert), q)?)
                }
            };
            let out = serde_json::json!({ "method": method, "isotropic": isotropic });
            Ok((json(&out)?, if isotropic { 0 } else { NEGATIVE }))
        }
        Command::Minimum { gram, bound } => {
            let s = read_gram(&gram.gram)?;
            match bound {
                Some(b) => {
                    let report = short_vectors(&s, &b)?;
                    let bytes = match format {
                        Format::Json => json(&report)?,
                        Format::Csv => report.to_csv()?.into_bytes(),
                    };
                    Ok((bytes, 0))
                }
                None => {
                    json_only()?;
                    Ok((json(&serde_json::json!({ "minimum": lattice_minimum(&s)?.to_string() }))?, 0))
                }
            }
        }
        Command::Represent { pair: p, c, limit } => {
            json_only()?;
            let (s, t) = pair(&p)?;
            let found = find_representations(&s, &t, &c, Some(limit))?;
            let code = if found.is_empty() { NEGATIVE } else { 0 };
            Ok((json(&found)?, code))
        }
        Command::Extend { pair: p, glue, sigma } => {
            json_only()?;
            let (s, t_m) = pair(&p)?;
            let glue = read_matrix(&glue)?;
            if glue.rows() != t_m.rank() {
                return Err(Error::InconsistentGlue(format!("glue must have {} rows", t_m.rank())));
            }
            let r = t_m.congruent(&glue);
            let sigma = Embedding::new(&s, &r, read_matrix(&sigma)?)?;
            let tau = extend_representation(&s, &sigma, &t_m, &glue)?;
            let code = if tau.is_none() { NEGATIVE } else { 0 };
            Ok((json(&tau)?, code))
        }
        Command::Genus { gram, primes, cap } => {
            json_only()?;
            let record = enumerate_genus_with_primes(&read_gram(&gram.gram)?, &primes, cap)?;
            Ok((json(&record)?, 0))
        }
        Command::Check { pair: p, q, j, c, threshold } => {
            json_only()?;
            let (s, t) = pair(&p)?;
            let report = check_theorem_hypotheses(&s, &t, q, j, &c, &threshold)?;
            let code = if report.condition_i.local_status == LocalStatus::Undecided {
                UNDECIDED
            } else if report.hypotheses_hold() && report.globally_represented {
                0
            } else {
                NEGATIVE
            };
            Ok((report_emit(Report::Hypothesis(&report), "json")?, code))
        }
        Command::Scan { gram, family, q, j, c, neighbor_prime, class_cap, offset, max_rows } => {
            let s = read_gram(&gram.gram)?;
            let opts = ScanOptions { q, j, c, neighbor_prime, class_cap, offset, max_rows };
            let result = scan_family(&s, family, &opts)?;
            let undecided = result.rows.iter().any(|r| r.local_status == LocalStatus::Undecided);
            let code = if undecided {
                UNDECIDED
            } else if result.exceptions.is_empty() {
                0
            } else {
                NEGATIVE
            };
            Ok((report_emit(Report::Scan(&result), &cli.format)?, code))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((bytes, code)) => {
            let mut out = std::io::stdout().lock();
            let newline: &[u8] = if bytes.ends_with(b"\n") { b"" } else { b"\n" };
            if out.write_all(&bytes).and_then(|_| out.write_all(newline)).is_err() {
                return ExitCode::from(INPUT_ERROR);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
