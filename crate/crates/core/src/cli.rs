//! Command-line front end.
//!
//! Every command produces a typed record. Human output renders it as text;
//! `--json` wraps it in an [`Envelope`] holding the command name, its input
//! and, for model-based commands, the full model, so that `fingen verify`
//! can recompute and re-check the record offline.
//!
//! Exit codes: 0 success, 1 clean negative result, 2 usage error,
//! 3 internal invariant violation.

use std::fmt::Write as _;
use std::io::Read as _;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cones::{hilbert_basis, zser, ConeError, HilbertBasis, RationalCone, RationalPolytope};
use crate::dioph::{
    criterion_verify, dioph_approximate, polytope_certificate, ApproxRequest, ApproxResult,
    DiophError, Norm, PolytopeCertificate, Verdict,
};
use crate::fingenlab::{
    adjoint_trace, canonical_example, elliptic_support_with, min_sample_bound, width_threshold, zigzag_descend,
    AdjointOutcome, CanonicalExample, ConeSplit, FingenError, GradedSupport, WidthReport,
    ZigzagChain, DEFAULT_SAMPLE_BOUND,
};
use crate::qlinalg::{format_qvec, parse_qvec, LinalgError, QVec, Rat};
use crate::selftest::{run_selftest, Corruption, SelftestOptions, SelftestReport};
use crate::surface::{Divisor, ModelFile, SurfaceError, SurfaceModel};
use crate::zariski::{
    default_ample, sigma, sigma_decomposition, sigma_prime, zariski_decompose, zariski_oracle,
    SigmaDecomposition, SigmaValue, ZariskiError, ZariskiResult,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "fingen", version, about = "Exact Zariski, sigma, Diophantine and cone computations on surface models")]
struct Cli {
    /// Emit structured JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ModelArg {
    /// Bundled model name (blp2, blp2x2, hirzebruch-0/1/2) or path to a model JSON file.
    #[arg(long)]
    model: String,
}

#[derive(Args, Debug, Clone)]
struct SplitArgs {
    /// D in (S1, S2) coordinates, e.g. "1,1".
    #[arg(long, default_value = "1,1", allow_hyphen_values = true)]
    d: String,
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    b1: String,
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    b2: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zariski decomposition with certificate.
    Zariski {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
        /// Use the exhaustive subset oracle instead of support growth.
        #[arg(long)]
        oracle: bool,
    },
    /// Sigma invariants and the sigma decomposition.
    Sigma {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
        /// Restrict to one generator label.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
        /// Ample class for the limit; defaults to the sum of the nef rays.
        #[arg(long, allow_hyphen_values = true)]
        ample: Option<String>,
        /// Report sigma' (no limit) instead of sigma.
        #[arg(long)]
        prime: bool,
    },
    /// Simultaneous Diophantine approximation.
    Dioph {
        /// Point, e.g. "1/2,1/3".
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, allow_hyphen_values = true)]
        eps: String,
        /// euclidean or max.
        #[arg(long, default_value = "euclidean")]
        norm: String,
    },
    /// Integral half-space certificate of a rational polytope.
    PolytopeCert {
        /// Vertices separated by ';', e.g. "0,0;1,0;0,1".
        #[arg(long, allow_hyphen_values = true)]
        vertices: String,
    },
    /// Checks one instance of the integral-approximation criterion.
    PolytopeVerify {
        #[arg(long, allow_hyphen_values = true)]
        vertices: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long, default_value_t = 1)]
        l: u64,
    },
    /// Hilbert basis of a pointed rational cone.
    Hilbert {
        /// Generators separated by ';', e.g. "1,0;1,3".
        #[arg(long, allow_hyphen_values = true)]
        rays: String,
        /// Integral cone point to decompose over the basis.
        #[arg(long, allow_hyphen_values = true)]
        decompose: Option<String>,
    },
    /// Width threshold of a cone split.
    Width {
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Zig-zag descent of an integral cone point.
    Zigzag {
        #[command(flatten)]
        split: SplitArgs,
        /// Starting point, e.g. "30,20".
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        /// Threshold; defaults to the width threshold.
        #[arg(long)]
        m: Option<i64>,
    },
    /// Replays the adjoint divisor arithmetic for K + A + B.
    AdjointTrace {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Worked examples.
    Example {
        #[command(subcommand)]
        which: ExampleCommand,
    },
    /// Runs the seeded property suite.
    Selftest {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Tamper with one certificate field; the run must then fail.
        #[arg(long, value_enum)]
        corrupt: Option<Corruption>,
    },
    /// Re-verifies structured output produced with --json.
    Verify {
        /// File to read, or '-' for standard input.
        #[arg(long, default_value = "-")]
        input: String,
    },
}

#[derive(Subcommand, Debug)]
enum ExampleCommand {
    /// Two-divisor ring on an elliptic curve whose support span is not closed.
    Cutkosky {
        /// Denominator of B2.
        #[arg(long)]
        k: u64,
        /// Numerator of B2, with 0 < num < k.
        #[arg(long)]
        num: u64,
        /// Degree of A; 0 is the counterexample, positive degrees the control.
        #[arg(long, default_value_t = 0)]
        a_degree: u64,
        /// Largest m1 + m2 sampled; defaults to the larger of 30 and the least
        /// bound reaching both rays.
        #[arg(long)]
        sample_bound: Option<u64>,
    },
    /// Non-surjective restriction for a canonical ring.
    Canonical {
        #[arg(long)]
        m: u64,
    },
}

/// Structured output of one command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Envelope {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelFile>,
    pub input: Value,
    pub result: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZariskiInput {
    pub divisor: String,
    #[serde(default)]
    pub oracle: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaInput {
    pub divisor: String,
    pub gamma: Option<String>,
    pub ample: Option<String>,
    #[serde(default)]
    pub prime: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaRecord {
    #[serde(rename = "D")]
    pub divisor: Divisor,
    pub ample: Option<Divisor>,
    pub values: Vec<SigmaValue>,
    pub decomposition: Option<SigmaDecomposition>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeInput {
    pub vertices: Vec<QVec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeVerifyInput {
    pub vertices: Vec<QVec>,
    pub v: QVec,
    pub w: QVec,
    pub l: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeVerifyRecord {
    pub certificate: PolytopeCertificate,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertInput {
    pub rays: Vec<QVec>,
    pub decompose: Option<QVec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertRecord {
    #[serde(with = "zser::vecs")]
    pub elements: Vec<Vec<BigInt>>,
    /// Multiplicities over `elements` for the requested point.
    pub decomposition: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitInput {
    pub d: QVec,
    pub b1: Rat,
    pub b2: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZigzagInput {
    #[serde(flatten)]
    pub split: SplitInput,
    pub start: (i64, i64),
    pub m: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjointInput {
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutkoskyInput {
    pub k: u64,
    pub num: u64,
    pub a_degree: u64,
    pub sample_bound: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalInput {
    pub m: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestInput {
    pub seed: u64,
    pub trials: usize,
    pub corrupt: Option<Corruption>,
}

/// A command's typed result.
#[derive(Clone, Debug, PartialEq)]
pub enum Record {
    Zariski(ZariskiResult),
    Sigma(SigmaRecord),
    Dioph(ApproxResult),
    PolytopeCert(PolytopeCertificate),
    PolytopeVerify(PolytopeVerifyRecord),
    Hilbert(HilbertRecord),
    Width(WidthReport),
    Zigzag(ZigzagChain),
    Adjoint(AdjointOutcome),
    Cutkosky(GradedSupport),
    Canonical(CanonicalExample),
    Selftest(SelftestReport),
}

/// Failure classes, one per nonzero exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CliError {
    Negative(String),
    Usage(String),
    Invariant(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Negative(_) => EXIT_NEGATIVE,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Invariant(_) => EXIT_INVARIANT,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Negative(m) | CliError::Usage(m) | CliError::Invariant(m) => m,
        }
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        match e {
            SurfaceError::Linalg(_) => CliError::Invariant(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ConeError> for CliError {
    fn from(e: ConeError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ZariskiError> for CliError {
    fn from(e: ZariskiError) -> Self {
        match e {
            ZariskiError::NotPseudoEffective(_) => CliError::Negative(e.to_string()),
            ZariskiError::NotAmple(_) | ZariskiError::TooManyGenerators(_) => {
                CliError::Usage(e.to_string())
            }
            ZariskiError::Surface(s) => s.into(),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<DiophError> for CliError {
    fn from(e: DiophError) -> Self {
        match e {
            DiophError::BudgetExceeded(_) => CliError::Negative(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<FingenError> for CliError {
    fn from(e: FingenError) -> Self {
        match e {
            FingenError::NotPseudoEffective(_) => CliError::Negative(e.to_string()),
            FingenError::InvariantViolated(_) => CliError::Invariant(e.to_string()),
            FingenError::Surface(s) => s.into(),
            FingenError::Zariski(z) => z.into(),
            FingenError::Cone(c) => c.into(),
            FingenError::Linalg(l) => CliError::Invariant(l.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Captured result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn usage(m: impl std::fmt::Display) -> CliError {
    CliError::Usage(m.to_string())
}

fn parse_rat(s: &str) -> Result<Rat, CliError> {
    s.trim().parse().map_err(|e| usage(format!("`{s}`: {e}")))
}

fn parse_vec(s: &str) -> Result<QVec, CliError> {
    parse_qvec(s).map_err(|e| usage(format!("`{s}`: {e}")))
}

fn parse_vecs(s: &str) -> Result<Vec<QVec>, CliError> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_vec).collect()
}

fn parse_point(s: &str) -> Result<(i64, i64), CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [x, y] => Ok((
            x.parse().map_err(|_| usage(format!("`{s}` is not an integral point")))?,
            y.parse().map_err(|_| usage(format!("`{s}` is not an integral point")))?,
        )),
        _ => Err(usage(format!("`{s}` must have two coordinates"))),
    }
}

fn to_zvec(v: &[Rat]) -> Result<Vec<BigInt>, CliError> {
    v.iter()
        .map(|c| c.to_integer().ok_or_else(|| usage(format!("{} is not an integer", format_qvec(v)))))
        .collect()
}

fn split_input(a: &SplitArgs) -> Result<SplitInput, CliError> {
    Ok(SplitInput {
        d: parse_vec(&a.d)?,
        b1: parse_rat(&a.b1)?,
        b2: parse_rat(&a.b2)?,
    })
}

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("records serialize")
}

fn from_value<T: DeserializeOwned>(v: &Value, what: &str) -> Result<T, CliError> {
    serde_json::from_value(v.clone()).map_err(|e| usage(format!("malformed {what}: {e}")))
}

/// Turns parsed arguments into a command name, its input and optional model.
fn prepare(cmd: &Command) -> Result<(String, Value, Option<SurfaceModel>), CliError> {
    let load = |m: &ModelArg| SurfaceModel::resolve(&m.model).map_err(CliError::from);
    Ok(match cmd {
        Command::Zariski { model, divisor, oracle } => (
            "zariski".into(),
            to_value(&ZariskiInput {
                divisor: divisor.clone(),
                oracle: *oracle,
            }),
            Some(load(model)?),
        ),
        Command::Sigma {
            model,
            divisor,
            gamma,
            ample,
            prime,
        } => (
            "sigma".into(),
            to_value(&SigmaInput {
                divisor: divisor.clone(),
                gamma: gamma.clone(),
                ample: ample.clone(),
                prime: *prime,
            }),
            Some(load(model)?),
        ),
        Command::Dioph { x, k, eps, norm } => (
            "dioph".into(),
            to_value(&ApproxRequest {
                x: parse_vec(x)?,
                k: *k,
                eps: parse_rat(eps)?,
                norm: norm.parse::<Norm>().map_err(usage)?,
            }),
            None,
        ),
        Command::PolytopeCert { vertices } => (
            "polytope-cert".into(),
            to_value(&PolytopeInput {
                vertices: parse_vecs(vertices)?,
            }),
            None,
        ),
        Command::PolytopeVerify { vertices, v, w, l } => (
            "polytope-verify".into(),
            to_value(&PolytopeVerifyInput {
                vertices: parse_vecs(vertices)?,
                v: parse_vec(v)?,
                w: parse_vec(w)?,
                l: *l,
            }),
            None,
        ),
        Command::Hilbert { rays, decompose } => (
            "hilbert".into(),
            to_value(&HilbertInput {
                rays: parse_vecs(rays)?,
                decompose: decompose.as_deref().map(parse_vec).transpose()?,
            }),
            None,
        ),
        Command::Width { split } => ("width".into(), to_value(&split_input(split)?), None),
        Command::Zigzag { split, start, m } => (
            "zigzag".into(),
            to_value(&ZigzagInput {
                split: split_input(split)?,
                start: parse_point(start)?,
                m: *m,
            }),
            None,
        ),
        Command::AdjointTrace { model, a, b } => (
            "adjoint-trace".into(),
            to_value(&AdjointInput {
                a: a.clone(),
                b: b.clone(),
            }),
            Some(load(model)?),
        ),
        Command::Example {
            which:
                ExampleCommand::Cutkosky {
                    k,
                    num,
                    a_degree,
                    sample_bound,
                },
        } => (
            "example-cutkosky".into(),
            to_value(&CutkoskyInput {
                k: *k,
                num: *num,
                a_degree: *a_degree,
                sample_bound: sample_bound
                    .unwrap_or_else(|| DEFAULT_SAMPLE_BOUND.max(min_sample_bound(*k, *num, *a_degree))),
            }),
            None,
        ),
        Command::Example {
            which: ExampleCommand::Canonical { m },
        } => ("example-canonical".into(), to_value(&CanonicalInput { m: *m }), None),
        Command::Selftest { seed, trials, corrupt } => (
            "selftest".into(),
            to_value(&SelftestInput {
                seed: *seed,
                trials: *trials,
                corrupt: *corrupt,
            }),
            None,
        ),
        Command::Verify { .. } => unreachable!("handled separately"),
    })
}

fn need_model<'a>(model: Option<&'a SurfaceModel>, command: &str) -> Result<&'a SurfaceModel, CliError> {
    model.ok_or_else(|| usage(format!("`{command}` needs a model")))
}

fn split_from(s: &SplitInput) -> Result<ConeSplit, CliError> {
    Ok(ConeSplit::new(s.d.clone(), s.b1.clone(), s.b2.clone())?)
}

fn hilbert_for(input: &HilbertInput) -> Result<HilbertBasis, CliError> {
    let dim = input.rays.first().map(Vec::len).ok_or_else(|| usage("no rays given"))?;
    let cone = RationalCone::from_generators(dim, input.rays.clone())?;
    Ok(hilbert_basis(&cone)?)
}

/// Computes the record for `command` on `input`.
pub fn execute(command: &str, model: Option<&SurfaceModel>, input: &Value) -> Result<Record, CliError> {
    Ok(match command {
        "zariski" => {
            let m = need_model(model, command)?;
            let i: ZariskiInput = from_value(input, "input")?;
            let d = m.parse(&i.divisor)?;
            Record::Zariski(if i.oracle {
                zariski_oracle(m, &d)?
            } else {
                zariski_decompose(m, &d)?
            })
        }
        "sigma" => {
            let m = need_model(model, command)?;
            let i: SigmaInput = from_value(input, "input")?;
            let d = m.parse(&i.divisor)?;
            let gammas: Vec<String> = match &i.gamma {
                Some(g) => vec![g.clone()],
                None => m.generators().iter().map(|g| g.label.clone()).collect(),
            };
            if i.prime {
                let values = gammas
                    .iter()
                    .map(|g| sigma_prime(m, &d, g))
                    .collect::<Result<_, _>>()?;
                Record::Sigma(SigmaRecord {
                    divisor: d,
                    ample: None,
                    values,
                    decomposition: None,
                })
            } else {
                let a = match &i.ample {
                    Some(s) => m.parse(s)?,
                    None => default_ample(m)?,
                };
                let (values, decomposition) = if i.gamma.is_some() || !m.is_pseudoeffective(&d)?.pseudoeffective {
                    let values = gammas
                        .iter()
                        .map(|g| sigma(m, &d, g, &a))
                        .collect::<Result<_, _>>()?;
                    (values, None)
                } else {
                    let s = sigma_decomposition(m, &d, &a)?;
                    (s.values.clone(), Some(s))
                };
                Record::Sigma(SigmaRecord {
                    divisor: d,
                    ample: Some(a),
                    values,
                    decomposition,
                })
            }
        }
        "dioph" => Record::Dioph(dioph_approximate(&from_value(input, "input")?)?),
        "polytope-cert" => {
            let i: PolytopeInput = from_value(input, "input")?;
            Record::PolytopeCert(polytope_certificate(&polytope(&i.vertices)?)?)
        }
        "polytope-verify" => {
            let i: PolytopeVerifyInput = from_value(input, "input")?;
            let p = polytope(&i.vertices)?;
            let certificate = polytope_certificate(&p)?;
            for x in [&i.v, &i.w] {
                if x.len() != p.dim() {
                    return Err(usage(format!("{} has the wrong dimension", format_qvec(x))));
                }
            }
            let verdict = criterion_verify(&p, &certificate, &i.v, &i.w, i.l)?;
            Record::PolytopeVerify(PolytopeVerifyRecord { certificate, verdict })
        }
        "hilbert" => {
            let i: HilbertInput = from_value(input, "input")?;
            let hb = hilbert_for(&i)?;
            let decomposition = match &i.decompose {
                Some(p) => {
                    let z = to_zvec(p)?;
                    if z.len() != i.rays[0].len() {
                        return Err(usage("point has the wrong dimension"));
                    }
                    Some(hb.decompose(&z).ok_or_else(|| {
                        CliError::Negative(format!("{} is not in the cone", format_qvec(p)))
                    })?)
                }
                None => None,
            };
            Record::Hilbert(HilbertRecord {
                elements: hb.elements,
                decomposition,
            })
        }
        "width" => Record::Width(width_threshold(&split_from(&from_value(input, "input")?)?)?),
        "zigzag" => {
            let i: ZigzagInput = from_value(input, "input")?;
            let split = split_from(&i.split)?;
            let m = match i.m {
                Some(m) => m,
                None => width_threshold(&split)?.m,
            };
            Record::Zigzag(zigzag_descend(&split, m, i.start)?)
        }
        "adjoint-trace" => {
            let m = need_model(model, command)?;
            let i: AdjointInput = from_value(input, "input")?;
            Record::Adjoint(adjoint_trace(m, &m.parse(&i.a)?, &m.parse(&i.b)?)?)
        }
        "example-cutkosky" => {
            let i: CutkoskyInput = from_value(input, "input")?;
            Record::Cutkosky(elliptic_support_with(i.k, i.num, i.a_degree, i.sample_bound)?)
        }
        "example-canonical" => {
            let i: CanonicalInput = from_value(input, "input")?;
            Record::Canonical(canonical_example(i.m)?)
        }
        "selftest" => {
            let i: SelftestInput = from_value(input, "input")?;
            Record::Selftest(run_selftest(&SelftestOptions {
                seed: i.seed,
                trials: i.trials,
                corrupt: i.corrupt,
            }))
        }
        other => return Err(usage(format!("unknown command `{other}`"))),
    })
}

fn polytope(vertices: &[QVec]) -> Result<RationalPolytope, CliError> {
    let dim = vertices.first().map(Vec::len).ok_or_else(|| usage("no vertices given"))?;
    let p = RationalPolytope::from_vertices(dim, vertices.to_vec())?;
    p.vertices()?;
    Ok(p)
}

impl Record {
    pub fn to_value(&self) -> Value {
        match self {
            Record::Zariski(r) => to_value(r),
            Record::Sigma(r) => to_value(r),
            Record::Dioph(r) => to_value(r),
            Record::PolytopeCert(r) => to_value(r),
            Record::PolytopeVerify(r) => to_value(r),
            Record::Hilbert(r) => to_value(r),
            Record::Width(r) => to_value(r),
            Record::Zigzag(r) => to_value(r),
            Record::Adjoint(r) => to_value(r),
            Record::Cutkosky(r) => to_value(r),
            Record::Canonical(r) => to_value(r),
            Record::Selftest(r) => to_value(r),
        }
    }

    /// Reads the record of `command` from JSON.
    pub fn from_value(command: &str, v: &Value) -> Result<Record, CliError> {
        let w = "result";
        Ok(match command {
            "zariski" => Record::Zariski(from_value(v, w)?),
            "sigma" => Record::Sigma(from_value(v, w)?),
            "dioph" => Record::Dioph(from_value(v, w)?),
            "polytope-cert" => Record::PolytopeCert(from_value(v, w)?),
            "polytope-verify" => Record::PolytopeVerify(from_value(v, w)?),
            "hilbert" => Record::Hilbert(from_value(v, w)?),
            "width" => Record::Width(from_value(v, w)?),
            "zigzag" => Record::Zigzag(from_value(v, w)?),
            "adjoint-trace" => Record::Adjoint(from_value(v, w)?),
            "example-cutkosky" => Record::Cutkosky(from_value(v, w)?),
            "example-canonical" => Record::Canonical(from_value(v, w)?),
            "selftest" => Record::Selftest(from_value(v, w)?),
            other => return Err(usage(format!("unknown command `{other}`"))),
        })
    }

    /// Re-checks the record's own certificates. Records whose divisors came
    /// from JSON are first re-attached to `model`.
    pub fn check(&self, model: Option<&SurfaceModel>) -> Result<(), String> {
        match self {
            Record::Zariski(r) => r.verify(model.ok_or("missing model")?).map_err(|e| e.to_string()),
            Record::Sigma(r) => {
                let Some(s) = &r.decomposition else { return Ok(()) };
                let m = model.ok_or("missing model")?;
                let sum = m
                    .adopt(&s.positive)
                    .and_then(|p| p.try_add(&m.adopt(&s.negative)?))
                    .map_err(|e| e.to_string())?;
                if sum != m.adopt(&r.divisor).map_err(|e| e.to_string())? {
                    return Err("P_sigma + N_sigma differs from D".into());
                }
                if s.values != r.values {
                    return Err("sigma values disagree with the decomposition".into());
                }
                Ok(())
            }
            Record::Dioph(r) => r.verify(),
            Record::PolytopeCert(c) => c.check_norms().then_some(()).ok_or_else(|| "norm bound fails".into()),
            Record::PolytopeVerify(r) => match r.verdict {
                Verdict::Violation => Err("criterion violated".into()),
                _ if !r.certificate.check_norms() => Err("norm bound fails".into()),
                _ => Ok(()),
            },
            Record::Hilbert(r) => match &r.decomposition {
                Some(mult) if mult.len() != r.elements.len() => Err("decomposition length differs".into()),
                _ => Ok(()),
            },
            Record::Width(_) | Record::Zigzag(_) | Record::Cutkosky(_) => Ok(()),
            Record::Adjoint(AdjointOutcome::Trace(t)) => {
                let m = model.ok_or("missing model")?;
                if !t.checks.all() {
                    return Err(format!("trace identities fail: {:?}", t.checks));
                }
                t.zariski.verify(m).map_err(|e| e.to_string())
            }
            Record::Adjoint(AdjointOutcome::TrivialPositivePart { zariski }) => {
                zariski.verify(model.ok_or("missing model")?).map_err(|e| e.to_string())
            }
            Record::Canonical(c) => c.verify(),
            Record::Selftest(r) => {
                if r.passed() {
                    Ok(())
                } else {
                    let failed: Vec<&str> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                    Err(format!("failed checks: {}", failed.join(", ")))
                }
            }
        }
    }

    /// Exit code for a record that was computed and re-checked.
    fn status(&self) -> i32 {
        match self {
            Record::Sigma(r) if r.values.iter().any(|v| !v.is_defined()) => EXIT_NEGATIVE,
            Record::PolytopeVerify(PolytopeVerifyRecord {
                verdict: Verdict::Inapplicable(_),
                ..
            }) => EXIT_NEGATIVE,
            _ => EXIT_OK,
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let o = &mut s;
        match self {
            Record::Zariski(r) => {
                let _ = writeln!(o, "model: {}", r.model);
                let _ = writeln!(o, "D = {}", r.divisor);
                let _ = writeln!(o, "P = {}", r.positive);
                let _ = writeln!(o, "N = {}", r.negative);
                let labels: Vec<String> = r.support.iter().map(|g| label(g)).collect();
                let _ = writeln!(o, "support: {}", list(&labels));
                for (g, v) in &r.certificate.coefficients {
                    let _ = writeln!(o, "  weight of {} in N: {v}", label(g));
                }
                for (g, v) in &r.certificate.nef_values {
                    let _ = writeln!(o, "  P.{} = {v}", label(g));
                }
                let minors: Vec<String> = r.certificate.minors.iter().map(Rat::to_string).collect();
                let _ = writeln!(o, "  minors of -Q_N: [{}]", minors.join(", "));
                let _ = writeln!(o, "certificate: OK");
            }
            Record::Sigma(r) => {
                let _ = writeln!(o, "D = {}", r.divisor);
                if let Some(a) = &r.ample {
                    let _ = writeln!(o, "A = {a}");
                }
                let name = if r.ample.is_some() { "sigma" } else { "sigma'" };
                for v in &r.values {
                    match &v.value {
                        Some(x) => {
                            let _ = writeln!(o, "{name}_{} = {x}", label(&v.gamma));
                        }
                        None => {
                            let _ = writeln!(o, "{name}_{} undefined (not pseudo-effective)", label(&v.gamma));
                        }
                    }
                }
                if let Some(d) = &r.decomposition {
                    let _ = writeln!(o, "N_sigma = {}", d.negative);
                    let _ = writeln!(o, "P_sigma = {}", d.positive);
                }
            }
            Record::Dioph(r) => {
                let _ = writeln!(
                    o,
                    "x = {}, k = {}, eps = {}, norm = {:?}",
                    format_qvec(&r.request.x),
                    r.request.k,
                    r.request.eps,
                    r.request.norm
                );
                for p in &r.points {
                    let _ = writeln!(o, "  x_i = {}  k_i = {}  weight = {}", format_qvec(&p.x), p.k, p.weight);
                }
                let _ = writeln!(o, "verified: all clauses hold");
            }
            Record::PolytopeCert(c) => render_cert(o, c),
            Record::PolytopeVerify(r) => {
                render_cert(o, &r.certificate);
                let _ = match &r.verdict {
                    Verdict::Confirmed => writeln!(o, "verdict: CONFIRMED"),
                    Verdict::Inapplicable(why) => writeln!(o, "verdict: INAPPLICABLE ({why})"),
                    Verdict::Violation => writeln!(o, "verdict: VIOLATION"),
                };
            }
            Record::Hilbert(r) => {
                let _ = writeln!(o, "Hilbert basis ({} elements):", r.elements.len());
                for e in &r.elements {
                    let _ = writeln!(o, "  {}", zfmt(e));
                }
                if let Some(mult) = &r.decomposition {
                    let terms: Vec<String> = mult
                        .iter()
                        .zip(&r.elements)
                        .filter(|(m, _)| **m > 0)
                        .map(|(m, e)| format!("{m}*{}", zfmt(e)))
                        .collect();
                    let _ = writeln!(o, "decomposition: {}", if terms.is_empty() { "0".into() } else { terms.join(" + ") });
                }
            }
            Record::Width(w) => {
                let _ = writeln!(o, "M = {}", w.m);
                let _ = writeln!(o, "per subcone: M1 = {}, M2 = {}", w.per_subcone[0], w.per_subcone[1]);
                match &w.witness {
                    Some(x) => {
                        let _ = writeln!(
                            o,
                            "minimality witness: ({}, {}) in C{} fails at x + y = {}",
                            x.point.0,
                            x.point.1,
                            x.subcone,
                            x.point.0 + x.point.1
                        );
                    }
                    None => {
                        let _ = writeln!(o, "minimality witness: none needed (M = 1)");
                    }
                }
                let _ = writeln!(o, "scanned x + y <= {}, violations impossible beyond {}", w.scanned_to, w.tail_bound);
            }
            Record::Zigzag(c) => {
                let pts: Vec<String> = c.points.iter().map(|(x, y)| format!("({x},{y})")).collect();
                let _ = writeln!(o, "M = {}", c.m);
                let _ = writeln!(o, "steps: {}", c.len());
                let _ = writeln!(o, "chain: {}", pts.join(" -> "));
            }
            Record::Adjoint(AdjointOutcome::Trace(t)) => {
                let _ = writeln!(o, "model: {}", t.model);
                let _ = writeln!(o, "A = {}", t.a);
                let _ = writeln!(o, "B = {}", t.b);
                let _ = writeln!(o, "D = K + A + B = {}", t.zariski.divisor);
                let _ = writeln!(o, "P = {}", t.zariski.positive);
                let _ = writeln!(o, "N = {}", t.zariski.negative);
                let _ = writeln!(o, "lambda = {}", t.lambda);
                let _ = writeln!(o, "coordinates over the effective generators:");
                let _ = writeln!(o, "  B = {}", t.b_coords);
                let _ = writeln!(o, "  P = {}", t.p_coords);
                let _ = writeln!(o, "  N = {}", t.n_coords);
                let _ = writeln!(o, "  Sigma = {}", t.sigma);
                let _ = writeln!(o, "  R = {}", t.r);
                let _ = writeln!(o, "  B' = {}", t.b_prime);
                let _ = writeln!(o, "0 <= R <= ceil(N): {}", t.checks.r_bounds);
                let _ = writeln!(o, "B' coefficients in (0, 1]: {}", t.checks.b_prime_range);
                let _ = writeln!(o, "floor(B') = Sigma: {}", t.checks.floor_is_sigma);
            }
            Record::Adjoint(AdjointOutcome::TrivialPositivePart { zariski }) => {
                let _ = writeln!(o, "D = {}", zariski.divisor);
                let _ = writeln!(o, "P = 0, N = {}", zariski.negative);
                let _ = writeln!(o, "lambda is infinite: nothing to replay");
            }
            Record::Cutkosky(s) => {
                let _ = writeln!(o, "B2 = {}/{} * p, deg A = {}", s.num, s.k, s.a_degree);
                let _ = writeln!(o, "rule: {}", s.rule);
                let _ = writeln!(o, "support: {}", s.describe());
                let _ = writeln!(o, "sampled points with m1 + m2 <= {}: {}", s.sample_bound, s.sampled_points.len());
                let rays = |v: &[(u64, u64)]| {
                    let r: Vec<String> = v.iter().map(|(a, b)| format!("({a},{b})")).collect();
                    if r.is_empty() { "none".into() } else { r.join(", ") }
                };
                let _ = writeln!(o, "closure rays: {}", rays(&s.closure_rays));
                let _ = writeln!(o, "unattained rays: {}", rays(&s.unattained_rays));
                let _ = writeln!(o, "span closed: {}", s.closed);
                let _ = writeln!(o, "verdict: {}", s.verdict);
            }
            Record::Canonical(c) => {
                let _ = writeln!(o, "m = {}", c.m);
                let _ = writeln!(o, "h0_X = {}", c.h0_x);
                let _ = writeln!(o, "h0_X_minus_S = {}", c.h0_x_minus_s);
                let _ = writeln!(o, "h0_S = {}", c.h0_s);
                let _ = writeln!(o, "surjective: {}", c.surjective);
                let _ = writeln!(o, "deficit: {}", c.deficit);
            }
            Record::Selftest(r) => {
                for c in &r.checks {
                    let _ = writeln!(o, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                }
                let _ = writeln!(
                    o,
                    "{}/{} checks passed",
                    r.checks.iter().filter(|c| c.passed).count(),
                    r.checks.len()
                );
            }
        }
        s
    }
}

fn label(g: &str) -> String {
    if g.contains(' ') {
        format!("({g})")
    } else {
        g.to_string()
    }
}

fn list(v: &[String]) -> String {
    if v.is_empty() {
        "(empty)".into()
    } else {
        v.join(", ")
    }
}

fn zfmt(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(BigInt::to_string).collect();
    format!("({})", parts.join(", "))
}

fn render_cert(o: &mut String, c: &PolytopeCertificate) {
    let _ = writeln!(o, "eps = {}, k = {}", c.eps, c.k);
    for h in &c.halfspaces {
        let _ = writeln!(o, "  {} . x >= {}", zfmt(&h.psi), h.c);
    }
}

/// Recomputes `env` from its input and re-checks the stored record.
pub fn verify_envelope(env: &Envelope) -> Result<(), CliError> {
    let model = match &env.model {
        Some(f) => Some(SurfaceModel::from_file(f.clone(), "model")?),
        None => None,
    };
    let stored = Record::from_value(&env.command, &env.result)?;
    stored.check(model.as_ref()).map_err(CliError::Invariant)?;
    let fresh = execute(&env.command, model.as_ref(), &env.input)?;
    if fresh.to_value() != env.result {
        return Err(CliError::Invariant(format!(
            "recomputed `{}` result differs from the stored one",
            env.command
        )));
    }
    Ok(())
}

/// Runs one command line; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                CliOutput { code, stdout: text, stderr: String::new() }
            } else {
                CliOutput { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli) {
        Ok((code, stdout)) => CliOutput {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => CliOutput {
            code: e.code(),
            stdout: if cli.json {
                let v = serde_json::json!({ "error": e.message(), "exit_code": e.code() });
                format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
            } else {
                String::new()
            },
            stderr: format!("error: {}\n", e.message()),
        },
    }
}

fn dispatch(cli: &Cli) -> Result<(i32, String), CliError> {
    if let Command::Verify { input } = &cli.command {
        let text = if input == "-" {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| usage(format!("cannot read standard input: {e}")))?;
            s
        } else {
            std::fs::read_to_string(input).map_err(|e| usage(format!("{input}: {e}")))?
        };
        let env: Envelope = serde_json::from_str(&text).map_err(|e| usage(format!("not a fingen record: {e}")))?;
        verify_envelope(&env)?;
        let out = if cli.json {
            let v = serde_json::json!({ "command": env.command, "verified": true });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
        } else {
            format!("verified: {} record re-checks\n", env.command)
        };
        return Ok((EXIT_OK, out));
    }
    let (command, input, model) = prepare(&cli.command)?;
    let record = execute(&command, model.as_ref(), &input)?;
    let value = record.to_value();
    // Re-check what is about to be printed, through the same path `verify` uses.
    let reread = Record::from_value(&command, &value)?;
    let problem = reread.check(model.as_ref()).err();
    let text = if cli.json {
        let env = Envelope {
            command: command.clone(),
            model: model.as_ref().map(SurfaceModel::to_file),
            input,
            result: value,
        };
        format!("{}\n", serde_json::to_string_pretty(&env).expect("json"))
    } else {
        record.render()
    };
    match problem {
        // The selftest report is still worth printing when it fails.
        Some(_) if matches!(record, Record::Selftest(_)) => Ok((EXIT_INVARIANT, text)),
        Some(p) => Err(CliError::Invariant(p)),
        None => Ok((record.status(), text)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> CliOutput {
        run(std::iter::once("fingen").chain(args.iter().copied()))
    }

    #[test]
    fn zariski_human() {
        let out = go(&["zariski", "--model", "blp2", "--divisor", "1*H + 2*E"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert!(out.stdout.contains("P = 1*H"));
        assert!(out.stdout.contains("N = 2*E"));
        assert!(out.stdout.contains("certificate: OK"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(go(&["zariski", "--model", "blp2", "--divisor", "-H"]).code, 1);
        assert_eq!(go(&["zariski", "--model", "blp2"]).code, 2);
        assert_eq!(go(&["zariski", "--model", "nowhere", "--divisor", "H"]).code, 2);
        assert_eq!(go(&["zariski", "--model", "blp2", "--divisor", "2*Q"]).code, 2);
        assert_eq!(go(&["bogus"]).code, 2);
        assert_eq!(go(&["--help"]).code, 0);
    }

    #[test]
    fn examples_human() {
        let out = go(&["example", "canonical", "--m", "1"]);
        assert!(out.stdout.contains("h0_X = 15"));
        assert!(out.stdout.contains("h0_X_minus_S = 6"));
        assert!(out.stdout.contains("h0_S = 10"));
        assert!(out.stdout.contains("surjective: false"));
        assert!(out.stdout.contains("deficit: 1"));
        let out = go(&["example", "cutkosky", "--k", "2", "--num", "1"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("NOT finitely generated"));
        assert!(out.stdout.contains("m2 >= 2"));
    }

    #[test]
    fn json_round_trip() {
        let out = go(&["--json", "width"]);
        let env: Envelope = serde_json::from_str(&out.stdout).unwrap();
        verify_envelope(&env).unwrap();
        let mut bad = env.clone();
        bad.result["m"] = Value::from(4);
        assert_eq!(verify_envelope(&bad).unwrap_err().code(), 3);
    }
}
