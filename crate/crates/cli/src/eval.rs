//! Single queries, each answered by one JSON object.

use std::path::{Path, PathBuf};

use amalgam_core::catlab::{backsim, iso_via_decomposition, verify_backsim, DecompositionIso};
use amalgam_core::class::{ClassInstance, Diagram, IsoVerdict};
use amalgam_core::indep::{nonforks, GaloisType, GaloisTypes, IndepQuery};
use amalgam_core::instances::group::fold::{rewrite, FoldedGraph};
use amalgam_core::instances::group::free::{FreeAmalgam, FreeFactors};
use amalgam_core::instances::group::smallcanc::{
    dehn_trivial, SCPresentation, SmallCancellation, TemplateQuotients, TEMPLATE_RELATOR,
};
use amalgam_core::instances::group::sqfree::{PrimeSet, PrimeUnion, SquarefreeAbelian};
use amalgam_core::instances::group::word::Word;
use amalgam_core::instances::vec::{is_direct_amalgam, DirectSum, Subspace, VecSpace, Vector};
use amalgam_core::notion::{decompose, oplus, uniqueness_iso, Notion};
use amalgam_core::pregeom::DerivedNotion;
use amalgam_core::report::{digest, to_value};
use amalgam_core::seqamal::{assemble_inside, mu_witness, verify_certificate, Cert};
use amalgam_core::uniqueness::{Separation, Witness};
use amalgam_core::Error;
use clap::{Args, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{InstanceKind, SuiteConfig};

#[derive(Debug, Subcommand)]
pub enum Query {
    /// Whether `A` is independent from `B` over `M` in `GF(p)^ambient`.
    Indep(IndepArgs),
    /// `M1 ⊕ M2` over `M0` inside `N`.
    Oplus(OplusArgs),
    /// A complement of `M1` over `M0` inside `N`.
    Decompose(DecomposeArgs),
    /// Sequential amalgam of subspaces by inclusion, written as a certificate file.
    Assemble(AssembleArgs),
    /// Least index set whose sub-amalgam contains an element.
    Mu(MuArgs),
    /// Equality of the Galois types of two vectors over a subspace.
    GtypeEq(GtypeArgs),
    /// Backward similarity of two (top, bottom) pairs.
    Backsim(BacksimArgs),
    /// Word problem in a C'(1/6) presentation.
    Dehn(DehnArgs),
    /// Membership in a finitely generated subgroup of a free group.
    Fold(FoldArgs),
    /// Re-verify every failed check's counterexample in a report.
    Recheck(RecheckArgs),
}

#[derive(Debug, Args)]
pub struct VecArgs {
    #[arg(long, default_value = "vec-gf2")]
    pub instance: String,
    #[arg(long)]
    pub ambient: usize,
}

#[derive(Debug, Args)]
pub struct IndepArgs {
    #[command(flatten)]
    pub space: VecArgs,
    /// Comma-separated vectors such as `e1+e3`.
    #[arg(long = "a", alias = "A", allow_hyphen_values = true)]
    pub a: String,
    /// Generators of the base subspace; `0` for the zero subspace.
    #[arg(long = "m", alias = "M")]
    pub m: String,
    #[arg(long = "b", alias = "B")]
    pub b: String,
}

#[derive(Debug, Args)]
pub struct OplusArgs {
    #[command(flatten)]
    pub space: VecArgs,
    #[arg(long)]
    pub m0: String,
    #[arg(long)]
    pub m1: String,
    #[arg(long)]
    pub m2: String,
    /// Defaults to the whole space.
    #[arg(long)]
    pub n: Option<String>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub space: VecArgs,
    #[arg(long)]
    pub m0: String,
    #[arg(long)]
    pub m1: String,
    #[arg(long)]
    pub n: Option<String>,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    #[command(flatten)]
    pub space: VecArgs,
    #[arg(long, default_value = "0")]
    pub base: String,
    /// Piece generators, pieces separated by `;`; each piece is taken together with the base.
    #[arg(long)]
    pub pieces: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MuArgs {
    #[arg(long)]
    pub cert: PathBuf,
    #[arg(long)]
    pub element: String,
}

#[derive(Debug, Args)]
pub struct GtypeArgs {
    #[command(flatten)]
    pub space: VecArgs,
    #[arg(long)]
    pub base: String,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
}

#[derive(Debug, Args)]
pub struct BacksimArgs {
    /// `vec-gf2`, `vec-gf3` or `squarefree`.
    #[arg(long)]
    pub instance: String,
    /// Ambient dimension for vector instances.
    #[arg(long)]
    pub ambient: Option<usize>,
    /// Models: subspace generators, or comma-separated primes.
    #[arg(long)]
    pub top1: String,
    #[arg(long)]
    pub bottom1: String,
    #[arg(long)]
    pub top2: String,
    #[arg(long)]
    pub bottom2: String,
    #[arg(long, default_value_t = 1)]
    pub theta: usize,
}

#[derive(Debug, Args)]
pub struct DehnArgs {
    /// TOML with `relators = [...]` and optional `generators = [...]`.
    #[arg(long)]
    pub pres: PathBuf,
    #[arg(long)]
    pub word: String,
}

#[derive(Debug, Args)]
pub struct FoldArgs {
    /// Comma-separated subgroup generators.
    #[arg(long)]
    pub gens: String,
    #[arg(long)]
    pub word: String,
}

#[derive(Debug, Args)]
pub struct RecheckArgs {
    #[arg(long)]
    pub report: PathBuf,
}

/// Bad arguments (exit 2) versus an operation error (exit 1).
#[derive(Debug)]
pub enum EvalError {
    Usage(String),
    Op(Error),
}

impl From<Error> for EvalError {
    fn from(e: Error) -> Self {
        EvalError::Op(e)
    }
}

impl std::fmt::Display for EvalError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvalError::Usage(m) => write!(f, "usage: {m}"),
            EvalError::Op(e) => write!(f, "{e}"),
        }
    }
}

type EvalResult = Result<Value, EvalError>;

fn usage(msg: impl Into<String>) -> EvalError {
    EvalError::Usage(msg.into())
}

fn vec_space(name: &str) -> Result<VecSpace, EvalError> {
    match InstanceKind::parse(name) {
        Some(InstanceKind::VecGf2) => Ok(VecSpace::default()),
        Some(InstanceKind::VecGf3) => Ok(VecSpace::new(3)?),
        _ => Err(usage(format!("instance `{name}` is not a vector instance"))),
    }
}

/// `e1+2e3`, or `0`, as a vector of `GF(p)^n`; indices start at 1.
pub fn parse_vector(s: &str, p: u8, n: usize) -> Result<Vector, EvalError> {
    let mut v = vec![0u8; n];
    let s = s.trim();
    if s == "0" {
        return Ok(v);
    }
    for term in s.split('+') {
        let term = term.trim();
        let (coef, index) = term
            .split_once('e')
            .ok_or_else(|| usage(format!("bad vector term `{term}`")))?;
        let c: u32 = if coef.is_empty() {
            1
        } else {
            coef.parse()
                .map_err(|_| usage(format!("bad coefficient in `{term}`")))?
        };
        let i: usize = index
            .parse()
            .map_err(|_| usage(format!("bad index in `{term}`")))?;
        if i == 0 || i > n {
            return Err(usage(format!("e{i} outside GF({p})^{n}")));
        }
        v[i - 1] = ((v[i - 1] as u32 + c) % p as u32) as u8;
    }
    Ok(v)
}

pub fn parse_vectors(s: &str, p: u8, n: usize) -> Result<Vec<Vector>, EvalError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_vector(t, p, n))
        .collect()
}

fn subspace(v: &VecSpace, s: &str, n: usize) -> Result<Subspace, EvalError> {
    Ok(v.span(n, &parse_vectors(s, v.p, n)?))
}

fn show(x: &[u8]) -> String {
    let terms: Vec<String> = x
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| {
            if c == 1 {
                format!("e{}", i + 1)
            } else {
                format!("{c}e{}", i + 1)
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

fn parse_words(s: &str) -> Result<Vec<Word>, EvalError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<Word>().map_err(EvalError::Op))
        .collect()
}

fn primes(s: &str) -> Result<PrimeSet, EvalError> {
    let ps: Vec<u32> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| usage(format!("bad prime `{t}`")))
        })
        .collect::<Result<_, _>>()?;
    Ok(PrimeSet::of(&ps))
}

pub fn eval(q: &Query) -> EvalResult {
    match q {
        Query::Indep(a) => {
            let v = vec_space(&a.space.instance)?;
            let n = a.space.ambient;
            let query = IndepQuery {
                a: parse_vectors(&a.a, v.p, n)?,
                m: subspace(&v, &a.m, n)?,
                b: parse_vectors(&a.b, v.p, n)?,
                n: v.whole(n),
            };
            let w = nonforks(&v, &DirectSum, &query, true)?;
            Ok(
                json!({ "query": "indep", "independent": w.is_some(), "witness": w.map(|w| to_value(&w)) }),
            )
        }
        Query::Oplus(a) => {
            let v = vec_space(&a.space.instance)?;
            let n = a.space.ambient;
            let top =
                a.n.as_deref()
                    .map(|s| subspace(&v, s, n))
                    .transpose()?
                    .unwrap_or_else(|| v.whole(n));
            let out = oplus(
                &v,
                &DirectSum,
                &subspace(&v, &a.m1, n)?,
                &subspace(&v, &a.m2, n)?,
                &subspace(&v, &a.m0, n)?,
                &top,
            )?;
            Ok(
                json!({ "query": "oplus", "exists": out.is_some(), "oplus": out.map(|m| to_value(&m)) }),
            )
        }
        Query::Decompose(a) => {
            let v = vec_space(&a.space.instance)?;
            let n = a.space.ambient;
            let top =
                a.n.as_deref()
                    .map(|s| subspace(&v, s, n))
                    .transpose()?
                    .unwrap_or_else(|| v.whole(n));
            let m2 = decompose(
                &DirectSum,
                &v,
                &subspace(&v, &a.m0, n)?,
                &subspace(&v, &a.m1, n)?,
                &top,
            )?;
            Ok(
                json!({ "query": "decompose", "m2": to_value(&m2), "basis": m2.rows.iter().map(|r| show(r)).collect::<Vec<_>>() }),
            )
        }
        Query::Assemble(a) => {
            let v = vec_space(&a.space.instance)?;
            let n = a.space.ambient;
            let base_gens = parse_vectors(&a.base, v.p, n)?;
            let base = v.span(n, &base_gens);
            let pieces = a
                .pieces
                .split(';')
                .map(|p| {
                    Ok(v.span(
                        n,
                        &base_gens
                            .iter()
                            .cloned()
                            .chain(parse_vectors(p, v.p, n)?)
                            .collect::<Vec<_>>(),
                    ))
                })
                .collect::<Result<Vec<_>, EvalError>>()?;
            let cert = assemble_inside(&v, &DirectSum, &base, &pieces, &v.whole(n))?;
            let file = CertFile {
                instance: a.space.instance.clone(),
                digest: digest(&cert),
                certificate: to_value(&cert),
            };
            if let Some(path) = &a.out {
                let text = serde_json::to_string_pretty(&file).expect("serializable certificate");
                std::fs::write(path, text)
                    .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(
                json!({ "query": "assemble", "digest": file.digest, "total": to_value(&cert.total), "pieces": pieces.len() }),
            )
        }
        Query::Mu(a) => {
            let file = CertFile::load(&a.cert)?;
            let v = vec_space(&file.instance)?;
            let cert: Cert<VecSpace> = serde_json::from_value(file.certificate.clone())
                .map_err(|e| usage(format!("certificate: {e}")))?;
            if digest(&cert) != file.digest {
                return Err(usage("certificate digest does not match its payload"));
            }
            verify_certificate(&v, &DirectSum, &cert)?;
            let x = parse_vector(&a.element, v.p, cert.total.n)?;
            let w = mu_witness(&v, &DirectSum, &cert, &x)?;
            Ok(
                json!({ "query": "mu", "element": show(&x), "S": w.subsequence, "sub_amalgam": to_value(&w.sub_amalgam) }),
            )
        }
        Query::GtypeEq(a) => {
            let v = vec_space(&a.space.instance)?;
            let n = a.space.ambient;
            let base = subspace(&v, &a.base, n)?;
            let ty = |s: &str| -> Result<_, EvalError> {
                Ok(GaloisType {
                    tuple: vec![parse_vector(s, v.p, n)?],
                    base: base.clone(),
                    ambient: v.whole(n),
                })
            };
            let equal = v.gtype_equal(&ty(&a.x)?, &ty(&a.y)?)?;
            Ok(json!({ "query": "gtype-eq", "equal": equal }))
        }
        Query::Backsim(a) => match InstanceKind::parse(&a.instance) {
            Some(InstanceKind::Squarefree) => {
                let s = SquarefreeAbelian;
                let (t1, b1, t2, b2) = (
                    primes(&a.top1)?,
                    primes(&a.bottom1)?,
                    primes(&a.top2)?,
                    primes(&a.bottom2)?,
                );
                let w = backsim(&s, &PrimeUnion, (&t1, &b1), (&t2, &b2), a.theta)?;
                let verified = w.as_ref().map(|w| verify_backsim(&s, &PrimeUnion, w));
                Ok(
                    json!({ "query": "backsim", "similar": w.is_some(), "verified": verified, "theta": a.theta }),
                )
            }
            Some(InstanceKind::VecGf2 | InstanceKind::VecGf3) => {
                let v = vec_space(&a.instance)?;
                let n = a
                    .ambient
                    .ok_or_else(|| usage("--ambient is required for vector instances"))?;
                let (t1, b1, t2, b2) = (
                    subspace(&v, &a.top1, n)?,
                    subspace(&v, &a.bottom1, n)?,
                    subspace(&v, &a.top2, n)?,
                    subspace(&v, &a.bottom2, n)?,
                );
                let w = backsim(&v, &DirectSum, (&t1, &b1), (&t2, &b2), a.theta)?;
                let verified = w.as_ref().map(|w| verify_backsim(&v, &DirectSum, w));
                Ok(
                    json!({ "query": "backsim", "similar": w.is_some(), "verified": verified, "theta": a.theta }),
                )
            }
            _ => Err(usage(format!(
                "backsim is not offered for `{}`",
                a.instance
            ))),
        },
        Query::Dehn(a) => {
            let text = std::fs::read_to_string(&a.pres)
                .map_err(|e| usage(format!("cannot read {}: {e}", a.pres.display())))?;
            let pres = parse_presentation(&text)?;
            let word: Word = a.word.parse()?;
            Ok(
                json!({ "query": "dehn", "word": word.to_string(), "trivial": dehn_trivial(&word, &pres)? }),
            )
        }
        Query::Fold(a) => {
            let gens = parse_words(&a.gens)?;
            let word: Word = a.word.parse()?;
            let g = FoldedGraph::canonical(&gens);
            let coords = rewrite(&gens, &word);
            Ok(json!({
                "query": "fold",
                "member": g.contains(&word),
                "coordinates": coords.map(|c| c.to_string()),
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "rank": g.rank(),
            }))
        }
        Query::Recheck(a) => recheck(&a.report),
    }
}

#[derive(Debug, serde::Serialize, Deserialize)]
struct CertFile {
    instance: String,
    digest: String,
    certificate: Value,
}

impl CertFile {
    fn load(path: &Path) -> Result<Self, EvalError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("certificate file: {e}")))
    }
}

#[derive(Deserialize)]
struct PresentationFile {
    generators: Option<Vec<usize>>,
    relators: Vec<String>,
}

/// Letters default to those the relators use.
pub fn parse_presentation(text: &str) -> Result<SCPresentation, EvalError> {
    let file: PresentationFile =
        toml::from_str(text).map_err(|e| usage(format!("presentation: {}", e.message())))?;
    let relators = file
        .relators
        .iter()
        .map(|r| r.parse::<Word>())
        .collect::<Result<Vec<_>, _>>()?;
    let generators = file.generators.unwrap_or_else(|| {
        let mut g: Vec<usize> = relators.iter().flat_map(|r| r.support()).collect();
        g.sort_unstable();
        g.dedup();
        g
    });
    Ok(SCPresentation::new(generators, &relators))
}

// ---- recheck ----

/// Every failed check's counterexample, verified again from its serialized form.
pub fn recheck(path: &Path) -> EvalResult {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let mut config: Option<SuiteConfig> = None;
    let mut results = Vec::new();
    for (i, line) in text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
    {
        let value: Value =
            serde_json::from_str(line).map_err(|e| usage(format!("line {}: {e}", i + 1)))?;
        match value["record"].as_str() {
            Some("header") => {
                config = Some(
                    serde_json::from_value(value["config"].clone())
                        .map_err(|e| usage(format!("header config: {e}")))?,
                );
            }
            Some("check") if value["verdict"] == "fails" => {
                let cfg = config
                    .as_ref()
                    .ok_or_else(|| usage("check line before header"))?;
                let cx = &value["counterexample"];
                let (ok, detail) = match recheck_one(cfg, cx) {
                    Ok(r) => r,
                    Err(e) => (false, e.to_string()),
                };
                results.push(json!({
                    "suite": value["suite"],
                    "property": value["property"],
                    "kind": cx["kind"],
                    "reverified": ok,
                    "detail": detail,
                }));
            }
            _ => {}
        }
    }
    let reverified = results.iter().filter(|r| r["reverified"] == true).count();
    Ok(
        json!({ "query": "recheck", "failed": results.len(), "reverified": reverified, "results": results }),
    )
}

fn recheck_one(cfg: &SuiteConfig, cx: &Value) -> Result<(bool, String), EvalError> {
    let derived = cfg.notion == "derived";
    match (cx["kind"].as_str(), cfg.instance) {
        (Some("nonuniqueness"), InstanceKind::Smallcanc) => {
            let template: Word = cx["template"]
                .as_str()
                .unwrap_or(TEMPLATE_RELATOR)
                .parse()?;
            recheck_witness(
                &SmallCancellation,
                &TemplateQuotients { template },
                &cx["witness"],
            )
        }
        (Some("nonuniqueness"), InstanceKind::VecGf2 | InstanceKind::VecGf3) => {
            let v = vec_space(cfg.instance.name())?;
            if derived {
                recheck_witness(&v, &DerivedNotion::new(DirectSum), &cx["witness"])
            } else {
                recheck_witness(&v, &DirectSum, &cx["witness"])
            }
        }
        (Some("decomposition-obstruction"), InstanceKind::Squarefree) => {
            recheck_obstruction(&SquarefreeAbelian, &PrimeUnion, cx)
        }
        (Some("decomposition-obstruction"), InstanceKind::VecGf2 | InstanceKind::VecGf3) => {
            let v = vec_space(cfg.instance.name())?;
            if derived {
                recheck_obstruction(&v, &DerivedNotion::new(DirectSum), cx)
            } else {
                recheck_obstruction(&v, &DirectSum, cx)
            }
        }
        (Some("decomposition-obstruction"), InstanceKind::FreeFactor) => {
            let f = FreeFactors::default();
            if derived {
                recheck_obstruction(&f, &DerivedNotion::new(FreeAmalgam), cx)
            } else {
                recheck_obstruction(&f, &FreeAmalgam, cx)
            }
        }
        (Some("diagram-membership"), InstanceKind::VecGf2 | InstanceKind::VecGf3) => {
            let v = vec_space(cfg.instance.name())?;
            let d: Diagram<VecSpace> = serde_json::from_value(cx["diagram"].clone())
                .map_err(|e| usage(format!("diagram: {e}")))?;
            let (a, b) = (
                DerivedNotion::new(DirectSum).is_amalgam(&v, &d),
                is_direct_amalgam(&v, &d),
            );
            Ok((a != b, format!("derived {a}, direct {b}")))
        }
        (Some("error"), _) => Ok((
            false,
            format!(
                "suite error: {}",
                cx["message"].as_str().unwrap_or_default()
            ),
        )),
        (kind, inst) => Ok((
            false,
            format!(
                "no standalone verifier for {:?} counterexamples on {inst}",
                kind.unwrap_or("untagged")
            ),
        )),
    }
}

/// Both diagrams are amalgams of one span, no isomorphism over it exists, and
/// the recorded distinguisher is reproduced.
fn recheck_witness<I: Separation, N: Notion<I>>(
    inst: &I,
    notion: &N,
    payload: &Value,
) -> Result<(bool, String), EvalError> {
    let w: Witness<I> =
        serde_json::from_value(payload.clone()).map_err(|e| usage(format!("witness: {e}")))?;
    let amalgams = notion.is_amalgam(inst, &w.first) && notion.is_amalgam(inst, &w.second);
    let same_span = w.first.span == w.second.span;
    let iso = uniqueness_iso(inst, &w.first, &w.second)?;
    let no_iso = !matches!(iso, IsoVerdict::Found(_));
    let separated = match &iso {
        IsoVerdict::Absent { .. } => true,
        _ => inst.separate(&w.first, &w.second).is_some(),
    };
    let ok = amalgams && same_span && no_iso && separated;
    Ok((
        ok,
        format!(
            "amalgams={amalgams} same_span={same_span} iso_absent={no_iso} separated={separated}"
        ),
    ))
}

/// Re-runs the decomposition comparison and checks it reproduces the recorded obstruction.
fn recheck_obstruction<I: ClassInstance, N: Notion<I>>(
    inst: &I,
    notion: &N,
    cx: &Value,
) -> Result<(bool, String), EvalError> {
    let model = |key: &str| -> Result<I::Model, EvalError> {
        serde_json::from_value(cx[key].clone()).map_err(|e| usage(format!("{key}: {e}")))
    };
    let (m, n, base) = (model("left")?, model("right")?, model("base")?);
    let bound = cx["piece_bound"].as_u64().unwrap_or(1) as usize;
    let recorded: DecompositionIso<I::Element> = serde_json::from_value(cx["outcome"].clone())
        .map_err(|e| usage(format!("outcome: {e}")))?;
    let rerun = iso_via_decomposition(inst, notion, (&m, &base), (&n, &base), bound)?;
    let reproduced = rerun == recorded;
    let fails = rerun.images().is_none_or(|h| !inst.is_valid_map(&m, &n, h));
    let detail = match rerun.obstruction() {
        Some(o) => {
            let labels = |cs: &[amalgam_core::catlab::PieceClass]| {
                cs.iter()
                    .map(|c| c.label.clone())
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            format!(
                "left-only [{}] vs right-only [{}]",
                labels(&o.left_only),
                labels(&o.right_only)
            )
        }
        None => "isomorphism returned but invalid".into(),
    };
    Ok((reproduced && fails, detail))
}
