//! Command-line front end. Every artifact is a JSON object carrying its payload fields
//! and a `manifest` describing the run that produced it.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::absorbers::{brute_force_omni_absorber, AbsorberBudget};
use crate::boosters::{build_rooted_booster, Booster, DEFAULT_ATTEMPTS};
use crate::concentration::{kimvu_check, montecarlo_edge_count};
use crate::config_hypergraphs::{build_treasury, regularity_audit};
use crate::configurations::{cogirth, girth, rooted_booster_girth};
use crate::error::{Error, Result};
use crate::generator::{
    generate_pair_cogirth, pipeline_generate, reserve_select, stage_rng, GenConfig,
};
use crate::hypergraph::{binom, complete_host, Edge, Hypergraph, Packing, VertexSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "girthforge",
    version,
    about = "Build and verify high-girth designs, boosters and absorbers"
)]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a high-girth packing, or a full decomposition with --complete.
    Gen(GenArgs),
    /// Re-verify a packing artifact and print its girth.
    Verify(VerifyArgs),
    /// Girth of a packing.
    Girth(GirthArgs),
    /// Cogirth of two packings.
    Cogirth(CogirthArgs),
    /// Build a rooted booster.
    Booster(BoosterArgs),
    /// Regularity audit of a treasury built from K_n.
    Audit(AuditArgs),
    /// Exhaustive omni-absorber search.
    Absorb(AbsorbArgs),
    /// Generate two packings with high girth and high cogirth.
    Pair(PairArgs),
    /// Tail-bound conditions and Monte Carlo edge counts under vertex sparsification.
    Concentration(ConcentrationArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
struct Output {
    /// Artifact destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run report destination.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    q: usize,
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Largest forbidden configuration size.
    #[arg(long, default_value_t = 5)]
    g: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.2)]
    p_reserve: f64,
    #[arg(long, default_value_t = 8)]
    attempts: usize,
    #[arg(long, default_value_t = 300_000)]
    budget_ms: u64,
    /// Demand a full decomposition (needs an admissible n).
    #[arg(long)]
    complete: bool,
    /// Emit a cogirth pair instead of a single packing.
    #[arg(long)]
    pair: bool,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long, default_value_t = 6)]
    gmax: usize,
    /// Fail unless no configuration of size <= g exists.
    #[arg(long)]
    g: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GirthArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long, default_value_t = 6)]
    gmax: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
struct CogirthArgs {
    /// A pair artifact, or the first packing when --other is given.
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    other: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    gmax: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
struct BoosterArgs {
    #[arg(long, default_value_t = 3)]
    q: usize,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 4)]
    g: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Base booster JSON, required when r >= 3.
    #[arg(long)]
    base: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ATTEMPTS)]
    attempts: usize,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

/// The host: K_n^r from `--n`, or a hypergraph JSON file from `--host`.
#[derive(Args, Debug, Clone, Serialize)]
struct HostArgs {
    #[arg(long, conflicts_with = "host", required_unless_present = "host")]
    n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long)]
    host: Option<PathBuf>,
}

impl HostArgs {
    fn load(&self) -> Result<Hypergraph> {
        match (&self.host, self.n) {
            (Some(path), _) => Ok(read_artifact::<Hypergraph>(&read_file(path)?)?.0),
            (None, Some(n)) => complete_host(n, self.r),
            (None, None) => Err(Error::InvalidInput(
                "either --n or --host is required".into(),
            )),
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
struct AuditArgs {
    #[command(flatten)]
    host: HostArgs,
    #[arg(long, default_value_t = 3)]
    q: usize,
    #[arg(long, default_value_t = 3)]
    g: usize,
    /// Reserve edges as "a,b;c,d" or a JSON file; sampled with --p-reserve when absent.
    #[arg(long)]
    x: Option<String>,
    #[arg(long, default_value_t = 0.2)]
    p_reserve: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Degree scale, or `auto` for binom(n, q - r).
    #[arg(long = "D", default_value = "auto")]
    d: String,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
struct AbsorbArgs {
    #[command(flatten)]
    host: HostArgs,
    #[arg(long, default_value_t = 3)]
    q: usize,
    /// Edges to absorb as "a,b;c,d" or a JSON file.
    #[arg(long)]
    x: String,
    #[arg(long, default_value_t = 24)]
    max_edges: usize,
    #[arg(long, default_value_t = 120_000)]
    budget_ms: u64,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
struct PairArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    q: usize,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 5)]
    g: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 300_000)]
    budget_ms: u64,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

#[derive(Args, Debug, Clone, Serialize)]
struct ConcentrationArgs {
    #[arg(long)]
    hypergraph: PathBuf,
    #[arg(long)]
    p: f64,
    #[arg(long = "K")]
    k: f64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    output: Output,
}

/// Provenance embedded in every artifact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seed: u64,
    pub tool_version: String,
    pub wall_time_ms: u64,
    /// SHA-256 of the canonical JSON of the re-verification result.
    pub verification_digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Re-verification summary of a packing whose digest goes into its manifest.
pub fn packing_verification(p: &Packing, g: usize) -> Result<Value> {
    Ok(json!({
        "girth": girth(p, g)?,
        "decomposition": p.is_decomposition(),
        "blocks": p.len(),
    }))
}

fn digest_of(v: &Value) -> String {
    sha256_hex(v.to_string().as_bytes())
}

/// Payload fields plus `manifest`.
pub fn artifact<T: Serialize>(payload: &T, manifest: &RunManifest) -> Result<Value> {
    let mut v = serde_json::to_value(payload)?;
    match v.as_object_mut() {
        Some(obj) => {
            obj.insert("manifest".into(), serde_json::to_value(manifest)?);
            Ok(v)
        }
        None => Ok(json!({ "value": v, "manifest": manifest })),
    }
}

/// Splits an artifact into its payload and manifest; bare payloads have no manifest.
pub fn read_artifact<T: for<'de> Deserialize<'de>>(text: &str) -> Result<(T, Option<RunManifest>)> {
    let mut v: Value = serde_json::from_str(text)?;
    let manifest = match v.as_object_mut().and_then(|o| o.remove("manifest")) {
        Some(m) => Some(serde_json::from_value(m)?),
        None => None,
    };
    Ok((serde_json::from_value(v)?, manifest))
}

fn read_file(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

/// Edges from a JSON file (an edge list or a hypergraph) or inline "a,b;c,d" text.
fn load_edges(text: &str) -> Result<Vec<Edge>> {
    let path = Path::new(text);
    if !path.is_file() {
        return parse_edges(text);
    }
    let v: Value = serde_json::from_str(&read_file(path)?)?;
    let list = match v.get("edges") {
        Some(edges) => edges.clone(),
        None => v,
    };
    Ok(serde_json::from_value(list)?)
}

fn parse_edges(text: &str) -> Result<Vec<Edge>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let v: Vec<u32> = s
                .split(',')
                .map(|t| t.trim().parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidInput(format!("bad edge {s:?}: {e}")))?;
            VertexSet::new(v)
        })
        .collect()
}

struct Emitted {
    code: i32,
    summary: String,
}

struct Run {
    command: &'static str,
    start: Instant,
}

impl Run {
    fn manifest<P: Serialize>(
        &self,
        params: &P,
        seed: u64,
        verification: &Value,
    ) -> Result<RunManifest> {
        Ok(RunManifest {
            command: self.command.into(),
            parameters: serde_json::to_value(params)?,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            wall_time_ms: self.start.elapsed().as_millis() as u64,
            verification_digest: digest_of(verification),
        })
    }
}

fn write_json(path: Option<&Path>, v: &Value) -> Result<()> {
    let text = serde_json::to_string(v)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn emit<R: Serialize>(output: &Output, artifact: &Value, report: Option<&R>) -> Result<()> {
    write_json(output.out.as_deref(), artifact)?;
    if let (Some(path), Some(r)) = (&output.report, report) {
        write_json(Some(path), &serde_json::to_value(r)?)?;
    }
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Verification(_) | Error::NotAMatching(_) => EXIT_VERIFY,
        Error::BudgetExhausted(_) | Error::RetryExhausted(_) => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first) and runs the command; returns the process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(t) = cli.threads {
        // Fails only when a pool already exists, as in repeated in-process calls.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    match run(cli.command) {
        Ok(done) => {
            eprintln!("{}", done.summary);
            done.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn run(command: Command) -> Result<Emitted> {
    match command {
        Command::Gen(a) if a.pair => pair(PairArgs {
            n: a.n,
            q: a.q,
            r: a.r,
            g: a.g,
            seed: a.seed,
            budget_ms: a.budget_ms,
            output: a.output,
        }),
        Command::Gen(a) => gen(a),
        Command::Verify(a) => verify(a),
        Command::Girth(a) => girth_cmd(a),
        Command::Cogirth(a) => cogirth_cmd(a),
        Command::Booster(a) => booster(a),
        Command::Audit(a) => audit(a),
        Command::Absorb(a) => absorb(a),
        Command::Pair(a) => pair(a),
        Command::Concentration(a) => concentration(a),
    }
}

fn gen(a: GenArgs) -> Result<Emitted> {
    let run = Run {
        command: "gen",
        start: Instant::now(),
    };
    let cfg = GenConfig {
        seed: a.seed,
        p_reserve: a.p_reserve,
        g: a.g,
        attempts: a.attempts,
        budget_ms: a.budget_ms,
        ..GenConfig::default()
    };
    let (packing, report) = pipeline_generate(a.n, a.q, a.r, a.g, a.complete, &cfg)?;
    let verification = packing_verification(&packing, a.g)?;
    let manifest = run.manifest(&a, a.seed, &verification)?;
    emit(&a.output, &artifact(&packing, &manifest)?, Some(&report))?;
    let downgraded = a.complete && !report.complete;
    Ok(Emitted {
        code: if downgraded { EXIT_BUDGET } else { EXIT_OK },
        summary: format!(
            "{} blocks, covered fraction {:.4}, girth {}{}",
            packing.len(),
            report.generator.covered_fraction,
            report.girth_verified.value,
            if downgraded {
                ", complete decomposition not reached"
            } else {
                ""
            }
        ),
    })
}

fn verify(a: VerifyArgs) -> Result<Emitted> {
    let text = read_file(&a.system)?;
    let (packing, manifest): (Packing, Option<RunManifest>) = match read_artifact(&text) {
        Ok(v) => v,
        Err(Error::Io(e)) => return Err(Error::Io(e)),
        Err(e) => return Err(Error::Verification(format!("not a valid packing: {e}"))),
    };
    let report = girth(&packing, a.gmax)?;
    let mut problems = Vec::new();
    if let Some(m) = &manifest {
        let g = m
            .parameters
            .get("g")
            .and_then(Value::as_u64)
            .unwrap_or(a.gmax as u64) as usize;
        if digest_of(&packing_verification(&packing, g)?) != m.verification_digest {
            problems.push("verification digest does not match the manifest".to_string());
        }
    }
    if let Some(g) = a.g {
        if !report.value.exceeds(g) && g <= a.gmax {
            problems.push(format!("girth {} does not exceed {g}", report.value));
        }
    }
    let mut out = serde_json::to_value(&report)?;
    if let Some(obj) = out.as_object_mut() {
        obj.insert("decomposition".into(), json!(packing.is_decomposition()));
        obj.insert("blocks".into(), json!(packing.len()));
        obj.insert("problems".into(), json!(problems));
    }
    write_json(None, &out)?;
    Ok(Emitted {
        code: if problems.is_empty() {
            EXIT_OK
        } else {
            EXIT_VERIFY
        },
        summary: format!("girth {}", report.value),
    })
}

fn girth_cmd(a: GirthArgs) -> Result<Emitted> {
    let (packing, _): (Packing, _) = read_artifact(&read_file(&a.system)?)?;
    let report = girth(&packing, a.gmax)?;
    write_json(None, &serde_json::to_value(&report)?)?;
    Ok(Emitted {
        code: EXIT_OK,
        summary: format!("girth {}", report.value),
    })
}

#[derive(Serialize, Deserialize)]
struct PairPayload {
    first: Packing,
    second: Packing,
}

fn cogirth_cmd(a: CogirthArgs) -> Result<Emitted> {
    let (first, second) = match &a.other {
        Some(other) => {
            let (p1, _): (Packing, _) = read_artifact(&read_file(&a.system)?)?;
            let (p2, _): (Packing, _) = read_artifact(&read_file(other)?)?;
            (p1, p2)
        }
        None => {
            let (pair, _): (PairPayload, _) = read_artifact(&read_file(&a.system)?)?;
            (pair.first, pair.second)
        }
    };
    let report = cogirth(&first, &second, a.gmax)?;
    write_json(None, &serde_json::to_value(&report)?)?;
    Ok(Emitted {
        code: EXIT_OK,
        summary: format!("cogirth {}", report.value),
    })
}

fn booster(a: BoosterArgs) -> Result<Emitted> {
    let run = Run {
        command: "booster",
        start: Instant::now(),
    };
    let base: Option<Booster> = match &a.base {
        Some(p) => Some(read_artifact(&read_file(p)?)?.0),
        None => None,
    };
    let mut rng = stage_rng(a.seed, 0);
    let rb = build_rooted_booster(a.q, a.r, a.g, base.as_ref(), a.attempts, &mut rng)?;
    let report = rooted_booster_girth(&rb, a.g)?;
    let manifest = run.manifest(&a, a.seed, &serde_json::to_value(&report)?)?;
    emit(&a.output, &artifact(&rb, &manifest)?, Some(&report))?;
    let ok = report.value.exceeds(a.g);
    Ok(Emitted {
        code: if ok { EXIT_OK } else { EXIT_VERIFY },
        summary: format!(
            "rooted booster with {} edges, rooted girth {}",
            rb.edges().len(),
            report.value
        ),
    })
}

fn audit(a: AuditArgs) -> Result<Emitted> {
    let run = Run {
        command: "audit",
        start: Instant::now(),
    };
    let host = a.host.load()?;
    let x: BTreeSet<Edge> = match &a.x {
        Some(text) => load_edges(text)?.into_iter().collect(),
        None => reserve_select(&host, a.q, a.p_reserve, &mut stage_rng(a.seed, 1), 8)?.0,
    };
    let d = match a.d.as_str() {
        "auto" => binom(host.n(), a.q.saturating_sub(host.r())) as f64,
        text => text
            .parse()
            .map_err(|e| Error::InvalidInput(format!("bad --D {text:?}: {e}")))?,
    };
    let t = build_treasury(&host, &host.edge_set(), &x, a.q, a.g)?;
    let report = regularity_audit(&t, d, a.sigma, a.beta, a.alpha)?;
    let value = serde_json::to_value(&report)?;
    let manifest = run.manifest(&a, a.seed, &value)?;
    emit(&a.output, &artifact(&report, &manifest)?, None::<&()>)?;
    let failing = report.failing();
    Ok(Emitted {
        code: if failing.is_empty() {
            EXIT_OK
        } else {
            EXIT_VERIFY
        },
        summary: if failing.is_empty() {
            "all regularity clauses hold".into()
        } else {
            format!("failing clauses: {}", failing.join(", "))
        },
    })
}

fn absorb(a: AbsorbArgs) -> Result<Emitted> {
    let run = Run {
        command: "absorb",
        start: Instant::now(),
    };
    let host = a.host.load()?;
    let x = load_edges(&a.x)?;
    let budget = AbsorberBudget {
        max_edges: a.max_edges,
        time_ms: a.budget_ms,
    };
    let ab = brute_force_omni_absorber(&host, &x, a.q, budget)?;
    ab.validate()?;
    let verification = json!({ "table": ab.table(), "a": ab.a() });
    let manifest = run.manifest(&a, 0, &verification)?;
    let degree = |edges: &[Edge]| -> Result<usize> {
        Ok(Hypergraph::new(host.n(), host.r(), edges.to_vec())?.max_codegree(1))
    };
    let (max_degree_x, max_degree_a) = (degree(ab.x())?, degree(ab.a())?);
    let n = host.n() as f64;
    let floor = n.powf(1.0 - 1.0 / host.r() as f64) * n.ln();
    let degrees = json!({
        "max_degree_x": max_degree_x,
        "max_degree_a": max_degree_a,
        "delta": (max_degree_x as f64).max(floor),
        "refinement": ab.refinement(),
    });
    emit(&a.output, &artifact(&ab, &manifest)?, Some(&degrees))?;
    Ok(Emitted {
        code: EXIT_OK,
        summary: format!(
            "absorber with {} edges, {} table entries, max degree {max_degree_a}",
            ab.a().len(),
            ab.table().len()
        ),
    })
}

fn pair(a: PairArgs) -> Result<Emitted> {
    let run = Run {
        command: "pair",
        start: Instant::now(),
    };
    let host = complete_host(a.n, a.r)?;
    let cfg = GenConfig {
        seed: a.seed,
        g: a.g,
        budget_ms: a.budget_ms,
        ..GenConfig::default()
    };
    let (first, second, report) = generate_pair_cogirth(&host, a.q, a.g, &cfg)?;
    let verification = json!({
        "girth": [girth(&first, a.g)?, girth(&second, a.g)?],
        "cogirth": cogirth(&first, &second, a.g)?,
    });
    let manifest = run.manifest(&a, a.seed, &verification)?;
    let payload = PairPayload { first, second };
    emit(&a.output, &artifact(&payload, &manifest)?, Some(&report))?;
    Ok(Emitted {
        code: EXIT_OK,
        summary: format!(
            "covered fractions {:.4} / {:.4}, cogirth {}",
            report.covered_fraction[0], report.covered_fraction[1], report.cogirth.value
        ),
    })
}

fn concentration(a: ConcentrationArgs) -> Result<Emitted> {
    let run = Run {
        command: "concentration",
        start: Instant::now(),
    };
    let (h, _): (Hypergraph, _) = read_artifact(&read_file(&a.hypergraph)?)?;
    let conditions = kimvu_check(&h, a.p, a.k)?;
    let record = montecarlo_edge_count(&h, a.p, Some(a.k), a.trials, &mut stage_rng(a.seed, 0))?;
    let payload = json!({ "conditions": conditions, "record": record });
    let manifest = run.manifest(&a, a.seed, &payload)?;
    emit(&a.output, &artifact(&payload, &manifest)?, None::<&()>)?;
    Ok(Emitted {
        code: EXIT_OK,
        summary: format!(
            "conditions {}, mean {:.3} (expected {:.3}), exceed fraction {}",
            if conditions.passes() { "hold" } else { "fail" },
            record.mean,
            record.expected_mean,
            record.exceed_fraction.unwrap_or(0.0)
        ),
    })
}
