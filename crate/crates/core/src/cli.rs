//! Command-line surface: argument definitions, command execution and run
//! reports. The binary is a thin wrapper around [`execute`].

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::approx::{diagonalize, normalize, recheck, validate_table, hyperimmune_witness};
use crate::ccsolve::{brute_solution, solve, Solution};
use crate::error::{Error, Result};
use crate::gammaspace::{self, interpret, leq, one_step_variations, validate_path, Fragment, FinTree, LabelMode};
use crate::gen;
use crate::json;
use crate::words::{RightTuple, Word, LEFT_K, RIGHT_K};
use crate::CrossTree;

#[derive(Debug, Parser)]
#[command(name = "crosswork", version, about = "Finite-scale workbench for cross-trees and Gamma-space approximations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for any randomized step; recorded in the report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Also write the canonical result artifact to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cross-tree operations.
    Tree {
        #[command(subcommand)]
        op: TreeOp,
    },
    /// Run the combinatorial-core construction on a left-full tree.
    Solve(SolveArgs),
    /// Gamma-space and approximation operations.
    Gamma {
        #[command(subcommand)]
        op: GammaOp,
    },
}

#[derive(Debug, Args)]
pub struct InputArg {
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct StemArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Left stem as digits 0..2.
    #[arg(long, default_value = "")]
    pub rho: String,
    /// Right stem: comma-separated binary words, one per component. Empty
    /// means the empty tuple.
    #[arg(long, default_value = "")]
    pub sigma: String,
}

#[derive(Debug, Subcommand)]
pub enum TreeOp {
    Validate(InputArg),
    Prune(InputArg),
    Slice {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "")]
        rho: String,
    },
    Leftfull(StemArgs),
    Extend {
        #[command(flatten)]
        stem: StemArgs,
        /// Target left length.
        #[arg(long)]
        n: usize,
    },
    FromForbidden {
        #[arg(long)]
        forbidden: PathBuf,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        r: usize,
    },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, required_unless_present = "sweep", conflicts_with = "sweep")]
    pub input: Option<PathBuf>,
    /// Cross-check against the exhaustive reference solution.
    #[arg(long)]
    pub oracle: bool,
    /// Solve every left-full tree of height N and arity R.
    #[arg(long, num_args = 2, value_names = ["N", "R"])]
    pub sweep: Option<Vec<usize>>,
}

#[derive(Debug, Subcommand)]
pub enum GammaOp {
    Interpret(InputArg),
    ValidatePath(InputArg),
    Variations {
        /// A finite tree: array of nodes, each an array of child indices.
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "B")]
        bound: u32,
    },
    LongestChain {
        #[arg(long)]
        m: usize,
        /// Child indices stay below this bound.
        #[arg(long = "B")]
        bound: u32,
        /// Supports stay inside 0..=S.
        #[arg(long = "S")]
        support: u32,
        /// Fragment size cap.
        #[arg(long)]
        budget: Option<usize>,
    },
    Diagonalize {
        #[arg(long, num_args = 1.., required = true)]
        tables: Vec<PathBuf>,
    },
    Normalize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: usize,
    },
    Hyperimmune {
        #[arg(long)]
        input: PathBuf,
        /// Coloring prefix as digits 0..2.
        #[arg(long)]
        coloring: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Success,
    Negative,
    InputError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Negative => 1,
            Status::InputError => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub status: Status,
    pub exit_code: i32,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    /// SHA-256 over the input files in the order they were read.
    pub inputs_digest: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    pub wall_time_ms: f64,
    pub seed: u64,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json::to_canonical(self),
            Format::Text => {
                let mut s = format!("command: {}\n", self.command.join(" "));
                s += &format!("status: {:?} (exit {})\n", self.outcome.status, self.outcome.exit_code);
                if let Some(e) = &self.outcome.error {
                    s += &format!("error: {e}\n");
                }
                s += &format!("inputs: {}\nseed: {}\nwall time: {:.3} ms\n", self.inputs_digest, self.seed, self.wall_time_ms);
                s += &format!("result:\n{}\n", serde_json::to_string_pretty(&self.outcome.result).expect("values print"));
                if let Some(c) = &self.certificate {
                    s += &format!("certificate:\n{}\n", serde_json::to_string_pretty(c).expect("values print"));
                }
                s
            }
        }
    }
}

/// What a command produced before it is wrapped into a report.
struct Done {
    status: Status,
    result: Value,
    certificate: Option<Value>,
}

impl Done {
    fn ok(result: Value) -> Self {
        Done { status: Status::Success, result, certificate: None }
    }

    fn verdict(yes: bool, result: Value) -> Self {
        Done { status: if yes { Status::Success } else { Status::Negative }, result, certificate: None }
    }

    fn certified(mut self, cert: Value) -> Self {
        if cert.get("verified") == Some(&Value::Bool(false)) {
            self.status = Status::Negative;
        }
        self.certificate = Some(cert);
        self
    }
}

/// Reads input files and folds them into the digest.
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        String::from_utf8(bytes).map_err(|_| Error::Parse { location: path.display().to_string(), message: "not UTF-8".into() })
    }
}

/// Runs a parsed command line. `argv` is recorded verbatim in the report.
pub fn execute(cli: &Cli, argv: Vec<String>) -> RunReport {
    let start = Instant::now();
    let mut inputs = Inputs { hasher: Sha256::new() };
    let done = dispatch(&cli.command, &mut inputs);
    let done = match (done, &cli.out) {
        (Ok(d), Some(path)) if d.status != Status::InputError => write_atomic(path, &json::to_canonical(&d.result)).map(|_| d),
        (d, _) => d,
    };
    let (outcome, certificate) = match done {
        Ok(d) => (Outcome { status: d.status, exit_code: d.status.exit_code(), result: d.result, error: None }, d.certificate),
        Err(e) => {
            let status = match e {
                Error::Internal(_) => Status::Negative,
                _ => Status::InputError,
            };
            (Outcome { status, exit_code: status.exit_code(), result: Value::Null, error: Some(e.to_string()) }, None)
        }
    };
    RunReport {
        command: argv,
        inputs_digest: hex::encode(inputs.hasher.finalize()),
        outcome,
        certificate,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        seed: cli.seed,
    }
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, text)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

fn dispatch(cmd: &Command, io: &mut Inputs) -> Result<Done> {
    match cmd {
        Command::Tree { op } => tree_cmd(op, io),
        Command::Solve(args) => solve_cmd(args, io),
        Command::Gamma { op } => gamma_cmd(op, io),
    }
}

// ---------------------------------------------------------------- tree

/// Parses a left stem given as digits.
pub fn parse_rho(s: &str) -> Result<Word> {
    Word::parse(s, LEFT_K).map_err(|e| Error::Parse { location: "--rho".into(), message: e.to_string() })
}

/// Parses a right stem given as comma-separated binary words; empty is the
/// empty tuple of arity `r`.
pub fn parse_sigma(s: &str, r: usize) -> Result<RightTuple> {
    let bad = |message: String| Error::Parse { location: "--sigma".into(), message };
    if s.is_empty() {
        return Ok(RightTuple::empty(r, RIGHT_K));
    }
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != r {
        return Err(bad(format!("{} components given, tree has r = {r}", parts.len())));
    }
    RightTuple::parse(&parts, RIGHT_K).map_err(|e| bad(e.to_string()))
}

fn tuple_value(t: &RightTuple) -> Value {
    json!(t.words().iter().map(Word::to_string).collect::<Vec<_>>())
}

fn load_tree(path: &Path, io: &mut Inputs) -> Result<CrossTree> {
    json::tree_from_json(&io.read(path)?)
}

fn load_valid_tree(path: &Path, io: &mut Inputs) -> Result<CrossTree> {
    let t = load_tree(path, io)?;
    let v = t.validate();
    if !v.is_empty() {
        let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
        return Err(Error::Input(format!("invalid tree: {}", msgs.join("; "))));
    }
    Ok(t)
}

fn tree_value(t: &CrossTree) -> Value {
    serde_json::to_value(json::tree_to_doc(t)).expect("trees serialize")
}

fn tree_cmd(op: &TreeOp, io: &mut Inputs) -> Result<Done> {
    match op {
        TreeOp::Validate(a) => {
            let t = load_tree(&a.input, io)?;
            let v: Vec<String> = t.validate().iter().map(ToString::to_string).collect();
            Ok(Done::verdict(v.is_empty(), json!({ "valid": v.is_empty(), "violations": v })))
        }
        TreeOp::Prune(a) => Ok(Done::ok(tree_value(&load_valid_tree(&a.input, io)?.right_prune()))),
        TreeOp::Slice { input, rho } => {
            let t = load_valid_tree(input, io)?;
            let rho = parse_rho(rho)?;
            Ok(Done::ok(json!(t.slice(&rho).iter().map(tuple_value).collect::<Vec<_>>())))
        }
        TreeOp::Leftfull(s) => {
            let t = load_valid_tree(&s.input, io)?;
            let (rho, sigma) = (parse_rho(&s.rho)?, parse_sigma(&s.sigma, t.r())?);
            let yes = t.leftfull(&rho, &sigma)?;
            Ok(Done::verdict(yes, json!({ "leftfull": yes })))
        }
        TreeOp::Extend { stem, n } => {
            let t = load_valid_tree(&stem.input, io)?;
            let (rho, sigma) = (parse_rho(&stem.rho)?, parse_sigma(&stem.sigma, t.r())?);
            let (rho2, sigma2) = t.leftfull_extend(&rho, &sigma, *n)?;
            let holds = t.leftfull(&rho2, &sigma2)?;
            Ok(Done::ok(json!({ "rho": rho2.to_string(), "sigma": tuple_value(&sigma2) }))
                .certified(json!({ "verified": holds, "check": "leftfull holds at the returned pair" })))
        }
        TreeOp::FromForbidden { forbidden, height, r } => {
            let w = json::forbidden_from_json(&io.read(forbidden)?)?;
            Ok(Done::ok(tree_value(&CrossTree::from_forbidden(&w, *height, *r)?)))
        }
    }
}

// ---------------------------------------------------------------- solve

/// Discrepancies between a solution and the exhaustive reference.
fn oracle_discrepancies(t: &CrossTree, sol: &Solution) -> Vec<String> {
    let mut out = sol.violations(t);
    match brute_solution(t) {
        None => out.push("reference finds no completely incompatible full-height pair".into()),
        Some(b) => {
            let best = b.agreement.iter().filter(|a| !a.is_empty()).count();
            let served = t.r() - sol.excluded.len();
            if best < served {
                out.push(format!("solution serves {served} components, reference at most {best}"));
            }
        }
    }
    out
}

fn solution_summary(sol: &Solution) -> Value {
    json!({ "excluded": sol.excluded.len(), "restarts": sol.restarts.len(), "exhausted": sol.exhausted.len() })
}

fn solve_cmd(args: &SolveArgs, io: &mut Inputs) -> Result<Done> {
    if let Some(b) = &args.sweep {
        return sweep(b[0], b[1], args.oracle);
    }
    let path = args.input.as_ref().expect("clap requires --input without --sweep");
    let t = load_valid_tree(path, io)?;
    let sol = solve(&t)?;
    let mut done = Done::ok(json::solution_to_value(&sol));
    if args.oracle {
        let problems = oracle_discrepancies(&t, &sol);
        done = done.certified(json!({ "verified": problems.is_empty(), "consistent": problems.is_empty(), "discrepancies": problems }));
    }
    Ok(done)
}

/// Exhaustive sweeps stay within the bounds the enumeration can list.
const SWEEP_BOUNDS: [(usize, usize); 2] = [(1, 1), (1, 2)];

fn sweep(n: usize, r: usize, oracle: bool) -> Result<Done> {
    if !SWEEP_BOUNDS.contains(&(n, r)) {
        return Err(Error::Input(format!("sweep bounds N = {n}, r = {r} are outside {SWEEP_BOUNDS:?}")));
    }
    let mut trees = 0usize;
    let mut with_exclusions = 0usize;
    let mut restarts = 0usize;
    let mut failures = Vec::new();
    for (k, t) in gen::all_right_pruned(n, r).iter().enumerate() {
        if !t.leftfull(&t.root().left, &t.root().right)? {
            continue;
        }
        trees += 1;
        let sol = solve(t)?;
        if !sol.excluded.is_empty() {
            with_exclusions += 1;
        }
        restarts += sol.restarts.len();
        let problems = if oracle { oracle_discrepancies(t, &sol) } else { sol.violations(t) };
        if !problems.is_empty() {
            failures.push(json!({ "tree": k, "problems": problems, "solution": solution_summary(&sol) }));
        }
    }
    let summary = if with_exclusions == 0 {
        format!("no exclusions at N={n}, r={r}")
    } else {
        format!("exclusions on {with_exclusions} of {trees} trees at N={n}, r={r}")
    };
    let result = json!({
        "summary": summary, "trees": trees, "with_exclusions": with_exclusions,
        "restarts": restarts, "failures": failures,
    });
    Ok(Done::verdict(failures.is_empty(), result))
}

// ---------------------------------------------------------------- gamma

fn load_gamma(path: &Path, io: &mut Inputs) -> Result<gammaspace::GammaElem> {
    json::gamma_from_json(&io.read(path)?)
}

fn chain_certificate(witness: &[gammaspace::GammaElem]) -> Value {
    let mut problems = Vec::new();
    for (i, g) in witness.iter().enumerate() {
        for p in validate_path(g) {
            problems.push(format!("element {i}: {p}"));
        }
    }
    for (i, w) in witness.windows(2).enumerate() {
        let up = leq(&w[0], &w[1]).unwrap_or(false) && w[0] != w[1];
        if !up {
            problems.push(format!("elements {i} and {} are not strictly increasing", i + 1));
        }
    }
    json!({ "verified": problems.is_empty(), "problems": problems })
}

fn gamma_cmd(op: &GammaOp, io: &mut Inputs) -> Result<Done> {
    match op {
        GammaOp::Interpret(a) => {
            let g = load_gamma(&a.input, io)?;
            let problems = validate_path(&g);
            if !problems.is_empty() {
                return Err(Error::Input(format!("not an element: {}", problems.join("; "))));
            }
            Ok(Done::ok(json::gamma0_set_to_value(&interpret(&g))))
        }
        GammaOp::ValidatePath(a) => {
            let problems = validate_path(&load_gamma(&a.input, io)?);
            Ok(Done::verdict(problems.is_empty(), json!({ "valid": problems.is_empty(), "problems": problems })))
        }
        GammaOp::Variations { input, bound } => {
            let nodes: Vec<Vec<u32>> = serde_json::from_str(&io.read(input)?)
                .map_err(|e| Error::Parse { location: format!("{}:{}", e.line(), e.column()), message: e.to_string() })?;
            let t = FinTree::new(nodes).map_err(|e| Error::Parse { location: "$".into(), message: e.to_string() })?;
            let out: Vec<Vec<Vec<u32>>> = one_step_variations(&t, *bound).iter().map(|v| v.nodes().iter().cloned().collect()).collect();
            Ok(Done::ok(json!(out)))
        }
        GammaOp::LongestChain { m, bound, support, budget } => {
            let cap = budget.unwrap_or(gammaspace::DEFAULT_FRAGMENT_CAP);
            let chain = Fragment::new(*bound, *support, cap, LabelMode::Quotient).longest_chain(*m)?;
            let witness: Vec<Value> = chain.witness.iter().map(json::gamma_to_value).collect();
            Ok(Done::ok(json!({ "length": chain.length, "witness": witness })).certified(chain_certificate(&chain.witness)))
        }
        GammaOp::Diagonalize { tables } => {
            let ts = tables.iter().map(|p| json::table_from_json(&io.read(p)?)).collect::<Result<Vec<_>>>()?;
            let (prefix, cert) = diagonalize(&ts)?;
            let verified = recheck(&ts, &prefix, &cert).is_ok();
            let mut c = json::certificate_to_value(&prefix, &cert);
            c["verified"] = json!(verified);
            Ok(Done::ok(json!({ "prefix": prefix.to_string() })).certified(c))
        }
        GammaOp::Normalize { input, m } => {
            let stream = json::stream_from_json(&io.read(input)?)?;
            let table = normalize(&stream, *m);
            let problems = validate_table(&table);
            let value: Value = serde_json::from_str(&json::table_to_json(&table)).expect("tables print");
            Ok(Done::ok(value).certified(json!({ "verified": problems.is_empty(), "problems": problems })))
        }
        GammaOp::Hyperimmune { input, coloring } => {
            let arr = json::array_from_json(&io.read(input)?)?;
            let f = Word::parse(coloring, LEFT_K).map_err(|e| Error::Parse { location: "--coloring".into(), message: e.to_string() })?;
            let row = hyperimmune_witness(&f, &arr);
            Ok(Done::verdict(row.is_some(), json!({ "row": row })))
        }
    }
}
