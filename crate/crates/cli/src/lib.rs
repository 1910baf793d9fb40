//! Command-line front end for `matroid-kappa`.
//!
//! [`run`] parses arguments, dispatches one verb and writes the report; the
//! binary is a thin wrapper around it. Exit codes: 0 success, 1 usage,
//! domain, precondition or parse errors, 2 budget exceeded, 3 internal
//! invariant violated.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use thiserror::Error;

use matroid_kappa::axioms::check_axioms;
use matroid_kappa::connectivity::{find_separation, is_k_connected, kappa, kappa_between};
use matroid_kappa::constructions::{components, direct_sum, dual, take_minor};
use matroid_kappa::format::{write_description, Description};
use matroid_kappa::linking::{constructive_linking, linking_partition};
use matroid_kappa::matroid::enumerate_circuits;
use matroid_kappa::windows::{
    certified_separation, rung_partition_check, stabilized_kappa_between, windowed_linking,
    StabilizationPolicy,
};
use matroid_kappa::{
    Budget, ElementSet, InfiniteFamily, LinkingResult, Matroid, MatroidError, MinorSpec,
};

pub const SCHEMA: &str = "matroid-kappa/1";
pub const BUDGET_ENV: &str = "MATROID_KAPPA_BUDGET";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Matroid(MatroidError::Capacity { .. }) => 2,
            Self::Matroid(MatroidError::Invariant(_)) => 3,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "matroid-kappa",
    version,
    about = "Matroid connectivity and Tutte linking"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    output: OutputFormat,
    /// Size limit for exhaustive searches (overrides MATROID_KAPPA_BUDGET).
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Args)]
struct Input {
    /// Matroid description file.
    file: PathBuf,
}

#[derive(Debug, Args)]
struct Pair {
    /// One side: comma-separated labels, or @file with one label per line.
    #[arg(long)]
    x: String,
    /// The other side.
    #[arg(long)]
    y: String,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Check the independence and circuit axioms.
    CheckAxioms(Input),
    /// List all circuits.
    Circuits(Input),
    /// Rank of a set (default: the whole ground set).
    Rank {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        set: Option<String>,
    },
    /// Print the dual.
    Dual(Input),
    /// Print the minor M/C − D.
    Minor {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "")]
        contract: String,
        #[arg(long, default_value = "")]
        delete: String,
    },
    /// Print the direct sum of several matroids.
    Sum {
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
    },
    /// Connected components.
    Components(Input),
    /// κ(X).
    Kappa {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        set: String,
    },
    /// κ(X, Y) and the first minimizing U.
    KappaBetween {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        pair: Pair,
    },
    /// First ℓ-separation with ℓ ≤ k.
    Separation {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        k: usize,
    },
    /// Whether the matroid is k-connected.
    Connected {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// A partition (C, D) with κ_{M/C−D}(X, Y) = κ_M(X, Y).
    Link {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        pair: Pair,
        /// Follow the constructive procedure instead of scanning partitions.
        #[arg(long)]
        constructive: bool,
        /// Write the construction steps as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Work with an infinite family through its windows.
    Family(FamilyArgs),
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// double-ladder, infinite-uniform(k), omega-tree, theta or ladder-rails.
    #[arg(long)]
    id: String,
    /// Window index; defaults depend on the action.
    #[arg(long)]
    window: Option<usize>,
    #[command(subcommand)]
    action: FamilyAction,
}

#[derive(Debug, Args)]
struct PolicyArgs {
    #[arg(long, default_value_t = 8)]
    max_window: usize,
    #[arg(long, default_value_t = 3)]
    plateau: usize,
}

#[derive(Debug, Subcommand)]
enum FamilyAction {
    /// Print the window as a description.
    Describe,
    /// κ(X, Y) on one window (default: the first containing X and Y).
    KappaBetween(Pair),
    /// κ(X, Y) on growing windows until a plateau.
    Stabilize {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Validate a separation template on windows up to --window (default 8).
    Certify {
        #[arg(long)]
        template: String,
    },
    /// Linking inside the first window of a certified plateau.
    Link {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Try every contract/delete split of the rungs (double-ladder only).
    Rungs,
}

/// The outcome of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs one invocation. `env_budget` is the value of `MATROID_KAPPA_BUDGET`.
pub fn run<I, S>(args: I, env_budget: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let format = cli.output;
    match budget(cli.budget, env_budget).and_then(|b| dispatch(cli.verb, &b)) {
        Ok(report) => Outcome {
            code: 0,
            stdout: render(&report, format),
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Runs with the process arguments and environment, printing the report.
pub fn main_with_env() -> i32 {
    let env = std::env::var(BUDGET_ENV).ok();
    let outcome = run(std::env::args_os(), env.as_deref());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    outcome.code
}

fn budget(flag: Option<usize>, env: Option<&str>) -> CliResult<Budget> {
    let limit = match (flag, env) {
        (Some(n), _) => Some(n),
        (None, Some(text)) => Some(
            text.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{BUDGET_ENV}={text:?} is not a number")))?,
        ),
        (None, None) => None,
    };
    Ok(limit.map_or_else(Budget::default, Budget::with_limit))
}

/// A report: the verb, text lines and JSON fields.
struct Report {
    verb: &'static str,
    text: Vec<String>,
    fields: Map<String, Value>,
}

impl Report {
    fn new(verb: &'static str) -> Self {
        Self {
            verb,
            text: Vec::new(),
            fields: Map::new(),
        }
    }

    fn line(mut self, text: impl Into<String>) -> Self {
        self.text.push(text.into());
        self
    }

    fn field(mut self, key: &str, value: impl serde::Serialize) -> Self {
        self.fields.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable report"),
        );
        self
    }
}

fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => report.text.iter().map(|l| format!("{l}\n")).collect(),
        OutputFormat::Json => {
            let mut object = Map::new();
            object.insert("schema".into(), json!(SCHEMA));
            object.insert("verb".into(), json!(report.verb));
            object.extend(report.fields.clone());
            format!("{}\n", Value::Object(object))
        }
    }
}

fn load(path: &Path) -> CliResult<Description> {
    Ok(Description::read(path)?)
}

fn matroid(input: &Input) -> CliResult<Matroid> {
    Ok(load(&input.file)?.to_matroid()?)
}

/// Reads `@file` (one label per line) or returns the text itself.
fn set_text(text: &str) -> CliResult<String> {
    match text.strip_prefix('@') {
        Some(path) => {
            let content = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.into(),
                source,
            })?;
            let labels: Vec<&str> = content
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            Ok(labels.join(","))
        }
        None => Ok(text.to_string()),
    }
}

fn set(m: &Matroid, text: &str) -> CliResult<ElementSet> {
    Ok(m.set(&set_text(text)?)?)
}

fn labels(text: &str) -> CliResult<Vec<String>> {
    Ok(set_text(text)?
        .trim()
        .trim_start_matches('{')
        .trim_end_matches('}')
        .split(',')
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn dispatch(verb: Verb, budget: &Budget) -> CliResult<Report> {
    match verb {
        Verb::CheckAxioms(input) => {
            let candidate = load(&input.file)?.candidate(budget)?;
            let report = check_axioms(&candidate, budget)?;
            let mut out = Report::new("check-axioms");
            for check in &report.checks {
                out = out.line(match &check.failure {
                    None => format!("{} pass", check.axiom),
                    Some(w) => format!("{} FAIL: {w}", check.axiom),
                });
            }
            let verdict = if report.all_passed() { "yes" } else { "no" };
            Ok(out
                .line(format!("matroid: {verdict}"))
                .field("matroid", report.all_passed())
                .field("checks", &report.checks))
        }
        Verb::Circuits(input) => {
            let m = matroid(&input)?;
            let circuits = enumerate_circuits(&m, budget)?;
            let sets: Vec<&ElementSet> = circuits.iter().map(|c| c.members()).collect();
            let mut out = Report::new("circuits").field("circuits", &sets);
            for c in &circuits {
                out = out.line(c.to_string());
            }
            Ok(out)
        }
        Verb::Rank { input, set: s } => {
            let m = matroid(&input)?;
            let s = match s {
                Some(t) => set(&m, &t)?,
                None => m.full_set(),
            };
            let r = m.rank(&s)?;
            Ok(Report::new("rank")
                .line(format!("rank = {r}"))
                .field("set", &s)
                .field("rank", r))
        }
        Verb::Dual(input) => description_report("dual", &dual(&matroid(&input)?), budget),
        Verb::Minor {
            input,
            contract,
            delete,
        } => {
            let m = matroid(&input)?;
            let spec = MinorSpec::new(set(&m, &contract)?, set(&m, &delete)?)?;
            description_report("minor", &take_minor(&m, &spec)?, budget)
        }
        Verb::Sum { files } => {
            let parts = files
                .iter()
                .map(|f| Ok(load(f)?.to_matroid()?))
                .collect::<CliResult<Vec<_>>>()?;
            description_report("sum", &direct_sum(&parts)?, budget)
        }
        Verb::Components(input) => {
            let m = matroid(&input)?;
            let parts = components(&m, budget)?;
            let mut out = Report::new("components")
                .line(format!("components = {}", parts.len()))
                .field("count", parts.len())
                .field("blocks", &parts.blocks);
            for b in &parts.blocks {
                out = out.line(b.to_string());
            }
            Ok(out)
        }
        Verb::Kappa { input, set: s } => {
            let m = matroid(&input)?;
            let x = set(&m, &s)?;
            let value = kappa(&m, &x)?;
            Ok(Report::new("kappa")
                .line(format!("kappa = {value}"))
                .field("set", &x)
                .field("kappa", value))
        }
        Verb::KappaBetween { input, pair } => {
            let m = matroid(&input)?;
            let (x, y) = (set(&m, &pair.x)?, set(&m, &pair.y)?);
            let kb = kappa_between(&m, &x, &y)?;
            Ok(Report::new("kappa-between")
                .line(format!("kappa = {}", kb.value))
                .line(format!("witness = {}", kb.witness))
                .field("x", &x)
                .field("y", &y)
                .field("kappa", kb.value)
                .field("witness", &kb.witness))
        }
        Verb::Separation { input, k } => {
            let m = matroid(&input)?;
            let out = Report::new("separation");
            Ok(match find_separation(&m, k, budget)? {
                None => out
                    .line("separation: none")
                    .field("separation", Value::Null),
                Some(sep) => {
                    let order = sep.order.map_or("none".to_string(), |o| o.to_string());
                    out.line(format!("separation: {} | {}", sep.left, sep.right))
                        .line(format!("kappa = {}", sep.kappa))
                        .line(format!("order = {order}"))
                        .field("separation", &sep)
                }
            })
        }
        Verb::Connected { input, k } => {
            let m = matroid(&input)?;
            let yes = is_k_connected(&m, k, budget)?;
            let word = if yes { "yes" } else { "no" };
            Ok(Report::new("connected")
                .line(format!("{k}-connected: {word}"))
                .field("k", k)
                .field("connected", yes))
        }
        Verb::Link {
            input,
            pair,
            constructive,
            trace,
        } => {
            let m = matroid(&input)?;
            let (x, y) = (set(&m, &pair.x)?, set(&m, &pair.y)?);
            let result = if constructive {
                constructive_linking(&m, &x, &y, budget)?
            } else {
                linking_partition(&m, &x, &y, budget)?
            };
            if let Some(path) = trace {
                write_trace(&path, &result)?;
            }
            Ok(linking_report("link", &result, Report::new("link")))
        }
        Verb::Family(args) => family(args, budget),
    }
}

fn description_report(verb: &'static str, m: &Matroid, budget: &Budget) -> CliResult<Report> {
    let text = write_description(m, budget)?;
    let mut out = Report::new(verb).field("description", &text);
    out.text = text.lines().map(String::from).collect();
    Ok(out)
}

fn linking_report(_verb: &'static str, result: &LinkingResult, out: Report) -> Report {
    out.line(format!("target = {}", result.target))
        .line(format!("achieved = {}", result.achieved))
        .line(format!("contract = {}", result.spec.contract))
        .line(format!("delete = {}", result.spec.delete))
        .field("target", result.target)
        .field("achieved", result.achieved)
        .field("contract", &result.spec.contract)
        .field("delete", &result.spec.delete)
}

fn write_trace(path: &Path, result: &LinkingResult) -> CliResult<()> {
    let mut text = String::new();
    for entry in &result.trace {
        text.push_str(&serde_json::to_string(entry).expect("serializable trace"));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn policy(args: &PolicyArgs, budget: &Budget) -> StabilizationPolicy {
    StabilizationPolicy {
        max_window: args.max_window,
        plateau_length: args.plateau,
        budget: *budget,
    }
}

fn family(args: FamilyArgs, budget: &Budget) -> CliResult<Report> {
    let fam = InfiniteFamily::parse(&args.id)?;
    match args.action {
        FamilyAction::Describe => {
            let n = args.window.unwrap_or(0);
            description_report("family", &fam.window(n)?, budget)
                .map(|r| r.field("family", fam).field("window", n))
        }
        FamilyAction::KappaBetween(pair) => {
            let (xl, yl) = (labels(&pair.x)?, labels(&pair.y)?);
            let all: Vec<&String> = xl.iter().chain(&yl).collect();
            let n = match args.window {
                Some(n) => n,
                None => fam.exactness_radius(&all)?,
            };
            let w = fam.window(n)?;
            let (x, y) = (
                ElementSet::from_labels(w.ground(), &xl)?,
                ElementSet::from_labels(w.ground(), &yl)?,
            );
            let kb = kappa_between(&w, &x, &y)?;
            Ok(Report::new("family")
                .line(format!("window = {n}"))
                .line(format!("kappa = {}", kb.value))
                .line(format!("witness = {}", kb.witness))
                .field("family", fam)
                .field("window", n)
                .field("x", &x)
                .field("y", &y)
                .field("kappa", kb.value)
                .field("witness", &kb.witness))
        }
        FamilyAction::Stabilize { pair, policy: p } => {
            let (xl, yl) = (labels(&pair.x)?, labels(&pair.y)?);
            let report = stabilized_kappa_between(&fam, &xl, &yl, &policy(&p, budget))?;
            let mut out = Report::new("family").field("report", &report);
            for (n, v) in &report.values {
                out = out.line(format!("window {n}: kappa >= {v}"));
            }
            out = out.line(match report.stable_at {
                Some(n) => format!("stable from window {n}"),
                None => "no plateau".to_string(),
            });
            Ok(match (&report.certified_value, &report.certificate) {
                (Some(v), Some(c)) => out.line(format!("certified kappa = {v} by {}", c.template)),
                _ => out.line("uncertified lower bound"),
            })
        }
        FamilyAction::Certify { template } => {
            let cert = certified_separation(&fam, &template, args.window.unwrap_or(8))?;
            let mut out = Report::new("family")
                .line(format!(
                    "{}: kappa <= {} (k = {})",
                    cert.template,
                    cert.kappa_bound(),
                    cert.k
                ))
                .field("certificate", &cert);
            for (n, v) in &cert.checked {
                out = out.line(format!("window {n}: kappa = {v}"));
            }
            Ok(out)
        }
        FamilyAction::Link { pair, policy: p } => {
            let (xl, yl) = (labels(&pair.x)?, labels(&pair.y)?);
            let linked = windowed_linking(&fam, &xl, &yl, &policy(&p, budget))?;
            let out = Report::new("family")
                .line(format!("window = {}", linked.window))
                .line("outside the window: delete")
                .field("family", fam)
                .field("window", linked.window)
                .field("certified", linked.certified_value);
            Ok(linking_report("family", &linked.result, out))
        }
        FamilyAction::Rungs => {
            if fam != InfiniteFamily::DoubleLadder {
                return Err(MatroidError::Domain(
                    "rung partitions need the double-ladder family".into(),
                )
                .into());
            }
            let n = args.window.unwrap_or(2);
            let check = rung_partition_check(n, budget)?;
            let witness = check.witness.as_ref().map_or("none".to_string(), |w| {
                format!("contract {} delete {}", w.contract, w.delete)
            });
            Ok(Report::new("family")
                .line(format!("window = {n}"))
                .line(format!("partitions = {}", check.partitions_checked))
                .line(format!("2-connected minors = {}", check.two_connected))
                .line(format!("first = {witness}"))
                .line(format!(
                    "deleting all rungs disconnects: {}",
                    check.deleting_all_disconnects
                ))
                .line(format!(
                    "contracting an interior rung disconnects: {}",
                    check.interior_contraction_disconnects
                ))
                .field("check", &check))
        }
    }
}
