//! Command-line front end: scenario files in, verdicts out.

pub mod scenario;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use eidos_core::engine::numeric::{rational_to_decimal, to_decimal, Numeric, WORK_BITS};
use eidos_core::engine::{
    classify, entropic_probability, entropy_uniform, irreversibility_estimate, is_uniform, landauer_check,
    min_information_to_transform, shannon_decomposition,
};
use eidos_core::harness::{run_axiom_suite, run_selected, run_theorem_suite, SuiteConfig, SuiteReport};
use eidos_core::{DemonPlan, Eidostate, ExactEntropy, Fault, Process, ProcessType};

pub use scenario::{parse_scenario, Model, ModelKind, ParseError, Scenario};

#[derive(Debug, Parser)]
#[command(name = "eidos", version, about = "Eidostates, entropy and irreversibility from the arrow relation")]
pub struct Cli {
    /// Scenario file declaring atoms, states and eidostates.
    #[arg(short, long, global = true)]
    pub scenario: Option<PathBuf>,

    /// Model to use when no scenario is given.
    #[arg(short, long, global = true, value_enum)]
    pub model: Option<ModelArg>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Macro,
    Quantum,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Macro => ModelKind::Macro,
            ModelArg::Quantum => ModelKind::Quantum,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    DropQ,
    FlipEntropy,
    BreakRecordFreeness,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Self {
        match f {
            FaultArg::DropQ => Fault::DropQCriterion,
            FaultArg::FlipEntropy => Fault::FlipEntropyCriterion,
            FaultArg::BreakRecordFreeness => Fault::BreakRecordFreeness,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Type of the process ⟨A, B⟩.
    Classify { a: String, b: String },
    /// Entropy of an eidostate, exact and decimal.
    Entropy {
        e: String,
        #[arg(long, default_value_t = 30)]
        digits: usize,
    },
    /// Entropic probability of a state within a uniform eidostate.
    Prob {
        state: String,
        e: String,
        #[arg(long, default_value_t = 30)]
        digits: usize,
    },
    /// Every entropic probability of E and the split of 𝕊(E) into mean entropy plus Shannon information.
    ProbReport {
        e: String,
        #[arg(long, default_value_t = 30)]
        digits: usize,
    },
    /// Bracket on the irreversibility of ⟨a, b⟩ from bit-process comparisons.
    Irrev {
        a: String,
        b: String,
        #[arg(long, default_value_t = 64)]
        qmax: u64,
    },
    /// Smallest information state J with A → B + J.
    Demon {
        a: String,
        b: String,
        #[arg(long, default_value_t = 1024)]
        nmax: u64,
    },
    /// Whether erasing a bit state along a + I_b → b respects 𝕊(b) ≥ 𝕊(a) + 1.
    Landauer { a: String, b: String },
    /// Randomized axiom checks.
    CheckAxioms(SuiteArgs),
    /// Randomized checks of derived theorems.
    CheckTheorems(SuiteArgs),
    /// The scenario as parsed.
    Show,
}

#[derive(Debug, Clone, Args)]
pub struct SuiteArgs {
    #[arg(long, default_value_t = 500)]
    pub cases: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 6)]
    pub max_size: usize,
    #[arg(long, default_value_t = 4)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 8)]
    pub stability_n: usize,
    /// Only these check ids.
    #[arg(long = "check")]
    pub checks: Vec<String>,
    /// Corrupt the macrostate arrow on purpose.
    #[arg(long, value_enum)]
    pub fault: Option<FaultArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    CheckFailed,
    InputError,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed => 1,
            Status::InputError => 2,
        }
    }
}

/// The structured output document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Document {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub result: Value,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub document: Document,
    pub text: String,
    pub status: Status,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(&self.document).expect("documents serialize");
                s.push('\n');
                s
            }
        }
    }
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

struct Reply {
    result: Value,
    text: String,
    diagnostics: Vec<String>,
    status: Status,
}

impl Reply {
    fn ok(result: Value, text: String) -> Self {
        Reply {
            result,
            text,
            diagnostics: Vec::new(),
            status: Status::Ok,
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Entropy { .. } => "entropy",
            Command::Prob { .. } => "prob",
            Command::ProbReport { .. } => "prob-report",
            Command::Irrev { .. } => "irrev",
            Command::Demon { .. } => "demon",
            Command::Landauer { .. } => "landauer",
            Command::CheckAxioms(_) => "check-axioms",
            Command::CheckTheorems(_) => "check-theorems",
            Command::Show => "show",
        }
    }

    fn inputs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_owned(), v);
        };
        match self {
            Command::Classify { a, b } | Command::Landauer { a, b } => {
                put("a", a.clone());
                put("b", b.clone());
            }
            Command::Entropy { e, digits } | Command::ProbReport { e, digits } => {
                put("e", e.clone());
                put("digits", digits.to_string());
            }
            Command::Prob { state, e, digits } => {
                put("state", state.clone());
                put("e", e.clone());
                put("digits", digits.to_string());
            }
            Command::Irrev { a, b, qmax } => {
                put("a", a.clone());
                put("b", b.clone());
                put("qmax", qmax.to_string());
            }
            Command::Demon { a, b, nmax } => {
                put("a", a.clone());
                put("b", b.clone());
                put("nmax", nmax.to_string());
            }
            Command::CheckAxioms(s) | Command::CheckTheorems(s) => {
                put("cases", s.cases.to_string());
                put("seed", s.seed.to_string());
                put("max_size", s.max_size.to_string());
                put("max_depth", s.max_depth.to_string());
                put("stability_n", s.stability_n.to_string());
                if !s.checks.is_empty() {
                    put("checks", s.checks.join(","));
                }
                if let Some(f) = s.fault {
                    put("fault", format!("{:?}", Fault::from(f)));
                }
            }
            Command::Show => {}
        }
        m
    }
}

/// Load the scenario named on the command line, or an empty one.
pub fn load_scenario(cli: &Cli) -> Result<Scenario, String> {
    let sc = match &cli.scenario {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_scenario(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => Scenario::empty(cli.model.map(ModelKind::from).unwrap_or_default()),
    };
    if let Some(m) = cli.model {
        if ModelKind::from(m) != sc.model {
            return Err(format!(
                "--model {} conflicts with the scenario's model {}",
                ModelKind::from(m).name(),
                sc.model.name()
            ));
        }
    }
    Ok(sc)
}

pub fn run(cli: &Cli) -> Outcome {
    let mut inputs = cli.command.inputs();
    inputs.insert("model".into(), String::new());
    if let Some(p) = &cli.scenario {
        inputs.insert("scenario".into(), p.display().to_string());
    }
    let reply = load_scenario(cli).map_err(Failure).and_then(|sc| {
        inputs.insert("model".into(), sc.model.name().into());
        execute(&cli.command, &sc)
    });
    let (reply, status) = match reply {
        Ok(r) => {
            let s = r.status;
            (r, s)
        }
        Err(Failure(msg)) => (
            Reply {
                result: Value::Null,
                text: format!("error: {msg}\n"),
                diagnostics: vec![msg],
                status: Status::InputError,
            },
            Status::InputError,
        ),
    };
    Outcome {
        document: Document {
            command: cli.command.name().into(),
            inputs,
            result: reply.result,
            diagnostics: reply.diagnostics,
        },
        text: reply.text,
        status,
    }
}

fn execute(cmd: &Command, sc: &Scenario) -> Result<Reply, Failure> {
    let model = sc.model();
    let oracle = model.oracle();
    match cmd {
        Command::Classify { a, b } => {
            let (a, b) = (sc.parse_eidostate(a)?, sc.parse_eidostate(b)?);
            let t = classify(&Process::new(a, b), oracle)?;
            let forward = matches!(t, ProcessType::NaturalIrreversible | ProcessType::Reversible);
            let backward = matches!(t, ProcessType::AntinaturalIrreversible | ProcessType::Reversible);
            Ok(Reply::ok(
                json!({ "type": t.to_string(), "forward": forward, "backward": backward }),
                format!("{t}\n"),
            ))
        }
        Command::Entropy { e, digits } => entropy(sc, &model, e, *digits),
        Command::Prob { state, e, digits } => {
            let a = sc.parse_state(state)?;
            let e = sc.parse_eidostate(e)?;
            let p = entropic_probability(&a, &e, oracle, WORK_BITS)?;
            let p = to_decimal(&p, *digits);
            Ok(Reply::ok(json!({ "probability": p }), format!("P({a} | E) = {p}\n")))
        }
        Command::ProbReport { e, digits } => {
            let e = sc.parse_eidostate(e)?;
            let view = shannon_decomposition(&e, oracle, WORK_BITS, *digits)?.view();
            let mut text = String::new();
            for entry in &view.support {
                writeln!(text, "P({}) = {}", entry.state, entry.probability)?;
            }
            writeln!(text, "S(E)    = {}", view.entropy_total)?;
            writeln!(text, "<S>     = {}", view.mean_state_entropy)?;
            writeln!(text, "H       = {}", view.shannon_term)?;
            writeln!(text, "|S(E) - <S> - H| = {}", view.residual)?;
            Ok(Reply::ok(serde_json::to_value(&view)?, text))
        }
        Command::Irrev { a, b, qmax } => {
            let (a, b) = (sc.parse_state(a)?, sc.parse_state(b)?);
            let est = irreversibility_estimate(&a, &b, *qmax, oracle)?;
            let width = est.width();
            let text = format!(
                "[{}, {}]  width {}  (q_max = {})\n~ [{}, {}]\n",
                est.lower,
                est.upper,
                width,
                est.q_max,
                rational_to_decimal(&est.lower, 12),
                rational_to_decimal(&est.upper, 12)
            );
            let mut result = serde_json::to_value(&est)?;
            result["width"] = Value::String(width.to_string());
            Ok(Reply::ok(result, text))
        }
        Command::Demon { a, b, nmax } => {
            let (a, b) = (sc.parse_eidostate(a)?, sc.parse_eidostate(b)?);
            let plan = min_information_to_transform(&a, &b, *nmax, oracle)?;
            let text = match plan {
                DemonPlan::Found(n) => format!("{n}\n"),
                DemonPlan::Blocked => "blocked\n".to_owned(),
                DemonPlan::ExceedsBound => format!("more than {nmax}\n"),
            };
            Ok(Reply::ok(serde_json::to_value(plan)?, text))
        }
        Command::Landauer { a, b } => {
            let (a, b) = (sc.parse_state(a)?, sc.parse_state(b)?);
            let v = landauer_check(&a, &b, oracle)?;
            let margin = match &v.margin_exact {
                Some(m) => m.to_string(),
                None => format!("{:.12}", v.margin),
            };
            let text = if !v.applicable {
                format!("not applicable: {a} + I_b -> {b} is not possible\n")
            } else if v.bound_holds {
                format!("holds, margin {margin}\n")
            } else {
                format!("violated, margin {margin}\n")
            };
            let mut reply = Reply::ok(serde_json::to_value(&v)?, text);
            if v.violated() {
                reply.status = Status::CheckFailed;
            }
            Ok(reply)
        }
        Command::CheckAxioms(args) => suite(&model, args, true),
        Command::CheckTheorems(args) => suite(&model, args, false),
        Command::Show => {
            let text = sc.to_string();
            Ok(Reply::ok(json!({ "scenario": text }), text))
        }
    }
}

fn entropy(sc: &Scenario, model: &Model, e: &str, digits: usize) -> Result<Reply, Failure> {
    let e: Eidostate = sc.parse_eidostate(e)?;
    let oracle = model.oracle();
    let mut diagnostics = Vec::new();
    let (exponents, exact) = if is_uniform(&e, oracle)? {
        let mut raw: Option<ExactEntropy> = None;
        for x in e.iter() {
            let s = oracle.state_entropy(&x)?;
            raw = Some(match raw {
                None => s,
                Some(acc) => acc.union(&s),
            });
        }
        (raw.expect("eidostates are nonempty"), entropy_uniform(&e, oracle)?)
    } else {
        let exact = match model {
            Model::Macro(m) => m.entropy_exact(&e)?,
            Model::Quantum(m) => ExactEntropy::log2_count(m.q_dim(&e)?)?,
        };
        diagnostics.push("not uniform: entropy from the factor decomposition".to_owned());
        (exact.clone(), exact)
    };
    let canonical = exact.canonical();
    let value = Numeric::new(WORK_BITS)?.entropy(&canonical);
    let decimal = to_decimal(&value, digits);
    let rational = canonical.as_rational().map(|r| r.to_string());
    let mut text = format!("exponents: {exponents}\ncanonical: {canonical}\ndecimal: {decimal}\n");
    if let Some(r) = &rational {
        writeln!(text, "exact: {r}")?;
    }
    Ok(Reply {
        result: json!({
            "exponents": exponents.to_string(),
            "canonical": canonical.to_string(),
            "decimal": decimal,
            "exact": rational,
        }),
        text,
        diagnostics,
        status: Status::Ok,
    })
}

fn suite(model: &Model, args: &SuiteArgs, axioms: bool) -> Result<Reply, Failure> {
    let cfg = SuiteConfig {
        cases: args.cases,
        max_size: args.max_size,
        max_depth: args.max_depth,
        stability_n: args.stability_n,
        seed: args.seed,
    };
    let faulty;
    let model = match (model, args.fault) {
        (_, None) => model,
        (Model::Macro(m), Some(f)) => {
            faulty = Model::Macro(m.clone().with_fault(f.into()));
            &faulty
        }
        (Model::Quantum(_), Some(_)) => return Err(Failure("faults apply to the macrostate model only".into())),
    };
    let oracle = model.oracle();
    let report: SuiteReport = if args.checks.is_empty() {
        if axioms {
            run_axiom_suite(oracle, &cfg)?
        } else {
            run_theorem_suite(oracle, &cfg)?
        }
    } else {
        let ids: Vec<&str> = args.checks.iter().map(String::as_str).collect();
        run_selected(oracle, &cfg, &ids)?
    };
    let mut text = String::new();
    writeln!(text, "{:<18} {:>6} {:>7} {:>13} {:>10} {:>10}", "check", "cases", "failed", "inconclusive", "anomalies", "bracketed")?;
    for c in &report.checks {
        writeln!(
            text,
            "{:<18} {:>6} {:>7} {:>13} {:>10} {:>10}",
            c.id, c.cases, c.failed, c.inconclusive, c.anomalies, c.approximate
        )?;
    }
    for (label, records) in [
        ("counterexample", &report.counterexamples),
        ("inconclusive", &report.inconclusive),
        ("anomaly", &report.anomalies),
    ] {
        for r in records {
            writeln!(text, "{label} {} seed {}: {}", r.check_id, r.seed, r.observed)?;
            for i in &r.inputs {
                writeln!(text, "    {i}")?;
            }
        }
    }
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    writeln!(text, "{verdict}: {} counterexamples", report.counterexamples.len())?;
    let mut diagnostics = Vec::new();
    if !report.inconclusive.is_empty() {
        diagnostics.push(format!("{} inconclusive cases", report.inconclusive.len()));
    }
    if !report.anomalies.is_empty() {
        diagnostics.push(format!("{} finite-stability anomalies", report.anomalies.len()));
    }
    Ok(Reply {
        result: serde_json::to_value(&report)?,
        text,
        diagnostics,
        status: if report.passed() { Status::Ok } else { Status::CheckFailed },
    })
}
