// SPDX-License-Identifier: Apache-2.0

//! `bsg`: command-line front end for `bsg-core`.
//!
//! Exit codes: 0 answered / true, 1 false, 2 unknown or bounds exhausted,
//! 3 usage or input error.

use std::io::Read;
use std::process::ExitCode;

use anyhow::Context;
use bsg_core::conjugacy::{is_conjugate, separate_conjugacy, separate_element_with, SearchLimits};
use bsg_core::presentation::{
    is_conjugacy_separable, is_conjugacy_separable_pi, is_residually_finite, is_residually_p, is_residually_pi,
    is_subgroup_separable, is_virtually_residually_p, is_virtually_residually_pi, sigma_description,
    sigma_p_description, WitnessHint,
};
use bsg_core::words::{britton_reduce_guarded, DEFAULT_BIT_GUARD};
use bsg_core::{Error, FiniteQuotient, GroupParams, PrimeSet, Truth, Verdict, VerifyError, Witness, Word};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

const EXIT_FALSE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "bsg",
    version,
    about = "Residual properties, word and conjugacy problems for G(m,n) = <a,b | a^-1 b^m a = b^n>"
)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Config {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Print search decisions to stderr.
    #[arg(long, global = true)]
    trace: bool,
    /// Upper bound when enumerating pi-numbers.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    search_bound: u64,
    /// Largest permutation degree tried when searching for finite images.
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    max_degree: u64,
    /// Largest exponent size (in bits) allowed during Britton reduction.
    #[arg(long, global = true, default_value_t = DEFAULT_BIT_GUARD, value_parser = clap::value_parser!(u64).range(1..))]
    bit_guard: u64,
}

impl Config {
    fn limits(&self) -> SearchLimits {
        SearchLimits {
            max_degree: self.max_degree as usize,
            bit_guard: self.bit_guard,
            search_bound: self.search_bound,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide residual and separability properties of G(m,n).
    #[command(allow_negative_numbers = true)]
    Classify {
        m: i64,
        n: i64,
        /// Ask about residual p-finiteness for this prime.
        #[arg(long, conflicts_with = "pi")]
        p: Option<u64>,
        /// Ask about residual pi-finiteness for a comma-separated prime set.
        #[arg(long, value_delimiter = ',')]
        pi: Option<Vec<u64>>,
        /// Ask the virtual version of the --p / --pi question.
        #[arg(long = "virtual")]
        virtually: bool,
    },
    /// Britton-reduce a word.
    #[command(allow_negative_numbers = true)]
    Reduce { m: i64, n: i64, word: String },
    /// Is the word the identity in G(m,n)?
    #[command(allow_negative_numbers = true)]
    Trivial { m: i64, n: i64, word: String },
    /// Do two words represent the same element?
    #[command(allow_negative_numbers = true)]
    Equal { m: i64, n: i64, w1: String, w2: String },
    /// Are two words conjugate in G(1,n)?
    #[command(allow_negative_numbers = true)]
    Conj { n: i64, w1: String, w2: String },
    /// Find a finite image in which the word survives.
    #[command(allow_negative_numbers = true)]
    Separate { m: i64, n: i64, word: String },
    /// Find a finite image of G(1,n) in which the words are not conjugate.
    #[command(name = "separate-conj", allow_negative_numbers = true)]
    SeparateConj { n: i64, w1: String, w2: String },
    /// Describe the finite (or finite-p) residual.
    #[command(allow_negative_numbers = true)]
    Sigma {
        m: i64,
        n: i64,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Inspect the metacyclic group H_n(k,l).
    #[command(allow_negative_numbers = true)]
    Quotient {
        n: i64,
        k: u64,
        l: u64,
        /// List every element.
        #[arg(long, conflicts_with = "conj")]
        list: bool,
        /// Are b^R and b^S conjugate in H_n(k,l)?
        #[arg(long, num_args = 2, value_names = ["R", "S"], allow_negative_numbers = true)]
        conj: Option<Vec<i64>>,
    },
    /// Check a witness file ("-" reads stdin).
    #[command(name = "verify-witness")]
    VerifyWitness { file: String },
}

/// Distinguishes user mistakes (exit 3) from everything else.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Unknown(String),
    Other(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BoundsExhausted(_) | Error::ResourceLimit(_) => Failure::Unknown(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

type Outcome = Result<u8, Failure>;

fn params(m: i64, n: i64) -> Result<GroupParams, Failure> {
    Ok(GroupParams::new(m, n)?)
}

fn word(text: &str) -> Result<Word, Failure> {
    text.parse::<Word>().map_err(|e| Failure::Usage(format!("cannot parse {text:?}: {e}")))
}

fn truth_code(t: Truth) -> u8 {
    match t {
        Truth::True => 0,
        Truth::False => EXIT_FALSE,
        Truth::Unknown => EXIT_UNKNOWN,
    }
}

fn bool_code(b: bool) -> u8 {
    if b {
        0
    } else {
        EXIT_FALSE
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON value serializes"));
}

fn verdict_line(label: &str, v: &Verdict) -> String {
    let detail = match &v.witness_hint {
        Some(WitnessHint::PiNumber(s)) => format!("s={s}; {}", v.reason.description()),
        Some(WitnessHint::Prime(p)) => format!("p={p}; {}", v.reason.description()),
        Some(WitnessHint::Word(w)) => format!("{}; witness element {w}", v.reason.description()),
        None => v.reason.description().to_string(),
    };
    format!("{label}: {} ({detail})", v.value)
}

fn classify(cfg: &Config, g: GroupParams, p: Option<u64>, pi: Option<Vec<u64>>, virtually: bool) -> Outcome {
    let pi = match (p, pi) {
        (Some(p), _) => Some(PrimeSet::singleton(p)?),
        (None, Some(list)) => Some(PrimeSet::new(list)?),
        (None, None) => None,
    };
    let mut rows: Vec<(String, String, Verdict)> = Vec::new();
    match (&pi, virtually) {
        (None, true) => return Err(Failure::Usage("--virtual needs --p or --pi".into())),
        (None, false) => {
            rows.push(("residually_finite".into(), "residually finite".into(), is_residually_finite(g)));
            rows.push(("conjugacy_separable".into(), "conjugacy separable".into(), is_conjugacy_separable(g)));
            rows.push(("subgroup_separable".into(), "subgroup separable".into(), is_subgroup_separable(g)));
        }
        (Some(set), false) => {
            let (key, label, v) = if set.len() == 1 {
                let p = set.iter().next().expect("singleton");
                ("residually_p".to_string(), format!("F_{p}-residual"), is_residually_p(g, p)?)
            } else {
                (
                    "residually_pi".to_string(),
                    format!("F_pi-residual (pi={set})"),
                    is_residually_pi(g, set, cfg.search_bound)?,
                )
            };
            rows.push((key, label, v));
            rows.push((
                "conjugacy_separable_pi".into(),
                format!("conjugacy F_pi-separable (pi={set})"),
                is_conjugacy_separable_pi(g, set, cfg.search_bound)?,
            ));
        }
        (Some(set), true) => {
            let (key, label, v) = if set.len() == 1 {
                let p = set.iter().next().expect("singleton");
                (
                    "virtually_residually_p".to_string(),
                    format!("virtually F_{p}-residual"),
                    is_virtually_residually_p(g, p)?,
                )
            } else {
                (
                    "virtually_residually_pi".to_string(),
                    format!("virtually F_pi-residual (pi={set})"),
                    is_virtually_residually_pi(g, set)?,
                )
            };
            rows.push((key, label, v));
        }
    }
    let code = truth_code(rows[0].2.value);
    if cfg.trace {
        for (key, _, v) in &rows {
            eprintln!("trace: {key} decided by {}", v.reason.code());
        }
    }
    if cfg.json {
        let mut props = serde_json::Map::new();
        for (key, _, v) in &rows {
            props.insert(key.clone(), serde_json::to_value(v).expect("verdict serializes"));
        }
        print_json(&json!({
            "group": g.to_string(),
            "canonical": g.canonical().to_string(),
            "value": rows[0].2.value,
            "reason": serde_json::to_value(&rows[0].2).expect("verdict serializes")["reason"],
            "properties": props,
        }));
    } else {
        if !g.is_canonical() {
            println!("{g} is isomorphic to {}", g.canonical());
        }
        for (_, label, v) in &rows {
            println!("{}", verdict_line(label, v));
        }
    }
    Ok(code)
}

fn emit_witness(cfg: &Config, wit: &Witness) -> Outcome {
    if cfg.trace {
        eprintln!("trace: strategy {}", wit.meta.strategy);
        for line in &wit.meta.search_trace {
            eprintln!("trace: {line}");
        }
    }
    if !cfg.json {
        eprintln!("separating image: {} ({})", wit.target, wit.meta.strategy);
    }
    println!("{}", wit.to_json());
    Ok(0)
}

/// Precondition failures of the separation commands are "no" answers.
fn separation(cfg: &Config, result: bsg_core::Result<Witness>) -> Outcome {
    match result {
        Ok(wit) => emit_witness(cfg, &wit),
        Err(Error::Precondition(msg)) => {
            if cfg.json {
                print_json(&json!({ "separable": false, "reason": msg }));
            } else {
                println!("no separating image: {msg}");
            }
            Ok(EXIT_FALSE)
        }
        Err(e) => Err(e.into()),
    }
}

fn read_input(file: &str) -> anyhow::Result<String> {
    if file == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        std::fs::read_to_string(file).with_context(|| format!("reading {file}"))
    }
}

fn run(cli: Cli) -> Outcome {
    let cfg = cli.config;
    match cli.command {
        Command::Classify { m, n, p, pi, virtually } => classify(&cfg, params(m, n)?, p, pi, virtually),
        Command::Reduce { m, n, word: w } => {
            let g = params(m, n)?;
            let r = britton_reduce_guarded(g, &word(&w)?, cfg.bit_guard)?;
            if cfg.json {
                print_json(&json!({ "group": g.to_string(), "input": w, "reduced": r.to_string() }));
            } else {
                println!("{r}");
            }
            Ok(0)
        }
        Command::Trivial { m, n, word: w } => {
            let g = params(m, n)?;
            let trivial = britton_reduce_guarded(g, &word(&w)?, cfg.bit_guard)?.is_empty();
            if cfg.json {
                print_json(&json!({ "group": g.to_string(), "word": w, "trivial": trivial }));
            } else {
                println!("trivial: {trivial}");
            }
            Ok(bool_code(trivial))
        }
        Command::Equal { m, n, w1, w2 } => {
            let g = params(m, n)?;
            let quotient = word(&w1)?.multiply(&word(&w2)?.inverse());
            let equal = britton_reduce_guarded(g, &quotient, cfg.bit_guard)?.is_empty();
            if cfg.json {
                print_json(&json!({ "group": g.to_string(), "words": [w1, w2], "equal": equal }));
            } else {
                println!("equal: {equal}");
            }
            Ok(bool_code(equal))
        }
        Command::Conj { n, w1, w2 } => {
            let g = params(1, n)?;
            let conj = is_conjugate(g, &word(&w1)?, &word(&w2)?)?;
            if cfg.json {
                print_json(&json!({ "group": g.to_string(), "words": [w1, w2], "conjugate": conj }));
            } else {
                println!("conjugate: {conj}");
            }
            Ok(bool_code(conj))
        }
        Command::Separate { m, n, word: w } => {
            let g = params(m, n)?;
            let result = separate_element_with(g, &word(&w)?, &cfg.limits());
            separation(&cfg, result)
        }
        Command::SeparateConj { n, w1, w2 } => {
            params(1, n)?;
            let result = separate_conjugacy(n, &word(&w1)?, &word(&w2)?);
            separation(&cfg, result)
        }
        Command::Sigma { m, n, p } => {
            let g = params(m, n)?;
            let d = match p {
                Some(p) => sigma_p_description(g, p)?,
                None => sigma_description(g),
            };
            if cfg.json {
                print_json(&serde_json::to_value(&d).expect("sigma serializes"));
            } else {
                let which = match p {
                    Some(p) => format!("F_{p}-residual"),
                    None => "finite residual".to_string(),
                };
                println!("{which} of {} is normally generated by:", d.group);
                if let Some(e) = d.power_exponent {
                    println!("  b^{e}");
                }
                if let Some(x) = &d.extra_element {
                    println!("  {x}");
                }
                if let Some(e) = d.commutator_exponent {
                    println!("  [a^k b^{e} a^-k, b] for all integers k");
                }
            }
            Ok(0)
        }
        Command::Quotient { n, k, l, list, conj } => {
            let h = FiniteQuotient::new(n, k, l)?;
            if let Some(rs) = conj {
                let (r, s) = (rs[0], rs[1]);
                let c = h.conjugate_b_powers(r, s);
                if cfg.json {
                    print_json(&json!({ "quotient": h, "r": r, "s": s, "conjugate": c }));
                } else {
                    println!("b^{r} and b^{s} conjugate in {h}: {c}");
                }
                return Ok(bool_code(c));
            }
            if cfg.json {
                let mut out = json!({ "quotient": h, "order": h.order().to_string() });
                if list {
                    out["elements"] = h.elements().map(|x| json!([x.i, x.j])).collect();
                }
                print_json(&out);
            } else {
                println!("{h}: order {}", h.order());
                if list {
                    for x in h.elements() {
                        println!("{x}");
                    }
                }
            }
            Ok(0)
        }
        Command::VerifyWitness { file } => {
            let text = read_input(&file)?;
            let (code, message) = match bsg_core::witness::verify_json(&text) {
                Ok(wit) => (0, format!("valid: {} separates in {}", wit.source, wit.target)),
                Err(e @ VerifyError::Malformed(_)) => (EXIT_USAGE, e.to_string()),
                Err(e @ VerifyError::TooLarge(_)) => (EXIT_UNKNOWN, e.to_string()),
                Err(e) => (EXIT_FALSE, e.to_string()),
            };
            if cfg.json {
                print_json(&json!({ "valid": code == 0, "message": message }));
            } else {
                println!("{message}");
            }
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Unknown(msg)) => {
            eprintln!("unknown: {msg}");
            ExitCode::from(EXIT_UNKNOWN)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
