//! `doubling` — command-line front end for the sumset toolkit.
//!
//! Exit codes: 0 pass/success, 2 mathematical fail (counterexample found),
//! 3 not-applicable, 4 usage error, 5 resource error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use doubling::verdict::Verdict;
use doubling::zint::IntSet;
use doubling::zp::{self, ResidueSet};
use doubling::{ap, atoms, audit, survey, theorems, Error};
use num_rational::Ratio;
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "doubling", version, about = "Exact sumset arithmetic in Z/pZ and Z: covers, atoms, theorem checkers, surveys, and the numeric audit")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Sumset S+T of two residue sets ("p:e1,e2,..." or "p:xHEX")
    Sumset { set: String, set2: String },
    /// Minimal arithmetic-progression cover length ell(X)
    Ell { set: String },
    /// Relative cover ell_X(Y): Y covered at a difference realizing ell(X)
    EllRel { set: String, set2: String },
    /// Density (|X|-1)/ell(X)
    Density { set: String },
    /// Isoperimetric number kappa_k(S) with atoms and fragments
    Kappa {
        #[arg(long)]
        set: String,
        #[arg(long)]
        k: u64,
        /// exhaustive (default) or bounded (requires --cap)
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        /// |X| cap for bounded mode
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Run one theorem/lemma checker on explicit inputs
    Check {
        /// conjecture | cauchy-davenport | rectifiable-pair | freiman-3k4-int |
        /// lev-smelianski | blr | plunnecke | plunnecke-int | density-lemma |
        /// freiman-zp
        id: String,
        #[arg(long)]
        set: String,
        #[arg(long)]
        set2: Option<String>,
        #[arg(long)]
        j: Option<u64>,
        #[arg(long)]
        t: Option<u64>,
        #[arg(long)]
        c0: Option<String>,
        #[arg(long)]
        c1: Option<String>,
        /// Greedy (non-exhaustive) witness search for plunnecke
        #[arg(long)]
        greedy: bool,
    },
    /// Exhaustive/randomized sweep over canonical classes
    Survey {
        #[command(subcommand)]
        kind: SurveyCommand,
    },
    /// Equality-case hunt (alias for `survey hunt`)
    Hunt(SurveyArgs),
    /// Construct and measure the extremal family {0} u {m+3..(p+1)/2}
    Extremal {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
    },
    /// Numeric inequality audit
    Audit {
        #[arg(long)]
        item: Option<String>,
        /// Newton steps for certified square-root margins
        #[arg(long, default_value_t = 32)]
        precision: u32,
    },
}

#[derive(Subcommand)]
enum SurveyCommand {
    Conjecture(SurveyArgs),
    AtomLemmas(SurveyArgs),
    Hunt(SurveyArgs),
}

#[derive(Args)]
struct SurveyArgs {
    /// Comma-separated primes, e.g. 5,7,11,13
    #[arg(long, required = true)]
    p: String,
    #[arg(long)]
    k_max: Option<u64>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, required = true)]
    out: PathBuf,
    /// exhaustive (default) or random
    #[arg(long, default_value = "exhaustive")]
    mode: String,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    size_min: Option<u64>,
    #[arg(long)]
    size_max: Option<u64>,
    /// Test hook: stop after committing N blocks
    #[arg(long, hide = true)]
    stop_after_blocks: Option<u64>,
}

fn parse_ratio(s: &str) -> doubling::Result<Ratio<u64>> {
    let bad = || Error::Usage(format!("cannot parse {s:?} as a rational (use a/b or a decimal)"));
    if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(Ratio::new(n, d))
    } else if let Some((i, f)) = s.split_once('.') {
        let i: u64 = if i.is_empty() { 0 } else { i.trim().parse().map_err(|_| bad())? };
        if f.is_empty() || f.len() > 18 || !f.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(f.len() as u32);
        let frac: u64 = f.parse().map_err(|_| bad())?;
        Ok(Ratio::new(i * den + frac, den))
    } else {
        Ok(Ratio::from_integer(s.trim().parse().map_err(|_| bad())?))
    }
}

fn parse_p_list(s: &str) -> doubling::Result<Vec<u64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Usage(format!("bad prime {t:?} in --p list")))
        })
        .collect()
}

/// Uniform output: a resolved-config echo plus the payload.
fn emit(format: Format, config: Value, result: Value, text: String) {
    match format {
        Format::Json => {
            println!("{}", json!({"config": config, "result": result}));
        }
        Format::Text => println!("{text}"),
    }
}

fn emit_verdict(format: Format, config: Value, v: &Verdict) -> i32 {
    emit(
        format,
        config,
        serde_json::to_value(v).unwrap(),
        format!("{:?}: {} [{}]", v.status, v.message, v.statement_id),
    );
    v.exit_code()
}

fn residue(lit: &str) -> doubling::Result<ResidueSet> {
    zp::parse_set_literal(lit)
}

fn need<T>(opt: Option<T>, what: &str) -> doubling::Result<T> {
    opt.ok_or_else(|| Error::Usage(format!("missing required option {what}")))
}

fn survey_config(kind: survey::SurveyKind, a: &SurveyArgs) -> doubling::Result<survey::SurveyConfig> {
    let mode = match a.mode.as_str() {
        "exhaustive" => survey::Mode::Exhaustive,
        "random" => survey::Mode::Random {
            samples: need(a.samples, "--samples")?,
            seed: a.seed.unwrap_or(0),
        },
        other => return Err(Error::Usage(format!("unknown mode {other:?}"))),
    };
    Ok(survey::SurveyConfig {
        kind,
        p_list: parse_p_list(&a.p)?,
        mode,
        size_min: a.size_min,
        size_max: a.size_max,
        jobs: a.jobs,
        checkpoint: a.checkpoint.clone(),
        out: a.out.clone(),
        stop_after_blocks: a.stop_after_blocks,
    })
}

fn run_survey_cmd(format: Format, kind: survey::SurveyKind, a: &SurveyArgs) -> doubling::Result<i32> {
    let cfg = survey_config(kind, a)?;
    let outcome = survey::run_survey(&cfg)?;
    let violations: u64 = outcome.totals.values().map(|c| c.violations).sum();
    let totals: Value = outcome
        .totals
        .iter()
        .map(|(p, c)| (p.to_string(), serde_json::to_value(c).unwrap()))
        .collect::<serde_json::Map<_, _>>()
        .into();
    emit(
        format,
        json!({"survey": cfg.hashable_json(), "jobs": cfg.jobs, "out": cfg.out}),
        json!({"complete": outcome.complete, "violations": violations, "totals": totals}),
        format!(
            "survey {}: {} violation(s), report at {}",
            if outcome.complete { "complete" } else { "interrupted (checkpointed)" },
            violations,
            cfg.out.display()
        ),
    );
    Ok(if violations > 0 { 2 } else { 0 })
}

fn run_check(format: Format, c: &Command) -> doubling::Result<i32> {
    let Command::Check { id, set, set2, j, t, c0, c1, greedy } = c else { unreachable!() };
    let config = json!({
        "check": id, "set": set, "set2": set2, "j": j, "t": t,
        "c0": c0, "c1": c1, "greedy": greedy,
    });
    let v = match id.as_str() {
        "conjecture" => theorems::conjecture_verdict(&residue(set)?)?.1,
        "cauchy-davenport" => {
            theorems::cauchy_davenport_check(&residue(set)?, &residue(&need(set2.clone(), "--set2")?)?)?
        }
        "rectifiable-pair" => {
            ap::rectifiable_pair(&residue(set)?, &residue(&need(set2.clone(), "--set2")?)?)?
        }
        "freiman-3k4-int" => theorems::freiman_3k4_int(&IntSet::parse(set)?)?,
        "lev-smelianski" => theorems::lev_smelianski_check(
            &IntSet::parse(set)?,
            &IntSet::parse(&need(set2.clone(), "--set2")?)?,
        ),
        "blr" => theorems::blr_check(&residue(set)?)?,
        "plunnecke" | "plunnecke-int" => {
            let mode = if *greedy {
                theorems::PlunneckeMode::Greedy
            } else {
                theorems::PlunneckeMode::Exhaustive
            };
            let jj = j.unwrap_or(1);
            let t2 = need(set2.clone(), "--set2")?;
            if id == "plunnecke" {
                theorems::plunnecke_witness(&residue(set)?, &residue(&t2)?, jj, mode)?.verdict
            } else {
                theorems::plunnecke_witness_int(&IntSet::parse(set)?, &IntSet::parse(&t2)?, jj, mode)?
                    .verdict
            }
        }
        "density-lemma" => theorems::density_lemma_check(
            &residue(set)?,
            &residue(&need(set2.clone(), "--set2")?)?,
            need(*t, "--t")?,
        )?,
        "freiman-zp" => {
            let params = theorems::FreimanZpParams::new(
                parse_ratio(&need(c0.clone(), "--c0")?)?,
                parse_ratio(&need(c1.clone(), "--c1")?)?,
            )?;
            theorems::freiman_zp_hypotheses(&residue(set)?, params)?
        }
        other => return Err(Error::Usage(format!("unknown statement id {other:?}"))),
    };
    Ok(emit_verdict(format, config, &v))
}

fn dispatch(cli: &Cli) -> doubling::Result<i32> {
    let format = cli.format;
    match &cli.command {
        Command::Sumset { set, set2 } => {
            let (s, t) = (residue(set)?, residue(set2)?);
            let st = zp::sumset(&s, &t)?;
            emit(
                format,
                json!({"op": "sumset", "set": set, "set2": set2}),
                json!({"sum": zp::format_set_literal(&st), "card": st.card()}),
                zp::format_set_literal(&st),
            );
            Ok(0)
        }
        Command::Ell { set } => {
            let x = residue(set)?;
            let c = ap::ell(&x)?;
            emit(
                format,
                json!({"op": "ell", "set": set}),
                json!({
                    "ell": c.ell,
                    "d": c.witness.difference,
                    "start": c.witness.start,
                    "length": c.witness.length,
                    "rho": c.rho.map(|r| [*r.numer(), *r.denom()]),
                }),
                format!(
                    "ell = {} (start {}, difference {}, length {})",
                    c.ell, c.witness.start, c.witness.difference, c.witness.length
                ),
            );
            Ok(0)
        }
        Command::EllRel { set, set2 } => {
            let r = ap::ell_rel(&residue(set)?, &residue(set2)?)?;
            emit(
                format,
                json!({"op": "ell-rel", "set": set, "set2": set2}),
                json!({"len": r.len, "d": r.d}),
                format!("ell_X(Y) = {} at difference {}", r.len, r.d),
            );
            Ok(0)
        }
        Command::Density { set } => {
            let rho = ap::density(&residue(set)?)?;
            emit(
                format,
                json!({"op": "density", "set": set}),
                json!({"rho": [*rho.numer(), *rho.denom()]}),
                format!("rho = {}/{}", rho.numer(), rho.denom()),
            );
            Ok(0)
        }
        Command::Kappa { set, k, mode, cap } => {
            let mode = match (mode.as_str(), cap) {
                ("exhaustive", None) => atoms::SearchMode::Exhaustive,
                ("bounded", Some(c)) => atoms::SearchMode::Bounded(*c),
                ("bounded", None) => {
                    return Err(Error::Usage("bounded mode requires --cap".into()))
                }
                _ => return Err(Error::Usage("--mode must be exhaustive or bounded".into())),
            };
            let r = atoms::kappa_report(&residue(set)?, *k, mode)?;
            let text = match r.kappa {
                Some(kappa) => format!(
                    "kappa_{k} = {kappa}; {} atom class(es) of size {}, {} fragment(s)",
                    r.atoms.len(),
                    r.atom_card.unwrap(),
                    r.fragments_sampled
                ),
                None => format!("not {k}-separable"),
            };
            emit(format, json!({"op": "kappa", "set": set, "k": k, "cap": cap}), r.to_json(), text);
            Ok(0)
        }
        c @ Command::Check { .. } => run_check(format, c),
        Command::Survey { kind } => match kind {
            SurveyCommand::Conjecture(a) => {
                run_survey_cmd(format, survey::SurveyKind::Conjecture, a)
            }
            SurveyCommand::AtomLemmas(a) => {
                let k_max = need(a.k_max, "--k-max")?;
                run_survey_cmd(format, survey::SurveyKind::AtomLemmas { k_max }, a)
            }
            SurveyCommand::Hunt(a) => run_survey_cmd(format, survey::SurveyKind::Hunt, a),
        },
        Command::Hunt(a) => run_survey_cmd(format, survey::SurveyKind::Hunt, a),
        Command::Extremal { p, m } => {
            let inst = survey::extremal_family(*p, *m)?;
            emit(
                format,
                json!({"op": "extremal", "p": p, "m": m}),
                inst.to_json(),
                format!(
                    "S = {} |2S| = {} ell(S) = {}",
                    zp::format_set_literal(&inst.set),
                    inst.card_two_s,
                    inst.ell_s
                ),
            );
            Ok(0)
        }
        Command::Audit { item, precision } => {
            let items = match item {
                Some(id) => vec![audit::audit_item(id, *precision)
                    .ok_or_else(|| Error::Usage(format!("unknown audit item {id:?}")))?],
                None => audit::audit_all(*precision),
            };
            let any_fail = items.iter().any(|i| i.status != doubling::verdict::Status::Pass);
            let rows: Vec<Value> = items.iter().map(|i| i.to_json()).collect();
            let text = items
                .iter()
                .map(|i| {
                    format!(
                        "{:28} {:?} margin {} {:+.3e}",
                        i.id,
                        i.status,
                        match i.margin {
                            audit::Margin::Exact(_) => "exact",
                            audit::Margin::LowerBound(_) => ">=",
                        },
                        i.margin.value().numer().to_string().parse::<f64>().unwrap_or(f64::NAN)
                            / i.margin.value().denom().to_string().parse::<f64>().unwrap_or(f64::NAN),
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            emit(
                format,
                json!({"op": "audit", "item": item, "precision": precision}),
                Value::Array(rows),
                text,
            );
            Ok(if any_fail { 2 } else { 0 })
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version print to stdout with success
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) => 4,
                Error::Resource(_) | Error::Io(_) => 5,
            }
        }
    };
    std::process::exit(code);
}
