//! Command-line front end: validate instances, decide and construct
//! completions, evaluate the published criteria, generate squares, and
//! run randomized equivalence audits.
//!
//! Machine-readable JSON goes to stdout, human summaries to stderr.
//! Exit codes: 0 success/pass, 1 infeasible/fail/disagreement, 2 input
//! error, 3 size guard exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use rho_latin::audit::{run_audit, AuditConfig};
use rho_latin::complete::{complete, generate_square, reverify_certificate, CompleteOutcome};
use rho_latin::conditions::{
    corollary_checks, hall_conditions, ryser_theorem_check, ConditionError, CorollaryKind,
    TheoremCert, Verdict,
};
use rho_latin::factor::{find_theta, FactorOutcome, SubsetCertificate, ThetaNode};
use rho_latin::guards::Guards;
use rho_latin::model::{Rectangle, RhoProfile, Square};
use rho_latin::oracle::{GenMode, InstanceParams};

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_GUARD: u8 = 3;

#[derive(Parser)]
#[command(
    name = "rholatin",
    about = "Decide, construct and audit symbol-budgeted latin completions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an instance file and print its derived statistics.
    Validate { path: PathBuf },
    /// Complete an instance to a full square, or emit a certificate.
    Complete {
        path: PathBuf,
        /// Write the square (or certificate) JSON here as well.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Evaluate one of the published criteria on an instance.
    Check {
        path: PathBuf,
        #[arg(long)]
        theorem: Theorem,
    },
    /// Generate a square with the prescribed symbol counts.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Comma-separated budgets, e.g. 3,2,2,2.
        #[arg(long)]
        rho: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Sweep seeded random instances through the flow decision, the
    /// brute-force oracle and the condition checkers.
    Audit {
        /// Seed range, e.g. 0..500 (end exclusive).
        #[arg(long, default_value = "0..100")]
        seeds: String,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = Mode::Arbitrary)]
        mode: Mode,
        /// Write the per-instance log here.
        #[arg(long)]
        log_file: Option<PathBuf>,
        /// Run the sweep on one thread.
        #[arg(long)]
        sequential: bool,
        /// Skip the condition checkers (flow vs oracle only).
        #[arg(long)]
        no_conditions: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    /// The per-symbol counting bound.
    Necessary,
    /// Full-width criterion: bound plus six column/symbol conditions.
    Hall,
    /// General criterion over fitting sequences.
    Ryser,
    /// Criterion under the small-deficit hypothesis.
    Cor52,
    /// Criterion under the high-occupancy hypothesis.
    Cor53,
    /// Unconditional completion under both hypotheses.
    Cor54,
    /// Transfer-subgraph flow feasibility.
    Flow,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Completable,
    Arbitrary,
}

/// On-disk instance schema. Squares use the same layout with `r = s = n`.
#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    n: usize,
    k: usize,
    rho: Vec<usize>,
    r: usize,
    s: usize,
    grid: Vec<Vec<usize>>,
}

fn load_instance(path: &PathBuf) -> Result<Rectangle, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {path:?}: {e}"))?;
    let doc: InstanceDoc =
        serde_json::from_str(&text).map_err(|e| format!("invalid instance JSON: {e}"))?;
    let profile = RhoProfile::new(doc.n, doc.k, doc.rho).map_err(|e| e.to_string())?;
    if doc.grid.len() != doc.r || doc.grid.iter().any(|row| row.len() != doc.s) {
        return Err(format!(
            "BadDimensions: grid is {}x{} but header says {}x{}",
            doc.grid.len(),
            doc.grid.first().map_or(0, |row| row.len()),
            doc.r,
            doc.s
        ));
    }
    Rectangle::new(doc.grid, profile).map_err(|e| e.to_string())
}

fn square_doc(square: &Square) -> InstanceDoc {
    let p = square.profile();
    InstanceDoc {
        n: p.n(),
        k: p.k(),
        rho: p.rho().to_vec(),
        r: p.n(),
        s: p.n(),
        grid: square.grid().to_vec(),
    }
}

fn emit_value(value: &Value, emit: &Option<PathBuf>) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    println!("{text}");
    if let Some(path) = emit {
        fs::write(path, format!("{text}\n")).map_err(|e| format!("cannot write {path:?}: {e}"))?;
    }
    Ok(())
}

fn input_error(message: &str) -> u8 {
    let payload = json!({ "error": message });
    println!("{}", serde_json::to_string_pretty(&payload).unwrap());
    eprintln!("error: {message}");
    EXIT_INPUT
}

fn theta_node_json(node: &ThetaNode) -> Value {
    match node {
        ThetaNode::Source => json!("source"),
        ThetaNode::Sink => json!("sink"),
        ThetaNode::Row(i) => json!(format!("row:{i}")),
        ThetaNode::Col(j) => json!(format!("col:{j}")),
        ThetaNode::XPort(sym) => json!(format!("xport:{sym}")),
        ThetaNode::YPort(sym) => json!(format!("yport:{sym}")),
        ThetaNode::Merge(sym) => json!(format!("merge:{sym}")),
    }
}

fn certificate_json(cert: &SubsetCertificate) -> Value {
    let (lhs, rhs) = cert.sides();
    let mut body = json!({
        "family": cert.family(),
        "lhs": lhs,
        "rhs": rhs,
    });
    let extra: Value = match cert {
        SubsetCertificate::OreBalance { .. } => json!({}),
        SubsetCertificate::OrePair { a, b, .. } => json!({ "a": a, "b": b }),
        SubsetCertificate::OreMinSum { a, .. } | SubsetCertificate::OreComplement { a, .. } => {
            json!({ "a": a })
        }
        SubsetCertificate::GfNeighborhood { side, a, .. } => {
            json!({ "side": format!("{side:?}").to_lowercase(), "a": a })
        }
        SubsetCertificate::GfMonus {
            a_left, a_right, ..
        } => json!({ "a_left": a_left, "a_right": a_right }),
        SubsetCertificate::Gf51 { g_side, a, b, .. } => {
            json!({ "g_side": format!("{g_side:?}").to_lowercase(), "a": a, "b": b })
        }
        SubsetCertificate::NecessaryBound { symbol, .. }
        | SubsetCertificate::HallDeficit { symbol, .. } => json!({ "symbol": symbol }),
        SubsetCertificate::ThetaCut { members, .. } => json!({
            "members": members.iter().map(theta_node_json).collect::<Vec<_>>(),
        }),
    };
    if let (Some(map), Some(extra_map)) = (body.as_object_mut(), extra.as_object()) {
        for (key, value) in extra_map {
            map.insert(key.clone(), value.clone());
        }
    }
    body
}

fn theorem_cert_json(cert: &TheoremCert) -> Value {
    json!({
        "condition": cert.condition,
        "rows": cert.rows,
        "cols": cert.cols,
        "symbols": cert.symbols,
        "lhs": cert.lhs,
        "rhs": cert.rhs,
    })
}

fn verdict_json(v: &Verdict) -> Value {
    json!({
        "holds": v.holds,
        "certificate": v.certificate.as_ref().map(theorem_cert_json),
    })
}

fn cmd_validate(path: PathBuf) -> u8 {
    let rect = match load_instance(&path) {
        Ok(rect) => rect,
        Err(message) => return input_error(&message),
    };
    let p = rect.profile();
    let k = p.k();
    let bound = rect.necessary_bound();
    let sets = rect.p_sets();
    let rows_missing: Vec<usize> = (1..=k).map(|sym| rect.r() - rect.e_of(sym)).collect();
    let cols_missing: Vec<usize> = (1..=k).map(|sym| rect.s() - rect.e_of(sym)).collect();
    let report = json!({
        "valid": true,
        "n": p.n(),
        "k": k,
        "r": rect.r(),
        "s": rect.s(),
        "e": rect.e(),
        "mu_summary": {
            "symbols_missing_per_row": k - rect.s(),
            "symbols_missing_per_col": k - rect.r(),
            "rows_missing_symbol": rows_missing,
            "cols_missing_symbol": cols_missing,
        },
        "p_r": sets.p_r,
        "p_s": sets.p_s,
        "necessary_bound": {
            "holds": bound.holds(),
            "violators": bound.violators.iter().map(|v| json!({
                "symbol": v.symbol,
                "count": v.count,
                "required": v.required,
            })).collect::<Vec<_>>(),
        },
    });
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    eprintln!(
        "valid {}x{} instance over {} symbols (order {})",
        rect.r(),
        rect.s(),
        k,
        p.n()
    );
    EXIT_OK
}

fn cmd_complete(path: PathBuf, emit: Option<PathBuf>) -> u8 {
    let rect = match load_instance(&path) {
        Ok(rect) => rect,
        Err(message) => return input_error(&message),
    };
    match complete(&rect) {
        CompleteOutcome::Square(square) => {
            let doc = serde_json::to_value(square_doc(&square)).unwrap();
            if let Err(message) = emit_value(&doc, &emit) {
                return input_error(&message);
            }
            eprintln!("completed to order {}", square.n());
            EXIT_OK
        }
        CompleteOutcome::Infeasible(cert) => {
            let payload = json!({
                "infeasible": true,
                "certificate": certificate_json(&cert),
                "reverified": reverify_certificate(&rect, &cert),
            });
            if let Err(message) = emit_value(&payload, &emit) {
                return input_error(&message);
            }
            eprintln!("infeasible: {} certificate", cert.family());
            EXIT_FAIL
        }
    }
}

fn corollary_json(rect: &Rectangle, kind: CorollaryKind, name: &str, guards: &Guards) -> Result<(Value, u8), ConditionError> {
    let report = corollary_checks(rect, kind, guards)?;
    let verdict = report.verdict();
    let payload = json!({
        "theorem": name,
        "hypothesis": {
            "holds": report.hypothesis_holds,
            "violators": report.hypothesis_violators,
        },
        "conditions": report.conditions.iter().map(|(cond_name, v)| json!({
            "name": cond_name,
            "holds": v.holds,
            "certificate": v.certificate.as_ref().map(theorem_cert_json),
        })).collect::<Vec<_>>(),
        "holds": verdict,
    });
    let code = if verdict == Some(true) { EXIT_OK } else { EXIT_FAIL };
    Ok((payload, code))
}

fn cmd_check(path: PathBuf, theorem: Theorem, guards: &Guards) -> u8 {
    let rect = match load_instance(&path) {
        Ok(rect) => rect,
        Err(message) => return input_error(&message),
    };
    let evaluated: Result<(Value, u8), ConditionError> = match theorem {
        Theorem::Necessary => {
            let bound = rect.necessary_bound();
            let payload = json!({
                "theorem": "necessary",
                "holds": bound.holds(),
                "violators": bound.violators.iter().map(|v| json!({
                    "symbol": v.symbol,
                    "count": v.count,
                    "required": v.required,
                })).collect::<Vec<_>>(),
            });
            let code = if bound.holds() { EXIT_OK } else { EXIT_FAIL };
            Ok((payload, code))
        }
        Theorem::Flow => {
            let outcome = find_theta(&rect);
            let payload = json!({
                "theorem": "flow",
                "holds": outcome.is_feasible(),
                "certificate": match &outcome {
                    FactorOutcome::Factor(_) => Value::Null,
                    FactorOutcome::Infeasible(cert) => certificate_json(cert),
                },
            });
            let code = if outcome.is_feasible() { EXIT_OK } else { EXIT_FAIL };
            Ok((payload, code))
        }
        Theorem::Hall => match hall_conditions(&rect, guards) {
            Ok(report) => {
                let payload = json!({
                    "theorem": "hall",
                    "bound": verdict_json(&report.bound),
                    "conditions": report.conditions.iter().map(verdict_json).collect::<Vec<_>>(),
                    "conditions_agree": report.conditions_agree(),
                    "holds": report.verdict(),
                });
                let code = if report.verdict() { EXIT_OK } else { EXIT_FAIL };
                Ok((payload, code))
            }
            Err(e) => Err(e),
        },
        Theorem::Ryser => match ryser_theorem_check(&rect, guards) {
            Ok(report) => {
                let payload = json!({
                    "theorem": "ryser",
                    "holds": report.completable,
                    "sequences_tested": report.sequences_tested,
                    "audited": report.audited,
                    "row_groups_agree": report.row_groups_agree,
                    "col_groups_agree": report.col_groups_agree,
                    "col3_printed_disagreements": report.col3_printed_disagreements,
                    "holds_printed_reading": report.completable_printed_reading,
                    "witness": report.witness.as_ref().map(|fit| json!({
                        "a": fit.a,
                        "b": fit.b,
                    })),
                });
                let code = if report.completable { EXIT_OK } else { EXIT_FAIL };
                Ok((payload, code))
            }
            Err(e) => Err(e),
        },
        Theorem::Cor52 => corollary_json(&rect, CorollaryKind::ManySymbols, "cor52", guards),
        Theorem::Cor53 => corollary_json(&rect, CorollaryKind::FewSymbols, "cor53", guards),
        Theorem::Cor54 => corollary_json(&rect, CorollaryKind::Unconditional, "cor54", guards),
    };
    match evaluated {
        Ok((payload, code)) => {
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
            eprintln!(
                "check {}",
                if code == EXIT_OK { "passed" } else { "failed" }
            );
            code
        }
        Err(ConditionError::TooLarge { detail }) => {
            let payload = json!({ "error": format!("TooLarge: {detail}") });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
            eprintln!("guard exceeded: {detail}");
            EXIT_GUARD
        }
        Err(ConditionError::Precondition { detail }) => {
            input_error(&format!("PreconditionViolation: {detail}"))
        }
    }
}

fn cmd_generate(n: usize, k: usize, rho: &str, seed: u64, emit: Option<PathBuf>) -> u8 {
    let parsed: Result<Vec<usize>, _> = rho.split(',').map(|tok| tok.trim().parse()).collect();
    let rho = match parsed {
        Ok(v) => v,
        Err(_) => return input_error("rho must be a comma-separated list of integers"),
    };
    let profile = match RhoProfile::new(n, k, rho) {
        Ok(p) => p,
        Err(e) => return input_error(&e.to_string()),
    };
    let square = generate_square(&profile, seed);
    let doc = serde_json::to_value(square_doc(&square)).unwrap();
    if let Err(message) = emit_value(&doc, &emit) {
        return input_error(&message);
    }
    eprintln!("generated order-{} square with seed {seed}", square.n());
    EXIT_OK
}

fn parse_seed_range(text: &str) -> Option<(u64, u64)> {
    let (lo, hi) = text.split_once("..")?;
    let lo: u64 = lo.trim().parse().ok()?;
    let hi: u64 = hi.trim().parse().ok()?;
    (lo <= hi).then_some((lo, hi))
}

#[allow(clippy::too_many_arguments)]
fn cmd_audit(
    seeds: &str,
    max_n: usize,
    mode: Mode,
    log_file: Option<PathBuf>,
    sequential: bool,
    no_conditions: bool,
    guards: &Guards,
) -> u8 {
    let Some((seed_start, seed_end)) = parse_seed_range(seeds) else {
        return input_error("seeds must look like A..B with A <= B");
    };
    if max_n < 2 {
        return input_error("max-n must be at least 2");
    }
    if max_n > guards.oracle_n {
        let payload = json!({
            "error": format!(
                "TooLarge: max-n {max_n} exceeds the oracle guard {}",
                guards.oracle_n
            ),
        });
        println!("{}", serde_json::to_string_pretty(&payload).unwrap());
        eprintln!("guard exceeded: the oracle cannot serve as ground truth above n = {}", guards.oracle_n);
        return EXIT_GUARD;
    }
    let gen_mode = match mode {
        Mode::Completable => GenMode::Completable,
        Mode::Arbitrary => GenMode::Arbitrary,
    };
    let config = AuditConfig {
        seed_start,
        seed_end,
        params: InstanceParams::new((2, max_n), (2, usize::MAX), gen_mode),
        check_conditions: !no_conditions,
        parallel: !sequential,
    };
    let report = run_audit(&config, guards);
    let log = report.render_log(&config);
    if let Some(path) = &log_file {
        if let Err(e) = fs::write(path, &log) {
            return input_error(&format!("cannot write {path:?}: {e}"));
        }
    }
    let summary = json!({
        "seeds": format!("{seed_start}..{seed_end}"),
        "instances": report.lines.len(),
        "all_agree": report.all_agree(),
        "disagreements": report.disagreements,
        "log_file": log_file.as_ref().map(|p| p.display().to_string()),
    });
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    if report.all_agree() {
        eprintln!("audit: {} instances, all verdicts agree", report.lines.len());
        EXIT_OK
    } else {
        for seed in &report.disagreements {
            eprintln!("disagreement at seed {seed} (rerun with --seeds {seed}..{})", seed + 1);
        }
        EXIT_FAIL
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let guards = Guards::from_env();
    let code = match cli.command {
        Command::Validate { path } => cmd_validate(path),
        Command::Complete { path, emit } => cmd_complete(path, emit),
        Command::Check { path, theorem } => cmd_check(path, theorem, &guards),
        Command::Generate {
            n,
            k,
            rho,
            seed,
            emit,
        } => cmd_generate(n, k, &rho, seed, emit),
        Command::Audit {
            seeds,
            max_n,
            mode,
            log_file,
            sequential,
            no_conditions,
        } => cmd_audit(
            &seeds,
            max_n,
            mode,
            log_file,
            sequential,
            no_conditions,
            &guards,
        ),
    };
    ExitCode::from(code)
}
