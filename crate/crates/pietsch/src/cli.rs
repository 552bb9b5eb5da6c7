//! Command-line front end: JSON in, JSON (or text) out, deterministic for a
//! fixed seed. Exit codes: 0 success, 1 domain/parse errors (as structured
//! JSON on stdout), 2 verification failures.

use crate::deltanorm::{self, DeltaNorm, NormValue};
use crate::dyadic;
use crate::error::{Error, Result};
use crate::functionals::{self, EvalResult};
use crate::json;
use crate::majorize;
use crate::opmodel::{Operator, TraceValue};
use crate::rat::{format_rat, parse_rat};
use crate::sample::Sampler;
use crate::transfer;
use crate::verify;
use clap::{Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "pietsch", version, about = "Exact Calkin-Pietsch correspondence toolkit")]
struct Cli {
    /// Seed for randomized suites and audits.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Trial count override for randomized suites.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Numeric-tier comparison tolerance (informational; the verification
    /// suites pin the documented 1e-9 / 1e-12 values).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Tail truncation depth for brute-force oracles (informational; the
    /// exact checkers certify their own depths).
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// Output format.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decreasing rearrangement of a step function.
    Rearrange { input: String },
    /// Pietsch map D: sequence -> step function.
    Dmap { input: String },
    /// Dyadic sampling Phi of a step function.
    Phi { input: String },
    /// Dyadic cell averages Phi_av of a step function.
    Phiav { input: String },
    /// Ordering numbers of a sequence.
    Omap { input: String },
    /// Right shift S_+^k (left for negative k on the full line).
    Shift {
        input: String,
        #[arg(long, default_value_t = 1)]
        k: i64,
    },
    /// Singular value function of an operator.
    Mu { input: String },
    /// Trace of an operator.
    Trace { input: String },
    /// Uniform majorization check: is Y majorized by X?
    Majorize {
        y: String,
        x: String,
        #[arg(long, default_value_t = 1)]
        lambda: u64,
    },
    /// Canonical dyadic decomposition of an operator.
    DyadicDecompose { input: String },
    /// Re-derives the invariants of a dyadic representation.
    DyadicValidate { input: String },
    /// Singular trace of an operator under a functional.
    TraceEval {
        input: String,
        #[arg(long)]
        theta: String,
    },
    /// Support/normalisation classification of a functional.
    Classify {
        #[arg(long)]
        theta: String,
    },
    /// Delta-norm of a function, sequence, or operator.
    Norm {
        input: String,
        #[arg(long = "N")]
        n: String,
        #[arg(long)]
        level: String,
    },
    /// Randomized audit of the declared norm constants.
    NormAudit {
        #[arg(long = "N")]
        n: String,
    },
    /// Runs a verification suite (or `all`).
    Verify { suite: String },
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        use std::io::Read;
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))
    }
}

fn load_seq(path: &str) -> Result<crate::seq::DyadicSequence> {
    json::sequence_from_dto(&json::parse_json(&read_input(path)?)?)
}

fn load_step(path: &str) -> Result<crate::step::StepFunction> {
    json::step_from_dto(&json::parse_json(&read_input(path)?)?)
}

fn load_op(path: &str) -> Result<Operator> {
    json::operator_from_dto(&json::parse_json(&read_input(path)?)?)
}

#[derive(Serialize)]
struct ValueOut {
    value: String,
}

#[derive(Serialize)]
struct ErrorOut {
    error: String,
}

fn norm_by_name(name: &str) -> Result<DeltaNorm> {
    match name {
        "l1" => Ok(DeltaNorm::l1()),
        "linf" => Ok(DeltaNorm::Linf),
        other => {
            if let Some(p) = other.strip_prefix("lp:") {
                DeltaNorm::lp(parse_rat(p).map_err(Error::Parse)?)
            } else {
                Err(Error::Parse(format!(
                    "unknown norm {other:?} (expected l1 | linf | lp:p)"
                )))
            }
        }
    }
}

fn norm_value_json(v: &NormValue) -> String {
    match v {
        NormValue::Exact(r) => format!("{{\"value\":\"{}\"}}", format_rat(r)),
        NormValue::Root { radicand, p } => format!(
            "{{\"value\":{:.17e},\"radicand\":\"{}\",\"root\":\"{}\"}}",
            v.approx(),
            format_rat(radicand),
            format_rat(p)
        ),
        NormValue::Approx(x) => format!("{{\"value\":{x:.17e}}}"),
        NormValue::Infinite => "{\"value\":\"inf\"}".to_string(),
    }
}

fn eval_result_json(v: &EvalResult) -> String {
    match v {
        EvalResult::Exact(r) => format!("{{\"value\":\"{}\"}}", format_rat(r)),
        EvalResult::Approx(x) => format!("{{\"value\":{x:.17e}}}"),
        EvalResult::OutsideDomain(why) => format!("{{\"outside_domain\":{why:?}}}"),
    }
}

/// Runs the CLI against an argument vector; returns (exit code, stdout).
pub fn run(args: &[String]) -> (i32, String) {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => return (1, format!("{e}")),
    };
    match dispatch(&cli) {
        Ok((code, out)) => (code, out),
        Err(e) => (
            1,
            json::to_json_string(&ErrorOut {
                error: format!("{e}"),
            }),
        ),
    }
}

fn dispatch(cli: &Cli) -> Result<(i32, String)> {
    let out = match &cli.cmd {
        Cmd::Rearrange { input } => {
            let f = load_step(input)?;
            json::to_json_string(&json::step_to_dto(&f.decreasing_rearrangement()?))
        }
        Cmd::Dmap { input } => {
            let x = load_seq(input)?;
            json::to_json_string(&json::step_to_dto(&transfer::pietsch_d(&x)))
        }
        Cmd::Phi { input } => {
            let f = load_step(input)?;
            json::to_json_string(&json::sequence_to_dto(&transfer::phi_sample(&f)))
        }
        Cmd::Phiav { input } => {
            let f = load_step(input)?;
            json::to_json_string(&json::sequence_to_dto(&transfer::phi_av(&f)?))
        }
        Cmd::Omap { input } => {
            let x = load_seq(input)?;
            json::to_json_string(&json::sequence_to_dto(&x.ordering_numbers()))
        }
        Cmd::Shift { input, k } => {
            let x = load_seq(input)?;
            json::to_json_string(&json::sequence_to_dto(&x.shift(*k)?))
        }
        Cmd::Mu { input } => {
            let x = load_op(input)?;
            json::to_json_string(&json::step_to_dto(&x.singular_value_function()?))
        }
        Cmd::Trace { input } => {
            let x = load_op(input)?;
            match x.trace() {
                TraceValue::Exact(v) => json::to_json_string(&ValueOut {
                    value: format_rat(&v),
                }),
                TraceValue::Approx(z) => {
                    format!("{{\"value\":{:.17e},\"imag\":{:.17e}}}", z.re, z.im)
                }
                TraceValue::PlusInf => "{\"value\":\"+inf\"}".to_string(),
                TraceValue::MinusInf => "{\"value\":\"-inf\"}".to_string(),
            }
        }
        Cmd::Majorize { y, x, lambda } => {
            let fy = load_op_or_step_mu(y)?;
            let fx = load_op_or_step_mu(x)?;
            let v = majorize::majorized_mu(&fy, &fx, *lambda)?;
            let witness = match &v.witness {
                None => "null".to_string(),
                Some((a, Some(b))) => format!(
                    "{{\"a\":\"{}\",\"b\":\"{}\"}}",
                    format_rat(a),
                    format_rat(b)
                ),
                Some((a, None)) => {
                    format!("{{\"a\":\"{}\",\"b\":\"inf\"}}", format_rat(a))
                }
            };
            format!(
                "{{\"majorized\":{},\"witness\":{},\"worst_margin\":\"{}\"}}",
                v.holds,
                witness,
                format_rat(&v.worst_margin)
            )
        }
        Cmd::DyadicDecompose { input } => {
            let x = load_op(input)?;
            json::to_json_string(&json::rep_to_dto(&dyadic::decompose(&x)?))
        }
        Cmd::DyadicValidate { input } => {
            let rep = json::rep_from_dto(&json::parse_json(&read_input(input)?)?)?;
            let report = dyadic::validate(&rep, None)?;
            let bounds: Vec<String> = report
                .support_bounds
                .iter()
                .map(|(k, tau, bound)| {
                    format!(
                        "{{\"k\":{k},\"tau_support\":\"{}\",\"bound\":\"{}\"}}",
                        format_rat(tau),
                        format_rat(bound)
                    )
                })
                .collect();
            format!(
                "{{\"support_ok\":{},\"sum_matches_subject\":{},\"residuals_match\":{},\"support_bounds\":[{}]}}",
                report.support_ok,
                report.sum_matches_subject,
                report.residuals_match,
                bounds.join(",")
            )
        }
        Cmd::TraceEval { input, theta } => {
            let x = load_op(input)?;
            let t = functionals::Theta::from_name(theta)?;
            let te = functionals::trace_eval(t, &x)?;
            if te.representation_dependent {
                let inner = eval_result_json(&te.result);
                format!(
                    "{}",
                    inner.replacen('{', "{\"representation_dependent\":true,", 1)
                )
            } else {
                eval_result_json(&te.result)
            }
        }
        Cmd::Classify { theta } => {
            let t = functionals::Theta::from_name(theta)?;
            let c = functionals::classify(t);
            let probes = |v: &Vec<EvalResult>| {
                v.iter()
                    .map(|e| eval_result_json(e))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            format!(
                "{{\"theta\":\"{}\",\"supported_at_plus_inf\":{},\"supported_at_minus_inf\":{},\"positive\":{},\"chi_z\":{},\"normalised\":{},\"below_probes\":[{}],\"above_probes\":[{}]}}",
                t.name(),
                c.supported_at_plus_inf,
                c.supported_at_minus_inf,
                c.positive,
                eval_result_json(&c.chi_z),
                match c.normalised {
                    Some(b) => b.to_string(),
                    None => "null".to_string(),
                },
                probes(&c.below_probes),
                probes(&c.above_probes)
            )
        }
        Cmd::Norm { input, n, level } => {
            let norm = norm_by_name(n)?;
            let v = match level.as_str() {
                "fn" => deltanorm::norm_fn(&norm, &load_step(input)?),
                "seq" => deltanorm::norm_seq(&norm, &load_seq(input)?),
                "op" => deltanorm::norm_op(&norm, &load_op(input)?)?,
                other => {
                    return Err(Error::Parse(format!(
                        "unknown level {other:?} (expected fn | seq | op)"
                    )))
                }
            };
            norm_value_json(&v)
        }
        Cmd::NormAudit { n } => {
            let norm = norm_by_name(n)?;
            let trials = cli.trials.unwrap_or(100);
            let mut smp = Sampler::new(cli.seed);
            let mut fn_pairs = Vec::new();
            let mut seqs = Vec::new();
            for _ in 0..trials {
                let a = smp.finite_sequence();
                let b = smp.finite_sequence();
                fn_pairs.push((transfer::pietsch_d(&a), transfer::pietsch_d(&b)));
                seqs.push(smp.finite_sequence());
            }
            let rep = deltanorm::constants_report(&norm, &fn_pairs, &seqs)?;
            format!(
                "{{\"quasi_triangle_fn\":{:.17e},\"quasi_triangle_seq\":{:.17e},\"shift_ratio\":{:.17e},\"dilation_ratios\":[{:.17e},{:.17e},{:.17e},{:.17e}],\"trials\":{},\"declared_constant\":\"{}\"}}",
                rep.quasi_triangle_fn,
                rep.quasi_triangle_seq,
                rep.shift_ratio,
                rep.dilation_ratios[0],
                rep.dilation_ratios[1],
                rep.dilation_ratios[2],
                rep.dilation_ratios[3],
                rep.trials,
                format_rat(&norm.quasi_constant())
            )
        }
        Cmd::Verify { suite } => {
            let reports = if suite == "all" {
                verify::run_all(cli.trials, cli.seed)?
            } else {
                vec![verify::run_suite(suite, cli.trials, cli.seed)?]
            };
            let all_passed = reports.iter().all(|r| r.passed);
            let out = if cli.format == "text" {
                verify::render_text(&reports)
            } else {
                json::to_json_string(&reports)
            };
            return Ok((if all_passed { 0 } else { 2 }, out));
        }
    };
    Ok((0, out))
}

/// Majorization inputs may be operators or raw step functions; either way
/// the comparison runs on the rearrangement.
fn load_op_or_step_mu(path: &str) -> Result<crate::step::StepFunction> {
    let text = read_input(path)?;
    if let Ok(dto) = json::parse_json::<json::OperatorDto>(&text) {
        if let Ok(op) = json::operator_from_dto(&dto) {
            return op.singular_value_function();
        }
    }
    let f = json::step_from_dto(&json::parse_json(&text)?)?;
    f.decreasing_rearrangement()
}
