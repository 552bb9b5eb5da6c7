//! End-to-end verification suites: every identity and inequality the library
//! is built around, run on seeded random data with per-case reporting.
//!
//! Suite names and default trial counts follow the acceptance checklist; the
//! `all` runner executes every suite in a fixed order with per-suite derived
//! seeds, so a fixed seed reproduces byte-identical reports.

use crate::deltanorm::{self, DeltaNorm};
use crate::dyadic;
use crate::error::{Error, Result};
use crate::functionals::{self, EvalResult, Theta};
use crate::json;
use crate::majorize;
use crate::opmodel::{BlockAlgebra, EmbedTarget, Operator};
use crate::rat::{pow2, rat_to_f64, Rat};
use crate::sample::Sampler;
use crate::seq::DyadicSequence;
use crate::step::{Ext, StepFunction};
use crate::transfer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub const SUITES: &[&str] = &[
    "order-rearrangement",
    "dphi-sandwich",
    "sum-rear",
    "majorization",
    "dyadic-bounds",
    "sum-reps",
    "trace-welldefined",
    "trace-linearity",
    "trace-symmetry",
    "tau-recovery",
    "roundtrip-corollary",
    "phi-av",
    "counterexample",
    "norm-transfer",
    "stable-sandwich",
    "constants",
];

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub checks: usize,
    pub failures: usize,
    pub passed: bool,
    /// First few failing cases, as structured JSON strings.
    pub sample_failures: Vec<String>,
    pub notes: Vec<String>,
}

struct Recorder {
    suite: String,
    trials: usize,
    checks: usize,
    failures: usize,
    sample_failures: Vec<String>,
    notes: Vec<String>,
}

impl Recorder {
    fn new(suite: &str, trials: usize) -> Self {
        Recorder {
            suite: suite.to_string(),
            trials,
            checks: 0,
            failures: 0,
            sample_failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.sample_failures.len() < 5 {
                self.sample_failures.push(detail());
            }
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            passed: self.failures == 0,
            suite: self.suite,
            trials: self.trials,
            checks: self.checks,
            failures: self.failures,
            sample_failures: self.sample_failures,
            notes: self.notes,
        }
    }
}

/// Default trial count per suite (the counts the acceptance checklist pins).
pub fn default_trials(suite: &str) -> usize {
    match suite {
        "order-rearrangement" | "dphi-sandwich" => 1000,
        "sum-rear" | "dyadic-bounds" | "tau-recovery" => 500,
        "majorization" | "norm-transfer" | "stable-sandwich" => 300,
        "sum-reps" | "trace-welldefined" | "trace-linearity" | "trace-symmetry"
        | "roundtrip-corollary" => 200,
        "phi-av" | "constants" => 100,
        "counterexample" => 1,
        _ => 100,
    }
}

fn suite_seed(base: u64, suite: &str) -> u64 {
    // stable per-suite stream: suites never shift each other's draws
    let mut h: u64 = 0xcbf29ce484222325;
    for b in suite.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    base ^ h
}

pub fn run_suite(suite: &str, trials: Option<usize>, seed: u64) -> Result<SuiteReport> {
    let n = trials.unwrap_or_else(|| default_trials(suite));
    let s = suite_seed(seed, suite);
    match suite {
        "order-rearrangement" => order_rearrangement(n, s),
        "dphi-sandwich" => dphi_sandwich(n, s),
        "sum-rear" => sum_rear(n, s),
        "majorization" => majorization(n, s),
        "dyadic-bounds" => dyadic_bounds(n, s),
        "sum-reps" => sum_reps_suite(n, s),
        "trace-welldefined" => trace_welldefined(n, s),
        "trace-linearity" => trace_linearity(n, s),
        "trace-symmetry" => trace_symmetry(n, s),
        "tau-recovery" => tau_recovery(n, s),
        "roundtrip-corollary" => roundtrip_corollary(n, s),
        "phi-av" => phi_av_suite(n, s),
        "counterexample" => counterexample_suite(),
        "norm-transfer" => norm_transfer(n, s),
        "stable-sandwich" => stable_sandwich(n, s),
        "constants" => constants_suite(n, s),
        _ => Err(Error::Parse(format!("unknown suite {suite:?}"))),
    }
}

pub fn run_all(trials: Option<usize>, seed: u64) -> Result<Vec<SuiteReport>> {
    SUITES
        .iter()
        .map(|s| run_suite(s, trials, seed))
        .collect()
}

fn seq_json(x: &DyadicSequence) -> String {
    json::to_json_string(&json::sequence_to_dto(x))
}

/// The stated identity `o_n(x) = (Dx)*(2^n)` for all window +- 8 samples.
/// The identity fails at exact-fit sampling points (where the level set
/// above the sampled value measures exactly `2^n`); each observed mismatch
/// is verified to be of that characterized form, and the always-true
/// interlacing `Phi(Dx) <= o(x) <= S_+ Phi(Dx)` is checked alongside.
fn order_rearrangement(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("order-rearrangement", trials);
    let mut smp = Sampler::new(seed);
    let mut identity_holds = 0usize;
    let mut exact_fit_points = 0usize;
    for _ in 0..trials {
        let x = smp.sequence();
        let o = x.ordering_numbers();
        let f = transfer::pietsch_d(&x);
        let phi = f.mu().phi();
        let mut mismatch_at: Option<i64> = None;
        for n in (x.lo() - 8)..=(x.hi() + 8) {
            let lhs = o.value_at(n);
            let rhs = phi.value_at(n);
            if lhs != rhs {
                mismatch_at.get_or_insert(n);
                exact_fit_points += 1;
                // the mismatch must be the characterized jump: the sample
                // sits strictly below o_n and its level set fills 2^n
                let characterized = rhs < lhs
                    && matches!(f.distribution(&rhs), Ext::Finite(d) if d <= pow2(n));
                if !characterized {
                    rec.check(false, || {
                        format!(
                            "{{\"uncharacterized_mismatch_at\":{n},\"x\":{}}}",
                            seq_json(&x)
                        )
                    });
                }
            }
        }
        // interlacing is exact and total
        let shifted = phi.shift(1)?;
        rec.check(phi.pointwise_le(&o), || {
            format!("{{\"interlacing_lower\":{}}}", seq_json(&x))
        });
        rec.check(o.pointwise_le(&shifted), || {
            format!("{{\"interlacing_upper\":{}}}", seq_json(&x))
        });
        // the criterion as stated: exact equality at every sample
        rec.check(mismatch_at.is_none(), || {
            format!(
                "{{\"identity_fails_at\":{},\"x\":{}}}",
                mismatch_at.unwrap(),
                seq_json(&x)
            )
        });
        if mismatch_at.is_none() {
            identity_holds += 1;
        }
    }
    rec.note(format!(
        "identity holds verbatim on {identity_holds}/{trials} sequences; every one of the \
         {exact_fit_points} mismatched samples is the characterized exact-fit jump \
         (level set measures exactly 2^n), where the right-continuous rearrangement \
         sample sits one step below the suffix supremum"
    ));
    rec.note(
        "the two-sided interlacing Phi(Dx) <= o(x) <= S+ Phi(Dx) held exactly on every trial",
    );
    Ok(rec.finish())
}

/// `(Dx)* <= D(o(x)) <= sigma_2 (Dx)*` sampled across cells, plus the exact
/// pointwise chain `f <= D Phi f <= sigma_2 f` for nonincreasing `f`.
fn dphi_sandwich(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("dphi-sandwich", trials);
    let mut smp = Sampler::new(seed);
    let half = Rat::new(1.into(), 2.into());
    for _ in 0..trials {
        // (a) sampled sandwich: on each cell [2^n, 2^{n+1}) the middle term
        // is constant and (Dx)* is nonincreasing, so the cell-wise checks at
        // the endpoints and midpoint decide the whole cell
        let x = smp.sequence();
        let o = x.ordering_numbers();
        let d_o = transfer::pietsch_d(&o);
        let mv = transfer::pietsch_d(&x).mu();
        let mut ok = true;
        for n in (x.lo() - 10)..=(x.hi() + 10) {
            for t in [pow2(n), pow2(n) * Rat::new(3.into(), 2.into())] {
                let lower = mv.sample(&t);
                let mid = d_o.value_at(&t);
                let upper = mv.sample(&(&t * &half));
                if !(lower <= mid && mid <= upper) {
                    ok = false;
                }
            }
        }
        rec.check(ok, || format!("{{\"mu_sandwich\":{}}}", seq_json(&x)));

        // (b) exact chain for nonincreasing f
        let y = smp.nonincreasing_sequence();
        let f = transfer::pietsch_d(&y);
        let d_phi = transfer::pietsch_d(&transfer::phi_sample(&f));
        let sigma2 = f.dilate(&Rat::from_integer(2.into()))?;
        rec.check(f.pointwise_le(&d_phi), || {
            format!("{{\"f_le_dphi\":{}}}", seq_json(&y))
        });
        rec.check(d_phi.pointwise_le(&sigma2), || {
            format!("{{\"dphi_le_sigma2\":{}}}", seq_json(&y))
        });
    }
    Ok(rec.finish())
}

/// `mu(2t, X+Y) <= mu(t, X) + mu(t, Y)` at every discontinuity, exact on
/// diagonal pairs and within 1e-9 on dense pairs.
fn sum_rear(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("sum-rear", trials);
    let mut smp = Sampler::new(seed);
    let tol = Rat::new(1.into(), 1_000_000_000.into());
    // each trial checks one numeric-tier pair and one exact diagonal pair
    for trial in 0..2 * trials {
        let dense = trial % 2 == 1;
        let (x, y) = if dense {
            smp.dense_pair()
        } else {
            smp.diagonal_pair()
        };
        let z = x.add(&y)?;
        let mu_x = x.singular_value_function()?;
        let mu_y = y.singular_value_function()?;
        let mu_z = z.singular_value_function()?;
        // candidate t: every discontinuity of the three sides (as functions
        // of t), plus a probe below the first one
        let mut cands: Vec<Rat> = Vec::new();
        for bp in mu_x.breakpoints().iter().chain(mu_y.breakpoints()) {
            if bp.is_positive() {
                cands.push(bp.clone());
            }
        }
        for bp in mu_z.breakpoints() {
            if bp.is_positive() {
                cands.push(bp / Rat::from_integer(2.into()));
            }
        }
        cands.push(Rat::new(1.into(), 128.into()));
        cands.sort();
        cands.dedup();
        let mut ok = true;
        for t in &cands {
            let lhs = mu_z.value_at(&(t * Rat::from_integer(2.into())));
            let rhs = mu_x.value_at(t) + mu_y.value_at(t);
            let pass = if dense { lhs <= &rhs + &tol } else { lhs <= rhs };
            if !pass {
                ok = false;
            }
        }
        rec.check(ok, || {
            format!(
                "{{\"sum_rear_violation\":{},\"dense\":{}}}",
                json::to_json_string(&json::operator_to_dto(&x)),
                dense
            )
        });
    }
    Ok(rec.finish())
}

/// Exact checker versus the 1/64-grid oracle, plus the finite series bound
/// with `lambda = 2` for up to four parts.
fn majorization(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("majorization", trials);
    let mut smp = Sampler::new(seed);
    let step = Rat::new(1.into(), 64.into());
    for _ in 0..trials {
        let (y, x) = smp.diagonal_pair();
        let mu_y = y.singular_value_function()?;
        let mu_x = x.singular_value_function()?;
        let lambda = smp.usize_in(1, 3) as u64;
        let exact = majorize::majorized_mu(&mu_y, &mu_x, lambda)?;
        let support = |f: &StepFunction| f.breakpoints().last().unwrap().clone();
        let span = (support(&mu_y).max(support(&mu_x)) + Rat::one())
            * Rat::from_integer(2.into());
        let grid = majorize::grid_oracle(&mu_y, &mu_x, lambda, &step, &span);
        let consistent = match (&exact.holds, &grid) {
            (true, None) => true,
            (true, Some(_)) => false, // grid contradicts the exact verdict
            (false, Some((a, b))) => {
                // the grid's violation must be real
                let la = a * Rat::from_integer((lambda as i64).into());
                let lhs = mu_y.integrate(&la, Some(b));
                let rhs = mu_x.integrate(a, Some(b));
                matches!((lhs, rhs), (Ext::Finite(l), Ext::Finite(r)) if l > r)
            }
            // the grid may miss a violation between its points
            (false, None) => true,
        };
        rec.check(consistent, || {
            format!(
                "{{\"grid_disagrees\":{},\"lambda\":{lambda}}}",
                json::to_json_string(&json::operator_to_dto(&y))
            )
        });
    }
    // finite form of the series majorization bound
    let series_trials = (trials * 2 / 3).max(1);
    for _ in 0..series_trials {
        let k = smp.usize_in(1, 4);
        let algebra = smp.algebra();
        let parts: Vec<Operator> = (0..k)
            .map(|_| {
                let entries = algebra
                    .blocks
                    .iter()
                    .map(|b| (0..b.dim).map(|_| smp.rat_in(4, 16)).collect())
                    .collect();
                Operator::diagonal(algebra.clone(), entries).expect("valid diagonal")
            })
            .collect();
        let report = majorize::series_majorization_check(&parts)?;
        rec.check(report.verdict.holds, || {
            format!("{{\"series_bound_failed_with_terms\":{k}}}")
        });
    }
    rec.note(format!(
        "series bound checked on {series_trials} random part lists (K <= 4, lambda = 2)"
    ));
    Ok(rec.finish())
}

/// Support bounds, residual norms, and the worked four-point example.
fn dyadic_bounds(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("dyadic-bounds", trials);
    let mut smp = Sampler::new(seed);
    for _ in 0..trials {
        let x = smp.diagonal_operator();
        let rep = dyadic::decompose(&x)?;
        let report = dyadic::validate(&rep, None)?;
        rec.check(report.all_ok(), || {
            format!(
                "{{\"validate_failed\":{}}}",
                json::to_json_string(&json::operator_to_dto(&x))
            )
        });
        let (lo, hi) = rep.active_range();
        let mut bounds_ok = true;
        for n in (lo - 2)..=(hi + 2) {
            let res = rep.residuals.value_at(n);
            let mu_prev = x.mu_at(&pow2(n - 1))?;
            if res > Rat::from_integer(2.into()) * &mu_prev {
                bounds_ok = false;
            }
            let mu_next = x.mu_at(&pow2(n + 1))?;
            if mu_next > res {
                bounds_ok = false;
            }
        }
        rec.check(bounds_ok, || {
            format!(
                "{{\"residual_bounds\":{}}}",
                json::to_json_string(&json::operator_to_dto(&x))
            )
        });
    }
    // the worked example: residuals 8, 4, 2, 0 at n = 0..3
    let alg = BlockAlgebra::single(4, Rat::one());
    let worked = Operator::diagonal(
        alg,
        vec![vec![
            Rat::from_integer(8.into()),
            Rat::from_integer(4.into()),
            Rat::from_integer(2.into()),
            Rat::one(),
        ]],
    )?;
    let rep = dyadic::decompose(&worked)?;
    let want = [(0i64, 8i64), (1, 4), (2, 2), (3, 0)];
    let ok = want
        .iter()
        .all(|(n, v)| rep.residuals.value_at(*n) == Rat::from_integer((*v).into()));
    rec.check(ok, || "{\"worked_example_residuals\":\"mismatch\"}".into());
    Ok(rec.finish())
}

/// Summed representations: validation, the reindexed coefficient identity,
/// and residual domination.
fn sum_reps_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("sum-reps", trials);
    let mut smp = Sampler::new(seed);
    let half = Rat::new(1.into(), 2.into());
    let _ = half;
    for _ in 0..trials {
        let (x, y) = smp.diagonal_pair();
        let rx = dyadic::decompose(&x)?;
        let ry = dyadic::decompose(&y)?;
        let z = dyadic::sum_reps(&rx, &ry)?;
        let report = dyadic::validate(&z, None)?;
        rec.check(report.all_ok(), || {
            format!(
                "{{\"sum_rep_invalid\":{}}}",
                json::to_json_string(&json::operator_to_dto(&x))
            )
        });
        let expected = rx
            .coefficients
            .add(&ry.coefficients)?
            .half_shift()?;
        rec.check(z.coefficients == expected, || {
            "{\"coefficient_identity\":\"z != (1/2) S+ (a_x + a_y)\"}".into()
        });
        let bound = rx.residuals.add(&ry.residuals)?.shift(1)?;
        rec.check(z.residuals.pointwise_le(&bound), || {
            "{\"residual_domination\":\"failed\"}".into()
        });
    }
    Ok(rec.finish())
}

/// Builds an alternative valid representation of the same operator.
fn alternative_rep(
    smp: &mut Sampler,
    x: &Operator,
    canonical: &dyadic::DyadicRep,
) -> Result<dyadic::DyadicRep> {
    let choice = smp.usize_in(0, 2);
    if choice == 0 {
        // reindex up through a zero summand
        let zero = dyadic::decompose(&x.zero_like())?;
        return dyadic::sum_reps(canonical, &zero);
    }
    // regroup: merge the lowest part into the one above when the support
    // bound allows, otherwise fall back to the reindexing
    let dyadic::Parts::Block(parts) = &canonical.parts else {
        let zero = dyadic::decompose(&x.zero_like())?;
        return dyadic::sum_reps(canonical, &zero);
    };
    if parts.len() >= 2 {
        let (k0, p0) = &parts[0];
        let (k1, p1) = &parts[1];
        let merged = p0.add(p1)?;
        let tau = match merged.support_projection()?.tau {
            Ext::Finite(v) => v,
            _ => Rat::zero(),
        };
        if *k1 > *k0 && tau <= pow2(*k1) {
            let mut new_parts = vec![(*k1, merged)];
            for (k, p) in &parts[2..] {
                new_parts.push((*k, p.clone()));
            }
            return dyadic::from_block_parts(x.clone(), new_parts);
        }
    }
    let zero = dyadic::decompose(&x.zero_like())?;
    dyadic::sum_reps(canonical, &zero)
}

/// Distinct representations of one operator: the coboundary witness is exact
/// and every invariant functional kills the coefficient difference.
fn trace_welldefined(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("trace-welldefined", trials);
    let mut smp = Sampler::new(seed);
    for _ in 0..trials {
        let x = smp.diagonal_operator();
        let rep1 = dyadic::decompose(&x)?;
        let rep2 = alternative_rep(&mut smp, &x, &rep1)?;
        let (a, b) = dyadic::welldefinedness_witness(&rep1, &rep2)?;
        let reconstructed = b.sub(&b.half_shift()?)?;
        rec.check(reconstructed == a, || {
            format!(
                "{{\"witness_identity\":{}}}",
                json::to_json_string(&json::operator_to_dto(&x))
            )
        });
        for theta in [Theta::Summation, Theta::LimitPlus, Theta::LimitMinus] {
            if let EvalResult::Exact(v) = functionals::theta_eval(theta, &a) {
                rec.check(v.is_zero(), || {
                    format!("{{\"theta_a_nonzero\":\"{}\"}}", theta.name())
                });
            }
            let t1 = functionals::trace_eval_on_rep(theta, &rep1).result;
            let t2 = functionals::trace_eval_on_rep(theta, &rep2).result;
            rec.check(t1 == t2, || {
                format!("{{\"trace_disagrees\":\"{}\"}}", theta.name())
            });
        }
    }
    Ok(rec.finish())
}

/// `phi(X+Y) = phi(X) + phi(Y)` through summed representations.
fn trace_linearity(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("trace-linearity", trials);
    let mut smp = Sampler::new(seed);
    for _ in 0..trials {
        let (x, y) = smp.diagonal_pair();
        let rx = dyadic::decompose(&x)?;
        let ry = dyadic::decompose(&y)?;
        let rz = dyadic::sum_reps(&rx, &ry)?;
        for theta in [Theta::Summation, Theta::LimitPlus, Theta::LimitMinus] {
            let vx = functionals::trace_eval_on_rep(theta, &rx).result;
            let vy = functionals::trace_eval_on_rep(theta, &ry).result;
            let vz = functionals::trace_eval_on_rep(theta, &rz).result;
            if let (EvalResult::Exact(a), EvalResult::Exact(b), EvalResult::Exact(c)) =
                (&vx, &vy, &vz)
            {
                rec.check(a + b == *c, || {
                    format!("{{\"linearity\":\"{}\"}}", theta.name())
                });
            }
        }
    }
    Ok(rec.finish())
}

/// Equal singular data across different equal-weight block layouts gives
/// equal traces for invariant functionals.
fn trace_symmetry(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("trace-symmetry", trials);
    let mut smp = Sampler::new(seed);
    for _ in 0..trials {
        let n = smp.usize_in(2, 6);
        let entries: Vec<Rat> = (0..n).map(|_| smp.rat_in(4, 16)).collect();
        let one_block = Operator::diagonal(
            BlockAlgebra::single(n, Rat::one()),
            vec![entries.clone()],
        )?;
        let split = smp.usize_in(1, n - 1);
        let two_blocks = Operator::diagonal(
            BlockAlgebra::new(vec![(split, Rat::one()), (n - split, Rat::one())])?,
            vec![
                entries[..split].to_vec(),
                entries[split..].to_vec(),
            ],
        )?;
        rec.check(
            one_block.singular_value_function()? == two_blocks.singular_value_function()?,
            || "{\"mu_differs_across_layouts\":true}".into(),
        );
        for theta in [Theta::Summation, Theta::LimitPlus, Theta::LimitMinus] {
            let a = functionals::trace_eval(theta, &one_block)?.result;
            let b = functionals::trace_eval(theta, &two_blocks)?.result;
            rec.check(a == b, || {
                format!("{{\"symmetry\":\"{}\"}}", theta.name())
            });
        }
    }
    Ok(rec.finish())
}

/// The summation functional recovers the trace exactly.
fn tau_recovery(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("tau-recovery", trials);
    let mut smp = Sampler::new(seed);
    for _ in 0..trials {
        let x = smp.diagonal_operator();
        let phi = functionals::trace_eval(Theta::Summation, &x)?.result;
        let tau = x.trace();
        rec.check(
            phi.exact() == tau.exact() && phi.exact().is_some(),
            || {
                format!(
                    "{{\"tau_recovery\":{}}}",
                    json::to_json_string(&json::operator_to_dto(&x))
                )
            },
        );
    }
    Ok(rec.finish())
}

/// `theta_from_phi(trace_eval(theta, .), x) = theta_eval(theta, x)` on
/// tileable sequences through both embedding targets.
fn roundtrip_corollary(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("roundtrip-corollary", trials);
    let mut smp = Sampler::new(seed);
    for _ in 0..trials {
        let (x, alg) = smp.tileable();
        for theta in [Theta::Summation, Theta::LimitMinus] {
            let direct = functionals::theta_eval(theta, &x);
            let via_block = functionals::theta_from_phi(
                |op| Ok(functionals::trace_eval(theta, op)?.result),
                &x,
                EmbedTarget::Block(&alg),
            )?;
            let via_comm = functionals::theta_from_phi(
                |op| Ok(functionals::trace_eval(theta, op)?.result),
                &x,
                EmbedTarget::Commutative,
            )?;
            rec.check(direct == via_block, || {
                format!(
                    "{{\"roundtrip_block\":\"{}\",\"x\":{}}}",
                    theta.name(),
                    seq_json(&x)
                )
            });
            rec.check(direct == via_comm, || {
                format!(
                    "{{\"roundtrip_commutative\":\"{}\",\"x\":{}}}",
                    theta.name(),
                    seq_json(&x)
                )
            });
        }
    }
    Ok(rec.finish())
}

/// `phi(A) = phi(D Phi_av A)` for positive operators, plus the cellwise
/// zero-integral identity behind it.
fn phi_av_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("phi-av", trials);
    let mut smp = Sampler::new(seed);
    for _ in 0..trials {
        let x = smp.diagonal_operator();
        let x = positive_part(&x)?;
        for theta in [Theta::Summation, Theta::LimitMinus] {
            let rep = functionals::phi_av_identity_check(theta, &x)?;
            rec.check(rep.equal == Some(true), || {
                format!(
                    "{{\"phi_av\":\"{}\",\"x\":{}}}",
                    theta.name(),
                    json::to_json_string(&json::operator_to_dto(&x))
                )
            });
        }
        // blockwise zero integrals for random nonnegative step data
        let y = smp.finite_sequence().abs();
        let f = transfer::pietsch_d(&y);
        let mv = f.mu();
        let av = mv.phi_av()?;
        let d_av = transfer::pietsch_d(&av);
        let mut ok = true;
        for k in -10..=10i64 {
            let cell = mv.integral_over(&pow2(k), &pow2(k + 1));
            let d_cell = d_av
                .integrate(&pow2(k), Some(&pow2(k + 1)))
                .finite()
                .cloned()
                .unwrap_or_else(|| Rat::zero());
            if cell != d_cell {
                ok = false;
            }
        }
        rec.check(ok, || {
            format!("{{\"blockwise_integrals\":{}}}", seq_json(&y))
        });
    }
    // the canonical supported-at-zero element under LimitMinus
    let spike = StepFunction::new(
        Some(crate::step::ZeroTail {
            c: Rat::one(),
            r: Rat::from_integer(2.into()),
            lo: 0,
        }),
        vec![Rat::one()],
        vec![],
        crate::step::InfTail::Const(Rat::zero()),
    )?;
    let rep = functionals::phi_av_identity_check(Theta::LimitMinus, &Operator::commutative(spike))?;
    rec.check(
        rep.lhs == EvalResult::Exact(Rat::one()) && rep.equal == Some(true),
        || "{\"spike_identity\":\"failed\"}".into(),
    );
    Ok(rec.finish())
}

fn positive_part(x: &Operator) -> Result<Operator> {
    // absolute value entrywise for diagonal operators
    match x {
        Operator::Block(b) => {
            let entries = b
                .matrices
                .iter()
                .map(|m| match m {
                    crate::opmodel::BlockMatrix::Diag(d) => d.iter().map(|v| v.abs()).collect(),
                    crate::opmodel::BlockMatrix::Dense(_) => vec![],
                })
                .collect();
            Operator::diagonal(b.algebra.clone(), entries)
        }
        Operator::Commutative(f) => Ok(Operator::Commutative(f.abs())),
    }
}

/// The negative control: the trace-derived weighted sum is detected as
/// non-invariant, with the documented exact values, and its weights
/// telescope to one.
fn counterexample_suite() -> Result<SuiteReport> {
    let mut rec = Recorder::new("counterexample", 1);
    let theta = functionals::counterexample_theta();
    let e0 = DyadicSequence::unit(0);
    let sixth = Rat::new(1.into(), 6.into());
    let fifteenth = Rat::new(1.into(), 15.into());
    rec.check(
        functionals::theta_eval(theta, &e0) == EvalResult::Exact(sixth.clone()),
        || "{\"theta_e0\":\"!= 1/6\"}".into(),
    );
    let shifted = e0.half_shift()?;
    rec.check(
        functionals::theta_eval(theta, &shifted) == EvalResult::Exact(fifteenth.clone()),
        || "{\"theta_half_shift_e0\":\"!= 1/15\"}".into(),
    );
    let probes = functionals::invariance_probe(theta, std::slice::from_ref(&e0))?;
    rec.check(probes[0].equal == Some(false), || {
        "{\"invariance_failure_not_detected\":true}".into()
    });
    // exact telescoping of the partial sums against the closed form
    let mut exact_ok = true;
    for n_cap in 1..=24i64 {
        let mut partial = Rat::zero();
        for n in -n_cap..=n_cap {
            partial += functionals::counterexample_weight(n);
        }
        let closed =
            Rat::one() / (Rat::one() + pow2(-n_cap)) - Rat::one() / (Rat::one() + pow2(n_cap + 1));
        if partial != closed {
            exact_ok = false;
        }
    }
    rec.check(exact_ok, || "{\"telescoping_identity\":\"failed\"}".into());
    // the weights sum to 1 exactly: theta(chi_Z) via the closed form
    rec.check(
        functionals::theta_eval(theta, &DyadicSequence::const_one()) == EvalResult::Exact(Rat::one()),
        || "{\"weights_sum\":\"!= 1\"}".into(),
    );
    // the stated numeric bound at N = 20; the true residual is
    // 2^-20/(1+2^-20) + 1/(1+2^21) ~ 1.43e-6, so this check reports it
    let mut partial20 = Rat::zero();
    for n in -20..=20i64 {
        partial20 += functionals::counterexample_weight(n);
    }
    let err = rat_to_f64(&(Rat::one() - &partial20));
    rec.check(err < 1e-6, || {
        format!("{{\"partial_sum_error_at_N20\":{err:.6e},\"bound\":1e-6,\"note\":\"the symmetric window cuts 3*2^-21 of mass; N = 21 meets the bound\"}}")
    });
    let mut partial21 = Rat::zero();
    for n in -21..=21i64 {
        partial21 += functionals::counterexample_weight(n);
    }
    let err21 = rat_to_f64(&(Rat::one() - &partial21));
    rec.note(format!(
        "invariance failure detected as required (1/6 vs 1/15); residual at N=20 is {err:.3e} \
         (the stated 1e-6 bound needs N=21, where it is {err21:.3e})"
    ));
    Ok(rec.finish())
}

/// `||x||_seq = ||Dx||_fn` by two independent routes, and the operator level
/// on tileable data.
fn norm_transfer(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("norm-transfer", trials);
    let mut smp = Sampler::new(seed);
    let norms = [
        DeltaNorm::l1(),
        DeltaNorm::Linf,
        DeltaNorm::lp(Rat::from_integer(2.into()))?,
        DeltaNorm::lp(Rat::new(1.into(), 2.into()))?,
    ];
    for trial in 0..trials {
        let x = smp.sequence();
        let f = transfer::pietsch_d(&x);
        for n in &norms {
            let a = deltanorm::norm_seq(n, &x);
            let b = deltanorm::norm_fn(n, &f);
            let ok = match a.eq_exact(&b) {
                Some(eq) => eq,
                None => {
                    let (af, bf) = (a.approx(), b.approx());
                    (af - bf).abs() <= 1e-12 * (1.0 + af.abs())
                }
            };
            rec.check(ok, || {
                format!("{{\"norm_route_mismatch\":{:?},\"x\":{}}}", n, seq_json(&x))
            });
        }
        if trial % 4 == 0 {
            let (y, block, _) = smp.tileable_embedding();
            for n in &norms[..3] {
                let a = deltanorm::norm_seq(n, &y);
                let b = deltanorm::norm_op(n, &block)?;
                rec.check(a.eq_exact(&b) == Some(true), || {
                    format!("{{\"op_level_norm\":{:?},\"x\":{}}}", n, seq_json(&y))
                });
            }
        }
    }
    Ok(rec.finish())
}

/// `||X|| <= ||X||~ <= 2C ||X||`, with monotonicity of the stable norm in
/// the dyadic samples.
fn stable_sandwich(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("stable-sandwich", trials);
    let mut smp = Sampler::new(seed);
    let norms = [
        DeltaNorm::l1(),
        DeltaNorm::Linf,
        DeltaNorm::lp(Rat::from_integer(2.into()))?,
    ];
    for _ in 0..trials {
        let x = smp.diagonal_operator();
        if x.is_zero() {
            continue;
        }
        for n in &norms {
            let base = deltanorm::norm_op(n, &x)?;
            let stable = deltanorm::stable_norm(n, &x)?;
            let two_c = Rat::from_integer(2.into()) * n.quasi_constant();
            let upper = base.scale_exact(&two_c);
            let lower_ok = base.le_exact(&stable).unwrap_or_else(|| {
                base.approx() <= stable.approx() * (1.0 + 1e-12)
            });
            let upper_ok = stable.le_exact(&upper).unwrap_or_else(|| {
                stable.approx() <= upper.approx() * (1.0 + 1e-12)
            });
            rec.check(lower_ok && upper_ok, || {
                format!(
                    "{{\"stable_sandwich\":{:?},\"x\":{}}}",
                    n,
                    json::to_json_string(&json::operator_to_dto(&x))
                )
            });
        }
        // monotonicity: scaling down the operator scales down the samples
        let alpha = Rat::new(smp.usize_in(1, 15).into(), 16.into());
        let y = x.scale(&alpha);
        let sx = deltanorm::stable_norm(&DeltaNorm::l1(), &x)?;
        let sy = deltanorm::stable_norm(&DeltaNorm::l1(), &y)?;
        rec.check(sy.le_exact(&sx).unwrap_or(true), || {
            "{\"stable_monotonicity\":\"failed\"}".into()
        });
    }
    Ok(rec.finish())
}

/// Declared-constant audit: quasi-triangle, shift boundedness, dilation
/// growth, with the L1 equality cases pinned.
fn constants_suite(trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new("constants", trials);
    let mut smp = Sampler::new(seed);
    let norms = [
        DeltaNorm::l1(),
        DeltaNorm::Linf,
        DeltaNorm::lp(Rat::from_integer(2.into()))?,
        DeltaNorm::lp(Rat::new(1.into(), 2.into()))?,
    ];
    let mut fn_pairs = Vec::new();
    let mut seqs = Vec::new();
    for _ in 0..trials {
        let x = smp.finite_sequence();
        let y = smp.finite_sequence();
        fn_pairs.push((transfer::pietsch_d(&x), transfer::pietsch_d(&y)));
        seqs.push(smp.finite_sequence());
    }
    for n in &norms {
        let report = deltanorm::constants_report(n, &fn_pairs, &seqs)?;
        rec.check(report.quasi_triangle_fn <= 1.0 + 1e-12, || {
            format!("{{\"quasi_triangle_fn\":{}}}", report.quasi_triangle_fn)
        });
        rec.check(report.quasi_triangle_seq <= 1.0 + 1e-12, || {
            format!("{{\"quasi_triangle_seq\":{}}}", report.quasi_triangle_seq)
        });
        rec.check(report.shift_ratio <= 1.0 + 1e-12, || {
            format!("{{\"shift_ratio\":{}}}", report.shift_ratio)
        });
        for (k, ratio) in report.dilation_ratios.iter().enumerate() {
            rec.check(*ratio <= 1.0 + 1e-12, || {
                format!("{{\"dilation_ratio_k\":{},\"value\":{}}}", k + 1, ratio)
            });
        }
    }
    // L1 equality cases: ||S_+ x||_1 = 2 ||x||_1 and ||sigma_2 f||_1 = 2||f||_1
    let x = DyadicSequence::from_window(0, vec![Rat::one(), Rat::from_integer(3.into())])?;
    let a = deltanorm::norm_seq(&DeltaNorm::l1(), &x);
    let b = deltanorm::norm_seq(&DeltaNorm::l1(), &x.shift(1)?);
    rec.check(
        b.eq_exact(&a.scale_exact(&Rat::from_integer(2.into()))) == Some(true),
        || "{\"l1_shift_equality\":\"failed\"}".into(),
    );
    let f = transfer::pietsch_d(&x);
    let df = f.dilate(&Rat::from_integer(2.into()))?;
    let nf = deltanorm::norm_fn(&DeltaNorm::l1(), &f);
    let ndf = deltanorm::norm_fn(&DeltaNorm::l1(), &df);
    rec.check(
        ndf.eq_exact(&nf.scale_exact(&Rat::from_integer(2.into()))) == Some(true),
        || "{\"l1_dilation_equality\":\"failed\"}".into(),
    );
    rec.note(format!(
        "audited constants for {} variants on {} function pairs and {} sequences",
        norms.len(),
        fn_pairs.len(),
        seqs.len()
    ));
    Ok(rec.finish())
}

/// Renders one pass/fail line per suite.
pub fn render_text(reports: &[SuiteReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!(
            "{:20} {:4} trials {:6} checks {:5} failures  {}\n",
            r.suite,
            r.trials,
            r.checks,
            r.failures,
            if r.passed { "PASS" } else { "FAIL" }
        ));
        for n in &r.notes {
            out.push_str(&format!("    note: {n}\n"));
        }
        for f in &r.sample_failures {
            out.push_str(&format!("    fail: {f}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_smoke_run_of_every_suite() {
        for suite in SUITES {
            let trials = match *suite {
                "counterexample" => 1,
                _ => 6,
            };
            let rep = run_suite(suite, Some(trials), 0).unwrap_or_else(|e| {
                panic!("suite {suite} errored: {e}");
            });
            match *suite {
                // these two carry documented expected failures
                "order-rearrangement" | "counterexample" => {}
                _ => assert!(rep.passed, "suite {suite} failed: {:?}", rep.sample_failures),
            }
        }
    }

    #[test]
    fn deterministic_reports() {
        let a = run_suite("tau-recovery", Some(10), 42).unwrap();
        let b = run_suite("tau-recovery", Some(10), 42).unwrap();
        assert_eq!(json::to_json_string(&a), json::to_json_string(&b));
    }
}
