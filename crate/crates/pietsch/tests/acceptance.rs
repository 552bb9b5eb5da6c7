//! Acceptance suite: one test per checklist criterion, each printing a
//! pass/fail line (run with `--nocapture` to see every line). Tolerances and
//! trial counts are pinned here.
//!
//! Two items document known defects and are expected to stay red until the
//! underlying statements are repaired upstream:
//!   - criterion 1: the verbatim identity `o_n(x) = (Dx)*(2^n)` fails at
//!     exact-fit sampling points (where the level set above the sampled
//!     value measures exactly `2^n`) under the right-continuous
//!     rearrangement convention that all other worked examples pin down;
//!     the equivalent two-sided interlacing holds exactly on every trial.
//!   - criterion 8's `N = 20` partial-sum bound: the telescoped residual at
//!     the symmetric window is `2^-20/(1+2^-20) + 1/(1+2^21) ~ 1.43e-6`,
//!     which is not below `1e-6` (one more step is).

use pietsch::deltanorm::{self, DeltaNorm};
use pietsch::functionals::{self, EvalResult, Theta};
use pietsch::opmodel::Operator;
use pietsch::rat::{pow2, rat_to_f64, Rat};
use pietsch::sample::Sampler;
use pietsch::seq::{DyadicSequence, Tail};
use pietsch::step::{InfTail, StepFunction, ZeroTail};
use pietsch::verify;
use pietsch::{json, transfer};
use num_traits::{One, Signed, Zero};
use std::time::Instant;

fn report(criterion: &str, passed: bool, detail: &str) -> bool {
    println!(
        "criterion {criterion}: {} — {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    passed
}

fn ri(p: i64) -> Rat {
    Rat::from_integer(p.into())
}
fn rq(p: i64, q: i64) -> Rat {
    Rat::new(p.into(), q.into())
}

#[test]
fn criterion_01_order_vs_rearrangement_identity() {
    let start = Instant::now();
    let rep = verify::run_suite("order-rearrangement", Some(1000), 0).unwrap();
    let elapsed = start.elapsed();
    let in_time = elapsed.as_secs_f64() < 5.0;
    for n in &rep.notes {
        println!("  {n}");
    }
    let passed = report(
        "1",
        rep.passed && in_time,
        &format!(
            "o_n(x) = (Dx)*(2^n) verbatim on 1000 seeded sequences in {:.2}s; {} of {} checks failed \
             (every mismatch is the characterized exact-fit jump; the interlacing \
             Phi(Dx) <= o(x) <= S+ Phi(Dx) held on every trial)",
            elapsed.as_secs_f64(),
            rep.failures,
            rep.checks
        ),
    );
    assert!(in_time, "runtime bound exceeded: {elapsed:?}");
    assert!(
        passed,
        "the verbatim identity is false at exact-fit sampling points under the \
         right-continuous convention the other worked examples pin down; see the \
         suite notes above and the order-rearrangement suite output"
    );
}

#[test]
fn criterion_02_sandwiches() {
    let rep = verify::run_suite("dphi-sandwich", Some(1000), 0).unwrap();
    let passed = report(
        "2",
        rep.passed,
        &format!(
            "(Dx)* <= D(o(x)) <= sigma_2 (Dx)* and f <= D Phi f <= sigma_2 f on 1000 trials each; \
             {} failures",
            rep.failures
        ),
    );
    assert!(passed, "{:?}", rep.sample_failures);
}

#[test]
fn criterion_03_sum_rear() {
    let rep = verify::run_suite("sum-rear", Some(500), 0).unwrap();
    let passed = report(
        "3",
        rep.passed,
        &format!(
            "mu(2t, X+Y) <= mu(t,X) + mu(t,Y) at every breakpoint on 500 numeric pairs \
             (1e-9) and 500 exact diagonal pairs; {} failures",
            rep.failures
        ),
    );
    assert!(passed, "{:?}", rep.sample_failures);
}

#[test]
fn criterion_04_dyadic_bounds() {
    let rep = verify::run_suite("dyadic-bounds", Some(500), 0).unwrap();
    let passed = report(
        "4",
        rep.passed,
        &format!(
            "tau(s(X_k)) <= 2^k and residual_n <= 2 mu(2^(n-1), X) exactly on 500 random \
             diagonals plus the worked four-point example (residuals 8,4,2,0); {} failures",
            rep.failures
        ),
    );
    assert!(passed, "{:?}", rep.sample_failures);
}

#[test]
fn criterion_05_welldefinedness_witness() {
    let rep = verify::run_suite("trace-welldefined", Some(200), 0).unwrap();
    let passed = report(
        "5",
        rep.passed,
        &format!(
            "for 200 pairs of distinct representations: a = b - (1/2) S+ b exactly and \
             theta(a) = 0 for the invariant functionals; {} failures",
            rep.failures
        ),
    );
    assert!(passed, "{:?}", rep.sample_failures);
}

#[test]
fn criterion_06_tau_recovery_and_linearity() {
    let rep1 = verify::run_suite("tau-recovery", Some(500), 0).unwrap();
    let rep2 = verify::run_suite("trace-linearity", Some(200), 0).unwrap();
    let passed = report(
        "6",
        rep1.passed && rep2.passed,
        &format!(
            "summation trace equals tau exactly on 500 diagonals; linearity through summed \
             representations on 200 pairs; {}+{} failures",
            rep1.failures, rep2.failures
        ),
    );
    assert!(passed, "{:?} {:?}", rep1.sample_failures, rep2.sample_failures);
}

#[test]
fn criterion_07_supported_singular_traces() {
    // LimitPlus = 1 on the canonical weak-type element, 0 on finite blocks;
    // LimitMinus = 1 on the r=2 spike, 0 on bounded commutative data
    let weak = DyadicSequence::new(
        0,
        vec![ri(1)],
        Tail::constant(ri(1)),
        Tail::Geometric {
            c: ri(1),
            r: rq(1, 2),
        },
    )
    .unwrap();
    let weak_op = Operator::commutative(transfer::pietsch_d(&weak));
    let lp_weak = functionals::trace_eval(Theta::LimitPlus, &weak_op)
        .unwrap()
        .result;
    let spike = StepFunction::new(
        Some(ZeroTail {
            c: ri(1),
            r: ri(2),
            lo: 0,
        }),
        vec![ri(1)],
        vec![],
        InfTail::Const(Rat::zero()),
    )
    .unwrap();
    let lm_spike = functionals::trace_eval(Theta::LimitMinus, &Operator::commutative(spike))
        .unwrap()
        .result;
    let mut zeros_ok = true;
    let mut smp = Sampler::new(7);
    for _ in 0..100 {
        let x = smp.diagonal_operator();
        if functionals::trace_eval(Theta::LimitPlus, &x).unwrap().result
            != EvalResult::Exact(Rat::zero())
        {
            zeros_ok = false;
        }
        // a bounded commutative element: D of a finitely supported sequence
        let y = smp.finite_sequence();
        let f_op = Operator::commutative(transfer::pietsch_d(&y));
        if functionals::trace_eval(Theta::LimitMinus, &f_op).unwrap().result
            != EvalResult::Exact(Rat::zero())
        {
            zeros_ok = false;
        }
    }
    let passed = report(
        "7",
        lp_weak == EvalResult::Exact(ri(1))
            && lm_spike == EvalResult::Exact(ri(1))
            && zeros_ok,
        &format!(
            "LimitPlus(weak-type) = {:?}, LimitMinus(r=2 spike) = {:?}, and both vanish on \
             100 finite blocks / bounded elements, all exact",
            lp_weak, lm_spike
        ),
    );
    assert!(passed);
}

#[test]
fn criterion_08_counterexample() {
    let theta = functionals::counterexample_theta();
    let e0 = DyadicSequence::unit(0);
    let v0 = functionals::theta_eval(theta, &e0);
    let v1 = functionals::theta_eval(theta, &e0.half_shift().unwrap());
    let detected = functionals::invariance_probe(theta, std::slice::from_ref(&e0)).unwrap()[0]
        .equal
        == Some(false);
    // exact telescoping and the closed-form total
    let chi = functionals::theta_eval(theta, &DyadicSequence::const_one());
    let mut partial20 = Rat::zero();
    for n in -20..=20i64 {
        partial20 += functionals::counterexample_weight(n);
    }
    let closed20 = Rat::one() / (Rat::one() + pow2(-20)) - Rat::one() / (Rat::one() + pow2(21));
    let telescoped_exactly = partial20 == closed20;
    let err20 = rat_to_f64(&(Rat::one() - &partial20));
    let n20_bound = err20 < 1e-6;
    let passed = report(
        "8",
        v0 == EvalResult::Exact(rq(1, 6))
            && v1 == EvalResult::Exact(rq(1, 15))
            && detected
            && chi == EvalResult::Exact(ri(1))
            && telescoped_exactly
            && n20_bound,
        &format!(
            "theta(e0) = {v0:?} (want 1/6), theta((1/2)S+ e0) = {v1:?} (want 1/15), invariance \
             failure detected: {detected}; weights telescope exactly and sum to 1; partial-sum \
             residual at N=20 is {err20:.3e} against the stated 1e-6 bound"
        ),
    );
    assert!(
        passed,
        "the N = 20 numeric bound is the stated-but-unattainable sub-item: the symmetric \
         window cuts 3*2^-21 of mass (~1.43e-6 > 1e-6); N = 21 satisfies the bound"
    );
}

#[test]
fn criterion_09_round_trip() {
    let rep = verify::run_suite("roundtrip-corollary", Some(200), 0).unwrap();
    let passed = report(
        "9",
        rep.passed,
        &format!(
            "theta_from_phi(trace_eval(theta, .), x) = theta_eval(theta, x) exactly for \
             summation and LimitMinus on 200 tileable sequences (both targets); {} failures",
            rep.failures
        ),
    );
    assert!(passed, "{:?}", rep.sample_failures);
}

#[test]
fn criterion_10_majorization() {
    let rep = verify::run_suite("majorization", Some(300), 0).unwrap();
    let passed = report(
        "10",
        rep.passed,
        &format!(
            "exact checker never contradicted by the 1/64-grid oracle on 300 random pairs; \
             finite series bound with lambda = 2 on 200 part lists (K <= 4); {} failures",
            rep.failures
        ),
    );
    assert!(passed, "{:?}", rep.sample_failures);
}

#[test]
fn criterion_11_norm_transfer_and_stability() {
    let rep1 = verify::run_suite("norm-transfer", Some(300), 0).unwrap();
    let rep2 = verify::run_suite("stable-sandwich", Some(300), 0).unwrap();
    let rep3 = verify::run_suite("constants", Some(100), 0).unwrap();
    let passed = report(
        "11",
        rep1.passed && rep2.passed && rep3.passed,
        &format!(
            "||x||_seq = ||Dx||_fn (l1, linf, lp 1/2 and 2) on 300 trials; stable sandwich \
             ||X|| <= ||X||~ <= 2C||X|| on 300 trials; dilation bound with the L1 equality \
             case; {}+{}+{} failures",
            rep1.failures, rep2.failures, rep3.failures
        ),
    );
    assert!(
        passed,
        "{:?} {:?} {:?}",
        rep1.sample_failures, rep2.sample_failures, rep3.sample_failures
    );
}

#[test]
fn criterion_12_determinism_and_runtime() {
    let start = Instant::now();
    let first = verify::run_all(None, 0).unwrap();
    let elapsed = start.elapsed();
    let second = verify::run_all(None, 0).unwrap();
    let a = json::to_json_string(&first);
    let b = json::to_json_string(&second);
    let deterministic = a == b;
    let in_time = elapsed.as_secs_f64() < 60.0;
    // expected content: every suite green except the two documented defects
    let red: Vec<&str> = first
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.suite.as_str())
        .collect();
    let expected_reds = red
        .iter()
        .all(|s| *s == "order-rearrangement" || *s == "counterexample");
    let passed = report(
        "12",
        deterministic && in_time && expected_reds,
        &format!(
            "verify all --seed 0 twice: byte-identical = {deterministic}; full run took \
             {:.1}s (< 60s); red suites beyond the two documented defects: {:?}",
            elapsed.as_secs_f64(),
            red.iter()
                .filter(|s| **s != "order-rearrangement" && **s != "counterexample")
                .collect::<Vec<_>>()
        ),
    );
    assert!(passed);
}

#[test]
fn cli_end_to_end_determinism() {
    // the CLI surface itself: identical argv + seed => byte-identical stdout
    let args: Vec<String> = ["pietsch", "verify", "dyadic-bounds", "--trials", "40", "--seed", "0"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let run1 = pietsch::cli::run(&args);
    let run2 = pietsch::cli::run(&args);
    assert_eq!(run1, run2);
    assert_eq!(run1.0, 0);
}

#[test]
fn external_interface_worked_examples() {
    // omap on the documented three-point window
    let seq = r#"{"lo":0,"hi":2,"values":["3/1","1/1","2/1"],"left":{"kind":"zero"},"right":{"kind":"zero"},"index_set":"Z"}"#;
    let dto: json::SequenceDto = json::parse_json(seq).unwrap();
    let x = json::sequence_from_dto(&dto).unwrap();
    let o = x.ordering_numbers();
    assert_eq!(o.value_at(-4), ri(3));
    assert_eq!(o.value_at(0), ri(3));
    assert_eq!(o.value_at(1), ri(2));
    assert_eq!(o.value_at(2), ri(2));
    assert_eq!(o.value_at(3), ri(0));
    // trace-eval --theta summation on the worked diagonal equals 15/1
    let alg = pietsch::opmodel::BlockAlgebra::single(4, ri(1));
    let xop = Operator::diagonal(alg, vec![vec![ri(8), ri(4), ri(2), ri(1)]]).unwrap();
    let te = functionals::trace_eval(Theta::Summation, &xop).unwrap();
    assert_eq!(te.result, EvalResult::Exact(ri(15)));
    // norm CLI form: stable-norm example values 3 <= 4 <= 6
    let y = Operator::diagonal(
        pietsch::opmodel::BlockAlgebra::single(3, ri(1)),
        vec![vec![ri(1), ri(1), ri(1)]],
    )
    .unwrap();
    let base = deltanorm::norm_op(&DeltaNorm::l1(), &y).unwrap();
    let stable = deltanorm::stable_norm(&DeltaNorm::l1(), &y).unwrap();
    assert_eq!(base, deltanorm::NormValue::Exact(ri(3)));
    assert_eq!(stable, deltanorm::NormValue::Exact(ri(4)));
    assert!(rat_to_f64(&ri(4)) <= 2.0 * rat_to_f64(&ri(3)));
    let _ = base.approx().is_sign_positive();
}
