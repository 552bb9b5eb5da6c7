//! Computable shift-invariant functionals and the singular traces they
//! generate.
//!
//! Every functional evaluates through the conjugated sequence `y_n = 2^n x_n`,
//! which turns `(1/2) S_+` into the plain shift: `Summation` adds up `y`,
//! `LimitPlus`/`LimitMinus` take its limits toward the two ends, and the
//! Cesaro variants take the corresponding means (which coincide with the
//! limits on the representable closed-form class). All of these are invariant
//! under `(1/2) S_+` on their domains. The weighted sum with
//! `c_n = 2^n / ((1 + 2^{n+1})(1 + 2^n))` is the trace-derived functional
//! that is *not* invariant; it exists to demonstrate why invariance matters.
//!
//! The trace of an operator under a functional is the functional evaluated
//! on the coefficient sequence `{2^-k tau(X_k)}` of a dyadic representation;
//! for invariant functionals the value does not depend on the representation.

use crate::dyadic::{self, DyadicRep};
use crate::error::{Error, Result};
use crate::opmodel::{diag_embed, EmbedTarget, Operator};
use crate::rat::{pow2, rat_to_f64, Rat};
use crate::seq::{DyadicSequence, Tail};
use crate::step::{InfTail, StepFunction};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theta {
    /// `theta(x) = sum_n 2^n x_n` (recovers the trace).
    Summation,
    /// `theta(x) = lim_{n -> +inf} 2^n x_n` (supported at infinity).
    LimitPlus,
    /// `theta(x) = lim_{n -> -inf} 2^n x_n` (supported at zero).
    LimitMinus,
    /// Cesaro mean of `2^n x_n` toward `+inf`.
    CesaroPlus,
    /// Cesaro mean of `2^n x_n` toward `-inf`.
    CesaroMinus,
    /// `theta(x) = sum_n x_n 2^n / ((1+2^{n+1})(1+2^n))`: derived from the
    /// trace `f -> int f(t)/(1+t)^2 dt`, not `(1/2) S_+`-invariant.
    CounterexampleWeights,
}

/// The trace-derived functional that fails invariance.
pub fn counterexample_theta() -> Theta {
    Theta::CounterexampleWeights
}

impl Theta {
    pub fn all() -> [Theta; 6] {
        [
            Theta::Summation,
            Theta::LimitPlus,
            Theta::LimitMinus,
            Theta::CesaroPlus,
            Theta::CesaroMinus,
            Theta::CounterexampleWeights,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Theta::Summation => "summation",
            Theta::LimitPlus => "limplus",
            Theta::LimitMinus => "limminus",
            Theta::CesaroPlus => "cesaro+",
            Theta::CesaroMinus => "cesaro-",
            Theta::CounterexampleWeights => "counterexample",
        }
    }

    pub fn from_name(s: &str) -> Result<Theta> {
        Ok(match s {
            "summation" => Theta::Summation,
            "limplus" => Theta::LimitPlus,
            "limminus" => Theta::LimitMinus,
            "cesaro+" => Theta::CesaroPlus,
            "cesaro-" => Theta::CesaroMinus,
            "counterexample" => Theta::CounterexampleWeights,
            _ => return Err(Error::Parse(format!("unknown functional {s:?}"))),
        })
    }

    /// Invariance under `(1/2) S_+`, by construction of the variant.
    pub fn is_shift_invariant(&self) -> bool {
        !matches!(self, Theta::CounterexampleWeights)
    }
}

/// Evaluation output: exact rationals wherever the data admits a closed
/// form, floating otherwise; points outside the domain are a fact, not an
/// error.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalResult {
    Exact(Rat),
    Approx(f64),
    OutsideDomain(&'static str),
}

impl EvalResult {
    pub fn defined(&self) -> bool {
        !matches!(self, EvalResult::OutsideDomain(_))
    }

    pub fn exact(&self) -> Option<&Rat> {
        match self {
            EvalResult::Exact(v) => Some(v),
            _ => None,
        }
    }

    pub fn approx(&self) -> Option<f64> {
        match self {
            EvalResult::Exact(v) => Some(rat_to_f64(v)),
            EvalResult::Approx(v) => Some(*v),
            EvalResult::OutsideDomain(_) => None,
        }
    }
}

/// `c_n = 2^n / ((1 + 2^{n+1})(1 + 2^n))`.
pub fn counterexample_weight(n: i64) -> Rat {
    let one = Rat::one();
    pow2(n) / ((&one + pow2(n + 1)) * (one.clone() + pow2(n)))
}

pub fn theta_eval(theta: Theta, x: &DyadicSequence) -> EvalResult {
    match theta {
        Theta::Summation => eval_summation(x),
        Theta::LimitPlus | Theta::CesaroPlus => eval_limit_plus(x),
        Theta::LimitMinus | Theta::CesaroMinus => eval_limit_minus(x),
        Theta::CounterexampleWeights => eval_counterexample(x),
    }
}

fn eval_summation(x: &DyadicSequence) -> EvalResult {
    let two = Rat::from_integer(2.into());
    let left = match x.left_tail() {
        Tail::Zero => Rat::zero(),
        Tail::Geometric { c, r } => {
            // terms c r^m 2^(lo-m): geometric with ratio r/2 toward -inf
            if *r >= two {
                return EvalResult::OutsideDomain("left tail ratio >= 2: series diverges");
            }
            let ratio = r / &two;
            c * pow2(x.lo()) * &ratio / (Rat::one() - &ratio)
        }
    };
    let right = match x.right_tail() {
        Tail::Zero => Rat::zero(),
        Tail::Geometric { c, r } => {
            // terms c r^m 2^(hi+m): geometric with ratio 2r toward +inf
            let ratio = r * &two;
            if ratio >= Rat::one() {
                return EvalResult::OutsideDomain("right tail ratio >= 1/2: series diverges");
            }
            c * pow2(x.hi()) * &ratio / (Rat::one() - &ratio)
        }
    };
    let window: Rat = (x.lo()..=x.hi()).map(|n| x.value_at(n) * pow2(n)).sum();
    EvalResult::Exact(left + window + right)
}

fn eval_limit_plus(x: &DyadicSequence) -> EvalResult {
    match x.right_tail() {
        Tail::Zero => EvalResult::Exact(Rat::zero()),
        Tail::Geometric { c, r } => {
            let ratio = r * Rat::from_integer(2.into());
            if ratio < Rat::one() {
                EvalResult::Exact(Rat::zero())
            } else if ratio.is_one() {
                // y_n = 2^n c r^(n-hi) is the constant c 2^hi
                EvalResult::Exact(c * pow2(x.hi()))
            } else {
                EvalResult::OutsideDomain("2^n x_n diverges toward +inf")
            }
        }
    }
}

fn eval_limit_minus(x: &DyadicSequence) -> EvalResult {
    match x.left_tail() {
        Tail::Zero => EvalResult::Exact(Rat::zero()),
        Tail::Geometric { c, r } => {
            let two = Rat::from_integer(2.into());
            if *r < two {
                EvalResult::Exact(Rat::zero())
            } else if *r == two {
                // y_n = 2^n c r^(lo-n) is the constant c 2^lo
                EvalResult::Exact(c * pow2(x.lo()))
            } else {
                EvalResult::OutsideDomain("2^n x_n diverges toward -inf")
            }
        }
    }
}

fn eval_counterexample(x: &DyadicSequence) -> EvalResult {
    let window: Rat = (x.lo()..=x.hi())
        .map(|n| x.value_at(n) * counterexample_weight(n))
        .sum();
    // left side: c_n ~ 2^n toward -inf, convergence as for Summation;
    // constant tails telescope exactly, other ratios run through floats
    let left = match x.left_tail() {
        Tail::Zero => EvalResult::Exact(Rat::zero()),
        Tail::Geometric { c, r } => {
            if *r >= Rat::from_integer(2.into()) {
                return EvalResult::OutsideDomain("left tail ratio >= 2: series diverges");
            }
            if r.is_one() {
                // sum_{n < lo} c_n telescopes to 1 - 1/(1 + 2^lo)
                let tail_sum = Rat::one() - Rat::one() / (Rat::one() + pow2(x.lo()));
                EvalResult::Exact(c * tail_sum)
            } else {
                EvalResult::Approx(float_tail_sum(c, r, x.lo(), -1))
            }
        }
    };
    let right = match x.right_tail() {
        Tail::Zero => EvalResult::Exact(Rat::zero()),
        Tail::Geometric { c, r } => {
            // c_n ~ 2^{-n-1} toward +inf: converges for every r <= 1
            if r.is_one() {
                // sum_{n > hi} c_n telescopes to 1/(1 + 2^{hi+1})
                EvalResult::Exact(c * (Rat::one() / (Rat::one() + pow2(x.hi() + 1))))
            } else {
                EvalResult::Approx(float_tail_sum(c, r, x.hi(), 1))
            }
        }
    };
    match (left, right) {
        (EvalResult::Exact(l), EvalResult::Exact(rr)) => EvalResult::Exact(l + window + rr),
        (l, rr) => {
            let lf = l.approx().unwrap();
            let rf = rr.approx().unwrap();
            EvalResult::Approx(lf + rat_to_f64(&window) + rf)
        }
    }
}

/// Floating sum of `sum_{m>=1} c r^m c_{anchor + dir*m}`; converges
/// geometrically under the caller's domain checks.
fn float_tail_sum(c: &Rat, r: &Rat, anchor: i64, dir: i64) -> f64 {
    let cf = rat_to_f64(c);
    let rf = rat_to_f64(r);
    let mut acc = 0.0;
    let mut pw = 1.0;
    for m in 1..512i64 {
        pw *= rf;
        let n = anchor + dir * m;
        let term = cf * pw * rat_to_f64(&counterexample_weight(n));
        acc += term;
        if term.abs() < 1e-18 * (1.0 + acc.abs()) {
            break;
        }
    }
    acc
}

/// One comparison of `theta(x)` against `theta((1/2) S_+ x)`.
#[derive(Debug, Clone)]
pub struct ProbeLine {
    pub lhs: EvalResult,
    pub rhs: EvalResult,
    /// `None` when either side is outside the domain.
    pub equal: Option<bool>,
}

pub fn invariance_probe(theta: Theta, samples: &[DyadicSequence]) -> Result<Vec<ProbeLine>> {
    let mut out = Vec::new();
    for x in samples {
        let lhs = theta_eval(theta, x);
        let shifted = x.half_shift()?;
        let rhs = theta_eval(theta, &shifted);
        let equal = match (&lhs, &rhs) {
            (EvalResult::Exact(a), EvalResult::Exact(b)) => Some(a == b),
            (EvalResult::OutsideDomain(_), _) | (_, EvalResult::OutsideDomain(_)) => None,
            (a, b) => Some((a.approx().unwrap() - b.approx().unwrap()).abs() < 1e-12),
        };
        out.push(ProbeLine { lhs, rhs, equal });
    }
    Ok(out)
}

/// A singular-trace evaluation; the value is representation-dependent when
/// the functional is not shift invariant (flagged, not refused).
#[derive(Debug, Clone)]
pub struct TraceEval {
    pub result: EvalResult,
    pub representation_dependent: bool,
}

/// `phi(X) = theta({2^-k tau(X_k)})` through the canonical representation.
pub fn trace_eval(theta: Theta, x: &Operator) -> Result<TraceEval> {
    let rep = dyadic::decompose(x)?;
    Ok(trace_eval_on_rep(theta, &rep))
}

/// The same formula on a caller-supplied representation.
pub fn trace_eval_on_rep(theta: Theta, rep: &DyadicRep) -> TraceEval {
    TraceEval {
        result: theta_eval(theta, &rep.coefficients),
        representation_dependent: !theta.is_shift_invariant(),
    }
}

/// `theta(x) = phi(D x)`: evaluates a trace callback on the diagonal
/// embedding of a sequence.
pub fn theta_from_phi<F>(phi: F, x: &DyadicSequence, target: EmbedTarget<'_>) -> Result<EvalResult>
where
    F: Fn(&Operator) -> Result<EvalResult>,
{
    let embedded = diag_embed(x, target)?;
    phi(&embedded)
}

/// The counterexample's generating trace `f -> int_0^inf f(t)/(1+t)^2 dt`,
/// exact on explicit pieces and constant tails.
pub fn weighted_integral_trace(x: &Operator) -> Result<EvalResult> {
    let Operator::Commutative(f) = x else {
        return Err(Error::Invalid(
            "the generating trace lives on the commutative model".into(),
        ));
    };
    // int_a^b dt/(1+t)^2 = 1/(1+a) - 1/(1+b)
    let seg =
        |a: &Rat, b: &Rat| -> Rat { Rat::one() / (Rat::one() + a) - Rat::one() / (Rat::one() + b) };
    let mut acc = Rat::zero();
    for i in 0..f.piece_values().len() {
        acc += &f.piece_values()[i] * seg(&f.breakpoints()[i], &f.breakpoints()[i + 1]);
    }
    let mut approx: Option<f64> = None;
    if let Some(zt) = f.zero_tail() {
        if zt.r >= Rat::from_integer(2.into()) {
            return Ok(EvalResult::OutsideDomain(
                "zero tail not integrable against the weight",
            ));
        }
        let mut a = 0.0;
        for m in 1..512i64 {
            let n = zt.lo - m;
            let v = rat_to_f64(&zt.c) * rat_to_f64(&zt.r).powi(m as i32);
            let term = v * rat_to_f64(&seg(&pow2(n), &pow2(n + 1)));
            a += term;
            if term.abs() < 1e-18 * (1.0 + a.abs()) {
                break;
            }
        }
        approx = Some(a);
    }
    match f.inf_tail() {
        InfTail::Const(v) => {
            if !v.is_zero() {
                let t_n = f.breakpoints().last().unwrap();
                acc += v * (Rat::one() / (Rat::one() + t_n));
            }
        }
        InfTail::Geom { c, r, hi } => {
            let mut a = approx.unwrap_or(0.0);
            for m in 1..512i64 {
                let n = hi + m;
                let v = rat_to_f64(c) * rat_to_f64(r).powi(m as i32);
                let term = v * rat_to_f64(&seg(&pow2(n), &pow2(n + 1)));
                a += term;
                if term.abs() < 1e-18 * (1.0 + a.abs()) {
                    break;
                }
            }
            approx = Some(a);
        }
    }
    Ok(match approx {
        None => EvalResult::Exact(acc),
        Some(a) => EvalResult::Approx(a + rat_to_f64(&acc)),
    })
}

/// Structural classification against the indicator probes.
#[derive(Debug, Clone)]
pub struct ClassReport {
    pub supported_at_plus_inf: bool,
    pub supported_at_minus_inf: bool,
    pub positive: bool,
    pub chi_z: EvalResult,
    pub normalised: Option<bool>,
    /// `theta(chi_(-inf, a))` for probes `a = -8..=8`.
    pub below_probes: Vec<EvalResult>,
    /// `theta(chi_(a, +inf))` for the same probes.
    pub above_probes: Vec<EvalResult>,
}

pub fn classify(theta: Theta) -> ClassReport {
    let zero = Rat::zero();
    let mut below = Vec::new();
    let mut above = Vec::new();
    let mut at_plus = true;
    let mut at_minus = true;
    for a in -8..=8i64 {
        let b = theta_eval(theta, &DyadicSequence::indicator_below(a));
        if b.exact() != Some(&zero) {
            at_plus = false;
        }
        below.push(b);
        let u = theta_eval(theta, &DyadicSequence::indicator_above(a));
        if u.exact() != Some(&zero) {
            at_minus = false;
        }
        above.push(u);
    }
    let chi_z = theta_eval(theta, &DyadicSequence::const_one());
    let normalised = match &chi_z {
        EvalResult::Exact(v) => Some(v.is_one()),
        EvalResult::Approx(v) => Some((v - 1.0).abs() < 1e-12),
        EvalResult::OutsideDomain(_) => None,
    };
    ClassReport {
        supported_at_plus_inf: at_plus,
        supported_at_minus_inf: at_minus,
        // every implemented variant has nonnegative weights or limit data
        positive: true,
        chi_z,
        normalised,
        below_probes: below,
        above_probes: above,
    }
}

/// Compares `phi(X)` with `phi(D Phi_av mu(X))` for positive operators; the
/// equality is exact in the rational tier.
#[derive(Debug, Clone)]
pub struct PhiAvReport {
    pub lhs: EvalResult,
    pub rhs: EvalResult,
    pub equal: Option<bool>,
}

pub fn phi_av_identity_check(theta: Theta, x: &Operator) -> Result<PhiAvReport> {
    if !operator_nonnegative(x) {
        return Err(Error::Invalid(
            "the averaging identity is stated for positive operators".into(),
        ));
    }
    let lhs = trace_eval(theta, x)?.result;
    let averages = match x {
        Operator::Commutative(f) => f.mu().phi_av()?,
        Operator::Block(_) => x.singular_value_function()?.mu().phi_av()?,
    };
    let embedded = diag_embed(&averages, EmbedTarget::Commutative)?;
    let rhs = trace_eval(theta, &embedded)?.result;
    let equal = match (&lhs, &rhs) {
        (EvalResult::Exact(a), EvalResult::Exact(b)) => Some(a == b),
        (EvalResult::OutsideDomain(_), EvalResult::OutsideDomain(_)) => Some(true),
        (EvalResult::OutsideDomain(_), _) | (_, EvalResult::OutsideDomain(_)) => Some(false),
        (a, b) => Some((a.approx().unwrap() - b.approx().unwrap()).abs() < 1e-12),
    };
    Ok(PhiAvReport { lhs, rhs, equal })
}

fn operator_nonnegative(x: &Operator) -> bool {
    match x {
        Operator::Commutative(f) => {
            let ok_pieces = f.piece_values().iter().all(|v| !v.is_negative());
            let ok_zero = f.zero_tail().map(|zt| zt.c.is_positive()).unwrap_or(true);
            let ok_inf = match f.inf_tail() {
                InfTail::Const(v) => !v.is_negative(),
                InfTail::Geom { c, .. } => c.is_positive(),
            };
            ok_pieces && ok_zero && ok_inf
        }
        Operator::Block(b) => b.matrices.iter().all(|m| match m {
            crate::opmodel::BlockMatrix::Diag(d) => d.iter().all(|v| !v.is_negative()),
            crate::opmodel::BlockMatrix::Dense(_) => false,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opmodel::BlockAlgebra;
    use crate::transfer;
    use num_bigint::BigInt;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(BigInt::from(p), BigInt::from(q))
    }
    fn ri(p: i64) -> Rat {
        r(p, 1)
    }

    fn diag_op(entries: &[i64]) -> Operator {
        let alg = BlockAlgebra::single(entries.len(), ri(1));
        Operator::diagonal(alg, vec![entries.iter().map(|&p| ri(p)).collect()]).unwrap()
    }

    #[test]
    fn summation_basics() {
        let e0 = DyadicSequence::unit(0);
        assert_eq!(theta_eval(Theta::Summation, &e0), EvalResult::Exact(ri(1)));
        // left geometric with r = 1/2: sum_m (1/2)^m 2^(-m) = 1/3
        let x = DyadicSequence::new(
            0,
            vec![ri(0)],
            Tail::Geometric { c: ri(1), r: r(1, 2) },
            Tail::Zero,
        )
        .unwrap();
        assert_eq!(theta_eval(Theta::Summation, &x), EvalResult::Exact(r(1, 3)));
        assert!(!theta_eval(Theta::Summation, &DyadicSequence::const_one()).defined());
    }

    #[test]
    fn limit_minus_conjugation() {
        // left tail r = 2 anchored at 0: y_n = 1, limit 1
        let x = DyadicSequence::new(
            0,
            vec![ri(5)],
            Tail::Geometric { c: ri(1), r: ri(2) },
            Tail::Zero,
        )
        .unwrap();
        assert_eq!(theta_eval(Theta::LimitMinus, &x), EvalResult::Exact(ri(1)));
        for n in [-1i64, -17, -40] {
            assert_eq!(x.value_at(n) * pow2(n), ri(1));
        }
        let bounded =
            DyadicSequence::new(0, vec![ri(5)], Tail::constant(ri(3)), Tail::Zero).unwrap();
        assert_eq!(
            theta_eval(Theta::LimitMinus, &bounded),
            EvalResult::Exact(ri(0))
        );
    }

    #[test]
    fn limit_plus_on_chi_z() {
        let chi = DyadicSequence::const_one();
        assert!(!theta_eval(Theta::LimitPlus, &chi).defined());
        assert_eq!(theta_eval(Theta::LimitMinus, &chi), EvalResult::Exact(ri(0)));
        let x = DyadicSequence::new(
            0,
            vec![ri(1)],
            Tail::constant(ri(1)),
            Tail::Geometric { c: ri(1), r: r(1, 2) },
        )
        .unwrap();
        assert_eq!(theta_eval(Theta::LimitPlus, &x), EvalResult::Exact(ri(1)));
    }

    #[test]
    fn cesaro_extends_limits_on_class() {
        let x = DyadicSequence::new(
            0,
            vec![ri(2)],
            Tail::Geometric { c: ri(1), r: ri(2) },
            Tail::Geometric { c: ri(3), r: r(1, 2) },
        )
        .unwrap();
        assert_eq!(
            theta_eval(Theta::CesaroMinus, &x),
            theta_eval(Theta::LimitMinus, &x)
        );
        assert_eq!(
            theta_eval(Theta::CesaroPlus, &x),
            theta_eval(Theta::LimitPlus, &x)
        );
    }

    #[test]
    fn counterexample_weights_and_values() {
        assert_eq!(counterexample_weight(0), r(1, 6));
        assert_eq!(counterexample_weight(1), r(2, 15));
        assert_eq!(counterexample_weight(-1), r(1, 6));
        let e0 = DyadicSequence::unit(0);
        let theta = counterexample_theta();
        assert_eq!(theta_eval(theta, &e0), EvalResult::Exact(r(1, 6)));
        let shifted = e0.half_shift().unwrap();
        assert_eq!(theta_eval(theta, &shifted), EvalResult::Exact(r(1, 15)));
        // telescoping: theta(chi_Z) = 1 exactly
        assert_eq!(
            theta_eval(theta, &DyadicSequence::const_one()),
            EvalResult::Exact(ri(1))
        );
        // partial sums telescope exactly: sum over [-N, N] equals
        // 1/(1+2^-N) - 1/(1+2^(N+1)), and the residual at N = 20 is
        // 2^-20/(1+2^-20) + 1/(1+2^21), roughly 1.43e-6
        let mut partial = Rat::zero();
        for n in -20..=20i64 {
            partial += counterexample_weight(n);
        }
        let closed =
            ri(1) / (ri(1) + pow2(-20)) - ri(1) / (ri(1) + pow2(21));
        assert_eq!(partial, closed);
        let err = ri(1) - &partial;
        assert!(err.is_positive());
        let e = rat_to_f64(&err);
        assert!(e > 1.0e-6 && e < 1.5e-6, "residual at N=20 is {e}");
        // one more step brings it under 1e-6
        let mut partial21 = Rat::zero();
        for n in -21..=21i64 {
            partial21 += counterexample_weight(n);
        }
        assert!(rat_to_f64(&(ri(1) - partial21)) < 1e-6);
    }

    #[test]
    fn invariance_probe_flags_only_the_counterexample() {
        let samples = vec![
            DyadicSequence::unit(0),
            DyadicSequence::from_window(-2, vec![ri(3), ri(1), ri(2)]).unwrap(),
            DyadicSequence::new(
                0,
                vec![ri(1)],
                Tail::Geometric { c: ri(1), r: ri(2) },
                Tail::Geometric { c: ri(1), r: r(1, 2) },
            )
            .unwrap(),
        ];
        for theta in Theta::all() {
            let lines = invariance_probe(theta, &samples).unwrap();
            for (i, line) in lines.iter().enumerate() {
                if theta.is_shift_invariant() {
                    assert_ne!(line.equal, Some(false), "{} on sample {i}", theta.name());
                } else if i == 0 {
                    // the counterexample disagrees already on e_0
                    assert_eq!(line.equal, Some(false));
                }
            }
        }
    }

    #[test]
    fn invariance_forces_zero_on_chi_z() {
        // (1/2) S_+ chi_Z = (1/2) chi_Z, so any invariant theta defined at
        // chi_Z vanishes there
        let chi = DyadicSequence::const_one();
        for theta in Theta::all() {
            if !theta.is_shift_invariant() {
                continue;
            }
            if let EvalResult::Exact(v) = theta_eval(theta, &chi) {
                assert!(v.is_zero(), "{}", theta.name());
            }
        }
    }

    #[test]
    fn trace_recovers_tau_for_summation() {
        let x = diag_op(&[8, 4, 2, 1]);
        let te = trace_eval(Theta::Summation, &x).unwrap();
        assert_eq!(te.result, EvalResult::Exact(ri(15)));
        assert!(!te.representation_dependent);
        assert_eq!(x.trace().exact(), Some(&ri(15)));
        assert_eq!(
            trace_eval(Theta::LimitPlus, &x).unwrap().result,
            EvalResult::Exact(ri(0))
        );
        assert_eq!(
            trace_eval(Theta::LimitMinus, &x).unwrap().result,
            EvalResult::Exact(ri(0))
        );
    }

    #[test]
    fn singular_values_of_the_two_canonical_elements() {
        // weak-type element: x_n = 2^-n for n >= 0, 1 on the left
        let weak = DyadicSequence::new(
            0,
            vec![ri(1)],
            Tail::constant(ri(1)),
            Tail::Geometric { c: ri(1), r: r(1, 2) },
        )
        .unwrap();
        let op = Operator::commutative(transfer::pietsch_d(&weak));
        assert_eq!(
            trace_eval(Theta::LimitPlus, &op).unwrap().result,
            EvalResult::Exact(ri(1))
        );
        assert!(!trace_eval(Theta::Summation, &op).unwrap().result.defined());
        // the r=2 element, f ~ 1/t near zero
        let spike = StepFunction::new(
            Some(crate::step::ZeroTail {
                c: ri(1),
                r: ri(2),
                lo: 0,
            }),
            vec![ri(1)],
            vec![],
            InfTail::Const(Rat::zero()),
        )
        .unwrap();
        let op2 = Operator::commutative(spike);
        assert_eq!(
            trace_eval(Theta::LimitMinus, &op2).unwrap().result,
            EvalResult::Exact(ri(1))
        );
        let bounded =
            Operator::commutative(StepFunction::scaled_indicator(ri(0), ri(8), ri(3)).unwrap());
        assert_eq!(
            trace_eval(Theta::LimitMinus, &bounded).unwrap().result,
            EvalResult::Exact(ri(0))
        );
    }

    #[test]
    fn round_trip_through_the_embedding() {
        let x = DyadicSequence::from_window(0, vec![ri(3), r(5, 2)]).unwrap();
        let alg = BlockAlgebra::single(4, ri(1));
        for theta in [Theta::Summation, Theta::LimitMinus] {
            let via_block = theta_from_phi(
                |op| Ok(trace_eval(theta, op)?.result),
                &x,
                EmbedTarget::Block(&alg),
            )
            .unwrap();
            assert_eq!(via_block, theta_eval(theta, &x), "{}", theta.name());
            let via_comm = theta_from_phi(
                |op| Ok(trace_eval(theta, op)?.result),
                &x,
                EmbedTarget::Commutative,
            )
            .unwrap();
            assert_eq!(via_comm, theta_eval(theta, &x), "{}", theta.name());
        }
    }

    #[test]
    fn counterexample_trace_matches_generating_integral() {
        // int over chi_[1,2) of dt/(1+t)^2 = 1/2 - 1/3 = 1/6 = c_0
        let e0 = DyadicSequence::unit(0);
        let f = transfer::pietsch_d(&e0);
        let v = weighted_integral_trace(&Operator::commutative(f)).unwrap();
        assert_eq!(v, EvalResult::Exact(r(1, 6)));
        assert_eq!(
            theta_eval(counterexample_theta(), &e0),
            EvalResult::Exact(r(1, 6))
        );
    }

    #[test]
    fn classify_reports() {
        let plus = classify(Theta::LimitPlus);
        assert!(plus.supported_at_plus_inf);
        assert!(!plus.supported_at_minus_inf);
        assert!(plus.positive);
        assert_eq!(plus.normalised, None); // chi_Z outside the domain

        let minus = classify(Theta::LimitMinus);
        assert!(minus.supported_at_minus_inf);
        assert_eq!(minus.chi_z, EvalResult::Exact(ri(0)));
        assert_eq!(minus.normalised, Some(false));

        let summ = classify(Theta::Summation);
        assert!(!summ.supported_at_plus_inf);
        assert!(!summ.supported_at_minus_inf);
        // theta(chi_(-inf,a)) = 2^a; probe index 8 is a = 0
        assert_eq!(summ.below_probes[8], EvalResult::Exact(ri(1)));

        let cx = classify(counterexample_theta());
        assert_eq!(cx.normalised, Some(true));
        assert!(!cx.supported_at_plus_inf);
    }

    #[test]
    fn phi_av_identity() {
        let x = diag_op(&[8, 4, 2, 1]);
        let rep = phi_av_identity_check(Theta::Summation, &x).unwrap();
        assert_eq!(rep.lhs, EvalResult::Exact(ri(15)));
        assert_eq!(rep.equal, Some(true));
        // the r=2 spike under LimitMinus: both sides 1
        let spike = StepFunction::new(
            Some(crate::step::ZeroTail {
                c: ri(1),
                r: ri(2),
                lo: 0,
            }),
            vec![ri(1)],
            vec![],
            InfTail::Const(Rat::zero()),
        )
        .unwrap();
        let rep2 =
            phi_av_identity_check(Theta::LimitMinus, &Operator::commutative(spike)).unwrap();
        assert_eq!(rep2.lhs, EvalResult::Exact(ri(1)));
        assert_eq!(rep2.equal, Some(true));
        // trivial case: a diagonal embedding of nonincreasing data
        let x3 =
            DyadicSequence::new(0, vec![ri(4), ri(2)], Tail::constant(ri(4)), Tail::Zero).unwrap();
        let op3 = diag_embed(&x3, EmbedTarget::Commutative).unwrap();
        let rep3 = phi_av_identity_check(Theta::LimitMinus, &op3).unwrap();
        assert_eq!(rep3.equal, Some(true));
    }

    #[test]
    fn welldefinedness_vanishes_for_invariant_thetas() {
        let x = diag_op(&[8, 4, 2, 1]);
        let rep1 = dyadic::decompose(&x).unwrap();
        let p2 = diag_op(&[8, 4, 0, 0]);
        let p3 = diag_op(&[0, 0, 2, 1]);
        let rep2 = dyadic::from_block_parts(x.clone(), vec![(2, p2), (3, p3)]).unwrap();
        let (a, b) = dyadic::welldefinedness_witness(&rep1, &rep2).unwrap();
        for theta in [Theta::Summation, Theta::LimitPlus, Theta::LimitMinus] {
            if let EvalResult::Exact(v) = theta_eval(theta, &a) {
                assert!(v.is_zero(), "{} on a", theta.name());
            }
            let diff = b.sub(&b.half_shift().unwrap()).unwrap();
            if let EvalResult::Exact(v) = theta_eval(theta, &diff) {
                assert!(v.is_zero(), "{} on coboundary", theta.name());
            }
        }
        for theta in [Theta::Summation, Theta::LimitPlus, Theta::LimitMinus] {
            assert_eq!(
                trace_eval_on_rep(theta, &rep1).result,
                trace_eval_on_rep(theta, &rep2).result,
                "{}",
                theta.name()
            );
        }
        // and the counterexample weights disagree across representations
        let t1 = trace_eval_on_rep(counterexample_theta(), &rep1);
        let t2 = trace_eval_on_rep(counterexample_theta(), &rep2);
        assert!(t1.representation_dependent);
        assert_ne!(t1.result, t2.result);
    }
}
