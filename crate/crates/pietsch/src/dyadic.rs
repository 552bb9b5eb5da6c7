//! Dyadic representations `X = sum_k X_k` with `tau(s(X_k)) <= 2^k` and the
//! residual-norm sequence `{ ||X - sum_{k<=n} X_k|| }`.
//!
//! Block subjects are decomposed through the strict spectral projections
//! `P_k = E^{|X|}(mu(2^k, X), inf)` with parts `X_k = X(P_{k-1} - P_{k-2})`,
//! which realizes the sharp bounds `tau(P_k) <= 2^k` and
//! `||X - sum_{k<=n} X_k|| <= mu(2^{n-1}, X)`. Commutative subjects keep the
//! dyadic-cell family `X_k = f chi_[2^{k-shift}, 2^{k-shift+1))` symbolically
//! (shift 0 from decomposition; summing two representations shifts by one).

use crate::error::{Error, Result};
use crate::opmodel::Operator;
use crate::rat::{floor_log2, pow2, rat_pow, Rat};
use crate::seq::{DyadicSequence, Tail};
use crate::step::{Ext, InfTail, StepFunction};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone)]
pub enum Parts {
    /// Explicit nonzero parts `(k, X_k)`, sorted by `k`.
    Block(Vec<(i64, Operator)>),
    /// Cell family `X_k = f chi_[2^(k-shift), 2^(k-shift+1))`.
    CommutativeCells { shift: i64 },
}

#[derive(Debug, Clone)]
pub struct DyadicRep {
    pub subject: Operator,
    pub parts: Parts,
    /// `{ 2^-k tau(X_k) }`.
    pub coefficients: DyadicSequence,
    /// `{ ||X - sum_{k<=n} X_k|| }`, the actual uniform norms.
    pub residuals: DyadicSequence,
}

/// Decomposes an operator into its canonical dyadic representation.
pub fn decompose(x: &Operator) -> Result<DyadicRep> {
    match x {
        Operator::Commutative(f) => decompose_commutative(f),
        Operator::Block(_) => decompose_block(x),
    }
}

fn decompose_block(x: &Operator) -> Result<DyadicRep> {
    if !x.is_exact_tier() {
        return Err(Error::ExactTierRequired(
            "dyadic thresholds sit exactly at singular values; dense matrices tie at \
             every cut, diagonalize first"
                .into(),
        ));
    }
    if x.is_zero() {
        return Ok(DyadicRep {
            subject: x.clone(),
            parts: Parts::Block(vec![]),
            coefficients: DyadicSequence::zero(),
            residuals: DyadicSequence::zero(),
        });
    }
    let algebra = x.algebra().expect("block operator has an algebra");
    let w_min = algebra
        .blocks
        .iter()
        .map(|b| b.weight.clone())
        .min()
        .expect("nonempty algebra");
    let total = algebra.trace_identity();
    let k_from = floor_log2(&w_min) - 1;
    let mut k_to = floor_log2(&total);
    while pow2(k_to) < total {
        k_to += 1;
    }
    k_to += 2;

    // strict spectral projections at the dyadic samples of mu
    let mut projections = Vec::new(); // index i holds P_k for k = k_from - 2 + i
    for k in (k_from - 2)..=k_to {
        let threshold = x.mu_at(&pow2(k))?;
        projections.push(x.spectral_projection(&threshold)?);
    }
    let proj_at = |k: i64| &projections[(k - (k_from - 2)) as usize];

    let mut parts: Vec<(i64, Operator)> = Vec::new();
    for k in k_from..=(k_to + 2) {
        let hi_k = (k - 1).min(k_to);
        let lo_k = (k - 2).min(k_to);
        let high = x.apply_projection(proj_at(hi_k))?;
        let low = x.apply_projection(proj_at(lo_k))?;
        let part = high.sub(&low)?;
        if !part.is_zero() {
            parts.push((k, part));
        }
    }
    debug_assert_eq!(
        proj_at(k_to).tau,
        x.support_projection()?.tau,
        "projection chain must exhaust the support"
    );
    from_block_parts(x.clone(), parts)
}

/// Builds a representation from explicit parts, computing coefficients and
/// actual residual norms. Validity (support bounds, the sum) is checked by
/// `validate`, not here, so corrupted representations can be constructed as
/// negative controls.
pub fn from_block_parts(subject: Operator, mut parts: Vec<(i64, Operator)>) -> Result<DyadicRep> {
    parts.sort_by_key(|(k, _)| *k);
    parts.retain(|(_, p)| !p.is_zero());
    for w in parts.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::Invalid("duplicate part index".into()));
        }
    }
    let coefficients = if parts.is_empty() {
        DyadicSequence::zero()
    } else {
        let lo = parts[0].0;
        let hi = parts.last().unwrap().0;
        let mut vals = vec![Rat::zero(); (hi - lo + 1) as usize];
        for (k, p) in &parts {
            let tau = p
                .trace()
                .exact()
                .cloned()
                .ok_or_else(|| Error::ExactTierRequired("coefficients need exact traces".into()))?;
            vals[(k - lo) as usize] = tau / pow2(*k);
        }
        DyadicSequence::new(lo, vals, Tail::Zero, Tail::Zero)?
    };
    // residual_n = || subject - sum_{k<=n} parts ||, computed outright
    let norm_full = norm_of(&subject)?;
    let residuals = if parts.is_empty() {
        if norm_full.is_zero() {
            DyadicSequence::zero()
        } else {
            DyadicSequence::new(
                0,
                vec![norm_full.clone()],
                Tail::constant(norm_full),
                Tail::Zero,
            )?
        }
    } else {
        let lo = parts[0].0;
        let hi = parts.last().unwrap().0;
        let mut vals = Vec::new();
        let mut running = subject.clone();
        for n in lo..=hi {
            if let Some((_, p)) = parts.iter().find(|(k, _)| *k == n) {
                running = running.sub(p)?;
            }
            vals.push(norm_of(&running)?);
        }
        DyadicSequence::new(lo, vals, Tail::constant(norm_full), Tail::Zero)?
    };
    Ok(DyadicRep {
        subject,
        parts: Parts::Block(parts),
        coefficients,
        residuals,
    })
}

fn norm_of(x: &Operator) -> Result<Rat> {
    match x.norm_inf()? {
        Ext::Finite(v) => Ok(v),
        _ => Err(Error::Invalid("unbounded operator norm".into())),
    }
}

fn decompose_commutative(f: &StepFunction) -> Result<DyadicRep> {
    cell_rep(f, 0)
}

/// The cell-family representation of a commutative operator at a given
/// shift, with coefficients and residuals derived in closed form.
pub fn cell_rep(f: &StepFunction, shift: i64) -> Result<DyadicRep> {
    Ok(DyadicRep {
        subject: Operator::Commutative(f.clone()),
        parts: Parts::CommutativeCells { shift },
        coefficients: cell_average_sequence(f, shift)?,
        residuals: residual_sequence(f, shift)?,
    })
}

/// `a_k = 2^-k int over [2^(k-shift), 2^(k-shift+1)) of f`, with the tails of
/// `f` passing through as geometric laws.
pub fn cell_average_sequence(f: &StepFunction, shift: i64) -> Result<DyadicSequence> {
    let direct = direct_cell_averages(f)?;
    // a_k = 2^-shift * avg_(k-shift)
    Ok(direct.shift(shift)?.scale(&pow2(-shift)))
}

/// Averages of `f` (not of its rearrangement) over the dyadic cells.
fn direct_cell_averages(f: &StepFunction) -> Result<DyadicSequence> {
    let (w_lo, w_hi) = cell_window(f);
    let values: Vec<Rat> = (w_lo..=w_hi)
        .map(|n| {
            f.integrate(&pow2(n), Some(&pow2(n + 1)))
                .finite()
                .expect("cell integrals of step data are finite")
                .clone()
                / pow2(n)
        })
        .collect();
    DyadicSequence::new(w_lo, values, left_law_tail(f, w_lo), right_law_tail(f, w_hi))
}

/// Per-cell sup of `|f|`, as a sequence with the tails of `f` as laws.
fn cell_sup_sequence(f: &StepFunction) -> Result<DyadicSequence> {
    let g = f.abs();
    let (w_lo, w_hi) = cell_window(&g);
    let values: Vec<Rat> = (w_lo..=w_hi)
        .map(|n| {
            let a = pow2(n);
            let b = pow2(n + 1);
            let mut m = g.value_at(&a);
            for t in g.breakpoints() {
                if *t > a && *t < b {
                    let v = g.value_at(t);
                    if v > m {
                        m = v;
                    }
                }
            }
            m
        })
        .collect();
    DyadicSequence::new(w_lo, values, left_law_tail(&g, w_lo), right_law_tail(&g, w_hi))
}

fn left_law_tail(f: &StepFunction, anchor: i64) -> Tail {
    match f.zero_tail() {
        Some(zt) => Tail::Geometric {
            c: &zt.c * rat_pow(&zt.r, zt.lo - anchor),
            r: zt.r.clone(),
        },
        None => {
            let v = if f.piece_values().is_empty() {
                match f.inf_tail() {
                    InfTail::Const(v) => v.clone(),
                    InfTail::Geom { .. } => unreachable!("staircase tails require pieces"),
                }
            } else {
                f.piece_values()[0].clone()
            };
            Tail::geometric(v, Rat::one())
        }
    }
}

fn right_law_tail(f: &StepFunction, anchor: i64) -> Tail {
    match f.inf_tail() {
        InfTail::Const(v) => Tail::geometric(v.clone(), Rat::one()),
        InfTail::Geom { c, r, hi } => Tail::Geometric {
            c: c * rat_pow(r, anchor - hi),
            r: r.clone(),
        },
    }
}

/// Window of cells that covers every explicit breakpoint, with a spare cell
/// on each side so the tails re-anchor cleanly.
fn cell_window(f: &StepFunction) -> (i64, i64) {
    let mut lo = match f.zero_tail() {
        Some(zt) => zt.lo,
        None => 0,
    };
    let mut hi = lo;
    for t in f.breakpoints() {
        if t.is_positive() {
            let n = floor_log2(t);
            lo = lo.min(n);
            hi = hi.max(n + 1);
        }
    }
    if let InfTail::Geom { hi: h, .. } = f.inf_tail() {
        hi = hi.max(h + 1);
    }
    (lo - 1, hi)
}

/// Residual sequence of the cell family with the given shift:
/// `residual_n = sup_{t >= 2^(n+1-shift)} |f|`.
fn residual_sequence(f: &StepFunction, shift: i64) -> Result<DyadicSequence> {
    let sup = cell_sup_sequence(f)?;
    let o = sup.ordering_numbers();
    o.shift(shift - 1)
}

/// Restriction of `f` to the dyadic cell `[2^n, 2^{n+1})`.
pub fn restrict_to_cell(f: &StepFunction, n: i64) -> StepFunction {
    let a = pow2(n);
    let b = pow2(n + 1);
    let mut cuts = vec![Rat::zero(), a.clone()];
    let mut vals = vec![Rat::zero()];
    let mut interior: Vec<Rat> = f
        .breakpoints()
        .iter()
        .filter(|t| **t > a && **t < b)
        .cloned()
        .collect();
    interior.push(b.clone());
    interior.sort();
    interior.dedup();
    let mut left = a.clone();
    for t in interior {
        vals.push(f.value_at(&left));
        cuts.push(t.clone());
        left = t;
    }
    StepFunction::new(None, cuts, vals, InfTail::Const(Rat::zero()))
        .expect("cell restriction is a valid step function")
}

impl DyadicRep {
    /// Materializes the part `X_k`.
    pub fn part_at(&self, k: i64) -> Result<Operator> {
        match (&self.parts, &self.subject) {
            (Parts::Block(parts), _) => Ok(parts
                .iter()
                .find(|(i, _)| *i == k)
                .map(|(_, p)| p.clone())
                .unwrap_or_else(|| self.subject.zero_like())),
            (Parts::CommutativeCells { shift }, Operator::Commutative(f)) => {
                Ok(Operator::Commutative(restrict_to_cell(f, k - shift)))
            }
            _ => Err(Error::Invalid("parts do not match the subject".into())),
        }
    }

    /// `{ 2^-k tau(X_k) }`.
    pub fn coefficient_sequence(&self) -> &DyadicSequence {
        &self.coefficients
    }

    /// Part indices carrying data (a finite window for cell families).
    pub fn active_range(&self) -> (i64, i64) {
        match &self.parts {
            Parts::Block(parts) => {
                if parts.is_empty() {
                    (0, 0)
                } else {
                    (parts[0].0, parts.last().unwrap().0)
                }
            }
            Parts::CommutativeCells { .. } => (self.coefficients.lo(), self.coefficients.hi()),
        }
    }
}

/// Validation report: every invariant re-derived from scratch.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// `(k, tau(s(X_k)), 2^k)` for each inspected part.
    pub support_bounds: Vec<(i64, Rat, Rat)>,
    pub support_ok: bool,
    pub sum_matches_subject: bool,
    pub residuals_match: bool,
    /// Residual-membership probe against a generator: smallest `(C, k)` with
    /// `o(residuals) <= C o(S_+^k g)` over the tested ranges.
    pub membership: Option<(Rat, i64)>,
}

impl ValidationReport {
    pub fn all_ok(&self) -> bool {
        self.support_ok && self.sum_matches_subject && self.residuals_match
    }
}

/// Re-derives the defining invariants and reports margins; membership of the
/// residuals is probed against a caller-supplied generator sequence.
pub fn validate(
    rep: &DyadicRep,
    probe_generator: Option<&DyadicSequence>,
) -> Result<ValidationReport> {
    let mut support_bounds = Vec::new();
    let mut support_ok = true;
    let (lo, hi) = rep.active_range();
    for k in lo..=hi {
        let part = rep.part_at(k)?;
        if part.is_zero() {
            continue;
        }
        let tau = match part.support_projection()?.tau {
            Ext::Finite(v) => v,
            _ => return Err(Error::Invalid("infinite part support".into())),
        };
        let bound = pow2(k);
        if tau > bound {
            support_ok = false;
        }
        support_bounds.push((k, tau, bound));
    }
    // sum of parts against the subject
    let mut running = rep.subject.zero_like();
    for k in lo..=hi {
        running = running.add(&rep.part_at(k)?)?;
    }
    let sum_matches_subject = match (&rep.parts, &rep.subject) {
        (Parts::Block(_), subject) => subject.sub(&running)?.is_zero(),
        (Parts::CommutativeCells { shift }, Operator::Commutative(f)) => {
            // the window of materialized cells must reproduce f there; the
            // cells beyond the window tile by construction
            let Operator::Commutative(partial) = &running else {
                unreachable!()
            };
            let lo_t = pow2(lo - shift);
            let hi_t = pow2(hi - shift + 1);
            let mut ok = true;
            let probes = [
                &lo_t * Rat::new(3.into(), 2.into()),
                hi_t.clone() - &lo_t / Rat::from_integer(2.into()),
            ];
            for t in probes.iter().chain(f.breakpoints().iter()) {
                if *t > lo_t && *t < hi_t && f.value_at(t) != partial.value_at(t) {
                    ok = false;
                }
            }
            ok
        }
        _ => false,
    };
    // recompute residual norms
    let mut residuals_match = true;
    match &rep.parts {
        Parts::Block(parts) => {
            let mut running = rep.subject.clone();
            for n in (lo - 1)..=(hi + 1) {
                if let Some((_, p)) = parts.iter().find(|(k, _)| *k == n) {
                    running = running.sub(p)?;
                }
                if rep.residuals.value_at(n) != norm_of(&running)? {
                    residuals_match = false;
                }
            }
        }
        Parts::CommutativeCells { shift } => {
            let Operator::Commutative(f) = &rep.subject else {
                unreachable!()
            };
            residuals_match = residual_sequence(f, *shift)? == rep.residuals;
        }
    }
    let membership = probe_generator.and_then(|g| {
        let o_res = rep.residuals.ordering_numbers();
        for k in 0..=8i64 {
            let shifted = g.shift(k).ok()?;
            let o_g = shifted.ordering_numbers();
            for j in -8..=8i64 {
                let c = pow2(j);
                if o_res.pointwise_le(&o_g.scale(&c)) {
                    return Some((c, k));
                }
            }
        }
        None
    });
    Ok(ValidationReport {
        support_bounds,
        support_ok,
        sum_matches_subject,
        residuals_match,
        membership,
    })
}

/// `X + Y = sum_k (X_{k-1} + Y_{k-1})`: the summed representation, reindexed
/// up by one so the support bounds carry over.
pub fn sum_reps(rep_x: &DyadicRep, rep_y: &DyadicRep) -> Result<DyadicRep> {
    match (&rep_x.parts, &rep_y.parts) {
        (Parts::Block(px), Parts::Block(py)) => {
            let subject = rep_x.subject.add(&rep_y.subject)?;
            let mut by_k: std::collections::BTreeMap<i64, Operator> = Default::default();
            for (k, p) in px.iter().chain(py.iter()) {
                match by_k.entry(k + 1) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(p.clone());
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let merged = e.get().add(p)?;
                        e.insert(merged);
                    }
                }
            }
            from_block_parts(subject, by_k.into_iter().collect())
        }
        (Parts::CommutativeCells { shift: sx }, Parts::CommutativeCells { shift: sy }) => {
            if sx != sy {
                return Err(Error::Invalid(
                    "cell families with different shifts do not align".into(),
                ));
            }
            let subject = rep_x.subject.add(&rep_y.subject)?;
            let Operator::Commutative(f) = &subject else {
                unreachable!()
            };
            let shift = sx + 1;
            Ok(DyadicRep {
                coefficients: cell_average_sequence(f, shift)?,
                residuals: residual_sequence(f, shift)?,
                parts: Parts::CommutativeCells { shift },
                subject: subject.clone(),
            })
        }
        _ => Err(Error::Invalid(
            "cannot sum block and commutative representations".into(),
        )),
    }
}

/// The well-definedness witness for two representations of the same subject:
/// `a = coefficients(rep1) - coefficients(rep2)` and
/// `b_k = 2^-k tau(sum_{n<=k} (X_n - Y_n))` satisfy `a = b - (1/2) S_+ b`
/// exactly.
pub fn welldefinedness_witness(
    rep1: &DyadicRep,
    rep2: &DyadicRep,
) -> Result<(DyadicSequence, DyadicSequence)> {
    let a = rep1.coefficients.sub(&rep2.coefficients)?;
    let (lo1, hi1) = rep1.active_range();
    let (lo2, hi2) = rep2.active_range();
    let lo = lo1.min(lo2);
    let hi = hi1.max(hi2) + 1;
    let mut partial = rep1.subject.zero_like();
    let mut vals = Vec::new();
    for k in lo..=hi {
        let diff = rep1.part_at(k)?.sub(&rep2.part_at(k)?)?;
        partial = partial.add(&diff)?;
        let tau = partial
            .trace()
            .exact()
            .cloned()
            .ok_or_else(|| Error::ExactTierRequired("witness needs exact traces".into()))?;
        vals.push(tau / pow2(k));
    }
    let b = DyadicSequence::new(lo, vals, Tail::Zero, Tail::Zero)?;
    let check = b.sub(&b.half_shift()?)?;
    if check != a {
        return Err(Error::Invalid(
            "witness identity a = b - (1/2) S+ b failed; representations do not share a subject"
                .into(),
        ));
    }
    Ok((a, b))
}
