//! Finite semifinite-algebra models: weighted block-matrix algebras and
//! commutative step-function algebras, with trace, singular value function,
//! and spectral/support projections.
//!
//! Two numeric tiers: real diagonal matrices and commutative data are exact
//! (every lemma verification runs here); generic dense matrices go through a
//! floating eigensolver with tolerance `EPS = 1e-9`. Singular values from the
//! floating tier are embedded back into rationals exactly (the binary value
//! of the double), so downstream step-function arithmetic stays exact and
//! tolerances apply only where results are compared.

use crate::error::{Error, Result};
use crate::rat::{pow2, rat_from_f64, rat_to_f64, Rat};
use crate::seq::DyadicSequence;
use crate::step::{Ext, InfTail, StepFunction, ZeroTail};
use crate::transfer;
use nalgebra::{Complex, DMatrix};
use num_traits::{One, Signed, Zero};

pub type C64 = Complex<f64>;

/// Numeric-tier tolerance for eigenvalue/rank decisions.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    pub dim: usize,
    pub weight: Rat,
}

/// A finite direct sum of matrix blocks; the minimal projections of block `j`
/// are atoms of trace `w_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockAlgebra {
    pub blocks: Vec<BlockSpec>,
}

impl BlockAlgebra {
    pub fn new(blocks: Vec<(usize, Rat)>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Invalid("algebra needs at least one block".into()));
        }
        for (d, w) in &blocks {
            if *d == 0 || !w.is_positive() {
                return Err(Error::Invalid("blocks need dim >= 1 and weight > 0".into()));
            }
        }
        Ok(BlockAlgebra {
            blocks: blocks
                .into_iter()
                .map(|(dim, weight)| BlockSpec { dim, weight })
                .collect(),
        })
    }

    pub fn single(dim: usize, weight: Rat) -> Self {
        BlockAlgebra::new(vec![(dim, weight)]).expect("valid single block")
    }

    /// `tau(1) = sum_j w_j d_j`.
    pub fn trace_identity(&self) -> Rat {
        self.blocks
            .iter()
            .map(|b| &b.weight * Rat::from_integer((b.dim as i64).into()))
            .sum()
    }
}

#[derive(Debug, Clone)]
pub enum BlockMatrix {
    /// Exact tier: a real diagonal.
    Diag(Vec<Rat>),
    /// Numeric tier: a dense complex matrix.
    Dense(DMatrix<C64>),
}

#[derive(Debug, Clone)]
pub struct BlockOperator {
    pub algebra: BlockAlgebra,
    pub matrices: Vec<BlockMatrix>,
}

#[derive(Debug, Clone)]
pub enum Operator {
    Commutative(StepFunction),
    Block(BlockOperator),
}

/// Trace values: exact rationals in the exact tier, complex doubles in the
/// numeric tier, signed infinities for divergent commutative integrals.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceValue {
    Exact(Rat),
    Approx(C64),
    PlusInf,
    MinusInf,
}

impl TraceValue {
    pub fn exact(&self) -> Option<&Rat> {
        match self {
            TraceValue::Exact(v) => Some(v),
            _ => None,
        }
    }

    pub fn approx(&self) -> f64 {
        match self {
            TraceValue::Exact(v) => rat_to_f64(v),
            TraceValue::Approx(z) => z.re,
            TraceValue::PlusInf => f64::INFINITY,
            TraceValue::MinusInf => f64::NEG_INFINITY,
        }
    }
}

impl Operator {
    pub fn commutative(f: StepFunction) -> Operator {
        Operator::Commutative(f)
    }

    /// Exact-tier block operator from real diagonals.
    pub fn diagonal(algebra: BlockAlgebra, entries: Vec<Vec<Rat>>) -> Result<Operator> {
        if entries.len() != algebra.blocks.len() {
            return Err(Error::Invalid("one diagonal per block required".into()));
        }
        for (spec, diag) in algebra.blocks.iter().zip(&entries) {
            if diag.len() != spec.dim {
                return Err(Error::Invalid(
                    "diagonal length must match block dim".into(),
                ));
            }
        }
        Ok(Operator::Block(BlockOperator {
            algebra,
            matrices: entries.into_iter().map(BlockMatrix::Diag).collect(),
        }))
    }

    /// Numeric-tier block operator from dense complex matrices.
    pub fn dense(algebra: BlockAlgebra, matrices: Vec<DMatrix<C64>>) -> Result<Operator> {
        if matrices.len() != algebra.blocks.len() {
            return Err(Error::Invalid("one matrix per block required".into()));
        }
        for (spec, m) in algebra.blocks.iter().zip(&matrices) {
            if m.nrows() != spec.dim || m.ncols() != spec.dim {
                return Err(Error::Invalid("matrix shape must match block dim".into()));
            }
        }
        Ok(Operator::Block(BlockOperator {
            algebra,
            matrices: matrices.into_iter().map(BlockMatrix::Dense).collect(),
        }))
    }

    pub fn zero_like(&self) -> Operator {
        match self {
            Operator::Commutative(_) => Operator::Commutative(StepFunction::zero()),
            Operator::Block(b) => Operator::Block(BlockOperator {
                algebra: b.algebra.clone(),
                matrices: b
                    .algebra
                    .blocks
                    .iter()
                    .map(|s| BlockMatrix::Diag(vec![Rat::zero(); s.dim]))
                    .collect(),
            }),
        }
    }

    pub fn is_exact_tier(&self) -> bool {
        match self {
            Operator::Commutative(_) => true,
            Operator::Block(b) => b.matrices.iter().all(|m| matches!(m, BlockMatrix::Diag(_))),
        }
    }

    pub fn algebra(&self) -> Option<&BlockAlgebra> {
        match self {
            Operator::Commutative(_) => None,
            Operator::Block(b) => Some(&b.algebra),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Operator::Commutative(f) => f.is_zero(),
            Operator::Block(b) => b.matrices.iter().all(|m| match m {
                BlockMatrix::Diag(d) => d.iter().all(|v| v.is_zero()),
                BlockMatrix::Dense(m) => m.iter().all(|z| z.norm() == 0.0),
            }),
        }
    }

    /// `tau(X)`: weighted matrix trace, or the integral for commutative data.
    pub fn trace(&self) -> TraceValue {
        match self {
            Operator::Commutative(f) => match f.integrate(&Rat::zero(), None) {
                Ext::Finite(v) => TraceValue::Exact(v),
                Ext::PlusInf => TraceValue::PlusInf,
                Ext::MinusInf => TraceValue::MinusInf,
            },
            Operator::Block(b) => {
                let mut exact = Rat::zero();
                let mut approx = C64::new(0.0, 0.0);
                let mut any_dense = false;
                for (spec, m) in b.algebra.blocks.iter().zip(&b.matrices) {
                    match m {
                        BlockMatrix::Diag(d) => {
                            let s: Rat = d.iter().cloned().sum();
                            exact += &spec.weight * s;
                        }
                        BlockMatrix::Dense(m) => {
                            any_dense = true;
                            let mut t = C64::new(0.0, 0.0);
                            for i in 0..m.nrows() {
                                t += m[(i, i)];
                            }
                            approx += t * rat_to_f64(&spec.weight);
                        }
                    }
                }
                if any_dense {
                    TraceValue::Approx(approx + C64::new(rat_to_f64(&exact), 0.0))
                } else {
                    TraceValue::Exact(exact)
                }
            }
        }
    }

    /// Weighted singular values `(sigma, weight)`, unsorted.
    pub fn weighted_singular_values(&self) -> Result<Vec<(Rat, Rat)>> {
        let Operator::Block(b) = self else {
            return Err(Error::Invalid(
                "weighted singular values exist for block operators".into(),
            ));
        };
        let mut out = Vec::new();
        for (spec, m) in b.algebra.blocks.iter().zip(&b.matrices) {
            match m {
                BlockMatrix::Diag(d) => {
                    for v in d {
                        out.push((v.abs(), spec.weight.clone()));
                    }
                }
                BlockMatrix::Dense(m) => {
                    for s in dense_singular_values(m)? {
                        out.push((s, spec.weight.clone()));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `mu(X)` as a step function: decreasing singular values with piece
    /// lengths equal to atom weights, or `f*` for commutative data.
    pub fn singular_value_function(&self) -> Result<StepFunction> {
        match self {
            Operator::Commutative(f) => f.decreasing_rearrangement(),
            Operator::Block(_) => {
                let mut sv = self.weighted_singular_values()?;
                sv.sort_by(|a, b| b.0.cmp(&a.0));
                let mut cuts = vec![Rat::zero()];
                let mut vals = Vec::new();
                let mut pos = Rat::zero();
                for (s, w) in sv {
                    if s.is_zero() {
                        break;
                    }
                    pos += w;
                    vals.push(s);
                    cuts.push(pos.clone());
                }
                StepFunction::new(None, cuts, vals, InfTail::Const(Rat::zero()))
            }
        }
    }

    /// `mu(t, X)` sampled exactly (total even where the materialized
    /// rearrangement is not representable).
    pub fn mu_at(&self, t: &Rat) -> Result<Rat> {
        match self {
            Operator::Commutative(f) => Ok(f.mu().sample(t)),
            Operator::Block(_) => Ok(self.singular_value_function()?.mu().sample(t)),
        }
    }

    /// Uniform norm `mu(0+, X)`.
    pub fn norm_inf(&self) -> Result<Ext> {
        match self {
            Operator::Commutative(f) => Ok(f.mu().sup()),
            Operator::Block(_) => Ok(self.singular_value_function()?.mu().sup()),
        }
    }

    /// `Phi X = { mu(2^n, X) }`.
    pub fn phi_op(&self) -> Result<DyadicSequence> {
        match self {
            Operator::Commutative(f) => Ok(f.mu().phi()),
            Operator::Block(_) => Ok(self.singular_value_function()?.mu().phi()),
        }
    }

    pub fn scale(&self, alpha: &Rat) -> Operator {
        match self {
            Operator::Commutative(f) => Operator::Commutative(f.scale(alpha)),
            Operator::Block(b) => Operator::Block(BlockOperator {
                algebra: b.algebra.clone(),
                matrices: b
                    .matrices
                    .iter()
                    .map(|m| match m {
                        BlockMatrix::Diag(d) => {
                            BlockMatrix::Diag(d.iter().map(|v| alpha * v).collect())
                        }
                        BlockMatrix::Dense(m) => {
                            BlockMatrix::Dense(m * C64::new(rat_to_f64(alpha), 0.0))
                        }
                    })
                    .collect(),
            }),
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        match (self, other) {
            (Operator::Commutative(f), Operator::Commutative(g)) => {
                Ok(Operator::Commutative(f.add(g)?))
            }
            (Operator::Block(a), Operator::Block(b)) => {
                if a.algebra != b.algebra {
                    return Err(Error::Invalid(
                        "operators live in different algebras".into(),
                    ));
                }
                let matrices = a
                    .matrices
                    .iter()
                    .zip(&b.matrices)
                    .map(|(x, y)| match (x, y) {
                        (BlockMatrix::Diag(dx), BlockMatrix::Diag(dy)) => {
                            BlockMatrix::Diag(dx.iter().zip(dy).map(|(u, v)| u + v).collect())
                        }
                        _ => BlockMatrix::Dense(to_dense(x) + to_dense(y)),
                    })
                    .collect();
                Ok(Operator::Block(BlockOperator {
                    algebra: a.algebra.clone(),
                    matrices,
                }))
            }
            _ => Err(Error::Invalid(
                "cannot add commutative and block operators".into(),
            )),
        }
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.add(&other.scale(&-Rat::one()))
    }

    /// `E^{|X|}(s, inf)`: spectral projection of `|X|` strictly above `s`.
    /// Exact-tier thresholds at singular values resolve symbolically; the
    /// numeric tier reports a tie within `EPS`.
    pub fn spectral_projection(&self, s: &Rat) -> Result<Projection> {
        if s.is_negative() {
            return Err(Error::Invalid("threshold must be >= 0".into()));
        }
        match self {
            Operator::Commutative(f) => {
                let ind = threshold_indicator(f, s);
                let tau = f.distribution(s);
                Ok(Projection {
                    tau,
                    parts: ProjParts::Commutative(ind),
                })
            }
            Operator::Block(b) => {
                let mut parts = Vec::new();
                let mut tau = Rat::zero();
                for (spec, m) in b.algebra.blocks.iter().zip(&b.matrices) {
                    match m {
                        BlockMatrix::Diag(d) => {
                            let sel: Vec<usize> =
                                (0..d.len()).filter(|&i| d[i].abs() > *s).collect();
                            tau += &spec.weight * Rat::from_integer((sel.len() as i64).into());
                            parts.push(BlockProj::Indices(sel));
                        }
                        BlockMatrix::Dense(m) => {
                            let (p, count) = dense_spectral_projection(m, s)?;
                            tau += &spec.weight * Rat::from_integer((count as i64).into());
                            parts.push(BlockProj::Matrix(p));
                        }
                    }
                }
                Ok(Projection {
                    tau: Ext::Finite(tau),
                    parts: ProjParts::Block(parts),
                })
            }
        }
    }

    /// Support projection `s(X)`: the smallest projection with `X s(X) = X`.
    pub fn support_projection(&self) -> Result<Projection> {
        self.spectral_projection(&Rat::zero())
    }

    /// `X P` for a projection of matching shape.
    pub fn apply_projection(&self, p: &Projection) -> Result<Operator> {
        match (self, &p.parts) {
            (Operator::Commutative(f), ProjParts::Commutative(ind)) => {
                Ok(Operator::Commutative(f.mul(ind)?))
            }
            (Operator::Block(b), ProjParts::Block(parts)) => {
                if parts.len() != b.matrices.len() {
                    return Err(Error::Invalid("projection shape mismatch".into()));
                }
                let matrices = b
                    .matrices
                    .iter()
                    .zip(parts)
                    .map(|(m, pb)| match (m, pb) {
                        (BlockMatrix::Diag(d), BlockProj::Indices(sel)) => {
                            let mut out = vec![Rat::zero(); d.len()];
                            for &i in sel {
                                out[i] = d[i].clone();
                            }
                            BlockMatrix::Diag(out)
                        }
                        (m, BlockProj::Matrix(pm)) => BlockMatrix::Dense(to_dense(m) * pm),
                        (BlockMatrix::Dense(m), BlockProj::Indices(sel)) => {
                            let mut pm = DMatrix::<C64>::zeros(m.ncols(), m.ncols());
                            for &i in sel {
                                pm[(i, i)] = C64::new(1.0, 0.0);
                            }
                            BlockMatrix::Dense(m * pm)
                        }
                    })
                    .collect();
                Ok(Operator::Block(BlockOperator {
                    algebra: b.algebra.clone(),
                    matrices,
                }))
            }
            _ => Err(Error::Invalid(
                "projection does not match operator kind".into(),
            )),
        }
    }

    /// `U X U^*` with one unitary per block (numeric tier).
    pub fn conjugate(&self, unitaries: &[DMatrix<C64>]) -> Result<Operator> {
        let Operator::Block(b) = self else {
            return Err(Error::Invalid(
                "conjugation applies to block operators".into(),
            ));
        };
        if unitaries.len() != b.matrices.len() {
            return Err(Error::Invalid("one unitary per block required".into()));
        }
        let matrices = b
            .matrices
            .iter()
            .zip(unitaries)
            .map(|(m, u)| BlockMatrix::Dense(u * to_dense(m) * u.adjoint()))
            .collect();
        Ok(Operator::Block(BlockOperator {
            algebra: b.algebra.clone(),
            matrices,
        }))
    }
}

#[derive(Debug, Clone)]
pub struct Projection {
    pub tau: Ext,
    pub parts: ProjParts,
}

#[derive(Debug, Clone)]
pub enum ProjParts {
    Block(Vec<BlockProj>),
    Commutative(StepFunction),
}

#[derive(Debug, Clone)]
pub enum BlockProj {
    Indices(Vec<usize>),
    Matrix(DMatrix<C64>),
}

impl Projection {
    /// `X (1 - P)`.
    pub fn complement_apply(&self, x: &Operator) -> Result<Operator> {
        let xp = x.apply_projection(self)?;
        x.sub(&xp)
    }
}

fn to_dense(m: &BlockMatrix) -> DMatrix<C64> {
    match m {
        BlockMatrix::Diag(d) => {
            let n = d.len();
            let mut out = DMatrix::<C64>::zeros(n, n);
            for i in 0..n {
                out[(i, i)] = C64::new(rat_to_f64(&d[i]), 0.0);
            }
            out
        }
        BlockMatrix::Dense(m) => m.clone(),
    }
}

fn dense_singular_values(m: &DMatrix<C64>) -> Result<Vec<Rat>> {
    let svd = m.clone().svd(false, false);
    let mut out = Vec::with_capacity(svd.singular_values.len());
    for s in svd.singular_values.iter() {
        if !s.is_finite() {
            return Err(Error::NumericFailure("singular value not finite".into()));
        }
        out.push(rat_from_f64(s.max(0.0)).expect("finite double embeds exactly"));
    }
    Ok(out)
}

fn dense_spectral_projection(m: &DMatrix<C64>, s: &Rat) -> Result<(DMatrix<C64>, usize)> {
    let svd = m.clone().svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::NumericFailure("svd did not produce singular vectors".into()))?;
    let s_f = rat_to_f64(s);
    let mut rows = Vec::new();
    for (i, sigma) in svd.singular_values.iter().enumerate() {
        if !sigma.is_finite() {
            return Err(Error::NumericFailure("singular value not finite".into()));
        }
        if s_f > 0.0 {
            if (sigma - s_f).abs() <= EPS {
                return Err(Error::TieAtThreshold(format!(
                    "singular value {sigma} within {EPS} of threshold {s_f}"
                )));
            }
            if *sigma > s_f {
                rows.push(i);
            }
        } else if *sigma > EPS {
            // rank decision at tolerance EPS
            rows.push(i);
        }
    }
    let n = m.ncols();
    let mut p = DMatrix::<C64>::zeros(n, n);
    for &i in &rows {
        let v = v_t.row(i).adjoint(); // i-th right singular vector as a column
        p += &v * v.adjoint();
    }
    Ok((p, rows.len()))
}

/// Characteristic function of `{ |f| > s }` as a step function.
fn threshold_indicator(f: &StepFunction, s: &Rat) -> StepFunction {
    let g = f.abs();
    let one = Rat::one();
    let mut cuts: Vec<Rat> = vec![Rat::zero()];
    let mut vals: Vec<Rat> = Vec::new();
    if let Some(zt) = g.zero_tail() {
        if zt.r > Rat::one() {
            // values grow toward zero: cells at depth >= m0 exceed s
            let mut m = 1i64;
            let mut v = &zt.c * &zt.r;
            while v <= *s {
                v *= &zt.r;
                m += 1;
            }
            vals.push(one.clone());
            cuts.push(pow2(zt.lo - m + 1));
            if m > 1 {
                vals.push(Rat::zero());
                cuts.push(pow2(zt.lo));
            }
        } else if s.is_zero() {
            vals.push(one.clone());
            cuts.push(pow2(zt.lo));
        } else {
            // r < 1 post-normalization: cells at depth 1..=m1 exceed s
            let mut m1 = 0i64;
            let mut v = &zt.c * &zt.r;
            while v > *s {
                m1 += 1;
                v *= &zt.r;
            }
            if m1 > 0 {
                vals.push(Rat::zero());
                cuts.push(pow2(zt.lo - m1));
                vals.push(one.clone());
            } else {
                vals.push(Rat::zero());
            }
            cuts.push(pow2(zt.lo));
        }
    }
    for i in 0..g.piece_values().len() {
        vals.push(if g.piece_values()[i] > *s {
            one.clone()
        } else {
            Rat::zero()
        });
        cuts.push(g.breakpoints()[i + 1].clone());
    }
    let inf = match g.inf_tail() {
        InfTail::Const(v) => InfTail::Const(if *v > *s { one.clone() } else { Rat::zero() }),
        InfTail::Geom { c, r, hi } => {
            if s.is_zero() {
                InfTail::Const(one.clone())
            } else {
                let mut m1 = 0i64;
                let mut v = c * r;
                while v > *s {
                    m1 += 1;
                    v *= r;
                }
                if m1 > 0 {
                    vals.push(one.clone());
                    cuts.push(pow2(hi + 1 + m1));
                }
                InfTail::Const(Rat::zero())
            }
        }
    };
    // drop zero-length intervals introduced by boundary cases
    let mut clean_cuts = vec![cuts[0].clone()];
    let mut clean_vals = Vec::new();
    for i in 0..vals.len() {
        if cuts[i + 1] > *clean_cuts.last().unwrap() {
            clean_vals.push(vals[i].clone());
            clean_cuts.push(cuts[i + 1].clone());
        }
    }
    StepFunction::new(None, clean_cuts, clean_vals, inf)
        .expect("indicator is a valid step function")
}

/// Targets for the diagonal embedding of a sequence as an operator.
pub enum EmbedTarget<'a> {
    Commutative,
    Block(&'a BlockAlgebra),
}

/// Embeds a sequence as an operator with `mu` equal to `(Dx)*`: the
/// commutative target is `Dx` itself; a block target tiles each dyadic cell
/// `2^n` with atoms, preserving the trace per cell.
pub fn diag_embed(x: &DyadicSequence, target: EmbedTarget<'_>) -> Result<Operator> {
    match target {
        EmbedTarget::Commutative => Ok(Operator::Commutative(transfer::pietsch_d(x))),
        EmbedTarget::Block(algebra) => {
            if !x.left_tail().is_zero() || !x.right_tail().is_zero() {
                return Err(Error::NotTileable(
                    "block embedding requires zero tails".into(),
                ));
            }
            let cells: Vec<(i64, Rat)> = (x.lo()..=x.hi())
                .map(|n| (n, x.value_at(n)))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            let weights: Vec<Rat> = algebra.blocks.iter().map(|b| b.weight.clone()).collect();
            let mut caps: Vec<usize> = algebra.blocks.iter().map(|b| b.dim).collect();
            let mut assignment: Vec<Vec<usize>> = Vec::new();
            for (n, _) in &cells {
                let need = pow2(*n);
                match tile_cell(&need, &weights, &caps) {
                    Some(counts) => {
                        for (j, c) in counts.iter().enumerate() {
                            caps[j] -= c;
                        }
                        assignment.push(counts);
                    }
                    None => {
                        return Err(Error::NotTileable(format!(
                            "cell 2^{n} cannot be tiled by the remaining atoms"
                        )))
                    }
                }
            }
            let mut diags: Vec<Vec<Rat>> = algebra
                .blocks
                .iter()
                .map(|b| vec![Rat::zero(); b.dim])
                .collect();
            let mut next_slot: Vec<usize> = vec![0; algebra.blocks.len()];
            for ((_, v), counts) in cells.iter().zip(&assignment) {
                for (j, &cnt) in counts.iter().enumerate() {
                    for _ in 0..cnt {
                        diags[j][next_slot[j]] = v.clone();
                        next_slot[j] += 1;
                    }
                }
            }
            Operator::diagonal(algebra.clone(), diags)
        }
    }
}

/// Nonnegative integer counts with `sum_j counts_j * w_j = need`, bounded by
/// capacities. Small-scale backtracking.
fn tile_cell(need: &Rat, weights: &[Rat], caps: &[usize]) -> Option<Vec<usize>> {
    fn go(need: &Rat, j: usize, weights: &[Rat], caps: &[usize], acc: &mut Vec<usize>) -> bool {
        if need.is_zero() {
            acc.extend(std::iter::repeat(0).take(weights.len() - j));
            return true;
        }
        if j == weights.len() || need.is_negative() {
            return false;
        }
        let floor = (need / &weights[j]).floor().to_integer();
        let max_fit: usize = if floor.sign() == num_bigint::Sign::Minus {
            0
        } else {
            usize::try_from(&floor).unwrap_or(usize::MAX).min(caps[j])
        };
        for m in (0..=max_fit).rev() {
            let rest = need - &weights[j] * Rat::from_integer((m as i64).into());
            let before = acc.len();
            acc.push(m);
            if go(&rest, j + 1, weights, caps, acc) {
                return true;
            }
            acc.truncate(before);
        }
        false
    }
    let mut acc = Vec::new();
    if go(need, 0, weights, caps, &mut acc) {
        Some(acc)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(BigInt::from(p), BigInt::from(q))
    }
    fn ri(p: i64) -> Rat {
        r(p, 1)
    }

    fn diag_op(entries: &[i64], w: (i64, i64)) -> Operator {
        let alg = BlockAlgebra::single(entries.len(), r(w.0, w.1));
        Operator::diagonal(alg, vec![entries.iter().map(|&p| ri(p)).collect()]).unwrap()
    }

    #[test]
    fn mu_of_weighted_diagonal() {
        // single block d=2, w=2, diag(3,1): mu = 3 chi_[0,2) + 1 chi_[2,4)
        let x = diag_op(&[3, 1], (2, 1));
        let mu = x.singular_value_function().unwrap();
        let want =
            StepFunction::from_pieces(vec![ri(0), ri(2), ri(4)], vec![ri(3), ri(1)]).unwrap();
        assert_eq!(mu, want);
    }

    #[test]
    fn mu_of_rank_one_nilpotent() {
        // [[0,2],[0,0]] has singular values {2, 0}
        let alg = BlockAlgebra::single(2, ri(1));
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 1)] = C64::new(2.0, 0.0);
        let x = Operator::dense(alg, vec![m]).unwrap();
        let mu = x.singular_value_function().unwrap();
        assert_eq!(mu.value_at(&r(1, 2)), ri(2));
        assert_eq!(mu.value_at(&r(3, 2)), ri(0));
    }

    #[test]
    fn trace_examples() {
        let x = diag_op(&[3, 1], (2, 1));
        assert_eq!(x.trace(), TraceValue::Exact(ri(8)));
        let f =
            Operator::commutative(StepFunction::scaled_indicator(ri(0), ri(4), ri(1)).unwrap());
        assert_eq!(f.trace(), TraceValue::Exact(ri(4)));
        let y = diag_op(&[-1, 5], (2, 1));
        let sum = x.add(&y).unwrap();
        assert_eq!(sum.trace(), TraceValue::Exact(ri(16)));
    }

    #[test]
    fn spectral_projection_examples() {
        let x = diag_op(&[3, 1], (1, 1));
        let p = x.spectral_projection(&ri(2)).unwrap();
        assert_eq!(p.tau, Ext::Finite(ri(1)));
        let p0 = x.spectral_projection(&ri(3)).unwrap();
        assert_eq!(p0.tau, Ext::Finite(ri(0)));
        // tau(E(s,inf)) = d_mu(s)
        let mu = x.singular_value_function().unwrap();
        for s in [r(1, 2), r(3, 2), r(5, 2), ri(4)] {
            assert_eq!(
                x.spectral_projection(&s).unwrap().tau,
                mu.distribution(&s),
                "at {s}"
            );
        }
    }

    #[test]
    fn support_projection_examples() {
        let x = diag_op(&[3, 0], (1, 1));
        let s = x.support_projection().unwrap();
        assert_eq!(s.tau, Ext::Finite(ri(1)));
        let z = x.zero_like();
        assert_eq!(z.support_projection().unwrap().tau, Ext::Finite(ri(0)));
        // X s(X) = X
        let xp = x.apply_projection(&s).unwrap();
        assert_eq!(
            xp.singular_value_function().unwrap(),
            x.singular_value_function().unwrap()
        );
        assert_eq!(xp.trace(), x.trace());
        // support traces are subadditive
        let y = diag_op(&[0, 2], (1, 1));
        let sum = x.add(&y).unwrap();
        let t_sum = sum.support_projection().unwrap().tau;
        let tx = x.support_projection().unwrap().tau;
        let ty = y.support_projection().unwrap().tau;
        assert_eq!(t_sum, tx.add(&ty));
    }

    #[test]
    fn commutative_projections() {
        let f = StepFunction::new(
            Some(ZeroTail {
                c: ri(1),
                r: ri(2),
                lo: 0,
            }),
            vec![ri(1), ri(3)],
            vec![ri(2)],
            InfTail::Const(Rat::zero()),
        )
        .unwrap();
        let x = Operator::commutative(f.clone());
        let p = x.spectral_projection(&ri(3)).unwrap();
        // {|f| > 3}: tail cells with 2^{-n} > 3, i.e. n <= -2: measure 1/4
        assert_eq!(p.tau, f.distribution(&ri(3)));
        let xp = x.apply_projection(&p).unwrap();
        let Operator::Commutative(g) = &xp else { panic!() };
        assert_eq!(g.value_at(&r(1, 8)), ri(8));
        assert_eq!(g.value_at(&ri(2)), ri(0));
        let rest = p.complement_apply(&x).unwrap();
        let Operator::Commutative(h) = &rest else { panic!() };
        assert_eq!(h.value_at(&r(1, 8)), ri(0));
        assert_eq!(h.value_at(&ri(2)), ri(2));
    }

    #[test]
    fn phi_op_example() {
        // diag(8,4,2,1), w=1: window samples (4,2,0) from n=0, constant 8 left
        let x = diag_op(&[8, 4, 2, 1], (1, 1));
        let phi = x.phi_op().unwrap();
        assert_eq!(phi.value_at(-1), ri(8));
        assert_eq!(phi.value_at(-7), ri(8));
        assert_eq!(phi.value_at(0), ri(4));
        assert_eq!(phi.value_at(1), ri(2));
        assert_eq!(phi.value_at(2), ri(0));
        let z = x.zero_like();
        assert!(z.phi_op().unwrap().is_zero());
    }

    #[test]
    fn unitary_invariance_numeric() {
        let x = diag_op(&[3, 1], (1, 1));
        let (c, s) = (3f64.sqrt() / 2.0, 0.5);
        let u = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(c, 0.0),
                C64::new(-s, 0.0),
                C64::new(s, 0.0),
                C64::new(c, 0.0),
            ],
        );
        let y = x.conjugate(&[u]).unwrap();
        let mu_x = x.singular_value_function().unwrap();
        let mu_y = y.singular_value_function().unwrap();
        for t in [r(1, 2), r(3, 2)] {
            let a = rat_to_f64(&mu_x.value_at(&t));
            let b = rat_to_f64(&mu_y.value_at(&t));
            assert!((a - b).abs() < 1e-9, "mu at {t}: {a} vs {b}");
        }
        assert!((x.trace().approx() - y.trace().approx()).abs() < 1e-9);
    }

    #[test]
    fn diag_embed_examples() {
        // e0 into a block with two atoms of trace 1/2 fills the unit cell
        let alg = BlockAlgebra::single(2, r(1, 2));
        let x = DyadicSequence::unit(0);
        let emb = diag_embed(&x, EmbedTarget::Block(&alg)).unwrap();
        let mu = emb.singular_value_function().unwrap();
        assert_eq!(
            mu,
            StepFunction::scaled_indicator(ri(0), ri(1), ri(1)).unwrap()
        );
        // commutative target is Dx itself
        let c = diag_embed(&x, EmbedTarget::Commutative).unwrap();
        let Operator::Commutative(f) = &c else { panic!() };
        assert_eq!(*f, transfer::pietsch_d(&x));
        // mu of the embedding is (Dx)* for a tileable two-cell sequence
        let alg2 = BlockAlgebra::new(vec![(3, r(1, 2)), (2, ri(1))]).unwrap();
        let y = DyadicSequence::from_window(0, vec![ri(3), ri(-5)]).unwrap();
        let emb2 = diag_embed(&y, EmbedTarget::Block(&alg2)).unwrap();
        let want = transfer::pietsch_d(&y).decreasing_rearrangement().unwrap();
        assert_eq!(emb2.singular_value_function().unwrap(), want);
        // tiling failure: cell 2^-3 with atom weights 1/2 and 1
        let z = DyadicSequence::unit(-3);
        assert!(matches!(
            diag_embed(&z, EmbedTarget::Block(&alg2)),
            Err(Error::NotTileable(_))
        ));
    }

    #[test]
    fn tie_at_threshold_dense_only() {
        // exact tier resolves thresholds at singular values symbolically
        let x = diag_op(&[4, 2, 1], (1, 1));
        let p = x.spectral_projection(&ri(2)).unwrap();
        assert_eq!(p.tau, Ext::Finite(ri(1)));
        // numeric tier refuses a tie
        let alg = BlockAlgebra::single(2, ri(1));
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 0)] = C64::new(2.0, 0.0);
        m[(1, 1)] = C64::new(1.0, 0.0);
        let d = Operator::dense(alg, vec![m]).unwrap();
        assert!(matches!(
            d.spectral_projection(&ri(2)),
            Err(Error::TieAtThreshold(_))
        ));
        assert!(d.spectral_projection(&r(3, 2)).is_ok());
    }
}
