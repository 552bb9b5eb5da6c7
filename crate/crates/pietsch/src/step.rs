//! Exact piecewise-constant functions on `(0, inf)`.
//!
//! A `StepFunction` has finitely many rational breakpoints, an optional
//! geometric *dyadic* tail at zero (value `c * r^(lo - n)` on the cell
//! `[2^n, 2^{n+1})` for `n < lo`), and a tail at infinity that is either a
//! constant or a geometric dyadic staircase (value `c * r^(n - hi)` on the
//! cell `[2^n, 2^{n+1})` for `n > hi`, `r < 1`). The infinity staircase is
//! exactly the shape produced by the operator `D` on sequences with a
//! geometric right tail; it is stored symbolically so that rearrangement
//! samples, integrals and norms of such images stay in closed form.
//!
//! Everything is right-continuous and all arithmetic is exact.

use crate::error::{Error, Result};
use crate::rat::{as_pow2, floor_log2, pow2, rat_pow, Rat};
use num_traits::{One, Signed, Zero};

mod mu;
pub use mu::MuView;

/// Geometric dyadic cell law near zero: on `[2^n, 2^{n+1})`, `n < lo`, the
/// value is `c * r^(lo - n)` (the lead `c` is the extrapolation at cell `lo`).
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTail {
    pub c: Rat,
    pub r: Rat,
    pub lo: i64,
}

/// Behavior on and beyond the last breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub enum InfTail {
    /// Constant value on `[t_N, inf)`.
    Const(Rat),
    /// On `[2^n, 2^{n+1})`, `n > hi`, the value is `c * r^(n - hi)` with
    /// `0 < r < 1`; requires `t_N = 2^{hi+1}`.
    Geom { c: Rat, r: Rat, hi: i64 },
}

#[derive(Debug, Clone)]
pub struct StepFunction {
    zero_tail: Option<ZeroTail>,
    /// `t_0 < t_1 < ... < t_N`; `t_0 = 2^lo` with a zero tail, else `t_0 = 0`.
    breakpoints: Vec<Rat>,
    /// `values[i]` on `[t_i, t_{i+1})`.
    values: Vec<Rat>,
    inf_tail: InfTail,
}

impl StepFunction {
    pub fn new(
        zero_tail: Option<ZeroTail>,
        breakpoints: Vec<Rat>,
        values: Vec<Rat>,
        inf_tail: InfTail,
    ) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::Invalid(
                "need exactly one more breakpoint than values".into(),
            ));
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Invalid("breakpoints must strictly increase".into()));
            }
        }
        match &zero_tail {
            Some(zt) => {
                if zt.c.is_zero() || !zt.r.is_positive() {
                    return Err(Error::Invalid("zero tail needs c != 0, r > 0".into()));
                }
                if breakpoints[0] != pow2(zt.lo) {
                    return Err(Error::Invalid(
                        "with a zero tail the first breakpoint must be 2^lo".into(),
                    ));
                }
            }
            None => {
                if !breakpoints[0].is_zero() {
                    return Err(Error::Invalid(
                        "without a zero tail the first breakpoint must be 0".into(),
                    ));
                }
            }
        }
        if let InfTail::Geom { c, r, hi } = &inf_tail {
            if c.is_zero() || !r.is_positive() || *r >= Rat::one() {
                return Err(Error::Invalid(
                    "infinity staircase needs c != 0 and 0 < r < 1".into(),
                ));
            }
            if *breakpoints.last().unwrap() != pow2(hi + 1) {
                return Err(Error::Invalid(
                    "with an infinity staircase the last breakpoint must be 2^(hi+1)".into(),
                ));
            }
        }
        let mut f = StepFunction {
            zero_tail,
            breakpoints,
            values,
            inf_tail,
        };
        f.normalize();
        Ok(f)
    }

    pub fn zero() -> Self {
        StepFunction {
            zero_tail: None,
            breakpoints: vec![Rat::zero()],
            values: vec![],
            inf_tail: InfTail::Const(Rat::zero()),
        }
    }

    /// Constant `v` on all of `(0, inf)`.
    pub fn constant(v: Rat) -> Self {
        StepFunction {
            zero_tail: None,
            breakpoints: vec![Rat::zero()],
            values: vec![],
            inf_tail: InfTail::Const(v),
        }
    }

    /// `v * chi_[a, b)` for `0 <= a < b`.
    pub fn scaled_indicator(a: Rat, b: Rat, v: Rat) -> Result<Self> {
        if a.is_negative() || a >= b {
            return Err(Error::Invalid("need 0 <= a < b".into()));
        }
        if a.is_zero() {
            Self::new(None, vec![a, b], vec![v], InfTail::Const(Rat::zero()))
        } else {
            Self::new(
                None,
                vec![Rat::zero(), a, b],
                vec![Rat::zero(), v],
                InfTail::Const(Rat::zero()),
            )
        }
    }

    /// Step function vanishing at infinity: `values[i]` on `[cuts[i], cuts[i+1])`.
    /// A leading zero piece is inserted when `cuts` does not start at 0.
    pub fn from_pieces(cuts: Vec<Rat>, values: Vec<Rat>) -> Result<Self> {
        if cuts.first() == Some(&Rat::zero()) {
            Self::new(None, cuts, values, InfTail::Const(Rat::zero()))
        } else {
            let mut full_cuts = vec![Rat::zero()];
            let mut full_vals = vec![Rat::zero()];
            full_cuts.extend(cuts);
            full_vals.extend(values);
            Self::new(None, full_cuts, full_vals, InfTail::Const(Rat::zero()))
        }
    }

    fn normalize(&mut self) {
        // constant zero tails become an explicit piece on [0, 2^lo)
        if let Some(zt) = &self.zero_tail {
            if zt.r.is_one() {
                let c = zt.c.clone();
                self.breakpoints.insert(0, Rat::zero());
                self.values.insert(0, c);
                self.zero_tail = None;
            }
        }
        // merge adjacent equal values
        let mut i = 0;
        while i + 1 < self.values.len() {
            if self.values[i] == self.values[i + 1] {
                self.values.remove(i + 1);
                self.breakpoints.remove(i + 1);
            } else {
                i += 1;
            }
        }
        // fold trailing pieces into a constant infinity tail
        if let InfTail::Const(v) = &self.inf_tail {
            let v = v.clone();
            while self.values.last() == Some(&v) && self.breakpoints.len() > 1 {
                self.values.pop();
                self.breakpoints.pop();
            }
        }
        // absorb aligned first pieces that continue the zero-tail law
        loop {
            let Some(zt) = &self.zero_tail else { break };
            if self.values.is_empty() || self.values[0] != zt.c {
                break;
            }
            let next_cell = pow2(zt.lo + 1);
            if self.breakpoints[1] < next_cell {
                break;
            }
            let new_tail = ZeroTail {
                c: &zt.c / &zt.r,
                r: zt.r.clone(),
                lo: zt.lo + 1,
            };
            if self.breakpoints[1] == next_cell {
                self.breakpoints.remove(0);
                self.values.remove(0);
            } else {
                self.breakpoints[0] = next_cell;
            }
            self.zero_tail = Some(new_tail);
        }
        // absorb aligned last cells that continue the infinity staircase
        loop {
            let InfTail::Geom { c, r, hi } = &self.inf_tail else {
                break;
            };
            if self.values.is_empty() {
                break;
            }
            let cell_lo = pow2(*hi);
            if *self.values.last().unwrap() != *c
                || self.breakpoints[self.breakpoints.len() - 2] > cell_lo
            {
                break;
            }
            let new_tail = InfTail::Geom {
                c: c / r,
                r: r.clone(),
                hi: hi - 1,
            };
            if self.breakpoints[self.breakpoints.len() - 2] == cell_lo {
                self.breakpoints.pop();
                self.values.pop();
            } else {
                let n = self.breakpoints.len();
                self.breakpoints[n - 1] = cell_lo;
            }
            self.inf_tail = new_tail;
        }
    }

    pub fn zero_tail(&self) -> Option<&ZeroTail> {
        self.zero_tail.as_ref()
    }
    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }
    pub fn piece_values(&self) -> &[Rat] {
        &self.values
    }
    pub fn inf_tail(&self) -> &InfTail {
        &self.inf_tail
    }

    /// Flagged non-compact: the function does not vanish at infinity.
    pub fn is_noncompact(&self) -> bool {
        match &self.inf_tail {
            InfTail::Const(v) => !v.is_zero(),
            InfTail::Geom { .. } => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero_tail.is_none()
            && self.values.iter().all(|v| v.is_zero())
            && matches!(&self.inf_tail, InfTail::Const(v) if v.is_zero())
    }

    /// Value at `t > 0` (right-continuous).
    pub fn value_at(&self, t: &Rat) -> Rat {
        assert!(t.is_positive(), "step functions live on (0, inf)");
        if *t < self.breakpoints[0] {
            let zt = self
                .zero_tail
                .as_ref()
                .expect("t below t0 only with a zero tail");
            let n = floor_log2(t);
            return &zt.c * rat_pow(&zt.r, zt.lo - n);
        }
        if *t >= *self.breakpoints.last().unwrap() {
            return match &self.inf_tail {
                InfTail::Const(v) => v.clone(),
                InfTail::Geom { c, r, hi } => {
                    let n = floor_log2(t);
                    c * rat_pow(r, n - hi)
                }
            };
        }
        let mut lo = 0usize;
        let mut hi = self.breakpoints.len() - 1;
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            if self.breakpoints[mid] <= *t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.values[lo].clone()
    }

    pub fn abs(&self) -> StepFunction {
        let mut f = self.clone();
        f.values = f.values.iter().map(|v| v.abs()).collect();
        if let Some(zt) = &mut f.zero_tail {
            zt.c = zt.c.abs();
        }
        f.inf_tail = match &f.inf_tail {
            InfTail::Const(v) => InfTail::Const(v.abs()),
            InfTail::Geom { c, r, hi } => InfTail::Geom {
                c: c.abs(),
                r: r.clone(),
                hi: *hi,
            },
        };
        f.normalize();
        f
    }

    pub fn scale(&self, alpha: &Rat) -> StepFunction {
        if alpha.is_zero() {
            return StepFunction::zero();
        }
        let mut f = self.clone();
        f.values = f.values.iter().map(|v| alpha * v).collect();
        if let Some(zt) = &mut f.zero_tail {
            zt.c = alpha * &zt.c;
        }
        f.inf_tail = match &f.inf_tail {
            InfTail::Const(v) => InfTail::Const(alpha * v),
            InfTail::Geom { c, r, hi } => InfTail::Geom {
                c: alpha * c,
                r: r.clone(),
                hi: *hi,
            },
        };
        f.normalize();
        f
    }

    /// First `t` below which the function follows a single law (the zero-tail
    /// law or a constant piece). `None` means globally constant.
    fn pure_below(&self) -> Option<Rat> {
        if self.zero_tail.is_some() {
            return Some(self.breakpoints[0].clone());
        }
        if self.values.is_empty() {
            return None;
        }
        Some(self.breakpoints[1].clone())
    }

    /// Near-zero law `(lead, r, anchor)`: on cell `n <= anchor` within the
    /// pure region the value is `lead * r^(anchor - n)`.
    fn near_zero_law(&self) -> (Rat, Rat, i64) {
        match &self.zero_tail {
            Some(zt) => (&zt.c * &zt.r, zt.r.clone(), zt.lo - 1),
            None => {
                let v = if self.values.is_empty() {
                    match &self.inf_tail {
                        InfTail::Const(v) => v.clone(),
                        InfTail::Geom { .. } => unreachable!("staircase tail requires pieces"),
                    }
                } else {
                    self.values[0].clone()
                };
                (v, Rat::one(), 0)
            }
        }
    }

    /// Far law `(lead, r)` at `anchor`: on cell `n >= anchor` beyond the last
    /// breakpoint the value is `lead * r^(n - anchor)`.
    fn far_law(&self, anchor: i64) -> (Rat, Rat) {
        match &self.inf_tail {
            InfTail::Const(v) => (v.clone(), Rat::one()),
            InfTail::Geom { c, r, hi } => {
                debug_assert!(anchor > *hi);
                (c * rat_pow(r, anchor - hi), r.clone())
            }
        }
    }

    /// All discontinuity points in `(a, b]`, including materialized tail cell
    /// edges. Requires `a > 0` when a zero tail is present.
    fn discontinuities_in(&self, a: &Rat, b: &Rat) -> Vec<Rat> {
        let mut out = Vec::new();
        for t in &self.breakpoints {
            if t > a && t <= b {
                out.push(t.clone());
            }
        }
        if let Some(zt) = &self.zero_tail {
            if self.breakpoints[0] > *a {
                assert!(a.is_positive(), "zero-tail cells accumulate at 0");
                let n_lo = floor_log2(a);
                let mut n = zt.lo - 1;
                while n > n_lo {
                    let edge = pow2(n);
                    if edge > *a && edge <= *b {
                        out.push(edge);
                    }
                    n -= 1;
                }
            }
        }
        if let InfTail::Geom { hi, .. } = &self.inf_tail {
            let last = self.breakpoints.last().unwrap();
            if b > last {
                let n_hi = floor_log2(b);
                for n in (hi + 2)..=(n_hi + 1) {
                    let edge = pow2(n);
                    if edge > *a && edge <= *b {
                        out.push(edge);
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Pointwise sum. Tails combine only when a single closed-form law
    /// remains on each side; otherwise `IncompatibleTails`.
    pub fn add(&self, other: &StepFunction) -> Result<StepFunction> {
        self.combine_with(other, PointwiseOp::Add)
    }

    /// Pointwise product. Products of geometric laws are always closed.
    pub fn mul(&self, other: &StepFunction) -> Result<StepFunction> {
        self.combine_with(other, PointwiseOp::Mul)
    }

    fn combine_with(&self, other: &StepFunction, op: PointwiseOp) -> Result<StepFunction> {
        // both globally constant
        if self.pure_below().is_none() && other.pure_below().is_none() {
            let (a, _, _) = self.near_zero_law();
            let (b, _, _) = other.near_zero_law();
            return Ok(StepFunction::constant(op.apply(&a, &b)));
        }
        let any_zero_tail = self.zero_tail.is_some() || other.zero_tail.is_some();
        // boundary below which both follow a single law
        let m = [self.pure_below(), other.pure_below()]
            .into_iter()
            .flatten()
            .min()
            .expect("at least one pure bound");
        let k = floor_log2(&m);
        let (c1, r1, a1) = self.near_zero_law();
        let (c2, r2, a2) = other.near_zero_law();
        let lead1 = if c1.is_zero() {
            Rat::zero()
        } else {
            &c1 * rat_pow(&r1, a1 - (k - 1))
        };
        let lead2 = if c2.is_zero() {
            Rat::zero()
        } else {
            &c2 * rat_pow(&r2, a2 - (k - 1))
        };
        // combined law on cells n <= k-1, lead anchored at k-1
        let zero_law = combine_laws(lead1, r1, lead2, r2, op, "zero-side")?;
        let (zero_tail, start_t, prefix) = match zero_law {
            Some((lead, r)) if !r.is_one() => (
                Some(ZeroTail {
                    c: &lead / &r,
                    r,
                    lo: k,
                }),
                pow2(k),
                None,
            ),
            Some((lead, _)) => {
                if any_zero_tail {
                    (None, pow2(k), Some(lead))
                } else {
                    (None, Rat::zero(), None)
                }
            }
            None => {
                if any_zero_tail {
                    (None, pow2(k), Some(Rat::zero()))
                } else {
                    (None, Rat::zero(), None)
                }
            }
        };

        // boundary above which both follow a single law
        let end_f = self.breakpoints.last().unwrap().clone();
        let end_g = other.breakpoints.last().unwrap().clone();
        let raw_end = end_f.max(end_g).max(start_t.clone());
        let needs_cells = matches!(self.inf_tail, InfTail::Geom { .. })
            || matches!(other.inf_tail, InfTail::Geom { .. });
        let (end_t, anchor) = if needs_cells {
            let mut h = floor_log2(&raw_end.clone().max(Rat::one()));
            if pow2(h) < raw_end {
                h += 1;
            }
            (pow2(h), h)
        } else {
            let h = if raw_end.is_positive() {
                floor_log2(&raw_end) + 1
            } else {
                0
            };
            (raw_end, h)
        };
        let (cf, rf) = self.far_law(anchor);
        let (cg, rg) = other.far_law(anchor);
        let inf_tail = match combine_laws(cf, rf, cg, rg, op, "infinity-side")? {
            Some((lead, r)) if !r.is_one() => InfTail::Geom {
                c: &lead / &r,
                r,
                hi: anchor - 1,
            },
            Some((lead, _)) => InfTail::Const(lead),
            None => InfTail::Const(Rat::zero()),
        };

        let (cuts, vals) = self.combine_body(other, &start_t, &end_t, op);
        let mut breakpoints = Vec::new();
        let mut values = Vec::new();
        if let Some(v) = prefix {
            breakpoints.push(Rat::zero());
            values.push(v);
        }
        breakpoints.push(start_t);
        values.extend(vals);
        breakpoints.extend(cuts);
        StepFunction::new(zero_tail, breakpoints, values, inf_tail)
    }

    /// Pointwise combination on `[start, end)`: interior cut points
    /// (excluding `start`, including `end`) and the value on each interval.
    fn combine_body(
        &self,
        other: &StepFunction,
        start: &Rat,
        end: &Rat,
        op: PointwiseOp,
    ) -> (Vec<Rat>, Vec<Rat>) {
        if end <= start {
            return (vec![], vec![]);
        }
        let mut cuts: Vec<Rat> = Vec::new();
        for f in [self, other] {
            if start.is_positive() {
                cuts.extend(f.discontinuities_in(start, end));
            } else {
                // no dyadic tails in this branch; plain breakpoints suffice
                for t in &f.breakpoints {
                    if t > start && t <= end {
                        cuts.push(t.clone());
                    }
                }
            }
        }
        cuts.retain(|t| *t < *end);
        cuts.push(end.clone());
        cuts.sort();
        cuts.dedup();
        let mut vals = Vec::with_capacity(cuts.len());
        let mut left = start.clone();
        for c in &cuts {
            let probe = if left.is_zero() {
                c / Rat::from_integer(2.into())
            } else {
                left.clone()
            };
            vals.push(op.apply(&self.value_at(&probe), &other.value_at(&probe)));
            left = c.clone();
        }
        (cuts, vals)
    }

    pub fn sub(&self, other: &StepFunction) -> Result<StepFunction> {
        self.add(&other.scale(&-Rat::one()))
    }

    /// Dilation `(sigma_s f)(t) = f(t/s)`. Dyadic tails require `s = 2^k`.
    pub fn dilate(&self, s: &Rat) -> Result<StepFunction> {
        if !s.is_positive() {
            return Err(Error::Invalid("dilation factor must be positive".into()));
        }
        let k = as_pow2(s);
        if (self.zero_tail.is_some() || matches!(self.inf_tail, InfTail::Geom { .. }))
            && k.is_none()
        {
            return Err(Error::NonDyadicDilation(s.to_string()));
        }
        let mut f = self.clone();
        f.breakpoints = f.breakpoints.iter().map(|t| t * s).collect();
        if let (Some(zt), Some(k)) = (&mut f.zero_tail, k) {
            zt.lo += k;
        }
        if let (InfTail::Geom { hi, .. }, Some(k)) = (&mut f.inf_tail, k) {
            *hi += k;
        }
        Ok(f)
    }

    /// Lebesgue measure of `{ |f| > s }`, `s >= 0`.
    pub fn distribution(&self, s: &Rat) -> Ext {
        assert!(!s.is_negative());
        let mut total = Rat::zero();
        for i in 0..self.values.len() {
            if self.values[i].abs() > *s {
                total += &self.breakpoints[i + 1] - &self.breakpoints[i];
            }
        }
        if let Some(zt) = &self.zero_tail {
            let c = zt.c.abs();
            if zt.r > Rat::one() {
                // values grow toward zero; they exceed s from depth m0 on
                let mut m = 1i64;
                let mut v = &c * &zt.r;
                while v <= *s {
                    v *= &zt.r;
                    m += 1;
                }
                total += pow2(zt.lo - m + 1);
            } else if s.is_zero() {
                total += pow2(zt.lo);
            } else {
                // r < 1 here (r = 1 is normalized away): values decay toward 0
                let mut m1 = 0i64;
                let mut v = &c * &zt.r;
                while v > *s {
                    m1 += 1;
                    v *= &zt.r;
                }
                if m1 > 0 {
                    total += pow2(zt.lo) - pow2(zt.lo - m1);
                }
            }
        }
        match &self.inf_tail {
            InfTail::Const(v) => {
                if v.abs() > *s {
                    return Ext::PlusInf;
                }
            }
            InfTail::Geom { c, r, hi } => {
                if s.is_zero() {
                    return Ext::PlusInf;
                }
                let c = c.abs();
                let mut m1 = 0i64;
                let mut v = &c * r;
                while v > *s {
                    m1 += 1;
                    v *= r;
                }
                if m1 > 0 {
                    total += pow2(hi + m1 + 1) - pow2(hi + 1);
                }
            }
        }
        Ext::Finite(total)
    }

    /// `int_a^b f` with `0 <= a <= b`; `b = None` means `inf`.
    pub fn integrate(&self, a: &Rat, b: Option<&Rat>) -> Ext {
        assert!(!a.is_negative());
        if let Some(b) = b {
            assert!(a <= b, "integration bounds out of order");
            if a == b {
                return Ext::Finite(Rat::zero());
            }
        }
        let mut acc = Ext::Finite(Rat::zero());
        if let Some(zt) = &self.zero_tail {
            let t0 = &self.breakpoints[0];
            let hi_t = match b {
                Some(b) => b.min(t0).clone(),
                None => t0.clone(),
            };
            if *a < hi_t {
                acc = acc.add(&self.zero_tail_integral(zt, a, &hi_t));
            }
        }
        for i in 0..self.values.len() {
            let (lo_t, hi_t) = (&self.breakpoints[i], &self.breakpoints[i + 1]);
            let lo = a.max(lo_t).clone();
            let hi = match b {
                Some(b) => b.min(hi_t).clone(),
                None => hi_t.clone(),
            };
            if lo < hi {
                acc = acc.add(&Ext::Finite(&self.values[i] * (hi - lo)));
            }
        }
        let t_n = self.breakpoints.last().unwrap();
        let lo = a.max(t_n).clone();
        let beyond = match b {
            Some(b) if *b <= lo => Ext::Finite(Rat::zero()),
            _ => self.inf_integral(&lo, b),
        };
        acc.add(&beyond)
    }

    fn zero_tail_integral(&self, zt: &ZeroTail, a: &Rat, b: &Rat) -> Ext {
        debug_assert!(*b <= pow2(zt.lo) && a < b);
        let half = Rat::new(1.into(), 2.into());
        let ratio = &zt.r * &half; // ratio of consecutive cell integrals toward 0
        if a.is_zero() {
            if ratio >= Rat::one() {
                return if zt.c.is_positive() {
                    Ext::PlusInf
                } else {
                    Ext::MinusInf
                };
            }
            let n_b = floor_log2(b);
            // full cells n < n_b: sum over m >= lo - n_b + 1 of c r^m 2^(lo-m)
            let m0 = zt.lo - n_b + 1;
            let full = &zt.c * pow2(zt.lo) * rat_pow(&ratio, m0) / (Rat::one() - &ratio);
            let partial = if *b > pow2(n_b) {
                (b - pow2(n_b)) * &zt.c * rat_pow(&zt.r, zt.lo - n_b)
            } else {
                Rat::zero()
            };
            Ext::Finite(full + partial)
        } else {
            let mut acc = Rat::zero();
            let mut n = floor_log2(a);
            while pow2(n) < *b {
                let lo_t = a.max(&pow2(n)).clone();
                let hi_t = b.min(&pow2(n + 1)).clone();
                if lo_t < hi_t {
                    acc += &zt.c * rat_pow(&zt.r, zt.lo - n) * (hi_t - lo_t);
                }
                n += 1;
            }
            Ext::Finite(acc)
        }
    }

    fn inf_integral(&self, a: &Rat, b: Option<&Rat>) -> Ext {
        match &self.inf_tail {
            InfTail::Const(v) => match b {
                Some(b) => Ext::Finite(v * (b - a)),
                None => {
                    if v.is_zero() {
                        Ext::Finite(Rat::zero())
                    } else if v.is_positive() {
                        Ext::PlusInf
                    } else {
                        Ext::MinusInf
                    }
                }
            },
            InfTail::Geom { c, r, hi } => {
                let two_r = r * Rat::from_integer(2.into());
                match b {
                    Some(b) => {
                        let mut acc = Rat::zero();
                        let mut n = floor_log2(a).max(hi + 1);
                        while pow2(n) < *b {
                            let lo_t = a.max(&pow2(n)).clone();
                            let hi_t = b.min(&pow2(n + 1)).clone();
                            if lo_t < hi_t {
                                acc += c * rat_pow(r, n - hi) * (hi_t - lo_t);
                            }
                            n += 1;
                        }
                        Ext::Finite(acc)
                    }
                    None => {
                        if two_r >= Rat::one() {
                            return if c.is_positive() {
                                Ext::PlusInf
                            } else {
                                Ext::MinusInf
                            };
                        }
                        let n0 = floor_log2(a).max(hi + 1);
                        // partial (or full) first cell
                        let mut acc = (pow2(n0 + 1) - a.max(&pow2(n0))) * c * rat_pow(r, n0 - hi);
                        // full cells n > n0 form a geometric series with ratio 2r
                        let first = c * rat_pow(r, n0 + 1 - hi) * pow2(n0 + 1);
                        acc += &first / (Rat::one() - &two_r);
                        Ext::Finite(acc)
                    }
                }
            }
        }
    }

    /// Exact pointwise `f(t) <= g(t)` for all `t > 0`.
    pub fn pointwise_le(&self, other: &StepFunction) -> bool {
        if self.pure_below().is_none() && other.pure_below().is_none() {
            let (a, _, _) = self.near_zero_law();
            let (b, _, _) = other.near_zero_law();
            return a <= b;
        }
        let m = [self.pure_below(), other.pure_below()]
            .into_iter()
            .flatten()
            .min()
            .expect("at least one pure bound");
        let k = floor_log2(&m);
        let (c1, r1, a1) = self.near_zero_law();
        let (c2, r2, a2) = other.near_zero_law();
        let lead1 = if c1.is_zero() {
            Rat::zero()
        } else {
            &c1 * rat_pow(&r1, a1 - (k - 1))
        };
        let lead2 = if c2.is_zero() {
            Rat::zero()
        } else {
            &c2 * rat_pow(&r2, a2 - (k - 1))
        };
        if !cell_law_le(&lead1, &r1, &lead2, &r2) {
            return false;
        }
        let start = pow2(k);
        let end_f = self.breakpoints.last().unwrap().clone();
        let end_g = other.breakpoints.last().unwrap().clone();
        let raw_end = end_f.max(end_g).max(start.clone());
        let mut h = floor_log2(&raw_end.clone().max(Rat::one()));
        if pow2(h) < raw_end {
            h += 1;
        }
        let end = pow2(h);
        let (cf, rf) = self.far_law(h);
        let (cg, rg) = other.far_law(h);
        if !cell_law_le(&cf, &rf, &cg, &rg) {
            return false;
        }
        let mut probes: Vec<Rat> = vec![start.clone()];
        for f in [self, other] {
            for t in f.discontinuities_in(&start, &end) {
                if t < end {
                    probes.push(t);
                }
            }
        }
        probes.sort();
        probes.dedup();
        probes
            .iter()
            .all(|t| self.value_at(t) <= other.value_at(t))
    }
}

impl PartialEq for StepFunction {
    /// Semantic equality: equal at every `t > 0`.
    fn eq(&self, other: &Self) -> bool {
        self.pointwise_le(other) && other.pointwise_le(self)
    }
}

/// Decides `c1 r1^j <= c2 r2^j` for every integer `j >= 0`.
fn cell_law_le(c1: &Rat, r1: &Rat, c2: &Rat, r2: &Rat) -> bool {
    if c1 > c2 {
        return false; // j = 0
    }
    if c1.is_zero() {
        return !c2.is_negative();
    }
    if c2.is_zero() {
        return !c1.is_positive();
    }
    match (c1.is_positive(), c2.is_positive()) {
        (false, true) => true,
        (true, false) => false,
        // positive pair: the ratio (c2/c1)(r2/r1)^j is monotone in j, so the
        // j = 0 check plus a nondecaying ratio settles every j
        (true, true) => r2 >= r1,
        (false, false) => r2 <= r1,
    }
}

#[derive(Clone, Copy, PartialEq)]
enum PointwiseOp {
    Add,
    Mul,
}

impl PointwiseOp {
    fn apply(&self, a: &Rat, b: &Rat) -> Rat {
        match self {
            PointwiseOp::Add => a + b,
            PointwiseOp::Mul => a * b,
        }
    }
}

/// Combines two geometric cell laws with leads at a common anchor into a
/// single law for the result, when one exists. Products are always closed;
/// sums need equal ratios.
fn combine_laws(
    c1: Rat,
    r1: Rat,
    c2: Rat,
    r2: Rat,
    op: PointwiseOp,
    side: &str,
) -> Result<Option<(Rat, Rat)>> {
    if op == PointwiseOp::Mul {
        let lead = &c1 * &c2;
        if lead.is_zero() {
            return Ok(None);
        }
        return Ok(Some((lead, r1 * r2)));
    }
    if c1.is_zero() && c2.is_zero() {
        return Ok(None);
    }
    if c1.is_zero() {
        return Ok(Some((c2, r2)));
    }
    if c2.is_zero() {
        return Ok(Some((c1, r1)));
    }
    if r1 == r2 {
        let lead = c1 + c2;
        if lead.is_zero() {
            return Ok(None);
        }
        return Ok(Some((lead, r1)));
    }
    Err(Error::IncompatibleTails(format!(
        "{side} laws with distinct ratios {r1} and {r2} do not sum to a single geometric law"
    )))
}

/// Extended value: a rational or a signed infinity.
#[derive(Debug, Clone, PartialEq)]
pub enum Ext {
    Finite(Rat),
    PlusInf,
    MinusInf,
}

impl Ext {
    pub fn add(&self, other: &Ext) -> Ext {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a + b),
            (Ext::PlusInf, Ext::MinusInf) | (Ext::MinusInf, Ext::PlusInf) => {
                panic!("inf - inf in extended arithmetic")
            }
            (Ext::PlusInf, _) | (_, Ext::PlusInf) => Ext::PlusInf,
            (Ext::MinusInf, _) | (_, Ext::MinusInf) => Ext::MinusInf,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Ext::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn expect_finite(&self, what: &str) -> &Rat {
        self.finite()
            .unwrap_or_else(|| panic!("{what} is infinite"))
    }
}
