//! Exact decreasing-rearrangement engine.
//!
//! `MuView` is the rearrangement of `|f|` held in event form: a possibly
//! unbounded geometric staircase prefix (from a zero tail with ratio `r > 1`),
//! finitely many descending blocks, up to two descending geometric families
//! (the residue of a zero tail with `r < 1` and the far staircase), and a
//! constant plateau at infinity. The view always exists, even when the
//! rearranged function has accumulating breakpoints and therefore leaves the
//! representable `StepFunction` class; sampling, partial integrals, and the
//! dyadic tail laws of `{mu(2^n)}` stay exact.

use super::{Ext, InfTail, StepFunction, ZeroTail};
use crate::error::{Error, Result};
use crate::rat::{floor_log2, pow2, rat_pow, Rat};
use crate::seq::{DyadicSequence, Tail};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone)]
pub struct MuView {
    /// Staircase prefix: value `c * r^(lo - n)` on `[2^n, 2^{n+1})`, `n < lo`
    /// (`c > 0`, `r > 1`); occupies `(0, 2^lo)` and dominates everything else.
    head: Option<(Rat, Rat, i64)>,
    /// Finite blocks `(value, length)`, strictly descending values, all above
    /// the plateau.
    body: Vec<(Rat, Rat)>,
    /// Residual zero-tail family: values `c * r^m` with length `2^(lo - m)`,
    /// `m >= 1`, `0 < r < 1`. Present only when the plateau is zero.
    bot_a: Option<(Rat, Rat, i64)>,
    /// Far staircase family: values `c * r^j` with length `2^(hi + j)`,
    /// `j >= 1`, `0 < r < 1`. Present only when the plateau is zero.
    bot_b: Option<(Rat, Rat, i64)>,
    /// Constant level at infinity (`>= 0`).
    v_inf: Rat,
}

impl MuView {
    pub fn of(f: &StepFunction) -> MuView {
        let g = f.abs();
        let (v_inf, bot_b) = match g.inf_tail() {
            InfTail::Const(v) => (v.clone(), None),
            InfTail::Geom { c, r, hi } => (Rat::zero(), Some((c.clone(), r.clone(), *hi))),
        };
        let mut body: Vec<(Rat, Rat)> = Vec::new();
        for i in 0..g.piece_values().len() {
            let v = g.piece_values()[i].clone();
            if v > v_inf {
                body.push((v, &g.breakpoints()[i + 1] - &g.breakpoints()[i]));
            }
        }
        let mut head = None;
        let mut bot_a = None;
        if let Some(zt) = g.zero_tail() {
            debug_assert!(!zt.r.is_one(), "constant zero tails are normalized away");
            if zt.r > Rat::one() {
                // cells with values above everything else stay a law; the
                // finitely many below the rest are materialized
                let mut v_rest = v_inf.clone();
                for (v, _) in &body {
                    if *v > v_rest {
                        v_rest = v.clone();
                    }
                }
                if let Some((c, r, _)) = &bot_b {
                    let lead = c * r;
                    if lead > v_rest {
                        v_rest = lead;
                    }
                }
                let mut m = 1i64;
                let mut val = &zt.c * &zt.r;
                while val <= v_rest {
                    if val > v_inf {
                        body.push((val.clone(), pow2(zt.lo - m)));
                    }
                    val *= &zt.r;
                    m += 1;
                }
                head = Some((&zt.c * rat_pow(&zt.r, m - 1), zt.r.clone(), zt.lo - m + 1));
            } else if v_inf.is_positive() {
                let mut m = 1i64;
                let mut val = &zt.c * &zt.r;
                while val > v_inf {
                    body.push((val.clone(), pow2(zt.lo - m)));
                    val *= &zt.r;
                    m += 1;
                }
            } else {
                bot_a = Some((zt.c.clone(), zt.r.clone(), zt.lo));
            }
        }
        body.sort_by(|a, b| b.0.cmp(&a.0));
        let mut merged: Vec<(Rat, Rat)> = Vec::new();
        for (v, len) in body {
            if let Some(last) = merged.last_mut() {
                if last.0 == v {
                    last.1 += len;
                    continue;
                }
            }
            merged.push((v, len));
        }
        MuView {
            head,
            body: merged,
            bot_a,
            bot_b,
            v_inf,
        }
    }

    fn head_measure(&self) -> Rat {
        match &self.head {
            Some((_, _, lo)) => pow2(*lo),
            None => Rat::zero(),
        }
    }

    fn body_measure(&self) -> Rat {
        self.body.iter().map(|(_, l)| l.clone()).sum()
    }

    fn bot_a_measure(&self) -> Rat {
        match &self.bot_a {
            Some((_, _, lo)) => pow2(*lo),
            None => Rat::zero(),
        }
    }

    /// Essential supremum of `|f|`.
    pub fn sup(&self) -> Ext {
        if self.head.is_some() {
            return Ext::PlusInf;
        }
        let mut v = self.v_inf.clone();
        if let Some((val, _)) = self.body.first() {
            if *val > v {
                v = val.clone();
            }
        }
        for fam in [&self.bot_a, &self.bot_b] {
            if let Some((c, r, _)) = fam {
                let lead = c * r;
                if lead > v {
                    v = lead;
                }
            }
        }
        Ext::Finite(v)
    }

    /// Measure of the support of the rearrangement (`+inf` with a plateau or
    /// a far staircase).
    pub fn support_measure(&self) -> Ext {
        if self.v_inf.is_positive() || self.bot_b.is_some() {
            return Ext::PlusInf;
        }
        Ext::Finite(self.head_measure() + self.body_measure() + self.bot_a_measure())
    }

    /// Measure of `{ |f| > v_inf }` (finite by construction).
    fn above_plateau(&self) -> Rat {
        debug_assert!(self.bot_a.is_none() || self.v_inf.is_zero());
        self.head_measure() + self.body_measure()
    }

    fn walk(&self) -> Walk<'_> {
        Walk {
            body: &self.body,
            i: 0,
            a: self.bot_a.as_ref().map(|(c, r, lo)| GeomStream {
                val: c * r,
                ratio: r.clone(),
                len: pow2(lo - 1),
                len_factor: Rat::new(1.into(), 2.into()),
            }),
            b: self.bot_b.as_ref().map(|(c, r, hi)| GeomStream {
                val: c * r,
                ratio: r.clone(),
                len: pow2(hi + 1),
                len_factor: Rat::from_integer(2.into()),
            }),
        }
    }

    /// `mu(t)`: the decreasing rearrangement of `|f|` at `t > 0`,
    /// right-continuous.
    pub fn sample(&self, t: &Rat) -> Rat {
        assert!(t.is_positive());
        if let Some((c, r, lo)) = &self.head {
            if *t < pow2(*lo) {
                let n = floor_log2(t);
                return c * rat_pow(r, lo - n);
            }
        }
        if self.v_inf.is_positive() {
            if *t >= self.above_plateau() {
                return self.v_inf.clone();
            }
        } else if let Ext::Finite(s) = self.support_measure() {
            if *t >= s {
                return Rat::zero();
            }
        }
        let mut cum = self.head_measure();
        let mut walk = self.walk();
        while let Some((v, len)) = walk.next_block() {
            cum += len;
            if cum > *t {
                return v;
            }
        }
        // blocks exhausted without passing t (only with a plateau)
        self.v_inf.clone()
    }

    fn head_integral_to(&self, t: &Rat) -> Ext {
        // integral of the head law over (0, t], t <= 2^lo
        let Some((c, r, lo)) = &self.head else {
            return Ext::Finite(Rat::zero());
        };
        debug_assert!(*t <= pow2(*lo));
        if t.is_zero() {
            return Ext::Finite(Rat::zero());
        }
        let ratio = r * Rat::new(1.into(), 2.into());
        if ratio >= Rat::one() {
            return Ext::PlusInf;
        }
        let n_t = floor_log2(t);
        let m0 = lo - n_t + 1;
        let full = c * pow2(*lo) * rat_pow(&ratio, m0) / (Rat::one() - &ratio);
        let partial = if *t > pow2(n_t) {
            (t - pow2(n_t)) * c * rat_pow(r, lo - n_t)
        } else {
            Rat::zero()
        };
        Ext::Finite(full + partial)
    }

    fn bot_a_integral(&self) -> Rat {
        match &self.bot_a {
            Some((c, r, lo)) => {
                let ratio = r * Rat::new(1.into(), 2.into());
                c * pow2(*lo) * &ratio / (Rat::one() - &ratio)
            }
            None => Rat::zero(),
        }
    }

    fn body_integral(&self) -> Rat {
        self.body.iter().map(|(v, l)| v * l).sum()
    }

    /// Integral of the non-head part over `[head_measure, t)`; finite for
    /// every finite `t`.
    fn walk_integral_to(&self, t: &Rat) -> Rat {
        let h = self.head_measure();
        if *t <= h {
            return Rat::zero();
        }
        if self.v_inf.is_positive() {
            let d = self.above_plateau();
            if *t >= d {
                return self.body_integral() + &self.v_inf * (t - d);
            }
        } else if let Ext::Finite(s) = self.support_measure() {
            if *t >= s {
                return self.body_integral() + self.bot_a_integral();
            }
        }
        let mut cum = h;
        let mut acc = Rat::zero();
        let mut walk = self.walk();
        while let Some((v, len)) = walk.next_block() {
            if &cum + &len >= *t {
                acc += &v * (t - &cum);
                return acc;
            }
            acc += &v * &len;
            cum += len;
        }
        acc
    }

    /// `int_0^t mu` (infinite only through an `r >= 2` head).
    pub fn integral_to(&self, t: &Rat) -> Ext {
        assert!(!t.is_negative());
        if t.is_zero() {
            return Ext::Finite(Rat::zero());
        }
        let h_measure = self.head_measure();
        if self.head.is_some() && *t <= h_measure {
            return self.head_integral_to(t);
        }
        let head_part = self.head_integral_to(&h_measure);
        match head_part {
            Ext::Finite(hp) => Ext::Finite(hp + self.walk_integral_to(t)),
            inf => inf,
        }
    }

    /// `int_a^b mu`, finite for `0 < a <= b < inf` even when the head
    /// diverges near zero.
    pub fn integral_over(&self, a: &Rat, b: &Rat) -> Rat {
        assert!(a.is_positive() && a <= b);
        let h_measure = self.head_measure();
        let mut acc = Rat::zero();
        if let Some((c, r, lo)) = &self.head {
            // head cells intersecting [a, min(b, 2^lo))
            let cap = b.min(&h_measure).clone();
            if *a < cap {
                let mut n = floor_log2(a);
                while pow2(n) < cap && n < *lo {
                    let lo_t = a.max(&pow2(n)).clone();
                    let hi_t = (&cap).min(&pow2(n + 1)).clone();
                    if lo_t < hi_t {
                        acc += c * rat_pow(r, lo - n) * (hi_t - lo_t);
                    }
                    n += 1;
                }
            }
        }
        let a2 = a.max(&h_measure).clone();
        if *b > a2 {
            acc += self.walk_integral_to(b) - self.walk_integral_to(&a2);
        }
        acc
    }

    /// Total integral `int_0^inf mu = int |f|` in extended arithmetic.
    pub fn integral_full(&self) -> Ext {
        if self.v_inf.is_positive() {
            return Ext::PlusInf;
        }
        let head = self.head_integral_to(&self.head_measure());
        let Ext::Finite(head) = head else {
            return Ext::PlusInf;
        };
        let bot_b = match &self.bot_b {
            Some((c, r, hi)) => {
                let two_r = r * Rat::from_integer(2.into());
                if two_r >= Rat::one() {
                    return Ext::PlusInf;
                }
                c * pow2(*hi) * Rat::from_integer(2.into()) * &two_r / (Rat::one() - &two_r)
            }
            None => Rat::zero(),
        };
        Ext::Finite(head + self.body_integral() + self.bot_a_integral() + bot_b)
    }

    /// Measure of the non-far part above level `v` (head + body + residual
    /// family); used by the far-tail offset analysis.
    fn non_far_above(&self, v: &Rat) -> Rat {
        let mut acc = self.head_measure();
        for (val, len) in &self.body {
            if val > v {
                acc += len;
            }
        }
        if let Some((c, r, lo)) = &self.bot_a {
            let mut m1 = 0i64;
            let mut val = c * r;
            while val > *v {
                m1 += 1;
                val *= r;
                if m1 > 2_000_000 {
                    panic!("residual family scan failed to terminate");
                }
            }
            if m1 > 0 {
                acc += pow2(*lo) - pow2(lo - m1);
            }
        }
        acc
    }

    /// `{mu(2^n)}` as a dyadic sequence with exact closed-form tails.
    pub fn phi(&self) -> DyadicSequence {
        // right side
        enum RightLaw {
            Zero,
            Plateau,
            Far { delta: i64 },
        }
        let (right_law, mut w_hi) = if let Some((c_b, r_b, hi_b)) = &self.bot_b {
            let c_inf = self.head_measure() + self.body_measure() + self.bot_a_measure();
            let threshold = pow2(hi_b + 1);
            if c_inf <= threshold {
                (RightLaw::Far { delta: 0 }, hi_b + 2)
            } else {
                // mu(2^n) = far value with a one-step offset once the
                // non-far mass no longer fits in 2^(hi+1); the law starts
                // when (a) the mass above the sampled far value exceeds the
                // threshold and (b) 2^(n-1) absorbs the full non-far mass
                let mut n = hi_b + 2;
                loop {
                    let v = c_b * rat_pow(r_b, n - hi_b - 1);
                    let cond_a = self.non_far_above(&v) > threshold;
                    let cond_b = pow2(n - 1) + &threshold >= c_inf;
                    if cond_a && cond_b {
                        break;
                    }
                    n += 1;
                    assert!(n < hi_b + 4096, "far-tail law failed to stabilize");
                }
                (RightLaw::Far { delta: 1 }, n)
            }
        } else if self.v_inf.is_positive() {
            let d = self.above_plateau();
            let mut n = if d.is_zero() { 0 } else { floor_log2(&d) };
            while pow2(n) < d {
                n += 1;
            }
            (RightLaw::Plateau, n)
        } else {
            match self.support_measure() {
                Ext::Finite(s) => {
                    if s.is_zero() {
                        return DyadicSequence::zero();
                    }
                    let mut n = floor_log2(&s);
                    while pow2(n) < s {
                        n += 1;
                    }
                    (RightLaw::Zero, n)
                }
                _ => unreachable!("infinite support requires a plateau or staircase"),
            }
        };

        // left side
        let (left_kind, mut w_lo) = match &self.head {
            Some((_, _, lo)) => (LeftLaw::Head, *lo),
            None => {
                let v_max = match self.sup() {
                    Ext::Finite(v) => v,
                    _ => unreachable!("no head means finite sup"),
                };
                if v_max == self.v_inf {
                    // constant rearrangement
                    let tail = Tail::geometric(self.v_inf.clone(), Rat::one());
                    return DyadicSequence::new(
                        0,
                        vec![self.v_inf.clone()],
                        tail.clone(),
                        tail,
                    )
                    .expect("constant sequence is valid");
                }
                let mut top_len = Rat::zero();
                for (v, len) in &self.body {
                    if *v == v_max {
                        top_len += len;
                    }
                }
                for (fam, first_len) in [
                    (&self.bot_a, self.bot_a.as_ref().map(|(_, _, lo)| pow2(lo - 1))),
                    (&self.bot_b, self.bot_b.as_ref().map(|(_, _, hi)| pow2(hi + 1))),
                ] {
                    if let Some((c, r, _)) = fam {
                        if c * r == v_max {
                            top_len += first_len.unwrap();
                        }
                    }
                }
                (LeftLaw::Const(v_max), floor_log2(&top_len) - 1)
            }
        };

        if w_lo > w_hi {
            let t = w_lo;
            w_lo = w_lo.min(w_hi);
            w_hi = w_hi.max(t);
        }
        let values: Vec<Rat> = (w_lo..=w_hi).map(|n| self.sample(&pow2(n))).collect();
        let left = match (&left_kind, &self.head) {
            (LeftLaw::Head, Some((c, r, lo))) => Tail::Geometric {
                c: c * rat_pow(r, lo - w_lo),
                r: r.clone(),
            },
            (LeftLaw::Const(v), _) => Tail::geometric(v.clone(), Rat::one()),
            _ => unreachable!(),
        };
        let right = match right_law {
            RightLaw::Zero => Tail::Zero,
            RightLaw::Plateau => Tail::geometric(self.v_inf.clone(), Rat::one()),
            RightLaw::Far { delta } => {
                let (c_b, r_b, hi_b) = self.bot_b.as_ref().unwrap();
                Tail::Geometric {
                    c: c_b * rat_pow(r_b, w_hi - hi_b - delta),
                    r: r_b.clone(),
                }
            }
        };
        let seq = DyadicSequence::new(w_lo, values, left, right)
            .expect("phi samples form a valid sequence");
        debug_assert_eq!(seq.value_at(w_hi + 1), self.sample(&pow2(w_hi + 1)));
        debug_assert_eq!(seq.value_at(w_hi + 2), self.sample(&pow2(w_hi + 2)));
        debug_assert_eq!(seq.value_at(w_lo - 1), self.sample(&pow2(w_lo - 1)));
        seq
    }

    /// Dyadic cell averages `{2^-n int_{2^n}^{2^{n+1}} mu}` with closed-form
    /// tails. Far staircases admit no single geometric average law.
    pub fn phi_av(&self) -> Result<DyadicSequence> {
        if self.bot_b.is_some() {
            return Err(Error::NonClosedForm(
                "cell averages over a far staircase have no single geometric law".into(),
            ));
        }
        let (right_tail, w_hi) = if self.v_inf.is_positive() {
            let d = self.above_plateau();
            let mut n = if d.is_zero() { 0 } else { floor_log2(&d) };
            while pow2(n) < d {
                n += 1;
            }
            (Tail::geometric(self.v_inf.clone(), Rat::one()), n)
        } else {
            match self.support_measure() {
                Ext::Finite(s) => {
                    if s.is_zero() {
                        return Ok(DyadicSequence::zero());
                    }
                    let mut n = floor_log2(&s);
                    while pow2(n) < s {
                        n += 1;
                    }
                    (Tail::Zero, n)
                }
                _ => unreachable!(),
            }
        };
        let (left_tail, w_lo) = match &self.head {
            Some((c, r, lo)) => (
                // averages over head cells equal the head values
                Tail::Geometric {
                    c: c.clone(),
                    r: r.clone(),
                },
                *lo,
            ),
            None => {
                let v_max = match self.sup() {
                    Ext::Finite(v) => v,
                    _ => unreachable!(),
                };
                if v_max == self.v_inf {
                    let tail = Tail::geometric(self.v_inf.clone(), Rat::one());
                    return Ok(DyadicSequence::new(
                        0,
                        vec![self.v_inf.clone()],
                        tail.clone(),
                        tail,
                    )
                    .expect("constant sequence is valid"));
                }
                let mut top_len = Rat::zero();
                for (v, len) in &self.body {
                    if *v == v_max {
                        top_len += len;
                    }
                }
                if let Some((c, r, lo)) = &self.bot_a {
                    if c * r == v_max {
                        top_len += pow2(lo - 1);
                    }
                }
                (
                    Tail::geometric(v_max, Rat::one()),
                    floor_log2(&top_len) - 2,
                )
            }
        };
        let (w_lo, w_hi, left_tail) = if w_lo > w_hi {
            // re-anchor the left law lower when windows cross
            let lt = match (&left_tail, &self.head) {
                (Tail::Geometric { c, r }, Some(_)) if !r.is_one() => Tail::Geometric {
                    c: c * rat_pow(r, w_lo - w_hi),
                    r: r.clone(),
                },
                (t, _) => t.clone(),
            };
            (w_hi, w_hi, lt)
        } else {
            (w_lo, w_hi, left_tail)
        };
        let values: Vec<Rat> = (w_lo..=w_hi)
            .map(|n| self.integral_over(&pow2(n), &pow2(n + 1)) / pow2(n))
            .collect();
        let seq = DyadicSequence::new(w_lo, values, left_tail, right_tail)
            .expect("cell averages form a valid sequence");
        debug_assert_eq!(
            seq.value_at(w_lo - 1),
            self.integral_over(&pow2(w_lo - 1), &pow2(w_lo)) / pow2(w_lo - 1)
        );
        debug_assert_eq!(
            seq.value_at(w_hi + 1),
            self.integral_over(&pow2(w_hi + 1), &pow2(w_hi + 2)) / pow2(w_hi + 1)
        );
        Ok(seq)
    }

    /// Materializes the rearrangement as a `StepFunction` when it stays in
    /// the representable class.
    pub fn to_step_function(&self) -> Result<StepFunction> {
        if self.bot_a.is_some() {
            return Err(Error::UnrepresentableTail(
                "rearranged residual staircase accumulates at the support endpoint; \
                 use the exact sampler instead"
                    .into(),
            ));
        }
        let zero_tail = self.head.as_ref().map(|(c, r, lo)| ZeroTail {
            c: c.clone(),
            r: r.clone(),
            lo: *lo,
        });
        let inf_tail = if let Some((c_b, r_b, hi_b)) = &self.bot_b {
            let lead = c_b * r_b;
            if self.body.iter().any(|(v, _)| *v < lead) {
                return Err(Error::UnrepresentableTail(
                    "values interleave with the far staircase; the rearrangement shifts \
                     its cells off dyadic positions"
                        .into(),
                ));
            }
            if self.head_measure() + self.body_measure() != pow2(hi_b + 1) {
                return Err(Error::UnrepresentableTail(
                    "mass above the far staircase does not tile (0, 2^(hi+1)); its cells \
                     move off dyadic positions"
                        .into(),
                ));
            }
            InfTail::Geom {
                c: c_b.clone(),
                r: r_b.clone(),
                hi: *hi_b,
            }
        } else {
            InfTail::Const(self.v_inf.clone())
        };
        let mut breakpoints = vec![match &zero_tail {
            Some(zt) => pow2(zt.lo),
            None => Rat::zero(),
        }];
        let mut values = Vec::new();
        let mut cum = breakpoints[0].clone();
        for (v, len) in &self.body {
            values.push(v.clone());
            cum += len;
            breakpoints.push(cum.clone());
        }
        StepFunction::new(zero_tail, breakpoints, values, inf_tail)
    }
}

enum LeftLaw {
    Head,
    Const(Rat),
}

struct GeomStream {
    val: Rat,
    ratio: Rat,
    len: Rat,
    len_factor: Rat,
}

impl GeomStream {
    fn take(&mut self) -> (Rat, Rat) {
        let out = (self.val.clone(), self.len.clone());
        self.val = &self.val * &self.ratio;
        self.len = &self.len * &self.len_factor;
        out
    }
}

struct Walk<'a> {
    body: &'a [(Rat, Rat)],
    i: usize,
    a: Option<GeomStream>,
    b: Option<GeomStream>,
}

impl Walk<'_> {
    /// Next block in descending value order (body wins ties, then the
    /// residual family). Returns `None` only when every stream is exhausted.
    fn next_block(&mut self) -> Option<(Rat, Rat)> {
        let body_val = self.body.get(self.i).map(|(v, _)| v);
        let a_val = self.a.as_ref().map(|s| &s.val);
        let b_val = self.b.as_ref().map(|s| &s.val);
        let best = [body_val, a_val, b_val]
            .into_iter()
            .flatten()
            .max()
            .cloned()?;
        if body_val == Some(&best) {
            let out = self.body[self.i].clone();
            self.i += 1;
            return Some(out);
        }
        if a_val == Some(&best) {
            return Some(self.a.as_mut().unwrap().take());
        }
        Some(self.b.as_mut().unwrap().take())
    }
}

impl StepFunction {
    /// Exact rearrangement view of `|f|`.
    pub fn mu(&self) -> MuView {
        MuView::of(self)
    }

    /// The decreasing rearrangement `f*` as a step function, when it stays in
    /// the representable class.
    pub fn decreasing_rearrangement(&self) -> Result<StepFunction> {
        self.mu().to_step_function()
    }
}
