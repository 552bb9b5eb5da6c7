//! The transfer maps between dyadic sequences and step functions: the
//! Pietsch operator `D`, the dyadic sampling map `Phi`, and the cell-average
//! map `Phi_av`.
//!
//! `D` places `x_n` on the cell `[2^n, 2^{n+1})`; geometric sequence tails map
//! to the function's closed-form dyadic tails, so no truncation ever happens.
//! `Phi f = { mu(2^n, f) }` samples the decreasing rearrangement
//! right-continuously, and `Phi_av f = { 2^-n int_{2^n}^{2^{n+1}} mu(f) }`
//! takes cell averages. Both come out with exact tail laws.

use crate::error::Result;
use crate::rat::{pow2, Rat};
use crate::seq::{DyadicSequence, Tail};
use crate::step::{InfTail, StepFunction, ZeroTail};
use num_traits::{One, Zero};

/// `Dx = sum_n x_n chi_[2^n, 2^{n+1})`.
pub fn pietsch_d(x: &DyadicSequence) -> StepFunction {
    let lo = x.lo();
    let hi = x.hi();
    let zero_tail = match x.left_tail() {
        Tail::Zero => None,
        Tail::Geometric { c, r } => Some(ZeroTail {
            c: c.clone(),
            r: r.clone(),
            lo,
        }),
    };
    let mut breakpoints: Vec<Rat> = Vec::new();
    let mut values: Vec<Rat> = Vec::new();
    if zero_tail.is_none() {
        breakpoints.push(Rat::zero());
        values.push(Rat::zero());
    }
    for n in lo..=hi {
        breakpoints.push(pow2(n));
        values.push(x.value_at(n));
    }
    breakpoints.push(pow2(hi + 1));
    let inf_tail = match x.right_tail() {
        Tail::Zero => InfTail::Const(Rat::zero()),
        Tail::Geometric { c, r } => {
            if r.is_one() {
                InfTail::Const(c.clone())
            } else {
                InfTail::Geom {
                    c: c.clone(),
                    r: r.clone(),
                    hi,
                }
            }
        }
    };
    StepFunction::new(zero_tail, breakpoints, values, inf_tail)
        .expect("sequence cells always form a valid step function")
}

/// `Phi f = { mu(2^n, f) }` with right-continuous sampling.
pub fn phi_sample(f: &StepFunction) -> DyadicSequence {
    f.mu().phi()
}

/// `Phi_av f = { 2^-n int_{2^n}^{2^{n+1}} mu(s, f) ds }`.
pub fn phi_av(f: &StepFunction) -> Result<DyadicSequence> {
    f.mu().phi_av()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::pow2;
    use crate::seq::IndexSet;
    use num_bigint::BigInt;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(BigInt::from(p), BigInt::from(q))
    }
    fn ri(p: i64) -> Rat {
        r(p, 1)
    }

    #[test]
    fn d_unit_and_constant() {
        let e0 = DyadicSequence::unit(0);
        assert_eq!(
            pietsch_d(&e0),
            StepFunction::scaled_indicator(ri(1), ri(2), ri(1)).unwrap()
        );
        let chi = DyadicSequence::const_one();
        assert_eq!(pietsch_d(&chi), StepFunction::constant(ri(1)));
    }

    #[test]
    fn d_is_linear_on_compatible_tails() {
        let x = DyadicSequence::new(
            -1,
            vec![ri(3), r(1, 2)],
            Tail::Geometric { c: ri(1), r: ri(2) },
            Tail::Zero,
        )
        .unwrap();
        let y = DyadicSequence::new(
            0,
            vec![ri(-2)],
            Tail::Geometric { c: ri(2), r: ri(2) },
            Tail::Geometric { c: ri(1), r: r(1, 2) },
        )
        .unwrap();
        let lhs = pietsch_d(&x.add(&y).unwrap());
        let rhs = pietsch_d(&x).add(&pietsch_d(&y)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn d_of_shift_is_dilation() {
        for x in [
            DyadicSequence::unit(0),
            DyadicSequence::new(
                0,
                vec![ri(5), ri(1)],
                Tail::Geometric { c: ri(1), r: r(3, 2) },
                Tail::Geometric { c: ri(2), r: r(1, 2) },
            )
            .unwrap(),
        ] {
            let lhs = pietsch_d(&x.shift(1).unwrap());
            let rhs = pietsch_d(&x).dilate(&ri(2)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn phi_of_indicator() {
        let f = StepFunction::scaled_indicator(ri(0), ri(4), ri(1)).unwrap();
        let phi = phi_sample(&f);
        assert_eq!(phi, DyadicSequence::indicator_below(2));
    }

    #[test]
    fn phi_inverts_d_on_nonincreasing() {
        // x nonincreasing with a filled left side: Phi(Dx) = x
        let x = DyadicSequence::new(
            0,
            vec![ri(8), ri(4), ri(2), ri(1)],
            Tail::constant(ri(8)),
            Tail::Zero,
        )
        .unwrap();
        assert!(x.is_nonincreasing());
        assert_eq!(phi_sample(&pietsch_d(&x)), x);
        // with a geometric right tail kept symbolically
        let y = DyadicSequence::new(
            0,
            vec![ri(4)],
            Tail::constant(ri(4)),
            Tail::Geometric { c: ri(1), r: r(1, 2) },
        )
        .unwrap();
        assert!(y.is_nonincreasing());
        assert_eq!(phi_sample(&pietsch_d(&y)), y);
    }

    #[test]
    fn phi_d_interlaces_ordering_numbers() {
        // Phi(Dx) <= o(x) <= S_+ Phi(Dx), exactly; equality can fail only at
        // exact-fit sampling points (see the strict peak below)
        let samples = [
            DyadicSequence::unit(0),
            DyadicSequence::from_window(-2, vec![ri(3), ri(1), ri(2)]).unwrap(),
            DyadicSequence::new(
                0,
                vec![ri(1)],
                Tail::Geometric { c: ri(1), r: ri(2) },
                Tail::Geometric { c: ri(1), r: r(1, 2) },
            )
            .unwrap(),
            DyadicSequence::new(
                -1,
                vec![r(5, 2), ri(-3), r(7, 3)],
                Tail::Geometric { c: ri(2), r: r(1, 2) },
                Tail::Zero,
            )
            .unwrap(),
        ];
        for x in &samples {
            let o = x.ordering_numbers();
            let phi = phi_sample(&pietsch_d(x));
            assert!(phi.pointwise_le(&o), "Phi(Dx) <= o(x)");
            let shifted = phi.shift(1).unwrap();
            assert!(o.pointwise_le(&shifted), "o(x) <= S+ Phi(Dx)");
        }
        // the strict-peak cell samples the level below the peak
        let e0 = DyadicSequence::unit(0);
        let phi = phi_sample(&pietsch_d(&e0));
        assert_eq!(phi.value_at(0), ri(0));
        assert_eq!(e0.ordering_numbers().value_at(0), ri(1));
    }

    #[test]
    fn phi_shift_inequality_for_sums() {
        // Phi(f+g) <= S_+ (Phi f + Phi g)
        let f = StepFunction::from_pieces(
            vec![ri(0), ri(1), ri(3), ri(6)],
            vec![ri(2), ri(5), ri(1)],
        )
        .unwrap();
        let g = StepFunction::from_pieces(vec![ri(0), ri(2), ri(4)], vec![ri(1), ri(7)]).unwrap();
        let lhs = phi_sample(&f.add(&g).unwrap());
        let rhs = phi_sample(&f)
            .add(&phi_sample(&g))
            .unwrap()
            .shift(1)
            .unwrap();
        assert!(lhs.pointwise_le(&rhs));
    }

    #[test]
    fn phi_monotone_in_rearrangement() {
        let f = StepFunction::from_pieces(vec![ri(0), ri(2), ri(3)], vec![ri(1), ri(4)]).unwrap();
        let g = StepFunction::from_pieces(vec![ri(0), ri(2), ri(4)], vec![ri(2), ri(4)]).unwrap();
        assert!(f
            .decreasing_rearrangement()
            .unwrap()
            .pointwise_le(&g.decreasing_rearrangement().unwrap()));
        assert!(phi_sample(&f).pointwise_le(&phi_sample(&g)));
    }

    #[test]
    fn phi_av_inverts_d_on_nonincreasing() {
        let x = DyadicSequence::new(0, vec![ri(6), ri(3)], Tail::constant(ri(6)), Tail::Zero)
            .unwrap();
        assert_eq!(phi_av(&pietsch_d(&x)).unwrap(), x);
        let f = StepFunction::from_pieces(vec![ri(0), ri(1), ri(2)], vec![ri(2), ri(5)]).unwrap();
        let av = phi_av(&f).unwrap();
        assert_eq!(av.value_at(0), ri(2));
        assert_eq!(av.value_at(-1), ri(5));
    }

    #[test]
    fn blockwise_zero_integrals() {
        // int over each dyadic cell of (mu - D Phi_av) vanishes
        let f = StepFunction::from_pieces(
            vec![ri(0), r(1, 2), ri(3), ri(5)],
            vec![ri(4), ri(1), ri(6)],
        )
        .unwrap();
        let mv = f.mu();
        let av = phi_av(&f).unwrap();
        let d_av = pietsch_d(&av);
        for k in -6..=6 {
            let cell = mv.integral_over(&pow2(k), &pow2(k + 1));
            let d_cell = d_av
                .integrate(&pow2(k), Some(&pow2(k + 1)))
                .finite()
                .expect("cell integral is finite")
                .clone();
            assert_eq!(cell, d_cell, "cell {k}");
        }
    }

    #[test]
    fn sandwich_for_nonincreasing_f() {
        // f <= D Phi f <= sigma_2 f for nonincreasing f
        let cases = [
            pietsch_d(
                &DyadicSequence::new(
                    0,
                    vec![ri(8), ri(4), ri(2), ri(1)],
                    Tail::constant(ri(8)),
                    Tail::Zero,
                )
                .unwrap(),
            ),
            StepFunction::new(
                Some(ZeroTail {
                    c: ri(4),
                    r: r(3, 2),
                    lo: 0,
                }),
                vec![ri(1), ri(3), ri(7)],
                vec![ri(4), ri(2)],
                InfTail::Const(ri(1)),
            )
            .unwrap(),
        ];
        for f in &cases {
            let d_phi = pietsch_d(&phi_sample(f));
            let sigma2 = f.dilate(&ri(2)).unwrap();
            assert!(f.pointwise_le(&d_phi), "f <= D Phi f");
            assert!(d_phi.pointwise_le(&sigma2), "D Phi f <= sigma_2 f");
        }
    }

    #[test]
    fn one_sided_sequences_transfer() {
        let x = DyadicSequence::with_index_set(
            0,
            vec![ri(2), ri(1)],
            Tail::Zero,
            Tail::Zero,
            IndexSet::ZPlus,
        )
        .unwrap();
        let f = pietsch_d(&x);
        assert_eq!(f.value_at(&r(1, 2)), ri(0));
        assert_eq!(f.value_at(&ri(1)), ri(2));
        assert_eq!(f.value_at(&ri(2)), ri(1));
    }
}
