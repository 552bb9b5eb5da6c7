//! Seeded random generators for verification suites and property tests.
//!
//! Sequences have window length at most 12, values in `[-8, 8]` with
//! denominators up to 16, and tails drawn from `{Zero, r in {1/2, 1, 3/2, 2}}`
//! (right tails capped at ratio 1). Matrices have rational entries in
//! `[-4, 4]`, dimensions up to 6, up to 3 blocks, and weights from
//! `{1/2, 1, 2}`. Everything is driven by a counter-based stream cipher so a
//! fixed seed reproduces byte-identical runs.

use crate::opmodel::{diag_embed, BlockAlgebra, EmbedTarget, Operator, C64};
use crate::rat::Rat;
use crate::seq::{DyadicSequence, Tail};
use nalgebra::DMatrix;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

pub struct Sampler {
    rng: ChaCha12Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// Derives an independent stream (used by suites that run after others
    /// so trial counts do not shift downstream draws).
    pub fn fork(&mut self, tag: u64) -> Sampler {
        Sampler::new(self.rng.random::<u64>() ^ tag)
    }

    pub fn rat_in(&mut self, max_abs: i64, max_den: i64) -> Rat {
        let q = self.rng.random_range(1..=max_den);
        let p = self.rng.random_range(-max_abs * q..=max_abs * q);
        Rat::new(p.into(), q.into())
    }

    pub fn nonzero_rat_in(&mut self, max_abs: i64, max_den: i64) -> Rat {
        loop {
            let v = self.rat_in(max_abs, max_den);
            if !v.is_zero() {
                return v;
            }
        }
    }

    fn tail(&mut self, right_side: bool) -> Tail {
        let ratios: &[(i64, i64)] = if right_side {
            &[(1, 2), (1, 1)]
        } else {
            &[(1, 2), (1, 1), (3, 2), (2, 1)]
        };
        match self.rng.random_range(0..=ratios.len()) {
            0 => Tail::Zero,
            i => {
                let (p, q) = ratios[i - 1];
                Tail::geometric(
                    self.nonzero_rat_in(8, 16),
                    Rat::new(p.into(), q.into()),
                )
            }
        }
    }

    /// A random sequence from the documented family.
    pub fn sequence(&mut self) -> DyadicSequence {
        let len = self.rng.random_range(1..=12usize);
        let lo = self.rng.random_range(-6..=6i64);
        let values = (0..len).map(|_| self.rat_in(8, 16)).collect();
        let left = self.tail(false);
        let right = self.tail(true);
        DyadicSequence::new(lo, values, left, right).expect("sampled sequence is valid")
    }

    /// A random sequence with zero tails (finitely supported).
    pub fn finite_sequence(&mut self) -> DyadicSequence {
        let len = self.rng.random_range(1..=12usize);
        let lo = self.rng.random_range(-6..=6i64);
        let values = (0..len).map(|_| self.rat_in(8, 16)).collect();
        DyadicSequence::new(lo, values, Tail::Zero, Tail::Zero).expect("valid window sequence")
    }

    /// A nonincreasing nonnegative sequence with a constant left tail (the
    /// shape of ordering numbers).
    pub fn nonincreasing_sequence(&mut self) -> DyadicSequence {
        let base = self.finite_sequence().abs().ordering_numbers();
        if base.is_zero() {
            DyadicSequence::unit(0).ordering_numbers()
        } else {
            base
        }
    }

    pub fn algebra(&mut self) -> BlockAlgebra {
        let blocks = self.rng.random_range(1..=3usize);
        let specs = (0..blocks)
            .map(|_| {
                let d = self.rng.random_range(1..=6usize);
                let w = match self.rng.random_range(0..3u8) {
                    0 => Rat::new(1.into(), 2.into()),
                    1 => Rat::one(),
                    _ => Rat::from_integer(2.into()),
                };
                (d, w)
            })
            .collect();
        BlockAlgebra::new(specs).expect("sampled algebra is valid")
    }

    /// Exact-tier random diagonal operator.
    pub fn diagonal_operator(&mut self) -> Operator {
        let algebra = self.algebra();
        let entries = algebra
            .blocks
            .iter()
            .map(|b| (0..b.dim).map(|_| self.rat_in(4, 16)).collect())
            .collect();
        Operator::diagonal(algebra, entries).expect("sampled diagonal is valid")
    }

    /// A pair of diagonal operators over one algebra.
    pub fn diagonal_pair(&mut self) -> (Operator, Operator) {
        let algebra = self.algebra();
        let mut draw = |alg: &BlockAlgebra| {
            let entries = alg
                .blocks
                .iter()
                .map(|b| (0..b.dim).map(|_| self.rat_in(4, 16)).collect())
                .collect();
            Operator::diagonal(alg.clone(), entries).expect("valid diagonal")
        };
        let x = draw(&algebra);
        let y = draw(&algebra);
        (x, y)
    }

    /// Numeric-tier random dense pair over one algebra (real rational
    /// entries, stored as doubles).
    pub fn dense_pair(&mut self) -> (Operator, Operator) {
        let algebra = self.algebra();
        let mut draw = |alg: &BlockAlgebra| {
            let mats = alg
                .blocks
                .iter()
                .map(|b| {
                    DMatrix::from_fn(b.dim, b.dim, |_, _| {
                        C64::new(crate::rat::rat_to_f64(&self.rat_in(4, 16)), 0.0)
                    })
                })
                .collect();
            Operator::dense(alg.clone(), mats).expect("valid dense operator")
        };
        let x = draw(&algebra);
        let y = draw(&algebra);
        (x, y)
    }

    /// A finitely supported sequence together with an algebra that tiles it.
    pub fn tileable(&mut self) -> (DyadicSequence, BlockAlgebra) {
        // cells at n >= -1 tile with atoms of weight 1/2
        let len = self.rng.random_range(1..=6usize);
        let lo = self.rng.random_range(-1..=3i64);
        let values: Vec<Rat> = (0..len).map(|_| self.rat_in(8, 16)).collect();
        let x = DyadicSequence::new(lo, values, Tail::Zero, Tail::Zero).expect("valid window");
        let total_cells: i64 = (x.lo()..=x.hi()).map(|n| 1i64 << (n + 1).max(0)).sum();
        let atoms = (2 * total_cells + 4).max(8) as usize;
        let algebra = BlockAlgebra::single(atoms, Rat::new(1.into(), 2.into()));
        (x, algebra)
    }

    /// Embeds a random tileable sequence, returning it with both targets.
    pub fn tileable_embedding(&mut self) -> (DyadicSequence, Operator, Operator) {
        let (x, alg) = self.tileable();
        let block = diag_embed(&x, EmbedTarget::Block(&alg)).expect("tiles by construction");
        let comm = diag_embed(&x, EmbedTarget::Commutative).expect("commutative always embeds");
        (x, block, comm)
    }

    /// Haar-ish random unitary via QR of a random complex matrix.
    pub fn unitary(&mut self, dim: usize) -> DMatrix<C64> {
        let m = DMatrix::from_fn(dim, dim, |_, _| {
            C64::new(
                self.rng.random::<f64>() * 2.0 - 1.0,
                self.rng.random::<f64>() * 2.0 - 1.0,
            )
        });
        let qr = m.qr();
        qr.q()
    }

    pub fn usize_in(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn bool(&mut self) -> bool {
        self.rng.random::<bool>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let mut a = Sampler::new(7);
        let mut b = Sampler::new(7);
        for _ in 0..20 {
            assert_eq!(a.sequence(), b.sequence());
        }
        let (xa, _) = a.diagonal_pair();
        let (xb, _) = b.diagonal_pair();
        assert_eq!(
            xa.singular_value_function().unwrap(),
            xb.singular_value_function().unwrap()
        );
    }

    #[test]
    fn tileable_always_embeds() {
        let mut s = Sampler::new(3);
        for _ in 0..50 {
            let (x, block, comm) = s.tileable_embedding();
            let mu_block = block.singular_value_function().unwrap();
            let mu_comm = comm.singular_value_function().unwrap();
            assert_eq!(mu_block, mu_comm, "mu-level target independence for {x:?}");
        }
    }

    #[test]
    fn unitaries_are_unitary() {
        let mut s = Sampler::new(11);
        let u = s.unitary(5);
        let id = &u * u.adjoint();
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)].re - want).abs() < 1e-10);
                assert!(id[(i, j)].im.abs() < 1e-10);
            }
        }
    }
}
