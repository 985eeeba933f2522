//! Deterministic splitmix64 generator for seeded randomized probes.
//!
//! Every randomized check in the workbench draws from this generator so
//! reports are byte-identical across runs with the same seed.

use crate::scalar::{rat, Rat};

#[derive(Debug, Clone)]
pub struct SplitMix {
    state: u64,
}

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, n).
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// Nonzero rational with numerator and denominator bounded by `bound`.
    pub fn small_rat(&mut self, bound: u64) -> Rat {
        let num = (self.below(2 * bound + 1) as i64) - bound as i64;
        let den = 1 + self.below(bound) as i64;
        rat(num, den)
    }

    /// Nonzero rational (never zero).
    pub fn small_rat_nonzero(&mut self, bound: u64) -> Rat {
        loop {
            let r = self.small_rat(bound);
            if !num::Zero::is_zero(&r) {
                return r;
            }
        }
    }

    /// Rational strictly inside (lo, hi), on a grid of 1/denom steps.
    pub fn rat_in(&mut self, lo: f64, hi: f64, denom: u64) -> Rat {
        let lo_n = (lo * denom as f64).floor() as i64;
        let hi_n = (hi * denom as f64).ceil() as i64;
        debug_assert!(hi_n - lo_n >= 2, "interval too narrow for the grid");
        loop {
            let num = lo_n + self.below((hi_n - lo_n + 1) as u64) as i64;
            let r = rat(num, denom as i64);
            let v = crate::scalar::to_f64(&r);
            if v > lo && v < hi {
                return r;
            }
        }
    }

    pub fn f64_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn shuffle<T>(&mut self, v: &mut [T]) {
        for i in (1..v.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            v.swap(i, j);
        }
    }
}
