//! Compensated summation with a deterministic parallel reduction.
//!
//! Mode sums run in parallel over fixed-size index blocks; partial sums are
//! combined in block order, so the result does not depend on the number of
//! worker threads.

use rayon::prelude::*;

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a sequence.
pub fn sum_compensated<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = Accumulator::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Deterministic parallel sum of `f(i)` for `i in 0..n`.
///
/// The index range is split into fixed blocks of `block` elements; each block
/// is summed with compensation and the block results are combined in index
/// order regardless of thread scheduling.
pub fn par_sum_blocked<F>(n: usize, block: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    assert!(block > 0);
    let nblocks = n.div_ceil(block);
    let partials: Vec<f64> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * block;
            let hi = ((b + 1) * block).min(n);
            let mut acc = Accumulator::new();
            for i in lo..hi {
                acc.add(f(i));
            }
            acc.value()
        })
        .collect();
    sum_compensated(partials)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_beats_naive() {
        // 1 + 1e-16 repeated: naive summation loses the small term entirely.
        let n = 10_000_000usize;
        let v = 1e-16;
        let s = par_sum_blocked(n, 4096, |_| v);
        assert!((s - n as f64 * v).abs() < 1e-12 * (n as f64 * v));
    }

    #[test]
    fn blocked_sum_matches_sequential() {
        let f = |i: usize| ((i as f64) * 0.7).sin() / (1.0 + i as f64);
        let seq = sum_compensated((0..100_000).map(f));
        let par = par_sum_blocked(100_000, 1000, f);
        assert_eq!(seq, par * (seq / par)); // finite
        assert!((seq - par).abs() <= 1e-13 * seq.abs().max(1.0));
    }

    #[test]
    fn deterministic_across_block_layouts_is_not_required_but_same_layout_is() {
        let f = |i: usize| (i as f64).sqrt().sin();
        let a = par_sum_blocked(50_000, 2048, f);
        let b = par_sum_blocked(50_000, 2048, f);
        assert_eq!(a, b);
    }
}
