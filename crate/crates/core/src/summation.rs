//! Compensated floating-point accumulation.

use std::iter::Sum;
use std::ops::AddAssign;

use rayon::prelude::*;

/// Neumaier's variant of Kahan summation.
///
/// Unlike plain Kahan it stays accurate when an addend is larger in magnitude
/// than the running total, which happens for the alternating-sign series here.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum in, keeping both compensation terms.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for CompensatedSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl Sum<f64> for CompensatedSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Terms per parallel work unit in [`checkpointed_sum`].
pub const CHUNK_SIZE: u64 = 1 << 13;

/// Compensated prefix sums of `term(1) + term(2) + ...`, reported at each
/// checkpoint (sorted, deduplicated, those above `last` dropped; `last`
/// itself is always reported).
///
/// Work is split into fixed-size chunks that never straddle a checkpoint.
/// Chunks run in parallel and are merged in ascending order, so the output
/// is identical for every thread count.
pub fn checkpointed_sum<F, E>(last: u64, checkpoints: &[u64], term: F) -> Result<Vec<(u64, f64)>, E>
where
    F: Fn(u64) -> Result<f64, E> + Sync,
    E: Send,
{
    let marks = checkpoint_schedule(last, checkpoints);
    let mut ranges = Vec::new();
    let mut start = 1;
    for &mark in &marks {
        let mut lo = start;
        while lo <= mark {
            let hi = (lo + CHUNK_SIZE - 1).min(mark);
            ranges.push((lo, hi));
            lo = hi + 1;
        }
        start = mark + 1;
    }
    let partials: Vec<CompensatedSum> = ranges
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc = CompensatedSum::new();
            for i in lo..=hi {
                acc.add(term(i)?);
            }
            Ok(acc)
        })
        .collect::<Result<_, E>>()?;

    let mut out = Vec::with_capacity(marks.len());
    let mut total = CompensatedSum::new();
    let mut next = marks.iter().peekable();
    for (&(_, hi), part) in ranges.iter().zip(&partials) {
        total.merge(part);
        if next.peek() == Some(&&hi) {
            out.push((hi, total.value()));
            next.next();
        }
    }
    Ok(out)
}

/// The sorted, deduplicated checkpoints `<= last`, ending with `last`.
pub fn checkpoint_schedule(last: u64, checkpoints: &[u64]) -> Vec<u64> {
    let mut marks: Vec<u64> = checkpoints
        .iter()
        .copied()
        .filter(|&c| c >= 1 && c <= last)
        .chain(std::iter::once(last))
        .filter(|&c| c >= 1)
        .collect();
    marks.sort_unstable();
    marks.dedup();
    marks
}
