//! Streaming pairwise (tree) summation.

use crate::scalar::Scalar;

const BLOCK: usize = 32;
const MAX_DEPTH: usize = 64;

/// Accumulates values in arrival order: runs of `BLOCK` values are summed
/// left to right, then completed blocks are merged as a balanced binary tree.
/// The result depends only on the sequence of pushed values.
pub(crate) struct PairwiseSum<T> {
    block: T,
    block_len: usize,
    partials: [T; MAX_DEPTH],
    levels: [u8; MAX_DEPTH],
    depth: usize,
}

impl<T: Scalar> PairwiseSum<T> {
    pub(crate) fn new() -> Self {
        PairwiseSum {
            block: T::zero(),
            block_len: 0,
            partials: [T::zero(); MAX_DEPTH],
            levels: [0; MAX_DEPTH],
            depth: 0,
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, v: T) {
        self.block = self.block + v;
        self.block_len += 1;
        if self.block_len == BLOCK {
            self.flush_block();
        }
    }

    fn flush_block(&mut self) {
        let mut value = self.block;
        let mut level = 0u8;
        while self.depth > 0 && self.levels[self.depth - 1] == level {
            self.depth -= 1;
            value = self.partials[self.depth] + value;
            level += 1;
        }
        self.partials[self.depth] = value;
        self.levels[self.depth] = level;
        self.depth += 1;
        self.block = T::zero();
        self.block_len = 0;
    }

    pub(crate) fn total(mut self) -> T {
        if self.block_len > 0 {
            self.flush_block();
        }
        let mut acc = T::zero();
        for i in (0..self.depth).rev() {
            acc = self.partials[i] + acc;
        }
        acc
    }
}

pub(crate) fn pairwise_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut acc = PairwiseSum::new();
    values.into_iter().for_each(|v| acc.push(v));
    acc.total()
}
