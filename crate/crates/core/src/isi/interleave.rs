//! Block interleaver for precoding across lattice codewords.
//!
//! A block is a `rows × cols` array. Row `r` holds one lattice codeword of
//! dimension `cols`; rows are encoded in order but the array goes out column
//! by column, so entry `(r, c)` is sent at time `c·rows + r`. The symbol sent
//! `l` steps earlier is `(r − l, c)` while `l ≤ r`, a row already encoded.
//! The first `memory` rows are fixed zero guards, which keeps every
//! interferer of a data row inside the same block or in an earlier block.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockInterleaver {
    rows: usize,
    cols: usize,
    memory: usize,
}

impl BlockInterleaver {
    /// Needs `rows ≥ memory + 1` so that at least one data row remains.
    pub fn new(rows: usize, cols: usize, memory: usize) -> Result<Self> {
        if rows <= memory {
            return Err(Error::InterleaverDepth {
                depth: rows,
                memory,
            });
        }
        if cols == 0 {
            return Err(Error::InputDomain(
                "interleaver needs at least one column".into(),
            ));
        }
        Ok(Self { rows, cols, memory })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rows that carry messages.
    pub fn data_rows(&self) -> std::ops::Range<usize> {
        self.memory..self.rows
    }

    /// Transmission time of `(row, col)` within the block.
    pub fn time_of(&self, row: usize, col: usize) -> usize {
        col * self.rows + row
    }

    /// Entry sent at time `t` within the block.
    pub fn entry_at(&self, t: usize) -> (usize, usize) {
        (t % self.rows, t / self.rows)
    }

    /// Row-major block to transmission order.
    pub fn interleave<T: Copy>(&self, block: &[T]) -> Vec<T> {
        assert_eq!(block.len(), self.len(), "block size");
        (0..self.len())
            .map(|t| {
                let (r, c) = self.entry_at(t);
                block[r * self.cols + c]
            })
            .collect()
    }

    /// Transmission order back to a row-major block.
    pub fn deinterleave<T: Copy>(&self, stream: &[T]) -> Vec<T> {
        assert_eq!(stream.len(), self.len(), "block size");
        let mut out = Vec::with_capacity(self.len());
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.push(stream[self.time_of(r, c)]);
            }
        }
        out
    }

    /// Pairs `((r, c), (r', c'))` where a data entry is hit by post-cursor
    /// interference from an entry of the same block whose row is not encoded
    /// yet. Empty for every valid interleaver.
    pub fn causality_violations(&self) -> Vec<((usize, usize), (usize, usize))> {
        let mut out = Vec::new();
        for r in self.data_rows() {
            for c in 0..self.cols {
                let t = self.time_of(r, c);
                for l in 1..=self.memory.min(t) {
                    let src = self.entry_at(t - l);
                    if src.0 >= r {
                        out.push(((r, c), src));
                    }
                }
            }
        }
        out
    }
}
