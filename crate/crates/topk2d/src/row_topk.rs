//! Single-row sorted top-k encodings.
//!
//! The 2-row and m-row structures are parameterized over any encoding that
//! can answer sorted range top-k queries on one row without the original
//! values. [`PermutationRowEncoding`] is the reference implementation: it
//! stores the rank of every position in `n * ceil(lg n)` bits and answers a
//! query by a heap scan over the range.

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use crate::error::{Error, Result};

/// Encoding of one row that answers sorted range top-k queries from its own
/// state only.
pub trait RowEncoding: Send + Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Columns of the `min(k, j-i+1)` largest values in `[i, j]`, sorted by
    /// decreasing value. 1-based inclusive bounds.
    fn topk_sorted(&self, i: usize, j: usize, k: usize) -> Result<Vec<usize>>;

    /// Column of the `rank`-th largest value in `[i, j]`, if the range holds
    /// that many cells.
    fn kth_largest(&self, i: usize, j: usize, rank: usize) -> Result<Option<usize>> {
        let cols = self.topk_sorted(i, j, rank)?;
        Ok(cols.get(rank - 1).copied())
    }

    /// Which of two columns holds the larger value.
    fn larger_of(&self, x: usize, y: usize) -> Result<usize> {
        let (lo, hi) = (x.min(y), x.max(y));
        let cols = self.topk_sorted(lo, hi, hi - lo + 1)?;
        for c in cols {
            if c == x || c == y {
                return Ok(c);
            }
        }
        unreachable!("columns {x},{y} missing from their own range");
    }

    /// Claimed size of the encoding in bits.
    fn size_bits(&self) -> u64;
}

/// Reference row encoding: the in-row rank of every position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationRowEncoding {
    /// `perm[i]` is the rank (1 = smallest) of position `i+1` among the row.
    perm: Vec<u32>,
}

impl PermutationRowEncoding {
    /// Ranks a row of distinct values; the values themselves are discarded.
    pub fn encode_row(row: &[impl Into<i64> + Copy]) -> Result<PermutationRowEncoding> {
        let values: Vec<i64> = row.iter().map(|&v| v.into()).collect();
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| values[i]);
        for w in order.windows(2) {
            if values[w[0]] == values[w[1]] {
                return Err(Error::DuplicateValues);
            }
        }
        let mut perm = vec![0u32; n];
        for (rank0, &i) in order.iter().enumerate() {
            perm[i] = rank0 as u32 + 1;
        }
        Ok(PermutationRowEncoding { perm })
    }

    pub fn from_perm(perm: Vec<u32>) -> PermutationRowEncoding {
        PermutationRowEncoding { perm }
    }

    pub fn perm(&self) -> &[u32] {
        &self.perm
    }

    /// In-row rank of a column (1 = smallest value).
    pub fn rank_of(&self, col: usize) -> u32 {
        self.perm[col - 1]
    }

    fn check_range(&self, i: usize, j: usize) -> Result<()> {
        if i < 1 || i > j || j > self.perm.len() {
            return Err(Error::range(format!(
                "row range [{i},{j}] invalid for length {}",
                self.perm.len()
            )));
        }
        Ok(())
    }
}

impl RowEncoding for PermutationRowEncoding {
    fn len(&self) -> usize {
        self.perm.len()
    }

    fn topk_sorted(&self, i: usize, j: usize, k: usize) -> Result<Vec<usize>> {
        self.check_range(i, j)?;
        let take = k.min(j - i + 1);
        // Min-heap of the k best seen so far: O((j-i+1) lg k).
        let mut heap: BinaryHeap<Reverse<(u32, usize)>> = BinaryHeap::with_capacity(take + 1);
        for col in i..=j {
            heap.push(Reverse((self.perm[col - 1], col)));
            if heap.len() > take {
                heap.pop();
            }
        }
        let mut best: Vec<(u32, usize)> = heap.into_iter().map(|Reverse(p)| p).collect();
        best.sort_by(|a, b| b.0.cmp(&a.0));
        Ok(best.into_iter().map(|(_, col)| col).collect())
    }

    fn larger_of(&self, x: usize, y: usize) -> Result<usize> {
        self.check_range(x.min(y), x.max(y))?;
        Ok(if self.perm[x - 1] > self.perm[y - 1] { x } else { y })
    }

    fn size_bits(&self) -> u64 {
        let n = self.perm.len() as u64;
        let width = if n <= 1 { 0 } else { 64 - (n - 1).leading_zeros() as u64 };
        n * width
    }
}
