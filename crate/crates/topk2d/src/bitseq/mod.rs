//! Bit vectors and ternary rank/select sequences with bit-exact space
//! reporting.
//!
//! Both structures are immutable after construction. Rank answers are served
//! from cumulative samples spaced `Theta(lg n)` apart, so the auxiliary index
//! stays under `c * n / lg n` bits (`c` documented on [`BitVector::index_bits`]
//! and [`TernarySequence::space_report`]); select falls back to a binary
//! search over the samples.

mod bitvec;
mod ternary;

pub use bitvec::BitVector;
pub use ternary::{SequenceSpaceReport, TernarySequence};

/// log2(3), used by the entropy bound `ceil(n * lg 3)`.
pub(crate) const LG3: f64 = 1.584962500721156;

/// `ceil(len * lg 3)` as a bit count.
pub fn ternary_entropy_bound_bits(len: usize) -> u64 {
    (len as f64 * LG3).ceil() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_bound_examples() {
        assert_eq!(ternary_entropy_bound_bits(0), 0);
        assert_eq!(ternary_entropy_bound_bits(8), 13);
        assert_eq!(ternary_entropy_bound_bits(996), 1579);
        assert_eq!(ternary_entropy_bound_bits(2000), 3170);
    }
}
