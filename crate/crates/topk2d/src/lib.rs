//! Space-efficient encodings for range top-k queries on 2-row and m-row
//! integer grids, answered without access to the original values, together
//! with brute-force oracles, bit-exact space accounting, and executable
//! verification suites for the combinatorial bounds the encodings rely on.
//!
//! The `examples/` directory holds one runnable program per capability; the
//! `topk2d` binary exposes the same operations as subcommands.

pub mod bitseq;
pub mod error;
pub mod grid;
pub mod prefix3sided;
pub mod row_topk;
pub mod topk_dag;

pub use error::{Error, Result};
pub use grid::{AnswerList, Grid2D, Position, QueryMode, TopKQuery};
