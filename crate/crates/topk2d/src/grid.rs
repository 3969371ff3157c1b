//! Grid representation, query vocabulary, and the brute-force oracle that
//! every encoding in this crate is tested against.
//!
//! Values are normalized to the permutation `1..=m*n` at ingestion; all
//! downstream structures see ranks only.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// A position in a grid, 1-based in both coordinates.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    pub fn new(row: usize, col: usize) -> Self {
        Position { row, col }
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Ordered list of answer positions. In sorted mode the values at the
/// positions are strictly decreasing.
pub type AnswerList = Vec<Position>;

/// Whether answers must come back in decreasing value order.
#[derive(Copy, Clone, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
pub enum QueryMode {
    Sorted,
    Unsorted,
}

/// A rectangular top-k query.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TopKQuery {
    pub r1: usize,
    pub r2: usize,
    pub c1: usize,
    pub c2: usize,
    pub k: usize,
    pub mode: QueryMode,
}

impl TopKQuery {
    pub fn sorted(r1: usize, r2: usize, c1: usize, c2: usize, k: usize) -> Self {
        TopKQuery { r1, r2, c1, c2, k, mode: QueryMode::Sorted }
    }

    pub fn unsorted(r1: usize, r2: usize, c1: usize, c2: usize, k: usize) -> Self {
        TopKQuery { r1, r2, c1, c2, k, mode: QueryMode::Unsorted }
    }
}

/// An `m x n` grid of distinct ranks `1..=m*n`, row-major.
///
/// Immutable after construction; safe to share across threads.
#[derive(Clone, PartialEq, Eq)]
pub struct Grid2D {
    m: usize,
    n: usize,
    cells: Vec<u32>,
}

impl fmt::Debug for Grid2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Grid2D {}x{}", self.m, self.n)?;
        for r in 1..=self.m {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Grid2D {
    /// Builds a grid from raw integer rows, replacing each value by its rank.
    ///
    /// Ties are broken by the (row, col) lexicographic order of the
    /// positions, so the result is always a permutation of `1..=m*n` and the
    /// relative order of distinct raw values is unchanged.
    pub fn normalize_ranks(raw: &[Vec<i64>]) -> Result<Grid2D> {
        let m = raw.len();
        if m == 0 {
            return Err(Error::shape("grid must have at least one row"));
        }
        let n = raw[0].len();
        if n == 0 {
            return Err(Error::shape("grid must have at least one column"));
        }
        for (i, row) in raw.iter().enumerate() {
            if row.len() != n {
                return Err(Error::shape(format!(
                    "ragged input: row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    n
                )));
            }
        }
        let mut order: Vec<usize> = (0..m * n).collect();
        // Sort by (value, row, col); the flat index encodes the tie-break.
        order.sort_by_key(|&idx| (raw[idx / n][idx % n], idx));
        let mut cells = vec![0u32; m * n];
        for (rank0, &idx) in order.iter().enumerate() {
            cells[idx] = (rank0 + 1) as u32;
        }
        Ok(Grid2D { m, n, cells })
    }

    /// Builds a grid directly from rank rows (must be a permutation of `1..=m*n`).
    pub fn from_ranks(rows: &[Vec<u32>]) -> Result<Grid2D> {
        let raw: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|&v| v as i64).collect()).collect();
        let grid = Grid2D::normalize_ranks(&raw)?;
        for (idx, &v) in grid.cells.iter().enumerate() {
            if rows[idx / grid.n][idx % grid.n] != v {
                return Err(Error::shape("input rows are not a permutation of 1..=m*n"));
            }
        }
        Ok(grid)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Value at a 1-based position.
    pub fn value(&self, row: usize, col: usize) -> u32 {
        debug_assert!(1 <= row && row <= self.m && 1 <= col && col <= self.n);
        self.cells[(row - 1) * self.n + (col - 1)]
    }

    pub fn value_at(&self, pos: Position) -> u32 {
        self.value(pos.row, pos.col)
    }

    /// One row of ranks, 1-based row index.
    pub fn row(&self, row: usize) -> &[u32] {
        &self.cells[(row - 1) * self.n..row * self.n]
    }

    /// The 2-row subgrid formed by rows `a` and `b` of this grid.
    pub fn row_pair(&self, a: usize, b: usize) -> Result<Grid2D> {
        if a == b || a < 1 || b < 1 || a > self.m || b > self.m {
            return Err(Error::shape(format!("invalid row pair ({a},{b})")));
        }
        let raw = vec![
            self.row(a).iter().map(|&v| v as i64).collect(),
            self.row(b).iter().map(|&v| v as i64).collect(),
        ];
        Grid2D::normalize_ranks(&raw)
    }

    /// Grid with columns reversed (column j becomes column n+1-j).
    pub fn reverse_columns(&self) -> Grid2D {
        let mut cells = Vec::with_capacity(self.m * self.n);
        for r in 1..=self.m {
            cells.extend(self.row(r).iter().rev().copied());
        }
        Grid2D { m: self.m, n: self.n, cells }
    }

    fn check_query(&self, q: &TopKQuery) -> Result<()> {
        if q.r1 < 1 || q.r1 > q.r2 || q.r2 > self.m || q.c1 < 1 || q.c1 > q.c2 || q.c2 > self.n {
            return Err(Error::range(format!(
                "query rows {}..{} cols {}..{} outside {}x{} grid",
                q.r1, q.r2, q.c1, q.c2, self.m, self.n
            )));
        }
        if q.k == 0 {
            return Err(Error::range("k must be at least 1"));
        }
        Ok(())
    }

    /// Exact answer by scanning the rectangle.
    ///
    /// If the rectangle holds fewer than `k` cells, all cells are returned.
    /// Unsorted mode also returns decreasing order; callers treating the
    /// result as a set may ignore it.
    pub fn oracle_topk(&self, q: &TopKQuery) -> Result<AnswerList> {
        self.check_query(q)?;
        let mut hits: Vec<(u32, Position)> = Vec::new();
        for row in q.r1..=q.r2 {
            for col in q.c1..=q.c2 {
                hits.push((self.value(row, col), Position::new(row, col)));
            }
        }
        hits.sort_by(|x, y| y.0.cmp(&x.0));
        hits.truncate(q.k);
        Ok(hits.into_iter().map(|(_, p)| p).collect())
    }

    /// Writes the grid as CSV with a `# m n` header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# {} {}", self.m, self.n)?;
        for r in 1..=self.m {
            let line: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    /// Reads a CSV grid: one row per line, integers, optional `# m n` first line.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Grid2D> {
        let mut raw: Vec<Vec<i64>> = Vec::new();
        let mut declared: Option<(usize, usize)> = None;
        for line in input.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let dims: Vec<&str> = rest.split_whitespace().collect();
                if dims.len() == 2 {
                    let m = dims[0].parse().map_err(|_| Error::format("bad header"))?;
                    let n = dims[1].parse().map_err(|_| Error::format("bad header"))?;
                    declared = Some((m, n));
                }
                continue;
            }
            let row: Result<Vec<i64>> = line
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::format(format!("bad integer {tok:?}")))
                })
                .collect();
            raw.push(row?);
        }
        let grid = Grid2D::normalize_ranks(&raw)?;
        if let Some((m, n)) = declared {
            if (m, n) != (grid.m, grid.n) {
                return Err(Error::format(format!(
                    "header declares {}x{} but grid is {}x{}",
                    m, n, grid.m, grid.n
                )));
            }
        }
        Ok(grid)
    }
}

/// The 2x9 sample grid used throughout the tests and examples.
pub fn sample_2x9() -> Grid2D {
    Grid2D::normalize_ranks(&[
        vec![1, 21, 17, 12, 20, 3, 15, 11, 10],
        vec![6, 5, 16, 14, 19, 2, 18, 4, 7],
    ])
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_breaks_ties_lexicographically() {
        let g = Grid2D::normalize_ranks(&[vec![5, 5], vec![5, 5]]).unwrap();
        assert_eq!(g.row(1), &[1, 2]);
        assert_eq!(g.row(2), &[3, 4]);
    }

    #[test]
    fn normalize_mixed_values() {
        let g = Grid2D::normalize_ranks(&[vec![10, -3], vec![7, 7]]).unwrap();
        assert_eq!(g.row(1), &[4, 1]);
        assert_eq!(g.row(2), &[2, 3]);
    }

    #[test]
    fn normalize_preserves_order_of_distinct_values() {
        // The sample grid's raw values are distinct but not contiguous, so the
        // ranks compact them while preserving every pairwise comparison.
        let raw = [
            vec![1i64, 21, 17, 12, 20, 3, 15, 11, 10],
            vec![6, 5, 16, 14, 19, 2, 18, 4, 7],
        ];
        let g = Grid2D::normalize_ranks(&raw).unwrap();
        for r1 in 1..=2usize {
            for c1 in 1..=9usize {
                for r2 in 1..=2usize {
                    for c2 in 1..=9usize {
                        let raw_lt = raw[r1 - 1][c1 - 1] < raw[r2 - 1][c2 - 1];
                        let rank_lt = g.value(r1, c1) < g.value(r2, c2);
                        assert_eq!(raw_lt, rank_lt);
                    }
                }
            }
        }
        let mut sorted: Vec<u32> = g.cells.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (1..=18).collect::<Vec<u32>>());
    }

    #[test]
    fn normalize_is_idempotent() {
        let g = Grid2D::normalize_ranks(&[vec![10, -3], vec![7, 7]]).unwrap();
        let again =
            Grid2D::normalize_ranks(&[g.row(1).iter().map(|&v| v as i64).collect(), g.row(2).iter().map(|&v| v as i64).collect()])
                .unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn ragged_input_is_rejected() {
        let err = Grid2D::normalize_ranks(&[vec![1, 2], vec![3]]).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn tall_two_row_grids_are_allowed() {
        // 2x1 grids are legitimate inputs for the 2-row encodings.
        let g = Grid2D::normalize_ranks(&[vec![9], vec![4]]).unwrap();
        assert_eq!((g.m(), g.n()), (2, 1));
        assert_eq!(g.value(1, 1), 2);
    }

    #[test]
    fn oracle_matches_traversal_listing_on_sample() {
        let g = sample_2x9();
        let ans = g.oracle_topk(&TopKQuery::sorted(1, 2, 1, 9, 3)).unwrap();
        assert_eq!(ans, vec![Position::new(1, 2), Position::new(1, 5), Position::new(2, 5)]);
    }

    #[test]
    fn oracle_single_cell() {
        let g = sample_2x9();
        let ans = g.oracle_topk(&TopKQuery::sorted(2, 2, 4, 4, 5)).unwrap();
        assert_eq!(ans, vec![Position::new(2, 4)]);
    }

    #[test]
    fn oracle_two_column_window() {
        let g = sample_2x9();
        let ans = g.oracle_topk(&TopKQuery::sorted(1, 2, 4, 5, 3)).unwrap();
        assert_eq!(ans, vec![Position::new(1, 5), Position::new(2, 5), Position::new(2, 4)]);
    }

    #[test]
    fn oracle_out_of_bounds() {
        let g = sample_2x9();
        assert!(g.oracle_topk(&TopKQuery::sorted(1, 2, 1, 10, 3)).is_err());
        assert!(g.oracle_topk(&TopKQuery::sorted(1, 3, 1, 9, 3)).is_err());
    }

    #[test]
    fn oracle_small_rectangle_returns_all_cells() {
        let g = sample_2x9();
        let ans = g.oracle_topk(&TopKQuery::sorted(1, 2, 6, 6, 10)).unwrap();
        assert_eq!(ans.len(), 2);
    }

    #[test]
    fn csv_round_trip() {
        let g = sample_2x9();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let back = Grid2D::read_csv(&buf[..]).unwrap();
        assert_eq!(g, back);
    }
}
