//! The interval-labeled DAG over a 2-row grid whose nodes carry sorted
//! top-k answers, plus the modified level-order traversal that encodes
//! those answers into a bit string.
//!
//! Construction rules for the DAG:
//!
//! 1. the root is labeled `[1, n]`;
//! 2. a node `[a, b]` is a leaf when `2(b-a+1) <= k`;
//! 3. a non-leaf node with leftmost/rightmost answer columns `a'`/`b'` has a
//!    left child `[a, b'-1]` when `a < b'` and a right child `[a'+1, b]`
//!    when `a' < b`.
//!
//! Nodes are deduplicated by interval, so a node can have several parents.

mod engine;
mod verify;

pub use engine::{
    decode_dag, traverse, DecodedDag, EncodedBits, TraceStep, TraversalTrace,
};
pub use verify::{verify_dag_properties, DagPropertyReport};

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{AnswerList, Grid2D, TopKQuery};
use crate::row_topk::PermutationRowEncoding;

/// A closed column interval `[a, b]`, 1-based.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Interval {
    pub a: usize,
    pub b: usize,
}

impl Interval {
    pub fn new(a: usize, b: usize) -> Interval {
        debug_assert!(a <= b);
        Interval { a, b }
    }

    pub fn width(&self) -> usize {
        self.b - self.a + 1
    }

    pub fn contains_col(&self, col: usize) -> bool {
        self.a <= col && col <= self.b
    }

    pub fn contains(&self, other: Interval) -> bool {
        self.a <= other.a && other.b <= self.b
    }

    pub fn strictly_contains(&self, other: Interval) -> bool {
        self.contains(other) && *self != other
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.a, self.b)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.a, self.b)
    }
}

/// One node of the DAG.
#[derive(Clone, Debug)]
pub struct DagNode {
    pub interval: Interval,
    /// Sorted top-k answers of the node's interval (all cells for leaves).
    pub answers: AnswerList,
    /// Left/right child node ids.
    pub children: [Option<usize>; 2],
    pub parents: Vec<usize>,
    /// Longest-path edge count from the root.
    pub level: usize,
    pub is_leaf: bool,
}

/// The DAG with construction-time answers and the row encodings the
/// traversal draws its candidates from.
pub struct TopKDag {
    k: usize,
    n: usize,
    nodes: Vec<DagNode>,
    by_interval: HashMap<Interval, usize>,
    pub(crate) row1: PermutationRowEncoding,
    pub(crate) row2: PermutationRowEncoding,
}

impl TopKDag {
    /// Builds the DAG for a 2-row grid; per-node answers come from the
    /// brute-force oracle.
    pub fn build(grid: &Grid2D, k: usize) -> Result<TopKDag> {
        if grid.m() != 2 {
            return Err(Error::shape(format!("DAG requires a 2-row grid, got m={}", grid.m())));
        }
        if k == 0 {
            return Err(Error::UnsupportedK { k, reason: "k must be at least 1" });
        }
        let n = grid.n();
        let mut nodes: Vec<DagNode> = Vec::new();
        let mut by_interval: HashMap<Interval, usize> = HashMap::new();

        let root_iv = Interval::new(1, n);
        let mut queue = std::collections::VecDeque::new();
        nodes.push(Self::make_node(grid, k, root_iv)?);
        by_interval.insert(root_iv, 0);
        queue.push_back(0usize);

        while let Some(id) = queue.pop_front() {
            let iv = nodes[id].interval;
            if nodes[id].is_leaf {
                continue;
            }
            let answers = nodes[id].answers.clone();
            let leftmost = answers.iter().map(|p| p.col).min().expect("non-leaf has answers");
            let rightmost = answers.iter().map(|p| p.col).max().expect("non-leaf has answers");
            let mut children: [Option<usize>; 2] = [None, None];
            let child_ivs = [
                (iv.a < rightmost).then(|| Interval::new(iv.a, rightmost - 1)),
                (leftmost < iv.b).then(|| Interval::new(leftmost + 1, iv.b)),
            ];
            for (slot, child_iv) in child_ivs.into_iter().enumerate() {
                let Some(child_iv) = child_iv else { continue };
                let child_id = match by_interval.get(&child_iv) {
                    Some(&cid) => cid,
                    None => {
                        let cid = nodes.len();
                        nodes.push(Self::make_node(grid, k, child_iv)?);
                        by_interval.insert(child_iv, cid);
                        queue.push_back(cid);
                        cid
                    }
                };
                children[slot] = Some(child_id);
                nodes[child_id].parents.push(id);
            }
            nodes[id].children = children;
        }

        // Longest-path levels: parents strictly contain children, so width
        // order is topological.
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by_key(|&id| std::cmp::Reverse(nodes[id].interval.width()));
        for id in order {
            let level = nodes[id].level;
            for slot in 0..2 {
                if let Some(cid) = nodes[id].children[slot] {
                    nodes[cid].level = nodes[cid].level.max(level + 1);
                }
            }
        }

        let (row1, row2) = crate::prefix3sided::encode_rows(grid);
        Ok(TopKDag { k, n, nodes, by_interval, row1, row2 })
    }

    fn make_node(grid: &Grid2D, k: usize, iv: Interval) -> Result<DagNode> {
        let is_leaf = 2 * iv.width() <= k;
        let want = if is_leaf { 2 * iv.width() } else { k };
        let answers = grid.oracle_topk(&TopKQuery::sorted(1, 2, iv.a, iv.b, want))?;
        Ok(DagNode { interval: iv, answers, children: [None, None], parents: Vec::new(), level: 0, is_leaf })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[DagNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn non_leaf_count(&self) -> usize {
        self.nodes.iter().filter(|nd| !nd.is_leaf).count()
    }

    pub fn root(&self) -> &DagNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: usize) -> &DagNode {
        &self.nodes[id]
    }

    pub fn node_by_interval(&self, iv: Interval) -> Option<&DagNode> {
        self.by_interval.get(&iv).map(|&id| &self.nodes[id])
    }

    /// The unique node containing `[a, b]` none of whose children contains it.
    pub fn locate_node(&self, a: usize, b: usize) -> Result<&DagNode> {
        if a < 1 || a > b || b > self.n {
            return Err(Error::range(format!("interval [{a},{b}] outside 1..={}", self.n)));
        }
        let target = Interval::new(a, b);
        let mut cur = 0usize;
        'descend: loop {
            for slot in 0..2 {
                if let Some(cid) = self.nodes[cur].children[slot] {
                    if self.nodes[cid].interval.contains(target) {
                        cur = cid;
                        continue 'descend;
                    }
                }
            }
            return Ok(&self.nodes[cur]);
        }
    }

    /// All intervals in a stable order (for DOT output and tests).
    pub fn sorted_intervals(&self) -> Vec<Interval> {
        let mut ivs: Vec<Interval> = self.nodes.iter().map(|nd| nd.interval).collect();
        ivs.sort();
        ivs
    }

    /// Parent -> child edges as interval pairs, sorted.
    pub fn edges(&self) -> Vec<(Interval, Interval)> {
        let mut edges = Vec::new();
        for nd in &self.nodes {
            for slot in 0..2 {
                if let Some(cid) = nd.children[slot] {
                    edges.push((nd.interval, self.nodes[cid].interval));
                }
            }
        }
        edges.sort();
        edges
    }

    /// DOT rendering of the DAG topology; trace annotations show the picks
    /// made at each traversal step.
    pub fn to_dot(&self, trace: Option<&TraversalTrace>) -> String {
        use std::fmt::Write;
        let mut out = String::from("digraph topk_dag {\n  node [shape=box];\n");
        let mut label_extra: HashMap<Interval, String> = HashMap::new();
        if let Some(trace) = trace {
            let root_picks: Vec<String> =
                trace.root_picks.iter().map(|p| p.to_string()).collect();
            label_extra.insert(trace.root, format!("\\npick {}", root_picks.join(" ")));
            for (idx, step) in trace.steps.iter().enumerate() {
                let note = match step.pick {
                    Some(p) => format!("\\n#{} pick {}", idx + 1, p),
                    None => format!("\\n#{}", idx + 1),
                };
                label_extra.entry(step.interval).or_default().push_str(&note);
            }
        }
        for iv in self.sorted_intervals() {
            let extra = label_extra.get(&iv).cloned().unwrap_or_default();
            writeln!(out, "  \"{iv}\" [label=\"{iv}{extra}\"];").unwrap();
        }
        for (from, to) in self.edges() {
            writeln!(out, "  \"{from}\" -> \"{to}\";").unwrap();
        }
        out.push_str("}\n");
        out
    }
}
