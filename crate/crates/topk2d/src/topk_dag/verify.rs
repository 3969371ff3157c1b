//! Structural checks over a built DAG and its traversal trace: distinct
//! per-node answers, containment/ancestry agreement, locate consistency,
//! the pick bound, and node-count bounds.

use std::collections::HashMap;

use crate::error::Result;
use crate::grid::{Grid2D, TopKQuery};

use super::{TopKDag, TraversalTrace};

/// Outcome of [`verify_dag_properties`]; `pass` covers the hard checks,
/// `findings` collects informational observations (the non-leaf count bound
/// is reported, not enforced).
#[derive(Clone, Debug)]
pub struct DagPropertyReport {
    pub distinct_answers: bool,
    pub containment_matches_ancestry: bool,
    pub locate_consistent: bool,
    pub max_picks: u32,
    pub picks_within_bound: bool,
    pub node_count: usize,
    pub non_leaf_count: usize,
    pub node_count_within_6kn: bool,
    pub witnesses: Vec<String>,
    pub findings: Vec<String>,
}

impl DagPropertyReport {
    pub fn pass(&self) -> bool {
        self.distinct_answers
            && self.containment_matches_ancestry
            && self.locate_consistent
            && self.picks_within_bound
            && self.node_count_within_6kn
    }

    /// Observed node count relative to `k * n`.
    pub fn node_ratio(&self, k: usize, n: usize) -> f64 {
        self.node_count as f64 / (k * n) as f64
    }
}

pub fn verify_dag_properties(
    grid: &Grid2D,
    dag: &TopKDag,
    trace: &TraversalTrace,
) -> Result<DagPropertyReport> {
    let k = dag.k();
    let n = dag.n();
    let mut witnesses = Vec::new();
    let mut findings = Vec::new();

    // (i) distinct answer lists.
    let mut seen = HashMap::new();
    let mut distinct_answers = true;
    for node in dag.nodes() {
        if let Some(prev) = seen.insert(node.answers.clone(), node.interval) {
            distinct_answers = false;
            witnesses.push(format!("{} and {} share an answer list", prev, node.interval));
        }
    }

    // (ii) containment iff ancestry, via descendant bitsets in width order.
    let count = dag.node_count();
    let words = count.div_ceil(64);
    let mut desc: Vec<Vec<u64>> = vec![vec![0u64; words]; count];
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by_key(|&id| dag.node(id).interval.width());
    for &id in &order {
        for slot in 0..2 {
            if let Some(cid) = dag.node(id).children[slot] {
                let (child_set, rest) = if cid < id {
                    let (lo, hi) = desc.split_at_mut(id);
                    (&lo[cid], &mut hi[0])
                } else {
                    let (lo, hi) = desc.split_at_mut(cid);
                    (&hi[0], &mut lo[id])
                };
                for w in 0..words {
                    rest[w] |= child_set[w];
                }
                rest[cid / 64] |= 1u64 << (cid % 64);
            }
        }
    }
    let mut containment_matches_ancestry = true;
    for u in 0..count {
        for v in 0..count {
            if u == v {
                continue;
            }
            let contains = dag.node(v).interval.strictly_contains(dag.node(u).interval);
            let is_desc = (desc[v][u / 64] >> (u % 64)) & 1 == 1;
            if contains != is_desc {
                containment_matches_ancestry = false;
                witnesses.push(format!(
                    "{} in {}: containment={contains} ancestry={is_desc}",
                    dag.node(u).interval,
                    dag.node(v).interval
                ));
            }
        }
    }

    // (iii) every interval locates to a node whose answers match the oracle.
    let mut locate_consistent = true;
    'outer: for a in 1..=n {
        for b in a..=n {
            let node = dag.locate_node(a, b)?;
            let cells = 2 * (b - a + 1);
            let oracle = grid.oracle_topk(&TopKQuery::sorted(1, 2, a, b, k))?;
            let filtered: Vec<_> = node
                .answers
                .iter()
                .filter(|p| a <= p.col && p.col <= b)
                .copied()
                .take(k.min(cells))
                .collect();
            if filtered != oracle {
                locate_consistent = false;
                witnesses.push(format!(
                    "locate [{a},{b}] -> {} answers {:?} != oracle {:?}",
                    node.interval, filtered, oracle
                ));
                break 'outer;
            }
        }
    }

    let max_picks = trace.max_picks();
    let picks_within_bound = max_picks <= 2;
    if !picks_within_bound {
        let worst = trace
            .pick_counts
            .iter()
            .filter(|(_, &c)| c > 2)
            .map(|(p, c)| format!("{p} picked {c} times"))
            .collect::<Vec<_>>()
            .join(", ");
        witnesses.push(worst);
    }

    let node_count = dag.node_count();
    let non_leaf_count = dag.non_leaf_count();
    let node_count_within_6kn = node_count <= 6 * k * n;
    if !node_count_within_6kn {
        witnesses.push(format!("{node_count} nodes exceeds 6kn = {}", 6 * k * n));
    }
    if non_leaf_count > 2 * k * n {
        findings.push(format!("non-leaf count {non_leaf_count} exceeds 2kn = {}", 2 * k * n));
    }

    Ok(DagPropertyReport {
        distinct_answers,
        containment_matches_ancestry,
        locate_consistent,
        max_picks,
        picks_within_bound,
        node_count,
        non_leaf_count,
        node_count_within_6kn,
        witnesses,
        findings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::sample_2x9;
    use crate::topk_dag::traverse;

    #[test]
    fn sample_dag_passes_all_checks() {
        let g = sample_2x9();
        let dag = TopKDag::build(&g, 3).unwrap();
        let (trace, _) = traverse(&dag).unwrap();
        let report = verify_dag_properties(&g, &dag, &trace).unwrap();
        assert!(report.pass(), "witnesses: {:?}", report.witnesses);
        assert_eq!(report.max_picks, 2);
        assert_eq!(report.node_count, 20);
        assert!(report.node_count <= 6 * 3 * 9);
        assert!(report.findings.is_empty());
    }

    #[test]
    fn column_major_increasing_grid_passes() {
        // Adversarial shape: values increase in column-major order.
        let n = 12;
        let rows: Vec<Vec<i64>> = (0..2)
            .map(|r| (0..n).map(|c| (2 * c + r + 1) as i64).collect())
            .collect();
        let g = Grid2D::normalize_ranks(&rows).unwrap();
        let dag = TopKDag::build(&g, 2).unwrap();
        let (trace, _) = traverse(&dag).unwrap();
        let report = verify_dag_properties(&g, &dag, &trace).unwrap();
        assert!(report.pass(), "witnesses: {:?}", report.witnesses);
    }

    #[test]
    fn random_grids_pass() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..60 {
            let n = rng.gen_range(1..=16);
            let k = rng.gen_range(1..=2 * n);
            let mut vals: Vec<i64> = (1..=2 * n as i64).collect();
            vals.shuffle(&mut rng);
            let g = Grid2D::normalize_ranks(&[vals[..n].to_vec(), vals[n..].to_vec()]).unwrap();
            let dag = TopKDag::build(&g, k).unwrap();
            let (trace, _) = traverse(&dag).unwrap();
            let report = verify_dag_properties(&g, &dag, &trace).unwrap();
            assert!(report.pass(), "n={n} k={k} witnesses: {:?}", report.witnesses);
        }
    }
}
