//! Dulmage-Mendelsohn decomposition and per-component lambda-edge statistics.
//!
//! The decomposition splits a bipartite graph into an optional horizontal
//! tail (wide, more columns than rows), a sequence of square irreducible
//! components in block-triangular order, and an optional vertical tail
//! (tall). Cross-component edges only run from earlier row blocks to later
//! column blocks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::graph::{BipartiteGraph, Digraph, Edge, Vertex, WeightMode};

/// One DM component: its row set, column set, and internal edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DmComponent {
    pub rows: BTreeSet<Vertex>,
    pub cols: BTreeSet<Vertex>,
    pub edges: BTreeSet<Edge>,
}

/// The ordered decomposition. When present, the horizontal tail is component
/// 0 and the vertical tail is the last component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DMDecomposition {
    components: Vec<DmComponent>,
    horizontal_tail: Option<usize>,
    vertical_tail: Option<usize>,
}

impl DMDecomposition {
    pub fn components(&self) -> &[DmComponent] {
        &self.components
    }

    pub fn horizontal_tail(&self) -> Option<usize> {
        self.horizontal_tail
    }

    pub fn vertical_tail(&self) -> Option<usize> {
        self.vertical_tail
    }

    pub fn is_tail(&self, k: usize) -> bool {
        self.horizontal_tail == Some(k) || self.vertical_tail == Some(k)
    }

    /// Indices of the square (non-tail) components, in block order.
    pub fn consistent_indices(&self) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&k| !self.is_tail(k))
            .collect()
    }
}

/// Per-component lambda-edge statistics.
///
/// `gamma_min`/`gamma_max` are the extremal numbers of lambda edges over the
/// component's maximum matchings; `gamma_nz` flags components whose pencil
/// determinant generically has nonzero roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentStats {
    pub gamma_min: usize,
    pub gamma_max: usize,
    pub has_self_loop: bool,
    pub gamma_nz: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DmError {
    #[error("component {0} is a tail; statistics are defined on square components only")]
    TailComponent(usize),
    #[error("component index {0} out of range")]
    BadComponent(usize),
}

/// Computes the DM decomposition: one maximum matching, tails from
/// alternating-path reachability of the unmatched vertices, and the square
/// part split by strongly connected components of the matched-pair
/// contraction, in topological block order with lowest-row tie-breaking.
pub fn dm_decompose(g: &BipartiteGraph) -> DMDecomposition {
    let matching = g.max_matching();
    let mut row_match: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    let mut col_match: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    for &(r, c) in matching.pairs() {
        row_match.insert(r, c);
        col_match.insert(c, r);
    }

    let edges = g.edges();
    let mut col_adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    let mut row_adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for &(r, c) in &edges {
        col_adj.entry(c).or_default().push(r);
        row_adj.entry(r).or_default().push(c);
    }

    // Horizontal tail: alternating reachability from unmatched columns
    // (non-matching edge to a row, matching edge back to a column).
    let mut h_rows: BTreeSet<Vertex> = BTreeSet::new();
    let mut h_cols: BTreeSet<Vertex> = BTreeSet::new();
    let mut queue: VecDeque<Vertex> = g
        .cols()
        .iter()
        .filter(|c| !col_match.contains_key(c))
        .copied()
        .collect();
    h_cols.extend(queue.iter().copied());
    while let Some(c) = queue.pop_front() {
        for &r in col_adj.get(&c).map(Vec::as_slice).unwrap_or(&[]) {
            if h_rows.insert(r) {
                let c2 = row_match[&r]; // matched, else the matching had an augmenting path
                if h_cols.insert(c2) {
                    queue.push_back(c2);
                }
            }
        }
    }

    // Vertical tail: symmetric, from unmatched rows.
    let mut v_rows: BTreeSet<Vertex> = BTreeSet::new();
    let mut v_cols: BTreeSet<Vertex> = BTreeSet::new();
    let mut queue: VecDeque<Vertex> = g
        .rows()
        .iter()
        .filter(|r| !row_match.contains_key(r))
        .copied()
        .collect();
    v_rows.extend(queue.iter().copied());
    while let Some(r) = queue.pop_front() {
        for &c in row_adj.get(&r).map(Vec::as_slice).unwrap_or(&[]) {
            if v_cols.insert(c) {
                let r2 = col_match[&c];
                if v_rows.insert(r2) {
                    queue.push_back(r2);
                }
            }
        }
    }

    // Square part: contract matched pairs and split by SCC.
    let pairs: Vec<(Vertex, Vertex)> = matching
        .pairs()
        .iter()
        .filter(|(r, c)| !h_rows.contains(r) && !v_cols.contains(c))
        .copied()
        .collect();
    let pair_of_col: BTreeMap<Vertex, usize> = pairs
        .iter()
        .enumerate()
        .map(|(k, &(_, c))| (c, k))
        .collect();
    let pair_of_row: BTreeMap<Vertex, usize> = pairs
        .iter()
        .enumerate()
        .map(|(k, &(r, _))| (r, k))
        .collect();
    let mut pair_graph = Digraph::new(pairs.len());
    for &(r, c) in &edges {
        if let (Some(&pr), Some(&pc)) = (pair_of_row.get(&r), pair_of_col.get(&c)) {
            if pr != pc {
                // Edge (r, c) forces the block of r at or before the block of
                // c, i.e. an ordering constraint from pair(c) to pair(r).
                pair_graph.add_edge(pc, pr);
            }
        }
    }
    let sccs = pair_graph.scc();

    // Block order: a linear extension in which every constraint arc goes from
    // a later block to an earlier one; ties broken by the lowest row label.
    let order = block_order(&pair_graph, &sccs, &pairs);

    let component_of = |rows: BTreeSet<Vertex>, cols: BTreeSet<Vertex>| -> DmComponent {
        let internal = edges
            .iter()
            .filter(|(r, c)| rows.contains(r) && cols.contains(c))
            .copied()
            .collect();
        DmComponent {
            rows,
            cols,
            edges: internal,
        }
    };

    let mut components = Vec::new();
    let mut horizontal_tail = None;
    let mut vertical_tail = None;
    if !h_rows.is_empty() || !h_cols.is_empty() {
        horizontal_tail = Some(0);
        components.push(component_of(h_rows, h_cols));
    }
    for scc_idx in order {
        let rows = sccs[scc_idx].iter().map(|&p| pairs[p].0).collect();
        let cols = sccs[scc_idx].iter().map(|&p| pairs[p].1).collect();
        components.push(component_of(rows, cols));
    }
    if !v_rows.is_empty() || !v_cols.is_empty() {
        vertical_tail = Some(components.len());
        components.push(component_of(v_rows, v_cols));
    }

    DMDecomposition {
        components,
        horizontal_tail,
        vertical_tail,
    }
}

/// Kahn topological sort over the condensation, oriented so that every pair
/// arc runs from a later block to an earlier one; the smallest row label in a
/// block breaks ties.
fn block_order(
    pair_graph: &Digraph,
    sccs: &[Vec<usize>],
    pairs: &[(Vertex, Vertex)],
) -> Vec<usize> {
    let mut scc_of = vec![0usize; pairs.len()];
    for (k, scc) in sccs.iter().enumerate() {
        for &p in scc {
            scc_of[p] = k;
        }
    }
    // Constraint in the pair graph: arc p -> q means block(q) before
    // block(p). Build the precedence DAG with edges block(q) -> block(p).
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); sccs.len()];
    let mut indeg = vec![0usize; sccs.len()];
    for p in 0..pairs.len() {
        for q in pair_graph.neighbors(p) {
            let (bp, bq) = (scc_of[p], scc_of[q]);
            if bp != bq && succ[bq].insert(bp) {
                indeg[bp] += 1;
            }
        }
    }
    let min_row = |k: usize| -> Vertex {
        sccs[k].iter().map(|&p| pairs[p].0).min().unwrap_or(Vertex::MAX)
    };
    let mut ready: BTreeSet<(Vertex, usize)> = (0..sccs.len())
        .filter(|&k| indeg[k] == 0)
        .map(|k| (min_row(k), k))
        .collect();
    let mut order = Vec::with_capacity(sccs.len());
    while let Some(&(key, k)) = ready.iter().next() {
        ready.remove(&(key, k));
        order.push(k);
        for &next in &succ[k] {
            indeg[next] -= 1;
            if indeg[next] == 0 {
                ready.insert((min_row(next), next));
            }
        }
    }
    debug_assert_eq!(order.len(), sccs.len());
    order
}

/// Lambda-edge statistics of a square component, computed by weighting the
/// component's lambda edges at 1 and taking extremal-weight maximum
/// matchings.
pub fn component_stats(
    g: &BipartiteGraph,
    dm: &DMDecomposition,
    k: usize,
) -> Result<ComponentStats, DmError> {
    let comp = dm
        .components()
        .get(k)
        .ok_or(DmError::BadComponent(k))?;
    if dm.is_tail(k) {
        return Err(DmError::TailComponent(k));
    }
    let mut sub = g.induced(&comp.rows, &comp.cols);
    sub.clear_weights();
    for e in sub.lambda_edges().clone() {
        sub.set_weight(e, 1);
    }
    let (_, gamma_min) = sub.extremal_weight_max_matching(WeightMode::Min);
    let (_, gamma_max) = sub.extremal_weight_max_matching(WeightMode::Max);
    let has_self_loop = sub.has_self_loop();
    Ok(ComponentStats {
        gamma_min: gamma_min as usize,
        gamma_max: gamma_max as usize,
        has_self_loop,
        gamma_nz: gamma_max > gamma_min || has_self_loop,
    })
}
