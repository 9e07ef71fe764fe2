//! Bipartite and directed graph substrate.
//!
//! Bipartite graphs carry two edge classes: structure edges (nonzero pattern
//! entries) and lambda edges (the `-lambda I` diagonal of a matrix pencil).
//! A self-loop is an edge that is in both classes; the flag is derived, never
//! stored. Vertices keep their original labels across vertex deletion so that
//! component and neighbor bookkeeping stays in one label space.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

/// Vertex label. Row and column labels live in separate namespaces.
pub type Vertex = usize;

/// Edge `(row, col)` of a bipartite graph.
pub type Edge = (Vertex, Vertex);

/// Which extreme of the matching weight to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    Min,
    Max,
}

/// A bipartite graph with labeled vertices, two edge classes, and optional
/// non-negative integer edge weights.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BipartiteGraph {
    rows: BTreeSet<Vertex>,
    cols: BTreeSet<Vertex>,
    structure_edges: BTreeSet<Edge>,
    lambda_edges: BTreeSet<Edge>,
    weights: BTreeMap<Edge, u64>,
}

impl BipartiteGraph {
    pub fn new<R, C>(rows: R, cols: C) -> Self
    where
        R: IntoIterator<Item = Vertex>,
        C: IntoIterator<Item = Vertex>,
    {
        BipartiteGraph {
            rows: rows.into_iter().collect(),
            cols: cols.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn add_structure_edge(&mut self, e: Edge) {
        self.check_edge(e);
        self.structure_edges.insert(e);
    }

    pub fn add_lambda_edge(&mut self, e: Edge) {
        self.check_edge(e);
        self.lambda_edges.insert(e);
    }

    fn check_edge(&self, (r, c): Edge) {
        assert!(
            self.rows.contains(&r) && self.cols.contains(&c),
            "edge ({r}, {c}) has an endpoint outside the vertex sets"
        );
    }

    pub fn rows(&self) -> &BTreeSet<Vertex> {
        &self.rows
    }

    pub fn cols(&self) -> &BTreeSet<Vertex> {
        &self.cols
    }

    pub fn nplus(&self) -> usize {
        self.rows.len()
    }

    pub fn nminus(&self) -> usize {
        self.cols.len()
    }

    /// All edges: the union of structure and lambda edges.
    pub fn edges(&self) -> BTreeSet<Edge> {
        self.structure_edges.union(&self.lambda_edges).copied().collect()
    }

    pub fn structure_edges(&self) -> &BTreeSet<Edge> {
        &self.structure_edges
    }

    pub fn lambda_edges(&self) -> &BTreeSet<Edge> {
        &self.lambda_edges
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.structure_edges.contains(&e) || self.lambda_edges.contains(&e)
    }

    pub fn is_lambda(&self, e: Edge) -> bool {
        self.lambda_edges.contains(&e)
    }

    /// A self-loop is simultaneously a lambda edge and a structure edge.
    pub fn is_self_loop(&self, e: Edge) -> bool {
        self.lambda_edges.contains(&e) && self.structure_edges.contains(&e)
    }

    pub fn has_self_loop(&self) -> bool {
        self.lambda_edges
            .iter()
            .any(|e| self.structure_edges.contains(e))
    }

    /// Neighbors of a column vertex, ascending.
    pub fn col_neighbors(&self, c: Vertex) -> Vec<Vertex> {
        self.edges()
            .iter()
            .filter(|&&(_, ec)| ec == c)
            .map(|&(r, _)| r)
            .collect()
    }

    /// Sets the weight of one edge; absent weights count as zero.
    pub fn set_weight(&mut self, e: Edge, w: u64) {
        assert!(self.has_edge(e), "weight on missing edge ({}, {})", e.0, e.1);
        self.weights.insert(e, w);
    }

    pub fn clear_weights(&mut self) {
        self.weights.clear();
    }

    pub fn weight(&self, e: Edge) -> u64 {
        self.weights.get(&e).copied().unwrap_or(0)
    }

    /// Deletes vertices (and their incident edges), keeping labels.
    pub fn without_vertices(&self, del_rows: &[Vertex], del_cols: &[Vertex]) -> BipartiteGraph {
        let dr: BTreeSet<Vertex> = del_rows.iter().copied().collect();
        let dc: BTreeSet<Vertex> = del_cols.iter().copied().collect();
        let keep = |&(r, c): &Edge| !dr.contains(&r) && !dc.contains(&c);
        BipartiteGraph {
            rows: self.rows.iter().copied().filter(|r| !dr.contains(r)).collect(),
            cols: self.cols.iter().copied().filter(|c| !dc.contains(c)).collect(),
            structure_edges: self.structure_edges.iter().copied().filter(keep).collect(),
            lambda_edges: self.lambda_edges.iter().copied().filter(keep).collect(),
            weights: self
                .weights
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(&e, &w)| (e, w))
                .collect(),
        }
    }

    /// Subgraph induced by the given vertex subsets.
    pub fn induced(&self, rows: &BTreeSet<Vertex>, cols: &BTreeSet<Vertex>) -> BipartiteGraph {
        let keep = |&(r, c): &Edge| rows.contains(&r) && cols.contains(&c);
        BipartiteGraph {
            rows: rows.iter().copied().filter(|r| self.rows.contains(r)).collect(),
            cols: cols.iter().copied().filter(|c| self.cols.contains(c)).collect(),
            structure_edges: self.structure_edges.iter().copied().filter(keep).collect(),
            lambda_edges: self.lambda_edges.iter().copied().filter(keep).collect(),
            weights: self
                .weights
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(&e, &w)| (e, w))
                .collect(),
        }
    }

    /// Row/column labels and a compact adjacency over dense indices.
    fn compact(&self) -> Compact {
        let row_labels: Vec<Vertex> = self.rows.iter().copied().collect();
        let col_labels: Vec<Vertex> = self.cols.iter().copied().collect();
        let col_index: BTreeMap<Vertex, usize> = col_labels
            .iter()
            .enumerate()
            .map(|(k, &c)| (c, k))
            .collect();
        let row_index: BTreeMap<Vertex, usize> = row_labels
            .iter()
            .enumerate()
            .map(|(k, &r)| (r, k))
            .collect();
        let mut adj = vec![Vec::new(); row_labels.len()];
        for e in self.edges() {
            adj[row_index[&e.0]].push(col_index[&e.1]);
        }
        Compact {
            row_labels,
            col_labels,
            adj,
        }
    }

    /// Maximum-cardinality matching via Hopcroft-Karp; deterministic for a
    /// fixed edge ordering.
    pub fn max_matching(&self) -> Matching {
        let c = self.compact();
        let pair = hopcroft_karp(&c.adj, c.col_labels.len());
        let pairs = pair
            .iter()
            .enumerate()
            .filter_map(|(ri, &cj)| cj.map(|cj| (c.row_labels[ri], c.col_labels[cj])))
            .collect();
        Matching { pairs }
    }

    /// Size of a maximum matching.
    pub fn mt(&self) -> usize {
        self.max_matching().len()
    }

    /// Among all maximum-cardinality matchings, one of extremal total weight,
    /// together with that weight. The weight value is unique even when the
    /// matching is not.
    pub fn extremal_weight_max_matching(&self, mode: WeightMode) -> (Matching, u64) {
        let c = self.compact();
        let wmax = self.weights.values().copied().max().unwrap_or(0);
        // Maximum matchings all have the same cardinality, so maximizing the
        // weight is minimizing the complement cost wmax - w.
        let cost_of = |e: Edge| -> i64 {
            let w = self.weight(e) as i64;
            match mode {
                WeightMode::Min => w,
                WeightMode::Max => wmax as i64 - w,
            }
        };
        let mut adj = Vec::with_capacity(c.row_labels.len());
        for (ri, row_adj) in c.adj.iter().enumerate() {
            let r = c.row_labels[ri];
            adj.push(
                row_adj
                    .iter()
                    .map(|&cj| (cj, cost_of((r, c.col_labels[cj]))))
                    .collect::<Vec<_>>(),
            );
        }
        let pair = min_cost_max_matching(&adj, c.col_labels.len());
        let pairs: BTreeSet<Edge> = pair
            .iter()
            .enumerate()
            .filter_map(|(ri, &cj)| cj.map(|cj| (c.row_labels[ri], c.col_labels[cj])))
            .collect();
        let total = pairs.iter().map(|&e| self.weight(e)).sum();
        (Matching { pairs }, total)
    }
}

struct Compact {
    row_labels: Vec<Vertex>,
    col_labels: Vec<Vertex>,
    adj: Vec<Vec<usize>>,
}

/// A matching: a set of edges, no two sharing an endpoint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    pairs: BTreeSet<Edge>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &BTreeSet<Edge> {
        &self.pairs
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.pairs.contains(&e)
    }

    pub fn matched_rows(&self) -> BTreeSet<Vertex> {
        self.pairs.iter().map(|&(r, _)| r).collect()
    }

    pub fn matched_cols(&self) -> BTreeSet<Vertex> {
        self.pairs.iter().map(|&(_, c)| c).collect()
    }
}

/// Hopcroft-Karp over a compact adjacency; returns the matched column of each
/// row.
fn hopcroft_karp(adj: &[Vec<usize>], ncols: usize) -> Vec<Option<usize>> {
    const INF: usize = usize::MAX;
    let nrows = adj.len();
    let mut mrow: Vec<Option<usize>> = vec![None; nrows];
    let mut mcol: Vec<Option<usize>> = vec![None; ncols];
    let mut dist = vec![INF; nrows];

    loop {
        // BFS: layer rows by alternating distance from free rows.
        let mut queue = VecDeque::new();
        for r in 0..nrows {
            if mrow[r].is_none() {
                dist[r] = 0;
                queue.push_back(r);
            } else {
                dist[r] = INF;
            }
        }
        let mut reachable_free_col = false;
        while let Some(r) = queue.pop_front() {
            for &c in &adj[r] {
                match mcol[c] {
                    None => reachable_free_col = true,
                    Some(r2) => {
                        if dist[r2] == INF {
                            dist[r2] = dist[r] + 1;
                            queue.push_back(r2);
                        }
                    }
                }
            }
        }
        if !reachable_free_col {
            break;
        }
        // DFS along layered augmenting paths.
        for r in 0..nrows {
            if mrow[r].is_none() {
                hk_augment(r, adj, &mut mrow, &mut mcol, &mut dist);
            }
        }
    }
    mrow
}

fn hk_augment(
    r: usize,
    adj: &[Vec<usize>],
    mrow: &mut [Option<usize>],
    mcol: &mut [Option<usize>],
    dist: &mut [usize],
) -> bool {
    let d = std::mem::replace(&mut dist[r], usize::MAX);
    for &c in &adj[r] {
        let ok = match mcol[c] {
            None => true,
            Some(r2) => dist[r2] == d + 1 && hk_augment(r2, adj, mrow, mcol, dist),
        };
        if ok {
            mrow[r] = Some(c);
            mcol[c] = Some(r);
            return true;
        }
    }
    false
}

/// Successive shortest augmenting paths with Johnson potentials: a
/// minimum-cost matching among all maximum-cardinality matchings. Costs must
/// be non-negative. Returns the matched column of each row.
fn min_cost_max_matching(adj: &[Vec<(usize, i64)>], ncols: usize) -> Vec<Option<usize>> {
    const INF: i64 = i64::MAX / 4;
    let nrows = adj.len();
    let mut mrow: Vec<Option<usize>> = vec![None; nrows];
    let mut mcol: Vec<Option<usize>> = vec![None; ncols];
    let mut pot_r = vec![0i64; nrows];
    let mut pot_c = vec![0i64; ncols];

    loop {
        let mut dist_r = vec![INF; nrows];
        let mut dist_c = vec![INF; ncols];
        let mut parent_c: Vec<Option<usize>> = vec![None; ncols];
        // (dist, side, index); side 0 = row, 1 = col. Index in the key makes
        // pop order, and hence the realized matching, deterministic.
        let mut heap = BinaryHeap::new();
        for r in 0..nrows {
            if mrow[r].is_none() {
                dist_r[r] = 0;
                heap.push(Reverse((0i64, 0u8, r)));
            }
        }
        let mut target: Option<(i64, usize)> = None;
        while let Some(Reverse((d, side, x))) = heap.pop() {
            if side == 0 {
                if d > dist_r[x] {
                    continue;
                }
                for &(c, cost) in &adj[x] {
                    if mrow[x] == Some(c) {
                        continue;
                    }
                    let nd = d + cost + pot_r[x] - pot_c[c];
                    if nd < dist_c[c] {
                        dist_c[c] = nd;
                        parent_c[c] = Some(x);
                        heap.push(Reverse((nd, 1, c)));
                    }
                }
            } else {
                if d > dist_c[x] {
                    continue;
                }
                match mcol[x] {
                    Some(r2) => {
                        let cost = adj[r2]
                            .iter()
                            .find(|&&(c, _)| c == x)
                            .expect("matched edge present")
                            .1;
                        let nd = d - cost + pot_c[x] - pot_r[r2];
                        if nd < dist_r[r2] {
                            dist_r[r2] = nd;
                            heap.push(Reverse((nd, 0, r2)));
                        }
                    }
                    None => {
                        target = Some((d, x));
                        break;
                    }
                }
            }
        }
        let Some((dstar, end_col)) = target else {
            break;
        };
        for r in 0..nrows {
            pot_r[r] += dist_r[r].min(dstar);
        }
        for c in 0..ncols {
            pot_c[c] += dist_c[c].min(dstar);
        }
        // Augment along the parent chain.
        let mut c = end_col;
        loop {
            let r = parent_c[c].expect("augmenting path reaches a free row");
            let prev = mrow[r];
            mrow[r] = Some(c);
            mcol[c] = Some(r);
            match prev {
                Some(pc) => c = pc,
                None => break,
            }
        }
    }
    mrow
}

/// A directed graph over dense vertex indices with deterministic adjacency.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Digraph {
    adj: Vec<BTreeSet<usize>>,
}

impl Digraph {
    pub fn new(vertex_count: usize) -> Self {
        Digraph {
            adj: vec![BTreeSet::new(); vertex_count],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, from: usize, to: usize) {
        assert!(from < self.adj.len() && to < self.adj.len());
        self.adj[from].insert(to);
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    /// Forward reachability closure; sources are included.
    pub fn reachable(&self, sources: &[usize]) -> BTreeSet<usize> {
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in sources {
            assert!(s < self.adj.len(), "source {s} out of range");
            if seen.insert(s) {
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Strongly connected components, emitted in reverse topological order of
    /// the condensation (sinks first); vertices within a component ascend.
    pub fn scc(&self) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut state = TarjanState {
            next_index: 0,
            index: vec![None; n],
            low: vec![0; n],
            on_stack: vec![false; n],
            stack: Vec::new(),
            components: Vec::new(),
        };
        for v in 0..n {
            if state.index[v].is_none() {
                self.tarjan(v, &mut state);
            }
        }
        for comp in &mut state.components {
            comp.sort_unstable();
        }
        state.components
    }

    fn tarjan(&self, v: usize, st: &mut TarjanState) {
        st.index[v] = Some(st.next_index);
        st.low[v] = st.next_index;
        st.next_index += 1;
        st.stack.push(v);
        st.on_stack[v] = true;
        for w in self.neighbors(v) {
            if st.index[w].is_none() {
                self.tarjan(w, st);
                st.low[v] = st.low[v].min(st.low[w]);
            } else if st.on_stack[w] {
                st.low[v] = st.low[v].min(st.index[w].unwrap());
            }
        }
        if st.low[v] == st.index[v].unwrap() {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().expect("tarjan stack underflow");
                st.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            st.components.push(comp);
        }
    }
}

struct TarjanState {
    next_index: usize,
    index: Vec<Option<usize>>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    components: Vec<Vec<usize>>,
}

#[cfg(test)]
pub(crate) mod brute {
    //! Exhaustive matching enumeration, independent of the production
    //! algorithms; test oracle for small graphs.

    use super::*;

    /// All maximum matchings of `g`, together with their common size.
    pub fn max_matchings(g: &BipartiteGraph) -> (usize, Vec<BTreeSet<Edge>>) {
        let rows: Vec<Vertex> = g.rows().iter().copied().collect();
        let edges = g.edges();
        let mut best = 0usize;
        let mut found: Vec<BTreeSet<Edge>> = Vec::new();
        let mut current: Vec<Edge> = Vec::new();
        fn recurse(
            rows: &[Vertex],
            edges: &BTreeSet<Edge>,
            used_cols: &mut BTreeSet<Vertex>,
            current: &mut Vec<Edge>,
            best: &mut usize,
            found: &mut Vec<BTreeSet<Edge>>,
        ) {
            match rows.split_first() {
                None => {
                    if current.len() > *best {
                        *best = current.len();
                        found.clear();
                    }
                    if current.len() == *best {
                        found.push(current.iter().copied().collect());
                    }
                }
                Some((&r, rest)) => {
                    recurse(rest, edges, used_cols, current, best, found);
                    let cols: Vec<Vertex> = edges
                        .iter()
                        .filter(|&&(er, ec)| er == r && !used_cols.contains(&ec))
                        .map(|&(_, ec)| ec)
                        .collect();
                    for c in cols {
                        used_cols.insert(c);
                        current.push((r, c));
                        recurse(rest, edges, used_cols, current, best, found);
                        current.pop();
                        used_cols.remove(&c);
                    }
                }
            }
        }
        let mut used = BTreeSet::new();
        recurse(&rows, &edges, &mut used, &mut current, &mut best, &mut found);
        found.sort();
        found.dedup();
        (best, found)
    }

    /// Extremal total weight over all maximum matchings.
    pub fn extremal_weight(g: &BipartiteGraph, mode: WeightMode) -> u64 {
        let (_, all) = max_matchings(g);
        let weights = all
            .iter()
            .map(|m| m.iter().map(|&e| g.weight(e)).sum::<u64>());
        match mode {
            WeightMode::Min => weights.min().unwrap(),
            WeightMode::Max => weights.max().unwrap(),
        }
    }
}
