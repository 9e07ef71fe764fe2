//! Shared helpers for the integration suites: fixture loading, random
//! generators, and brute-force oracles kept independent of the production
//! algorithms.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use pssc_core::graph::{BipartiteGraph, Edge, Vertex, WeightMode};
use pssc_core::dm::DMDecomposition;
use pssc_core::structured::{EntryKind, StructuredSystem};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> StructuredSystem {
    let text = std::fs::read_to_string(fixture_path(name))
        .unwrap_or_else(|e| panic!("cannot read fixture {name}: {e}"));
    pssc_core::parse_system(&text).unwrap_or_else(|e| panic!("fixture {name} does not parse: {e}"))
}

/// Random single-input system with `n <= max_n` and at most `max_indet`
/// indeterminate entries, each independently a star or a cross.
pub fn random_system(rng: &mut ChaCha8Rng, max_n: usize, max_indet: usize) -> StructuredSystem {
    let n = rng.gen_range(1..=max_n);
    let cells = n * (n + 1);
    let k = rng.gen_range(1..=max_indet.min(cells));
    let mut grid = vec![vec![EntryKind::Zero; n + 1]; n];
    let mut placed = 0;
    while placed < k {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n + 1);
        if grid[i][j] == EntryKind::Zero {
            grid[i][j] = if rng.gen_bool(0.5) {
                EntryKind::Cross
            } else {
                EntryKind::Star
            };
            placed += 1;
        }
    }
    grid_to_system(&grid, n)
}

/// Random single-input system whose indeterminate entries are all crosses.
pub fn random_all_cross_system(rng: &mut ChaCha8Rng, max_n: usize) -> StructuredSystem {
    let n = rng.gen_range(1..=max_n);
    let mut grid = vec![vec![EntryKind::Zero; n + 1]; n];
    for row in grid.iter_mut() {
        for (j, cell) in row.iter_mut().enumerate() {
            let p = if j == n { 0.5 } else { 0.35 };
            if rng.gen_bool(p) {
                *cell = EntryKind::Cross;
            }
        }
    }
    grid_to_system(&grid, n)
}

fn grid_to_system(grid: &[Vec<EntryKind>], n: usize) -> StructuredSystem {
    let a: Vec<Vec<EntryKind>> = grid.iter().map(|row| row[..n].to_vec()).collect();
    let b: Vec<Vec<EntryKind>> = grid.iter().map(|row| vec![row[n]]).collect();
    StructuredSystem::new(a, b).expect("generated grids are consistent")
}

/// Random bipartite graph on at most `max_side + max_side` vertices;
/// optionally with diagonal lambda edges (a partial permutation, as in
/// pencil graphs).
pub fn random_bipartite(
    rng: &mut ChaCha8Rng,
    max_side: usize,
    edge_prob: f64,
    with_lambda: bool,
) -> BipartiteGraph {
    let nr = rng.gen_range(0..=max_side);
    let nc = rng.gen_range(0..=max_side);
    let mut g = BipartiteGraph::new(1..=nr, 1..=nc);
    for r in 1..=nr {
        for c in 1..=nc {
            if rng.gen_bool(edge_prob) {
                g.add_structure_edge((r, c));
            }
        }
    }
    if with_lambda {
        for k in 1..=nr.min(nc) {
            if rng.gen_bool(0.5) {
                g.add_lambda_edge((k, k));
            }
        }
    }
    g
}

/// All maximum matchings by exhaustive branch and bound.
pub fn brute_max_matchings(g: &BipartiteGraph) -> (usize, Vec<BTreeSet<Edge>>) {
    let rows: Vec<Vertex> = g.rows().iter().copied().collect();
    let edges = g.edges();
    let mut best = 0usize;
    let mut found: Vec<BTreeSet<Edge>> = Vec::new();

    fn recurse(
        rows: &[Vertex],
        edges: &BTreeSet<Edge>,
        used_cols: &mut BTreeSet<Vertex>,
        current: &mut Vec<Edge>,
        best: &mut usize,
        found: &mut Vec<BTreeSet<Edge>>,
    ) {
        if current.len() + rows.len() < *best {
            return; // cannot reach the best size any more
        }
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
                recurse(rest, edges, used_cols, current, best, found);
            }
        }
    }

    let mut used = BTreeSet::new();
    let mut current = Vec::new();
    recurse(&rows, &edges, &mut used, &mut current, &mut best, &mut found);
    found.sort();
    found.dedup();
    (best, found)
}

pub fn brute_extremal_weight(g: &BipartiteGraph, mode: WeightMode) -> u64 {
    let (_, all) = brute_max_matchings(g);
    let weights = all
        .iter()
        .map(|m| m.iter().map(|&e| g.weight(e)).sum::<u64>());
    match mode {
        WeightMode::Min => weights.min().expect("at least the empty matching"),
        WeightMode::Max => weights.max().expect("at least the empty matching"),
    }
}

/// Checks the defining conditions of the DM decomposition against brute
/// force: (1) vertex partition, (2) component matching sizes and edge
/// admissibility, (3) block-triangular cross edges, (4) maximum matchings
/// restrict to component maximum matchings and component optima compose.
pub fn check_dm_definition(g: &BipartiteGraph, dm: &DMDecomposition) -> Result<(), String> {
    let comps = dm.components();

    // Condition 1: row sets partition the rows, column sets the columns.
    let mut seen_rows: BTreeSet<Vertex> = BTreeSet::new();
    let mut seen_cols: BTreeSet<Vertex> = BTreeSet::new();
    for comp in comps {
        for &r in &comp.rows {
            if !seen_rows.insert(r) {
                return Err(format!("row {r} appears in two components"));
            }
        }
        for &c in &comp.cols {
            if !seen_cols.insert(c) {
                return Err(format!("col {c} appears in two components"));
            }
        }
    }
    if &seen_rows != g.rows() || &seen_cols != g.cols() {
        return Err("components do not cover the vertex sets".into());
    }

    // Condition 2: square components have perfect internal matchings, tails
    // are strictly wide/tall, and every internal edge is admissible.
    let mut component_mt_sum = 0usize;
    let mut comp_mts = Vec::new();
    for (k, comp) in comps.iter().enumerate() {
        let sub = g.induced(&comp.rows, &comp.cols);
        let (mt_k, matchings) = brute_max_matchings(&sub);
        component_mt_sum += mt_k;
        comp_mts.push(mt_k);
        if dm.horizontal_tail() == Some(k) {
            if !comp.rows.is_empty() && (mt_k != comp.rows.len() || comp.rows.len() >= comp.cols.len()) {
                return Err(format!("horizontal tail {k} not strictly wide"));
            }
        } else if dm.vertical_tail() == Some(k) {
            if !comp.cols.is_empty() && (mt_k != comp.cols.len() || comp.cols.len() >= comp.rows.len()) {
                return Err(format!("vertical tail {k} not strictly tall"));
            }
        } else if mt_k != comp.rows.len() || comp.rows.len() != comp.cols.len() {
            return Err(format!("square component {k} lacks a perfect matching"));
        }
        for &e in &comp.edges {
            if !matchings.iter().any(|m| m.contains(&e)) {
                return Err(format!("edge {e:?} of component {k} is not admissible"));
            }
        }
    }

    // Condition 3: cross edges only from earlier row blocks to later column
    // blocks.
    let block_of_row: std::collections::BTreeMap<Vertex, usize> = comps
        .iter()
        .enumerate()
        .flat_map(|(k, comp)| comp.rows.iter().map(move |&r| (r, k)))
        .collect();
    let block_of_col: std::collections::BTreeMap<Vertex, usize> = comps
        .iter()
        .enumerate()
        .flat_map(|(k, comp)| comp.cols.iter().map(move |&c| (c, k)))
        .collect();
    for (r, c) in g.edges() {
        if block_of_row[&r] > block_of_col[&c] {
            return Err(format!(
                "edge ({r}, {c}) runs from block {} back to block {}",
                block_of_row[&r], block_of_col[&c]
            ));
        }
    }

    // Condition 4. Forward direction: every maximum matching of the whole
    // graph uses only internal edges and restricts to a component maximum
    // matching. Backward: component optima are vertex-disjoint, so their
    // union is a matching; it is maximum exactly when the sizes add up.
    let (mt_g, all_max) = brute_max_matchings(g);
    if component_mt_sum != mt_g {
        return Err(format!(
            "component matching sizes add to {component_mt_sum}, graph has {mt_g}"
        ));
    }
    for m in &all_max {
        for &(r, c) in m {
            if block_of_row[&r] != block_of_col[&c] {
                return Err(format!(
                    "maximum matching uses cross-component edge ({r}, {c})"
                ));
            }
        }
        for (k, comp) in comps.iter().enumerate() {
            let inside = m.iter().filter(|e| comp.edges.contains(e)).count();
            if inside != comp_mts[k] {
                return Err(format!(
                    "maximum matching restricts to {inside} edges in component {k}, expected {}",
                    comp_mts[k]
                ));
            }
        }
    }

    Ok(())
}

/// True when random integer values on the structure edges and `-lambda` on
/// the lambda edges give a pencil determinant with a nonzero root; used to
/// cross-check `gamma_nz`. Returns `None` when the sampled determinant
/// vanishes identically.
pub fn pencil_has_nonzero_root(
    sub: &BipartiteGraph,
    rng: &mut ChaCha8Rng,
) -> Option<bool> {
    use num::{BigInt, BigRational};
    use pssc_core::oracle::{det_rational, RationalPoly};

    let rows: Vec<Vertex> = sub.rows().iter().copied().collect();
    let cols: Vec<Vertex> = sub.cols().iter().copied().collect();
    assert_eq!(rows.len(), cols.len(), "pencil test needs a square component");
    let size = rows.len();
    let value = |rng: &mut ChaCha8Rng| -> i64 {
        let mag = rng.gen_range(1..=1_000_000i64);
        if rng.gen_bool(0.5) {
            mag
        } else {
            -mag
        }
    };
    let structure: std::collections::BTreeMap<Edge, i64> = sub
        .structure_edges()
        .iter()
        .map(|&e| (e, value(rng)))
        .collect();
    let rat = |v: i64| BigRational::from_integer(BigInt::from(v));
    let points: Vec<(BigRational, BigRational)> = (0..=size as i64)
        .map(|t| {
            let m: Vec<Vec<BigRational>> = rows
                .iter()
                .map(|&r| {
                    cols.iter()
                        .map(|&c| {
                            let mut v = structure.get(&(r, c)).map(|&v| rat(v)).unwrap_or_else(|| rat(0));
                            if sub.is_lambda((r, c)) {
                                v -= rat(t);
                            }
                            v
                        })
                        .collect()
                })
                .collect();
            (rat(t), det_rational(&m))
        })
        .collect();
    let poly = RationalPoly::interpolate(&points);
    if poly.is_zero() {
        return None;
    }
    // Nonzero roots exist exactly when the polynomial is not c * lambda^s.
    Some(!poly.is_monomial())
}
