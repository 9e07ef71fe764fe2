//! Decision procedures over structured systems: structural controllability,
//! the zero-mode and nonzero-mode conditions, PSSC verdicts for single-input
//! and single-cross multi-input systems, the necessary-condition sweep for
//! general multi-input systems, the real-field SSC test, and critical/stable
//! edge classification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::dm::{component_stats, dm_decompose, DMDecomposition};
use crate::graph::{BipartiteGraph, Digraph, Edge, Vertex, WeightMode};
use crate::structured::{EntryPos, ReductionError, StructuredSystem};

/// Outcome of a controllability decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pssc,
    NotPssc,
    /// The criteria checked are only necessary; no verdict either way.
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pssc => "pssc",
            Verdict::NotPssc => "not_pssc",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Which decision path produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportMode {
    SingleInput,
    MultiInputSingleCross,
    /// Multi-input with two or more crosses: the per-cross sweep is only a
    /// necessary condition, so a clean pass stays inconclusive.
    MultiInputNecessaryOnly,
}

impl ReportMode {
    pub fn label(self) -> &'static str {
        match self {
            ReportMode::SingleInput => "single_input",
            ReportMode::MultiInputSingleCross => "multi_input_single_cross",
            ReportMode::MultiInputNecessaryOnly => "multi_input_necessary_only",
        }
    }

    fn is_multi(self) -> bool {
        !matches!(self, ReportMode::SingleInput)
    }
}

/// Result of the zero-uncontrollable-mode check, in evaluation order.
/// Rendered as `b1`..`b3` for single-input systems and `d1`..`d3` for
/// multi-input systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ZeroMode {
    B1,
    B2,
    B3,
    Fail,
}

impl ZeroMode {
    pub fn passed(self) -> bool {
        self != ZeroMode::Fail
    }

    pub fn label(self, mode: ReportMode) -> &'static str {
        match (self, mode.is_multi()) {
            (ZeroMode::B1, false) => "b1",
            (ZeroMode::B2, false) => "b2",
            (ZeroMode::B3, false) => "b3",
            (ZeroMode::B1, true) => "d1",
            (ZeroMode::B2, true) => "d2",
            (ZeroMode::B3, true) => "d3",
            (ZeroMode::Fail, _) => "fail",
        }
    }
}

/// Result of the nonzero-uncontrollable-mode check. Rendered as `c1`/`c2`
/// for single-input systems and `e1`/`e2` for multi-input systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NonzeroMode {
    C1,
    C2,
    Fail,
}

impl NonzeroMode {
    pub fn passed(self) -> bool {
        self != NonzeroMode::Fail
    }

    pub fn label(self, mode: ReportMode) -> &'static str {
        match (self, mode.is_multi()) {
            (NonzeroMode::C1, false) => "c1",
            (NonzeroMode::C2, false) => "c2",
            (NonzeroMode::C1, true) => "e1",
            (NonzeroMode::C2, true) => "e2",
            (NonzeroMode::Fail, _) => "fail",
        }
    }
}

/// Per-cross diagnosis: which condition of each mode fired and the component
/// index sets behind the nonzero-mode decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiDiagnosis {
    pub pi: EntryPos,
    pub zero_mode: ZeroMode,
    pub nonzero_mode: NonzeroMode,
    pub omega_j: BTreeSet<usize>,
    pub omega_j_i: BTreeSet<usize>,
}

impl PiDiagnosis {
    pub fn passes(&self) -> bool {
        self.zero_mode.passed() && self.nonzero_mode.passed()
    }
}

/// Full PSSC report: the verdict plus one diagnosis per cross entry, sorted
/// by position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsscReport {
    pub structurally_controllable: bool,
    pub verdict: Verdict,
    pub mode: ReportMode,
    pub per_pi: Vec<PiDiagnosis>,
}

impl PsscReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "sc": self.structurally_controllable,
            "verdict": self.verdict.label(),
            "mode": self.mode.label(),
            "per_pi": self.per_pi.iter().map(|d| json!({
                "pi": [d.pi.row(), d.pi.col()],
                "zero_mode": d.zero_mode.label(self.mode),
                "nonzero_mode": d.nonzero_mode.label(self.mode),
                "omega_j_size": d.omega_j.len(),
                "omega_j_i_size": d.omega_j_i.len(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = format!(
            "structurally controllable: {}\nverdict: {} (mode: {})\n",
            if self.structurally_controllable { "yes" } else { "no" },
            self.verdict.label(),
            self.mode.label()
        );
        for d in &self.per_pi {
            out.push_str(&format!(
                "  pi {}: zero-mode {}, nonzero-mode {}, |omega_j| = {}, |omega_j^i| = {}\n",
                d.pi,
                d.zero_mode.label(self.mode),
                d.nonzero_mode.label(self.mode),
                d.omega_j.len(),
                d.omega_j_i.len()
            ));
        }
        out
    }
}

/// Classification of one cross entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeClassKind {
    /// Some nonzero value of this entry destroys controllability for almost
    /// all values of the other parameters.
    Critical,
    /// No nonzero value of this entry can destroy controllability for almost
    /// all values of the other parameters.
    Stable,
}

impl EdgeClassKind {
    pub fn label(self) -> &'static str {
        match self {
            EdgeClassKind::Critical => "critical",
            EdgeClassKind::Stable => "stable",
        }
    }
}

/// Critical/stable classification of every cross entry. Entry `(i, j)`
/// corresponds to the edge from `x_j` to `x_i` of the system digraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClass {
    pub classes: BTreeMap<EntryPos, EdgeClassKind>,
}

impl EdgeClass {
    pub fn critical(&self) -> Vec<EntryPos> {
        self.classes
            .iter()
            .filter(|(_, &k)| k == EdgeClassKind::Critical)
            .map(|(&p, _)| p)
            .collect()
    }

    pub fn stable(&self) -> Vec<EntryPos> {
        self.classes
            .iter()
            .filter(|(_, &k)| k == EdgeClassKind::Stable)
            .map(|(&p, _)| p)
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "entries": self.classes.iter().map(|(&pos, &kind)| json!({
                "pi": [pos.row(), pos.col()],
                "edge": [pos.col(), pos.row()],
                "class": kind.label(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (&pos, &kind) in &self.classes {
            out.push_str(&format!(
                "  entry {} (edge x{} -> x{}): {}\n",
                pos,
                pos.col(),
                pos.row(),
                kind.label()
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PsscError {
    #[error("system is not structurally controllable")]
    NotStructurallyControllable,
    #[error("entry {0} is not a cross entry")]
    NotACross(EntryPos),
    #[error("expected exactly one cross entry, found {found}")]
    NotSingleCross { found: usize },
    #[error("operation requires a single-input system, got m = {m}")]
    MultiInput { m: usize },
    #[error("operation requires every indeterminate entry to be a cross; {count} star entries present")]
    StarPresent { count: usize },
    #[error("column index {j} out of range 1..={max}")]
    ColumnOutOfRange { j: usize, max: usize },
}

impl From<ReductionError> for PsscError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::NotACross(pos) => PsscError::NotACross(pos),
        }
    }
}

/// The system digraph: vertices `x_1..x_{n+m}` (state then input), one edge
/// `x_j -> x_i` per nonzero pattern entry `(i, j)` of `[A, B]`.
pub fn system_digraph(sys: &StructuredSystem) -> Digraph {
    let n = sys.n();
    let m = sys.m();
    let mut g = Digraph::new(n + m);
    for i in 1..=n {
        for j in 1..=n + m {
            if sys.entry(EntryPos(i, j)).is_indeterminate() {
                g.add_edge(j - 1, i - 1);
            }
        }
    }
    g
}

/// The bipartite graph of the compound pattern matrix `[A, B]`: rows
/// `1..=n`, columns `1..=n+m`, one structure edge per indeterminate entry.
pub fn system_bipartite(sys: &StructuredSystem) -> BipartiteGraph {
    let n = sys.n();
    let m = sys.m();
    let mut g = BipartiteGraph::new(1..=n, 1..=n + m);
    for i in 1..=n {
        for j in 1..=n + m {
            if sys.entry(EntryPos(i, j)).is_indeterminate() {
                g.add_structure_edge((i, j));
            }
        }
    }
    g
}

/// The bipartite graph of the matrix pencil `[A - lambda I, B]`: the
/// structure edges of `[A, B]` plus one lambda edge `(k, k)` per state. When
/// `j` is given, column `j` is deleted. Note the lambda edge makes `v_j^+`
/// a neighbor of `v_j^-` even when `A_jj = 0`.
pub fn build_h_lambda(
    sys: &StructuredSystem,
    j: Option<usize>,
) -> Result<BipartiteGraph, PsscError> {
    let n = sys.n();
    let m = sys.m();
    if let Some(j) = j {
        if !(1..=n + m).contains(&j) {
            return Err(PsscError::ColumnOutOfRange { j, max: n + m });
        }
    }
    let mut g = system_bipartite(sys);
    for k in 1..=n {
        g.add_lambda_edge((k, k));
    }
    Ok(match j {
        Some(j) => g.without_vertices(&[], &[j]),
        None => g,
    })
}

/// Structural controllability: every state vertex is input-reachable in the
/// system digraph and the compound pattern has generic rank `n`. The
/// star/cross distinction plays no role here.
pub fn is_structurally_controllable(sys: &StructuredSystem) -> bool {
    let n = sys.n();
    let m = sys.m();
    let g = system_digraph(sys);
    let sources: Vec<usize> = (n..n + m).collect();
    let reach = g.reachable(&sources);
    if (0..n).any(|v| !reach.contains(&v)) {
        return false;
    }
    system_bipartite(sys).mt() == n
}

fn validate_single_cross(sys: &StructuredSystem, pi: EntryPos) -> Result<(), PsscError> {
    let crosses = sys.cross_positions();
    if crosses.len() != 1 {
        return Err(PsscError::NotSingleCross {
            found: crosses.len(),
        });
    }
    if crosses[0] != pi {
        return Err(PsscError::NotACross(pi));
    }
    if !is_structurally_controllable(sys) {
        return Err(PsscError::NotStructurallyControllable);
    }
    Ok(())
}

/// Zero-uncontrollable-mode check for a structurally controllable system
/// whose sole cross sits at `pi`. Conditions are evaluated in order; the
/// first satisfied one is returned.
pub fn zero_mode_check(sys: &StructuredSystem, pi: EntryPos) -> Result<ZeroMode, PsscError> {
    validate_single_cross(sys, pi)?;
    Ok(zero_mode_unchecked(sys, pi))
}

fn zero_mode_unchecked(sys: &StructuredSystem, pi: EntryPos) -> ZeroMode {
    let (i, j) = (pi.row(), pi.col());
    let n = sys.n();
    let b = system_bipartite(sys);
    // b1 (short for d1 as well): some maximum matching avoids v_j^-. Under
    // structural controllability mt(B) = n, so this is mt(B - v_j^-) = n.
    if b.without_vertices(&[], &[j]).mt() == n {
        return ZeroMode::B1;
    }
    // b2: no other neighbor of v_j^-, or deleting any other neighbor row
    // together with column j drops the matching number to n - 2.
    let others: Vec<Vertex> = b
        .col_neighbors(j)
        .into_iter()
        .filter(|&k| k != i)
        .collect();
    let drops_to = |rows: &[Vertex]| -> bool {
        match n.checked_sub(2) {
            Some(t) => b.without_vertices(rows, &[j]).mt() == t,
            None => false,
        }
    };
    if others.iter().all(|&k| drops_to(&[k])) {
        return ZeroMode::B2;
    }
    // b3: deleting the cross row itself together with column j drops the
    // matching number to n - 2.
    if drops_to(&[i]) {
        return ZeroMode::B3;
    }
    ZeroMode::Fail
}

struct OmegaAnalysis {
    h_jc: BipartiteGraph,
    dm: DMDecomposition,
    omega_j: BTreeSet<usize>,
    omega_j_i: BTreeSet<usize>,
}

fn analyze_omegas_unchecked(sys: &StructuredSystem, pi: EntryPos) -> OmegaAnalysis {
    let (i, j) = (pi.row(), pi.col());
    let h_jc = build_h_lambda(sys, Some(j)).expect("pi column in range");
    let dm = dm_decompose(&h_jc);
    // Structural controllability forces a full row matching, so no vertical
    // tail ever appears, and for single-input systems no tail at all.
    assert!(
        dm.vertical_tail().is_none(),
        "pencil graph lost full row rank; system not structurally controllable?"
    );
    if sys.m() == 1 {
        assert!(
            dm.horizontal_tail().is_none(),
            "square pencil graph grew a tail; system not structurally controllable?"
        );
    }

    // Omega_j: square components whose pencil determinant generically has
    // nonzero roots. Tail components contribute none.
    let mut omega_j = BTreeSet::new();
    for k in dm.consistent_indices() {
        let stats = component_stats(&h_jc, &dm, k).expect("consistent component");
        if stats.gamma_nz {
            omega_j.insert(k);
        }
    }

    // Omega_j^i: members of Omega_j that at least one maximum matching of
    // B(H^jc) - v_i^+ fails to cover. Weight the surviving component edges
    // at 1; covering is equivalent to a minimum weight of |V_k^+|.
    let deleted = h_jc.without_vertices(&[i], &[]);
    let mut omega_j_i = BTreeSet::new();
    for &k in &omega_j {
        let comp = &dm.components()[k];
        let mut weighted = deleted.clone();
        for &e in &comp.edges {
            if e.0 != i {
                weighted.set_weight(e, 1);
            }
        }
        let (_, wmin) = weighted.extremal_weight_max_matching(WeightMode::Min);
        if (wmin as usize) < comp.rows.len() {
            omega_j_i.insert(k);
        }
    }

    OmegaAnalysis {
        h_jc,
        dm,
        omega_j,
        omega_j_i,
    }
}

/// The component index sets `Omega_j` and `Omega_j^i` of the pencil graph
/// with column `j` deleted, for a structurally controllable system whose
/// sole cross sits at `pi = (i, j)`.
pub fn omega_sets(
    sys: &StructuredSystem,
    pi: EntryPos,
) -> Result<(BTreeSet<usize>, BTreeSet<usize>), PsscError> {
    validate_single_cross(sys, pi)?;
    let a = analyze_omegas_unchecked(sys, pi);
    Ok((a.omega_j, a.omega_j_i))
}

/// Nonzero-uncontrollable-mode check under the same preconditions as
/// [`omega_sets`].
pub fn nonzero_mode_check(sys: &StructuredSystem, pi: EntryPos) -> Result<NonzeroMode, PsscError> {
    validate_single_cross(sys, pi)?;
    let analysis = analyze_omegas_unchecked(sys, pi);
    Ok(nonzero_mode_from(sys, pi, &analysis))
}

fn nonzero_mode_from(
    sys: &StructuredSystem,
    pi: EntryPos,
    analysis: &OmegaAnalysis,
) -> NonzeroMode {
    if analysis.omega_j_i.is_empty() {
        return NonzeroMode::C1;
    }
    let (i, j) = (pi.row(), pi.col());
    if i == j {
        return NonzeroMode::Fail;
    }
    // Neighbors of v_j^- in the full pencil graph, lambda edges included; an
    // empty set satisfies the condition vacuously.
    let h_full = build_h_lambda(sys, None).expect("no deletion");
    let neighbors: Vec<Vertex> = h_full
        .col_neighbors(j)
        .into_iter()
        .filter(|&l| l != i)
        .collect();
    let union_rows: BTreeSet<Vertex> = analysis
        .omega_j_i
        .iter()
        .flat_map(|&k| analysis.dm.components()[k].rows.iter().copied())
        .collect();
    let union_edges: BTreeSet<Edge> = analysis
        .omega_j_i
        .iter()
        .flat_map(|&k| analysis.dm.components()[k].edges.iter().copied())
        .collect();
    let target = union_rows.len() as u64;
    for l in neighbors {
        let mut weighted = analysis.h_jc.without_vertices(&[l], &[]);
        for &e in &union_edges {
            if e.0 != l {
                weighted.set_weight(e, 1);
            }
        }
        let (_, wmin) = weighted.extremal_weight_max_matching(WeightMode::Min);
        if wmin < target {
            return NonzeroMode::Fail;
        }
    }
    NonzeroMode::C2
}

fn diagnose_pi(sys: &StructuredSystem, pi: EntryPos) -> PiDiagnosis {
    let reduced = sys
        .single_pi_reduction(pi)
        .expect("pi is a cross of the system");
    let zero_mode = zero_mode_unchecked(&reduced, pi);
    let analysis = analyze_omegas_unchecked(&reduced, pi);
    let nonzero_mode = nonzero_mode_from(&reduced, pi, &analysis);
    PiDiagnosis {
        pi,
        zero_mode,
        nonzero_mode,
        omega_j: analysis.omega_j,
        omega_j_i: analysis.omega_j_i,
    }
}

fn report_mode(sys: &StructuredSystem, cross_count: usize) -> ReportMode {
    if sys.m() == 1 {
        ReportMode::SingleInput
    } else if cross_count <= 1 {
        ReportMode::MultiInputSingleCross
    } else {
        ReportMode::MultiInputNecessaryOnly
    }
}

fn is_pssc_impl(sys: &StructuredSystem, parallel: bool) -> PsscReport {
    let crosses = sys.cross_positions();
    let mode = report_mode(sys, crosses.len());
    if !is_structurally_controllable(sys) {
        return PsscReport {
            structurally_controllable: false,
            verdict: Verdict::NotPssc,
            mode,
            per_pi: Vec::new(),
        };
    }
    let per_pi: Vec<PiDiagnosis> = if parallel {
        crosses.par_iter().map(|&pi| diagnose_pi(sys, pi)).collect()
    } else {
        crosses.iter().map(|&pi| diagnose_pi(sys, pi)).collect()
    };
    let all_pass = per_pi.iter().all(PiDiagnosis::passes);
    let verdict = match (mode, all_pass) {
        (ReportMode::MultiInputNecessaryOnly, true) => Verdict::Inconclusive,
        (_, true) => Verdict::Pssc,
        (_, false) => Verdict::NotPssc,
    };
    PsscReport {
        structurally_controllable: true,
        verdict,
        mode,
        per_pi,
    }
}

/// Decides PSSC. Single-input systems are decided exactly via the per-cross
/// reduction; multi-input systems with at most one cross are decided exactly;
/// multi-input systems with two or more crosses run the per-cross sweep,
/// which refutes but never confirms. A system without crosses is PSSC
/// exactly when it is structurally controllable.
pub fn is_pssc(sys: &StructuredSystem) -> PsscReport {
    is_pssc_impl(sys, false)
}

/// Same as [`is_pssc`] with the per-cross loop fanned out across threads;
/// the report is identical.
pub fn is_pssc_parallel(sys: &StructuredSystem) -> PsscReport {
    is_pssc_impl(sys, true)
}

/// Strong structural controllability over the reals, for single-input
/// systems whose indeterminate entries are all crosses.
pub fn is_ssc_real(sys: &StructuredSystem) -> Result<bool, PsscError> {
    if sys.m() != 1 {
        return Err(PsscError::MultiInput { m: sys.m() });
    }
    let stars = sys.star_positions();
    if !stars.is_empty() {
        return Err(PsscError::StarPresent { count: stars.len() });
    }
    Ok(is_pssc(sys).verdict == Verdict::Pssc)
}

fn classify_edges_impl(sys: &StructuredSystem, parallel: bool) -> Result<EdgeClass, PsscError> {
    if sys.m() != 1 {
        return Err(PsscError::MultiInput { m: sys.m() });
    }
    if !is_structurally_controllable(sys) {
        return Err(PsscError::NotStructurallyControllable);
    }
    let crosses = sys.cross_positions();
    let classify = |&pi: &EntryPos| -> (EntryPos, EdgeClassKind) {
        let d = diagnose_pi(sys, pi);
        let kind = if d.passes() {
            EdgeClassKind::Stable
        } else {
            EdgeClassKind::Critical
        };
        (pi, kind)
    };
    let classes: BTreeMap<EntryPos, EdgeClassKind> = if parallel {
        crosses.par_iter().map(classify).collect()
    } else {
        crosses.iter().map(classify).collect()
    };
    Ok(EdgeClass { classes })
}

/// Classifies each cross entry of a structurally controllable single-input
/// system as critical or stable.
///
/// The classification treats the remaining indeterminate parameters
/// generically; parameter choices on their measure-zero exceptional set are
/// outside its scope.
pub fn classify_edges(sys: &StructuredSystem) -> Result<EdgeClass, PsscError> {
    classify_edges_impl(sys, false)
}

/// Same as [`classify_edges`] with the per-cross loop fanned out.
pub fn classify_edges_parallel(sys: &StructuredSystem) -> Result<EdgeClass, PsscError> {
    classify_edges_impl(sys, true)
}

/// Debug dump of the DM components of the pencil graph for one cross, as
/// JSON; includes lambda statistics for the square components.
pub fn dm_dump_for_pi(sys: &StructuredSystem, pi: EntryPos) -> Result<serde_json::Value, PsscError> {
    let reduced = sys.single_pi_reduction(pi)?;
    if !is_structurally_controllable(&reduced) {
        return Err(PsscError::NotStructurallyControllable);
    }
    let analysis = analyze_omegas_unchecked(&reduced, pi);
    let dm = &analysis.dm;
    let comps = dm
        .components()
        .iter()
        .enumerate()
        .map(|(k, comp)| {
            let tail = if dm.horizontal_tail() == Some(k) {
                Some("horizontal")
            } else if dm.vertical_tail() == Some(k) {
                Some("vertical")
            } else {
                None
            };
            let stats = if dm.is_tail(k) {
                None
            } else {
                component_stats(&analysis.h_jc, dm, k).ok()
            };
            json!({
                "index": k,
                "tail": tail,
                "rows": comp.rows.iter().collect::<Vec<_>>(),
                "cols": comp.cols.iter().collect::<Vec<_>>(),
                "edges": comp.edges.iter().map(|&(r, c)| json!([r, c])).collect::<Vec<_>>(),
                "lambda_edges": comp.edges.iter()
                    .filter(|&&e| analysis.h_jc.is_lambda(e))
                    .map(|&(r, c)| json!([r, c])).collect::<Vec<_>>(),
                "gamma_min": stats.map(|s| s.gamma_min),
                "gamma_max": stats.map(|s| s.gamma_max),
                "gamma_nz": stats.map(|s| s.gamma_nz),
            })
        })
        .collect::<Vec<_>>();
    Ok(json!({
        "pi": [pi.row(), pi.col()],
        "components": comps,
        "omega_j": analysis.omega_j.iter().collect::<Vec<_>>(),
        "omega_j_i": analysis.omega_j_i.iter().collect::<Vec<_>>(),
    }))
}
