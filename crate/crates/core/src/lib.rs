//! Controllability decisions for linear structured systems.
//!
//! A structured system is a pair `(A, B)` whose entries are fixed zeros,
//! generic entries (`*`, free to take any value), or unspecified entries
//! (`x`, free to take any nonzero value). This crate decides:
//!
//! - structural controllability (some realization is controllable),
//! - strong structural controllability over the reals for all-`x`
//!   single-input systems,
//! - partial strong structural controllability (PSSC): for almost all values
//!   of the generic entries, controllability holds for every nonzero choice
//!   of the unspecified entries,
//!
//! using bipartite maximum matchings, Dulmage-Mendelsohn decomposition, and
//! extremal-weight matchings over the pencil graph of `[A - lambda I, B]`.
//! An exact-rational polynomial oracle cross-validates the graph criteria at
//! small scale by interpolating controllability-matrix determinants.

pub mod dm;
pub mod graph;
pub mod oracle;
pub mod pssc;
pub mod structured;

pub use pssc::{
    classify_edges, classify_edges_parallel, is_pssc, is_pssc_parallel, is_ssc_real,
    is_structurally_controllable, EdgeClass, EdgeClassKind, PiDiagnosis, PsscError, PsscReport,
    ReportMode, Verdict,
};
pub use structured::{
    emit_system, parse_system, sample_realization, EntryKind, EntryPos, ParseError,
    RationalRealization, StructuredSystem,
};
