//! Acceptance suite: every criterion is one test that prints a single
//! PASS/FAIL line (run with `--nocapture` to see the lines on success).

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use pssc_core::graph::WeightMode;
use pssc_core::oracle::{self, interp_in_cross};
use pssc_core::pssc::{self, NonzeroMode, ReportMode, Verdict, ZeroMode};
use pssc_core::structured::{EntryKind, EntryPos, StructuredSystem};

/// Prints the criterion line even when the test body panics.
struct Criterion {
    label: &'static str,
    passed: bool,
}

impl Criterion {
    fn start(label: &'static str) -> Self {
        Criterion {
            label,
            passed: false,
        }
    }

    fn pass(mut self) {
        self.passed = true;
    }
}

impl Drop for Criterion {
    fn drop(&mut self) {
        println!(
            "{}: {}",
            self.label,
            if self.passed { "PASS" } else { "FAIL" }
        );
    }
}

fn timed<T>(budget: Duration, what: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    assert!(
        elapsed < budget,
        "{what} took {elapsed:?}, budget {budget:?}"
    );
    out
}

#[test]
fn criterion_1_paper_fixture_verdicts() {
    let c = Criterion::start("criterion 1 (paper fixture verdicts)");
    let budget = Duration::from_secs(1);

    let sys3 = load_fixture("sys3.txt");
    assert!(timed(budget, "sc(sys3)", || {
        pssc::is_structurally_controllable(&sys3)
    }));
    assert_eq!(
        timed(budget, "pssc(sys3)", || pssc::is_pssc(&sys3)).verdict,
        Verdict::Pssc
    );
    let sys3_allx = load_fixture("sys3_allcross.txt");
    assert!(!timed(budget, "ssc_real(sys3 all-cross)", || {
        pssc::is_ssc_real(&sys3_allx).unwrap()
    }));

    let sys7 = load_fixture("sys7.txt");
    let report7 = timed(budget, "pssc(sys7)", || pssc::is_pssc(&sys7));
    assert_eq!(report7.verdict, Verdict::NotPssc);
    assert_eq!(report7.per_pi.len(), 2);
    for d in &report7.per_pi {
        assert_eq!(d.nonzero_mode, NonzeroMode::Fail, "pi {}", d.pi);
    }

    let sys8 = load_fixture("sys8.txt");
    let report8 = timed(budget, "pssc(sys8)", || pssc::is_pssc(&sys8));
    assert_eq!(report8.verdict, Verdict::Pssc);
    assert_eq!(report8.per_pi.len(), 2);
    for d in &report8.per_pi {
        assert_eq!(d.zero_mode, ZeroMode::B2, "pi {}", d.pi);
        assert_eq!(d.nonzero_mode, NonzeroMode::C1, "pi {}", d.pi);
    }

    let sys11 = load_fixture("sys11.txt");
    let report11 = timed(budget, "pssc(sys11)", || pssc::is_pssc(&sys11));
    assert_eq!(report11.verdict, Verdict::Pssc);
    assert_eq!(report11.mode, ReportMode::MultiInputSingleCross);
    assert!(report11.per_pi[0].omega_j.is_empty());

    // Promote each indeterminate entry to the sole cross in turn; every
    // variant stays PSSC.
    let all_star = sys11.with_entry(EntryPos(4, 5), EntryKind::Star);
    let indets = sys11.indeterminate_positions();
    assert_eq!(indets.len(), 12);
    for pos in indets {
        let variant = all_star.with_entry(pos, EntryKind::Cross);
        let report = timed(budget, "pssc(sys11 variant)", || pssc::is_pssc(&variant));
        assert_eq!(report.verdict, Verdict::Pssc, "variant with cross at {pos}");
        assert_eq!(report.mode, ReportMode::MultiInputSingleCross);
    }

    c.pass();
}

#[test]
fn criterion_2_omega_cardinalities_on_sys3() {
    let c = Criterion::start("criterion 2 (omega-set cardinalities)");
    let sys3 = load_fixture("sys3.txt");

    let red32 = sys3.single_pi_reduction(EntryPos(3, 2)).unwrap();
    let (omega, omega_i) = pssc::omega_sets(&red32, EntryPos(3, 2)).unwrap();
    assert_eq!(omega.len(), 1);
    assert!(omega_i.is_empty());

    let red15 = sys3.single_pi_reduction(EntryPos(1, 5)).unwrap();
    let (omega, omega_i) = pssc::omega_sets(&red15, EntryPos(1, 5)).unwrap();
    assert_eq!(omega.len(), 1);
    assert_eq!(omega_i.len(), 1);
    // Order-insensitive: the member of omega_j^i is a member of omega_j.
    assert!(omega_i.is_subset(&omega));

    c.pass();
}

#[test]
fn criterion_3_edge_classification_on_all_cross_sys3() {
    let c = Criterion::start("criterion 3 (edge classification)");
    let sys = load_fixture("sys3_allcross.txt");
    let classes = pssc::classify_edges(&sys).unwrap();
    let critical: BTreeSet<EntryPos> = classes.critical().into_iter().collect();
    let stable: BTreeSet<EntryPos> = classes.stable().into_iter().collect();
    let expected_critical: BTreeSet<EntryPos> = [
        EntryPos(2, 1),
        EntryPos(4, 1),
        EntryPos(4, 2),
        EntryPos(4, 4),
    ]
    .into_iter()
    .collect();
    let expected_stable: BTreeSet<EntryPos> =
        [EntryPos(3, 2), EntryPos(1, 5)].into_iter().collect();
    assert_eq!(critical, expected_critical);
    assert_eq!(stable, expected_stable);
    c.pass();
}

#[test]
fn criterion_4_oracle_equivalence_on_random_systems() {
    let c = Criterion::start("criterion 4 (oracle equivalence, 200 random systems)");
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97);
    let seeds = [1u64, 2, 3];
    let mut stable = 0usize;
    for case in 0..200 {
        let sys = random_system(&mut rng, 4, 8);
        let graph_verdict = pssc::is_pssc(&sys).verdict;
        let report = oracle::oracle_pssc_single(&sys, &seeds).unwrap();
        if report.seed_stable {
            stable += 1;
            assert_eq!(
                graph_verdict, report.verdict,
                "case {case}: graph and oracle disagree on:\n{sys}"
            );
        }
    }
    assert!(stable >= 190, "only {stable}/200 oracle runs were seed-stable");
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(60),
        "suite took {elapsed:?}, budget 60s"
    );
    c.pass();
}

#[test]
fn criterion_5_oracle_reproduces_determinant_structure() {
    let c = Criterion::start("criterion 5 (determinant degree structure)");
    let sys3 = load_fixture("sys3.txt");
    for seed in [1, 2, 3] {
        let p = interp_in_cross(&sys3, EntryPos(3, 2), seed).unwrap();
        assert_eq!(p.nonzero_degrees(), vec![1]);
        let p = interp_in_cross(&sys3, EntryPos(1, 5), seed).unwrap();
        assert_eq!(p.nonzero_degrees(), vec![4]);
    }
    let sys8 = load_fixture("sys8.txt");
    for seed in [1, 2, 3] {
        let p = interp_in_cross(&sys8, EntryPos(1, 2), seed).unwrap();
        assert_eq!(p.nonzero_degrees(), vec![3]);
        let p = interp_in_cross(&sys8, EntryPos(3, 4), seed).unwrap();
        assert_eq!(p.nonzero_degrees(), vec![1]);
    }
    c.pass();
}

#[test]
fn criterion_6_combinatorial_engines_match_brute_force() {
    let c = Criterion::start("criterion 6 (matching and DM engines vs brute force)");
    let mut rng = ChaCha8Rng::seed_from_u64(0xB1B);

    for _ in 0..100 {
        let mut g = random_bipartite(&mut rng, 8, 0.3, false);
        let edges: Vec<_> = g.edges().into_iter().collect();
        for e in edges {
            if rng.gen_bool(0.7) {
                let w = rng.gen_range(0..4);
                g.set_weight(e, w);
            }
        }
        let (best, _) = brute_max_matchings(&g);
        assert_eq!(g.mt(), best);
        if best > 0 {
            for mode in [WeightMode::Min, WeightMode::Max] {
                let (m, w) = g.extremal_weight_max_matching(mode);
                assert_eq!(m.len(), best);
                assert_eq!(w, brute_extremal_weight(&g, mode));
            }
        }
    }

    for case in 0..100 {
        let g = random_bipartite(&mut rng, 8, 0.3, true);
        let dm = pssc_core::dm::dm_decompose(&g);
        if let Err(msg) = check_dm_definition(&g, &dm) {
            panic!("case {case}: DM decomposition violates its definition: {msg}");
        }
    }

    c.pass();
}

#[test]
fn criterion_7_verdict_ladder_on_random_all_cross_systems() {
    let c = Criterion::start("criterion 7 (ssc -> pssc -> sc ladder, 200 systems)");
    let mut rng = ChaCha8Rng::seed_from_u64(0x1ADDE2);
    for case in 0..200 {
        let sys = random_all_cross_system(&mut rng, 5);
        let sc = pssc::is_structurally_controllable(&sys);
        let pssc_holds = pssc::is_pssc(&sys).verdict == Verdict::Pssc;
        let ssc_holds = pssc::is_ssc_real(&sys).unwrap();
        assert!(
            (!ssc_holds || pssc_holds) && (!pssc_holds || sc),
            "case {case}: ladder violated (ssc={ssc_holds}, pssc={pssc_holds}, sc={sc}) on:\n{sys}"
        );
    }
    c.pass();
}

#[test]
fn criterion_8_performance_smoke_n100() {
    let c = Criterion::start("criterion 8 (n = 100 performance smoke)");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let n = 100;
    let mut a = vec![vec![EntryKind::Zero; n]; n];
    // Subdiagonal chain keeps the system structurally controllable.
    for k in 0..n - 1 {
        a[k + 1][k] = EntryKind::Star;
    }
    // Extra entries up to an average state degree of about 3.
    let mut extra = 0;
    while extra < 2 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if a[i][j] == EntryKind::Zero {
            a[i][j] = EntryKind::Star;
            extra += 1;
        }
    }
    let mut b = vec![vec![EntryKind::Zero]; n];
    b[0][0] = EntryKind::Star;
    let mut sys = StructuredSystem::new(a, b).unwrap();
    // Promote five entries to crosses.
    let mut promoted = 0;
    let indets = sys.indeterminate_positions();
    while promoted < 5 {
        let pos = indets[rng.gen_range(0..indets.len())];
        if sys.entry(pos) == EntryKind::Star {
            sys = sys.with_entry(pos, EntryKind::Cross);
            promoted += 1;
        }
    }
    assert!(pssc_core::pssc::is_structurally_controllable(&sys));
    assert_eq!(sys.cross_positions().len(), 5);

    let start = Instant::now();
    let report = pssc::is_pssc(&sys);
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(10),
        "PSSC verdict on n=100 took {elapsed:?}, budget 10s"
    );
    assert_eq!(report.per_pi.len(), 5);
    assert!(matches!(report.verdict, Verdict::Pssc | Verdict::NotPssc));
    c.pass();
}
