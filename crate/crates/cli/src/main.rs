//! Command-line front end: parse a structured system file, run the requested
//! analysis, and emit a human-readable or JSON report.
//!
//! Exit codes: 0 the property holds, 1 it fails, 2 inconclusive, 64 usage
//! error, 65 parse error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use pssc_core::oracle::{self, OracleError, OracleReport};
use pssc_core::pssc::{self, Verdict};
use pssc_core::structured::{parse_system, StructuredSystem};

const EXIT_HOLDS: u8 = 0;
const EXIT_FAILS: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_PARSE: u8 = 65;

#[derive(Parser)]
#[command(
    name = "pssc",
    about = "Structural, strong structural, and partial strong structural controllability of {0,*,x} structured systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// System file: header `n m`, then n rows of A and n rows of B with
    /// tokens 0, *, x (# starts a comment). A leading `{` switches to JSON.
    file: PathBuf,
    /// Emit the report as JSON on stdout.
    #[arg(long)]
    json: bool,
    /// Print progress diagnostics on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Args)]
struct ParallelArg {
    /// Evaluate cross entries concurrently; the output is identical either way.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set, value_name = "BOOL")]
    parallel: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decide structural controllability.
    Sc {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Decide strong structural controllability over the reals
    /// (single-input, all indeterminate entries must be crosses).
    Ssc {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        par: ParallelArg,
    },
    /// Decide partial strong structural controllability.
    Pssc {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        par: ParallelArg,
        /// Also dump the DM components of each pencil graph as JSON.
        #[arg(long)]
        dump_dm: bool,
    },
    /// Classify each cross entry as critical or stable (single-input).
    Classify {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        par: ParallelArg,
    },
    /// Cross-check with the exact-rational polynomial oracle.
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        par: ParallelArg,
        /// Sampling seeds (repeatable).
        #[arg(long, value_name = "N", num_args = 1.., default_values_t = [1u64, 2, 3])]
        seed: Vec<u64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(cli))
}

fn load_system(common: &CommonArgs) -> Result<StructuredSystem, u8> {
    let path = &common.file;
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("pssc: cannot read {}: {e}", path.display());
            return Err(EXIT_USAGE);
        }
    };
    let sys = parse_system(&text).map_err(|e| {
        eprintln!("pssc: parse error in {}: {e}", path.display());
        EXIT_PARSE
    })?;
    if common.verbose > 0 {
        eprintln!(
            "pssc: {}: n = {}, m = {}, {} star and {} cross entries",
            path.display(),
            sys.n(),
            sys.m(),
            sys.star_positions().len(),
            sys.cross_positions().len()
        );
    }
    Ok(sys)
}

fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Sc { common } => {
            let sys = match load_system(&common) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let sc = pssc::is_structurally_controllable(&sys);
            if common.json {
                println!("{}", serde_json::json!({ "sc": sc }));
            } else {
                println!("structurally controllable: {}", if sc { "yes" } else { "no" });
            }
            if sc {
                EXIT_HOLDS
            } else {
                EXIT_FAILS
            }
        }
        Command::Ssc { common, par } => {
            let sys = match load_system(&common) {
                Ok(s) => s,
                Err(code) => return code,
            };
            // The verdict reduces to the PSSC machinery on the all-cross
            // system; reuse its report for the per-entry diagnoses.
            if let Err(e) = pssc::is_ssc_real(&sys) {
                eprintln!("pssc: ssc: {e}");
                return EXIT_USAGE;
            }
            let report = run_pssc(&sys, par.parallel);
            let ssc = report.verdict == Verdict::Pssc;
            if common.json {
                let mut v = report.to_json();
                v["ssc_real"] = serde_json::json!(ssc);
                println!("{v}");
            } else {
                println!("ssc over the reals: {}", if ssc { "yes" } else { "no" });
                print!("{}", report.render_text());
            }
            if ssc {
                EXIT_HOLDS
            } else {
                EXIT_FAILS
            }
        }
        Command::Pssc {
            common,
            par,
            dump_dm,
        } => {
            let sys = match load_system(&common) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let start = std::time::Instant::now();
            let report = run_pssc(&sys, par.parallel);
            if common.verbose > 0 {
                eprintln!("pssc: decision took {:?}", start.elapsed());
            }
            let dm_dump = if dump_dm {
                Some(collect_dm_dump(&sys))
            } else {
                None
            };
            if common.json {
                let mut v = report.to_json();
                if let Some(dump) = dm_dump {
                    v["dm"] = serde_json::Value::Array(dump);
                }
                println!("{v}");
            } else {
                print!("{}", report.render_text());
                if report.verdict == Verdict::Inconclusive {
                    println!(
                        "note: the per-cross sweep is only a necessary condition for \
                         multi-input systems with several crosses; no exact criterion applies"
                    );
                }
                if let Some(dump) = dm_dump {
                    for d in dump {
                        println!("dm {d}");
                    }
                }
            }
            verdict_exit(report.verdict)
        }
        Command::Classify { common, par } => {
            let sys = match load_system(&common) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let classes = if par.parallel {
                pssc::classify_edges_parallel(&sys)
            } else {
                pssc::classify_edges(&sys)
            };
            match classes {
                Ok(classes) => {
                    if common.json {
                        let mut v = classes.to_json();
                        v["sc"] = serde_json::json!(true);
                        println!("{v}");
                    } else {
                        println!("edge classification:");
                        print!("{}", classes.render_text());
                    }
                    EXIT_HOLDS
                }
                Err(pssc::PsscError::NotStructurallyControllable) => {
                    eprintln!("pssc: classify: system is not structurally controllable");
                    EXIT_FAILS
                }
                Err(e) => {
                    eprintln!("pssc: classify: {e}");
                    EXIT_USAGE
                }
            }
        }
        Command::Oracle { common, par, seed } => {
            let sys = match load_system(&common) {
                Ok(s) => s,
                Err(code) => return code,
            };
            // A one-thread pool makes the oracle's internal fan-out
            // sequential; the report is identical either way.
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(if par.parallel { 0 } else { 1 })
                .build()
                .expect("thread pool");
            let report = pool.install(|| {
                if sys.m() == 1 {
                    oracle::oracle_pssc_single(&sys, &seed)
                } else {
                    oracle::oracle_pssc_multi_single_cross(&sys, &seed)
                }
            });
            match report {
                Ok(report) => {
                    emit_oracle(&report, common.json);
                    verdict_exit(report.verdict)
                }
                Err(OracleError::NotSingleCross { found }) => {
                    eprintln!(
                        "pssc: oracle: no criterion covers a multi-input system with {found} cross entries"
                    );
                    EXIT_INCONCLUSIVE
                }
                Err(e @ OracleError::TooManyMinors { .. }) => {
                    eprintln!("pssc: oracle: {e}");
                    EXIT_USAGE
                }
                Err(e) => {
                    eprintln!("pssc: oracle: {e}");
                    EXIT_USAGE
                }
            }
        }
    }
}

fn run_pssc(sys: &StructuredSystem, parallel: bool) -> pssc::PsscReport {
    if parallel {
        pssc::is_pssc_parallel(sys)
    } else {
        pssc::is_pssc(sys)
    }
}

fn collect_dm_dump(sys: &StructuredSystem) -> Vec<serde_json::Value> {
    sys.cross_positions()
        .into_iter()
        .filter_map(|pi| pssc::dm_dump_for_pi(sys, pi).ok())
        .collect()
}

fn emit_oracle(report: &OracleReport, json: bool) {
    if json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render_text());
    }
}

fn verdict_exit(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Pssc => EXIT_HOLDS,
        Verdict::NotPssc => EXIT_FAILS,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}
