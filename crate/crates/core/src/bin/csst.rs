use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use csst::harness::bench::{self, BenchConfig, CSV_HEADER};
use csst::harness::fuzz::{self, FuzzConfig, Verdict};
use csst::harness::replay::{self, ReplayError};
use csst::harness::satcheck::{self, Trace};
use csst::harness::{oplog, Backend};

#[derive(Parser)]
#[command(name = "csst", version, about = "Dynamic reachability over chain DAGs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an op-log and print one line per query.
    Replay {
        #[arg(long, default_value = "csst-dyn")]
        backend: Backend,
        /// Shadow every record into the oracle and stop at the first mismatch.
        #[arg(long)]
        check_oracle: bool,
        path: PathBuf,
    },
    /// Differential fuzzing of the backends against the oracle.
    Fuzz {
        #[arg(long, default_value_t = 4)]
        k: u32,
        #[arg(long, default_value_t = 64)]
        max_len: u32,
        #[arg(long, default_value_t = 2000)]
        n_ops: usize,
        #[arg(long)]
        seed: u64,
        /// Include deletions (only backends that support them are tested).
        #[arg(long)]
        decremental: bool,
    },
    /// Random insertion/query workload; prints CSV.
    Bench {
        #[arg(long, default_value_t = 10)]
        k: u32,
        #[arg(long)]
        ell: u32,
        #[arg(long, default_value_t = 10_000)]
        window: u32,
        #[arg(long, default_value_t = 20)]
        insert_factor: u32,
        #[arg(long, default_value_t = 1_000_000)]
        queries: usize,
        #[arg(long)]
        seed: u64,
        /// Backends to run; repeat the flag for several. Defaults to all.
        #[arg(long)]
        backend: Vec<Backend>,
        /// Also write the generated workload as an op-log.
        #[arg(long)]
        emit_workload: Option<PathBuf>,
        /// Skip the untimed warm-up pass.
        #[arg(long)]
        no_warmup: bool,
    },
    /// Check a read/write trace for a consistent interleaving.
    Satcheck { path: PathBuf },
}

fn read(path: &PathBuf) -> Result<String, ExitCode> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(1)
    })
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Replay {
            backend,
            check_oracle,
            path,
        } => {
            let text = read(&path)?;
            let result = oplog::parse(&text)
                .map_err(ReplayError::from)
                .and_then(|ops| replay::replay(&ops, &|g| backend.build(g), check_oracle, &mut out));
            out.flush().ok();
            if let Err(e) = result {
                eprintln!("error: {e}");
                return Err(ExitCode::from(e.exit_code() as u8));
            }
        }
        Command::Fuzz {
            k,
            max_len,
            n_ops,
            seed,
            decremental,
        } => {
            let cfg = FuzzConfig::new(k, max_len, n_ops, seed, decremental);
            if k == 0 || max_len == 0 {
                eprintln!("error: k and max-len must be positive");
                return Err(ExitCode::from(1));
            }
            match fuzz::fuzz(&cfg, &fuzz::default_subjects(decremental)) {
                Verdict::Pass(stats) => {
                    writeln!(
                        out,
                        "PASS seed={seed} updates={} queries={} audits={}",
                        stats.updates, stats.queries, stats.audits
                    )
                    .ok();
                }
                Verdict::Fail {
                    seed,
                    message,
                    reproducer,
                } => {
                    writeln!(out, "FAIL seed={seed}: {message}\n# reproducer\n{reproducer}").ok();
                    out.flush().ok();
                    return Err(ExitCode::from(2));
                }
            }
        }
        Command::Bench {
            k,
            ell,
            window,
            insert_factor,
            queries,
            seed,
            backend,
            emit_workload,
            no_warmup,
        } => {
            let cfg = BenchConfig {
                k,
                ell,
                window,
                insert_factor,
                queries,
                seed,
                warmup: !no_warmup,
            };
            let backends = if backend.is_empty() {
                Backend::ALL.to_vec()
            } else {
                backend
            };
            let (workload, rows) = bench::bench(&cfg, &backends).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(1)
            })?;
            if let Some(path) = emit_workload {
                fs::write(&path, oplog::render(&workload.to_ops())).map_err(|e| {
                    eprintln!("error: {}: {e}", path.display());
                    ExitCode::from(1)
                })?;
            }
            writeln!(out, "{CSV_HEADER}").ok();
            for r in rows {
                writeln!(out, "{}", r.csv()).ok();
            }
        }
        Command::Satcheck { path } => {
            let text = read(&path)?;
            let report = Trace::parse(&text)
                .and_then(|t| satcheck::satcheck(&t))
                .map_err(|e| {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                })?;
            write!(out, "{}", report.render()).ok();
        }
    }
    out.flush().ok();
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
