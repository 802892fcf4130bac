//! `bianchi`: run cohomology and abelianization computations into a JSONL
//! store and render CSV reports from it.

mod report;
mod store;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::mpsc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use bianchi_core::polymod::Weight;
use bianchi_core::presentations::{CellComplex, GroupId, GroupKind};
use bianchi_core::ring::RingId;
use clap::Parser;
use rayon::prelude::*;

use report::{ReportOptions, Table};
use store::{Status, Store, Task};
use tasks::{Budgets, Job};

const EXIT_USAGE: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "bianchi", version, about = "Cohomology of Bianchi groups and their congruence subgroups")]
struct Args {
    #[arg(long, value_enum)]
    task: Task,
    /// Ring O_d, d in {1, 2, 3, 7, 11}. Required except for stats and compact.
    #[arg(long)]
    d: Option<u32>,
    /// PSL or PGL.
    #[arg(long, default_value = "psl")]
    group: GroupKind,
    /// Parallel weight n for E_{n,n}: a single value or an inclusive range `a-b`.
    #[arg(long)]
    n: Option<String>,
    #[arg(long, requires = "l", conflicts_with = "n")]
    k: Option<u32>,
    #[arg(long, requires = "k")]
    l: Option<u32>,
    #[arg(long, default_value_t = 2)]
    norm_min: u64,
    #[arg(long)]
    norm_max: Option<u64>,
    /// Explicit level generator, e.g. `20+w` (overrides the norm range).
    #[arg(long)]
    level: Option<String>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Directory for CSV reports; the store defaults to `<out>/store.jsonl`.
    #[arg(long, default_value = "bianchi-out")]
    out: PathBuf,
    #[arg(long, env = "BIANCHI_STORE")]
    store: Option<PathBuf>,
    /// Wall-clock budget per level or weight; exceeded units are stored as timeouts.
    #[arg(long)]
    budget_secs: Option<u64>,
    #[arg(long, default_value_t = 10)]
    factor_budget_secs: u64,
    /// External cell complex (JSON) for h2, for groups without shipped data.
    #[arg(long)]
    cells: Option<PathBuf>,
    /// Only write this report (stats).
    #[arg(long, value_enum)]
    table: Option<Table>,
    /// Checkpoint spacing of the L(x) / R(x) table.
    #[arg(long, default_value_t = 3000)]
    checkpoint_step: u64,
}

fn weights(args: &Args) -> Result<Vec<Weight>> {
    if let (Some(k), Some(l)) = (args.k, args.l) {
        return Ok(vec![Weight::new(k, l)]);
    }
    let Some(n) = &args.n else { bail!("--n or --k/--l is required for this task") };
    let (a, b) = match n.split_once('-') {
        Some((a, b)) => (a.trim().parse::<u32>()?, b.trim().parse::<u32>()?),
        None => {
            let v = n.trim().parse::<u32>()?;
            (v, v)
        }
    };
    Ok((a..=b).map(Weight::parallel).collect())
}

fn jobs(args: &Args) -> Result<Vec<Job>> {
    let d = args.d.context("--d is required for this task")?;
    let ring = RingId::new(d)?;
    let id = GroupId::new(ring, args.group);
    Ok(match args.task {
        Task::H1 => weights(args)?.into_iter().map(|w| Job::H1 { id, w }).collect(),
        Task::H2 => weights(args)?.into_iter().map(|w| Job::H2 { id, w }).collect(),
        Task::Abelianize | Task::Sweep => {
            if args.group != GroupKind::Psl {
                bail!("congruence subgroups are taken in PSL2");
            }
            if args.level.is_none() && args.norm_max.is_none() {
                bail!("--level or --norm-max is required for this task");
            }
            let levels = tasks::levels(ring, args.level.as_deref(), args.norm_min, args.norm_max.unwrap_or(0))?;
            if args.task == Task::Abelianize {
                levels.into_iter().map(|level| Job::Abelianize { level }).collect()
            } else {
                levels.into_iter().map(|level| Job::Sweep { level }).collect()
            }
        }
        Task::Stats | Task::Compact => Vec::new(),
    })
}

fn store_path(args: &Args) -> PathBuf {
    args.store.clone().unwrap_or_else(|| args.out.join("store.jsonl"))
}

/// Run the pending jobs; returns the number that did not finish `ok`.
fn compute(args: &Args, store: &mut Store) -> Result<usize> {
    let pending: Vec<Job> = jobs(args)?.into_iter().filter(|j| !store.is_done(&j.key())).collect();
    if pending.is_empty() {
        return Ok(0);
    }
    let cells = match &args.cells {
        Some(p) => Some(CellComplex::from_json(&std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?),
        None => None,
    };
    let budgets = Budgets {
        wall: args.budget_secs.map(Duration::from_secs),
        factor: Duration::from_secs(args.factor_budget_secs),
        cells,
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build()?;
    let (tx, rx) = mpsc::channel();
    let mut failed = 0;
    std::thread::scope(|s| -> Result<()> {
        let budgets = &budgets;
        s.spawn(move || {
            pool.install(|| {
                pending.into_par_iter().for_each_with(tx, |tx, job| {
                    let _ = tx.send(tasks::run_job(job, budgets));
                })
            })
        });
        // single writer: records are appended as they arrive
        for record in rx {
            if record.status != Status::Ok {
                eprintln!("{} {:?}: {}", record.key.level, record.key.task, record.message.as_deref().unwrap_or(""));
                failed += 1;
            }
            store.append(record)?;
        }
        Ok(())
    })?;
    store.compact()?;
    Ok(failed)
}

fn report(args: &Args, store: &Store) -> Result<()> {
    std::fs::create_dir_all(&args.out)?;
    let opts = ReportOptions { d: args.d, x: args.norm_max, checkpoint_step: args.checkpoint_step };
    let tables = match args.table {
        Some(t) => vec![t],
        None => Table::ALL.to_vec(),
    };
    for t in tables {
        let path = args.out.join(t.file_name());
        let file = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        report::write_table(store, t, &opts, file)?;
    }
    Ok(())
}

fn run(args: &Args) -> Result<ExitCode> {
    if args.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return Ok(ExitCode::from(EXIT_USAGE));
    }
    let mut store = Store::open(&store_path(args))?;
    match args.task {
        Task::Stats => {
            report(args, &store)?;
            Ok(ExitCode::SUCCESS)
        }
        Task::Compact => {
            store.compact()?;
            Ok(ExitCode::SUCCESS)
        }
        _ => {
            if let Err(e) = jobs(args) {
                eprintln!("error: {e:#}");
                return Ok(ExitCode::from(EXIT_USAGE));
            }
            let failed = compute(args, &mut store)?;
            report(args, &store)?;
            Ok(if failed > 0 { ExitCode::from(EXIT_PARTIAL) } else { ExitCode::SUCCESS })
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
