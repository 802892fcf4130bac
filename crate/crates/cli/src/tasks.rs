//! Units of work and their execution under a wall-clock budget.

use std::sync::mpsc;
use std::time::Duration;

use anyhow::Result;
use bianchi_core::congruence::{abelianization_rank, abelianization_with, cuspidal_rank_from, degree_one_primes, LevelIdeal};
use bianchi_core::h1::h1_presentation;
use bianchi_core::h2::h2_cells;
use bianchi_core::polymod::Weight;
use bianchi_core::presentations::{load_cellcomplex, load_presentation, parse_elem, CellComplex, GroupId, GroupKind};
use bianchi_core::ring::arith::factor;
use bianchi_core::ring::{RingId, Z};
use serde::{Deserialize, Serialize};

use crate::store::{Key, Record, Status, Task};

/// One row of an H^1 table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct H1Row {
    pub divisor_norms: Vec<Z>,
    pub primes: Vec<Z>,
    pub unfactored: Vec<Z>,
    pub rank: usize,
}

/// Rank-only result of a sweep level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub generator: bianchi_core::ring::QuadInt,
    pub rank: usize,
    pub cuspidal_rank: usize,
}

#[derive(Clone, Debug)]
pub enum Job {
    H1 { id: GroupId, w: Weight },
    H2 { id: GroupId, w: Weight },
    Abelianize { level: LevelIdeal },
    Sweep { level: LevelIdeal },
}

impl Job {
    pub fn key(&self) -> Key {
        match self {
            Job::H1 { id, w } | Job::H2 { id, w } => Key {
                task: if matches!(self, Job::H1 { .. }) { Task::H1 } else { Task::H2 },
                group: id.kind,
                d: id.ring.d(),
                norm: 1,
                level: "1".into(),
                k: w.k,
                l: w.l,
            },
            Job::Abelianize { level } | Job::Sweep { level } => Key {
                task: if matches!(self, Job::Abelianize { .. }) { Task::Abelianize } else { Task::Sweep },
                group: GroupKind::Psl,
                d: level.ring.d(),
                norm: level.norm(),
                level: level.generator.to_string(),
                k: 0,
                l: 0,
            },
        }
    }
}

/// Levels named on the command line: an explicit generator, or every
/// residue-degree-one prime with norm in `[lo, hi]`.
pub fn levels(ring: RingId, explicit: Option<&str>, lo: u64, hi: u64) -> Result<Vec<LevelIdeal>> {
    if let Some(s) = explicit {
        return Ok(vec![LevelIdeal::from_generator(&parse_elem(s, ring)?)?]);
    }
    if hi < lo {
        return Ok(Vec::new());
    }
    degree_one_primes(ring, lo, hi).iter().map(|pi| Ok(LevelIdeal::from_generator(pi)?)).collect()
}

pub struct Budgets {
    pub wall: Option<Duration>,
    pub factor: Duration,
    pub cells: Option<CellComplex>,
}

fn compute(job: &Job, budgets: &Budgets) -> Result<serde_json::Value> {
    Ok(match job {
        Job::H1 { id, w } => {
            let p = load_presentation(*id)?;
            let dec = h1_presentation(&p, *w)?;
            let mut primes = Vec::new();
            let mut unfactored = Vec::new();
            for n in &dec.divisor_norms {
                let f = factor(n, budgets.factor);
                primes.extend(f.distinct_primes());
                unfactored.extend(f.unfactored);
            }
            primes.sort();
            primes.dedup();
            serde_json::to_value(H1Row { divisor_norms: dec.divisor_norms, primes, unfactored, rank: dec.rank })?
        }
        Job::H2 { id, w } => {
            let cells = match &budgets.cells {
                Some(c) => c.clone(),
                None => load_cellcomplex(*id)?,
            };
            serde_json::to_value(h2_cells(&cells, *w, budgets.factor)?)?
        }
        Job::Abelianize { level } => {
            let p = load_presentation(GroupId::psl(level.ring.d())?)?;
            serde_json::to_value(abelianization_with(&p, level, budgets.factor)?)?
        }
        Job::Sweep { level } => {
            let p = load_presentation(GroupId::psl(level.ring.d())?)?;
            let rank = abelianization_rank(&p, level)?;
            let cuspidal_rank = cuspidal_rank_from(level.ring.d(), rank)?;
            serde_json::to_value(RankRow { generator: level.generator.clone(), rank, cuspidal_rank })?
        }
    })
}

/// Run one job. With a wall-clock budget the computation runs on its own
/// thread; on expiry a timeout record is returned and the thread is left to
/// finish in the background, its result discarded.
pub fn run_job(job: Job, budgets: &Budgets) -> Record {
    let key = job.key();
    let outcome = match budgets.wall {
        None => Some(compute(&job, budgets)),
        Some(limit) => {
            let (tx, rx) = mpsc::channel();
            let b = Budgets { wall: None, factor: budgets.factor, cells: budgets.cells.clone() };
            std::thread::spawn(move || {
                let _ = tx.send(compute(&job, &b));
            });
            rx.recv_timeout(limit).ok()
        }
    };
    match outcome {
        Some(Ok(result)) => Record { key, status: Status::Ok, result, message: None },
        Some(Err(e)) => Record { key, status: Status::Error, result: serde_json::Value::Null, message: Some(format!("{e:#}")) },
        None => Record {
            key,
            status: Status::Timeout,
            result: serde_json::Value::Null,
            message: Some(format!("exceeded {}s", budgets.wall.unwrap_or_default().as_secs())),
        },
    }
}
