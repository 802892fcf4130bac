//! CSV reports generated from the store.

use std::collections::BTreeMap;
use std::io::Write;

use anyhow::Result;
use bianchi_core::asymptotics::{bv_ratio, lx_rx_table, mean_ratio, nr_histogram, volume, RankRecord};
use bianchi_core::congruence::{degree_one_primes, AbelianizationReport};
use bianchi_core::h2::H2Result;
use bianchi_core::ring::{QuadInt, RingId, Z};

use crate::store::{Status, Store, Task};
use crate::tasks::{H1Row, RankRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Table {
    H1,
    H2,
    T1,
    T3,
    T4,
    T5,
}

impl Table {
    pub const ALL: [Table; 6] = [Table::H1, Table::H2, Table::T1, Table::T3, Table::T4, Table::T5];

    pub fn file_name(self) -> &'static str {
        match self {
            Table::H1 => "h1.csv",
            Table::H2 => "h2.csv",
            Table::T1 => "t1_gs_counterexamples.csv",
            Table::T3 => "t3_rank_distribution.csv",
            Table::T4 => "t4_lx_rx.csv",
            Table::T5 => "t5_torsion_volume.csv",
        }
    }
}

pub struct ReportOptions {
    /// Restrict to one ring.
    pub d: Option<u32>,
    /// Largest norm covered by the rank tables; defaults to the largest
    /// stored norm.
    pub x: Option<u64>,
    pub checkpoint_step: u64,
}

fn bracket(v: &[Z]) -> String {
    format!("[{}]", v.iter().map(|z| z.to_string()).collect::<Vec<_>>().join(", "))
}

/// Bracketed list, or an empty cell for an empty list.
fn list(v: &[Z]) -> String {
    if v.is_empty() {
        String::new()
    } else {
        bracket(v)
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Error => "error",
        Status::Timeout => "timeout",
    }
}

fn wanted(opts: &ReportOptions, d: u32) -> bool {
    opts.d.is_none_or(|x| x == d)
}

/// Whether `generator` is the level chosen for its conjugate pair, so that
/// statistics count each pair once.
fn is_representative(d: u32, norm: u64, generator: &QuadInt) -> Result<bool> {
    let ring = RingId::new(d)?;
    Ok(degree_one_primes(ring, norm, norm).first() == Some(generator))
}

/// Cuspidal ranks of prime levels per ring, from sweep and abelianize records.
fn rank_records(store: &Store, opts: &ReportOptions) -> Result<BTreeMap<u32, Vec<RankRecord>>> {
    let mut out: BTreeMap<u32, BTreeMap<u64, RankRecord>> = BTreeMap::new();
    for r in store.ok_results(Task::Sweep).filter(|r| wanted(opts, r.key.d)) {
        let row: RankRow = serde_json::from_value(r.result.clone())?;
        if !is_representative(r.key.d, r.key.norm, &row.generator)? {
            continue;
        }
        let rec = RankRecord { d: r.key.d, norm: r.key.norm, generator: row.generator, cuspidal_rank: row.cuspidal_rank };
        out.entry(r.key.d).or_default().insert(r.key.norm, rec);
    }
    for r in store.ok_results(Task::Abelianize).filter(|r| wanted(opts, r.key.d)) {
        let rep: AbelianizationReport = serde_json::from_value(r.result.clone())?;
        if !is_representative(rep.d, rep.norm, &rep.level.generator)? {
            continue;
        }
        if let Some(c) = rep.cuspidal_rank {
            let rec = RankRecord { d: rep.d, norm: rep.norm, generator: rep.level.generator.clone(), cuspidal_rank: c };
            out.entry(rep.d).or_default().entry(rep.norm).or_insert(rec);
        }
    }
    Ok(out.into_iter().map(|(d, m)| (d, m.into_values().collect())).collect())
}

pub fn write_table(store: &Store, table: Table, opts: &ReportOptions, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    match table {
        Table::H1 | Table::H2 => {
            let task = if table == Table::H1 { Task::H1 } else { Task::H2 };
            if table == Table::H1 {
                w.write_record(["group", "d", "k", "l", "divisor_norms", "primes", "rank", "status"])?;
            } else {
                w.write_record(["group", "d", "k", "l", "primes", "large", "advisory", "rank", "status"])?;
            }
            for r in store.records().filter(|r| r.key.task == task && wanted(opts, r.key.d)) {
                let head = [r.key.group.to_string(), r.key.d.to_string(), r.key.k.to_string(), r.key.l.to_string()];
                let status = status_name(r.status).to_string();
                let body: Vec<String> = match (r.status, table) {
                    (Status::Ok, Table::H1) => {
                        let row: H1Row = serde_json::from_value(r.result.clone())?;
                        let primes = if row.primes.is_empty() {
                            String::new()
                        } else {
                            format!("({})", row.primes.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","))
                        };
                        vec![list(&row.divisor_norms), primes, row.rank.to_string()]
                    }
                    (Status::Ok, _) => {
                        let res: H2Result = serde_json::from_value(r.result.clone())?;
                        let advisory: Vec<Z> = res.torsion_primes.iter().filter(|t| t.unreliable).map(|t| t.p.clone()).collect();
                        vec![bracket(&res.primes()), list(&res.large_primes()), list(&advisory), res.rank.to_string()]
                    }
                    (_, Table::H1) => vec![String::new(); 3],
                    _ => vec![String::new(); 4],
                };
                w.write_record(head.into_iter().chain(body).chain([status]))?;
            }
        }
        Table::T1 => {
            w.write_record(["d", "norm", "rank", "torsion_primes", "gs_violations"])?;
            let mut first: BTreeMap<u32, AbelianizationReport> = BTreeMap::new();
            for r in store.ok_results(Task::Abelianize).filter(|r| wanted(opts, r.key.d)) {
                let rep: AbelianizationReport = serde_json::from_value(r.result.clone())?;
                if rep.gs_violations.is_empty() || !is_representative(rep.d, rep.norm, &rep.level.generator)? {
                    continue;
                }
                if first.get(&rep.d).is_none_or(|f| rep.norm < f.norm) {
                    first.insert(rep.d, rep);
                }
            }
            for rep in first.values() {
                w.write_record([
                    rep.d.to_string(),
                    rep.norm.to_string(),
                    rep.rank.to_string(),
                    list(&rep.torsion_primes),
                    list(&rep.gs_violations),
                ])?;
            }
        }
        Table::T3 => {
            w.write_record(["d", "x", "r", "count", "percent", "status"])?;
            for (d, recs) in rank_records(store, opts)? {
                let ring = RingId::new(d)?;
                let x = opts.x.unwrap_or_else(|| recs.iter().map(|r| r.norm).max().unwrap_or(0)) + 1;
                match nr_histogram(ring, &recs, x) {
                    Ok(h) => {
                        let top = h.counts.keys().max().copied().unwrap_or(0);
                        for r in 0..=top {
                            w.write_record([d.to_string(), x.to_string(), r.to_string(), h.count(r).to_string(), format!("{:.2}", h.percentage(r)), "ok".into()])?;
                        }
                        let pos = if h.total == 0 { 0.0 } else { 100.0 * h.positive() as f64 / h.total as f64 };
                        w.write_record([d.to_string(), x.to_string(), ">0".into(), h.positive().to_string(), format!("{pos:.2}"), "ok".into()])?;
                    }
                    Err(bianchi_core::Error::IncompleteSweep { missing, .. }) => {
                        w.write_record([d.to_string(), x.to_string(), String::new(), missing.len().to_string(), String::new(), "incomplete".into()])?;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Table::T4 => {
            w.write_record(["d", "x", "R", "L", "ratio", "status"])?;
            for (d, recs) in rank_records(store, opts)? {
                let ring = RingId::new(d)?;
                let top = opts.x.unwrap_or_else(|| recs.iter().map(|r| r.norm).max().unwrap_or(0));
                let step = opts.checkpoint_step.max(1);
                let checkpoints: Vec<u64> = (1..=top / step).map(|i| i * step).collect();
                for row in lx_rx_table(&recs, &checkpoints) {
                    let complete = nr_histogram(ring, &recs, row.x + 1).is_ok();
                    w.write_record([
                        d.to_string(),
                        row.x.to_string(),
                        format!("{:.3}", row.r),
                        row.l.to_string(),
                        row.ratio.map(|v| format!("{v:.3}")).unwrap_or_default(),
                        if complete { "ok" } else { "incomplete" }.to_string(),
                    ])?;
                }
            }
        }
        Table::T5 => {
            w.write_record(["d", "norm", "T", "V", "ratio"])?;
            let mut by_d: BTreeMap<u32, Vec<_>> = BTreeMap::new();
            for r in store.ok_results(Task::Abelianize).filter(|r| wanted(opts, r.key.d)) {
                let rep: AbelianizationReport = serde_json::from_value(r.result.clone())?;
                if !rep.level.is_degree_one_prime() || !is_representative(rep.d, rep.norm, &rep.level.generator)? {
                    continue;
                }
                let vol = volume(RingId::new(rep.d)?);
                by_d.entry(rep.d).or_default().push(bv_ratio(&rep, &vol)?);
            }
            for (d, stats) in by_d {
                for s in &stats {
                    w.write_record([d.to_string(), s.norm.to_string(), format!("{:.4}", s.t), format!("{:.4}", s.v), format!("{:.5}", s.ratio)])?;
                }
                if let Some(m) = mean_ratio(&stats) {
                    w.write_record([d.to_string(), "mean".into(), String::new(), String::new(), format!("{m:.6}")])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}
