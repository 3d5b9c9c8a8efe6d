//! Fixed-schema CSV output. The first line names the schema and version;
//! the second is the header. `wall_ms` is the one column excluded from the
//! byte-for-byte determinism contract.

use super::{CellAggregate, ExperimentConfig, TrialResult};
use crate::fray::FrayStop;
use crate::pathfinder::DfsStop;
use thiserror::Error;

pub const RESULTS_SCHEMA: &str = "schema,tightcycle-results,1";
pub const AGGREGATES_SCHEMA: &str = "schema,tightcycle-aggregates,1";

pub const RESULTS_HEADER: &str = "cell,k,j,n,c,trial,seed,stage,dfs_stop,l_p,fray1_stop,\
fray2_stop,family_a,family_b,disjoint_pairs,disjoint_fraction,max_aug_len,heavy,closure,l_c,\
lc_over_n,expected_closures,dfs_queries,fray1_queries,fray2_queries,closer_attempts,\
max_degree_ratio,phase_repeats,batch_violations,failure,wall_ms";

pub const AGGREGATES_HEADER: &str = "cell,k,j,n,c,trials,certified,success_rate,\
mean_lc_over_n,std_lc_over_n,curve,mean_lp_over_n,mean_disjoint_fraction,mean_heavy,\
mean_degree_ratio";

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("not a {0} file")]
    WrongSchema(&'static str),
}

fn dfs_stop_str(s: Option<DfsStop>) -> String {
    match s {
        None => "-".into(),
        Some(DfsStop::LengthReached) => "length".into(),
        Some(DfsStop::QueryBudget) => "budget".into(),
        Some(DfsStop::DegreeThreshold(i)) => format!("deg{i}"),
        Some(DfsStop::Exhausted) => "exhausted".into(),
    }
}

fn fray_stop_str(s: Option<FrayStop>) -> String {
    match s {
        None => "-".into(),
        Some(FrayStop::QueueEmpty) => "s1".into(),
        Some(FrayStop::LengthCap) => "s2".into(),
        Some(FrayStop::DegreeThreshold(i)) => format!("s3_{i}"),
        Some(FrayStop::DiscoveryCap) => "s4".into(),
        Some(FrayStop::QueryBudget) => "budget".into(),
    }
}

pub fn results_csv(cfg: &ExperimentConfig, rows: &[TrialResult]) -> String {
    let mut out = String::new();
    out.push_str(RESULTS_SCHEMA);
    out.push('\n');
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for r in rows {
        let cell = &cfg.cells[r.cell];
        let failure = r
            .failure
            .as_deref()
            .unwrap_or("-")
            .replace(',', ";")
            .replace('\n', " ");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.6},{},{},{},{},{},{:.6e},{},{},{},{},{:.6},{},{},{},{}\n",
            r.cell,
            cell.k,
            cell.j,
            cell.n,
            fmt_f64(cell.c),
            r.trial,
            r.seed,
            r.stage.as_str(),
            dfs_stop_str(r.dfs_stop),
            r.l_p,
            fray_stop_str(r.fray_stops[0]),
            fray_stop_str(r.fray_stops[1]),
            r.family_sizes[0],
            r.family_sizes[1],
            r.disjoint_pairs,
            r.disjoint_fraction,
            r.max_aug_len,
            r.heavy_count.map_or("-".into(), |h| h.to_string()),
            if r.closure_success { 1 } else { 0 },
            r.l_c.map_or("-".into(), |l| l.to_string()),
            r.lc_over_n(cell.n)
                .map_or("-".into(), |x| format!("{x:.6}")),
            r.expected_closures,
            r.dfs_queries,
            r.fray_queries[0],
            r.fray_queries[1],
            r.closer_attempts,
            r.max_degree_ratio,
            r.phase_repeats,
            r.batch_violations,
            failure,
            r.wall_ms,
        ));
    }
    out
}

pub fn aggregates_csv(aggs: &[CellAggregate]) -> String {
    let mut out = String::new();
    out.push_str(AGGREGATES_SCHEMA);
    out.push('\n');
    out.push_str(AGGREGATES_HEADER);
    out.push('\n');
    for a in aggs {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.3},{:.6}\n",
            a.cell,
            a.k,
            a.j,
            a.n,
            fmt_f64(a.c),
            a.trials,
            a.certified,
            a.success_rate,
            a.mean_lc_over_n,
            a.std_lc_over_n,
            a.curve,
            a.mean_lp_over_n,
            a.mean_disjoint_fraction,
            a.mean_heavy,
            a.mean_degree_ratio,
        ));
    }
    out
}

fn fmt_f64(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{x:.1}")
    } else {
        format!("{x}")
    }
}

/// Reads back an aggregates file for plotting.
pub fn parse_aggregates(text: &str) -> Result<Vec<CellAggregate>, ReportError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim() == AGGREGATES_SCHEMA => {}
        _ => return Err(ReportError::WrongSchema("tightcycle-aggregates")),
    }
    match lines.next() {
        Some((_, h)) if h.trim() == AGGREGATES_HEADER => {}
        _ => return Err(ReportError::WrongSchema("tightcycle-aggregates")),
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != 15 {
            return Err(ReportError::Parse(
                idx + 1,
                format!("expected 15 fields, got {}", toks.len()),
            ));
        }
        let f = |i: usize| -> Result<f64, ReportError> {
            toks[i]
                .parse()
                .map_err(|_| ReportError::Parse(idx + 1, format!("bad number {:?}", toks[i])))
        };
        let u = |i: usize| -> Result<u64, ReportError> {
            toks[i]
                .parse()
                .map_err(|_| ReportError::Parse(idx + 1, format!("bad integer {:?}", toks[i])))
        };
        out.push(CellAggregate {
            cell: u(0)? as usize,
            k: u(1)?,
            j: u(2)?,
            n: u(3)?,
            c: f(4)?,
            trials: u(5)?,
            certified: u(6)?,
            success_rate: f(7)?,
            mean_lc_over_n: f(8)?,
            std_lc_over_n: f(9)?,
            curve: f(10)?,
            mean_lp_over_n: f(11)?,
            mean_disjoint_fraction: f(12)?,
            mean_heavy: f(13)?,
            mean_degree_ratio: f(14)?,
        });
    }
    Ok(out)
}
