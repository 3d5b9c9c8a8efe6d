//! Seeded experiment orchestration: one trial runs the full pipeline
//! (depth-first long path on round one, family fan-out, second-round
//! closing); an experiment sweeps a parameter grid with independent seeds
//! per trial and aggregates per cell.

pub mod config;
pub mod plot;
pub mod report;

use crate::certificate::{CertMode, Certificate};
use crate::closer::{expected_closures, try_close};
use crate::fray::{build_family, FamilyFailure, FamilyOpts, FrayStop};
use crate::oracle::{EdgeOracle, PHASE_CHECK, PHASE_CLOSER, PHASE_DFS};
use crate::params::{ParamError, Params, RunConstants};
use crate::path::validate_path;
use crate::pathfinder::{run_pathfinder, DfsStop, HeadRecord, PathfinderOpts};
use crate::util::binom_f64;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

pub use config::{CellConfig, ExperimentConfig};

/// How far a trial got before stopping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialStage {
    /// Rejected before any query (e.g. the target exceeds the vertex pool).
    Config,
    /// The round-one walk missed the long-path target.
    LongPath,
    /// A fan-out run missed its discovery cap.
    Family,
    /// The family was built but no closing configuration succeeded.
    Close,
    /// A validated cycle was certified.
    Certified,
}

impl TrialStage {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrialStage::Config => "config",
            TrialStage::LongPath => "long_path",
            TrialStage::Family => "family",
            TrialStage::Close => "close",
            TrialStage::Certified => "certified",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrialResult {
    pub cell: usize,
    pub trial: u64,
    pub seed: u64,
    pub stage: TrialStage,
    pub dfs_stop: Option<DfsStop>,
    /// Longest round-one path found.
    pub l_p: u64,
    pub fray_stops: [Option<FrayStop>; 2],
    pub family_sizes: [u64; 2],
    pub disjoint_pairs: u64,
    pub disjoint_fraction: f64,
    pub meets_disjointness: bool,
    pub max_aug_len: u64,
    pub heavy_count: Option<u64>,
    pub closure_success: bool,
    pub l_c: Option<u64>,
    pub expected_closures: f64,
    pub dfs_queries: u64,
    pub fray_queries: [u64; 2],
    pub closer_attempts: u64,
    pub max_degree_ratio: f64,
    pub phase_repeats: u64,
    pub batch_violations: u64,
    pub child_collisions: u64,
    pub validated: bool,
    pub failure: Option<String>,
    pub wall_ms: u64,
    pub certificate: Option<Certificate>,
}

impl TrialResult {
    fn blank(cell: usize, trial: u64, seed: u64) -> TrialResult {
        TrialResult {
            cell,
            trial,
            seed,
            stage: TrialStage::Config,
            dfs_stop: None,
            l_p: 0,
            fray_stops: [None, None],
            family_sizes: [0, 0],
            disjoint_pairs: 0,
            disjoint_fraction: 0.0,
            meets_disjointness: false,
            max_aug_len: 0,
            heavy_count: None,
            closure_success: false,
            l_c: None,
            expected_closures: 0.0,
            dfs_queries: 0,
            fray_queries: [0, 0],
            closer_attempts: 0,
            max_degree_ratio: 0.0,
            phase_repeats: 0,
            batch_violations: 0,
            child_collisions: 0,
            validated: true,
            failure: None,
            wall_ms: 0,
            certificate: None,
        }
    }

    pub fn lc_over_n(&self, n: u64) -> Option<f64> {
        self.l_c.map(|l| l as f64 / n as f64)
    }
}

/// Everything a single trial needs, resolved from the experiment config.
#[derive(Debug, Clone)]
pub struct TrialSpec {
    pub params: Params,
    pub consts: RunConstants,
    pub dfs_budget: u64,
    pub fray_budget: u64,
    pub closer_budget: u64,
    /// Debug: force the closing round to probability one.
    pub p2_forced_one: bool,
    pub record_trace: bool,
    pub record_snapshots: bool,
}

impl TrialSpec {
    pub fn from_cell(cfg: &ExperimentConfig, cell: &CellConfig) -> Result<TrialSpec, ParamError> {
        let params = Params::derive(cell.n, cell.k, cell.j)?;
        if cell.j < 2 {
            return Err(ParamError::BadConstants(
                "experiment cells need tightness j >= 2".into(),
            ));
        }
        if cell.c <= 1.0 {
            return Err(ParamError::SubcriticalC(cell.c));
        }
        let consts = RunConstants::with_overrides(
            &params,
            cell.c,
            Some(cfg.delta),
            Some(cfg.eps),
            cell.omega.or(cfg.omega),
            cfg.c_chain.clone(),
        )?;
        consts.check_chain(&params)?;
        Ok(TrialSpec {
            params,
            consts,
            dfs_budget: cell.dfs_budget.unwrap_or(cfg.dfs_budget),
            fray_budget: cell.fray_budget.unwrap_or(cfg.fray_budget),
            closer_budget: cell.closer_budget.unwrap_or(cfg.closer_budget),
            p2_forced_one: cfg.p2_forced_one,
            record_trace: false,
            record_snapshots: false,
        })
    }
}

/// Runs the full pipeline once. Deterministic in (spec, seed); every
/// reported structure is validated before it is recorded.
pub fn run_trial(spec: &TrialSpec, cell: usize, trial: u64, seed: u64) -> TrialResult {
    let start = Instant::now();
    let mut out = TrialResult::blank(cell, trial, seed);
    let params = &spec.params;
    let consts = &spec.consts;

    let rp = consts.round_probs(params);
    let p_second = if spec.p2_forced_one { 1.0 } else { rp.p_second };
    let round_probs = vec![rp.p_first, p_second];

    let target = consts.long_path_target(params);
    if params.path_vertices(target) > params.n {
        out.failure = Some(format!(
            "long-path target {target} needs {} vertices, have {}",
            params.path_vertices(target),
            params.n
        ));
        out.wall_ms = start.elapsed().as_millis() as u64;
        return out;
    }

    let mut oracle = match EdgeOracle::seeded(params, &round_probs, seed) {
        Ok(o) => o,
        Err(e) => {
            out.failure = Some(e.to_string());
            return out;
        }
    };

    // Round-one walk to the long-path target.
    oracle.set_phase(PHASE_DFS);
    let dfs_opts = PathfinderOpts {
        round: 0,
        length_target: target,
        query_budget: consts.dfs_query_cap(params).min(spec.dfs_budget),
        start: None,
        seed,
        record_heads: false,
        record_trace: spec.record_trace,
        track_causes: false,
        complete_heads_on_stop: false,
    };
    let dfs = match run_pathfinder(&mut oracle, params, consts, &dfs_opts) {
        Ok(o) => o,
        Err(e) => {
            out.failure = Some(format!("walk error: {e}"));
            out.wall_ms = start.elapsed().as_millis() as u64;
            return out;
        }
    };
    out.dfs_stop = Some(dfs.stop);
    out.l_p = dfs.path.length();
    out.dfs_queries = dfs.queries;
    out.batch_violations += dfs.batch_violations;
    out.max_degree_ratio = out.max_degree_ratio.max(dfs.max_degree_ratio);
    oracle.set_phase(PHASE_CHECK);
    if !validate_path(params, dfs.path.vertices(), |w| oracle.query_canonical(w, 0)) {
        out.validated = false;
        out.failure = Some("round-one path failed validation".into());
        out.wall_ms = start.elapsed().as_millis() as u64;
        return out;
    }
    out.stage = TrialStage::LongPath;
    if dfs.stop != DfsStop::LengthReached {
        out.failure = Some(format!("long-path stop {:?}", dfs.stop));
        out.phase_repeats = oracle.search_phase_repeats();
        out.wall_ms = start.elapsed().as_millis() as u64;
        return out;
    }

    // Fan both stubs out into the augmenting family.
    let family_opts = FamilyOpts {
        round: 0,
        query_budget: spec.fray_budget,
        record_snapshots: spec.record_snapshots,
    };
    let family = match build_family(&mut oracle, params, consts, &dfs.path, &family_opts) {
        Ok(f) => f,
        Err(err) => {
            match &err {
                FamilyFailure::Run { which, stop } => {
                    out.fray_stops[(*which - 1) as usize] = Some(*stop);
                    if *which == 2 {
                        // Run 1 must have hit its cap to get this far.
                        out.fray_stops[0] = Some(FrayStop::DiscoveryCap);
                    }
                }
                FamilyFailure::TooManyHeavy { count, .. } => {
                    out.heavy_count = Some(*count);
                    out.fray_stops[0] = Some(FrayStop::DiscoveryCap);
                }
                _ => {}
            }
            out.stage = TrialStage::Family;
            out.failure = Some(err.to_string());
            out.phase_repeats = oracle.search_phase_repeats();
            out.wall_ms = start.elapsed().as_millis() as u64;
            return out;
        }
    };
    out.stage = TrialStage::Family;
    out.fray_stops = [Some(family.side_a.stop), Some(family.side_b.stop)];
    out.family_sizes = [
        family.side_a.ends.len() as u64,
        family.side_b.ends.len() as u64,
    ];
    out.fray_queries = [family.side_a.queries, family.side_b.queries];
    out.disjoint_pairs = family.disjoint_pairs;
    out.disjoint_fraction = family.disjoint_fraction();
    out.meets_disjointness = family.meets_disjointness_target;
    out.heavy_count = Some(family.heavy.len() as u64);
    out.max_aug_len = family
        .side_a
        .ends
        .iter()
        .chain(family.side_b.ends.iter())
        .map(|e| e.aug_len)
        .max()
        .unwrap_or(0);
    // Junction choices multiply the admissible pairs when b > 0.
    let junction_choices = if params.b > 0 {
        binom_f64(params.n - params.path_vertices(out.l_p), params.b)
    } else {
        1.0
    };
    out.expected_closures = expected_closures(
        family.disjoint_pairs as f64 * junction_choices,
        params,
        p_second,
    );

    // Second-round closing.
    oracle.set_phase(PHASE_CLOSER);
    let close = match try_close(
        &family,
        &mut oracle,
        params,
        consts,
        spec.closer_budget,
        seed,
        1,
    ) {
        Ok(c) => c,
        Err(e) => {
            out.failure = Some(format!("closer error: {e}"));
            out.phase_repeats = oracle.search_phase_repeats();
            out.wall_ms = start.elapsed().as_millis() as u64;
            return out;
        }
    };
    out.stage = TrialStage::Close;
    out.closer_attempts = close.attempts;
    match close.cycle {
        Some(cycle) => {
            out.closure_success = true;
            out.l_c = Some(cycle.length());
            out.stage = TrialStage::Certified;
            out.certificate = Some(Certificate {
                n: params.n,
                k: params.k,
                j: params.j,
                c: consts.c,
                delta: consts.delta,
                mode: CertMode::Seeded {
                    seed,
                    round_probs: round_probs.clone(),
                },
                cycle: cycle.vertices().to_vec(),
            });
        }
        None => {
            out.failure = Some(format!(
                "no closing configuration in {} draws",
                close.attempts
            ));
        }
    }
    out.phase_repeats = oracle.search_phase_repeats();
    out.wall_ms = start.elapsed().as_millis() as u64;
    out
}

/// Per-cell summary over its trials.
#[derive(Debug, Clone)]
pub struct CellAggregate {
    pub cell: usize,
    pub k: u64,
    pub j: u64,
    pub n: u64,
    pub c: f64,
    pub trials: u64,
    pub certified: u64,
    pub success_rate: f64,
    /// Mean and population stddev of L_C / n over certified trials.
    pub mean_lc_over_n: f64,
    pub std_lc_over_n: f64,
    /// The closed-form curve (1 - c^(-1/(k-j))) / (k-j).
    pub curve: f64,
    pub mean_lp_over_n: f64,
    pub mean_disjoint_fraction: f64,
    pub mean_heavy: f64,
    pub mean_degree_ratio: f64,
}

pub fn aggregate_cell(
    cell: usize,
    cfg_cell: &CellConfig,
    rows: &[&TrialResult],
) -> CellAggregate {
    let trials = rows.len() as u64;
    let certified: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.lc_over_n(cfg_cell.n))
        .collect();
    let mean = |xs: &[f64]| {
        if xs.is_empty() {
            0.0
        } else {
            xs.iter().sum::<f64>() / xs.len() as f64
        }
    };
    let m = mean(&certified);
    let var = if certified.is_empty() {
        0.0
    } else {
        certified.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / certified.len() as f64
    };
    let kj = (cfg_cell.k - cfg_cell.j) as f64;
    CellAggregate {
        cell,
        k: cfg_cell.k,
        j: cfg_cell.j,
        n: cfg_cell.n,
        c: cfg_cell.c,
        trials,
        certified: certified.len() as u64,
        success_rate: if trials == 0 {
            0.0
        } else {
            certified.len() as f64 / trials as f64
        },
        mean_lc_over_n: m,
        std_lc_over_n: var.sqrt(),
        curve: (1.0 - cfg_cell.c.powf(-1.0 / kj)) / kj,
        mean_lp_over_n: mean(
            &rows
                .iter()
                .map(|r| r.l_p as f64 / cfg_cell.n as f64)
                .collect::<Vec<_>>(),
        ),
        mean_disjoint_fraction: mean(
            &rows
                .iter()
                .filter(|r| r.family_sizes[0] > 0)
                .map(|r| r.disjoint_fraction)
                .collect::<Vec<_>>(),
        ),
        mean_heavy: mean(
            &rows
                .iter()
                .filter_map(|r| r.heavy_count.map(|h| h as f64))
                .collect::<Vec<_>>(),
        ),
        mean_degree_ratio: mean(
            &rows
                .iter()
                .map(|r| r.max_degree_ratio)
                .collect::<Vec<_>>(),
        ),
    }
}

#[derive(Debug)]
pub struct ExperimentResults {
    pub rows: Vec<TrialResult>,
    pub aggregates: Vec<CellAggregate>,
}

/// Runs every (cell, trial) pair, in parallel across worker threads, with
/// trial seeds base_seed + trial index. Rows come back in (cell, trial)
/// order regardless of scheduling.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    on_done: Option<&(dyn Fn(&TrialResult) + Sync)>,
) -> Result<ExperimentResults, ParamError> {
    let mut specs = Vec::with_capacity(cfg.cells.len());
    for cell in &cfg.cells {
        specs.push(TrialSpec::from_cell(cfg, cell)?);
    }
    let work: Vec<(usize, u64)> = (0..cfg.cells.len())
        .flat_map(|ci| (0..cfg.trials).map(move |t| (ci, t)))
        .collect();
    let results: Mutex<Vec<Option<TrialResult>>> = Mutex::new(vec![None; work.len()]);
    let next = AtomicUsize::new(0);
    let jobs = cfg.jobs.max(1).min(work.len().max(1));

    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= work.len() {
                    break;
                }
                let (ci, t) = work[i];
                let r = run_trial(&specs[ci], ci, t, cfg.base_seed + t);
                if let Some(cb) = on_done {
                    cb(&r);
                }
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });

    let rows: Vec<TrialResult> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("worker filled every slot"))
        .collect();
    let aggregates = (0..cfg.cells.len())
        .map(|ci| {
            let cell_rows: Vec<&TrialResult> = rows.iter().filter(|r| r.cell == ci).collect();
            aggregate_cell(ci, &cfg.cells[ci], &cell_rows)
        })
        .collect();
    Ok(ExperimentResults { rows, aggregates })
}

/// Pools fully-explored ends from repeated single-round walks until at
/// least `min_explored` are collected, for branching-rate checks. The walk
/// runs with no length stop so explored ends carry unbiased child counts.
pub fn branching_probe(
    n: u64,
    k: u64,
    j: u64,
    c: f64,
    base_seed: u64,
    query_budget: u64,
    min_explored: usize,
) -> Result<Vec<HeadRecord>, ParamError> {
    let params = Params::derive(n, k, j)?;
    let consts = RunConstants::defaults(&params, c)?;
    let p = c * params.p_zero();
    let mut records = Vec::new();
    let mut seed = base_seed;
    while records.len() < min_explored && seed < base_seed + 16 {
        let mut oracle = EdgeOracle::seeded(&params, &[p], seed)
            .map_err(|e| ParamError::BadConstants(e.to_string()))?;
        let opts = PathfinderOpts {
            round: 0,
            length_target: u64::MAX,
            query_budget,
            start: None,
            seed,
            record_heads: true,
            record_trace: false,
            track_causes: false,
            complete_heads_on_stop: true,
        };
        let out = run_pathfinder(&mut oracle, &params, &consts, &opts)
            .map_err(|e| ParamError::BadConstants(e.to_string()))?;
        records.extend(out.head_records);
        seed += 1;
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            cells: vec![CellConfig {
                k: 3,
                j: 2,
                n: 300,
                c: 8.0,
                omega: Some(10.0),
                dfs_budget: None,
                fray_budget: None,
                closer_budget: None,
            }],
            trials: 2,
            base_seed: 91,
            delta: 0.8,
            eps: 0.05,
            omega: None,
            c_chain: None,
            dfs_budget: 400_000,
            fray_budget: 400_000,
            closer_budget: 400_000,
            p2_forced_one: false,
            jobs: 2,
        }
    }

    #[test]
    fn trial_is_deterministic() {
        let cfg = small_config();
        let spec = TrialSpec::from_cell(&cfg, &cfg.cells[0]).unwrap();
        let a = run_trial(&spec, 0, 0, 91);
        let b = run_trial(&spec, 0, 0, 91);
        assert_eq!(a.stage, b.stage);
        assert_eq!(a.l_p, b.l_p);
        assert_eq!(a.l_c, b.l_c);
        assert_eq!(a.dfs_queries, b.dfs_queries);
        assert_eq!(a.closer_attempts, b.closer_attempts);
        assert_eq!(a.certificate, b.certificate);
    }

    #[test]
    fn small_cell_certifies_cycles() {
        // Dense small instance: the full pipeline should reach
        // certification on most seeds.
        let cfg = small_config();
        let res = run_experiment(&cfg, None).unwrap();
        assert_eq!(res.rows.len(), 2);
        let agg = &res.aggregates[0];
        assert!(agg.certified >= 1, "rows: {:?}", res.rows.iter().map(|r| (r.stage, r.failure.clone())).collect::<Vec<_>>());
        for row in &res.rows {
            assert_eq!(row.phase_repeats, 0);
            assert_eq!(row.batch_violations, 0);
            assert!(row.validated);
            if let Some(cert) = &row.certificate {
                let report = crate::certificate::check_certificate(cert).unwrap();
                assert_eq!(Some(report.length), row.l_c);
            }
        }
    }

    #[test]
    fn rejects_subcritical_and_low_tightness_cells() {
        let mut cfg = small_config();
        cfg.cells[0].c = 0.9;
        assert!(TrialSpec::from_cell(&cfg, &cfg.cells[0]).is_err());
        let mut cfg = small_config();
        cfg.cells[0].j = 1;
        assert!(TrialSpec::from_cell(&cfg, &cfg.cells[0]).is_err());
    }

    #[test]
    fn forced_second_round_closes_whenever_family_succeeds() {
        let mut cfg = small_config();
        cfg.p2_forced_one = true;
        cfg.trials = 3;
        let res = run_experiment(&cfg, None).unwrap();
        for row in &res.rows {
            if row.fray_stops[1] == Some(FrayStop::DiscoveryCap) && row.disjoint_pairs > 0 {
                assert!(row.closure_success, "failure: {:?}", row.failure);
            }
        }
    }
}
