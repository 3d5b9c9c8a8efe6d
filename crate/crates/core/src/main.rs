use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use tightcycle::brute::{brute_longest_cycle, brute_longest_path, SmallInstance};
use tightcycle::certificate::{check_certificate, Certificate};
use tightcycle::harness::config::{default_jobs, parse_config};
use tightcycle::harness::plot::plot_curve;
use tightcycle::harness::report::{aggregates_csv, parse_aggregates, results_csv};
use tightcycle::harness::{run_experiment, run_trial, CellConfig, ExperimentConfig, TrialSpec};
use tightcycle::oracle::parse_edge_list;

/// Search laboratory for long j-tight paths and cycles in binomial random
/// k-uniform hypergraphs.
#[derive(Parser)]
#[command(name = "tightcycle", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid from a config file.
    Run {
        /// Config file (see configs/desk.cfg for the format).
        config: PathBuf,
        /// Output directory for CSV, SVG and certificates.
        #[arg(long, default_value = "runs/out")]
        out: PathBuf,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        /// Override the config's base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Print one line per finished trial.
        #[arg(long)]
        verbose: bool,
    },
    /// Run one verbose trial.
    Trial {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        j: u64,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.3)]
        delta: f64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Round-split divisor; defaults to max(8, ln n).
        #[arg(long)]
        omega: Option<f64>,
        /// Comma-separated degree-threshold chain c_0,..,c_{j-1}.
        #[arg(long)]
        c_chain: Option<String>,
        /// Closing-configuration draw budget.
        #[arg(long, default_value_t = 40_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 200_000_000)]
        dfs_budget: u64,
        #[arg(long, default_value_t = 100_000_000)]
        fray_budget: u64,
        /// Debug: force the closing round to probability one.
        #[arg(long)]
        p2_one: bool,
        /// Write the certificate here on success.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Dump the walk trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Dump fan-out snapshots CSV here.
        #[arg(long)]
        snapshots: Option<PathBuf>,
    },
    /// Exact longest path and cycle of a small edge-list instance.
    Bruteforce {
        /// Edge list: one edge per line, space-separated vertex indices.
        file: PathBuf,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        j: u64,
        #[arg(long, default_value_t = tightcycle::brute::DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = tightcycle::brute::DEFAULT_CAP)]
        cap: u64,
    },
    /// Re-verify a cycle certificate.
    Check { file: PathBuf },
    /// Render an aggregates CSV as an SVG curve plot.
    Plot {
        /// Aggregates CSV produced by `run`.
        input: PathBuf,
        #[arg(long, default_value = "plot.svg")]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            config,
            out,
            jobs,
            seed,
            verbose,
        } => cmd_run(&config, &out, jobs, seed, verbose),
        Command::Trial {
            n,
            k,
            j,
            c,
            seed,
            delta,
            eps,
            omega,
            c_chain,
            budget,
            dfs_budget,
            fray_budget,
            p2_one,
            cert,
            trace,
            snapshots,
        } => cmd_trial(TrialArgs {
            n,
            k,
            j,
            c,
            seed,
            delta,
            eps,
            omega,
            c_chain,
            budget,
            dfs_budget,
            fray_budget,
            p2_one,
            cert,
            trace,
            snapshots,
        }),
        Command::Bruteforce {
            file,
            n,
            k,
            j,
            budget,
            cap,
        } => cmd_bruteforce(&file, n, k, j, budget, cap),
        Command::Check { file } => cmd_check(&file),
        Command::Plot { input, out } => cmd_plot(&input, &out),
    }
}

fn cmd_run(
    config: &Path,
    out_dir: &Path,
    jobs: Option<usize>,
    seed: Option<u64>,
    verbose: bool,
) -> Result<()> {
    let text = std::fs::read_to_string(config)
        .with_context(|| format!("reading config {}", config.display()))?;
    let mut cfg = parse_config(&text)?;
    cfg.jobs = jobs.unwrap_or_else(default_jobs);
    if let Some(s) = seed {
        cfg.base_seed = s;
    }
    std::fs::create_dir_all(out_dir)?;
    std::fs::create_dir_all(out_dir.join("certs"))?;

    // Completion-order partial log, flushed per trial; the ordered files
    // are written at the end.
    let partial = std::sync::Mutex::new(std::io::BufWriter::new(
        std::fs::File::create(out_dir.join("results.partial.csv"))?,
    ));
    let progress = |r: &tightcycle::harness::TrialResult| {
        use std::io::Write;
        let mut w = partial.lock().unwrap();
        let _ = writeln!(
            w,
            "cell={} trial={} seed={} stage={} l_p={} l_c={:?} wall_ms={}",
            r.cell,
            r.trial,
            r.seed,
            r.stage.as_str(),
            r.l_p,
            r.l_c,
            r.wall_ms
        );
        let _ = w.flush();
        if verbose {
            eprintln!(
                "cell {} trial {} -> {} (l_c {:?})",
                r.cell,
                r.trial,
                r.stage.as_str(),
                r.l_c
            );
        }
    };

    let res = run_experiment(&cfg, Some(&progress))?;
    std::fs::write(out_dir.join("results.csv"), results_csv(&cfg, &res.rows))?;
    std::fs::write(
        out_dir.join("aggregates.csv"),
        aggregates_csv(&res.aggregates),
    )?;
    std::fs::write(out_dir.join("plot.svg"), plot_curve(&res.aggregates))?;
    let mut certs = 0;
    for r in &res.rows {
        if let Some(cert) = &r.certificate {
            let path = out_dir.join(format!("certs/cell{}_trial{}.cert", r.cell, r.trial));
            std::fs::write(path, cert.render())?;
            certs += 1;
        }
    }
    for a in &res.aggregates {
        println!(
            "cell {} (k={} j={} n={} c={}): certified {}/{} mean L_C/n {:.4} vs curve {:.4}",
            a.cell, a.k, a.j, a.n, a.c, a.certified, a.trials, a.mean_lc_over_n, a.curve
        );
    }
    println!(
        "wrote {}/results.csv, aggregates.csv, plot.svg and {certs} certificates",
        out_dir.display()
    );
    Ok(())
}

struct TrialArgs {
    n: u64,
    k: u64,
    j: u64,
    c: f64,
    seed: u64,
    delta: f64,
    eps: f64,
    omega: Option<f64>,
    c_chain: Option<String>,
    budget: u64,
    dfs_budget: u64,
    fray_budget: u64,
    p2_one: bool,
    cert: Option<PathBuf>,
    trace: Option<PathBuf>,
    snapshots: Option<PathBuf>,
}

fn cmd_trial(a: TrialArgs) -> Result<()> {
    let chain = match &a.c_chain {
        Some(text) => Some(
            text.split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .context("parsing --c-chain")?,
        ),
        None => None,
    };
    let cfg = ExperimentConfig {
        cells: vec![CellConfig {
            k: a.k,
            j: a.j,
            n: a.n,
            c: a.c,
            omega: a.omega,
            dfs_budget: Some(a.dfs_budget),
            fray_budget: Some(a.fray_budget),
            closer_budget: Some(a.budget),
        }],
        trials: 1,
        base_seed: a.seed,
        delta: a.delta,
        eps: a.eps,
        omega: None,
        c_chain: chain,
        p2_forced_one: a.p2_one,
        ..Default::default()
    };
    let mut spec = TrialSpec::from_cell(&cfg, &cfg.cells[0])?;
    spec.record_trace = a.trace.is_some();
    spec.record_snapshots = a.snapshots.is_some();

    let params = spec.params;
    let consts = spec.consts.clone();
    let rp = consts.round_probs(&params);
    println!(
        "n={} k={} j={} (a={} r={} s={} b={}) c={} seed={}",
        params.n, params.k, params.j, params.a, params.r, params.s, params.b, consts.c, a.seed
    );
    println!(
        "p0={:.6e} p={:.6e} split=({:.6e}, {:.6e}) omega={:.2}",
        params.p_zero(),
        rp.p,
        rp.p_first,
        rp.p_second,
        consts.omega
    );
    println!(
        "L1={:.1} long-path target={} core={} stub={} discovery cap={}",
        params.l_one(consts.c)?,
        consts.long_path_target(&params),
        consts.core_path_len(&params),
        consts.log_sq(&params),
        consts.bfs_discovery_cap(&params)
    );

    let r = run_trial(&spec, 0, 0, a.seed);
    println!("stage: {}", r.stage.as_str());
    println!(
        "walk: stop {:?}, length {} ({} queries)",
        r.dfs_stop, r.l_p, r.dfs_queries
    );
    if r.fray_stops[0].is_some() {
        println!(
            "fan-out: stops {:?}, |A|={} |B|={} disjoint pairs {} ({:.3}) heavy {:?} max aug {}",
            r.fray_stops,
            r.family_sizes[0],
            r.family_sizes[1],
            r.disjoint_pairs,
            r.disjoint_fraction,
            r.heavy_count,
            r.max_aug_len
        );
        println!(
            "closing: expected {:.2} closures, {} draws, success={}",
            r.expected_closures, r.closer_attempts, r.closure_success
        );
    }
    if let Some(l) = r.l_c {
        let bound = (1.0 - consts.delta) * params.l_one(consts.c)?;
        println!(
            "cycle length {} >= (1-delta) L1 = {:.1}: {}",
            l,
            bound,
            l as f64 >= bound
        );
    }
    if let Some(f) = &r.failure {
        println!("failure: {f}");
    }
    println!("wall: {} ms", r.wall_ms);
    if let Some(path) = &a.cert {
        match &r.certificate {
            Some(cert) => {
                std::fs::write(path, cert.render())?;
                println!("certificate written to {}", path.display());
            }
            None => println!("no certificate to write"),
        }
    }
    if a.trace.is_some() || a.snapshots.is_some() {
        write_dumps(&spec, a.seed, a.trace.as_deref(), a.snapshots.as_deref())?;
    }
    Ok(())
}

/// Reruns the trial's phases with recording on and dumps the CSVs; the
/// measured trial itself stays lean.
fn write_dumps(
    spec: &TrialSpec,
    seed: u64,
    trace: Option<&Path>,
    snapshots: Option<&Path>,
) -> Result<()> {
    use tightcycle::fray::{fray, stub_seeds, FrayOpts};
    use tightcycle::oracle::EdgeOracle;
    use tightcycle::pathfinder::{run_pathfinder, PathfinderOpts};

    let params = &spec.params;
    let consts = &spec.consts;
    let rp = consts.round_probs(params);
    let mut oracle = EdgeOracle::seeded(params, &[rp.p_first, rp.p_second], seed)?;
    let opts = PathfinderOpts {
        round: 0,
        length_target: consts.long_path_target(params),
        query_budget: consts.dfs_query_cap(params).min(spec.dfs_budget),
        start: None,
        seed,
        record_heads: false,
        record_trace: trace.is_some(),
        track_causes: false,
        complete_heads_on_stop: false,
    };
    let dfs = run_pathfinder(&mut oracle, params, consts, &opts)?;
    if let Some(path) = trace {
        let mut out = String::from("t,len,discovered,max_degree_ratio\n");
        for row in &dfs.trace {
            out.push_str(&format!(
                "{},{},{},{:.6}\n",
                row.t, row.len, row.discovered, row.max_degree_ratio
            ));
        }
        std::fs::write(path, out)?;
        println!("trace written to {}", path.display());
    }
    if let Some(path) = snapshots {
        let mut out = String::from("t,active,explored,newest_generation\n");
        if dfs.path.length() > 2 * consts.log_sq(params) {
            if let Ok((_, [(seeds_a, _), _])) = stub_seeds(params, consts, &dfs.path) {
                let run = fray(
                    &mut oracle,
                    params,
                    consts,
                    &dfs.path,
                    &seeds_a,
                    &[],
                    &FrayOpts {
                        round: 0,
                        query_budget: spec.fray_budget,
                        record_snapshots: true,
                    },
                )?;
                for row in &run.snapshots {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        row.t, row.active, row.explored, row.newest_generation
                    ));
                }
            }
        }
        std::fs::write(path, out)?;
        println!("snapshots written to {}", path.display());
    }
    Ok(())
}

fn cmd_bruteforce(file: &Path, n: u64, k: u64, j: u64, budget: u64, cap: u64) -> Result<()> {
    let text = std::fs::read_to_string(file)
        .with_context(|| format!("reading edge list {}", file.display()))?;
    let edges = parse_edge_list(&text, n, k)?;
    let inst = SmallInstance::new(n, k, j, edges, cap)?;
    println!(
        "{} edges on {} vertices (k={}, j={})",
        inst.edges.len(),
        n,
        k,
        j
    );
    let lp = brute_longest_path(&inst, budget)?;
    println!("longest path: {lp}");
    match brute_longest_cycle(&inst, budget)? {
        Some(lc) => println!("longest cycle: {lc}"),
        None => println!("longest cycle: none"),
    }
    Ok(())
}

fn cmd_check(file: &Path) -> Result<()> {
    let text = std::fs::read_to_string(file)
        .with_context(|| format!("reading certificate {}", file.display()))?;
    let cert = Certificate::parse(&text)?;
    match check_certificate(&cert) {
        Ok(report) => {
            println!(
                "valid: cycle of length {} (bound (1-delta) L1 = {:.2}, cleared: {})",
                report.length, report.bound, report.clears_bound
            );
            Ok(())
        }
        Err(e) => {
            println!("INVALID: {e}");
            bail!("certificate check failed: {e}");
        }
    }
}

fn cmd_plot(input: &Path, out: &Path) -> Result<()> {
    let text = std::fs::read_to_string(input)
        .with_context(|| format!("reading aggregates {}", input.display()))?;
    let aggs = parse_aggregates(&text)?;
    std::fs::write(out, plot_curve(&aggs))?;
    println!("wrote {} ({} cells)", out.display(), aggs.len());
    Ok(())
}
