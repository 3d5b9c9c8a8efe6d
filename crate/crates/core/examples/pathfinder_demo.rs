//! One depth-first walk at desk scale: watch the path race to its target
//! and compare explored ends' child counts with the branching heuristic
//! (1 - l (k-j) / n)^(k-j) * c.
//!
//!     cargo run --release --example pathfinder_demo

use tightcycle::oracle::EdgeOracle;
use tightcycle::pathfinder::{run_pathfinder, PathfinderOpts};
use tightcycle::{Params, RunConstants};

fn main() {
    let (n, c) = (3000u64, 4.0);
    let p = Params::derive(n, 3, 2).unwrap();
    let consts = RunConstants::defaults(&p, c).unwrap();
    let prob = c * p.p_zero();
    let mut oracle = EdgeOracle::seeded(&p, &[prob], 7).unwrap();

    let opts = PathfinderOpts {
        round: 0,
        length_target: u64::MAX, // let the walk churn past criticality
        query_budget: 4_000_000,
        start: None,
        seed: 7,
        record_heads: true,
        record_trace: false,
        track_causes: false,
        complete_heads_on_stop: false,
    };
    let out = run_pathfinder(&mut oracle, &p, &consts, &opts).unwrap();
    println!(
        "stop {:?}: longest path {} (L1 = {:.0}), {} queries, {} discovered, {} new starts",
        out.stop,
        out.path.length(),
        p.l_one(c).unwrap(),
        out.queries,
        out.discovered,
        out.new_starts
    );
    println!("no k-set queried twice: memo hits = {}", oracle.memo_hit_count(0));

    // Children per explored end, binned by activation length.
    let bin = 250u64;
    let mut sums: std::collections::BTreeMap<u64, (f64, u64)> = Default::default();
    for h in &out.head_records {
        let e = sums.entry(h.activation_len / bin).or_insert((0.0, 0));
        e.0 += h.children_edges as f64;
        e.1 += 1;
    }
    println!("\n{:>12} {:>8} {:>10} {:>10}", "length bin", "ends", "mean kids", "heuristic");
    for (b, (sum, cnt)) in sums {
        if cnt < 50 {
            continue;
        }
        let mid = (b * bin + bin / 2) as f64;
        let heuristic = (1.0 - mid / n as f64) * c;
        println!(
            "{:>6}-{:<5} {:>8} {:>10.3} {:>10.3}",
            b * bin,
            (b + 1) * bin,
            cnt,
            sum / cnt as f64,
            heuristic
        );
    }
}
