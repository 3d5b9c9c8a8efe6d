//! Exhaustive ground truth on small instances, and the dominance check
//! against the search pipeline on a replayed instance.
//!
//!     cargo run --example brute_demo

use tightcycle::brute::{brute_longest_cycle, brute_longest_path, SmallInstance, DEFAULT_BUDGET};
use tightcycle::oracle::EdgeOracle;
use tightcycle::pathfinder::{run_pathfinder, PathfinderOpts};
use tightcycle::util::SplitMix64;
use tightcycle::{Params, RunConstants};

fn main() {
    // Complete instance: the tight Hamilton cycle.
    let complete = SmallInstance::complete(8, 3, 2).unwrap();
    println!(
        "complete n=8: longest path {}, longest cycle {:?}",
        brute_longest_path(&complete, DEFAULT_BUDGET).unwrap(),
        brute_longest_cycle(&complete, DEFAULT_BUDGET).unwrap()
    );

    // A random half-density instance, searched exactly and by the walk.
    let n = 9u64;
    let params = Params::derive(n, 3, 2).unwrap();
    let mut rng = SplitMix64::new(99);
    let mut edges = Vec::new();
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            for c in b + 1..n as u32 {
                if rng.unit_f64() < 0.5 {
                    edges.push(vec![a, b, c]);
                }
            }
        }
    }
    let inst = SmallInstance::new(n, 3, 2, edges.clone(), 12).unwrap();
    let exact_path = brute_longest_path(&inst, DEFAULT_BUDGET).unwrap();
    let exact_cycle = brute_longest_cycle(&inst, DEFAULT_BUDGET).unwrap();
    println!(
        "random n=9 (p=0.5, {} edges): exact path {}, exact cycle {:?}",
        inst.edges.len(),
        exact_path,
        exact_cycle
    );

    let consts = RunConstants::new(0.6, 0.5, vec![1.9, 1.99], 8.0, 4.0).unwrap();
    let mut oracle = EdgeOracle::replay(&edges, n, 3, 1).unwrap();
    let opts = PathfinderOpts {
        round: 0,
        length_target: u64::MAX,
        query_budget: 1_000_000,
        start: None,
        seed: 5,
        record_heads: false,
        record_trace: false,
        track_causes: false,
        complete_heads_on_stop: false,
    };
    let walk = run_pathfinder(&mut oracle, &params, &consts, &opts).unwrap();
    println!(
        "walk on the same instance: {} <= {} (dominance holds: {})",
        walk.path.length(),
        exact_path,
        walk.path.length() <= exact_path
    );
}
