//! Fan a long path's ends out into an augmenting family: stub seeds, two
//! breadth-first runs, heavy vertices, and the disjoint-pair count.
//!
//!     cargo run --release --example family_demo

use tightcycle::fray::{build_family, FamilyOpts};
use tightcycle::oracle::EdgeOracle;
use tightcycle::pathfinder::{run_pathfinder, PathfinderOpts};
use tightcycle::{Params, RunConstants};

fn main() {
    let p = Params::derive(500, 3, 2).unwrap();
    let consts =
        RunConstants::with_overrides(&p, 8.0, Some(0.6), Some(0.05), Some(20.0), None).unwrap();
    let rp = consts.round_probs(&p);
    let mut oracle = EdgeOracle::seeded(&p, &[rp.p_first, rp.p_second], 33).unwrap();

    let target = consts.long_path_target(&p);
    println!(
        "long-path target {} = core {} + 2 x stub {}",
        target,
        consts.core_path_len(&p),
        consts.log_sq(&p)
    );
    let mut opts = PathfinderOpts::standard(&p, &consts, 33);
    opts.length_target = target;
    let dfs = run_pathfinder(&mut oracle, &p, &consts, &opts).unwrap();
    println!("walk: {:?} at length {}", dfs.stop, dfs.path.length());

    let family = build_family(
        &mut oracle,
        &p,
        &consts,
        &dfs.path,
        &FamilyOpts::default(),
    )
    .expect("family construction");
    println!(
        "family: |A| = {}, |B| = {} (discovery cap {})",
        family.side_a.ends.len(),
        family.side_b.ends.len(),
        consts.bfs_discovery_cap(&p)
    );
    println!(
        "heavy vertices excluded in run 2: {} (threshold {} containing paths)",
        family.heavy.len(),
        consts.heavy_threshold(&p)
    );
    println!(
        "disjoint pairs: {} of {} ({:.3}); meets the 1-eps target: {}",
        family.disjoint_pairs,
        family.pair_count(),
        family.disjoint_fraction(),
        family.meets_disjointness_target
    );
    let max_aug = family
        .side_a
        .ends
        .iter()
        .chain(family.side_b.ends.iter())
        .map(|e| e.aug_len)
        .max()
        .unwrap();
    println!(
        "every stored augmenting path extends the core by <= {} (cap {})",
        max_aug,
        2 * consts.log_sq(&p)
    );
    let gen_max = family
        .side_a
        .ends
        .iter()
        .map(|e| e.generation)
        .max()
        .unwrap();
    println!("deepest side-A generation: {gen_max}");
}
