//! Parameter arithmetic tour: the residue a, partition block count, closing
//! edge/vertex counts, the appearance threshold and the critical length.
//!
//!     cargo run --example params_tour

use tightcycle::{Params, RunConstants};

fn main() {
    println!("{:>4} {:>3} {:>3} {:>3} {:>3} {:>3}", "k", "j", "a", "r", "s", "b");
    for (k, j) in [(3, 2), (4, 2), (5, 2), (5, 3), (6, 4), (7, 4), (9, 5)] {
        let p = Params::derive(2000, k, j).unwrap();
        println!(
            "{:>4} {:>3} {:>3} {:>3} {:>3} {:>3}   batch per edge: {}",
            k,
            j,
            p.a,
            p.r,
            p.s,
            p.b,
            p.batch_size()
        );
    }

    println!();
    let p = Params::derive(2000, 3, 2).unwrap();
    println!("n=2000, k=3, j=2:");
    println!("  appearance threshold p0 = {:.3e}", p.p_zero());
    for c in [2.0, 4.0, 8.0] {
        let l1 = p.l_one(c).unwrap();
        println!(
            "  c={c}: p = {:.3e}, critical length L1 = {:.1} ({:.3} n)",
            c * p.p_zero(),
            l1,
            l1 / p.n as f64
        );
    }

    println!();
    let consts = RunConstants::defaults(&p, 4.0).unwrap();
    let rp = consts.round_probs(&p);
    println!(
        "two-round split at omega={:.1}: p' = {:.3e}, p'' = {:.3e} (sum = p)",
        consts.omega, rp.p_first, rp.p_second
    );
    println!(
        "stops: walk target {} / query cap {:.1e}, fan-out discovery cap {}, stub {}",
        consts.dfs_length_target(&p),
        consts.dfs_query_cap(&p) as f64,
        consts.bfs_discovery_cap(&p),
        consts.log_sq(&p)
    );
}
