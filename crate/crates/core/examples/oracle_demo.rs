//! The lazily revealed hypergraph: keyed Bernoulli draws, memoized rounds,
//! order-independent determinism, and the empirical edge frequency.
//!
//!     cargo run --example oracle_demo

use tightcycle::oracle::EdgeOracle;
use tightcycle::util::CombCursor;
use tightcycle::Params;

fn main() {
    let p = Params::derive(40, 3, 2).unwrap();
    let prob = 0.1;
    let mut oracle = EdgeOracle::seeded(&p, &[prob], 2024).unwrap();

    // Every k-set on 40 vertices, queried once.
    let pool: Vec<u32> = (0..40).collect();
    let mut cursor = CombCursor::new(pool.len(), 3);
    let mut kset = vec![0u32; 3];
    let mut hits = 0u64;
    let mut total = 0u64;
    while cursor.next_into(&pool, &mut kset) {
        total += 1;
        if oracle.query(&kset, 0).unwrap() {
            hits += 1;
        }
    }
    println!(
        "single round at p={prob}: {hits}/{total} edges ({:.4})",
        hits as f64 / total as f64
    );
    println!(
        "distinct k-sets sampled: {} (memo hits {})",
        oracle.query_count(0),
        oracle.memo_hit_count(0)
    );

    // Re-querying returns memoized answers and leaves the counter alone.
    let before = oracle.query_count(0);
    let a = oracle.query(&[5, 6, 7], 0).unwrap();
    let b = oracle.query(&[7, 6, 5], 0).unwrap();
    assert_eq!(a, b);
    assert_eq!(oracle.query_count(0), before);
    println!("repeat query: same answer, counter unchanged");

    // Two rounds reveal extra edges; the union stays below the sum.
    let mut two = EdgeOracle::seeded(&p, &[0.08, 0.02], 2024).unwrap();
    let mut cursor = CombCursor::new(pool.len(), 3);
    let mut cum = 0u64;
    while cursor.next_into(&pool, &mut kset) {
        if two.query(&kset, 1).unwrap() {
            cum += 1;
        }
    }
    println!(
        "two rounds (0.08 then 0.02): cumulative frequency {:.4} <= 0.1",
        cum as f64 / total as f64
    );

    // A replay oracle answers from a fixed edge list.
    let mut replay =
        EdgeOracle::replay(&[vec![0, 1, 2], vec![1, 2, 3]], 40, 3, 1).unwrap();
    println!(
        "replay: {{0,1,2}} -> {}, {{0,1,3}} -> {}",
        replay.query(&[0, 1, 2], 0).unwrap(),
        replay.query(&[0, 1, 3], 0).unwrap()
    );
}
