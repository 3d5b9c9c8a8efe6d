//! A full pipeline trial at desk scale: round-one walk, family fan-out,
//! second-round closing, certificate, and an independent re-check.
//!
//!     cargo run --release --example close_cycle

use tightcycle::certificate::check_certificate;
use tightcycle::harness::{run_trial, CellConfig, ExperimentConfig, TrialSpec};

fn main() {
    let cfg = ExperimentConfig {
        cells: vec![CellConfig {
            k: 3,
            j: 2,
            n: 2000,
            c: 8.0,
            omega: Some(30.0),
            dfs_budget: None,
            fray_budget: None,
            closer_budget: None,
        }],
        trials: 1,
        base_seed: 1,
        ..Default::default()
    };
    let spec = TrialSpec::from_cell(&cfg, &cfg.cells[0]).unwrap();
    let r = run_trial(&spec, 0, 0, 1);
    println!("stage: {}", r.stage.as_str());
    println!("round-one path: {} ({} queries)", r.l_p, r.dfs_queries);
    println!(
        "family: |A|={} |B|={} disjoint fraction {:.3} heavy {:?}",
        r.family_sizes[0], r.family_sizes[1], r.disjoint_fraction, r.heavy_count
    );
    println!(
        "closing: {} draws, expected {:.1} closures",
        r.closer_attempts, r.expected_closures
    );
    let Some(cert) = &r.certificate else {
        println!("no cycle this seed: {:?}", r.failure);
        return;
    };
    let bound = (1.0 - spec.consts.delta) * spec.params.l_one(spec.consts.c).unwrap();
    println!(
        "certified cycle of length {} (bound {:.1})",
        r.l_c.unwrap(),
        bound
    );

    // Round-trip through the plain-text format and re-verify from scratch.
    let text = cert.render();
    let parsed = tightcycle::certificate::Certificate::parse(&text).unwrap();
    let report = check_certificate(&parsed).unwrap();
    println!(
        "re-check from rendered certificate: length {}, clears bound: {}",
        report.length, report.clears_bound
    );
}
