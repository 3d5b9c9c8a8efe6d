//! Plain-text experiment configuration: a key = value section followed by a
//! whitespace-separated cells table. See configs/desk.cfg for a worked
//! example.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("missing required key {0}")]
    Missing(&'static str),
    #[error("config has no cells")]
    NoCells,
}

/// One grid cell; optional fields override the experiment-wide values.
#[derive(Debug, Clone, PartialEq)]
pub struct CellConfig {
    pub k: u64,
    pub j: u64,
    pub n: u64,
    pub c: f64,
    pub omega: Option<f64>,
    pub dfs_budget: Option<u64>,
    pub fray_budget: Option<u64>,
    pub closer_budget: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub cells: Vec<CellConfig>,
    pub trials: u64,
    pub base_seed: u64,
    pub delta: f64,
    pub eps: f64,
    /// Round-split divisor; per-cell override wins, None means the
    /// run-constants default max(8, ln n).
    pub omega: Option<f64>,
    /// Degree-threshold chain override (must match every cell's j).
    pub c_chain: Option<Vec<f64>>,
    pub dfs_budget: u64,
    pub fray_budget: u64,
    pub closer_budget: u64,
    /// Debug: second-round probability forced to one.
    pub p2_forced_one: bool,
    /// Worker threads for the trial pool.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            cells: Vec::new(),
            trials: 20,
            base_seed: 1,
            delta: 0.3,
            eps: 0.05,
            omega: None,
            c_chain: None,
            dfs_budget: 200_000_000,
            fray_budget: 100_000_000,
            closer_budget: 40_000_000,
            p2_forced_one: false,
            jobs: default_jobs(),
        }
    }
}

pub fn default_jobs() -> usize {
    std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();
    let mut in_cells = false;
    let mut saw_seed = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| ConfigError::Parse(idx + 1, msg);
        if line == "cells:" {
            in_cells = true;
            continue;
        }
        if in_cells {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 4 || toks.len() > 6 {
                return Err(bad(format!(
                    "cell rows are `k j n c [omega] [dfs_budget]`, got {} fields",
                    toks.len()
                )));
            }
            let cell = CellConfig {
                k: toks[0].parse().map_err(|_| bad("bad k".into()))?,
                j: toks[1].parse().map_err(|_| bad("bad j".into()))?,
                n: toks[2].parse().map_err(|_| bad("bad n".into()))?,
                c: toks[3].parse().map_err(|_| bad("bad c".into()))?,
                omega: match toks.get(4) {
                    Some(t) => Some(t.parse().map_err(|_| bad("bad omega".into()))?),
                    None => None,
                },
                dfs_budget: match toks.get(5) {
                    Some(t) => Some(t.parse().map_err(|_| bad("bad dfs budget".into()))?),
                    None => None,
                },
                fray_budget: None,
                closer_budget: None,
            };
            if cell.j < 2 || cell.j >= cell.k {
                return Err(bad(format!(
                    "cell needs 2 <= j <= k-1, got k={} j={}",
                    cell.k, cell.j
                )));
            }
            if cell.c <= 1.0 {
                return Err(bad(format!(
                    "cell needs a supercritical c > 1, got {}",
                    cell.c
                )));
            }
            cfg.cells.push(cell);
            continue;
        }

        let Some((key, val)) = line.split_once('=') else {
            return Err(bad(format!("expected `key = value`, got {line:?}")));
        };
        let key = key.trim();
        let val = val.trim();
        match key {
            "seed" => {
                cfg.base_seed = val.parse().map_err(|_| bad("bad seed".into()))?;
                saw_seed = true;
            }
            "trials" => cfg.trials = val.parse().map_err(|_| bad("bad trials".into()))?,
            "delta" => cfg.delta = val.parse().map_err(|_| bad("bad delta".into()))?,
            "eps" => cfg.eps = val.parse().map_err(|_| bad("bad eps".into()))?,
            "omega" => {
                cfg.omega = if val == "auto" {
                    None
                } else {
                    Some(val.parse().map_err(|_| bad("bad omega".into()))?)
                }
            }
            "c_chain" => {
                let mut chain = Vec::new();
                for tok in val.split(',') {
                    chain.push(
                        tok.trim()
                            .parse()
                            .map_err(|_| bad("bad c_chain entry".into()))?,
                    );
                }
                cfg.c_chain = Some(chain);
            }
            "dfs_budget" => {
                cfg.dfs_budget = val.parse().map_err(|_| bad("bad dfs_budget".into()))?
            }
            "fray_budget" => {
                cfg.fray_budget = val.parse().map_err(|_| bad("bad fray_budget".into()))?
            }
            "closer_budget" => {
                cfg.closer_budget = val.parse().map_err(|_| bad("bad closer_budget".into()))?
            }
            "force_second_round" => {
                cfg.p2_forced_one = val
                    .parse()
                    .map_err(|_| bad("bad force_second_round".into()))?
            }
            other => return Err(bad(format!("unknown key {other:?}"))),
        }
    }
    if !saw_seed {
        return Err(ConfigError::Missing("seed"));
    }
    if cfg.cells.is_empty() && !in_cells {
        return Err(ConfigError::NoCells);
    }
    if cfg.trials == 0 {
        return Err(ConfigError::Parse(0, "trials must be >= 1".into()));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = "\
# experiment
seed = 7
trials = 3
delta = 0.3
eps = 0.05
omega = 12
dfs_budget = 1000

cells:
# k j n c
3 2 2000 4
3 2 2000 8 100 555
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.base_seed, 7);
        assert_eq!(cfg.trials, 3);
        assert_eq!(cfg.cells.len(), 2);
        assert_eq!(cfg.cells[0].omega, None);
        assert_eq!(cfg.cells[1].omega, Some(100.0));
        assert_eq!(cfg.cells[1].dfs_budget, Some(555));
        assert_eq!(cfg.dfs_budget, 1000);
    }

    #[test]
    fn rejects_bad_cells() {
        assert!(parse_config("seed = 1\ncells:\n3 1 100 4\n").is_err());
        assert!(parse_config("seed = 1\ncells:\n3 2 100 0.9\n").is_err());
        assert!(parse_config("seed = 1\ncells:\n3 2 100\n").is_err());
        assert!(parse_config("cells:\n3 2 100 4\n").is_err(), "missing seed");
        assert!(parse_config("seed = 1\nbogus = 2\ncells:\n3 2 100 4\n").is_err());
    }

    #[test]
    fn empty_cells_table_is_allowed() {
        // An empty grid is a valid (trivial) experiment.
        let cfg = parse_config("seed = 5\ncells:\n").unwrap();
        assert!(cfg.cells.is_empty());
    }
}
