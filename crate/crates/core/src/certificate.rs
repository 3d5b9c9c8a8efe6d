//! Plain-text cycle certificates, sufficient for independent
//! re-verification: the oracle is rebuilt from the recorded seed and round
//! probabilities (or from an inline edge list in replay mode) and every
//! window of the claimed cycle is re-queried.

use crate::oracle::{format_edge_list, EdgeOracle, PHASE_CHECK};
use crate::params::Params;
use crate::path::TightCycle;
use thiserror::Error;

pub const FORMAT_HEADER: &str = "tightcycle-certificate v1";

#[derive(Debug, Clone, PartialEq)]
pub enum CertMode {
    /// Rebuild the oracle from the seed and per-round probabilities.
    Seeded { seed: u64, round_probs: Vec<f64> },
    /// Answer from an inline edge list.
    Replay { edges: Vec<Vec<u32>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub n: u64,
    pub k: u64,
    pub j: u64,
    /// Supercriticality constant the run used; fixes the length bound.
    pub c: f64,
    pub delta: f64,
    pub mode: CertMode,
    pub cycle: Vec<u32>,
}

#[derive(Debug, Error, PartialEq)]
pub enum CertError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("missing field {0}")]
    Missing(&'static str),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("repeated vertex in the claimed cycle")]
    RepeatedVertex,
    #[error("degenerate length: {0} vertices")]
    DegenerateLength(usize),
    #[error("wrong edge: window {index} {window:?} is not an edge")]
    WrongEdge { index: u64, window: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub length: u64,
    /// (1 - delta) * L1 for the recorded constants.
    pub bound: f64,
    pub clears_bound: bool,
}

impl Certificate {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(FORMAT_HEADER);
        out.push('\n');
        out.push_str(&format!("n {}\n", self.n));
        out.push_str(&format!("k {}\n", self.k));
        out.push_str(&format!("j {}\n", self.j));
        out.push_str(&format!("c {:.17}\n", self.c));
        out.push_str(&format!("delta {:.17}\n", self.delta));
        match &self.mode {
            CertMode::Seeded { seed, round_probs } => {
                out.push_str("mode seeded\n");
                out.push_str(&format!("seed {seed}\n"));
                let toks: Vec<String> =
                    round_probs.iter().map(|p| format!("{p:.17e}")).collect();
                out.push_str(&format!("rounds {}\n", toks.join(" ")));
            }
            CertMode::Replay { edges } => {
                out.push_str("mode replay\n");
                out.push_str(&format!("edges {}\n", edges.len()));
                out.push_str(&format_edge_list(edges));
            }
        }
        let toks: Vec<String> = self.cycle.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("cycle {}\n", toks.join(" ")));
        out
    }

    pub fn parse(text: &str) -> Result<Certificate, CertError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or(CertError::Missing("header"))?;
        if header.trim() != FORMAT_HEADER {
            return Err(CertError::Parse(1, format!("unknown header {header:?}")));
        }
        let mut n = None;
        let mut k = None;
        let mut j = None;
        let mut c = None;
        let mut delta = None;
        let mut seed = None;
        let mut rounds: Option<Vec<f64>> = None;
        let mut mode_name: Option<String> = None;
        let mut edge_count: Option<usize> = None;
        let mut edges: Vec<Vec<u32>> = Vec::new();
        let mut cycle: Option<Vec<u32>> = None;

        for (idx, raw) in lines {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| CertError::Parse(idx + 1, msg.to_string());
            if let Some(rest) = line.strip_prefix("n ") {
                n = Some(rest.trim().parse().map_err(|_| bad("bad n"))?);
            } else if let Some(rest) = line.strip_prefix("k ") {
                k = Some(rest.trim().parse().map_err(|_| bad("bad k"))?);
            } else if let Some(rest) = line.strip_prefix("j ") {
                j = Some(rest.trim().parse().map_err(|_| bad("bad j"))?);
            } else if let Some(rest) = line.strip_prefix("c ") {
                c = Some(rest.trim().parse().map_err(|_| bad("bad c"))?);
            } else if let Some(rest) = line.strip_prefix("delta ") {
                delta = Some(rest.trim().parse().map_err(|_| bad("bad delta"))?);
            } else if let Some(rest) = line.strip_prefix("mode ") {
                mode_name = Some(rest.trim().to_string());
            } else if let Some(rest) = line.strip_prefix("seed ") {
                seed = Some(rest.trim().parse().map_err(|_| bad("bad seed"))?);
            } else if let Some(rest) = line.strip_prefix("rounds ") {
                let mut ps = Vec::new();
                for tok in rest.split_whitespace() {
                    ps.push(tok.parse().map_err(|_| bad("bad round probability"))?);
                }
                rounds = Some(ps);
            } else if let Some(rest) = line.strip_prefix("edges ") {
                edge_count = Some(rest.trim().parse().map_err(|_| bad("bad edge count"))?);
            } else if let Some(rest) = line.strip_prefix("cycle ") {
                let mut vs = Vec::new();
                for tok in rest.split_whitespace() {
                    vs.push(tok.parse().map_err(|_| bad("bad cycle vertex"))?);
                }
                cycle = Some(vs);
            } else if edge_count.is_some() && edges.len() < edge_count.unwrap() {
                let mut vs = Vec::new();
                for tok in line.split_whitespace() {
                    vs.push(tok.parse().map_err(|_| bad("bad edge vertex"))?);
                }
                edges.push(vs);
            } else {
                return Err(bad("unrecognized line"));
            }
        }

        let mode = match mode_name.as_deref() {
            Some("seeded") => CertMode::Seeded {
                seed: seed.ok_or(CertError::Missing("seed"))?,
                round_probs: rounds.ok_or(CertError::Missing("rounds"))?,
            },
            Some("replay") => {
                let want = edge_count.ok_or(CertError::Missing("edges"))?;
                if edges.len() != want {
                    return Err(CertError::Parse(
                        0,
                        format!("expected {want} edges, found {}", edges.len()),
                    ));
                }
                CertMode::Replay { edges }
            }
            _ => return Err(CertError::Missing("mode")),
        };
        Ok(Certificate {
            n: n.ok_or(CertError::Missing("n"))?,
            k: k.ok_or(CertError::Missing("k"))?,
            j: j.ok_or(CertError::Missing("j"))?,
            c: c.ok_or(CertError::Missing("c"))?,
            delta: delta.ok_or(CertError::Missing("delta"))?,
            mode,
            cycle: cycle.ok_or(CertError::Missing("cycle"))?,
        })
    }
}

/// Re-instantiates the oracle and re-checks every window of the claimed
/// cycle, reporting the length and the bound it clears.
pub fn check_certificate(cert: &Certificate) -> Result<CheckReport, CertError> {
    let params = Params::derive(cert.n, cert.k, cert.j)
        .map_err(|e| CertError::BadParams(e.to_string()))?;
    let mut oracle = match &cert.mode {
        CertMode::Seeded { seed, round_probs } => EdgeOracle::seeded(&params, round_probs, *seed)
            .map_err(|e| CertError::BadParams(e.to_string()))?,
        CertMode::Replay { edges } => EdgeOracle::replay(edges, cert.n, cert.k, 1)
            .map_err(|e| CertError::BadParams(e.to_string()))?,
    };
    oracle.set_phase(PHASE_CHECK);
    let last_round = oracle.rounds() - 1;

    let cycle = TightCycle::new(&params, cert.cycle.clone()).map_err(|e| match e {
        crate::path::PathError::RepeatedVertex => CertError::RepeatedVertex,
        crate::path::PathError::DegenerateCycle { got } => CertError::DegenerateLength(got),
        crate::path::PathError::RepeatedWindow => CertError::DegenerateLength(cert.cycle.len()),
        other => CertError::BadParams(other.to_string()),
    })?;
    for (i, w) in cycle.edges(&params).into_iter().enumerate() {
        let hit = oracle
            .query(&w, last_round)
            .map_err(|e| CertError::BadParams(e.to_string()))?;
        if !hit {
            return Err(CertError::WrongEdge {
                index: i as u64,
                window: w,
            });
        }
    }
    let bound = (1.0 - cert.delta)
        * params
            .l_one(cert.c)
            .map_err(|e| CertError::BadParams(e.to_string()))?;
    Ok(CheckReport {
        length: cycle.length(),
        bound,
        clears_bound: cycle.length() as f64 >= bound,
    })
}
