use crate::analytic::{self, Protocol};
use crate::channel::NetworkConfig;
use crate::error::Result;
use crate::montecarlo::{estimate_outage_batch, OutageEstimate, Query, SimOptions};
use serde::{Deserialize, Serialize};

/// Largest accepted |z| before the absolute slack is consulted.
const Z_LIMIT: f64 = 3.0;
/// Differences this small pass whatever their z-score.
const ABS_SLACK: f64 = 1e-3;

/// Closed form against simulation for one protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub protocol: Protocol,
    pub p_analytic: f64,
    pub p_hat: f64,
    pub stderr: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub rate: f64,
    pub trials: u64,
    pub seed: u64,
    pub cognitive: bool,
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Scores one comparison: PASS when `|z| ≤ 3` or the difference is at most
/// `1e-3`. A zero standard error gives `z = 0` on exact agreement and an
/// infinite score otherwise.
pub fn judge(protocol: Protocol, p_analytic: f64, est: &OutageEstimate) -> ValidationRow {
    let delta = est.p_hat - p_analytic;
    let z = if est.stderr > 0.0 {
        delta / est.stderr
    } else if delta == 0.0 {
        0.0
    } else {
        delta.signum() * f64::INFINITY
    };
    ValidationRow {
        protocol,
        p_analytic,
        p_hat: est.p_hat,
        stderr: est.stderr,
        z,
        pass: z.abs() <= Z_LIMIT || delta.abs() <= ABS_SLACK,
    }
}

/// Compares closed-form outage with simulation for each protocol at rate
/// `rate`, all protocols sharing one set of channel draws.
pub fn validate_report(
    cfg: &NetworkConfig,
    protocols: &[Protocol],
    rate: f64,
    cognitive: bool,
    opts: &SimOptions,
) -> Result<ValidationReport> {
    let analytic = protocols
        .iter()
        .map(|&p| analytic::outage(cfg, p, rate, cognitive))
        .collect::<Result<Vec<_>>>()?;
    let queries: Vec<Query> = protocols
        .iter()
        .map(|&protocol| Query {
            protocol,
            threshold: protocol.outage_threshold(rate),
        })
        .collect();
    let est = estimate_outage_batch(cfg, &queries, cognitive, opts)?;
    Ok(ValidationReport {
        rate,
        trials: opts.trials,
        seed: opts.seed,
        cognitive,
        rows: protocols
            .iter()
            .zip(analytic)
            .zip(&est)
            .map(|((&p, a), e)| judge(p, a, e))
            .collect(),
    })
}
