use crate::analytic::{self, Protocol};
use crate::channel::{db_to_linear, Method, NetworkConfig};
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_outage_batch, source_rate_query, OutageEstimate, Query, SimOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Common source and relay power in dB.
    PowerDb,
    /// Source rate in bits per channel use.
    RateBpcu,
    /// Number of relays; integer steps from `from` to `to`.
    RelayCount,
    /// Interference threshold in dB; implies the cognitive model.
    IthDb,
}

impl Axis {
    pub fn key(self) -> &'static str {
        match self {
            Axis::PowerDb => "power_db",
            Axis::RateBpcu => "rate_bpcu",
            Axis::RelayCount => "relay_count",
            Axis::IthDb => "ith_db",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power_db" => Ok(Axis::PowerDb),
            "rate_bpcu" => Ok(Axis::RateBpcu),
            "relay_count" => Ok(Axis::RelayCount),
            "ith_db" => Ok(Axis::IthDb),
            _ => Err(Error::InvalidInput(format!(
                "unknown axis '{s}' (expected power_db, rate_bpcu, relay_count or ith_db)"
            ))),
        }
    }
}

/// Which evaluators fill the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMethod {
    Analytic,
    Mc,
    Both,
}

impl SweepMethod {
    fn includes(self, m: Method) -> bool {
        matches!(
            (self, m),
            (SweepMethod::Both, _) | (SweepMethod::Analytic, Method::Analytic) | (SweepMethod::Mc, Method::MonteCarlo)
        )
    }
}

impl FromStr for SweepMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(SweepMethod::Analytic),
            "mc" => Ok(SweepMethod::Mc),
            "both" => Ok(SweepMethod::Both),
            _ => Err(Error::InvalidInput(format!("unknown method '{s}' (expected analytic, mc or both)"))),
        }
    }
}

/// A one-dimensional experiment over `axis`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub from: f64,
    pub to: f64,
    /// Grid size; ignored for [`Axis::RelayCount`], which visits every
    /// integer in range.
    pub steps: usize,
    pub protocols: Vec<Protocol>,
    pub method: SweepMethod,
    /// Source rate at every point unless the rate itself is swept.
    pub rate: f64,
    /// Apply the interference constraint.
    pub cognitive: bool,
    pub trials: u64,
    pub seed: u64,
}

impl SweepSpec {
    /// Grid of axis values, in order.
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.from < self.to) || !self.from.is_finite() || !self.to.is_finite() {
            return Err(Error::InvalidInput(format!(
                "sweep range must satisfy from < to, got [{}, {}]",
                self.from, self.to
            )));
        }
        if self.axis == Axis::RelayCount {
            if self.from.fract() != 0.0 || self.to.fract() != 0.0 || self.from < 1.0 {
                return Err(Error::InvalidInput("relay_count sweeps need integer bounds ≥ 1".into()));
            }
            return Ok((self.from as usize..=self.to as usize).map(|k| k as f64).collect());
        }
        if self.steps < 2 {
            return Err(Error::InvalidInput(format!("a sweep needs at least 2 steps, got {}", self.steps)));
        }
        let h = (self.to - self.from) / (self.steps - 1) as f64;
        Ok((0..self.steps)
            .map(|i| if i + 1 == self.steps { self.to } else { self.from + h * i as f64 })
            .collect())
    }

    fn cognitive(&self) -> bool {
        self.cognitive || self.axis == Axis::IthDb
    }

    /// Scenario and rate at one axis value.
    fn at(&self, base: &NetworkConfig, v: f64) -> (NetworkConfig, f64) {
        let mut cfg = base.clone();
        let mut rate = self.rate;
        match self.axis {
            Axis::PowerDb => cfg = cfg.with_power(db_to_linear(v)),
            Axis::RateBpcu => rate = v,
            Axis::RelayCount => cfg.k = v as usize,
            Axis::IthDb => cfg.ith = Some(db_to_linear(v)),
        }
        (cfg, rate)
    }
}

/// One table entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: f64,
    pub protocol: Protocol,
    pub method: Method,
    /// Outage at the protocol's own threshold.
    pub outage: f64,
    /// Delivered rate; half-duplex schemes use the outage at the source-rate
    /// threshold with a factor ½.
    pub throughput: f64,
    /// Simulation only.
    pub stderr: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

/// Rows in specification order plus the failures that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub errors: Vec<(Protocol, Error)>,
}

/// Evaluates every `(axis point, protocol)` cell. A protocol that fails
/// validation is recorded once in `errors` and the rest carry on.
///
/// Rows are ordered by axis point, then protocol, then analytic before
/// simulated, whatever order the cells finish in.
pub fn run_sweep(spec: &SweepSpec, base: &NetworkConfig) -> Result<SweepTable> {
    let points = spec.points()?;
    if spec.protocols.is_empty() {
        return Err(Error::InvalidInput("a sweep needs at least one protocol".into()));
    }
    let cognitive = spec.cognitive();
    let mut errors: Vec<(Protocol, Error)> = Vec::new();
    let mut note = |p: Protocol, e: Error| {
        if !errors.iter().any(|(q, _)| *q == p) {
            errors.push((p, e));
        }
    };

    let analytic_rows: Vec<Vec<std::result::Result<SweepRow, Error>>> = if spec.method.includes(Method::Analytic) {
        points
            .par_iter()
            .map(|&v| {
                let (cfg, rate) = spec.at(base, v);
                spec.protocols
                    .iter()
                    .map(|&p| analytic_row(&cfg, p, rate, v, cognitive))
                    .collect()
            })
            .collect()
    } else {
        Vec::new()
    };

    let mc_rows: Vec<Vec<Option<SweepRow>>> = if spec.method.includes(Method::MonteCarlo) {
        let opts = SimOptions::new(spec.trials, spec.seed);
        let mut out = Vec::with_capacity(points.len());
        for &v in &points {
            let (cfg, rate) = spec.at(base, v);
            let mut ok = Vec::new();
            for &p in &spec.protocols {
                match crate::channel::validate_for(&cfg, p, Method::MonteCarlo, cognitive)
                    .and_then(|_| analytic::check_rate(rate))
                {
                    Ok(_) => ok.push(p),
                    Err(e) => note(p, e),
                }
            }
            let rows = mc_point(&cfg, &ok, rate, v, cognitive, &opts)?;
            out.push(
                spec.protocols
                    .iter()
                    .map(|p| ok.iter().position(|q| q == p).map(|i| rows[i].clone()))
                    .collect(),
            );
        }
        out
    } else {
        Vec::new()
    };

    let mut rows = Vec::new();
    for i in 0..points.len() {
        for (j, &p) in spec.protocols.iter().enumerate() {
            if let Some(a) = analytic_rows.get(i) {
                match &a[j] {
                    Ok(r) => rows.push(r.clone()),
                    Err(e) => note(p, e.clone()),
                }
            }
            if let Some(Some(r)) = mc_rows.get(i).map(|m| &m[j]) {
                rows.push(r.clone());
            }
        }
    }
    Ok(SweepTable { rows, errors })
}

fn analytic_row(cfg: &NetworkConfig, p: Protocol, rate: f64, v: f64, cognitive: bool) -> Result<SweepRow> {
    let outage = analytic::outage(cfg, p, rate, cognitive)?;
    Ok(SweepRow {
        axis: v,
        protocol: p,
        method: Method::Analytic,
        outage,
        throughput: p.throughput(rate, outage),
        stderr: None,
        trials: None,
        seed: None,
    })
}

/// Simulates all protocols at one point on shared channel draws.
fn mc_point(
    cfg: &NetworkConfig,
    protocols: &[Protocol],
    rate: f64,
    v: f64,
    cognitive: bool,
    opts: &SimOptions,
) -> Result<Vec<SweepRow>> {
    if protocols.is_empty() {
        return Ok(Vec::new());
    }
    let mut queries: Vec<Query> = protocols
        .iter()
        .map(|&protocol| Query {
            protocol,
            threshold: protocol.outage_threshold(rate),
        })
        .collect();
    queries.extend(protocols.iter().map(|&p| source_rate_query(p, rate)));
    let est = estimate_outage_batch(cfg, &queries, cognitive, opts)?;
    let (outage, at_source_rate): (&[OutageEstimate], &[OutageEstimate]) = est.split_at(protocols.len());
    Ok(protocols
        .iter()
        .zip(outage)
        .zip(at_source_rate)
        .map(|((&p, o), s)| {
            let t_out = if p.is_half_duplex() { s.p_hat } else { o.p_hat };
            SweepRow {
                axis: v,
                protocol: p,
                method: Method::MonteCarlo,
                outage: o.p_hat,
                throughput: p.throughput(rate, t_out),
                stderr: Some(o.stderr),
                trials: Some(o.trials),
                seed: Some(o.seed),
            }
        })
        .collect())
}
