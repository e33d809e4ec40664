//! Direct simulation of every protocol, including the half-duplex baselines,
//! and of the interference feasibility process.
//!
//! Trials are split into fixed chunks of [`CHUNK`]. Chunk `c` draws from the
//! ChaCha stream `c` of a generator keyed by the seed, so every chunk sees
//! the same numbers however the chunks are scheduled and the estimates are
//! bit-identical for any worker count.

use crate::analytic::{rate_threshold, FeasibilityDist, Protocol};
use crate::channel::{validate_feasibility, validate_for, ChannelSampler, Method, NetworkConfig, Realization};
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Trials per independently seeded substream.
pub const CHUNK: u64 = 65_536;

/// Empirical outage probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub p_hat: f64,
    /// `√(p̂(1 − p̂)/N)`
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

impl OutageEstimate {
    fn from_count(count: u64, trials: u64, seed: u64) -> Self {
        let n = trials as f64;
        let p_hat = count as f64 / n;
        Self {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / n).sqrt(),
            trials,
            seed,
        }
    }
}

/// Trial budget, seed and parallelism of one simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; `0` uses the global pool.
    pub workers: usize,
}

impl SimOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self { trials, seed, workers: 0 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("at least one trial is required".into()));
        }
        Ok(())
    }
}

/// Which nodes the interference constraint admits in one realization.
#[derive(Debug, Clone, Copy)]
enum Admission<'a> {
    /// Non-cognitive: everything may transmit.
    All,
    Gated {
        source: bool,
        relays: &'a [bool],
    },
}

impl Admission<'_> {
    fn source(&self) -> bool {
        match self {
            Admission::All => true,
            Admission::Gated { source, .. } => *source,
        }
    }

    fn relay(&self, k: usize) -> bool {
        match self {
            Admission::All => true,
            Admission::Gated { relays, .. } => relays[k],
        }
    }
}

/// End-to-end SINR of `protocol` for one realization with every relay
/// available.
pub fn e2e_sinr(r: &Realization, cfg: &NetworkConfig, protocol: Protocol) -> f64 {
    sinr_admitted(r, cfg, protocol, Admission::All)
}

fn sinr_admitted(r: &Realization, cfg: &NetworkConfig, protocol: Protocol, adm: Admission<'_>) -> f64 {
    if !adm.source() {
        return 0.0;
    }
    let rsi = cfg.rsi_gain();
    let direct = cfg.p_s * r.g_sd;
    let mut best = 0.0f64;
    for k in 0..r.k() {
        if !adm.relay(k) {
            continue;
        }
        let relayed = match protocol {
            Protocol::Ndl => {
                let hop1 = cfg.p_s * r.g_sr[k] / (rsi * r.g_rr[k] + 1.0);
                hop1.min(cfg.p_r * r.g_rd[k])
            }
            Protocol::Idl | Protocol::IdlDt => {
                let hop1 = cfg.p_s * r.g_sr[k] / (rsi * r.g_rr[k] + 1.0);
                hop1.min(cfg.p_r * r.g_rd[k] / (direct + 1.0))
            }
            Protocol::Sdf => {
                let hop1 = cfg.p_s * r.g_sr[k] / (rsi * r.g_rr[k] + 1.0);
                hop1.min(cfg.p_r * r.g_rd[k] + direct)
            }
            Protocol::HdMrc | Protocol::HdSdf => (cfg.p_s * r.g_sr[k]).min(cfg.p_r * r.g_rd[k] + direct),
        };
        best = best.max(relayed);
    }
    if protocol.uses_direct_branch() {
        best = best.max(direct);
    }
    best
}

/// Fills `relays` with per-relay admissibility, `P_S g_SP + P_R g_kP ≤ I_th`,
/// and returns whether the source alone is admissible.
fn admit(r: &Realization, cfg: &NetworkConfig, ith: f64, relays: &mut [bool]) -> bool {
    let i_s = cfg.p_s * r.g_sp.expect("cognitive realization");
    let g_rp = r.g_rp.as_ref().expect("cognitive realization");
    for (slot, &g) in relays.iter_mut().zip(g_rp) {
        *slot = i_s + cfg.p_r * g <= ith;
    }
    i_s <= ith
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `per_chunk` over every chunk and sums the returned count vectors.
fn run_chunks<F>(opts: &SimOptions, width: usize, per_chunk: F) -> Result<Vec<u64>>
where
    F: Fn(&mut ChaCha8Rng, u64, &mut [u64]) + Sync,
{
    opts.check()?;
    let chunks = opts.trials.div_ceil(CHUNK);
    let work = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = chunk_rng(opts.seed, c);
                let n = CHUNK.min(opts.trials - c * CHUNK);
                let mut counts = vec![0u64; width];
                per_chunk(&mut rng, n, &mut counts);
                counts
            })
            .reduce(
                || vec![0u64; width],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    };
    if opts.workers == 0 {
        Ok(work())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
        Ok(pool.install(work))
    }
}

/// One outage query of a batch: protocol and SINR threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Query {
    pub protocol: Protocol,
    pub threshold: f64,
}

/// Estimates several outage probabilities from one shared set of channel
/// realizations. A trial is in outage when its end-to-end SINR does not
/// exceed the threshold; with the interference constraint active, relays
/// (and the source) that would violate it are excluded first.
pub fn estimate_outage_batch(
    cfg: &NetworkConfig,
    queries: &[Query],
    cognitive: bool,
    opts: &SimOptions,
) -> Result<Vec<OutageEstimate>> {
    let mut protocols: Vec<Protocol> = Vec::new();
    for q in queries {
        validate_for(cfg, q.protocol, Method::MonteCarlo, cognitive)?;
        if !(q.threshold >= 0.0) {
            return Err(Error::InvalidInput(format!("threshold must be non-negative, got {}", q.threshold)));
        }
        if !protocols.contains(&q.protocol) {
            protocols.push(q.protocol);
        }
    }
    let slot: Vec<usize> = queries
        .iter()
        .map(|q| protocols.iter().position(|&p| p == q.protocol).expect("collected above"))
        .collect();
    let ith = cfg.ith.unwrap_or(f64::INFINITY);
    let sampler = ChannelSampler::new(cfg);

    let counts = run_chunks(opts, queries.len(), |rng, n, counts| {
        let mut r = sampler.empty_realization();
        let mut relays = vec![true; cfg.k];
        let mut sinr = vec![0.0; protocols.len()];
        for _ in 0..n {
            sampler.sample_into(&mut r, rng);
            let adm = if cognitive {
                let source = admit(&r, cfg, ith, &mut relays);
                Admission::Gated { source, relays: &relays }
            } else {
                Admission::All
            };
            for (s, &p) in sinr.iter_mut().zip(&protocols) {
                *s = sinr_admitted(&r, cfg, p, adm);
            }
            for ((c, q), &i) in counts.iter_mut().zip(queries).zip(&slot) {
                if sinr[i] <= q.threshold {
                    *c += 1;
                }
            }
        }
    })?;
    Ok(counts
        .into_iter()
        .map(|c| OutageEstimate::from_count(c, opts.trials, opts.seed))
        .collect())
}

/// Outage at source rate `rate`, using the protocol's own threshold
/// (`2^{2R} − 1` for half duplex).
pub fn estimate_outage(
    cfg: &NetworkConfig,
    protocol: Protocol,
    rate: f64,
    trials: u64,
    seed: u64,
    cognitive: bool,
) -> Result<OutageEstimate> {
    estimate_outage_with(cfg, protocol, rate, cognitive, &SimOptions::new(trials, seed))
}

pub fn estimate_outage_with(
    cfg: &NetworkConfig,
    protocol: Protocol,
    rate: f64,
    cognitive: bool,
    opts: &SimOptions,
) -> Result<OutageEstimate> {
    crate::analytic::check_rate(rate)?;
    let q = Query {
        protocol,
        threshold: protocol.outage_threshold(rate),
    };
    Ok(estimate_outage_batch(cfg, &[q], cognitive, opts)?[0])
}

/// Outage at the threshold `2^R − 1` regardless of duplexing, the value
/// that enters the half-duplex throughput `(R/2)(1 − P_out)`.
pub fn source_rate_query(protocol: Protocol, rate: f64) -> Query {
    Query {
        protocol,
        threshold: rate_threshold(rate),
    }
}

/// Empirical distribution of the number of interference-feasible relays.
pub fn estimate_feasibility(cfg: &NetworkConfig, trials: u64, seed: u64) -> Result<FeasibilityDist> {
    estimate_feasibility_with(cfg, &SimOptions::new(trials, seed))
}

pub fn estimate_feasibility_with(cfg: &NetworkConfig, opts: &SimOptions) -> Result<FeasibilityDist> {
    let c = validate_feasibility(cfg, Method::MonteCarlo)?;
    let sampler = ChannelSampler::new(cfg);
    let k = cfg.k;
    // Slots 0..=K count L; slot K+1 counts the source-only sub-event.
    let counts = run_chunks(opts, k + 2, |rng, n, counts| {
        let mut r = sampler.empty_realization();
        let mut relays = vec![false; k];
        for _ in 0..n {
            sampler.sample_into(&mut r, rng);
            let src = admit(&r, cfg, c.ith, &mut relays);
            let l = relays.iter().filter(|&&b| b).count();
            counts[l] += 1;
            if l == 0 && src {
                counts[k + 1] += 1;
            }
        }
    })?;
    let n = opts.trials as f64;
    Ok(FeasibilityDist {
        p: counts[..=k].iter().map(|&c| c as f64 / n).collect(),
        p_tilde0: counts[k + 1] as f64 / n,
    })
}
