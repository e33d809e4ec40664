//! Scenario description, validation and seeded channel-gain draws.
//!
//! Every link gain `g = |h|²` is Gamma distributed with shape `m` and scale
//! `θ = π/m`, where `π` is the average power. Noise variances are fixed at
//! one and all relays transmit with the same power `P_R`.

use crate::analytic::Protocol;
use crate::error::{Error, Result, Violation};
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

/// `10^(x/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Nakagami shape and average power of one link class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub m: f64,
    pub avg_power: f64,
}

impl LinkSpec {
    pub fn new(m: f64, avg_power: f64) -> Result<Self> {
        let link = Self { m, avg_power };
        let mut v = Vec::new();
        link.check("link", &mut v);
        if v.is_empty() {
            Ok(link)
        } else {
            Err(Error::InvalidConfig(v))
        }
    }

    /// Gamma scale `θ = π/m`.
    pub fn theta(&self) -> f64 {
        self.avg_power / self.m
    }

    fn check(&self, name: &str, out: &mut Vec<Violation>) {
        if !(self.m >= 0.5) || !self.m.is_finite() {
            out.push(Violation::new(
                format!("m_{name}"),
                format!("Nakagami shape must be >= 0.5, got {}", self.m),
            ));
        }
        if !(self.avg_power > 0.0) || !self.avg_power.is_finite() {
            out.push(Violation::new(
                format!("pi_{name}"),
                format!("average power must be positive, got {}", self.avg_power),
            ));
        }
    }
}

/// Per-relay replacement of the symmetric link classes. Only the simulator
/// accepts these.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RelayOverride {
    /// Zero-based relay index.
    pub relay: usize,
    pub sr: Option<LinkSpec>,
    pub rd: Option<LinkSpec>,
    pub rr: Option<LinkSpec>,
    pub rp: Option<LinkSpec>,
}

/// The primary-receiver side of an underlay scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cognitive {
    pub sp: LinkSpec,
    pub rp: LinkSpec,
    /// Interference threshold at the primary receiver (linear).
    pub ith: f64,
}

/// A full scenario. Powers and `ith` are linear.
///
/// An absent `sd` link means there is no direct source-destination path.
/// `sp`, `rp` and `ith` are either all present (underlay cognitive setting)
/// or all absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub k: usize,
    pub p_s: f64,
    pub p_r: f64,
    /// Residual self-interference scales as `P_R^lambda`.
    pub lambda: f64,
    pub sr: LinkSpec,
    pub rd: LinkSpec,
    pub rr: LinkSpec,
    pub sd: Option<LinkSpec>,
    pub sp: Option<LinkSpec>,
    pub rp: Option<LinkSpec>,
    pub ith: Option<f64>,
    #[serde(default)]
    pub overrides: Vec<RelayOverride>,
}

/// How a quantity is going to be computed; the closed forms carry
/// integrality requirements the simulator does not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    #[serde(rename = "mc")]
    MonteCarlo,
}

impl NetworkConfig {
    /// A non-cognitive scenario without a direct link.
    pub fn new(k: usize, p_s: f64, p_r: f64, lambda: f64, sr: LinkSpec, rd: LinkSpec, rr: LinkSpec) -> Self {
        Self {
            k,
            p_s,
            p_r,
            lambda,
            sr,
            rd,
            rr,
            sd: None,
            sp: None,
            rp: None,
            ith: None,
            overrides: Vec::new(),
        }
    }

    pub fn with_direct_link(mut self, sd: LinkSpec) -> Self {
        self.sd = Some(sd);
        self
    }

    pub fn with_cognitive(mut self, sp: LinkSpec, rp: LinkSpec, ith: f64) -> Self {
        self.sp = Some(sp);
        self.rp = Some(rp);
        self.ith = Some(ith);
        self
    }

    pub fn without_cognitive(mut self) -> Self {
        self.sp = None;
        self.rp = None;
        self.ith = None;
        self
    }

    /// Same scenario with `P_S = P_R = p`.
    pub fn with_power(mut self, p: f64) -> Self {
        self.p_s = p;
        self.p_r = p;
        self
    }

    pub fn cognitive(&self) -> Option<Cognitive> {
        match (self.sp, self.rp, self.ith) {
            (Some(sp), Some(rp), Some(ith)) => Some(Cognitive { sp, rp, ith }),
            _ => None,
        }
    }

    pub fn is_cognitive(&self) -> bool {
        self.cognitive().is_some()
    }

    /// Effective RSI power multiplier `P_R^lambda`.
    pub fn rsi_gain(&self) -> f64 {
        self.p_r.powf(self.lambda)
    }

    /// Checks the requirements shared by every protocol and method, listing
    /// all violations at once.
    pub fn validate(&self) -> Result<()> {
        let v = self.structural_violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v))
        }
    }

    /// Structural invariants that hold regardless of how the scenario is
    /// evaluated.
    fn structural_violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        if self.k < 1 {
            v.push(Violation::new("k", "at least one relay is required"));
        }
        for (name, p) in [("p_s", self.p_s), ("p_r", self.p_r)] {
            if !(p > 0.0) || !p.is_finite() {
                v.push(Violation::new(name, format!("transmit power must be positive, got {p}")));
            }
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            v.push(Violation::new(
                "lambda",
                format!("RSI scaling exponent must lie in [0, 1], got {}", self.lambda),
            ));
        }
        self.sr.check("sr", &mut v);
        self.rd.check("rd", &mut v);
        self.rr.check("rr", &mut v);
        if let Some(sd) = &self.sd {
            sd.check("sd", &mut v);
        }
        if let Some(sp) = &self.sp {
            sp.check("sp", &mut v);
        }
        if let Some(rp) = &self.rp {
            rp.check("rp", &mut v);
        }
        let present = [self.sp.is_some(), self.rp.is_some(), self.ith.is_some()];
        if present.iter().any(|&p| p) && !present.iter().all(|&p| p) {
            for (name, p) in [("sp", present[0]), ("rp", present[1]), ("ith", present[2])] {
                if !p {
                    v.push(Violation::new(
                        name,
                        "cognitive settings need sp, rp and ith together",
                    ));
                }
            }
        }
        if let Some(ith) = self.ith {
            if !(ith > 0.0) {
                v.push(Violation::new("ith", format!("interference threshold must be positive, got {ith}")));
            }
        }
        for o in &self.overrides {
            if o.relay >= self.k {
                v.push(Violation::new(
                    "relay",
                    format!("override index {} out of range for k = {}", o.relay, self.k),
                ));
            }
            let links = [("sr", &o.sr), ("rd", &o.rd), ("rr", &o.rr), ("rp", &o.rp)];
            for (name, l) in links {
                if let Some(l) = l {
                    l.check(&format!("{name}[{}]", o.relay), &mut v);
                }
            }
            if o.rp.is_some() && self.rp.is_none() {
                v.push(Violation::new(
                    format!("rp[{}]", o.relay),
                    "relay-primary override given for a non-cognitive scenario",
                ));
            }
        }
        v
    }
}

fn require_integer(v: &mut Vec<Violation>, link: &str, m: f64, what: &str) {
    if !crate::specfun::is_integer(m) {
        v.push(Violation::new(
            format!("m_{link}"),
            format!("{what} requires integer m_{}, got {m}", link.to_uppercase()),
        ));
    }
}

/// Checks every requirement of `(protocol, method)` on `cfg`, using the
/// cognitive model whenever the scenario carries one.
pub fn validate_config(cfg: &NetworkConfig, protocol: Protocol, method: Method) -> Result<&NetworkConfig> {
    validate_for(cfg, protocol, method, cfg.sp.is_some() || cfg.rp.is_some() || cfg.ith.is_some())
}

/// As [`validate_config`], with the cognitive evaluation chosen explicitly.
/// Returns the complete list of violations on failure.
pub fn validate_for(cfg: &NetworkConfig, protocol: Protocol, method: Method, cognitive: bool) -> Result<&NetworkConfig> {
    let mut v = cfg.structural_violations();
    let tag = protocol.label();

    if protocol.needs_direct_link() && cfg.sd.is_none() {
        v.push(Violation::new("sd", format!("{tag} requires a source-destination link")));
    }
    if cognitive && !cfg.is_cognitive() && v.iter().all(|x| !matches!(x.field.as_str(), "sp" | "rp" | "ith")) {
        v.push(Violation::new(
            "cognitive",
            "cognitive evaluation requested but sp, rp and ith are not configured",
        ));
    }

    if method == Method::Analytic {
        if protocol.is_half_duplex() {
            v.push(Violation::new(
                "protocol",
                format!("{tag} has no closed form; use the simulator"),
            ));
        }
        if !cfg.overrides.is_empty() {
            v.push(Violation::new(
                "overrides",
                "per-relay link overrides are only supported by the simulator",
            ));
        }
        let what = format!("{tag} analytic");
        match protocol {
            Protocol::Ndl => require_integer(&mut v, "rr", cfg.rr.m, &what),
            Protocol::Idl => {
                require_integer(&mut v, "rr", cfg.rr.m, &what);
                require_integer(&mut v, "rd", cfg.rd.m, &what);
            }
            Protocol::IdlDt | Protocol::Sdf => {
                require_integer(&mut v, "rr", cfg.rr.m, &what);
                require_integer(&mut v, "rd", cfg.rd.m, &what);
                if let Some(sd) = &cfg.sd {
                    require_integer(&mut v, "sd", sd.m, &what);
                }
            }
            Protocol::HdMrc | Protocol::HdSdf => {}
        }
        if cognitive {
            if let Some(rp) = &cfg.rp {
                require_integer(&mut v, "rp", rp.m, "cognitive analytic");
            }
        }
    }

    if v.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::InvalidConfig(v))
    }
}

/// Checks that `cfg` describes an underlay scenario whose feasibility
/// distribution `method` can evaluate, and returns its primary-side links.
pub fn validate_feasibility(cfg: &NetworkConfig, method: Method) -> Result<Cognitive> {
    let mut v = cfg.structural_violations();
    if !cfg.is_cognitive() && v.iter().all(|x| !matches!(x.field.as_str(), "sp" | "rp" | "ith")) {
        v.push(Violation::new("cognitive", "feasibility needs sp, rp and ith"));
    }
    if method == Method::Analytic {
        if let Some(rp) = &cfg.rp {
            require_integer(&mut v, "rp", rp.m, "feasibility analytic");
        }
        if !cfg.overrides.is_empty() {
            v.push(Violation::new(
                "overrides",
                "per-relay link overrides are only supported by the simulator",
            ));
        }
    }
    match cfg.cognitive() {
        Some(c) if v.is_empty() => Ok(c),
        _ => Err(Error::InvalidConfig(v)),
    }
}

/// One `Gamma(m, θ)` variate. Exact for every shape (Marsaglia–Tsang, with
/// the `U^{1/m}` boost below one).
pub fn sample_gamma<R: Rng + ?Sized>(m: f64, theta: f64, rng: &mut R) -> f64 {
    Gamma::new(m, theta)
        .expect("shape and scale validated positive")
        .sample(rng)
}

/// One block-fading draw of every gain in the scenario.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Realization {
    pub g_sr: Vec<f64>,
    pub g_rd: Vec<f64>,
    pub g_rr: Vec<f64>,
    /// Zero when the scenario has no direct link.
    pub g_sd: f64,
    pub g_sp: Option<f64>,
    pub g_rp: Option<Vec<f64>>,
}

impl Realization {
    pub fn k(&self) -> usize {
        self.g_sr.len()
    }
}

fn gamma_of(link: &LinkSpec) -> Gamma<f64> {
    Gamma::new(link.m, link.theta()).expect("link validated")
}

/// Pre-built per-link samplers for repeated draws from one scenario.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    sr: Vec<Gamma<f64>>,
    rd: Vec<Gamma<f64>>,
    rr: Vec<Gamma<f64>>,
    rp: Option<Vec<Gamma<f64>>>,
    sd: Option<Gamma<f64>>,
    sp: Option<Gamma<f64>>,
}

impl ChannelSampler {
    /// `cfg` must have passed validation.
    pub fn new(cfg: &NetworkConfig) -> Self {
        let per_relay = |base: &LinkSpec, pick: fn(&RelayOverride) -> Option<LinkSpec>| -> Vec<Gamma<f64>> {
            (0..cfg.k)
                .map(|k| {
                    let link = cfg
                        .overrides
                        .iter()
                        .filter(|o| o.relay == k)
                        .find_map(pick)
                        .unwrap_or(*base);
                    gamma_of(&link)
                })
                .collect()
        };
        Self {
            sr: per_relay(&cfg.sr, |o| o.sr),
            rd: per_relay(&cfg.rd, |o| o.rd),
            rr: per_relay(&cfg.rr, |o| o.rr),
            rp: cfg.rp.as_ref().map(|rp| per_relay(rp, |o| o.rp)),
            sd: cfg.sd.as_ref().map(gamma_of),
            sp: cfg.sp.as_ref().map(gamma_of),
        }
    }

    pub fn empty_realization(&self) -> Realization {
        let k = self.sr.len();
        Realization {
            g_sr: vec![0.0; k],
            g_rd: vec![0.0; k],
            g_rr: vec![0.0; k],
            g_sd: 0.0,
            g_sp: self.sp.map(|_| 0.0),
            g_rp: self.rp.as_ref().map(|_| vec![0.0; k]),
        }
    }

    /// Overwrites `out` with a fresh draw. Gains are drawn in a fixed order
    /// (per relay: SR, RD, RR; then SD, SP, and per relay RP) so a seeded
    /// stream maps to a reproducible sequence of realizations.
    pub fn sample_into<R: Rng + ?Sized>(&self, out: &mut Realization, rng: &mut R) {
        for k in 0..self.sr.len() {
            out.g_sr[k] = self.sr[k].sample(rng);
            out.g_rd[k] = self.rd[k].sample(rng);
            out.g_rr[k] = self.rr[k].sample(rng);
        }
        out.g_sd = self.sd.map_or(0.0, |d| d.sample(rng));
        if let (Some(sp), Some(slot)) = (&self.sp, out.g_sp.as_mut()) {
            *slot = sp.sample(rng);
        }
        if let (Some(rp), Some(slots)) = (&self.rp, out.g_rp.as_mut()) {
            for (slot, d) in slots.iter_mut().zip(rp) {
                *slot = d.sample(rng);
            }
        }
    }
}

/// Draws every gain of `cfg` independently from its link distribution.
pub fn sample_realization<R: Rng + ?Sized>(cfg: &NetworkConfig, rng: &mut R) -> Realization {
    let sampler = ChannelSampler::new(cfg);
    let mut r = sampler.empty_realization();
    sampler.sample_into(&mut r, rng);
    r
}
