//! Exact end-to-end SINR distributions, interference feasibility
//! probabilities, outage and throughput.
//!
//! Every closed form has an integral twin (`*_quad`) that evaluates the
//! defining conditional expectation by adaptive quadrature. The closed forms
//! for the direct-link protocols are alternating binomial sums; they report a
//! cancellation bound alongside the value, and [`conditional_cdf`] switches to
//! the positive integral when that bound is not small relative to the result.

mod cognitive;
mod ratio;
pub mod rayleigh;
mod relay;

use crate::channel::{validate_for, Method, NetworkConfig};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub use cognitive::{cdf_cognitive, feasibility_dist, feasibility_dist_quad, FeasibilityDist};
pub use ratio::{cdf_ratio_gamma, cdf_ratio_gamma_quad, RatioParams};
pub use relay::{
    cdf_idl, cdf_idl_checked, cdf_idl_dt, cdf_idl_dt_checked, cdf_idl_dt_quad, cdf_idl_quad, cdf_ndl,
    cdf_ndl_quad, cdf_sdf, cdf_sdf_checked, cdf_sdf_quad,
};

/// Cooperation scheme at the relays and destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Multi-hop decode-and-forward, no source-destination link.
    Ndl,
    /// Multi-hop, the direct signal only interferes at the destination.
    Idl,
    /// As `Idl`, with direct transmission as an extra selection branch.
    IdlDt,
    /// Selective decode-and-forward over a virtual MISO second hop.
    Sdf,
    /// Half-duplex selection with maximal-ratio combining (simulation only).
    HdMrc,
    /// Half-duplex selective decode-and-forward (simulation only).
    HdSdf,
}

impl Protocol {
    pub const ALL: [Protocol; 6] = [
        Protocol::Ndl,
        Protocol::Idl,
        Protocol::IdlDt,
        Protocol::Sdf,
        Protocol::HdMrc,
        Protocol::HdSdf,
    ];
    pub const FULL_DUPLEX: [Protocol; 4] = [Protocol::Ndl, Protocol::Idl, Protocol::IdlDt, Protocol::Sdf];

    pub fn label(self) -> &'static str {
        match self {
            Protocol::Ndl => "NDL",
            Protocol::Idl => "IDL",
            Protocol::IdlDt => "IDL/DT",
            Protocol::Sdf => "SDF",
            Protocol::HdMrc => "HD-MRC",
            Protocol::HdSdf => "HD-SDF",
        }
    }

    /// Identifier used on the command line and in output files.
    pub fn key(self) -> &'static str {
        match self {
            Protocol::Ndl => "ndl",
            Protocol::Idl => "idl",
            Protocol::IdlDt => "idl_dt",
            Protocol::Sdf => "sdf",
            Protocol::HdMrc => "hd_mrc",
            Protocol::HdSdf => "hd_sdf",
        }
    }

    pub fn is_half_duplex(self) -> bool {
        matches!(self, Protocol::HdMrc | Protocol::HdSdf)
    }

    pub fn needs_direct_link(self) -> bool {
        !matches!(self, Protocol::Ndl)
    }

    /// Whether the destination can fall back to the direct signal alone.
    pub fn uses_direct_branch(self) -> bool {
        matches!(self, Protocol::IdlDt | Protocol::Sdf | Protocol::HdSdf)
    }

    /// SINR threshold for outage at source rate `rate` (bits per channel
    /// use). Half-duplex schemes need twice the rate over half the time.
    pub fn outage_threshold(self, rate: f64) -> f64 {
        if self.is_half_duplex() {
            rate_threshold(2.0 * rate)
        } else {
            rate_threshold(rate)
        }
    }

    /// Delivered rate given the outage probability at the source rate.
    pub fn throughput(self, rate: f64, p_out: f64) -> f64 {
        let t = rate * (1.0 - p_out);
        if self.is_half_duplex() {
            0.5 * t
        } else {
            t
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', '/'], "_");
        let p = match norm.as_str() {
            "ndl" | "mhdf_ndl" => Protocol::Ndl,
            "idl" | "mhdf_idl" => Protocol::Idl,
            "idl_dt" | "mhdf_idl_dt" => Protocol::IdlDt,
            "sdf" => Protocol::Sdf,
            "hd_mrc" => Protocol::HdMrc,
            "hd_sdf" => Protocol::HdSdf,
            _ => return Err(Error::InvalidInput(format!("unknown protocol '{s}'"))),
        };
        Ok(p)
    }
}

/// `2^R − 1`.
pub fn rate_threshold(rate: f64) -> f64 {
    rate.exp2() - 1.0
}

/// A closed-form value with a bound on the rounding error accumulated by
/// cancellation among its terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub value: f64,
    pub err_bound: f64,
}

impl Evaluated {
    /// True when the bound is within `rel` of the value.
    pub fn is_accurate(&self, rel: f64) -> bool {
        self.value > 0.0 && self.err_bound <= rel * self.value
    }
}

/// Relative accuracy demanded of a closed form before it is trusted over the
/// integral representation.
const TRUST_REL: f64 = 1e-6;

/// CDF of the end-to-end SINR of `protocol` with `l` relays available,
/// ignoring any cognitive constraint.
pub fn conditional_cdf(x: f64, cfg: &NetworkConfig, protocol: Protocol, l: usize) -> Result<f64> {
    let v = match protocol {
        Protocol::Ndl => cdf_ndl(x, cfg, l)?,
        Protocol::Idl => pick(cdf_idl_checked(x, cfg, l)?, || cdf_idl_quad(x, cfg, l))?,
        Protocol::IdlDt => pick(cdf_idl_dt_checked(x, cfg, l)?, || cdf_idl_dt_quad(x, cfg, l))?,
        Protocol::Sdf => pick(cdf_sdf_checked(x, cfg, l)?, || cdf_sdf_quad(x, cfg, l))?,
        Protocol::HdMrc | Protocol::HdSdf => return Err(no_closed_form(protocol)),
    };
    Ok(v)
}

fn pick(closed: Evaluated, fallback: impl FnOnce() -> Result<f64>) -> Result<f64> {
    if closed.value == 0.0 && closed.err_bound == 0.0 || closed.is_accurate(TRUST_REL) {
        Ok(closed.value)
    } else {
        fallback()
    }
}

pub(crate) fn no_closed_form(protocol: Protocol) -> Error {
    Error::Unsupported {
        func: "analytic",
        detail: format!("{} has no closed form; use the simulator", protocol.label()),
    }
}

/// End-to-end SINR CDF at `x`: all `K` relays when `cognitive` is false,
/// otherwise the mixture over the number of interference-feasible relays.
pub fn cdf(x: f64, cfg: &NetworkConfig, protocol: Protocol, cognitive: bool) -> Result<f64> {
    validate_for(cfg, protocol, Method::Analytic, cognitive)?;
    if cognitive {
        cdf_cognitive(x, cfg, protocol)
    } else {
        conditional_cdf(x, cfg, protocol, cfg.k)
    }
}

/// Outage probability at source rate `rate`.
pub fn outage(cfg: &NetworkConfig, protocol: Protocol, rate: f64, cognitive: bool) -> Result<f64> {
    check_rate(rate)?;
    cdf(protocol.outage_threshold(rate), cfg, protocol, cognitive)
}

/// Delivered rate `R(1 − P_out)`.
pub fn throughput(cfg: &NetworkConfig, protocol: Protocol, rate: f64, cognitive: bool) -> Result<f64> {
    let p = outage(cfg, protocol, rate, cognitive)?;
    Ok(protocol.throughput(rate, p))
}

pub(crate) fn check_rate(rate: f64) -> Result<()> {
    if rate > 0.0 && rate.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("rate must be positive, got {rate}")))
    }
}

/// `E[g(β) 1{β ≤ upper}]` for `β ~ Gamma(m, θ)`, by adaptive quadrature.
///
/// Works in the standardized variable `t = β/θ`, with `t = v^{1/m}` when
/// `m < 1` to absorb the density's endpoint singularity. The bulk
/// `t ≤ m + 60` is integrated directly and anything beyond through a
/// compactifying map, so neither tiny nor huge scales starve the rule of
/// sample points.
pub(crate) fn gamma_expectation(
    m: f64,
    theta: f64,
    upper: f64,
    g: impl Fn(f64) -> f64,
) -> Result<f64> {
    use crate::specfun::quad::{integrate, integrate_to_infinity, QuadOptions};
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-11,
        max_intervals: 4000,
    };
    let ln_norm = crate::specfun::ln_gamma(m)?;
    let small = m < 1.0;
    let to_t = |v: f64| if small { v.powf(1.0 / m) } else { v };
    let to_v = |t: f64| if small { t.powf(m) } else { t };
    let u_max = upper / theta;
    let integrand = |v: f64| -> f64 {
        let t = to_t(v);
        if t > u_max {
            return 0.0;
        }
        let w = if small {
            (-t - ln_norm - m.ln()).exp()
        } else if t == 0.0 {
            if m == 1.0 {
                (-ln_norm).exp()
            } else {
                0.0
            }
        } else {
            ((m - 1.0) * t.ln() - t - ln_norm).exp()
        };
        if w == 0.0 {
            0.0
        } else {
            w * g(theta * t)
        }
    };
    let split = m + 60.0;
    let bulk = integrate(&integrand, 0.0, to_v(split.min(u_max)), &opts)?.value;
    let tail = if u_max.is_infinite() {
        integrate_to_infinity(&integrand, to_v(split), &opts)?.value
    } else if u_max > split {
        // A finite cut-off would be a jump for the semi-infinite map.
        integrate(&integrand, to_v(split), to_v(u_max), &opts)?.value
    } else {
        0.0
    };
    Ok(bulk + tail)
}

/// `ln ∫_0^u (u − β)^D β^{m−1} e^{−βη} dβ` for `u > 0`.
///
/// Both sign branches are the Beta-times-Kummer form with a non-negative
/// hypergeometric argument; they are related by Kummer's transformation.
/// Where `|uη| < 1e-9` the shared limit `u^{D+m} B(D+1, m)` is used.
pub(crate) fn ln_riemann_liouville(u: f64, d: f64, m: f64, eta: f64) -> Result<f64> {
    use crate::specfun::{ln_beta, ln_kummer_m};
    let base = (d + m) * u.ln() + ln_beta(d + 1.0, m)?;
    let z = u * eta;
    if z.abs() < 1e-9 {
        Ok(base)
    } else if z < 0.0 {
        Ok(base + ln_kummer_m(m, d + m + 1.0, -z)?)
    } else {
        Ok(base - z + ln_kummer_m(d + 1.0, d + m + 1.0, z)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_and_throughput() {
        assert_eq!(Protocol::Ndl.outage_threshold(2.0), 3.0);
        assert_eq!(Protocol::HdMrc.outage_threshold(1.0), 3.0);
        assert_eq!(Protocol::Sdf.throughput(2.0, 0.0), 2.0);
        assert_eq!(Protocol::HdSdf.throughput(2.0, 0.0), 1.0);
        assert_eq!(Protocol::Idl.throughput(3.0, 0.25), 2.25);
    }

    #[test]
    fn protocol_names_round_trip() {
        for p in Protocol::ALL {
            assert_eq!(p.key().parse::<Protocol>().unwrap(), p);
            assert_eq!(p.label().parse::<Protocol>().unwrap(), p);
        }
        assert_eq!("MHDF_IDL_DT".parse::<Protocol>().unwrap(), Protocol::IdlDt);
        assert!("foo".parse::<Protocol>().is_err());
    }
}
