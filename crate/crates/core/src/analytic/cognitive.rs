//! Interference feasibility at the primary receiver and the resulting
//! mixture CDFs.
//!
//! Relay `k` may be selected only if `P_S g_SP + P_R g_kP ≤ I_th`. The source
//! term is shared, so the `K` events are independent only given
//! `β = P_S g_SP`; the number of feasible relays is binomial conditionally and
//! a mixture of binomials overall.

use super::{conditional_cdf, gamma_expectation, ln_riemann_liouville, no_closed_form, Protocol};
use crate::channel::{validate_feasibility, validate_for, Cognitive, Method, NetworkConfig};
use crate::error::Result;
use crate::specfun::{binomial, compositions, ln_gamma, reg_lower_gamma, reg_upper_gamma, CompensatedSum};
use serde::{Deserialize, Serialize};

/// Distribution of the number `L` of interference-feasible relays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityDist {
    /// `p[L]` for `L = 0..=K`.
    pub p: Vec<f64>,
    /// Probability that no relay is feasible but the source alone is.
    pub p_tilde0: f64,
}

impl FeasibilityDist {
    pub fn k(&self) -> usize {
        self.p.len() - 1
    }

    /// Probability that the source alone violates the threshold.
    pub fn p_source_blocked(&self) -> f64 {
        (self.p[0] - self.p_tilde0).max(0.0)
    }
}

struct Scales {
    m_sp: f64,
    /// `P_S θ_SP`
    c_sp: f64,
    m_rp: f64,
    /// `P_R θ_RP`
    c_rp: f64,
    ith: f64,
}

fn scales(cfg: &NetworkConfig, c: &Cognitive) -> Scales {
    Scales {
        m_sp: c.sp.m,
        c_sp: cfg.p_s * c.sp.theta(),
        m_rp: c.rp.m,
        c_rp: cfg.p_r * c.rp.theta(),
        ith: c.ith,
    }
}

/// `J(j) = E[Q(m_RP, (I_th − β)/(P_R θ_RP))^j; β ≤ I_th]`: the probability
/// that the source is admissible and `j` given relays are not.
fn j_closed(s: &Scales, j: u32) -> Result<f64> {
    let m_rp = s.m_rp.round() as usize;
    let eta = 1.0 / s.c_sp - f64::from(j) / s.c_rp;
    let norm = ln_gamma(s.m_sp)? + s.m_sp * s.c_sp.ln();
    let ln_j_fact = ln_gamma(f64::from(j) + 1.0)?;
    let mut sum = CompensatedSum::new();
    for comp in compositions(j, m_rp) {
        let mut d = 0u32;
        let mut ln_coef = ln_j_fact;
        for (i, &kn) in comp.iter().enumerate() {
            d += kn * i as u32;
            ln_coef -= ln_gamma(f64::from(kn) + 1.0)? + f64::from(kn) * ln_gamma((i + 1) as f64)?;
        }
        let d = f64::from(d);
        let ln_i2 = ln_riemann_liouville(s.ith, d, s.m_sp, eta)?;
        sum.add((ln_coef - f64::from(j) * s.ith / s.c_rp - d * s.c_rp.ln() + ln_i2 - norm).exp());
    }
    Ok(sum.value())
}

/// Closed-form distribution of the number of feasible relays, with the
/// direct-transmission sub-event. Needs integer `m_RP`.
pub fn feasibility_dist(cfg: &NetworkConfig) -> Result<FeasibilityDist> {
    let c = validate_feasibility(cfg, Method::Analytic)?;
    let s = scales(cfg, &c);
    let k = cfg.k as u32;
    let js = (0..=k).map(|j| j_closed(&s, j)).collect::<Result<Vec<_>>>()?;
    let q_sp = reg_upper_gamma(s.m_sp, s.ith / s.c_sp)?;
    let mut p = Vec::with_capacity(cfg.k + 1);
    p.push((q_sp + js[k as usize]).clamp(0.0, 1.0));
    for l in 1..=k {
        let mut sum = CompensatedSum::new();
        for i in 0..=l {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sum.add(sign * binomial(l, i) * js[(k - l + i) as usize]);
        }
        p.push((binomial(k, l) * sum.value()).clamp(0.0, 1.0));
    }
    Ok(FeasibilityDist {
        p,
        p_tilde0: js[k as usize].clamp(0.0, 1.0),
    })
}

/// Feasibility distribution by quadrature of the conditional binomial law
/// over the source interference; any real shapes.
pub fn feasibility_dist_quad(cfg: &NetworkConfig) -> Result<FeasibilityDist> {
    let c = validate_feasibility(cfg, Method::MonteCarlo)?;
    let s = scales(cfg, &c);
    let k = cfg.k as i32;
    let arg = |beta: f64| ((s.ith - beta) / s.c_rp).max(0.0);
    // Both tails are evaluated directly; `1 − P` would lose the tiny blocking
    // probabilities that dominate when the threshold is generous.
    let ok_prob = |beta: f64| reg_lower_gamma(s.m_rp, arg(beta)).unwrap_or(f64::NAN);
    let blocked_prob = |beta: f64| reg_upper_gamma(s.m_rp, arg(beta)).unwrap_or(f64::NAN);
    let q_sp = reg_upper_gamma(s.m_sp, s.ith / s.c_sp)?;
    let p_tilde0 = gamma_expectation(s.m_sp, s.c_sp, s.ith, |b| blocked_prob(b).powi(k))?;
    let mut p = vec![q_sp + p_tilde0];
    for l in 1..=k {
        let v = gamma_expectation(s.m_sp, s.c_sp, s.ith, |b| ok_prob(b).powi(l) * blocked_prob(b).powi(k - l))?;
        p.push(binomial(k as u32, l as u32) * v);
    }
    Ok(FeasibilityDist { p, p_tilde0 })
}

/// End-to-end CDF under the interference constraint: the mixture over the
/// number of feasible relays. With no feasible relay the relay-only
/// protocols are in outage; the direct-link protocols still transmit
/// directly when the source alone is admissible.
pub fn cdf_cognitive(x: f64, cfg: &NetworkConfig, protocol: Protocol) -> Result<f64> {
    if protocol.is_half_duplex() {
        return Err(no_closed_form(protocol));
    }
    validate_for(cfg, protocol, Method::Analytic, true)?;
    let fd = feasibility_dist(cfg)?;
    mixture(x, cfg, protocol, &fd)
}

pub(crate) fn mixture(x: f64, cfg: &NetworkConfig, protocol: Protocol, fd: &FeasibilityDist) -> Result<f64> {
    let mut total = CompensatedSum::new();
    total.add(fd.p[0]);
    if protocol.uses_direct_branch() {
        let sd = cfg.sd.expect("validated direct link");
        let sf_sd = reg_upper_gamma(sd.m, x / (cfg.p_s * sd.theta()))?;
        total.add(-sf_sd * fd.p_tilde0);
    }
    for (l, &pl) in fd.p.iter().enumerate().skip(1) {
        if pl > 0.0 {
            total.add(conditional_cdf(x, cfg, protocol, l)? * pl);
        }
    }
    Ok(total.value().clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{db_to_linear, LinkSpec};

    fn link(m: f64, db: f64) -> LinkSpec {
        LinkSpec::new(m, db_to_linear(db)).unwrap()
    }

    fn fig2b() -> NetworkConfig {
        NetworkConfig::new(3, 1.0, 1.0, 1.0, link(2.0, 15.0), link(2.0, 15.0), link(2.0, 3.0))
            .with_direct_link(link(2.0, 5.0))
            .with_cognitive(link(1.0, 0.0), link(1.0, 1.0), db_to_linear(3.0))
    }

    #[test]
    fn erlang_single_relay() {
        let one = LinkSpec::new(1.0, 1.0).unwrap();
        let cfg = NetworkConfig::new(1, 1.0, 1.0, 0.0, one, one, one).with_cognitive(one, one, 2.0);
        let fd = feasibility_dist(&cfg).unwrap();
        let want = 1.0 - 3.0 * (-2.0f64).exp();
        assert!((fd.p[1] - want).abs() < 1e-12, "{}", fd.p[1]);
        assert!((want - 0.593_994_2).abs() < 1e-7);
    }

    #[test]
    fn sums_to_one_and_matches_quadrature() {
        let mut cfg = fig2b();
        for &(m_sp, m_rp) in &[(1.0, 1.0), (2.0, 3.0), (0.5, 2.0), (2.5, 1.0)] {
            cfg.sp = Some(link(m_sp, 0.0));
            cfg.rp = Some(link(m_rp, 1.0));
            for &ith_db in &[-5.0, 3.0, 12.0] {
                cfg.ith = Some(db_to_linear(ith_db));
                let a = feasibility_dist(&cfg).unwrap();
                let b = feasibility_dist_quad(&cfg).unwrap();
                assert!((a.p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                assert!(a.p_tilde0 <= a.p[0]);
                for (x, y) in a.p.iter().zip(&b.p) {
                    assert!((x - y).abs() < 1e-9, "{m_sp} {m_rp} {ith_db}: {a:?} vs {b:?}");
                }
                assert!((a.p_tilde0 - b.p_tilde0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn threshold_extremes() {
        let mut cfg = fig2b();
        cfg.ith = Some(1e9);
        let fd = feasibility_dist(&cfg).unwrap();
        assert!((fd.p[3] - 1.0).abs() < 1e-9);
        for p in [Protocol::Ndl, Protocol::Sdf] {
            let plain = conditional_cdf(3.0, &cfg, p, 3).unwrap();
            assert!((cdf_cognitive(3.0, &cfg, p).unwrap() - plain).abs() < 1e-6);
        }
        cfg.ith = Some(1e-12);
        for x in [0.1, 3.0, 100.0] {
            assert!((cdf_cognitive(x, &cfg, Protocol::Ndl).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn direct_link_jump_at_origin() {
        let cfg = fig2b();
        let fd = feasibility_dist(&cfg).unwrap();
        let f0 = cdf_cognitive(0.0, &cfg, Protocol::IdlDt).unwrap();
        assert!((f0 - fd.p_source_blocked()).abs() < 1e-14);
        assert!((cdf_cognitive(0.0, &cfg, Protocol::Ndl).unwrap() - fd.p[0]).abs() < 1e-14);
    }

    #[test]
    fn delta_mixture_is_plain_cdf() {
        let cfg = fig2b();
        let delta = FeasibilityDist {
            p: vec![0.0, 0.0, 0.0, 1.0],
            p_tilde0: 0.0,
        };
        for p in Protocol::FULL_DUPLEX {
            let a = mixture(2.0, &cfg, p, &delta).unwrap();
            assert_eq!(a, conditional_cdf(2.0, &cfg, p, 3).unwrap());
        }
    }
}
