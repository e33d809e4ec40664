//! End-to-end SINR CDFs of the full-duplex selection protocols when `L`
//! relays are available.
//!
//! Given the direct-link SNR `β`, the `L` relayed paths are independent with
//! per-path CDF `1 − F̄_Z(x) F̄_X(·)`; the closed forms expand the `L`-th power
//! binomially, the integer-shape gamma tail multinomially, and integrate each
//! monomial in `β` exactly.

use super::{gamma_expectation, ln_riemann_liouville, Evaluated, Protocol};
use crate::analytic::ratio::{cdf_ratio_gamma, cdf_ratio_gamma_quad, RatioParams};
use crate::channel::{validate_for, Method, NetworkConfig};
use crate::error::{Error, Result};
use crate::specfun::{binomial, compositions, ln_gamma, ln_whittaker_w, reg_lower_gamma, CompensatedSum};

/// Per-term relative accuracy assumed when bounding cancellation error.
const TERM_REL_ERR: f64 = 1e-13;

struct Scales {
    p1: RatioParams,
    m_rd: f64,
    /// `P_R θ_RD`
    c_rd: f64,
    m_sd: f64,
    /// `P_S θ_SD`
    c_sd: f64,
}

fn scales(cfg: &NetworkConfig) -> Scales {
    let (m_sd, c_sd) = cfg.sd.map_or((1.0, 1.0), |sd| (sd.m, cfg.p_s * sd.theta()));
    Scales {
        p1: RatioParams {
            m1: cfg.sr.m,
            theta1: cfg.p_s * cfg.sr.theta(),
            m2: cfg.rr.m,
            theta2: cfg.rsi_gain() * cfg.rr.theta(),
        },
        m_rd: cfg.rd.m,
        c_rd: cfg.p_r * cfg.rd.theta(),
        m_sd,
        c_sd,
    }
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            func: "cdf",
            detail: format!("SINR threshold must be finite and non-negative, got {x}"),
        })
    }
}

fn closed_form_scales(cfg: &NetworkConfig, protocol: Protocol) -> Result<Scales> {
    validate_for(cfg, protocol, Method::Analytic, false)?;
    Ok(scales(cfg))
}

fn oracle_scales(cfg: &NetworkConfig, protocol: Protocol) -> Result<Scales> {
    validate_for(cfg, protocol, Method::MonteCarlo, false)?;
    Ok(scales(cfg))
}

/// `F_a + F_b − F_a F_b`, the CDF of the minimum of two independent
/// variables, without forming `1 − F̄_a F̄_b`.
fn min_cdf(fa: f64, fb: f64) -> f64 {
    (fa + fb - fa * fb).clamp(0.0, 1.0)
}

/// `(1 − F̄_Z(x) F̄_X(x))^L` with `X ~ Gamma(m_RD, P_R θ_RD)`.
pub fn cdf_ndl(x: f64, cfg: &NetworkConfig, l: usize) -> Result<f64> {
    check_x(x)?;
    let s = closed_form_scales(cfg, Protocol::Ndl)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let fz = cdf_ratio_gamma(x, &s.p1)?;
    let fx = reg_lower_gamma(s.m_rd, x / s.c_rd)?;
    Ok(min_cdf(fz, fx).powi(l as i32))
}

/// NDL CDF with the first-hop distribution integrated numerically.
pub fn cdf_ndl_quad(x: f64, cfg: &NetworkConfig, l: usize) -> Result<f64> {
    check_x(x)?;
    let s = oracle_scales(cfg, Protocol::Ndl)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let fz = cdf_ratio_gamma_quad(x, &s.p1)?;
    let fx = reg_lower_gamma(s.m_rd, x / s.c_rd)?;
    Ok(min_cdf(fz, fx).powi(l as i32))
}

/// `Σ_{k=0}^{L} C(L,k) (−F̄_Z)^k Σ_{compositions of k} mult · exp(inner(k, D))`
/// where `D = Σ k_n (n−1)` and `mult = k! / Π (k_n! Γ(n)^{k_n})`.
fn alternating_sum(
    l: usize,
    fbar_z: f64,
    m_rd: u32,
    mut inner: impl FnMut(u32, u32) -> Result<f64>,
) -> Result<Evaluated> {
    let l = l as u32;
    let mut sum = CompensatedSum::new();
    let mut abs = 0.0;
    for k in 0..=l {
        let outer = binomial(l, k) * (-fbar_z).powi(k as i32);
        if outer == 0.0 {
            continue;
        }
        // Compositions sharing the same D integrate identically; pool them.
        let mut weights = vec![0.0; (m_rd as usize - 1) * k as usize + 1];
        let ln_k_fact = ln_gamma(f64::from(k) + 1.0)?;
        for comp in compositions(k, m_rd as usize) {
            let mut d = 0usize;
            let mut ln_coef = ln_k_fact;
            for (i, &kn) in comp.iter().enumerate() {
                let n = i + 1;
                d += kn as usize * (n - 1);
                ln_coef -= ln_gamma(f64::from(kn) + 1.0)? + f64::from(kn) * ln_gamma(n as f64)?;
            }
            weights[d] += ln_coef.exp();
        }
        for (d, w) in weights.into_iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let t = outer * w * inner(k, d as u32)?.exp();
            sum.add(t);
            abs += t.abs();
        }
    }
    Ok(Evaluated {
        value: sum.value().clamp(0.0, 1.0),
        err_bound: TERM_REL_ERR * abs + f64::EPSILON * sum.value().abs(),
    })
}

/// Interfering direct link: the direct signal only adds to the noise at the
/// destination. Integer `m_RR`, `m_RD`; real `m_SR`, `m_SD`.
pub fn cdf_idl(x: f64, cfg: &NetworkConfig, l: usize) -> Result<f64> {
    cdf_idl_checked(x, cfg, l).map(|e| e.value)
}

/// [`cdf_idl`] together with its cancellation error bound.
pub fn cdf_idl_checked(x: f64, cfg: &NetworkConfig, l: usize) -> Result<Evaluated> {
    check_x(x)?;
    let s = closed_form_scales(cfg, Protocol::Idl)?;
    if x == 0.0 {
        return Ok(Evaluated { value: 0.0, err_bound: 0.0 });
    }
    let fbar_z = 1.0 - cdf_ratio_gamma(x, &s.p1)?;
    let m = s.m_sd;
    let norm = m * s.c_sd.ln();
    let ln_ratio = (x / s.c_rd).ln();
    alternating_sum(l, fbar_z, s.m_rd.round() as u32, |k, d| {
        let (k, d) = (f64::from(k), f64::from(d));
        let eta = 1.0 / s.c_sd + x * k / s.c_rd;
        // ∫_0^∞ (β+1)^D β^{m−1} e^{−βη} dβ = Γ(m) e^{η/2} η^{−(m+D+1)/2} W(η);
        // the Γ(m) cancels the density normaliser.
        let (ln_w, _) = ln_whittaker_w((d - m + 1.0) / 2.0, -(m + d) / 2.0, eta)?;
        let ln_i2 = 0.5 * eta - 0.5 * (m + d + 1.0) * eta.ln() + ln_w;
        Ok(-x * k / s.c_rd + d * ln_ratio + ln_i2 - norm)
    })
}

/// IDL CDF from its defining integral over the direct-link SNR.
pub fn cdf_idl_quad(x: f64, cfg: &NetworkConfig, l: usize) -> Result<f64> {
    check_x(x)?;
    let s = oracle_scales(cfg, Protocol::Idl)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let fz = cdf_ratio_gamma_quad(x, &s.p1)?;
    let v = gamma_expectation(s.m_sd, s.c_sd, f64::INFINITY, |beta| {
        let fx = reg_lower_gamma(s.m_rd, x * (beta + 1.0) / s.c_rd).unwrap_or(f64::NAN);
        min_cdf(fz, fx).powi(l as i32)
    })?;
    Ok(v.clamp(0.0, 1.0))
}

/// Hybrid IDL with direct transmission as an extra branch. Integer `m_RR`,
/// `m_RD`, `m_SD`; real `m_SR`.
pub fn cdf_idl_dt(x: f64, cfg: &NetworkConfig, l: usize) -> Result<f64> {
    cdf_idl_dt_checked(x, cfg, l).map(|e| e.value)
}

/// [`cdf_idl_dt`] together with its cancellation error bound.
pub fn cdf_idl_dt_checked(x: f64, cfg: &NetworkConfig, l: usize) -> Result<Evaluated> {
    check_x(x)?;
    let s = closed_form_scales(cfg, Protocol::IdlDt)?;
    if x == 0.0 {
        return Ok(Evaluated { value: 0.0, err_bound: 0.0 });
    }
    let fbar_z = 1.0 - cdf_ratio_gamma(x, &s.p1)?;
    let m = s.m_sd;
    let norm = ln_gamma(m)? + m * s.c_sd.ln();
    let ln_ratio = (x / s.c_rd).ln();
    alternating_sum(l, fbar_z, s.m_rd.round() as u32, |k, d| {
        let eta = 1.0 / s.c_sd + x * f64::from(k) / s.c_rd;
        // ∫_0^x (β+1)^D β^{m−1} e^{−βη} dβ
        //   = Σ_r C(D, r) η^{−(r+m)} γ(r+m, xη)
        let mut logs = Vec::with_capacity(d as usize + 1);
        for r in 0..=d {
            let a = f64::from(r) + m;
            let p = reg_lower_gamma(a, x * eta)?;
            logs.push(binomial(d, r).ln() + ln_gamma(a)? - a * eta.ln() + p.ln());
        }
        let ln_i2 = log_sum_exp(&logs);
        Ok(-x * f64::from(k) / s.c_rd + f64::from(d) * ln_ratio + ln_i2 - norm)
    })
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + v.iter().map(|&a| (a - hi).exp()).sum::<f64>().ln()
}

/// IDL/DT CDF from its defining integral, `β` restricted to `[0, x]`.
pub fn cdf_idl_dt_quad(x: f64, cfg: &NetworkConfig, l: usize) -> Result<f64> {
    check_x(x)?;
    let s = oracle_scales(cfg, Protocol::IdlDt)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let fz = cdf_ratio_gamma_quad(x, &s.p1)?;
    let v = gamma_expectation(s.m_sd, s.c_sd, x, |beta| {
        let fx = reg_lower_gamma(s.m_rd, x * (beta + 1.0) / s.c_rd).unwrap_or(f64::NAN);
        min_cdf(fz, fx).powi(l as i32)
    })?;
    Ok(v.clamp(0.0, 1.0))
}

/// Selective decode-and-forward with the virtual MISO second hop
/// `P_R g_kD + P_S g_SD`. Integer `m_RR`, `m_RD`, `m_SD`; real `m_SR`.
pub fn cdf_sdf(x: f64, cfg: &NetworkConfig, l: usize) -> Result<f64> {
    cdf_sdf_checked(x, cfg, l).map(|e| e.value)
}

/// [`cdf_sdf`] together with its cancellation error bound.
pub fn cdf_sdf_checked(x: f64, cfg: &NetworkConfig, l: usize) -> Result<Evaluated> {
    check_x(x)?;
    let s = closed_form_scales(cfg, Protocol::Sdf)?;
    if x == 0.0 {
        return Ok(Evaluated { value: 0.0, err_bound: 0.0 });
    }
    let fbar_z = 1.0 - cdf_ratio_gamma(x, &s.p1)?;
    let m = s.m_sd;
    let norm = ln_gamma(m)? + m * s.c_sd.ln();
    let ln_c_rd = s.c_rd.ln();
    alternating_sum(l, fbar_z, s.m_rd.round() as u32, |k, d| {
        let k = f64::from(k);
        let d = f64::from(d);
        let eta_hat = 1.0 / s.c_sd - k / s.c_rd;
        let ln_i2 = ln_riemann_liouville(x, d, m, eta_hat)?;
        Ok(-k * x / s.c_rd - d * ln_c_rd + ln_i2 - norm)
    })
}

/// SDF CDF from its defining integral, `β` restricted to `[0, x]`.
pub fn cdf_sdf_quad(x: f64, cfg: &NetworkConfig, l: usize) -> Result<f64> {
    check_x(x)?;
    let s = oracle_scales(cfg, Protocol::Sdf)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let fz = cdf_ratio_gamma_quad(x, &s.p1)?;
    let v = gamma_expectation(s.m_sd, s.c_sd, x, |beta| {
        let fx = reg_lower_gamma(s.m_rd, ((x - beta) / s.c_rd).max(0.0)).unwrap_or(f64::NAN);
        min_cdf(fz, fx).powi(l as i32)
    })?;
    Ok(v.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{db_to_linear, LinkSpec};

    fn link(m: f64, db: f64) -> LinkSpec {
        LinkSpec::new(m, db_to_linear(db)).unwrap()
    }

    /// Reference non-cognitive scenario: m = 2 throughout, K = 3, λ = 1.
    fn fig2a() -> NetworkConfig {
        NetworkConfig::new(3, 1.0, 1.0, 1.0, link(2.0, 15.0), link(2.0, 15.0), link(2.0, 3.0))
            .with_direct_link(link(2.0, 5.0))
    }

    fn rayleigh(p: f64, pi_sd: f64) -> NetworkConfig {
        NetworkConfig::new(2, p, p, 1.0, link(1.0, 10.0), link(1.0, 10.0), link(1.0, 0.0))
            .with_direct_link(LinkSpec::new(1.0, pi_sd).unwrap())
    }

    #[test]
    fn ndl_rayleigh_example() {
        let cfg = rayleigh(10.0, 1.0);
        let want = (1.0 - (-0.06f64).exp() / 1.3).powi(2);
        assert!((cdf_ndl(3.0, &cfg, 2).unwrap() - want).abs() < 1e-14);
        assert!((want - 0.075_936).abs() < 1e-6);
    }

    #[test]
    fn idl_rayleigh_example() {
        let cfg = rayleigh(10.0, 1.0);
        let want = 1.0 - ((-0.06f64).exp() / 1.3) / 1.3;
        assert!((cdf_idl(3.0, &cfg, 1).unwrap() - want).abs() < 1e-13);
        assert!((want - 0.442_742).abs() < 1e-6);
    }

    #[test]
    fn zero_threshold_gives_zero() {
        let cfg = fig2a();
        assert_eq!(cdf_ndl(0.0, &cfg, 3).unwrap(), 0.0);
        assert_eq!(cdf_idl(0.0, &cfg, 3).unwrap(), 0.0);
        assert_eq!(cdf_idl_dt(0.0, &cfg, 3).unwrap(), 0.0);
        assert_eq!(cdf_sdf(0.0, &cfg, 3).unwrap(), 0.0);
    }

    #[test]
    fn ndl_product_form() {
        let cfg = fig2a();
        for &x in &[0.2, 1.0, 3.0, 9.0] {
            let one = cdf_ndl(x, &cfg, 1).unwrap();
            assert!((cdf_ndl(x, &cfg, 3).unwrap() - one.powi(3)).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_forms_match_integrals() {
        let cfg = fig2a();
        for &x in &[0.05, 0.5, 1.0, 3.0, 7.0, 15.0, 40.0] {
            for l in 1..=3 {
                let pairs = [
                    (cdf_ndl(x, &cfg, l).unwrap(), cdf_ndl_quad(x, &cfg, l).unwrap()),
                    (cdf_idl(x, &cfg, l).unwrap(), cdf_idl_quad(x, &cfg, l).unwrap()),
                    (cdf_idl_dt(x, &cfg, l).unwrap(), cdf_idl_dt_quad(x, &cfg, l).unwrap()),
                    (cdf_sdf(x, &cfg, l).unwrap(), cdf_sdf_quad(x, &cfg, l).unwrap()),
                ];
                for (i, (a, b)) in pairs.into_iter().enumerate() {
                    assert!((a - b).abs() < 1e-9, "protocol {i} x={x} L={l}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn real_valued_shapes_where_allowed() {
        let mut cfg = fig2a();
        cfg.sr.m = 1.5;
        cfg.sd = Some(link(0.5, 5.0));
        for &x in &[0.5, 3.0] {
            let a = cdf_idl(x, &cfg, 2).unwrap();
            let b = cdf_idl_quad(x, &cfg, 2).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        assert!(cdf_idl_dt(1.0, &cfg, 2).is_err());
        assert!(cdf_idl_dt_quad(1.0, &cfg, 2).is_ok());
    }

    #[test]
    fn vanishing_direct_link_recovers_ndl() {
        let mut cfg = fig2a();
        cfg.sd = Some(LinkSpec::new(2.0, 1e-8).unwrap());
        for &x in &[0.5, 3.0, 10.0] {
            let ndl = cdf_ndl(x, &cfg, 3).unwrap();
            assert!((cdf_idl(x, &cfg, 3).unwrap() - ndl).abs() < 1e-5);
            assert!((cdf_sdf(x, &cfg, 3).unwrap() - ndl).abs() < 1e-5);
        }
    }

    #[test]
    fn sdf_reaches_one() {
        let cfg = fig2a();
        assert!(cdf_sdf(1e6, &cfg, 3).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn cancellation_bound_flags_deep_tails() {
        let mut cfg = fig2a().with_power(db_to_linear(50.0));
        cfg.lambda = 0.0;
        let e = cdf_idl_dt_checked(3.0, &cfg, 3).unwrap();
        assert!(!e.is_accurate(1e-6), "{e:?}");
        let q = cdf_idl_dt_quad(3.0, &cfg, 3).unwrap();
        assert!(q > 0.0 && q < 1e-12, "{q}");
    }
}
