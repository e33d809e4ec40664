//! Elementary outage expressions for Rayleigh fading (every `m = 1`) with
//! equal source and relay power `P`.
//!
//! With `x` the SINR threshold, `a = x(1/π_SR + 1/π_RD)`,
//! `b = x π_RR/π_SR`, `c_k = x k π_SD/π_RD + 1` and
//! `d_k = x(x k/π_RD + 1/π_SD)`, each protocol reduces to a finite sum of
//! exponentials. These serve as an independent check of the general
//! Nakagami forms and show the high-power behaviour directly.

use crate::specfun::binomial;

/// Average link powers and RSI scaling of a Rayleigh scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighParams {
    pub k: u32,
    pub lambda: f64,
    pub pi_sr: f64,
    pub pi_rd: f64,
    pub pi_rr: f64,
    pub pi_sd: f64,
}

impl RayleighParams {
    pub fn a(&self, x: f64) -> f64 {
        x * (1.0 / self.pi_sr + 1.0 / self.pi_rd)
    }

    pub fn b(&self, x: f64) -> f64 {
        x * self.pi_rr / self.pi_sr
    }

    pub fn c(&self, x: f64, k: u32) -> f64 {
        x * f64::from(k) * self.pi_sd / self.pi_rd + 1.0
    }

    pub fn d(&self, x: f64, k: u32) -> f64 {
        x * (x * f64::from(k) / self.pi_rd + 1.0 / self.pi_sd)
    }

    /// Probability that one relayed path supports `x`:
    /// `e^{−a/P} / (1 + b P^{λ−1})`.
    fn path_success(&self, x: f64, p: f64) -> f64 {
        (-self.a(x) / p).exp() / (1.0 + self.b(x) * p.powf(self.lambda - 1.0))
    }

    fn binomial_sum(&self, x: f64, p: f64, weight: impl Fn(u32) -> f64) -> f64 {
        let s = self.path_success(x, p);
        (0..=self.k)
            .map(|k| binomial(self.k, k) * (-s).powi(k as i32) * weight(k))
            .sum()
    }

    /// `(1 − e^{−a/P}/(1 + b P^{λ−1}))^K`
    pub fn outage_ndl(&self, x: f64, p: f64) -> f64 {
        (1.0 - self.path_success(x, p)).powi(self.k as i32)
    }

    /// `Σ_k C(K,k) (−e^{−a/P}/(1 + b P^{λ−1}))^k / c_k`
    pub fn outage_idl(&self, x: f64, p: f64) -> f64 {
        self.binomial_sum(x, p, |k| 1.0 / self.c(x, k))
    }

    /// `Σ_k C(K,k) (−e^{−a/P}/(1 + b P^{λ−1}))^k (1 − e^{−d_k/P}) / c_k`
    pub fn outage_idl_dt(&self, x: f64, p: f64) -> f64 {
        self.binomial_sum(x, p, |k| -(-self.d(x, k) / p).exp_m1() / self.c(x, k))
    }

    /// `Σ_k C(K,k) (−e^{−a/P}/(1 + b P^{λ−1}))^k (1 − e^{−p_k}) / q_k` with
    /// `p_k = x(1/(Pπ_SD) − k/(Pπ_RD))` and `q_k = 1 − kπ_SD/π_RD`; the
    /// `q_k = 0` term takes its limit `x/(Pπ_SD)`.
    pub fn outage_sdf(&self, x: f64, p: f64) -> f64 {
        self.binomial_sum(x, p, |k| {
            let kf = f64::from(k);
            let q = 1.0 - kf * self.pi_sd / self.pi_rd;
            let pk = x * (1.0 / (p * self.pi_sd) - kf / (p * self.pi_rd));
            if pk.abs() < 1e-12 {
                x / (p * self.pi_sd)
            } else {
                -(-pk).exp_m1() / q
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        let r = RayleighParams {
            k: 2,
            lambda: 1.0,
            pi_sr: 10.0,
            pi_rd: 10.0,
            pi_rr: 1.0,
            pi_sd: 1.0,
        };
        assert!((r.outage_ndl(3.0, 10.0) - 0.075_936).abs() < 1e-6);
        let one = RayleighParams { k: 1, ..r };
        assert!((one.outage_idl(3.0, 10.0) - 0.442_742).abs() < 1e-6);
    }

    #[test]
    fn high_power_trends() {
        let r = RayleighParams {
            k: 3,
            lambda: 0.0,
            pi_sr: 10.0,
            pi_rd: 10.0,
            pi_rr: 2.0,
            pi_sd: 1.0,
        };
        // Direct transmission drives IDL/DT to zero; IDL keeps a floor.
        let (lo, hi) = (1e3, 1e4);
        assert!(r.outage_idl_dt(3.0, hi) < r.outage_idl_dt(3.0, lo) / 1e3);
        assert!(r.outage_idl(3.0, hi) > 0.5 * r.outage_idl(3.0, lo));
        assert!(r.outage_sdf(3.0, hi) <= r.outage_idl_dt(3.0, hi) + 1e-15);
    }
}
