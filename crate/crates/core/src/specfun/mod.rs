//! Special functions behind every closed-form expression in the crate.
//!
//! All routines are pure and reentrant. Series are summed with Neumaier
//! compensation; the positive-argument hypergeometric series additionally
//! run in log space so that `e^z`-sized intermediates never overflow.

mod combinatorics;
mod gamma;
mod hypergeometric;
pub mod quad;

pub use combinatorics::{binomial, compositions, Compositions};
pub use gamma::{
    beta_fn, gamma_cdf, gamma_pdf, gamma_sf, ln_beta, ln_gamma, reg_lower_gamma,
    reg_lower_gamma_with, reg_upper_gamma, reg_upper_gamma_with,
};
pub use hypergeometric::{
    kummer_m, kummer_m_with, ln_kummer_m, ln_whittaker_w, tricomi_u, whittaker_w,
};

/// Convergence controls shared by the series evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accuracy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for Accuracy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

impl Accuracy {
    pub fn new(rel_tol: f64, max_terms: usize) -> crate::Result<Self> {
        if !(rel_tol > 0.0) || max_terms < 1 {
            return Err(crate::Error::InvalidInput(format!(
                "accuracy requires rel_tol > 0 and max_terms >= 1, got {rel_tol}, {max_terms}"
            )));
        }
        Ok(Self { rel_tol, max_terms })
    }

    /// Per-term stopping threshold: three digits of headroom below the
    /// requested relative accuracy, floored at half an ulp.
    pub(crate) fn series_tol(&self) -> f64 {
        (self.rel_tol * 1e-3).max(f64::EPSILON * 0.5)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// True when `x` is within `1e-9` of an integer.
pub(crate) fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() < 1e-9
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: CompensatedSum = [1.0, 1e-16, -1.0, 1e-16].into_iter().collect();
        assert!((s.value() - 2e-16).abs() < 1e-30);
    }

    #[test]
    fn accuracy_rejects_bad_values() {
        assert!(Accuracy::new(0.0, 10).is_err());
        assert!(Accuracy::new(1e-10, 0).is_err());
        assert!(Accuracy::new(1e-10, 1).is_ok());
    }
}
