use super::gamma_expectation;
use crate::error::{Error, Result};
use crate::specfun::{is_integer, ln_gamma, ln_whittaker_w, reg_lower_gamma};

/// Parameters of `Z = X₁/(X₂ + 1)` with independent `X_i ~ Gamma(m_i, θ_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioParams {
    pub m1: f64,
    pub theta1: f64,
    pub m2: f64,
    pub theta2: f64,
}

impl RatioParams {
    pub fn new(m1: f64, theta1: f64, m2: f64, theta2: f64) -> Result<Self> {
        let p = Self { m1, theta1, m2, theta2 };
        p.check(false)?;
        Ok(p)
    }

    fn check(&self, closed_form: bool) -> Result<()> {
        let ok = self.m1 >= 0.5
            && self.m2 > 0.0
            && self.theta1 > 0.0
            && self.theta2 > 0.0
            && [self.m1, self.m2, self.theta1, self.theta2].iter().all(|v| v.is_finite());
        if !ok {
            return Err(Error::Domain {
                func: "cdf_ratio_gamma",
                detail: format!("invalid parameters {self:?}"),
            });
        }
        if closed_form && !is_integer(self.m2) {
            return Err(Error::Unsupported {
                func: "cdf_ratio_gamma",
                detail: format!("closed form needs integer m2, got {}", self.m2),
            });
        }
        Ok(())
    }
}

fn check_z(z: f64) -> Result<()> {
    if z >= 0.0 && !z.is_nan() {
        Ok(())
    } else {
        Err(Error::Domain {
            func: "cdf_ratio_gamma",
            detail: format!("z = {z} must be non-negative"),
        })
    }
}

/// `F_Z(z) = P(m₁, z/θ₁) + B Σ_{k<m₂} θ₂^{−k} c^{−d_k} W_{a_k, b_k}(c)` with
/// `c = z/θ₁ + 1/θ₂`, `a_k = (m₁−k−1)/2`, `b_k = −(m₁+k)/2`,
/// `d_k = (m₁+k+1)/2` and `B = e^{−(z/θ₁ − 1/θ₂)/2} (z/θ₁)^{m₁} / Γ(m₁)`.
///
/// Real `m₁ ≥ 1/2`, integer `m₂`. The Whittaker terms are combined with their
/// prefactors in log space, which keeps large `1/θ₂` (weak interference)
/// from overflowing the two exponentials that cancel each other.
pub fn cdf_ratio_gamma(z: f64, p: &RatioParams) -> Result<f64> {
    p.check(true)?;
    check_z(z)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    let u = z / p.theta1;
    if u.is_infinite() {
        return Ok(1.0);
    }
    let c = u + 1.0 / p.theta2;
    let ln_b = -0.5 * (u - 1.0 / p.theta2) + p.m1 * u.ln() - ln_gamma(p.m1)?;
    let mut total = reg_lower_gamma(p.m1, u)?;
    for k in 0..p.m2.round() as u32 {
        let kf = f64::from(k);
        let (ln_w, sign) = ln_whittaker_w((p.m1 - kf - 1.0) / 2.0, -(p.m1 + kf) / 2.0, c)?;
        let d = (p.m1 + kf + 1.0) / 2.0;
        total += sign * (ln_b - d * c.ln() - kf * p.theta2.ln() + ln_w).exp();
    }
    Ok(total.clamp(0.0, 1.0))
}

/// `F_Z(z) = E[P(m₁, z(X₂ + 1)/θ₁)]` by quadrature over `X₂`; any real
/// `m₂ > 0`.
pub fn cdf_ratio_gamma_quad(z: f64, p: &RatioParams) -> Result<f64> {
    p.check(false)?;
    check_z(z)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    let v = gamma_expectation(p.m2, p.theta2, f64::INFINITY, |y| {
        reg_lower_gamma(p.m1, z * (y + 1.0) / p.theta1).unwrap_or(f64::NAN)
    })?;
    Ok(v.clamp(0.0, 1.0))
}
