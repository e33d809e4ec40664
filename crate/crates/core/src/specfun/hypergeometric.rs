use super::gamma::ln_gamma_unchecked;
use super::quad::{integrate_to_infinity, QuadOptions};
use super::{is_integer, Accuracy, CompensatedSum};
use crate::error::{Error, Result};

fn nonpositive_integer(x: f64) -> Option<u32> {
    if x <= 0.0 && is_integer(x) && x > -1e6 {
        Some((-x).round() as u32)
    } else {
        None
    }
}

fn check_b(func: &'static str, b: f64) -> Result<()> {
    if nonpositive_integer(b).is_some() || !b.is_finite() {
        return Err(Error::Domain {
            func,
            detail: format!("b = {b} must not be a non-positive integer"),
        });
    }
    Ok(())
}

/// Confluent hypergeometric `M(a, b, z) = ₁F₁(a; b; z)`.
///
/// Negative arguments go through Kummer's transformation
/// `M(a, b, z) = e^z M(b − a, b, −z)` so that the summed series has
/// terms of one sign; positive arguments with `a, b > 0` are summed in log
/// space (or via the large-`z` expansion) so `e^z` growth cannot overflow
/// before the final exponentiation.
pub fn kummer_m(a: f64, b: f64, z: f64) -> Result<f64> {
    kummer_m_with(a, b, z, &Accuracy::default())
}

pub fn kummer_m_with(a: f64, b: f64, z: f64, acc: &Accuracy) -> Result<f64> {
    check_b("kummer_m", b)?;
    if z == 0.0 || a == 0.0 {
        return Ok(1.0);
    }
    if let Some(n) = nonpositive_integer(a) {
        return Ok(terminating_series(n, b, z));
    }
    if z < 0.0 {
        return Ok(z.exp() * kummer_m_with(b - a, b, -z, acc)?);
    }
    if a > 0.0 && b > 0.0 {
        return ln_kummer_m_with(a, b, z, acc).map(f64::exp);
    }
    direct_series(a, b, z, acc)
}

/// `Σ_{j=0}^{n} (−n)_j / (b)_j z^j / j!`
fn terminating_series(n: u32, b: f64, z: f64) -> f64 {
    let mut sum = CompensatedSum::new();
    let mut term = 1.0;
    sum.add(term);
    for j in 0..n {
        let j = f64::from(j);
        term *= (j - f64::from(n)) * z / ((b + j) * (j + 1.0));
        sum.add(term);
    }
    sum.value()
}

fn direct_series(a: f64, b: f64, z: f64, acc: &Accuracy) -> Result<f64> {
    let tol = acc.series_tol();
    let mut sum = CompensatedSum::new();
    let mut term = 1.0;
    sum.add(term);
    for n in 0..acc.max_terms {
        let nf = n as f64;
        term *= (a + nf) * z / ((b + nf) * (nf + 1.0));
        sum.add(term);
        // Only stop once the terms are past their peak.
        if nf > (a.abs() + b.abs() + z.abs()) && term.abs() <= tol * sum.value().abs() {
            return Ok(sum.value());
        }
    }
    Err(Error::NonConvergence {
        func: "kummer_m",
        terms: acc.max_terms,
    })
}

/// `ln M(a, b, z)` for `a > 0`, `b > 0`, `z ≥ 0`, where every series term is
/// positive.
pub fn ln_kummer_m(a: f64, b: f64, z: f64) -> Result<f64> {
    ln_kummer_m_with(a, b, z, &Accuracy::default())
}

pub(crate) fn ln_kummer_m_with(a: f64, b: f64, z: f64, acc: &Accuracy) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            func: "ln_kummer_m",
            detail: format!("needs a > 0, b > 0, finite z >= 0; got ({a}, {b}, {z})"),
        });
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if let Some(v) = ln_kummer_asymptotic(a, b, z, acc) {
        return Ok(v);
    }
    ln_positive_series(a, b, z, acc)
}

/// Power series with running rescaling; all terms are positive here.
fn ln_positive_series(a: f64, b: f64, z: f64, acc: &Accuracy) -> Result<f64> {
    const CEIL: f64 = 1e250;
    let tol = acc.series_tol();
    let mut offset = 0.0;
    let mut sum = 1.0;
    let mut comp = 0.0;
    let mut term = 1.0;
    for n in 0..acc.max_terms {
        let nf = n as f64;
        let ratio = (a + nf) * z / ((b + nf) * (nf + 1.0));
        term *= ratio;
        let t = sum + term;
        comp += (sum - t) + term;
        sum = t;
        if sum > CEIL {
            sum /= CEIL;
            comp /= CEIL;
            term /= CEIL;
            offset += CEIL.ln();
        }
        if ratio < 1.0 && term <= tol * sum {
            return Ok(offset + (sum + comp).ln());
        }
    }
    Err(Error::NonConvergence {
        func: "kummer_m",
        terms: acc.max_terms,
    })
}

/// Large-`z` expansion
/// `M ≈ Γ(b)/Γ(a) e^z z^{a−b} Σ_s (b−a)_s (1−a)_s / (s! z^s)`.
///
/// Returns `None` when the neglected algebraic part is not negligible or the
/// asymptotic sum starts diverging before reaching tolerance.
fn ln_kummer_asymptotic(a: f64, b: f64, z: f64, acc: &Accuracy) -> Option<f64> {
    if z < 30.0 {
        return None;
    }
    let tol = acc.series_tol();
    // Size of the dropped Γ(b)/Γ(b−a) (−z)^{−a} piece relative to the kept one.
    if nonpositive_integer(b - a).is_none() {
        let ln_gamma_abs = |x: f64| -> f64 {
            if x > 0.0 {
                ln_gamma_unchecked(x)
            } else {
                // Reflection: |Γ(x)| = π / (|sin πx| Γ(1−x)).
                std::f64::consts::PI.ln()
                    - (std::f64::consts::PI * x).sin().abs().ln()
                    - ln_gamma_unchecked(1.0 - x)
            }
        };
        let ln_ratio = -z + (b - 2.0 * a) * z.ln() + ln_gamma_unchecked(a) - ln_gamma_abs(b - a);
        if ln_ratio > tol.ln() {
            return None;
        }
    }
    let mut sum = CompensatedSum::new();
    let mut term = 1.0;
    sum.add(term);
    let mut prev = f64::INFINITY;
    for s in 0..200 {
        let sf = s as f64;
        term *= (b - a + sf) * (1.0 - a + sf) / ((sf + 1.0) * z);
        if term == 0.0 {
            break;
        }
        if term.abs() > prev {
            return None;
        }
        prev = term.abs();
        sum.add(term);
        if term.abs() <= tol * sum.value().abs() {
            break;
        }
    }
    let s = sum.value();
    if !(s > 0.0) {
        return None;
    }
    Some(ln_gamma_unchecked(b) - ln_gamma_unchecked(a) + z + (a - b) * z.ln() + s.ln())
}

/// `(ln|U(a, b, z)|, sign)`.
fn ln_tricomi_u(a: f64, b: f64, z: f64) -> Result<(f64, f64)> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            func: "tricomi_u",
            detail: format!("z = {z} must be positive and finite"),
        });
    }
    if let Some(n) = nonpositive_integer(a) {
        let v = laguerre_form(n, b, z);
        return Ok((v.abs().ln(), v.signum()));
    }
    // U(a, b, z) = z^{1−b} U(a − b + 1, 2 − b, z)
    let a2 = a - b + 1.0;
    if let Some(n) = nonpositive_integer(a2) {
        let v = laguerre_form(n, 2.0 - b, z);
        return Ok(((1.0 - b) * z.ln() + v.abs().ln(), v.signum()));
    }
    if a > 0.0 {
        return ln_u_integral(a, b, z).map(|l| (l, 1.0));
    }
    if a2 > 0.0 {
        return ln_u_integral(a2, 2.0 - b, z).map(|l| ((1.0 - b) * z.ln() + l, 1.0));
    }
    Err(Error::Unsupported {
        func: "tricomi_u",
        detail: format!(
            "neither a = {a} nor a - b + 1 = {a2} is positive or a non-positive integer"
        ),
    })
}

/// `U(−n, b, z) = (−1)^n Σ_j (−1)^j C(n, j) (b + j)_{n−j} z^j`, i.e.
/// `(−1)^n n! L_n^{(b−1)}(z)`; valid for every real `b`.
fn laguerre_form(n: u32, b: f64, z: f64) -> f64 {
    let mut sum = CompensatedSum::new();
    for j in 0..=n {
        let binom = super::binomial(n, j);
        let rising: f64 = (j..n).map(|i| b + f64::from(i)).product();
        let sign = if (n + j).is_multiple_of(2) { 1.0 } else { -1.0 };
        sum.add(sign * binom * rising * z.powi(j as i32));
    }
    sum.value()
}

/// `ln U` from `U = z^{−a}/Γ(a) ∫_0^∞ e^{−s} s^{a−1} (1 + s/z)^{b−a−1} ds`, `a > 0`.
fn ln_u_integral(a: f64, b: f64, z: f64) -> Result<f64> {
    let c = b - a - 1.0;
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    let integral = if a < 1.0 {
        // s = u^{1/a} removes the endpoint singularity: s^{a−1} ds = du / a.
        let inv = 1.0 / a;
        let r = integrate_to_infinity(
            |u| {
                let s = u.powf(inv);
                (-s + c * (s / z).ln_1p()).exp()
            },
            0.0,
            &opts,
        )?;
        r.value.ln() - a.ln()
    } else {
        let r = integrate_to_infinity(
            |s| {
                if s == 0.0 {
                    return if a == 1.0 { 1.0 } else { 0.0 };
                }
                ((a - 1.0) * s.ln() - s + c * (s / z).ln_1p()).exp()
            },
            0.0,
            &opts,
        )?;
        r.value.ln()
    };
    Ok(-a * z.ln() - ln_gamma_unchecked(a) + integral)
}

/// Tricomi confluent hypergeometric `U(a, b, z)` for `z > 0`.
///
/// Non-positive integer `a` (or `a − b + 1`) gives the exact Laguerre
/// polynomial form. Otherwise the Laplace integral representation is
/// integrated numerically after mapping to a positive first parameter;
/// parameter pairs where neither `a` nor `a − b + 1` is positive are
/// rejected.
pub fn tricomi_u(a: f64, b: f64, z: f64) -> Result<f64> {
    let (ln, sign) = ln_tricomi_u(a, b, z)?;
    Ok(sign * ln.exp())
}

/// Whittaker `W_{κ,μ}(z) = e^{−z/2} z^{μ+1/2} U(μ − κ + 1/2, 1 + 2μ, z)`.
pub fn whittaker_w(kappa: f64, mu: f64, z: f64) -> Result<f64> {
    let (ln, sign) = ln_whittaker_w(kappa, mu, z)?;
    Ok(sign * ln.exp())
}

/// `(ln|W_{κ,μ}(z)|, sign)`; lets callers fold the `e^{±z/2}` factors of
/// surrounding expressions together before exponentiating.
pub fn ln_whittaker_w(kappa: f64, mu: f64, z: f64) -> Result<(f64, f64)> {
    let (ln_u, sign) = ln_tricomi_u(mu - kappa + 0.5, 1.0 + 2.0 * mu, z)?;
    Ok((-0.5 * z + (mu + 0.5) * z.ln() + ln_u, sign))
}
