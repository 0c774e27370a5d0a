//! Chi-square quantiles by bisection on the regularised lower incomplete
//! gamma function.

use super::DiffusionError;

const MAX_ITER: usize = 500;
/// Absolute tolerance of the quantile search.
pub const QUANTILE_TOLERANCE: f64 = 1e-8;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1−x) = π / sin(πx)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularised lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> Result<f64, DiffusionError> {
    if !(a > 0.0 && a.is_finite()) || x.is_nan() || x < 0.0 {
        return Err(DiffusionError::Invalid(format!(
            "gamma_p({a}, {x}) out of domain"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        // P = e^{-x} x^a / Γ(a) · Σ xⁿ / (a(a+1)…(a+n))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * f64::EPSILON {
                return Ok((log_prefactor.exp() * sum).clamp(0.0, 1.0));
            }
        }
    } else {
        // Q by modified Lentz on the continued fraction, P = 1 − Q
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < f64::EPSILON {
                return Ok((1.0 - log_prefactor.exp() * h).clamp(0.0, 1.0));
            }
        }
    }
    Err(DiffusionError::Numeric(format!(
        "incomplete gamma did not converge for a={a}, x={x}"
    )))
}

pub fn chi2_cdf(x: f64, df: f64) -> Result<f64, DiffusionError> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    gamma_p(df / 2.0, x / 2.0)
}

/// The `p`-quantile of χ² with `df` degrees of freedom, to absolute
/// tolerance [`QUANTILE_TOLERANCE`].
pub fn chi2_quantile(p: f64, df: f64) -> Result<f64, DiffusionError> {
    if !(df > 0.0 && df.is_finite()) {
        return Err(DiffusionError::Invalid(format!("degrees of freedom {df}")));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(DiffusionError::Invalid(format!(
            "quantile level {p} outside [0, 1)"
        )));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = df.max(1.0);
    while chi2_cdf(hi, df)? < p {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(DiffusionError::Numeric(format!(
                "no finite bracket for p={p}, df={df}"
            )));
        }
    }
    while hi - lo > QUANTILE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if chi2_cdf(mid, df)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
