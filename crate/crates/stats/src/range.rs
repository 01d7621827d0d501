//! The studentized range distribution, by numerical integration.
//!
//! For `k` independent standard normals the range `W` has
//! `P(W <= w) = k ∫ φ(z) [Φ(z) − Φ(z − w)]^(k−1) dz`. The studentized range
//! `Q = W / S`, with `S² ~ χ²_ν / ν` independent of `W`, then has
//! `P(Q <= q) = ∫ f_S(s) P(W <= q·s) ds`.

use std::f64::consts::{PI, SQRT_2};

use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Result};
use crate::quad::integrate;

const INNER_TOL: f64 = 1e-10;
const OUTER_TOL: f64 = 1e-9;
// Standard normal mass beyond 9 is about 1e-19.
const NORMAL_REACH: f64 = 9.0;

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// `Φ(z) − Φ(z − w)` for `w ≥ 0`, computed from whichever tail keeps
/// precision.
fn normal_interval_mass(z: f64, w: f64) -> f64 {
    if z > 0.5 * w {
        0.5 * (erfc((z - w) / SQRT_2) - erfc(z / SQRT_2))
    } else {
        0.5 * (erfc(-z / SQRT_2) - erfc(-(z - w) / SQRT_2))
    }
}

/// CDF of the range of `k` independent standard normals.
pub fn range_cdf_normal(w: f64, k: usize) -> f64 {
    if w <= 0.0 || k < 2 {
        return if k < 2 && w >= 0.0 { 1.0 } else { 0.0 };
    }
    let power = (k - 1) as i32;
    let f = |z: f64| normal_pdf(z) * normal_interval_mass(z, w).powi(power);
    let mid = 0.5 * w;
    let total = integrate(f, -NORMAL_REACH, mid, INNER_TOL) + integrate(f, mid, w + NORMAL_REACH, INNER_TOL);
    (k as f64 * total).clamp(0.0, 1.0)
}

/// Log density of `S = sqrt(χ²_ν / ν)`.
fn ln_scale_density(s: f64, df: f64) -> f64 {
    let h = 0.5 * df;
    std::f64::consts::LN_2 + h * h.ln() - ln_gamma(h) + (df - 1.0) * s.ln() - h * s * s
}

fn check(k: usize, df: f64) -> Result<()> {
    if k < 2 {
        return Err(domain(format!("studentized range needs at least 2 groups, got {k}")));
    }
    if !(df > 0.0) {
        return Err(domain(format!("degrees of freedom must be positive, got {df}")));
    }
    Ok(())
}

/// `P(Q <= q)` for `k` groups and `df` error degrees of freedom. An
/// infinite `df` gives the normal range distribution.
pub fn studentized_range_cdf(q: f64, k: usize, df: f64) -> Result<f64> {
    check(k, df)?;
    if q.is_nan() {
        return Err(domain("q is NaN"));
    }
    if q <= 0.0 {
        return Ok(0.0);
    }
    if q.is_infinite() {
        return Ok(1.0);
    }
    if df.is_infinite() {
        return Ok(range_cdf_normal(q, k));
    }
    // S concentrates around 1 with spread about 1/sqrt(2ν).
    let spread = (0.5 / df).sqrt();
    let lo = (1.0 - 15.0 * spread).max(0.0);
    let hi = 1.0 + 15.0 * spread.max(0.5);
    let mode = ((df - 1.0).max(0.0) / df).sqrt().clamp(lo, hi);
    let f = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        ln_scale_density(s, df).exp() * range_cdf_normal(q * s, k)
    };
    let total = integrate(f, lo, mode, OUTER_TOL) + integrate(f, mode, hi, OUTER_TOL);
    Ok(total.clamp(0.0, 1.0))
}

/// `P(Q > q)`.
pub fn studentized_range_sf(q: f64, k: usize, df: f64) -> Result<f64> {
    Ok((1.0 - studentized_range_cdf(q, k, df)?).clamp(0.0, 1.0))
}
