//! Mutual information of Gaussian-consistent LLRs.
//!
//! An LLR `L` is consistent-Gaussian with parameter `σ` when, conditioned on
//! bit 0, `L ~ N(σ²/2, σ²)`. Its mutual information with the bit is
//! `J(σ) = 1 − E[log₂(1 + e^{−L})]`.
//!
//! Near `J = 1` the value `1 − J` underflows the `f64` spacing well before
//! `σ = 20`, so the complement `Jc(σ) = 1 − J(σ)` is evaluated directly and
//! the inverse is available in both forms.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::{Bit, Llr};

const LN2: f64 = std::f64::consts::LN_2;
const SPAN: f64 = 13.0;
/// Largest `σ` the inverse will return.
pub const J_SIGMA_MAX: f64 = 100.0;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16).expect("degree 16 is valid"))
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `Jc(σ) = E[log₂(1 + e^{−L})]`, `L ~ N(σ²/2, σ²)`.
pub fn j_complement(sigma: f64) -> f64 {
    assert!(sigma >= 0.0, "sigma must be non-negative");
    if sigma == 0.0 {
        return 1.0;
    }
    let mu = sigma * sigma / 2.0;
    let var = sigma * sigma;
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    // The integrand has mass around +μ and, through the e^{−x} factor,
    // around −μ; both lie inside the interval.
    let (a, b) = (-mu - SPAN * sigma, mu + SPAN * sigma);
    let width = (sigma / 4.0).min(0.5);
    let segments = ((b - a) / width).ceil() as usize;
    let h = (b - a) / segments as f64;
    let gl = rule();
    let mut acc = 0.0;
    for s in 0..segments {
        let lo = a + s as f64 * h;
        acc += gl.integrate(lo, lo + h, |x| {
            let d = x - mu;
            norm * (-d * d / (2.0 * var)).exp() * softplus(-x)
        });
    }
    (acc / LN2).clamp(0.0, 1.0)
}

/// `J(σ)`.
pub fn j_function(sigma: f64) -> f64 {
    1.0 - j_complement(sigma)
}

/// Solve `Jc(σ) = c` for `σ ∈ [0, J_SIGMA_MAX]`.
pub fn j_inverse_complement(c: f64) -> f64 {
    if c >= 1.0 {
        return 0.0;
    }
    if c <= j_complement(J_SIGMA_MAX) {
        return J_SIGMA_MAX;
    }
    // Jc is decreasing; bisect in σ, refine geometrically where Jc is tiny.
    let (mut lo, mut hi) = (0.0_f64, J_SIGMA_MAX);
    let target = c.ln();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if j_complement(mid).ln() > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.max(1e-3) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `J⁻¹(I)` for `I ∈ [0, 1]`; `I = 1` maps to [`J_SIGMA_MAX`].
pub fn j_inverse(mi: f64) -> f64 {
    if mi <= 0.0 {
        return 0.0;
    }
    j_inverse_complement(1.0 - mi)
}

/// Averaging estimator `1 − mean(log₂(1 + e^{−L·(1−2v)}))`.
pub fn mutual_information_from_llrs<T: Llr>(llrs: &[T], bits: &[Bit]) -> f64 {
    assert_eq!(llrs.len(), bits.len());
    if llrs.is_empty() {
        return 0.0;
    }
    let sum: f64 = llrs
        .iter()
        .zip(bits)
        .map(|(l, &b)| {
            let l = l.to_f64().unwrap();
            let signed = if b == 0 { l } else { -l };
            softplus(-signed)
        })
        .sum();
    1.0 - sum / (llrs.len() as f64 * LN2)
}

/// Same estimator when every transmitted bit is 0.
pub fn mutual_information_all_zero<T: Llr>(llrs: &[T]) -> f64 {
    if llrs.is_empty() {
        return 0.0;
    }
    let sum: f64 = llrs.iter().map(|l| softplus(-l.to_f64().unwrap())).sum();
    1.0 - sum / (llrs.len() as f64 * LN2)
}
