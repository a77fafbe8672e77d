//! Natural-log probability arithmetic.

/// Representation of `ln(0)`.
pub const LOG_ZERO: f64 = f64::NEG_INFINITY;

/// `ln(10)`, used to move log10 LM scores into the acoustic (natural log) domain.
pub const LN_10: f64 = std::f64::consts::LN_10;

/// `ln(e^a + e^b)` with max-shift.
#[inline]
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == LOG_ZERO {
        return b;
    }
    if b == LOG_ZERO {
        return a;
    }
    if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// `ln(Σ e^x)` over a slice; `LOG_ZERO` for an empty slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(LOG_ZERO, f64::max);
    if max == LOG_ZERO || max.is_infinite() {
        return max;
    }
    let sum: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Same as [`log_sum_exp`] for single-precision rows.
pub fn log_sum_exp_f32(values: &[f32]) -> f64 {
    let max = values.iter().map(|&v| v as f64).fold(LOG_ZERO, f64::max);
    if max == LOG_ZERO || max.is_infinite() {
        return max;
    }
    let sum: f64 = values.iter().map(|&v| (v as f64 - max).exp()).sum();
    max + sum.ln()
}

/// Log-softmax of a row of logits.
pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let norm = log_sum_exp(logits);
    logits.iter().map(|&v| v - norm).collect()
}
