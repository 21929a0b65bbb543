//! Exact one-sided binomial tail `P[X >= k]`, `X ~ Binomial(n, q)`, summed in
//! log space so that tiny tails (down to far below `f64::MIN_POSITIVE`) keep
//! full relative precision in [`binomial_tail_ln`].

use crate::{Error, Result};

/// Natural log of `P[X >= correct]`.
pub fn binomial_tail_ln(correct: u64, trials: u64, chance: f64) -> Result<f64> {
    if !(chance > 0.0 && chance < 1.0) {
        return Err(Error::Argument(format!("chance must lie in (0, 1), got {chance}")));
    }
    if correct > trials {
        return Err(Error::Argument(format!(
            "correct ({correct}) exceeds trials ({trials})"
        )));
    }
    if correct == 0 {
        return Ok(0.0);
    }
    let n = trials;
    let ln_q = chance.ln();
    let ln_1q = (-chance).ln_1p();

    // ln C(n, k) for k = correct, built as a running sum of ln((n - i + 1) / i)
    let mut ln_choose = 0.0;
    for i in 1..=correct {
        ln_choose += ((n - i + 1) as f64 / i as f64).ln();
    }
    let mut terms = Vec::with_capacity((n - correct + 1) as usize);
    let mut k = correct;
    loop {
        terms.push(ln_choose + k as f64 * ln_q + (n - k) as f64 * ln_1q);
        if k == n {
            break;
        }
        ln_choose += ((n - k) as f64 / (k + 1) as f64).ln();
        k += 1;
    }
    let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: f64 = terms.iter().map(|t| (t - peak).exp()).sum();
    Ok((peak + scaled.ln()).min(0.0))
}

/// One-tailed p-value for `correct` successes out of `trials` at chance
/// level `chance`.
pub fn binomial_above_chance(correct: u64, trials: u64, chance: f64) -> Result<f64> {
    binomial_tail_ln(correct, trials, chance).map(f64::exp)
}
