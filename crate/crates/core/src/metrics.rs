//! Information-theoretic diversity metrics over [`Distribution`]s.
//!
//! Everything is in natural-log units. Zero-probability categories
//! contribute exactly zero (`0 ln 0 = 0`).

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::Distribution;

/// Upper bound of the Jensen-Shannon distance, `sqrt(ln 2)`.
pub const MAX_JS_DISTANCE: f64 = 0.832_554_611_157_697_7;

/// An information quantity in nats.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Nats(f64);

impl Nats {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Shannon Equitability (evenness) in `[0, 1]`, with the category count it
/// was normalized by.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvennessScore {
    pub value: f64,
    pub k: usize,
}

impl EvennessScore {
    pub fn percent(&self) -> f64 {
        self.value * 100.0
    }
}

/// `-p ln p`, with the `0 ln 0 = 0` convention.
#[inline]
fn surprisal_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

fn entropy_of(probabilities: &[f64]) -> f64 {
    probabilities.iter().map(|&p| surprisal_term(p)).sum()
}

/// `H = -sum p_k ln p_k`.
pub fn shannon_entropy(dist: &Distribution) -> Nats {
    Nats(entropy_of(dist.probabilities()).max(0.0))
}

/// Shannon Equitability Index, `E_H = H / ln k`.
///
/// `k` is the size of the category set the population is measured against,
/// not the number of non-empty categories: a missing group lowers evenness.
pub fn equitability(dist: &Distribution, k: usize) -> Result<EvennessScore> {
    if k < 2 {
        return Err(Error::DegenerateK { k });
    }
    let support = dist.probabilities().iter().filter(|&&p| p > 0.0).count();
    if support > k {
        return Err(Error::CategoryMismatch {
            reason: format!("{support} populated categories exceed k = {k}"),
        });
    }
    let h = shannon_entropy(dist).value();
    let value = (h / (k as f64).ln()).clamp(0.0, 1.0);
    Ok(EvennessScore { value, k })
}

fn check_same_categories(p: &Distribution, q: &Distribution) -> Result<()> {
    if p.labels() != q.labels() {
        return Err(Error::CategoryMismatch {
            reason: format!(
                "{} categories ({}) vs {} categories ({})",
                p.len(),
                p.axis(),
                q.len(),
                q.axis()
            ),
        });
    }
    Ok(())
}

/// `JSD(P, Q) = H(M) - (H(P) + H(Q)) / 2` with `M = (P + Q) / 2`.
///
/// Both distributions must be laid out over the same categories
/// (zero-filled); the result is symmetric and bounded by `ln 2`.
pub fn jensen_shannon_divergence(p: &Distribution, q: &Distribution) -> Result<Nats> {
    check_same_categories(p, q)?;
    let mixture_entropy: f64 = p
        .probabilities()
        .iter()
        .zip(q.probabilities())
        .map(|(&a, &b)| surprisal_term((a + b) * 0.5))
        .sum();
    let jsd = mixture_entropy - 0.5 * (entropy_of(p.probabilities()) + entropy_of(q.probabilities()));
    Ok(Nats(jsd.clamp(0.0, LN_2)))
}

/// Jensen-Shannon distance, the square root of the divergence. A metric on
/// distributions, bounded by [`MAX_JS_DISTANCE`].
pub fn js_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    Ok(jensen_shannon_divergence(p, q)?.value().sqrt())
}
