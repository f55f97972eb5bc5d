//! MI-based noise predicate used by both searches to prune.
//!
//! A candidate extension `w'` adjacent to a base window `w` is noise when it
//! is uncorrelated on its own (below τ), mixing it into the base lowers the
//! MI, and the base itself carries signal. Mixing independent data can only
//! dilute dependence, so a failing mixture identifies the extension as
//! contamination rather than a continuation of the correlated region.

use crate::engine::MiEngine;
use crate::error::{Error, Result};
use crate::types::{TimeSeriesPair, Window};

/// Outcome of one noise check. All MI values are normalized so `tau` shares
/// the scale of the acceptance threshold σ.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct NoiseVerdict {
    pub is_noise: bool,
    /// Normalized MI of the suspect extension on its own.
    pub i_candidate: f64,
    /// Normalized MI of the base window.
    pub i_base: f64,
    /// Normalized MI of base and extension concatenated.
    pub i_mixture: f64,
    pub tau: f64,
}

/// The predicate applied to already-computed MI values.
///
/// The base must itself clear τ: a sub-noise base cannot classify others.
pub fn verdict(i_base: f64, i_candidate: f64, i_mixture: f64, tau: f64) -> NoiseVerdict {
    verdict_with_raw(i_base, i_candidate, i_mixture, i_base, i_mixture, tau)
}

/// As [`verdict`], but with the raw MI of base and mixture as a tie-breaker:
/// strongly dependent windows can saturate the normalized scale at 1, where
/// only the raw values still show whether the mixture diluted the base.
pub fn verdict_with_raw(
    i_base: f64,
    i_candidate: f64,
    i_mixture: f64,
    mi_base: f64,
    mi_mixture: f64,
    tau: f64,
) -> NoiseVerdict {
    let diluted =
        if i_mixture == i_base { mi_mixture < mi_base } else { i_mixture < i_base };
    NoiseVerdict {
        is_noise: i_candidate < tau && diluted && i_base > tau,
        i_candidate,
        i_base,
        i_mixture,
        tau,
    }
}

/// Computes the three MI values for `base`, `ext`, and their concatenation,
/// then applies [`verdict`]. `base` and `ext` must be adjacent and disjoint.
pub fn check_noise(
    pair: &TimeSeriesPair,
    base: Window,
    ext: Window,
    tau: f64,
    k: usize,
) -> Result<NoiseVerdict> {
    let mixture = if base.end == ext.start {
        Window::new(base.start, ext.end)
    } else if ext.end == base.start {
        Window::new(ext.start, base.end)
    } else {
        return Err(Error::Config(format!(
            "noise check needs adjacent windows, got base {base} and ext {ext}"
        )));
    };
    if base.size() <= k || ext.size() <= k {
        return Err(Error::InsufficientSamples { n: base.size().min(ext.size()), k });
    }
    let mut engine = MiEngine::new(pair, k, false);
    let base_est = engine.eval_scratch(base)?;
    let i_candidate = engine.eval_scratch(ext)?.normalized;
    let mix_est = engine.eval_scratch(mixture)?;
    Ok(verdict_with_raw(
        base_est.normalized,
        i_candidate,
        mix_est.normalized,
        base_est.mi_nats,
        mix_est.mi_nats,
        tau,
    ))
}

/// Expected MI of a mixture that keeps each sample of the original pair with
/// independent probabilities `theta` and `eta`. Test oracle only.
pub fn mixture_mi_prediction(i_xy: f64, theta: f64, eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) || !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!(
            "mixture weights must be in [0, 1], got theta={theta}, eta={eta}"
        )));
    }
    Ok(theta * eta * i_xy)
}
