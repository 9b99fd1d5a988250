//! Information-ratio minimization over action distributions.
//!
//! For a distribution `pi` over actions with per-action expected shortfalls
//! `d` and information gains `g`, the ratio is `(pi . d)^2 / (pi . g)`. Some
//! minimizer randomizes over at most two actions, so the search enumerates
//! every singleton and every unordered pair and solves the one-dimensional
//! problem on each pair in closed form.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ratios closer than this are treated as equal before tie-breaking.
pub const RATIO_TIE_TOLERANCE: f64 = 1e-12;

/// A probability mass function on action ordinals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDistribution {
    support: Vec<(usize, f64)>,
}

impl ActionDistribution {
    pub fn point(index: usize) -> Self {
        Self {
            support: vec![(index, 1.0)],
        }
    }

    /// Mass `q` on `first`, `1 - q` on `second`. Collapses to a point mass at
    /// either end of `[0, 1]`.
    pub fn pair(first: usize, second: usize, q: f64) -> Self {
        if q >= 1.0 {
            Self::point(first)
        } else if q <= 0.0 {
            Self::point(second)
        } else {
            Self {
                support: vec![(first, q), (second, 1.0 - q)],
            }
        }
    }

    pub fn support(&self) -> &[(usize, f64)] {
        &self.support
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.support.iter().filter(|(i, _)| *i == index).map(|(_, p)| p).sum()
    }

    /// `(sum p_i d_i)^2 / sum p_i g_i`.
    pub fn ratio(&self, deltas: &[f64], gains: &[f64]) -> f64 {
        let (d, g) = self
            .support
            .iter()
            .fold((0.0, 0.0), |(d, g), &(i, p)| (d + p * deltas[i], g + p * gains[i]));
        d * d / g
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self.support.as_slice() {
            [(only, _)] => *only,
            [(first, q), (second, _)] => {
                if rng.random_bool(*q) {
                    *first
                } else {
                    *second
                }
            }
            _ => {
                let mut u: f64 = rng.random();
                for &(i, p) in &self.support {
                    if u < p {
                        return i;
                    }
                    u -= p;
                }
                self.support.last().expect("non-empty support").0
            }
        }
    }
}

/// Optimal mixing weight on a two-action support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSolution {
    /// Probability placed on the first action.
    pub q: f64,
    pub ratio: f64,
}

fn pair_ratio(q: f64, d1: f64, g1: f64, d2: f64, g2: f64) -> f64 {
    let d = q * d1 + (1.0 - q) * d2;
    let g = q * g1 + (1.0 - q) * g2;
    d * d / g
}

/// Minimizes `f(q) = (q d1 + (1-q) d2)^2 / (q g1 + (1-q) g2)` over `q in [0, 1]`.
///
/// With `D(q) = d2 + q(d1 - d2)` and `G(q) = g2 + q(g1 - g2)`,
/// `f'(q) = D (2 (d1 - d2) G - (g1 - g2) D) / G^2`, so the interior candidates
/// are the root of `D` and the root of the bracket. The candidate set is those
/// roots (when in range) plus both endpoints. Ties prefer larger `q`, so a flat
/// objective returns `q = 1`.
pub fn minimize_pair(d1: f64, g1: f64, d2: f64, g2: f64) -> Result<PairSolution> {
    for (index, gain) in [(0, g1), (1, g2)] {
        if !(gain > 0.0) {
            return Err(Error::NonPositiveGain { index, gain });
        }
    }
    for (index, delta) in [(0, d1), (1, d2)] {
        if !(delta >= 0.0) {
            return Err(Error::NegativeShortfall { index, delta });
        }
    }
    let dd = d1 - d2;
    let dg = g1 - g2;
    let mut candidates = [1.0, 0.0, f64::NAN, f64::NAN];
    if dd != 0.0 {
        candidates[2] = -d2 / dd;
        if dg != 0.0 {
            candidates[3] = d2 / dd - 2.0 * g2 / dg;
        }
    }
    let mut best = PairSolution {
        q: 1.0,
        ratio: pair_ratio(1.0, d1, g1, d2, g2),
    };
    for &q in &candidates[1..] {
        if !(0.0..=1.0).contains(&q) {
            continue;
        }
        let ratio = pair_ratio(q, d1, g1, d2, g2);
        let better =
            ratio < best.ratio - RATIO_TIE_TOLERANCE || (ratio <= best.ratio + RATIO_TIE_TOLERANCE && q > best.q);
        if better {
            best = PairSolution { q, ratio };
        }
    }
    Ok(best)
}

/// The minimizing distribution together with its ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct IdsSolution {
    pub distribution: ActionDistribution,
    pub ratio: f64,
}

fn validate(deltas: &[f64], gains: &[f64]) -> Result<()> {
    if deltas.len() != gains.len() {
        return Err(Error::LengthMismatch {
            deltas: deltas.len(),
            gains: gains.len(),
        });
    }
    if deltas.is_empty() {
        return Err(Error::EmptyActionSet);
    }
    if let Some((index, &gain)) = gains.iter().enumerate().find(|(_, g)| !(**g > 0.0)) {
        return Err(Error::NonPositiveGain { index, gain });
    }
    if let Some((index, &delta)) = deltas.iter().enumerate().find(|(_, d)| !(**d >= 0.0)) {
        return Err(Error::NegativeShortfall { index, delta });
    }
    Ok(())
}

/// Minimizes the information ratio over all distributions on the actions.
///
/// A zero shortfall short-circuits to a point mass on the lowest such index.
/// Otherwise candidates are visited in the order: singleton `i`, then pairs
/// `(i, j)` for `j > i`, for increasing `i`. A candidate replaces the incumbent
/// only if its ratio is lower by more than [`RATIO_TIE_TOLERANCE`], which
/// realizes the tie order (ratio, first index, second index, larger `q`).
pub fn minimize_info_ratio(deltas: &[f64], gains: &[f64]) -> Result<IdsSolution> {
    validate(deltas, gains)?;
    if let Some(zero) = deltas.iter().position(|&d| d == 0.0) {
        return Ok(IdsSolution {
            distribution: ActionDistribution::point(zero),
            ratio: 0.0,
        });
    }
    let n = deltas.len();
    let mut best_ratio = f64::INFINITY;
    let mut best = (0, 0, 1.0);
    for i in 0..n {
        let single = deltas[i] * deltas[i] / gains[i];
        if single < best_ratio - RATIO_TIE_TOLERANCE {
            best_ratio = single;
            best = (i, i, 1.0);
        }
        for j in i + 1..n {
            let pair = minimize_pair(deltas[i], gains[i], deltas[j], gains[j])?;
            if pair.ratio < best_ratio - RATIO_TIE_TOLERANCE {
                best_ratio = pair.ratio;
                best = (i, j, pair.q);
            }
        }
    }
    let (first, second, q) = best;
    Ok(IdsSolution {
        distribution: ActionDistribution::pair(first, second, q),
        ratio: best_ratio,
    })
}

/// Brute-force reference: the smallest pairwise ratio over the grid
/// `q = 0, step, 2*step, ..., 1` for every pair (singletons are the grid endpoints).
pub fn grid_oracle(deltas: &[f64], gains: &[f64], q_step: f64) -> Result<f64> {
    validate(deltas, gains)?;
    assert!(q_step > 0.0 && q_step <= 0.5, "q_step must lie in (0, 0.5]");
    let n = deltas.len();
    let steps = (1.0 / q_step).round() as usize;
    let mut best = (0..n)
        .map(|i| deltas[i] * deltas[i] / gains[i])
        .fold(f64::INFINITY, f64::min);
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..=steps {
                let q = (k as f64 * q_step).min(1.0);
                best = best.min(pair_ratio(q, deltas[i], gains[i], deltas[j], gains[j]));
            }
        }
    }
    Ok(best)
}
