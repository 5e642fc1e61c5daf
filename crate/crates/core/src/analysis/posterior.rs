use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{rate::ratio_f64, AdversaryView, AnalysisConfig};
use crate::crt::{crt_solve, mod_inverse};
use crate::error::{Error, Result};
use crate::params::multiplier_count;
use crate::share::{level_congruences, SchemeKind};

/// What the coalition knows about one level value `z_ℓ`:
/// `z_ℓ ≡ residue (mod modulus)` and `0 <= z_ℓ < bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelConstraint {
    pub level: usize,
    pub members: Vec<usize>,
    pub residue: BigUint,
    /// Product of the members' moduli; one when no member reaches the level.
    pub modulus: BigUint,
    pub bound: BigUint,
}

pub fn level_constraints(view: &AdversaryView) -> Result<Vec<LevelConstraint>> {
    let params = view.params();
    (1..=params.hierarchy().levels())
        .map(|level| {
            let system = level_congruences(view.shares(), level, view.public())?;
            let (residue, modulus) = if system.is_empty() {
                (BigUint::zero(), BigUint::one())
            } else {
                let sol = crt_solve(&system)?;
                (sol.value, sol.combined_modulus)
            };
            Ok(LevelConstraint {
                level,
                members: view.members_at(level),
                residue,
                modulus,
                bound: params.level_bound(level),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorReport {
    pub scheme: SchemeKind,
    pub m0: BigUint,
    /// Number of consistent tuples `(z_1..z_m)` for each candidate secret.
    pub per_secret_counts: Vec<BigUint>,
    /// `level_counts[ℓ-1][d]`: consistent `z_ℓ` with `z_ℓ ≡ d (mod m0)`.
    pub level_counts: Vec<Vec<BigUint>>,
    /// `|𝒢|`, the sum of the per-secret counts.
    pub total: BigUint,
    pub secret_entropy: f64,
    /// Entropy of the secret when every consistent tuple is equally likely.
    pub conditional_entropy: f64,
    pub loss: f64,
    /// Entropy of the secret under the dealer's actual sampling, where each
    /// consistent `z_ℓ` is weighted by the inverse of its secret's multiplier
    /// range.
    pub likelihood_conditional_entropy: f64,
    pub likelihood_loss: f64,
    pub epsilon_tolerance: f64,
}

impl PosteriorReport {
    pub fn within_tolerance(&self) -> bool {
        self.loss < self.epsilon_tolerance
    }
}

pub(crate) fn estimated_work(m0: &BigUint, levels: usize, additive: bool) -> u128 {
    let m0 = m0.to_u128().unwrap_or(u128::MAX);
    let levels = levels as u128;
    let mut work = m0.saturating_mul(levels);
    if additive {
        work = work.saturating_add((levels - 1).saturating_mul(m0.saturating_mul(m0)));
    }
    work
}

/// Exact per-secret posterior counts.
pub fn enumerate_posterior(view: &AdversaryView, config: &AnalysisConfig) -> Result<PosteriorReport> {
    let params = view.params();
    let m0_big = params.m0().clone();
    let levels = params.hierarchy().levels();
    let estimate = estimated_work(&m0_big, levels, view.is_additive());
    if estimate > config.budget {
        return Err(Error::IntractableInstance {
            estimate,
            budget: config.budget,
        });
    }
    let m0 = m0_big.to_usize().expect("m0 within budget");
    let constraints = level_constraints(view)?;

    let level_counts: Vec<Vec<BigUint>> = constraints
        .iter()
        .map(|c| residue_counts(c, &m0_big, m0))
        .collect::<Result<_>>()?;
    let level_weights: Vec<Vec<BigUint>> = constraints
        .iter()
        .zip(&level_counts)
        .map(|(c, counts)| likelihood_weights(counts, &m0_big, &c.bound))
        .collect();

    let combine = |vectors: &[Vec<BigUint>]| {
        if view.is_additive() {
            combine_additive(vectors, m0)
        } else {
            combine_common(vectors, m0)
        }
    };
    let per_secret_counts = combine(&level_counts);
    let likelihood = combine(&level_weights);

    let total = per_secret_counts.iter().sum();
    let secret_entropy = super::log2_big(&m0_big);
    let loss = entropy_loss(&per_secret_counts, &m0_big);
    let likelihood_loss = entropy_loss(&likelihood, &m0_big);
    Ok(PosteriorReport {
        scheme: view.scheme(),
        m0: m0_big,
        per_secret_counts,
        level_counts,
        total,
        secret_entropy,
        conditional_entropy: secret_entropy - loss,
        loss,
        likelihood_conditional_entropy: secret_entropy - likelihood_loss,
        likelihood_loss,
        epsilon_tolerance: config.epsilon_tolerance,
    })
}

/// For each `d` in `Z_m0`, the number of `z < bound` with `z ≡ d (mod m0)`
/// and `z ≡ residue (mod modulus)`.
fn residue_counts(c: &LevelConstraint, m0_big: &BigUint, m0: usize) -> Result<Vec<BigUint>> {
    let inverse = mod_inverse(&(&c.modulus % m0_big), m0_big)?;
    let step = m0_big * &c.modulus;
    let base = (&c.residue % m0_big).to_usize().expect("below m0");
    let inverse = inverse.to_u128().expect("below m0");
    Ok((0..m0)
        .into_par_iter()
        .map(|d| {
            let diff = ((d + m0 - base) % m0) as u128;
            let k = (diff * inverse) % m0 as u128;
            let z0 = &c.residue + &c.modulus * BigUint::from(k);
            if z0 < c.bound {
                (&c.bound - &z0 - 1u32) / &step + 1u32
            } else {
                BigUint::zero()
            }
        })
        .collect())
}

/// `count(d) · L / N(d)` where `N(d)` is the number of multipliers available
/// for offset `d` and `L` is their least common multiple.
fn likelihood_weights(counts: &[BigUint], m0: &BigUint, bound: &BigUint) -> Vec<BigUint> {
    let ranges: Vec<BigUint> = (0..counts.len())
        .map(|d| multiplier_count(&BigUint::from(d), m0, bound))
        .collect();
    let mut distinct: Vec<&BigUint> = ranges.iter().collect();
    distinct.sort();
    distinct.dedup();
    let common = distinct
        .into_iter()
        .fold(BigUint::one(), |acc, r| acc.lcm(r));
    counts
        .iter()
        .zip(&ranges)
        .map(|(c, r)| c * (&common / r))
        .collect()
}

fn combine_common(vectors: &[Vec<BigUint>], m0: usize) -> Vec<BigUint> {
    (0..m0)
        .into_par_iter()
        .map(|s| vectors.iter().map(|v| &v[s]).product())
        .collect()
}

/// Cyclic convolution over `Z_m0`: entry `s` sums over all `(d_1..d_m)` with
/// `d_1 + ⋯ + d_m ≡ s`.
fn combine_additive(vectors: &[Vec<BigUint>], m0: usize) -> Vec<BigUint> {
    let mut acc = vectors[0].clone();
    for next in &vectors[1..] {
        acc = (0..m0)
            .into_par_iter()
            .map(|s| {
                let mut sum = BigUint::zero();
                for d in 0..m0 {
                    let a = &acc[d];
                    let b = &next[(s + m0 - d) % m0];
                    if !a.is_zero() && !b.is_zero() {
                        sum += a * b;
                    }
                }
                sum
            })
            .collect();
    }
    acc
}

/// `log2 m0 − H(S | view)` for the distribution proportional to `weights`,
/// written as `Σ_q γ_q (Y_q/G) log2(m0·Y_q/G)` over distinct weights `Y_q`.
fn entropy_loss(weights: &[BigUint], m0: &BigUint) -> f64 {
    let total: BigUint = weights.iter().sum();
    if total.is_zero() {
        return 0.0;
    }
    let mut groups: BTreeMap<&BigUint, u64> = BTreeMap::new();
    for w in weights.iter().filter(|w| !w.is_zero()) {
        *groups.entry(w).or_default() += 1;
    }
    let loss: f64 = groups
        .into_iter()
        .map(|(y, gamma)| {
            let p = ratio_f64(y, &total);
            gamma as f64 * p * ratio_f64(&(m0 * y), &total).log2()
        })
        .sum();
    loss.max(0.0)
}
