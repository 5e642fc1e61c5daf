use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::Pow;

use super::{AdversaryView, PosteriorReport};
use crate::error::{Error, Result};
use crate::params::CompactSequence;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionGroup {
    /// A per-secret count value.
    pub product: BigUint,
    /// How many secrets attain it.
    pub gamma: u64,
    /// `a_ℓ ∈ {0, 1}` with `product = ∏_ℓ (floor_ℓ + a_ℓ)`.
    pub offsets: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountDecomposition {
    /// `⌊m_1 ⋯ m_{t_ℓ} / (m0 · ∏_{i ∈ B ∩ [N_ℓ]} m_i)⌋` per level.
    pub floors: Vec<BigUint>,
    pub groups: Vec<DecompositionGroup>,
    /// `Σ γ_q Y_q`, equal to the report total.
    pub weighted_sum: BigUint,
    /// `Σ γ_q`, the number of secrets.
    pub gamma_total: u64,
}

fn coalition_product(view: &AdversaryView, members: &[usize]) -> BigUint {
    members.iter().map(|&i| view.params().modulus(i)).product()
}

fn level_floors(view: &AdversaryView) -> Vec<BigUint> {
    let params = view.params();
    (1..=params.hierarchy().levels())
        .map(|l| {
            let den = params.m0() * coalition_product(view, &view.members_at(l));
            params.level_bound(l) / den
        })
        .collect()
}

/// Groups per-secret counts and matches each against the products
/// `∏_ℓ (floor_ℓ + a_ℓ)`, `a ∈ {0,1}^m`.
pub fn decompose_counts(
    report: &PosteriorReport,
    view: &AdversaryView,
) -> Result<CountDecomposition> {
    let floors = level_floors(view);
    let mut tally: BTreeMap<&BigUint, u64> = BTreeMap::new();
    for c in &report.per_secret_counts {
        *tally.entry(c).or_default() += 1;
    }
    let m = floors.len();
    let mut groups = Vec::with_capacity(tally.len());
    for (product, gamma) in tally {
        let offsets = (0u32..1 << m)
            .map(|mask| (0..m).map(|l| ((mask >> l) & 1) as u8).collect::<Vec<u8>>())
            .find(|a| {
                let p: BigUint = floors
                    .iter()
                    .zip(a)
                    .map(|(f, &bit)| f + u32::from(bit))
                    .product();
                &p == product
            })
            .ok_or_else(|| Error::DecompositionMismatch(product.clone()))?;
        groups.push(DecompositionGroup {
            product: product.clone(),
            gamma,
            offsets,
        });
    }
    let weighted_sum: BigUint = groups.iter().map(|g| &g.product * g.gamma).sum();
    if weighted_sum != report.total {
        return Err(Error::DecompositionMismatch(weighted_sum));
    }
    let gamma_total = groups.iter().map(|g| g.gamma).sum();
    Ok(CountDecomposition {
        floors,
        groups,
        weighted_sum,
        gamma_total,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaReport {
    /// `⌊m_1 ⋯ m_t / (m0 · ∏_{i ∈ B} m_i)⌋`.
    pub eta: BigUint,
    /// Secrets with `eta` candidates.
    pub d1: u64,
    /// Secrets with `eta + 1` candidates.
    pub d2: u64,
    /// Total candidate count `m0·eta + d2`.
    pub candidates: BigUint,
}

impl EtaReport {
    pub fn minority_fraction(&self) -> f64 {
        self.d1.min(self.d2) as f64 / (self.d1 + self.d2) as f64
    }
}

/// Checks that a flat coalition sees either `eta` or `eta + 1` candidates for
/// every secret.
pub fn eta_single_layer(report: &PosteriorReport, view: &AdversaryView) -> Result<EtaReport> {
    if view.params().hierarchy().levels() != 1 {
        return Err(Error::NotFlat);
    }
    let eta = level_floors(view).remove(0);
    let next = &eta + 1u32;
    let (mut d1, mut d2) = (0u64, 0u64);
    for count in &report.per_secret_counts {
        if *count == eta {
            d1 += 1;
        } else if *count == next {
            d2 += 1;
        } else {
            return Err(Error::DichotomyViolated {
                count: count.clone(),
                eta,
            });
        }
    }
    let candidates = view.params().m0() * &eta + d2;
    Ok(EtaReport {
        eta,
        d1,
        d2,
        candidates,
    })
}

/// `m_1 ⋯ m_{t_ℓ} / (m0 · ∏_{i ∈ B ∩ [N_ℓ]} m_i)` for a coalition holding
/// exactly `t_ℓ − 1` of the level's participants.
pub fn limit_ratio(level: usize, view: &AdversaryView) -> Result<Ratio<BigUint>> {
    let params = view.params();
    if level == 0 || level > params.hierarchy().levels() {
        return Err(Error::LevelOutOfRange(level));
    }
    let members = view.members_at(level);
    let expected = params.hierarchy().threshold(level) - 1;
    if members.len() != expected {
        return Err(Error::WrongCardinality {
            level,
            expected,
            actual: members.len(),
        });
    }
    Ok(Ratio::new(
        params.level_bound(level),
        params.m0() * coalition_product(view, &members),
    ))
}

/// Strict bounds on [`limit_ratio`] implied by the compactness window for a
/// threshold `t`:
/// `k^t·m0^{t−1} / (k·m0 + b)^{t−1} < ratio < (k + b/m0)^t / k^{t−1}`,
/// with `b = ⌊m0^θ⌋`.
pub fn ratio_envelope(seq: &CompactSequence, t: usize) -> (Ratio<BigUint>, Ratio<BigUint>) {
    let k = BigUint::from(seq.k);
    let m0 = &seq.m0;
    let upper_end = seq.window_upper();
    let t = t as u32;
    let lower = Ratio::new(
        Pow::pow(&k, t) * Pow::pow(m0, t - 1),
        Pow::pow(&upper_end, t - 1),
    );
    let upper = Ratio::new(Pow::pow(&upper_end, t), Pow::pow(&k, t - 1) * Pow::pow(m0, t));
    (lower, upper)
}
