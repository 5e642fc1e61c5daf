//! Fixed-shape instances at growing `m0`, for watching the loss shrink.

use std::collections::BTreeMap;

use num_bigint::{BigUint, RandBigInt};
use num_traits::ToPrimitive;

use super::{
    enumerate_posterior, eta_single_layer, information_rate, AdversaryView, AnalysisConfig,
    EtaReport,
};
use crate::asmuth_bloom::ab_split;
use crate::chss::chss_deal;
use crate::dhss::dhss_deal;
use crate::error::{Error, Result};
use crate::oneway::{DigestName, OwfFamily};
use crate::params::{generate_compact_sequence, Hierarchy, SchemeParams, Theta};
use crate::seeded_rng;
use crate::share::{Retain, SchemeKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderShape {
    pub scheme: SchemeKind,
    /// For the flat scheme, a single entry `[n]` with thresholds `[t]`.
    pub level_sizes: Vec<usize>,
    pub thresholds: Vec<usize>,
    pub k: u32,
    pub theta: Theta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderRung {
    pub m0: BigUint,
    pub moduli: Vec<BigUint>,
    pub coalition: Vec<usize>,
    pub total: BigUint,
    pub loss: f64,
    pub likelihood_loss: f64,
    /// Share of secrets outside the most common count class.
    pub minority_fraction: f64,
    /// Present for the flat scheme.
    pub eta: Option<EtaReport>,
    pub rho: f64,
}

/// A coalition with exactly `t_ℓ − 1` members in every `[N_ℓ]`, taking the
/// lowest indices of each level.
pub fn worst_case_coalition(hierarchy: &Hierarchy) -> Result<Vec<usize>> {
    let mut chosen = Vec::new();
    for level in 1..=hierarchy.levels() {
        let want = hierarchy.threshold(level) - 1;
        let start = hierarchy.cumulative(level - 1) + 1;
        let end = hierarchy.cumulative(level);
        let missing = want.checked_sub(chosen.len()).ok_or_else(|| {
            Error::InvalidParams(vec![format!("level {level} cannot hold exactly {want}")])
        })?;
        if missing > end + 1 - start {
            return Err(Error::InvalidParams(vec![format!(
                "level {level} has too few participants for {want} below threshold"
            )]));
        }
        chosen.extend(start..start + missing);
    }
    Ok(chosen)
}

fn minority_fraction(counts: &[BigUint]) -> f64 {
    let mut tally: BTreeMap<&BigUint, u64> = BTreeMap::new();
    for c in counts {
        *tally.entry(c).or_default() += 1;
    }
    let majority = tally.values().copied().max().unwrap_or(0);
    (counts.len() as u64 - majority) as f64 / counts.len() as f64
}

/// For each `m0` in `rungs` (each must be prime): generate a sequence of the
/// given shape, deal a seeded random secret, and analyse `coalition` (the
/// worst case when `None`).
pub fn run_ladder(
    shape: &LadderShape,
    rungs: &[BigUint],
    coalition: Option<&[usize]>,
    seed: u64,
    config: &AnalysisConfig,
) -> Result<Vec<LadderRung>> {
    let hierarchy = Hierarchy::new(shape.level_sizes.clone(), shape.thresholds.clone());
    let report = hierarchy.validate();
    if !report.is_pass() {
        return Err(Error::InvalidParams(
            report.violations.iter().map(|v| v.to_string()).collect(),
        ));
    }
    let coalition = match coalition {
        Some(c) => c.to_vec(),
        None => worst_case_coalition(&hierarchy)?,
    };
    rungs
        .iter()
        .map(|m0| {
            let seq = generate_compact_sequence(
                m0,
                hierarchy.participants(),
                shape.k,
                shape.theta,
                seed,
            )?;
            let mut rng = seeded_rng(seed ^ m0.to_u64().unwrap_or(0));
            let secret = rng.gen_biguint_below(m0);
            let view = match shape.scheme {
                SchemeKind::Ab => {
                    let t = hierarchy.threshold(1);
                    let deal = ab_split(&secret, t, &seq, &mut rng)?;
                    let shares: Vec<_> = coalition
                        .iter()
                        .map(|&i| deal.shares[i - 1].clone())
                        .collect();
                    AdversaryView::flat(&shares, t, &seq)?
                }
                scheme => {
                    let owf = OwfFamily::hash_based(DigestName::Sha256, b"hiercrt-ladder".to_vec());
                    let params = SchemeParams::new(seq.clone(), hierarchy.clone(), owf)?;
                    let deal = if scheme == SchemeKind::Chss {
                        chss_deal(&secret, &params, &mut rng, Retain::Discard)?
                    } else {
                        dhss_deal(&secret, &params, &mut rng, Retain::Discard)?
                    };
                    let shares = coalition
                        .iter()
                        .map(|&i| deal.shares[i - 1].clone())
                        .collect();
                    AdversaryView::hierarchical(shares, deal.public)?
                }
            };
            let report = enumerate_posterior(&view, config)?;
            let eta = if shape.scheme == SchemeKind::Ab {
                Some(eta_single_layer(&report, &view)?)
            } else {
                None
            };
            Ok(LadderRung {
                m0: m0.clone(),
                moduli: seq.moduli.clone(),
                coalition: coalition.clone(),
                total: report.total.clone(),
                loss: report.loss,
                likelihood_loss: report.likelihood_loss,
                minority_fraction: minority_fraction(&report.per_secret_counts),
                eta,
                rho: information_rate(&seq).rho,
            })
        })
        .collect()
}
