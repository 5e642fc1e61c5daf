//! Security analysis for unauthorized coalitions: exact posterior counting,
//! entropy loss, candidate-count structure and the information rate.

mod counts;
mod ladder;
mod oracle;
mod posterior;
mod rate;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;

use crate::chss::chss_is_authorized;
use crate::dhss::dhss_authorized_level;
use crate::error::{Error, Result};
use crate::oneway::OwfFamily;
use crate::params::{CompactSequence, Hierarchy, SchemeParams};
use crate::share::{check_shares, PublicBundle, SchemeKind, Share};

pub use ladder::{run_ladder, worst_case_coalition, LadderRung, LadderShape};
pub use counts::{
    eta_single_layer, decompose_counts, limit_ratio, ratio_envelope, DecompositionGroup,
    EtaReport, CountDecomposition,
};
pub use oracle::{scan_posterior, OracleLimits};
pub use posterior::{enumerate_posterior, level_constraints, LevelConstraint, PosteriorReport};
pub use rate::{information_rate, log2_big, RateReport};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisConfig {
    /// Cap on the estimated number of elementary counting steps.
    pub budget: u128,
    /// Loss, in bits, below which a report counts as near-perfect.
    pub epsilon_tolerance: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            budget: 10_000_000,
            epsilon_tolerance: 0.05,
        }
    }
}

/// Everything an unauthorized coalition knows: its own shares and the
/// published bundle.
#[derive(Clone, Debug)]
pub struct AdversaryView {
    coalition: BTreeSet<usize>,
    shares: Vec<Share>,
    public: PublicBundle,
}

impl AdversaryView {
    /// A coalition in a hierarchical deal. Fails with `CoalitionAuthorized`
    /// if the shares would let it reconstruct.
    pub fn hierarchical(shares: Vec<Share>, public: PublicBundle) -> Result<Self> {
        let coalition = check_shares(&shares, &public.params)?;
        let params = &public.params;
        match public.scheme {
            SchemeKind::Chss => {
                if chss_is_authorized(&coalition, params) {
                    return Err(Error::CoalitionAuthorized(params.hierarchy().levels()));
                }
            }
            SchemeKind::Dhss | SchemeKind::Ab => {
                if let Some(level) = dhss_authorized_level(&coalition, params) {
                    return Err(Error::CoalitionAuthorized(level));
                }
            }
        }
        Ok(Self {
            coalition,
            shares,
            public,
        })
    }

    /// A coalition in a flat `(t, n)` deal, given `(index, value)` shares.
    pub fn flat(shares: &[(usize, BigUint)], t: usize, seq: &CompactSequence) -> Result<Self> {
        let params = SchemeParams::new(
            seq.clone(),
            Hierarchy::new(vec![seq.len()], vec![t]),
            OwfFamily::test_affine(),
        )?;
        let shares = shares
            .iter()
            .map(|(i, value)| Share {
                participant: *i,
                level: 1,
                modulus: if *i >= 1 && *i <= seq.len() {
                    seq.modulus(*i).clone()
                } else {
                    BigUint::from(0u32)
                },
                value: value.clone(),
            })
            .collect();
        let public = PublicBundle {
            scheme: SchemeKind::Ab,
            params,
            w: BTreeMap::new(),
        };
        Self::hierarchical(shares, public)
    }

    pub fn coalition(&self) -> &BTreeSet<usize> {
        &self.coalition
    }

    pub fn shares(&self) -> &[Share] {
        &self.shares
    }

    pub fn public(&self) -> &PublicBundle {
        &self.public
    }

    pub fn params(&self) -> &SchemeParams {
        &self.public.params
    }

    pub fn scheme(&self) -> SchemeKind {
        self.public.scheme
    }

    /// `B ∩ [N_ℓ]`.
    pub fn members_at(&self, level: usize) -> Vec<usize> {
        let bound = self.params().hierarchy().cumulative(level);
        self.coalition.iter().copied().filter(|&i| i <= bound).collect()
    }

    /// Whether secrets combine additively across levels.
    pub(crate) fn is_additive(&self) -> bool {
        self.scheme() == SchemeKind::Chss
    }
}
