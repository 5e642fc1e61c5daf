//! Disjunctive hierarchical sharing: a set is authorized if, for some level
//! `ℓ`, it holds at least `t_ℓ` participants from levels `1..=ℓ`.
//!
//! The dealer fixes one value `y_ℓ = s + α_ℓ·m0 < m_1 ⋯ m_{t_ℓ}` per level.
//! Lower-level participants hold uniform masks `c_i` and convert them into
//! level residues through the published `w` values; top-level participants
//! hold `y_m mod m_i` directly.

use std::collections::BTreeSet;

use num_bigint::{BigUint, RandBigInt};
use rand::Rng;

use crate::crt::crt_solve;
use crate::error::{Error, Result};
use crate::params::{multiplier_count, SchemeParams};
use crate::share::{
    check_shares, distribute, level_congruences, level_counts, DealResult, DealerSecrets,
    PublicBundle, Retain, SchemeKind, Share,
};

/// The dealer's random choices. Drawn in this order: `α_1..α_m`, then
/// `c_1..c_{N_{m-1}}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DhssDraws {
    pub alphas: Vec<BigUint>,
    pub masks: Vec<BigUint>,
}

impl DhssDraws {
    pub fn sample<R: Rng + ?Sized>(secret: &BigUint, params: &SchemeParams, rng: &mut R) -> Self {
        let m = params.hierarchy().levels();
        let alphas = (1..=m)
            .map(|l| {
                let count = multiplier_count(secret, params.m0(), &params.level_bound(l));
                rng.gen_biguint_below(&count)
            })
            .collect();
        let masks = sample_masks(params, rng);
        Self { alphas, masks }
    }
}

pub(crate) fn sample_masks<R: Rng + ?Sized>(params: &SchemeParams, rng: &mut R) -> Vec<BigUint> {
    (1..=params.hierarchy().masked_participants())
        .map(|i| rng.gen_biguint_below(params.modulus(i)))
        .collect()
}

/// Checks draw lengths and ranges, returning `y_ℓ = offset_ℓ + α_ℓ·m0`.
pub(crate) fn level_values(
    params: &SchemeParams,
    offsets: &[BigUint],
    alphas: &[BigUint],
    masks: &[BigUint],
) -> Result<Vec<BigUint>> {
    let h = params.hierarchy();
    if alphas.len() != h.levels() {
        return Err(Error::DrawOutOfRange(format!(
            "{} multipliers for {} levels",
            alphas.len(),
            h.levels()
        )));
    }
    if masks.len() != h.masked_participants() {
        return Err(Error::DrawOutOfRange(format!(
            "{} masks for {} masked participants",
            masks.len(),
            h.masked_participants()
        )));
    }
    for (i, c) in masks.iter().enumerate() {
        if c >= params.modulus(i + 1) {
            return Err(Error::DrawOutOfRange(format!("mask c_{}", i + 1)));
        }
    }
    offsets
        .iter()
        .zip(alphas)
        .enumerate()
        .map(|(idx, (offset, alpha))| {
            let y = offset + alpha * params.m0();
            if y >= params.level_bound(idx + 1) {
                Err(Error::DrawOutOfRange(format!("alpha_{} = {alpha}", idx + 1)))
            } else {
                Ok(y)
            }
        })
        .collect()
}

pub fn dhss_deal<R: Rng + ?Sized>(
    secret: &BigUint,
    params: &SchemeParams,
    rng: &mut R,
    retain: Retain,
) -> Result<DealResult> {
    params.check_secret(secret)?;
    let draws = DhssDraws::sample(secret, params, rng);
    dhss_deal_with_draws(secret, params, &draws, retain)
}

/// Deterministic dealing from explicit draws.
pub fn dhss_deal_with_draws(
    secret: &BigUint,
    params: &SchemeParams,
    draws: &DhssDraws,
    retain: Retain,
) -> Result<DealResult> {
    params.check_secret(secret)?;
    let m = params.hierarchy().levels();
    let offsets = vec![secret.clone(); m];
    let ys = level_values(params, &offsets, &draws.alphas, &draws.masks)?;
    let (shares, public) = distribute(SchemeKind::Dhss, params, &ys, &draws.masks)?;
    let dealer_secrets = (retain == Retain::KeepForTesting).then(|| DealerSecrets {
        ys,
        alphas: draws.alphas.clone(),
        deltas: Vec::new(),
        masks: draws.masks.clone(),
    });
    Ok(DealResult {
        shares,
        public,
        dealer_secrets,
    })
}

/// The smallest level `ℓ` with `|A ∩ [N_ℓ]| >= t_ℓ`.
pub fn dhss_authorized_level(participants: &BTreeSet<usize>, params: &SchemeParams) -> Option<usize> {
    level_counts(participants, params)
        .into_iter()
        .find(|c| c.have >= c.need)
        .map(|c| c.level)
}

pub fn dhss_reconstruct(shares: &[Share], public: &PublicBundle) -> Result<BigUint> {
    let params = &public.params;
    let holders = check_shares(shares, params)?;
    let level = dhss_authorized_level(&holders, params)
        .ok_or_else(|| Error::NotAuthorized(level_counts(&holders, params)))?;
    let system = level_congruences(shares, level, public)?;
    let y = crt_solve(&system)?.value;
    if y >= params.level_bound(level) {
        return Err(Error::InconsistentShares);
    }
    Ok(y % params.m0())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oneway::OwfFamily;
    use crate::params::{CompactSequence, Hierarchy, Theta};
    use crate::seeded_rng;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn micro() -> SchemeParams {
        SchemeParams::new(
            CompactSequence {
                m0: big(7),
                moduli: vec![big(11), big(13), big(17)],
                k: 1,
                theta: Theta::new(1, 2).unwrap(),
            },
            Hierarchy::new(vec![1, 2], vec![1, 2]),
            OwfFamily::test_affine(),
        )
        .unwrap()
    }

    fn micro_deal() -> DealResult {
        let draws = DhssDraws {
            alphas: vec![big(0), big(10)],
            masks: vec![big(9)],
        };
        dhss_deal_with_draws(&big(4), &micro(), &draws, Retain::KeepForTesting).unwrap()
    }

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    fn pick(deal: &DealResult, who: &[usize]) -> Vec<Share> {
        who.iter().map(|&i| deal.shares[i - 1].clone()).collect()
    }

    #[test]
    fn worked_deal() {
        let deal = micro_deal();
        let secrets = deal.dealer_secrets.as_ref().unwrap();
        assert_eq!(secrets.ys, vec![big(4), big(74)]);
        let values: Vec<_> = deal.shares.iter().map(|s| s.value.clone()).collect();
        assert_eq!(values, vec![big(9), big(9), big(6)]);
        assert_eq!(deal.public.w.len(), 2);
        assert_eq!(deal.public.w[&(1, 1)], big(9));
        assert_eq!(deal.public.w[&(1, 2)], big(1));
    }

    #[test]
    fn zero_deal() {
        let draws = DhssDraws {
            alphas: vec![big(0), big(0)],
            masks: vec![big(3)],
        };
        let deal = dhss_deal_with_draws(&big(0), &micro(), &draws, Retain::KeepForTesting).unwrap();
        assert_eq!(deal.dealer_secrets.unwrap().ys, vec![big(0), big(0)]);
    }

    #[test]
    fn draws_are_range_checked() {
        let p = micro();
        let bad_alpha = DhssDraws {
            alphas: vec![big(1), big(0)],
            masks: vec![big(0)],
        };
        assert!(dhss_deal_with_draws(&big(4), &p, &bad_alpha, Retain::Discard).is_err());
        let bad_mask = DhssDraws {
            alphas: vec![big(0), big(0)],
            masks: vec![big(11)],
        };
        assert!(dhss_deal_with_draws(&big(4), &p, &bad_mask, Retain::Discard).is_err());
        assert!(matches!(
            dhss_deal(&big(7), &p, &mut seeded_rng(0), Retain::Discard),
            Err(Error::SecretOutOfRange { .. })
        ));
    }

    #[test]
    fn authorized_levels() {
        let p = micro();
        assert_eq!(dhss_authorized_level(&set(&[1]), &p), Some(1));
        assert_eq!(dhss_authorized_level(&set(&[2, 3]), &p), Some(2));
        assert_eq!(dhss_authorized_level(&set(&[2]), &p), None);
        assert_eq!(dhss_authorized_level(&set(&[]), &p), None);
    }

    #[test]
    fn worked_reconstruction() {
        let deal = micro_deal();
        assert_eq!(dhss_reconstruct(&pick(&deal, &[1]), &deal.public).unwrap(), big(4));
        assert_eq!(dhss_reconstruct(&pick(&deal, &[2, 3]), &deal.public).unwrap(), big(4));
        assert_eq!(dhss_reconstruct(&pick(&deal, &[3, 1, 2]), &deal.public).unwrap(), big(4));
        match dhss_reconstruct(&pick(&deal, &[2]), &deal.public) {
            Err(Error::NotAuthorized(deficits)) => {
                assert_eq!(deficits.len(), 2);
                assert_eq!((deficits[1].have, deficits[1].need), (1, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_public_value() {
        let mut deal = micro_deal();
        deal.public.w.remove(&(1, 1));
        assert_eq!(
            dhss_reconstruct(&pick(&deal, &[1]), &deal.public),
            Err(Error::MissingPublicValue {
                participant: 1,
                level: 1
            })
        );
    }

    #[test]
    fn tampered_shares_are_rejected() {
        let deal = micro_deal();
        let mut shares = pick(&deal, &[2, 3]);
        shares[0].modulus = big(19);
        assert!(matches!(
            dhss_reconstruct(&shares, &deal.public),
            Err(Error::ShareMismatch { .. })
        ));
        let dup = pick(&deal, &[2, 2, 3]);
        assert_eq!(
            dhss_reconstruct(&dup, &deal.public),
            Err(Error::DuplicateParticipant(2))
        );
    }
}
