//! Conjunctive hierarchical sharing: a set is authorized only if every level
//! `ℓ` sees at least `t_ℓ` participants from levels `1..=ℓ`.
//!
//! The secret is split additively, `s ≡ δ_1 + ⋯ + δ_m (mod m0)`, and each
//! `δ_ℓ` is hidden in its own level value `y_ℓ = δ_ℓ + α_ℓ·m0`. Shares and
//! masked values are built exactly as in the disjunctive scheme.

use std::collections::BTreeSet;

use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::Rng;

use crate::crt::crt_solve;
use crate::dhss::{level_values, sample_masks};
use crate::error::{Error, Result};
use crate::params::{multiplier_count, SchemeParams};
use crate::share::{
    check_shares, distribute, level_congruences, level_counts, DealResult, DealerSecrets,
    PublicBundle, Retain, SchemeKind, Share,
};

/// Random choices in draw order: `δ_1..δ_{m-1}`, `α_1..α_m`, then
/// `c_1..c_{N_{m-1}}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChssDraws {
    /// The free parts `δ_1..δ_{m-1}`; `δ_m` is derived from the secret.
    pub deltas: Vec<BigUint>,
    pub alphas: Vec<BigUint>,
    pub masks: Vec<BigUint>,
}

impl ChssDraws {
    pub fn sample<R: Rng + ?Sized>(secret: &BigUint, params: &SchemeParams, rng: &mut R) -> Self {
        let m0 = params.m0();
        let m = params.hierarchy().levels();
        let deltas: Vec<BigUint> = (1..m).map(|_| rng.gen_biguint_below(m0)).collect();
        let all = full_deltas(secret, m0, &deltas);
        let alphas = all
            .iter()
            .enumerate()
            .map(|(idx, d)| {
                let count = multiplier_count(d, m0, &params.level_bound(idx + 1));
                rng.gen_biguint_below(&count)
            })
            .collect();
        let masks = sample_masks(params, rng);
        Self {
            deltas,
            alphas,
            masks,
        }
    }
}

/// Appends `δ_m = (s − Σ δ) mod m0`.
fn full_deltas(secret: &BigUint, m0: &BigUint, free: &[BigUint]) -> Vec<BigUint> {
    let used = free.iter().fold(BigUint::zero(), |acc, d| (acc + d) % m0);
    let last = (secret + m0 - used) % m0;
    let mut all = free.to_vec();
    all.push(last);
    all
}

pub fn chss_is_authorized(participants: &BTreeSet<usize>, params: &SchemeParams) -> bool {
    level_counts(participants, params)
        .iter()
        .all(|c| c.have >= c.need)
}

pub fn chss_deal<R: Rng + ?Sized>(
    secret: &BigUint,
    params: &SchemeParams,
    rng: &mut R,
    retain: Retain,
) -> Result<DealResult> {
    params.check_secret(secret)?;
    let draws = ChssDraws::sample(secret, params, rng);
    chss_deal_with_draws(secret, params, &draws, retain)
}

pub fn chss_deal_with_draws(
    secret: &BigUint,
    params: &SchemeParams,
    draws: &ChssDraws,
    retain: Retain,
) -> Result<DealResult> {
    params.check_secret(secret)?;
    let m0 = params.m0();
    let m = params.hierarchy().levels();
    if draws.deltas.len() + 1 != m {
        return Err(Error::DrawOutOfRange(format!(
            "{} free deltas for {m} levels",
            draws.deltas.len()
        )));
    }
    if let Some(pos) = draws.deltas.iter().position(|d| d >= m0) {
        return Err(Error::DrawOutOfRange(format!("delta_{}", pos + 1)));
    }
    let deltas = full_deltas(secret, m0, &draws.deltas);
    let ys = level_values(params, &deltas, &draws.alphas, &draws.masks)?;
    let (shares, public) = distribute(SchemeKind::Chss, params, &ys, &draws.masks)?;
    let dealer_secrets = (retain == Retain::KeepForTesting).then(|| DealerSecrets {
        ys,
        alphas: draws.alphas.clone(),
        deltas,
        masks: draws.masks.clone(),
    });
    Ok(DealResult {
        shares,
        public,
        dealer_secrets,
    })
}

pub fn chss_reconstruct(shares: &[Share], public: &PublicBundle) -> Result<BigUint> {
    let params = &public.params;
    let holders = check_shares(shares, params)?;
    if !chss_is_authorized(&holders, params) {
        let deficits = level_counts(&holders, params)
            .into_iter()
            .filter(|c| c.have < c.need)
            .collect();
        return Err(Error::NotAuthorized(deficits));
    }
    let m0 = params.m0();
    let mut sum = BigUint::zero();
    for level in 1..=params.hierarchy().levels() {
        let system = level_congruences(shares, level, public)?;
        let y = crt_solve(&system)?.value;
        if y >= params.level_bound(level) {
            return Err(Error::InconsistentShares);
        }
        sum = (sum + y % m0) % m0;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oneway::OwfFamily;
    use crate::params::{CompactSequence, Hierarchy, Theta};
    use crate::seeded_rng;
    use num_traits::ToPrimitive;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn params(sizes: Vec<usize>, thresholds: Vec<usize>) -> SchemeParams {
        SchemeParams::new(
            CompactSequence {
                m0: big(7),
                moduli: vec![big(11), big(13), big(17)],
                k: 1,
                theta: Theta::new(1, 2).unwrap(),
            },
            Hierarchy::new(sizes, thresholds),
            OwfFamily::test_affine(),
        )
        .unwrap()
    }

    fn micro() -> SchemeParams {
        params(vec![1, 2], vec![1, 2])
    }

    fn micro_deal() -> DealResult {
        let draws = ChssDraws {
            deltas: vec![big(2)],
            alphas: vec![big(0), big(9)],
            masks: vec![big(5)],
        };
        chss_deal_with_draws(&big(4), &micro(), &draws, Retain::KeepForTesting).unwrap()
    }

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    fn pick(deal: &DealResult, who: &[usize]) -> Vec<Share> {
        who.iter().map(|&i| deal.shares[i - 1].clone()).collect()
    }

    #[test]
    fn authorization() {
        let p = micro();
        assert!(chss_is_authorized(&set(&[1, 2]), &p));
        assert!(!chss_is_authorized(&set(&[2, 3]), &p));
        assert!(!chss_is_authorized(&set(&[1]), &p));
        assert!(chss_is_authorized(&set(&[1, 2, 3]), &p));
    }

    #[test]
    fn worked_deal() {
        let deal = micro_deal();
        let secrets = deal.dealer_secrets.as_ref().unwrap();
        assert_eq!(secrets.deltas, vec![big(2), big(2)]);
        assert_eq!(secrets.ys, vec![big(2), big(65)]);
        let values: Vec<_> = deal.shares.iter().map(|s| s.value.clone()).collect();
        assert_eq!(values, vec![big(5), big(0), big(14)]);
        assert_eq!(deal.public.w[&(1, 1)], big(8));
        assert_eq!(deal.public.w[&(1, 2)], big(4));
        assert_eq!(deal.public.scheme, SchemeKind::Chss);
    }

    #[test]
    fn worked_reconstruction() {
        let deal = micro_deal();
        assert_eq!(chss_reconstruct(&pick(&deal, &[1, 2]), &deal.public).unwrap(), big(4));
        assert_eq!(chss_reconstruct(&pick(&deal, &[1, 2, 3]), &deal.public).unwrap(), big(4));
        match chss_reconstruct(&pick(&deal, &[2, 3]), &deal.public) {
            Err(Error::NotAuthorized(deficits)) => {
                assert_eq!(deficits.len(), 1);
                assert_eq!(deficits[0].level, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_level_is_flat() {
        let p = params(vec![3], vec![2]);
        let deal = chss_deal(&big(5), &p, &mut seeded_rng(3), Retain::KeepForTesting).unwrap();
        let secrets = deal.dealer_secrets.as_ref().unwrap();
        assert_eq!(secrets.deltas, vec![big(5)]);
        assert!(deal.public.w.is_empty());
        for who in [[1, 2], [1, 3], [2, 3]] {
            assert_eq!(chss_reconstruct(&pick(&deal, &who), &deal.public).unwrap(), big(5));
        }
    }

    #[test]
    fn exhaustive_micro_completeness() {
        let p = micro();
        for s in 0..7u64 {
            for seed in 0..20 {
                let deal = chss_deal(&big(s), &p, &mut seeded_rng(seed), Retain::Discard).unwrap();
                for who in [&[1, 2][..], &[1, 3], &[1, 2, 3]] {
                    assert_eq!(chss_reconstruct(&pick(&deal, who), &deal.public).unwrap(), big(s));
                }
                for who in [&[1][..], &[2], &[3], &[2, 3]] {
                    assert!(matches!(
                        chss_reconstruct(&pick(&deal, who), &deal.public),
                        Err(Error::NotAuthorized(_))
                    ));
                }
            }
        }
    }

    #[test]
    fn first_delta_is_uniform() {
        // χ² with 6 degrees of freedom; 22.46 is the 0.999 quantile.
        let p = micro();
        let trials = 7000;
        let mut counts = [0u64; 7];
        for seed in 0..trials {
            let deal = chss_deal(&big(4), &p, &mut seeded_rng(seed), Retain::KeepForTesting).unwrap();
            let d = deal.dealer_secrets.unwrap().deltas[0].to_usize().unwrap();
            counts[d] += 1;
        }
        let expected = trials as f64 / 7.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 22.46, "chi2 = {chi2}, counts {counts:?}");
    }

    #[test]
    fn draws_are_checked() {
        let p = micro();
        let bad = ChssDraws {
            deltas: vec![big(7)],
            alphas: vec![big(0), big(0)],
            masks: vec![big(0)],
        };
        assert!(matches!(
            chss_deal_with_draws(&big(1), &p, &bad, Retain::Discard),
            Err(Error::DrawOutOfRange(_))
        ));
        let short = ChssDraws {
            deltas: vec![],
            alphas: vec![big(0), big(0)],
            masks: vec![big(0)],
        };
        assert!(chss_deal_with_draws(&big(1), &p, &short, Retain::Discard).is_err());
    }
}
