//! The flat `(t, n)` Asmuth-Bloom threshold scheme.

use std::collections::BTreeSet;

use num_bigint::{BigUint, RandBigInt};
use rand::Rng;

use crate::crt::{crt_solve, Congruence};
use crate::error::{Error, Result};
use crate::params::{check_ab_constraint, multiplier_count, CompactSequence};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbDeal {
    pub secret: BigUint,
    pub alpha: BigUint,
    /// `y = secret + alpha·m0`, with `0 <= y < m_1 ⋯ m_t`.
    pub y: BigUint,
    /// `(i, y mod m_i)` for every participant `i = 1..=n`.
    pub shares: Vec<(usize, BigUint)>,
}

fn check_inputs(secret: &BigUint, t: usize, seq: &CompactSequence) -> Result<()> {
    if secret >= &seq.m0 {
        return Err(Error::SecretOutOfRange { m0: seq.m0.clone() });
    }
    if !check_ab_constraint(seq, t)? {
        return Err(Error::AbConstraintViolated { t });
    }
    Ok(())
}

/// Deals with `alpha` drawn uniformly from `{a >= 0 : s + a·m0 < m_1 ⋯ m_t}`.
pub fn ab_split<R: Rng + ?Sized>(
    secret: &BigUint,
    t: usize,
    seq: &CompactSequence,
    rng: &mut R,
) -> Result<AbDeal> {
    check_inputs(secret, t, seq)?;
    let count = multiplier_count(secret, &seq.m0, &seq.prefix_product(t));
    let alpha = rng.gen_biguint_below(&count);
    ab_split_with_alpha(secret, t, seq, alpha)
}

/// Deals with a caller-chosen `alpha`.
pub fn ab_split_with_alpha(
    secret: &BigUint,
    t: usize,
    seq: &CompactSequence,
    alpha: BigUint,
) -> Result<AbDeal> {
    check_inputs(secret, t, seq)?;
    let y = secret + &alpha * &seq.m0;
    if y >= seq.prefix_product(t) {
        return Err(Error::DrawOutOfRange(format!("alpha = {alpha}")));
    }
    let shares = seq
        .moduli
        .iter()
        .enumerate()
        .map(|(i, m)| (i + 1, &y % m))
        .collect();
    Ok(AbDeal {
        secret: secret.clone(),
        alpha,
        y,
        shares,
    })
}

/// Recovers the secret from `t` or more shares, using every share given.
pub fn ab_reconstruct(
    shares: &[(usize, BigUint)],
    t: usize,
    seq: &CompactSequence,
) -> Result<BigUint> {
    let mut seen = BTreeSet::new();
    let mut system = Vec::with_capacity(shares.len());
    for (i, value) in shares {
        if *i == 0 || *i > seq.moduli.len() {
            return Err(Error::ShareMismatch {
                participant: *i,
                reason: format!("no participant {i} among {}", seq.moduli.len()),
            });
        }
        if !seen.insert(*i) {
            return Err(Error::DuplicateParticipant(*i));
        }
        let congruence = Congruence::new(value.clone(), seq.modulus(*i).clone()).map_err(|_| {
            Error::ShareMismatch {
                participant: *i,
                reason: "share value not reduced".into(),
            }
        })?;
        system.push(congruence);
    }
    if system.len() < t {
        return Err(Error::TooFewShares {
            have: system.len(),
            need: t,
        });
    }
    let y = crt_solve(&system)?.value;
    if y >= seq.prefix_product(t) {
        return Err(Error::InconsistentShares);
    }
    Ok(y % &seq.m0)
}
