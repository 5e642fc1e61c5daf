//! Shares, published masked values and the residue lifting common to the
//! disjunctive and conjunctive schemes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::crt::Congruence;
use crate::error::{Error, LevelDeficit, Result};
use crate::params::SchemeParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    /// Flat Asmuth-Bloom threshold sharing.
    Ab,
    /// Disjunctive hierarchical sharing.
    Dhss,
    /// Conjunctive hierarchical sharing.
    Chss,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Ab => "ab",
            SchemeKind::Dhss => "dhss",
            SchemeKind::Chss => "chss",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ab" => Ok(SchemeKind::Ab),
            "dhss" => Ok(SchemeKind::Dhss),
            "chss" => Ok(SchemeKind::Chss),
            other => Err(format!("unknown scheme {other:?}")),
        }
    }
}

/// One participant's private share.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Share {
    pub participant: usize,
    pub level: usize,
    pub modulus: BigUint,
    pub value: BigUint,
}

/// The dealer's published output: parameters plus masked values
/// `w[(i, ℓ)] = (y_ℓ − h_ℓ(s_i, ℓ)) mod m_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicBundle {
    pub scheme: SchemeKind,
    pub params: SchemeParams,
    pub w: BTreeMap<(usize, usize), BigUint>,
}

impl PublicBundle {
    /// The `(i, ℓ)` pairs the scheme publishes: every masked participant at
    /// its own level and every level above.
    pub fn expected_keys(params: &SchemeParams) -> BTreeSet<(usize, usize)> {
        let h = params.hierarchy();
        let m = h.levels();
        (1..=h.masked_participants())
            .flat_map(|i| {
                let own = h.level_of(i).expect("masked participant has a level");
                (own..=m).map(move |l| (i, l))
            })
            .collect()
    }
}

/// Dealer-side values, exposed only when explicitly retained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DealerSecrets {
    pub ys: Vec<BigUint>,
    pub alphas: Vec<BigUint>,
    /// Additive parts of the secret; empty for the disjunctive scheme.
    pub deltas: Vec<BigUint>,
    pub masks: Vec<BigUint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Retain {
    Discard,
    KeepForTesting,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DealResult {
    pub shares: Vec<Share>,
    pub public: PublicBundle,
    pub dealer_secrets: Option<DealerSecrets>,
}

/// Builds shares and masked values from per-level targets `ys` and the
/// random masks `c_i` of participants `1..=N_{m-1}`.
pub(crate) fn distribute(
    scheme: SchemeKind,
    params: &SchemeParams,
    ys: &[BigUint],
    masks: &[BigUint],
) -> Result<(Vec<Share>, PublicBundle)> {
    let h = params.hierarchy();
    let m = h.levels();
    let top = &ys[m - 1];
    let shares: Vec<Share> = (1..=h.participants())
        .map(|i| {
            let modulus = params.modulus(i).clone();
            let value = if i <= masks.len() {
                masks[i - 1].clone()
            } else {
                top % &modulus
            };
            Share {
                participant: i,
                level: h.level_of(i).expect("participant in range"),
                modulus,
                value,
            }
        })
        .collect();
    let mut w = BTreeMap::new();
    for (i, l) in PublicBundle::expected_keys(params) {
        let modulus = params.modulus(i);
        let mask = params.owf().eval(l, &shares[i - 1].value, modulus)?;
        let target = &ys[l - 1] % modulus;
        w.insert((i, l), (target + modulus - mask) % modulus);
    }
    Ok((
        shares,
        PublicBundle {
            scheme,
            params: params.clone(),
            w,
        },
    ))
}

/// Checks share metadata against the parameters and rejects duplicates.
pub(crate) fn check_shares(shares: &[Share], params: &SchemeParams) -> Result<BTreeSet<usize>> {
    let h = params.hierarchy();
    let mut seen = BTreeSet::new();
    for s in shares {
        let mismatch = |reason: &str| Error::ShareMismatch {
            participant: s.participant,
            reason: reason.to_string(),
        };
        if s.participant == 0 || s.participant > h.participants() {
            return Err(mismatch("participant index out of range"));
        }
        if !seen.insert(s.participant) {
            return Err(Error::DuplicateParticipant(s.participant));
        }
        if &s.modulus != params.modulus(s.participant) {
            return Err(mismatch("modulus differs from the parameter set"));
        }
        if Some(s.level) != h.level_of(s.participant) {
            return Err(mismatch("level differs from the parameter set"));
        }
        if s.value >= s.modulus {
            return Err(mismatch("share value not reduced"));
        }
    }
    Ok(seen)
}

/// Per-level `(level, |A ∩ [N_ℓ]|, t_ℓ)`.
pub(crate) fn level_counts(
    participants: &BTreeSet<usize>,
    params: &SchemeParams,
) -> Vec<LevelDeficit> {
    let h = params.hierarchy();
    (1..=h.levels())
        .map(|l| {
            let bound = h.cumulative(l);
            LevelDeficit {
                level: l,
                have: participants.iter().filter(|&&i| i <= bound).count(),
                need: h.threshold(l),
            }
        })
        .collect()
}

/// The residue `s_i^(ℓ)` that participant `i` contributes to level `ℓ`:
/// `(h_ℓ(s_i, ℓ) + w_i^(ℓ)) mod m_i` for masked participants, the raw share
/// for top-level participants at `ℓ = m`.
pub fn lift(share: &Share, level: usize, public: &PublicBundle) -> Result<Congruence> {
    let params = &public.params;
    let h = params.hierarchy();
    if share.participant <= h.masked_participants() {
        let w = public
            .w
            .get(&(share.participant, level))
            .ok_or(Error::MissingPublicValue {
                participant: share.participant,
                level,
            })?;
        let mask = params.owf().eval(level, &share.value, &share.modulus)?;
        Congruence::reduced(&(mask + w), share.modulus.clone())
    } else if level == h.levels() {
        Congruence::new(share.value.clone(), share.modulus.clone())
    } else {
        Err(Error::ShareMismatch {
            participant: share.participant,
            reason: format!("top-level share cannot serve level {level}"),
        })
    }
}

/// Lifted residues of every share held by a participant in `[N_ℓ]`.
pub fn level_congruences(
    shares: &[Share],
    level: usize,
    public: &PublicBundle,
) -> Result<Vec<Congruence>> {
    let bound = public.params.hierarchy().cumulative(level);
    shares
        .iter()
        .filter(|s| s.participant <= bound)
        .map(|s| lift(s, level, public))
        .collect()
}
