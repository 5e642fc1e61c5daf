//! Brute-force reference for the posterior counts: scans every level value
//! directly and enumerates every tuple, using machine integers only.

use num_traits::ToPrimitive;

use super::AdversaryView;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest level bound `m_1 ⋯ m_{t_ℓ}` the scan will walk.
    pub max_level_bound: u64,
    /// Largest number of tuples enumerated.
    pub max_tuples: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_level_bound: 1_000_000,
            max_tuples: 20_000_000,
        }
    }
}

fn small(x: &num_bigint::BigUint, what: &str) -> Result<u64> {
    x.to_u64()
        .ok_or_else(|| Error::OracleInfeasible(format!("{what} exceeds 64 bits")))
}

/// Per-secret counts of tuples `(z_1..z_m)` meeting the range bounds, the
/// coalition's residues and the secret condition (common residue modulo
/// `m0`, or residues summing to the secret for the conjunctive scheme).
pub fn scan_posterior(view: &AdversaryView, limits: &OracleLimits) -> Result<Vec<u64>> {
    let params = view.params();
    let h = params.hierarchy();
    let m0 = small(params.m0(), "m0")?;
    let masked = h.masked_participants();

    let mut candidates: Vec<Vec<u64>> = Vec::new();
    for level in 1..=h.levels() {
        let bound = small(&params.level_bound(level), "level bound")?;
        if bound > limits.max_level_bound {
            return Err(Error::OracleInfeasible(format!(
                "level {level} bound {bound} above {}",
                limits.max_level_bound
            )));
        }
        let mut residues = Vec::new();
        for share in view.shares() {
            let i = share.participant;
            if i > h.cumulative(level) {
                continue;
            }
            let modulus = small(&share.modulus, "modulus")?;
            let value = small(&share.value, "share")?;
            let r = if i <= masked {
                let w = view.public().w.get(&(i, level)).ok_or(Error::MissingPublicValue {
                    participant: i,
                    level,
                })?;
                let mask = params.owf().eval(level, &share.value, &share.modulus)?;
                (small(&mask, "mask")? + small(w, "w")?) % modulus
            } else {
                value
            };
            residues.push((r, modulus));
        }
        let hits: Vec<u64> = (0..bound)
            .filter(|z| residues.iter().all(|&(r, m)| z % m == r))
            .collect();
        candidates.push(hits);
    }

    let tuples = candidates
        .iter()
        .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
        .unwrap_or(u64::MAX);
    if tuples > limits.max_tuples {
        return Err(Error::OracleInfeasible(format!(
            "{tuples} tuples above {}",
            limits.max_tuples
        )));
    }

    let additive = view.is_additive();
    let mut counts = vec![0u64; m0 as usize];
    let mut cursor = vec![0usize; candidates.len()];
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(counts);
    }
    loop {
        let residues: Vec<u64> = cursor
            .iter()
            .zip(&candidates)
            .map(|(&k, c)| c[k] % m0)
            .collect();
        if additive {
            let s = residues.iter().sum::<u64>() % m0;
            counts[s as usize] += 1;
        } else if residues.iter().all(|&r| r == residues[0]) {
            counts[residues[0] as usize] += 1;
        }
        let mut pos = 0;
        loop {
            if pos == cursor.len() {
                return Ok(counts);
            }
            cursor[pos] += 1;
            if cursor[pos] < candidates[pos].len() {
                break;
            }
            cursor[pos] = 0;
            pos += 1;
        }
    }
}
