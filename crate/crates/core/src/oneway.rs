//! Public one-way functions `h_ℓ : Z_{m_i} × Z_m → Z_{m_i}` that mask each
//! level's reconstruction value.
//!
//! The hash-based family expands a digest over the length-prefixed encoding
//!
//! ```text
//! u32be(|tag|) ‖ tag ‖ u32be(|ℓ|) ‖ ℓ ‖ u32be(|x|) ‖ x ‖ u32be(counter)
//! ```
//!
//! where `ℓ` and `x` are minimal big-endian magnitudes (zero encodes as one
//! `0x00` byte). Blocks for counter = 0, 1, ... are concatenated until at least
//! `2·bitlen(modulus)` bits are available; the result is read big-endian and
//! reduced modulo `modulus`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use sha2::{Digest as _, Sha256, Sha512};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DigestName {
    Sha256,
    Sha512,
}

impl DigestName {
    fn hash(self, data: &[u8]) -> Vec<u8> {
        match self {
            DigestName::Sha256 => Sha256::digest(data).to_vec(),
            DigestName::Sha512 => Sha512::digest(data).to_vec(),
        }
    }
}

impl fmt::Display for DigestName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DigestName::Sha256 => "sha256",
            DigestName::Sha512 => "sha512",
        })
    }
}

impl FromStr for DigestName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sha256" => Ok(DigestName::Sha256),
            "sha512" => Ok(DigestName::Sha512),
            other => Err(Error::UnknownDigest(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OwfKind {
    HashBased(DigestName),
    /// `(3·x + ℓ) mod modulus`; hand-computable, not one-way.
    TestAffine,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OwfFamily {
    pub kind: OwfKind,
    pub family_tag: Vec<u8>,
}

impl OwfFamily {
    pub fn hash_based(digest: DigestName, family_tag: impl Into<Vec<u8>>) -> Self {
        Self {
            kind: OwfKind::HashBased(digest),
            family_tag: family_tag.into(),
        }
    }

    pub fn test_affine() -> Self {
        Self {
            kind: OwfKind::TestAffine,
            family_tag: Vec::new(),
        }
    }

    /// Evaluates `h_level(x, level)` into `[0, modulus)`.
    pub fn eval(&self, level: usize, x: &BigUint, modulus: &BigUint) -> Result<BigUint> {
        if level < 1 {
            return Err(Error::LevelOutOfRange(level));
        }
        if *modulus < BigUint::from(2u32) {
            return Err(Error::InvalidModulus(modulus.clone()));
        }
        Ok(match self.kind {
            OwfKind::TestAffine => (x * 3u32 + level) % modulus,
            OwfKind::HashBased(digest) => {
                let level_bytes = BigUint::from(level).to_bytes_be();
                let x_bytes = x.to_bytes_be();
                let mut prefix = Vec::new();
                for part in [&self.family_tag[..], &level_bytes, &x_bytes] {
                    prefix.extend_from_slice(&(part.len() as u32).to_be_bytes());
                    prefix.extend_from_slice(part);
                }
                let wanted_bits = 2 * modulus.bits();
                let mut stream = Vec::new();
                let mut counter = 0u32;
                while (stream.len() as u64) * 8 < wanted_bits || stream.is_empty() {
                    let mut block = prefix.clone();
                    block.extend_from_slice(&counter.to_be_bytes());
                    stream.extend(digest.hash(&block));
                    counter += 1;
                }
                BigUint::from_bytes_be(&stream) % modulus
            }
        })
    }
}

/// Free-function form of [`OwfFamily::eval`].
pub fn eval_owf(
    family: &OwfFamily,
    level: usize,
    x: &BigUint,
    modulus: &BigUint,
) -> Result<BigUint> {
    family.eval(level, x, modulus)
}
