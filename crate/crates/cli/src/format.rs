//! On-disk JSON formats. Every file is canonical: keys sorted, two-space
//! indentation, trailing newline, big integers as decimal strings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use hiercrt::{
    CompactSequence, DealerSecrets, DigestName, Hierarchy, OwfFamily, OwfKind, PublicBundle,
    SchemeKind, SchemeParams, Share, Theta,
};
use num_bigint::BigUint;
use serde::de::{DeserializeOwned, Error as _};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;
pub const DEALER_SECRETS_NOTICE: &str = "NOT FOR PRODUCTION: dealer randomness that reveals the secret";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("bad hex in {field}")]
    Hex { field: &'static str },
    #[error("unknown one-way function kind {0:?}")]
    UnknownOwf(String),
    #[error("unknown scheme {0:?}")]
    UnknownScheme(String),
    #[error("public value for ({participant}, {level}) is not part of this deal")]
    UnexpectedEntry { participant: usize, level: usize },
    #[error("public value for ({participant}, {level}) appears twice")]
    DuplicateEntry { participant: usize, level: usize },
    #[error(transparent)]
    Core(#[from] hiercrt::Error),
}

/// A non-negative integer written as a decimal string with no sign, no
/// whitespace and no leading zeros.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decimal(pub BigUint);

impl FromStr for Decimal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let ok = !s.is_empty()
            && s.bytes().all(|b| b.is_ascii_digit())
            && (s == "0" || !s.starts_with('0'));
        if !ok {
            return Err(format!("{s:?} is not a canonical decimal integer"));
        }
        Ok(Decimal(s.parse().map_err(|e| format!("{e}"))?))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}

impl From<BigUint> for Decimal {
    fn from(v: BigUint) -> Self {
        Decimal(v)
    }
}

impl From<&BigUint> for Decimal {
    fn from(v: &BigUint) -> Self {
        Decimal(v.clone())
    }
}

fn decimals(values: &[BigUint]) -> Vec<Decimal> {
    values.iter().map(Decimal::from).collect()
}

fn naturals(values: &[Decimal]) -> Vec<BigUint> {
    values.iter().map(|d| d.0.clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSection {
    pub m0: Decimal,
    pub moduli: Vec<Decimal>,
    pub k: u32,
    /// `"p/q"`.
    pub theta: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HierarchySection {
    pub level_sizes: Vec<usize>,
    pub thresholds: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OwfSection {
    /// `"hash"` or `"test_affine"`.
    pub kind: String,
    /// Lowercase hex.
    pub family_tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digest_name: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    pub version: u32,
    pub scheme: String,
    pub sequence: SequenceSection,
    pub hierarchy: HierarchySection,
    pub owf: OwfSection,
}

impl ParamFile {
    pub fn from_params(params: &SchemeParams, scheme: SchemeKind) -> Self {
        let seq = params.sequence();
        let owf = params.owf();
        let (kind, digest_name) = match owf.kind {
            OwfKind::HashBased(d) => ("hash", Some(d.to_string())),
            OwfKind::TestAffine => ("test_affine", None),
        };
        ParamFile {
            version: FORMAT_VERSION,
            scheme: scheme.to_string(),
            sequence: SequenceSection {
                m0: Decimal::from(&seq.m0),
                moduli: decimals(&seq.moduli),
                k: seq.k,
                theta: seq.theta.to_string(),
            },
            hierarchy: HierarchySection {
                level_sizes: params.hierarchy().level_sizes().to_vec(),
                thresholds: params.hierarchy().thresholds().to_vec(),
            },
            owf: OwfSection {
                kind: kind.to_string(),
                family_tag: hex::encode(&owf.family_tag),
                digest_name,
            },
        }
    }

    pub fn scheme_kind(&self) -> Result<SchemeKind, FormatError> {
        self.scheme
            .parse()
            .map_err(|_| FormatError::UnknownScheme(self.scheme.clone()))
    }

    pub fn owf_family(&self) -> Result<OwfFamily, FormatError> {
        let tag = hex::decode(&self.owf.family_tag).map_err(|_| FormatError::Hex {
            field: "owf.family_tag",
        })?;
        if hex::encode(&tag) != self.owf.family_tag {
            return Err(FormatError::Hex {
                field: "owf.family_tag",
            });
        }
        match (self.owf.kind.as_str(), &self.owf.digest_name) {
            ("hash", Some(name)) => Ok(OwfFamily::hash_based(name.parse::<DigestName>()?, tag)),
            ("test_affine", None) => Ok(OwfFamily::test_affine()),
            (other, _) => Err(FormatError::UnknownOwf(other.to_string())),
        }
    }

    pub fn sequence(&self) -> Result<CompactSequence, FormatError> {
        Ok(CompactSequence {
            m0: self.sequence.m0.0.clone(),
            moduli: naturals(&self.sequence.moduli),
            k: self.sequence.k,
            theta: self.sequence.theta.parse::<Theta>()?,
        })
    }

    /// Builds and validates the parameter set. Structural problems surface
    /// as `hiercrt::Error::InvalidParams`.
    pub fn to_params(&self) -> Result<SchemeParams, FormatError> {
        check_version(self.version)?;
        self.scheme_kind()?;
        let hierarchy = Hierarchy::new(
            self.hierarchy.level_sizes.clone(),
            self.hierarchy.thresholds.clone(),
        );
        Ok(SchemeParams::new(
            self.sequence()?,
            hierarchy,
            self.owf_family()?,
        )?)
    }

    /// Lowercase hex SHA-256 of the compact canonical JSON.
    pub fn digest(&self) -> String {
        let compact = serde_json::to_string(&serde_json::to_value(self).expect("serializable"))
            .expect("serializable");
        hex::encode(Sha256::digest(compact.as_bytes()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShareFile {
    pub version: u32,
    pub scheme: String,
    pub participant: usize,
    pub level: usize,
    pub modulus: Decimal,
    pub value: Decimal,
    pub params_digest: String,
}

impl ShareFile {
    pub fn new(share: &Share, scheme: SchemeKind, params_digest: &str) -> Self {
        ShareFile {
            version: FORMAT_VERSION,
            scheme: scheme.to_string(),
            participant: share.participant,
            level: share.level,
            modulus: Decimal::from(&share.modulus),
            value: Decimal::from(&share.value),
            params_digest: params_digest.to_string(),
        }
    }

    pub fn share(&self) -> Result<Share, FormatError> {
        check_version(self.version)?;
        Ok(Share {
            participant: self.participant,
            level: self.level,
            modulus: self.modulus.0.clone(),
            value: self.value.0.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublicEntry {
    pub participant: usize,
    pub level: usize,
    pub value: Decimal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublicBundleFile {
    pub version: u32,
    pub scheme: String,
    pub params: ParamFile,
    pub w: Vec<PublicEntry>,
    /// SHA-256 of the entropy-drawn seed, present only when no seed was given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_commitment: Option<String>,
}

impl PublicBundleFile {
    pub fn new(public: &PublicBundle, seed_commitment: Option<String>) -> Self {
        PublicBundleFile {
            version: FORMAT_VERSION,
            scheme: public.scheme.to_string(),
            params: ParamFile::from_params(&public.params, public.scheme),
            w: public
                .w
                .iter()
                .map(|(&(participant, level), v)| PublicEntry {
                    participant,
                    level,
                    value: Decimal::from(v),
                })
                .collect(),
            seed_commitment,
        }
    }

    /// Rebuilds the bundle. Entries outside the publication rule are
    /// rejected; missing ones are left for reconstruction to report.
    pub fn bundle(&self) -> Result<PublicBundle, FormatError> {
        check_version(self.version)?;
        let scheme: SchemeKind = self
            .scheme
            .parse()
            .map_err(|_| FormatError::UnknownScheme(self.scheme.clone()))?;
        let params = self.params.to_params()?;
        let expected = PublicBundle::expected_keys(&params);
        let mut w = BTreeMap::new();
        for e in &self.w {
            let key = (e.participant, e.level);
            if !expected.contains(&key) {
                return Err(FormatError::UnexpectedEntry {
                    participant: e.participant,
                    level: e.level,
                });
            }
            if &e.value.0 >= params.modulus(e.participant) {
                return Err(FormatError::Core(hiercrt::Error::ResidueOutOfRange {
                    residue: e.value.0.clone(),
                    modulus: params.modulus(e.participant).clone(),
                }));
            }
            if w.insert(key, e.value.0.clone()).is_some() {
                return Err(FormatError::DuplicateEntry {
                    participant: e.participant,
                    level: e.level,
                });
            }
        }
        Ok(PublicBundle { scheme, params, w })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DealerSecretsFile {
    pub version: u32,
    pub notice: String,
    pub scheme: String,
    pub params_digest: String,
    pub ys: Vec<Decimal>,
    pub alphas: Vec<Decimal>,
    pub deltas: Vec<Decimal>,
    pub masks: Vec<Decimal>,
}

impl DealerSecretsFile {
    pub fn new(secrets: &DealerSecrets, scheme: SchemeKind, params_digest: &str) -> Self {
        DealerSecretsFile {
            version: FORMAT_VERSION,
            notice: DEALER_SECRETS_NOTICE.to_string(),
            scheme: scheme.to_string(),
            params_digest: params_digest.to_string(),
            ys: decimals(&secrets.ys),
            alphas: decimals(&secrets.alphas),
            deltas: decimals(&secrets.deltas),
            masks: decimals(&secrets.masks),
        }
    }
}

fn check_version(v: u32) -> Result<(), FormatError> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(FormatError::Version(v))
    }
}

/// Canonical pretty form with sorted keys and a trailing newline.
pub fn to_canonical<T: Serialize>(value: &T) -> String {
    let tree = serde_json::to_value(value).expect("formats serialize to JSON");
    let mut text = serde_json::to_string_pretty(&tree).expect("JSON value prints");
    text.push('\n');
    text
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, FormatError> {
    Ok(serde_json::from_str(text)?)
}
