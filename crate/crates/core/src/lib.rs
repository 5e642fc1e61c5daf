//! Hierarchical threshold secret sharing over compact coprime sequences,
//! built on the Chinese remainder theorem.
//!
//! - [`crt`]: congruence solving and modular inverses.
//! - [`params`]: compact coprime sequences, hierarchies and parameter checks.
//! - [`oneway`]: the public masking functions.
//! - [`asmuth_bloom`]: the flat threshold scheme.
//! - [`dhss`] and [`chss`]: disjunctive and conjunctive hierarchical schemes.
//! - [`analysis`]: posterior enumeration, entropy loss and information rate.

pub mod analysis;
pub mod asmuth_bloom;
pub mod chss;
pub mod crt;
pub mod dhss;
pub mod error;
pub mod oneway;
pub mod params;
pub mod prime;
pub mod share;

pub use asmuth_bloom::{ab_reconstruct, ab_split, ab_split_with_alpha, AbDeal};
pub use chss::{chss_deal, chss_deal_with_draws, chss_is_authorized, chss_reconstruct, ChssDraws};
pub use crt::{crt_solve, ext_gcd, mod_inverse, Congruence, CrtSolution};
pub use dhss::{dhss_authorized_level, dhss_deal, dhss_deal_with_draws, dhss_reconstruct, DhssDraws};
pub use error::{Error, LevelDeficit, Result};
pub use oneway::{eval_owf, DigestName, OwfFamily, OwfKind};
pub use params::{
    check_ab_constraint, generate_compact_sequence, validate_compact, validate_hierarchy,
    CompactSequence, Hierarchy, SchemeParams, Theta,
};
pub use share::{DealResult, DealerSecrets, PublicBundle, Retain, SchemeKind, Share};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// The deterministic generator used for every seeded draw.
pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}
