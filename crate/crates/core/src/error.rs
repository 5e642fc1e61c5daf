use num_bigint::BigUint;
use thiserror::Error;

/// A level whose cumulative threshold is not met by a participant set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelDeficit {
    pub level: usize,
    pub have: usize,
    pub need: usize,
}

impl std::fmt::Display for LevelDeficit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "level {} has {} of {} required", self.level, self.have, self.need)
    }
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{a} and {b} are not coprime")]
    NotCoprime { a: BigUint, b: BigUint },
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(BigUint),
    #[error("residue {residue} is not reduced modulo {modulus}")]
    ResidueOutOfRange { residue: BigUint, modulus: BigUint },
    #[error("congruence system is empty")]
    EmptySystem,
    #[error("moduli #{first} ({a}) and #{second} ({b}) are not coprime")]
    ModuliNotPairwiseCoprime {
        first: usize,
        second: usize,
        a: BigUint,
        b: BigUint,
    },

    #[error("theta must be a rational p/q with 0 < p < q, got {0}")]
    InvalidTheta(String),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("only {found} of {needed} pairwise coprime integers found in ({lower}, {upper})")]
    IntervalExhausted {
        needed: usize,
        found: usize,
        lower: BigUint,
        upper: BigUint,
    },
    #[error("threshold {t} out of range 1..={n}")]
    ThresholdOutOfRange { t: usize, n: usize },
    #[error("invalid scheme parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("one-way function level must be at least 1, got {0}")]
    LevelOutOfRange(usize),
    #[error("unknown digest {0:?}")]
    UnknownDigest(String),

    #[error("secret must lie in [0, {m0})")]
    SecretOutOfRange { m0: BigUint },
    #[error("Asmuth-Bloom constraint fails for threshold {t}")]
    AbConstraintViolated { t: usize },
    #[error("need at least {need} shares, got {have}")]
    TooFewShares { have: usize, need: usize },
    #[error("shares are inconsistent with a single deal")]
    InconsistentShares,
    #[error("participant {0} appears more than once")]
    DuplicateParticipant(usize),
    #[error("participant {participant} does not match the parameter set: {reason}")]
    ShareMismatch { participant: usize, reason: String },
    #[error("dealer draw out of range: {0}")]
    DrawOutOfRange(String),

    #[error("participant set is not authorized: {}", join(.0))]
    NotAuthorized(Vec<LevelDeficit>),
    #[error("public bundle has no masked value for participant {participant} at level {level}")]
    MissingPublicValue { participant: usize, level: usize },

    #[error("coalition is authorized at level {0}; nothing to audit")]
    CoalitionAuthorized(usize),
    #[error("estimated work {estimate} exceeds budget {budget}")]
    IntractableInstance { estimate: u128, budget: u128 },
    #[error("per-secret count {0} matches no floor-plus-selector product")]
    DecompositionMismatch(BigUint),
    #[error("level {level} has {actual} coalition members, expected {expected}")]
    WrongCardinality {
        level: usize,
        expected: usize,
        actual: usize,
    },
    #[error("view is not a single-layer threshold view")]
    NotFlat,
    #[error("per-secret count {count} is neither {eta} nor {eta}+1")]
    DichotomyViolated { count: BigUint, eta: BigUint },
    #[error("instance too large for the exhaustive scan: {0}")]
    OracleInfeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
