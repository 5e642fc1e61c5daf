//! Compact coprime sequences, hierarchy partitions and the public parameter
//! bundle shared by every scheme.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::oneway::OwfFamily;
use crate::prime::is_prime;

/// Intervals up to this many candidates are shuffled and scanned in full;
/// wider ones are sampled.
const FULL_SCAN_LIMIT: u64 = 1 << 20;

/// The compactness exponent, kept rational so the window bound is exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Theta {
    num: u32,
    den: u32,
}

impl Theta {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num >= den {
            return Err(Error::InvalidTheta(format!("{num}/{den}")));
        }
        Ok(Self { num, den })
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    /// `⌊base^(num/den)⌋`, computed as the integer `den`-th root of `base^num`.
    pub fn floor_power(&self, base: &BigUint) -> BigUint {
        base.pow(self.num).nth_root(self.den)
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Theta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidTheta(s.to_string());
        let (p, q) = s.split_once('/').ok_or_else(bad)?;
        let p: u32 = p.parse().map_err(|_| bad())?;
        let q: u32 = q.parse().map_err(|_| bad())?;
        Theta::new(p, q).map_err(|_| bad())
    }
}

/// `m0 < m_1 < ... < m_n`, pairwise coprime, each `m_i` in the open window
/// `(k·m0, k·m0 + ⌊m0^θ⌋)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompactSequence {
    pub m0: BigUint,
    pub moduli: Vec<BigUint>,
    pub k: u32,
    pub theta: Theta,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceViolation {
    M0NotPrime,
    /// `moduli[index - 1] >= moduli[index]`, with index 0 standing for m0.
    NotIncreasing { index: usize },
    NotCoprime { first: usize, second: usize, gcd: BigUint },
    OutsideWindow {
        index: usize,
        value: BigUint,
        lower: BigUint,
        upper: BigUint,
    },
    KIsZero,
}

impl SequenceViolation {
    /// Violations of the compactness window alone do not stop a scheme from
    /// working; everything else does.
    pub fn is_structural(&self) -> bool {
        !matches!(self, SequenceViolation::OutsideWindow { .. })
    }
}

impl fmt::Display for SequenceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceViolation::M0NotPrime => write!(f, "m0 is not prime"),
            SequenceViolation::NotIncreasing { index } => {
                write!(f, "m_{} is not larger than m_{}", index, index - 1)
            }
            SequenceViolation::NotCoprime { first, second, gcd } => {
                write!(f, "gcd(m_{first}, m_{second}) = {gcd}")
            }
            SequenceViolation::OutsideWindow {
                index,
                value,
                lower,
                upper,
            } => write!(f, "m_{index} = {value} is outside ({lower}, {upper})"),
            SequenceViolation::KIsZero => write!(f, "k must be at least 1"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HierarchyViolation {
    NoLevels,
    LengthMismatch { sizes: usize, thresholds: usize },
    EmptyLevel { level: usize },
    ZeroThreshold { level: usize },
    NotStrictlyIncreasing { level: usize, previous: usize, current: usize },
    ExceedsCumulative { level: usize, threshold: usize, cumulative: usize },
}

impl fmt::Display for HierarchyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HierarchyViolation::NoLevels => write!(f, "hierarchy has no levels"),
            HierarchyViolation::LengthMismatch { sizes, thresholds } => write!(
                f,
                "{sizes} level sizes but {thresholds} thresholds"
            ),
            HierarchyViolation::EmptyLevel { level } => write!(f, "level {level} is empty"),
            HierarchyViolation::ZeroThreshold { level } => {
                write!(f, "threshold of level {level} is zero")
            }
            HierarchyViolation::NotStrictlyIncreasing {
                level,
                previous,
                current,
            } => write!(
                f,
                "thresholds not strictly increasing at level {level} (t_{} = {previous}, t_{level} = {current})",
                level - 1
            ),
            HierarchyViolation::ExceedsCumulative {
                level,
                threshold,
                cumulative,
            } => write!(
                f,
                "t_{level} = {threshold} exceeds the {cumulative} participants of levels 1..={level}"
            ),
        }
    }
}

/// Either a clean pass or every violation found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport<V> {
    pub violations: Vec<V>,
}

impl<V> ValidationReport<V> {
    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }
}

impl CompactSequence {
    /// Exclusive lower end `k·m0` of the window.
    pub fn window_lower(&self) -> BigUint {
        &self.m0 * self.k
    }

    /// Exclusive upper end `k·m0 + ⌊m0^θ⌋` of the window.
    pub fn window_upper(&self) -> BigUint {
        self.window_lower() + self.theta.floor_power(&self.m0)
    }

    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }

    /// `m_i` for a 1-based participant index; index 0 is m0.
    pub fn modulus(&self, index: usize) -> &BigUint {
        if index == 0 {
            &self.m0
        } else {
            &self.moduli[index - 1]
        }
    }

    /// `m_1 · ... · m_t`.
    pub fn prefix_product(&self, t: usize) -> BigUint {
        self.moduli[..t].iter().product()
    }

    pub fn validate(&self) -> ValidationReport<SequenceViolation> {
        validate_compact(self)
    }
}

/// Checks primality of m0, strict ordering, pairwise coprimality and the
/// compactness window, reporting every violation.
pub fn validate_compact(seq: &CompactSequence) -> ValidationReport<SequenceViolation> {
    let mut violations = Vec::new();
    if seq.k == 0 {
        violations.push(SequenceViolation::KIsZero);
    }
    if !is_prime(&seq.m0) {
        violations.push(SequenceViolation::M0NotPrime);
    }
    let all: Vec<&BigUint> = std::iter::once(&seq.m0).chain(&seq.moduli).collect();
    for index in 1..all.len() {
        if all[index - 1] >= all[index] {
            violations.push(SequenceViolation::NotIncreasing { index });
        }
    }
    for first in 0..all.len() {
        for second in first + 1..all.len() {
            let gcd = all[first].gcd(all[second]);
            if !gcd.is_one() {
                violations.push(SequenceViolation::NotCoprime { first, second, gcd });
            }
        }
    }
    let (lower, upper) = (seq.window_lower(), seq.window_upper());
    for (i, m) in seq.moduli.iter().enumerate() {
        if *m <= lower || *m >= upper {
            violations.push(SequenceViolation::OutsideWindow {
                index: i + 1,
                value: m.clone(),
                lower: lower.clone(),
                upper: upper.clone(),
            });
        }
    }
    ValidationReport { violations }
}

/// Draws `n` pairwise coprime moduli from the open window
/// `(k·m0, k·m0 + ⌊m0^θ⌋)`, visiting candidates in seeded random order and
/// accepting greedily, then sorts them.
pub fn generate_compact_sequence(
    m0: &BigUint,
    n: usize,
    k: u32,
    theta: Theta,
    seed: u64,
) -> Result<CompactSequence> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    if !is_prime(m0) {
        return Err(Error::NotPrime(m0.clone()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let lower = m0 * k;
    let upper = &lower + theta.floor_power(m0);
    let exhausted = |found: usize| Error::IntervalExhausted {
        needed: n,
        found,
        lower: lower.clone(),
        upper: upper.clone(),
    };
    // Integers strictly inside the window.
    let width = (&upper - &lower).to_u64().map(|w| w.saturating_sub(1));
    let mut accepted: Vec<BigUint> = Vec::with_capacity(n);
    let try_accept = |c: BigUint, accepted: &mut Vec<BigUint>| {
        if c.gcd(m0).is_one() && accepted.iter().all(|a| a.gcd(&c).is_one()) {
            accepted.push(c);
        }
    };
    match width {
        Some(w) if w <= FULL_SCAN_LIMIT => {
            let mut offsets: Vec<u64> = (1..=w).collect();
            offsets.shuffle(&mut rng);
            for off in offsets {
                if accepted.len() == n {
                    break;
                }
                try_accept(&lower + off, &mut accepted);
            }
        }
        _ => {
            let span = &upper - &lower - 1u32;
            let mut seen = HashSet::new();
            let max_draws = 64 * n + 10_000;
            for _ in 0..max_draws {
                if accepted.len() == n {
                    break;
                }
                let c = &lower + 1u32 + rng.gen_biguint_below(&span);
                if seen.insert(c.clone()) {
                    try_accept(c, &mut accepted);
                }
            }
        }
    }
    if accepted.len() < n {
        return Err(exhausted(accepted.len()));
    }
    accepted.sort();
    Ok(CompactSequence {
        m0: m0.clone(),
        moduli: accepted,
        k,
        theta,
    })
}

/// `m0 · m_1 ⋯ m_{t-1} < m_1 ⋯ m_t`, by exact comparison.
pub fn check_ab_constraint(seq: &CompactSequence, t: usize) -> Result<bool> {
    if t == 0 || t > seq.moduli.len() {
        return Err(Error::ThresholdOutOfRange {
            t,
            n: seq.moduli.len(),
        });
    }
    let left = &seq.m0 * seq.prefix_product(t - 1);
    Ok(left < seq.prefix_product(t))
}

/// Level sizes `n_1..n_m` and thresholds `t_1..t_m`. Participants are numbered
/// `1..=n` level by level, so participant `i` is in level `ℓ` iff
/// `N_{ℓ-1} < i <= N_ℓ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hierarchy {
    level_sizes: Vec<usize>,
    thresholds: Vec<usize>,
}

impl Hierarchy {
    pub fn new(level_sizes: Vec<usize>, thresholds: Vec<usize>) -> Self {
        Self {
            level_sizes,
            thresholds,
        }
    }

    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    pub fn thresholds(&self) -> &[usize] {
        &self.thresholds
    }

    /// Number of levels `m`.
    pub fn levels(&self) -> usize {
        self.level_sizes.len()
    }

    /// Total participants `n`.
    pub fn participants(&self) -> usize {
        self.level_sizes.iter().sum()
    }

    /// `N_ℓ`; `cumulative(0) = 0`.
    pub fn cumulative(&self, level: usize) -> usize {
        self.level_sizes[..level].iter().sum()
    }

    /// `t_ℓ` for 1-based `level`.
    pub fn threshold(&self, level: usize) -> usize {
        self.thresholds[level - 1]
    }

    /// `N_{m-1}`: participants whose share is a random mask.
    pub fn masked_participants(&self) -> usize {
        self.cumulative(self.levels().saturating_sub(1))
    }

    pub fn level_of(&self, participant: usize) -> Option<usize> {
        if participant == 0 {
            return None;
        }
        let mut upto = 0;
        for (l, size) in self.level_sizes.iter().enumerate() {
            upto += size;
            if participant <= upto {
                return Some(l + 1);
            }
        }
        None
    }

    pub fn validate(&self) -> ValidationReport<HierarchyViolation> {
        validate_hierarchy(self)
    }
}

pub fn validate_hierarchy(h: &Hierarchy) -> ValidationReport<HierarchyViolation> {
    let mut violations = Vec::new();
    if h.level_sizes.is_empty() {
        violations.push(HierarchyViolation::NoLevels);
    }
    if h.level_sizes.len() != h.thresholds.len() {
        violations.push(HierarchyViolation::LengthMismatch {
            sizes: h.level_sizes.len(),
            thresholds: h.thresholds.len(),
        });
        return ValidationReport { violations };
    }
    let mut cumulative = 0;
    for (idx, (&size, &t)) in h.level_sizes.iter().zip(&h.thresholds).enumerate() {
        let level = idx + 1;
        cumulative += size;
        if size == 0 {
            violations.push(HierarchyViolation::EmptyLevel { level });
        }
        if t == 0 {
            violations.push(HierarchyViolation::ZeroThreshold { level });
        }
        if idx > 0 && h.thresholds[idx - 1] >= t {
            violations.push(HierarchyViolation::NotStrictlyIncreasing {
                level,
                previous: h.thresholds[idx - 1],
                current: t,
            });
        }
        if t > cumulative {
            violations.push(HierarchyViolation::ExceedsCumulative {
                level,
                threshold: t,
                cumulative,
            });
        }
    }
    ValidationReport { violations }
}

/// The public parameters of a deal.
///
/// Construction enforces a usable scheme: a valid hierarchy, one modulus per
/// participant, a prime m0, strictly increasing pairwise coprime moduli and the
/// Asmuth-Bloom constraint at every level threshold. The compactness window is
/// not enforced here (see [`CompactSequence::validate`]).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SchemeParams {
    sequence: CompactSequence,
    hierarchy: Hierarchy,
    owf: OwfFamily,
}

impl SchemeParams {
    pub fn new(sequence: CompactSequence, hierarchy: Hierarchy, owf: OwfFamily) -> Result<Self> {
        let mut problems: Vec<String> = hierarchy
            .validate()
            .violations
            .iter()
            .map(ToString::to_string)
            .collect();
        problems.extend(
            sequence
                .validate()
                .violations
                .iter()
                .filter(|v| v.is_structural())
                .map(ToString::to_string),
        );
        if problems.is_empty() {
            let n = hierarchy.participants();
            if sequence.moduli.len() != n {
                problems.push(format!(
                    "{} moduli for {} participants",
                    sequence.moduli.len(),
                    n
                ));
            } else {
                for (l, &t) in hierarchy.thresholds().iter().enumerate() {
                    if !check_ab_constraint(&sequence, t)? {
                        problems.push(format!(
                            "Asmuth-Bloom constraint fails at level {} (t = {t})",
                            l + 1
                        ));
                    }
                }
            }
        }
        if problems.is_empty() {
            Ok(Self {
                sequence,
                hierarchy,
                owf,
            })
        } else {
            Err(Error::InvalidParams(problems))
        }
    }

    pub fn sequence(&self) -> &CompactSequence {
        &self.sequence
    }

    pub fn hierarchy(&self) -> &Hierarchy {
        &self.hierarchy
    }

    pub fn owf(&self) -> &OwfFamily {
        &self.owf
    }

    pub fn m0(&self) -> &BigUint {
        &self.sequence.m0
    }

    /// `m_i` for a 1-based participant.
    pub fn modulus(&self, participant: usize) -> &BigUint {
        self.sequence.modulus(participant)
    }

    /// `m_1 ⋯ m_{t_ℓ}`: the exclusive upper bound on the level-ℓ value.
    pub fn level_bound(&self, level: usize) -> BigUint {
        self.sequence.prefix_product(self.hierarchy.threshold(level))
    }

    pub fn check_secret(&self, secret: &BigUint) -> Result<()> {
        if secret >= self.m0() {
            return Err(Error::SecretOutOfRange {
                m0: self.m0().clone(),
            });
        }
        Ok(())
    }
}

/// Number of `a >= 0` with `offset + a·m0 < bound`, or zero.
pub(crate) fn multiplier_count(offset: &BigUint, m0: &BigUint, bound: &BigUint) -> BigUint {
    if offset >= bound {
        return BigUint::zero();
    }
    (bound - offset - 1u32) / m0 + 1u32
}
