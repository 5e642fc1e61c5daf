//! Primality testing and prime sampling for the base modulus.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

// The first twelve prime bases make Miller-Rabin exact below 3.3e24.
const DETERMINISTIC_BASES: usize = 12;

fn strong_probable_prime(n: &BigUint, base: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let shift = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> shift;
    let mut x = base.modpow(&d, n);
    if x == one || x == n_minus_one {
        return true;
    }
    for _ in 1..shift {
        x = (&x * &x) % n;
        if x == n_minus_one {
            return true;
        }
    }
    false
}

/// Miller-Rabin with fixed bases: exact below 3.3·10^24, and beyond that a
/// fixed 25-base test.
pub fn is_prime(n: &BigUint) -> bool {
    if *n < BigUint::from(2u32) {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let exact = n.bits() <= 81;
    let bases = if exact {
        &SMALL_PRIMES[..DETERMINISTIC_BASES]
    } else {
        &SMALL_PRIMES[..]
    };
    bases
        .iter()
        .all(|&b| strong_probable_prime(n, &BigUint::from(b)))
}

/// Samples a prime with exactly `bits` bits.
pub fn random_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    assert!(bits >= 2, "a prime needs at least two bits");
    if bits == 2 {
        return BigUint::from(if rng.gen::<bool>() { 2u32 } else { 3u32 });
    }
    loop {
        let mut candidate = rng.gen_biguint(bits);
        candidate.set_bit(bits - 1, true);
        candidate.set_bit(0, true);
        if is_prime(&candidate) {
            return candidate;
        }
    }
}

/// Smallest prime `>= n`.
pub fn next_prime(n: &BigUint) -> BigUint {
    let mut c = n.clone().max(BigUint::from(2u32));
    if c > BigUint::from(2u32) && c.is_even() {
        c += 1u32;
    }
    while !is_prime(&c) {
        c += if c == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn sieve(limit: usize) -> Vec<bool> {
        let mut flags = vec![true; limit];
        flags[0] = false;
        flags[1] = false;
        for i in 2..limit {
            if flags[i] {
                for j in (i * i..limit).step_by(i) {
                    flags[j] = false;
                }
            }
        }
        flags
    }

    #[test]
    fn agrees_with_sieve() {
        let flags = sieve(20_000);
        for (n, &p) in flags.iter().enumerate() {
            assert_eq!(is_prime(&BigUint::from(n)), p, "n = {n}");
        }
    }

    #[test]
    fn known_values() {
        assert!(is_prime(&BigUint::from(2_147_483_647u64)));
        assert!(is_prime(&BigUint::from(99_991u64)));
        assert!(!is_prime(&BigUint::from(3_215_031_751u64))); // strong pseudoprime to 2,3,5,7
        let m127 = (BigUint::one() << 127) - 1u32;
        assert!(is_prime(&m127));
        assert!(!is_prime(&(&m127 * BigUint::from(3u32))));
    }

    #[test]
    fn sampled_prime_has_requested_size() {
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(3);
        for bits in [2u64, 8, 31, 64, 96] {
            let p = random_prime(bits, &mut rng);
            assert_eq!(p.bits(), bits);
            assert!(is_prime(&p));
        }
        assert_eq!(next_prime(&BigUint::from(90u32)), BigUint::from(97u32));
        assert_eq!(next_prime(&BigUint::from(0u32)), BigUint::from(2u32));
    }
}
