//! Exact number theory over arbitrary-precision integers: extended GCD,
//! modular inverses and Chinese remaindering.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// `x ≡ residue (mod modulus)` with `0 <= residue < modulus` and `modulus >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Congruence {
    residue: BigUint,
    modulus: BigUint,
}

impl Congruence {
    pub fn new(residue: BigUint, modulus: BigUint) -> Result<Self> {
        if modulus < BigUint::from(2u32) {
            return Err(Error::InvalidModulus(modulus));
        }
        if residue >= modulus {
            return Err(Error::ResidueOutOfRange { residue, modulus });
        }
        Ok(Self { residue, modulus })
    }

    /// Builds a congruence from any value, reducing it modulo `modulus`.
    pub fn reduced(value: &BigUint, modulus: BigUint) -> Result<Self> {
        if modulus < BigUint::from(2u32) {
            return Err(Error::InvalidModulus(modulus));
        }
        Ok(Self {
            residue: value % &modulus,
            modulus,
        })
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn holds_for(&self, x: &BigUint) -> bool {
        x % &self.modulus == self.residue
    }
}

/// The unique `value` in `[0, combined_modulus)` satisfying a congruence system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrtSolution {
    pub value: BigUint,
    pub combined_modulus: BigUint,
}

/// Per-congruence intermediates of the summation formula: `M_i = M / m_i` and
/// `λ_i = M_i^{-1} mod m_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrtTerm {
    pub cofactor: BigUint,
    pub inverse: BigUint,
}

/// Returns `(g, u, v)` with `g = gcd(a, b) >= 0` and `u·a + v·b = g`.
///
/// Panics if both inputs are zero.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    assert!(!(a.is_zero() && b.is_zero()), "ext_gcd(0, 0) is undefined");
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_u, mut u) = (BigInt::one(), BigInt::zero());
    let (mut old_v, mut v) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_u = &old_u - &q * &u;
        old_u = std::mem::replace(&mut u, next_u);
        let next_v = &old_v - &q * &v;
        old_v = std::mem::replace(&mut v, next_v);
    }
    if old_r.is_negative() {
        (-old_r, -old_u, -old_v)
    } else {
        (old_r, old_u, old_v)
    }
}

/// Inverse of `a` modulo `m`, in `[0, m)`.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Result<BigUint> {
    if *m < BigUint::from(2u32) {
        return Err(Error::InvalidModulus(m.clone()));
    }
    let a_int = BigInt::from_biguint(Sign::Plus, a % m);
    let m_int = BigInt::from_biguint(Sign::Plus, m.clone());
    let (g, u, _) = if a_int.is_zero() {
        (m_int.clone(), BigInt::zero(), BigInt::one())
    } else {
        ext_gcd(&a_int, &m_int)
    };
    if !g.is_one() {
        return Err(Error::NotCoprime {
            a: a.clone(),
            b: m.clone(),
        });
    }
    Ok(u.mod_floor(&m_int)
        .to_biguint()
        .expect("mod_floor by a positive modulus is nonnegative"))
}

fn check_pairwise_coprime<'a>(moduli: impl Iterator<Item = &'a BigUint> + Clone) -> Result<()> {
    for (i, a) in moduli.clone().enumerate() {
        for (j, b) in moduli.clone().enumerate().skip(i + 1) {
            if !a.gcd(b).is_one() {
                return Err(Error::ModuliNotPairwiseCoprime {
                    first: i,
                    second: j,
                    a: a.clone(),
                    b: b.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Computes `M_i` and `λ_i` for each modulus of a pairwise coprime list.
pub fn crt_terms(moduli: &[BigUint]) -> Result<Vec<CrtTerm>> {
    if moduli.is_empty() {
        return Err(Error::EmptySystem);
    }
    check_pairwise_coprime(moduli.iter())?;
    let product: BigUint = moduli.iter().product();
    moduli
        .iter()
        .map(|m| {
            let cofactor = &product / m;
            let inverse = mod_inverse(&cofactor, m)?;
            Ok(CrtTerm { cofactor, inverse })
        })
        .collect()
}

/// Solves a system of congruences with pairwise coprime moduli by the
/// summation `x = Σ λ_i M_i x_i mod M`.
pub fn crt_solve(system: &[Congruence]) -> Result<CrtSolution> {
    if system.is_empty() {
        return Err(Error::EmptySystem);
    }
    check_pairwise_coprime(system.iter().map(|c| &c.modulus))?;
    let moduli: Vec<BigUint> = system.iter().map(|c| c.modulus.clone()).collect();
    let terms = crt_terms(&moduli)?;
    let combined_modulus: BigUint = moduli.iter().product();
    let sum: BigUint = system
        .iter()
        .zip(&terms)
        .map(|(c, term)| &term.inverse * &term.cofactor * &c.residue)
        .sum();
    Ok(CrtSolution {
        value: sum % &combined_modulus,
        combined_modulus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn cong(r: u64, m: u64) -> Congruence {
        Congruence::new(big(r), big(m)).unwrap()
    }

    // Scans [0, M) and returns every x satisfying all congruences.
    fn scan(system: &[(u64, u64)]) -> Vec<u64> {
        let product: u64 = system.iter().map(|&(_, m)| m).product();
        (0..product)
            .filter(|x| system.iter().all(|&(r, m)| x % m == r))
            .collect()
    }

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(12i64, 18i64), (1, 0), (3, 7), (0, 5), (-12, 18), (240, -46)] {
            let (a, b) = (BigInt::from(a), BigInt::from(b));
            let (g, u, v) = ext_gcd(&a, &b);
            assert!(!g.is_negative());
            assert_eq!(&u * &a + &v * &b, g);
            assert_eq!(g, a.gcd(&b));
        }
        let (g, u, v) = ext_gcd(&BigInt::from(1), &BigInt::from(0));
        assert_eq!((g, u, v), (BigInt::one(), BigInt::one(), BigInt::zero()));
    }

    #[test]
    fn ext_gcd_three_seven_coefficient() {
        let expected = (0..7u64).find(|u| (u * 3) % 7 == 1).unwrap();
        assert_eq!(expected, 5);
        let (g, u, _) = ext_gcd(&BigInt::from(3), &BigInt::from(7));
        assert!(g.is_one());
        assert_eq!(u.mod_floor(&BigInt::from(7)), BigInt::from(expected));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(&big(3), &big(7)).unwrap(), big(5));
        assert_eq!(mod_inverse(&big(1), &big(19)).unwrap(), big(1));
        assert!(matches!(
            mod_inverse(&big(4), &big(8)),
            Err(Error::NotCoprime { .. })
        ));
        assert!(matches!(
            mod_inverse(&big(0), &big(8)),
            Err(Error::NotCoprime { .. })
        ));
        assert!(matches!(
            mod_inverse(&big(3), &big(1)),
            Err(Error::InvalidModulus(_))
        ));
    }

    #[test]
    fn solve_examples() {
        assert_eq!(scan(&[(2, 3), (3, 5)]), vec![8]);
        let sol = crt_solve(&[cong(2, 3), cong(3, 5)]).unwrap();
        assert_eq!((sol.value, sol.combined_modulus), (big(8), big(15)));

        let sol = crt_solve(&[cong(0, 3), cong(0, 5), cong(0, 7)]).unwrap();
        assert_eq!((sol.value, sol.combined_modulus), (big(0), big(105)));

        assert_eq!(scan(&[(5, 11), (12, 13)]), vec![38]);
        let sol = crt_solve(&[cong(5, 11), cong(12, 13)]).unwrap();
        assert_eq!((sol.value, sol.combined_modulus), (big(38), big(143)));
    }

    #[test]
    fn solve_errors() {
        assert_eq!(crt_solve(&[]), Err(Error::EmptySystem));
        match crt_solve(&[cong(1, 4), cong(3, 6)]) {
            Err(Error::ModuliNotPairwiseCoprime { first, second, .. }) => {
                assert_eq!((first, second), (0, 1))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn congruence_rejects_unreduced() {
        assert!(Congruence::new(big(5), big(5)).is_err());
        assert!(Congruence::new(big(0), big(1)).is_err());
        assert_eq!(
            Congruence::reduced(&big(40), big(11)).unwrap(),
            cong(7, 11)
        );
    }

    #[test]
    fn terms_are_inverse_cofactors() {
        let terms = crt_terms(&[big(11), big(13), big(17)]).unwrap();
        assert_eq!(terms[0].cofactor, big(221));
        for (term, m) in terms.iter().zip([11u64, 13, 17]) {
            assert_eq!((&term.cofactor * &term.inverse) % big(m), big(1));
        }
    }

    fn coprime_system() -> impl Strategy<Value = Vec<(u64, u64)>> {
        prop::collection::vec(2u64..60, 1..5).prop_filter_map("pairwise coprime", |ms| {
            let ok = ms
                .iter()
                .enumerate()
                .all(|(i, a)| ms[i + 1..].iter().all(|b| a.gcd(b) == 1));
            let product: u64 = ms.iter().product();
            (ok && product <= 1_000_000).then_some(ms)
        })
        .prop_flat_map(|ms| {
            let residues: Vec<_> = ms.iter().map(|&m| 0..m).collect();
            (Just(ms), residues)
        })
        .prop_map(|(ms, rs)| rs.into_iter().zip(ms).collect())
    }

    proptest! {
        #[test]
        fn solution_matches_scan(system in coprime_system()) {
            let congs: Vec<_> = system.iter().map(|&(r, m)| cong(r, m)).collect();
            let sol = crt_solve(&congs).unwrap();
            prop_assert_eq!(vec![sol.value.clone()], scan(&system).into_iter().map(big).collect::<Vec<_>>());
            for c in &congs {
                prop_assert!(c.holds_for(&sol.value));
            }
        }

        #[test]
        fn permutation_invariant(system in coprime_system(), rot in 0usize..5) {
            let congs: Vec<_> = system.iter().map(|&(r, m)| cong(r, m)).collect();
            let mut rotated = congs.clone();
            rotated.rotate_left(rot % congs.len());
            prop_assert_eq!(crt_solve(&congs).unwrap(), crt_solve(&rotated).unwrap());
        }

        #[test]
        fn redundant_congruence(system in coprime_system()) {
            let congs: Vec<_> = system.iter().map(|&(r, m)| cong(r, m)).collect();
            let sol = crt_solve(&congs).unwrap();
            let extra = (61u64..).find(|m| system.iter().all(|&(_, mi)| mi.gcd(m) == 1)).unwrap();
            let mut extended = congs.clone();
            extended.push(Congruence::reduced(&sol.value, big(extra)).unwrap());
            let wider = crt_solve(&extended).unwrap();
            prop_assert_eq!(&wider.value, &sol.value);
            prop_assert_eq!(wider.combined_modulus, sol.combined_modulus * big(extra));
        }
    }
}
