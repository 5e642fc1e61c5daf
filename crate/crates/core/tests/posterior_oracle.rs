use hiercrt::analysis::{
    enumerate_posterior, decompose_counts, scan_posterior, AdversaryView, AnalysisConfig,
    OracleLimits,
};
use hiercrt::{
    chss_deal, dhss_deal, generate_compact_sequence, seeded_rng, Error, Hierarchy, OwfFamily,
    Retain, SchemeParams, Theta,
};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn fast_path_equals_scan(
        m0 in prop::sample::select(vec![11u64, 13, 17, 23, 29, 31]),
        shape in prop::sample::select(vec![
            (vec![1usize, 2], vec![1usize, 2]),
            (vec![2, 1], vec![1, 2]),
            (vec![1, 1, 1], vec![1, 2, 3]),
            (vec![3], vec![2]),
        ]),
        seed in any::<u64>(),
        mask in any::<u8>(),
        conjunctive in any::<bool>(),
    ) {
        let (sizes, thresholds) = shape;
        let n: usize = sizes.iter().sum();
        let Ok(seq) = generate_compact_sequence(&big(m0), n, 1, Theta::new(9, 10).unwrap(), seed) else {
            return Ok(());
        };
        let params = SchemeParams::new(seq, Hierarchy::new(sizes, thresholds), OwfFamily::test_affine()).unwrap();
        let secret = big(seed % m0);
        let mut rng = seeded_rng(seed);
        let deal = if conjunctive {
            chss_deal(&secret, &params, &mut rng, Retain::Discard).unwrap()
        } else {
            dhss_deal(&secret, &params, &mut rng, Retain::Discard).unwrap()
        };
        let shares = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).map(|i| deal.shares[i - 1].clone()).collect();
        let view = match AdversaryView::hierarchical(shares, deal.public) {
            Ok(v) => v,
            Err(Error::CoalitionAuthorized(_)) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let report = enumerate_posterior(&view, &AnalysisConfig::default()).unwrap();
        let scan = match scan_posterior(&view, &OracleLimits::default()) {
            Ok(s) => s,
            Err(Error::OracleInfeasible(_)) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let fast: Vec<u64> = report.per_secret_counts.iter().map(|c| c.to_u64().unwrap()).collect();
        prop_assert_eq!(&fast, &scan);
        prop_assert!(fast[(seed % m0) as usize] >= 1);
        prop_assert!(report.loss >= 0.0 && report.likelihood_loss >= 0.0);
        if !conjunctive {
            let dec = decompose_counts(&report, &view).unwrap();
            prop_assert_eq!(dec.weighted_sum, report.total);
            prop_assert_eq!(dec.gamma_total, m0);
        }
    }
}
