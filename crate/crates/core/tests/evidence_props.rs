mod common;

use common::measure_strategy;
use lookback_core::evidence::{replay_matches, InfinityBranch};
use lookback_core::strategy::paths::adversarial_library;
use lookback_core::{bet_transform, calibrate_stream, Adjuster, AdjusterStrategy, Capital, Error, EvidenceStream};
use proptest::prelude::*;

fn families() -> Vec<Adjuster<f64>> {
    vec![
        Adjuster::power(0.5).unwrap(),
        Adjuster::power(0.1).unwrap(),
        Adjuster::log(1.0).unwrap(),
        Adjuster::threshold(3.0).unwrap(),
        Adjuster::cash_mix(0.3, Adjuster::power(0.5).unwrap()).unwrap(),
    ]
}

/// Geometric stream with log-increments in `[−0.7, 0.7]`, starting at 1.
fn stream_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.7f64..0.7, 1..200).prop_map(|steps| {
        let mut k = vec![1.0];
        for s in steps {
            k.push(k.last().unwrap() * s.exp());
        }
        k
    })
}

proptest! {
    #[test]
    fn guarantee_on_random_streams(k in stream_strategy(), which in 0usize..5) {
        let a = &families()[which];
        let out = calibrate_stream(a, &EvidenceStream::from_reals(&k).unwrap()).unwrap();
        for s in &out.steps {
            prop_assert!(s.guarantee_holds(1e-9), "{:?}", s);
            prop_assert!(s.calibrated >= Capital::Finite(out.cash * s.capital.to_real() * (1.0 - 1e-12)));
        }
    }

    #[test]
    fn calibration_is_a_replay(k in stream_strategy(), m in measure_strategy(12)) {
        let a = Adjuster::Discrete(m);
        let stream = EvidenceStream::from_reals(&k).unwrap();
        let out = calibrate_stream(&a, &stream).unwrap();
        prop_assert!(replay_matches(&AdjusterStrategy::new(&a), &stream, &out));
        for s in &out.steps {
            prop_assert!(s.guarantee_holds(1e-9), "{:?}", s);
        }
    }

    #[test]
    fn bets_stay_nonnegative(k_prev in 0.0f64..10.0, p in 0.0f64..=1.0, slack in 0.0f64..5.0, x in 0.0f64..100.0) {
        let g = bet_transform(|x: f64| x.sqrt(), k_prev, p * k_prev + slack, p).unwrap();
        prop_assert!(g(x) >= 0.0);
    }
}

#[test]
fn adversarial_streams_keep_the_guarantee() {
    for a in families() {
        for (name, path) in adversarial_library(1.0) {
            let k = path.prices().to_vec();
            let out = calibrate_stream(&a, &EvidenceStream::from_reals(&k).unwrap()).unwrap();
            assert!(out.steps.iter().all(|s| s.guarantee_holds(1e-9)), "{name}");
        }
    }
}

#[test]
fn ramp_then_crash() {
    // up to 100 in 100 steps, then down to 0: F(100) = 0.5·√100 survives
    let mut k: Vec<f64> = (1..=100).map(f64::from).collect();
    k.extend((1..=100).map(|i| 100.0 - f64::from(i)));
    let out = calibrate_stream(&Adjuster::power(0.5).unwrap(), &EvidenceStream::from_reals(&k).unwrap()).unwrap();
    assert_eq!(out.steps.len(), 200);
    assert!(out.final_capital().finite().unwrap() >= 5.0 - 1e-9);
}

#[test]
fn cash_fraction_is_kept() {
    let a: Adjuster<f64> = Adjuster::cash_mix(0.3, Adjuster::log(0.5).unwrap()).unwrap();
    let k = [1.0, 2.0, 8.0, 0.5, 20.0, 0.0, 0.0, 3.0];
    let out = calibrate_stream(&a, &EvidenceStream::from_reals(&k).unwrap()).unwrap();
    assert!((out.cash - 0.3).abs() < 1e-15);
    for s in &out.steps {
        let k: f64 = s.capital.to_real();
        assert!(s.calibrated.to_real() >= 0.3 * k - 1e-12, "{s:?}");
    }
}

#[test]
fn infinite_capital() {
    let s = EvidenceStream::new(vec![
        Capital::Finite(1.0),
        Capital::Finite(0.5),
        Capital::Infinite,
        Capital::Infinite,
        Capital::Finite(7.0),
    ])
    .unwrap();
    let out = calibrate_stream(&Adjuster::log(1.0).unwrap(), &s).unwrap();
    assert_eq!(out.infinity, Some(InfinityBranch::Explode { at: 2 }));
    assert_eq!(out.final_capital(), Capital::Infinite);
    assert_eq!(out.steps.len(), 5);

    // everything was cashed out at K* = 1
    let out = calibrate_stream(&Adjuster::threshold(1.0).unwrap(), &s).unwrap();
    assert_eq!(out.infinity, Some(InfinityBranch::Freeze { at: 2 }));
    assert_eq!(out.final_capital(), Capital::Finite(1.0));
}

#[test]
fn invalid_adjusters_are_rejected() {
    let a = Adjuster::Power { alpha: 0.5, cash: 0.0 };
    let s = EvidenceStream::from_reals(&[1.0, 2.0]).unwrap();
    assert!(calibrate_stream(&a, &s).is_ok());
    let bad = Adjuster::Power { alpha: 0.5, cash: -0.1 };
    assert!(calibrate_stream(&bad, &s).is_err());
}

#[test]
fn bet_examples() {
    // p = 0.5 of a bet that doubles: 1 + 0.5·(2 − 1)
    let g = bet_transform(|x: f64| 2.0 * x, 1.0, 1.0, 0.5).unwrap();
    assert_eq!(g(1.0), 1.5);
    assert!(matches!(bet_transform(|x: f64| x, f64::INFINITY, 1.0, 0.5), Err(Error::Contract(_))));
    assert!(matches!(bet_transform(|x: f64| x, 1.0, 1.0, f64::NAN), Err(Error::Contract(_))));
}
