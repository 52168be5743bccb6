mod common;

use common::measure_strategy;
use lookback_core::io::{
    adjuster_to_json, calibrated_rows, format_num, parse_adjuster, parse_json, parse_num, parse_payoff,
    payoff_to_json, read_audit, read_calibrated, read_path, read_stream, round_num, to_json_line, write_audit,
    write_calibrated, write_path, write_stream, AuditRow, CalibratedRow, OracleDoc, PayoffSpec,
};
use lookback_core::strategy::paths::random_multiplicative;
use lookback_core::{
    calibrate_stream, run_path, Adjuster, AdjusterStrategy, Capital, Error, EvidenceStream, GeneralPayoff,
    SimplePayoff,
};
use proptest::prelude::*;

fn adjuster_strategy() -> impl Strategy<Value = Adjuster<f64>> {
    let leaf = prop_oneof![
        (0.01f64..0.99).prop_map(|a| Adjuster::power(a).unwrap()),
        (0.01f64..3.0).prop_map(|a| Adjuster::log(a).unwrap()),
        (1.0f64..1e6).prop_map(|u| Adjuster::threshold(u).unwrap()),
        measure_strategy(16).prop_map(Adjuster::Discrete),
        Just(Adjuster::all_cash_in_stock()),
    ];
    prop_oneof![
        3 => leaf.clone(),
        1 => (0.0f64..1.0, leaf).prop_map(|(c, a)| Adjuster::cash_mix(c, a).unwrap()),
    ]
}

fn simple_payoff() -> impl Strategy<Value = SimplePayoff> {
    let leaf = prop_oneof![
        (0.0f64..100.0).prop_map(|k| SimplePayoff::Constant { k }),
        (1e-3f64..1e3, 0.1f64..10.0).prop_map(|(u, scale)| SimplePayoff::ThresholdCall { u, scale }),
        (0.5f64..1e3).prop_map(|cap| SimplePayoff::Capped { cap }),
        (0.0f64..1.0, 0.1f64..10.0).prop_map(|(beta, scale)| SimplePayoff::PowerPayoff { beta, scale }),
        prop::collection::vec((0.01f64..2.0, 0.0f64..3.0), 1..8).prop_map(|steps| {
            let mut x = 0.5;
            let mut v = 0.0;
            let (mut grid, mut values) = (Vec::new(), Vec::new());
            for (dx, dv) in steps {
                x += dx;
                v += dv;
                grid.push(x);
                values.push(v);
            }
            SimplePayoff::Tabulated { grid, values }
        }),
    ];
    prop_oneof![
        3 => leaf.clone(),
        1 => (leaf, 0.01f64..5.0).prop_map(|(g, strike)| SimplePayoff::FixedStrike { inner: Box::new(g), strike }),
    ]
}

fn general_payoff() -> impl Strategy<Value = GeneralPayoff> {
    prop_oneof![
        simple_payoff().prop_map(GeneralPayoff::SimpleLift),
        simple_payoff().prop_map(GeneralPayoff::FloatingStrikePut),
        (0.0f64..1.0, simple_payoff()).prop_map(|(cash, inner)| GeneralPayoff::CashPlusLift { cash, inner }),
        (1usize..5, 2usize..5, any::<u64>()).prop_map(|(rows, cols, seed)| {
            let x_star: Vec<f64> = (0..rows).map(|i| 1.0 + i as f64).collect();
            let fractions: Vec<f64> = (0..cols).map(|j| j as f64 / (cols - 1) as f64).collect();
            let values = (0..rows)
                .map(|i| (0..cols).map(|j| ((seed >> ((i * cols + j) % 60)) & 7) as f64 + i as f64).collect())
                .collect();
            GeneralPayoff::Tabulated { x_star, fractions, values }
        }),
    ]
}

fn csv_text(write: impl FnOnce(&mut Vec<u8>)) -> String {
    let mut buf = Vec::new();
    write(&mut buf);
    String::from_utf8(buf).unwrap()
}

proptest! {
    #[test]
    fn numbers_keep_twelve_digits(x in prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), -1e20f64..1e20]) {
        let y = parse_num(&format_num(x)).unwrap();
        prop_assert!((x - y).abs() <= 5e-12 * x.abs(), "{} -> {}", x, y);
        prop_assert_eq!(format_num(round_num(x)), format_num(x));
    }

    #[test]
    fn adjusters_round_trip(a in adjuster_strategy()) {
        let text = adjuster_to_json(&a);
        prop_assert_eq!(parse_adjuster(&text).unwrap(), a);
    }

    #[test]
    fn simple_payoffs_round_trip(g in simple_payoff()) {
        let text = payoff_to_json(&PayoffSpec::Simple(g.clone())).unwrap();
        match parse_payoff(&text).unwrap() {
            PayoffSpec::Simple(back) => prop_assert_eq!(back, g),
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn general_payoffs_round_trip(f in general_payoff()) {
        let text = payoff_to_json(&PayoffSpec::General(f)).unwrap();
        let back = parse_payoff(&text).unwrap();
        prop_assert_eq!(payoff_to_json(&back).unwrap(), text);
    }

    #[test]
    fn paths_and_audits_round_trip(seed in any::<u64>(), len in 1usize..60) {
        let path = random_multiplicative(1.0, len, seed);
        let text = csv_text(|b| write_path(b, &path).unwrap());
        let back = read_path(text.as_bytes()).unwrap();
        prop_assert_eq!(back.prices().len(), path.prices().len());
        for (x, y) in path.prices().iter().zip(back.prices()) {
            prop_assert_eq!(round_num(*x), *y);
        }

        let a = Adjuster::power(0.5).unwrap();
        let rows: Vec<AuditRow> = run_path(&AdjusterStrategy::new(&a), &path, 1.0).unwrap().iter().map(AuditRow::from).collect();
        let text = csv_text(|b| write_audit(b, &rows).unwrap());
        let back = read_audit(text.as_bytes()).unwrap();
        let rounded: Vec<AuditRow> = rows
            .iter()
            .map(|r| AuditRow {
                price: round_num(r.price),
                running_max: round_num(r.running_max),
                position: round_num(r.position),
                capital: round_num(r.capital),
                ala_floor: round_num(r.ala_floor),
                strong_floor: round_num(r.strong_floor),
                ..*r
            })
            .collect();
        prop_assert_eq!(&back, &rounded);
        // a second trip is lossless
        prop_assert_eq!(csv_text(|b| write_audit(b, &back).unwrap()), text);
    }

    #[test]
    fn streams_round_trip(k in prop::collection::vec(prop_oneof![9 => 0.0f64..50.0, 1 => Just(f64::INFINITY)], 0..40)) {
        let mut values = vec![Capital::Finite(1.0)];
        values.extend(k.iter().map(|&x| Capital::new(x).unwrap()));
        let stream = EvidenceStream::new(values).unwrap();
        let text = csv_text(|b| write_stream(b, &stream).unwrap());
        let back = read_stream(text.as_bytes()).unwrap();
        prop_assert_eq!(csv_text(|b| write_stream(b, &back).unwrap()), text.clone());
        for (x, y) in stream.values().iter().zip(back.values()) {
            prop_assert_eq!(round_num(x.to_real()), y.to_real());
        }

        let out = calibrate_stream(&Adjuster::log(1.0).unwrap(), &stream).unwrap();
        let rows = calibrated_rows(&out);
        let text = csv_text(|b| write_calibrated(b, &rows).unwrap());
        let back: Vec<CalibratedRow> = read_calibrated(text.as_bytes()).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        prop_assert_eq!(csv_text(|b| write_calibrated(b, &back).unwrap()), text);
    }

    #[test]
    fn oracle_docs_round_trip(lo in 0.0f64..2.0, width in 0.0f64..1.0, n in 1u64..10_000, pass in any::<bool>()) {
        let doc = OracleDoc {
            family: "power".into(),
            n,
            m: 10_000 * n,
            expectation_lo: round_num(lo),
            expectation_hi: round_num(lo + width),
            target: 1.0,
            pass,
        };
        let line = to_json_line(&doc);
        prop_assert_eq!(parse_json::<OracleDoc>(&line).unwrap(), doc);
    }
}

#[test]
fn writers_are_deterministic() {
    let path = random_multiplicative(2.0, 500, 9);
    let a = Adjuster::log(0.5).unwrap();
    let run = || {
        let rows: Vec<AuditRow> =
            run_path(&AdjusterStrategy::new(&a), &path, 1.0).unwrap().iter().map(AuditRow::from).collect();
        csv_text(|b| write_audit(b, &rows).unwrap())
    };
    assert_eq!(run(), run());
    assert!(run().starts_with("t,price,running_max,position,capital,ala_floor,strong_floor\n0,2.0,2.0,"));
}

#[test]
fn malformed_inputs_are_parse_errors() {
    for text in ["", "t,price\n0,1.0\n2,3.0\n", "t,price\n0,abc\n", "t,cost\n0,1.0\n", "t,price\n0,-1.0\n"] {
        assert!(matches!(read_path(text.as_bytes()), Err(Error::Parse(_) | Error::Domain(_))), "{text:?}");
    }
    assert!(read_stream("t,capital\n0,2.0\n".as_bytes()).is_err());
    assert!(matches!(parse_adjuster("{\"family\":\"power\""), Err(Error::Parse(_))));
    assert!(matches!(parse_payoff(r#"{"payoff":"spread"}"#), Err(Error::Parse(_))));
}
