mod common;

use common::{measure_strategy, rel_close};
use lookback_core::adjuster::validate::{validate_ala, validate_spine};
use lookback_core::adjuster::{
    ala_to_asla, ala_to_spine, asla_to_measure, concave_increasing_envelope, measure_to_ala, measure_to_asla,
    measure_to_spine, sla_integral, spine_to_ala, spine_to_asla, spine_to_measure, Adjuster, MeasureView,
};
use lookback_core::{Adjuster32, Measure64};
use proptest::prelude::*;

fn families() -> Vec<Adjuster<f64>> {
    vec![
        Adjuster::power(0.1).unwrap(),
        Adjuster::power(0.5).unwrap(),
        Adjuster::power(0.9).unwrap(),
        Adjuster::log(0.5).unwrap(),
        Adjuster::log(1.0).unwrap(),
        Adjuster::threshold(3.0).unwrap(),
        Adjuster::Discrete(Measure64::from_pairs(&[(1.0, 0.2), (2.0, 0.3), (7.5, 0.5)], 0.0).unwrap()),
    ]
}

fn same_measure(a: &Measure64, b: &Measure64) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.atoms().len(), b.atoms().len());
    for (x, y) in a.atoms().iter().zip(b.atoms()) {
        prop_assert!((x.location - y.location).abs() <= 1e-12 * x.location, "{:?} vs {:?}", x, y);
        prop_assert!((x.mass - y.mass).abs() <= 1e-12, "{:?} vs {:?}", x, y);
    }
    prop_assert!((a.mass_infinity() - b.mass_infinity()).abs() <= 1e-12);
    Ok(())
}

fn sample_points(p: &Measure64) -> Vec<f64> {
    let mut xs = vec![1.0, 1.5, 1e6];
    for a in p.atoms() {
        xs.extend([a.location, a.location * 1.0001, a.location * 0.9999]);
    }
    xs.retain(|&x| x >= 1.0);
    xs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn measure_spine_measure(p in measure_strategy(64)) {
        match spine_to_measure(&measure_to_spine(&p)).unwrap() {
            MeasureView::Discrete(q) => same_measure(&p, &q)?,
            MeasureView::Tail(_) => prop_assert!(false, "piecewise spine came back continuous"),
        }
    }

    #[test]
    fn measure_asla_measure(p in measure_strategy(64)) {
        same_measure(&p, &asla_to_measure(&measure_to_asla(&p)).unwrap())?;
    }

    #[test]
    fn spine_ala_spine(p in measure_strategy(64)) {
        let s = measure_to_spine(&p);
        let back = ala_to_spine(&spine_to_ala(&s));
        for x in sample_points(&p) {
            prop_assert_eq!(s.value(x), back.value(x));
            prop_assert_eq!(s.right_slope(x), back.right_slope(x));
        }
    }

    #[test]
    fn commuting_square(p in measure_strategy(32)) {
        let direct = measure_to_ala(&p);
        let via = spine_to_ala(&measure_to_spine(&p));
        for xs in sample_points(&p) {
            for x in [0.0, 0.5 * xs, xs] {
                let (a, b) = (direct.value(xs, x), via.value(xs, x));
                prop_assert!(rel_close(a, b, 1e-12), "({xs}, {x}): {a} vs {b}");
            }
        }
        let f = measure_to_asla(&p);
        let g = ala_to_asla(&direct).unwrap();
        for y in sample_points(&p) {
            // step functions may differ only at their jumps
            if p.atoms().iter().any(|a| a.location == y) { continue; }
            prop_assert!(rel_close(f.eval(y), g.eval(y), 1e-12), "{y}: {} vs {}", f.eval(y), g.eval(y));
        }
    }

    #[test]
    fn slope_is_tail(p in measure_strategy(64)) {
        let s = measure_to_spine(&p);
        for x in sample_points(&p) {
            prop_assert_eq!(s.right_slope(x), p.tail(x));
        }
    }

    #[test]
    fn legendre_relation(p in measure_strategy(64)) {
        let s = measure_to_spine(&p);
        let f = spine_to_asla(&s).unwrap();
        for x in sample_points(&p) {
            let want = s.value(x) - s.right_slope(x) * x;
            // the subtraction loses digits in proportion to S(x)
            let tol = 1e-12 * s.value(x).max(1.0);
            prop_assert!((f.eval(x) - want).abs() <= tol, "{x}: {} vs {want}", f.eval(x));
            prop_assert!(rel_close(f.eval(x), p.asla_value(x), 1e-12), "{x}: {} vs {}", f.eval(x), p.asla_value(x));
        }
    }

    #[test]
    fn sla_identity_for_measures(p in measure_strategy(64)) {
        let f = measure_to_asla(&p);
        prop_assert!((sla_integral(&f) - (1.0 - p.mass_infinity())).abs() < 1e-12);
    }

    #[test]
    fn discrete_ratios_vanish(p in measure_strategy(16)) {
        prop_assume!(p.mass_infinity() == 0.0);
        let f = measure_to_asla(&p);
        // a large atom can make F(y)/y rise, so monotonicity is only checked past the last atom
        let last = p.atoms().last().unwrap().location;
        let r: Vec<f64> = (2..=8).map(|k| 10f64.powi(k)).filter(|&y| y >= last).map(|y| f.eval(y) / y).collect();
        for w in r.windows(2) { prop_assert!(w[1] < w[0]); }
        prop_assert!(f.eval(1e8) / 1e8 <= last / 1e8 * (1.0 + 1e-12));
    }

    #[test]
    fn incomparable(p in measure_strategy(16), q in measure_strategy(16)) {
        prop_assume!(p != q);
        let (a, b) = (measure_to_ala(&p), measure_to_ala(&q));
        let mut pts = sample_points(&p);
        pts.extend(sample_points(&q));
        let (mut above, mut below) = (false, false);
        for &xs in &pts {
            for x in [0.0, xs] {
                let d = a.value(xs, x) - b.value(xs, x);
                above |= d > 0.0;
                below |= d < 0.0;
            }
        }
        prop_assert!(above && below);
    }

    #[test]
    fn envelope_is_minimal(ys in prop::collection::vec(0.0..10.0f64, 3..40)) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| 1.0 + i as f64 * 0.5).collect();
        let env = concave_increasing_envelope(&xs, &ys).unwrap();
        let h: Vec<f64> = xs.iter().map(|&x| env.function.eval(x)).collect();
        let again = concave_increasing_envelope(&xs, &h).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            prop_assert!(h[i] >= ys[i] - 1e-12);
            prop_assert!((again.function.eval(x) - h[i]).abs() <= 1e-12);
        }
        // lowering any knot breaks domination, concavity or monotonicity
        for i in 0..xs.len() {
            let mut low = h.clone();
            low[i] -= 1e-6;
            let dominated = low.iter().zip(&ys).all(|(l, y)| *l >= *y - 1e-12);
            let concave = (1..xs.len() - 1).all(|j| {
                let left = (low[j] - low[j - 1]) / (xs[j] - xs[j - 1]);
                let right = (low[j + 1] - low[j]) / (xs[j + 1] - xs[j]);
                right <= left + 1e-12
            });
            let monotone = low.windows(2).all(|w| w[1] >= w[0] - 1e-12);
            prop_assert!(!(dominated && concave && monotone), "knot {i} could be lowered");
        }
    }
}

#[test]
fn families_are_normalized() {
    for a in families() {
        let f = a.asla();
        assert!((sla_integral(&f) - 1.0).abs() < 1e-8, "{a:?}");
        assert!(validate_spine(&a.spine()).is_valid(), "{a:?}");
        assert!(validate_ala(&a.ala()).is_valid(), "{a:?}");
    }
}

#[test]
fn family_ratios_vanish() {
    for a in families() {
        let f = a.asla();
        let r: Vec<f64> = (2..=8).map(|k| f.eval(10f64.powi(k)) / 10f64.powi(k)).collect();
        assert!(r.windows(2).all(|w| w[1] <= w[0]), "{a:?}: {r:?}");
        assert!(r[6] < r[0] || r[0] == 0.0);
    }
}

#[test]
fn family_legendre_and_tail() {
    for a in families() {
        let s = a.spine();
        let f = a.asla();
        for k in 0..=48 {
            let x = 10f64.powf(k as f64 / 8.0);
            assert!(rel_close(f.eval(x), s.value(x) - s.right_slope(x) * x, 1e-12), "{a:?} at {x}");
            assert!(rel_close(s.right_slope(x), a.tail(x), 1e-12), "{a:?} at {x}");
        }
    }
}

#[test]
fn single_precision_agrees() {
    let a32 = Adjuster32::power(0.5).unwrap();
    let a64 = Adjuster::power(0.5).unwrap();
    for x in [1.0f32, 2.0, 4.0, 100.0] {
        let (s32, s64) = (a32.spine().value(x), a64.spine().value(x as f64));
        assert!((s32 as f64 - s64).abs() < 1e-5 * s64);
        assert!((a32.tail(x) as f64 - a64.tail(x as f64)).abs() < 1e-6);
    }
}

#[test]
fn quantile_measures_keep_atom_at_one() {
    let m: Measure64 = asla_to_measure(&Adjuster::power(0.25).unwrap().asla()).unwrap();
    assert_eq!(m.atoms()[0].location, 1.0);
    assert!((m.atoms()[0].mass - 0.25).abs() < 1e-15);
    assert_eq!(m.mass_infinity(), 0.0);
    assert!((m.total_mass() - 1.0).abs() < 1e-12);
}
