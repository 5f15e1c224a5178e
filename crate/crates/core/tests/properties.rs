mod common;

use bhbound::bounds::{crossover, printed_tables, BoundClaim, Coefficient, Relation};
use bhbound::forms::{
    bh_ratio, random_form, sup_norm_complex_ascent, verify_batch, AscentOptions, BatchBound,
    OracleOptions,
};
use bhbound::precision::{
    compare_strict, d_constant, sqrt2, sqrt_e, CertifiedInterval, Comparison, Decimal, FieldTag,
};
use bhbound::sequences::{
    block_of, closed_form_m, m_sequence, BaseConstants, SequenceEvaluator, SequenceSpec,
};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const P: u32 = 128;

fn field() -> impl Strategy<Value = FieldTag> {
    prop_oneof![Just(FieldTag::Real), Just(FieldTag::Complex)]
}

fn interval(seed: u64, prec: u32) -> Option<CertifiedInterval> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    common::eval(&common::random_expr(&mut rng, 4), prec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coarse_enclosures_contain_fine_ones(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = common::random_expr(&mut rng, 5);
        if let (Some(lo), Some(hi)) = (common::eval(&e, 48), common::eval(&e, 320)) {
            prop_assert!(lo.overlaps(&hi), "{e:?}");
            prop_assert!(lo.contains(&hi.midpoint()), "{e:?}");
        }
    }

    #[test]
    fn doubling_precision_does_not_widen(seed in any::<u64>()) {
        if let (Some(a), Some(b)) = (interval(seed, 64), interval(seed, 128)) {
            prop_assert!(b.width() <= a.width(), "{a:?} then {b:?}");
        }
    }

    #[test]
    fn strict_comparison_is_antisymmetric_and_stable(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (Some(a), Some(b)) = (interval(s1, 64), interval(s2, 64)) else { return Ok(()) };
        let ab = compare_strict(&a, &b);
        let ba = compare_strict(&b, &a);
        let flipped = match ab {
            Comparison::CertifiedLess => Comparison::CertifiedGreater,
            Comparison::CertifiedGreater => Comparison::CertifiedLess,
            Comparison::Inconclusive => Comparison::Inconclusive,
        };
        prop_assert_eq!(ba, flipped);
        let (Some(a2), Some(b2)) = (interval(s1, 256), interval(s2, 256)) else { return Ok(()) };
        let fine = compare_strict(&a2, &b2);
        if ab != Comparison::Inconclusive {
            prop_assert_eq!(fine, ab);
        }
    }

    #[test]
    fn doubling_factors_differ_by_root_e(prec in 32u32..=512) {
        let dr = d_constant(FieldTag::Real, prec).unwrap();
        let dc = d_constant(FieldTag::Complex, prec).unwrap();
        let ratio = dr.mul(&sqrt2(prec)).div(&dc).unwrap();
        prop_assert!(ratio.overlaps(&sqrt_e(prec)));
    }

    #[test]
    fn m_recursion_matches_closed_form(n in 1u64..=4096, f in field()) {
        let r = m_sequence(n, f, P).unwrap();
        let c = closed_form_m(n, f, P).unwrap();
        prop_assert!(r.overlaps(&c), "n = {n}");
    }

    #[test]
    fn m_is_constant_on_blocks_and_scales_by_d(k in 2u32..=40, f in field(), frac in 0.0f64..1.0) {
        let b = block_of(1u64 << k).unwrap();
        let span = b.last() - b.first();
        let n = b.first() + (frac * span as f64) as u64;
        let m = m_sequence(n, f, P).unwrap();
        prop_assert_eq!(&m, &m_sequence(b.first(), f, P).unwrap());
        prop_assert_eq!(&m, &m_sequence(b.last(), f, P).unwrap());
        let prev = m_sequence(1u64 << (k - 1), f, P).unwrap();
        prop_assert!(m.div(&prev).unwrap().overlaps(&d_constant(f, P).unwrap()));
    }

    #[test]
    fn j_memo_is_order_independent(seed in any::<u64>(), k0 in 1u32..=4) {
        let base = BaseConstants::constant(FieldTag::Real, k0, "1.3".parse().unwrap(), "").unwrap();
        let spec = SequenceSpec::j(base);
        let mut order: Vec<u64> = (1..=300).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let shuffled = SequenceEvaluator::new();
        for &n in &order {
            shuffled.j_sequence(n, &spec, P).unwrap();
        }
        let fresh = SequenceEvaluator::new();
        for n in (1..=300).rev() {
            prop_assert_eq!(shuffled.j_sequence(n, &spec, P).unwrap(), fresh.j_sequence(n, &spec, P).unwrap());
        }
    }

    #[test]
    fn crossover_ignores_common_scaling(
        pa in 50i64..400, pb in 50i64..400, s in 2i64..50,
        ea in 20i64..90, eb in 20i64..90,
    ) {
        let claim = |p: i64, e: i64| {
            BoundClaim::new(
                FieldTag::Real,
                Coefficient::Decimal(Decimal::new(BigInt::from(p), 2)),
                Decimal::new(BigInt::from(e), 2),
                1,
                Relation::Lt,
                "",
            )
            .unwrap()
        };
        let plain = crossover(&claim(pa, ea), &claim(pb, eb), P).unwrap();
        let scaled = crossover(&claim(pa * s, ea), &claim(pb * s, eb), P).unwrap();
        prop_assert_eq!(plain, scaled);
    }

    #[test]
    fn ratio_is_homogeneous_and_symmetric(seed in any::<u64>(), t in 0.01f64..100.0) {
        let f = random_form(3, 2, FieldTag::Real, seed).unwrap();
        let r = bh_ratio(&f).unwrap().ratio;
        prop_assert!((bh_ratio(&f.scaled(t)).unwrap().ratio - r).abs() <= 1e-12 * r);
        let p = bh_ratio(&f.permute_slots(&[2, 0, 1]).unwrap()).unwrap().ratio;
        prop_assert!((p - r).abs() <= 1e-12 * r);
    }

    #[test]
    fn ascent_never_decreases(seed in any::<u64>()) {
        let f = random_form(2, 3, FieldTag::Complex, seed).unwrap();
        let opts = AscentOptions { restarts: 4, seed, ..Default::default() };
        let r = sup_norm_complex_ascent(&f, &opts).unwrap();
        for t in &r.traces {
            for w in t.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-12 * w[0], "{t:?}");
            }
        }
    }

    #[test]
    fn batches_are_reproducible(seed in any::<u64>()) {
        let bound = BatchBound { value: 10.0, label: "loose".into() };
        let opts = OracleOptions::default();
        let a = verify_batch(2, 2, FieldTag::Real, 8, seed, &bound, &opts).unwrap();
        let b = verify_batch(2, 2, FieldTag::Real, 8, seed, &bound, &opts).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn complex_table_gains_shrink_per_level() {
    let mut rows: Vec<(u32, f64)> = printed_tables()
        .into_iter()
        .filter(|r| r.field() == FieldTag::Complex)
        .map(|r| (r.k0, r.printed().to_string().parse().unwrap()))
        .collect();
    rows.sort_by_key(|r| r.0);
    let gains: Vec<f64> = rows
        .windows(2)
        .map(|w| (w[0].1 - w[1].1) / f64::from(w[1].0 - w[0].0))
        .collect();
    assert!(gains.iter().all(|&g| g > 0.0), "{rows:?}");
    for g in gains.windows(2) {
        assert!(g[1] < g[0], "{gains:?}");
    }
}
