//! Properties of the Bolza group, its balls and the quotient distance.

use std::f64::consts::PI;
use std::sync::OnceLock;

use horolab::fuchsian::QuotientPoint;
use horolab::{FuchsianGroup, GroupElement, GroupMetric, MetricConfig};
use proptest::prelude::*;

fn setup() -> &'static (FuchsianGroup, GroupMetric) {
    static S: OnceLock<(FuchsianGroup, GroupMetric)> = OnceLock::new();
    S.get_or_init(|| {
        (
            FuchsianGroup::preset_bolza(),
            GroupMetric::new(MetricConfig::default()).unwrap(),
        )
    })
}

fn element(radius: f64) -> impl Strategy<Value = GroupElement> {
    (0.0..radius, 0.0..PI, 0.0..PI).prop_map(|(t, a, b)| {
        GroupElement::rotation(a)
            .mul(&GroupElement::a(t))
            .mul(&GroupElement::rotation(b))
    })
}

#[test]
fn ball_is_closed_under_inverse_and_duplicate_free() {
    let (group, _) = setup();
    let ball = group.enumerate_ball_words(7.0).unwrap();
    for (i, e) in ball.iter().enumerate() {
        let inv = e.element.inverse();
        assert!(ball.iter().any(|f| f.element.approx_eq(&inv, 1e-8)), "{}", e.word);
        assert!(
            ball[i + 1..].iter().all(|f| !f.element.approx_eq(&e.element, 1e-8)),
            "duplicate {}",
            e.word
        );
    }
}

#[test]
fn ball_order_is_deterministic() {
    let a = FuchsianGroup::preset_bolza().enumerate_ball_words(6.0).unwrap();
    let b = FuchsianGroup::preset_bolza().enumerate_ball_words(6.0).unwrap();
    assert_eq!(a, b);
    let mut prev = 0.0;
    for e in &a {
        assert!(e.displacement >= prev);
        prev = e.displacement;
    }
    assert!(a.len() < FuchsianGroup::preset_bolza().enumerate_ball(8.0).unwrap().len());
}

#[test]
fn no_small_traces_in_the_ball() {
    let (group, _) = setup();
    let eps_star = group.trace_gap().unwrap();
    let ball = group.enumerate_ball(8.0).unwrap();
    assert_eq!(ball[0], GroupElement::IDENTITY);
    for g in &ball[1..] {
        assert!(g.trace() >= 2.0 + eps_star - 1e-9, "{g}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn quotient_distance_is_a_pseudometric(x in element(2.0), y in element(2.0), z in element(2.0)) {
        let (group, metric) = setup();
        let q = |a: &GroupElement, b: &GroupElement| {
            group.quotient_distance(metric, &QuotientPoint::new(*a), &QuotientPoint::new(*b)).unwrap().value
        };
        let (xy, yx, yz, xz) = (q(&x, &y), q(&y, &x), q(&y, &z), q(&x, &z));
        prop_assert!((xy - yx).abs() < 1e-5);
        prop_assert!(xz <= xy + yz + 1e-5);
        prop_assert!(xy <= metric.distance(&x, &y).unwrap() + 1e-12);
    }

    #[test]
    fn zero_exactly_on_common_cosets(x in element(2.0), k in 0usize..8, t in 0.05..0.5f64) {
        let (group, metric) = setup();
        let gamma = group.letters()[k];
        let same = gamma.mul(&x);
        let q = group.quotient_distance(metric, &QuotientPoint::new(x), &QuotientPoint::new(same)).unwrap();
        prop_assert!(q.value < 1e-9);
        prop_assert!(group.same_coset(&x, &same).is_same());
        let off = x.mul(&GroupElement::b(t));
        let q = group.quotient_distance(metric, &QuotientPoint::new(x), &QuotientPoint::new(off)).unwrap();
        prop_assert!(q.value > 1e-3);
        prop_assert!(!group.same_coset(&x, &off).is_same());
    }
}
