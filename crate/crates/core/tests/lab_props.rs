//! Cross-checks between the campaign verdicts and independent code paths.

use std::sync::OnceLock;

use horolab::lab::*;
use horolab::{FlowKind, FuchsianGroup, GroupElement, GroupMetric, MetricConfig};
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

fn element(e: [f64; 4]) -> GroupElement {
    GroupElement::from_matrix(horolab::Matrix2::from_array(e))
}

#[test]
fn recovered_pairs_are_confirmed_by_coset_reduction() {
    let (group, metric) = setup();
    let bw = bw_test_geodesic(
        group,
        metric,
        &BwOptions {
            pairs: 10,
            reparams: 4,
            seed: 3,
            examples: usize::MAX,
            ..Default::default()
        },
    )
    .unwrap();
    let sep = separating_test(
        group,
        metric,
        &SeparatingOptions {
            pairs: 10,
            seed: 3,
            examples: usize::MAX,
            ..Default::default()
        },
    )
    .unwrap();
    let mut checked = 0;
    for (v, kind, key) in [(&bw, FlowKind::Geodesic, "tau_recovered"), (&sep, FlowKind::StableHorocycle, "shift_recovered")] {
        assert_eq!(v.outcome, Outcome::Pass, "{}", v.test);
        for w in v.witnesses.iter().filter(|w| w.outcome == Outcome::Pass) {
            if let Some(&shift) = w.values.get(key) {
                let moved = element(w.x).mul(&kind.element(shift));
                assert!(group.same_coset(&moved, &element(w.y)).is_same(), "{}", w.label);
                checked += 1;
            }
        }
    }
    assert!(checked > 20, "{checked}");
}

#[test]
fn geodesic_and_horocycle_verdicts_are_asymmetric() {
    let (group, metric) = setup();
    let bw = bw_test_geodesic(
        group,
        metric,
        &BwOptions {
            pairs: 10,
            reparams: 4,
            ..Default::default()
        },
    )
    .unwrap();
    let geo_sep = separating_test(
        group,
        metric,
        &SeparatingOptions {
            flow: FlowKind::Geodesic,
            pairs: 20,
            ..Default::default()
        },
    )
    .unwrap();
    let horo_sep = separating_test(
        group,
        metric,
        &SeparatingOptions {
            pairs: 10,
            ..Default::default()
        },
    )
    .unwrap();
    let horo_bw = counterexample_horocycle_not_bw(group, metric, 0.1).unwrap();
    assert_eq!(bw.outcome, Outcome::Pass);
    assert_eq!(geo_sep.outcome, Outcome::Fail);
    assert!(geo_sep.counts.get("separation-failure").copied().unwrap_or(0) > 0);
    assert_eq!(horo_sep.outcome, Outcome::Pass);
    assert!(horo_bw.holds);
}

#[test]
fn decay_curve_is_nonincreasing() {
    let (group, metric) = setup();
    for d in [Direction::Positive, Direction::Negative] {
        let c = counterexample_geodesic_not_separating(group, metric, 0.1, d, 8.0).unwrap();
        assert!(c.nonincreasing && c.certified);
        for pair in c.decay.windows(2) {
            assert!(pair[1].measured <= pair[0].measured + 1e-9);
        }
    }
}

proptest! {
    #[test]
    fn horocycle_steps_are_parabolic(t in -1e3..1e3f64) {
        prop_assert_eq!(FlowKind::StableHorocycle.element(t).trace(), 2.0);
        prop_assert_eq!(FlowKind::UnstableHorocycle.element(t).trace(), 2.0);
    }

    #[test]
    fn reparametrizations_are_monotone(seed in 0u64..200, t in -20.0..20.0f64, h in 0.01..3.0f64) {
        let mut rng = horolab::sampling::rng(seed, 1);
        let r = Reparametrization::random(&mut rng, 20.0, 2.5);
        prop_assert!(r.eval(t + h) > r.eval(t));
        prop_assert_eq!(r.eval(0.0), 0.0);
    }
}
