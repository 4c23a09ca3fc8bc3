//! Separating, kinematic and two-condition campaigns for the stable
//! horocycle flow and its time changes, next to the geodesic flow, which
//! fails the separating test.
//!
//!     cargo run --release --example horocycle_campaigns

use std::sync::Arc;

use horolab::lab::*;
use horolab::{FlowKind, FuchsianGroup, GroupMetric, MetricConfig, TimeChange};

fn show(v: &TestVerdict) {
    println!("{:32} {:5} {:?}", v.test, v.outcome.to_string(), v.counts);
}

fn main() -> horolab::Result<()> {
    let group = Arc::new(FuchsianGroup::preset_bolza());
    let metric = GroupMetric::new(MetricConfig::default())?;
    let base = FlowKind::StableHorocycle;

    for direction in [Direction::Positive, Direction::Negative] {
        for flow in [base, FlowKind::Geodesic] {
            let o = SeparatingOptions {
                flow,
                direction,
                ..Default::default()
            };
            show(&separating_test(&group, &metric, &o)?);
        }
    }

    let changes = [
        TimeChange::identity(base),
        TimeChange::constant(base, 2.0)?,
        TimeChange::orbit_bump(base, group.clone(), 0.5)?.with_step(0.01),
    ];
    for tc in &changes {
        let rho = kinematic_rho(tc, 0.25, 32, 42)?;
        let v = kinematic_test_time_change(&group, &metric, tc, &KinematicOptions::default())?;
        print!("[{} rho {rho:.4}] ", tc.label);
        show(&v);
    }

    let v = kh_test_horocycle(&group, &metric, &KhOptions::default())?;
    show(&v);
    println!("largest |s(t) - t| on qualifying triples: {:.5}", v.params["max_reparam_deviation"]);
    Ok(())
}
