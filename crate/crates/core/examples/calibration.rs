//! Sampled tables converting between the distance to the identity and the
//! entrywise Frobenius gap, and the tube radius they give for a target ε.
//!
//!     cargo run --release --example calibration

use horolab::lab::bw_delta_for_epsilon;
use horolab::{FuchsianGroup, GroupMetric, MetricConfig};

fn main() -> horolab::Result<()> {
    let metric = GroupMetric::new(MetricConfig::default())?;
    let group = FuchsianGroup::preset_bolza();
    println!("{:>8} {:>14} {:>14}", "x", "gap->dist", "dist->gap");
    for x in [0.01, 0.05, 0.125, 0.25, 0.5] {
        println!(
            "{x:>8} {:>14.6} {:>14.6}",
            metric.calibrate_gap_to_distance(x)?,
            metric.calibrate_distance_to_gap(x)?
        );
    }
    for eps in [0.25, 0.5, 1.0] {
        let d = bw_delta_for_epsilon(&group, &metric, eps)?;
        println!("eps {eps}: delta {:.6} (eps0 {:.4}, cap {:.4})", d.delta, d.eps0, d.cap);
    }
    let table = metric.distance_to_gap_table();
    println!("\ndistance_to_gap table has {} knots, seed {}", table.entries.len(), table.seed);
    Ok(())
}
