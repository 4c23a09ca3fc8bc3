//! The two constructions: stable horocycle orbits that stay close under a
//! linear reparametrization without being on one orbit, and geodesic orbits
//! that converge in forward time without being on one orbit.
//!
//!     cargo run --release --example counterexamples

use horolab::lab::{counterexample_geodesic_not_separating, counterexample_horocycle_not_bw, Direction};
use horolab::{FuchsianGroup, GroupMetric, MetricConfig};

fn main() -> horolab::Result<()> {
    let group = FuchsianGroup::preset_bolza();
    let metric = GroupMetric::new(MetricConfig::default())?;

    let a = counterexample_horocycle_not_bw(&group, &metric, 0.1)?;
    println!("horocycle: a = {:.8}, s(t) = t / a^2, d(K, e) = {:.6}", a.a, a.distance_k);
    println!("{:>12} {:>12} {:>12}", "t", "s(t)", "residual");
    for r in &a.residuals {
        println!("{:>12.3} {:>12.3} {:>12.2e}", r.t, r.s, r.formula_residual.max(r.product_residual));
    }
    println!("{}\n", a.argument);

    let b = counterexample_geodesic_not_separating(&group, &metric, 0.1, Direction::Positive, 8.0)?;
    println!("geodesic: y = x b({}), certified: {}", b.s, b.certified);
    println!("{:>6} {:>14} {:>14}", "t", "measured", "|s| e^-t");
    for r in &b.decay {
        println!("{:>6} {:>14.3e} {:>14.3e}", r.t, r.measured, r.bound);
    }
    println!("{}", b.argument);
    Ok(())
}
