//! The horocycle flows have no periodic orbit: a trace argument plus a
//! sampled check that no point returns close to itself.
//!
//!     cargo run --release --example no_periodic_orbits

use horolab::flows::{periodic_certificate, periodic_empirical};
use horolab::{FlowKind, FuchsianGroup, GroupMetric, MetricConfig};

fn main() -> horolab::Result<()> {
    let group = FuchsianGroup::preset_bolza();
    let metric = GroupMetric::new(MetricConfig::default())?;
    let periods: Vec<f64> = (1..=20).map(f64::from).collect();
    for kind in [FlowKind::StableHorocycle, FlowKind::UnstableHorocycle] {
        let cert = periodic_certificate(&group, kind, 1)?;
        println!("{kind}: {} (holds: {})", cert.argument, cert.holds());
        let emp = periodic_empirical(&group, &metric, kind, 100, &periods, 0.01, 1)?;
        println!(
            "  {} returns checked, {} within {}, smallest lower bound {:.4}",
            emp.samples, emp.violations, emp.threshold, emp.min_lower_bound
        );
    }
    Ok(())
}
