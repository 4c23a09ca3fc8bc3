//! Reparametrized closeness for the geodesic flow: pairs on a common orbit
//! are recovered with their shift, other pairs leave the tube.
//!
//!     cargo run --release --example bw_campaign -- verdict.json

use horolab::lab::{bw_test_geodesic, BwOptions};
use horolab::{FuchsianGroup, GroupMetric, MetricConfig};

fn main() -> horolab::Result<()> {
    let group = FuchsianGroup::preset_bolza();
    let metric = GroupMetric::new(MetricConfig::default())?;
    let v = bw_test_geodesic(
        &group,
        &metric,
        &BwOptions {
            seed: 7,
            ..Default::default()
        },
    )?;
    println!("{}: {}", v.test, v.outcome);
    println!("params {:?}", v.params);
    println!("counts {:?}", v.counts);
    for w in v.witnesses.iter().take(3) {
        println!("  {} {:?}", w.label, w.values);
    }
    if let Some(path) = std::env::args().nth(1) {
        v.write_to(std::fs::File::create(&path)?)?;
        println!("verdict -> {path}");
    }
    std::process::exit(v.outcome.exit_code())
}
