//! The left-invariant distance on PSL(2,R) computed by geodesic shooting,
//! compared with the closed form along the diagonal subgroup and with the
//! piecewise path bound.
//!
//!     cargo run --release --example metric_distance

use horolab::{GroupElement, GroupMetric, MetricConfig};

fn main() -> horolab::Result<()> {
    let metric = GroupMetric::new(MetricConfig::default())?;
    println!("{:>6} {:>12} {:>12} {:>12}", "t", "d(a_t,e)", "|t|/sqrt2", "d(b_t,e)");
    for t in [0.1, 0.5, 1.0, 2.0, 3.0] {
        let da = metric.distance(&GroupElement::a(t), &GroupElement::IDENTITY)?;
        let db = metric.distance(&GroupElement::b(t), &GroupElement::IDENTITY)?;
        println!("{t:>6} {da:>12.8} {:>12.8} {db:>12.8}", t / 2f64.sqrt());
    }

    let g = GroupElement::rotation(0.7).mul(&GroupElement::a(1.2)).mul(&GroupElement::b(0.4));
    let report = metric.dist_to_identity(&g)?;
    println!(
        "\nd(g, e) = {:.8} after {} start(s), endpoint mismatch {:.1e}, path bound {:.8}",
        report.value,
        report.starts_tried,
        report.mismatch,
        metric.path_energy_upper_bound(&g, 8)
    );

    let k = GroupElement::rotation(1.1).mul(&GroupElement::a(-0.8));
    println!(
        "left invariance: d(g, e) = {:.10}, d(kg, k) = {:.10}",
        report.value,
        metric.distance(&k, &k.mul(&g))?
    );
    Ok(())
}
