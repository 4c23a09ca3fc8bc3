//! Points of the unit tangent bundle of the Bolza surface: reduction into
//! the fundamental region, the quotient distance with its optimal group
//! element, and exact coset comparison.
//!
//!     cargo run --release --example quotient_distance

use horolab::fuchsian::{CosetVerdict, QuotientPoint};
use horolab::{FuchsianGroup, GroupElement, GroupMetric, MetricConfig};

fn main() -> horolab::Result<()> {
    let group = FuchsianGroup::preset_bolza();
    let metric = GroupMetric::new(MetricConfig::default())?;

    let x = GroupElement::rotation(0.4).mul(&GroupElement::a(1.1));
    let far = group.letters()[2].mul(&group.letters()[5]).mul(&x);
    let red = group.reduce(&far);
    println!("reduced by {} to {}", red.word, red.reduced);

    let y = far.mul(&GroupElement::b(0.2));
    let q = group.quotient_distance(&metric, &QuotientPoint::new(x), &QuotientPoint::new(y))?;
    println!(
        "d_X = {:.8} via {} ({} candidates within radius {:.2}); d_G of the lifts = {:.4}",
        q.value,
        q.gamma_word,
        q.candidates_evaluated,
        q.radius_used,
        metric.distance(&x, &y)?
    );

    for (name, h) in [("far", far), ("y", y)] {
        match group.same_coset(&x, &h) {
            CosetVerdict::Same { word, .. } => println!("{name} = {word} · x"),
            CosetVerdict::Different { residual_gap } => println!("{name} is off the coset of x (gap {residual_gap:.4})"),
            CosetVerdict::Exhausted { radius } => println!("{name}: undecided within radius {radius:.2}"),
        }
    }
    Ok(())
}
