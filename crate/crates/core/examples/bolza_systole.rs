//! The Bolza surface group: generators, word balls, the trace gap and the
//! injectivity radius, and the plain-text ball cache.
//!
//!     cargo run --release --example bolza_systole

use horolab::FuchsianGroup;

fn main() -> horolab::Result<()> {
    let group = FuchsianGroup::preset_bolza();
    print!("{}", group.to_text());

    for r in [2.0, 4.0, 6.0, 8.0] {
        println!("ball of hyperbolic radius {r}: {} elements", group.enumerate_ball(r)?.len());
    }

    let s = group.systole()?;
    println!("\nminimal trace {:.12} at {}", s.min_trace, s.witness_word);
    println!("trace gap       {:.12} (2 sqrt 2 = {:.12})", s.trace_gap, 2.0 * 2f64.sqrt());
    println!("injectivity     {:.12}", s.injectivity_radius);
    println!("certified over {} elements within radius {:.3}", s.ball_size, s.certification_radius);

    let text = group.ball(4.0)?.to_text(group.name());
    let fresh = FuchsianGroup::preset_bolza();
    fresh.load_ball(&text)?;
    println!("\nreloaded cached ball: {} elements", fresh.enumerate_ball(4.0)?.len());
    Ok(())
}
