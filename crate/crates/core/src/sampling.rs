//! Seeded random elements used by calibration, testers and property checks.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sl2::GroupElement;

/// Deterministic generator for a seed and a stream label.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// `R(θ₁)·a(t)·R(θ₂)` with `t` uniform in `[0, radius]`: base point within
/// hyperbolic distance `radius` of `i`, uniformly random fiber angle.
pub fn random_element<R: Rng>(rng: &mut R, radius: f64) -> GroupElement {
    let t = rng.gen_range(0.0..=radius);
    let th1 = rng.gen_range(0.0..std::f64::consts::PI);
    let th2 = rng.gen_range(0.0..std::f64::consts::PI);
    GroupElement::rotation(th1)
        .mul(&GroupElement::a(t))
        .mul(&GroupElement::rotation(th2))
}

/// Log-uniform sample in `[lo, hi]`.
pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}
