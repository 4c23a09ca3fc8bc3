//! One-parameter subgroups, trace classification and the closed-form
//! conjugations used by the orbit recovery.
//!
//!     cargo run --example group_elements

use horolab::sl2::{conj_by_geodesic, conj_by_horocycle};
use horolab::{GroupElement, Tolerances};

fn main() -> horolab::Result<()> {
    let tol = Tolerances::default();
    let a = GroupElement::a(1.0);
    let b = GroupElement::b(0.5);
    let c = GroupElement::c(-0.5);
    for (name, g) in [("a(1)", a), ("b(0.5)", b), ("c(-0.5)", c), ("R(0.3)", GroupElement::rotation(0.3))] {
        println!("{name:8} {g}  trace {:.6}  {:?}", g.trace(), g.classify(tol.classify));
    }

    // −g and g are the same point of PSL(2,R)
    let neg = GroupElement::new(-2.0, 0.0, 0.0, -0.5, &tol)?;
    println!("canonical form of -diag(2, 1/2): {neg}");

    // A_{-t} B_s A_t = B_{s e^{-t}}: the geodesic flow shrinks stable offsets
    let (t, s) = (2.0, 0.3);
    let lhs = GroupElement::a(-t).mul(&GroupElement::b(s)).mul(&GroupElement::a(t));
    println!("A(-2) B(0.3) A(2) = {lhs}  vs  B({:.6})", s * (-t as f64).exp());

    let k = *GroupElement::rotation(0.2).mul(&GroupElement::a(0.4)).rep();
    let literal = GroupElement::a(-1.0).rep().mul(&k).mul(GroupElement::a(0.5).rep());
    println!(
        "conj_by_geodesic deviation {:.1e}, conj_by_horocycle deviation {:.1e}",
        conj_by_geodesic(&k, 1.0, 0.5).max_abs_diff(&literal),
        conj_by_horocycle(&k, 0.5, 1.0)
            .max_abs_diff(&GroupElement::b(-1.0).rep().mul(&k).mul(GroupElement::b(0.5).rep()))
    );

    match GroupElement::new(1.0, 2.0, 3.0, 4.0, &tol) {
        Err(e) => println!("rejected: {e}"),
        Ok(g) => println!("unexpectedly accepted {g}"),
    }
    Ok(())
}
