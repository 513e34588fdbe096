//! Parse Φ and a plane map, compose them, evaluate on the extended reals.

use eorlicz::classify::{ComposedPhi, PhiSpec, PlaneMap};
use eorlicz::expr::{Bindings, Expr};

fn main() {
    let phi = PhiSpec::parse("if(u > 1, t*ln(u), 0)").unwrap();
    let map = PlaneMap::parse("1", "exp(u^2)").unwrap();
    let c = ComposedPhi::new(phi, map);
    println!("{c}");
    println!("φE = {}", c.expr());
    for u in [0.0, 0.5, 1.0, 2.0] {
        println!("  φE(0, {u}) = {}", c.eval(0.0, u).unwrap());
    }

    // Infinities propagate; 0·∞ = 0, ∞ − ∞ is undefined.
    for text in ["0 * inf", "inf - inf", "1/0", "0^(-1)", "ln(0)"] {
        let v = Expr::parse(text).unwrap().eval(&Bindings::new()).unwrap();
        println!("  {text:>10} = {v}");
    }

    match Expr::parse("u + * 2") {
        Err(e) => println!("error: {e}"),
        Ok(_) => unreachable!(),
    }
}
