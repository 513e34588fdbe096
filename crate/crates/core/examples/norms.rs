//! All five norm families for one function and one E-Young composition.

use eorlicz::classify::{stratified_t_samples, ComposedPhi, ToleranceConfig};
use eorlicz::measure::{SampledFn, Space};
use eorlicz::norms::{compute_norm, NormKind, NormSpec, YoungComposition};

fn main() {
    let space = Space::interval(0.0, 1.0, 257).unwrap();
    let f = SampledFn::from_fn(space, |t| 1.0 + t).unwrap();
    let phi = ComposedPhi::parse("exp(t+u)-1", "u", "u").unwrap();
    let c = YoungComposition::checked(phi, &stratified_t_samples(0.0, 1.0, 33), &ToleranceConfig::default()).unwrap();

    for kind in NormKind::ALL {
        let strong = compute_norm(&f, &c, &NormSpec::new(kind)).unwrap();
        let weak = compute_norm(&f, &c, &NormSpec::new(kind).weak(true)).unwrap();
        println!(
            "{:<10} {:.9}  weak {:.9}  ({} evaluations)",
            kind.name(),
            strong.value.to_f64(),
            weak.value.to_f64(),
            strong.predicate_evals
        );
    }

    // f ≡ 1 with φE = e^{2u} − 1 solves e^{2/λ} = 2.
    let one = SampledFn::from_fn(Space::interval(0.0, 1.0, 257).unwrap(), |_| 1.0).unwrap();
    let r = compute_norm(&one, &c, &NormSpec::new(NormKind::Luxemburg)).unwrap();
    println!("‖1‖ = {:.9}, 2/ln 2 = {:.9}", r.value.to_f64(), 2.0 / 2f64.ln());
}
