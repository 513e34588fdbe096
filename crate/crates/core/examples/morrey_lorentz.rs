//! Morrey balls and Lorentz weights configured by hand.

use eorlicz::classify::ComposedPhi;
use eorlicz::expr::Expr;
use eorlicz::measure::{SampledFn, Space};
use eorlicz::norms::{compute_norm, LorentzWeight, MorreyConfig, NormKind, NormSpec, YoungComposition};

fn main() {
    let space = Space::interval(0.0, 1.0, 513).unwrap();
    let spike = SampledFn::from_fn(space.clone(), |t| (1.0 - 20.0 * (t - 0.3).abs()).max(0.0)).unwrap();
    let c = YoungComposition::trusted(ComposedPhi::parse("u^2", "t", "u").unwrap());

    for weight in ["1/r", "r^(-1/2)", "1"] {
        let mut spec = NormSpec::new(NormKind::Morrey);
        let mut cfg = MorreyConfig::default_for(&space);
        cfg.phi_weight = Expr::parse(weight).unwrap();
        spec.morrey = Some(cfg);
        let r = compute_norm(&spike, &c, &spec).unwrap();
        println!("morrey φ(r) = {weight:<9} {:.6}", r.value.to_f64());
        for w in &r.warnings {
            println!("  warning: {w}");
        }
    }

    for (omega, integrand) in [("1", LorentzWeight::Omega), ("s^(-1/2)", LorentzWeight::Omega), ("s^(-1/2)", LorentzWeight::CumulativeW)] {
        let mut spec = NormSpec::new(NormKind::Lorentz);
        spec.lorentz.omega = Expr::parse(omega).unwrap();
        spec.lorentz.integrand_weight = integrand;
        let r = compute_norm(&spike, &c, &spec).unwrap();
        println!("lorentz ω = {omega:<9} {integrand:?}: {:.6}", r.value.to_f64());
    }
}
