//! Classify φE = Φ∘E into the four E-classes and show why a class fails.

use eorlicz::classify::{classify, raw_classify, stratified_t_samples, ComposedPhi, EClass, ToleranceConfig};

fn main() {
    let tols = ToleranceConfig::default();
    let c = ComposedPhi::parse("t*u^2", "abs(t)", "u").unwrap();
    let ts = stratified_t_samples(-2.0, 2.0, tols.t_samples);

    let composed = classify(&c, &ts, &tols).unwrap();
    let raw = raw_classify(c.phi(), &ts, &tols).unwrap();
    println!("{c} on [-2, 2]");
    for class in EClass::ALL {
        println!("  {:<15} composed {:<5} raw {}", class.name(), composed.verdicts.get(class), raw.verdicts.get(class));
    }
    if let Some(f) = raw.failure(EClass::EN) {
        println!("raw Φ is not e_n: {} fails at t = {:.4}", f.axiom, f.t);
        if let Some(w) = &f.record.witness {
            println!("  witness u = {}, value {}", w.u(), w.value());
        }
    }

    // A finite threshold U_Φ and the left limit there.
    let c = ComposedPhi::parse("if(u < 1, -ln(u+abs(t)^(1/2)+1), inf)", "u^2", "u").unwrap();
    let r = classify(&c, &stratified_t_samples(0.0, 1.0, 5), &tols).unwrap();
    let p = &r.profiles[0];
    println!("{c}: U_Φ = {}, left limit {:?}", p.u_phi, p.left_limit_at_u);
    println!("  e_young {} e_orlicz {}", r.verdicts.e_young, r.verdicts.e_orlicz);
}
