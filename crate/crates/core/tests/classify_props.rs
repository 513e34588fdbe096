use eorlicz::classify::{
    classify, raw_classify, stratified_t_samples, ComposedPhi, EClass, PhiSpec, PlaneMap, ToleranceConfig,
};
use eorlicz::expr::Expr;
use eorlicz::verify::{gen_any, gen_in_class, suite_t_samples, suite_tolerances, GEN_OMEGA};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdicts_always_respect_the_chain(seed in any::<u64>()) {
        let c = gen_any(seed).composed();
        if let Ok(r) = classify(&c, &suite_t_samples(GEN_OMEGA), &suite_tolerances()) {
            prop_assert!(r.chain_consistent, "{c}: {:?}", r.verdicts);
        }
    }

    #[test]
    fn positive_scaling_keeps_every_verdict(seed in any::<u64>(), c in 0.05f64..20.0, class_ix in 0usize..4) {
        let tols = suite_tolerances();
        let ts = suite_t_samples(GEN_OMEGA);
        let pair = gen_in_class(EClass::ALL[class_ix], seed, &tols).unwrap();
        let base = classify(&pair.composed(), &ts, &tols).unwrap();
        let scaled = ComposedPhi::new(PhiSpec::new(Expr::constant(c) * pair.phi.body.clone()), pair.map.clone());
        let r = classify(&scaled, &ts, &tols).unwrap();
        prop_assert_eq!(r.verdicts, base.verdicts, "{} scaled by {}", pair.composed(), c);
    }

    #[test]
    fn generated_members_belong_to_their_class(seed in any::<u64>(), class_ix in 0usize..4) {
        let tols = suite_tolerances();
        let class = EClass::ALL[class_ix];
        let pair = gen_in_class(class, seed, &tols).unwrap();
        let r = classify(&pair.composed(), &suite_t_samples(GEN_OMEGA), &tols).unwrap();
        prop_assert!(r.verdicts.get(class));
    }

    // The lattice spans 4^±24, so u^(p-1) moves by the six decades the ratio
    // thresholds ask for only when p − 1 > 6/(24·log10 4) ≈ 0.42.
    #[test]
    fn resolvable_powers_of_abs_are_n_functions(p in 1.45f64..4.0, a in 0.1f64..5.0) {
        let c = ComposedPhi::parse(&format!("{a:?}*abs(u)^{p:?}"), "t", "u").unwrap();
        let ts = stratified_t_samples(0.0, 1.0, 3);
        let r = classify(&c, &ts, &ToleranceConfig::default()).unwrap();
        prop_assert!(r.verdicts.e_n, "{c}: {:?}", r.failures);
    }

    #[test]
    fn near_linear_growth_is_never_an_n_function(a in 0.1f64..5.0, p in 1.0f64..1.35) {
        let c = ComposedPhi::parse(&format!("{a:?}*abs(u)^{p:?}"), "t", "u").unwrap();
        let r = classify(&c, &[0.5], &ToleranceConfig::default()).unwrap();
        prop_assert!(!r.verdicts.e_n);
        prop_assert!(r.verdicts.e_strong_young);
    }
}

#[test]
fn raw_classification_is_the_identity_map() {
    let phi = PhiSpec::parse("t + u^2").unwrap();
    let ts = stratified_t_samples(-1.0, 1.0, 5);
    let tols = ToleranceConfig::default();
    let raw = raw_classify(&phi, &ts, &tols).unwrap();
    let id = classify(&ComposedPhi::new(phi, PlaneMap::identity()), &ts, &tols).unwrap();
    assert_eq!(raw, id);
    assert!(!raw.verdicts.e_young);
}

#[test]
fn finiteness_threshold_and_left_limit() {
    let c = ComposedPhi::parse("if(u < 2, u^2, inf)", "t", "u").unwrap();
    let r = classify(&c, &[0.5], &ToleranceConfig::default()).unwrap();
    let p = &r.profiles[0];
    assert!((p.u_phi.to_f64() - 2.0).abs() < 1e-9);
    assert!((p.left_limit_at_u.unwrap().to_f64() - 4.0).abs() < 1e-6);
    assert!(r.verdicts.e_young && !r.verdicts.e_orlicz && !r.verdicts.e_strong_young);
}
