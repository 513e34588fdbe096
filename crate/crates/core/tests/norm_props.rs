use eorlicz::classify::{ComposedPhi, PhiSpec, PlaneMap};
use eorlicz::measure::{SampledFn, Space};
use eorlicz::norms::{compute_norm, NormKind, NormSpec, YoungComposition};
use proptest::prelude::*;

fn sampled() -> impl Strategy<Value = SampledFn> {
    (5usize..48).prop_flat_map(|n| {
        prop::collection::vec(prop_oneof![4 => 0.0f64..3.0, 1 => Just(0.0), 1 => Just(1.5)], n)
            .prop_map(|v| SampledFn::new(Space::interval(0.0, 1.0, v.len()).unwrap(), v).unwrap())
            .prop_filter("not identically zero", |f| !f.is_zero())
    })
}

fn power(c: f64, p: f64) -> YoungComposition {
    let phi = PhiSpec::parse(&format!("{c:?}*u^{p:?}")).unwrap();
    YoungComposition::trusted(ComposedPhi::new(phi, PlaneMap::identity()))
}

/// `a·(1 + t²)·u^p + b·(exp(q·u) − 1)`, Young for a, b ≥ 0 and p ≥ 1.
fn family(a: f64, p: f64, b: f64, q: f64, t_dependent: bool) -> YoungComposition {
    let g = if t_dependent { "(1 + t^2)" } else { "1" };
    let text = format!("{a:?}*{g}*u^{p:?} + {b:?}*(exp({q:?}*u) - 1)");
    YoungComposition::trusted(ComposedPhi::new(PhiSpec::parse(&text).unwrap(), PlaneMap::identity()))
}

fn norm(f: &SampledFn, c: &YoungComposition, kind: NormKind, weak: bool) -> f64 {
    compute_norm(f, c, &NormSpec::new(kind).weak(weak)).unwrap().value.to_f64()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn luxemburg_of_a_power_is_an_lp_norm(f in sampled(), c in 0.2f64..5.0, p in 1.0f64..4.0) {
        // Oracle: (c·∫|f|^p)^{1/p} with the trapezoid rule written out here.
        let t = f.space().nodes();
        let v = f.values();
        let integral: f64 = (1..t.len()).map(|i| 0.5 * (t[i] - t[i - 1]) * (v[i - 1].powf(p) + v[i].powf(p))).sum();
        let want = (c * integral).powf(1.0 / p);
        let got = norm(&f, &power(c, p), NormKind::Luxemburg, false);
        prop_assert!(close(got, want, 1e-8), "{got} vs {want}");
    }

    #[test]
    fn weak_norm_of_a_power_is_a_level_maximum(f in sampled(), c in 0.2f64..5.0, p in 1.0f64..4.0) {
        // Oracle: max over values v of v·(c·μ{f ≥ v})^{1/p}, brute force.
        let w = f.space().weights();
        let want = f
            .values()
            .iter()
            .map(|&level| {
                let mass: f64 = f.values().iter().zip(w).filter(|(x, _)| **x >= level).map(|(_, w)| w).sum();
                level * (c * mass).powf(1.0 / p)
            })
            .fold(0.0, f64::max);
        let got = norm(&f, &power(c, p), NormKind::Weak, false);
        prop_assert!(close(got, want, 1e-8), "{got} vs {want}");
    }

    #[test]
    fn norms_are_positively_homogeneous(
        f in sampled(), alpha in 0.1f64..10.0,
        a in 0.0f64..3.0, p in 1.0f64..4.0, b in 0.0f64..2.0, q in 0.05f64..1.5, td in any::<bool>(),
    ) {
        let c = family(a.max(0.05), p, b, q, td);
        let scaled = f.scaled(alpha);
        for kind in NormKind::ALL {
            let (n1, n2) = (norm(&f, &c, kind, false), norm(&scaled, &c, kind, false));
            prop_assert!(close(n2, alpha * n1, 1e-8), "{}: {} vs {}", kind.name(), n2, alpha * n1);
        }
    }

    #[test]
    fn weak_variants_are_below_strong_ones(
        f in sampled(), a in 0.05f64..3.0, p in 1.0f64..4.0, b in 0.0f64..2.0, q in 0.05f64..1.5,
    ) {
        let c = family(a, p, b, q, false);
        for kind in [NormKind::Luxemburg, NormKind::Sobolev, NormKind::Morrey, NormKind::Lorentz] {
            let (weak, strong) = (norm(&f, &c, kind, true), norm(&f, &c, kind, false));
            prop_assert!(weak <= strong + 1e-9 * (1.0 + strong), "{}: {} > {}", kind.name(), weak, strong);
        }
    }

    #[test]
    fn norms_are_monotone_in_f(
        f in sampled(), shrink in 0.0f64..1.0, a in 0.05f64..3.0, p in 1.0f64..4.0, b in 0.0f64..2.0,
    ) {
        let c = family(a, p, b, 0.5, true);
        let g = f.map(|v| v * shrink).unwrap();
        // Sobolev involves derivatives, so only the families monotone in |f| are checked.
        for kind in [NormKind::Luxemburg, NormKind::Weak, NormKind::Morrey, NormKind::Lorentz] {
            let (small, big) = (norm(&g, &c, kind, false), norm(&f, &c, kind, false));
            prop_assert!(small <= big + 1e-9 * (1.0 + big), "{}: {} > {}", kind.name(), small, big);
        }
    }

    #[test]
    fn lorentz_with_unit_weight_is_luxemburg(
        f in sampled(), a in 0.05f64..3.0, p in 1.0f64..4.0, b in 0.0f64..2.0, q in 0.05f64..1.5,
    ) {
        let c = family(a, p, b, q, false);
        let (lor, lux) = (norm(&f, &c, NormKind::Lorentz, false), norm(&f, &c, NormKind::Luxemburg, false));
        prop_assert!(close(lor, lux, 1e-6), "{lor} vs {lux}");
    }

    #[test]
    fn dominated_compositions_give_smaller_norms(
        f in sampled(), a in 0.05f64..3.0, p in 1.0f64..4.0, extra in 0.0f64..2.0,
    ) {
        let small = family(a, p, 0.0, 1.0, true);
        let big = family(a, p, extra, 1.0, true);
        for kind in NormKind::ALL {
            let (n1, n2) = (norm(&f, &small, kind, false), norm(&f, &big, kind, false));
            prop_assert!(n1 <= n2 + 1e-8 * (1.0 + n2), "{}: {} > {}", kind.name(), n1, n2);
        }
    }
}

#[test]
fn non_young_compositions_are_rejected() {
    let c = ComposedPhi::parse("-u", "t", "u").unwrap();
    let ts = [0.25, 0.75];
    let err = YoungComposition::checked(c, &ts, &Default::default()).unwrap_err().to_string();
    assert!(err.contains("not E-Young"), "{err}");
}

#[test]
fn zero_function_has_zero_norm_in_every_family() {
    let f = SampledFn::new(Space::interval(0.0, 1.0, 9).unwrap(), vec![0.0; 9]).unwrap();
    let c = power(1.0, 2.0);
    for kind in NormKind::ALL {
        assert_eq!(norm(&f, &c, kind, false), 0.0);
    }
}
