use eorlicz::ext_real::ExtReal;
use eorlicz::measure::{distribution, distribution_ge, integrate, rearrange, SampledFn, Space};
use proptest::prelude::*;

fn sampled() -> impl Strategy<Value = SampledFn> {
    (3usize..80, -2.0f64..2.0, 0.1f64..4.0).prop_flat_map(|(n, a, len)| {
        prop::collection::vec(prop_oneof![3 => 0.0f64..5.0, 1 => (0u8..4).prop_map(f64::from)], n).prop_map(
            move |vals| SampledFn::new(Space::interval(a, a + len, vals.len()).unwrap(), vals).unwrap(),
        )
    })
}

fn discrete() -> impl Strategy<Value = SampledFn> {
    prop::collection::vec((0.01f64..1.0, 0.0f64..1.0, 0.0f64..5.0), 1..40).prop_map(|cells| {
        let mut t = 0.0;
        let (mut pts, mut ws, mut vs) = (vec![], vec![], vec![]);
        for (gap, w, v) in cells {
            t += gap;
            pts.push(t);
            ws.push(w);
            vs.push(v);
        }
        SampledFn::new(Space::discrete(pts, ws).unwrap(), vs).unwrap()
    })
}

fn trapezoid(f: &SampledFn, g: impl Fn(f64) -> f64) -> f64 {
    let t = f.space().nodes();
    let v = f.values();
    (1..t.len()).map(|i| 0.5 * (t[i] - t[i - 1]) * (g(v[i - 1]) + g(v[i]))).sum()
}

proptest! {
    #[test]
    fn interval_integration_is_the_trapezoid_rule(f in sampled(), p in 1.0f64..4.0) {
        let vals: Vec<ExtReal> = f.values().iter().map(|v| ExtReal::Finite(v.powf(p))).collect();
        let got = integrate(f.space(), &vals).unwrap().to_f64();
        let want = trapezoid(&f, |v| v.powf(p));
        prop_assert!((got - want).abs() <= 1e-12 * want.max(1.0), "{got} vs {want}");
    }

    #[test]
    fn integration_is_linear(f in sampled(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g: Vec<f64> = f.values().iter().map(|v| v * v).collect();
        let lin: Vec<ExtReal> = f.values().iter().zip(&g).map(|(x, y)| ExtReal::Finite(a * x + b * y)).collect();
        let fx: Vec<ExtReal> = f.values().iter().map(|&x| ExtReal::Finite(x)).collect();
        let gx: Vec<ExtReal> = g.iter().map(|&x| ExtReal::Finite(x)).collect();
        let lhs = integrate(f.space(), &lin).unwrap().to_f64();
        let rhs = a * integrate(f.space(), &fx).unwrap().to_f64() + b * integrate(f.space(), &gx).unwrap().to_f64();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }

    #[test]
    fn rearrangement_is_equimeasurable(f in prop_oneof![sampled(), discrete()], u in -0.5f64..6.0) {
        let r = rearrange(&f);
        let cell = f.space().max_cell();
        prop_assert!((r.measure_above(u) - distribution(&f, u)).abs() <= 1e-12 * (1.0 + cell));
        prop_assert!((r.total_measure() - f.space().total_measure()).abs() <= 1e-12 * (1.0 + f.space().total_measure()));
        for level in f.values() {
            prop_assert!((r.measure_above(*level) - distribution(&f, *level)).abs() <= 1e-12);
        }
    }

    #[test]
    fn rearrangement_is_nonincreasing_and_preserves_integrals(f in prop_oneof![sampled(), discrete()], p in 1.0f64..4.0) {
        let r = rearrange(&f);
        prop_assert!(r.levels.windows(2).all(|w| w[0] > w[1]));
        let pieces: f64 = r.pieces().map(|(s0, s1, l)| (s1 - s0) * l.powf(p)).sum();
        let direct: f64 = f.values().iter().zip(f.space().weights()).map(|(v, w)| w * v.powf(p)).sum();
        prop_assert!((pieces - direct).abs() <= 1e-10 * (1.0 + direct));
    }

    #[test]
    fn distribution_functions_are_monotone(f in sampled(), u in 0.0f64..5.0, du in 0.0f64..2.0) {
        prop_assert!(distribution(&f, u + du) <= distribution(&f, u));
        prop_assert!(distribution(&f, u) <= distribution_ge(&f, u));
        prop_assert!(distribution_ge(&f, u) <= f.space().total_measure() + 1e-12);
    }

    #[test]
    fn csv_input_reproduces_samples(f in sampled()) {
        let mut text = String::from("t,value\n");
        for (t, v) in f.space().nodes().iter().zip(f.values()) {
            text.push_str(&format!("{t:?},{v:?}\n"));
        }
        let back = SampledFn::from_csv_reader(text.as_bytes()).unwrap();
        prop_assert_eq!(back.values(), f.values());
        prop_assert_eq!(back.space().len(), f.space().len());
        let (a, b) = f.space().bounds();
        prop_assert_eq!(back.space().bounds(), (a, b));
    }
}

#[test]
fn infinite_integrands() {
    let s = Space::interval(0.0, 1.0, 5).unwrap();
    let mut v = vec![ExtReal::ZERO; 5];
    v[2] = ExtReal::PosInf;
    assert_eq!(integrate(&s, &v).unwrap(), ExtReal::PosInf);
    v[3] = ExtReal::NegInf;
    assert!(integrate(&s, &v).unwrap().is_undefined());
    v[3] = ExtReal::Undefined;
    assert!(integrate(&s, &v).is_err());
}

#[test]
fn malformed_csv_is_rejected() {
    assert!(SampledFn::from_csv_reader("0,1\n1,2,3\n".as_bytes()).is_err());
    assert!(SampledFn::from_csv_reader("0,1\n0,2\n".as_bytes()).is_err());
    assert!(SampledFn::from_csv_reader("0,1\n1,x\n".as_bytes()).is_err());
}
