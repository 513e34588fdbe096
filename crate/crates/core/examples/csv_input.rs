//! Load `t,value` samples from CSV and take a weak Orlicz norm.

use eorlicz::classify::ComposedPhi;
use eorlicz::measure::SampledFn;
use eorlicz::norms::{compute_norm, NormKind, NormSpec, YoungComposition};

fn main() {
    // Non-uniform t becomes a discrete space with midpoint cells.
    let csv = "t,f\n0.0,0.2\n0.1,0.9\n0.35,1.4\n0.6,0.7\n1.0,0.1\n";
    let f = SampledFn::from_csv_reader(csv.as_bytes()).unwrap();
    println!("{} samples, cells {:?}", f.space().len(), f.space().weights());
    let c = YoungComposition::trusted(ComposedPhi::parse("u^3", "t", "u").unwrap());
    for kind in [NormKind::Luxemburg, NormKind::Weak] {
        let r = compute_norm(&f, &c, &NormSpec::new(kind)).unwrap();
        println!("{:<10} {:.6}", kind.name(), r.value.to_f64());
    }
}
