//! Distribution function and decreasing rearrangement of a sampled function.

use eorlicz::measure::{distribution, rearrange, SampledFn, Space};

fn main() {
    let f = SampledFn::from_fn(Space::interval(0.0, 1.0, 17).unwrap(), |t| (6.0 * t).sin().abs()).unwrap();
    let star = rearrange(&f);
    println!("{:>6} {:>8} {:>8}", "u", "m_f(u)", "m_f*(u)");
    for u in [0.0, 0.25, 0.5, 0.75, 0.95] {
        println!("{u:>6} {:>8.4} {:>8.4}", distribution(&f, u), star.measure_above(u));
    }
    println!("f* at s = 0.1, 0.5, 0.9: {:.4} {:.4} {:.4}", star.value_at(0.1), star.value_at(0.5), star.value_at(0.9));
}
