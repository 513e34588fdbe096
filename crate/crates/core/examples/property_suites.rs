//! Seeded closure, chain and inclusion suites at a small case count.

use eorlicz::classify::EClass;
use eorlicz::verify::{
    check_chain, check_closure, check_inclusion, check_non_reversal, gen_in_class, suite_tolerances, ClosureOp,
    InclusionMode,
};

fn main() {
    let tols = suite_tolerances();
    let pair = gen_in_class(EClass::EOrlicz, 42, &tols).unwrap();
    println!("a generated e_orlicz pair: {}", pair.composed());

    let mut reports = vec![
        check_closure(EClass::EYoung, ClosureOp::Sum, 42, 20, &tols).unwrap(),
        check_closure(EClass::EN, ClosureOp::MapCompose, 42, 20, &tols).unwrap(),
        check_closure(EClass::EStrongYoung, ClosureOp::Scale, 42, 20, &tols).unwrap(),
        check_chain(42, 100, &tols).unwrap(),
        check_non_reversal(&Default::default()).unwrap(),
    ];
    reports.push(check_inclusion(InclusionMode::PhiMono, true, 42, 5, &tols).unwrap());
    for r in &reports {
        println!("{:<32} {}/{} passed, {} skipped", r.suite, r.cases_passed, r.cases_run, r.skipped);
        for d in &r.diagnostics {
            println!("    {d}");
        }
    }
}
