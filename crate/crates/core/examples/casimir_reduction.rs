//! Casimir from either side, and its reduction on charge-q families.

use shapeinv::su2::{self, Side};
use shapeinv::verify::{op_identity, SamplePlan};

fn main() {
    let gs = su2::build_raw_generators();
    let left = su2::casimir(&gs, Side::Left);
    let right = su2::casimir(&gs, Side::Right);
    let plan = SamplePlan::new(2, 50);
    let r = op_identity("left = right", &[left.clone(), -right], &plan, 1e-12).unwrap();
    println!("left = right: rel {:.1e}", r.relative);

    let reduced = su2::fourier_reduce(&left).unwrap();
    println!("reduced Casimir:\n{reduced}\n");
    println!("equal to the printed reduced form: {}", reduced == su2::printed_casimir_reduced());
}
