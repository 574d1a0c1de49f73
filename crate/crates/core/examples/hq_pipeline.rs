//! Conjugating the reduced Casimir by (sin psi sin theta)^(1/2) and
//! comparing with the printed H_q.

use shapeinv::su2;
use shapeinv::verify::SamplePlan;

fn main() {
    let b = su2::build_hq();
    println!("derived H_q:\n{}\n", b.derived);
    println!("derived - printed is zero: {}", b.difference.is_zero());
    println!("two-step route agrees: {}", b.two_step == b.derived);
    let r = su2::hq_offset_report(&SamplePlan::new(3, 120), 1e-9).unwrap();
    println!("measured constant {:?}, pass {}", r.measured, r.pass);

    let primed = su2::build_primed_generators(true);
    let c = su2::casimir(&primed, su2::Side::Left);
    println!("Casimir of the conjugated generators equals H_q: {}", c == b.printed);
}
