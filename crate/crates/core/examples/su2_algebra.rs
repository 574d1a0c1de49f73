//! The six invariant vector fields and their commutation relations.

use shapeinv::su2::{self, Gen};
use shapeinv::verify::{op_identity, SamplePlan};

fn main() {
    let gs = su2::build_raw_generators();
    println!("L+ =\n{}\n", gs.get(Gen::Lp));
    let plan = SamplePlan::new(1, 50);
    for (name, pieces) in su2::algebra_relations(&gs) {
        let r = op_identity(&name, &pieces, &plan, 1e-10).expect("evaluable");
        println!("{:<18} rel {:.2e} {}", name, r.relative, if r.pass { "ok" } else { "FAIL" });
    }
}
