//! Eigenfunctions of the reduced Casimir and H_q for one multiplet.
//!
//! cargo run --example eigen2d -- [2l]

use shapeinv::ladders2d::{self, Multiplet};
use shapeinv::verify::SamplePlan;

fn main() {
    let twol = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let mp = Multiplet::build(twol).expect("2l >= 0");
    for qn in mp.states() {
        println!("{qn}: chi = {}", mp.chi(qn.q, qn.m).unwrap());
    }
    for q in -twol..=twol {
        println!("q={q}: m in {:?}", ladders2d::degeneracy(twol, q));
    }
    let reps = ladders2d::eigen_reports(&mp, &SamplePlan::new(4, 40), 1e-8).unwrap();
    let w = ladders2d::worst("eigen-equations", reps, 1e-8);
    println!("{}: pass {} worst rel {:.1e}", w.name, w.pass, w.relative);
}
