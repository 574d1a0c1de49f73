//! Oscillator eigenfunctions, closed form against ladder construction.

use shapeinv::osc3d::{self, HermiteArgs, QNum3D};
use shapeinv::verify::{check_ratio, SamplePlan};

fn main() {
    let plan = SamplePlan::new(6, 40);
    for qn in QNum3D::grid(2) {
        let e = osc3d::spectrum(qn, 1.0);
        let h = osc3d::eigen_report(qn, 1.0, HermiteArgs::Scaled, &plan, 1e-8).unwrap();
        let closed = osc3d::psi_closed(qn, HermiteArgs::Scaled, true).unwrap();
        let ladder = osc3d::psi_ladder(qn).unwrap();
        let r = check_ratio("", &ladder, &closed, 1.0.into(), &plan, 1e-8).unwrap();
        println!("{qn}: E = {e}, eigen {}, ladder/closed {:?}", h.pass, r.measured.map(|m| m[0]));
    }
    let (diff, names) = osc3d::h4_reduction_diff(osc3d::Form::Printed).unwrap();
    println!("printed full Hamiltonian reduces with {} stray terms:", diff.terms().len());
    for n in names {
        println!("  {n}");
    }
}
