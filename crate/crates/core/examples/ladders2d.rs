//! Ladder coefficients on one multiplet, corrected and as printed.

use shapeinv::ladders2d::{self, CoeffForm, CoeffKind, Multiplet, QNum2D};
use shapeinv::verify::SamplePlan;

fn main() {
    let twol = 3;
    let plan = SamplePlan::new(5, 40);
    let qn = QNum2D::new(twol, 1, 0).unwrap();
    for kind in CoeffKind::ALL {
        for form in [CoeffForm::Corrected, CoeffForm::Printed] {
            match ladders2d::coeff(kind, qn, form) {
                Ok(c) => println!("{kind:?} {form:?} at {qn}: {:.6}", c.value),
                Err(e) => println!("{kind:?} {form:?} at {qn}: {e}"),
            }
        }
    }
    for form in [CoeffForm::Corrected, CoeffForm::Printed] {
        let r = ladders2d::verify_ladder_actions(twol, &plan, 1e-8, form).unwrap();
        println!("{}: {}", r.name, if r.pass { "hold" } else { "fail" });
    }
    let mp = Multiplet::build(twol).unwrap();
    let sh = ladders2d::worst("Y and X chains", ladders2d::shape_reports(&mp, &plan, 1e-8).unwrap(), 1e-8);
    println!("{}: pass {}", sh.name, sh.pass);
    let rb = ladders2d::reconstruct_chain(&mp, QNum2D::new(twol, -1, 0).unwrap()).unwrap();
    println!("chain normalizations k = {:.6}, f = {:.6}", rb.k, rb.f);
}
