//! Deliberate mutations of verified formulas. Each one must make at least
//! one check fail, otherwise the harness proves nothing.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ladders2d::{self, CoeffForm, Multiplet};
use crate::opalg::DiffOp;
use crate::osc3d::{self, Form, HermiteArgs, QNum3D};
use crate::su2::{self, Gen, GeneratorSet, Side};
use crate::symx::vars::q;
use crate::symx::Gq;
use crate::verify::{op_identity, IdentityReport, SamplePlan, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fault {
    LplusSignFlip,
    ReducedLplusUnshiftedCharge,
    FactorizationDropsConstant,
    LadderCoefficientOffByOne,
    PrintedA1PsiSign,
    OmegaFreeHermite,
    CasimirWithoutFour,
}

impl Fault {
    pub const ALL: [Fault; 7] = [
        Fault::LplusSignFlip,
        Fault::ReducedLplusUnshiftedCharge,
        Fault::FactorizationDropsConstant,
        Fault::LadderCoefficientOffByOne,
        Fault::PrintedA1PsiSign,
        Fault::OmegaFreeHermite,
        Fault::CasimirWithoutFour,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Fault::LplusSignFlip => "lplus-sign",
            Fault::ReducedLplusUnshiftedCharge => "reduced-lplus-charge",
            Fault::FactorizationDropsConstant => "factorization-constant",
            Fault::LadderCoefficientOffByOne => "ladder-coefficient",
            Fault::PrintedA1PsiSign => "a1-psi-sign",
            Fault::OmegaFreeHermite => "hermite-omega",
            Fault::CasimirWithoutFour => "casimir-scale",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Fault::LplusSignFlip => "L+ with its overall sign flipped",
            Fault::ReducedLplusUnshiftedCharge => "reduced L+ with i q in place of i (q-1)",
            Fault::FactorizationDropsConstant => "oscillator factorization without the +2",
            Fault::LadderCoefficientOffByOne => "2-D ladder coefficients plus 1",
            Fault::PrintedA1PsiSign => "A1 with the printed sign of its d_psi term",
            Fault::OmegaFreeHermite => "Hermite arguments without sqrt(w), at w = 2",
            Fault::CasimirWithoutFour => "Casimir quadratic form without the factor 4",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaultOutcome {
    pub fault: Fault,
    pub detected: bool,
    pub broken: usize,
    pub total: usize,
    pub worst_relative: f64,
    pub notes: Vec<String>,
}

fn relations(pieces: Vec<(String, Vec<DiffOp>)>, plan: &SamplePlan, tol: f64) -> Result<Vec<IdentityReport>> {
    pieces.iter().map(|(n, p)| op_identity(n, p, plan, tol)).collect()
}

fn run_checks(f: Fault, plan: &SamplePlan, tol: &Tolerances) -> Result<Vec<IdentityReport>> {
    let op = tol.operator;
    match f {
        Fault::LplusSignFlip => {
            let mut gs = su2::build_raw_generators();
            gs.lp = -gs.lp;
            relations(su2::algebra_relations(&gs), plan, op)
        }
        Fault::ReducedLplusUnshiftedCharge => {
            let bad = su2::param(Gen::Lp, &q()).compose(&DiffOp::shift(1));
            let red = su2::fourier_reduce(&su2::raw(Gen::Lp))?;
            let mut out = vec![op_identity("reduction of Lp", &[red, -bad.clone()], plan, op)?];
            let gs = GeneratorSet {
                lp: bad,
                ..su2::build_reduced_generators()
            };
            out.extend(relations(su2::algebra_relations(&gs), plan, op)?);
            Ok(out)
        }
        Fault::FactorizationDropsConstant => Ok(vec![osc3d::verify_factorization(plan, op, Form::Corrected, 0)?]),
        Fault::LadderCoefficientOffByOne => {
            let mp = Multiplet::build(2)?;
            let plus_one = |k, qn| Ok(ladders2d::coeff(k, qn, CoeffForm::Corrected)?.value + 1.0);
            ladders2d::ladder_action_reports(&mp, plan, tol.eigen, &plus_one)
        }
        Fault::PrintedA1PsiSign => osc3d::verify_intertwining(plan, op, Form::Printed),
        Fault::OmegaFreeHermite => [(0, 0, 2, 0), (0, 0, 0, 2), (1, 1, 2, 1)]
            .iter()
            .map(|&(n, m, a, b)| {
                let qn = QNum3D::new(n, m, a, b)?;
                osc3d::eigen_report(qn, 2.0, HermiteArgs::OmegaFree, plan, tol.eigen)
            })
            .collect(),
        Fault::CasimirWithoutFour => {
            let quad = su2::casimir(&su2::build_raw_generators(), Side::Left).scale_c(Gq::ratio(1, 4));
            Ok(vec![op_identity("Casimir vs printed", &[quad, -su2::printed_casimir()], plan, tol.casimir)?])
        }
    }
}

/// Runs the checks a fault should break. An evaluation error counts as a
/// detection and is noted.
pub fn run_fault(f: Fault, plan: &SamplePlan, tol: &Tolerances) -> FaultOutcome {
    match run_checks(f, plan, tol) {
        Ok(reps) => {
            let broken: Vec<&IdentityReport> = reps.iter().filter(|r| !r.pass).collect();
            let worst = reps.iter().map(|r| r.relative).fold(0.0, f64::max);
            let mut notes = vec![format!("{} of {} checks broken", broken.len(), reps.len())];
            notes.extend(broken.iter().take(4).map(|r| format!("broken: {}", r.name)));
            FaultOutcome {
                fault: f,
                detected: !broken.is_empty(),
                broken: broken.len(),
                total: reps.len(),
                worst_relative: worst,
                notes,
            }
        }
        Err(e) => FaultOutcome {
            fault: f,
            detected: true,
            broken: 0,
            total: 0,
            worst_relative: f64::INFINITY,
            notes: vec![format!("evaluation error: {e}")],
        },
    }
}
