//! One line per acceptance criterion. Criteria listed in `RECORDED_GAPS`
//! fail because a printed formula fails; the target still fails if any
//! other criterion fails or a recorded gap stops reproducing.

use std::process::ExitCode;
use std::time::Instant;

use shapeinv::ladders2d::{self, CoeffForm, Multiplet};
use shapeinv::osc3d::{self, Form, HermiteArgs, QNum3D};
use shapeinv::su2::{self, Side};
use shapeinv::verify::faults::{run_fault, Fault};
use shapeinv::verify::{self, op_identity, IdentityReport, SamplePlan, SuiteConfig, Tolerances};

const RECORDED_GAPS: [u32; 1] = [5];
const SEED: u64 = 20_240_601;
const POINTS: usize = 50;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn plan() -> SamplePlan {
    SamplePlan::new(SEED, POINTS)
}

fn worst_rel(rs: &[IdentityReport]) -> f64 {
    rs.iter().map(|r| r.relative).fold(0.0, f64::max)
}

fn failing(rs: &[IdentityReport]) -> Vec<String> {
    rs.iter().filter(|r| !r.pass).map(|r| r.name.clone()).collect()
}

fn c1() -> Outcome {
    let t = Instant::now();
    let gs = su2::build_raw_generators();
    let rel = su2::algebra_relations(&gs);
    let reps: Vec<_> = rel
        .iter()
        .map(|(n, p)| op_identity(n, p, &plan(), 1e-10).unwrap())
        .collect();
    let secs = t.elapsed().as_secs_f64();
    let bad = failing(&reps);
    let funcs = verify::battery().len();
    outcome(
        bad.is_empty() && reps.len() == 15 && funcs >= 5 && secs < 5.0,
        format!(
            "{} relations, {} points x {} functions, worst rel {:.1e}, {:.2} s {:?}",
            reps.len(),
            POINTS,
            funcs,
            worst_rel(&reps),
            secs,
            bad
        ),
    )
}

fn c2() -> Outcome {
    let gs = su2::build_raw_generators();
    let (l, r) = (su2::casimir(&gs, Side::Left), su2::casimir(&gs, Side::Right));
    let printed = su2::printed_casimir();
    let reps = [
        op_identity("left", &[l.clone(), -printed.clone()], &plan(), 1e-12).unwrap(),
        op_identity("right", &[r.clone(), -printed], &plan(), 1e-12).unwrap(),
        op_identity("left-right", &[l, -r], &plan(), 1e-12).unwrap(),
    ];
    let reduced = su2::fourier_reduce(&su2::printed_casimir()).unwrap();
    let exact = reduced == su2::printed_casimir_reduced();
    outcome(
        reps.iter().all(|r| r.pass) && exact,
        format!(
            "left/right/printed worst rel {:.1e}; reduction term-for-term equal: {exact}",
            worst_rel(&reps)
        ),
    )
}

fn c3() -> Outcome {
    let p = SamplePlan::new(SEED, 120);
    let r = su2::hq_offset_report(&p, 1e-9).unwrap();
    let [c, sd] = r.measured.unwrap_or([f64::NAN, f64::NAN]);
    outcome(
        r.pass && sd <= 1e-9 && p.count >= 100,
        format!("constant offset {c:.3e} over {} points, dispersion {sd:.1e}", p.count),
    )
}

fn c4() -> Outcome {
    let t = Instant::now();
    let mut reps = Vec::new();
    let mut degeneracy_ok = true;
    for twol in 0..=6 {
        let mp = Multiplet::build(twol).unwrap();
        reps.extend(ladders2d::eigen_reports(&mp, &plan(), 1e-8).unwrap());
        for q in -twol..=twol {
            let d = ladders2d::degeneracy(twol, q);
            degeneracy_ok &= d.len() as i64 == twol + 1 - q.abs() && d == ladders2d::degeneracy_brute(twol, q);
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let bad = failing(&reps);
    outcome(
        bad.is_empty() && degeneracy_ok && secs < 30.0,
        format!(
            "{} eigen-equations at l(l+1), worst rel {:.1e}; degeneracy ok: {degeneracy_ok}; {:.1} s {:?}",
            reps.len(),
            worst_rel(&reps),
            secs,
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn c5() -> Outcome {
    let mut printed_bad = 0;
    let mut printed_total = 0;
    let mut corrected = Vec::new();
    let mut chains = Vec::new();
    let mut n_bad = Vec::new();
    for twol in 0..=6 {
        let mp = Multiplet::build(twol).unwrap();
        let p = ladders2d::ladder_action_reports(&mp, &plan(), 1e-8, &ladders2d::form_coeff(CoeffForm::Printed)).unwrap();
        printed_total += p.len();
        printed_bad += p.iter().filter(|r| !r.pass).count();
        corrected.extend(
            ladders2d::ladder_action_reports(&mp, &plan(), 1e-8, &ladders2d::form_coeff(CoeffForm::Corrected)).unwrap(),
        );
        chains.extend(ladders2d::shape_reports(&mp, &plan(), 1e-8).unwrap());
        n_bad.extend(ladders2d::n_grid_mismatches(twol).unwrap());
    }
    let corrected_ok = corrected.iter().all(|r| r.pass);
    let chains_ok = chains.iter().all(|r| r.pass);
    outcome(
        printed_bad == 0 && n_bad.is_empty() && chains_ok,
        format!(
            "printed coefficients: {printed_bad} of {printed_total} actions mismatch; \
             corrected A with printed B: {}; N product = closed form: {}; Y/X chains and X+ annihilation: {}",
            if corrected_ok { "all match" } else { "mismatch" },
            n_bad.is_empty(),
            chains_ok
        ),
    )
}

fn c6() -> Outcome {
    let mut reps: Vec<_> = osc3d::canonical_relations_full(Form::Corrected)
        .iter()
        .map(|(n, p)| op_identity(n, p, &plan(), 1e-10).unwrap())
        .collect();
    let fact = osc3d::verify_factorization(&plan(), 1e-10, Form::Corrected, 2).unwrap();
    let inter = osc3d::verify_intertwining(&plan(), 1e-10, Form::Corrected).unwrap();
    let n_canon = reps.len();
    reps.push(fact);
    reps.extend(inter);
    let bad = failing(&reps);
    outcome(
        bad.is_empty(),
        format!(
            "{n_canon} canonical commutators, factorization and 4 intertwining relations in symbolic m, worst rel {:.1e} {:?}",
            worst_rel(&reps),
            bad
        ),
    )
}

fn c7() -> Outcome {
    let mut eig = Vec::new();
    for qn in QNum3D::grid(4) {
        for w in [1.0, 2.0] {
            eig.push(osc3d::eigen_report(qn, w, HermiteArgs::Scaled, &plan(), 1e-8).unwrap());
        }
    }
    let mut lad = Vec::new();
    let mut shape = Vec::new();
    for n in 0..=3 {
        for m in (-n..=n).step_by(2) {
            for (a, b) in [(0, 0), (1, 0), (0, 1)] {
                let qn = QNum3D::new(n, m, a, b).unwrap();
                let l = osc3d::psi_ladder(qn).unwrap();
                let c = osc3d::psi_closed(qn, HermiteArgs::Scaled, true).unwrap();
                lad.push(verify::check_proportional("", &l, &c, &plan(), 1e-8).unwrap());
                shape.extend(osc3d::shape_report(qn, &plan(), 1e-8).unwrap());
            }
        }
    }
    let ok = [&eig, &lad, &shape].iter().all(|v| v.iter().all(|r| r.pass));
    outcome(
        ok,
        format!(
            "{} eigen-equations (n+n3+n4 <= 4, w in {{1,2}}) worst rel {:.1e}; {} ladder/closed ratios worst dev {:.1e}; {} A+A- eigenvalues = E(n,m)",
            eig.len(),
            worst_rel(&eig),
            lad.len(),
            worst_rel(&lad),
            shape.len()
        ),
    )
}

fn c8() -> Outcome {
    let tol = Tolerances::default();
    let outs: Vec<_> = Fault::ALL.iter().map(|&f| run_fault(f, &plan(), &tol)).collect();
    let missed: Vec<_> = outs.iter().filter(|o| !o.detected).map(|o| o.fault.id()).collect();
    let a1 = outs.iter().find(|o| o.fault == Fault::PrintedA1PsiSign).unwrap();
    outcome(
        missed.is_empty() && outs.len() >= 6,
        format!(
            "{} of {} faults detected; printed A1 sign breaks {} of {} intertwining relations {:?}",
            outs.len() - missed.len(),
            outs.len(),
            a1.broken,
            a1.total,
            missed
        ),
    )
}

fn c9() -> Outcome {
    let cfg = SuiteConfig {
        seed: SEED,
        ..SuiteConfig::default()
    };
    let t = Instant::now();
    let a = verify::run_suite(&cfg);
    let secs = t.elapsed().as_secs_f64();
    let b = verify::run_suite(&cfg);
    let same = a.to_json() == b.to_json();
    outcome(
        same && secs < 60.0 && a.all_pass(),
        format!(
            "byte-identical: {same}; full suite {:.1} s; {}",
            secs,
            a.summary_line()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "su(2) algebra", c1),
        (2, "Casimir", c2),
        (3, "H_q pipeline", c3),
        (4, "2-D eigenspectrum", c4),
        (5, "2-D ladders", c5),
        (6, "oscillator algebra", c6),
        (7, "3-D eigenfunctions", c7),
        (8, "negative controls", c8),
        (9, "determinism", c9),
    ];
    let mut unexpected = Vec::new();
    for (k, name, f) in criteria {
        let o = f();
        let gap = RECORDED_GAPS.contains(&k);
        let tag = match (o.pass, gap) {
            (true, false) => "PASS",
            (false, true) => "FAIL (recorded)",
            (false, false) => "FAIL",
            (true, true) => "PASS (recorded gap no longer reproduces)",
        };
        println!("criterion {k} {tag}: {name}: {}", o.detail);
        if o.pass == gap {
            unexpected.push(k);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcomes: {unexpected:?}");
        ExitCode::FAILURE
    }
}
