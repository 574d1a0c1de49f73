//! The registered check list, run in parallel and reported in
//! registration order.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ladders2d::{self, CoeffForm, Multiplet};
use crate::osc3d::{self, Form, HermiteArgs, Osc, QNum3D};
use crate::su2::{self, Side};
use crate::verify::faults::{self, Fault};
use crate::verify::{self, op_identity, IdentityReport, SamplePlan, Tolerances};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub points: usize,
    /// Largest `2l` for the 2-D sweeps.
    pub twol_max: i64,
    /// Largest `n + n₃ + n₄` for the 3-D eigen-equations.
    pub n_max: i64,
    /// Largest `n` for ladder-built 3-D states.
    pub ladder_n_max: i64,
    /// Include odd `2l` in the 2-D sweeps.
    pub half_integer: bool,
    pub scope: Scope,
    pub tolerances: Tolerances,
    pub faults: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    All,
    /// su(2) operators and the 2-D ladders.
    Plane,
    /// The four-oscillator system.
    Oscillator,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 1,
            points: 50,
            twol_max: 6,
            n_max: 4,
            ladder_n_max: 3,
            half_integer: true,
            scope: Scope::All,
            tolerances: Tolerances::default(),
            faults: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// An identity that must hold.
    Identity,
    /// A printed form that must fail; passing means the failure was reproduced.
    Discrepancy,
    /// A negative control; passing means the mutation was caught.
    Fault,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub kind: CheckKind,
    #[serde(rename = "paper_ref")]
    pub reference: String,
    pub pass: bool,
    /// `None` when the residual is not finite.
    pub relative_residual: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub passed: usize,
    pub failed: usize,
    pub total: usize,
    pub faults_registered: usize,
    pub faults_detected: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub config: SuiteConfig,
    pub checks: Vec<CheckResult>,
    pub summary: SuiteSummary,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn summary_line(&self) -> String {
        format!("checks: {} passed / {} failed", self.summary.passed, self.summary.failed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "suite {} seed {} points {}", self.suite, self.seed, self.config.points);
        for c in &self.checks {
            let res = c.relative_residual.map_or("inf".to_string(), |r| format!("{r:.2e}"));
            let tag = match c.kind {
                CheckKind::Identity => "",
                CheckKind::Discrepancy => " [discrepancy]",
                CheckKind::Fault => " [fault]",
            };
            let _ = writeln!(
                s,
                "{} {}{} rel={} {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                tag,
                res,
                c.notes.join("; ")
            );
        }
        let _ = writeln!(
            s,
            "faults detected: {} / {}",
            self.summary.faults_detected, self.summary.faults_registered
        );
        let _ = writeln!(s, "{}", self.summary_line());
        s
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn from_report(r: IdentityReport, kind: CheckKind, reference: &str) -> CheckResult {
    let pass = match kind {
        CheckKind::Discrepancy => !r.pass,
        _ => r.pass,
    };
    let mut notes = r.notes;
    if let Some([c, d]) = r.measured {
        notes.push(format!("measured {c:.12e} (dispersion {d:.2e})"));
    }
    if kind == CheckKind::Discrepancy && pass {
        notes.push("printed form fails as recorded".into());
    }
    CheckResult {
        name: r.name,
        kind,
        reference: reference.into(),
        pass,
        relative_residual: finite(r.relative),
        notes,
    }
}

type Runner = Box<dyn Fn(&SamplePlan, &Tolerances) -> Result<Vec<IdentityReport>> + Send + Sync>;

struct Job {
    label: String,
    reference: &'static str,
    kind: CheckKind,
    run: Runner,
}

fn job(
    label: impl Into<String>,
    reference: &'static str,
    kind: CheckKind,
    run: impl Fn(&SamplePlan, &Tolerances) -> Result<Vec<IdentityReport>> + Send + Sync + 'static,
) -> Job {
    Job {
        label: label.into(),
        reference,
        kind,
        run: Box::new(run),
    }
}

fn relations(
    rel: Vec<(String, Vec<crate::opalg::DiffOp>)>,
    prefix: &str,
    plan: &SamplePlan,
    tol: f64,
) -> Result<Vec<IdentityReport>> {
    rel.iter()
        .map(|(n, p)| Ok(op_identity(n, p, plan, tol)?.renamed(format!("{prefix}{n}"))))
        .collect()
}

fn registry(cfg: &SuiteConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    if cfg.scope != Scope::Oscillator {
        jobs.extend(plane_jobs(cfg));
    }
    if cfg.scope != Scope::Plane {
        jobs.extend(oscillator_jobs(cfg));
    }
    jobs
}

fn plane_jobs(cfg: &SuiteConfig) -> Vec<Job> {
    use CheckKind::*;
    let mut jobs = vec![
        job("su2", "left/right invariant fields, su(2) x su(2)", Identity, |p, t| {
            relations(su2::algebra_relations(&su2::build_raw_generators()), "su2 ", p, t.operator)
        }),
        job("casimir", "Casimir operator", Identity, |p, t| {
            let gs = su2::build_raw_generators();
            let (l, r) = (su2::casimir(&gs, Side::Left), su2::casimir(&gs, Side::Right));
            let printed = su2::printed_casimir();
            Ok(vec![
                op_identity("casimir left = printed", &[l.clone(), -printed.clone()], p, t.casimir)?,
                op_identity("casimir right = printed", &[r.clone(), -printed], p, t.casimir)?,
                op_identity("casimir left = right", &[l, -r], p, t.casimir)?,
            ])
        }),
        job("casimir reduction", "Fourier reduction of the Casimir", Identity, |p, t| {
            let red = su2::fourier_reduce(&su2::printed_casimir())?;
            let diff = &red - &su2::printed_casimir_reduced();
            let mut r = op_identity("casimir reduced = printed (operator)", &[diff.clone()], p, t.casimir)
                .or_else(|e| match e {
                    crate::Error::Inconclusive => Ok(exact("casimir reduced = printed (operator)", t.casimir)),
                    e => Err(e),
                })?;
            r.pass = r.pass && diff.is_zero();
            r.notes.push(if diff.is_zero() { "term-for-term equal" } else { "terms differ" }.into());
            Ok(vec![r])
        }),
        job("hq", "similarity and gauge transformation to H_q", Identity, |p, t| {
            let b = su2::build_hq();
            let sim = su2::conjugate(&su2::printed_casimir_reduced(), &su2::weight_similarity());
            Ok(vec![
                su2::hq_offset_report(&p.with_count_at_least(100), t.finite_difference.min(1e-9))?,
                op_identity("Hq two-step = combined", &[b.two_step, -b.derived.clone()], p, t.operator)?,
                op_identity("similarity step = printed", &[sim, -su2::printed_similarity()], p, t.operator)?,
            ])
        }),
        job("primed", "generators conjugated to the H_q frame", Identity, |p, t| {
            let gs = su2::build_primed_generators(true);
            let mut v = relations(su2::algebra_relations(&gs), "primed ", p, t.operator)?;
            let c = su2::casimir(&gs, Side::Left);
            v.push(op_identity("primed casimir = Hq", &[c, -su2::printed_hq()], p, t.operator)?);
            Ok(v)
        }),
        job("primed literal", "printed shift on g in the primed table", Discrepancy, |p, t| {
            let gs = su2::build_primed_generators(false);
            let reps = relations(su2::algebra_relations(&gs), "", p, t.operator)?;
            Ok(vec![ladders2d::worst("primed literal shift, algebra", reps, t.operator)])
        }),
        job("shape invariance", "shape invariance of the reduced generators", Identity, |p, t| {
            relations(su2::shape_invariance_relations(), "shape ", p, t.operator)
        }),
        job("exchange printed", "lowering exchange relation as printed", Discrepancy, |p, t| {
            Ok(vec![op_identity("Lm(q) Rm(q-1) = Rm(q) Lm(q-1)", &su2::lowering_exchange(-1), p, t.operator)?])
        }),
    ];

    for twol in (0..=cfg.twol_max).filter(|t| cfg.half_integer || t % 2 == 0) {
        jobs.push(job(format!("eigen2d {twol}"), "eigenfunctions of L2_q and H_q", Identity, move |p, t| {
            let mp = Multiplet::build(twol)?;
            let reps = ladders2d::eigen_reports(&mp, p, t.eigen)?;
            let mut v = vec![ladders2d::worst(&format!("eigen2d 2l={twol}"), reps, t.eigen)];
            let mut bad = Vec::new();
            for q in -twol..=twol {
                let d = ladders2d::degeneracy(twol, q);
                if d != ladders2d::degeneracy_brute(twol, q) || d.len() as i64 != twol + 1 - q.abs() {
                    bad.push(q);
                }
            }
            v.push(exact(&format!("degeneracy 2l={twol}"), 0.0).failing_if(!bad.is_empty(), format!("q values {bad:?}")));
            Ok(v)
        }));
        jobs.push(job(format!("ladders2d {twol}"), "2-D ladder coefficients", Identity, move |p, t| {
            let mp = Multiplet::build(twol)?;
            let reps = ladders2d::ladder_action_reports(&mp, p, t.eigen, &ladders2d::form_coeff(CoeffForm::Corrected))?;
            let mut v = vec![ladders2d::worst(&format!("ladder actions 2l={twol}"), reps, t.eigen)];
            let sh = ladders2d::shape_reports(&mp, p, t.eigen)?;
            v.push(ladders2d::worst(&format!("Y and X chains 2l={twol}"), sh, t.eigen));
            let bad = ladders2d::n_grid_mismatches(twol)?;
            v.push(exact(&format!("N product = closed form 2l={twol}"), 0.0).failing_if(!bad.is_empty(), bad.join("; ")));
            Ok(v)
        }));
        if twol >= 1 {
            jobs.push(job(format!("ladders2d printed {twol}"), "2-D ladder coefficients as printed", Discrepancy, move |p, t| {
                let mp = Multiplet::build(twol)?;
                let reps = ladders2d::ladder_action_reports(&mp, p, t.eigen, &ladders2d::form_coeff(CoeffForm::Printed))?;
                Ok(vec![ladders2d::worst(&format!("printed A coefficients 2l={twol}"), reps, t.eigen)])
            }));
        }
    }
    jobs
}

fn oscillator_jobs(cfg: &SuiteConfig) -> Vec<Job> {
    use CheckKind::*;
    let mut jobs = vec![
        job("osc canonical", "four-oscillator ladder operators", Identity, |p, t| {
            let mut v = relations(osc3d::canonical_relations_full(Form::Corrected), "canonical ", p, t.operator)?;
            for o in Osc::ALL {
                v.push(op_identity(
                    &format!("cartesian {o} = radial form"),
                    &[osc3d::cartesian_big(o), -osc3d::full(o, Form::Corrected)],
                    p,
                    t.operator,
                )?);
            }
            Ok(v)
        }),
        job("osc factorization", "factorization of H_m", Identity, |p, t| {
            let mut v = vec![osc3d::verify_factorization(p, t.operator, Form::Corrected, 2)?];
            v.extend(osc3d::verify_intertwining(p, t.operator, Form::Corrected)?);
            let sim = su2::conjugate(&osc3d::hm(), &crate::symx::vars::r().sqrt());
            v.push(op_identity("r^1/2 similarity of H_m", &[sim, -osc3d::hm_similarity_printed()], p, t.operator)?);
            Ok(v)
        }),
        job("osc reduction", "Fourier reduction of the four-oscillator Hamiltonian", Identity, |_, t| {
            let (d, _) = osc3d::h4_reduction_diff(Form::Corrected)?;
            Ok(vec![exact("H4 reduction = H_m", t.operator).failing_if(!d.is_zero(), "operators differ".into())])
        }),
        job("osc reduction printed", "angular prefactor of the four-oscillator Hamiltonian", Discrepancy, |p, t| {
            let (d, names) = osc3d::h4_reduction_diff(Form::Printed)?;
            let r = op_identity("printed H4 reduction = H_m", &[d], p, t.operator)?;
            Ok(vec![r.with_note(format!("{} differing terms", names.len()))])
        }),
    ];

    for n in 0..=cfg.n_max {
        let n_max = cfg.n_max;
        jobs.push(job(format!("eigen3d {n}"), "closed-form oscillator eigenfunctions", Identity, move |p, t| {
            let mut reps = Vec::new();
            for qn in QNum3D::grid(n_max).into_iter().filter(|s| s.n == n) {
                for w in [1.0, 2.0] {
                    reps.push(osc3d::eigen_report(qn, w, HermiteArgs::Scaled, p, t.eigen)?);
                }
            }
            Ok(vec![ladders2d::worst(&format!("H(m) Psi = E Psi, n={n}"), reps, t.eigen)])
        }));
    }
    for n in 0..=cfg.ladder_n_max {
        jobs.push(job(format!("ladder3d {n}"), "ladder construction of the oscillator states", Identity, move |p, t| {
            let mut lad = Vec::new();
            let mut act = Vec::new();
            for mv in (-n..=n).step_by(2) {
                for (a, b) in [(0, 0), (1, 0), (0, 1)] {
                    let qn = QNum3D::new(n, mv, a, b)?;
                    let l = osc3d::psi_ladder(qn)?;
                    let c = osc3d::psi_closed(qn, HermiteArgs::Scaled, true)?;
                    lad.push(verify::check_ratio(&format!("ladder = closed {qn}"), &l, &c, 1.0.into(), p, t.eigen)?);
                    act.extend(osc3d::ladder_action_reports(qn, p, t.eigen)?);
                    act.extend(osc3d::shape_report(qn, p, t.eigen)?);
                }
            }
            Ok(vec![
                ladders2d::worst(&format!("ladder Psi = closed Psi, n={n}"), lad, t.eigen),
                ladders2d::worst(&format!("oscillator actions and A+A- = E, n={n}"), act, t.eigen),
            ])
        }));
    }
    jobs
}

/// A report for a structural (exact) comparison.
fn exact(name: &str, tol: f64) -> IdentityReport {
    IdentityReport {
        name: name.into(),
        max_abs: 0.0,
        scale: 0.0,
        relative: 0.0,
        tolerance: tol,
        pass: true,
        worst_point: Vec::new(),
        points: 0,
        skipped: 0,
        measured: None,
        notes: vec!["exact".into()],
    }
}

trait Failing {
    fn failing_if(self, cond: bool, note: String) -> Self;
}

impl Failing for IdentityReport {
    fn failing_if(mut self, cond: bool, note: String) -> Self {
        if cond {
            self.pass = false;
            self.relative = f64::INFINITY;
            self.notes.push(note);
        }
        self
    }
}

impl SamplePlan {
    fn with_count_at_least(&self, n: usize) -> SamplePlan {
        let mut p = self.clone();
        p.count = p.count.max(n);
        p
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let plan = SamplePlan::new(cfg.seed, cfg.points.max(1));
    let tol = cfg.tolerances;
    let jobs = registry(cfg);
    let mut checks: Vec<CheckResult> = jobs
        .par_iter()
        .map(|j| match (j.run)(&plan, &tol) {
            Ok(reps) => reps.into_iter().map(|r| from_report(r, j.kind, j.reference)).collect(),
            Err(e) => vec![CheckResult {
                name: j.label.clone(),
                kind: j.kind,
                reference: j.reference.into(),
                pass: false,
                relative_residual: None,
                notes: vec![format!("error: {e}")],
            }],
        })
        .collect::<Vec<Vec<_>>>()
        .into_iter()
        .flatten()
        .collect();

    if cfg.faults {
        let outcomes: Vec<_> = Fault::ALL.par_iter().map(|&f| faults::run_fault(f, &plan, &tol)).collect();
        checks.extend(outcomes.into_iter().map(|o| CheckResult {
            name: format!("fault {}: {}", o.fault.id(), o.fault.description()),
            kind: CheckKind::Fault,
            reference: "negative control".into(),
            pass: o.detected,
            relative_residual: finite(o.worst_relative),
            notes: o.notes,
        }));
    }

    let passed = checks.iter().filter(|c| c.pass).count();
    let fault_checks: Vec<_> = checks.iter().filter(|c| c.kind == CheckKind::Fault).collect();
    let summary = SuiteSummary {
        passed,
        failed: checks.len() - passed,
        total: checks.len(),
        faults_registered: fault_checks.len(),
        faults_detected: fault_checks.iter().filter(|c| c.pass).count(),
    };
    SuiteReport {
        suite: "shapeinv".into(),
        seed: cfg.seed,
        tolerances: tol,
        config: cfg.clone(),
        checks,
        summary,
    }
}
