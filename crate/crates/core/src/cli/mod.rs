//! The `shapeinv` command line. Exit status: 0 all checks pass, 1 a check
//! failed, 2 usage or parse error.

pub mod dsl;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ladders2d::{self, CoeffForm, CoeffKind, Multiplet, QNum2D};
use crate::opalg::DiffOp;
use crate::osc3d::{self, HermiteArgs, QNum3D};
use crate::su2;
use crate::verify::{self, IdentityReport, SamplePlan, Scope, SuiteConfig, Tolerances};

pub use dsl::{parse_op_expr, OpAst};

const AFTER_HELP: &str = "\
Operator expressions (check, dump):
  expr := term (('+'|'-') term)*     term := unary ('*' unary)*
  unary := '-' unary | atom          atom := number | name['(' int ')'] | '[' expr ',' expr ']' | '(' expr ')'
Names: Lp Lm L3 Rp Rm R3 A1 A1d A2 A2d a3 a3d a4 a4d Casimir Hq Hm H4.
An integer argument fixes the charge: Lm(3) acts on charge 3, A1(0) on m = 0.

Exit status: 0 all checks pass, 1 a check failed, 2 usage or parse error.";

#[derive(Parser, Debug)]
#[command(name = "shapeinv", version, about = "Shape-invariant Hamiltonians from su(2) and four oscillators", after_help = AFTER_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Sample-plan seed
    #[arg(long, env = "SHAPEINV_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Sample points per check
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Relative tolerance override
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the output here instead of stdout
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that an operator expression vanishes
    Check {
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run the full verification suite
    Suite {
        #[arg(long, default_value_t = 6)]
        twol_max: i64,
        #[arg(long, default_value_t = 4)]
        n_max: i64,
        /// Skip the fault-injection controls
        #[arg(long)]
        no_faults: bool,
        /// Only integer l in the 2-D sweeps
        #[arg(long)]
        integer_l: bool,
        #[command(flatten)]
        common: Common,
    },
    /// One 2-D eigenfunction and its eigen-equations
    Eigen2d {
        #[arg(long)]
        twol: i64,
        #[arg(long)]
        q: i64,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        integer_l: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Ladder coefficients and chain checks over one multiplet
    Shape2d {
        #[arg(long)]
        twol: i64,
        #[arg(long)]
        integer_l: bool,
        #[command(flatten)]
        common: Common,
    },
    /// One oscillator eigenfunction, or the oscillator part of the suite
    Osc3d {
        #[arg(long, required_unless_present = "suite")]
        n: Option<i64>,
        #[arg(long, required_unless_present = "suite")]
        m: Option<i64>,
        #[arg(long, default_value_t = 0)]
        n3: i64,
        #[arg(long, default_value_t = 0)]
        n4: i64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long)]
        suite: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Print a named operator or an operator expression
    Dump {
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

struct Output {
    text: String,
    json: Value,
    pass: bool,
}

/// Runs the command line and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let msg = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(msg.as_bytes()) } else { stderr.write_all(msg.as_bytes()) };
            return code;
        }
    };
    let (common, default_format) = match &cli.command {
        Command::Shape2d { common, .. } => (common.clone(), Format::Json),
        Command::Check { common, .. }
        | Command::Suite { common, .. }
        | Command::Eigen2d { common, .. }
        | Command::Osc3d { common, .. }
        | Command::Dump { common, .. } => (common.clone(), Format::Text),
    };
    let res = execute(&cli.command, &common);
    match res {
        Ok(o) => {
            let body = match common.format.unwrap_or(default_format) {
                Format::Text => o.text,
                Format::Json => serde_json::to_string_pretty(&o.json).expect("json") + "\n",
            };
            let written = match &common.out {
                Some(p) => std::fs::write(p, body).map_err(|e| e.to_string()),
                None => stdout.write_all(body.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return 2;
            }
            if o.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Syntax { .. }
                | Error::UnknownGenerator { .. }
                | Error::Arity(_)
                | Error::OutOfRange(_)
                | Error::Io(_) => 2,
                _ => 1,
            }
        }
    }
}

fn plan(c: &Common) -> SamplePlan {
    SamplePlan::new(c.seed, c.points.max(1))
}

fn tolerances(c: &Common) -> Tolerances {
    let mut t = Tolerances::default();
    if let Some(x) = c.tol {
        t.operator = x;
        t.casimir = x;
        t.eigen = x;
    }
    t
}

fn report_line(r: &IdentityReport) -> String {
    let mut s = format!(
        "{} {} rel={:.3e} tol={:.1e} points={} skipped={}",
        if r.pass { "PASS" } else { "FAIL" },
        r.name,
        r.relative,
        r.tolerance,
        r.points,
        r.skipped
    );
    if let Some([c, d]) = r.measured {
        s.push_str(&format!(" measured={c:.12} dispersion={d:.2e}"));
    }
    if !r.notes.is_empty() {
        s.push_str(&format!(" ({})", r.notes.join("; ")));
    }
    s.push('\n');
    s
}

fn report_json(r: &IdentityReport) -> Value {
    let mut v = serde_json::to_value(r).expect("report");
    // non-finite numbers have no JSON form
    if let Value::Object(m) = &mut v {
        for k in ["max_abs", "scale", "relative"] {
            if m.get(k).is_some_and(Value::is_null) {
                m.insert(k.into(), Value::String("inf".into()));
            }
        }
    }
    v
}

fn reports_output(head: String, mut json: Value, reps: &[IdentityReport]) -> Output {
    let mut text = head;
    for r in reps {
        text.push_str(&report_line(r));
    }
    let pass = reps.iter().all(|r| r.pass);
    json["reports"] = Value::Array(reps.iter().map(report_json).collect());
    json["pass"] = json!(pass);
    Output { text, json, pass }
}

fn check_l(twol: i64, integer_l: bool) -> Result<()> {
    if integer_l && twol % 2 != 0 {
        return Err(Error::OutOfRange(format!("2l={twol} is odd but --integer-l was given")));
    }
    Ok(())
}

fn execute(cmd: &Command, c: &Common) -> Result<Output> {
    let tol = tolerances(c);
    match cmd {
        Command::Check { expr, .. } => {
            let ast = parse_op_expr(expr)?;
            let pieces = ast.pieces()?;
            let r = verify::op_identity(&ast.to_string(), &pieces, &plan(c), tol.operator)?;
            Ok(reports_output(String::new(), json!({ "expr": ast.to_string() }), &[r]))
        }
        Command::Suite {
            twol_max,
            n_max,
            no_faults,
            integer_l,
            ..
        } => {
            let cfg = SuiteConfig {
                seed: c.seed,
                points: c.points.max(1),
                twol_max: *twol_max,
                n_max: *n_max,
                ladder_n_max: (*n_max).min(3),
                half_integer: !integer_l,
                scope: Scope::All,
                tolerances: tol,
                faults: !no_faults,
            };
            Ok(suite_output(&cfg))
        }
        Command::Eigen2d { twol, q, m, integer_l, .. } => {
            check_l(*twol, *integer_l)?;
            let qn = QNum2D::new(*twol, *q, *m)?;
            let chi = ladders2d::chi_reduced(qn)?;
            let ct = ladders2d::chi_tilde(qn)?;
            let reps = ladders2d::state_eigen_reports(qn, &chi, &plan(c), tol.eigen)?;
            let l = qn.eigenvalue();
            let head = format!("state {qn}\nl(l+1) = {l}\nchi = {chi}\nchi~ = {ct}\n");
            let json = json!({
                "state": qn,
                "eigenvalue": l.to_string(),
                "chi": chi.to_string(),
                "chi_tilde": ct.to_string(),
            });
            Ok(reports_output(head, json, &reps))
        }
        Command::Shape2d { twol, integer_l, .. } => {
            check_l(*twol, *integer_l)?;
            if *twol < 0 {
                return Err(Error::OutOfRange(format!("2l={twol} must be >= 0")));
            }
            shape2d(*twol, &plan(c), &tol)
        }
        Command::Osc3d {
            n,
            m,
            n3,
            n4,
            omega,
            suite,
            ..
        } => {
            if !(*omega > 0.0) {
                return Err(Error::OutOfRange(format!("omega={omega} must be positive")));
            }
            if *suite {
                let cfg = SuiteConfig {
                    seed: c.seed,
                    points: c.points.max(1),
                    scope: Scope::Oscillator,
                    tolerances: tol,
                    faults: false,
                    ..SuiteConfig::default()
                };
                return Ok(suite_output(&cfg));
            }
            let qn = QNum3D::new(n.unwrap_or(0), m.unwrap_or(0), *n3, *n4)?;
            osc3d_state(qn, *omega, &plan(c), &tol)
        }
        Command::Dump { name, .. } => dump(name),
    }
}

fn suite_output(cfg: &SuiteConfig) -> Output {
    let r = verify::run_suite(cfg);
    Output {
        text: r.render_text(),
        json: serde_json::to_value(&r).expect("report"),
        pass: r.all_pass(),
    }
}

fn shape2d(twol: i64, plan: &SamplePlan, tol: &Tolerances) -> Result<Output> {
    let mp = Multiplet::build(twol)?;
    let mut states = Vec::new();
    for qn in mp.states() {
        let mut coeffs = serde_json::Map::new();
        for kind in CoeffKind::ALL {
            for form in [CoeffForm::Corrected, CoeffForm::Printed] {
                let v = ladders2d::coeff(kind, qn, form).map(|c| c.value);
                coeffs.insert(
                    format!("{kind:?}_{form:?}").to_lowercase(),
                    v.map_or_else(|e| json!({ "error": e.to_string() }), |x| json!(x)),
                );
            }
        }
        let (t, q, m) = (qn.twol, qn.q, qn.m);
        let e = QNum2D::is_valid(t, q, m + 2)
            .then(|| ladders2d::e_value(t, q, m, CoeffForm::Corrected).ok())
            .flatten();
        let n = QNum2D::is_valid(t, q + 2, m).then(|| {
            json!({
                "product": ladders2d::n_product(t, q, m, CoeffForm::Corrected).ok(),
                "closed": ladders2d::n_closed_corrected(t, q, m).to_complex().re,
                "printed_closed": ladders2d::n_closed_printed(t, q, m),
            })
        });
        states.push(json!({ "state": qn, "coefficients": coeffs, "E": e, "N": n }));
    }
    let degeneracy: Vec<Value> = (-twol..=twol)
        .map(|q| {
            json!({
                "q": q,
                "m": ladders2d::degeneracy(twol, q),
                "brute_force": ladders2d::degeneracy_brute(twol, q),
                "prose": ladders2d::degeneracy_prose(twol, q),
            })
        })
        .collect();
    let mut reps = vec![
        ladders2d::verify_ladder_actions(twol, plan, tol.eigen, CoeffForm::Corrected)?,
        ladders2d::worst(
            &format!("Y and X chains 2l={twol}"),
            ladders2d::shape_reports(&mp, plan, tol.eigen)?,
            tol.eigen,
        ),
    ];
    let printed = ladders2d::verify_ladder_actions(twol, plan, tol.eigen, CoeffForm::Printed)?;
    let bad = ladders2d::n_grid_mismatches(twol)?;
    if !bad.is_empty() {
        let mut r = reps[0].clone().renamed(format!("N product = closed form 2l={twol}"));
        r.pass = false;
        r.notes = bad;
        reps.push(r);
    }
    let head = format!("multiplet 2l={twol}: {} states\n", mp.states().count());
    let mut out = reports_output(
        head,
        json!({ "twol": twol, "states": states, "degeneracy": degeneracy }),
        &reps,
    );
    out.text.push_str(&format!(
        "printed A coefficients: {} (recorded discrepancy, not counted)\n",
        if printed.pass { "hold" } else { "fail" }
    ));
    out.json["printed_coefficients"] = report_json(&printed);
    Ok(out)
}

fn osc3d_state(qn: QNum3D, omega: f64, plan: &SamplePlan, tol: &Tolerances) -> Result<Output> {
    let closed = osc3d::psi_closed(qn, HermiteArgs::Scaled, true)?;
    let ladder = osc3d::psi_ladder(qn)?;
    let e = osc3d::spectrum(qn, omega);
    let fixed = plan.clone().with_param(crate::symx::Symbol::Omega, omega);
    let mut reps = vec![
        osc3d::eigen_report(qn, omega, HermiteArgs::Scaled, plan, tol.eigen)?,
        verify::check_ratio(&format!("ladder = closed {qn}"), &ladder, &closed, 1.0.into(), &fixed, tol.eigen)?,
    ];
    reps.extend(osc3d::ladder_action_reports(qn, &fixed, tol.eigen)?);
    reps.extend(osc3d::shape_report(qn, &fixed, tol.eigen)?);
    let head = format!("state {qn} omega={omega}\nE = {e}\nPsi (closed) = {closed}\nPsi (ladder) = {ladder}\n");
    let json = json!({
        "state": qn,
        "omega": omega,
        "energy": e,
        "psi_closed": closed.to_string(),
        "psi_ladder": ladder.to_string(),
    });
    Ok(reports_output(head, json, &reps))
}

fn op_json(op: &DiffOp) -> Value {
    Value::Array(
        op.terms()
            .iter()
            .map(|t| json!({ "coeff": t.coeff.to_string(), "derivs": t.derivs, "shift": t.shift }))
            .collect(),
    )
}

fn dump(name: &str) -> Result<Output> {
    let named = |n: &str| -> Option<DiffOp> {
        Some(match n {
            "L+" => su2::raw(su2::Gen::Lp),
            "L-" => su2::raw(su2::Gen::Lm),
            "R+" => su2::raw(su2::Gen::Rp),
            "R-" => su2::raw(su2::Gen::Rm),
            "casimir" => su2::casimir(&su2::build_raw_generators(), su2::Side::Left),
            "Hq-printed" => su2::printed_hq(),
            "Hq-derived" => su2::build_hq().derived,
            _ => return None,
        })
    };
    if name == "Hq" {
        let b = su2::build_hq();
        let note = if b.difference.is_zero() {
            "derived and printed H_q are identical operators".to_string()
        } else {
            format!("derived - printed:\n{}", b.difference)
        };
        return Ok(Output {
            text: format!("Hq (printed):\n{}\n\nHq (derived):\n{}\n\n{note}\n", b.printed, b.derived),
            json: json!({
                "name": "Hq",
                "printed": op_json(&b.printed),
                "derived": op_json(&b.derived),
                "difference": op_json(&b.difference),
                "note": note,
            }),
            pass: true,
        });
    }
    let (label, op) = match named(name) {
        Some(op) => (name.to_string(), op),
        None => {
            let ast = parse_op_expr(name)?;
            (ast.to_string(), ast.build()?)
        }
    };
    Ok(Output {
        text: format!("{label}:\n{op}\n"),
        json: json!({ "name": label, "terms": op_json(&op) }),
        pass: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let mut a = vec!["shapeinv"];
        a.extend_from_slice(args);
        let code = run(a, &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn check_exit_codes() {
        assert_eq!(run_str(&["check", "[Lp,Lm]-2*L3"]).0, 0);
        assert_eq!(run_str(&["check", "[L3,Rp]"]).0, 0);
        assert_eq!(run_str(&["check", "Lp-Rp"]).0, 1);
        let (c, _, err) = run_str(&["check", "Foo(1)"]);
        assert_eq!(c, 2);
        assert!(err.contains("unknown generator Foo"));
        assert_eq!(run_str(&["check", "[Lp,"]).0, 2);
        assert_eq!(run_str(&["frobnicate"]).0, 2);
    }

    #[test]
    fn eigen2d_and_validation() {
        let (c, out, _) = run_str(&["eigen2d", "--twol", "2", "--q", "0", "--m", "0"]);
        assert_eq!(c, 0, "{out}");
        assert!(out.contains("chi = "));
        let (c, _, err) = run_str(&["eigen2d", "--twol", "2", "--q", "2", "--m", "2"]);
        assert_eq!(c, 2);
        assert!(err.contains("quantum numbers out of range"));
        assert_eq!(run_str(&["eigen2d", "--twol", "1", "--q", "1", "--m", "0", "--integer-l"]).0, 2);
        assert_eq!(run_str(&["osc3d", "--n", "1", "--m", "0"]).0, 2);
    }

    #[test]
    fn dump_hq_json() {
        let (c, out, _) = run_str(&["dump", "Hq", "--format", "json"]);
        assert_eq!(c, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v["printed"].is_array() && v["derived"].is_array());
        assert!(v["note"].as_str().unwrap().contains("identical"));
    }
}
