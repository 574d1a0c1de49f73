//! Numerical identity checking on seeded sample plans.

mod battery;
pub mod faults;
pub mod suite;

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{derivative, Derivs, DiffOp};
use crate::symx::{Binding, Compiled, Expr, Symbol};

pub use battery::battery;
pub use suite::{run_suite, CheckKind, CheckResult, Scope, SuiteConfig, SuiteReport, SuiteSummary};

/// Tolerance classes, all relative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub operator: f64,
    pub casimir: f64,
    pub eigen: f64,
    pub finite_difference: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            operator: 1e-10,
            casimir: 1e-12,
            eigen: 1e-8,
            finite_difference: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ParamSpec {
    Fixed(f64),
    Uniform(f64, f64),
}

/// Seeded sample plan. Every symbol is bound at every point: coordinates
/// from their boxes, parameters from `params`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub seed: u64,
    pub count: usize,
    pub specs: BTreeMap<Symbol, ParamSpec>,
}

const MAX_SKIP_FRACTION: f64 = 0.2;
const MIN_VALID_FRACTION: f64 = 0.8;

impl SamplePlan {
    pub fn new(seed: u64, count: usize) -> Self {
        use ParamSpec::*;
        let margin = 0.3;
        let specs = BTreeMap::from([
            (Symbol::Theta, Uniform(margin, PI - margin)),
            (Symbol::Psi, Uniform(margin, PI - margin)),
            (Symbol::Phi, Uniform(0.0, 2.0 * PI)),
            (Symbol::R, Uniform(0.4, 2.5)),
            (Symbol::X, Uniform(-1.5, 1.5)),
            (Symbol::Q, Uniform(-3.0, 3.0)),
            (Symbol::M, Uniform(-3.0, 3.0)),
            (Symbol::Omega, Uniform(0.5, 2.5)),
            (Symbol::N, Uniform(0.0, 4.0)),
            (Symbol::N3, Uniform(0.0, 3.0)),
            (Symbol::N4, Uniform(0.0, 3.0)),
            (Symbol::TwoL, Uniform(0.0, 4.0)),
        ]);
        SamplePlan { seed, count, specs }
    }

    pub fn with_param(mut self, s: Symbol, v: f64) -> Self {
        self.specs.insert(s, ParamSpec::Fixed(v));
        self
    }

    pub fn with_range(mut self, s: Symbol, lo: f64, hi: f64) -> Self {
        self.specs.insert(s, ParamSpec::Uniform(lo, hi));
        self
    }

    /// Same plan, different stream.
    pub fn reseeded(&self, salt: u64) -> Self {
        let mut p = self.clone();
        p.seed = self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt);
        p
    }

    pub fn points(&self) -> Vec<Binding> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count)
            .map(|_| {
                let mut b = Binding::new();
                for (&s, spec) in &self.specs {
                    let v = match *spec {
                        ParamSpec::Fixed(v) => v,
                        ParamSpec::Uniform(lo, hi) => rng.gen_range(lo..hi),
                    };
                    b.set(s, v);
                }
                b
            })
            .collect()
    }
}

/// Outcome of one numeric comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub max_abs: f64,
    pub scale: f64,
    pub relative: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_point: Vec<(String, f64)>,
    pub points: usize,
    pub skipped: usize,
    /// Measured constant, for proportionality and ratio checks.
    pub measured: Option<[f64; 2]>,
    pub notes: Vec<String>,
}

impl IdentityReport {
    fn finish(
        name: &str,
        max_abs: f64,
        scale: f64,
        tol: f64,
        worst: Option<&Binding>,
        points: usize,
        skipped: usize,
    ) -> Self {
        let relative = if scale > 0.0 {
            max_abs / scale
        } else if max_abs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        IdentityReport {
            name: name.to_string(),
            max_abs,
            scale,
            relative,
            tolerance: tol,
            pass: relative.is_finite() && relative <= tol,
            worst_point: worst
                .map(|b| {
                    b.entries()
                        .into_iter()
                        .map(|(s, v)| (s.name().to_string(), v))
                        .collect()
                })
                .unwrap_or_default(),
            points,
            skipped,
            measured: None,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    pub fn renamed(mut self, n: impl Into<String>) -> Self {
        self.name = n.into();
        self
    }
}

/// Walks the plan with a per-point `(residual, scale)` function.
/// Singular points are skipped; too many skips is an error.
fn scan<F>(name: &str, plan: &SamplePlan, tol: f64, mut f: F) -> Result<IdentityReport>
where
    F: FnMut(&Binding) -> Result<(f64, f64)>,
{
    let pts = plan.points();
    let mut max_abs = 0.0f64;
    let mut scale = 0.0f64;
    let mut worst: Option<usize> = None;
    let mut skipped = 0;
    for (i, p) in pts.iter().enumerate() {
        match f(p) {
            Ok((res, sc)) => {
                if worst.is_none() || res > max_abs || res.is_nan() {
                    max_abs = if res.is_nan() { f64::INFINITY } else { res.max(max_abs) };
                    worst = Some(i);
                }
                scale = scale.max(sc);
            }
            Err(Error::Singular) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    check_skips(skipped, pts.len())?;
    Ok(IdentityReport::finish(
        name,
        max_abs,
        scale,
        tol,
        worst.map(|i| &pts[i]),
        pts.len(),
        skipped,
    ))
}

fn check_skips(skipped: usize, total: usize) -> Result<()> {
    if total == 0 || skipped as f64 > MAX_SKIP_FRACTION * total as f64 {
        return Err(Error::PlanDegenerate { skipped, total });
    }
    Ok(())
}

fn eval_all(cs: &[Compiled], b: &Binding) -> Result<Vec<Complex64>> {
    cs.iter().map(|c| c.eval(b)).collect()
}

/// `Σ pieces = 0`, relative to the largest piece magnitude.
pub fn check_zero(name: &str, pieces: &[Expr], plan: &SamplePlan, tol: f64) -> Result<IdentityReport> {
    let cs: Vec<Compiled> = pieces.iter().map(Expr::compile).collect();
    scan(name, plan, tol, |b| {
        let v = eval_all(&cs, b)?;
        let s: Complex64 = v.iter().sum();
        let sc = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok((s.norm(), sc))
    })
}

/// `a = b` pointwise.
pub fn check_equal(name: &str, a: &Expr, b: &Expr, plan: &SamplePlan, tol: f64) -> Result<IdentityReport> {
    check_zero(name, &[a.clone(), -b], plan, tol)
}

/// `f = c · g` for a given constant `c`.
pub fn check_ratio(
    name: &str,
    f: &Expr,
    g: &Expr,
    c: Complex64,
    plan: &SamplePlan,
    tol: f64,
) -> Result<IdentityReport> {
    let (cf, cg) = (f.compile(), g.compile());
    let mut r = scan(name, plan, tol, |b| {
        let (fv, gv) = (cf.eval(b)?, cg.eval(b)?);
        // a vanishing ratio is measured against g itself
        let gs = if c == Complex64::new(0.0, 0.0) { gv.norm() } else { (c * gv).norm() };
        Ok(((fv - c * gv).norm(), fv.norm().max(gs)))
    })?;
    r.measured = Some([c.re, c.im]);
    Ok(r)
}

/// `f = λ g` for some constant `λ`, which is measured. The residual is the
/// spread of the pointwise ratio relative to its mean.
pub fn check_proportional(name: &str, f: &Expr, g: &Expr, plan: &SamplePlan, tol: f64) -> Result<IdentityReport> {
    ratio_check(name, f, g, plan, tol, 0.0)
}

/// `f = c · g` for a constant `c` that may vanish, e.g. an additive
/// operator offset measured on a test function. The spread of the ratio is
/// taken relative to `max(|c|, 1)`.
pub fn check_constant(name: &str, f: &Expr, g: &Expr, plan: &SamplePlan, tol: f64) -> Result<IdentityReport> {
    ratio_check(name, f, g, plan, tol, 1.0)
}

fn ratio_check(name: &str, f: &Expr, g: &Expr, plan: &SamplePlan, tol: f64, floor: f64) -> Result<IdentityReport> {
    let (cf, cg) = (f.compile(), g.compile());
    let pts = plan.points();
    let mut vals = Vec::new();
    let mut skipped = 0;
    for (i, p) in pts.iter().enumerate() {
        match (cf.eval(p), cg.eval(p)) {
            (Ok(a), Ok(b)) => vals.push((i, a, b)),
            (Err(Error::Singular), _) | (_, Err(Error::Singular)) => skipped += 1,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    check_skips(skipped, pts.len())?;
    let gmax = vals.iter().map(|v| v.2.norm()).fold(0.0, f64::max);
    if gmax == 0.0 {
        return Err(Error::ProportionalityUndefined(format!("{name}: reference vanishes")));
    }
    let ratios: Vec<(usize, Complex64)> = vals
        .iter()
        .filter(|v| v.2.norm() > 1e-8 * gmax)
        .map(|v| (v.0, v.1 / v.2))
        .collect();
    if (ratios.len() as f64) < MIN_VALID_FRACTION * pts.len() as f64 {
        return Err(Error::ProportionalityUndefined(format!(
            "{name}: only {} of {} points usable",
            ratios.len(),
            pts.len()
        )));
    }
    let n = ratios.len() as f64;
    let mean: Complex64 = ratios.iter().map(|r| r.1).sum::<Complex64>() / n;
    let sd = (ratios.iter().map(|r| (r.1 - mean).norm_sqr()).sum::<f64>() / n).sqrt();
    let worst = ratios
        .iter()
        .max_by(|a, b| (a.1 - mean).norm().total_cmp(&(b.1 - mean).norm()))
        .map(|r| &pts[r.0]);
    let mut rep = IdentityReport::finish(name, sd, mean.norm().max(floor), tol, worst, pts.len(), skipped);
    rep.measured = Some([mean.re, mean.im]);
    if mean.norm() == 0.0 && floor == 0.0 {
        rep.notes.push("ratio vanishes".into());
    }
    Ok(rep)
}

/// Numeric application of several operators to one function. Each
/// distinct `(derivs, shift)` derivative is built once.
struct Applied {
    coeffs: Vec<Vec<(Compiled, usize)>>,
    derivs: Vec<Compiled>,
}

impl Applied {
    fn new(pieces: &[DiffOp], f: &Expr) -> Self {
        let mut index: HashMap<(Derivs, i32), usize> = HashMap::new();
        let mut derivs = Vec::new();
        let mut cache: HashMap<(Derivs, i32), Expr> = HashMap::new();
        let mut coeffs = Vec::new();
        for op in pieces {
            let mut row = Vec::new();
            for t in op.terms() {
                let key = (t.derivs, t.shift);
                let idx = *index.entry(key).or_insert_with(|| {
                    let e = deriv_cached(&mut cache, f, t.derivs, t.shift);
                    derivs.push(e.compile());
                    derivs.len() - 1
                });
                row.push((t.coeff.compile(), idx));
            }
            coeffs.push(row);
        }
        Applied { coeffs, derivs }
    }

    fn eval(&self, b: &Binding) -> Result<Vec<Complex64>> {
        let dv = eval_all(&self.derivs, b)?;
        self.coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(c, i)| Ok(c.eval(b)? * dv[*i]))
                    .sum::<Result<Complex64>>()
            })
            .collect()
    }
}

fn deriv_cached(cache: &mut HashMap<(Derivs, i32), Expr>, f: &Expr, d: Derivs, k: i32) -> Expr {
    if let Some(e) = cache.get(&(d, k)) {
        return e.clone();
    }
    let e = match d.iter().position(|&n| n > 0) {
        None if k == 0 => f.expand(),
        None => f
            .substitute(Symbol::Q, &(Expr::sym(Symbol::Q) - Expr::int(k as i64)))
            .expand(),
        Some(i) => {
            let mut p = d;
            p[i] -= 1;
            let mut one = [0; 4];
            one[i] = 1;
            derivative(&deriv_cached(cache, f, p, k), one)
        }
    };
    cache.insert((d, k), e.clone());
    e
}

/// `Σ pieces = 0` as operators: applied to every battery function at every
/// plan point. The residual is relative per function; the worst function
/// is reported. Fails as inconclusive when every piece annihilates every
/// battery function.
pub fn op_identity(name: &str, pieces: &[DiffOp], plan: &SamplePlan, tol: f64) -> Result<IdentityReport> {
    op_identity_with(name, pieces, &battery(), plan, tol)
}

pub fn op_identity_with(
    name: &str,
    pieces: &[DiffOp],
    funcs: &[Expr],
    plan: &SamplePlan,
    tol: f64,
) -> Result<IdentityReport> {
    let mut best: Option<IdentityReport> = None;
    for (j, f) in funcs.iter().enumerate() {
        let ap = Applied::new(pieces, f);
        let r = scan(name, plan, tol, |b| {
            let v = ap.eval(b)?;
            let s: Complex64 = v.iter().sum();
            Ok((s.norm(), v.iter().map(|z| z.norm()).fold(0.0, f64::max)))
        })?;
        if r.scale == 0.0 {
            continue;
        }
        let r = r.with_note(format!("worst battery function #{j}"));
        if best.as_ref().map_or(true, |b| r.relative > b.relative || r.relative.is_nan()) {
            best = Some(r);
        }
    }
    let mut r = best.ok_or(Error::Inconclusive)?;
    r.notes.push(format!("battery of {} functions", funcs.len()));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symx::vars::*;

    #[test]
    fn plans_are_deterministic() {
        let p = SamplePlan::new(7, 5);
        assert_eq!(p.points(), p.points());
        assert_ne!(p.points(), SamplePlan::new(8, 5).points());
        let fixed = p.with_param(Symbol::Q, 1.5);
        assert!(fixed.points().iter().all(|b| b.get(Symbol::Q).unwrap().re == 1.5));
    }

    #[test]
    fn zero_check_and_tolerance_monotonicity() {
        let plan = SamplePlan::new(1, 32);
        let s2c2 = theta().sin().powi(2) + theta().cos().powi(2);
        let r = check_equal("pythagoras", &s2c2, &Expr::one(), &plan, 1e-12).unwrap();
        assert!(r.pass);
        let bumped = theta().sin() * Expr::ratio(1_000_001, 1_000_000);
        let off = check_equal("off", &bumped, &theta().sin(), &plan, 1e-12).unwrap();
        assert!(!off.pass);
        let loose = check_equal("off", &bumped, &theta().sin(), &plan, 1e-3).unwrap();
        assert!(loose.pass);
    }

    #[test]
    fn proportionality_measures_constant() {
        let plan = SamplePlan::new(3, 40);
        let g = theta().sin() * psi().cos();
        let f = &g * Expr::ratio(-3, 2);
        let r = check_proportional("prop", &f, &g, &plan, 1e-12).unwrap();
        assert!(r.pass);
        let [re, im] = r.measured.unwrap();
        assert!((re + 1.5).abs() < 1e-12 && im.abs() < 1e-12);
        assert!(check_proportional("bad", &f, &Expr::zero(), &plan, 1e-12).is_err());
    }

    #[test]
    fn singular_plan_is_degenerate() {
        let plan = SamplePlan::new(3, 10).with_param(Symbol::Q, 0.0);
        let e = q().powi(-1);
        assert!(matches!(
            check_zero("sing", &[e], &plan, 1e-10),
            Err(Error::PlanDegenerate { .. })
        ));
    }

    #[test]
    fn operator_identity_and_inconclusive() {
        let plan = SamplePlan::new(5, 12);
        let d = DiffOp::d(Symbol::Theta);
        let r = op_identity("self", &[d.clone(), -&d], &plan, 1e-10).unwrap();
        assert!(r.pass && r.max_abs == 0.0);
        assert!(matches!(
            op_identity("zero", &[DiffOp::zero()], &plan, 1e-10),
            Err(Error::Inconclusive)
        ));
        let bad = op_identity("bad", &[d.clone()], &plan, 1e-10).unwrap();
        assert!(!bad.pass);
    }
}
