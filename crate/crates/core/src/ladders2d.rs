//! Eigenfunctions of `H_q(θ,ψ)` by lowering chains, the ladder
//! coefficients between them and the degeneracy structure.
//!
//! States are labelled by `(2l, q, m)` with `q = m_L - m_R` and
//! `m = m_L + m_R`. `χ` is the unnormalized chain state; `χ̂` divides out
//! the product of step coefficients so that every ladder action maps `χ̂`
//! to coefficient times `χ̂` with no extra phase.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::DiffOp;
use crate::su2::{self, Gen};
use crate::symx::vars::*;
use crate::symx::{Expr, Gq, Symbol};
use crate::verify::{self, IdentityReport, SamplePlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QNum2D {
    pub twol: i64,
    pub q: i64,
    pub m: i64,
}

impl QNum2D {
    pub fn is_valid(twol: i64, q: i64, m: i64) -> bool {
        twol >= 0
            && q.abs() <= twol
            && m.abs() <= twol - q.abs()
            && (twol - q.abs() - m).rem_euclid(2) == 0
    }

    pub fn new(twol: i64, q: i64, m: i64) -> Result<Self> {
        if Self::is_valid(twol, q, m) {
            Ok(QNum2D { twol, q, m })
        } else {
            Err(Error::OutOfRange(format!(
                "2l={twol}, q={q}, m={m} (need |q| <= 2l, |m| <= 2l-|q|, m = 2l-|q| mod 2)"
            )))
        }
    }

    /// `l(l+1)` as an exact rational.
    pub fn eigenvalue(&self) -> Gq {
        Gq::ratio(self.twol * (self.twol + 2), 4)
    }

    /// `(2 m_L, 2 m_R)`.
    pub fn doubled_lr(&self) -> (i64, i64) {
        (self.m + self.q, self.m - self.q)
    }

    /// All valid states of one multiplet, ordered by `(q, m)`.
    pub fn multiplet(twol: i64) -> Vec<QNum2D> {
        let mut v = Vec::new();
        for q in -twol..=twol {
            for m in degeneracy(twol, q) {
                v.push(QNum2D { twol, q, m });
            }
        }
        v
    }
}

impl fmt::Display for QNum2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(2l={}, q={}, m={})", self.twol, self.q, self.m)
    }
}

/// Allowed `m` for given `2l` and `q`, from the parity rule.
pub fn degeneracy(twol: i64, q: i64) -> Vec<i64> {
    if twol < 0 || q.abs() > twol {
        return Vec::new();
    }
    let top = twol - q.abs();
    (0..=top).map(|j| -top + 2 * j).collect()
}

/// The same list by enumerating `(m_L, m_R)` with `m_L - m_R = q`.
pub fn degeneracy_brute(twol: i64, q: i64) -> Vec<i64> {
    let mut v = Vec::new();
    for a in (-twol..=twol).step_by(2) {
        for b in (-twol..=twol).step_by(2) {
            if a - b == 2 * q {
                v.push((a + b) / 2);
            }
        }
    }
    v.sort_unstable();
    v
}

/// The even/odd-|q| prose list; only unambiguous for integer `l`.
pub fn degeneracy_prose(twol: i64, q: i64) -> Option<Vec<i64>> {
    if twol % 2 != 0 || q.abs() > twol {
        return None;
    }
    let top = twol - q.abs();
    let start = if q.abs() % 2 == 0 { 0 } else { 1 };
    let mut v: Vec<i64> = (start..=top).step_by(2).flat_map(|k| [k, -k]).collect();
    v.sort_unstable();
    v.dedup();
    Some(v)
}

pub fn highest_weight(twol: i64) -> Expr {
    (Expr::i() * Expr::int(twol) * phi()).exp() * seed(twol)
}

/// `(sinψ sinθ)^{2l}`, the highest weight on charge `2l`.
pub fn seed(twol: i64) -> Expr {
    (psi().sin() * theta().sin()).powi(twol)
}

pub fn lminus_of(p: i64) -> DiffOp {
    su2::param(Gen::Lm, &Expr::int(p))
}

pub fn rminus_of(p: i64) -> DiffOp {
    su2::param(Gen::Rm, &Expr::int(p))
}

/// `χ` by the printed chain `L₋(q+1)…L₋(k) R₋(k+1)…R₋(2l)` on the seed,
/// `k = l + (q-m)/2`.
pub fn chi_reduced(qn: QNum2D) -> Result<Expr> {
    let qn = QNum2D::new(qn.twol, qn.q, qn.m)?;
    let k = (qn.twol + qn.q - qn.m) / 2;
    let mut f = seed(qn.twol);
    for p in ((k + 1)..=qn.twol).rev() {
        f = rminus_of(p).apply(&f);
    }
    for p in ((qn.q + 1)..=k).rev() {
        f = lminus_of(p).apply(&f);
    }
    Ok(f)
}

pub fn chi_tilde(qn: QNum2D) -> Result<Expr> {
    Ok((su2::weight_combined() * chi_reduced(qn)?).expand())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoeffKind {
    APlus,
    AMinus,
    BPlus,
    BMinus,
}

impl CoeffKind {
    pub const ALL: [CoeffKind; 4] = [CoeffKind::APlus, CoeffKind::AMinus, CoeffKind::BPlus, CoeffKind::BMinus];

    /// The generator whose action this coefficient describes.
    pub fn generator(self) -> Gen {
        match self {
            CoeffKind::APlus => Gen::Rp,
            CoeffKind::AMinus => Gen::Rm,
            CoeffKind::BPlus => Gen::Lp,
            CoeffKind::BMinus => Gen::Lm,
        }
    }

    /// `(Δq, Δm)` of the move.
    pub fn step(self) -> (i64, i64) {
        match self {
            CoeffKind::APlus => (1, -1),
            CoeffKind::AMinus => (-1, 1),
            CoeffKind::BPlus => (1, 1),
            CoeffKind::BMinus => (-1, -1),
        }
    }

    fn sign(self) -> i64 {
        match self {
            CoeffKind::APlus | CoeffKind::BPlus => 1,
            CoeffKind::AMinus | CoeffKind::BMinus => -1,
        }
    }
}

/// Printed coefficients, or the ones with the sign of `m - q` in `A±`
/// flipped, which the measured actions follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoeffForm {
    Printed,
    Corrected,
}

/// `½ √(a b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderCoeff {
    pub kind: CoeffKind,
    pub at: QNum2D,
    pub form: CoeffForm,
    pub factors: (i64, i64),
    pub value: f64,
}

impl LadderCoeff {
    pub fn expr(&self) -> Expr {
        (Expr::int(self.factors.0 * self.factors.1).sqrt() * Expr::ratio(1, 2)).expand()
    }
}

pub fn coeff(kind: CoeffKind, at: QNum2D, form: CoeffForm) -> Result<LadderCoeff> {
    let at = QNum2D::new(at.twol, at.q, at.m)?;
    let s = kind.sign();
    let t = at.twol;
    let (a, b) = match kind {
        CoeffKind::APlus | CoeffKind::AMinus => {
            let d = at.m - at.q;
            match form {
                CoeffForm::Printed => (t - s * d, t + s * d + 2),
                CoeffForm::Corrected => (t + s * d, t - s * d + 2),
            }
        }
        CoeffKind::BPlus | CoeffKind::BMinus => {
            let d = at.m + at.q;
            (t - s * d, t + s * d + 2)
        }
    };
    if a * b < 0 {
        return Err(Error::InvalidLadderMove(format!("{kind:?} at {at}: radicand {a}*{b}")));
    }
    Ok(LadderCoeff {
        kind,
        at,
        form,
        factors: (a, b),
        value: 0.5 * ((a * b) as f64).sqrt(),
    })
}

pub fn coeff_a(sign: i32, qn: QNum2D, form: CoeffForm) -> Result<LadderCoeff> {
    coeff(if sign > 0 { CoeffKind::APlus } else { CoeffKind::AMinus }, qn, form)
}

pub fn coeff_b(sign: i32, qn: QNum2D, form: CoeffForm) -> Result<LadderCoeff> {
    coeff(if sign > 0 { CoeffKind::BPlus } else { CoeffKind::BMinus }, qn, form)
}

fn state(twol: i64, q: i64, m: i64) -> Result<QNum2D> {
    QNum2D::new(twol, q, m).map_err(|e| Error::InvalidLadderMove(e.to_string()))
}

fn cval(kind: CoeffKind, twol: i64, q: i64, m: i64, form: CoeffForm) -> Result<f64> {
    Ok(coeff(kind, state(twol, q, m)?, form)?.value)
}

/// Eigenvalue of `Y₋(q)Y₊(q)` on `χ_{q,m}`:
/// `A₋(q,m) A₊(q,m+2) B₋(q+1,m+1) B₊(q-1,m+1)`.
pub fn e_value(twol: i64, q: i64, m: i64, form: CoeffForm) -> Result<f64> {
    use CoeffKind::*;
    Ok(cval(AMinus, twol, q, m, form)?
        * cval(APlus, twol, q, m + 2, form)?
        * cval(BMinus, twol, q + 1, m + 1, form)?
        * cval(BPlus, twol, q - 1, m + 1, form)?)
}

/// `A₊(q,m) A₋(q+2,m) B₊(q+1,m-1) B₋(q+1,m+1)`.
pub fn n_product(twol: i64, q: i64, m: i64, form: CoeffForm) -> Result<f64> {
    use CoeffKind::*;
    Ok(cval(APlus, twol, q, m, form)?
        * cval(AMinus, twol, q + 2, m, form)?
        * cval(BPlus, twol, q + 1, m - 1, form)?
        * cval(BMinus, twol, q + 1, m + 1, form)?)
}

/// The printed closed form of `N(q,m)`.
pub fn n_closed_printed(twol: i64, q: i64, m: i64) -> f64 {
    let t = twol as f64;
    let (q, m) = (q as f64, m as f64);
    (t - m - q) * (t + m + q + 2.0) / 16.0
        * ((t - m + q) * (t - m + q + 4.0) * (t + m - q + 2.0) * (t + m - q - 2.0)).sqrt()
}

/// `N(q,m)` with the corrected `A±`, a rational.
pub fn n_closed_corrected(twol: i64, q: i64, m: i64) -> Gq {
    let t = twol;
    Gq::ratio((t - m - q) * (t + m + q + 2) * (t + m - q) * (t - m + q + 2), 16)
}

pub fn y_plus(q: i64) -> DiffOp {
    su2::param(Gen::Lp, &Expr::int(q - 1)) * su2::param(Gen::Rm, &Expr::int(q))
}

pub fn y_minus(q: i64) -> DiffOp {
    su2::param(Gen::Lm, &Expr::int(q + 1)) * su2::param(Gen::Rp, &Expr::int(q))
}

pub fn x_plus(q: i64) -> DiffOp {
    su2::param(Gen::Lp, &Expr::int(q + 1)) * su2::param(Gen::Rp, &Expr::int(q))
}

pub fn x_minus(q: i64) -> DiffOp {
    su2::param(Gen::Lm, &Expr::int(q + 1)) * su2::param(Gen::Rm, &Expr::int(q + 2))
}

/// All chain states of one multiplet, built incrementally: `R₋` steps from
/// the seed to `(k, 2l-k)`, then `L₋` steps.
#[derive(Clone, Debug)]
pub struct Multiplet {
    pub twol: i64,
    chi: BTreeMap<(i64, i64), Expr>,
    norm: BTreeMap<(i64, i64), Expr>,
}

impl Multiplet {
    pub fn build(twol: i64) -> Result<Self> {
        if twol < 0 {
            return Err(Error::OutOfRange(format!("2l={twol}")));
        }
        let mut chi = BTreeMap::new();
        let mut norm = BTreeMap::new();
        let mut top = seed(twol);
        let mut top_norm = Expr::one();
        for k in (0..=twol).rev() {
            if k < twol {
                let c = coeff(CoeffKind::AMinus, state(twol, k + 1, twol - k - 1)?, CoeffForm::Corrected)?;
                top = rminus_of(k + 1).apply(&top);
                top_norm = (top_norm * c.expr()).expand();
            }
            let (mut f, mut n) = (top.clone(), top_norm.clone());
            for s in 0..=twol {
                let (q, m) = (k - s, twol - k - s);
                if s > 0 {
                    let c = coeff(CoeffKind::BMinus, state(twol, q + 1, m + 1)?, CoeffForm::Corrected)?;
                    f = lminus_of(q + 1).apply(&f);
                    n = (n * c.expr()).expand();
                }
                chi.insert((q, m), f.clone());
                norm.insert((q, m), n.clone());
            }
        }
        Ok(Multiplet { twol, chi, norm })
    }

    pub fn states(&self) -> impl Iterator<Item = QNum2D> + '_ {
        self.chi.keys().map(move |&(q, m)| QNum2D { twol: self.twol, q, m })
    }

    pub fn chi(&self, q: i64, m: i64) -> Result<&Expr> {
        QNum2D::new(self.twol, q, m)?;
        Ok(&self.chi[&(q, m)])
    }

    /// Product of the step coefficients along the chain.
    pub fn chain_norm(&self, q: i64, m: i64) -> Result<&Expr> {
        QNum2D::new(self.twol, q, m)?;
        Ok(&self.norm[&(q, m)])
    }

    pub fn chi_hat(&self, q: i64, m: i64) -> Result<Expr> {
        Ok((self.chi(q, m)? * self.chain_norm(q, m)?.powi(-1)).expand())
    }
}

/// `χ` on a charge-fixed plan: `q` is an integer here, so only `θ, ψ` vary.
fn eigen_ops(q: i64) -> (DiffOp, DiffOp) {
    let qe = Expr::int(q);
    let quarter = Gq::ratio(1, 4);
    (
        su2::printed_casimir_reduced().substitute(Symbol::Q, &qe).scale_c(quarter.clone()),
        su2::printed_hq().substitute(Symbol::Q, &qe).scale_c(quarter),
    )
}

/// `L²_q χ = l(l+1) χ` and `H_q χ̃ = l(l+1) χ̃` with the su(2)-normalized
/// operators (printed / 4).
pub fn eigen_reports(mp: &Multiplet, plan: &SamplePlan, tol: f64) -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    for qn in mp.states() {
        out.extend(state_eigen_reports(qn, mp.chi(qn.q, qn.m)?, plan, tol)?);
    }
    Ok(out)
}

/// The two eigen-equations for one state `χ`.
pub fn state_eigen_reports(qn: QNum2D, chi: &Expr, plan: &SamplePlan, tol: f64) -> Result<Vec<IdentityReport>> {
    let (l2, hq) = eigen_ops(qn.q);
    let ev = qn.eigenvalue().to_complex();
    let ct = &su2::weight_combined() * chi;
    Ok(vec![
        verify::check_ratio(&format!("L2q chi {qn}"), &l2.apply_raw(chi), chi, ev, plan, tol)?,
        verify::check_ratio(&format!("Hq chi~ {qn}"), &hq.apply_raw(&ct), &ct, ev, plan, tol)?,
    ])
}

/// Worst of a list of reports, with a summary note.
pub fn worst(name: &str, reports: Vec<IdentityReport>, tol: f64) -> IdentityReport {
    let n = reports.len();
    let failed = reports.iter().filter(|r| !r.pass).count();
    let mut w = reports
        .into_iter()
        .max_by(|a, b| {
            (!a.pass, a.relative)
                .partial_cmp(&(!b.pass, b.relative))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or_else(|| IdentityReport {
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
            notes: Vec::new(),
        });
    let worst_name = std::mem::replace(&mut w.name, name.into());
    w.notes.push(format!("{} of {n} sub-checks failed; worst: {worst_name}", failed));
    w.pass = failed == 0;
    w
}

fn zero_report(name: &str, e: &Expr, plan: &SamplePlan, tol: f64) -> Result<IdentityReport> {
    let mut r = verify::check_zero(name, &[e.clone()], plan, tol)?;
    r.pass = e.is_zero();
    if r.pass {
        r.relative = 0.0;
    }
    r.notes.push(if r.pass { "exact zero" } else { "not an exact zero" }.into());
    Ok(r)
}

/// `R±(q) χ̂_{q,m} = A± χ̂_{q±1,m∓1}` and `L±(q) χ̂_{q,m} = B± χ̂_{q±1,m±1}`
/// for every state, with coefficients from `coef`. Moves leaving the
/// multiplet must give the exact zero function and a zero coefficient.
pub fn ladder_action_reports(
    mp: &Multiplet,
    plan: &SamplePlan,
    tol: f64,
    coef: &dyn Fn(CoeffKind, QNum2D) -> Result<f64>,
) -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    for qn in mp.states() {
        let src = mp.chi_hat(qn.q, qn.m)?;
        for kind in CoeffKind::ALL {
            let op = su2::param(kind.generator(), &Expr::int(qn.q));
            let img = op.apply(&src);
            let (dq, dm) = kind.step();
            let (tq, tm) = (qn.q + dq, qn.m + dm);
            let c = coef(kind, qn)?;
            let name = format!("{:?} at {qn}", kind);
            if QNum2D::is_valid(qn.twol, tq, tm) {
                let tgt = mp.chi_hat(tq, tm)?;
                out.push(verify::check_ratio(&name, &img, &tgt, Complex64::new(c, 0.0), plan, tol)?);
            } else {
                let mut r = zero_report(&format!("{name} (edge)"), &img, plan, tol)?;
                if c != 0.0 {
                    r.pass = false;
                    r.notes.push(format!("edge coefficient {c} is not zero"));
                }
                out.push(r);
            }
        }
    }
    Ok(out)
}

pub fn form_coeff(form: CoeffForm) -> impl Fn(CoeffKind, QNum2D) -> Result<f64> {
    move |k, qn| Ok(coeff(k, qn, form)?.value)
}

pub fn verify_ladder_actions(twol: i64, plan: &SamplePlan, tol: f64, form: CoeffForm) -> Result<IdentityReport> {
    let mp = Multiplet::build(twol)?;
    let reps = ladder_action_reports(&mp, plan, tol, &form_coeff(form))?;
    Ok(worst(&format!("ladder actions 2l={twol} ({form:?})"), reps, tol))
}

/// `Y₋Y₊`, `Y₊Y₋`, `X₋X₊`, `X₊X₋` eigen-relations with the corrected `E`
/// and `N`, and `X₊` annihilating the q-highest states.
pub fn shape_reports(mp: &Multiplet, plan: &SamplePlan, tol: f64) -> Result<Vec<IdentityReport>> {
    let t = mp.twol;
    let mut out = Vec::new();
    for qn in mp.states() {
        let (q, m) = (qn.q, qn.m);
        let chi = mp.chi(q, m)?;
        if QNum2D::is_valid(t, q, m + 2) {
            let e = e_value(t, q, m, CoeffForm::Corrected)?;
            let yy = y_minus(q).apply_raw(&y_plus(q).apply(chi));
            out.push(verify::check_ratio(&format!("Ym Yp {qn}"), &yy, chi, e.into(), plan, tol)?);
            let up = mp.chi(q, m + 2)?;
            let yy = y_plus(q).apply_raw(&y_minus(q).apply(up));
            out.push(verify::check_ratio(&format!("Yp Ym (q={q}, m={})", m + 2), &yy, up, e.into(), plan, tol)?);
        }
        if QNum2D::is_valid(t, q + 2, m) {
            let n = n_closed_corrected(t, q, m).to_complex();
            let xx = x_minus(q).apply_raw(&x_plus(q).apply(chi));
            out.push(verify::check_ratio(&format!("Xm Xp {qn}"), &xx, chi, n, plan, tol)?);
            let up = mp.chi(q + 2, m)?;
            let xx = x_plus(q).apply_raw(&x_minus(q).apply(up));
            out.push(verify::check_ratio(&format!("Xp Xm (q={}, m={m})", q + 2), &xx, up, n, plan, tol)?);
        }
        if q == t - m.abs() {
            let z = x_plus(q).apply(chi);
            out.push(zero_report(&format!("Xp annihilates {qn}"), &z, plan, tol)?);
        }
    }
    Ok(out)
}

/// `N` product form against the printed closed form, and the corrected
/// product against the corrected closed form, on the full grid.
pub fn n_grid_mismatches(twol: i64) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for qn in QNum2D::multiplet(twol) {
        let (q, m) = (qn.q, qn.m);
        if !QNum2D::is_valid(twol, q + 2, m) {
            continue;
        }
        let p = n_product(twol, q, m, CoeffForm::Printed)?;
        let pc = n_closed_printed(twol, q, m);
        if (p - pc).abs() > 1e-12 * p.abs().max(1.0) {
            bad.push(format!("printed N at {qn}: product {p} vs closed {pc}"));
        }
        let c = n_product(twol, q, m, CoeffForm::Corrected)?;
        let cc = n_closed_corrected(twol, q, m).to_complex().re;
        if (c - cc).abs() > 1e-12 * c.abs().max(1.0) {
            bad.push(format!("corrected N at {qn}: product {c} vs closed {cc}"));
        }
    }
    Ok(bad)
}

/// `χ̂_{q,m}` rebuilt by the `Y₋` chain from `χ̂_{q,2l-|q|}` and by the
/// `X₋` chain from `χ̂_{2l-|m|,m}`, each divided by the product of the
/// coefficients of the steps performed (`k` and `f`).
#[derive(Clone, Debug)]
pub struct ChainRebuild {
    pub y_chain: Expr,
    pub x_chain: Expr,
    pub k: f64,
    pub f: f64,
}

pub fn reconstruct_chain(mp: &Multiplet, qn: QNum2D) -> Result<ChainRebuild> {
    use CoeffKind::*;
    let qn = QNum2D::new(qn.twol, qn.q, qn.m)?;
    let (t, q, m) = (qn.twol, qn.q, qn.m);
    let form = CoeffForm::Corrected;

    let ce = |kind, q, m| -> Result<LadderCoeff> { coeff(kind, state(t, q, m)?, form) };

    let mut y = mp.chi_hat(q, t - q.abs())?;
    let mut k = Expr::one();
    let mut mm = t - q.abs();
    while mm > m {
        k = k * ce(APlus, q, mm)?.expr() * ce(BMinus, q + 1, mm - 1)?.expr();
        y = y_minus(q).apply(&y);
        mm -= 2;
    }

    let mut x = mp.chi_hat(t - m.abs(), m)?;
    let mut f = Expr::one();
    let mut qq = t - m.abs();
    while qq > q {
        f = f * ce(AMinus, qq, m)?.expr() * ce(BMinus, qq - 1, m + 1)?.expr();
        x = x_minus(qq - 2).apply(&x);
        qq -= 2;
    }
    let num = |e: &Expr| e.eval(&crate::symx::Binding::new()).map(|z| z.re);
    Ok(ChainRebuild {
        y_chain: (y * k.powi(-1)).expand(),
        x_chain: (x * f.powi(-1)).expand(),
        k: num(&k)?,
        f: num(&f)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan() -> SamplePlan {
        SamplePlan::new(21, 24)
    }

    #[test]
    fn validity_and_degeneracy() {
        assert!(QNum2D::new(1, 1, 1).is_err());
        assert!(QNum2D::new(1, 1, 0).is_ok());
        assert_eq!(degeneracy(2, 0), vec![-2, 0, 2]);
        assert_eq!(degeneracy(3, 1), vec![-2, 0, 2]);
        assert_eq!(degeneracy(2, 2), vec![0]);
        assert!(degeneracy(2, 3).is_empty());
        for t in 0..=6 {
            for q in -t..=t {
                let d = degeneracy(t, q);
                assert_eq!(d.len() as i64, t + 1 - q.abs());
                assert_eq!(d, degeneracy_brute(t, q));
                if let Some(p) = degeneracy_prose(t, q) {
                    assert_eq!(p, d);
                }
            }
        }
    }

    #[test]
    fn highest_weight_is_annihilated() {
        assert!(highest_weight(0).is_one());
        for t in 0..=3 {
            let hw = highest_weight(t);
            assert!(su2::raw(Gen::Lp).apply(&hw).is_zero());
            assert!(su2::raw(Gen::Rp).apply(&hw).is_zero());
        }
    }

    #[test]
    fn coefficient_examples() {
        let c = coeff_a(1, QNum2D::new(2, 0, 0).unwrap(), CoeffForm::Printed).unwrap();
        assert!((c.value - 2f64.sqrt()).abs() < 1e-15);
        let b = coeff_b(-1, QNum2D::new(2, 1, 1).unwrap(), CoeffForm::Printed).unwrap();
        assert!((b.value - 2f64.sqrt()).abs() < 1e-15);
        let top = coeff_a(1, QNum2D::new(2, -1, 1).unwrap(), CoeffForm::Printed).unwrap();
        assert_eq!(top.value, 0.0);
        let edge = coeff_a(1, QNum2D::new(2, 2, 0).unwrap(), CoeffForm::Corrected).unwrap();
        assert_eq!(edge.value, 0.0);
        assert_eq!(b.expr(), Expr::int(2).sqrt().expand());
    }

    #[test]
    fn chain_matches_multiplet() {
        for t in 0..=3 {
            let mp = Multiplet::build(t).unwrap();
            assert_eq!(mp.states().count() as i64, (t + 1) * (t + 1));
            for qn in QNum2D::multiplet(t) {
                assert_eq!(&chi_reduced(qn).unwrap(), mp.chi(qn.q, qn.m).unwrap());
                assert!(!mp.chi(qn.q, qn.m).unwrap().is_zero());
            }
        }
        assert_eq!(chi_reduced(QNum2D::new(0, 0, 0).unwrap()).unwrap(), Expr::one());
        assert!(matches!(
            chi_reduced(QNum2D { twol: 1, q: 1, m: 1 }),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn eigen_equations_small() {
        for t in 0..=3 {
            let mp = Multiplet::build(t).unwrap();
            for r in eigen_reports(&mp, &plan(), 1e-8).unwrap() {
                assert!(r.pass, "{} {}", r.name, r.relative);
            }
        }
    }

    #[test]
    fn hq_on_spin_half_seed() {
        // l = 1/2: the printed operator gives 4·l(l+1) = 3, the su(2) one 3/4.
        let ct = chi_tilde(QNum2D::new(1, 1, 0).unwrap()).unwrap();
        let hq = su2::printed_hq().substitute(Symbol::Q, &Expr::one());
        let r = verify::check_ratio("", &hq.apply_raw(&ct), &ct, 3.0.into(), &plan(), 1e-10).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn ladders_corrected_pass_printed_fail() {
        for t in 1..=2 {
            let ok = verify_ladder_actions(t, &plan(), 1e-8, CoeffForm::Corrected).unwrap();
            assert!(ok.pass, "{:?}", ok.notes);
        }
        let bad = verify_ladder_actions(2, &plan(), 1e-8, CoeffForm::Printed).unwrap();
        assert!(!bad.pass);
    }

    #[test]
    fn n_forms_agree() {
        for t in 0..=6 {
            assert!(n_grid_mismatches(t).unwrap().is_empty());
        }
    }

    #[test]
    fn shape_relations_and_chains() {
        for t in 1..=3 {
            let mp = Multiplet::build(t).unwrap();
            for r in shape_reports(&mp, &plan(), 1e-8).unwrap() {
                assert!(r.pass, "{} {}", r.name, r.relative);
            }
            for qn in QNum2D::multiplet(t) {
                let cr = reconstruct_chain(&mp, qn).unwrap();
                let hat = mp.chi_hat(qn.q, qn.m).unwrap();
                for e in [&cr.y_chain, &cr.x_chain] {
                    let r = verify::check_proportional("", e, &hat, &plan(), 1e-9).unwrap();
                    assert!(r.pass, "{qn}");
                    assert!((r.measured.unwrap()[0] - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}
