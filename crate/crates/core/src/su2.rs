//! Invariant vector fields on the su(2) manifold, the Casimir, Fourier
//! reduction in φ and the conjugations leading to `H_q(θ,ψ)`.
//!
//! Coordinates are `(θ, ψ, φ)`. The Casimir is kept at the printed
//! normalization, four times the su(2) Casimir, so its eigenvalue on a
//! spin-`l` multiplet is `4 l(l+1)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{DiffOp, PHI, PSI, THETA};
use crate::symx::vars::*;
use crate::symx::{Expr, Gq, Mono, Poly, Symbol};
use crate::verify::{self, IdentityReport, SamplePlan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gen {
    Lp,
    Lm,
    L3,
    Rp,
    Rm,
    R3,
}

impl Gen {
    pub const ALL: [Gen; 6] = [Gen::Lp, Gen::Lm, Gen::L3, Gen::Rp, Gen::Rm, Gen::R3];

    pub fn name(self) -> &'static str {
        match self {
            Gen::Lp => "Lp",
            Gen::Lm => "Lm",
            Gen::L3 => "L3",
            Gen::Rp => "Rp",
            Gen::Rm => "Rm",
            Gen::R3 => "R3",
        }
    }

    pub fn from_name(s: &str) -> Option<Gen> {
        Gen::ALL.iter().copied().find(|g| g.name() == s)
    }

    /// Change of the φ-charge: `+1` for raising, `-1` for lowering.
    pub fn phase(self) -> i32 {
        match self {
            Gen::Lp | Gen::Rp => 1,
            Gen::Lm | Gen::Rm => -1,
            Gen::L3 | Gen::R3 => 0,
        }
    }

    pub fn is_left(self) -> bool {
        matches!(self, Gen::Lp | Gen::Lm | Gen::L3)
    }

    /// Coefficients of `∂ψ`, `∂θ`, `∂φ` inside the `(i/2)[...]` bracket.
    fn parts(self) -> [Expr; 3] {
        let (st, ct) = (theta().sin(), theta().cos());
        let cpt = psi().cot() * st.powi(-1);
        let i = Expr::i();
        let cc = &ct * psi().cot();
        match self {
            Gen::Lp => [st, &i + &cc, -theta().cot() + &i * &cpt],
            Gen::Lm => [st, -&i + &cc, -theta().cot() - &i * &cpt],
            Gen::L3 => [-ct, st * psi().cot(), Expr::int(-1)],
            Gen::Rp => [st, -&i + &cc, theta().cot() + &i * &cpt],
            Gen::Rm => [st, &i + &cc, theta().cot() - &i * &cpt],
            Gen::R3 => [-ct, st * psi().cot(), Expr::one()],
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn half_i() -> Expr {
    Expr::constant(Gq::complex(0, 1, 1, 2))
}

fn mode(k: i32) -> Expr {
    (Expr::i() * Expr::int(k as i64) * phi()).exp()
}

fn d1(i: usize) -> DiffOp {
    DiffOp::d(Symbol::COORDS[i])
}

/// The vector field on the full manifold.
pub fn raw(g: Gen) -> DiffOp {
    let [cp, ct, cf] = g.parts();
    let op = d1(PSI).scale(&cp) + d1(THETA).scale(&ct) + d1(PHI).scale(&cf);
    op.scale(&(half_i() * mode(g.phase())))
}

/// The field acting on charge-`p` functions: `∂φ → i p`, phase dropped.
/// `Lm(p)` maps charge `p` to `p - 1`, `Lp(p)` maps `p` to `p + 1`.
pub fn param(g: Gen, p: &Expr) -> DiffOp {
    let [cp, ct, cf] = g.parts();
    let op = d1(PSI).scale(&cp) + d1(THETA).scale(&ct) + DiffOp::scalar(Expr::i() * p * cf);
    op.scale(&half_i())
}

/// Generator on q-families: `param(g, q - k) · S(k)` with `k` the phase.
pub fn reduced(g: Gen) -> DiffOp {
    let k = g.phase();
    param(g, &(q() - Expr::int(k as i64))).compose(&DiffOp::shift(k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Raw,
    Reduced,
    /// `g` carrying `e^{+∂/∂q}` everywhere, as printed.
    PrimedLiteral,
    /// `g` carrying the shift of the generator it corrects.
    PrimedMatched,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSet {
    pub variant: Variant,
    pub lp: DiffOp,
    pub lm: DiffOp,
    pub l3: DiffOp,
    pub rp: DiffOp,
    pub rm: DiffOp,
    pub r3: DiffOp,
}

impl GeneratorSet {
    fn from_fn(variant: Variant, f: impl Fn(Gen) -> DiffOp) -> Self {
        GeneratorSet {
            variant,
            lp: f(Gen::Lp),
            lm: f(Gen::Lm),
            l3: f(Gen::L3),
            rp: f(Gen::Rp),
            rm: f(Gen::Rm),
            r3: f(Gen::R3),
        }
    }

    pub fn get(&self, g: Gen) -> &DiffOp {
        match g {
            Gen::Lp => &self.lp,
            Gen::Lm => &self.lm,
            Gen::L3 => &self.l3,
            Gen::Rp => &self.rp,
            Gen::Rm => &self.rm,
            Gen::R3 => &self.r3,
        }
    }
}

pub fn build_raw_generators() -> GeneratorSet {
    GeneratorSet::from_fn(Variant::Raw, raw)
}

pub fn build_reduced_generators() -> GeneratorSet {
    GeneratorSet::from_fn(Variant::Reduced, reduced)
}

/// `g = ¼(cotθ - i cotψ/sinθ)` and its conjugate, without shift.
fn g_coeff(conj: bool) -> Expr {
    let s = if conj { Expr::i() } else { -Expr::i() };
    (theta().cot() + s * psi().cot() * theta().sin().powi(-1)) * Expr::ratio(1, 4)
}

pub fn build_primed_generators(matched: bool) -> GeneratorSet {
    let variant = if matched {
        Variant::PrimedMatched
    } else {
        Variant::PrimedLiteral
    };
    GeneratorSet::from_fn(variant, |gen| {
        let base = reduced(gen);
        let shift = if matched { gen.phase() } else { -1 };
        let g = |conj| DiffOp::term(g_coeff(conj), [0; 4], shift);
        match gen {
            Gen::Lp => base + g(false),
            Gen::Lm => base - g(true),
            Gen::Rp => base - g(true),
            Gen::Rm => base + g(false),
            Gen::L3 | Gen::R3 => base,
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// `4·[½(X₊X₋ + X₋X₊) + X₃²]` from one side of a generator set.
pub fn casimir(gs: &GeneratorSet, side: Side) -> DiffOp {
    let (p, m, t) = match side {
        Side::Left => (&gs.lp, &gs.lm, &gs.l3),
        Side::Right => (&gs.rp, &gs.rm, &gs.r3),
    };
    let q = (p * m + m * p).scale_c(Gq::ratio(1, 2)) + t * t;
    q.scale_c(Gq::int(4))
}

fn sc(e: Expr) -> DiffOp {
    DiffOp::scalar(e)
}

/// `(1/w) ∂ w ∂` in one coordinate.
fn weighted_laplacian(i: usize, w: &Expr) -> DiffOp {
    sc(w.powi(-1)) * d1(i) * sc(w.clone()) * d1(i)
}

/// The printed Casimir on the full manifold.
pub fn printed_casimir() -> DiffOp {
    let (sp, st) = (psi().sin(), theta().sin());
    let inner = weighted_laplacian(THETA, &st) + sc(st.powi(-2)) * d1(PHI) * d1(PHI);
    -(weighted_laplacian(PSI, &sp.powi(2)) + sc(sp.powi(-2)) * inner)
}

fn theta_part_q() -> DiffOp {
    let st = theta().sin();
    weighted_laplacian(THETA, &st) - sc(q().powi(2) * st.powi(-2))
}

/// The printed Casimir on charge-`q` functions.
pub fn printed_casimir_reduced() -> DiffOp {
    let sp = psi().sin();
    -(weighted_laplacian(PSI, &sp.powi(2)) + sc(sp.powi(-2)) * theta_part_q())
}

/// The printed similarity transform by `sin^{1/2}ψ`.
pub fn printed_similarity() -> DiffOp {
    let sp = psi().sin();
    let k = psi().cot().powi(2) * Expr::ratio(1, 4) - Expr::ratio(1, 2);
    -(weighted_laplacian(PSI, &sp) + sc(sp.powi(-2)) * theta_part_q()) + sc(k)
}

/// The printed `H_q(θ,ψ)`.
pub fn printed_hq() -> DiffOp {
    let (sp, st) = (psi().sin(), theta().sin());
    let pot = (q().powi(2) - Expr::ratio(1, 4)) * sp.powi(-2) * st.powi(-2) - Expr::ratio(3, 4);
    -(weighted_laplacian(PSI, &sp) + sc(sp.powi(-2)) * d1(THETA) * d1(THETA)) + sc(pot)
}

/// Replaces `∂φ` and `e^{ijφ}` factors by their action on Fourier modes:
/// `e^{ijφ} c ∂φ^k ↦ c·(i(q-j))^k · S(j)`.
pub fn fourier_reduce(op: &DiffOp) -> Result<DiffOp> {
    let mut out = Vec::new();
    for t in op.terms() {
        let k = t.derivs[PHI];
        let mut derivs = t.derivs;
        derivs[PHI] = 0;
        let mut by_j: BTreeMap<i64, Poly> = BTreeMap::new();
        for (mono, c) in Poly::from_expr(&t.coeff).terms() {
            let (j, rest) = split_mode(mono)?;
            let mut e = mono.without_exp().to_expr(c);
            if let Some(r) = rest {
                e = e * r.exp();
            }
            by_j.entry(j).or_default().add_assign(&Poly::from_expr(&e));
        }
        for (j, p) in by_j {
            let factor = (Expr::i() * (q() - Expr::int(j))).powi(k as i64);
            out.push(crate::opalg::OpTerm::new(
                p.to_expr() * factor,
                derivs,
                t.shift + j as i32,
            ));
        }
    }
    Ok(DiffOp::from_terms(out))
}

/// Splits a monomial's exponential into `i j φ` plus a φ-free remainder.
fn split_mode(mono: &Mono) -> Result<(i64, Option<Expr>)> {
    if mono.factors().iter().any(|(a, _)| a.depends_on(Symbol::Phi)) {
        return Err(Error::NonReducible(format!("{}", mono.to_expr(&Gq::one()))));
    }
    let Some(arg) = mono.exp_arg() else {
        return Ok((0, None));
    };
    let mut j = 0;
    let mut rest = Poly::zero();
    for (m, c) in Poly::from_expr(arg).terms() {
        let e = m.to_expr(c);
        if !e.depends_on(Symbol::Phi) {
            rest.add_assign(&Poly::from_expr(&e));
            continue;
        }
        let linear = m.exp_arg().is_none()
            && m.factors().len() == 1
            && m.factors()[0].0 == phi()
            && num_traits::One::is_one(&m.factors()[0].1);
        let jj = (c.re.is_zero() && c.im.is_integer())
            .then(|| c.im.to_integer().to_i64())
            .flatten();
        match (linear, jj) {
            (true, Some(v)) => j += v,
            _ => return Err(Error::NonReducible(format!("exp({arg})"))),
        }
    }
    Ok((j, (!rest.is_zero()).then(|| rest.to_expr())))
}

/// `w · op · w⁻¹`.
pub fn conjugate(op: &DiffOp, w: &Expr) -> DiffOp {
    sc(w.clone()) * op.clone() * sc(w.powi(-1))
}

pub fn weight_similarity() -> Expr {
    psi().sin().sqrt()
}

/// Gauge step after the similarity: `sin^{1/2}θ`.
pub fn weight_gauge() -> Expr {
    theta().sin().sqrt()
}

/// Combined weight `(sinψ sinθ)^{1/2}`.
pub fn weight_combined() -> Expr {
    (psi().sin() * theta().sin()).sqrt()
}

/// The printed `H_q`, the pipeline-derived one, and their difference.
#[derive(Clone, Debug)]
pub struct HqBuild {
    pub printed: DiffOp,
    pub derived: DiffOp,
    pub two_step: DiffOp,
    pub difference: DiffOp,
}

pub fn build_hq() -> HqBuild {
    let l2q = printed_casimir_reduced();
    let derived = conjugate(&l2q, &weight_combined());
    let two_step = conjugate(&conjugate(&l2q, &weight_similarity()), &weight_gauge());
    let printed = printed_hq();
    let difference = &derived - &printed;
    HqBuild {
        printed,
        derived,
        two_step,
        difference,
    }
}

/// Measures `derived - printed` as a constant operator: the offset is the
/// pointwise ratio on each battery function, which must not vary.
pub fn hq_offset_report(plan: &SamplePlan, tol: f64) -> Result<IdentityReport> {
    let b = build_hq();
    let mut worst: Option<IdentityReport> = None;
    for f in verify::battery() {
        let r = verify::check_constant("Hq derived - printed", &b.difference.apply_raw(&f), &f, plan, tol)?;
        if worst.as_ref().map_or(true, |w| r.relative > w.relative) {
            worst = Some(r);
        }
    }
    let mut r = worst.ok_or(Error::Inconclusive)?;
    let c = r.measured.unwrap_or([f64::NAN, 0.0]);
    r.notes.push(format!("measured constant offset {:.3e}", c[0]));
    if b.difference.is_zero() {
        r.notes.push("difference is the zero operator".into());
    }
    Ok(r)
}

/// The commutation relations of one generator set: each entry is
/// `(label, pieces)` with `Σ pieces = 0` expected.
pub fn algebra_relations(gs: &GeneratorSet) -> Vec<(String, Vec<DiffOp>)> {
    use Gen::*;
    let s = |g: Gen, k: i64| gs.get(g).scale_c(Gq::int(k));
    let c = |a: Gen, b: Gen| [gs.get(a) * gs.get(b), -(gs.get(b) * gs.get(a))];
    let with = |mut v: Vec<DiffOp>, x: DiffOp| {
        v.push(x);
        v
    };
    let mut v = vec![
        ("[Lp,Lm] = 2 L3".to_string(), with(c(Lp, Lm).into(), s(L3, -2))),
        ("[L3,Lp] = Lp".to_string(), with(c(L3, Lp).into(), s(Lp, -1))),
        ("[L3,Lm] = -Lm".to_string(), with(c(L3, Lm).into(), s(Lm, 1))),
        ("[Rp,Rm] = -2 R3".to_string(), with(c(Rp, Rm).into(), s(R3, 2))),
        ("[R3,Rp] = -Rp".to_string(), with(c(R3, Rp).into(), s(Rp, 1))),
        ("[R3,Rm] = Rm".to_string(), with(c(R3, Rm).into(), s(Rm, -1))),
    ];
    for a in [Lp, Lm, L3] {
        for b in [Rp, Rm, R3] {
            v.push((format!("[{a},{b}] = 0"), c(a, b).into()));
        }
    }
    v
}

/// `X₃(q±1) X±(q) - X±(q) X₃(q) = ±X±(q)` for the left fields and the
/// sign-flipped right analog, with parameter forms.
pub fn shape_invariance_relations() -> Vec<(String, Vec<DiffOp>)> {
    let mut v = Vec::new();
    for (g, t, sign) in [
        (Gen::Lp, Gen::L3, 1),
        (Gen::Lm, Gen::L3, -1),
        (Gen::Rp, Gen::R3, -1),
        (Gen::Rm, Gen::R3, 1),
    ] {
        let k = g.phase() as i64;
        let x = param(g, &q());
        let lhs = param(t, &(q() + Expr::int(k))) * x.clone() - x.clone() * param(t, &q());
        v.push((
            format!("{t}(q{:+}) {g}(q) - {g}(q) {t}(q) = {}{g}(q)", k, if sign > 0 { "" } else { "-" }),
            vec![lhs, x.scale_c(Gq::int(-sign))],
        ));
    }
    v.push(("Lm(q) Rm(q+1) = Rm(q) Lm(q+1)".into(), lowering_exchange(1)));
    v
}

/// `Lm(q) Rm(q+k) - Rm(q) Lm(q+k)`. Both orders take charge `q+1` to
/// `q-1` only for `k = 1`; the printed `k = -1` does not hold.
pub fn lowering_exchange(k: i64) -> Vec<DiffOp> {
    let lr = param(Gen::Lm, &q()) * param(Gen::Rm, &(q() + k));
    let rl = param(Gen::Rm, &q()) * param(Gen::Lm, &(q() + k));
    vec![lr, -rl]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::op_identity;

    fn plan() -> SamplePlan {
        SamplePlan::new(11, 24)
    }

    fn holds(pieces: &[DiffOp], tol: f64) -> IdentityReport {
        op_identity("t", pieces, &plan(), tol).unwrap()
    }

    #[test]
    fn raw_algebra_holds() {
        for (name, pieces) in algebra_relations(&build_raw_generators()) {
            let r = holds(&pieces, 1e-11);
            assert!(r.pass, "{name}: {}", r.relative);
        }
    }

    #[test]
    fn casimir_matches_printed_forms() {
        let gs = build_raw_generators();
        let left = casimir(&gs, Side::Left);
        assert!(holds(&[left.clone(), -printed_casimir()], 1e-12).pass);
        assert!(holds(&[left.clone(), -casimir(&gs, Side::Right)], 1e-12).pass);
        assert!(DiffOp::identity().apply(&Expr::one()).is_one());
        assert!(left.apply(&Expr::int(7)).is_zero());
        let red = fourier_reduce(&left).unwrap();
        assert_eq!(red, printed_casimir_reduced());
    }

    #[test]
    fn reduction_of_fields() {
        for g in Gen::ALL {
            assert_eq!(fourier_reduce(&raw(g)).unwrap(), reduced(g), "{g}");
        }
        let dt = DiffOp::d(Symbol::Theta);
        assert_eq!(fourier_reduce(&dt).unwrap(), dt);
        let bad = DiffOp::scalar(phi());
        assert!(matches!(fourier_reduce(&bad), Err(Error::NonReducible(_))));
    }

    #[test]
    fn conjugation_pipeline() {
        let l2q = printed_casimir_reduced();
        assert_eq!(conjugate(&l2q, &Expr::one()), l2q);
        let sim = conjugate(&l2q, &weight_similarity());
        assert!(holds(&[sim, -printed_similarity()], 1e-12).pass);
        let b = build_hq();
        assert!(holds(&[b.derived.clone(), -b.two_step.clone()], 1e-12).pass);
        let r = hq_offset_report(&plan(), 1e-9).unwrap();
        assert!(r.pass);
        assert!(r.measured.unwrap()[0].abs() < 1e-9);
    }

    #[test]
    fn primed_sets() {
        let matched = build_primed_generators(true);
        let w = weight_combined();
        for g in Gen::ALL {
            let r = holds(&[conjugate(&reduced(g), &w), -matched.get(g).clone()], 1e-11);
            assert!(r.pass, "{g}");
        }
        for (name, pieces) in algebra_relations(&matched) {
            assert!(holds(&pieces, 1e-10).pass, "{name}");
        }
        let hq = casimir(&matched, Side::Left);
        assert!(holds(&[hq, -printed_hq()], 1e-10).pass);
        assert_eq!(matched.l3, reduced(Gen::L3));
        let literal = build_primed_generators(false);
        let fails = algebra_relations(&literal)
            .into_iter()
            .filter(|(_, p)| !holds(p, 1e-10).pass)
            .count();
        assert!(fails > 0);
    }

    #[test]
    fn shape_invariance_of_parameter_forms() {
        for (name, pieces) in shape_invariance_relations() {
            assert!(holds(&pieces, 1e-11).pass, "{name}");
        }
    }

    #[test]
    fn printed_exchange_fails() {
        assert!(!holds(&lowering_exchange(-1), 1e-6).pass);
    }

    #[test]
    fn hq_potential_vanishes_at_quarter() {
        let b = printed_hq().substitute(Symbol::Q, &Expr::ratio(1, 2));
        let scalar = b.terms().iter().find(|t| t.derivs == [0; 4]).unwrap();
        assert_eq!(scalar.coeff, Expr::ratio(-3, 4));
    }
}
