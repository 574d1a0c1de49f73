//! Linear differential operators with expression coefficients and integer
//! shifts of the charge parameter `q`.
//!
//! A term `c · ∂^d · S^k` acts on a q-family `F` as
//! `(T F)(q) = c(q) · ∂^d F(q - k)`, so `k = +1` is `e^{-∂/∂q}`.
//! Operators are kept normalized: terms merged by `(derivs, shift)`,
//! coefficients in canonical form, zero terms dropped, sorted by key.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::Result;
use crate::symx::{Expr, Gq, Poly, Symbol};
use crate::verify::{self, IdentityReport, SamplePlan};

/// Multi-index over `(θ, ψ, φ, r)`.
pub type Derivs = [u8; 4];

pub const THETA: usize = 0;
pub const PSI: usize = 1;
pub const PHI: usize = 2;
pub const R: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpTerm {
    pub coeff: Expr,
    pub derivs: Derivs,
    pub shift: i32,
}

impl OpTerm {
    pub fn new(coeff: Expr, derivs: Derivs, shift: i32) -> Self {
        OpTerm {
            coeff,
            derivs,
            shift,
        }
    }

    pub fn order(&self) -> u32 {
        self.derivs.iter().map(|&d| d as u32).sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiffOp {
    terms: Vec<OpTerm>,
}

fn shifted(e: &Expr, k: i32) -> Expr {
    if k == 0 {
        e.clone()
    } else {
        e.substitute(Symbol::Q, &(Expr::sym(Symbol::Q) - Expr::int(k as i64)))
    }
}

/// `∂^d e` with every intermediate result expanded.
pub fn derivative(e: &Expr, d: Derivs) -> Expr {
    let mut out = e.clone();
    for (i, &n) in d.iter().enumerate() {
        for _ in 0..n {
            out = out
                .diff(Symbol::COORDS[i])
                .expect("coordinates are differentiable")
                .expand();
        }
    }
    out
}

fn binom(n: u8, k: u8) -> i64 {
    let (n, k) = (n as i64, k as i64);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

impl DiffOp {
    pub fn zero() -> Self {
        DiffOp::default()
    }

    pub fn identity() -> Self {
        DiffOp::scalar(Expr::one())
    }

    /// Multiplication by a function.
    pub fn scalar(e: Expr) -> Self {
        DiffOp::from_terms(vec![OpTerm::new(e, [0; 4], 0)])
    }

    /// First derivative in a coordinate of the multi-index.
    pub fn d(coord: Symbol) -> Self {
        let i = coord.coord_index().expect("multi-index coordinate");
        let mut d = [0; 4];
        d[i] = 1;
        DiffOp::from_terms(vec![OpTerm::new(Expr::one(), d, 0)])
    }

    pub fn shift(k: i32) -> Self {
        DiffOp::from_terms(vec![OpTerm::new(Expr::one(), [0; 4], k)])
    }

    pub fn term(coeff: Expr, derivs: Derivs, shift: i32) -> Self {
        DiffOp::from_terms(vec![OpTerm::new(coeff, derivs, shift)])
    }

    pub fn from_terms(terms: Vec<OpTerm>) -> Self {
        let mut acc: BTreeMap<(Derivs, i32), Poly> = BTreeMap::new();
        for t in terms {
            acc.entry((t.derivs, t.shift))
                .or_default()
                .add_assign(&Poly::from_expr(&t.coeff));
        }
        DiffOp::from_polys(acc)
    }

    fn from_polys(acc: BTreeMap<(Derivs, i32), Poly>) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|((d, k), p)| OpTerm::new(p.to_expr(), d, k))
            .collect();
        DiffOp { terms }
    }

    pub fn terms(&self) -> &[OpTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Re-normalizes; a no-op on values built through this API.
    pub fn normalize(&self) -> Self {
        DiffOp::from_terms(self.terms.clone())
    }

    pub fn max_order(&self) -> u32 {
        self.terms.iter().map(OpTerm::order).max().unwrap_or(0)
    }

    /// Left multiplication by a function.
    pub fn scale(&self, e: &Expr) -> Self {
        DiffOp::from_terms(
            self.terms
                .iter()
                .map(|t| OpTerm::new(e * &t.coeff, t.derivs, t.shift))
                .collect(),
        )
    }

    pub fn scale_c(&self, c: Gq) -> Self {
        self.scale(&Expr::constant(c))
    }

    pub fn add_op(&self, o: &DiffOp) -> Self {
        let mut v = self.terms.clone();
        v.extend(o.terms.iter().cloned());
        DiffOp::from_terms(v)
    }

    pub fn sub_op(&self, o: &DiffOp) -> Self {
        self.add_op(&o.neg_op())
    }

    pub fn neg_op(&self) -> Self {
        self.scale_c(Gq::int(-1))
    }

    /// `self ∘ o`, Leibniz-expanded. The left shift acts on the right
    /// coefficients before differentiation.
    pub fn compose(&self, o: &DiffOp) -> Self {
        let mut acc: BTreeMap<(Derivs, i32), Poly> = BTreeMap::new();
        let mut dcache: HashMap<(usize, i32, Derivs), Poly> = HashMap::new();
        for ta in &self.terms {
            let pa = Poly::from_expr(&ta.coeff);
            for (ib, tb) in o.terms.iter().enumerate() {
                let a = ta.derivs;
                for g0 in 0..=a[0] {
                    for g1 in 0..=a[1] {
                        for g2 in 0..=a[2] {
                            for g3 in 0..=a[3] {
                                let g = [g0, g1, g2, g3];
                                let c: i64 = (0..4).map(|i| binom(a[i], g[i])).product();
                                let db = dcache
                                    .entry((ib, ta.shift, g))
                                    .or_insert_with(|| {
                                        Poly::from_expr(&derivative(
                                            &shifted(&tb.coeff, ta.shift),
                                            g,
                                        ))
                                    })
                                    .clone();
                                if db.is_zero() {
                                    continue;
                                }
                                let d = [
                                    a[0] - g0 + tb.derivs[0],
                                    a[1] - g1 + tb.derivs[1],
                                    a[2] - g2 + tb.derivs[2],
                                    a[3] - g3 + tb.derivs[3],
                                ];
                                let k = ta.shift + tb.shift;
                                let term = pa.mul(&db).scale(&Gq::int(c));
                                acc.entry((d, k)).or_default().add_assign(&term);
                            }
                        }
                    }
                }
            }
        }
        DiffOp::from_polys(acc)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(DiffOp::identity(), |acc, _| acc.compose(self))
    }

    /// Replaces a parameter inside every coefficient.
    pub fn substitute(&self, s: Symbol, v: &Expr) -> Self {
        DiffOp::from_terms(
            self.terms
                .iter()
                .map(|t| OpTerm::new(t.coeff.substitute(s, v), t.derivs, t.shift))
                .collect(),
        )
    }

    /// Unexpanded `Σ c · ∂^d f(q - k)`.
    pub fn apply_raw(&self, f: &Expr) -> Expr {
        Expr::sum(
            self.terms
                .iter()
                .map(|t| &t.coeff * &derivative(&shifted(f, t.shift), t.derivs)),
        )
    }

    /// Exact application, returned in canonical form.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut acc = Poly::zero();
        for t in &self.terms {
            let df = derivative(&shifted(f, t.shift), t.derivs);
            acc.add_assign(&Poly::from_expr(&t.coeff).mul(&Poly::from_expr(&df)));
        }
        acc.to_expr()
    }
}

pub fn apply(op: &DiffOp, f: &Expr) -> Expr {
    op.apply(f)
}

pub fn compose(a: &DiffOp, b: &DiffOp) -> DiffOp {
    a.compose(b)
}

pub fn commutator(a: &DiffOp, b: &DiffOp) -> DiffOp {
    a.compose(b).sub_op(&b.compose(a))
}

/// Operator equality by application to the test battery at every plan
/// point, at the operator-identity tolerance.
pub fn op_equal(a: &DiffOp, b: &DiffOp, plan: &SamplePlan) -> Result<IdentityReport> {
    op_equal_tol(a, b, plan, verify::Tolerances::default().operator)
}

pub fn op_equal_tol(
    a: &DiffOp,
    b: &DiffOp,
    plan: &SamplePlan,
    tol: f64,
) -> Result<IdentityReport> {
    verify::op_identity("op_equal", &[a.clone(), b.neg_op()], plan, tol)
}

macro_rules! opbin {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<DiffOp> for DiffOp {
            type Output = DiffOp;
            fn $m(self, o: DiffOp) -> DiffOp {
                self.$f(&o)
            }
        }
        impl<'a> $tr<&'a DiffOp> for &'a DiffOp {
            type Output = DiffOp;
            fn $m(self, o: &DiffOp) -> DiffOp {
                self.$f(o)
            }
        }
    };
}

opbin!(Add, add, add_op);
opbin!(Sub, sub, sub_op);
opbin!(Mul, mul, compose);

impl Neg for DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        self.neg_op()
    }
}

impl Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        self.neg_op()
    }
}

fn fmt_derivs(d: &Derivs) -> String {
    let mut parts = Vec::new();
    for (i, &n) in d.iter().enumerate() {
        match n {
            0 => {}
            1 => parts.push(format!("d_{}", Symbol::COORDS[i])),
            _ => parts.push(format!("d_{}^{}", Symbol::COORDS[i], n)),
        }
    }
    parts.join("*")
}

impl fmt::Display for DiffOp {
    /// One term per line: `[coeff] d_theta*d_psi S(+1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "[{}]", t.coeff)?;
            let d = fmt_derivs(&t.derivs);
            if !d.is_empty() {
                write!(f, " {d}")?;
            }
            if t.shift != 0 {
                write!(f, " S({:+})", t.shift)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symx::vars::*;
    use proptest::prelude::*;

    fn dtheta() -> DiffOp {
        DiffOp::d(Symbol::Theta)
    }

    #[test]
    fn apply_examples() {
        assert_eq!(dtheta().apply(&theta().sin()), theta().cos());
        assert!(DiffOp::zero().apply(&theta().sin()).is_zero());
    }

    #[test]
    fn leibniz_commutator() {
        let s = DiffOp::scalar(theta().sin());
        let c = commutator(&dtheta(), &s);
        assert_eq!(c, DiffOp::scalar(theta().cos()));
        assert_eq!(compose(&DiffOp::identity(), &s), s);
        assert!(commutator(&s, &s).is_zero());
    }

    #[test]
    fn shift_acts_on_right_coefficients() {
        let lhs = compose(&DiffOp::shift(1), &DiffOp::scalar(q()));
        let rhs = DiffOp::term(q() - Expr::one(), [0; 4], 1);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn normalization_merges_and_drops() {
        let op = DiffOp::from_terms(vec![
            OpTerm::new(theta().sin(), [1, 0, 0, 0], 0),
            OpTerm::new(-theta().sin(), [1, 0, 0, 0], 0),
            OpTerm::new(Expr::int(2), [0, 1, 0, 0], 1),
            OpTerm::new(Expr::int(3), [0, 1, 0, 0], 1),
        ]);
        assert_eq!(op.terms().len(), 1);
        assert_eq!(op.terms()[0].coeff, Expr::int(5));
        assert_eq!(op.normalize(), op);
    }

    fn small_op() -> impl Strategy<Value = DiffOp> {
        let coeff = prop_oneof![
            Just(Expr::one()),
            Just(theta().sin()),
            Just(psi().cos() * q()),
            Just(r() * theta().cos()),
            Just((Expr::i() * phi()).exp()),
        ];
        let term = (coeff, 0u8..2, 0u8..2, 0u8..2, 0u8..2, -1i32..2)
            .prop_map(|(c, a, b, d, e, k)| OpTerm::new(c, [a, b, d, e], k));
        prop::collection::vec(term, 1..3).prop_map(DiffOp::from_terms)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn composition_is_a_homomorphism(a in small_op(), b in small_op()) {
            let f = (Expr::i() * phi()).exp() * theta().sin().powi(2) * psi().cos()
                * (q() + Expr::int(3)) * r();
            let lhs = compose(&a, &b).apply(&f);
            let rhs = a.apply(&b.apply(&f));
            prop_assert!((lhs - rhs).expand().is_zero());
        }
    }
}
