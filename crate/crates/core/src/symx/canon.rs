//! Canonical expanded form: a sum of monomials with Gaussian-rational
//! coefficients.
//!
//! A monomial is a sorted product of atoms raised to rational powers, times
//! at most one `exp(·)` factor. Atoms are symbols, `sin`/`cos`/`hermite` of
//! canonical arguments, prime constants (for fractional powers such as
//! `2^(1/2)`), and sums raised to negative or fractional powers.
//!
//! Two rewrites make the form canonical on the function class used here
//! (Laurent polynomials in sines, polynomials in cosines, exponentials):
//! `exp(a)·exp(b) = exp(a+b)`, and `cos(u)^k = cos(u)^(k-2)·(1 - sin(u)^2)`
//! for integer `k ≥ 2`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Expr, Gq, Node};

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    factors: Vec<(Expr, BigRational)>,
    exp_arg: Option<Expr>,
}

impl Mono {
    pub fn factors(&self) -> &[(Expr, BigRational)] {
        &self.factors
    }

    pub fn exp_arg(&self) -> Option<&Expr> {
        self.exp_arg.as_ref()
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty() && self.exp_arg.is_none()
    }

    pub fn without_exp(&self) -> Mono {
        Mono {
            factors: self.factors.clone(),
            exp_arg: None,
        }
    }

    /// `c` times this monomial.
    pub fn to_expr(&self, c: &Gq) -> Expr {
        let mut fs = Vec::new();
        if !c.is_one() {
            fs.push(Expr::constant(c.clone()));
        }
        for (a, k) in &self.factors {
            if k.is_one() {
                fs.push(a.clone());
            } else {
                fs.push(Expr::from_node(Node::Pow(a.clone(), Expr::rational(k.clone()))));
            }
        }
        if let Some(x) = &self.exp_arg {
            fs.push(Expr::from_node(Node::Exp(x.clone())));
        }
        match fs.len() {
            0 => Expr::constant(c.clone()),
            1 => fs.pop().unwrap(),
            _ => Expr::from_node(Node::Mul(fs)),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Mono, Gq>,
}

fn int_rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn positive_integer(c: &Gq) -> Option<BigInt> {
    let r = c.as_rational()?;
    (r.is_integer() && r.is_positive()).then(|| r.to_integer())
}

/// Prime factorization by trial division; a cofactor with no small prime
/// factor is returned as a single "prime".
fn factor(mut n: BigInt) -> Vec<(BigInt, u32)> {
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(100_000);
    while &p * &p <= n && p < limit {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

fn is_sum(a: &Expr) -> bool {
    matches!(a.node(), Node::Add(_))
}

/// Builds the canonical polynomial of `coeff · Π a^k · exp(exp_arg)`.
fn term_poly(coeff: Gq, mut f: BTreeMap<Expr, BigRational>, exp_arg: Option<Poly>) -> Poly {
    if coeff.is_zero() {
        return Poly::zero();
    }
    let mut coeff = coeff;
    f.retain(|_, k| !k.is_zero());

    let consts: Vec<Expr> = f.keys().filter(|a| a.as_const().is_some()).cloned().collect();
    for a in consts {
        let k = f[&a].clone();
        let c = a.as_const().unwrap().clone();
        if k.is_integer() {
            if let Some(v) = k.to_integer().to_i64().and_then(|ki| c.powi(ki)) {
                coeff = &coeff * &v;
                f.remove(&a);
            }
        } else if positive_integer(&c).is_some() {
            let fl = k.floor();
            if !fl.is_zero() {
                let v = c.powi(fl.to_integer().to_i64().unwrap()).unwrap();
                coeff = &coeff * &v;
                f.insert(a, k - fl);
            }
        }
    }

    let sum_base = f
        .iter()
        .find(|(a, k)| is_sum(a) && k.is_integer() && !k.is_negative())
        .map(|(a, _)| a.clone());
    if let Some(a) = sum_base {
        let k = f.remove(&a).unwrap().to_integer().to_u32().unwrap();
        let base = Poly::from_expr(&a).pow_u(k);
        return term_poly(coeff, f, exp_arg).mul(&base);
    }

    let exp_arg = exp_arg.filter(|p| !p.is_zero());

    let cos_hi = f
        .iter()
        .find(|(a, k)| matches!(a.node(), Node::Cos(_)) && k.is_integer() && *k >= &int_rat(2))
        .map(|(a, k)| (a.clone(), k.clone()));
    if let Some((a, k)) = cos_hi {
        let Node::Cos(u) = a.node() else { unreachable!() };
        let sin_atom = Expr::from_node(Node::Sin(u.clone()));
        f.insert(a, k - int_rat(2));
        let t1 = term_poly(coeff.clone(), f.clone(), exp_arg.clone());
        let mut f2 = f;
        *f2.entry(sin_atom).or_insert_with(BigRational::zero) += int_rat(2);
        let t2 = term_poly(-coeff, f2, exp_arg);
        return t1.add(&t2);
    }

    let mono = Mono {
        factors: f.into_iter().collect(),
        exp_arg: exp_arg.map(|p| p.to_expr()),
    };
    let mut terms = BTreeMap::new();
    terms.insert(mono, coeff);
    Poly { terms }
}

fn mono_parts(m: &Mono) -> (BTreeMap<Expr, BigRational>, Option<Poly>) {
    let f = m.factors.iter().cloned().collect();
    let e = m.exp_arg.as_ref().map(Poly::from_expr);
    (f, e)
}

/// `c^k` for a constant and a non-integer rational `k`.
fn const_pow(c: &Gq, k: &BigRational) -> Poly {
    if let Some(r) = c.as_rational() {
        if r.is_positive() {
            let mut f = BTreeMap::new();
            for (p, e) in factor(r.numer().clone()) {
                *f.entry(Expr::rational(BigRational::from_integer(p)))
                    .or_insert_with(BigRational::zero) += k * int_rat(e as i64);
            }
            for (p, e) in factor(r.denom().clone()) {
                *f.entry(Expr::rational(BigRational::from_integer(p)))
                    .or_insert_with(BigRational::zero) -= k * int_rat(e as i64);
            }
            return term_poly(Gq::one(), f, None);
        }
        if r.is_negative() {
            let two_k = k * int_rat(2);
            let mag = const_pow(&Gq::from_rational(-r), k);
            if two_k.is_integer() {
                let ph = Gq::i().powi(two_k.to_integer().to_i64().unwrap()).unwrap();
                return mag.scale(&ph);
            }
            let mut f = BTreeMap::new();
            f.insert(Expr::int(-1), k.clone());
            return mag.mul(&term_poly(Gq::one(), f, None));
        }
    }
    let mut f = BTreeMap::new();
    f.insert(Expr::constant(c.clone()), k.clone());
    term_poly(Gq::one(), f, None)
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Gq) -> Self {
        term_poly(c, BTreeMap::new(), None)
    }

    /// `a^k` as a single-atom polynomial.
    pub fn atom(a: Expr, k: BigRational) -> Self {
        let mut f = BTreeMap::new();
        f.insert(a, k);
        term_poly(Gq::one(), f, None)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Gq)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<Gq> {
        match self.terms.len() {
            0 => Some(Gq::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }

    pub fn add_assign(&mut self, o: &Poly) {
        for (m, c) in &o.terms {
            let e = self.terms.entry(m.clone()).or_default();
            *e += c;
            if e.is_zero() {
                self.terms.remove(m);
            }
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&Gq::int(-1))
    }

    pub fn scale(&self, c: &Gq) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            let (fa, ea) = mono_parts(ma);
            for (mb, cb) in &o.terms {
                if ma.is_one() {
                    out.add_assign(&Poly::single(mb.clone(), ca * cb));
                    continue;
                }
                if mb.is_one() {
                    out.add_assign(&Poly::single(ma.clone(), ca * cb));
                    continue;
                }
                let mut f = fa.clone();
                for (a, k) in &mb.factors {
                    *f.entry(a.clone()).or_insert_with(BigRational::zero) += k;
                }
                let e = match (&ea, &mb.exp_arg) {
                    (None, None) => None,
                    (Some(x), None) => Some(x.clone()),
                    (None, Some(y)) => Some(Poly::from_expr(y)),
                    (Some(x), Some(y)) => Some(x.add(&Poly::from_expr(y))),
                };
                out.add_assign(&term_poly(ca * cb, f, e));
            }
        }
        out
    }

    fn single(m: Mono, c: Gq) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn pow_u(&self, k: u32) -> Poly {
        let mut acc = Poly::constant(Gq::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self^k` for rational `k`.
    pub fn pow_rat(&self, k: &BigRational) -> Poly {
        if k.is_integer() && !k.is_negative() {
            return self.pow_u(k.to_integer().to_u32().expect("exponent too large"));
        }
        if self.is_zero() {
            return Poly::atom(Expr::zero(), k.clone());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            let cp = if k.is_integer() {
                Poly::constant(c.powi(k.to_integer().to_i64().unwrap()).unwrap())
            } else {
                const_pow(c, k)
            };
            let f = m.factors.iter().map(|(a, e)| (a.clone(), e * k)).collect();
            let e = m
                .exp_arg
                .as_ref()
                .map(|x| Poly::from_expr(x).scale(&Gq::from_rational(k.clone())));
            return cp.mul(&term_poly(Gq::one(), f, e));
        }
        Poly::atom(self.to_expr(), k.clone())
    }

    pub fn from_expr(e: &Expr) -> Poly {
        match e.node() {
            Node::Const(c) => Poly::constant(c.clone()),
            Node::Sym(_) => Poly::atom(e.clone(), BigRational::one()),
            Node::Add(xs) => {
                let mut acc = Poly::zero();
                for x in xs {
                    acc.add_assign(&Poly::from_expr(x));
                }
                acc
            }
            Node::Mul(xs) => {
                let mut acc = Poly::constant(Gq::one());
                for x in xs {
                    acc = acc.mul(&Poly::from_expr(x));
                    if acc.is_zero() {
                        break;
                    }
                }
                acc
            }
            Node::Pow(b, x) => {
                let pb = Poly::from_expr(b);
                let px = Poly::from_expr(x);
                match px.as_constant().and_then(|c| c.as_rational().cloned()) {
                    Some(k) => pb.pow_rat(&k),
                    None => Poly::atom(
                        Expr::from_node(Node::Pow(pb.to_expr(), px.to_expr())),
                        BigRational::one(),
                    ),
                }
            }
            Node::Sin(a) => {
                let pa = Poly::from_expr(a);
                if pa.is_zero() {
                    return Poly::zero();
                }
                Poly::atom(Expr::from_node(Node::Sin(pa.to_expr())), BigRational::one())
            }
            Node::Cos(a) => {
                let pa = Poly::from_expr(a);
                if pa.is_zero() {
                    return Poly::constant(Gq::one());
                }
                Poly::atom(Expr::from_node(Node::Cos(pa.to_expr())), BigRational::one())
            }
            Node::Exp(a) => term_poly(Gq::one(), BTreeMap::new(), Some(Poly::from_expr(a))),
            Node::Hermite(n, a) => {
                if *n == 0 {
                    return Poly::constant(Gq::one());
                }
                let pa = Poly::from_expr(a);
                Poly::atom(
                    Expr::from_node(Node::Hermite(*n, pa.to_expr())),
                    BigRational::one(),
                )
            }
        }
    }

    pub fn to_expr(&self) -> Expr {
        let mut v: Vec<Expr> = self.terms.iter().map(|(m, c)| m.to_expr(c)).collect();
        match v.len() {
            0 => Expr::zero(),
            1 => v.pop().unwrap(),
            _ => Expr::from_node(Node::Add(v)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symx::vars::*;
    use crate::symx::{Binding, Symbol};
    use proptest::prelude::*;

    #[test]
    fn pythagorean_rewrite_gives_exact_zero() {
        let e = theta().sin().powi(2) + theta().cos().powi(2) - Expr::one();
        assert!(e.expand().is_zero());
        let e = theta().cos().powi(4) - (Expr::one() - theta().sin().powi(2)).powi(2);
        assert!(e.expand().is_zero());
    }

    #[test]
    fn exponentials_merge() {
        let a = (Expr::i() * phi()).exp();
        let b = (-(Expr::i() * phi())).exp();
        assert_eq!((a * b).expand(), Expr::one());
    }

    #[test]
    fn fractional_constant_powers_fold() {
        let s = Expr::int(2).sqrt();
        assert_eq!((&s * &s).expand(), Expr::int(2));
        let h = Expr::ratio(1, 2).sqrt();
        assert_eq!((&h * &s).expand(), Expr::one());
        let w = omega().sqrt();
        assert_eq!((&w * &w).expand(), omega());
        assert_eq!(Expr::int(8).sqrt().expand(), (Expr::int(2) * Expr::int(2).sqrt()).expand());
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let e = (theta().sin() + psi().cos() * q()).powi(3) * (Expr::i() * phi()).exp();
        let once = e.expand();
        assert_eq!(once.expand(), once);
    }

    #[test]
    fn sum_powers_merge_back() {
        let s = Expr::one() + theta().sin();
        let e = s.pow_ratio(1, 2) * s.pow_ratio(1, 2);
        assert_eq!(e.expand(), s.expand());
    }

    #[test]
    fn factorization_of_rationals() {
        assert_eq!(factor(BigInt::from(360)), vec![
            (BigInt::from(2), 3),
            (BigInt::from(3), 2),
            (BigInt::from(5), 1)
        ]);
    }

    fn small_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (-3i64..4).prop_map(Expr::int),
            Just(theta()),
            Just(psi()),
            Just(q()),
            Just(theta().sin()),
            Just(psi().cos()),
            Just((Expr::i() * phi()).exp()),
        ];
        leaf.prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
                (inner.clone(), 0i64..3).prop_map(|(a, k)| a.powi(k)),
                inner.clone().prop_map(|a| a.sin()),
                inner.prop_map(|a| a.cos()),
            ]
        })
    }

    proptest! {
        #[test]
        fn expansion_preserves_values(e in small_expr(), t in 0.3f64..2.8, p in 0.3f64..2.8, f in 0.0f64..6.2, qv in -3.0f64..3.0) {
            let b = Binding::new()
                .with(Symbol::Theta, t)
                .with(Symbol::Psi, p)
                .with(Symbol::Phi, f)
                .with(Symbol::Q, qv);
            let v0 = e.eval(&b).unwrap();
            let v1 = e.expand().eval(&b).unwrap();
            let v2 = e.simplify_basic().eval(&b).unwrap();
            let scale = v0.norm().max(1.0);
            prop_assert!((v0 - v1).norm() <= 1e-9 * scale);
            prop_assert!((v0 - v2).norm() <= 1e-13 * scale);
        }
    }
}
