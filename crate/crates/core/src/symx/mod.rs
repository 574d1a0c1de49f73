//! Exact symbolic expressions over the coordinates `(θ, ψ, φ, r)` and the
//! integer parameters of the models, with Gaussian-rational constants.
//!
//! Trees are immutable and cheaply shared (`Arc`). The operator overloads
//! build lightly folded trees; [`Expr::expand`] produces the canonical
//! expanded form and [`Expr::simplify_basic`] the lite normal form.

mod canon;
mod eval;
mod gq;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use canon::{Mono, Poly};
pub use eval::{Binding, Compiled};
pub use gq::Gq;

use crate::error::{Error, Result};

/// Coordinates and parameters. Declaration order is alphabetical by
/// rendered name, which fixes the canonical ordering of symbols.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Symbol {
    M,
    N,
    N3,
    N4,
    Omega,
    Phi,
    Psi,
    Q,
    R,
    Theta,
    TwoL,
    /// A generic coordinate used for one-dimensional tests.
    X,
}

impl Symbol {
    pub const COUNT: usize = 12;

    pub const ALL: [Symbol; Symbol::COUNT] = [
        Symbol::M,
        Symbol::N,
        Symbol::N3,
        Symbol::N4,
        Symbol::Omega,
        Symbol::Phi,
        Symbol::Psi,
        Symbol::Q,
        Symbol::R,
        Symbol::Theta,
        Symbol::TwoL,
        Symbol::X,
    ];

    /// The four coordinates a [`crate::opalg::DiffOp`] differentiates in,
    /// in multi-index order.
    pub const COORDS: [Symbol; 4] = [Symbol::Theta, Symbol::Psi, Symbol::Phi, Symbol::R];

    pub fn name(self) -> &'static str {
        match self {
            Symbol::M => "m",
            Symbol::N => "n",
            Symbol::N3 => "n3",
            Symbol::N4 => "n4",
            Symbol::Omega => "omega",
            Symbol::Phi => "phi",
            Symbol::Psi => "psi",
            Symbol::Q => "q",
            Symbol::R => "r",
            Symbol::Theta => "theta",
            Symbol::TwoL => "twol",
            Symbol::X => "x",
        }
    }

    pub fn from_name(s: &str) -> Option<Symbol> {
        Symbol::ALL.iter().copied().find(|x| x.name() == s)
    }

    pub fn is_coordinate(self) -> bool {
        matches!(
            self,
            Symbol::Theta | Symbol::Psi | Symbol::Phi | Symbol::R | Symbol::X
        )
    }

    /// Position in the `(θ, ψ, φ, r)` multi-index.
    pub fn coord_index(self) -> Option<usize> {
        Symbol::COORDS.iter().position(|&c| c == self)
    }

    pub(crate) fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Tree node. Variant order doubles as the canonical ordering: constants,
/// then symbols, then composite nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Const(Gq),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    /// `base^exponent`; the exponent is usually a rational constant.
    Pow(Expr, Expr),
    Sin(Expr),
    Cos(Expr),
    Exp(Expr),
    /// Physicists' Hermite polynomial `H_n(arg)`.
    Hermite(u32, Expr),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::sym(s)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Gq> for Expr {
    fn from(c: Gq) -> Self {
        Expr::constant(c)
    }
}

fn rat_of(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Expr {
    pub fn from_node(n: Node) -> Self {
        Expr(Arc::new(n))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: Gq) -> Self {
        Expr::from_node(Node::Const(c))
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(Gq::int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Expr::constant(Gq::ratio(n, d))
    }

    pub fn rational(r: BigRational) -> Self {
        Expr::constant(Gq::from_rational(r))
    }

    pub fn zero() -> Self {
        Expr::int(0)
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Expr::constant(Gq::i())
    }

    pub fn sym(s: Symbol) -> Self {
        Expr::from_node(Node::Sym(s))
    }

    pub fn as_const(&self) -> Option<&Gq> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.as_const().and_then(Gq::as_rational)
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(Gq::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(Gq::is_one)
    }

    pub fn sin(&self) -> Self {
        if self.is_zero() {
            return Expr::zero();
        }
        Expr::from_node(Node::Sin(self.clone()))
    }

    pub fn cos(&self) -> Self {
        if self.is_zero() {
            return Expr::one();
        }
        Expr::from_node(Node::Cos(self.clone()))
    }

    pub fn exp(&self) -> Self {
        if self.is_zero() {
            return Expr::one();
        }
        Expr::from_node(Node::Exp(self.clone()))
    }

    pub fn hermite(n: u32, arg: &Expr) -> Self {
        if n == 0 {
            return Expr::one();
        }
        Expr::from_node(Node::Hermite(n, arg.clone()))
    }

    /// `cos/sin` of the argument.
    pub fn cot(&self) -> Self {
        self.cos() * self.sin().powi(-1)
    }

    /// `self^k` for a rational exponent given as `n/d`.
    pub fn pow_ratio(&self, n: i64, d: i64) -> Self {
        self.pow_rat(rat_of(n, d))
    }

    pub fn powi(&self, k: i64) -> Self {
        self.pow_rat(BigRational::from_integer(k.into()))
    }

    pub fn sqrt(&self) -> Self {
        self.pow_ratio(1, 2)
    }

    pub fn pow_rat(&self, k: BigRational) -> Self {
        self.pow_expr(&Expr::rational(k))
    }

    /// `self^e` with light folding.
    pub fn pow_expr(&self, e: &Expr) -> Self {
        if e.is_zero() {
            return Expr::one();
        }
        if e.is_one() {
            return self.clone();
        }
        if let (Some(c), Some(k)) = (self.as_const(), e.as_rational()) {
            if k.is_integer() {
                let ki: i64 = k.to_integer().try_into().unwrap_or(i64::MAX);
                if let Some(v) = c.powi(ki) {
                    return Expr::constant(v);
                }
            }
            if c.is_one() {
                return Expr::one();
            }
        }
        Expr::from_node(Node::Pow(self.clone(), e.clone()))
    }

    /// Sum with flattening and constant folding of the two operands.
    pub fn add_expr(&self, o: &Expr) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_const(), o.as_const()) {
            return Expr::constant(a + b);
        }
        let mut v = Vec::new();
        for x in [self, o] {
            match x.node() {
                Node::Add(xs) => v.extend(xs.iter().cloned()),
                _ => v.push(x.clone()),
            }
        }
        Expr::from_node(Node::Add(v))
    }

    /// Product with flattening and constant folding of the two operands.
    pub fn mul_expr(&self, o: &Expr) -> Self {
        if self.is_zero() || o.is_zero() {
            return Expr::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_const(), o.as_const()) {
            return Expr::constant(a * b);
        }
        let mut v = Vec::new();
        for x in [self, o] {
            match x.node() {
                Node::Mul(xs) => v.extend(xs.iter().cloned()),
                _ => v.push(x.clone()),
            }
        }
        Expr::from_node(Node::Mul(v))
    }

    pub fn scale(&self, c: &Gq) -> Self {
        self.mul_expr(&Expr::constant(c.clone()))
    }

    pub fn sum<I: IntoIterator<Item = Expr>>(it: I) -> Self {
        it.into_iter().fold(Expr::zero(), |a, b| a.add_expr(&b))
    }

    pub fn product<I: IntoIterator<Item = Expr>>(it: I) -> Self {
        it.into_iter().fold(Expr::one(), |a, b| a.mul_expr(&b))
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Const(_) | Node::Sym(_) => vec![],
            Node::Add(xs) | Node::Mul(xs) => xs.iter().collect(),
            Node::Pow(b, e) => vec![b, e],
            Node::Sin(a) | Node::Cos(a) | Node::Exp(a) | Node::Hermite(_, a) => vec![a],
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if let Node::Sym(s) = e.node() {
                out.insert(*s);
            }
            stack.extend(e.children());
        }
        out
    }

    pub fn depends_on(&self, s: Symbol) -> bool {
        match self.node() {
            Node::Const(_) => false,
            Node::Sym(x) => *x == s,
            _ => self.children().into_iter().any(|c| c.depends_on(s)),
        }
    }

    /// Symbolic derivative with respect to a coordinate.
    pub fn diff(&self, s: Symbol) -> Result<Expr> {
        if !s.is_coordinate() {
            return Err(Error::ParameterNotCoordinate(s.name().to_string()));
        }
        self.diff_in(s)
    }

    fn diff_in(&self, s: Symbol) -> Result<Expr> {
        if !self.depends_on(s) {
            return Ok(Expr::zero());
        }
        Ok(match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Sym(x) => {
                if *x == s {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(xs) => {
                let mut acc = Expr::zero();
                for x in xs {
                    acc = acc.add_expr(&x.diff_in(s)?);
                }
                acc
            }
            Node::Mul(xs) => {
                let mut acc = Expr::zero();
                for (i, x) in xs.iter().enumerate() {
                    let dx = x.diff_in(s)?;
                    if dx.is_zero() {
                        continue;
                    }
                    let mut t = dx;
                    for (j, y) in xs.iter().enumerate() {
                        if i != j {
                            t = t.mul_expr(y);
                        }
                    }
                    acc = acc.add_expr(&t);
                }
                acc
            }
            Node::Pow(b, e) => {
                if e.depends_on(s) {
                    return Err(Error::Unsupported(format!(
                        "exponent depends on coordinate {s}"
                    )));
                }
                let em1 = e.add_expr(&Expr::int(-1));
                e.mul_expr(&b.pow_expr(&em1)).mul_expr(&b.diff_in(s)?)
            }
            Node::Sin(a) => a.cos().mul_expr(&a.diff_in(s)?),
            Node::Cos(a) => a.sin().scale(&Gq::int(-1)).mul_expr(&a.diff_in(s)?),
            Node::Exp(a) => self.mul_expr(&a.diff_in(s)?),
            Node::Hermite(n, a) => Expr::hermite(n - 1, a)
                .scale(&Gq::int(2 * *n as i64))
                .mul_expr(&a.diff_in(s)?),
        })
    }

    /// Replaces every occurrence of `s` by `v`.
    pub fn substitute(&self, s: Symbol, v: &Expr) -> Expr {
        if !self.depends_on(s) {
            return self.clone();
        }
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Sym(x) => {
                if *x == s {
                    v.clone()
                } else {
                    self.clone()
                }
            }
            Node::Add(xs) => Expr::sum(xs.iter().map(|x| x.substitute(s, v))),
            Node::Mul(xs) => Expr::product(xs.iter().map(|x| x.substitute(s, v))),
            Node::Pow(b, e) => b.substitute(s, v).pow_expr(&e.substitute(s, v)),
            Node::Sin(a) => a.substitute(s, v).sin(),
            Node::Cos(a) => a.substitute(s, v).cos(),
            Node::Exp(a) => a.substitute(s, v).exp(),
            Node::Hermite(n, a) => Expr::hermite(*n, &a.substitute(s, v)),
        }
    }

    /// Flattening, constant folding, neutral-element removal and merging
    /// of powers of identical bases. No distribution, no trig identities.
    pub fn simplify_basic(&self) -> Expr {
        match self.node() {
            Node::Const(_) | Node::Sym(_) => self.clone(),
            Node::Add(xs) => simplify_add(xs.iter().map(|x| x.simplify_basic()).collect()),
            Node::Mul(xs) => simplify_mul(xs.iter().map(|x| x.simplify_basic()).collect()),
            Node::Pow(b, e) => {
                let b = b.simplify_basic();
                let e = e.simplify_basic();
                if let (Node::Pow(bb, be), Some(k)) = (b.node(), e.as_rational()) {
                    if let (Some(a), true) = (be.as_rational(), k.is_integer()) {
                        return bb.pow_rat(a * k).simplify_basic();
                    }
                }
                b.pow_expr(&e)
            }
            Node::Sin(a) => a.simplify_basic().sin(),
            Node::Cos(a) => a.simplify_basic().cos(),
            Node::Exp(a) => a.simplify_basic().exp(),
            Node::Hermite(n, a) => Expr::hermite(*n, &a.simplify_basic()),
        }
    }

    /// Canonical expanded form; see [`Poly`].
    pub fn expand(&self) -> Expr {
        Poly::from_expr(self).to_expr()
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_expr(self)
    }

    /// Complex double evaluation. For repeated evaluation use
    /// [`Expr::compile`].
    pub fn eval(&self, b: &Binding) -> Result<num_complex::Complex64> {
        Compiled::new(self).eval(b)
    }

    pub fn compile(&self) -> Compiled {
        Compiled::new(self)
    }

    /// Number of nodes in the tree, counting shared subtrees repeatedly.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }
}

fn split_coeff(e: &Expr) -> (Gq, Expr) {
    match e.node() {
        Node::Const(c) => (c.clone(), Expr::one()),
        Node::Mul(xs) => match xs.first().and_then(Expr::as_const) {
            Some(c) => {
                let rest: Vec<Expr> = xs[1..].to_vec();
                let rest = if rest.len() == 1 {
                    rest.into_iter().next().unwrap()
                } else {
                    Expr::from_node(Node::Mul(rest))
                };
                (c.clone(), rest)
            }
            None => (Gq::one(), e.clone()),
        },
        _ => (Gq::one(), e.clone()),
    }
}

fn simplify_add(xs: Vec<Expr>) -> Expr {
    let mut flat = Vec::new();
    for x in xs {
        match x.node() {
            Node::Add(ys) => flat.extend(ys.iter().cloned()),
            _ => flat.push(x),
        }
    }
    let mut grouped: std::collections::BTreeMap<Expr, Gq> = Default::default();
    for x in flat {
        let (c, rest) = split_coeff(&x);
        *grouped.entry(rest).or_default() += &c;
    }
    let mut out: Vec<Expr> = grouped
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(rest, c)| simplify_mul(vec![Expr::constant(c), rest]))
        .collect();
    out.sort();
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().unwrap(),
        _ => Expr::from_node(Node::Add(out)),
    }
}

fn simplify_mul(xs: Vec<Expr>) -> Expr {
    let mut flat = Vec::new();
    for x in xs {
        match x.node() {
            Node::Mul(ys) => flat.extend(ys.iter().cloned()),
            _ => flat.push(x),
        }
    }
    let mut c = Gq::one();
    let mut powers: std::collections::BTreeMap<Expr, BigRational> = Default::default();
    let mut others = Vec::new();
    for x in flat {
        match x.node() {
            Node::Const(k) => c = &c * k,
            Node::Pow(b, e) if e.as_rational().is_some() && b.as_const().is_none() => {
                *powers.entry(b.clone()).or_insert_with(BigRational::zero) +=
                    e.as_rational().unwrap();
            }
            Node::Pow(..) => others.push(x),
            _ => {
                *powers.entry(x).or_insert_with(BigRational::zero) += BigRational::one();
            }
        }
    }
    if c.is_zero() {
        return Expr::zero();
    }
    let mut out: Vec<Expr> = powers
        .into_iter()
        .filter(|(_, k)| !k.is_zero())
        .map(|(b, k)| b.pow_rat(k))
        .collect();
    out.extend(others);
    out.sort();
    if !c.is_one() {
        out.insert(0, Expr::constant(c));
    }
    match out.len() {
        0 => Expr::one(),
        1 => out.pop().unwrap(),
        _ => Expr::from_node(Node::Mul(out)),
    }
}

/// Module-level forms of the kernel operations.
pub fn diff(e: &Expr, s: Symbol) -> Result<Expr> {
    e.diff(s)
}

pub fn eval(e: &Expr, b: &Binding) -> Result<num_complex::Complex64> {
    e.eval(b)
}

pub fn simplify_basic(e: &Expr) -> Expr {
    e.simplify_basic()
}

pub fn substitute(e: &Expr, s: Symbol, v: &Expr) -> Expr {
    e.substitute(s, v)
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, &o)
            }
        }
        impl<'a> $tr<&'a Expr> for &'a Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, o)
            }
        }
        impl<'a> $tr<&'a Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, o)
            }
        }
        impl<'a> $tr<Expr> for &'a Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, &o)
            }
        }
        impl $tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, o: i64) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, &Expr::int(o))
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_expr(b));
binop!(Mul, mul, |a, b| a.mul_expr(b));
binop!(Sub, sub, |a, b| a.add_expr(&b.scale(&Gq::int(-1))));
binop!(Div, div, |a, b| a.mul_expr(&b.powi(-1)));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&Gq::int(-1))
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&Gq::int(-1))
    }
}

// ---- rendering ----

fn is_atomic(e: &Expr) -> bool {
    match e.node() {
        Node::Sym(_) | Node::Sin(_) | Node::Cos(_) | Node::Exp(_) | Node::Hermite(..) => true,
        Node::Const(c) => c.is_real() && !c.re.is_negative() && c.re.is_integer(),
        _ => false,
    }
}

/// Leading sign of a term, used to print sums with ` - `.
fn negated_term(e: &Expr) -> Option<Expr> {
    match e.node() {
        Node::Const(c) if c.is_negative_like() => Some(Expr::constant(-c)),
        Node::Mul(xs) => {
            let c = xs.first()?.as_const()?;
            if !c.is_negative_like() {
                return None;
            }
            let mut v = xs.clone();
            v[0] = Expr::constant(-c);
            if v[0].is_one() {
                v.remove(0);
            }
            Some(if v.len() == 1 {
                v.pop().unwrap()
            } else {
                Expr::from_node(Node::Mul(v))
            })
        }
        _ => None,
    }
}

fn fmt_factor(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Node::Add(_) | Node::Mul(_) => write!(f, "({e})"),
        Node::Const(c) if !c.is_real() || c.re.is_negative() => write!(f, "({e})"),
        _ => write!(f, "{e}"),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write!(f, "{c}"),
            Node::Sym(s) => write!(f, "{s}"),
            Node::Add(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    match (i, negated_term(x)) {
                        (0, _) => write!(f, "{x}")?,
                        (_, Some(n)) => write!(f, " - {n}")?,
                        (_, None) => write!(f, " + {x}")?,
                    }
                }
                Ok(())
            }
            Node::Mul(xs) => {
                let mut rest = &xs[..];
                if let Some(c) = xs.first().and_then(Expr::as_const) {
                    if (-c).is_one() && xs.len() > 1 {
                        f.write_str("-")?;
                        rest = &xs[1..];
                    }
                }
                for (i, x) in rest.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    match x.as_const() {
                        Some(c) if i == 0 && c.is_real() => write!(f, "{c}")?,
                        _ => fmt_factor(x, f)?,
                    }
                }
                Ok(())
            }
            Node::Pow(b, e) => {
                if is_atomic(b) {
                    write!(f, "{b}")?;
                } else {
                    write!(f, "({b})")?;
                }
                if is_atomic(e) {
                    write!(f, "^{e}")
                } else {
                    write!(f, "^({e})")
                }
            }
            Node::Sin(a) => write!(f, "sin({a})"),
            Node::Cos(a) => write!(f, "cos({a})"),
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Hermite(n, a) => write!(f, "hermite({n}, {a})"),
        }
    }
}

/// Short constructors for the coordinate and parameter symbols.
pub mod vars {
    use super::{Expr, Symbol};

    pub fn theta() -> Expr {
        Expr::sym(Symbol::Theta)
    }
    pub fn psi() -> Expr {
        Expr::sym(Symbol::Psi)
    }
    pub fn phi() -> Expr {
        Expr::sym(Symbol::Phi)
    }
    pub fn r() -> Expr {
        Expr::sym(Symbol::R)
    }
    pub fn x() -> Expr {
        Expr::sym(Symbol::X)
    }
    pub fn q() -> Expr {
        Expr::sym(Symbol::Q)
    }
    pub fn m() -> Expr {
        Expr::sym(Symbol::M)
    }
    pub fn twol() -> Expr {
        Expr::sym(Symbol::TwoL)
    }
    pub fn omega() -> Expr {
        Expr::sym(Symbol::Omega)
    }
}

#[cfg(test)]
mod tests {
    use super::vars::*;
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn at(pairs: &[(Symbol, f64)]) -> Binding {
        let mut b = Binding::new();
        for &(s, v) in pairs {
            b.set(s, v);
        }
        b
    }

    #[test]
    fn diff_basic_rules() {
        assert_eq!(theta().sin().diff(Symbol::Theta).unwrap(), theta().cos());
        assert!(Expr::int(7).diff(Symbol::Theta).unwrap().is_zero());
        let e = Expr::hermite(3, &r()).diff(Symbol::R).unwrap().expand();
        assert_eq!(e, (Expr::hermite(2, &r()) * 6).expand());
    }

    #[test]
    fn diff_wrt_parameter_is_rejected() {
        let err = (q() * theta()).diff(Symbol::Q).unwrap_err();
        assert!(err.to_string().starts_with("parameter not a coordinate"));
    }

    #[test]
    fn hermite_diff_matches_expanded_polynomial() {
        // H3 = 8x^3 - 12x, so H3' = 24x^2 - 12 = 6 H2.
        let h3 = x().powi(3) * 8 - x() * 12;
        let lhs = h3.diff(Symbol::X).unwrap().expand();
        let h2 = x().powi(2) * 4 - Expr::int(2);
        assert_eq!(lhs, (h2 * 6).expand());
    }

    #[test]
    fn eval_examples() {
        let v = theta().sin().eval(&at(&[(Symbol::Theta, PI / 2.0)])).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let h = Expr::hermite(2, &x()).eval(&at(&[(Symbol::X, 1.0)])).unwrap();
        assert_eq!(h, Complex64::new(2.0, 0.0));
        let c = (Expr::i() * psi().cos()).eval(&at(&[(Symbol::Psi, 0.0)])).unwrap();
        assert_eq!(c, Complex64::new(0.0, 1.0));
    }

    #[test]
    fn eval_errors() {
        let e = theta() * q();
        assert!(matches!(
            e.eval(&at(&[(Symbol::Theta, 1.0)])),
            Err(Error::Unbound(_))
        ));
        let s = theta().powi(-1);
        assert_eq!(s.eval(&at(&[(Symbol::Theta, 0.0)])), Err(Error::Singular));
    }

    #[test]
    fn simplify_basic_examples() {
        let e = Expr::from_node(Node::Add(vec![
            Expr::from_node(Node::Mul(vec![Expr::one(), theta().sin()])),
            Expr::zero(),
        ]));
        assert_eq!(e.simplify_basic(), theta().sin());
        let sq = Expr::from_node(Node::Mul(vec![theta().sin(), theta().sin()]));
        assert_eq!(sq.simplify_basic(), theta().sin().powi(2));
        let g = Expr::from_node(Node::Mul(vec![
            Expr::constant(Gq::complex(2, 1, 3, 1)),
            Expr::constant(Gq::complex(1, 1, -1, 1)),
        ]));
        assert_eq!(g.simplify_basic(), Expr::constant(Gq::complex(5, 1, 1, 1)));
    }

    #[test]
    fn substitute_examples() {
        let e = q() * theta().cot();
        let s = e.substitute(Symbol::Q, &(q() + 1));
        assert_eq!(s.expand(), ((q() + 1) * theta().cot()).expand());
        assert_eq!(theta().sin().substitute(Symbol::Psi, &r()), theta().sin());
        let u = psi().sin() * theta().sin();
        let hw = u.pow_expr(&twol());
        let four = hw.substitute(Symbol::TwoL, &Expr::int(4));
        assert_eq!(four.expand(), u.powi(4).expand());
    }

    #[test]
    fn render_is_deterministic_and_readable() {
        let e = (Expr::ratio(-1, 2) * theta().sin() + q() * psi().cos().powi(2)).simplify_basic();
        assert_eq!(e.to_string(), "-1/2*sin(theta) + q*cos(psi)^2");
        assert_eq!(theta().sin().pow_ratio(1, 2).to_string(), "sin(theta)^(1/2)");
    }
}
