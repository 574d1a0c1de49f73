//! Floating-point evaluation. An [`Expr`] is compiled once into a tape of
//! unique subexpressions, then evaluated at many bindings.

use std::collections::HashMap;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::{Expr, Node, Symbol};
use crate::error::{Error, Result};

/// Values for symbols. Parameters are bound to (usually real) numbers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Binding {
    vals: [Option<Complex64>; Symbol::COUNT],
}

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, s: Symbol, v: impl Into<Complex64>) -> &mut Self {
        self.vals[s.slot()] = Some(v.into());
        self
    }

    pub fn with(mut self, s: Symbol, v: impl Into<Complex64>) -> Self {
        self.set(s, v);
        self
    }

    pub fn get(&self, s: Symbol) -> Option<Complex64> {
        self.vals[s.slot()]
    }

    /// Bound symbols and their real parts, in symbol order.
    pub fn entries(&self) -> Vec<(Symbol, f64)> {
        Symbol::ALL
            .iter()
            .filter_map(|&s| self.get(s).map(|v| (s, v.re)))
            .collect()
    }
}

#[derive(Clone, Debug)]
enum Op {
    Const(Complex64),
    Sym(Symbol),
    Add(Vec<usize>),
    Mul(Vec<usize>),
    PowI(usize, i32),
    PowF(usize, f64),
    Pow(usize, usize),
    Sin(usize),
    Cos(usize),
    Exp(usize),
    Hermite(u32, usize),
}

/// A compiled expression; shared subtrees are evaluated once.
#[derive(Clone, Debug)]
pub struct Compiled {
    ops: Vec<Op>,
}

struct Builder {
    ops: Vec<Op>,
    seen: HashMap<Expr, usize>,
}

impl Builder {
    fn push(&mut self, e: &Expr) -> usize {
        if let Some(&i) = self.seen.get(e) {
            return i;
        }
        let op = match e.node() {
            Node::Const(c) => Op::Const(c.to_complex()),
            Node::Sym(s) => Op::Sym(*s),
            Node::Add(xs) => Op::Add(xs.iter().map(|x| self.push(x)).collect()),
            Node::Mul(xs) => Op::Mul(xs.iter().map(|x| self.push(x)).collect()),
            Node::Pow(b, x) => {
                let bi = self.push(b);
                match x.as_rational() {
                    Some(k) if k.is_integer() && k.to_integer().to_i32().is_some() => {
                        Op::PowI(bi, k.to_integer().to_i32().unwrap())
                    }
                    Some(k) => Op::PowF(bi, k.to_f64().unwrap_or(f64::NAN)),
                    None => {
                        let xi = self.push(x);
                        Op::Pow(bi, xi)
                    }
                }
            }
            Node::Sin(a) => Op::Sin(self.push(a)),
            Node::Cos(a) => Op::Cos(self.push(a)),
            Node::Exp(a) => Op::Exp(self.push(a)),
            Node::Hermite(n, a) => Op::Hermite(*n, self.push(a)),
        };
        self.ops.push(op);
        let i = self.ops.len() - 1;
        self.seen.insert(e.clone(), i);
        i
    }
}

/// `H_n(x)` by the three-term recurrence.
pub fn hermite_value(n: u32, x: Complex64) -> Complex64 {
    let mut h0 = Complex64::new(1.0, 0.0);
    if n == 0 {
        return h0;
    }
    let mut h1 = x * 2.0;
    for k in 1..n {
        let h2 = x * h1 * 2.0 - h0 * (2.0 * k as f64);
        h0 = h1;
        h1 = h2;
    }
    h1
}

impl Compiled {
    pub fn new(e: &Expr) -> Self {
        let mut b = Builder {
            ops: Vec::new(),
            seen: HashMap::new(),
        };
        b.push(e);
        Compiled { ops: b.ops }
    }

    pub fn eval(&self, bind: &Binding) -> Result<Complex64> {
        let mut v: Vec<Complex64> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let x = match op {
                Op::Const(c) => *c,
                Op::Sym(s) => bind
                    .get(*s)
                    .ok_or_else(|| Error::Unbound(s.name().to_string()))?,
                Op::Add(xs) => xs.iter().map(|&i| v[i]).sum(),
                Op::Mul(xs) => xs.iter().map(|&i| v[i]).product(),
                Op::PowI(b, k) => {
                    let base = v[*b];
                    if *k < 0 && base.is_zero() {
                        return Err(Error::Singular);
                    }
                    base.powi(*k)
                }
                Op::PowF(b, k) => {
                    let base = v[*b];
                    if base.is_zero() {
                        if *k < 0.0 {
                            return Err(Error::Singular);
                        }
                        Complex64::zero()
                    } else if base.im == 0.0 && base.re > 0.0 {
                        Complex64::new(base.re.powf(*k), 0.0)
                    } else {
                        base.powf(*k)
                    }
                }
                Op::Pow(b, e) => {
                    let (base, ex) = (v[*b], v[*e]);
                    if base.is_zero() {
                        if ex.re < 0.0 {
                            return Err(Error::Singular);
                        }
                        Complex64::zero()
                    } else {
                        base.powc(ex)
                    }
                }
                Op::Sin(a) => v[*a].sin(),
                Op::Cos(a) => v[*a].cos(),
                Op::Exp(a) => v[*a].exp(),
                Op::Hermite(n, a) => hermite_value(*n, v[*a]),
            };
            if !x.re.is_finite() || !x.im.is_finite() {
                return Err(Error::Singular);
            }
            v.push(x);
        }
        Ok(*v.last().expect("non-empty tape"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symx::vars::x;

    #[test]
    fn hermite_recurrence_matches_explicit_polynomials() {
        // H_n for n <= 8, expanded by hand from H_{k+1} = 2x H_k - 2k H_{k-1}.
        let coeffs: [&[f64]; 9] = [
            &[1.0],
            &[0.0, 2.0],
            &[-2.0, 0.0, 4.0],
            &[0.0, -12.0, 0.0, 8.0],
            &[12.0, 0.0, -48.0, 0.0, 16.0],
            &[0.0, 120.0, 0.0, -160.0, 0.0, 32.0],
            &[-120.0, 0.0, 720.0, 0.0, -480.0, 0.0, 64.0],
            &[0.0, -1680.0, 0.0, 3360.0, 0.0, -1344.0, 0.0, 128.0],
            &[1680.0, 0.0, -13440.0, 0.0, 13440.0, 0.0, -3584.0, 0.0, 256.0],
        ];
        for (n, c) in coeffs.iter().enumerate() {
            for &xv in &[-1.3f64, 0.2, 0.7, 2.1] {
                let poly: f64 = c.iter().enumerate().map(|(k, a)| a * xv.powi(k as i32)).sum();
                let e = Expr::hermite(n as u32, &x());
                let val = e.eval(&Binding::new().with(Symbol::X, xv)).unwrap();
                assert!((val.re - poly).abs() <= 1e-12 * poly.abs().max(1.0), "n={n} x={xv}");
            }
        }
    }

    #[test]
    fn shared_subtrees_compile_once() {
        let s = x().sin();
        let e = &s * &s + &s;
        let c = e.compile();
        // x, sin(x), sin*sin, sum
        assert_eq!(c.ops.len(), 4);
    }
}
