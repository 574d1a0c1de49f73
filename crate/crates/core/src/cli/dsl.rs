//! Operator expressions for ad-hoc checks.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := '-' unary | atom
//! atom    := number | name ['(' integer ')'] | '[' expr ',' expr ']' | '(' expr ')'
//! number  := digits ['.' digits]
//! ```
//!
//! Names: Lp Lm L3 Rp Rm R3 (with an argument: the charge-`p` form),
//! A1 A1d A2 A2d (full form, or reduced with an argument), a3 a3d a4 a4d,
//! Casimir, Hq, Hm, H4. `Casimir(q)`, `Hq(q)` and `Hm(m)` fix the charge.

use std::fmt;

use crate::error::{Error, Result};
use crate::opalg::DiffOp;
use crate::osc3d::{self, Form, Osc};
use crate::su2::{self, Gen, Side};
use crate::symx::{Expr, Gq, Symbol};

pub const GENERATORS: [&str; 17] = [
    "Lp", "Lm", "L3", "Rp", "Rm", "R3", "A1", "A1d", "A2", "A2d", "a3", "a3d", "a4", "a4d", "Casimir", "Hq", "Hm",
];
const EXTRA: [&str; 1] = ["H4"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpAst {
    Gen { name: String, arg: Option<i64> },
    /// Exact decimal `num / 10^scale`.
    Num { num: i64, scale: u32 },
    Neg(Box<OpAst>),
    Add(Box<OpAst>, Box<OpAst>),
    Sub(Box<OpAst>, Box<OpAst>),
    Mul(Box<OpAst>, Box<OpAst>),
    Comm(Box<OpAst>, Box<OpAst>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Num(i64, u32),
    Int(i64),
    Sym(char),
}

struct Lexer {
    toks: Vec<(usize, Tok)>,
}

fn lex(s: &str) -> Result<Lexer> {
    let cs: Vec<char> = s.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            toks.push((st, Tok::Name(cs[st..i].iter().collect())));
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let mut digits: String = cs[st..i].iter().collect();
            let mut scale = 0;
            if i < cs.len() && cs[i] == '.' {
                i += 1;
                let fs = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                if fs == i {
                    return Err(syntax(i, "expected digits after '.'"));
                }
                digits.extend(&cs[fs..i]);
                scale = (i - fs) as u32;
            }
            let v: i64 = digits.parse().map_err(|_| syntax(st, "number too large"))?;
            toks.push((st, if scale == 0 { Tok::Int(v) } else { Tok::Num(v, scale) }));
        } else if "+-*(),[]".contains(c) {
            toks.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(syntax(i, &format!("unexpected character '{c}'")));
        }
    }
    Ok(Lexer { toks })
}

fn syntax(pos: usize, msg: &str) -> Error {
    Error::Syntax {
        pos,
        msg: msg.to_string(),
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(syntax(self.pos(), &format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<OpAst> {
        let mut a = self.term()?;
        loop {
            if self.eat('+') {
                a = OpAst::Add(Box::new(a), Box::new(self.term()?));
            } else if self.eat('-') {
                a = OpAst::Sub(Box::new(a), Box::new(self.term()?));
            } else {
                return Ok(a);
            }
        }
    }

    fn term(&mut self) -> Result<OpAst> {
        let mut a = self.unary()?;
        while self.eat('*') {
            a = OpAst::Mul(Box::new(a), Box::new(self.unary()?));
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<OpAst> {
        if self.eat('-') {
            return Ok(OpAst::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<OpAst> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.at += 1;
                Ok(OpAst::Num { num: v, scale: 0 })
            }
            Some(Tok::Num(v, s)) => {
                self.at += 1;
                Ok(OpAst::Num { num: v, scale: s })
            }
            Some(Tok::Name(n)) => {
                self.at += 1;
                if !GENERATORS.contains(&n.as_str()) && !EXTRA.contains(&n.as_str()) {
                    return Err(Error::UnknownGenerator {
                        name: n,
                        valid: GENERATORS.join(", "),
                    });
                }
                let arg = if self.eat('(') {
                    let neg = self.eat('-');
                    let v = match self.peek() {
                        Some(Tok::Int(v)) => *v,
                        _ => return Err(syntax(self.pos(), "expected an integer parameter")),
                    };
                    self.at += 1;
                    self.expect(')')?;
                    Some(if neg { -v } else { v })
                } else {
                    None
                };
                check_arity(&n, arg)?;
                Ok(OpAst::Gen { name: n, arg })
            }
            Some(Tok::Sym('[')) => {
                self.at += 1;
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                self.expect(']')?;
                Ok(OpAst::Comm(Box::new(a), Box::new(b)))
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let a = self.expr()?;
                self.expect(')')?;
                Ok(a)
            }
            _ => Err(syntax(pos, "expected a generator name, number, '[' or '('")),
        }
    }
}

fn check_arity(name: &str, arg: Option<i64>) -> Result<()> {
    let takes = !matches!(name, "a3" | "a3d" | "a4" | "a4d" | "H4");
    if arg.is_some() && !takes {
        return Err(Error::Arity(format!("{name} takes no parameter")));
    }
    Ok(())
}

pub fn parse_op_expr(text: &str) -> Result<OpAst> {
    let lx = lex(text)?;
    let mut p = Parser {
        toks: lx.toks,
        at: 0,
        end: text.chars().count(),
    };
    let a = p.expr()?;
    if p.at != p.toks.len() {
        return Err(syntax(p.pos(), "expected '+', '-', '*' or end of input"));
    }
    Ok(a)
}

impl OpAst {
    fn prec(&self) -> u8 {
        match self {
            OpAst::Add(..) | OpAst::Sub(..) => 1,
            OpAst::Mul(..) => 2,
            OpAst::Neg(..) => 3,
            _ => 4,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.prec() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            OpAst::Gen { name, arg: None } => f.write_str(name)?,
            OpAst::Gen { name, arg: Some(a) } => write!(f, "{name}({a})")?,
            OpAst::Num { num, scale: 0 } => write!(f, "{num}")?,
            OpAst::Num { num, scale } => {
                let d = 10i64.pow(*scale);
                write!(f, "{}.{:0w$}", num / d, num % d, w = *scale as usize)?
            }
            OpAst::Neg(a) => {
                f.write_str("-")?;
                a.write(f, 3)?;
            }
            OpAst::Add(a, b) => {
                a.write(f, 1)?;
                f.write_str(" + ")?;
                b.write(f, 2)?;
            }
            OpAst::Sub(a, b) => {
                a.write(f, 1)?;
                f.write_str(" - ")?;
                b.write(f, 2)?;
            }
            OpAst::Mul(a, b) => {
                a.write(f, 2)?;
                f.write_str("*")?;
                b.write(f, 3)?;
            }
            OpAst::Comm(a, b) => {
                f.write_str("[")?;
                a.write(f, 0)?;
                f.write_str(", ")?;
                b.write(f, 0)?;
                f.write_str("]")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }

    /// Top-level summands with signs, commutators opened into `AB` and
    /// `-BA`, so that exact cancellation inside a piece cannot hide a
    /// vanishing check.
    pub fn pieces(&self) -> Result<Vec<DiffOp>> {
        let mut out = Vec::new();
        self.collect(false, &mut out)?;
        Ok(out)
    }

    fn collect(&self, neg: bool, out: &mut Vec<DiffOp>) -> Result<()> {
        let sign = |op: DiffOp| if neg { -op } else { op };
        match self {
            OpAst::Add(a, b) => {
                a.collect(neg, out)?;
                b.collect(neg, out)
            }
            OpAst::Sub(a, b) => {
                a.collect(neg, out)?;
                b.collect(!neg, out)
            }
            OpAst::Neg(a) => a.collect(!neg, out),
            OpAst::Comm(a, b) => {
                let (x, y) = (a.build()?, b.build()?);
                out.push(sign(&x * &y));
                out.push(sign(-(&y * &x)));
                Ok(())
            }
            _ => {
                out.push(sign(self.build()?));
                Ok(())
            }
        }
    }

    pub fn build(&self) -> Result<DiffOp> {
        Ok(match self {
            OpAst::Gen { name, arg } => generator(name, *arg)?,
            OpAst::Num { num, scale } => DiffOp::scalar(Expr::constant(Gq::ratio(*num, 10i64.pow(*scale)))),
            OpAst::Neg(a) => -a.build()?,
            OpAst::Add(a, b) => a.build()? + b.build()?,
            OpAst::Sub(a, b) => a.build()? - b.build()?,
            OpAst::Mul(a, b) => a.build()? * b.build()?,
            OpAst::Comm(a, b) => {
                let (x, y) = (a.build()?, b.build()?);
                &x * &y - &y * &x
            }
        })
    }
}

impl fmt::Display for OpAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

/// The operator behind a DSL name.
pub fn generator(name: &str, arg: Option<i64>) -> Result<DiffOp> {
    check_arity(name, arg)?;
    let p = arg.map(Expr::int);
    if let Some(g) = Gen::from_name(name) {
        return Ok(match p {
            None => su2::raw(g),
            Some(p) => su2::param(g, &p),
        });
    }
    if let Some(o) = Osc::from_name(name) {
        return Ok(match (o.takes_charge(), p) {
            (true, Some(p)) => osc3d::reduced_op(o, &p, Form::Corrected),
            _ => osc3d::full(o, Form::Corrected),
        });
    }
    let fix = |op: DiffOp, s: Symbol| match &p {
        Some(v) => op.substitute(s, v),
        None => op,
    };
    match name {
        "Casimir" => Ok(match p {
            None => su2::casimir(&su2::build_raw_generators(), Side::Left),
            Some(_) => fix(su2::printed_casimir_reduced(), Symbol::Q),
        }),
        "Hq" => Ok(fix(su2::printed_hq(), Symbol::Q)),
        "Hm" => Ok(fix(osc3d::hm(), Symbol::M)),
        "H4" => Ok(osc3d::h4(Form::Corrected)),
        _ => Err(Error::UnknownGenerator {
            name: name.into(),
            valid: GENERATORS.join(", "),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let a = parse_op_expr("[Lp, Lm] - 2*L3").unwrap();
        assert!(matches!(a, OpAst::Sub(ref l, _) if matches!(**l, OpAst::Comm(..))));
        let b = parse_op_expr("Lm(3)*Rm(2)").unwrap();
        assert_eq!(b.to_string(), "Lm(3)*Rm(2)");
        match parse_op_expr("Foo(1)") {
            Err(e) => assert!(e.to_string().contains("unknown generator Foo")),
            Ok(_) => panic!(),
        }
        assert!(matches!(parse_op_expr("a3(1)"), Err(Error::Arity(_))));
        assert!(matches!(parse_op_expr("Lp +"), Err(Error::Syntax { pos: 4, .. })));
        assert_eq!(parse_op_expr("Lm(-2)").unwrap().to_string(), "Lm(-2)");
        assert_eq!(parse_op_expr("0.25*Hq").unwrap().to_string(), "0.25*Hq");
    }

    #[test]
    fn pieces_sum_to_build() {
        let a = parse_op_expr("[L3,Rp] - (Lp - 2*Rm(1))").unwrap();
        let sum = a.pieces().unwrap().into_iter().fold(DiffOp::zero(), |x, y| x + y);
        assert_eq!(sum, a.build().unwrap());
    }

    fn ast() -> impl Strategy<Value = OpAst> {
        let leaf = prop_oneof![
            (0usize..GENERATORS.len(), proptest::option::of(-3i64..4)).prop_map(|(i, a)| {
                let name = GENERATORS[i].to_string();
                let arg = if check_arity(&name, a).is_ok() { a } else { None };
                OpAst::Gen { name, arg }
            }),
            (0i64..500, 0u32..3).prop_map(|(num, scale)| OpAst::Num { num, scale }),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| OpAst::Neg(Box::new(a))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| OpAst::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| OpAst::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| OpAst::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner).prop_map(|(a, b)| OpAst::Comm(Box::new(a), Box::new(b))),
            ]
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(a in ast()) {
            let text = a.to_string();
            let back = parse_op_expr(&text).unwrap();
            prop_assert_eq!(back.to_string(), text);
        }
    }
}
