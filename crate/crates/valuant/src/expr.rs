//! Expressions over integers, named symbols, `+ - * / ^` and parentheses.
//!
//! `^` binds tightest (right operand an integer literal, optionally negated),
//! then `* /`, then `+ -`; all left-associative. Unary minus sits between
//! `^` and `* /`, so `-x^2` is `-(x^2)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use valuant_core::{Elem, Field, Poly};

use crate::error::CliError;

/// Where an expression starts in the problem file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Origin {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Sym(String, usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

struct Lexed {
    toks: Vec<(Tok, usize)>,
    end: usize,
}

fn lex(src: &str, origin: Origin) -> Result<Lexed, CliError> {
    let chars: Vec<char> = src.chars().collect();
    let err = |col: usize, msg: String| CliError::Parse { line: origin.line, column: origin.column + col, message: msg };
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            toks.push((Tok::Int(digits.parse().expect("digits")), start));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^()".contains(c) {
            toks.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(err(i, format!("unexpected character `{c}`")));
        }
    }
    Ok(Lexed { toks, end: chars.len() })
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    origin: Origin,
}

impl Parser {
    fn err(&self, col: usize, msg: impl Into<String>) -> CliError {
        CliError::Parse { line: self.origin.line, column: self.origin.column + col, message: msg.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, CliError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, CliError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, CliError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, CliError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let negative = self.eat('-');
        let col = self.col();
        let n = match self.peek() {
            Some(Tok::Int(n)) => {
                let n: i64 = n.try_into().map_err(|_| self.err(col, "exponent too large"))?;
                self.pos += 1;
                n
            }
            _ => return Err(self.err(col, "exponent must be an integer literal")),
        };
        if paren && !self.eat(')') {
            return Err(self.err(self.col(), "expected `)`"));
        }
        if self.peek() == Some(&Tok::Op('^')) {
            return Err(self.err(self.col(), "chained `^` needs parentheses"));
        }
        Ok(Expr::Pow(Box::new(base), if negative { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Expr, CliError> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Sym(s, self.origin.column + col))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(self.err(self.col(), "expected `)`"));
                }
                Ok(e)
            }
            Some(Tok::Op(c)) => Err(self.err(col, format!("unexpected `{c}`"))),
            None => Err(self.err(col, "unexpected end of expression")),
        }
    }
}

/// Parses a whole expression; `origin` locates its first character.
pub fn parse_expr(src: &str, origin: Origin) -> Result<Expr, CliError> {
    let Lexed { toks, end } = lex(src, origin)?;
    let mut p = Parser { toks, pos: 0, end, origin };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(p.err(p.col(), "unexpected trailing input"));
    }
    Ok(e)
}

/// Symbols visible to an expression, as constants of `field`, plus an optional polynomial variable.
#[derive(Clone, Debug)]
pub struct Scope {
    pub field: Field,
    pub symbols: BTreeMap<String, Elem>,
    pub poly_var: Option<String>,
}

impl Scope {
    pub fn new(field: &Field) -> Scope {
        Scope { field: field.clone(), symbols: BTreeMap::new(), poly_var: None }
    }

    pub fn with_var(mut self, var: &str) -> Scope {
        self.poly_var = Some(var.to_string());
        self
    }

    /// Evaluates to a polynomial in `poly_var` over `field`.
    pub fn eval_poly(&self, e: &Expr, origin: Origin) -> Result<Poly, CliError> {
        let k = &self.field;
        let err = |col: usize, msg: String| CliError::Parse { line: origin.line, column: col, message: msg };
        Ok(match e {
            Expr::Int(n) => Poly::constant(k.from_bigint(n)),
            Expr::Sym(s, col) => {
                if self.poly_var.as_deref() == Some(s.as_str()) {
                    Poly::x(k)
                } else if let Some(c) = self.symbols.get(s) {
                    Poly::constant(c.clone())
                } else {
                    return Err(CliError::UndefinedSymbol { name: s.clone(), line: origin.line, column: *col });
                }
            }
            Expr::Neg(a) => self.eval_poly(a, origin)?.neg(k),
            Expr::Add(a, b) => self.eval_poly(a, origin)?.add(&self.eval_poly(b, origin)?, k),
            Expr::Sub(a, b) => self.eval_poly(a, origin)?.sub(&self.eval_poly(b, origin)?, k),
            Expr::Mul(a, b) => self.eval_poly(a, origin)?.mul(&self.eval_poly(b, origin)?, k),
            Expr::Div(a, b) => {
                let num = self.eval_poly(a, origin)?;
                let den = self.eval_poly(b, origin)?;
                match den.degree() {
                    Some(0) => num.scale(&k.inv(den.lc().expect("nonzero"))?, k),
                    None => return Err(CliError::Algebra(valuant_core::AlgebraError::DivisionByZero)),
                    Some(_) => return Err(err(first_column(b, origin), "division by a non-constant polynomial".into())),
                }
            }
            Expr::Pow(a, n) => {
                let base = self.eval_poly(a, origin)?;
                if *n >= 0 {
                    base.pow(*n as u32, k)
                } else if base.degree() == Some(0) {
                    Poly::constant(k.pow(base.lc().expect("nonzero"), *n)?)
                } else {
                    return Err(err(first_column(a, origin), "negative power of a non-constant polynomial".into()));
                }
            }
        })
    }

    /// Evaluates to a constant of `field`.
    pub fn eval_const(&self, e: &Expr, origin: Origin) -> Result<Elem, CliError> {
        let scope = Scope { poly_var: None, ..self.clone() };
        let p = scope.eval_poly(e, origin)?;
        Ok(p.coeff(0, &self.field))
    }
}

fn first_column(e: &Expr, origin: Origin) -> usize {
    match e {
        Expr::Sym(_, c) => *c,
        Expr::Neg(a) | Expr::Pow(a, _) => first_column(a, origin),
        Expr::Add(a, _) | Expr::Sub(a, _) | Expr::Mul(a, _) | Expr::Div(a, _) => first_column(a, origin),
        Expr::Int(_) => origin.column,
    }
}

/// Parses `src` as a polynomial in `scope`.
pub fn parse_poly(src: &str, origin: Origin, scope: &Scope) -> Result<Poly, CliError> {
    scope.eval_poly(&parse_expr(src, origin)?, origin)
}

pub fn parse_const(src: &str, origin: Origin, scope: &Scope) -> Result<Elem, CliError> {
    scope.eval_const(&parse_expr(src, origin)?, origin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f3t() -> Scope {
        let k = Field::functions(&Field::prime(3).unwrap(), "t");
        let mut s = Scope::new(&k);
        s.symbols.insert("t".into(), k.generator().unwrap());
        s.with_var("X")
    }

    #[test]
    fn precedence() {
        let o = Origin::default();
        let e = parse_expr("-x^2 + 3*y/z - w", o).unwrap();
        let sym = |s: &str, c| Box::new(Expr::Sym(s.into(), c));
        let expect = Expr::Sub(
            Box::new(Expr::Add(
                Box::new(Expr::Neg(Box::new(Expr::Pow(sym("x", 1), 2)))),
                Box::new(Expr::Div(Box::new(Expr::Mul(Box::new(Expr::Int(3.into())), sym("y", 9))), sym("z", 11))),
            )),
            sym("w", 15),
        );
        assert_eq!(e, expect);
        assert_eq!(parse_expr("2^(-3)", o).unwrap(), Expr::Pow(Box::new(Expr::Int(2.into())), -3));
    }

    #[test]
    fn errors_carry_positions() {
        let o = Origin { line: 4, column: 5 };
        match parse_expr("X^3 - * t", o) {
            Err(CliError::Parse { line: 4, column: 11, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_poly("X^2 - y", o, &f3t()) {
            Err(CliError::UndefinedSymbol { name, line: 4, column: 11 }) => assert_eq!(name, "y"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("(X + 1", o), Err(CliError::Parse { .. })));
        assert!(matches!(parse_expr("X^t", o), Err(CliError::Parse { .. })));
        assert!(matches!(parse_expr("X # 1", o), Err(CliError::Parse { .. })));
        assert!(matches!(parse_poly("1/X", o, &f3t()), Err(CliError::Parse { .. })));
    }

    #[test]
    fn evaluates_over_function_field() {
        let s = f3t();
        let k = s.field.clone();
        let t = k.generator().unwrap();
        let p = parse_poly("X^3 - X - 1/t", Origin::default(), &s).unwrap();
        let inv = k.inv(&t).unwrap();
        assert_eq!(p, Poly::from_coeffs(vec![k.neg(&inv), k.from_i64(-1), k.zero(), k.one()]));
        assert_eq!(parse_const("t^-1", Origin::default(), &s).unwrap(), inv);
        assert_eq!(parse_const("t^(-1)", Origin::default(), &s).unwrap(), inv);
    }

    proptest! {
        /// parse ∘ print is the identity on polynomials, hence parse ∘ print ∘ parse = parse.
        #[test]
        fn print_round_trip(coeffs in prop::collection::vec((0u32..3, 0u32..3, 0i64..3, 0u32..3), 0..5)) {
            let s = f3t();
            let k = s.field.clone();
            let t = k.generator().unwrap();
            let cs: Vec<Elem> = coeffs
                .iter()
                .map(|&(a, b, e, d)| {
                    let num = k.add(&k.from_i64(a as i64), &k.mul(&k.from_i64(b as i64), &k.pow(&t, e).unwrap()));
                    let den = k.add(&k.pow(&t, d as i64).unwrap(), &k.from_i64(a as i64 + 1));
                    k.div(&num, &den).unwrap_or_else(|_| num.clone())
                })
                .collect();
            let p = Poly::from_coeffs(cs);
            let printed = k.poly_to_string(&p, "X");
            let back = parse_poly(&printed, Origin::default(), &s).unwrap();
            prop_assert_eq!(&back, &p, "{}", printed);
            prop_assert_eq!(k.poly_to_string(&back, "X"), printed);
        }
    }
}
