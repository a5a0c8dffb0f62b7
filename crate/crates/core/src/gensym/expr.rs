//! Complex arithmetic expressions for user-supplied baselines.
//!
//! Grammar: numbers, identifiers, `+ - * / ^`, unary minus, parentheses and
//! calls `f(arg)`. `^` is right-associative and binds tighter than unary
//! minus, so `-u^2` is `-(u^2)`. The constants `i`, `pi` and `e` are built in.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Atan,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "atan" => Func::Atan,
            _ => return None,
        })
    }

    fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Func::Exp => z.exp(),
            Func::Ln => z.ln(),
            Func::Sqrt => z.sqrt(),
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Tan => z.tan(),
            Func::Sinh => z.sinh(),
            Func::Cosh => z.cosh(),
            Func::Tanh => z.tanh(),
            Func::Atan => z.atan(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Complex64),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Expression(format!("bad number `{text}` at offset {start}")))?;
            out.push(Token::Num(v));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Expression(format!(
                "unexpected character `{c}` at offset {i}"
            )));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr> {
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

    fn product(&mut self) -> Result<Expr> {
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

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.pos;
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(Complex64::new(v, 0.0)))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if self.eat('(') {
                    let f = Func::lookup(&name)
                        .ok_or_else(|| Error::Expression(format!("unknown function `{name}`")))?;
                    let arg = self.sum()?;
                    if !self.eat(')') {
                        return Err(Error::Expression(format!(
                            "missing `)` after argument of `{name}`"
                        )));
                    }
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                Ok(match name.as_str() {
                    "i" => Expr::Num(Complex64::new(0.0, 1.0)),
                    "pi" => Expr::Num(Complex64::new(std::f64::consts::PI, 0.0)),
                    "e" => Expr::Num(Complex64::new(std::f64::consts::E, 0.0)),
                    _ => Expr::Var(name),
                })
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(Error::Expression("missing `)`".into()));
                }
                Ok(e)
            }
            Some(t) => Err(Error::Expression(format!(
                "unexpected token {t:?} at position {at}"
            ))),
            None => Err(Error::Expression("unexpected end of expression".into())),
        }
    }
}

/// Variable bindings for evaluation.
pub type Env = BTreeMap<String, Complex64>;

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser {
            tokens: tokenize(src)?,
            pos: 0,
        };
        let e = p.sum()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Expression(format!("trailing input in `{src}`")));
        }
        Ok(e)
    }

    /// Names of all free variables.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => out.push(v.clone()),
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_vars(out),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn eval(&self, env: &Env) -> Result<Complex64> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var(name) => *env
                .get(name)
                .ok_or_else(|| Error::Expression(format!("unbound variable `{name}`")))?,
            // 0 - a keeps a +0 imaginary part on real negatives, so the
            // principal branches of sqrt and ln apply
            Expr::Neg(a) => Complex64::new(0.0, 0.0) - a.eval(env)?,
            Expr::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Expr::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Expr::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Expr::Div(a, b) => a.eval(env)? / b.eval(env)?,
            Expr::Pow(a, b) => {
                let base = a.eval(env)?;
                let exp = b.eval(env)?;
                if exp.im == 0.0 && exp.re.fract() == 0.0 && exp.re.abs() <= 64.0 {
                    base.powi(exp.re as i32)
                } else {
                    base.powc(exp)
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(env)?),
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if v.im == 0.0 => write!(f, "{}", v.re),
            Expr::Num(v) => write!(f, "({}+{}*i)", v.re, v.im),
            Expr::Var(n) => write!(f, "{n}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", format!("{func:?}").to_lowercase()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, vars: &[(&str, Complex64)]) -> Complex64 {
        let env: Env = vars.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Expr::parse(src).unwrap().eval(&env).unwrap()
    }

    #[test]
    fn precedence() {
        let r = |v: f64| Complex64::new(v, 0.0);
        assert_eq!(eval("1 + 2 * 3", &[]), r(7.0));
        assert_eq!(eval("2 ^ 3 ^ 2", &[]), r(512.0));
        assert_eq!(eval("-u^2", &[("u", r(3.0))]), r(-9.0));
        assert_eq!(eval("(1 - 2) - 3", &[]), r(-4.0));
        assert_eq!(eval("8 / 4 / 2", &[]), r(1.0));
        assert_eq!(eval("2e-1 * 10", &[]), r(2.0));
    }

    #[test]
    fn complex_functions() {
        let v = eval("exp(i * pi)", &[]);
        assert!((v + 1.0).norm() < 1e-15);
        let v = eval(
            "i*u*exp(-0.5*t)",
            &[
                ("u", Complex64::new(2.0, 0.0)),
                ("t", Complex64::new(1.0, 0.0)),
            ],
        );
        assert!((v - Complex64::new(0.0, 2.0 * (-0.5f64).exp())).norm() < 1e-15);
        assert!((eval("sqrt(-4)", &[]) - Complex64::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn errors_are_reported() {
        assert_eq!(Expr::parse("1 +").unwrap_err().kind(), "expression");
        assert_eq!(Expr::parse("foo(1)").unwrap_err().kind(), "expression");
        assert_eq!(Expr::parse("(1").unwrap_err().kind(), "expression");
        assert_eq!(Expr::parse("1 $ 2").unwrap_err().kind(), "expression");
        let e = Expr::parse("x + 1").unwrap();
        assert_eq!(e.eval(&Env::new()).unwrap_err().kind(), "expression");
        assert_eq!(e.variables(), vec!["x".to_string()]);
    }
}
