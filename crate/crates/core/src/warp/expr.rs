//! A small expression language for warping functions.
//!
//! Grammar (see `docs/expressions.md`):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'pi' | 'e' | var | func '(' expr ')' | '(' expr ')'
//! var     := 't' | 't1' .. 't9'
//! func    := sin | cos | tan | sinh | cosh | tanh | exp | ln | sqrt
//! ```
//!
//! `t` and `t1` denote the same coordinate.

use std::fmt;

use super::jet::JetScalar;
use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    /// (φ, φ', φ'') at x.
    fn derivatives(self, x: f64) -> Result<(f64, f64, f64)> {
        Ok(match self {
            Func::Sin => (x.sin(), x.cos(), -x.sin()),
            Func::Cos => (x.cos(), -x.sin(), -x.cos()),
            Func::Tan => {
                let t = x.tan();
                let s = 1.0 + t * t;
                (t, s, 2.0 * t * s)
            }
            Func::Sinh => (x.sinh(), x.cosh(), x.sinh()),
            Func::Cosh => (x.cosh(), x.sinh(), x.cosh()),
            Func::Tanh => {
                let t = x.tanh();
                let s = 1.0 - t * t;
                (t, s, -2.0 * t * s)
            }
            Func::Exp => {
                let e = x.exp();
                (e, e, e)
            }
            Func::Ln => {
                if x <= 0.0 {
                    return Err(LabError::ExpressionEval(format!("ln of non-positive value {x}")));
                }
                (x.ln(), 1.0 / x, -1.0 / (x * x))
            }
            Func::Sqrt => {
                if x <= 0.0 {
                    return Err(LabError::ExpressionEval(format!(
                        "sqrt is not differentiable at non-positive value {x}"
                    )));
                }
                let s = x.sqrt();
                (s, 0.5 / s, -0.25 / (s * x))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Coordinate index (0-based).
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser { chars: src.char_indices().collect(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Number of coordinates referenced (highest variable index + 1).
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.arity().max(b.arity())
            }
        }
    }

    /// Evaluate over any jet type; `vars[i]` seeds coordinate `i`.
    pub fn eval<S: JetScalar>(&self, vars: &[S]) -> Result<S> {
        let like = &vars[0];
        Ok(match self {
            Expr::Const(c) => S::constant_like(*c, like),
            Expr::Var(i) => vars
                .get(*i)
                .cloned()
                .ok_or_else(|| LabError::ExpressionEval(format!("variable t{} not bound", i + 1)))?,
            Expr::Neg(a) => -a.eval(vars)?,
            Expr::Add(a, b) => a.eval(vars)? + b.eval(vars)?,
            Expr::Sub(a, b) => a.eval(vars)? - b.eval(vars)?,
            Expr::Mul(a, b) => a.eval(vars)? * b.eval(vars)?,
            Expr::Div(a, b) => {
                let d = b.eval(vars)?;
                if d.value() == 0.0 {
                    return Err(LabError::ExpressionEval("division by zero".into()));
                }
                a.eval(vars)? / d
            }
            Expr::Pow(a, b) => {
                let base = a.eval(vars)?;
                if b.arity() == 0 {
                    let p: f64 = b.eval(&[0.0])?;
                    power(&base, p)?
                } else {
                    {
                        // x^y = exp(y ln x)
                        let x = base.value();
                        let (l, dl, d2l) = Func::Ln.derivatives(x)?;
                        let ln = base.chain(l, dl, d2l);
                        let z = b.eval(vars)? * ln;
                        let ez = z.value().exp();
                        z.chain(ez, ez, ez)
                    }
                }
            }
            Expr::Call(f, a) => {
                let inner = a.eval(vars)?;
                let (p, dp, d2p) = f.derivatives(inner.value())?;
                inner.chain(p, dp, d2p)
            }
        })
    }
}

fn power<S: JetScalar>(base: &S, p: f64) -> Result<S> {
    let x = base.value();
    if p == 0.0 {
        return Ok(S::constant_like(1.0, base));
    }
    let integral = p.fract() == 0.0 && p.abs() < 64.0;
    if !integral && x <= 0.0 {
        return Err(LabError::ExpressionEval(format!("non-integer power {p} of non-positive value {x}")));
    }
    if x == 0.0 && p < 2.0 {
        return Err(LabError::ExpressionEval(format!("power {p} not twice differentiable at 0")));
    }
    let (v, d1, d2) = if integral {
        let n = p as i32;
        (x.powi(n), p * x.powi(n - 1), p * (p - 1.0) * x.powi(n - 2))
    } else {
        (x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    };
    Ok(base.chain(v, d1, d2))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(0) => write!(f, "t"),
            Expr::Var(i) => write!(f, "t{}", i + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser {
    fn error(&self, message: &str) -> LabError {
        LabError::ExpressionParse { column: self.pos + 1, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
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
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(c) => Err(self.error(&format!("unexpected character `{c}`"))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let mut end = start;
        let mut seen_exp = false;
        while end < self.chars.len() {
            let c = self.chars[end].1;
            if c.is_ascii_digit() || c == '.' {
                end += 1;
            } else if (c == 'e' || c == 'E') && !seen_exp {
                let next = self.chars.get(end + 1).map(|c| c.1);
                let next2 = self.chars.get(end + 2).map(|c| c.1);
                let digit_follows = matches!(next, Some(d) if d.is_ascii_digit())
                    || (matches!(next, Some('+' | '-')) && matches!(next2, Some(d) if d.is_ascii_digit()));
                if !digit_follows {
                    break;
                }
                seen_exp = true;
                end += 2;
            } else {
                break;
            }
        }
        let text: String = self.chars[start..end].iter().map(|c| c.1).collect();
        let value = text.parse::<f64>().map_err(|_| self.error(&format!("invalid number `{text}`")))?;
        self.pos = end;
        Ok(Expr::Const(value))
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        let mut end = start;
        while end < self.chars.len() && self.chars[end].1.is_ascii_alphanumeric() {
            end += 1;
        }
        let name: String = self.chars[start..end].iter().map(|c| c.1).collect();
        if let Some(func) = Func::from_name(&name) {
            self.pos = end;
            if !self.eat('(') {
                return Err(self.error(&format!("expected `(` after `{name}`")));
            }
            let arg = self.expr()?;
            if !self.eat(')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        let expr = match name.as_str() {
            "pi" => Expr::Const(std::f64::consts::PI),
            "e" => Expr::Const(std::f64::consts::E),
            "t" => Expr::Var(0),
            _ => match name.strip_prefix('t').and_then(|d| d.parse::<usize>().ok()) {
                Some(k) if (1..=9).contains(&k) => Expr::Var(k - 1),
                _ => return Err(self.error(&format!("unknown identifier `{name}`"))),
            },
        };
        self.pos = end;
        Ok(expr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warp::jet::{Jet2, JetN};

    fn jet(src: &str, t: f64) -> Jet2 {
        Expr::parse(src).unwrap().eval(&[Jet2::variable(t)]).unwrap()
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(Expr::parse("-t^2").unwrap().eval(&[3.0]).unwrap(), -9.0);
        assert_eq!(Expr::parse("2+3*t").unwrap().eval(&[2.0]).unwrap(), 8.0);
        assert_eq!(Expr::parse("2^3^2").unwrap().eval(&[0.0]).unwrap(), 512.0);
        assert_eq!(Expr::parse("1e-3*t").unwrap().eval(&[2.0]).unwrap(), 2e-3);
    }

    #[test]
    fn two_plus_cos_derivatives() {
        let j = jet("2 + cos(t)", 0.0);
        assert_eq!((j.v, j.d1, j.d2), (3.0, 0.0, -1.0));
    }

    #[test]
    fn sqrt_and_variable_power() {
        let j = jet("sqrt(1 + t^2)", 1.0);
        let s = 2f64.sqrt();
        assert!((j.v - s).abs() < 1e-15);
        assert!((j.d1 - 1.0 / s).abs() < 1e-15);
        assert!((j.d2 - 1.0 / (2.0 * s)).abs() < 1e-15);
        // t^t at 1: value 1, d1 = 1, d2 = 2
        let j = jet("t^t", 1.0);
        assert!((j.d1 - 1.0).abs() < 1e-14 && (j.d2 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn multivariate_names() {
        let e = Expr::parse("3 + cos(t1) * sin(t2)").unwrap();
        assert_eq!(e.arity(), 2);
        let v = e.eval(&[JetN::variable(0.0, 0, 2), JetN::variable(0.0, 1, 2)]).unwrap();
        assert_eq!(v.grad, vec![0.0, 1.0]);
    }

    #[test]
    fn parse_errors_carry_columns() {
        match Expr::parse("2 + foo(t)") {
            Err(LabError::ExpressionParse { column, .. }) => assert_eq!(column, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Expr::parse("(t + 1").is_err());
        assert!(Expr::parse("t t").is_err());
    }

    #[test]
    fn display_round_trips_through_parse() {
        let e = Expr::parse("cosh(t)/(1+t^2) - -3").unwrap();
        let back = Expr::parse(&e.to_string()).unwrap();
        assert_eq!(e, back);
    }
}
