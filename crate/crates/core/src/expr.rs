//! Scalar expressions in a few named variables, with symbolic derivatives.
//!
//! Grammar: `+ - * / ^`, unary minus, parentheses, numbers, the constants
//! `pi` and `e`, and the functions `sin cos sinh cosh exp ln sqrt abs asinh`.
//! `^` binds tighter than unary minus and associates to the right.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::construct::graph::GraphFunction;
use crate::error::{GeomError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Asinh,
    /// Derivative of `abs`; not parseable.
    Sign,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "asinh" => Func::Asinh,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Asinh => "asinh",
            Func::Sign => "sign",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Abs => x.abs(),
            Func::Asinh => x.asinh(),
            Func::Sign => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

use Expr::*;

fn num(e: &Expr) -> Option<f64> {
    match e {
        Num(v) => Some(*v),
        _ => None,
    }
}

// Smart constructors fold constants and drop neutral elements.

fn neg(a: Expr) -> Expr {
    match a {
        Num(v) => Num(-v),
        Neg(b) => *b,
        a => Neg(Box::new(a)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => Num(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => match b {
            Neg(b) => sub(a, *b),
            b => Add(Box::new(a), Box::new(b)),
        },
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => Num(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ if a == b => Num(0.0),
        _ => Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => Num(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => Num(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), _) if x == -1.0 => neg(b),
        (_, Some(y)) if y == -1.0 => neg(a),
        (None, Some(_)) => mul(b, a),
        _ => match (a, b) {
            (Neg(a), b) => neg(mul(*a, b)),
            (a, Neg(b)) => neg(mul(a, *b)),
            (a, b) => Mul(Box::new(a), Box::new(b)),
        },
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) if y != 0.0 => Num(x / y),
        (Some(x), _) if x == 0.0 => Num(0.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => Num(x.powf(y)),
        (_, Some(y)) if y == 0.0 => Num(1.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => Pow(Box::new(a), Box::new(b)),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    match num(&a) {
        Some(x) if f != Func::Sign => Num(f.apply(x)),
        _ => Call(f, Box::new(a)),
    }
}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Num(v) => *v,
            Var(i) => x[*i],
            Neg(a) => -a.eval(x),
            Add(a, b) => a.eval(x) + b.eval(x),
            Sub(a, b) => a.eval(x) - b.eval(x),
            Mul(a, b) => a.eval(x) * b.eval(x),
            Div(a, b) => a.eval(x) / b.eval(x),
            Pow(a, b) => {
                let (u, v) = (a.eval(x), b.eval(x));
                match num(b) {
                    Some(n) if n.fract() == 0.0 && n.abs() <= 64.0 => u.powi(n as i32),
                    _ => u.powf(v),
                }
            }
            Call(f, a) => f.apply(a.eval(x)),
        }
    }

    /// Largest variable index used, plus one.
    pub fn arity(&self) -> usize {
        match self {
            Num(_) => 0,
            Var(i) => i + 1,
            Neg(a) | Call(_, a) => a.arity(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => a.arity().max(b.arity()),
        }
    }

    pub fn derivative(&self, var: usize) -> Expr {
        let d = |e: &Expr| e.derivative(var);
        match self {
            Num(_) => Num(0.0),
            Var(i) => Num(if *i == var { 1.0 } else { 0.0 }),
            Neg(a) => neg(d(a)),
            Add(a, b) => add(d(a), d(b)),
            Sub(a, b) => sub(d(a), d(b)),
            Mul(a, b) => add(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
            Div(a, b) => {
                let num_ = sub(mul(d(a), (**b).clone()), mul((**a).clone(), d(b)));
                div(num_, pow((**b).clone(), Num(2.0)))
            }
            Pow(a, b) => match num(b) {
                Some(n) => mul(mul(Num(n), pow((**a).clone(), Num(n - 1.0))), d(a)),
                None => {
                    // u^v (v' ln u + v u'/u)
                    let (u, v) = ((**a).clone(), (**b).clone());
                    let inner = add(mul(d(b), call(Func::Ln, u.clone())), div(mul(v, d(a)), u));
                    mul(self.clone(), inner)
                }
            },
            Call(f, a) => {
                let u = (**a).clone();
                let outer = match f {
                    Func::Sin => call(Func::Cos, u),
                    Func::Cos => neg(call(Func::Sin, u)),
                    Func::Sinh => call(Func::Cosh, u),
                    Func::Cosh => call(Func::Sinh, u),
                    Func::Exp => self.clone(),
                    Func::Ln => div(Num(1.0), u),
                    Func::Sqrt => div(Num(0.5), self.clone()),
                    Func::Abs => call(Func::Sign, u),
                    Func::Asinh => div(Num(1.0), call(Func::Sqrt, add(Num(1.0), pow(u, Num(2.0))))),
                    Func::Sign => Num(0.0),
                };
                mul(outer, d(a))
            }
        }
    }

    /// Printable form using the given variable names.
    pub fn display<'a>(&'a self, vars: &'a [&'a str]) -> impl fmt::Display + 'a {
        Shown { e: self, vars }
    }
}

struct Shown<'a> {
    e: &'a Expr,
    vars: &'a [&'a str],
}

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |e: &'_ Expr| -> String { Shown { e, vars: self.vars }.to_string() };
        match self.e {
            Num(v) => write!(f, "{v}"),
            Var(i) => write!(f, "{}", self.vars.get(*i).copied().unwrap_or("?")),
            Neg(a) => write!(f, "(-{})", s(a)),
            Add(a, b) => write!(f, "({} + {})", s(a), s(b)),
            Sub(a, b) => write!(f, "({} - {})", s(a), s(b)),
            Mul(a, b) => write!(f, "({} * {})", s(a), s(b)),
            Div(a, b) => write!(f, "({} / {})", s(a), s(b)),
            Pow(a, b) => write!(f, "({} ^ {})", s(a), s(b)),
            Call(g, a) => write!(f, "{}({})", g.name(), s(a)),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(GeomError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
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
            if self.eat(b'+') {
                lhs = add(lhs, self.term()?);
            } else if self.eat(b'-') {
                lhs = sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = mul(lhs, self.unary()?);
            } else if self.eat(b'/') {
                lhs = div(lhs, self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(neg(self.unary()?));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            return Ok(pow(base, self.unary()?));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mut q = self.pos + 1;
            if matches!(self.src.get(q), Some(b'+' | b'-')) {
                q += 1;
            }
            if self.src.get(q).is_some_and(u8::is_ascii_digit) {
                self.pos = q;
                digits(self);
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) => Ok(Num(v)),
            Err(_) => {
                self.pos = start;
                self.err(format!("bad number '{text}'"))
            }
        }
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        if let Some(i) = self.vars.iter().position(|v| *v == name) {
            return Ok(Var(i));
        }
        if let Some(f) = Func::from_name(name) {
            if !self.eat(b'(') {
                return self.err(format!("expected '(' after {name}"));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return self.err("expected ')'");
            }
            return Ok(call(f, arg));
        }
        match name {
            "pi" => Ok(Num(std::f64::consts::PI)),
            "e" => Ok(Num(std::f64::consts::E)),
            _ => {
                self.pos = start;
                self.err(format!("unknown identifier '{name}' (variables: {})", self.vars.join(", ")))
            }
        }
    }
}

/// Parses `src` with the given variable names, bound to indices in order.
pub fn parse(src: &str, vars: &[&str]) -> Result<Expr> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, vars };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

const BASE_VARS: [&str; 3] = ["x", "y", "z"];

impl GraphFunction {
    /// Graph function over `domain` from an expression in `x`, `y`, `z`;
    /// every derivative is symbolic.
    pub fn from_expr(src: &str, domain: Vec<(f64, f64)>) -> Result<GraphFunction> {
        let n = domain.len();
        if !(1..=3).contains(&n) {
            return Err(GeomError::Precondition(format!("base dimension {n} not in 1..=3")));
        }
        let f = parse(src, &BASE_VARS[..n])?;
        let grad: Vec<Expr> = (0..n).map(|i| f.derivative(i)).collect();
        let hess: Vec<Vec<Expr>> = grad.iter().map(|g| (0..n).map(|j| g.derivative(j)).collect()).collect();
        let lap = (0..n).fold(Num(0.0), |acc, i| add(acc, hess[i][i].clone()));
        let grad_lap: Vec<Expr> = (0..n).map(|i| lap.derivative(i)).collect();
        let q = grad.iter().fold(Num(0.0), |acc, g| add(acc, pow(g.clone(), Num(2.0))));
        let q = mul(Num(0.5), q);
        let half_lap_q = (0..n).fold(Num(0.0), |acc, i| add(acc, q.derivative(i).derivative(i)));

        let fv = f.clone();
        let out = GraphFunction::new(domain, move |x| fv.eval(x))
            .with_gradient(move |x| DVector::from_iterator(n, grad.iter().map(|g| g.eval(x))))
            .with_hessian(move |x| DMatrix::from_fn(n, n, |i, j| hess[i][j].eval(x)))
            .with_grad_laplacian(move |x| DVector::from_iterator(n, grad_lap.iter().map(|g| g.eval(x))))
            .with_half_laplacian_grad_sq(move |x| half_lap_q.eval(x))
            .with_label(src.trim());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffgeo::numdiff::{self, FdConfig};

    fn xy(src: &str) -> Expr {
        parse(src, &["x", "y"]).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(xy("1 + 2 * 3").eval(&[]), 7.0);
        assert_eq!(xy("2 ^ 3 ^ 2").eval(&[]), 512.0);
        assert_eq!(xy("-2 ^ 2").eval(&[]), -4.0);
        assert_eq!(xy("2 ^ -1").eval(&[]), 0.5);
        assert_eq!(xy("8 / 4 / 2").eval(&[]), 1.0);
        assert_eq!(xy("x - y - 1").eval(&[5.0, 2.0]), 2.0);
        assert!((xy("2*pi").eval(&[]) - std::f64::consts::TAU).abs() < 1e-15);
        assert_eq!(xy("1.5e2 + 2E-1").eval(&[]), 150.2);
    }

    #[test]
    fn functions_evaluate() {
        let x = [0.7, -0.3];
        let e = xy("sin(x)*cos(y) + sinh(x) - cosh(y) + exp(x) + ln(2+y) + sqrt(x) + abs(y) + asinh(x)");
        let want = 0.7f64.sin() * 0.3f64.cos() + 0.7f64.sinh() - 0.3f64.cosh() + 0.7f64.exp() + 1.7f64.ln()
            + 0.7f64.sqrt()
            + 0.3
            + 0.7f64.asinh();
        assert!((e.eval(&x) - want).abs() < 1e-14);
    }

    #[test]
    fn errors_carry_position() {
        for (src, pos) in [("x +", 3), ("x + q", 4), ("sin x", 4), ("(x", 2), ("x y", 2), ("2 $ 3", 2)] {
            match parse(src, &["x", "y"]) {
                Err(GeomError::Parse { pos: p, .. }) => assert_eq!(p, pos, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let srcs = [
            "x^3*y - 2*x*y^2",
            "sin(x)*exp(y)",
            "sqrt(1 + x^2 + y^2)",
            "ln(2 + cosh(x*y))",
            "asinh(x - y) / (3 + sinh(y))",
            "(1 + x^2)^(y/3 + 1)",
        ];
        let cfg = FdConfig::new(1e-3, true);
        for src in srcs {
            let e = xy(src);
            for p in [[0.3, 0.4], [-0.6, 0.2]] {
                for i in 0..2 {
                    let sym = e.derivative(i).eval(&p);
                    let fd = numdiff::partial(&|q: &[f64]| e.eval(q), &p, i, cfg);
                    assert!((sym - fd).abs() < 1e-8, "{src} d{i}: {sym} vs {fd}");
                }
            }
        }
    }

    #[test]
    fn simplification_keeps_trees_small() {
        let d = xy("3*x + 0*y").derivative(0);
        assert_eq!(d, Num(3.0));
        assert_eq!(xy("x*y").derivative(0).derivative(0), Num(0.0));
        assert_eq!(format!("{}", xy("x^2").derivative(0).display(&["x"])), "(2 * x)");
    }

    #[test]
    fn graph_from_expr_bochner_terms() {
        let f = GraphFunction::from_expr("x*y", vec![(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
        let x = [0.4, -0.9];
        assert_eq!(f.half_laplacian_grad_sq(&x), 2.0);
        assert_eq!(f.hessian(&x).norm_squared(), 2.0);
        assert_eq!(f.grad_laplacian(&x).norm(), 0.0);
        assert!(GraphFunction::from_expr("x + w", vec![(0.0, 1.0), (0.0, 1.0)]).is_err());
    }
}
