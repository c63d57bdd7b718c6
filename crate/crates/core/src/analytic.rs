//! Analytic functions of complex variables.
//!
//! Expressions follow the grammar
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' integer)?
//! atom   := number | 'i' | variable | func '(' expr ')' | '(' expr ')'
//! func   := 'exp' | 'sin' | 'cos'
//! ```
//!
//! Variables are named by the caller: a single `z` for [`AnalyticFn`], and
//! `xi1`, `xi2` for the components of a map. Constant subexpressions are folded
//! while building, so `2*i` is the literal `2i`.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::Real;

/// Largest Taylor order served by [`AnalyticFn::taylor_coeffs`].
pub const MAX_TAYLOR_ORDER: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function or symbol `{name}` at byte {offset}")]
    UnknownFunction { offset: usize, name: String },
    #[error("exponent at byte {offset} is not an integer")]
    NonIntegerExponent { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::NonIntegerExponent { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("pole or division by zero")]
    PoleOrDivisionByZero,
    #[error("point at distance {distance} from the series center exceeds radius {radius}")]
    RadiusExceeded { distance: f64, radius: f64 },
    #[error("requested {requested} Taylor terms, at most {max} supported")]
    TooManyTerms { requested: usize, max: usize },
    #[error("expression uses variable #{index} but only {available} were supplied")]
    MissingVariable { index: usize, available: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Func {
    Exp,
    Sin,
    Cos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        match s {
            "exp" => Some(Func::Exp),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        }
    }

    fn apply<T: Real>(self, z: Complex<T>) -> Complex<T> {
        match self {
            Func::Exp => z.exp(),
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
        }
    }
}

/// Expression tree over complex literals, indexed variables, `+ - * /`,
/// integer powers and `exp`, `sin`, `cos`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr<T> {
    Const(Complex<T>),
    Var(usize),
    Neg(Box<Expr<T>>),
    Add(Box<Expr<T>>, Box<Expr<T>>),
    Sub(Box<Expr<T>>, Box<Expr<T>>),
    Mul(Box<Expr<T>>, Box<Expr<T>>),
    Div(Box<Expr<T>>, Box<Expr<T>>),
    Pow(Box<Expr<T>>, i32),
    Call(Func, Box<Expr<T>>),
}

impl<T: Real> Expr<T> {
    pub fn constant(c: Complex<T>) -> Self {
        Expr::Const(c)
    }

    pub fn real(v: T) -> Self {
        Expr::Const(Complex::new(v, T::zero()))
    }

    pub fn zero() -> Self {
        Self::real(T::zero())
    }

    pub fn one() -> Self {
        Self::real(T::one())
    }

    pub fn var(i: usize) -> Self {
        Expr::Var(i)
    }

    fn as_const(&self) -> Option<Complex<T>> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_const(&self, v: f64) -> bool {
        self.as_const() == Some(Complex::new(T::lit(v), T::zero()))
    }

    // Constructors below fold constants and drop the identities 0 + x, 1·x,
    // 0·x, x^0, x^1, --x.

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Self) -> Self {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            a => Expr::Neg(Box::new(a)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Self, b: Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            _ if a.is_const(0.0) => b,
            _ if b.is_const(0.0) => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Self, b: Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            _ if b.is_const(0.0) => a,
            _ if a.is_const(0.0) => Self::neg(b),
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Self, b: Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            _ if a.is_const(0.0) || b.is_const(0.0) => Self::zero(),
            _ if a.is_const(1.0) => b,
            _ if b.is_const(1.0) => a,
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Self, b: Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != Complex::new(T::zero(), T::zero()) => Expr::Const(x / y),
            _ if b.is_const(1.0) => a,
            _ if a.is_const(0.0) && b.as_const().is_none() => Self::zero(),
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        if n == 1 {
            return a;
        }
        match a.as_const() {
            Some(c) if n > 0 || c.norm() > T::zero() => Expr::Const(c.powi(n)),
            _ => Expr::Pow(Box::new(a), n),
        }
    }

    pub fn call(f: Func, a: Self) -> Self {
        match a.as_const() {
            Some(c) => Expr::Const(f.apply(c)),
            None => Expr::Call(f, Box::new(a)),
        }
    }

    /// Parses `src` with the given variable names.
    pub fn parse(src: &str, vars: &[&str]) -> Result<Self, ParseError> {
        let mut p = Parser { src: src.as_bytes(), pos: 0, vars };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.syntax("unexpected trailing input"));
        }
        Ok(e)
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    /// Renames variables through `map` (old index to new index).
    pub fn map_vars(&self, map: &impl Fn(usize) -> usize) -> Self {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(i) => Expr::Var(map(*i)),
            Expr::Neg(a) => Expr::Neg(Box::new(a.map_vars(map))),
            Expr::Add(a, b) => Expr::Add(Box::new(a.map_vars(map)), Box::new(b.map_vars(map))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.map_vars(map)), Box::new(b.map_vars(map))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.map_vars(map)), Box::new(b.map_vars(map))),
            Expr::Div(a, b) => Expr::Div(Box::new(a.map_vars(map)), Box::new(b.map_vars(map))),
            Expr::Pow(a, n) => Expr::Pow(Box::new(a.map_vars(map)), *n),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.map_vars(map))),
        }
    }

    /// Replaces every variable by the expression `subs[index]`.
    pub fn substitute(&self, subs: &[Expr<T>]) -> Self {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(i) => subs[*i].clone(),
            Expr::Neg(a) => Self::neg(a.substitute(subs)),
            Expr::Add(a, b) => Self::add(a.substitute(subs), b.substitute(subs)),
            Expr::Sub(a, b) => Self::sub(a.substitute(subs), b.substitute(subs)),
            Expr::Mul(a, b) => Self::mul(a.substitute(subs), b.substitute(subs)),
            Expr::Div(a, b) => Self::div(a.substitute(subs), b.substitute(subs)),
            Expr::Pow(a, n) => Self::pow(a.substitute(subs), *n),
            Expr::Call(f, a) => Self::call(*f, a.substitute(subs)),
        }
    }

    pub fn eval(&self, vars: &[Complex<T>]) -> Result<Complex<T>, EvalError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => *vars.get(*i).ok_or(EvalError::MissingVariable {
                index: *i,
                available: vars.len(),
            })?,
            Expr::Neg(a) => -a.eval(vars)?,
            Expr::Add(a, b) => a.eval(vars)? + b.eval(vars)?,
            Expr::Sub(a, b) => a.eval(vars)? - b.eval(vars)?,
            Expr::Mul(a, b) => a.eval(vars)? * b.eval(vars)?,
            Expr::Div(a, b) => {
                let d = b.eval(vars)?;
                if d.norm() < T::lit(1e-300) {
                    return Err(EvalError::PoleOrDivisionByZero);
                }
                a.eval(vars)? / d
            }
            Expr::Pow(a, n) => {
                let base = a.eval(vars)?;
                if *n < 0 && base.norm() < T::lit(1e-300) {
                    return Err(EvalError::PoleOrDivisionByZero);
                }
                base.powi(*n)
            }
            Expr::Call(f, a) => f.apply(a.eval(vars)?),
        })
    }

    /// Symbolic partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Self {
        match self {
            Expr::Const(_) => Self::zero(),
            Expr::Var(i) => {
                if *i == var {
                    Self::one()
                } else {
                    Self::zero()
                }
            }
            Expr::Neg(a) => Self::neg(a.partial(var)),
            Expr::Add(a, b) => Self::add(a.partial(var), b.partial(var)),
            Expr::Sub(a, b) => Self::sub(a.partial(var), b.partial(var)),
            Expr::Mul(a, b) => Self::add(
                Self::mul(a.partial(var), (**b).clone()),
                Self::mul((**a).clone(), b.partial(var)),
            ),
            Expr::Div(a, b) => Self::div(
                Self::sub(
                    Self::mul(a.partial(var), (**b).clone()),
                    Self::mul((**a).clone(), b.partial(var)),
                ),
                Self::pow((**b).clone(), 2),
            ),
            Expr::Pow(a, n) => Self::mul(
                Self::mul(
                    Self::real(T::from_i32(*n).unwrap()),
                    Self::pow((**a).clone(), n - 1),
                ),
                a.partial(var),
            ),
            Expr::Call(f, a) => {
                let inner = (**a).clone();
                let outer = match f {
                    Func::Exp => Self::call(Func::Exp, inner),
                    Func::Sin => Self::call(Func::Cos, inner),
                    Func::Cos => Self::neg(Self::call(Func::Sin, inner)),
                };
                Self::mul(outer, a.partial(var))
            }
        }
    }

    /// Truncated Taylor arithmetic: each variable is given as its
    /// coefficient sequence (all of equal length), the result is the
    /// coefficient sequence of the composed expression.
    pub fn eval_jet(&self, vars: &[Vec<Complex<T>>]) -> Result<Vec<Complex<T>>, EvalError> {
        let len = vars.first().map_or(1, Vec::len);
        let constant = |c: Complex<T>| {
            let mut v = vec![Complex::new(T::zero(), T::zero()); len];
            v[0] = c;
            v
        };
        Ok(match self {
            Expr::Const(c) => constant(*c),
            Expr::Var(i) => vars
                .get(*i)
                .ok_or(EvalError::MissingVariable {
                    index: *i,
                    available: vars.len(),
                })?
                .clone(),
            Expr::Neg(a) => a.eval_jet(vars)?.into_iter().map(|c| -c).collect(),
            Expr::Add(a, b) => zip_with(&a.eval_jet(vars)?, &b.eval_jet(vars)?, |x, y| x + y),
            Expr::Sub(a, b) => zip_with(&a.eval_jet(vars)?, &b.eval_jet(vars)?, |x, y| x - y),
            Expr::Mul(a, b) => jet::mul(&a.eval_jet(vars)?, &b.eval_jet(vars)?),
            Expr::Div(a, b) => jet::div(&a.eval_jet(vars)?, &b.eval_jet(vars)?)?,
            Expr::Pow(a, n) => jet::powi(&a.eval_jet(vars)?, *n)?,
            Expr::Call(f, a) => {
                let u = a.eval_jet(vars)?;
                match f {
                    Func::Exp => jet::exp(&u),
                    Func::Sin => jet::sin_cos(&u).0,
                    Func::Cos => jet::sin_cos(&u).1,
                }
            }
        })
    }

    /// Renders the expression with the given variable names; the output
    /// parses back to the same tree.
    pub fn display<'a>(&'a self, names: &'a [&'a str]) -> ExprDisplay<'a, T> {
        ExprDisplay { expr: self, names }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if c.im == T::zero() && c.re.is_sign_negative() => 3,
            _ => 5,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, names: &[&str], min_prec: u8) -> fmt::Result {
        let paren = self.precedence() < min_prec;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Const(c) => write_const(f, *c)?,
            Expr::Var(i) => match names.get(*i) {
                Some(n) => f.write_str(n)?,
                None => write!(f, "v{i}")?,
            },
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.write(f, names, 3)?;
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (op, p) = match self {
                    Expr::Add(..) => (" + ", 1),
                    Expr::Sub(..) => (" - ", 1),
                    Expr::Mul(..) => ("*", 2),
                    _ => ("/", 2),
                };
                a.write(f, names, p)?;
                f.write_str(op)?;
                b.write(f, names, p + 1)?;
            }
            Expr::Pow(a, n) => {
                a.write(f, names, 5)?;
                write!(f, "^{n}")?;
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f, names, 0)?;
                f.write_str(")")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn write_const<T: Real>(f: &mut fmt::Formatter<'_>, c: Complex<T>) -> fmt::Result {
    if c.im == T::zero() {
        write!(f, "{}", c.re)
    } else if c.re == T::zero() && c.im == T::one() {
        f.write_str("i")
    } else if c.re == T::zero() {
        write!(f, "({}*i)", c.im)
    } else {
        write!(f, "({} + {}*i)", c.re, c.im)
    }
}

pub struct ExprDisplay<'a, T> {
    expr: &'a Expr<T>,
    names: &'a [&'a str],
}

impl<T: Real> fmt::Display for ExprDisplay<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.write(f, self.names, 0)
    }
}

fn zip_with<T: Real>(
    a: &[Complex<T>],
    b: &[Complex<T>],
    op: impl Fn(Complex<T>, Complex<T>) -> Complex<T>,
) -> Vec<Complex<T>> {
    a.iter().zip(b).map(|(x, y)| op(*x, *y)).collect()
}

/// Truncated power-series arithmetic.
mod jet {
    use super::*;

    pub fn mul<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..a.len())
            .map(|k| (0..=k).map(|j| a[j] * b[k - j]).fold(Complex::new(T::zero(), T::zero()), |s, v| s + v))
            .collect()
    }

    pub fn div<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Result<Vec<Complex<T>>, EvalError> {
        if b[0].norm() < T::lit(1e-300) {
            return Err(EvalError::PoleOrDivisionByZero);
        }
        let mut c: Vec<Complex<T>> = Vec::with_capacity(a.len());
        for k in 0..a.len() {
            let mut s = a[k];
            for j in 1..=k {
                s -= b[j] * c[k - j];
            }
            c.push(s / b[0]);
        }
        Ok(c)
    }

    pub fn powi<T: Real>(u: &[Complex<T>], n: i32) -> Result<Vec<Complex<T>>, EvalError> {
        let mut result = vec![Complex::new(T::zero(), T::zero()); u.len()];
        result[0] = Complex::new(T::one(), T::zero());
        let mut base = u.to_vec();
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = mul(&base, &base);
            }
        }
        if n < 0 {
            let mut one = vec![Complex::new(T::zero(), T::zero()); u.len()];
            one[0] = Complex::new(T::one(), T::zero());
            div(&one, &result)
        } else {
            Ok(result)
        }
    }

    pub fn exp<T: Real>(u: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut e = Vec::with_capacity(u.len());
        e.push(u[0].exp());
        for k in 1..u.len() {
            let mut s = Complex::new(T::zero(), T::zero());
            for j in 1..=k {
                s += u[j] * e[k - j] * T::from_usize(j).unwrap();
            }
            e.push(s / T::from_usize(k).unwrap());
        }
        e
    }

    pub fn sin_cos<T: Real>(u: &[Complex<T>]) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let mut s = vec![u[0].sin()];
        let mut c = vec![u[0].cos()];
        for k in 1..u.len() {
            let mut ss = Complex::new(T::zero(), T::zero());
            let mut cs = Complex::new(T::zero(), T::zero());
            for j in 1..=k {
                let w = u[j] * T::from_usize(j).unwrap();
                ss += w * c[k - j];
                cs -= w * s[k - j];
            }
            let kf = T::from_usize(k).unwrap();
            s.push(ss / kf);
            c.push(cs / kf);
        }
        (s, c)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn expect(&mut self, ch: u8) -> Result<(), ParseError> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(&format!("expected `{}`", ch as char)))
        }
    }

    fn expr<T: Real>(&mut self) -> Result<Expr<T>, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::add(lhs, self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term<T: Real>(&mut self) -> Result<Expr<T>, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::mul(lhs, self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Expr::div(lhs, self.factor()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor<T: Real>(&mut self) -> Result<Expr<T>, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::neg(self.factor()?));
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.integer_exponent()?;
            return Ok(Expr::pow(base, n));
        }
        Ok(base)
    }

    fn integer_exponent(&mut self) -> Result<i32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let bad = ParseError::NonIntegerExponent { offset: start };
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(bad);
        }
        if matches!(self.src.get(self.pos), Some(b'.' | b'e' | b'E')) {
            return Err(bad);
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<i32>().ok())
            .ok_or(bad)
    }

    fn atom<T: Real>(&mut self) -> Result<Expr<T>, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(_) => Err(self.syntax("unexpected character")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn number<T: Real>(&mut self) -> Result<Expr<T>, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.syntax("malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        Ok(Expr::real(T::lit(v)))
    }

    fn identifier<T: Real>(&mut self) -> Result<Expr<T>, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if let Some(idx) = self.vars.iter().position(|v| *v == name) {
            return Ok(Expr::Var(idx));
        }
        if name == "i" {
            return Ok(Expr::Const(Complex::new(T::zero(), T::one())));
        }
        match Func::from_name(name) {
            Some(func) if self.peek() == Some(b'(') => {
                self.pos += 1;
                let arg = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::call(func, arg))
            }
            Some(_) => Err(self.syntax(&format!("expected `(` after `{name}`"))),
            None => Err(ParseError::UnknownFunction {
                offset: start,
                name: name.to_string(),
            }),
        }
    }
}

/// Truncated or convergent power series `Σ c_k (z - center)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries<T> {
    pub center: Complex<T>,
    pub coeffs: Vec<Complex<T>>,
    /// Radius of convergence; `T::infinity()` for polynomials.
    pub radius: T,
}

impl<T: Real> PowerSeries<T> {
    pub fn new(center: Complex<T>, coeffs: Vec<Complex<T>>, radius: T) -> Self {
        Self { center, coeffs, radius }
    }

    pub fn polynomial(center: Complex<T>, coeffs: Vec<Complex<T>>) -> Self {
        Self::new(center, coeffs, T::infinity())
    }

    /// Maclaurin series of `exp` truncated after `terms` coefficients.
    pub fn exp_truncated(terms: usize) -> Self {
        let mut coeffs = Vec::with_capacity(terms);
        let mut c = T::one();
        for k in 0..terms {
            if k > 0 {
                c /= T::from_usize(k).unwrap();
            }
            coeffs.push(Complex::new(c, T::zero()));
        }
        Self::new(Complex::new(T::zero(), T::zero()), coeffs, T::infinity())
    }

    fn check_radius(&self, z: Complex<T>) -> Result<(), EvalError> {
        let d = (z - self.center).norm();
        if d < self.radius {
            Ok(())
        } else {
            Err(EvalError::RadiusExceeded {
                distance: d.to_f64().unwrap_or(f64::NAN),
                radius: self.radius.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>, EvalError> {
        self.check_radius(z)?;
        let h = z - self.center;
        Ok(self
            .coeffs
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, c| acc * h + c))
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| *c * T::from_usize(k).unwrap())
            .collect();
        Self::new(self.center, coeffs, self.radius)
    }

    /// Re-expands about `new_center`, `b_m = Σ_{k≥m} C(k,m) a_k (c' - c)^(k-m)`.
    pub fn recenter(&self, new_center: Complex<T>) -> Result<Self, EvalError> {
        self.check_radius(new_center)?;
        let h = new_center - self.center;
        let n = self.coeffs.len();
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for (m, slot) in out.iter_mut().enumerate() {
            let mut binom = T::one();
            let mut hp = Complex::new(T::one(), T::zero());
            for k in m..n {
                if k > m {
                    // C(k, m) = C(k-1, m) * k / (k - m)
                    binom = binom * T::from_usize(k).unwrap() / T::from_usize(k - m).unwrap();
                    hp *= h;
                }
                *slot += self.coeffs[k] * hp * binom;
            }
        }
        Ok(Self::new(new_center, out, self.radius - h.norm()))
    }

    pub fn to_expr(&self) -> Expr<T> {
        let shift = Expr::sub(Expr::Var(0), Expr::Const(self.center));
        self.coeffs
            .iter()
            .enumerate()
            .fold(Expr::zero(), |acc, (k, c)| {
                Expr::add(acc, Expr::mul(Expr::Const(*c), Expr::pow(shift.clone(), k as i32)))
            })
    }
}

/// Functions with closed-form derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum Builtin<T> {
    Exp,
    Sin,
    Cos,
    Identity,
    Const(Complex<T>),
    Monomial(u32),
}

/// An analytic function of one complex variable `z`.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticFn<T> {
    Expr(Expr<T>),
    Series(PowerSeries<T>),
    Builtin(Builtin<T>),
}

impl<T: Real> AnalyticFn<T> {
    pub const VARS: [&'static str; 1] = ["z"];

    /// Parses an expression in the variable `z`.
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        Expr::parse(src, &Self::VARS).map(AnalyticFn::Expr)
    }

    pub fn zero() -> Self {
        AnalyticFn::Builtin(Builtin::Const(Complex::new(T::zero(), T::zero())))
    }

    pub fn constant(c: Complex<T>) -> Self {
        AnalyticFn::Builtin(Builtin::Const(c))
    }

    pub fn identity() -> Self {
        AnalyticFn::Builtin(Builtin::Identity)
    }

    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>, EvalError> {
        match self {
            AnalyticFn::Expr(e) => e.eval(&[z]),
            AnalyticFn::Series(s) => s.eval(z),
            AnalyticFn::Builtin(b) => Ok(match b {
                Builtin::Exp => z.exp(),
                Builtin::Sin => z.sin(),
                Builtin::Cos => z.cos(),
                Builtin::Identity => z,
                Builtin::Const(c) => *c,
                Builtin::Monomial(n) => z.powu(*n),
            }),
        }
    }

    pub fn derivative(&self) -> Self {
        match self {
            AnalyticFn::Expr(e) => AnalyticFn::Expr(e.partial(0)),
            AnalyticFn::Series(s) => AnalyticFn::Series(s.derivative()),
            AnalyticFn::Builtin(b) => match b {
                Builtin::Exp => AnalyticFn::Builtin(Builtin::Exp),
                Builtin::Sin => AnalyticFn::Builtin(Builtin::Cos),
                Builtin::Cos => AnalyticFn::Expr(Expr::neg(Expr::call(Func::Sin, Expr::Var(0)))),
                Builtin::Identity => Self::constant(Complex::new(T::one(), T::zero())),
                Builtin::Const(_) => Self::zero(),
                Builtin::Monomial(0) => Self::zero(),
                Builtin::Monomial(1) => Self::constant(Complex::new(T::one(), T::zero())),
                Builtin::Monomial(n) => AnalyticFn::Expr(Expr::mul(
                    Expr::real(T::from_u32(*n).unwrap()),
                    Expr::pow(Expr::Var(0), *n as i32 - 1),
                )),
            },
        }
    }

    /// Expression form in the single variable `z` (index 0).
    pub fn to_expr(&self) -> Expr<T> {
        match self {
            AnalyticFn::Expr(e) => e.clone(),
            AnalyticFn::Series(s) => s.to_expr(),
            AnalyticFn::Builtin(b) => match b {
                Builtin::Exp => Expr::call(Func::Exp, Expr::Var(0)),
                Builtin::Sin => Expr::call(Func::Sin, Expr::Var(0)),
                Builtin::Cos => Expr::call(Func::Cos, Expr::Var(0)),
                Builtin::Identity => Expr::Var(0),
                Builtin::Const(c) => Expr::Const(*c),
                Builtin::Monomial(n) => Expr::pow(Expr::Var(0), *n as i32),
            },
        }
    }

    /// `c_k = f^(k)(center) / k!` for `k = 0..=n`.
    ///
    /// Expressions and builtins go through truncated Taylor arithmetic;
    /// series are recentered.
    pub fn taylor_coeffs(&self, center: Complex<T>, n: usize) -> Result<Vec<Complex<T>>, EvalError> {
        if n > MAX_TAYLOR_ORDER {
            return Err(EvalError::TooManyTerms {
                requested: n,
                max: MAX_TAYLOR_ORDER,
            });
        }
        match self {
            AnalyticFn::Series(s) => {
                let mut c = s.recenter(center)?.coeffs;
                c.resize(n + 1, Complex::new(T::zero(), T::zero()));
                Ok(c)
            }
            _ => self.to_expr().eval_jet(&[variable_jet(center, n + 1)]),
        }
    }

    /// True when the function is a constant (by construction, not numerically).
    pub fn is_constant(&self) -> bool {
        match self {
            AnalyticFn::Builtin(Builtin::Const(_)) => true,
            AnalyticFn::Expr(e) => e.max_var().is_none(),
            AnalyticFn::Series(s) => s.coeffs.iter().skip(1).all(|c| c.norm() == T::zero()),
            _ => false,
        }
    }
}

/// Jet of the independent variable about `center`: `(center, 1, 0, …)`.
pub fn variable_jet<T: Real>(center: Complex<T>, len: usize) -> Vec<Complex<T>> {
    let mut v = vec![Complex::new(T::zero(), T::zero()); len];
    v[0] = center;
    if len > 1 {
        v[1] = Complex::new(T::one(), T::zero());
    }
    v
}

impl<T: Real> fmt::Display for AnalyticFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.to_expr();
        write!(f, "{}", e.display(&Self::VARS))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type C = Complex<f64>;
    type E = Expr<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn parse(s: &str) -> AnalyticFn<f64> {
        AnalyticFn::parse(s).unwrap()
    }

    #[test]
    fn parse_grammar_walkthrough() {
        let e = E::parse("exp(z) + z^2", &["z"]).unwrap();
        assert_eq!(
            e,
            Expr::Add(
                Box::new(Expr::Call(Func::Exp, Box::new(Expr::Var(0)))),
                Box::new(Expr::Pow(Box::new(Expr::Var(0)), 2))
            )
        );
        assert_eq!(E::parse("2*i", &["z"]).unwrap(), Expr::Const(c(0., 2.)));
        assert_eq!(E::parse("  1.5e1 ", &["z"]).unwrap(), Expr::Const(c(15., 0.)));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            AnalyticFn::<f64>::parse("e^z"),
            Err(ParseError::UnknownFunction { offset: 0, .. })
        ));
        assert!(matches!(AnalyticFn::<f64>::parse("z^2.5"), Err(ParseError::NonIntegerExponent { offset: 2 })));
        assert!(matches!(AnalyticFn::<f64>::parse("z^z"), Err(ParseError::NonIntegerExponent { .. })));
        assert!(matches!(AnalyticFn::<f64>::parse("2i"), Err(ParseError::Syntax { offset: 1, .. })));
        assert!(matches!(AnalyticFn::<f64>::parse("(z + 1"), Err(ParseError::Syntax { offset: 6, .. })));
        assert!(matches!(AnalyticFn::<f64>::parse("log(z)"), Err(ParseError::UnknownFunction { .. })));
        assert!(matches!(AnalyticFn::<f64>::parse(""), Err(ParseError::Syntax { offset: 0, .. })));
        assert!(matches!(AnalyticFn::<f64>::parse("z +* 2"), Err(ParseError::Syntax { offset: 3, .. })));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let f = parse("-z^2");
        assert_eq!(f.eval(c(3., 0.)).unwrap(), c(-9., 0.));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(parse("z*sin(z)").eval(c(0., 0.)).unwrap(), c(0., 0.));
        assert_eq!(AnalyticFn::<f64>::Builtin(Builtin::Exp).eval(c(0., 0.)).unwrap(), c(1., 0.));
        let s = parse("sin(z)").eval(c(1., 0.)).unwrap();
        assert!((s.re - 1f64.sin()).abs() < 1e-15 && s.im == 0.0);
        assert!((s.re - 0.8414709848).abs() < 1e-10);
        let e = AnalyticFn::Series(PowerSeries::<f64>::exp_truncated(20)).eval(c(1., 0.)).unwrap();
        assert!((e.re - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn eval_errors() {
        assert_eq!(parse("1/z").eval(c(0., 0.)), Err(EvalError::PoleOrDivisionByZero));
        assert_eq!(parse("z^-2").eval(c(0., 0.)), Err(EvalError::PoleOrDivisionByZero));
        let s = AnalyticFn::Series(PowerSeries::new(c(0., 0.), vec![c(1., 0.); 5], 1.0));
        assert!(matches!(s.eval(c(2., 0.)), Err(EvalError::RadiusExceeded { .. })));
        assert!(matches!(s.eval(c(1., 0.)), Err(EvalError::RadiusExceeded { .. })));
    }

    #[test]
    fn derivative_examples() {
        let d = parse("z^2").derivative();
        assert_eq!(d.to_expr(), E::parse("2*z", &["z"]).unwrap());
        assert_eq!(parse("exp(z)").derivative().to_expr(), E::parse("exp(z)", &["z"]).unwrap());
        let cos_d = AnalyticFn::<f64>::Builtin(Builtin::Cos).derivative();
        assert!((cos_d.eval(c(0.3, 0.)).unwrap().re + 0.3f64.sin()).abs() < 1e-15);
        let m = AnalyticFn::<f64>::Builtin(Builtin::Monomial(3)).derivative();
        assert_eq!(m.eval(c(2., 0.)).unwrap(), c(12., 0.));
    }

    #[test]
    fn taylor_examples() {
        let exp = parse("exp(z)");
        let t = exp.taylor_coeffs(c(0., 0.), 3).unwrap();
        let expect = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (a, b) in t.iter().zip(expect) {
            assert!((a - c(b, 0.)).norm() < 1e-15);
        }
        let t = parse("z^2").taylor_coeffs(c(1., 0.), 2).unwrap();
        assert_eq!(t, vec![c(1., 0.), c(2., 0.), c(1., 0.)]);
        assert!(matches!(
            exp.taylor_coeffs(c(0., 0.), 33),
            Err(EvalError::TooManyTerms { requested: 33, .. })
        ));
        let s = AnalyticFn::Series(PowerSeries::new(c(0., 0.), vec![c(1., 0.); 5], 1.0));
        assert!(matches!(s.taylor_coeffs(c(3., 0.), 2), Err(EvalError::RadiusExceeded { .. })));
    }

    /// Oracle: repeated symbolic differentiation, `f^(k)(c)/k!`.
    fn taylor_by_symbolic(f: &AnalyticFn<f64>, center: C, n: usize) -> Vec<C> {
        let mut d = f.clone();
        let mut fact = 1.0;
        let mut out = Vec::new();
        for k in 0..=n {
            if k > 0 {
                fact *= k as f64;
                d = d.derivative();
            }
            out.push(d.eval(center).unwrap() / fact);
        }
        out
    }

    #[test]
    fn taylor_jets_match_repeated_differentiation() {
        for src in ["exp(z)*sin(z)", "cos(2*z)/(z + 3)", "z^3 - 2*z + exp(-z)", "1/(1 - z)", "sin(z)^2 + cos(z)^2"] {
            let f = parse(src);
            let center = c(0.2, -0.1);
            let a = f.taylor_coeffs(center, 6).unwrap();
            let b = taylor_by_symbolic(&f, center, 6);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-12 * (1.0 + y.norm()), "{src}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn polynomial_recentering_reproduces_values() {
        let coeffs = vec![c(1., 2.), c(-0.5, 0.), c(0.25, 1.), c(3., -1.), c(0., 0.5), c(-1., 0.)];
        let p = PowerSeries::polynomial(c(0., 0.), coeffs);
        let center = c(0.7, -0.3);
        let q = p.recenter(center).unwrap();
        for z in [c(0., 0.), c(1., 1.), c(-0.4, 2.), c(2.5, -1.5)] {
            let a = p.eval(z).unwrap();
            let b = q.eval(z).unwrap();
            assert!((a - b).norm() < 1e-12 * (1.0 + a.norm()), "{a} vs {b}");
        }
        let f = AnalyticFn::Series(p.clone());
        let via_expr = AnalyticFn::Expr(p.to_expr()).taylor_coeffs(center, 5).unwrap();
        for (x, y) in f.taylor_coeffs(center, 5).unwrap().iter().zip(&via_expr) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn series_derivative_term_shift() {
        let s = PowerSeries::polynomial(c(0., 0.), vec![c(1., 0.), c(2., 0.), c(3., 0.)]);
        assert_eq!(s.derivative().coeffs, vec![c(2., 0.), c(6., 0.)]);
    }

    #[test]
    fn display_examples() {
        assert_eq!(parse("exp(z) + z^2").to_string(), "exp(z) + z^2");
        assert_eq!(parse("-(z*z)").to_string(), "-(z*z)");
        assert_eq!(parse("z - (1 - z)").to_string(), "z - (1 - z)");
        assert_eq!(parse("(1 + 2*i)*z").to_string(), "(1 + 2*i)*z");
        assert_eq!(parse("i*z").to_string(), "i*z");
    }

    #[test]
    fn two_variable_partials() {
        let e = E::parse("xi1*sin(xi2)", &["xi1", "xi2"]).unwrap();
        let v = [c(0.3, 0.1), c(-0.2, 0.5)];
        let d1 = e.partial(0).eval(&v).unwrap();
        let d2 = e.partial(1).eval(&v).unwrap();
        assert!((d1 - v[1].sin()).norm() < 1e-15);
        assert!((d2 - v[0] * v[1].cos()).norm() < 1e-15);
    }

    fn arb_expr() -> impl Strategy<Value = E> {
        let leaf = prop_oneof![
            Just(Expr::Var(0)),
            (-3.0f64..3.0).prop_map(|v| E::real((v * 8.0).round() / 8.0)),
            ((-3i32..3), (-3i32..3)).prop_map(|(a, b)| E::constant(c(a as f64 * 0.5, b as f64))),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(E::neg),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| E::add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| E::sub(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| E::mul(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| E::div(a, b)),
                (inner.clone(), -2i32..4).prop_map(|(a, n)| E::pow(a, n)),
                inner.clone().prop_map(|a| E::call(Func::Exp, a)),
                inner.clone().prop_map(|a| E::call(Func::Sin, a)),
                inner.prop_map(|a| E::call(Func::Cos, a)),
            ]
        })
    }

    fn consts_finite(e: &E) -> bool {
        match e {
            Expr::Const(c) => c.is_finite(),
            Expr::Var(_) => true,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => consts_finite(a),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                consts_finite(a) && consts_finite(b)
            }
        }
    }

    fn small_point() -> impl Strategy<Value = C> {
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b))
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            prop_assume!(consts_finite(&e));
            let text = e.display(&["z"]).to_string();
            let back = E::parse(&text, &["z"]).unwrap();
            prop_assert_eq!(back, e, "{}", text);
        }

        #[test]
        fn derivative_matches_central_difference(e in arb_expr(), z in small_point()) {
            let h = 1e-5;
            let f = |w: C| e.eval(&[w]);
            let (Ok(fp), Ok(fm), Ok(d)) = (f(z + h), f(z - h), e.partial(0).eval(&[z])) else {
                return Ok(());
            };
            let fd = (fp - fm) / (2.0 * h);
            prop_assume!(fd.norm() < 1e3 && d.is_finite());
            // second-order stencil: error ~ h² |f'''|, scaled by magnitude
            prop_assert!((fd - d).norm() <= 1e-6 * (1.0 + d.norm()) * 10.0, "{} vs {}", fd, d);
        }

        #[test]
        fn derivative_is_linear(a in arb_expr(), b in arb_expr(), z in small_point()) {
            let lhs = E::add(a.clone(), E::mul(E::real(2.5), b.clone())).partial(0).eval(&[z]);
            let rhs = a.partial(0).eval(&[z]).and_then(|x| b.partial(0).eval(&[z]).map(|y| x + y * 2.5));
            if let (Ok(l), Ok(r)) = (lhs, rhs) {
                prop_assume!(l.is_finite() && r.is_finite());
                prop_assert!((l - r).norm() <= 1e-9 * (1.0 + r.norm()));
            }
        }

        #[test]
        fn leibniz_rule(a in arb_expr(), b in arb_expr(), z in small_point()) {
            let lhs = E::mul(a.clone(), b.clone()).partial(0).eval(&[z]);
            let parts = (a.eval(&[z]), a.partial(0).eval(&[z]), b.eval(&[z]), b.partial(0).eval(&[z]));
            if let (Ok(l), (Ok(av), Ok(ad), Ok(bv), Ok(bd))) = (lhs, parts) {
                let r = ad * bv + av * bd;
                prop_assume!(l.is_finite() && r.is_finite());
                prop_assert!((l - r).norm() <= 1e-9 * (1.0 + r.norm()));
            }
        }

        #[test]
        fn truncated_taylor_remainder(z0 in small_point(), dir in 0.0f64..std::f64::consts::TAU) {
            for f in [parse("exp(z)"), parse("sin(z)*z"), parse("cos(z) + z^3")] {
                let n = 10;
                let coeffs = f.taylor_coeffs(z0, n).unwrap();
                let h = C::from_polar(0.05, dir);
                let approx = coeffs.iter().rev().fold(c(0., 0.), |acc, ck| acc * h + ck);
                let exact = f.eval(z0 + h).unwrap();
                // remainder of an entire function of modest growth: next term times a safety factor
                let bound = 10.0 * (coeffs[n].norm() + 1e-12) * h.norm() + 1e-14 * (1.0 + exact.norm());
                prop_assert!((approx - exact).norm() <= bound);
            }
        }
    }

    #[test]
    fn f32_scalar_works() {
        let f = AnalyticFn::<f32>::parse("exp(z) + z^2").unwrap();
        let v = f.eval(Complex::new(1.0f32, 0.0)).unwrap();
        assert!((v.re - (std::f32::consts::E + 1.0)).abs() < 1e-6);
    }
}
