//! Coefficient expressions in the single variable `z`.
//!
//! Grammar (see `docs/grammar.md`):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;          (* right associative *)
//! primary = number | "z" | "pi" | func "(" expr ")" | "(" expr ")" ;
//! func    = "exp" | "sin" | "cos" | "sqrt" ;
//! ```
//!
//! `^` binds tighter than unary minus, so `-z^2` is `-(z^2)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Num(f64),
    Var,
    Pi,
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Box<Ast>),
    Call(Func, Box<Ast>),
}

impl Ast {
    pub fn eval<T: Scalar>(&self, z: T) -> T {
        match self {
            Ast::Num(v) => T::lit(*v),
            Ast::Var => z,
            Ast::Pi => T::PI(),
            Ast::Neg(a) => -a.eval(z),
            Ast::Add(a, b) => a.eval(z) + b.eval(z),
            Ast::Sub(a, b) => a.eval(z) - b.eval(z),
            Ast::Mul(a, b) => a.eval(z) * b.eval(z),
            Ast::Div(a, b) => a.eval(z) / b.eval(z),
            Ast::Pow(a, b) => {
                let base = a.eval(z);
                match b.constant_value() {
                    Some(e) if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 => base.powi(e as i32),
                    _ => base.powf(b.eval(z)),
                }
            }
            Ast::Call(f, a) => {
                let x = a.eval(z);
                match f {
                    Func::Exp => x.exp(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sqrt => x.sqrt(),
                }
            }
        }
    }

    pub fn depends_on_z(&self) -> bool {
        match self {
            Ast::Num(_) | Ast::Pi => false,
            Ast::Var => true,
            Ast::Neg(a) | Ast::Call(_, a) => a.depends_on_z(),
            Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) | Ast::Div(a, b) | Ast::Pow(a, b) => {
                a.depends_on_z() || b.depends_on_z()
            }
        }
    }

    /// Value of a `z`-free subtree.
    pub fn constant_value(&self) -> Option<f64> {
        if self.depends_on_z() {
            None
        } else {
            Some(self.eval(0.0f64))
        }
    }

    /// Symbolic derivative with respect to `z`.
    ///
    /// Exponents must be `z`-free; `u^v(z)` would need a logarithm, which the
    /// grammar does not have.
    pub fn derivative(&self) -> Result<Ast> {
        use Ast::*;
        Ok(match self {
            Num(_) | Pi => Num(0.0),
            Var => Num(1.0),
            Neg(a) => neg(a.derivative()?),
            Add(a, b) => add(a.derivative()?, b.derivative()?),
            Sub(a, b) => sub(a.derivative()?, b.derivative()?),
            Mul(a, b) => add(mul(a.derivative()?, (**b).clone()), mul((**a).clone(), b.derivative()?)),
            Div(a, b) => div(
                sub(mul(a.derivative()?, (**b).clone()), mul((**a).clone(), b.derivative()?)),
                pow((**b).clone(), Num(2.0)),
            ),
            Pow(a, b) => {
                if b.depends_on_z() {
                    return Err(Error::Differentiation(format!("exponent `{b}` depends on z")));
                }
                let e = b.constant_value().unwrap_or(0.0);
                mul(mul(Num(e), pow((**a).clone(), Num(e - 1.0))), a.derivative()?)
            }
            Call(f, a) => {
                let inner = a.derivative()?;
                let outer = match f {
                    Func::Exp => Call(Func::Exp, a.clone()),
                    Func::Sin => Call(Func::Cos, a.clone()),
                    Func::Cos => neg(Call(Func::Sin, a.clone())),
                    Func::Sqrt => div(Num(0.5), Call(Func::Sqrt, a.clone())),
                };
                mul(outer, inner)
            }
        })
    }
}

fn is_num(a: &Ast, v: f64) -> bool {
    matches!(a, Ast::Num(x) if *x == v)
}

fn neg(a: Ast) -> Ast {
    match a {
        Ast::Num(0.0) => Ast::Num(0.0),
        Ast::Neg(inner) => *inner,
        other => Ast::Neg(Box::new(other)),
    }
}

fn add(a: Ast, b: Ast) -> Ast {
    if is_num(&a, 0.0) {
        b
    } else if is_num(&b, 0.0) {
        a
    } else {
        Ast::Add(Box::new(a), Box::new(b))
    }
}

fn sub(a: Ast, b: Ast) -> Ast {
    if is_num(&b, 0.0) {
        a
    } else if is_num(&a, 0.0) {
        neg(b)
    } else {
        Ast::Sub(Box::new(a), Box::new(b))
    }
}

fn mul(a: Ast, b: Ast) -> Ast {
    if is_num(&a, 0.0) || is_num(&b, 0.0) {
        Ast::Num(0.0)
    } else if is_num(&a, 1.0) {
        b
    } else if is_num(&b, 1.0) {
        a
    } else if let (Ast::Num(x), Ast::Num(y)) = (&a, &b) {
        Ast::Num(x * y)
    } else {
        Ast::Mul(Box::new(a), Box::new(b))
    }
}

fn div(a: Ast, b: Ast) -> Ast {
    if is_num(&a, 0.0) {
        Ast::Num(0.0)
    } else if is_num(&b, 1.0) {
        a
    } else {
        Ast::Div(Box::new(a), Box::new(b))
    }
}

fn pow(a: Ast, b: Ast) -> Ast {
    if is_num(&b, 1.0) {
        a
    } else if is_num(&b, 0.0) {
        Ast::Num(1.0)
    } else {
        Ast::Pow(Box::new(a), Box::new(b))
    }
}

/// Fully parenthesised rendering; parsing it back yields the same tree.
impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => {
                write!(f, "(-{:?})", -v)
            }
            Ast::Num(v) => write!(f, "{v:?}"),
            Ast::Var => f.write_str("z"),
            Ast::Pi => f.write_str("pi"),
            Ast::Neg(a) => write!(f, "(-{a})"),
            Ast::Add(a, b) => write!(f, "({a} + {b})"),
            Ast::Sub(a, b) => write!(f, "({a} - {b})"),
            Ast::Mul(a, b) => write!(f, "({a} * {b})"),
            Ast::Div(a, b) => write!(f, "({a} / {b})"),
            Ast::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Ast::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// A parsed coefficient function together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffExpr {
    source: String,
    ast: Ast,
}

impl CoeffExpr {
    pub fn parse(source: &str) -> Result<Self> {
        parse_coeff(source)
    }

    /// Expression for a constant.
    pub fn constant(value: f64) -> Self {
        let ast = if value < 0.0 {
            Ast::Neg(Box::new(Ast::Num(-value)))
        } else {
            Ast::Num(value)
        };
        CoeffExpr {
            source: format!("{value:?}"),
            ast,
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Ast {
        &self.ast
    }

    #[inline]
    pub fn eval<T: Scalar>(&self, z: T) -> T {
        self.ast.eval(z)
    }

    pub fn derivative(&self) -> Result<CoeffExpr> {
        let ast = self.ast.derivative()?;
        Ok(CoeffExpr {
            source: ast.to_string(),
            ast,
        })
    }

    /// Re-render the tree (not the original source).
    pub fn unparse(&self) -> String {
        self.ast.to_string()
    }
}

impl FromStr for CoeffExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_coeff(s)
    }
}

impl fmt::Display for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl serde::Serialize for CoeffExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> serde::Deserialize<'de> for CoeffExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_coeff(&s).map_err(serde::de::Error::custom)
    }
}

/// Parse a coefficient expression.
pub fn parse_coeff(source: &str) -> Result<CoeffExpr> {
    if source.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut parser = Parser {
        src: source.as_bytes(),
        pos: 0,
    };
    let ast = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(CoeffExpr {
        source: source.to_string(),
        ast,
    })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
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

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.eat(b'-') {
            Ok(Ast::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let exponent = self.unary()?;
            Ok(Ast::Pow(Box::new(base), Box::new(exponent)))
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Ast> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                match name {
                    "z" => Ok(Ast::Var),
                    "pi" => Ok(Ast::Pi),
                    _ => match Func::lookup(name) {
                        Some(func) => {
                            if !self.eat(b'(') {
                                return Err(self.error("expected `(` after function name"));
                            }
                            let arg = self.expr()?;
                            if !self.eat(b')') {
                                return Err(self.error("expected `)`"));
                            }
                            Ok(Ast::Call(func, Box::new(arg)))
                        }
                        None => Err(Error::UnknownIdentifier {
                            name: name.to_string(),
                            offset: start,
                        }),
                    },
                }
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Ast> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            return Err(self.error("malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
                return Err(self.error("malformed exponent"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        text.parse::<f64>().map(Ast::Num).map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, z: f64) -> f64 {
        parse_coeff(s).unwrap().eval(z)
    }

    #[test]
    fn evaluates_examples() {
        assert_eq!(ev("exp(-z/1.0)", 0.0), 1.0);
        assert_eq!(ev("2*z^2+1", 2.0), 9.0);
        assert!((ev("exp(-z/0.5)", 0.5) - 0.367_879_441_171_442_3).abs() < 1e-15);
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("-z^2", 3.0), -9.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("1-2-3", 0.0), -4.0);
        assert_eq!(ev("8/4/2", 0.0), 1.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("(1+z)*(1-z)", 0.5), 0.75);
        assert!((ev("sqrt(4)*cos(pi)", 0.0) + 2.0).abs() < 1e-15);
        assert_eq!(ev("1.5e1 + .5", 0.0), 15.5);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        match parse_coeff("exp(") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("{other:?}"),
        }
        match parse_coeff("1 + foo(z)") {
            Err(Error::UnknownIdentifier { name, offset }) => {
                assert_eq!(name, "foo");
                assert_eq!(offset, 4);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_coeff("1 2"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_coeff("  "), Err(Error::Syntax { .. })));
        assert!(matches!(parse_coeff("sin z"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_coeff("1e+"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let cases = [
            "exp(-z/0.5)",
            "2*z^2+1",
            "sin(3*z)*cos(z)",
            "sqrt(1+z^2)/(2+z)",
            "-z^3 + 4",
            "exp(-z)*(1+z)^-2",
        ];
        for src in cases {
            let e = parse_coeff(src).unwrap();
            let d = e.derivative().unwrap();
            for &z in &[0.1f64, 0.4, 0.9] {
                let h = 1e-5;
                let fd = (e.eval(z + h) - e.eval(z - h)) / (2.0 * h);
                assert!((d.eval(z) - fd).abs() < 1e-7 * (1.0 + fd.abs()), "{src} at {z}");
            }
        }
    }

    #[test]
    fn variable_exponent_is_not_differentiable() {
        let e = parse_coeff("2^z").unwrap();
        assert!(matches!(e.derivative(), Err(Error::Differentiation(_))));
    }

    #[test]
    fn constant_derivative_folds_to_zero() {
        let d = parse_coeff("3.5").unwrap().derivative().unwrap();
        assert_eq!(d.ast(), &Ast::Num(0.0));
    }

    #[test]
    fn evaluates_in_single_precision() {
        let e = parse_coeff("exp(-z)*2").unwrap();
        assert!((e.eval(1.0f32) - 0.735_758_9).abs() < 1e-6);
    }
}
