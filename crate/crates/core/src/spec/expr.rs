//! Tiny closed-form expression language for graph functions:
//! numbers, `x y z`, `pi e`, `+ - * / ^`, the middle dot `·` as an alias
//! of `*`, and `sin cos exp`.

use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => " * ",
            BinOp::Div => " / ",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Coordinate index: `x` is 0, `y` is 1, `z` is 2.
    Var(usize),
    Pi,
    E,
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

const NEG_PRECEDENCE: u8 = 3;

impl Expr {
    /// Parses a whole expression; `line` and `col0` locate the text in the
    /// surrounding document for diagnostics.
    pub fn parse_at(text: &str, line: usize, col0: usize) -> Result<Expr, ParseError> {
        let mut p = Parser { chars: text.chars().collect(), pos: 0, line, col0 };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error(format!("unexpected '{}' in expression", p.chars[p.pos])));
        }
        Ok(e)
    }

    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        Expr::parse_at(text, 1, 1)
    }

    /// Highest coordinate index used, plus one.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Var(i) => i + 1,
            Expr::Num(_) | Expr::Pi | Expr::E => 0,
            Expr::Neg(a) | Expr::Call(_, a) => a.arity(),
            Expr::Bin(_, a, b) => a.arity().max(b.arity()),
        }
    }

    /// Evaluates at `x`; missing coordinates read as 0.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => x.get(*i).copied().unwrap_or(0.0),
            Expr::Pi => std::f64::consts::PI,
            Expr::E => std::f64::consts::E,
            Expr::Neg(a) => -a.eval(x),
            Expr::Call(f, a) => {
                let v = a.eval(x);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                }
            }
            Expr::Bin(op, a, b) => {
                let (u, v) = (a.eval(x), b.eval(x));
                match op {
                    BinOp::Add => u + v,
                    BinOp::Sub => u - v,
                    BinOp::Mul => u * v,
                    BinOp::Div => u / v,
                    BinOp::Pow => pow(u, v),
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, ..) => op.precedence(),
            Expr::Neg(_) => NEG_PRECEDENCE,
            _ => 5,
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn pow(u: f64, v: f64) -> f64 {
    if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 {
        u.powi(v as i32)
    } else {
        u.powf(v)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "{}", ["x", "y", "z"][*i]),
            Expr::Pi => write!(f, "pi"),
            Expr::E => write!(f, "e"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.write_operand(f, a.precedence() < NEG_PRECEDENCE)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Bin(op, a, b) => {
                let p = op.precedence();
                let (left, right) = if *op == BinOp::Pow {
                    // right associative; a negated base needs parentheses
                    (a.precedence() <= p, b.precedence() < NEG_PRECEDENCE)
                } else {
                    (a.precedence() < p, b.precedence() <= p)
                };
                a.write_operand(f, left)?;
                write!(f, "{}", op.symbol())?;
                b.write_operand(f, right)
            }
        }
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col0: usize,
}

impl Parser {
    fn error(&self, message: String) -> ParseError {
        ParseError { message, line: self.line, column: self.col0 + self.pos }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some('*') | Some('·') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let c = match self.peek() {
            Some(c) => c,
            None => return Err(self.error("expression ended early".into())),
        };
        if c == '(' {
            self.pos += 1;
            let e = self.sum()?;
            if self.peek() != Some(')') {
                return Err(self.error("expected ')'".into()));
            }
            self.pos += 1;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let word: String = self.chars[start..self.pos].iter().collect();
            let func = match word.as_str() {
                "x" => return Ok(Expr::Var(0)),
                "y" => return Ok(Expr::Var(1)),
                "z" => return Ok(Expr::Var(2)),
                "pi" => return Ok(Expr::Pi),
                "e" => return Ok(Expr::E),
                "sin" => Func::Sin,
                "cos" => Func::Cos,
                "exp" => Func::Exp,
                _ => {
                    self.pos = start;
                    return Err(self.error(format!("unknown name '{word}' in expression")));
                }
            };
            if self.peek() != Some('(') {
                return Err(self.error(format!("expected '(' after {word}")));
            }
            self.pos += 1;
            let arg = self.sum()?;
            if self.peek() != Some(')') {
                return Err(self.error("expected ')'".into()));
            }
            self.pos += 1;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        Err(self.error(format!("unexpected '{c}' in expression")))
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Parser| {
            while p.pos < p.chars.len() && p.chars[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.chars.get(self.pos), Some('e') | Some('E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+') | Some('-')) {
                self.pos += 1;
            }
            if self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                digits(self);
            } else {
                // `2e` is 2 followed by Euler's number's name, not an exponent
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>().map(Expr::Num).map_err(|_| {
            self.pos = start;
            self.error(format!("malformed number '{text}'"))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn evaluates_with_precedence() {
        let e = Expr::parse("1 + 2 * 3 ^ 2 - 8 / 4 / 2").unwrap();
        assert_eq!(e.eval(&[]), 18.0);
        let e = Expr::parse("2^3^2").unwrap();
        assert_eq!(e.eval(&[]), 512.0);
        let e = Expr::parse("-x^2").unwrap();
        assert_eq!(e.eval(&[3.0]), -9.0);
        let e = Expr::parse("0.1·cos(x) + exp(-y^2) * sin(pi/2)").unwrap();
        assert!((e.eval(&[0.0, 0.0]) - 1.1).abs() < 1e-15);
        assert_eq!(e.arity(), 2);
    }

    #[test]
    fn reports_column() {
        let err = Expr::parse("x + tan(x)").unwrap_err();
        assert_eq!(err.column, 5);
        assert!(err.message.contains("tan"));
        assert!(Expr::parse("(x").is_err());
        assert!(Expr::parse("x )").is_err());
        assert!(Expr::parse("1.2.3").is_err());
    }

    #[test]
    fn printing_is_canonical() {
        let e = Expr::parse("(x-(y-1))*-(2)^-z/(x/y)").unwrap();
        let s = e.to_string();
        assert_eq!(Expr::parse(&s).unwrap(), e);
        assert_eq!(Expr::parse(&s).unwrap().to_string(), s);
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..1e6).prop_map(Expr::Num),
            (0usize..3).prop_map(Expr::Var),
            Just(Expr::Pi),
            Just(Expr::E),
        ];
        leaf.prop_recursive(4, 32, 2, |inner| {
            let op =
                prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)];
            let func = prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Exp)];
            prop_oneof![
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (func, inner.clone()).prop_map(|(f, a)| Expr::Call(f, Box::new(a))),
                (op, inner.clone(), inner).prop_map(|(o, a, b)| Expr::Bin(o, Box::new(a), Box::new(b))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let s = e.to_string();
            prop_assert_eq!(Expr::parse(&s).unwrap(), e);
        }
    }
}
