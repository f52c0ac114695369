//! Arithmetic expressions in one variable for initial data and potentials.
//!
//! A hand-rolled recursive-descent parser over the grammar
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' factor)?          // right-associative power
//! base   := number | 'x' | 'pi' | fn '(' expr ')' | '(' expr ')' | '-' base
//! fn     := sin | cos | tan | exp | log | sqrt | abs | sinh | cosh
//! ```
//!
//! Parse failures report the byte offset of the offending input; domain
//! faults during evaluation (log of a non-positive value, division by
//! zero at a node, any non-finite result) are reported as evaluation
//! errors rather than silently producing NaN fields.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{PeriodicGrid, RealField};

#[derive(Debug, Clone, Copy, PartialEq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Sinh,
    Cosh,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var,
    Pi,
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Fun(Func, Box<Node>),
}

/// A parsed expression in the variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
}

/// Parse expression text; the returned [`Expression`] can be evaluated at
/// points or sampled on a grid.
pub fn parse(src: &str) -> Result<Expression> {
    let mut p = Parser {
        bytes: src.as_bytes(),
        pos: 0,
    };
    let root = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(Expression { root })
}

impl Expression {
    /// Evaluate at a single point.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = eval_node(&self.root, x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Eval {
                message: format!("non-finite value at x = {x}"),
            })
        }
    }

    /// Sample on every node of a grid.
    pub fn sample(&self, grid: &PeriodicGrid) -> Result<RealField> {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.len() {
            values.push(self.eval(grid.node(j))?);
        }
        grid.from_samples(values)
    }
}

impl PeriodicGrid {
    /// Parse expression text and sample it on this grid in one step.
    pub fn eval_expression(&self, src: &str) -> Result<RealField> {
        parse(src)?.sample(self)
    }
}

fn eval_node(node: &Node, x: f64) -> Result<f64> {
    Ok(match node {
        Node::Num(v) => *v,
        Node::Var => x,
        Node::Pi => PI,
        Node::Neg(a) => -eval_node(a, x)?,
        Node::Bin(op, a, b) => {
            let a = eval_node(a, x)?;
            let b = eval_node(b, x)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(Error::Eval {
                            message: format!("division by zero at x = {x}"),
                        });
                    }
                    a / b
                }
                BinOp::Pow => a.powf(b),
            }
        }
        Node::Fun(f, a) => {
            let a = eval_node(a, x)?;
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Tan => a.tan(),
                Func::Exp => a.exp(),
                Func::Log => {
                    if a <= 0.0 {
                        return Err(Error::Eval {
                            message: format!("log of non-positive value {a} at x = {x}"),
                        });
                    }
                    a.ln()
                }
                Func::Sqrt => {
                    if a < 0.0 {
                        return Err(Error::Eval {
                            message: format!("sqrt of negative value {a} at x = {x}"),
                        });
                    }
                    a.sqrt()
                }
                Func::Abs => a.abs(),
                Func::Sinh => a.sinh(),
                Func::Cosh => a.cosh(),
            }
        }
    })
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Node> {
        let mut node = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == b'+' { BinOp::Add } else { BinOp::Sub };
            node = Node::Bin(op, Box::new(node), Box::new(rhs));
        }
        Ok(node)
    }

    fn term(&mut self) -> Result<Node> {
        let mut node = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            let op = if c == b'*' { BinOp::Mul } else { BinOp::Div };
            node = Node::Bin(op, Box::new(node), Box::new(rhs));
        }
        Ok(node)
    }

    fn factor(&mut self) -> Result<Node> {
        let base = self.base()?;
        if let Some(b'^') = self.peek() {
            self.pos += 1;
            let exp = self.factor()?; // right-associative
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Node> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.base()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_lowercase() => self.ident(),
            Some(_) => Err(self.error("expected a number, name, '(' or '-'")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn expect(&mut self, want: u8) -> Result<()> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(match want {
                b')' => "expected ')'",
                b'(' => "expected '('",
                _ => "unexpected character",
            }))
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        while matches!(self.bytes.get(self.pos), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while matches!(self.bytes.get(self.pos), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if matches!(self.bytes.get(self.pos), Some(c) if c.is_ascii_digit()) {
                while matches!(self.bytes.get(self.pos), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // not an exponent after all (e.g. "2e" would be malformed)
                self.pos = mark;
            }
        }
        let text = core::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        match text.parse::<f64>() {
            Ok(v) => Ok(Node::Num(v)),
            Err(_) => {
                self.pos = start;
                Err(self.error("malformed number"))
            }
        }
    }

    fn ident(&mut self) -> Result<Node> {
        let start = self.pos;
        while matches!(self.bytes.get(self.pos), Some(c) if c.is_ascii_lowercase()) {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        match name {
            "x" => return Ok(Node::Var),
            "pi" => return Ok(Node::Pi),
            _ => {}
        }
        let func = match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            _ => {
                self.pos = start;
                return Err(self.error("unknown name"));
            }
        };
        self.expect(b'(')?;
        let arg = self.expr()?;
        self.expect(b')')?;
        Ok(Node::Fun(func, Box::new(arg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn eval(src: &str, x: f64) -> f64 {
        parse(src).unwrap().eval(x).unwrap()
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_abs_diff_eq!(eval("2+3*4", 0.0), 14.0);
        assert_abs_diff_eq!(eval("(2+3)*4", 0.0), 20.0);
        assert_abs_diff_eq!(eval("7-3-2", 0.0), 2.0); // left-assoc
        assert_abs_diff_eq!(eval("12/3/2", 0.0), 2.0);
        assert_abs_diff_eq!(eval("2^3^2", 0.0), 512.0); // right-assoc
        assert_abs_diff_eq!(eval("2*pi", 0.0), 2.0 * PI);
        assert_abs_diff_eq!(eval("1.5e2 + 2.5e-1", 0.0), 150.25);
    }

    #[test]
    fn unary_minus_binds_before_power() {
        // per the grammar, '-' is part of base, so -x^2 = (-x)^2
        assert_abs_diff_eq!(eval("-x^2", 2.0), 4.0);
        assert_abs_diff_eq!(eval("-(x^2)", 2.0), -4.0);
        assert_abs_diff_eq!(eval("2^-1", 0.0), 0.5);
    }

    #[test]
    fn functions_evaluate() {
        let x = 0.7;
        assert_abs_diff_eq!(eval("sin(x)^2 + cos(x)^2", x), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(eval("tan(x)", x), x.tan(), epsilon = 1e-15);
        assert_abs_diff_eq!(eval("exp(log(x))", x), x, epsilon = 1e-15);
        assert_abs_diff_eq!(eval("sqrt(abs(-x))", x), x.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(eval("cosh(x)^2 - sinh(x)^2", x), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eval("1 + 0.5*cos(x)", x), 1.0 + 0.5 * x.cos());
    }

    #[test]
    fn parse_errors_carry_byte_offsets() {
        match parse("1 + @") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse("foo(x)") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse("(1+2") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse("1 2") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(parse(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn domain_faults_are_eval_errors() {
        assert!(matches!(
            parse("log(0)").unwrap().eval(1.0),
            Err(Error::Eval { .. })
        ));
        assert!(matches!(
            parse("1/x").unwrap().eval(0.0),
            Err(Error::Eval { .. })
        ));
        assert!(matches!(
            parse("sqrt(0-x)").unwrap().eval(1.0),
            Err(Error::Eval { .. })
        ));
        // 0^-1 is infinite
        assert!(matches!(
            parse("0^-1").unwrap().eval(0.0),
            Err(Error::Eval { .. })
        ));
    }

    #[test]
    fn sampling_on_a_grid() {
        let g = PeriodicGrid::new(64).unwrap();
        let f = g.eval_expression("1 + 0.5*cos(x)").unwrap();
        let want = g.real_field(|x| 1.0 + 0.5 * x.cos());
        for (a, b) in f.values().iter().zip(want.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
        // division by zero at node 0
        assert!(matches!(
            g.eval_expression("1/sin(x)"),
            Err(Error::Eval { .. })
        ));
    }
}
