use super::{BinaryOp, Comparison, Expr, ExprError, UnaryOp, Var};
use crate::ext_real::ExtReal;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Cmp(Comparison),
    End,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(x) => format!("number {x}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Cmp(c) => format!("`{}`", c.symbol()),
        Tok::End => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let tok = if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let value = lit.parse::<f64>().map_err(|_| ExprError::Syntax {
                offset: start,
                message: format!("malformed number `{lit}`"),
            })?;
            Tok::Num(value)
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(text[start..i].to_string())
        } else {
            i += 1;
            let next = bytes.get(i).copied();
            match c {
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'^' => Tok::Caret,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b'<' | b'>' => {
                    let or_equal = next == Some(b'=');
                    if or_equal {
                        i += 1;
                    }
                    Tok::Cmp(match (c, or_equal) {
                        (b'<', false) => Comparison::Lt,
                        (b'<', true) => Comparison::Le,
                        (_, false) => Comparison::Gt,
                        (_, true) => Comparison::Ge,
                    })
                }
                b'=' if next == Some(b'=') => {
                    i += 1;
                    Tok::Cmp(Comparison::Eq)
                }
                _ => {
                    return Err(ExprError::Syntax {
                        offset: start,
                        message: format!("unexpected character `{}`", &text[start..start + 1]),
                    })
                }
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    allowed: &'a [Var],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            offset: self.offset(),
            message: format!("expected {wanted}, found {}", describe(self.peek())),
        })
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ExprError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(wanted)
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::binary(op, lhs, self.factor()?);
        }
    }

    // factor := '-' factor | atom ('^' factor)?
    fn factor(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::unary(UnaryOp::Neg, self.factor()?));
        }
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::Const(ExtReal::from_f64(x)))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let offset = self.offset();
                self.bump();
                self.identifier(&name, offset)
            }
            _ => self.unexpected("a number, variable, function call or `(`"),
        }
    }

    fn identifier(&mut self, name: &str, offset: usize) -> Result<Expr, ExprError> {
        let unary = match name {
            "inf" => return Ok(Expr::Const(ExtReal::PosInf)),
            "abs" => Some(UnaryOp::Abs),
            "exp" => Some(UnaryOp::Exp),
            "ln" => Some(UnaryOp::Ln),
            "sqrt" => Some(UnaryOp::Sqrt),
            "cosh" => Some(UnaryOp::Cosh),
            _ => None,
        };
        if let Some(op) = unary {
            self.expect(Tok::LParen, "`(` after function name")?;
            let arg = self.expr()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Expr::unary(op, arg));
        }
        match name {
            "min" | "max" => {
                let op = if name == "min" { BinaryOp::Min } else { BinaryOp::Max };
                self.expect(Tok::LParen, "`(` after function name")?;
                let a = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::binary(op, a, b))
            }
            "if" => {
                self.expect(Tok::LParen, "`(` after `if`")?;
                let left = self.expr()?;
                let cmp = match self.peek() {
                    Tok::Cmp(c) => *c,
                    _ => return self.unexpected("a comparison operator"),
                };
                self.bump();
                let right = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let then = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let otherwise = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::cond(cmp, left, right, then, otherwise))
            }
            _ => match Var::from_name(name) {
                Some(v) if self.allowed.contains(&v) => Ok(Expr::Var(v)),
                Some(_) => Err(ExprError::VariableNotAllowed {
                    offset,
                    name: name.to_string(),
                }),
                None => Err(ExprError::UnknownIdentifier {
                    offset,
                    name: name.to_string(),
                }),
            },
        }
    }
}

/// Parses `text` into an [`Expr`], accepting only variables in `allowed_vars`.
///
/// Precedence: `^` (right-associative) over unary minus over `* /` over `+ -`.
pub fn parse_expr(text: &str, allowed_vars: &[Var]) -> Result<Expr, ExprError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        allowed: allowed_vars,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.unexpected("an operator or end of input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: Var) -> Expr {
        Expr::Var(x)
    }

    #[test]
    fn product_with_power() {
        let e = Expr::parse("t*u^2").unwrap();
        let expected = Expr::binary(
            BinaryOp::Mul,
            v(Var::T),
            Expr::binary(BinaryOp::Pow, v(Var::U), Expr::constant(2.0)),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn piecewise_log() {
        let e = Expr::parse("if(u > 1, t*ln(u), 0)").unwrap();
        let expected = Expr::cond(
            Comparison::Gt,
            v(Var::U),
            Expr::constant(1.0),
            Expr::binary(BinaryOp::Mul, v(Var::T), Expr::unary(UnaryOp::Ln, v(Var::U))),
            Expr::constant(0.0),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn malformed_operator_sequence_reports_offset() {
        match Expr::parse("u +* 2") {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_and_disallowed_variable() {
        assert!(matches!(
            Expr::parse("foo(u)"),
            Err(ExprError::UnknownIdentifier { offset: 0, .. })
        ));
        assert!(matches!(
            parse_expr("t + s", &[Var::T, Var::U]),
            Err(ExprError::VariableNotAllowed { offset: 4, .. })
        ));
    }

    #[test]
    fn power_is_right_associative_and_binds_tighter_than_minus() {
        assert_eq!(
            Expr::parse("2^3^2").unwrap(),
            Expr::parse("2^(3^2)").unwrap()
        );
        assert_eq!(Expr::parse("-u^2").unwrap(), Expr::parse("-(u^2)").unwrap());
        assert_eq!(Expr::parse("u^-1").unwrap(), Expr::parse("u^(-1)").unwrap());
    }

    #[test]
    fn subtraction_is_left_associative() {
        assert_eq!(Expr::parse("1-2-3").unwrap(), Expr::parse("(1-2)-3").unwrap());
    }

    #[test]
    fn numbers_and_inf() {
        assert_eq!(Expr::parse("1.5e-3").unwrap(), Expr::constant(1.5e-3));
        assert_eq!(Expr::parse(".25").unwrap(), Expr::constant(0.25));
        assert_eq!(Expr::parse("inf").unwrap(), Expr::Const(ExtReal::PosInf));
    }

    #[test]
    fn trailing_garbage_and_unclosed_paren() {
        assert!(matches!(Expr::parse("u u"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(Expr::parse("(u"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(Expr::parse("if(u, 1, 2)"), Err(ExprError::Syntax { .. })));
    }
}
