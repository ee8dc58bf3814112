use super::{BinOp, Expr, Func};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Token, usize)>> {
        let mut lexer = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let (tok, at) = lexer.next_token()?;
            let end = tok == Token::End;
            out.push((tok, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn next_token(&mut self) -> Result<(Token, usize)> {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(b) = self.peek() else {
            return Ok((Token::End, start));
        };
        let tok = match b {
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Token::Op(b as char)
            }
            b'(' => {
                self.pos += 1;
                Token::LParen
            }
            b')' => {
                self.pos += 1;
                Token::RParen
            }
            b'0'..=b'9' | b'.' => self.number(start)?,
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                Token::Ident(self.src[start..self.pos].to_string())
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax { offset: start, message: format!("unexpected character `{ch}`") });
            }
        };
        Ok((tok, start))
    }

    fn number(&mut self, start: usize) -> Result<Token> {
        let digits = |lx: &mut Lexer| {
            while matches!(lx.peek(), Some(c) if c.is_ascii_digit()) {
                lx.pos += 1;
            }
        };
        digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                digits(self);
            } else {
                self.pos = mark;
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>()
            .map(Token::Num)
            .map_err(|_| Error::Syntax { offset: start, message: format!("malformed number `{text}`") })
    }
}

struct Parser<'c> {
    tokens: Vec<(Token, usize)>,
    cursor: usize,
    coords: &'c [&'c str],
}

/// Parses `src` into an expression over `coords`.
///
/// Precedence, tightest first: `^` (right-associative), unary `-`, `* /`, `+ -`.
/// The right operand of `^` may itself carry a unary minus (`2^-x`).
pub fn parse(src: &str, coords: &[&str]) -> Result<Expr> {
    if src.trim().is_empty() {
        return Err(Error::Syntax { offset: 0, message: "empty expression".into() });
    }
    let mut parser = Parser { tokens: Lexer::tokens(src)?, cursor: 0, coords };
    let expr = parser.sum()?;
    match parser.peek() {
        (Token::End, _) => Ok(expr),
        (tok, at) => Err(Error::Syntax { offset: *at, message: format!("unexpected {}", describe(tok)) }),
    }
}

fn describe(tok: &Token) -> String {
    match tok {
        Token::Num(v) => format!("number {v}"),
        Token::Ident(s) => format!("identifier `{s}`"),
        Token::Op(c) => format!("operator `{c}`"),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
        Token::End => "end of input".into(),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &(Token, usize) {
        &self.tokens[self.cursor]
    }

    fn bump(&mut self) -> (Token, usize) {
        let t = self.tokens[self.cursor].clone();
        if t.0 != Token::End {
            self.cursor += 1;
        }
        t
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let (Token::Op(c @ ('+' | '-')), _) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.bump();
            let rhs = self.product()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let (Token::Op(c @ ('*' | '/')), _) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if let (Token::Op('-'), _) = self.peek() {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let (Token::Op('^'), _) = self.peek() {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let (tok, at) = self.bump();
        match tok {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::LParen => {
                let inner = self.sum()?;
                self.expect_rparen(at)?;
                Ok(inner)
            }
            Token::Ident(name) => {
                if let (Token::LParen, open) = self.peek().clone() {
                    let func = Func::from_name(&name).ok_or_else(|| Error::UnknownIdentifier(name.clone()))?;
                    self.bump();
                    let arg = self.sum()?;
                    self.expect_rparen(open)?;
                    return Ok(Expr::call(func, arg));
                }
                match self.coords.iter().position(|c| *c == name) {
                    Some(index) => Ok(Expr::Var { name, index }),
                    None => Err(Error::UnknownIdentifier(name)),
                }
            }
            other => Err(Error::Syntax { offset: at, message: format!("expected operand, found {}", describe(&other)) }),
        }
    }

    fn expect_rparen(&mut self, open: usize) -> Result<()> {
        match self.bump() {
            (Token::RParen, _) => Ok(()),
            (tok, at) => Err(Error::Syntax {
                offset: at,
                message: format!("expected `)` closing `(` at byte {open}, found {}", describe(&tok)),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let c = ["a", "b", "c"];
        let e = parse("a^b^c", &c).unwrap();
        assert_eq!(e, parse("a^(b^c)", &c).unwrap());
        let e = parse("-a^2", &c).unwrap();
        assert!(matches!(e, Expr::Neg(_)));
        let e = parse("a - b - c", &c).unwrap();
        assert_eq!(e, parse("(a - b) - c", &c).unwrap());
        assert_eq!(parse("2^-a", &c).unwrap(), parse("2^(-a)", &c).unwrap());
        assert_eq!(parse("a*b/c", &c).unwrap(), parse("(a*b)/c", &c).unwrap());
    }

    #[test]
    fn product_difference() {
        let c = ["x1", "x2", "y1", "y2"];
        let e = parse("x1*y2 - x2*y1", &c).unwrap();
        let Expr::Binary { op: BinOp::Sub, lhs, rhs } = e else { panic!("expected difference") };
        assert!(matches!(*lhs, Expr::Binary { op: BinOp::Mul, .. }));
        assert!(matches!(*rhs, Expr::Binary { op: BinOp::Mul, .. }));
    }

    #[test]
    fn oscillator_hamiltonian_parses() {
        let c = ["x1", "x2", "y1", "y2"];
        let e = parse("0.5*(y1^2+y2^2) + 0.5*(x1^2+x2^2)", &c).unwrap();
        assert_eq!(e.eval(&[1.0, 0.0, 0.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn syntax_error_reports_offset() {
        let err = parse("x + * y", &["x", "y"]).unwrap_err();
        assert_eq!(err, Error::Syntax { offset: 4, message: "expected operand, found operator `*`".into() });
        let err = parse("(x + y", &["x", "y"]).unwrap_err();
        assert!(matches!(err, Error::Syntax { offset: 6, .. }));
        assert!(matches!(parse("x $ y", &["x", "y"]), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("   ", &["x"]), Err(Error::Syntax { offset: 0, .. })));
    }

    #[test]
    fn unknown_identifier_is_named() {
        assert_eq!(parse("x + z", &["x"]).unwrap_err(), Error::UnknownIdentifier("z".into()));
        assert_eq!(parse("foo(x)", &["x"]).unwrap_err(), Error::UnknownIdentifier("foo".into()));
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(parse("1.5e-3", &[]).unwrap(), Expr::Num(1.5e-3));
        assert_eq!(parse("2E2", &[]).unwrap(), Expr::Num(200.0));
    }
}
