//! Pratt parser for the infix expression grammar.
//!
//! Identifiers are `[A-Za-z][A-Za-z0-9_]*`. Binary operators `+ - * / ^`
//! follow the usual precedence with `^` right-associative; its exponent must
//! reduce to an integer constant. Two integer literals joined by `/` with no
//! whitespace form a single rational literal, so `x^1/2` is rejected rather
//! than read as `(x^1)/2`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{Expr, Func, Rational};
use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ratio(BigInt, BigInt),
    Decimal,
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
}

impl Lexer {
    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    /// Returns the token and its 1-based column.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
        let col = self.pos + 1;
        let Some(&c) = self.chars.get(self.pos) else {
            return Ok((Tok::End, col));
        };
        if c.is_ascii_digit() {
            let n: BigInt = self.digits().parse().unwrap();
            let next = self.chars.get(self.pos).copied();
            let after = self.chars.get(self.pos + 1).copied();
            if next == Some('/') && after.is_some_and(|a| a.is_ascii_digit()) {
                self.pos += 1;
                let d: BigInt = self.digits().parse().unwrap();
                if d == BigInt::from(0) {
                    return Err(ParseError::DivisionByZero { column: col });
                }
                return Ok((Tok::Ratio(n, d), col));
            }
            if next == Some('.') && after.is_some_and(|a| a.is_ascii_digit()) {
                self.pos += 1;
                self.digits();
                return Ok((Tok::Decimal, col));
            }
            return Ok((Tok::Int(n), col));
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self.pos < self.chars.len()
                && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
            {
                self.pos += 1;
            }
            return Ok((
                Tok::Ident(self.chars[start..self.pos].iter().collect()),
                col,
            ));
        }
        self.pos += 1;
        match c {
            '+' | '-' | '*' | '/' | '^' => Ok((Tok::Op(c), col)),
            '(' => Ok((Tok::LParen, col)),
            ')' => Ok((Tok::RParen, col)),
            other => Err(ParseError::Syntax {
                column: col,
                message: format!("unexpected character `{other}`"),
            }),
        }
    }
}

struct Parser {
    lexer: Lexer,
    tok: Tok,
    col: usize,
}

const PREFIX_BP: u8 = 25;

fn infix_bp(op: char) -> (u8, u8) {
    match op {
        '+' | '-' => (10, 11),
        '*' | '/' => (20, 21),
        '^' => (30, 29),
        _ => unreachable!(),
    }
}

impl Parser {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (t, c) = self.lexer.next()?;
        self.tok = t;
        self.col = c;
        Ok(())
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            column: self.col,
            message: message.into(),
        })
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.tok {
                Tok::Op(op) => op,
                Tok::End | Tok::RParen => break,
                _ => return self.syntax("expected an operator"),
            };
            let (lbp, rbp) = infix_bp(op);
            if lbp < min_bp {
                break;
            }
            self.bump()?;
            let rhs_col = self.col;
            let rhs = self.expr(rbp)?;
            lhs = match op {
                '+' => &lhs + &rhs,
                '-' => &lhs - &rhs,
                '*' => &lhs * &rhs,
                '/' => lhs
                    .checked_div(&rhs)
                    .ok_or(ParseError::DivisionByZero { column: rhs_col })?,
                '^' => {
                    let k = rhs
                        .as_integer()
                        .and_then(|k| k.to_i64())
                        .ok_or(ParseError::NonIntegerExponent { column: rhs_col })?;
                    if k.abs() > 1000 {
                        return Err(ParseError::Syntax {
                            column: rhs_col,
                            message: "exponent too large".into(),
                        });
                    }
                    if k < 0 && lhs.is_exact_zero() {
                        return Err(ParseError::DivisionByZero { column: rhs_col });
                    }
                    lhs.pow(k)
                }
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        let col = self.col;
        match std::mem::replace(&mut self.tok, Tok::End) {
            Tok::Op('-') => {
                self.bump()?;
                Ok(-self.expr(PREFIX_BP)?)
            }
            Tok::Op('+') => {
                self.bump()?;
                self.expr(PREFIX_BP)
            }
            Tok::Int(n) => {
                self.bump()?;
                Ok(Expr::rational(Rational::from_integer(n)))
            }
            Tok::Ratio(n, d) => {
                self.bump()?;
                Ok(Expr::rational(Rational::new(n, d)))
            }
            Tok::Decimal => Err(ParseError::Syntax {
                column: col,
                message: "decimal literals are not supported; use a rational such as 5/2".into(),
            }),
            Tok::Ident(name) => {
                self.bump()?;
                if self.tok == Tok::LParen {
                    let func = Func::from_name(&name)
                        .ok_or(ParseError::UnknownFunction { name, column: col })?;
                    self.bump()?;
                    let arg = self.expr(0)?;
                    self.expect_rparen()?;
                    Ok(Expr::apply(func, arg))
                } else {
                    Ok(Expr::var(&name))
                }
            }
            Tok::LParen => {
                self.bump()?;
                let e = self.expr(0)?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::End => self.syntax("unexpected end of input"),
            Tok::RParen => self.syntax("unexpected `)`"),
            Tok::Op(op) => self.syntax(format!("unexpected operator `{op}`")),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if self.tok != Tok::RParen {
            return self.syntax("expected `)`");
        }
        self.bump()
    }
}

pub(super) fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        lexer: Lexer {
            chars: text.chars().collect(),
            pos: 0,
        },
        tok: Tok::End,
        col: 1,
    };
    p.bump()?;
    let e = p.expr(0)?;
    match p.tok {
        Tok::End => Ok(e),
        _ => p.syntax("unexpected trailing input"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("1 + 2*3"), Expr::int(7));
        assert_eq!(p("2^3^2"), Expr::int(512));
        assert_eq!(p("-x^2"), -&p("x*x"));
        assert_eq!(p("x^-2"), p("1/(x*x)"));
        assert_eq!(p("x - y - z"), p("x - (y + z)"));
        assert_eq!(p("x / y * y"), p("x"));
        assert_eq!(p("x^(1+1)"), p("x*x"));
    }

    #[test]
    fn rational_literals() {
        assert_eq!(p("1/2"), Expr::ratio(1, 2));
        assert_eq!(p("-2"), Expr::int(-2));
        assert_eq!(p("1/2/3"), Expr::ratio(1, 6));
    }

    #[test]
    fn jet_names_are_identifiers() {
        let e = p("u_xx + u_xt2");
        let names: Vec<String> = e.free_vars().iter().map(|s| s.to_string()).collect();
        assert_eq!(names, vec!["u_xt2", "u_xx"]);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse("x + * y"),
            Err(ParseError::Syntax {
                column: 5,
                message: "unexpected operator `*`".into()
            })
        );
        assert_eq!(
            parse("tan(x)"),
            Err(ParseError::UnknownFunction {
                name: "tan".into(),
                column: 1
            })
        );
        assert_eq!(
            parse("x^y"),
            Err(ParseError::NonIntegerExponent { column: 3 })
        );
        assert_eq!(
            parse("x^1/2"),
            Err(ParseError::NonIntegerExponent { column: 3 })
        );
        assert!(matches!(parse("x^2.5"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("(x + 1"), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse("x/0"),
            Err(ParseError::DivisionByZero { .. })
        ));
    }

    #[test]
    fn print_parse_round_trip() {
        for s in [
            "u_x^2 - (u_x)*(u_x)",
            "(x + 1)/(x - 1) + 3/2*u",
            "-exp(-x*u)*sin(u_x)/(1 + x^2)",
            "1/x^3 - 2/(x*y)",
        ] {
            let e = p(s);
            assert_eq!(p(&e.to_string()), e, "{s} -> {e}");
        }
    }
}
