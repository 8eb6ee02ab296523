//! Pratt parser for component expressions.
//!
//! Grammar (loosest to tightest): `+ -` (left), `* /` (left), unary `-`,
//! `^` (right). Calls take exactly one argument. `pi` is a constant.

use super::expr::{BinOp, Expr, Func};
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn lex(src: &str, line: usize, col0: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent only when digits follow, so `2e` is not swallowed
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v: f64 = text
                .parse()
                .map_err(|_| ParseError::new(line, col, format!("malformed number `{text}`")))?;
            out.push(Token { tok: Tok::Num(v), col });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col,
            });
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => return Err(ParseError::new(line, col, format!("unexpected character `{c}`"))),
            };
            out.push(Token { tok, col });
            i += 1;
        }
    }
    out.push(Token {
        tok: Tok::End,
        col: col0 + chars.len(),
    });
    Ok(out)
}

const PREFIX_NEG_BP: u8 = 5;

fn infix_bp(op: char) -> Option<(u8, u8, BinOp)> {
    match op {
        '+' => Some((1, 2, BinOp::Add)),
        '-' => Some((1, 2, BinOp::Sub)),
        '*' => Some((3, 4, BinOp::Mul)),
        '/' => Some((3, 4, BinOp::Div)),
        '^' => Some((8, 7, BinOp::Pow)),
        _ => None,
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    line: usize,
    coords: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.line, col, msg)
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Num(v) => format!("number `{v}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("operator `{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of expression".into(),
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let t = self.next();
        let mut lhs = match t.tok {
            Tok::Num(v) => Expr::Num(v),
            Tok::Ident(name) => self.ident(name, t.col)?,
            Tok::LParen => {
                let inner = self.expr(0)?;
                self.expect_rparen()?;
                inner
            }
            Tok::Op('-') => Expr::neg(self.expr(PREFIX_NEG_BP)?),
            other => {
                return Err(self.err(t.col, format!("expected an operand, found {}", Self::describe(&other))))
            }
        };
        loop {
            let t = self.peek().clone();
            let op = match t.tok {
                Tok::Op(c) => c,
                Tok::End | Tok::RParen => break,
                other => {
                    return Err(self.err(t.col, format!("expected an operator, found {}", Self::describe(&other))))
                }
            };
            let (lbp, rbp, bin) = infix_bp(op).expect("lexer only emits known operators");
            if lbp < min_bp {
                break;
            }
            self.next();
            let rhs = self.expr(rbp)?;
            lhs = Expr::bin(bin, lhs, rhs);
        }
        Ok(lhs)
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let t = self.next();
        match t.tok {
            Tok::RParen => Ok(()),
            other => Err(self.err(t.col, format!("expected `)`, found {}", Self::describe(&other)))),
        }
    }

    fn ident(&mut self, name: String, col: usize) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::LParen {
            let func = Func::from_name(&name).ok_or_else(|| self.err(col, format!("unknown function `{name}`")))?;
            self.next();
            let arg = self.expr(0)?;
            self.expect_rparen()?;
            return Ok(Expr::call(func, arg));
        }
        if let Some(i) = self.coords.iter().position(|c| *c == name) {
            return Ok(Expr::Var(i));
        }
        if name == "pi" {
            return Ok(Expr::Num(std::f64::consts::PI));
        }
        if Func::from_name(&name).is_some() {
            return Err(self.err(col, format!("function `{name}` used without an argument")));
        }
        Err(self.err(col, format!("unknown identifier `{name}`")))
    }
}

/// Parse an expression whose first character sits at (`line`, `col`) of the
/// enclosing file (both 1-based).
pub fn parse_expr_at(src: &str, coords: &[String], line: usize, col: usize) -> Result<Expr, ParseError> {
    let toks = lex(src, line, col)?;
    let mut p = Parser {
        toks,
        pos: 0,
        line,
        coords,
    };
    if p.peek().tok == Tok::End {
        return Err(p.err(col, "empty expression"));
    }
    let e = p.expr(0)?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return Err(p.err(t.col, format!("unexpected {}", Parser::describe(&t.tok))));
    }
    Ok(e)
}

pub fn parse_expr(src: &str, coords: &[String]) -> Result<Expr, ParseError> {
    parse_expr_at(src, coords, 1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn precedence_and_associativity() {
        let c = names(&["x", "y"]);
        let x = || Expr::Var(0);
        let y = || Expr::Var(1);
        assert_eq!(
            parse_expr("x + y * 2", &c).unwrap(),
            Expr::add(x(), Expr::mul(y(), Expr::Num(2.0)))
        );
        assert_eq!(
            parse_expr("x ^ y ^ 2", &c).unwrap(),
            Expr::pow(x(), Expr::pow(y(), Expr::Num(2.0)))
        );
        assert_eq!(parse_expr("-x ^ 2", &c).unwrap(), Expr::neg(Expr::pow(x(), Expr::Num(2.0))));
        assert_eq!(parse_expr("-x * y", &c).unwrap(), Expr::mul(Expr::neg(x()), y()));
        assert_eq!(parse_expr("x - y - 1", &c).unwrap(), Expr::sub(Expr::sub(x(), y()), Expr::Num(1.0)));
        assert_eq!(parse_expr("2 ^ -x", &c).unwrap(), Expr::pow(Expr::Num(2.0), Expr::neg(x())));
    }

    #[test]
    fn sol_component() {
        let c = names(&["x", "y", "z"]);
        let e = parse_expr("exp(2*z)", &c).unwrap();
        assert_eq!(e, Expr::call(Func::Exp, Expr::mul(Expr::Num(2.0), Expr::Var(2))));
        let e = parse_expr("sin(u)^2", &names(&["u", "v"])).unwrap();
        assert!(matches!(e, Expr::Bin(BinOp::Pow, ref a, _) if matches!(**a, Expr::Call(Func::Sin, _))));
    }

    #[test]
    fn stray_operator_reports_column() {
        let err = parse_expr("1+*2", &[]).unwrap_err();
        assert_eq!((err.line, err.col), (1, 3));
    }

    #[test]
    fn rejects_unknown_names() {
        let c = names(&["x"]);
        assert!(parse_expr("foo(x)", &c).unwrap_err().message.contains("unknown function"));
        assert!(parse_expr("x + q", &c).unwrap_err().message.contains("unknown identifier"));
        assert!(parse_expr("sin + 1", &c).is_err());
    }

    #[test]
    fn negative_corpus() {
        let c = names(&["x", "y"]);
        for bad in [
            "", "(", ")", "x +", "* x", "x y", "2x", "sin x", "sin()", "(x", "x)", "x ** 2", "x $ 2", "1..2", "exp(x,y)",
            "cos(x))", "+x", "x ^", "sqrt(",
        ] {
            assert!(parse_expr(bad, &c).is_err(), "accepted `{bad}`");
        }
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_expr("1.5e-3", &[]).unwrap(), Expr::Num(1.5e-3));
        assert_eq!(parse_expr(".25", &[]).unwrap(), Expr::Num(0.25));
        assert_eq!(parse_expr("pi", &[]).unwrap(), Expr::Num(std::f64::consts::PI));
    }
}
