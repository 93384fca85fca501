use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::expr::{DiffExpr, JetIndex, Rational};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

impl Lexer {
    fn new(src: &str) -> Result<Self> {
        let chars: Vec<(usize, char)> = src.char_indices().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                toks.push((Tok::Num(s.parse().expect("digits")), pos));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                toks.push((Tok::Ident(s), pos));
            } else if "+-*/^()[],".contains(c) {
                toks.push((Tok::Op(c), pos));
                i += 1;
            } else {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("unexpected character '{c}'"),
                });
            }
        }
        toks.push((Tok::End, src.len()));
        Ok(Lexer { toks })
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    names: &'a BTreeMap<String, DiffExpr>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected '{c}'"))
        }
    }

    fn small_int(&mut self) -> Result<u32> {
        match self.peek().clone() {
            Tok::Num(n) => match n.to_u32() {
                Some(v) => {
                    self.bump();
                    Ok(v)
                }
                None => self.error("integer too large"),
            },
            _ => self.error("expected a non-negative integer"),
        }
    }

    fn expr(&mut self) -> Result<DiffExpr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc += self.term()?;
                }
                Tok::Op('-') => {
                    self.bump();
                    acc -= self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<DiffExpr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = acc * self.unary()?;
                }
                Tok::Op('/') => {
                    let pos = self.pos();
                    self.bump();
                    let divisor = self.unary()?;
                    let Some(c) = divisor.as_constant() else {
                        return Err(Error::NonPolynomial { pos });
                    };
                    if c.is_zero() {
                        return Err(Error::Syntax {
                            pos,
                            msg: "division by zero".into(),
                        });
                    }
                    acc = acc.scale(&c.recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<DiffExpr> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<DiffExpr> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let n = self.small_int()?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<DiffExpr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => Ok(DiffExpr::constant(Rational::from_integer(n))),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if name == "u" && *self.peek() == Tok::Op('[') {
                    self.bump();
                    let nt = self.small_int()?;
                    self.expect(',')?;
                    let nx = self.small_int()?;
                    self.expect(']')?;
                    return Ok(DiffExpr::jet(JetIndex::new(nt, nx)));
                }
                if let Some(e) = self.names.get(&name) {
                    return Ok(e.clone());
                }
                match name.as_str() {
                    "t" => Ok(DiffExpr::t()),
                    "x" => Ok(DiffExpr::x()),
                    _ => match parse_jet_name(&name) {
                        Some(j) => Ok(DiffExpr::jet(j)),
                        None => Err(Error::Syntax {
                            pos,
                            msg: format!("unknown identifier '{name}'"),
                        }),
                    },
                }
            }
            Tok::End => Err(Error::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            Tok::Op(c) => Err(Error::Syntax {
                pos,
                msg: format!("unexpected '{c}'"),
            }),
        }
    }
}

/// `u`, or `u_` followed by a word over `{t, x}` in any order.
pub fn parse_jet_name(name: &str) -> Option<JetIndex> {
    if name == "u" {
        return Some(JetIndex::U);
    }
    let rest = name.strip_prefix("u_")?;
    if rest.is_empty() {
        return None;
    }
    let mut j = JetIndex::U;
    for c in rest.chars() {
        match c {
            't' => j.nt += 1,
            'x' => j.nx += 1,
            _ => return None,
        }
    }
    Some(j)
}

/// Parses a differential polynomial.
///
/// Grammar: rational literals, `t`, `x`, `u`, jets `u_txx` or `u[1,2]`,
/// `+ - * /` (division by nonzero constants only), `^` with a non-negative
/// integer exponent, unary minus and parentheses.
pub fn parse_expr(text: &str) -> Result<DiffExpr> {
    parse_expr_with(text, &BTreeMap::new())
}

/// As [`parse_expr`], resolving extra identifiers from `names`.
pub fn parse_expr_with(text: &str, names: &BTreeMap<String, DiffExpr>) -> Result<DiffExpr> {
    let mut p = Parser {
        toks: Lexer::new(text)?.toks,
        at: 0,
        names,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}
