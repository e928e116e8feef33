//! Recursive-descent parser for update expressions.
//!
//! ```text
//! expr   = term { ("+" | "-") term }
//! term   = unary { ("*" | "/") unary }
//! unary  = ("-" | "+") unary | power
//! power  = atom [ "^" integer ]
//! atom   = integer | ident [ "[" ("+" | "-") integer "]" | "[" "0" "]" ] | "(" expr ")"
//! ```
//!
//! Parsing produces a rational expression `num / den` in [`MPoly`].

use num_bigint::BigInt;
use num_rational::BigRational;

use super::mpoly::{MPoly, Symbol};
use super::MappingError;

/// How an identifier resolves.
pub(crate) enum IdentKind {
    Param,
    Stream,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    end: usize,
}

fn lex(src: &str) -> Result<Lexer, MappingError> {
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
            let s: String = chars[start..i].iter().map(|(_, c)| *c).collect();
            toks.push((Tok::Num(s.parse().expect("digits")), pos));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| *c).collect();
            toks.push((Tok::Ident(s), pos));
        } else if "+-*/^()[]".contains(c) {
            toks.push((Tok::Op(c), pos));
            i += 1;
        } else {
            return Err(MappingError::Syntax {
                position: pos,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(Lexer {
        toks,
        end: src.len(),
    })
}

struct Parser<'a, R> {
    lx: Lexer,
    at: usize,
    resolve: &'a R,
}

type Frac = (MPoly, MPoly);

impl<'a, R> Parser<'a, R>
where
    R: Fn(&str) -> Option<IdentKind>,
{
    fn pos(&self) -> usize {
        self.lx
            .toks
            .get(self.at)
            .map(|t| t.1)
            .unwrap_or(self.lx.end)
    }

    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.at).map(|t| &t.0)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, MappingError> {
        Err(MappingError::Syntax {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Frac, MappingError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let r = self.term()?;
                acc = (acc.0.mul(&r.1).add(&r.0.mul(&acc.1)), acc.1.mul(&r.1));
            } else if self.eat('-') {
                let r = self.term()?;
                acc = (acc.0.mul(&r.1).sub(&r.0.mul(&acc.1)), acc.1.mul(&r.1));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Frac, MappingError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let r = self.unary()?;
                acc = (acc.0.mul(&r.0), acc.1.mul(&r.1));
            } else if self.peek() == Some(&Tok::Op('/')) {
                let position = self.pos();
                self.at += 1;
                let r = self.unary()?;
                if r.0.is_zero() {
                    return Err(MappingError::DivisionByZeroPolynomial { position });
                }
                acc = (acc.0.mul(&r.1), acc.1.mul(&r.0));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Frac, MappingError> {
        if self.eat('-') {
            let (n, d) = self.unary()?;
            Ok((n.neg(), d))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Frac, MappingError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let e = match self.peek() {
            Some(Tok::Num(k)) => k.clone(),
            _ => return self.err("expected a positive integer exponent"),
        };
        let e: u32 = match u32::try_from(e) {
            Ok(e) if e >= 1 => e,
            _ => return self.err("exponent must be a positive integer"),
        };
        self.at += 1;
        Ok((base.0.pow(e), base.1.pow(e)))
    }

    fn atom(&mut self) -> Result<Frac, MappingError> {
        let position = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(k)) => {
                self.at += 1;
                Ok((MPoly::constant(BigRational::from_integer(k)), MPoly::one()))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                let offset = if self.eat('[') {
                    let sign = if self.eat('-') {
                        -1
                    } else {
                        self.eat('+');
                        1
                    };
                    let k = match self.peek() {
                        Some(Tok::Num(k)) => i64::try_from(k.clone()).ok(),
                        _ => None,
                    };
                    let Some(k) = k else {
                        return self.err("expected an integer offset");
                    };
                    self.at += 1;
                    if !self.eat(']') {
                        return self.err("expected ']'");
                    }
                    Some(sign * k)
                } else {
                    None
                };
                let sym = match (name.as_str(), (self.resolve)(&name), offset) {
                    ("x", _, None) => Symbol::X,
                    ("y", _, None) => Symbol::Y,
                    (_, Some(IdentKind::Param), None) => Symbol::Param(name),
                    (_, Some(IdentKind::Stream), off) => Symbol::Stream {
                        name,
                        offset: off.unwrap_or(0),
                    },
                    (_, Some(IdentKind::Param), Some(_)) | ("x" | "y", None, Some(_)) => {
                        return Err(MappingError::Syntax {
                            position,
                            message: format!("{name} is not a stream and cannot be indexed"),
                        })
                    }
                    (_, None, _) => return Err(MappingError::UnboundSymbol { name, position }),
                };
                Ok((MPoly::symbol(sym), MPoly::one()))
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(Tok::Op(c)) => self.err(format!("unexpected {c:?}")),
            None => self.err("unexpected end of expression"),
        }
    }
}

/// Parses `src` into an unnormalized pair `(num, den)`.
pub(crate) fn parse_fraction<R>(src: &str, resolve: &R) -> Result<(MPoly, MPoly), MappingError>
where
    R: Fn(&str) -> Option<IdentKind>,
{
    let lx = lex(src)?;
    let mut p = Parser { lx, at: 0, resolve };
    let out = p.expr()?;
    if p.at < p.lx.toks.len() {
        return p.err("trailing input");
    }
    if out.1.is_zero() {
        return Err(MappingError::DivisionByZeroPolynomial { position: 0 });
    }
    Ok(out)
}
